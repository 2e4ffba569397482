use crate::error::{Error, Result};
use crate::polytope::StatePolytope;
use crate::quantum::HermitianOperator;

/// Facets whose ratio lies within this of the minimum count as tied.
pub const TIE_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct ShrinkingReport {
    pub r: f64,
    /// Indices of the facets attaining the minimum (within [`TIE_TOL`]).
    pub argmin: Vec<usize>,
    /// Per-facet ratio `(d b - Tr F) / (d lambda_max(F) - Tr F)`.
    pub ratios: Vec<f64>,
    /// Pure state on the top eigenvector of the first minimizing facet; it leaves the
    /// hull as soon as it is depolarized with visibility above `r`.
    pub worst_state: HermitianOperator,
}

pub fn shrinking_factor(p: &StatePolytope) -> Result<f64> {
    shrinking_report(p).map(|r| r.r)
}

pub fn shrinking_report(p: &StatePolytope) -> Result<ShrinkingReport> {
    let facets = p.facets().ok_or_else(|| Error::param("shrinking factor needs facets"))?;
    if facets.is_empty() {
        return Err(Error::InvalidPolytope("empty facet list".into()));
    }
    let d = p.dim() as f64;
    let mut ratios = Vec::with_capacity(facets.len());
    for (i, f) in facets.iter().enumerate() {
        let tr = f.normal.trace();
        let den = d * f.normal.max_eigenvalue() - tr;
        if den <= 1e-12 {
            return Err(Error::InvalidPolytope(format!("facet {i} has a degenerate normal")));
        }
        ratios.push((d * f.offset - tr) / den);
    }
    let r = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin: Vec<usize> = (0..ratios.len()).filter(|&i| ratios[i] <= r + TIE_TOL).collect();
    let top = facets[argmin[0]].normal.top_eigenvectors(1e-9);
    let worst_state = HermitianOperator::projector(&top[0]);
    Ok(ShrinkingReport { r, argmin, ratios, worst_state })
}
