use crate::error::{Error, Result};
use crate::polytope::{analyze, shrinking_report, with_added_vertices, FacetOptions, StatePolytope, TIE_TOL};
use crate::quantum::HermitianOperator;

#[derive(Clone, Debug, PartialEq)]
pub struct RefineStep {
    pub vertices: usize,
    pub facets: usize,
    pub r: f64,
}

#[derive(Clone, Debug)]
pub struct RefineOutcome {
    /// The last polytope whose facets were computed successfully.
    pub polytope: StatePolytope,
    /// Entry 0 describes the input; entry `s` the polytope after step `s`.
    pub history: Vec<RefineStep>,
    /// Set when a step failed (e.g. a cap was exceeded); earlier steps are kept.
    pub stopped: Option<String>,
}

impl RefineOutcome {
    pub fn steps_done(&self) -> usize {
        self.history.len() - 1
    }
}

/// Adds, for every facet attaining the minimal ratio, the projectors onto an
/// orthonormal basis of its top eigenspace, then recomputes facets and `r`.
pub fn refine_polytope(p: &StatePolytope, steps: usize, opts: &FacetOptions) -> Result<RefineOutcome> {
    let mut current = match p.facets() {
        Some(_) if p.shrinking_factor().is_some() => p.clone(),
        _ => analyze(p, opts)?.0,
    };
    let mut history = vec![RefineStep {
        vertices: current.len(),
        facets: current.facets().map_or(0, |f| f.len()),
        r: current.shrinking_factor().expect("analyzed"),
    }];
    let base = p.provenance().to_string();
    for step in 1..=steps {
        let report = shrinking_report(&current)?;
        let facets = current.facets().expect("analyzed");
        let extra: Vec<HermitianOperator> = report
            .argmin
            .iter()
            .flat_map(|&i| facets[i].normal.top_eigenvectors(TIE_TOL))
            .map(|v| HermitianOperator::projector(&v))
            .collect();
        let grown = with_added_vertices(&current, extra, format!("{base}|refine({step})"))?;
        match analyze(&grown, opts) {
            Ok((next, rep)) => {
                history.push(RefineStep { vertices: next.len(), facets: next.facets().map_or(0, |f| f.len()), r: rep.r });
                current = next;
            }
            Err(e @ (Error::CapExceeded { .. } | Error::Degenerate(_))) => {
                return Ok(RefineOutcome { polytope: current, history, stopped: Some(format!("step {step}: {e}")) });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(RefineOutcome { polytope: current, history, stopped: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::rational_pure_states;

    #[test]
    fn octahedron_refines_to_cube_octahedron() {
        let p = rational_pure_states(2, 2).unwrap();
        let out = refine_polytope(&p, 1, &FacetOptions::default()).unwrap();
        assert_eq!(out.steps_done(), 1);
        // One new vertex per octahedron face: the 8 cube corners.
        assert_eq!(out.history[1].vertices, 14);
        assert!(out.history[1].r > out.history[0].r);
    }
}
