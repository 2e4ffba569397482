//! Inner and outer polytope approximations of the state space.

mod hierarchy;
pub mod hull;
pub mod io;
mod membership;
mod mub;
mod rational;
mod refine;
mod shrink;
mod sphere;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{basis_element, HermitianOperator, DEFAULT_TOL};

pub use hierarchy::hierarchy_size;
pub use hull::{HullFacet, HullOptions};
pub use membership::{contains, gauge};
pub use mub::{is_prime, mub_bases, mub_polytope, mub_shrinking_factor, MUB_TUPLE_CAP};
pub use rational::{bloch_to_operator, rational_pure_states};
pub use refine::{refine_polytope, RefineOutcome, RefineStep};
pub use shrink::{shrinking_factor, shrinking_report, ShrinkingReport, TIE_TOL};
pub use sphere::{fibonacci_sphere, icosphere, polygon, sphere_polytope, SphereKind};

/// Vertices must have unit trace within this tolerance.
pub const TRACE_TOL: f64 = 1e-12;
/// Vertices may violate a facet inequality by at most this much.
pub const FACET_TOL: f64 = 1e-9;
/// A vertex within this distance of a facet counts as lying on it.
pub const INCIDENCE_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolytopeKind {
    /// Convex hull contained in the state space (vertices are states).
    Inner,
    /// Convex hull containing the state space (vertices may fail positivity).
    Outer,
}

/// A facet `Tr(F rho) <= b`, normalized so that `max |coords(F)| = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub normal: HermitianOperator,
    pub offset: f64,
}

impl Facet {
    pub fn new(normal: HermitianOperator, offset: f64) -> Result<Self> {
        let scale = normal.coords().iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if scale == 0.0 || !offset.is_finite() {
            return Err(Error::InvalidPolytope("facet with zero normal".into()));
        }
        Ok(Self { normal: normal.scale(1.0 / scale), offset: offset / scale })
    }

    /// `Tr(F rho) - b`; positive outside the facet's half-space.
    pub fn slack(&self, rho: &HermitianOperator) -> f64 {
        self.normal.inner(rho) - self.offset
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatePolytope {
    dim: usize,
    vertices: Vec<HermitianOperator>,
    facets: Option<Vec<Facet>>,
    shrinking_factor: Option<f64>,
    kind: PolytopeKind,
    provenance: String,
    exact_bloch: Option<Vec<[BigRational; 3]>>,
}

impl StatePolytope {
    /// Validates unit trace of every vertex and, for inner polytopes, positivity.
    pub fn new(vertices: Vec<HermitianOperator>, kind: PolytopeKind, provenance: impl Into<String>) -> Result<Self> {
        let dim = vertices.first().map(|v| v.dim()).ok_or_else(|| Error::InvalidPolytope("no vertices".into()))?;
        for (i, v) in vertices.iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::InvalidPolytope(format!("vertex {i} has dimension {}, expected {dim}", v.dim())));
            }
            let tr = v.trace();
            if (tr - 1.0).abs() > TRACE_TOL {
                return Err(Error::InvalidPolytope(format!("vertex {i} has trace {tr}")));
            }
            if kind == PolytopeKind::Inner {
                let e = v.min_eigenvalue();
                if e < -DEFAULT_TOL {
                    return Err(Error::InvalidPolytope(format!("vertex {i} has eigenvalue {e:.3e}")));
                }
            }
        }
        Ok(Self { dim, vertices, facets: None, shrinking_factor: None, kind, provenance: provenance.into(), exact_bloch: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[HermitianOperator] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn facets(&self) -> Option<&[Facet]> {
        self.facets.as_deref()
    }

    pub fn shrinking_factor(&self) -> Option<f64> {
        self.shrinking_factor
    }

    pub fn kind(&self) -> PolytopeKind {
        self.kind
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Exact Bloch vectors of the vertices, when every vertex is a rational qubit state.
    pub fn exact_bloch(&self) -> Option<&[[BigRational; 3]]> {
        self.exact_bloch.as_deref()
    }

    pub(crate) fn set_exact_bloch(&mut self, v: Vec<[BigRational; 3]>) {
        debug_assert_eq!(v.len(), self.vertices.len());
        self.exact_bloch = Some(v);
    }

    /// Attaches facets after checking that every vertex satisfies them and that
    /// the maximally mixed state is strictly interior.
    pub fn with_facets(mut self, facets: Vec<Facet>) -> Result<Self> {
        let d = self.dim as f64;
        for (i, f) in facets.iter().enumerate() {
            if f.normal.dim() != self.dim {
                return Err(Error::InvalidPolytope(format!("facet {i} has the wrong dimension")));
            }
            if f.normal.trace() / d >= f.offset - FACET_TOL {
                return Err(Error::InvalidPolytope(format!("maximally mixed state is not interior to facet {i}")));
            }
            if let Some((j, s)) = self
                .vertices
                .iter()
                .map(|v| f.slack(v))
                .enumerate()
                .find(|(_, s)| *s > FACET_TOL)
            {
                return Err(Error::InvalidPolytope(format!("vertex {j} violates facet {i} by {s:.3e}")));
            }
        }
        self.facets = Some(facets);
        Ok(self)
    }

    pub fn with_shrinking_factor(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::param(format!("shrinking factor {r} is outside (0, 1]")));
        }
        self.shrinking_factor = Some(r);
        Ok(self)
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// Drops facets and shrinking factor (e.g. after the vertex set changes).
    pub fn without_facets(mut self) -> Self {
        self.facets = None;
        self.shrinking_factor = None;
        self
    }

    /// Traceless coordinates (generalized Gell-Mann components) of each vertex.
    pub fn vertex_coords(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| v.coords()[1..].to_vec()).collect()
    }

    /// Same polytope under `rho -> U rho U^dagger`.
    pub fn conjugated(&self, u: &nalgebra::DMatrix<crate::quantum::C64>) -> Result<Self> {
        let map = |h: &HermitianOperator| HermitianOperator::hermitian_part(u * h.matrix() * u.adjoint());
        let vertices = self.vertices.iter().map(map).collect();
        let mut out = StatePolytope::new(vertices, self.kind, format!("{}|conjugated", self.provenance))?;
        if let Some(f) = &self.facets {
            out.facets = Some(f.iter().map(|f| Facet { normal: map(&f.normal), offset: f.offset }).collect());
        }
        out.shrinking_factor = self.shrinking_factor;
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HullMode {
    Float,
    /// Exact rational arithmetic; needs exact qubit vertices.
    Exact,
}

#[derive(Clone, Copy, Debug)]
pub struct FacetOptions {
    pub mode: HullMode,
    /// Maximum vertex count; `None` picks the default for the dimension.
    pub vertex_cap: Option<usize>,
    pub hull: HullOptions,
}

impl Default for FacetOptions {
    fn default() -> Self {
        Self { mode: HullMode::Float, vertex_cap: None, hull: HullOptions::default() }
    }
}

/// Unlimited for qubits, 150 otherwise.
pub fn default_vertex_cap(d: usize) -> Option<usize> {
    if d == 2 {
        None
    } else {
        Some(150)
    }
}

/// Computes the complete facet list of the hull of `p` in the trace-one slice.
pub fn facet_enumeration(p: &StatePolytope, opts: &FacetOptions) -> Result<StatePolytope> {
    let cap = opts.vertex_cap.or(default_vertex_cap(p.dim));
    if let Some(cap) = cap {
        if p.len() > cap {
            return Err(Error::CapExceeded { what: "vertex count", value: p.len() as u128, cap: cap as u128 });
        }
    }
    let facets = match opts.mode {
        HullMode::Float => {
            let pts = p.vertex_coords();
            let mut raw = hull::convex_hull_facets(&pts, &opts.hull)?;
            hull::refit_facets(&pts, &mut raw);
            raw.into_iter()
                .map(|f| {
                    let op = f
                        .normal
                        .iter()
                        .enumerate()
                        .fold(HermitianOperator::zeros(p.dim), |acc, (j, &a)| &acc + &basis_element(p.dim, j + 1).scale(a));
                    Facet::new(op, f.offset)
                })
                .collect::<Result<Vec<_>>>()?
        }
        HullMode::Exact => {
            let exact = p
                .exact_bloch()
                .ok_or_else(|| Error::param("exact facet enumeration needs exact qubit vertices"))?;
            let pts: Vec<Vec<BigRational>> = exact.iter().map(|v| v.to_vec()).collect();
            let raw = hull::convex_hull_facets(&pts, &opts.hull)?;
            raw.into_iter()
                .map(|f| {
                    let a: Vec<f64> = f.normal.iter().map(hull::HullScalar::to_f64).collect();
                    let b = hull::HullScalar::to_f64(&f.offset);
                    Facet::new(bloch_to_operator(0.0, [a[0], a[1], a[2]]).scale(2.0), b)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    p.clone().without_facets().with_facets(facets)
}

/// Facets plus shrinking factor in one call.
pub fn analyze(p: &StatePolytope, opts: &FacetOptions) -> Result<(StatePolytope, ShrinkingReport)> {
    let with = facet_enumeration(p, opts)?;
    let report = shrinking_report(&with)?;
    let out = with.with_shrinking_factor(report.r)?;
    Ok((out, report))
}

/// The outer set `Lambda_{1/r}(rho_lambda)` whose hull contains every state.
pub fn outer_from_inner(p: &StatePolytope) -> Result<StatePolytope> {
    let r = p.shrinking_factor().ok_or_else(|| Error::param("outer_from_inner needs a shrinking factor"))?;
    if p.kind() != PolytopeKind::Inner {
        return Err(Error::param("outer_from_inner needs an inner polytope"));
    }
    let vertices = p.vertices().iter().map(|v| v.depolarized(1.0 / r)).collect();
    let out = StatePolytope::new(vertices, PolytopeKind::Outer, format!("outer({})", p.provenance()))?;
    out.with_shrinking_factor(r)
}

/// Appends vertices, skipping any within `1e-9` of an existing one.
pub fn with_added_vertices(p: &StatePolytope, extra: Vec<HermitianOperator>, provenance: impl Into<String>) -> Result<StatePolytope> {
    let mut vertices = p.vertices().to_vec();
    for v in extra {
        if !vertices.iter().any(|w| w.distance(&v) < 1e-9) {
            vertices.push(v);
        }
    }
    StatePolytope::new(vertices, p.kind(), provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_pure_state, seeded};

    fn octahedron() -> StatePolytope {
        rational_pure_states(2, 2).unwrap()
    }

    #[test]
    fn octahedron_facets_and_r() {
        let (p, rep) = analyze(&octahedron(), &FacetOptions::default()).unwrap();
        assert_eq!(p.facets().unwrap().len(), 8);
        assert!((rep.r - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(rep.argmin.len(), 8);
        let exact = FacetOptions { mode: HullMode::Exact, ..Default::default() };
        let (q, rep2) = analyze(&octahedron(), &exact).unwrap();
        assert_eq!(q.facets().unwrap().len(), 8);
        assert!((rep2.r - rep.r).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_trace_and_nonpositive_inner_vertex() {
        let bad = HermitianOperator::identity(2).scale(0.45);
        let err = StatePolytope::new(vec![HermitianOperator::maximally_mixed(2), bad], PolytopeKind::Inner, "t").unwrap_err();
        assert!(err.to_string().contains("vertex 1"));
        let neg = HermitianOperator::from_real(&[vec![1.5, 0.0], vec![0.0, -0.5]]).unwrap();
        assert!(StatePolytope::new(vec![neg.clone()], PolytopeKind::Inner, "t").is_err());
        assert!(StatePolytope::new(vec![neg], PolytopeKind::Outer, "t").is_ok());
    }

    #[test]
    fn outer_octahedron_has_bloch_length_sqrt3() {
        let (p, _) = analyze(&octahedron(), &FacetOptions::default()).unwrap();
        let o = outer_from_inner(&p).unwrap();
        assert_eq!(o.kind(), PolytopeKind::Outer);
        for v in o.vertices() {
            let c = v.coords();
            let len = (c[1..].iter().map(|x| x * x).sum::<f64>() * 2.0).sqrt();
            assert!((len - 3f64.sqrt()).abs() < 1e-12);
        }
        let id = p.clone().with_shrinking_factor(1.0).unwrap();
        assert_eq!(outer_from_inner(&id).unwrap().vertices(), p.vertices());
    }

    #[test]
    fn random_qubit_polytope_facets_cover_every_vertex() {
        let mut rng = seeded(5);
        let vs: Vec<_> = (0..20).map(|_| random_pure_state(&mut rng, 2)).collect();
        let p = StatePolytope::new(vs, PolytopeKind::Inner, "random").unwrap();
        let q = facet_enumeration(&p, &FacetOptions::default()).unwrap();
        // Pure states are all extreme, so the hull is a simplicial 3-polytope: F = 2V - 4.
        assert_eq!(q.facets().unwrap().len(), 36);
    }

    #[test]
    fn vertex_cap_applies() {
        let p = rational_pure_states(3, 2).unwrap();
        let opts = FacetOptions { vertex_cap: Some(10), ..Default::default() };
        assert!(matches!(facet_enumeration(&p, &opts), Err(Error::CapExceeded { .. })));
    }
}
