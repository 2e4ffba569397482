//! Qubit polytopes from point sets on the Bloch sphere.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurements::{bloch_operator, golden_angle};
use crate::polytope::{PolytopeKind, StatePolytope};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SphereKind {
    /// Subdivision level of the icosahedron (12, 42, 162, 642, ... vertices).
    Icosphere,
    /// Number of points of a Fibonacci lattice.
    Fibonacci,
    /// Number of sides of a regular polygon in the x-z plane.
    Polygon,
}

pub fn sphere_polytope(kind: SphereKind, size: usize) -> Result<StatePolytope> {
    match kind {
        SphereKind::Icosphere => icosphere(size),
        SphereKind::Fibonacci => fibonacci_sphere(size),
        SphereKind::Polygon => polygon(size),
    }
}

fn from_bloch(points: &[[f64; 3]], provenance: String) -> Result<StatePolytope> {
    let vertices = points.iter().map(|&n| bloch_operator(1.0, n)).collect();
    StatePolytope::new(vertices, PolytopeKind::Inner, provenance)
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Icosahedron subdivided `level` times, with `10 * 4^level + 2` vertices.
pub fn icosphere(level: usize) -> Result<StatePolytope> {
    if level > 6 {
        return Err(Error::param(format!("icosphere level {level} is too large (max 6)")));
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .into_iter()
    .map(unit)
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(unit([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    from_bloch(&verts, format!("icosphere(level={level})"))
}

/// `n` points of the spherical Fibonacci lattice.
pub fn fibonacci_sphere(n: usize) -> Result<StatePolytope> {
    if n < 4 {
        return Err(Error::param(format!("a Fibonacci sphere needs at least 4 points, got {n}")));
    }
    let phi = golden_angle();
    let pts: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let a = i as f64 * phi;
            [r * a.cos(), r * a.sin(), z]
        })
        .collect();
    from_bloch(&pts, format!("fibonacci-sphere(n={n})"))
}

/// Regular `n`-gon of pure states in the x-z plane. The polytope is not full
/// dimensional; its in-plane shrinking factor `cos(pi/n)` is attached directly.
pub fn polygon(n: usize) -> Result<StatePolytope> {
    if n < 3 {
        return Err(Error::param(format!("a polygon needs at least 3 sides, got {n}")));
    }
    let pts: Vec<[f64; 3]> = (0..n)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / n as f64;
            [a.sin(), 0.0, a.cos()]
        })
        .collect();
    from_bloch(&pts, format!("polygon(n={n})"))?.with_shrinking_factor((PI / n as f64).cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{analyze, FacetOptions};

    #[test]
    fn icosphere_vertex_counts() {
        let counts: Vec<usize> = (0..4).map(|l| icosphere(l).unwrap().len()).collect();
        assert_eq!(counts, vec![12, 42, 162, 642]);
    }

    #[test]
    fn icosahedron_shrinking_factor() {
        let (p, rep) = analyze(&icosphere(0).unwrap(), &FacetOptions::default()).unwrap();
        assert_eq!(p.facets().unwrap().len(), 20);
        // Inradius of the unit-circumradius icosahedron.
        let inr = ((5.0 + 2.0 * 5f64.sqrt()) / 15.0).sqrt();
        assert!((rep.r - inr).abs() < 1e-12, "{} vs {inr}", rep.r);
    }

    #[test]
    fn polygon_r_and_degeneracy() {
        let p = polygon(4).unwrap();
        assert!((p.shrinking_factor().unwrap() - (PI / 4.0).cos()).abs() < 1e-15);
        assert!(analyze(&p, &FacetOptions::default()).is_err());
        assert!(polygon(2).is_err());
    }

    #[test]
    fn fibonacci_sphere_is_full_dimensional() {
        let (p, rep) = analyze(&fibonacci_sphere(50).unwrap(), &FacetOptions::default()).unwrap();
        assert_eq!(p.facets().unwrap().len(), 2 * 50 - 4);
        assert!(rep.r > 0.8 && rep.r < 1.0);
    }
}
