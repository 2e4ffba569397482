use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Vertex count `((t-1)^(2d-1) - 1) / (t - 2)` and shrinking-factor lower bound
/// `2 cos^(4(d-1))(pi / 2t) - 1` of the level-`t` polytope hierarchy.
pub fn hierarchy_size(t: u32, d: u32) -> Result<(u128, f64)> {
    if t < 3 {
        return Err(Error::param(format!("hierarchy level must be at least 3, got {t}")));
    }
    if d < 2 {
        return Err(Error::param(format!("dimension must be at least 2, got {d}")));
    }
    let base = (t - 1) as u128;
    let n = base
        .checked_pow(2 * d - 1)
        .map(|p| (p - 1) / (t as u128 - 2))
        .ok_or(Error::CapExceeded { what: "hierarchy vertex count", value: u128::MAX, cap: u128::MAX })?;
    let r = 2.0 * (PI / (2.0 * t as f64)).cos().powi(4 * (d as i32 - 1)) - 1.0;
    Ok((n, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        let (n, r) = hierarchy_size(3, 2).unwrap();
        assert_eq!(n, 7);
        assert!((r - 0.125).abs() < 1e-15);
        let (n, r) = hierarchy_size(4, 2).unwrap();
        assert_eq!(n, 13);
        assert!((r - (2.0 * (PI / 8.0).cos().powi(4) - 1.0)).abs() < 1e-15);
        assert_eq!(hierarchy_size(3, 3).unwrap().0, 31);
        assert!(hierarchy_size(2, 2).is_err());
    }
}
