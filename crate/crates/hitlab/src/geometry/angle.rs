use crate::hit::HitSpec;
use crate::su2kit::total_spin_generators;
use crate::tensorcore::linalg::apply_local;
use crate::{HitError, Result, C64};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleReport {
    pub cos_theta: f64,
    pub theta: f64,
    /// Interior angle α = π − θ.
    pub alpha: f64,
}

/// Angle between the tangent vectors X(e₁)A and X(e₂)A, with X(e) the
/// total-spin generators on a leg's slots.
pub fn vertex_angle(spec: &HitSpec, e1: usize, e2: usize) -> Result<AngleReport> {
    spec.validate()?;
    if spec.q < 3 {
        return Err(HitError::Spec("angles need q >= 3".into()));
    }
    if e1 >= spec.q || e2 >= spec.q {
        return Err(HitError::Region(format!("legs must lie in 0..{}", spec.q)));
    }
    let a = spec.vertex_tensor()?.into_data();
    let dims = vec![1usize << spec.k; spec.q];
    let gens = total_spin_generators(spec.k);
    let grasp = |leg: usize| -> Result<Vec<Vec<C64>>> { gens.components().iter().map(|g| apply_local(&a, &dims, leg, g)).collect() };
    let x1 = grasp(e1)?;
    let x2 = grasp(e2)?;
    let inner = |u: &[Vec<C64>], v: &[Vec<C64>]| -> C64 { u.iter().zip(v).flat_map(|(p, r)| p.iter().zip(r).map(|(s, t)| s.conj() * t)).sum() };
    let n1 = inner(&x1, &x1).re.sqrt();
    let n2 = inner(&x2, &x2).re.sqrt();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(HitError::Spec("a grasped leg carries spin 0 only".into()));
    }
    let cos_theta = (inner(&x1, &x2).re / (n1 * n2)).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    Ok(AngleReport {
        cos_theta,
        theta,
        alpha: PI - theta,
    })
}

/// Sum of interior angles of a polygon whose corner `i` collects
/// `pattern[i]` copies of α, and its deficit (n−2)π − sum.
pub fn polygon_angle_sum(alpha: f64, pattern: &[usize]) -> Result<(f64, f64)> {
    if pattern.len() < 3 {
        return Err(HitError::Spec("a polygon needs at least three corners".into()));
    }
    let sum = pattern.iter().map(|&m| m as f64 * alpha).sum::<f64>();
    Ok((sum, (pattern.len() as f64 - 2.0) * PI - sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hit::{make_left_right, make_star};

    #[test]
    fn example_two_angle() {
        let spec = make_left_right(3).unwrap();
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            let r = vertex_angle(&spec, a, b).unwrap();
            assert!((r.cos_theta + 0.5).abs() < 1e-12);
            assert!((r.alpha - PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn star_angles() {
        // opposite legs carry anti-parallel spins, neighbours are orthogonal
        let spec = make_star(4, 1).unwrap();
        assert!((vertex_angle(&spec, 0, 2).unwrap().cos_theta + 1.0).abs() < 1e-12);
        assert!(vertex_angle(&spec, 0, 1).unwrap().cos_theta.abs() < 1e-12);
    }

    #[test]
    fn polygon_sums() {
        let a = PI / 3.0;
        let mut dodecagon = vec![2; 9];
        dodecagon.extend([3; 3]);
        let (s, d) = polygon_angle_sum(a, &dodecagon).unwrap();
        assert!((s - 9.0 * PI).abs() < 1e-12);
        assert!((d - PI).abs() < 1e-12);
        let (s, d) = polygon_angle_sum(a, &[1, 1, 1]).unwrap();
        assert!((s - PI).abs() < 1e-12 && d.abs() < 1e-12);
        let (_, d) = polygon_angle_sum(PI / 2.0, &[1; 4]).unwrap();
        assert!(d.abs() < 1e-12);
        assert!(polygon_angle_sum(a, &[1, 1]).is_err());
    }
}
