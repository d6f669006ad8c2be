//! Projection onto the ℓ1 ball and the proximity operator of the ℓ∞ norm.

use crate::linalg::{self, Vector};

/// Euclidean projection of `x` onto `{z : ||z||_1 <= radius}`.
///
/// Points already inside the ball are returned unchanged; otherwise the result is
/// `sign(x) * max(|x| - t, 0)` with the threshold `t` read off the sorted magnitudes.
pub fn project_l1_ball(x: &Vector, radius: f64) -> Vector {
    assert!(radius > 0.0, "l1 ball radius must be positive");
    if linalg::l1_norm(x) <= radius {
        return x.clone();
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut threshold = 0.0;
    for (k, &m) in mags.iter().enumerate() {
        cumsum += m;
        let t = (cumsum - radius) / (k + 1) as f64;
        if m > t {
            threshold = t;
        } else {
            break;
        }
    }
    x.map(|v| v.signum() * (v.abs() - threshold).max(0.0))
}

/// `prox_{gamma ||.||_inf}(x) = x - gamma * P_{B1}(x / gamma)` (Moreau decomposition).
pub fn prox_linf(x: &Vector, gamma: f64) -> Vector {
    assert!(gamma > 0.0, "prox step must be positive");
    x - project_l1_ball(&(x / gamma), 1.0) * gamma
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_l1_ball(&v(&[3.0, 0.0]), 1.0), v(&[1.0, 0.0]));
        assert_eq!(project_l1_ball(&v(&[0.3, 0.2]), 1.0), v(&[0.3, 0.2]));
        assert_eq!(project_l1_ball(&v(&[1.0, 1.0]), 1.0), v(&[0.5, 0.5]));
        assert_eq!(project_l1_ball(&v(&[-2.0, 1.0, 0.0]), 1.0), v(&[-1.0, 0.0, 0.0]));
    }

    #[test]
    fn prox_examples() {
        assert!((prox_linf(&v(&[3.0, 0.0]), 1.0) - v(&[2.0, 0.0])).amax() < 1e-15);
        assert_eq!(prox_linf(&Vector::zeros(3), 0.7), Vector::zeros(3));
        // gamma >= ||x||_1 collapses to the origin.
        assert!(prox_linf(&v(&[0.5, -1.0, 0.25]), 1.75).amax() < 1e-15);
        assert!(prox_linf(&v(&[0.5, -1.0, 0.25]), 3.0).amax() < 1e-15);
    }

    proptest! {
        #[test]
        fn projection_is_feasible_and_idempotent(
            xs in prop::collection::vec(-5.0f64..5.0, 1..12),
            radius in 0.05f64..4.0,
        ) {
            let x = Vector::from_vec(xs);
            let z = project_l1_ball(&x, radius);
            prop_assert!(linalg::l1_norm(&z) <= radius + 1e-12);
            let zz = project_l1_ball(&z, radius);
            prop_assert!((&zz - &z).amax() <= 1e-12);
        }

        #[test]
        fn moreau_identity(
            xs in prop::collection::vec(-5.0f64..5.0, 1..12),
            gamma in 0.05f64..4.0,
        ) {
            let x = Vector::from_vec(xs);
            let lhs = prox_linf(&x, gamma) + project_l1_ball(&(&x / gamma), 1.0) * gamma;
            prop_assert!((lhs - &x).amax() <= 1e-12 * (1.0 + x.amax()));
        }
    }
}
