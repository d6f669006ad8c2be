//! TV denoising of the staircase `x0 = -1_{l1} + 1_{l4}` observed through the
//! structured noise `w = eps (1_{l3} - 1_{l2})`, against its closed-form path.

use serde::{Deserialize, Serialize};

use super::signals::{staircase, staircase_noise};
use super::{format_list, Cell, Overrides, Table};
use crate::certify::first_order_certificate;
use crate::dictionaries::make_tv;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::operators::Identity;
use crate::solvers::{solve_denoise_dual, SolveConfig};

/// Half-width of the neighborhoods of the kinks excluded from the comparison.
pub const KINK_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseParams {
    /// Multiple of 4.
    pub n: usize,
    /// Noise amplitude in `(-1, 1)`.
    pub epsilon: f64,
    /// Positive regularization values.
    pub lambda_grid: Vec<f64>,
}

impl StaircaseParams {
    /// `points` values `k * 1.2 * lambda_2 / points`, `k = 1..=points`.
    pub fn with_default_grid(n: usize, epsilon: f64, points: usize) -> Result<Self> {
        check(n, epsilon)?;
        let (_, l2) = kinks(n / 4, epsilon);
        let top = 1.2 * l2;
        let lambda_grid = (1..=points).map(|k| k as f64 * top / points as f64).collect();
        Ok(Self { n, epsilon, lambda_grid })
    }

    pub(crate) fn from_overrides(ov: &mut Overrides<'_>) -> Result<Self> {
        let n = ov.scalar("n", 32usize)?;
        let epsilon = ov.scalar("epsilon", 0.5f64)?;
        let points = ov.scalar("points", 50usize)?;
        let default = Self::with_default_grid(n, epsilon, points)?;
        let lambda_grid = ov.list("lambda_grid", default.lambda_grid)?;
        let params = Self { n, epsilon, lambda_grid };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.n, self.epsilon)?;
        if let Some(l) = self.lambda_grid.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda grid values must be positive, got {l}")));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.n / 4
    }
}

fn check(n: usize, epsilon: f64) -> Result<()> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::InvalidParameter(format!("n must be a positive multiple of 4, got {n}")));
    }
    if !(epsilon.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (-1, 1), got {epsilon}")));
    }
    Ok(())
}

/// Regime boundaries: `(M(1 - eps), M(1 + eps))` for `eps >= 0`, `(-eps M / 2, M)` otherwise.
pub fn kinks(m: usize, epsilon: f64) -> (f64, f64) {
    let m = m as f64;
    if epsilon >= 0.0 {
        let l1 = m * (1.0 - epsilon);
        (l1, l1 + 2.0 * epsilon * m)
    } else {
        (-epsilon * m / 2.0, m)
    }
}

/// Closed-form solution values on the four blocks.
pub fn closed_form(m: usize, epsilon: f64, lambda: f64) -> [f64; 4] {
    let (l1, l2) = kinks(m, epsilon);
    let mf = m as f64;
    let outer = 1.0 - lambda / mf;
    if lambda > l2 {
        return [0.0; 4];
    }
    if epsilon >= 0.0 {
        if lambda <= l1 {
            [-outer, -epsilon, epsilon, outer]
        } else {
            let v = epsilon - (lambda - l1) / (2.0 * mf);
            [-v, -v, v, v]
        }
    } else if lambda <= l1 {
        let inner = epsilon + 2.0 * lambda / mf;
        [-outer, -inner, inner, outer]
    } else {
        [-outer, 0.0, 0.0, outer]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseRow {
    pub lambda: f64,
    /// Block means of the computed solution.
    pub solver_blocks: [f64; 4],
    pub closed_form_blocks: [f64; 4],
    /// Max over all coordinates of `|x_lambda - closed form|`.
    pub max_abs_deviation: f64,
    pub near_kink: bool,
    pub converged: bool,
    pub certified: bool,
    pub stationarity_residual: f64,
}

/// Denoise at every grid value and compare with the closed-form path.
pub fn run_tv_staircase(params: &StaircaseParams) -> Result<Vec<StaircaseRow>> {
    params.validate()?;
    let n = params.n;
    let m = params.m();
    let tv = make_tv(n)?;
    let y = staircase(n)? + staircase_noise(n, params.epsilon)?;
    let (k1, k2) = kinks(m, params.epsilon);
    let id = Identity::new(n);
    params
        .lambda_grid
        .iter()
        .map(|&lambda| {
            let report = solve_denoise_dual(&tv, &y, &SolveConfig::with_lambda(lambda))?;
            let x = report.solution_vector();
            let cf = closed_form(m, params.epsilon, lambda);
            let predicted = Vector::from_fn(n, |i, _| cf[i / m]);
            let mut solver_blocks = [0.0; 4];
            for (k, block) in solver_blocks.iter_mut().enumerate() {
                *block = x.rows(k * m, m).mean();
            }
            let cert = first_order_certificate(&id, &tv, &y, lambda, &x)?;
            Ok(StaircaseRow {
                lambda,
                solver_blocks,
                closed_form_blocks: cf,
                max_abs_deviation: (&x - predicted).amax(),
                near_kink: (lambda - k1).abs() <= KINK_RADIUS || (lambda - k2).abs() <= KINK_RADIUS,
                converged: report.converged,
                certified: cert.certified,
                stationarity_residual: cert.stationarity_residual,
            })
        })
        .collect()
}

pub fn to_table(params: &StaircaseParams, rows: &[StaircaseRow]) -> Table {
    let mut t = Table::new(&[
        "lambda", "x_l1", "x_l2", "x_l3", "x_l4", "cf_l1", "cf_l2", "cf_l3", "cf_l4",
        "max_abs_dev", "near_kink", "converged", "certified", "stationarity_residual",
    ]);
    let (k1, k2) = kinks(params.m(), params.epsilon);
    t.meta("experiment", "tv_staircase")
        .meta("n", params.n)
        .meta("M", params.m())
        .meta("epsilon", params.epsilon)
        .meta("lambda_1", format!("{k1:?}"))
        .meta("lambda_2", format!("{k2:?}"))
        .meta("kink_radius", KINK_RADIUS)
        .meta("lambda_grid", format_list(&params.lambda_grid))
        .meta("blocks", "l_k = [(k-1)M, kM), 0-based half-open");
    for r in rows {
        let mut row: Vec<Cell> = vec![r.lambda.into()];
        row.extend(r.solver_blocks.iter().map(|&v| Cell::from(v)));
        row.extend(r.closed_form_blocks.iter().map(|&v| Cell::from(v)));
        row.extend([
            r.max_abs_deviation.into(),
            r.near_kink.into(),
            r.converged.into(),
            r.certified.into(),
            r.stationarity_residual.into(),
        ]);
        t.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        // n = 8, eps = 0.5, lambda = 0.5.
        assert_eq!(closed_form(2, 0.5, 0.5), [-0.75, -0.5, 0.5, 0.75]);
        assert_eq!(kinks(2, 0.5), (1.0, 3.0));
        assert_eq!(closed_form(2, 0.5, 3.5), [0.0; 4]);
        assert_eq!(kinks(2, -0.5), (0.5, 2.0));
        assert_eq!(closed_form(2, -0.5, 1.0), [-0.5, 0.0, 0.0, 0.5]);
        // eps = 0 collapses both kinks onto M.
        assert_eq!(kinks(4, 0.0), (4.0, 4.0));
    }

    #[test]
    fn closed_form_is_continuous_at_the_kinks() {
        for &(m, eps) in &[(2usize, 0.5), (8, 0.5), (2, -0.5), (8, -0.3), (5, 0.2)] {
            let (l1, l2) = kinks(m, eps);
            for l in [l1, l2] {
                let a = closed_form(m, eps, l - 1e-9);
                let b = closed_form(m, eps, l + 1e-9);
                for k in 0..4 {
                    assert!((a[k] - b[k]).abs() < 1e-6, "m={m} eps={eps} at {l}");
                }
            }
        }
    }

    #[test]
    fn solver_follows_the_closed_form() {
        for eps in [0.5, -0.5] {
            let params = StaircaseParams::with_default_grid(8, eps, 12).unwrap();
            for row in run_tv_staircase(&params).unwrap() {
                assert!(row.certified, "{row:?}");
                if !row.near_kink {
                    assert!(row.max_abs_deviation <= 1e-6, "{row:?}");
                }
            }
        }
    }

    #[test]
    fn negative_noise_keeps_the_support() {
        use crate::cosparse::d_support;
        let tv = make_tv(8).unwrap();
        let x0 = staircase(8).unwrap();
        let y = &x0 + staircase_noise(8, -0.5).unwrap();
        let x = solve_denoise_dual(&tv, &y, &SolveConfig::with_lambda(1.2)).unwrap().solution_vector();
        assert_eq!(d_support(&x, &tv, None), d_support(&x0, &tv, None));
    }

    #[test]
    fn parameters_are_checked() {
        assert!(StaircaseParams::with_default_grid(10, 0.5, 5).is_err());
        assert!(StaircaseParams::with_default_grid(8, 1.5, 5).is_err());
        let mut p = StaircaseParams::with_default_grid(8, 0.5, 5).unwrap();
        p.lambda_grid.push(0.0);
        assert!(p.validate().is_err());
    }
}
