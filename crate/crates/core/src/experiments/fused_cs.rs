//! Probability that IC < 1 for the Fused Lasso under Gaussian sensing of two boxcars.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::signals::two_boxcar;
use super::stats::{wilson_interval, Z_95};
use super::{format_list, replication_seed, Overrides, Table};
use crate::cosparse::{build_decomposition, d_support};
use crate::criteria::{compute_ic, DrConfig};
use crate::dictionaries::make_fused;
use crate::error::{Error, Result};
use crate::operators::{gaussian_random_matrix, DenseOperator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedCsParams {
    pub n: usize,
    pub rho: f64,
    pub eta_grid: Vec<f64>,
    /// Sampling ratios `Q/N`; `Q = round(ratio * n)`.
    pub qn_grid: Vec<f64>,
    /// Fused Lasso weights of the identity block.
    pub eps_grid: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl FusedCsParams {
    pub fn new(seed: u64) -> Self {
        Self {
            n: 32,
            rho: 0.1,
            eta_grid: vec![0.05, 0.1],
            qn_grid: vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
            eps_grid: vec![0.1],
            reps: 100,
            seed,
        }
    }

    pub(crate) fn from_overrides(ov: &mut Overrides<'_>, seed: u64) -> Result<Self> {
        let d = Self::new(seed);
        let epsilon = ov.scalar("epsilon", f64::NAN)?;
        let eps_default = if epsilon.is_nan() { d.eps_grid } else { vec![epsilon] };
        let params = Self {
            n: ov.scalar("n", d.n)?,
            rho: ov.scalar("rho", d.rho)?,
            eta_grid: ov.list("eta_grid", d.eta_grid)?,
            qn_grid: ov.list("qn_grid", d.qn_grid)?,
            eps_grid: ov.list("eps_grid", eps_default)?,
            reps: ov.scalar("reps", d.reps)?,
            seed,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be positive".into()));
        }
        if let Some(r) = self.qn_grid.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            return Err(Error::InvalidParameter(format!("sampling ratios must lie in (0, 1], got {r}")));
        }
        if let Some(e) = self.eps_grid.iter().find(|e| !(**e > 0.0)) {
            return Err(Error::InvalidParameter(format!("Fused Lasso epsilon must be positive, got {e}")));
        }
        for &eta in &self.eta_grid {
            two_boxcar(self.n, eta, self.rho)?;
        }
        Ok(())
    }

    /// Grid cells in `(eta, ratio, epsilon)` order, eta slowest.
    pub fn cells(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for &eta in &self.eta_grid {
            for &qn in &self.qn_grid {
                for &eps in &self.eps_grid {
                    out.push((eta, qn, eps));
                }
            }
        }
        out
    }

    pub fn measurements(&self, ratio: f64) -> usize {
        ((ratio * self.n as f64).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedCsRow {
    pub eta: f64,
    pub qn: f64,
    pub q: usize,
    pub epsilon: f64,
    pub reps: usize,
    /// Draws with IC < 1.
    pub successes: usize,
    /// Draws where `(H_J)` fails, counted as IC >= 1.
    pub hj_failures: usize,
    /// Draws whose Douglas-Rachford run hit the iteration cap.
    pub unconverged: usize,
    pub probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

enum Draw {
    Ic { below_one: bool, converged: bool },
    HjFailure,
}

/// Monte-Carlo estimate per grid cell; replications run in parallel with seeds
/// from [`replication_seed`], so the output does not depend on scheduling.
pub fn run_fused_cs(params: &FusedCsParams) -> Result<Vec<FusedCsRow>> {
    params.validate()?;
    let n = params.n;
    let cfg = DrConfig::default();
    params
        .cells()
        .into_iter()
        .enumerate()
        .map(|(cell, (eta, qn, eps))| {
            let x = two_boxcar(n, eta, params.rho)?;
            let dict = make_fused(n, eps)?;
            let s = d_support(&x, &dict, None);
            let cosupport = s.cosupport();
            let q = params.measurements(qn);
            let draws = (0..params.reps)
                .into_par_iter()
                .map(|rep| {
                    let phi = gaussian_random_matrix(q, n, replication_seed(params.seed, cell, rep));
                    match build_decomposition(&dict, &DenseOperator::new(phi), &cosupport) {
                        Err(Error::HjViolated { .. }) => Ok(Draw::HjFailure),
                        Err(e) => Err(e),
                        Ok(dec) => {
                            let ic = compute_ic(&dec, &s, &cfg)?;
                            Ok(Draw::Ic { below_one: ic.value < 1.0, converged: ic.converged })
                        }
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let successes = draws.iter().filter(|d| matches!(d, Draw::Ic { below_one: true, .. })).count();
            let hj_failures = draws.iter().filter(|d| matches!(d, Draw::HjFailure)).count();
            let unconverged = draws
                .iter()
                .filter(|d| matches!(d, Draw::Ic { converged: false, .. }))
                .count();
            let (ci_low, ci_high) = wilson_interval(successes, params.reps, Z_95);
            Ok(FusedCsRow {
                eta,
                qn,
                q,
                epsilon: eps,
                reps: params.reps,
                successes,
                hj_failures,
                unconverged,
                probability: successes as f64 / params.reps as f64,
                ci_low,
                ci_high,
            })
        })
        .collect()
}

pub fn to_table(params: &FusedCsParams, rows: &[FusedCsRow]) -> Table {
    let mut t = Table::new(&[
        "eta", "qn", "q", "epsilon", "reps", "successes", "hj_failures", "unconverged",
        "probability", "ci_low", "ci_high",
    ]);
    t.meta("experiment", "fused_cs")
        .meta("n", params.n)
        .meta("rho", params.rho)
        .meta("eta_grid", format_list(&params.eta_grid))
        .meta("qn_grid", format_list(&params.qn_grid))
        .meta("eps_grid", format_list(&params.eps_grid))
        .meta("reps", params.reps)
        .meta("seed", params.seed)
        .meta("replication_seed", "seed XOR splitmix64((cell << 32) | rep), cells eta-major")
        .meta(
            "signal",
            "1 on [floor((1/2-eta-rho)n), floor((1/2-rho)n)) and [floor((1/2+rho)n), floor((1/2+eta+rho)n)), 0-based half-open",
        )
        .meta("interval", "Wilson 95%");
    for r in rows {
        t.push(vec![
            r.eta.into(),
            r.qn.into(),
            r.q.into(),
            r.epsilon.into(),
            r.reps.into(),
            r.successes.into(),
            r.hj_failures.into(),
            r.unconverged.into(),
            r.probability.into(),
            r.ci_low.into(),
            r.ci_high.into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> FusedCsParams {
        FusedCsParams {
            n: 16,
            eta_grid: vec![0.1],
            qn_grid: vec![0.5, 1.0],
            reps: 8,
            ..FusedCsParams::new(seed)
        }
    }

    #[test]
    fn rows_are_probabilities() {
        let rows = run_fused_cs(&small(3)).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert!((0.0..=1.0).contains(&r.probability));
            assert!(r.ci_low <= r.probability && r.probability <= r.ci_high);
        }
        assert_eq!(rows[1].q, 16);
    }

    #[test]
    fn fixed_seed_is_reproducible_across_pools() {
        let params = small(11);
        let a = to_table(&params, &run_fused_cs(&params).unwrap()).to_csv().unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| to_table(&params, &run_fused_cs(&params).unwrap()).to_csv().unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn probability_grows_with_measurements() {
        let params = FusedCsParams {
            qn_grid: vec![0.5, 0.7, 0.9, 1.0],
            eps_grid: vec![1.0],
            ..FusedCsParams::new(5)
        };
        let rows = run_fused_cs(&params).unwrap();
        for eta in &params.eta_grid {
            let row: Vec<&FusedCsRow> = rows.iter().filter(|r| r.eta == *eta).collect();
            let qn: Vec<f64> = row.iter().map(|r| r.qn).collect();
            let p: Vec<f64> = row.iter().map(|r| r.probability).collect();
            assert!(super::super::stats::spearman(&qn, &p) >= 0.8, "eta {eta}: {p:?}");
        }
    }

    #[test]
    fn small_weight_fails_even_without_blur() {
        // The 7-sample gap between the boxcars must carry dual mass 2 through identity
        // atoms of weight eps, hence IC = 2 / (7 eps) with Phi = Id.
        use crate::operators::Identity;
        let n = 32;
        let x = two_boxcar(n, 0.05, 0.1).unwrap();
        for eps in [0.1, 0.2] {
            let dict = make_fused(n, eps).unwrap();
            let s = d_support(&x, &dict, None);
            let dec = build_decomposition(&dict, &Identity::new(n), &s.cosupport()).unwrap();
            let ic = compute_ic(&dec, &s, &DrConfig::default()).unwrap().value;
            assert!((ic - 2.0 / (7.0 * eps)).abs() < 1e-6, "eps {eps}: {ic}");
        }
    }

    #[test]
    fn invalid_grid() {
        let mut p = small(0);
        p.qn_grid = vec![1.5];
        assert!(run_fused_cs(&p).is_err());
        let mut p = small(0);
        p.eta_grid = vec![0.45];
        assert!(run_fused_cs(&p).is_err());
    }
}
