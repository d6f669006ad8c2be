//! Analysis-Lasso solvers.
//!
//! * [`solve_lasso`]: primal-dual splitting on `K = (Phi; D^*)` for any `Phi`.
//! * [`solve_denoise_dual`]: accelerated projected gradient on the box-constrained dual
//!   when `Phi = Id`.
//! * [`solve_bp`]: Basis Pursuit as the analysis Lasso at a very small `lambda`.
//!
//! Operators are materialized before iterating. Both iterative schemes finish with an
//! optional polishing step: the D-support and signs read off the iterate are plugged into
//! the implicit solution equation `x = A_J (Phi^* y - lambda D_I s_I)`, and the candidate
//! replaces the iterate only when it reproduces those signs and passes the first-order
//! certificate, in which case it is an exact minimizer.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::certify::first_order_certificate;
use crate::cosparse::{build_decomposition, check_h0, d_support, SignVector};
use crate::dictionaries::Dictionary;
use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::operators::{self, estimate_norm, LinearOperator};

/// Number of initial iterations exempt from the monotonicity check.
const MONOTONE_BURN_IN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub lambda: f64,
    pub max_iters: usize,
    /// Tolerance on the relative primal-dual residual and on the relative change of the
    /// iterate and of the objective.
    pub tol: f64,
    /// Over-relaxation of the primal-dual scheme, in `[0, 1]`.
    pub theta: f64,
    /// `sigma / tau` balance of the primal-dual steps.
    pub step_ratio: f64,
    /// Try the support-based exact refinement after iterating.
    pub polish: bool,
    /// Record one trace entry every this many iterations.
    pub trace_every: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            max_iters: 100_000,
            tol: 1e-10,
            theta: 1.0,
            step_ratio: 1.0,
            polish: true,
            trace_every: 10,
        }
    }
}

impl SolveConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be a nonnegative number, got {}",
                self.lambda
            )));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, 1], got {}",
                self.theta
            )));
        }
        if !(self.step_ratio > 0.0) || !(self.tol >= 0.0) || self.trace_every == 0 {
            return Err(Error::InvalidParameter(
                "step_ratio must be positive, tol nonnegative and trace_every at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub solution: Vec<f64>,
    /// `1/2 ||y - Phi x||^2 + lambda ||D^* x||_1` at `solution`.
    pub objective: f64,
    pub iterations: usize,
    /// Stopping rule met with a non-increasing objective trace after the burn-in, or
    /// a certified polished solution.
    pub converged: bool,
    pub objective_monotone: bool,
    /// Whether `solution` comes from the support-based refinement.
    pub polished: bool,
    pub residual_trace: Vec<f64>,
    pub objective_trace: Vec<f64>,
}

impl SolverReport {
    pub fn solution_vector(&self) -> Vector {
        Vector::from_column_slice(&self.solution)
    }
}

/// Componentwise `sign(x_i) max(|x_i| - t, 0)`.
pub fn soft_threshold(x: &Vector, t: f64) -> Vector {
    assert!(t >= 0.0, "threshold must be nonnegative");
    x.map(|v| v.signum() * (v.abs() - t).max(0.0))
}

/// `1/2 ||y - Phi x||^2 + lambda ||D^* x||_1`.
pub fn lasso_objective(
    phi: &dyn LinearOperator,
    dict: &Dictionary,
    y: &Vector,
    lambda: f64,
    x: &Vector,
) -> f64 {
    0.5 * (phi.apply(x) - y).norm_squared() + lambda * linalg::l1_norm(&dict.analysis(x))
}

fn check_dims(phi: &dyn LinearOperator, dict: &Dictionary, y: &Vector) -> Result<()> {
    if phi.in_dim() != dict.n() || phi.out_dim() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "Phi is {}x{}, dictionary acts on R^{}, y has {} entries",
            phi.out_dim(),
            phi.in_dim(),
            dict.n(),
            y.len()
        )));
    }
    Ok(())
}

/// Relative change `||a - b|| / ||a||`, zero when both vanish.
fn relative(diff: f64, scale: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff / scale.max(f64::MIN_POSITIVE)
    }
}

/// Objective trace is non-increasing after the burn-in, up to rounding.
fn monotone_after_burn_in(trace: &[f64], every: usize) -> bool {
    let skip = MONOTONE_BURN_IN.div_ceil(every);
    trace
        .iter()
        .skip(skip)
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| *w[1] <= *w[0] + 1e-12 * w[0].abs().max(1.0))
}

struct Trace {
    every: usize,
    residual: Vec<f64>,
    objective: Vec<f64>,
}

impl Trace {
    fn new(every: usize) -> Self {
        Self {
            every,
            residual: Vec::new(),
            objective: Vec::new(),
        }
    }

    fn record(&mut self, k: usize, residual: f64, objective: f64) {
        if k % self.every == 0 {
            self.residual.push(residual);
            self.objective.push(objective);
        }
    }
}

/// Analysis Lasso by the Chambolle-Pock primal-dual scheme, started from zero.
pub fn solve_lasso(
    phi: &dyn LinearOperator,
    dict: &Dictionary,
    y: &Vector,
    cfg: &SolveConfig,
) -> Result<SolverReport> {
    solve_lasso_from(phi, dict, y, cfg, None)
}

/// [`solve_lasso`] from an explicit primal starting point.
pub fn solve_lasso_from(
    phi: &dyn LinearOperator,
    dict: &Dictionary,
    y: &Vector,
    cfg: &SolveConfig,
    x_init: Option<&Vector>,
) -> Result<SolverReport> {
    cfg.validate()?;
    check_dims(phi, dict, y)?;
    if !check_h0(dict, phi) {
        return Err(Error::H0Violated);
    }
    let n = dict.n();
    let phi_op = operators::dense(phi.materialize());
    let dt_op = operators::dense(dict.materialize().transpose());
    let k_norm = estimate_norm(&*operators::vstack(vec![phi_op.clone(), dt_op.clone()])?);

    let lambda = cfg.lambda;
    // The objective is divided by mu: dual variables stay of unit size for tiny lambda.
    let mu = if lambda > 0.0 { lambda } else { 1.0 };
    let kappa = lambda / mu;
    let c = 0.99f64.sqrt();
    let sigma = c * cfg.step_ratio / k_norm;
    let tau = c / (cfg.step_ratio * k_norm);
    let theta = cfg.theta;

    let mut x = match x_init {
        Some(x0) if x0.len() == n => x0.clone(),
        Some(x0) => {
            return Err(Error::DimensionMismatch(format!(
                "initial point has {} entries, expected {n}",
                x0.len()
            )))
        }
        None => Vector::zeros(n),
    };
    let mut q = Vector::zeros(y.len());
    let mut u = Vector::zeros(dict.p());
    let mut kx_q = phi_op.apply(&x);
    let mut kx_u = dt_op.apply(&x);
    let mut kbar_q = kx_q.clone();
    let mut kbar_u = kx_u.clone();
    let objective_of =
        |kq: &Vector, ku: &Vector| 0.5 * (kq - y).norm_squared() + lambda * linalg::l1_norm(ku);
    let mut objective = objective_of(&kx_q, &kx_u);
    let mut trace = Trace::new(cfg.trace_every);
    let mut stopped = false;
    let mut iterations = 0;
    let try_polish = cfg.polish && lambda > 0.0;
    let mut polisher = Polisher::default();
    let mut polished = None;

    for k in 1..=cfg.max_iters {
        iterations = k;
        let q_new = (&q + (&kbar_q - y) * sigma) / (1.0 + sigma * mu);
        let u_new = (&u + &kbar_u * sigma).map(|v| v.clamp(-kappa, kappa));
        let kt_z = phi_op.adjoint(&q_new) + dt_op.adjoint(&u_new);
        let x_new = &x - &kt_z * tau;
        let kx_q_new = phi_op.apply(&x_new);
        let kx_u_new = dt_op.apply(&x_new);

        let dual_res = (((&q - &q_new) / sigma + &kbar_q - &kx_q_new).norm_squared()
            + ((&u - &u_new) / sigma + &kbar_u - &kx_u_new).norm_squared())
        .sqrt();
        let primal_res = kt_z.norm();
        let scale = (kx_q_new.norm_squared() + kx_u_new.norm_squared())
            .sqrt()
            .max(y.norm());
        let pd_residual = relative(primal_res + dual_res, scale);

        let objective_new = objective_of(&kx_q_new, &kx_u_new);
        let step = relative((&x_new - &x).norm(), x_new.norm());
        let drop = relative((objective_new - objective).abs(), objective_new.abs());

        kbar_q = &kx_q_new + (&kx_q_new - &kx_q) * theta;
        kbar_u = &kx_u_new + (&kx_u_new - &kx_u) * theta;
        x = x_new;
        q = q_new;
        u = u_new;
        kx_q = kx_q_new;
        kx_u = kx_u_new;
        objective = objective_new;
        trace.record(k, pd_residual, objective);

        // The iterate can stall while the dual is still catching up, hence the residual.
        if step <= cfg.tol && drop <= cfg.tol && pd_residual <= cfg.tol {
            stopped = true;
            break;
        }
        if try_polish && k % POLISH_EVERY == 0 {
            polished = polisher.attempt(phi, dict, y, lambda, &x, Some(&(&u / kappa)));
            if polished.is_some() {
                break;
            }
        }
    }
    Ok(finish(
        phi, dict, y, cfg, x, iterations, stopped, trace, &mut polisher, polished,
        (kappa > 0.0).then(|| &u / kappa).as_ref(),
    ))
}

fn finish(
    phi: &dyn LinearOperator,
    dict: &Dictionary,
    y: &Vector,
    cfg: &SolveConfig,
    x: Vector,
    iterations: usize,
    stopped: bool,
    mut trace: Trace,
    polisher: &mut Polisher,
    polished: Option<Vector>,
    dual: Option<&Vector>,
) -> SolverReport {
    let polished = polished.or_else(|| {
        (cfg.polish && cfg.lambda > 0.0)
            .then(|| polisher.attempt(phi, dict, y, cfg.lambda, &x, dual))
            .flatten()
    });
    let objective_monotone = monotone_after_burn_in(&trace.objective, trace.every);
    let (x, was_polished) = match polished {
        Some(x) => (x, true),
        None => (x, false),
    };
    let objective = lasso_objective(phi, dict, y, cfg.lambda, &x);
    if trace.objective.last() != Some(&objective) {
        trace.objective.push(objective);
        trace
            .residual
            .push(trace.residual.last().copied().unwrap_or(0.0));
    }
    SolverReport {
        solution: x.iter().copied().collect(),
        objective,
        iterations,
        converged: (stopped && objective_monotone) || was_polished,
        objective_monotone,
        polished: was_polished,
        residual_trace: trace.residual,
        objective_trace: trace.objective,
    }
}

/// Iterations between two in-loop polishing attempts.
const POLISH_EVERY: usize = 250;

/// Support thresholds tried by the polisher, relative to `||D^* x||_inf`...
const POLISH_THRESHOLDS: [f64; 4] = [1e-8, 1e-6, 1e-4, 1e-2];
/// ...and relative to `||x||_inf`, which catches iterates whose true D-support is empty.
const POLISH_SIGNAL_THRESHOLDS: [f64; 3] = [1e-10, 1e-8, 1e-6];
/// Saturation slacks defining the equicorrelation sets `{i : |u_i| >= 1 - delta}` of a dual
/// iterate `u` scaled to the unit ball.
const DUAL_SLACKS: [f64; 4] = [1e-9, 1e-7, 1e-5, 1e-3];

/// Support-based refinement, remembering sign patterns that already failed.
#[derive(Default)]
struct Polisher {
    rejected: HashSet<Vec<i8>>,
}

impl Polisher {
    fn attempt(
        &mut self,
        phi: &dyn LinearOperator,
        dict: &Dictionary,
        y: &Vector,
        lambda: f64,
        x: &Vector,
        dual: Option<&Vector>,
    ) -> Option<Vector> {
        let from_dual = dual.into_iter().flat_map(|u| {
            DUAL_SLACKS.iter().map(move |delta| {
                let entries = u
                    .iter()
                    .map(|&ui| if ui.abs() >= 1.0 - delta { ui.signum() as i8 } else { 0 })
                    .collect();
                SignVector::new(entries).expect("entries are signs")
            })
        });
        let coeff_scale = linalg::inf_norm(&dict.analysis(x));
        let signal_scale = linalg::inf_norm(x);
        let thresholds = POLISH_THRESHOLDS
            .iter()
            .map(|r| r * coeff_scale)
            .chain(POLISH_SIGNAL_THRESHOLDS.iter().map(|r| r * signal_scale));
        let from_primal = thresholds.map(|tol| d_support(x, dict, Some(tol)));
        for s in from_primal.chain(from_dual) {
            if self.rejected.contains(s.entries()) {
                continue;
            }
            match polish_with_signs(phi, dict, y, lambda, &s) {
                Some(candidate) => return Some(candidate),
                None => {
                    self.rejected.insert(s.entries().to_vec());
                }
            }
        }
        None
    }
}

/// Exact minimizer attached to the D-support and signs of `x`, if they are the right ones.
///
/// Supports read at several thresholds are tried in turn; the first candidate that
/// reproduces its signs and passes the first-order certificate is returned.
pub fn polish(
    phi: &dyn LinearOperator,
    dict: &Dictionary,
    y: &Vector,
    lambda: f64,
    x: &Vector,
) -> Option<Vector> {
    Polisher::default().attempt(phi, dict, y, lambda, x, None)
}

fn polish_with_signs(
    phi: &dyn LinearOperator,
    dict: &Dictionary,
    y: &Vector,
    lambda: f64,
    s: &SignVector,
) -> Option<Vector> {
    let dec = build_decomposition(dict, phi, &s.cosupport()).ok()?;
    let rhs = dec.phi().transpose() * y - dec.d_i() * s.restricted() * lambda;
    let candidate = dec.a_j() * rhs;
    // A saturated dual may overestimate the support; only sign flips are disqualifying.
    let got = d_support(&candidate, dict, None);
    let consistent = got
        .entries()
        .iter()
        .zip(s.entries())
        .all(|(&g, &e)| g == 0 || g == e);
    if !consistent {
        return None;
    }
    let cert = first_order_certificate(phi, dict, y, lambda, &candidate).ok()?;
    cert.certified.then_some(candidate)
}

/// `Phi = Id` denoising through `alpha* in argmin_{||alpha||_inf <= lambda} ||y + D alpha||^2`,
/// `x* = y + D alpha*`, by FISTA with function-value restart.
pub fn solve_denoise_dual(dict: &Dictionary, y: &Vector, cfg: &SolveConfig) -> Result<SolverReport> {
    cfg.validate()?;
    let n = dict.n();
    let id = operators::Identity::new(n);
    check_dims(&id, dict, y)?;
    let d_op = operators::dense(dict.materialize());
    let lambda = cfg.lambda;
    let trace_every = cfg.trace_every;
    let mut trace = Trace::new(trace_every);
    if lambda == 0.0 {
        trace.record(0, 0.0, 0.0);
        let mut polisher = Polisher::default();
        return Ok(finish(
            &id, dict, y, cfg, y.clone(), 0, true, trace, &mut polisher, None, None,
        ));
    }
    let lipschitz = estimate_norm(&*d_op).powi(2);
    let step = 1.0 / lipschitz;
    let clamp = |a: Vector| a.map(|v| v.clamp(-lambda, lambda));
    let dual_value = |a: &Vector| 0.5 * (y + d_op.apply(a)).norm_squared();

    let mut alpha = Vector::zeros(dict.p());
    let mut beta = alpha.clone();
    let mut t = 1.0f64;
    let mut value = dual_value(&alpha);
    let mut x = y.clone();
    let mut stopped = false;
    let mut iterations = 0;
    let mut polisher = Polisher::default();
    let mut polished = None;
    for k in 1..=cfg.max_iters {
        iterations = k;
        let grad = d_op.adjoint(&(y + d_op.apply(&beta)));
        let mut alpha_new = clamp(&beta - grad * step);
        let mut value_new = dual_value(&alpha_new);
        if value_new > value {
            // Restart: plain projected gradient step from the last iterate.
            t = 1.0;
            let grad = d_op.adjoint(&(y + d_op.apply(&alpha)));
            alpha_new = clamp(&alpha - grad * step);
            value_new = dual_value(&alpha_new);
        }
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        beta = &alpha_new + (&alpha_new - &alpha) * ((t - 1.0) / t_new);
        t = t_new;

        let x_new = y + d_op.apply(&alpha_new);
        let change = relative((&x_new - &x).norm(), x_new.norm());
        let drop = relative((value_new - value).abs(), value_new.abs());
        let primal = 0.5 * (&x_new - y).norm_squared() + lambda * linalg::l1_norm(&dict.analysis(&x_new));
        // Duality gap relative to the primal value.
        let gap = relative((primal + value_new - 0.5 * y.norm_squared()).abs(), primal.abs());
        trace.record(k, gap, primal);
        alpha = alpha_new;
        value = value_new;
        x = x_new;
        if change <= cfg.tol && drop <= cfg.tol {
            stopped = true;
            break;
        }
        if cfg.polish && k % POLISH_EVERY == 0 {
            polished = polisher.attempt(&id, dict, y, lambda, &x, Some(&(&alpha / -lambda)));
            if polished.is_some() {
                break;
            }
        }
    }
    Ok(finish(
        &id, dict, y, cfg, x, iterations, stopped, trace, &mut polisher, polished,
        Some(&(&alpha / -lambda)),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpReport {
    #[serde(flatten)]
    pub report: SolverReport,
    pub lambda: f64,
    /// `||Phi x - y||_2`.
    pub constraint_residual: f64,
    /// Constraint residual at most `1e-5 ||y||_2`.
    pub feasible: bool,
}

/// Relative factor of the default Basis Pursuit regularization, `lambda = 1e-6 ||Phi^* y||_inf`.
pub const BP_LAMBDA_FACTOR: f64 = 1e-6;

/// `min ||D^* x||_1 s.t. Phi x = y`, approached by the Lasso at a small `lambda`.
pub fn solve_bp(
    phi: &dyn LinearOperator,
    dict: &Dictionary,
    y: &Vector,
    lambda_small: Option<f64>,
    cfg: &SolveConfig,
) -> Result<BpReport> {
    check_dims(phi, dict, y)?;
    let scale = linalg::inf_norm(&phi.adjoint(y));
    let lambda = match lambda_small {
        Some(l) if l > 0.0 => l,
        Some(l) => {
            return Err(Error::InvalidParameter(format!(
                "Basis Pursuit lambda must be positive, got {l}"
            )))
        }
        None if scale > 0.0 => BP_LAMBDA_FACTOR * scale,
        None => BP_LAMBDA_FACTOR,
    };
    let cfg = SolveConfig {
        lambda,
        tol: cfg.tol.min(1e-12),
        ..*cfg
    };
    let report = solve_lasso(phi, dict, y, &cfg)?;
    let constraint_residual = (phi.apply(&report.solution_vector()) - y).norm();
    Ok(BpReport {
        feasible: constraint_residual <= 1e-5 * y.norm(),
        report,
        lambda,
        constraint_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionaries::{make_fused, make_haar, make_identity, make_tv};
    use crate::operators::{circular_gaussian_blur, gaussian_random_matrix, DenseOperator, Identity};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn random_vector(seed: u64, n: usize) -> Vector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn piecewise(seed: u64, n: usize, noise: f64) -> Vector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut level = 0.0;
        Vector::from_fn(n, |_, _| {
            if rng.random_bool(0.15) {
                level = rng.random_range(-2.0..2.0);
            }
            level + noise * rng.random_range(-1.0..1.0)
        })
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(&v(&[2.0, -0.5, 0.0]), 1.0), v(&[1.0, 0.0, 0.0]));
        let x = v(&[0.3, -4.0]);
        assert_eq!(soft_threshold(&x, 0.0), x);
    }

    proptest! {
        #[test]
        fn soft_threshold_is_the_l1_prox(x in -5.0f64..5.0, t in 0.0f64..3.0) {
            let z = soft_threshold(&v(&[x]), t)[0];
            // Subgradient condition of 1/2 (z - x)^2 + t |z|.
            if z != 0.0 {
                prop_assert!((z - x + t * z.signum()).abs() < 1e-12);
            } else {
                prop_assert!(x.abs() <= t + 1e-12);
            }
        }
    }

    #[test]
    fn zero_lambda_identity_returns_y() {
        let tv = make_tv(10).unwrap();
        let y = random_vector(1, 10);
        let r = solve_lasso(&Identity::new(10), &tv, &y, &SolveConfig::with_lambda(0.0)).unwrap();
        assert!((r.solution_vector() - &y).norm() < 1e-8);
        let r = solve_denoise_dual(&tv, &y, &SolveConfig::with_lambda(0.0)).unwrap();
        assert_eq!(r.solution_vector(), y);
    }

    #[test]
    fn large_lambda_tv_gives_the_mean() {
        let tv = make_tv(12).unwrap();
        let y = random_vector(2, 12);
        let mean = y.mean();
        for r in [
            solve_lasso(&Identity::new(12), &tv, &y, &SolveConfig::with_lambda(50.0)).unwrap(),
            solve_denoise_dual(&tv, &y, &SolveConfig::with_lambda(50.0)).unwrap(),
        ] {
            assert!(r.converged);
            assert!(r.solution.iter().all(|&xi| (xi - mean).abs() < 1e-9));
        }
    }

    #[test]
    fn invalid_inputs() {
        let tv = make_tv(4).unwrap();
        let y = Vector::zeros(4);
        assert!(matches!(
            solve_lasso(&Identity::new(4), &tv, &y, &SolveConfig::with_lambda(-1.0)),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            solve_lasso(&Identity::new(4), &tv, &Vector::zeros(3), &SolveConfig::with_lambda(1.0)),
            Err(Error::DimensionMismatch(_))
        ));
        // A zero Phi cannot see constants, which TV does not penalize either.
        let zero = DenseOperator::new(linalg::Matrix::zeros(2, 4));
        assert!(matches!(
            solve_lasso(&zero, &tv, &Vector::zeros(2), &SolveConfig::with_lambda(1.0)),
            Err(Error::H0Violated)
        ));
    }

    #[test]
    fn denoise_dual_is_clamped_and_matches_primal_dual() {
        for seed in 0..20u64 {
            let n = 8 + (seed as usize * 3) % 57;
            let dict = if seed % 4 == 3 {
                make_fused(n, 0.3).unwrap()
            } else {
                make_tv(n).unwrap()
            };
            let y = piecewise(seed, n, 0.2);
            let cfg = SolveConfig::with_lambda(0.05 + 0.1 * (seed % 5) as f64);
            let a = solve_lasso(&Identity::new(n), &dict, &y, &cfg).unwrap();
            let b = solve_denoise_dual(&dict, &y, &cfg).unwrap();
            assert!(a.converged && b.converged, "seed {seed}");
            let gap = (a.solution_vector() - b.solution_vector()).norm();
            assert!(gap <= 1e-8, "seed {seed}: gap {gap}");
        }
    }

    #[test]
    fn unpolished_schemes_still_agree() {
        let tv = make_tv(24).unwrap();
        let y = piecewise(7, 24, 0.1);
        let cfg = SolveConfig {
            polish: false,
            tol: 1e-12,
            ..SolveConfig::with_lambda(0.2)
        };
        let a = solve_lasso(&Identity::new(24), &tv, &y, &cfg).unwrap();
        let b = solve_denoise_dual(&tv, &y, &cfg).unwrap();
        assert!(!a.polished && !b.polished);
        assert!((a.solution_vector() - b.solution_vector()).norm() <= 1e-7);
        assert!((a.objective - b.objective).abs() <= 1e-9 * a.objective);
    }

    /// Reference synthesis Lasso `min 1/2 ||y - Psi a||^2 + lambda ||a||_1` by cyclic
    /// coordinate descent.
    fn coordinate_descent(psi: &linalg::Matrix, y: &Vector, lambda: f64) -> Vector {
        let n = psi.ncols();
        let mut a = Vector::zeros(n);
        let mut r = y.clone();
        let norms: Vec<f64> = psi.column_iter().map(|c| c.norm_squared()).collect();
        for _ in 0..200_000 {
            let mut delta = 0.0f64;
            for j in 0..n {
                let col = psi.column(j);
                let rho = col.dot(&r) + norms[j] * a[j];
                let new = rho.signum() * (rho.abs() - lambda).max(0.0) / norms[j];
                let d = new - a[j];
                if d != 0.0 {
                    r -= col * d;
                    a[j] = new;
                    delta = delta.max(d.abs());
                }
            }
            if delta < 1e-15 {
                break;
            }
        }
        a
    }

    #[test]
    fn identity_dictionary_matches_coordinate_descent() {
        for seed in 0..6u64 {
            let psi = gaussian_random_matrix(12, 8, 100 + seed);
            let y = random_vector(seed, 12) * 2.0;
            let lambda = 0.3 + 0.2 * seed as f64;
            let reference = coordinate_descent(&psi, &y, lambda);
            let id = make_identity(8).unwrap();
            let r = solve_lasso(&DenseOperator::new(psi), &id, &y, &SolveConfig::with_lambda(lambda))
                .unwrap();
            let gap = (r.solution_vector() - reference).norm();
            assert!(gap <= 1e-7, "seed {seed}: {gap}");
        }
    }

    #[test]
    fn objective_is_recomputed_and_traced() {
        let haar = make_haar(16, 2, 1.0).unwrap();
        let blur = circular_gaussian_blur(16, 1.0).unwrap();
        let y = piecewise(11, 16, 0.05);
        let cfg = SolveConfig::with_lambda(0.02);
        let r = solve_lasso(&*blur, &haar, &y, &cfg).unwrap();
        let recomputed = lasso_objective(&*blur, &haar, &y, 0.02, &r.solution_vector());
        assert_eq!(r.objective, recomputed);
        let tail = *r.objective_trace.last().unwrap();
        assert!((tail - r.objective).abs() <= 1e-9 * r.objective.abs());
        assert_eq!(r.objective_trace.len(), r.residual_trace.len());
    }

    #[test]
    fn starting_point_does_not_matter() {
        let tv = make_tv(16).unwrap();
        let phi = gaussian_random_matrix(12, 16, 5);
        let x0 = piecewise(3, 16, 0.0);
        let y = &phi * &x0 + random_vector(4, 12) * 0.01;
        let op = DenseOperator::new(phi.clone());
        let cfg = SolveConfig::with_lambda(0.05);
        let a = solve_lasso(&op, &tv, &y, &cfg).unwrap();
        let start = linalg::pinv(&phi) * &y;
        let b = solve_lasso_from(&op, &tv, &y, &cfg, Some(&start)).unwrap();
        assert!((a.solution_vector() - b.solution_vector()).norm() <= 1e-7);
    }

    #[test]
    fn basis_pursuit_with_identity_is_feasible_point() {
        let tv = make_tv(10).unwrap();
        let y = piecewise(8, 10, 0.0);
        let r = solve_bp(&Identity::new(10), &tv, &y, None, &SolveConfig::default()).unwrap();
        assert!(r.feasible);
        let x = r.report.solution_vector();
        let tv_x = linalg::l1_norm(&tv.analysis(&x));
        let tv_y = linalg::l1_norm(&tv.analysis(&y));
        assert!((tv_x - tv_y).abs() <= 1e-4);
    }

    #[test]
    fn basis_pursuit_recovers_a_single_jump() {
        let tv = make_tv(12).unwrap();
        let x0 = Vector::from_fn(12, |i, _| if i >= 6 { 1.0 } else { 0.0 });
        let phi = gaussian_random_matrix(9, 12, 21);
        let y = &phi * &x0;
        let r = solve_bp(&DenseOperator::new(phi), &tv, &y, None, &SolveConfig::default()).unwrap();
        assert!(r.feasible);
        // IC > 1 here, so the small-lambda Lasso carries O(lambda) extra jumps and converges
        // slowly; the returned point is still at least as sparse up to that order.
        let got = linalg::l1_norm(&tv.analysis(&r.report.solution_vector()));
        assert!(got <= linalg::l1_norm(&tv.analysis(&x0)) + 1e-5);
    }
}
