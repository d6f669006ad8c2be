//! Identifiability and recovery criteria of a D-support.
//!
//! * `IC(s) = min_{u in Ker D_J} ||Omega^[J] s_I - u||_inf`, solved with Douglas-Rachford
//!   splitting when `Ker D_J` is not trivial.
//! * `ARC(I)`, the worst case of the same objective over `||p_I||_inf <= 1`. The inner
//!   value is convex in `p_I`, so the maximum sits on a vertex of the cube.
//! * `wARC(I) = ||Omega^[J]||_{inf,inf}`.
//!
//! For `D = Id` the Fuchs criterion and the exact recovery coefficient give the same
//! numbers through `Omega^S = Psi_J^* Psi_I^{+,*}`.

mod prox;
mod tv;

pub use prox::{project_l1_ball, prox_linf};
pub use tv::{tv_dual_vector, tv_dual_vector_least_squares, TvDual};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cosparse::{complement, CosparseDecomposition, SignVector};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, SubspaceProjector, Vector};
use crate::operators::{op_norm, NormIndex};

/// Douglas-Rachford parameters for the inner ℓ∞ minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrConfig {
    /// Prox step `gamma`.
    pub gamma: f64,
    /// Relaxation `mu` in `(0, 2)`.
    pub relaxation: f64,
    /// Stop once successive objective values differ by at most this much...
    pub tol: f64,
    /// ...and the fixed-point residual `||r_k - u_k||_2` is at most this.
    pub fixed_point_tol: f64,
    pub max_iters: usize,
}

impl Default for DrConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            relaxation: 1.0,
            tol: 1e-10,
            fixed_point_tol: 1e-9,
            max_iters: 50_000,
        }
    }
}

/// Value of a criterion together with the inner minimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub value: f64,
    /// Minimizer `u` in `Ker D_J`.
    pub minimizer_u: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// `min_{u in K} ||c - u||_inf` for the subspace `K` behind `projector`.
///
/// Returns the best feasible value seen, which is never above `||c||_inf` (the value at `u = 0`).
pub fn min_linf_over_subspace(
    c: &Vector,
    projector: &SubspaceProjector,
    cfg: &DrConfig,
) -> CriterionResult {
    let dim = c.len();
    let at_zero = linalg::inf_norm(c);
    if projector.dim() == 0 || dim == 0 {
        return CriterionResult {
            value: at_zero,
            minimizer_u: vec![0.0; dim],
            iterations: 0,
            converged: true,
        };
    }
    let mut best_value = at_zero;
    let mut best_u = Vector::zeros(dim);
    let mut z = projector.project(c);
    let mut previous = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=cfg.max_iters {
        iterations = k;
        let u = projector.project(&z);
        let reflected = &u * 2.0 - &z;
        // prox of gamma ||c - .||_inf at v is c - prox_{gamma ||.||_inf}(c - v)
        let r = c - prox_linf(&(c - &reflected), cfg.gamma);
        let value = linalg::inf_norm(&(c - &u));
        if value < best_value {
            best_value = value;
            best_u.copy_from(&u);
        }
        let step = &r - &u;
        let residual = step.norm();
        z += step * cfg.relaxation;
        if (value - previous).abs() <= cfg.tol && residual <= cfg.fixed_point_tol {
            converged = true;
            break;
        }
        previous = value;
    }
    CriterionResult {
        value: best_value,
        minimizer_u: best_u.iter().copied().collect(),
        iterations,
        converged,
    }
}

/// Identifiability criterion of the sign vector `s`, whose support must be the
/// decomposition's D-support.
pub fn compute_ic(
    dec: &CosparseDecomposition,
    s: &SignVector,
    cfg: &DrConfig,
) -> Result<CriterionResult> {
    let s_i = dec.restrict_signs(s)?;
    Ok(ic_of_pattern(dec, &s_i, cfg))
}

/// Inner value `min_{u in Ker D_J} ||Omega p - u||_inf` for an arbitrary `p` on `I`.
pub fn ic_of_pattern(dec: &CosparseDecomposition, p_i: &Vector, cfg: &DrConfig) -> CriterionResult {
    let c = dec.omega() * p_i;
    min_linf_over_subspace(&c, dec.kernel_dj(), cfg)
}

/// ARC together with the attaining cube vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcResult {
    #[serde(flatten)]
    pub criterion: CriterionResult,
    /// Maximizing sign pattern on `I`.
    pub vertex: Vec<i8>,
}

pub const DEFAULT_ARC_CAP: usize = 16;

/// Analysis recovery criterion of the decomposition's D-support by vertex enumeration.
///
/// The inner value is invariant under `p -> -p`, so only vertices with a positive
/// first entry are visited. Vertices are evaluated on the rayon pool.
pub fn compute_arc(dec: &CosparseDecomposition, cap: usize, cfg: &DrConfig) -> Result<ArcResult> {
    let size = dec.support().len();
    if size > cap {
        return Err(Error::EnumerationCap { size, cap });
    }
    if size == 0 {
        return Ok(ArcResult {
            criterion: ic_of_pattern(dec, &Vector::zeros(0), cfg),
            vertex: Vec::new(),
        });
    }
    let count = 1u64 << (size - 1);
    let vertex_of = |code: u64| -> Vec<i8> {
        (0..size)
            .map(|i| {
                if i == 0 || code & (1 << (i - 1)) == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect()
    };
    let evaluated: Vec<(u64, CriterionResult)> = (0..count)
        .into_par_iter()
        .map(|code| {
            let p = Vector::from_iterator(size, vertex_of(code).iter().map(|&e| e as f64));
            (code, ic_of_pattern(dec, &p, cfg))
        })
        .collect();
    let converged = evaluated.iter().all(|(_, r)| r.converged);
    let iterations = evaluated.iter().map(|(_, r)| r.iterations).sum();
    let (code, best) = evaluated
        .into_iter()
        .max_by(|(ca, a), (cb, b)| a.value.total_cmp(&b.value).then(cb.cmp(ca)))
        .expect("at least one vertex");
    Ok(ArcResult {
        criterion: CriterionResult {
            converged,
            iterations,
            ..best
        },
        vertex: vertex_of(code),
    })
}

/// `wARC(I) = ||Omega^[J]||_{inf,inf}`.
pub fn compute_warc(dec: &CosparseDecomposition) -> f64 {
    op_norm(dec.omega(), NormIndex::Inf, NormIndex::Inf).expect("supported norm")
}

/// `Omega^S = Psi_J^* Psi_I^{+,*}` for the synthesis problem with dictionary `psi`.
fn synthesis_omega(psi: &Matrix, support: &[usize]) -> Result<Matrix> {
    let psi_i = linalg::select_columns(psi, support);
    if linalg::rank(&psi_i) < support.len() {
        return Err(Error::RankDeficient(format!(
            "Psi_I ({} columns) does not have full column rank",
            support.len()
        )));
    }
    let cosupport = complement(support, psi.ncols());
    let psi_j = linalg::select_columns(psi, &cosupport);
    Ok(psi_j.transpose() * linalg::pinv(&psi_i).transpose())
}

/// Fuchs criterion `IC_S(s) = ||Psi_J^* Psi_I^{+,*} s_I||_inf`.
pub fn compute_ic_fuchs(psi: &Matrix, s: &SignVector) -> Result<f64> {
    if s.len() != psi.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "sign vector has {} entries, Psi has {} columns",
            s.len(),
            psi.ncols()
        )));
    }
    let omega = synthesis_omega(psi, &s.support())?;
    Ok(linalg::inf_norm(&(omega * s.restricted())))
}

/// Exact recovery coefficient `ERC(I) = ||Psi_J^* Psi_I^{+,*}||_{inf,inf}`.
pub fn compute_erc(psi: &Matrix, support: &[usize]) -> Result<f64> {
    let omega = synthesis_omega(psi, support)?;
    op_norm(&omega, NormIndex::Inf, NormIndex::Inf)
}
