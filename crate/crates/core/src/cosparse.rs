//! D-support and cospace geometry: sign vectors, the cospace `G_J = Ker D_J^*`,
//! condition `(H_J)`, the operator `A_J` and the matrices `Omega^[J]`, `B^[J]`.
//!
//! Index sets are 0-based throughout the library. User-facing output converts
//! to 1-based indices through [`one_based`].

use serde::{Deserialize, Serialize};

use crate::dictionaries::Dictionary;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, SubspaceProjector, Vector};
use crate::operators::{op_norm, LinearOperator, NormIndex};

/// Relative threshold used when no explicit support tolerance is given.
pub const DEFAULT_SUPPORT_REL_TOL: f64 = 1e-8;

/// Entries in `{-1, 0, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|e| !(-1..=1).contains(*e)) {
            return Err(Error::InvalidParameter(format!("sign entry {bad} not in {{-1,0,1}}")));
        }
        Ok(Self(entries))
    }

    /// Signs of `coeffs`, zeroing entries with magnitude `<= tol`.
    pub fn from_coefficients(coeffs: &Vector, tol: f64) -> Self {
        Self(
            coeffs
                .iter()
                .map(|&c| {
                    if c.abs() <= tol {
                        0
                    } else if c > 0.0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    /// `I = { i : s_i != 0 }`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] != 0).collect()
    }

    /// `J = I^c`.
    pub fn cosupport(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] == 0).collect()
    }

    /// `s_I` as a real vector.
    pub fn restricted(&self) -> Vector {
        let support = self.support();
        Vector::from_iterator(support.len(), support.iter().map(|&i| self.0[i] as f64))
    }

    pub fn as_vector(&self) -> Vector {
        Vector::from_iterator(self.0.len(), self.0.iter().map(|&e| e as f64))
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|e| -e).collect())
    }
}

/// Default support tolerance `1e-8 * ||coeffs||_inf`.
pub fn default_tolerance(coeffs: &Vector) -> f64 {
    DEFAULT_SUPPORT_REL_TOL * linalg::inf_norm(coeffs)
}

/// Coefficients below `ROUNDING_FLOOR * ||x||_inf` are rounding noise whatever `D^* x` looks like.
pub const ROUNDING_FLOOR: f64 = 1e-12;

/// Sign of `D^* x`, entries with `|(D^* x)_i| <= tol` set to zero.
/// `tol = None` selects [`default_tolerance`], raised to `ROUNDING_FLOOR * ||x||_inf`.
pub fn d_support(x: &Vector, dict: &Dictionary, tol: Option<f64>) -> SignVector {
    let coeffs = dict.analysis(x);
    let tol = tol.unwrap_or_else(|| {
        default_tolerance(&coeffs).max(ROUNDING_FLOOR * linalg::inf_norm(x))
    });
    SignVector::from_coefficients(&coeffs, tol)
}

/// Sorted complement of `idx` in `0..p`.
pub fn complement(idx: &[usize], p: usize) -> Vec<usize> {
    let mut mask = vec![true; p];
    for &i in idx {
        mask[i] = false;
    }
    (0..p).filter(|&i| mask[i]).collect()
}

/// Shift 0-based indices to the 1-based convention of reports.
pub fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

fn validate_indices(idx: &[usize], p: usize) -> Result<Vec<usize>> {
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&i| i >= p) {
        return Err(Error::InvalidParameter(format!(
            "index {bad} out of range for {p} atoms"
        )));
    }
    Ok(sorted)
}

/// `dim G_J - rank(Phi U_J)`: zero exactly when `(H_J)` holds.
///
/// `U_J` is orthonormal, so `||Phi U_J|| <= ||Phi||`; singular values are judged
/// against the scale of `Phi` rather than of the product.
pub fn hj_deficiency(phi: &Matrix, u_j: &Matrix) -> usize {
    let tau = linalg::rank_threshold(phi.nrows(), phi.ncols(), linalg::spectral_norm(phi));
    let rank = linalg::singular_values(&(phi * u_j))
        .iter()
        .filter(|&&s| s > tau && s > 0.0)
        .count();
    u_j.ncols() - rank
}

/// `(H_J)` for an explicit cosupport.
pub fn check_hj(dict: &Dictionary, phi: &Matrix, cosupport: &[usize]) -> Result<bool> {
    Ok(hj_deficiency(phi, &cospace_basis(dict, cosupport)?) == 0)
}

/// Serde adapter writing 0-based index sets in the 1-based convention of reports.
pub mod one_based_indices {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(idx: &[usize], ser: S) -> Result<S::Ok, S::Error> {
        super::one_based(idx).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<usize>, D::Error> {
        let raw = Vec::<usize>::deserialize(de)?;
        if raw.contains(&0) {
            return Err(serde::de::Error::custom("indices are 1-based"));
        }
        Ok(raw.into_iter().map(|i| i - 1).collect())
    }
}

/// Orthonormal basis of `G_J = Ker D_J^*` (columns in `R^n`).
pub fn cospace_basis(dict: &Dictionary, cosupport: &[usize]) -> Result<Matrix> {
    let cosupport = validate_indices(cosupport, dict.p())?;
    let d_j = linalg::select_columns(&dict.materialize(), &cosupport);
    Ok(cospace_of(&d_j))
}

fn cospace_of(d_j: &Matrix) -> Matrix {
    if d_j.ncols() == 0 {
        return Matrix::identity(d_j.nrows(), d_j.nrows());
    }
    linalg::nullspace(&d_j.transpose())
}

/// `(H_0)`: `Ker Phi ∩ Ker D^* = {0}`, decided on the stacked matrix `[Phi; D^*]`.
pub fn check_h0(dict: &Dictionary, phi: &dyn LinearOperator) -> bool {
    let phi_m = phi.materialize();
    let d_t = dict.materialize().transpose();
    let n = dict.n();
    let mut stacked = Matrix::zeros(phi_m.nrows() + d_t.nrows(), n);
    stacked.view_mut((0, 0), phi_m.shape()).copy_from(&phi_m);
    stacked.view_mut((phi_m.nrows(), 0), d_t.shape()).copy_from(&d_t);
    linalg::rank(&stacked) == n
}

/// Materialized cospace quantities for one cosupport `J`.
#[derive(Debug, Clone)]
pub struct CosparseDecomposition {
    support: Vec<usize>,
    cosupport: Vec<usize>,
    phi: Matrix,
    d_i: Matrix,
    d_j: Matrix,
    u_j: Matrix,
    a_j: Matrix,
    omega: Matrix,
    b: Matrix,
    kernel_dj: SubspaceProjector,
}

/// Serializable summary of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    /// 1-based D-support.
    pub support: Vec<usize>,
    pub cosupport_dim: usize,
    pub cospace_dim: usize,
    pub kernel_dj_dim: usize,
    pub h_j: bool,
    pub noise_c_j: f64,
}

/// Build the decomposition attached to cosupport `J`. Fails with
/// [`Error::HjViolated`] when `Phi` is not injective on `G_J`.
pub fn build_decomposition(
    dict: &Dictionary,
    phi: &dyn LinearOperator,
    cosupport: &[usize],
) -> Result<CosparseDecomposition> {
    if phi.in_dim() != dict.n() {
        return Err(Error::DimensionMismatch(format!(
            "Phi acts on R^{} but the dictionary on R^{}",
            phi.in_dim(),
            dict.n()
        )));
    }
    let cosupport = validate_indices(cosupport, dict.p())?;
    let support = complement(&cosupport, dict.p());
    let d = dict.materialize();
    let phi = phi.materialize();
    let n = dict.n();
    let q = phi.nrows();

    let d_i = linalg::select_columns(&d, &support);
    let d_j = linalg::select_columns(&d, &cosupport);
    let u_j = cospace_of(&d_j);

    let phi_u = &phi * &u_j;
    let deficiency = hj_deficiency(&phi, &u_j);
    if deficiency > 0 {
        return Err(Error::HjViolated { deficiency });
    }
    // (U^T Phi^T Phi U)^{-1} = (Phi U)^+ (Phi U)^{+T}
    let phi_u_pinv = linalg::pinv(&phi_u);
    let a_j = &u_j * (&phi_u_pinv * phi_u_pinv.transpose()) * u_j.transpose();

    let d_j_pinv = linalg::pinv(&d_j);
    let gram = phi.transpose() * &phi;
    let omega_tilde = (&gram * &a_j - Matrix::identity(n, n)) * &d_i;
    let b_tilde = phi.transpose() * (&phi * &a_j * phi.transpose() - Matrix::identity(q, q));
    let omega = &d_j_pinv * omega_tilde;
    let b = &d_j_pinv * b_tilde;
    let kernel_dj = SubspaceProjector::onto_kernel(&d_j);

    Ok(CosparseDecomposition {
        support,
        cosupport,
        phi,
        d_i,
        d_j,
        u_j,
        a_j,
        omega,
        b,
        kernel_dj,
    })
}

impl CosparseDecomposition {
    pub fn n(&self) -> usize {
        self.u_j.nrows()
    }

    pub fn q(&self) -> usize {
        self.phi.nrows()
    }

    pub fn p(&self) -> usize {
        self.support.len() + self.cosupport.len()
    }

    /// D-support `I` (0-based, sorted).
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// D-cosupport `J` (0-based, sorted).
    pub fn cosupport(&self) -> &[usize] {
        &self.cosupport
    }

    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn d_i(&self) -> &Matrix {
        &self.d_i
    }

    pub fn d_j(&self) -> &Matrix {
        &self.d_j
    }

    /// Orthonormal basis of `G_J`.
    pub fn u_j(&self) -> &Matrix {
        &self.u_j
    }

    /// `A_J = U_J (U_J^* Phi^* Phi U_J)^{-1} U_J^*`.
    pub fn a_j(&self) -> &Matrix {
        &self.a_j
    }

    /// `Omega^[J] = D_J^+ (Phi^* Phi A_J - Id) D_I`, of size `|J| x |I|`.
    pub fn omega(&self) -> &Matrix {
        &self.omega
    }

    /// `B^[J] = D_J^+ Phi^* (Phi A_J Phi^* - Id)`, of size `|J| x q`.
    pub fn b(&self) -> &Matrix {
        &self.b
    }

    /// Projector onto `Ker D_J`, a subspace of `R^{|J|}`.
    pub fn kernel_dj(&self) -> &SubspaceProjector {
        &self.kernel_dj
    }

    /// Cosupport-restricted signs `s_I` as a vector, checking that `s` lives on `I`.
    pub fn restrict_signs(&self, s: &SignVector) -> Result<Vector> {
        if s.len() != self.p() {
            return Err(Error::DimensionMismatch(format!(
                "sign vector has {} entries, dictionary has {} atoms",
                s.len(),
                self.p()
            )));
        }
        if s.support() != self.support {
            return Err(Error::InvalidParameter(
                "sign vector support differs from the decomposition's D-support".into(),
            ));
        }
        Ok(s.restricted())
    }

    pub fn summary(&self) -> DecompositionSummary {
        DecompositionSummary {
            n: self.n(),
            p: self.p(),
            q: self.q(),
            support: one_based(&self.support),
            cosupport_dim: self.cosupport.len(),
            cospace_dim: self.u_j.ncols(),
            kernel_dj_dim: self.kernel_dj.dim(),
            h_j: true,
            noise_c_j: noise_constant(self),
        }
    }
}

/// `c_J = ||B^[J]||_{2,inf}`, the constant of the bounded-noise theorem.
pub fn noise_constant(dec: &CosparseDecomposition) -> f64 {
    op_norm(dec.b(), NormIndex::Two, NormIndex::Inf).expect("supported norm")
}

/// Constants of the small-noise theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallNoiseConstants {
    /// `||B^[J]||_{2,inf} / (1 - IC)`.
    pub c_j: f64,
    /// `[ ||D_I^* A_J||_{inf,inf} (||Phi^*||_{2,inf} / c_J + ||D_I||_{inf,inf}) ]^{-1}`.
    pub c_tilde_j: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremConstants {
    pub noise_c_j: f64,
    /// `None` when `IC >= 1`.
    pub small_noise: Option<SmallNoiseConstants>,
}

/// Small-noise constants for a sign vector with identifiability criterion `ic`.
pub fn small_noise_constants(dec: &CosparseDecomposition, ic: f64) -> Result<SmallNoiseConstants> {
    if !(ic < 1.0) {
        return Err(Error::NotApplicable(format!(
            "small-noise constants need IC < 1, got IC = {ic}"
        )));
    }
    use NormIndex::*;
    let c_j = noise_constant(dec) / (1.0 - ic);
    let di_aj = dec.d_i().transpose() * dec.a_j();
    let di_aj_norm = op_norm(&di_aj, Inf, Inf)?;
    let phi_t_norm = op_norm(&dec.phi().transpose(), Two, Inf)?;
    let di_norm = op_norm(dec.d_i(), Inf, Inf)?;
    let c_tilde_j = 1.0 / (di_aj_norm * (phi_t_norm / c_j + di_norm));
    Ok(SmallNoiseConstants { c_j, c_tilde_j })
}

pub fn theorem_constants(dec: &CosparseDecomposition, ic: f64) -> TheoremConstants {
    TheoremConstants {
        noise_c_j: noise_constant(dec),
        small_noise: small_noise_constants(dec, ic).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionaries::{make_fused, make_haar, make_identity, make_tv};
    use crate::operators::{self, gaussian_random_matrix, DenseOperator, Identity};

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn d_support_examples() {
        let tv = make_tv(4).unwrap();
        let s = d_support(&v(&[0.0, 0.0, 1.0, 1.0]), &tv, None);
        assert_eq!(s.entries(), &[0, 1, 0]);
        assert_eq!(s.support(), vec![1]);
        assert_eq!(one_based(&s.support()), vec![2]);

        let zero = d_support(&Vector::zeros(4), &tv, None);
        assert!(zero.support().is_empty());

        let stairs = d_support(&v(&[0.0, 1.0, 2.0]), &make_tv(3).unwrap(), None);
        assert_eq!(stairs.entries(), &[1, 1]);
    }

    #[test]
    fn support_and_cosupport_partition() {
        let s = SignVector::new(vec![0, 1, -1, 0, 1]).unwrap();
        let mut all = s.support();
        all.extend(s.cosupport());
        all.sort();
        assert_eq!(all, (0..5).collect::<Vec<_>>());
        assert!(SignVector::new(vec![2]).is_err());
    }

    #[test]
    fn cospace_examples() {
        let tv = make_tv(5).unwrap();
        let full = cospace_basis(&tv, &[0, 1, 2, 3]).unwrap();
        assert_eq!(full.ncols(), 1);
        let expected = 1.0 / 5f64.sqrt();
        assert!(full.column(0).iter().all(|c| (c.abs() - expected).abs() < 1e-12));

        let empty = cospace_basis(&tv, &[]).unwrap();
        assert_eq!(empty, Matrix::identity(5, 5));

        let fused = make_fused(5, 0.3).unwrap();
        // Atom 4 + 2 belongs to the identity block and is e_2.
        let basis = cospace_basis(&fused, &[1, 6]).unwrap();
        let mut e2 = Vector::zeros(5);
        e2[2] = 1.0;
        assert!(basis.tr_mul(&e2).amax() < 1e-12);
        assert_eq!(basis.ncols(), 3);
    }

    #[test]
    fn h0_examples() {
        let tv = make_tv(6).unwrap();
        assert!(check_h0(&tv, &Identity::new(6)));
        let zero_row = DenseOperator::new(Matrix::zeros(1, 6));
        assert!(!check_h0(&tv, &zero_row));
        let fused = make_fused(6, 0.1).unwrap();
        assert!(check_h0(&fused, &zero_row));
    }

    #[test]
    fn identity_phi_gives_projector() {
        let tv = make_tv(6).unwrap();
        let dec = build_decomposition(&tv, &Identity::new(6), &[0, 2, 3]).unwrap();
        let proj = dec.u_j() * dec.u_j().transpose();
        assert!((dec.a_j() - &proj).amax() < 1e-12);
        // Omega = -D_J^+ D_I when Phi = Id.
        let expected = -linalg::pinv(dec.d_j()) * dec.d_i();
        assert!((dec.omega() - expected).amax() < 1e-12);
        // B = D_J^+ (A_J - Id) = -D_J^+ (Id - U U^T).
        let b_tilde = dec.a_j() - Matrix::identity(6, 6);
        assert!((&b_tilde + (Matrix::identity(6, 6) - &proj)).amax() < 1e-12);
        assert!((dec.b() - linalg::pinv(dec.d_j()) * b_tilde).amax() < 1e-12);
    }

    #[test]
    fn synthesis_reduction_of_omega() {
        let n = 8;
        let psi = gaussian_random_matrix(n, 12, 3);
        let d = make_identity(12).unwrap();
        let cosupport: Vec<usize> = (0..12).filter(|i| ![1, 4, 9].contains(i)).collect();
        let dec = build_decomposition(&d, &DenseOperator::new(psi.clone()), &cosupport).unwrap();
        let psi_i = linalg::select_columns(&psi, &[1, 4, 9]);
        let psi_j = linalg::select_columns(&psi, &cosupport);
        let expected = psi_j.transpose() * linalg::pinv(&psi_i).transpose();
        assert!((dec.omega() - expected).amax() < 1e-10);
    }

    #[test]
    fn hj_violation_reports_dimension() {
        let tv = make_tv(6).unwrap();
        // J = everything: G_J = constants; a Phi that kills constants breaks H_J.
        let phi = DenseOperator::new(make_tv(6).unwrap().materialize().transpose());
        match build_decomposition(&tv, &phi, &[0, 1, 2, 3, 4]) {
            Err(Error::HjViolated { deficiency }) => assert_eq!(deficiency, 1),
            other => panic!("expected H_J failure, got {other:?}"),
        }
    }

    fn random_decompositions() -> Vec<(Dictionary, CosparseDecomposition)> {
        let mut out = Vec::new();
        let n = 10;
        let dicts = vec![
            make_tv(n).unwrap(),
            make_fused(n, 0.5).unwrap(),
            make_haar(8, 1, 0.5).unwrap(),
        ];
        for (k, d) in dicts.into_iter().enumerate() {
            let n = d.n();
            let phi = gaussian_random_matrix(n - 2, n, 100 + k as u64);
            let support: Vec<usize> = (0..d.p()).filter(|i| i % 3 == 1).collect();
            let cosupport = complement(&support, d.p());
            if let Ok(dec) = build_decomposition(&d, &DenseOperator::new(phi), &cosupport) {
                out.push((d, dec));
            }
        }
        assert!(out.len() >= 2);
        out
    }

    #[test]
    fn decomposition_invariants() {
        for (_, dec) in random_decompositions() {
            assert!((dec.d_j().transpose() * dec.u_j()).amax() < 1e-10);
            let a = dec.a_j();
            assert!((a - a.transpose()).amax() < 1e-10);
            // A_J Phi^* Phi u = u on G_J.
            let gram = dec.phi().transpose() * dec.phi();
            for c in 0..dec.u_j().ncols() {
                let u = dec.u_j().column(c).into_owned();
                assert!((a * &gram * &u - &u).norm() < 1e-8);
            }
            // Im(Omega~) ⊆ Im(D_J).
            let n = dec.n();
            let omega_tilde = (&gram * a - Matrix::identity(n, n)) * dec.d_i();
            let proj = dec.d_j() * linalg::pinv(dec.d_j());
            assert!(((Matrix::identity(n, n) - proj) * omega_tilde).norm() < 1e-8);
        }
    }

    #[test]
    fn a_j_matches_constrained_quadratic_program() {
        // A_J u = argmin_{D_J^* x = 0} 1/2 ||Phi x||^2 - <x, u>, via its KKT system.
        for (_, dec) in random_decompositions() {
            let n = dec.n();
            let j = dec.d_j().ncols();
            let gram = dec.phi().transpose() * dec.phi();
            let mut kkt = Matrix::zeros(n + j, n + j);
            kkt.view_mut((0, 0), (n, n)).copy_from(&gram);
            kkt.view_mut((0, n), (n, j)).copy_from(dec.d_j());
            kkt.view_mut((n, 0), (j, n)).copy_from(&dec.d_j().transpose());
            let kkt_pinv = linalg::pinv(&kkt);
            let u = Vector::from_fn(n, |i, _| (i as f64 * 0.7).sin());
            let mut rhs = Vector::zeros(n + j);
            rhs.rows_mut(0, n).copy_from(&u);
            let x = (&kkt_pinv * rhs).rows(0, n).into_owned();
            assert!((dec.a_j() * &u - x).norm() < 1e-8);
        }
    }

    #[test]
    fn members_of_cospace_vanish_on_cosupport() {
        let tv = make_tv(9).unwrap();
        let x = v(&[1.0, 1.0, 3.0, 3.0, 3.0, -2.0, -2.0, -2.0, 0.5]);
        let s = d_support(&x, &tv, None);
        let dec = build_decomposition(&tv, &Identity::new(9), &s.cosupport()).unwrap();
        assert!((dec.d_j().transpose() * &x).amax() <= 1e-10 * x.norm());
    }

    #[test]
    fn constants() {
        let tv = make_tv(8).unwrap();
        let dec = build_decomposition(&tv, &Identity::new(8), &[0, 1, 3, 4, 6]).unwrap();
        let tc = theorem_constants(&dec, 0.5);
        assert_eq!(tc.noise_c_j, op_norm(dec.b(), NormIndex::Two, NormIndex::Inf).unwrap());
        let small = tc.small_noise.unwrap();
        assert!((small.c_j - 2.0 * tc.noise_c_j).abs() < 1e-14);
        assert!(small.c_tilde_j > 0.0);
        assert!(small_noise_constants(&dec, 1.0).is_err());
        assert!(theorem_constants(&dec, 1.2).small_noise.is_none());
    }

    #[test]
    fn blur_decomposition_builds() {
        let haar = make_haar(16, 2, 1.0).unwrap();
        let blur = operators::circular_gaussian_blur(16, 1.0).unwrap();
        let x = Vector::from_fn(16, |i, _| if (5..11).contains(&i) { 1.0 } else { 0.0 });
        let s = d_support(&x, &haar, None);
        let dec = build_decomposition(&haar, blur.as_ref(), &s.cosupport()).unwrap();
        assert!(dec.kernel_dj().dim() > 0);
        let summary = dec.summary();
        assert_eq!(summary.support, one_based(&s.support()));
        let json = serde_json::to_string(&summary).unwrap();
        assert!(json.contains("\"h_j\":true"));
    }
}
