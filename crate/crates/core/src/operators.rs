//! Linear operators with adjoints, plus the induced matrix norms used by the
//! recovery theorems.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// A linear map `R^{in_dim} -> R^{out_dim}` together with its adjoint.
pub trait LinearOperator: Send + Sync + fmt::Debug {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;
    fn apply(&self, x: &Vector) -> Vector;
    fn adjoint(&self, z: &Vector) -> Vector;

    /// Explicit matrix, column `j` being `apply(e_j)`.
    fn materialize(&self) -> Matrix {
        let n = self.in_dim();
        let mut m = Matrix::zeros(self.out_dim(), n);
        let mut e = Vector::zeros(n);
        for j in 0..n {
            e[j] = 1.0;
            m.set_column(j, &self.apply(&e));
            e[j] = 0.0;
        }
        m
    }
}

/// Shared handle to an operator.
pub type Operator = Arc<dyn LinearOperator>;

/// Explicit dense matrix.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    matrix: Matrix,
}

impl DenseOperator {
    pub fn new(matrix: Matrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

impl LinearOperator for DenseOperator {
    fn in_dim(&self) -> usize {
        self.matrix.ncols()
    }
    fn out_dim(&self) -> usize {
        self.matrix.nrows()
    }
    fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * x
    }
    fn adjoint(&self, z: &Vector) -> Vector {
        self.matrix.tr_mul(z)
    }
    fn materialize(&self) -> Matrix {
        self.matrix.clone()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Identity {
    n: usize,
}

impl Identity {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl LinearOperator for Identity {
    fn in_dim(&self) -> usize {
        self.n
    }
    fn out_dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &Vector) -> Vector {
        x.clone()
    }
    fn adjoint(&self, z: &Vector) -> Vector {
        z.clone()
    }
    fn materialize(&self) -> Matrix {
        Matrix::identity(self.n, self.n)
    }
}

/// Circular correlation with a finite filter on `R^n`:
/// `out_i = sum_k w_k x_{(i + k) mod n}` over the stored `(k, w_k)` taps.
#[derive(Debug, Clone)]
pub struct CircularFilter {
    n: usize,
    taps: Vec<(isize, f64)>,
}

impl CircularFilter {
    pub fn new(n: usize, taps: Vec<(isize, f64)>) -> Self {
        Self { n, taps }
    }

    pub fn taps(&self) -> &[(isize, f64)] {
        &self.taps
    }

    fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.n as isize) as usize
    }
}

impl LinearOperator for CircularFilter {
    fn in_dim(&self) -> usize {
        self.n
    }
    fn out_dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.n);
        for i in 0..self.n {
            out[i] = self
                .taps
                .iter()
                .map(|&(k, w)| w * x[self.wrap(i as isize + k)])
                .sum();
        }
        out
    }
    fn adjoint(&self, z: &Vector) -> Vector {
        let mut out = Vector::zeros(self.n);
        for i in 0..self.n {
            for &(k, w) in &self.taps {
                out[self.wrap(i as isize + k)] += w * z[i];
            }
        }
        out
    }
}

/// Forward differences `R^n -> R^{n-1}`, `(x_{i+1} - x_i)_i`, with open boundary.
#[derive(Debug, Clone, Copy)]
pub struct ForwardDifference {
    n: usize,
}

impl ForwardDifference {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl LinearOperator for ForwardDifference {
    fn in_dim(&self) -> usize {
        self.n
    }
    fn out_dim(&self) -> usize {
        self.n - 1
    }
    fn apply(&self, x: &Vector) -> Vector {
        Vector::from_fn(self.n - 1, |i, _| x[i + 1] - x[i])
    }
    fn adjoint(&self, z: &Vector) -> Vector {
        let m = self.n - 1;
        Vector::from_fn(self.n, |i, _| {
            let left = if i >= 1 { z[i - 1] } else { 0.0 };
            let right = if i < m { z[i] } else { 0.0 };
            left - right
        })
    }
}

/// `[A_1 A_2 ...]`: horizontal concatenation, all blocks sharing the output space.
#[derive(Debug, Clone)]
pub struct HConcat {
    blocks: Vec<Operator>,
}

impl LinearOperator for HConcat {
    fn in_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.in_dim()).sum()
    }
    fn out_dim(&self) -> usize {
        self.blocks[0].out_dim()
    }
    fn apply(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.out_dim());
        let mut offset = 0;
        for b in &self.blocks {
            let d = b.in_dim();
            out += b.apply(&x.rows(offset, d).into_owned());
            offset += d;
        }
        out
    }
    fn adjoint(&self, z: &Vector) -> Vector {
        let mut out = Vector::zeros(self.in_dim());
        let mut offset = 0;
        for b in &self.blocks {
            let d = b.in_dim();
            out.rows_mut(offset, d).copy_from(&b.adjoint(z));
            offset += d;
        }
        out
    }
}

/// `[A_1; A_2; ...]`: vertical stacking, all blocks sharing the input space.
#[derive(Debug, Clone)]
pub struct VStack {
    blocks: Vec<Operator>,
}

impl LinearOperator for VStack {
    fn in_dim(&self) -> usize {
        self.blocks[0].in_dim()
    }
    fn out_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.out_dim()).sum()
    }
    fn apply(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.out_dim());
        let mut offset = 0;
        for b in &self.blocks {
            let d = b.out_dim();
            out.rows_mut(offset, d).copy_from(&b.apply(x));
            offset += d;
        }
        out
    }
    fn adjoint(&self, z: &Vector) -> Vector {
        let mut out = Vector::zeros(self.in_dim());
        let mut offset = 0;
        for b in &self.blocks {
            let d = b.out_dim();
            out += b.adjoint(&z.rows(offset, d).into_owned());
            offset += d;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Scaled {
    factor: f64,
    inner: Operator,
}

impl LinearOperator for Scaled {
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }
    fn out_dim(&self) -> usize {
        self.inner.out_dim()
    }
    fn apply(&self, x: &Vector) -> Vector {
        self.inner.apply(x) * self.factor
    }
    fn adjoint(&self, z: &Vector) -> Vector {
        self.inner.adjoint(z) * self.factor
    }
}

/// `outer ∘ inner`.
#[derive(Debug, Clone)]
pub struct Composed {
    outer: Operator,
    inner: Operator,
}

impl LinearOperator for Composed {
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }
    fn out_dim(&self) -> usize {
        self.outer.out_dim()
    }
    fn apply(&self, x: &Vector) -> Vector {
        self.outer.apply(&self.inner.apply(x))
    }
    fn adjoint(&self, z: &Vector) -> Vector {
        self.inner.adjoint(&self.outer.adjoint(z))
    }
}

/// The adjoint of an operator, viewed as an operator.
#[derive(Debug, Clone)]
pub struct Adjoint {
    inner: Operator,
}

impl LinearOperator for Adjoint {
    fn in_dim(&self) -> usize {
        self.inner.out_dim()
    }
    fn out_dim(&self) -> usize {
        self.inner.in_dim()
    }
    fn apply(&self, x: &Vector) -> Vector {
        self.inner.adjoint(x)
    }
    fn adjoint(&self, z: &Vector) -> Vector {
        self.inner.apply(z)
    }
}

pub fn dense(matrix: Matrix) -> Operator {
    Arc::new(DenseOperator::new(matrix))
}

pub fn identity(n: usize) -> Operator {
    Arc::new(Identity::new(n))
}

/// `a ∘ b`, i.e. `x -> a(b(x))`.
pub fn compose(a: Operator, b: Operator) -> Result<Operator> {
    if b.out_dim() != a.in_dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose: inner output {} != outer input {}",
            b.out_dim(),
            a.in_dim()
        )));
    }
    Ok(Arc::new(Composed { outer: a, inner: b }))
}

pub fn hconcat(blocks: Vec<Operator>) -> Result<Operator> {
    let Some(first) = blocks.first() else {
        return Err(Error::InvalidParameter("empty concatenation".into()));
    };
    let out = first.out_dim();
    if let Some(b) = blocks.iter().find(|b| b.out_dim() != out) {
        return Err(Error::DimensionMismatch(format!(
            "concatenated blocks have output dims {} and {}",
            out,
            b.out_dim()
        )));
    }
    Ok(Arc::new(HConcat { blocks }))
}

pub fn vstack(blocks: Vec<Operator>) -> Result<Operator> {
    let Some(first) = blocks.first() else {
        return Err(Error::InvalidParameter("empty stack".into()));
    };
    let inp = first.in_dim();
    if let Some(b) = blocks.iter().find(|b| b.in_dim() != inp) {
        return Err(Error::DimensionMismatch(format!(
            "stacked blocks have input dims {} and {}",
            inp,
            b.in_dim()
        )));
    }
    Ok(Arc::new(VStack { blocks }))
}

pub fn scaled(factor: f64, inner: Operator) -> Operator {
    Arc::new(Scaled { factor, inner })
}

pub fn adjoint_of(inner: Operator) -> Operator {
    Arc::new(Adjoint { inner })
}

/// Circular convolution with a sampled Gaussian kernel of standard deviation `sigma`,
/// truncated at `±ceil(4 sigma)` and normalized to unit sum.
pub fn circular_gaussian_blur(n: usize, sigma: f64) -> Result<Operator> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "blur sigma must be positive, got {sigma}"
        )));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "blur needs n >= 3, got {n}"
        )));
    }
    let half = (4.0 * sigma).ceil() as isize;
    // Offsets that wrap onto the same circular position are merged.
    let mut weights = vec![0.0; n];
    for k in -half..=half {
        let w = (-((k * k) as f64) / (2.0 * sigma * sigma)).exp();
        weights[k.rem_euclid(n as isize) as usize] += w;
    }
    let total: f64 = weights.iter().sum();
    let taps = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(k, &w)| {
            let k = k as isize;
            let offset = if k > n as isize / 2 { k - n as isize } else { k };
            (offset, w / total)
        })
        .collect();
    Ok(Arc::new(CircularFilter::new(n, taps)))
}

/// `q x n` matrix of i.i.d. standard normal entries drawn from a ChaCha8 stream
/// seeded with `seed`, filled row by row.
pub fn gaussian_random_matrix(q: usize, n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..q * n).map(|_| StandardNormal.sample(&mut rng)).collect();
    Matrix::from_row_slice(q, n, &data)
}

/// Exponent of a vector norm in an induced operator norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormIndex {
    Two,
    Inf,
}

/// Induced norm `||M||_{p,q} = max_{||x||_p <= 1} ||M x||_q`.
pub fn op_norm(m: &Matrix, p: NormIndex, q: NormIndex) -> Result<f64> {
    use NormIndex::*;
    match (p, q) {
        (Inf, Inf) => Ok(m
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)),
        (Two, Inf) => Ok(m.row_iter().map(|r| r.norm()).fold(0.0, f64::max)),
        (Two, Two) => Ok(spectral_norm(m)),
        (Inf, Two) => inf_to_two_norm(m),
    }
}

/// Column count up to which `||M||_{inf,2}` is computed by vertex enumeration.
pub const INF_TO_TWO_CAP: usize = 20;

/// `max_{||x||_inf <= 1} ||M x||_2`: a convex function peaks at a cube vertex, and
/// `x` and `-x` give the same value, so `2^(cols - 1)` vertices suffice.
fn inf_to_two_norm(m: &Matrix) -> Result<f64> {
    let cols = m.ncols();
    if cols > INF_TO_TWO_CAP {
        return Err(Error::EnumerationCap { size: cols, cap: INF_TO_TWO_CAP });
    }
    if cols == 0 {
        return Ok(0.0);
    }
    let mut best: f64 = 0.0;
    let mut v = m.column_sum();
    for code in 0u64..1 << (cols - 1) {
        if code > 0 {
            // Gray code: flip one sign per step.
            let bit = code.trailing_zeros() as usize + 1;
            let sign = if (code ^ (code >> 1)) >> (bit - 1) & 1 == 1 { -2.0 } else { 2.0 };
            v += m.column(bit) * sign;
        }
        best = best.max(v.norm());
    }
    Ok(best)
}

const POWER_MAX_ITERS: usize = 10_000;
const POWER_TOL: f64 = 1e-9;
const DENSE_SVD_LIMIT: usize = 512;

/// Largest singular value: full decomposition up to 512 rows/columns,
/// power iteration on `M^T M` beyond.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows().max(m.ncols()) <= DENSE_SVD_LIMIT {
        return linalg::spectral_norm(m);
    }
    let op = DenseOperator::new(m.clone());
    estimate_norm(&op)
}

/// Power iteration on `K^* K` for the operator norm `||K||_{2,2}`.
pub fn estimate_norm(op: &dyn LinearOperator) -> f64 {
    let n = op.in_dim();
    if n == 0 || op.out_dim() == 0 {
        return 0.0;
    }
    // Deterministic start with no special symmetry.
    let mut x = Vector::from_fn(n, |i, _| 1.0 + 0.1 * ((i * 7919) % 13) as f64);
    x /= x.norm();
    let mut estimate = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let next = op.adjoint(&op.apply(&x));
        let lambda = next.norm();
        if lambda == 0.0 {
            return 0.0;
        }
        x = next / lambda;
        let done = (lambda - estimate).abs() <= POWER_TOL * lambda;
        estimate = lambda;
        if done {
            break;
        }
    }
    estimate.sqrt()
}

/// Moore-Penrose pseudoinverse with the `max(rows, cols) * eps * sigma_max` rank rule.
pub fn pseudoinverse(m: &Matrix) -> Matrix {
    linalg::pinv(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
        Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn adjoint_gap(op: &dyn LinearOperator, rng: &mut ChaCha8Rng) -> f64 {
        let x = random_vector(rng, op.in_dim());
        let z = random_vector(rng, op.out_dim());
        let lhs = op.apply(&x).dot(&z);
        let rhs = x.dot(&op.adjoint(&z));
        (lhs - rhs).abs() / (1.0 + lhs.abs())
    }

    fn sample_operators() -> Vec<Operator> {
        let g = dense(gaussian_random_matrix(5, 7, 3));
        let blur = circular_gaussian_blur(9, 1.3).unwrap();
        let diff: Operator = Arc::new(ForwardDifference::new(7));
        let filt: Operator = Arc::new(CircularFilter::new(7, vec![(0, 0.5), (-1, -0.5), (2, 0.25)]));
        vec![
            g.clone(),
            blur.clone(),
            diff.clone(),
            filt.clone(),
            identity(4),
            scaled(-2.5, g.clone()),
            compose(g.clone(), filt.clone()).unwrap(),
            hconcat(vec![g.clone(), dense(gaussian_random_matrix(5, 2, 4))]).unwrap(),
            vstack(vec![diff.clone(), filt.clone(), identity(7)]).unwrap(),
            adjoint_of(diff),
        ]
    }

    #[test]
    fn adjoint_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for op in sample_operators() {
            for _ in 0..20 {
                assert!(adjoint_gap(op.as_ref(), &mut rng) <= 1e-10, "{op:?}");
            }
        }
    }

    #[test]
    fn linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for op in sample_operators() {
            let x = random_vector(&mut rng, op.in_dim());
            let w = random_vector(&mut rng, op.in_dim());
            let (a, b) = (1.7, -0.3);
            let lhs = op.apply(&(&x * a + &w * b));
            let rhs = op.apply(&x) * a + op.apply(&w) * b;
            assert!((&lhs - &rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn materialize_matches_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for op in sample_operators() {
            let m = op.materialize();
            let x = random_vector(&mut rng, op.in_dim());
            assert!((&m * &x - op.apply(&x)).norm() <= 1e-12 * (1.0 + x.norm()));
            let z = random_vector(&mut rng, op.out_dim());
            assert!((m.tr_mul(&z) - op.adjoint(&z)).norm() <= 1e-12 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn materialized_composition_is_product() {
        let a = dense(gaussian_random_matrix(4, 6, 1));
        let b = circular_gaussian_blur(6, 0.8).unwrap();
        let c = compose(a.clone(), b.clone()).unwrap();
        let diff = c.materialize() - a.materialize() * b.materialize();
        assert!(diff.amax() <= 1e-10);
    }

    #[test]
    fn compose_examples() {
        let c = compose(identity(3), identity(3)).unwrap();
        let x = Vector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(c.apply(&x), x);

        let d = dense(Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]));
        let dd = compose(d.clone(), d).unwrap();
        assert_eq!(dd.apply(&Vector::from_vec(vec![1.0, 1.0])), Vector::from_vec(vec![4.0, 9.0]));
    }

    #[test]
    fn compose_rejects_mismatch() {
        let a = dense(Matrix::zeros(2, 3));
        let b = dense(Matrix::zeros(4, 2));
        assert!(matches!(compose(a, b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn blur_preserves_constants() {
        let op = circular_gaussian_blur(16, 1.5).unwrap();
        let c = Vector::from_element(16, 2.5);
        assert!((op.apply(&c) - &c).amax() < 1e-14);
    }

    #[test]
    fn blur_is_symmetric_and_shift_invariant() {
        let op = circular_gaussian_blur(8, 1.0).unwrap();
        let m = op.materialize();
        assert!((&m - m.transpose()).amax() < 1e-15);
        let col0: Vec<f64> = m.column(0).iter().copied().collect();
        for i in 0..8 {
            for r in 0..8 {
                assert!((m[((r + i) % 8, i)] - col0[r]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn blur_wide_kernel_wraps() {
        // 2 * ceil(4 * 3) + 1 = 25 > 5, so taps fold onto each other.
        let op = circular_gaussian_blur(5, 3.0).unwrap();
        let c = Vector::from_element(5, 1.0);
        assert!((op.apply(&c) - &c).amax() < 1e-14);
    }

    #[test]
    fn blur_rejects_bad_sigma() {
        assert!(circular_gaussian_blur(8, 0.0).is_err());
        assert!(circular_gaussian_blur(8, -1.0).is_err());
    }

    #[test]
    fn gaussian_matrix_is_deterministic() {
        assert_eq!(gaussian_random_matrix(4, 5, 42), gaussian_random_matrix(4, 5, 42));
        assert_ne!(gaussian_random_matrix(4, 5, 42), gaussian_random_matrix(4, 5, 43));
    }

    #[test]
    fn gaussian_matrix_moments() {
        let m = gaussian_random_matrix(1000, 1, 7);
        let mean = m.mean();
        let var = m.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 999.0;
        assert!(mean.abs() < 0.1, "mean {mean}");
        assert!((var - 1.0).abs() < 0.15, "var {var}");
    }

    #[test]
    fn op_norm_examples() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, -2.0, 3.0, 0.0]);
        assert_eq!(op_norm(&m, NormIndex::Inf, NormIndex::Inf).unwrap(), 3.0);
        assert_eq!(op_norm(&m, NormIndex::Two, NormIndex::Inf).unwrap(), 3.0);
        let id = Matrix::identity(5, 5);
        assert!((op_norm(&id, NormIndex::Two, NormIndex::Two).unwrap() - 1.0).abs() < 1e-12);
        assert!(op_norm(&m, NormIndex::Two, NormIndex::Two).is_ok());
        // Vertex (1, -1): |(3, 3)| = sqrt(18).
        assert!((op_norm(&m, NormIndex::Inf, NormIndex::Two).unwrap() - 18f64.sqrt()).abs() < 1e-12);
        assert_eq!(op_norm(&Matrix::identity(4, 4), NormIndex::Inf, NormIndex::Two).unwrap(), 2.0);
    }

    #[test]
    fn inf_to_two_norm_matches_exhaustive_search() {
        let m = gaussian_random_matrix(5, 7, 21);
        let mut best: f64 = 0.0;
        for code in 0u32..1 << 7 {
            let x = Vector::from_fn(7, |j, _| if code >> j & 1 == 1 { -1.0 } else { 1.0 });
            best = best.max((&m * x).norm());
        }
        let got = op_norm(&m, NormIndex::Inf, NormIndex::Two).unwrap();
        assert!((got - best).abs() <= 1e-12 * best);
        let wide = Matrix::zeros(2, INF_TO_TWO_CAP + 1);
        assert!(matches!(
            op_norm(&wide, NormIndex::Inf, NormIndex::Two),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn spectral_norm_bounds_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = gaussian_random_matrix(6, 9, 5);
        let s = op_norm(&m, NormIndex::Two, NormIndex::Two).unwrap();
        for _ in 0..20 {
            let x = random_vector(&mut rng, 9);
            assert!((&m * &x).norm() <= s * x.norm() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn power_iteration_agrees_with_svd() {
        let m = gaussian_random_matrix(12, 8, 9);
        let op = DenseOperator::new(m.clone());
        let exact = linalg::spectral_norm(&m);
        assert!((estimate_norm(&op) - exact).abs() <= 1e-6 * exact);
    }

    #[test]
    fn pseudoinverse_examples() {
        let id = Matrix::identity(3, 3);
        assert!((pseudoinverse(&id) - &id).amax() < 1e-14);
        let s = Matrix::from_row_slice(1, 1, &[2.0]);
        assert!((pseudoinverse(&s)[(0, 0)] - 0.5).abs() < 1e-15);
        let m = gaussian_random_matrix(5, 3, 21);
        let p = pseudoinverse(&m);
        assert!((&p * &m - Matrix::identity(3, 3)).amax() < 1e-8);
    }
}
