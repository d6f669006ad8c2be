//! Dense linear-algebra helpers built on singular value decompositions.
//!
//! Every rank decision uses the threshold
//! `tau = max(rows, cols) * f64::EPSILON * sigma_max`.

use nalgebra::{DMatrix, DVector};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Numerical-rank threshold for a `rows x cols` matrix with largest singular value `sigma_max`.
pub fn rank_threshold(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Full singular decomposition of a matrix padded with zero rows to be at least square,
/// so that `v` spans the whole input space. Returns `(u, singular values, v)` with the
/// singular values sorted in decreasing order.
struct FullSvd {
    u: Matrix,
    values: Vec<f64>,
    v: Matrix,
    tau: f64,
}

fn full_svd(m: &Matrix) -> FullSvd {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = Matrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = Matrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v = Matrix::from_fn(v_t.ncols(), order.len(), |r, c| v_t[(order[c], r)]);
    let sigma_max = values.first().copied().unwrap_or(0.0);
    FullSvd {
        u,
        values,
        v,
        tau: rank_threshold(rows, cols, sigma_max),
    }
}

/// Singular values in decreasing order.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn rank(m: &Matrix) -> usize {
    if m.is_empty() {
        return 0;
    }
    let s = singular_values(m);
    let tau = rank_threshold(m.nrows(), m.ncols(), s[0]);
    s.iter().filter(|&&v| v > tau && v > 0.0).count()
}

/// Moore-Penrose pseudoinverse.
pub fn pinv(m: &Matrix) -> Matrix {
    let (rows, cols) = m.shape();
    if m.is_empty() {
        return Matrix::zeros(cols, rows);
    }
    let svd = full_svd(m);
    let r = svd
        .values
        .iter()
        .take_while(|&&s| s > svd.tau && s > 0.0)
        .count();
    let scaled_v = Matrix::from_fn(cols, r, |i, k| svd.v[(i, k)] / svd.values[k]);
    scaled_v * svd.u.view((0, 0), (rows, r)).transpose()
}

/// Orthonormal basis (as columns) of the null space of `m`, a subspace of `R^{cols}`.
pub fn nullspace(m: &Matrix) -> Matrix {
    kernel_and_row_space(m).0
}

/// Orthonormal bases of `Ker m` and of its orthogonal complement (the row space),
/// both as columns in `R^{cols}`.
pub fn kernel_and_row_space(m: &Matrix) -> (Matrix, Matrix) {
    let cols = m.ncols();
    if m.nrows() == 0 || cols == 0 {
        return (Matrix::identity(cols, cols), Matrix::zeros(cols, 0));
    }
    let svd = full_svd(m);
    let (row, ker): (Vec<usize>, Vec<usize>) =
        (0..cols).partition(|&k| svd.values[k] > svd.tau && svd.values[k] > 0.0);
    (
        Matrix::from_fn(cols, ker.len(), |r, c| svd.v[(r, ker[c])]),
        Matrix::from_fn(cols, row.len(), |r, c| svd.v[(r, row[c])]),
    )
}

/// Orthogonal projector onto a subspace, stored through an orthonormal basis of the
/// subspace or of its complement, whichever is smaller.
#[derive(Debug, Clone)]
pub struct SubspaceProjector {
    basis: Matrix,
    complement: Matrix,
}

impl SubspaceProjector {
    /// Projector onto `Ker m`.
    pub fn onto_kernel(m: &Matrix) -> Self {
        let (basis, complement) = kernel_and_row_space(m);
        Self { basis, complement }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn complement_basis(&self) -> &Matrix {
        &self.complement
    }

    pub fn project(&self, v: &Vector) -> Vector {
        if self.basis.ncols() <= self.complement.ncols() {
            &self.basis * self.basis.tr_mul(v)
        } else {
            v - &self.complement * self.complement.tr_mul(v)
        }
    }
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn range_basis(m: &Matrix) -> Matrix {
    let rows = m.nrows();
    if m.is_empty() {
        return Matrix::zeros(rows, 0);
    }
    // The column space of m is the row space of m^T, i.e. the complement of Ker m^T.
    let svd = full_svd(&m.transpose());
    let kept: Vec<usize> = (0..svd.values.len().min(rows))
        .filter(|&k| svd.values[k] > svd.tau && svd.values[k] > 0.0)
        .collect();
    Matrix::from_fn(rows, kept.len(), |r, c| svd.v[(r, kept[c])])
}

/// Largest singular value via a full decomposition.
pub fn spectral_norm(m: &Matrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn select_columns(m: &Matrix, idx: &[usize]) -> Matrix {
    Matrix::from_fn(m.nrows(), idx.len(), |r, c| m[(r, idx[c])])
}

pub fn select_rows(m: &Matrix, idx: &[usize]) -> Matrix {
    Matrix::from_fn(idx.len(), m.ncols(), |r, c| m[(idx[r], c)])
}

pub fn select_entries(v: &Vector, idx: &[usize]) -> Vector {
    Vector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
}

pub fn inf_norm(v: &Vector) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn l1_norm(v: &Vector) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Matrix {
        Matrix::from_row_slice(
            4,
            3,
            &[1.0, 2.0, 3.0, -1.0, 0.5, 2.0, 0.0, 1.0, 1.0, 2.0, -2.0, 0.0],
        )
    }

    #[test]
    fn pinv_penrose_identities() {
        let m = sample();
        let p = pinv(&m);
        assert!((&m * &p * &m - &m).norm() < 1e-10);
        assert!((&p * &m * &p - &p).norm() < 1e-10);
        let mp = &m * &p;
        let pm = &p * &m;
        assert!((&mp - mp.transpose()).norm() < 1e-10);
        assert!((&pm - pm.transpose()).norm() < 1e-10);
    }

    #[test]
    fn pinv_of_rank_deficient() {
        // Second column is twice the first.
        let m = Matrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, -1.0, -2.0]);
        assert_eq!(rank(&m), 1);
        let p = pinv(&m);
        assert!((&m * &p * &m - &m).norm() < 1e-10);
        assert!((&p * &m * &p - &p).norm() < 1e-10);
    }

    #[test]
    fn zero_matrix() {
        let m = Matrix::zeros(2, 3);
        assert_eq!(pinv(&m), Matrix::zeros(3, 2));
        assert_eq!(rank(&m), 0);
        assert_eq!(nullspace(&m).ncols(), 3);
        assert_eq!(range_basis(&m).ncols(), 0);
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let m = Matrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let k = nullspace(&m);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-12);
        assert!((k.transpose() * &k - Matrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn range_basis_spans_columns() {
        let m = Matrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, -1.0, -2.0]);
        let r = range_basis(&m);
        assert_eq!(r.ncols(), 1);
        let proj = &r * r.transpose();
        assert!((&proj * &m - &m).norm() < 1e-12);
    }
}
