//! Closed-form dual vector of 1-D TV denoising.
//!
//! With `Phi = Id` and forward differences, `m_I = s_I` and `m_J = Omega^[J] s_I` solve a
//! discrete Laplace equation on `J`, so `m` is piecewise linear between consecutive
//! support positions, anchored at zero just outside both ends of the signal.

use serde::{Deserialize, Serialize};

use crate::cosparse::{d_support, SignVector};
use crate::dictionaries::make_tv;
use crate::error::{Error, Result};
use crate::linalg::{self, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvDual {
    /// Dual vector of length `n - 1`.
    pub m: Vec<f64>,
    /// `max_{j in J} |m_j|`, equal to `IC(sign(D^* x))`.
    pub ic: f64,
    pub signs: SignVector,
}

fn signs_of(x: &Vector) -> Result<SignVector> {
    let tv = make_tv(x.len())?;
    let s = d_support(x, &tv, None);
    if s.support().is_empty() {
        return Err(Error::InvalidParameter(
            "TV dual vector needs a signal with at least one jump".into(),
        ));
    }
    Ok(s)
}

fn cosupport_max(m: &[f64], s: &SignVector) -> f64 {
    s.cosupport().iter().map(|&j| m[j].abs()).fold(0.0, f64::max)
}

/// Dual vector by linear interpolation between support anchors.
pub fn tv_dual_vector(x: &Vector) -> Result<TvDual> {
    let s = signs_of(x)?;
    let p = x.len() - 1;
    // Anchors on the extended grid -1..=p: zero at both virtual ends, s_i on the support.
    let mut anchors: Vec<(isize, f64)> = vec![(-1, 0.0)];
    anchors.extend(s.support().iter().map(|&i| (i as isize, s.entries()[i] as f64)));
    anchors.push((p as isize, 0.0));

    let mut m = vec![0.0; p];
    for pair in anchors.windows(2) {
        let ((a, va), (b, vb)) = (pair[0], pair[1]);
        for k in a.max(0)..b.min(p as isize) {
            let t = (k - a) as f64 / (b - a) as f64;
            m[k as usize] = (1.0 - t) * va + t * vb;
        }
    }
    for i in s.support() {
        m[i] = s.entries()[i] as f64;
    }
    let ic = cosupport_max(&m, &s);
    Ok(TvDual { m, ic, signs: s })
}

/// Same vector from the normal equations `(D_J^* D_J) sigma = -(D_J^* D_I) s_I`.
pub fn tv_dual_vector_least_squares(x: &Vector) -> Result<TvDual> {
    let s = signs_of(x)?;
    let d = make_tv(x.len())?.materialize();
    let support = s.support();
    let cosupport = s.cosupport();
    let d_i = linalg::select_columns(&d, &support);
    let d_j = linalg::select_columns(&d, &cosupport);
    let rhs = -(d_j.transpose() * &d_i * s.restricted());
    let sigma = linalg::pinv(&(d_j.transpose() * &d_j)) * rhs;
    let mut m = vec![0.0; x.len() - 1];
    for (k, &j) in cosupport.iter().enumerate() {
        m[j] = sigma[k];
    }
    for &i in &support {
        m[i] = s.entries()[i] as f64;
    }
    let ic = cosupport_max(&m, &s);
    Ok(TvDual { m, ic, signs: s })
}
