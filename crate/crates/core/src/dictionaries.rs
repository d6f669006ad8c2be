//! Analysis dictionaries `D` (atoms as columns) and their analysis operators `D^*`.
//!
//! Haar atoms are ordered scale-major: atom `j * n + i` is the scale-`j` filter
//! anchored at position `i`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::operators::{self, CircularFilter, ForwardDifference, Operator};
use crate::params::SpecString;

/// Which family a dictionary belongs to, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DictionaryKind {
    Identity,
    TvDiff,
    HaarShiftInvariant { j_max: usize, tau: f64 },
    Fused { epsilon: f64 },
}

impl DictionaryKind {
    /// Instantiate on signals of length `n`.
    pub fn build(self, n: usize) -> Result<Dictionary> {
        match self {
            DictionaryKind::Identity => make_identity(n),
            DictionaryKind::TvDiff => make_tv(n),
            DictionaryKind::HaarShiftInvariant { j_max, tau } => make_haar(n, j_max, tau),
            DictionaryKind::Fused { epsilon } => make_fused(n, epsilon),
        }
    }
}

impl fmt::Display for DictionaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DictionaryKind::Identity => write!(f, "id"),
            DictionaryKind::TvDiff => write!(f, "tv"),
            DictionaryKind::HaarShiftInvariant { j_max, tau } => {
                write!(f, "haar:jmax={j_max},tau={tau}")
            }
            DictionaryKind::Fused { epsilon } => write!(f, "fused:eps={epsilon}"),
        }
    }
}

impl FromStr for DictionaryKind {
    type Err = Error;

    /// Accepts `tv`, `id`, `haar:jmax=J,tau=T` and `fused:eps=E`.
    fn from_str(s: &str) -> Result<Self> {
        let spec = SpecString::parse(s)?;
        match spec.head.as_str() {
            "id" | "identity" => {
                spec.only(&[])?;
                Ok(DictionaryKind::Identity)
            }
            "tv" => {
                spec.only(&[])?;
                Ok(DictionaryKind::TvDiff)
            }
            "haar" => {
                spec.only(&["jmax", "tau"])?;
                Ok(DictionaryKind::HaarShiftInvariant {
                    j_max: spec.get_or("jmax", 4)?,
                    tau: spec.get_or("tau", 1.0)?,
                })
            }
            "fused" => {
                spec.only(&["eps"])?;
                Ok(DictionaryKind::Fused {
                    epsilon: spec.get("eps")?,
                })
            }
            other => Err(Error::Parse(format!(
                "unknown dictionary '{other}' (expected tv, id, haar:jmax=J,tau=T or fused:eps=E)"
            ))),
        }
    }
}

/// A dictionary of `p` atoms in `R^n`.
#[derive(Debug, Clone)]
pub struct Dictionary {
    n: usize,
    p: usize,
    analysis: Operator,
    kind: DictionaryKind,
}

impl Dictionary {
    fn new(analysis: Operator, kind: DictionaryKind) -> Self {
        Self {
            n: analysis.in_dim(),
            p: analysis.out_dim(),
            analysis,
            kind,
        }
    }

    /// Signal dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of atoms.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kind(&self) -> DictionaryKind {
        self.kind
    }

    /// `D^* x`.
    pub fn analysis(&self, x: &Vector) -> Vector {
        self.analysis.apply(x)
    }

    /// `D alpha`.
    pub fn synthesis(&self, alpha: &Vector) -> Vector {
        self.analysis.adjoint(alpha)
    }

    /// `D^*` as an operator `R^n -> R^p`.
    pub fn analysis_operator(&self) -> Operator {
        self.analysis.clone()
    }

    /// `D` as an operator `R^p -> R^n`.
    pub fn synthesis_operator(&self) -> Operator {
        operators::adjoint_of(self.analysis.clone())
    }

    /// Explicit `n x p` matrix of atoms.
    pub fn materialize(&self) -> Matrix {
        self.analysis.materialize().transpose()
    }
}

pub fn make_identity(n: usize) -> Result<Dictionary> {
    if n == 0 {
        return Err(Error::InvalidParameter("identity dictionary needs n >= 1".into()));
    }
    Ok(Dictionary::new(operators::identity(n), DictionaryKind::Identity))
}

/// Forward finite differences: column `j` of `D` is `e_{j+1} - e_j`.
pub fn make_tv(n: usize) -> Result<Dictionary> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("TV dictionary needs n >= 2, got {n}")));
    }
    Ok(Dictionary::new(Arc::new(ForwardDifference::new(n)), DictionaryKind::TvDiff))
}

/// Shift-invariant Haar dictionary on `j_max + 1` scales with circular boundary.
///
/// At scale `j` the analysis coefficient at position `i` is
/// `sum_k psi_k x_{(i + k) mod n}` with `psi_k = 2^{-tau (j+1)}` for `0 <= k < 2^j`
/// and `-2^{-tau (j+1)}` for `-2^j <= k < 0`.
pub fn make_haar(n: usize, j_max: usize, tau: f64) -> Result<Dictionary> {
    if !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("Haar exponent must be finite, got {tau}")));
    }
    let too_large = j_max >= usize::BITS as usize - 2 || (1usize << (j_max + 1)) > n;
    if too_large {
        return Err(Error::InvalidParameter(format!(
            "Haar scale j_max={j_max} too large for n={n} (need 2^(j_max+1) <= n)"
        )));
    }
    let scales = (0..=j_max)
        .map(|j| {
            let width = 1isize << j;
            let amp = 2f64.powf(-tau * (j as f64 + 1.0));
            let taps = (-width..width)
                .map(|k| (k, if k >= 0 { amp } else { -amp }))
                .collect();
            Arc::new(CircularFilter::new(n, taps)) as Operator
        })
        .collect();
    let analysis = operators::vstack(scales)?;
    Ok(Dictionary::new(
        analysis,
        DictionaryKind::HaarShiftInvariant { j_max, tau },
    ))
}

/// Fused Lasso dictionary `[D_DIF, epsilon Id]`.
pub fn make_fused(n: usize, epsilon: f64) -> Result<Dictionary> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "fused dictionary needs epsilon > 0, got {epsilon}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("fused dictionary needs n >= 2, got {n}")));
    }
    let analysis = operators::vstack(vec![
        Arc::new(ForwardDifference::new(n)) as Operator,
        operators::scaled(epsilon, operators::identity(n)),
    ])?;
    Ok(Dictionary::new(analysis, DictionaryKind::Fused { epsilon }))
}
