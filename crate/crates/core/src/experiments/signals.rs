//! Test signals. Index ranges are half-open `[a, b)` with `floor` endpoints.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::params::SpecString;

fn indicator(n: usize, start: usize, end: usize) -> Vector {
    Vector::from_fn(n, |i, _| if i >= start && i < end { 1.0 } else { 0.0 })
}

fn floor_index(t: f64) -> usize {
    t.floor().max(0.0) as usize
}

/// Centered boxcar on `[floor(n/2 - eta n), floor(n/2 + eta n))`.
pub fn boxcar(n: usize, eta: f64) -> Result<Vector> {
    if !(eta > 0.0 && eta <= 0.5) {
        return Err(Error::InvalidParameter(format!("boxcar eta must lie in (0, 1/2], got {eta}")));
    }
    let nf = n as f64;
    let a = floor_index(nf / 2.0 - eta * nf);
    let b = floor_index(nf / 2.0 + eta * nf).min(n);
    if a >= b {
        return Err(Error::InvalidParameter(format!("boxcar with n={n}, eta={eta} is empty")));
    }
    Ok(indicator(n, a, b))
}

/// Two boxcars of width `eta n`, `2 rho n` apart, on
/// `[floor((1/2 - eta - rho) n), floor((1/2 - rho) n))` and
/// `[floor((1/2 + rho) n), floor((1/2 + eta + rho) n))`.
pub fn two_boxcar(n: usize, eta: f64, rho: f64) -> Result<Vector> {
    if !(eta > 0.0) || !(rho >= 0.0) || eta + rho > 0.5 {
        return Err(Error::InvalidParameter(format!(
            "two-boxcar needs eta > 0, rho >= 0 and eta + rho <= 1/2, got eta={eta}, rho={rho}"
        )));
    }
    let nf = n as f64;
    let left = (floor_index((0.5 - eta - rho) * nf), floor_index((0.5 - rho) * nf));
    let right = (floor_index((0.5 + rho) * nf), floor_index((0.5 + eta + rho) * nf).min(n));
    if left.0 >= left.1 || right.0 >= right.1 {
        return Err(Error::InvalidParameter(format!(
            "two-boxcar with n={n}, eta={eta}, rho={rho} has an empty block"
        )));
    }
    Ok(indicator(n, left.0, left.1) + indicator(n, right.0, right.1))
}

/// Indicator of the `k`-th quarter block (`k` in `1..=4`) of a length-`n` signal.
pub fn quarter_block(n: usize, k: usize) -> Vector {
    let m = n / 4;
    indicator(n, (k - 1) * m, k * m)
}

fn check_quarters(n: usize) -> Result<()> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::InvalidParameter(format!("n must be a positive multiple of 4, got {n}")));
    }
    Ok(())
}

/// `-1` on the first quarter, `+1` on the last one.
pub fn staircase(n: usize) -> Result<Vector> {
    check_quarters(n)?;
    Ok(quarter_block(n, 4) - quarter_block(n, 1))
}

/// `eps` on the third quarter and `-eps` on the second.
pub fn staircase_noise(n: usize, eps: f64) -> Result<Vector> {
    check_quarters(n)?;
    Ok((quarter_block(n, 3) - quarter_block(n, 2)) * eps)
}

/// Piecewise-constant signal whose level is redrawn uniformly in `[-2, 2]` with
/// probability `jump_prob` at each sample.
pub fn random_piecewise(n: usize, jump_prob: f64, seed: u64) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = rng.random_range(-2.0..2.0);
    Vector::from_fn(n, |i, _| {
        if i > 0 && rng.random_bool(jump_prob) {
            level = rng.random_range(-2.0..2.0);
        }
        level
    })
}

/// Named generator accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSpec {
    Boxcar { n: usize, eta: f64 },
    Staircase { n: usize },
    TwoBoxcar { n: usize, eta: f64, rho: f64 },
}

impl SignalSpec {
    pub fn n(&self) -> usize {
        match *self {
            SignalSpec::Boxcar { n, .. } | SignalSpec::Staircase { n } | SignalSpec::TwoBoxcar { n, .. } => n,
        }
    }

    pub fn generate(&self) -> Result<Vector> {
        match *self {
            SignalSpec::Boxcar { n, eta } => boxcar(n, eta),
            SignalSpec::Staircase { n } => staircase(n),
            SignalSpec::TwoBoxcar { n, eta, rho } => two_boxcar(n, eta, rho),
        }
    }
}

impl fmt::Display for SignalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalSpec::Boxcar { n, eta } => write!(f, "boxcar:n={n},eta={eta}"),
            SignalSpec::Staircase { n } => write!(f, "staircase:n={n}"),
            SignalSpec::TwoBoxcar { n, eta, rho } => write!(f, "two-boxcar:n={n},eta={eta},rho={rho}"),
        }
    }
}

impl FromStr for SignalSpec {
    type Err = Error;

    /// Accepts `boxcar:n=N,eta=E`, `staircase:n=N` and `two-boxcar:n=N,eta=E,rho=R`.
    fn from_str(s: &str) -> Result<Self> {
        let spec = SpecString::parse(s)?;
        match spec.head.as_str() {
            "boxcar" => {
                spec.only(&["n", "eta"])?;
                Ok(SignalSpec::Boxcar { n: spec.get("n")?, eta: spec.get_or("eta", 0.2)? })
            }
            "staircase" => {
                spec.only(&["n"])?;
                Ok(SignalSpec::Staircase { n: spec.get("n")? })
            }
            "two-boxcar" => {
                spec.only(&["n", "eta", "rho"])?;
                Ok(SignalSpec::TwoBoxcar {
                    n: spec.get("n")?,
                    eta: spec.get_or("eta", 0.1)?,
                    rho: spec.get_or("rho", 0.1)?,
                })
            }
            other => Err(Error::Parse(format!(
                "unknown signal '{other}' (expected boxcar, staircase or two-boxcar)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn support(x: &Vector) -> Vec<usize> {
        (0..x.len()).filter(|&i| x[i] != 0.0).collect()
    }

    #[test]
    fn boxcar_uses_floor_and_half_open_ranges() {
        // n = 64, eta = 0.2: [floor(19.2), floor(44.8)) = [19, 44).
        let x = boxcar(64, 0.2).unwrap();
        assert_eq!(support(&x), (19..44).collect::<Vec<_>>());
        assert!(boxcar(64, 0.0).is_err());
        assert!(boxcar(64, 0.6).is_err());
    }

    #[test]
    fn two_boxcar_blocks() {
        // n = 32, eta = 0.1, rho = 0.1: [9, 12) and [19, 22).
        let x = two_boxcar(32, 0.1, 0.1).unwrap();
        assert_eq!(support(&x), vec![9, 10, 11, 19, 20, 21]);
        assert!(two_boxcar(32, 0.01, 0.1).is_err());
    }

    #[test]
    fn staircase_blocks() {
        let x = staircase(8).unwrap();
        assert_eq!(x.as_slice(), &[-1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        let w = staircase_noise(8, 0.5).unwrap();
        assert_eq!(w.as_slice(), &[0.0, 0.0, -0.5, -0.5, 0.5, 0.5, 0.0, 0.0]);
        assert!(staircase(10).is_err());
    }

    #[test]
    fn specs_round_trip() {
        for s in ["boxcar:n=32,eta=0.2", "staircase:n=16", "two-boxcar:n=32,eta=0.05,rho=0.1"] {
            let spec: SignalSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(spec.to_string().parse::<SignalSpec>().unwrap(), spec);
        }
        assert!("boxcar:n=32,width=3".parse::<SignalSpec>().is_err());
        assert!("sine:n=3".parse::<SignalSpec>().is_err());
    }
}
