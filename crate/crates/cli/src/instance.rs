//! Problem instances described by spec strings, and their resolution into arrays.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use cosparse::dictionaries::{Dictionary, DictionaryKind};
use cosparse::experiments::signals::SignalSpec;
use cosparse::io;
use cosparse::linalg::Vector;
use cosparse::operators::{circular_gaussian_blur, gaussian_random_matrix, dense, identity, Operator};
use cosparse::params::SpecString;

use crate::exit::{CliError, CliResult};

/// Forward operator: `id`, `blur:sigma=S` or `gauss:q=Q,seed=K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiSpec {
    Identity,
    Blur { sigma: f64 },
    Gaussian { q: usize, seed: u64 },
}

impl fmt::Display for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiSpec::Identity => write!(f, "id"),
            PhiSpec::Blur { sigma } => write!(f, "blur:sigma={sigma}"),
            PhiSpec::Gaussian { q, seed } => write!(f, "gauss:q={q},seed={seed}"),
        }
    }
}

impl FromStr for PhiSpec {
    type Err = cosparse::Error;

    fn from_str(s: &str) -> cosparse::Result<Self> {
        let spec = SpecString::parse(s)?;
        match spec.head.as_str() {
            "id" => {
                spec.only(&[])?;
                Ok(PhiSpec::Identity)
            }
            "blur" => {
                spec.only(&["sigma"])?;
                Ok(PhiSpec::Blur { sigma: spec.get("sigma")? })
            }
            "gauss" => {
                spec.only(&["q", "seed"])?;
                Ok(PhiSpec::Gaussian { q: spec.get("q")?, seed: spec.get_or("seed", 0)? })
            }
            other => Err(cosparse::Error::Parse(format!(
                "unknown operator '{other}' (expected id, blur:sigma=S or gauss:q=Q,seed=K)"
            ))),
        }
    }
}

impl PhiSpec {
    pub fn build(&self, n: usize) -> cosparse::Result<Operator> {
        match *self {
            PhiSpec::Identity => Ok(identity(n)),
            PhiSpec::Blur { sigma } => circular_gaussian_blur(n, sigma),
            PhiSpec::Gaussian { q, seed } => Ok(dense(gaussian_random_matrix(q, n, seed))),
        }
    }
}

/// Ground-truth signal: a named generator or `file:PATH`.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSource {
    Generator(SignalSpec),
    File(PathBuf),
}

impl fmt::Display for SignalSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalSource::Generator(g) => write!(f, "{g}"),
            SignalSource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for SignalSource {
    type Err = cosparse::Error;

    /// Generator spec strings first; anything else is read as a path, with an optional `file:` prefix.
    fn from_str(s: &str) -> cosparse::Result<Self> {
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(SignalSource::File(PathBuf::from(path)));
        }
        let head = s.split(':').next().unwrap_or("");
        if ["boxcar", "staircase", "two-boxcar"].contains(&head) {
            return Ok(SignalSource::Generator(s.parse()?));
        }
        Ok(SignalSource::File(PathBuf::from(s)))
    }
}

/// Additive noise: `none`, `gaussian:sigma=S,seed=K` or `file:PATH`.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    None,
    Gaussian { sigma: f64, seed: u64 },
    File(PathBuf),
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::None => write!(f, "none"),
            NoiseSpec::Gaussian { sigma, seed } => write!(f, "gaussian:sigma={sigma},seed={seed}"),
            NoiseSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for NoiseSpec {
    type Err = cosparse::Error;

    fn from_str(s: &str) -> cosparse::Result<Self> {
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(NoiseSpec::File(PathBuf::from(path)));
        }
        let spec = SpecString::parse(s)?;
        match spec.head.as_str() {
            "none" => {
                spec.only(&[])?;
                Ok(NoiseSpec::None)
            }
            "gaussian" => {
                spec.only(&["sigma", "seed"])?;
                let sigma: f64 = spec.get("sigma")?;
                if !(sigma >= 0.0) {
                    return Err(cosparse::Error::Parse(format!("noise sigma must be >= 0, got {sigma}")));
                }
                Ok(NoiseSpec::Gaussian { sigma, seed: spec.get_or("seed", 0)? })
            }
            other => Err(cosparse::Error::Parse(format!(
                "unknown noise '{other}' (expected none, gaussian:sigma=S,seed=K or file:PATH)"
            ))),
        }
    }
}

/// Regularization weight: a number, `auto-small` or `auto-noise(RHO)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSpec {
    Value(f64),
    /// Midpoint of the small-noise admissible window.
    AutoSmall,
    /// Bounded-noise theorem value for the given `rho > 1`.
    AutoNoise(f64),
}

impl fmt::Display for LambdaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaSpec::Value(v) => write!(f, "{v:?}"),
            LambdaSpec::AutoSmall => write!(f, "auto-small"),
            LambdaSpec::AutoNoise(rho) => write!(f, "auto-noise({rho:?})"),
        }
    }
}

impl FromStr for LambdaSpec {
    type Err = cosparse::Error;

    fn from_str(s: &str) -> cosparse::Result<Self> {
        let s = s.trim();
        if s == "auto-small" {
            return Ok(LambdaSpec::AutoSmall);
        }
        let bad = || cosparse::Error::Parse(format!(
            "bad lambda '{s}' (expected a number >= 0, auto-small or auto-noise(RHO))"
        ));
        if let Some(inner) = s.strip_prefix("auto-noise(").and_then(|r| r.strip_suffix(')')) {
            let rho: f64 = inner.trim().parse().map_err(|_| bad())?;
            if !(rho > 1.0) {
                return Err(cosparse::Error::Parse(format!("auto-noise needs rho > 1, got {rho}")));
            }
            return Ok(LambdaSpec::AutoNoise(rho));
        }
        match s.parse::<f64>() {
            Ok(v) if v >= 0.0 && v.is_finite() => Ok(LambdaSpec::Value(v)),
            _ => Err(bad()),
        }
    }
}

/// Fully resolved instance description. Its JSON form uses the canonical spec strings.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub phi: PhiSpec,
    pub dict: DictionaryKind,
    pub signal: Option<SignalSource>,
    pub noise: NoiseSpec,
    pub lambda: LambdaSpec,
    /// Observations read from file instead of `Phi x0 + w`.
    pub y: Option<PathBuf>,
    /// Signal length, when neither the signal nor the observations fix it.
    pub n: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    phi: String,
    dict: String,
    signal: Option<String>,
    noise: String,
    lambda: String,
    y: Option<String>,
    n: Option<usize>,
}

impl Serialize for InstanceSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        InstanceJson {
            phi: self.phi.to_string(),
            dict: self.dict.to_string(),
            signal: self.signal.as_ref().map(ToString::to_string),
            noise: self.noise.to_string(),
            lambda: self.lambda.to_string(),
            y: self.y.as_ref().map(|p| p.display().to_string()),
            n: self.n,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for InstanceSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = InstanceJson::deserialize(de)?;
        let err = |e: cosparse::Error| D::Error::custom(e.to_string());
        Ok(InstanceSpec {
            phi: raw.phi.parse().map_err(err)?,
            dict: raw.dict.parse().map_err(err)?,
            signal: raw.signal.map(|s| s.parse()).transpose().map_err(err)?,
            noise: raw.noise.parse().map_err(err)?,
            lambda: raw.lambda.parse().map_err(err)?,
            y: raw.y.map(PathBuf::from),
            n: raw.n,
        })
    }
}

impl InstanceSpec {
    /// Equivalent command-line flags.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![
            "--phi".to_string(),
            self.phi.to_string(),
            "--dict".to_string(),
            self.dict.to_string(),
            "--noise".to_string(),
            self.noise.to_string(),
            "--lambda".to_string(),
            self.lambda.to_string(),
        ];
        if let Some(s) = &self.signal {
            args.extend(["--signal".to_string(), s.to_string()]);
        }
        if let Some(y) = &self.y {
            args.extend(["--y".to_string(), y.display().to_string()]);
        }
        if let Some(n) = self.n {
            args.extend(["--n".to_string(), n.to_string()]);
        }
        args
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance specs serialize")
    }
}

/// Arrays behind an [`InstanceSpec`].
#[derive(Debug, Clone)]
pub struct Resolved {
    pub n: usize,
    pub phi: Operator,
    pub dict: Dictionary,
    pub x0: Option<Vector>,
    /// Noise actually added (zero when observations come from a file).
    pub w: Option<Vector>,
    pub y: Vector,
}

fn read_vector(path: &Path, what: &str) -> CliResult<Vector> {
    io::read_vector(path).map_err(|e| CliError::data(format!("cannot read {what}: {e}")))
}

impl InstanceSpec {
    pub fn resolve(&self) -> CliResult<Resolved> {
        let x0 = match &self.signal {
            None => None,
            Some(SignalSource::Generator(g)) => Some(g.generate().map_err(CliError::usage_from)?),
            Some(SignalSource::File(p)) => Some(read_vector(p, "signal")?),
        };
        let y_file = self.y.as_ref().map(|p| read_vector(p, "observations")).transpose()?;
        let n = match (&x0, &y_file, self.n, self.phi) {
            (Some(x), ..) => x.len(),
            (None, _, Some(n), _) => n,
            (None, Some(y), None, PhiSpec::Identity | PhiSpec::Blur { .. }) => y.len(),
            _ => {
                return Err(CliError::usage(
                    "cannot infer the signal length: pass --signal or --n".to_string(),
                ))
            }
        };
        if let (Some(expected), Some(x)) = (self.n, &x0) {
            if expected != x.len() {
                return Err(CliError::data(format!(
                    "--n {expected} disagrees with the signal length {}",
                    x.len()
                )));
            }
        }
        let phi = self.phi.build(n).map_err(CliError::usage_from)?;
        let dict = self.dict.build(n).map_err(CliError::usage_from)?;
        let q = phi.out_dim();
        let w = match &self.noise {
            NoiseSpec::None => None,
            NoiseSpec::Gaussian { sigma, seed } => {
                Some(gaussian_random_matrix(q, 1, *seed).column(0) * *sigma)
            }
            NoiseSpec::File(p) => Some(read_vector(p, "noise")?),
        };
        if let Some(w) = &w {
            if w.len() != q {
                return Err(CliError::data(format!("noise has {} entries, Phi has {q} rows", w.len())));
            }
        }
        let y = match (y_file, &x0) {
            (Some(y), _) => y,
            (None, Some(x)) => {
                let clean = phi.apply(x);
                match &w {
                    Some(w) => clean + w,
                    None => clean,
                }
            }
            (None, None) => {
                return Err(CliError::usage("need --signal or --y to form observations".to_string()))
            }
        };
        if y.len() != q {
            return Err(CliError::data(format!("observations have {} entries, Phi has {q} rows", y.len())));
        }
        Ok(Resolved { n, phi, dict, x0, w, y })
    }
}
