//! IC of a centered boxcar under circular Gaussian blur, as a function of the blur width,
//! for shift-invariant Haar dictionaries and TV.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::signals::boxcar;
use super::{format_list, Overrides, Table};
use crate::cosparse::{build_decomposition, d_support};
use crate::criteria::{compute_ic, DrConfig};
use crate::dictionaries::{DictionaryKind, make_haar, make_tv};
use crate::error::{Error, Result};
use crate::operators::circular_gaussian_blur;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarDeconvParams {
    pub n: usize,
    pub j_max: usize,
    pub tau_list: Vec<f64>,
    pub sigma_grid: Vec<f64>,
    pub eta: f64,
}

impl Default for HaarDeconvParams {
    fn default() -> Self {
        Self {
            n: 64,
            j_max: 4,
            tau_list: vec![0.5, 1.0],
            sigma_grid: (0..11).map(|k| 0.5 + 0.25 * k as f64).collect(),
            eta: 0.2,
        }
    }
}

impl HaarDeconvParams {
    pub(crate) fn from_overrides(ov: &mut Overrides<'_>) -> Result<Self> {
        let d = Self::default();
        let params = Self {
            n: ov.scalar("n", d.n)?,
            j_max: ov.scalar("j_max", d.j_max)?,
            tau_list: ov.list("tau_list", d.tau_list)?,
            sigma_grid: ov.list("sigma_grid", d.sigma_grid)?,
            eta: ov.scalar("eta", d.eta)?,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 0.5) {
            return Err(Error::InvalidParameter(format!("eta must lie in (0, 1/2], got {}", self.eta)));
        }
        if self.sigma_grid.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::InvalidParameter("blur widths must be positive".into()));
        }
        Ok(())
    }

    /// Haar dictionaries in `tau_list` order, then TV.
    pub fn dictionaries(&self) -> Vec<DictionaryKind> {
        self.tau_list
            .iter()
            .map(|&tau| DictionaryKind::HaarShiftInvariant { j_max: self.j_max, tau })
            .chain([DictionaryKind::TvDiff])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarDeconvRow {
    pub sigma: f64,
    pub dictionary: String,
    pub ic: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// One row per `(sigma, dictionary)`, sigma-major. Rows are computed in parallel.
pub fn run_haar_deconv(params: &HaarDeconvParams) -> Result<Vec<HaarDeconvRow>> {
    params.validate()?;
    let x = boxcar(params.n, params.eta)?;
    let dicts = params
        .dictionaries()
        .into_iter()
        .map(|kind| match kind {
            DictionaryKind::HaarShiftInvariant { j_max, tau } => make_haar(params.n, j_max, tau),
            _ => make_tv(params.n),
        })
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(f64, usize)> = params
        .sigma_grid
        .iter()
        .flat_map(|&s| (0..dicts.len()).map(move |d| (s, d)))
        .collect();
    let cfg = DrConfig::default();
    cells
        .par_iter()
        .map(|&(sigma, d)| {
            let dict = &dicts[d];
            let phi = circular_gaussian_blur(params.n, sigma)?;
            let s = d_support(&x, dict, None);
            let dec = build_decomposition(dict, &*phi, &s.cosupport())?;
            let ic = compute_ic(&dec, &s, &cfg)?;
            Ok(HaarDeconvRow {
                sigma,
                dictionary: dict.kind().to_string(),
                ic: ic.value,
                converged: ic.converged,
                iterations: ic.iterations,
            })
        })
        .collect()
}

pub fn to_table(params: &HaarDeconvParams, rows: &[HaarDeconvRow]) -> Table {
    let mut t = Table::new(&["sigma", "dictionary", "ic", "converged", "iterations"]);
    t.meta("experiment", "haar_deconv")
        .meta("n", params.n)
        .meta("j_max", params.j_max)
        .meta("tau_list", format_list(&params.tau_list))
        .meta("sigma_grid", format_list(&params.sigma_grid))
        .meta("eta", params.eta)
        .meta("signal", "boxcar on [floor(n/2 - eta n), floor(n/2 + eta n)), 0-based half-open")
        .meta("phi", "circular Gaussian blur of width sigma");
    for r in rows {
        t.push(vec![
            r.sigma.into(),
            r.dictionary.as_str().into(),
            r.ic.into(),
            r.converged.into(),
            r.iterations.into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_shape() {
        let params = HaarDeconvParams {
            n: 32,
            j_max: 2,
            sigma_grid: vec![0.5, 1.0],
            ..HaarDeconvParams::default()
        };
        let rows = run_haar_deconv(&params).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[2].dictionary, "tv");
        assert!(rows.iter().all(|r| r.ic.is_finite() && r.ic >= 0.0));
        let table = to_table(&params, &rows);
        assert_eq!(table.rows.len(), 6);
    }

    #[test]
    fn bad_eta() {
        let params = HaarDeconvParams { eta: 0.0, ..HaarDeconvParams::default() };
        assert!(run_haar_deconv(&params).is_err());
    }
}
