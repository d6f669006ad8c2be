//! Reproducible numerical studies: TV staircase paths, Haar deconvolution and
//! Fused Lasso compressed sensing. Each run yields typed rows and a CSV [`Table`].

pub mod fused_cs;
pub mod haar_deconv;
pub mod signals;
pub mod stats;
pub mod tv_staircase;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fused_cs::{run_fused_cs, FusedCsParams, FusedCsRow};
pub use haar_deconv::{run_haar_deconv, HaarDeconvParams, HaarDeconvRow};
pub use tv_staircase::{run_tv_staircase, StaircaseParams, StaircaseRow};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "COSPARSE_THREADS";

/// One CSV value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Shortest representation that round-trips, so output is exact and stable.
            Cell::Real(v) => write!(f, "{v:?}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Bool(v) => write!(f, "{v}"),
            Cell::Text(v) => write!(f, "{v}"),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Tabular output preceded by `# key: value` metadata lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Parse(format!("CSV encoding failed: {e}"));
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_string)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).expect("CSV output is UTF-8"));
        Ok(out)
    }
}

/// Deterministic seed of replication `rep` in grid cell `cell`:
/// `seed XOR splitmix64((cell << 32) | rep)`.
pub fn replication_seed(seed: u64, cell: usize, rep: usize) -> u64 {
    let mut z = ((cell as u64) << 32 | rep as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    seed ^ z ^ (z >> 31)
}

/// Worker count from [`THREADS_ENV`], or `None` for the rayon default.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Error::InvalidParameter(format!(
                "{THREADS_ENV} must be a positive integer, got '{raw}'"
            ))),
        },
    }
}

/// Run `f` on a rayon pool sized by [`thread_cap`].
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = thread_cap()? {
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Experiment names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    TvStaircase,
    HaarDeconv,
    FusedCs,
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tv_staircase" => Ok(Self::TvStaircase),
            "haar_deconv" => Ok(Self::HaarDeconv),
            "fused_cs" => Ok(Self::FusedCs),
            other => Err(Error::Parse(format!(
                "unknown experiment '{other}' (expected tv_staircase, haar_deconv or fused_cs)"
            ))),
        }
    }
}

/// A named experiment with `key=value` parameter overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub output_path: Option<String>,
}

pub const DEFAULT_SEED: u64 = 20130101;

/// Parameter lookup over an override map, tracking which keys were consumed.
pub(crate) struct Overrides<'a> {
    map: &'a BTreeMap<String, String>,
    used: Vec<&'a str>,
}

impl<'a> Overrides<'a> {
    pub(crate) fn new(map: &'a BTreeMap<String, String>) -> Self {
        Self { map, used: Vec::new() }
    }

    fn raw(&mut self, key: &str) -> Option<&'a str> {
        let (k, v) = self.map.get_key_value(key)?;
        self.used.push(k);
        Some(v)
    }

    pub(crate) fn scalar<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad value '{v}' for parameter '{key}'"))),
        }
    }

    /// List given as `a;b;c` or as a range `start:step:stop` (inclusive).
    pub(crate) fn list(&mut self, key: &str, default: Vec<f64>) -> Result<Vec<f64>> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_list(v).map_err(|e| Error::Parse(format!("parameter '{key}': {e}"))),
        }
    }

    pub(crate) fn finish(self) -> Result<()> {
        match self.map.keys().find(|k| !self.used.contains(&k.as_str())) {
            Some(k) => Err(Error::Parse(format!("unknown experiment parameter '{k}'"))),
            None => Ok(()),
        }
    }
}

/// Parse `a;b;c` or `start:step:stop`.
pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0) || stop < start {
                return Err(format!("empty or unbounded range '{s}'"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|k| start + k as f64 * step).collect())
        }
        [_] => {
            let values: std::result::Result<Vec<f64>, String> = s.split(';').map(num).collect();
            let values = values?;
            if values.is_empty() {
                return Err("empty list".into());
            }
            Ok(values)
        }
        _ => Err(format!("expected 'a;b;c' or 'start:step:stop', got '{s}'")),
    }
}

pub(crate) fn format_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(";")
}

/// Run an experiment and render its table.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Table> {
    let mut ov = Overrides::new(&spec.parameters);
    match spec.name {
        ExperimentName::TvStaircase => {
            let params = StaircaseParams::from_overrides(&mut ov)?;
            ov.finish()?;
            let rows = run_tv_staircase(&params)?;
            Ok(tv_staircase::to_table(&params, &rows))
        }
        ExperimentName::HaarDeconv => {
            let params = HaarDeconvParams::from_overrides(&mut ov)?;
            ov.finish()?;
            let rows = with_thread_pool(|| run_haar_deconv(&params))??;
            Ok(haar_deconv::to_table(&params, &rows))
        }
        ExperimentName::FusedCs => {
            let params = FusedCsParams::from_overrides(&mut ov, spec.seed)?;
            ov.finish()?;
            let rows = with_thread_pool(|| run_fused_cs(&params))??;
            Ok(fused_cs::to_table(&params, &rows))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("0.5;1").unwrap(), vec![0.5, 1.0]);
        let grid = parse_list("0.5:0.25:3.0").unwrap();
        assert_eq!(grid.len(), 11);
        assert_eq!(grid[10], 3.0);
        assert!(parse_list("1:0:2").is_err());
        assert!(parse_list("a;b").is_err());
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let mut seen = std::collections::HashSet::new();
        for cell in 0..20 {
            for rep in 0..50 {
                assert!(seen.insert(replication_seed(7, cell, rep)));
            }
        }
        assert_eq!(replication_seed(7, 3, 4), replication_seed(7, 3, 4));
    }

    #[test]
    fn csv_has_metadata_header() {
        let mut t = Table::new(&["a", "b"]);
        t.meta("seed", 3);
        t.push(vec![0.1.into(), "x,y".into()]);
        assert_eq!(t.to_csv().unwrap(), "# seed: 3\na,b\n0.1,\"x,y\"\n");
    }

    #[test]
    fn unknown_parameters_are_rejected() {
        let mut params = BTreeMap::new();
        params.insert("nn".to_string(), "8".to_string());
        let spec = ExperimentSpec {
            name: ExperimentName::TvStaircase,
            parameters: params,
            seed: 0,
            output_path: None,
        };
        assert!(matches!(run_experiment(&spec), Err(Error::Parse(_))));
    }
}
