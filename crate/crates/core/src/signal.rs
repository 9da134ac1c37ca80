//! Sampled signals, trace loading and least-squares line fitting.
//!
//! Line fits over any sample range `[i, j]` (inclusive, 0-based) are answered
//! in constant time from [`PrefixSums`]. Times inside a range are shifted so
//! that the first sample sits at `t = 0`; the fitted offset `b` is therefore
//! the value of the line at the start of the range.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative floor below which a sum of squared residuals is treated as zero.
///
/// Residuals are computed from differences of accumulated sums, so an exactly
/// linear range comes out as a tiny non-zero value. The floor is relative to
/// the sum of squared values over the same range.
pub(crate) const ROUNDOFF: f64 = 1e-12;

/// A finite single-variable signal: strictly increasing timestamps with one
/// value per timestamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    id: String,
    label: Option<String>,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Signal {
    pub fn new(id: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let id = id.into();
        let invalid = |reason: String| Error::InvalidSignal {
            id: id.clone(),
            reason,
        };
        if times.len() != values.len() {
            return Err(invalid(format!(
                "{} timestamps but {} values",
                times.len(),
                values.len()
            )));
        }
        if let Some(k) = times.iter().chain(&values).position(|x| !x.is_finite()) {
            return Err(invalid(format!("non-finite entry at position {k}")));
        }
        if let Some(k) = times.windows(2).position(|w| w[0] >= w[1]) {
            return Err(invalid(format!(
                "timestamps not strictly increasing at sample {}",
                k + 1
            )));
        }
        Ok(Self {
            id,
            label: None,
            times,
            values,
        })
    }

    /// Builds a signal sampled every `period` seconds starting at `t = 0`.
    pub fn uniform(id: impl Into<String>, values: Vec<f64>, period: f64) -> Result<Self> {
        let id = id.into();
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidSignal {
                id,
                reason: format!("sampling period must be positive, got {period}"),
            });
        }
        let times = (0..values.len()).map(|i| i as f64 * period).collect();
        Self::new(id, times, values)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `t_n - t_1`, or zero for signals with fewer than two samples.
    pub fn duration(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(first), Some(last)) => last - first,
            _ => 0.0,
        }
    }
}

/// Sums of a sample range with time measured from the range's first sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSums {
    pub n: f64,
    pub t: f64,
    pub tt: f64,
    pub v: f64,
    pub vv: f64,
    pub tv: f64,
}

/// Cumulative sums of `1, t, t², v, v², t·v` over sample index.
#[derive(Debug, Clone)]
pub struct PrefixSums {
    t: Vec<f64>,
    tt: Vec<f64>,
    v: Vec<f64>,
    vv: Vec<f64>,
    tv: Vec<f64>,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl PrefixSums {
    pub fn new(signal: &Signal) -> Self {
        let n = signal.len();
        let mut ps = Self {
            t: Vec::with_capacity(n + 1),
            tt: Vec::with_capacity(n + 1),
            v: Vec::with_capacity(n + 1),
            vv: Vec::with_capacity(n + 1),
            tv: Vec::with_capacity(n + 1),
            times: signal.times.clone(),
            values: signal.values.clone(),
        };
        let (mut st, mut stt, mut sv, mut svv, mut stv) = (0.0, 0.0, 0.0, 0.0, 0.0);
        ps.push(st, stt, sv, svv, stv);
        for (&t, &v) in signal.times.iter().zip(&signal.values) {
            st += t;
            stt += t * t;
            sv += v;
            svv += v * v;
            stv += t * v;
            ps.push(st, stt, sv, svv, stv);
        }
        ps
    }

    fn push(&mut self, t: f64, tt: f64, v: f64, vv: f64, tv: f64) {
        self.t.push(t);
        self.tt.push(tt);
        self.v.push(v);
        self.vv.push(vv);
        self.tv.push(tv);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Sums over samples `i..=j` with times shifted so that `t_i` maps to 0.
    pub fn range(&self, i: usize, j: usize) -> RangeSums {
        assert!(
            i <= j && j < self.len(),
            "invalid sample range [{i}, {j}] for a signal of {} samples",
            self.len()
        );
        let n = (j - i + 1) as f64;
        let t0 = self.times[i];
        let st = self.t[j + 1] - self.t[i];
        let stt = self.tt[j + 1] - self.tt[i];
        let sv = self.v[j + 1] - self.v[i];
        let tv = self.tv[j + 1] - self.tv[i];
        RangeSums {
            n,
            t: st - n * t0,
            tt: stt - 2.0 * t0 * st + n * t0 * t0,
            v: sv,
            vv: self.vv[j + 1] - self.vv[i],
            tv: tv - t0 * sv,
        }
    }
}

/// A least-squares line over a sample range.
///
/// `a` is the slope, `b` the fitted value at the first sample of the range,
/// `d` the range duration and `mse` the mean squared residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub mse: f64,
}

/// Ordinary least squares over samples `i..=j` in O(1).
///
/// Panics when `i > j` or `j` is out of range.
pub fn linefit(ps: &PrefixSums, i: usize, j: usize) -> LineFit {
    let (a, b, mse) = ols(ps, i, j);
    LineFit {
        a,
        b,
        d: ps.time(j) - ps.time(i),
        mse,
    }
}

/// Slope, offset and mean squared error of the unconstrained fit.
pub(crate) fn ols(ps: &PrefixSums, i: usize, j: usize) -> (f64, f64, f64) {
    assert!(i <= j, "invalid sample range [{i}, {j}]");
    match j - i {
        0 => (0.0, ps.value(i), 0.0),
        1 => {
            let a = (ps.value(j) - ps.value(i)) / (ps.time(j) - ps.time(i));
            (a, ps.value(i), 0.0)
        }
        _ => {
            let s = ps.range(i, j);
            let sxx = s.tt - s.t * s.t / s.n;
            let sxy = s.tv - s.t * s.v / s.n;
            let syy = s.vv - s.v * s.v / s.n;
            let a = sxy / sxx;
            let b = (s.v - a * s.t) / s.n;
            let sse = floor_sse(syy - a * sxy, s.vv);
            (a, b, sse / s.n)
        }
    }
}

pub(crate) fn floor_sse(sse: f64, sum_sq: f64) -> f64 {
    if sse <= ROUNDOFF * sum_sq {
        0.0
    } else {
        sse
    }
}

/// Supported trace file layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceFormat {
    /// UCR archive: whitespace separated, class label then values, one trace per line.
    UcrTsv,
    /// Comma separated values, one trace per line, optional header row.
    Csv,
}

impl FromStr for TraceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ucr-tsv" | "ucr" | "tsv" => Ok(Self::UcrTsv),
            "csv" => Ok(Self::Csv),
            other => Err(Error::InvalidArgument(format!(
                "unknown trace format `{other}` (expected `ucr-tsv` or `csv`)"
            ))),
        }
    }
}

impl fmt::Display for TraceFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::UcrTsv => "ucr-tsv",
            Self::Csv => "csv",
        })
    }
}

/// Reads every trace in `path`, synthesizing timestamps `i * period`.
pub fn load_traces(path: &Path, format: TraceFormat, period: f64) -> Result<Vec<Signal>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_traces(&text, path, format, period)
}

/// Parses trace text; `origin` is only used for ids and error messages.
pub fn parse_traces(
    text: &str,
    origin: &Path,
    format: TraceFormat,
    period: f64,
) -> Result<Vec<Signal>> {
    let stem = origin
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".to_owned());
    let parse_err = |row: usize, column: usize, cell: &str| Error::Parse {
        path: origin.to_path_buf(),
        row,
        column,
        cell: cell.to_owned(),
    };

    let mut signals = Vec::new();
    let mut first_data_row = true;
    for (lineno, line) in text.lines().enumerate() {
        let row = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = match format {
            TraceFormat::UcrTsv => line.split_whitespace().collect(),
            TraceFormat::Csv => line.split(',').map(str::trim).collect(),
        };
        let header = std::mem::replace(&mut first_data_row, false);
        let (label, value_cells, first_column) = match format {
            TraceFormat::UcrTsv => (Some(cells[0]), &cells[1..], 2),
            TraceFormat::Csv => {
                if header && cells.iter().any(|c| parse_finite(c).is_none()) {
                    continue;
                }
                (None, &cells[..], 1)
            }
        };
        let values = value_cells
            .iter()
            .enumerate()
            .map(|(k, cell)| parse_finite(cell).ok_or_else(|| parse_err(row, first_column + k, cell)))
            .collect::<Result<Vec<f64>>>()?;
        let mut signal = Signal::uniform(format!("{stem}:{row}"), values, period)?;
        if let Some(label) = label {
            signal = signal.with_label(label);
        }
        signals.push(signal);
    }
    if signals.is_empty() {
        return Err(Error::EmptyInput(origin.to_path_buf()));
    }
    Ok(signals)
}

fn parse_finite(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|x| x.is_finite())
}
