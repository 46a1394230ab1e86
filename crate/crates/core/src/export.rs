//! Plain-text outputs: CSV tables with `#` comment headers, JSON summaries
//! and JSON-lines state dumps.
//!
//! CSV numbers carry six significant digits and a `.` decimal point.

use std::io::{self, Write};

use serde::Serialize;

use crate::montecarlo::{EnsembleSummary, FractionPoint, HistogramBin, MomentsAt};
use crate::states::StateRecord;

pub const TOOL_NAME: &str = "monoscore";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `x` with six significant digits, trailing zeros removed. Magnitudes
/// outside `[1e-5, 1e6)` use exponent notation.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    // rounding can carry into the next decade
    let rounded: f64 = format!("{:.5e}", x).parse().unwrap_or(x);
    let exponent = if rounded.abs() >= 10f64.powi(exponent + 1) {
        exponent + 1
    } else {
        exponent
    };
    if (-5..6).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        let s = format!("{:.*}", decimals, rounded);
        trim_zeros(&s)
    } else {
        let s = format!("{:.5e}", x);
        let (mantissa, exp) = s.split_once('e').unwrap_or((&s, "0"));
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `key: value` pairs written as `#` comment lines above a CSV table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvHeader {
    entries: Vec<(String, String)>,
}

impl CsvHeader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    /// Header describing an ensemble summary.
    pub fn for_summary(summary: &EnsembleSummary) -> Self {
        Self::new()
            .with("tool", format!("{TOOL_NAME} {TOOL_VERSION}"))
            .with("class", summary.state_class)
            .with("qubits", summary.n_qubits)
            .with("measure", summary.measure)
            .with("nodal_index", summary.nodal)
            .with("samples", summary.n_samples)
            .with("seed", summary.base_seed)
    }

    fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "# {k}: {v}")?;
        }
        Ok(())
    }
}

fn write_table<W: Write>(
    mut w: W,
    header: &CsvHeader,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> io::Result<()> {
    header.write_to(&mut w)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(columns)?;
    for row in rows {
        out.write_record(row.iter().map(|x| format_sig6(*x)))?;
    }
    out.flush()
}

pub fn write_f_curve_csv<W: Write>(
    w: W,
    header: &CsvHeader,
    curve: &[FractionPoint],
) -> io::Result<()> {
    let rows: Vec<Vec<f64>> = curve.iter().map(|p| vec![p.alpha, p.f]).collect();
    write_table(w, header, &["alpha", "f"], &rows)
}

pub fn write_histogram_csv<W: Write>(
    w: W,
    header: &CsvHeader,
    bins: &[HistogramBin],
) -> io::Result<()> {
    let rows: Vec<Vec<f64>> = bins
        .iter()
        .map(|b| vec![b.bin_left, b.bin_right, b.rel_freq])
        .collect();
    write_table(w, header, &["bin_left", "bin_right", "rel_freq"], &rows)
}

/// One score per line, in sample order.
pub fn write_scores_csv<W: Write>(w: W, header: &CsvHeader, scores: &[f64]) -> io::Result<()> {
    let rows: Vec<Vec<f64>> = scores.iter().map(|s| vec![*s]).collect();
    write_table(w, header, &["score"], &rows)
}

/// One row per power. An undefined skewness is written as `undefined`.
pub fn write_moments_csv<W: Write>(
    mut w: W,
    header: &CsvHeader,
    moments: &[MomentsAt],
) -> io::Result<()> {
    header.write_to(&mut w)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["alpha", "mean", "variance", "skewness"])?;
    for m in moments {
        out.write_record([
            format_sig6(m.alpha),
            format_sig6(m.moments.mean),
            format_sig6(m.moments.variance),
            m.moments
                .skewness
                .map_or("undefined".to_string(), format_sig6),
        ])?;
    }
    out.flush()
}

/// One JSON object per line.
pub fn write_state_dump<W: Write>(mut w: W, records: &[StateRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    w.flush()
}

pub fn read_state_dump(text: &str) -> Result<Vec<StateRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

#[derive(Debug, Serialize)]
pub struct SummaryDocument<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(flatten)]
    pub summary: &'a EnsembleSummary,
}

impl<'a> SummaryDocument<'a> {
    pub fn new(summary: &'a EnsembleSummary) -> Self {
        Self {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            summary,
        }
    }
}

pub fn write_summary_json<W: Write>(mut w: W, summary: &EnsembleSummary) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, &SummaryDocument::new(summary))?;
    writeln!(w)
}
