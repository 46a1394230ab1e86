mod args;
mod tables;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use monoscore::export::{
    format_sig6, write_f_curve_csv, write_histogram_csv, write_moments_csv, write_scores_csv,
    write_state_dump, write_summary_json, CsvHeader, TOOL_NAME, TOOL_VERSION,
};
use monoscore::montecarlo::{
    distribution_stats, histogram, run_ensemble, scores, summarize, AlphaC, EnsembleSpec,
    HistogramBin, Moments, MomentsAt, SummaryOptions,
};
use monoscore::states::{RandomSeed, StateRecord};
use serde::Serialize;
use serde_json::{json, Value};

use args::{Cli, Command, Format, OutputArgs, StatsArgs, SweepArgs, TableArgs};
use tables::{compute_table, CellValue, Reference};

enum Failure {
    Usage(String),
    Numerical(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn workers(output: &OutputArgs) -> Result<usize, Failure> {
    match output.workers {
        Some(0) => Err(Failure::Usage("--workers must be at least 1".into())),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn dump_states(spec: &EnsembleSpec, path: &Path) -> Result<(), Failure> {
    let records = (0..spec.n_samples as u64)
        .map(|k| {
            let seed = RandomSeed::new(spec.base_seed, k);
            Ok(StateRecord::new(
                &spec.state_class.sample(spec.n_qubits, seed)?,
                seed,
            ))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    write_state_dump(BufWriter::new(File::create(path)?), &records)?;
    Ok(())
}

fn ensemble_header(spec: &EnsembleSpec) -> CsvHeader {
    CsvHeader::new()
        .with("tool", format!("{TOOL_NAME} {TOOL_VERSION}"))
        .with("class", spec.state_class)
        .with("qubits", spec.n_qubits)
        .with("measure", spec.measure)
        .with("nodal_index", spec.nodal)
        .with("samples", spec.n_samples)
        .with("seed", spec.base_seed)
}

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let spec = args
        .ensemble
        .spec(workers(&args.output)?)
        .map_err(Failure::Usage)?;
    if let Some(path) = &args.ensemble.dump_states {
        dump_states(&spec, path)?;
    }
    let records = run_ensemble(&spec)?;
    let summary = summarize(&spec, &records, &SummaryOptions::default())?;
    let mut out = open_output(args.output.out.as_deref())?;
    match args.output.format {
        Format::Json => write_summary_json(&mut out, &summary)?,
        Format::Csv => {
            let header = CsvHeader::for_summary(&summary)
                .with("alpha_p", format_sig6(summary.alpha_p))
                .with("alpha_c", summary.alpha_c)
                .with("alpha_c_from_f", summary.alpha_c_from_f)
                .with(
                    "M_Q",
                    summary.m_q.map_or("undefined".to_string(), format_sig6),
                );
            write_f_curve_csv(&mut out, &header, &summary.f_curve)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct StatsDocument<'a> {
    tool: &'static str,
    version: &'static str,
    state_class: String,
    n_qubits: usize,
    measure: String,
    nodal_index: usize,
    n_samples: usize,
    base_seed: u64,
    alpha: f64,
    #[serde(flatten)]
    moments: Moments,
    #[serde(skip_serializing_if = "Option::is_none")]
    histogram: Option<&'a [HistogramBin]>,
}

fn stats(args: &StatsArgs) -> Result<(), Failure> {
    let spec = args
        .ensemble
        .spec(workers(&args.output)?)
        .map_err(Failure::Usage)?;
    if !args.alpha.is_finite() || args.alpha <= 0.0 {
        return Err(Failure::Usage("--alpha must be positive".into()));
    }
    let bins = match args.histogram.as_deref() {
        None => None,
        Some(&[bins, lo, hi]) => {
            if bins < 1.0 || bins.fract() != 0.0 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Failure::Usage(
                    "--histogram needs BINS >= 1 and LO < HI".into(),
                ));
            }
            Some((bins as usize, lo, hi))
        }
        Some(_) => return Err(Failure::Usage("--histogram takes BINS LO HI".into())),
    };
    if let Some(path) = &args.ensemble.dump_states {
        dump_states(&spec, path)?;
    }
    let records = run_ensemble(&spec)?;
    let moments = distribution_stats(&records, args.alpha)?;
    let hist = bins
        .map(|(b, lo, hi)| histogram(&records, args.alpha, b, (lo, hi)))
        .transpose()?;
    let header = ensemble_header(&spec).with("alpha", format_sig6(args.alpha));
    if let Some(path) = &args.scores {
        let mut w = BufWriter::new(File::create(path)?);
        write_scores_csv(&mut w, &header, &scores(&records, args.alpha)?)?;
        w.flush()?;
    }
    let mut out = open_output(args.output.out.as_deref())?;
    match args.output.format {
        Format::Json => {
            let doc = StatsDocument {
                tool: TOOL_NAME,
                version: TOOL_VERSION,
                state_class: spec.state_class.to_string(),
                n_qubits: spec.n_qubits,
                measure: spec.measure.to_string(),
                nodal_index: spec.nodal,
                n_samples: spec.n_samples,
                base_seed: spec.base_seed,
                alpha: args.alpha,
                moments,
                histogram: hist.as_deref(),
            };
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let header = header
                .with("mean", format_sig6(moments.mean))
                .with("variance", format_sig6(moments.variance))
                .with(
                    "skewness",
                    moments
                        .skewness
                        .map_or("undefined".to_string(), format_sig6),
                );
            match &hist {
                Some(h) => write_histogram_csv(&mut out, &header, h)?,
                None => write_moments_csv(
                    &mut out,
                    &header,
                    &[MomentsAt {
                        alpha: args.alpha,
                        moments,
                    }],
                )?,
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn reference_json(r: Reference) -> Value {
    match r {
        Reference::Value(x) => json!(x),
        Reference::Above(x) => json!(format!("> {x}")),
        Reference::Missing => Value::Null,
    }
}

fn reference_text(r: Reference) -> String {
    match r {
        Reference::Value(x) => format_sig6(x),
        Reference::Above(x) => format!("> {x}"),
        Reference::Missing => String::new(),
    }
}

fn table(args: &TableArgs) -> Result<(), Failure> {
    let w = workers(&args.output)?;
    let rows = compute_table(args.table, args.samples, args.seed, w)?;
    let mut out = open_output(args.output.out.as_deref())?;
    match args.output.format {
        Format::Json => {
            let cells: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let c = &row.cell;
                    let value = match row.value {
                        CellValue::Number(x) => json!(x),
                        CellValue::ExceedsMax => json!(AlphaC::ExceedsMax.to_string()),
                        CellValue::Undefined => Value::Null,
                    };
                    json!({
                        "measure": c.measure.to_string(),
                        "state_class": c.class.to_string(),
                        "n_qubits": c.n_qubits,
                        "quantity": c.quantity.name(),
                        "alpha": c.alpha,
                        "value": value,
                        "reference": reference_json(c.reference),
                        "deviation": row.deviation(),
                    })
                })
                .collect();
            let doc = json!({
                "tool": TOOL_NAME,
                "version": TOOL_VERSION,
                "table": args.table,
                "n_samples": args.samples,
                "base_seed": args.seed,
                "cells": cells,
            });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "# tool: {TOOL_NAME} {TOOL_VERSION}")?;
            writeln!(out, "# table: {}", args.table)?;
            writeln!(out, "# samples: {}", args.samples)?;
            writeln!(out, "# seed: {}", args.seed)?;
            let mut csv = csv::Writer::from_writer(&mut out);
            csv.write_record([
                "measure",
                "class",
                "qubits",
                "quantity",
                "alpha",
                "value",
                "reference",
                "deviation",
            ])?;
            for row in &rows {
                let c = &row.cell;
                let value = match row.value {
                    CellValue::Number(x) => format_sig6(x),
                    CellValue::ExceedsMax => AlphaC::ExceedsMax.to_string(),
                    CellValue::Undefined => String::new(),
                };
                csv.write_record([
                    c.measure.to_string(),
                    c.class.to_string(),
                    c.n_qubits.to_string(),
                    c.quantity.name().to_string(),
                    c.alpha.map_or(String::new(), format_sig6),
                    value,
                    reference_text(c.reference),
                    row.deviation().map_or(String::new(), format_sig6),
                ])?;
            }
            csv.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Stats(a) => stats(a),
        Command::Table(a) => table(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
