//! CSV and JSON emission of sweep results.

use std::io::{self, Write};

use mzsim_core::experiments::theory_visibility;
use mzsim_core::{SpectrumLines, SweepResult};
use serde::Serialize;

use crate::cli::config_to_args;

pub const SWEEP_HEADER: [&str; 11] = [
    "variant",
    "mode",
    "alpha",
    "phi",
    "s0",
    "s1",
    "theory_s0",
    "line_t_low",
    "line_t_high",
    "line_a_low",
    "line_a_high",
];

pub const VISIBILITY_HEADER: [&str; 3] = ["alpha", "visibility", "theory_visibility"];

/// Renders `x` with 12 significant digits in the shortest of fixed or
/// exponent notation, trailing zeros removed (C's `%.12g`).
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent notation");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-4..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn optional(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

/// Counts bytes passed through to the inner writer.
struct Counting<W> {
    inner: W,
    bytes: u64,
}

impl<W: Write> Write for Counting<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.bytes += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn write_records<W: Write>(destination: W, header: &[&str], rows: Vec<Vec<String>>) -> io::Result<u64> {
    let mut writer = csv::Writer::from_writer(Counting { inner: destination, bytes: 0 });
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    let counting = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(counting.bytes)
}

fn line_columns(lines: Option<SpectrumLines>) -> [String; 2] {
    match lines {
        Some(l) => {
            let (low, high) = l.calibrated();
            [format_number(low), format_number(high)]
        }
        None => [String::new(), String::new()],
    }
}

/// One row per grid point, α-major. Line amplitudes are calibrated against
/// the pseudopure reference. Returns the number of bytes written.
pub fn emit_sweep_csv<W: Write>(result: &SweepResult, destination: W) -> io::Result<u64> {
    let variant = result.config.variant.name();
    let mode = result.config.mode.name();
    let rows = result
        .points
        .iter()
        .map(|p| {
            let [t_low, t_high] = line_columns(p.target_lines);
            let [a_low, a_high] = line_columns(p.ancilla_lines);
            vec![
                variant.to_string(),
                mode.to_string(),
                optional(p.alpha),
                format_number(p.phi),
                format_number(p.s0),
                format_number(p.s1),
                format_number(p.theory_s0),
                t_low,
                t_high,
                a_low,
                a_high,
            ]
        })
        .collect();
    write_records(destination, &SWEEP_HEADER, rows)
}

/// `alpha,visibility,theory_visibility`, one row per α.
pub fn emit_visibility_table<W: Write>(result: &SweepResult, destination: W) -> io::Result<u64> {
    let variant = result.config.variant;
    let rows = result
        .visibility_by_alpha
        .iter()
        .map(|&(alpha, nu)| {
            vec![
                optional(alpha),
                format_number(nu),
                format_number(theory_visibility(variant, alpha.unwrap_or(0.0))),
            ]
        })
        .collect();
    write_records(destination, &VISIBILITY_HEADER, rows)
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    metadata: JsonMetadata<'a>,
    points: Vec<JsonPoint>,
    visibility: Vec<JsonVisibility>,
    max_abs_error_vs_theory: f64,
}

#[derive(Serialize)]
struct JsonMetadata<'a> {
    tool: &'a str,
    version: &'a str,
    variant: &'a str,
    mode: &'a str,
    seed: u64,
    args: Vec<String>,
    config: JsonConfig<'a>,
}

#[derive(Serialize)]
struct JsonConfig<'a> {
    alphas: &'a [f64],
    phis: &'a [f64],
    noise_p: f64,
    purity: f64,
    n_shots: usize,
    offset_target_hz: f64,
    offset_ancilla_hz: f64,
    j_coupling_hz: f64,
}

#[derive(Serialize)]
struct JsonPoint {
    alpha: Option<f64>,
    phi: f64,
    s0: f64,
    s1: f64,
    theory_s0: f64,
    line_t_low: Option<f64>,
    line_t_high: Option<f64>,
    line_a_low: Option<f64>,
    line_a_high: Option<f64>,
    population_00: Option<f64>,
}

#[derive(Serialize)]
struct JsonVisibility {
    alpha: Option<f64>,
    visibility: f64,
    theory_visibility: f64,
}

/// The CSV content as one JSON document with a metadata header; the
/// metadata `args` re-create the configuration when passed to `mzsim`.
pub fn emit_json<W: Write>(result: &SweepResult, destination: W) -> io::Result<u64> {
    let cfg = &result.config;
    let split = |lines: Option<SpectrumLines>| match lines {
        Some(l) => {
            let (low, high) = l.calibrated();
            (Some(low), Some(high))
        }
        None => (None, None),
    };
    let doc = JsonDocument {
        metadata: JsonMetadata {
            tool: "mzsim",
            version: env!("CARGO_PKG_VERSION"),
            variant: cfg.variant.name(),
            mode: cfg.mode.name(),
            seed: cfg.rng_seed,
            args: config_to_args(cfg),
            config: JsonConfig {
                alphas: &cfg.alphas,
                phis: &cfg.phis,
                noise_p: cfg.noise_p,
                purity: cfg.purity,
                n_shots: cfg.n_shots,
                offset_target_hz: cfg.sys.offset_target,
                offset_ancilla_hz: cfg.sys.offset_ancilla,
                j_coupling_hz: cfg.sys.j_coupling,
            },
        },
        points: result
            .points
            .iter()
            .map(|p| {
                let (line_t_low, line_t_high) = split(p.target_lines);
                let (line_a_low, line_a_high) = split(p.ancilla_lines);
                JsonPoint {
                    alpha: p.alpha,
                    phi: p.phi,
                    s0: p.s0,
                    s1: p.s1,
                    theory_s0: p.theory_s0,
                    line_t_low,
                    line_t_high,
                    line_a_low,
                    line_a_high,
                    population_00: p.population_00,
                }
            })
            .collect(),
        visibility: result
            .visibility_by_alpha
            .iter()
            .map(|&(alpha, visibility)| JsonVisibility {
                alpha,
                visibility,
                theory_visibility: theory_visibility(cfg.variant, alpha.unwrap_or(0.0)),
            })
            .collect(),
        max_abs_error_vs_theory: result.max_abs_error_vs_theory,
    };
    let mut counting = Counting { inner: destination, bytes: 0 };
    serde_json::to_writer_pretty(&mut counting, &doc)?;
    counting.write_all(b"\n")?;
    counting.flush()?;
    Ok(counting.bytes)
}
