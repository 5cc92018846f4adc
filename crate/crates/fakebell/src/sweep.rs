//! Parameter sweeps with deterministic CSV output and companion plot
//! scripts.
//!
//! Every artifact starts with a `#` comment line echoing the full
//! configuration, followed by a header row naming all columns. Floats are
//! written with 17 significant digits. Rows are computed in parallel but
//! assembled in grid order, so repeated runs produce byte-identical files
//! for any worker count.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::chsh::{maximize_bell, BellResult};
use crate::detector::{DetectorParams, PostprocessingModel};
use crate::error::{Error, Result};
use crate::fock::{CutoffPolicy, PdcSource};
use crate::tomography::{scan_density, TomographyBasis};
use crate::validation::{
    audit_squash_closed_form, compare_onoff_closed_form, OnOffComparison, SquashAuditRow,
};

/// Inclusive arithmetic range of interaction strengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhChiRange {
    /// First value.
    pub start: f64,
    /// Last value (included up to a half-step slack).
    pub stop: f64,
    /// Positive increment.
    pub step: f64,
}

impl TanhChiRange {
    /// Single-point range.
    pub fn single(value: f64) -> Self {
        Self {
            start: value,
            stop: value,
            step: 1.0,
        }
    }

    /// Validate bounds and orientation.
    pub fn validate(&self) -> Result<()> {
        let ok = self.start.is_finite()
            && self.stop.is_finite()
            && self.step.is_finite()
            && self.step > 0.0
            && self.start <= self.stop
            && self.start >= 0.0
            && self.stop < 1.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "tanh_chi range must satisfy 0 <= start <= stop < 1 with step > 0, \
                 got {}:{}:{}",
                self.start, self.stop, self.step
            )));
        }
        Ok(())
    }

    /// Materialize the grid values.
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let v = self.start + k as f64 * self.step;
            if v > self.stop + 0.5 * self.step {
                break;
            }
            out.push(v.min(self.stop));
            k += 1;
            if k > 1_000_000 {
                break;
            }
        }
        out
    }

    /// Parse `"start:stop:step"` or a single `"value"`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let parse_f = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number in range: {s:?}")))
        };
        let range = match parts.as_slice() {
            [single] => Self::single(parse_f(single)?),
            [start, stop, step] => Self {
                start: parse_f(start)?,
                stop: parse_f(stop)?,
                step: parse_f(step)?,
            },
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "range must be 'value' or 'start:stop:step', got {text:?}"
                )))
            }
        };
        range.validate()?;
        Ok(range)
    }
}

impl std::fmt::Display for TanhChiRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// Pair-number cutoff selection.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CutoffSpec {
    /// Adaptive cutoff with the default tail tolerance.
    #[default]
    Auto,
    /// Fixed maximum pair number.
    Fixed(usize),
}

impl CutoffSpec {
    /// Parse `"auto"` or an explicit block count.
    pub fn parse(text: &str) -> Result<Self> {
        if text.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        text.parse::<usize>().map(Self::Fixed).map_err(|_| {
            Error::InvalidParameter(format!("cutoff must be 'auto' or an integer, got {text:?}"))
        })
    }

    fn policy(&self) -> CutoffPolicy {
        match self {
            CutoffSpec::Auto => CutoffPolicy::default(),
            CutoffSpec::Fixed(n) => CutoffPolicy::Fixed(*n),
        }
    }
}

impl std::fmt::Display for CutoffSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CutoffSpec::Auto => write!(f, "auto"),
            CutoffSpec::Fixed(n) => write!(f, "{n}"),
        }
    }
}

/// Full configuration of one sweep run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Postprocessing model.
    pub model: PostprocessingModel,
    /// Detector efficiency.
    pub eta: f64,
    /// Mean noise counts.
    pub n_nc: f64,
    /// Interaction-strength grid.
    pub range: TanhChiRange,
    /// Pair-number cutoff.
    pub cutoff: CutoffSpec,
    /// Tomography basis (scan command only).
    pub basis: Option<TomographyBasis>,
    /// Label recorded for the basis in the artifact comment.
    pub basis_label: String,
    /// Output CSV path.
    pub out: PathBuf,
    /// Worker threads; `None` uses the process default.
    pub workers: Option<usize>,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        self.range.validate()?;
        DetectorParams::new(self.eta, self.n_nc)?;
        if self.range.values().is_empty() {
            return Err(Error::InvalidParameter("empty tanh_chi grid".into()));
        }
        Ok(())
    }

    fn source_at(&self, tanh_chi: f64) -> Result<PdcSource> {
        PdcSource::with_cutoff(tanh_chi, self.cutoff.policy())
    }

    fn comment(&self, command: &str) -> String {
        let mut line = format!(
            "# fakebell {command} model={} eta={} noise={} tanh_chi={} cutoff={} workers={}",
            self.model.id(),
            self.eta,
            self.n_nc,
            self.range,
            self.cutoff,
            self.workers.map_or_else(|| "default".to_string(), |w| w.to_string()),
        );
        if self.basis.is_some() {
            let _ = write!(line, " basis={}", self.basis_label);
        }
        line
    }

    fn run_in_pool<T, F>(&self, job: F) -> Result<T>
    where
        T: Send,
        F: FnOnce() -> Result<T> + Send,
    {
        match self.workers {
            None => job(),
            Some(workers) => {
                if workers == 0 {
                    return Err(Error::InvalidParameter("workers must be >= 1".into()));
                }
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
                pool.install(job)
            }
        }
    }
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row of a Bell-parameter sweep.
#[derive(Debug, Clone)]
pub struct BellSweepRow {
    /// Interaction strength of this grid point.
    pub tanh_chi: f64,
    /// Maximized Bell parameter.
    pub result: BellResult,
}

/// Maximize the Bell parameter across the interaction-strength grid and
/// write the sweep artifact. Grid points without coincidences are skipped
/// with a comment; the run fails only if every point is undefined.
pub fn sweep_bell(config: &RunConfig) -> Result<Vec<BellSweepRow>> {
    config.validate()?;
    let params = DetectorParams::new(config.eta, config.n_nc)?;
    let values = config.range.values();

    let results: Vec<(f64, Result<BellResult>)> = config.run_in_pool(|| {
        Ok(values
            .par_iter()
            .map(|&t| {
                let result = config
                    .source_at(t)
                    .and_then(|source| maximize_bell(&source, &params, config.model));
                (t, result)
            })
            .collect())
    })?;

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut first_error = None;
    for (t, result) in results {
        match result {
            Ok(result) => rows.push(BellSweepRow { tanh_chi: t, result }),
            Err(Error::NoCoincidence) => skipped.push(t),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    if rows.is_empty() {
        return Err(Error::NoCoincidence);
    }

    let file = File::create(&config.out)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{}", config.comment("sweep-bell"))?;
    for &t in &skipped {
        writeln!(w, "# skipped tanh_chi={t}: no coincidences")?;
    }
    writeln!(
        w,
        "tanh_chi,bell_max,theta_a1,theta_a2,theta_b1,theta_b2,model"
    )?;
    for row in &rows {
        let s = &row.result.settings;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_float(row.tanh_chi),
            fmt_float(row.result.bell_value),
            fmt_float(s.theta_a1),
            fmt_float(s.theta_a2),
            fmt_float(s.theta_b1),
            fmt_float(s.theta_b2),
            row.result.model.id(),
        )?;
    }
    w.flush()?;
    write_plot_script(&config.out, PlotKind::BellSweep)?;
    Ok(rows)
}

/// One row of a tomography scan.
#[derive(Debug, Clone)]
pub struct TomographyRow {
    /// Interaction strength of this grid point.
    pub tanh_chi: f64,
    /// Eigenvalues of the reconstructed operator, ascending.
    pub eigenvalues: [f64; 4],
}

/// Reconstruct the effective two-qubit operator across the grid and write
/// its spectrum per point.
pub fn tomography_scan(config: &RunConfig) -> Result<Vec<TomographyRow>> {
    config.validate()?;
    let basis = config.basis.ok_or_else(|| {
        Error::InvalidParameter("tomography scan needs a basis (fig4a, fig4b, or a file)".into())
    })?;
    let params = DetectorParams::new(config.eta, config.n_nc)?;
    let values = config.range.values();

    let results: Vec<(f64, Result<[f64; 4]>)> = config.run_in_pool(|| {
        Ok(values
            .par_iter()
            .map(|&t| {
                let eigs = config.source_at(t).and_then(|source| {
                    scan_density(&source, &params, config.model, &basis)
                        .map(|d| d.eigenvalues)
                });
                (t, eigs)
            })
            .collect())
    })?;

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (t, result) in results {
        match result {
            Ok(eigenvalues) => rows.push(TomographyRow {
                tanh_chi: t,
                eigenvalues,
            }),
            Err(Error::NoCoincidence) => skipped.push(t),
            Err(e) => return Err(e),
        }
    }
    if rows.is_empty() {
        return Err(Error::NoCoincidence);
    }

    let file = File::create(&config.out)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{}", config.comment("tomography-scan"))?;
    for &t in &skipped {
        writeln!(w, "# skipped tanh_chi={t}: no coincidences")?;
    }
    writeln!(w, "tanh_chi,min_eigenvalue,eig1,eig2,eig3,eig4")?;
    for row in &rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_float(row.tanh_chi),
            fmt_float(row.eigenvalues[0]),
            fmt_float(row.eigenvalues[0]),
            fmt_float(row.eigenvalues[1]),
            fmt_float(row.eigenvalues[2]),
            fmt_float(row.eigenvalues[3]),
        )?;
    }
    w.flush()?;
    write_plot_script(&config.out, PlotKind::Tomography)?;
    Ok(rows)
}

/// Outcome of the validation run.
#[derive(Debug)]
pub struct ValidationOutcome {
    /// Analytic on-off probability vs the pipeline (gates the exit status).
    pub onoff: OnOffComparison,
    /// Squash-correlation audit rows (informational).
    pub squash_rows: Vec<SquashAuditRow>,
}

/// Run every analytic cross-check and write the discrepancy report.
///
/// Only the on-off comparison gates success; the squash transcription is
/// reported with its known weak-interaction divergence, and the
/// photon-number-resolving closed form is recorded as unavailable.
pub fn validate_report(out: &Path, workers: Option<usize>) -> Result<ValidationOutcome> {
    let run = || -> Result<ValidationOutcome> {
        Ok(ValidationOutcome {
            onoff: compare_onoff_closed_form()?,
            squash_rows: audit_squash_closed_form()?,
        })
    };
    let outcome = match workers {
        None => run()?,
        Some(workers) => {
            if workers == 0 {
                return Err(Error::InvalidParameter("workers must be >= 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
                .install(run)?
        }
    };

    let file = File::create(out)?;
    let mut w = BufWriter::new(file);
    writeln!(
        w,
        "# fakebell validate workers={}",
        workers.map_or_else(|| "default".to_string(), |v| v.to_string())
    )?;
    writeln!(
        w,
        "check,tanh_chi,eta,n_nc,delta,pipeline_value,closed_form_value,deviation,flag"
    )?;
    let (t, eta, n_nc, delta) = outcome.onoff.worst_point;
    writeln!(
        w,
        "onoff-worst,{},{},{},{},{},{},{},{}",
        fmt_float(t),
        fmt_float(eta),
        fmt_float(n_nc),
        fmt_float(delta),
        fmt_float(outcome.onoff.worst_values.0),
        fmt_float(outcome.onoff.worst_values.1),
        fmt_float(outcome.onoff.max_relative_deviation),
        if outcome.onoff.passed() { "pass" } else { "FAIL" },
    )?;
    for row in &outcome.squash_rows {
        writeln!(
            w,
            "squash,{},{},{},{},{},{},{},{}",
            fmt_float(row.tanh_chi),
            fmt_float(1.0),
            fmt_float(0.0),
            fmt_float(row.delta),
            fmt_float(row.pipeline_e),
            fmt_float(row.closed_form_e),
            fmt_float(row.abs_deviation),
            if row.weak_interaction_regime {
                "weak-interaction-divergence"
            } else {
                "informational"
            },
        )?;
    }
    writeln!(
        w,
        "pnr,,,,,,,,closed-form-unavailable (single-channel coefficients underived; pipeline is authoritative)"
    )?;
    w.flush()?;
    Ok(outcome)
}

enum PlotKind {
    BellSweep,
    Tomography,
}

/// Companion matplotlib script next to a CSV artifact (same path with a
/// `.plot.py` suffix). Plots are emitted as scripts rather than images so
/// runs stay reproducible without graphics dependencies.
fn write_plot_script(csv_path: &Path, kind: PlotKind) -> Result<()> {
    let script_path = plot_script_path(csv_path);
    let csv_name = csv_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data.csv".to_string());
    let body = match kind {
        PlotKind::BellSweep => format!(
            r##"#!/usr/bin/env python3
"""Plot a Bell-parameter sweep produced by `fakebell sweep-bell`."""
import csv
import math
import matplotlib.pyplot as plt

xs, ys = [], []
with open({csv_name:?}) as fh:
    for row in csv.DictReader(r for r in fh if not r.startswith("#")):
        xs.append(float(row["tanh_chi"]))
        ys.append(float(row["bell_max"]))

fig, ax = plt.subplots()
ax.plot(xs, ys, marker="o", ms=3, label="maximal Bell parameter")
ax.axhline(2 * math.sqrt(2), ls="--", c="gray", label="quantum bound 2√2")
ax.axhline(2.0, ls=":", c="gray", label="local-realism bound 2")
ax.set_xlabel(r"tanh $\chi$")
ax.set_ylabel("Bell parameter")
ax.legend()
fig.savefig({png_name:?}, dpi=160, bbox_inches="tight")
print("wrote", {png_name:?})
"##,
            csv_name = csv_name,
            png_name = format!("{csv_name}.png"),
        ),
        PlotKind::Tomography => format!(
            r##"#!/usr/bin/env python3
"""Plot a tomography scan produced by `fakebell tomography-scan`."""
import csv
import matplotlib.pyplot as plt

xs, ys = [], []
with open({csv_name:?}) as fh:
    for row in csv.DictReader(r for r in fh if not r.startswith("#")):
        xs.append(float(row["tanh_chi"]))
        ys.append(float(row["min_eigenvalue"]))

fig, ax = plt.subplots()
ax.plot(xs, ys, marker="o", ms=3)
ax.axhline(0.0, ls="--", c="gray")
ax.set_xlabel(r"tanh $\chi$")
ax.set_ylabel("minimum eigenvalue")
fig.savefig({png_name:?}, dpi=160, bbox_inches="tight")
print("wrote", {png_name:?})
"##,
            csv_name = csv_name,
            png_name = format!("{csv_name}.png"),
        ),
    };
    std::fs::write(&script_path, body)?;
    Ok(())
}

/// Path of the plot script written next to a CSV artifact.
pub fn plot_script_path(csv_path: &Path) -> PathBuf {
    let mut os = csv_path.as_os_str().to_owned();
    os.push(".plot.py");
    PathBuf::from(os)
}
