//! Report types and their JSON / CSV encodings.
//!
//! Floats are written with 17 significant digits (`{:.16e}`) so a report
//! is byte-stable for fixed inputs; non-finite values become `null`.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Errored,
}

impl Status {
    pub fn gate(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub value: f64,
    pub ln_lambda: f64,
    pub ln_abs_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneityEntry {
    pub functional: String,
    pub density: String,
    pub m: f64,
    pub lambdas: Vec<f64>,
    pub sweep: Vec<SweepRow>,
    pub p_hat: Option<f64>,
    pub p_declared: f64,
    pub residual_rms: Option<f64>,
    pub threshold: f64,
    pub status: Status,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceEntry {
    pub functional: String,
    pub density: String,
    pub m_set: Vec<f64>,
    pub p_hats: Vec<f64>,
    pub sweeps: Vec<Vec<SweepRow>>,
    pub q_hat: Option<f64>,
    pub k_hat: Option<f64>,
    pub m0_hat: Option<f64>,
    pub q_declared: f64,
    pub m0_declared: f64,
    pub fit_residual: Option<f64>,
    pub threshold: f64,
    pub status: Status,
    pub error: Option<String>,
}

/// One scalar identity check (Euler relation, invariance condition,
/// integral representation, or box invariance).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityEntry {
    pub functional: String,
    pub density: String,
    pub identity: &'static str,
    pub m: Option<f64>,
    pub value: Option<f64>,
    pub threshold: f64,
    pub status: Status,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxEntry {
    pub functional: String,
    pub density: String,
    pub m0: f64,
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub lambda: f64,
    pub rel_error: Option<f64>,
    pub threshold: f64,
    pub status: Status,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residuals {
    pub equation_id: &'static str,
    pub sample_points: usize,
    pub max_rel_residual: f64,
    pub mean_rel_residual: f64,
    pub normalization: &'static str,
}

impl From<scalelab_core::ResidualReport> for Residuals {
    fn from(r: scalelab_core::ResidualReport) -> Self {
        Self {
            equation_id: r.equation_id.as_str(),
            sample_points: r.sample_points,
            max_rel_residual: r.max_rel_residual,
            mean_rel_residual: r.mean_rel_residual,
            normalization: r.normalization,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdeEntry {
    pub functional: String,
    pub density: String,
    pub m0: f64,
    pub residuals: Option<Residuals>,
    pub threshold: f64,
    /// Residual at `m₀ + 1`, which must be large for the check to have
    /// any power.
    pub wrong_m0: f64,
    pub wrong_m0_residuals: Option<Residuals>,
    pub wrong_m0_floor: f64,
    pub status: Status,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormEntry {
    pub functional: String,
    pub density: String,
    pub form: &'static str,
    pub m0: f64,
    pub sample_points: usize,
    /// Fitted constant for `C n^{3/m₀}` forms.
    pub c_hat: Option<f64>,
    pub c_expected: Option<f64>,
    /// Spread of the constant, or the max relative residual of an identity.
    pub residual: Option<f64>,
    pub threshold: f64,
    pub status: Status,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub config: RunConfig,
    pub homogeneity: Vec<HomogeneityEntry>,
    pub invariance: Vec<InvarianceEntry>,
    pub euler: Vec<IdentityEntry>,
    pub representation: Vec<IdentityEntry>,
    pub pde_residuals: Vec<PdeEntry>,
    pub box_invariance: Vec<BoxEntry>,
    pub forms: Vec<FormEntry>,
    /// Seconds per check; `None` unless timings were requested.
    pub timings: Option<BTreeMap<&'static str, f64>>,
    /// Unix seconds. The only field that varies between identical runs.
    pub timestamp: u64,
}

impl Report {
    fn statuses(&self) -> impl Iterator<Item = Status> + '_ {
        let h = self.homogeneity.iter().map(|e| e.status);
        let i = self.invariance.iter().map(|e| e.status);
        let e = self.euler.iter().chain(&self.representation).map(|e| e.status);
        let p = self.pde_residuals.iter().map(|e| e.status);
        let b = self.box_invariance.iter().map(|e| e.status);
        let f = self.forms.iter().map(|e| e.status);
        h.chain(i).chain(e).chain(p).chain(b).chain(f)
    }

    /// Every gate passed and nothing errored.
    pub fn passed(&self) -> bool {
        self.statuses().all(|s| s == Status::Pass)
    }

    /// `(pass, fail, errored)` counts.
    pub fn tally(&self) -> (usize, usize, usize) {
        self.statuses().fold((0, 0, 0), |(p, f, e), s| match s {
            Status::Pass => (p + 1, f, e),
            Status::Fail => (p, f + 1, e),
            Status::Errored => (p, f, e + 1),
        })
    }

    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats::default());
        self.serialize(&mut ser).expect("report types serialize infallibly");
        buf.push(b'\n');
        String::from_utf8(buf).expect("serde_json writes UTF-8")
    }
}

/// Pretty-printing formatter that writes every float as `{:.16e}`.
#[derive(Default)]
struct FixedFloats {
    inner: PrettyFormatter<'static>,
}

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("writing {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

pub fn write_json(report: &Report, path: &Path) -> Result<(), EmitError> {
    std::fs::write(path, report.to_json()).map_err(|source| EmitError::Io { path: path.to_path_buf(), source })
}

pub const CSV_HEADER: [&str; 7] = ["functional", "density", "m", "lambda", "F", "lnlambda", "lnabsF"];

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn file_stem(functional: &str) -> String {
    functional.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

/// Writes one CSV per (check, functional, density) sweep group and
/// returns the paths written.
pub fn write_csv(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, EmitError> {
    std::fs::create_dir_all(dir).map_err(|source| EmitError::Io { path: dir.to_path_buf(), source })?;
    let density_index = |d: &str| report.config.densities.iter().position(|x| x == d).unwrap_or(0);
    let mut groups: Vec<(PathBuf, Vec<[String; 7]>)> = Vec::new();
    let mut push = |check: &str, functional: &str, density: &str, m: f64, rows: &[SweepRow]| {
        let path = dir.join(format!("{check}_{}_d{}.csv", file_stem(functional), density_index(density)));
        let records = rows.iter().map(|r| {
            [
                functional.to_string(),
                density.to_string(),
                fmt17(m),
                fmt17(r.lambda),
                fmt17(r.value),
                fmt17(r.ln_lambda),
                fmt17(r.ln_abs_value),
            ]
        });
        match groups.iter_mut().find(|(p, _)| *p == path) {
            Some((_, v)) => v.extend(records),
            None => groups.push((path, records.collect())),
        }
    };
    for e in &report.homogeneity {
        push("homogeneity", &e.functional, &e.density, e.m, &e.sweep);
    }
    for e in &report.invariance {
        for (m, rows) in e.m_set.iter().zip(&e.sweeps) {
            push("invariance", &e.functional, &e.density, *m, rows);
        }
    }
    for (path, rows) in &groups {
        let csv_err = |source| EmitError::Csv { path: path.clone(), source };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for r in rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush().map_err(|source| EmitError::Io { path: path.clone(), source })?;
    }
    Ok(groups.into_iter().map(|(p, _)| p).collect())
}
