//! Result files: CSV run logs with a fixed schema and JSON documents, each
//! carrying the config hash, artifact version and solver tolerances.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use steerlp::lp::{BoundKind, RobustnessResult, SolverOptions};
use steerlp::quantum::io::MatrixJson;
use steerlp::sdp::ExactResult;

use crate::error::CliResult;

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub max_iter: u32,
    pub normalization: f64,
    pub certificate_step: f64,
    pub facet: f64,
    pub incidence: f64,
    pub trace: f64,
    pub refine_tie: f64,
}

impl Tolerances {
    pub fn new(s: &SolverOptions) -> Self {
        Self {
            tol_feas: s.tol_feas,
            tol_gap: s.tol_gap,
            max_iter: s.max_iter,
            normalization: steerlp::lp::robustness::NORMALIZATION_TOL,
            certificate_step: steerlp::lp::robustness::CERTIFICATE_STEP,
            facet: steerlp::polytope::FACET_TOL,
            incidence: steerlp::polytope::INCIDENCE_TOL,
            trace: steerlp::polytope::TRACE_TOL,
            refine_tie: steerlp::polytope::TIE_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub config_hash: String,
    pub version: &'static str,
    pub rng: &'static str,
    pub tolerances: Tolerances,
}

impl Meta {
    /// Hashes the canonical JSON encoding of the run configuration.
    pub fn new(config: &Value, solver: &SolverOptions) -> Self {
        let digest = Sha256::digest(config.to_string().as_bytes());
        Self {
            config_hash: hex::encode(digest),
            version: steerlp::VERSION,
            rng: steerlp::random::RNG_ALGORITHM,
            tolerances: Tolerances::new(solver),
        }
    }

    fn comment(&self) -> String {
        let t = &self.tolerances;
        format!(
            "# steerlp {} config={} tol_feas={:e} tol_gap={:e} max_iter={} normalization={:e}\n",
            self.version, self.config_hash, t.tol_feas, t.tol_gap, t.max_iter, t.normalization
        )
    }
}

/// One line of every CSV the CLI writes.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Row {
    pub family: String,
    pub d: usize,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub polytope_id: String,
    pub r: Option<f64>,
    pub method: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub exact: Option<f64>,
    pub runtime_s: f64,
    pub seed: Option<u64>,
}

impl Row {
    pub fn sort_key(&self) -> (String, usize, Option<usize>, Option<usize>, String, String, Option<u64>) {
        (self.family.clone(), self.d, self.k, self.m, self.polytope_id.clone(), self.method.clone(), self.seed)
    }
}

fn encode_rows(rows: &[Row], header: bool) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    w.into_inner().map_err(|e| crate::error::CliError::Io(e.to_string()))
}

/// Writes a fresh CSV: one `#` metadata line, the header and the rows.
pub fn write_csv(path: &Path, meta: &Meta, rows: &[Row]) -> CliResult<()> {
    let mut f = File::create(path)?;
    f.write_all(meta.comment().as_bytes())?;
    f.write_all(&encode_rows(rows, true)?)?;
    Ok(())
}

/// Appends rows to a run log, writing the header when the file is new. Each
/// append is preceded by its own metadata line.
pub fn append_csv(path: &Path, meta: &Meta, rows: &[Row]) -> CliResult<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(meta.comment().as_bytes())?;
    f.write_all(&encode_rows(rows, fresh)?)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// `null` for non-finite values.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn bound_kind(k: BoundKind) -> &'static str {
    match k {
        BoundKind::Bracket => "bracket",
        BoundKind::UpperOnly => "upper-only",
        BoundKind::LowerOnly => "lower-only",
    }
}

pub fn robustness_json(r: &RobustnessResult, timing: bool) -> Value {
    let certificate = r.certificate.as_ref().map(|c| {
        json!({
            "bound": num(c.bound),
            "alpha": num(c.alpha),
            "beta": num(c.beta),
            "validated": c.validated,
            "functionals": c.functionals.iter()
                .map(|row| row.iter().map(MatrixJson::from_operator).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    });
    json!({
        "eta_tilde": num(r.eta_tilde),
        "lower": num(r.lower),
        "upper": num(r.upper),
        "r": r.r_used.map(num),
        "kind": bound_kind(r.kind),
        "status": r.status.as_str(),
        "raw_status": r.raw_status,
        "normalization_residual": num(r.normalization_residual),
        "wall_time_s": if timing { r.wall_time_s } else { 0.0 },
        "method": r.method,
        "certificate": certificate,
    })
}

pub fn exact_json(e: &ExactResult, timing: bool) -> Value {
    json!({
        "eta": num(e.eta),
        "status": e.status.as_str(),
        "raw_status": e.raw_status,
        "strategies": e.strategies,
        "wall_time_s": if timing { e.wall_time_s } else { 0.0 },
        "method": e.method,
    })
}

pub fn document(meta: &Meta, config: &Value, body: Value) -> Value {
    json!({ "meta": meta, "config": config, "result": body })
}
