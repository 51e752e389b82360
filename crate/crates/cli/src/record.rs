//! Result records written as JSON lines, and CSV curves for plotting.

use num_complex::Complex64;
use serde::Serialize;

use crate::config::SCHEMA_VERSION;

/// Complex number as `[re, im]`.
pub type Pair = [f64; 2];

pub fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub job_id: String,
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub model: &'static str,
    pub probes: Vec<Pair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumRecord>,
    pub solutions: Vec<SolutionRecord>,
    pub summary: Summary,
    pub checks: Vec<Check>,
    pub status: Status,
}

impl ResultRecord {
    pub fn new(job: &crate::config::Job, command: &'static str) -> Self {
        ResultRecord {
            schema_version: SCHEMA_VERSION,
            job_id: job.config.job_id.clone(),
            command,
            config_hash: job.config_hash.clone(),
            seed: job.seed,
            model: job.model().name(),
            probes: job.probes.iter().copied().map(pair).collect(),
            spectrum: None,
            solutions: Vec::new(),
            summary: Summary::default(),
            checks: Vec::new(),
            status: Status::Ok,
        }
    }

    pub fn to_json_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("record serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NoSolutions,
    VerificationFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NoSolutions => 2,
            Status::VerificationFailed => 3,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub solutions: usize,
    pub matched: usize,
    pub spurious: usize,
    pub unmatched: usize,
    pub checks_passed: usize,
    pub checks_failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRecord {
    /// Largest relative eigen-residual of the joint diagonalization.
    pub eigen_residual: f64,
    pub states: Vec<EigenstateRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenstateRecord {
    /// Eigenvalues of `H_1 .. H_N`.
    pub hamiltonians: Vec<Pair>,
    pub h0: Pair,
    pub sum_h: Pair,
    /// `tau_hat(u)` eigenvalue at each probe.
    pub tau: Vec<Pair>,
    /// Largest relative gap between `tau` and its pole recombination.
    pub recombination_residual: f64,
}

/// How a Bethe solution relates to the exact spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionClass {
    /// Eigenvalue curve equals a diagonalization curve.
    Matched,
    /// No matching curve and the Bethe vector vanishes.
    Spurious,
    Unmatched,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionRecord {
    pub model: &'static str,
    pub nu: i64,
    pub roots: Vec<Pair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Pair>,
    pub bethe_residual: f64,
    pub jacobian_cond: f64,
    pub slot: usize,
    pub mismatch: f64,
    pub functional_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null_ratio: Option<f64>,
    pub class: SolutionClass,
    /// Predicted eigenvalue at each probe.
    pub eigenvalues: Vec<Pair>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

/// One measured quantity against its threshold.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn below(suite: &'static str, name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { suite, name: name.into(), value, comparison: Comparison::Below, threshold, passed: value < threshold, note: None }
    }

    pub fn above(suite: &'static str, name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { suite, name: name.into(), value, comparison: Comparison::Above, threshold, passed: value > threshold, note: None }
    }

    /// A check that could not be evaluated.
    pub fn error(suite: &'static str, name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Check {
            suite,
            name: name.into(),
            value: f64::NAN,
            comparison: Comparison::Below,
            threshold: 0.0,
            passed: false,
            note: Some(err.to_string()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Curves `(label, u, value)` for plotting.
#[derive(Clone, Debug, Default)]
pub struct CsvTable {
    pub rows: Vec<(String, Complex64, Complex64)>,
}

impl CsvTable {
    pub fn render(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["curve", "u_re", "u_im", "value_re", "value_im"]).expect("in-memory write");
        for (curve, u, v) in &self.rows {
            let fields = [curve.clone(), u.re.to_string(), u.im.to_string(), v.re.to_string(), v.im.to_string()];
            w.write_record(&fields).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is UTF-8")
    }
}
