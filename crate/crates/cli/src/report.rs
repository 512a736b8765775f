//! Report types and their CSV / JSON renderings.
//!
//! Floats in CSV carry 17 significant digits, so every value re-parses to the
//! same `f64` that JSON carries.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::{CliError, SCHEMA_VERSION};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub t: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationRowOut {
    pub n: u32,
    pub t: f64,
    pub v_phi: Option<f64>,
    /// q rendered with `Display` -> Σ |Δ|^q.
    pub v_q: Map<String, Value>,
    pub theory_limit: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRowOut {
    pub t: f64,
    pub value: Option<f64>,
    pub formula_id: Option<String>,
    pub sigma2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexOut {
    /// `critical`, `rough` or `bounded_variation`.
    pub class: String,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovOut {
    pub n: u32,
    pub exact: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NstepOut {
    pub n: u32,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainOut {
    pub b: u64,
    pub sign: String,
    pub states: Vec<i64>,
    pub transition_matrix: Vec<Vec<String>>,
    pub mu1: Vec<String>,
    pub restricted_one_step: Vec<Vec<String>>,
    pub stationary: Vec<String>,
    pub sigma2: String,
    pub sigma2_f64: f64,
    pub covariances: Vec<CovOut>,
    pub nstep: Vec<NstepOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionsOut {
    pub frequencies: Vec<Vec<Option<f64>>>,
    pub max_abs_z: f64,
    pub degenerate_entries_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McOut {
    pub n: u32,
    pub count: u64,
    pub seed: u64,
    pub mean: f64,
    pub variance: f64,
    pub second_moment_per_step: f64,
    pub sigma2: f64,
    pub ks_normal: f64,
    pub scaled_phi: f64,
    pub scaled_phi_std_error: f64,
    pub theory_limit: Option<f64>,
    pub transitions: Option<TransitionsOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub level: u32,
    pub cells: u64,
    pub max_abs_residual: f64,
    pub mean_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QvRow {
    pub k: u32,
    pub qv: f64,
    pub qv_per_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseOut {
    pub n: u32,
    pub seed: u64,
    pub martingale: Vec<ResidualRow>,
    pub qv: Option<Vec<QvRow>>,
    pub qv_target: Option<f64>,
    pub equidistribution_ks: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Body {
    Eval { rows: Vec<EvalRow> },
    Variation { rows: Vec<VariationRowOut> },
    Limit { rows: Vec<LimitRowOut>, variation_index: IndexOut },
    Chain(ChainOut),
    Mc(McOut),
    Diagnose(DiagnoseOut),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    /// Logarithm used by every formula.
    pub log: String,
    pub params: Value,
    pub result: Body,
}

impl Report {
    pub fn new(command: &str, params: Value, result: Body) -> Self {
        Self { schema_version: SCHEMA_VERSION, command: command.into(), log: "natural".into(), params, result }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut put = |rec: &[String]| w.write_record(rec).map_err(CliError::io);
        match &self.result {
            Body::Eval { rows } => {
                put(&["t".into(), "f".into()])?;
                for r in rows {
                    put(&[fmt_f64(r.t), fmt_f64(r.f)])?;
                }
            }
            Body::Variation { rows } => {
                put(&["n", "t", "v_phi", "q", "v_q", "theory_limit", "ratio"].map(String::from))?;
                for r in rows {
                    let head = [r.n.to_string(), fmt_f64(r.t), fmt_opt(r.v_phi)];
                    let tail = [fmt_opt(r.theory_limit), fmt_opt(r.ratio)];
                    if r.v_q.is_empty() {
                        put(&[head.as_slice(), &[String::new(), String::new()], &tail].concat())?;
                    }
                    for (q, v) in &r.v_q {
                        let q: f64 = q.parse().map_err(CliError::io)?;
                        let v = v.as_f64().unwrap_or(f64::NAN);
                        put(&[head.as_slice(), &[fmt_f64(q), fmt_f64(v)], &tail].concat())?;
                    }
                }
            }
            Body::Limit { rows, variation_index } => {
                put(&["t", "value", "formula_id", "sigma2", "index_class", "p"].map(String::from))?;
                for r in rows {
                    put(&[
                        fmt_f64(r.t),
                        fmt_opt(r.value),
                        r.formula_id.clone().unwrap_or_default(),
                        fmt_opt(r.sigma2),
                        variation_index.class.clone(),
                        fmt_opt(variation_index.p),
                    ])?;
                }
            }
            Body::Chain(c) => {
                put(&["section", "index", "key", "value"].map(String::from))?;
                for row in long_rows_chain(c) {
                    put(&row)?;
                }
            }
            Body::Mc(m) => {
                put(&["section", "index", "key", "value"].map(String::from))?;
                for row in long_rows_mc(m) {
                    put(&row)?;
                }
            }
            Body::Diagnose(d) => {
                put(&["section", "index", "key", "value"].map(String::from))?;
                for row in long_rows_diagnose(d) {
                    put(&row)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(CliError::io)?;
        String::from_utf8(bytes).map_err(CliError::io)
    }
}

fn row(section: &str, index: impl ToString, key: &str, value: String) -> [String; 4] {
    [section.into(), index.to_string(), key.into(), value]
}

fn matrix_rows(out: &mut Vec<[String; 4]>, section: &str, index: impl ToString + Copy, m: &[Vec<String>]) {
    for (i, r) in m.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            out.push(row(section, index, &format!("{i},{j}"), x.clone()));
        }
    }
}

fn long_rows_chain(c: &ChainOut) -> Vec<[String; 4]> {
    let mut out = vec![row("chain", "", "b", c.b.to_string()), row("chain", "", "sign", c.sign.clone())];
    matrix_rows(&mut out, "transition_matrix", "", &c.transition_matrix);
    for (i, x) in c.mu1.iter().enumerate() {
        out.push(row("mu1", i, "state", x.clone()));
    }
    matrix_rows(&mut out, "restricted_one_step", "", &c.restricted_one_step);
    for (i, x) in c.stationary.iter().enumerate() {
        out.push(row("stationary", i, "state", x.clone()));
    }
    out.push(row("sigma2", "", "exact", c.sigma2.clone()));
    out.push(row("sigma2", "", "value", fmt_f64(c.sigma2_f64)));
    for cov in &c.covariances {
        out.push(row("covariance", cov.n, "exact", cov.exact.clone()));
        out.push(row("covariance", cov.n, "value", fmt_f64(cov.value)));
    }
    for ns in &c.nstep {
        matrix_rows(&mut out, "nstep", ns.n, &ns.matrix);
    }
    out
}

fn long_rows_mc(m: &McOut) -> Vec<[String; 4]> {
    let s = "ensemble";
    let mut out = vec![
        row(s, "", "n", m.n.to_string()),
        row(s, "", "count", m.count.to_string()),
        row(s, "", "seed", m.seed.to_string()),
        row(s, "", "mean", fmt_f64(m.mean)),
        row(s, "", "variance", fmt_f64(m.variance)),
        row(s, "", "second_moment_per_step", fmt_f64(m.second_moment_per_step)),
        row(s, "", "sigma2", fmt_f64(m.sigma2)),
        row(s, "", "ks_normal", fmt_f64(m.ks_normal)),
        row(s, "", "scaled_phi", fmt_f64(m.scaled_phi)),
        row(s, "", "scaled_phi_std_error", fmt_f64(m.scaled_phi_std_error)),
        row(s, "", "theory_limit", fmt_opt(m.theory_limit)),
    ];
    if let Some(t) = &m.transitions {
        for (i, r) in t.frequencies.iter().enumerate() {
            for (j, f) in r.iter().enumerate() {
                out.push(row("transition_frequency", "", &format!("{i},{j}"), fmt_opt(*f)));
            }
        }
        out.push(row("transitions", "", "max_abs_z", fmt_f64(t.max_abs_z)));
        out.push(row("transitions", "", "degenerate_entries_exact", t.degenerate_entries_exact.to_string()));
    }
    out
}

fn long_rows_diagnose(d: &DiagnoseOut) -> Vec<[String; 4]> {
    let mut out = vec![row("path", "", "n", d.n.to_string()), row("path", "", "seed", d.seed.to_string())];
    for r in &d.martingale {
        out.push(row("martingale", r.level, "cells", r.cells.to_string()));
        out.push(row("martingale", r.level, "max_abs_residual", fmt_f64(r.max_abs_residual)));
        out.push(row("martingale", r.level, "mean_residual", fmt_f64(r.mean_residual)));
    }
    if let Some(qv) = &d.qv {
        for r in qv {
            out.push(row("qv", r.k, "qv", fmt_f64(r.qv)));
            out.push(row("qv", r.k, "qv_per_step", fmt_f64(r.qv_per_step)));
        }
    }
    out.push(row("qv", "", "target", fmt_opt(d.qv_target)));
    out.push(row("equidistribution", "", "ks", fmt_opt(d.equidistribution_ks)));
    out
}
