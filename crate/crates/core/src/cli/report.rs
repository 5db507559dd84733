//! Result documents: structured (JSON) and tabular text.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub family: String,
    pub newton_tol: f64,
    pub boson_cutoff: Option<usize>,
    pub xi_steps: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub id: usize,
    pub occupation: Option<Vec<usize>>,
    pub status: String,
    /// `[re, im]` pairs.
    pub rapidities: Vec<[f64; 2]>,
    pub residual_max_abs: f64,
    /// `sum_a x_a + E_vac` (Dicke models).
    pub bethe_energy: Option<f64>,
    /// `<psi|H|psi>` of the Bethe vector (Dicke models).
    pub rayleigh_energy: Option<f64>,
    /// Rayleigh quotients of the conserved charges.
    pub charge_eigenvalues: Vec<f64>,
    /// Largest relative eigen-residual over the Hamiltonian and the charges.
    pub oracle_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedSeed {
    pub id: usize,
    pub occupation: Option<Vec<usize>>,
    pub status: String,
    pub diagnostic: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub xi: f64,
    pub max_abs: f64,
    pub iterations: usize,
    pub rapidities: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub operator: String,
    pub sector: usize,
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value < tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub program: String,
    pub version: String,
    pub mode: String,
    /// Model file text, canonical form.
    pub spec: String,
    pub settings: Settings,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<BranchRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed_seeds: Vec<FailedSeed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_status: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spectrum: Vec<SpectrumRow>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_tabular(&self) -> String {
        let mut out = String::new();
        let num = |x: f64| format!("{x:.16e}");
        let opt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), num);
        let pairs = |r: &[[f64; 2]]| {
            r.iter()
                .map(|p| format!("{} {}", num(p[0]), num(p[1])))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "# {} {} {}", self.program, self.version, self.mode).unwrap();
        for line in self.spec.lines() {
            writeln!(out, "# {line}").unwrap();
        }
        if !self.branches.is_empty() {
            writeln!(
                out,
                "# id status residual bethe_energy rayleigh_energy oracle_residual re_1 im_1 ..."
            )
            .unwrap();
            for b in &self.branches {
                writeln!(
                    out,
                    "{} {} {} {} {} {} {}",
                    b.id,
                    b.status,
                    num(b.residual_max_abs),
                    opt(b.bethe_energy),
                    opt(b.rayleigh_energy),
                    num(b.oracle_residual),
                    pairs(&b.rapidities)
                )
                .unwrap();
            }
        }
        if let Some(trace) = &self.trace {
            writeln!(out, "# xi residual iterations re_1 im_1 ...").unwrap();
            for row in trace {
                writeln!(
                    out,
                    "{} {} {} {}",
                    num(row.xi),
                    num(row.max_abs),
                    row.iterations,
                    pairs(&row.rapidities)
                )
                .unwrap();
            }
        }
        if !self.spectrum.is_empty() {
            writeln!(out, "# operator sector index eigenvalue").unwrap();
            for row in &self.spectrum {
                writeln!(out, "{} {} {} {}", row.operator, row.sector, row.index, num(row.value)).unwrap();
            }
        }
        for c in &self.checks {
            writeln!(
                out,
                "# check {} {} value {} tolerance {}",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                num(c.value),
                num(c.tolerance)
            )
            .unwrap();
        }
        out
    }
}
