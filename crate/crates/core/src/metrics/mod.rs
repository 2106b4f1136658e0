//! The 21-component complexity vector computed for every contract.

mod function;
mod inheritance;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::frontend::{line_accounting, ContractDef, LineCounts, ParsedFile, Statement};

pub use function::{function_metrics, FunctionMetrics};
pub use inheritance::{build_inheritance_graph, ContractId, CycleError, InheritanceGraph};

/// Identifies one component of [`ContractMetrics`], in canonical column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    Sloc,
    Lloc,
    Cloc,
    Nf,
    Wmc,
    Nl,
    Nle,
    Numpar,
    Nos,
    Dit,
    Noa,
    Nod,
    Cbo,
    Na,
    Noi,
    AvgMccc,
    AvgNl,
    AvgNle,
    AvgNumpar,
    AvgNos,
    AvgNoi,
}

impl MetricId {
    pub const ALL: [MetricId; 21] = [
        MetricId::Sloc,
        MetricId::Lloc,
        MetricId::Cloc,
        MetricId::Nf,
        MetricId::Wmc,
        MetricId::Nl,
        MetricId::Nle,
        MetricId::Numpar,
        MetricId::Nos,
        MetricId::Dit,
        MetricId::Noa,
        MetricId::Nod,
        MetricId::Cbo,
        MetricId::Na,
        MetricId::Noi,
        MetricId::AvgMccc,
        MetricId::AvgNl,
        MetricId::AvgNle,
        MetricId::AvgNumpar,
        MetricId::AvgNos,
        MetricId::AvgNoi,
    ];

    /// Lowercase key used in CSV headers and JSON objects.
    pub fn key(self) -> &'static str {
        match self {
            MetricId::Sloc => "sloc",
            MetricId::Lloc => "lloc",
            MetricId::Cloc => "cloc",
            MetricId::Nf => "nf",
            MetricId::Wmc => "wmc",
            MetricId::Nl => "nl",
            MetricId::Nle => "nle",
            MetricId::Numpar => "numpar",
            MetricId::Nos => "nos",
            MetricId::Dit => "dit",
            MetricId::Noa => "noa",
            MetricId::Nod => "nod",
            MetricId::Cbo => "cbo",
            MetricId::Na => "na",
            MetricId::Noi => "noi",
            MetricId::AvgMccc => "avg_mccc",
            MetricId::AvgNl => "avg_nl",
            MetricId::AvgNle => "avg_nle",
            MetricId::AvgNumpar => "avg_numpar",
            MetricId::AvgNos => "avg_nos",
            MetricId::AvgNoi => "avg_noi",
        }
    }

    /// Display label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            MetricId::Sloc => "SLOC",
            MetricId::Lloc => "LLOC",
            MetricId::Cloc => "CLOC",
            MetricId::Nf => "NF",
            MetricId::Wmc => "WMC",
            MetricId::Nl => "NL",
            MetricId::Nle => "NLE",
            MetricId::Numpar => "NUMPAR",
            MetricId::Nos => "NOS",
            MetricId::Dit => "DIT",
            MetricId::Noa => "NOA",
            MetricId::Nod => "NOD",
            MetricId::Cbo => "CBO",
            MetricId::Na => "NA",
            MetricId::Noi => "NOI",
            MetricId::AvgMccc => "Avg. McCC",
            MetricId::AvgNl => "Avg. NL",
            MetricId::AvgNle => "Avg. NLE",
            MetricId::AvgNumpar => "Avg. NUMPAR",
            MetricId::AvgNos => "Avg. NOS",
            MetricId::AvgNoi => "Avg. NOI",
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MetricId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricId::ALL
            .into_iter()
            .find(|m| m.key() == s || m.label() == s)
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

/// Complexity vector of one contract. Field order is the canonical column order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ContractMetrics {
    pub sloc: u64,
    pub lloc: u64,
    pub cloc: u64,
    pub nf: u64,
    pub wmc: u64,
    pub nl: u64,
    pub nle: u64,
    pub numpar: u64,
    pub nos: u64,
    pub dit: u64,
    pub noa: u64,
    pub nod: u64,
    pub cbo: u64,
    pub na: u64,
    pub noi: u64,
    pub avg_mccc: f64,
    pub avg_nl: f64,
    pub avg_nle: f64,
    pub avg_numpar: f64,
    pub avg_nos: f64,
    pub avg_noi: f64,
}

impl ContractMetrics {
    pub fn get(&self, id: MetricId) -> f64 {
        match id {
            MetricId::Sloc => self.sloc as f64,
            MetricId::Lloc => self.lloc as f64,
            MetricId::Cloc => self.cloc as f64,
            MetricId::Nf => self.nf as f64,
            MetricId::Wmc => self.wmc as f64,
            MetricId::Nl => self.nl as f64,
            MetricId::Nle => self.nle as f64,
            MetricId::Numpar => self.numpar as f64,
            MetricId::Nos => self.nos as f64,
            MetricId::Dit => self.dit as f64,
            MetricId::Noa => self.noa as f64,
            MetricId::Nod => self.nod as f64,
            MetricId::Cbo => self.cbo as f64,
            MetricId::Na => self.na as f64,
            MetricId::Noi => self.noi as f64,
            MetricId::AvgMccc => self.avg_mccc,
            MetricId::AvgNl => self.avg_nl,
            MetricId::AvgNle => self.avg_nle,
            MetricId::AvgNumpar => self.avg_numpar,
            MetricId::AvgNos => self.avg_nos,
            MetricId::AvgNoi => self.avg_noi,
        }
    }

    pub fn values(&self) -> [f64; 21] {
        MetricId::ALL.map(|m| self.get(m))
    }

    /// Renders the 21 values as CSV fields in canonical order.
    pub fn csv_fields(&self) -> Vec<String> {
        MetricId::ALL
            .iter()
            .enumerate()
            .map(|(i, &m)| if i < 15 { (self.get(m) as u64).to_string() } else { self.get(m).to_string() })
            .collect()
    }

    /// Parses the 21 canonical CSV fields produced by [`csv_fields`](Self::csv_fields).
    pub fn from_csv_fields(fields: &[&str]) -> Result<Self, String> {
        if fields.len() != 21 {
            return Err(format!("expected 21 metric fields, found {}", fields.len()));
        }
        let int = |i: usize| fields[i].trim().parse::<u64>().map_err(|e| format!("{}: {e}", MetricId::ALL[i].key()));
        let real = |i: usize| fields[i].trim().parse::<f64>().map_err(|e| format!("{}: {e}", MetricId::ALL[i].key()));
        Ok(ContractMetrics {
            sloc: int(0)?,
            lloc: int(1)?,
            cloc: int(2)?,
            nf: int(3)?,
            wmc: int(4)?,
            nl: int(5)?,
            nle: int(6)?,
            numpar: int(7)?,
            nos: int(8)?,
            dit: int(9)?,
            noa: int(10)?,
            nod: int(11)?,
            cbo: int(12)?,
            na: int(13)?,
            noi: int(14)?,
            avg_mccc: real(15)?,
            avg_nl: real(16)?,
            avg_nle: real(17)?,
            avg_numpar: real(18)?,
            avg_nos: real(19)?,
            avg_noi: real(20)?,
        })
    }

    /// Checks the relations that hold for any vector this crate computes.
    pub fn validate(&self) -> Result<(), String> {
        let mut broken = Vec::new();
        if self.lloc > self.sloc {
            broken.push("lloc > sloc");
        }
        if self.cloc > self.sloc {
            broken.push("cloc > sloc");
        }
        if self.nf > 0 && self.wmc < self.nf {
            broken.push("wmc < nf");
        }
        if self.nl < self.nle {
            broken.push("nl < nle");
        }
        if self.noa < self.dit {
            broken.push("noa < dit");
        }
        let nf = self.nf as f64;
        let averages = [
            (self.avg_nl, Some(self.nl)),
            (self.avg_nle, Some(self.nle)),
            (self.avg_numpar, Some(self.numpar)),
            (self.avg_noi, Some(self.noi)),
            (self.avg_mccc, None),
            (self.avg_nos, None),
        ];
        for (avg, total) in averages {
            if !avg.is_finite() || avg < 0.0 {
                broken.push("average not finite and non-negative");
            } else if self.nf == 0 && avg != 0.0 {
                broken.push("average nonzero with nf = 0");
            } else if let Some(total) = total.filter(|_| self.nf > 0) {
                if (avg * nf - total as f64).abs() > 1e-9 {
                    broken.push("average inconsistent with total");
                }
            }
        }
        if broken.is_empty() {
            Ok(())
        } else {
            Err(broken.join(", "))
        }
    }
}

/// Computes the metric vector of `contract`, identified in `graph` by `id`.
pub fn contract_metrics(id: &ContractId, contract: &ContractDef, lines: LineCounts, graph: &InheritanceGraph) -> ContractMetrics {
    let callable: Vec<FunctionMetrics> =
        contract.functions.iter().filter(|f| f.is_callable()).map(function_metrics).collect();
    let sum = |f: fn(&FunctionMetrics) -> u64| callable.iter().map(f).sum::<u64>();
    let nf = callable.len() as u64;
    let mccc_total = sum(|m| m.mccc);
    let nl = sum(|m| m.nl);
    let nle = sum(|m| m.nle);
    let numpar = sum(|m| m.numpar);
    let fn_nos = sum(|m| m.nos);
    let noi = sum(|m| m.noi);
    let declarations = (contract.state_vars.len() + contract.events.len() + contract.structs.len() + contract.enums.len()) as u64;
    let avg = |total: u64| if nf == 0 { 0.0 } else { total as f64 / nf as f64 };

    ContractMetrics {
        sloc: lines.sloc,
        lloc: lines.lloc,
        cloc: lines.cloc,
        nf,
        wmc: sum(|m| m.mccc_strict),
        nl,
        nle,
        numpar,
        nos: fn_nos + declarations,
        dit: graph.dit(id).unwrap_or(0),
        noa: graph.noa(id).unwrap_or(0),
        nod: graph.nod(id).unwrap_or(0),
        cbo: coupled_names(contract).len() as u64,
        na: contract.state_vars.len() as u64,
        noi,
        avg_mccc: avg(mccc_total),
        avg_nl: avg(nl),
        avg_nle: avg(nle),
        avg_numpar: avg(numpar),
        avg_nos: avg(fn_nos),
        avg_noi: avg(noi),
    }
}

/// Other contract names referenced through bases, declared types, and `new`.
pub fn coupled_names(contract: &ContractDef) -> BTreeSet<String> {
    let mut names: BTreeSet<String> = contract.base_names.iter().cloned().collect();
    for var in &contract.state_vars {
        names.extend(var.type_refs.iter().cloned());
        names.extend(var.new_targets.iter().cloned());
    }
    for func in &contract.functions {
        for param in func.params.iter().chain(&func.returns) {
            names.extend(param.type_refs.iter().cloned());
        }
        if let Some(body) = &func.body {
            for stmt in &body.statements {
                stmt.walk(&mut |s: &Statement| {
                    names.extend(s.calls.iter().filter(|c| c.is_new_expression).map(|c| c.callee.clone()));
                });
            }
        }
    }
    names.remove(&contract.name);
    names
}

/// Metric vectors for every contract of already-parsed files, sharing one
/// inheritance graph. Rows come back sorted by contract id.
pub fn measure_files(files: &[ParsedFile]) -> Result<Vec<(ContractId, ContractMetrics)>, CycleError> {
    let graph = InheritanceGraph::build(
        files.iter().flat_map(|f| f.unit.contracts.iter().map(move |c| (f.unit.path.as_str(), c))),
    )?;
    let mut rows = Vec::new();
    for file in files {
        for contract in &file.unit.contracts {
            let id = ContractId::new(&file.unit.path, &contract.name);
            let lines = line_accounting(contract, &file.tokens);
            rows.push((id.clone(), contract_metrics(&id, contract, lines, &graph)));
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(rows)
}
