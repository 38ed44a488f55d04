use std::collections::BTreeMap;

use serde::Serialize;

use super::{OptimizerSummary, SpectrumDecomposition};
use crate::dynamics::EvolutionTrace;
use crate::hilbert::{BasisTrajectory, Factorization};
use crate::io::DenseJson;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    /// Eigenbasis labeled so that the Hamiltonian is a sum of local terms.
    StaticNirvana,
    /// Eigenbasis with an arbitrary labeling; every component only rotates its phase.
    SamsaraBranches,
    /// Comoving frame; the state's coordinates do not change at all.
    DynamicNirvana,
    /// Result of numerical search.
    Optimized,
    /// A fixed factorization in which the trajectory stays a product state.
    Disentangled,
}

#[derive(Clone, Debug)]
pub enum FactorizationData {
    Static(Factorization),
    Trajectory(BasisTrajectory),
}

impl FactorizationData {
    /// The factorization in effect at the first sample.
    pub fn initial(&self) -> &Factorization {
        match self {
            Self::Static(f) => f,
            Self::Trajectory(t) => &t.frames()[0],
        }
    }
}

/// A named pass/fail measurement embedded in a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value ≤ threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FactorizationReport {
    pub kind: ReportKind,
    pub factorization: FactorizationData,
    /// What `objective_value` measures.
    pub objective: String,
    pub objective_value: f64,
    pub spectrum: Option<Vec<f64>>,
    pub sumset: Option<SpectrumDecomposition>,
    /// Energy attached to each lattice position `(i, j, …)`, row-major.
    pub label_energies: Option<Vec<f64>>,
    pub trace: Option<EvolutionTrace>,
    pub checks: Vec<Check>,
    pub optimizer: Option<OptimizerSummary>,
    pub note: Option<String>,
}

impl FactorizationReport {
    pub(crate) fn new(
        kind: ReportKind,
        factorization: FactorizationData,
        objective: &str,
        objective_value: f64,
    ) -> Self {
        Self {
            kind,
            factorization,
            objective: objective.to_string(),
            objective_value,
            spectrum: None,
            sumset: None,
            label_energies: None,
            trace: None,
            checks: Vec::new(),
            optimizer: None,
            note: None,
        }
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> ReportJson {
        let frames = match &self.factorization {
            FactorizationData::Static(f) => vec![FrameJson {
                time: None,
                basis: frame_matrix(f),
            }],
            FactorizationData::Trajectory(t) => t
                .times()
                .iter()
                .zip(t.frames())
                .map(|(&time, f)| FrameJson {
                    time: Some(time),
                    basis: frame_matrix(f),
                })
                .collect(),
        };
        let initial = self.factorization.initial();
        ReportJson {
            kind: self.kind,
            objective: self.objective.clone(),
            objective_value: self.objective_value,
            split: initial.split().dims().to_vec(),
            labels: initial.labels().to_vec(),
            frames,
            spectrum: self.spectrum.clone(),
            sumset: self.sumset.clone(),
            label_energies: self.label_energies.clone(),
            trace: self.trace.as_ref().map(EvolutionTrace::to_json),
            checks: self.checks.clone(),
            optimizer: self.optimizer.clone(),
            note: self.note.clone(),
        }
    }
}

fn frame_matrix(f: &Factorization) -> DenseJson {
    DenseJson::from_matrix(f.basis().matrix())
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    /// Columns are the basis vectors; column `k` carries `labels[k]`.
    pub basis: DenseJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportJson {
    pub kind: ReportKind,
    pub objective: String,
    pub objective_value: f64,
    pub split: Vec<usize>,
    pub labels: Vec<Vec<usize>>,
    pub frames: Vec<FrameJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sumset: Option<SpectrumDecomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_energies: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<crate::dynamics::TraceJson>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ReportJson {
    pub fn diagnostics(&self) -> BTreeMap<String, Vec<f64>> {
        self.trace
            .as_ref()
            .map(|t| t.diagnostics.clone())
            .unwrap_or_default()
    }
}
