use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::factorization::check_increasing;
use crate::hilbert::{entanglement_entropy, BasisTrajectory, CVector, State, TensorSplit};

/// Norm tolerance for recorded states.
const TRACE_NORM_TOL: f64 = 1e-9;

/// Time-sampled states, optionally with their coordinates in a (possibly
/// moving) factorization frame, plus named per-sample diagnostics.
#[derive(Clone, Debug)]
pub struct EvolutionTrace {
    times: Vec<f64>,
    states: Vec<State>,
    frame: Option<BasisTrajectory>,
    components: Option<Vec<CVector>>,
    diagnostics: BTreeMap<String, Vec<f64>>,
}

impl EvolutionTrace {
    pub fn new(times: Vec<f64>, states: Vec<State>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::InvalidTimes(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        check_increasing(&times)?;
        if let Some(s) = states
            .iter()
            .find(|s| (s.norm() - 1.0).abs() > TRACE_NORM_TOL)
        {
            return Err(Error::NotNormalized(s.norm()));
        }
        Ok(Self {
            times,
            states,
            frame: None,
            components: None,
            diagnostics: BTreeMap::new(),
        })
    }

    pub(super) fn attach_frame(&mut self, frame: BasisTrajectory, components: Vec<CVector>) {
        self.frame = Some(frame);
        self.components = Some(components);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn frame(&self) -> Option<&BasisTrajectory> {
        self.frame.as_ref()
    }

    /// Frame coordinates per sample, row-major over the frame's split.
    pub fn components(&self) -> Option<&[CVector]> {
        self.components.as_deref()
    }

    pub fn first_components(&self) -> Option<&CVector> {
        self.components.as_ref().and_then(|c| c.first())
    }

    pub fn last_components(&self) -> Option<&CVector> {
        self.components.as_ref().and_then(|c| c.last())
    }

    pub fn diagnostics(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.diagnostics
    }

    pub fn diagnostic(&self, name: &str) -> Option<&[f64]> {
        self.diagnostics.get(name).map(Vec::as_slice)
    }

    pub fn set_diagnostic(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "diagnostic has {} values for {} samples",
                values.len(),
                self.len()
            )));
        }
        self.diagnostics.insert(name.into(), values);
        Ok(())
    }

    /// Largest distance between a state and its reconstruction from frame coordinates.
    pub fn reconstruction_error(&self) -> Option<f64> {
        let (frame, comps) = (self.frame.as_ref()?, self.components.as_ref()?);
        let err = frame
            .frames()
            .iter()
            .zip(comps)
            .zip(&self.states)
            .map(|((f, c), s)| (f.lattice_frame() * c - s.amplitudes()).norm())
            .fold(0.0, f64::max);
        Some(err)
    }

    /// `‖c(t) − c(t₀)‖` per sample.
    pub fn component_drift(&self) -> Option<Vec<f64>> {
        let comps = self.components.as_ref()?;
        let c0 = comps.first()?;
        Some(comps.iter().map(|c| (c - c0).norm()).collect())
    }

    /// `|c_k(t)|` per sample.
    pub fn component_moduli(&self) -> Option<Vec<Vec<f64>>> {
        let comps = self.components.as_ref()?;
        Some(
            comps
                .iter()
                .map(|c| c.iter().map(|z| z.norm()).collect())
                .collect(),
        )
    }

    /// Entanglement entropy per sample. Uses frame coordinates (and the frame's
    /// split) when present, raw amplitudes under `split` otherwise.
    pub fn entropy_story(&self, split: &TensorSplit) -> Result<Vec<f64>> {
        match (&self.frame, &self.components) {
            (Some(frame), Some(comps)) => {
                let split = frame.frames()[0].split();
                comps
                    .iter()
                    .map(|c| entanglement_entropy(&State::from_vector_unchecked(c.clone()), split))
                    .collect()
            }
            _ => self
                .states
                .iter()
                .map(|s| entanglement_entropy(s, split))
                .collect(),
        }
    }

    /// Records [`Self::entropy_story`] under the name `entropy`.
    pub fn record_entropy(&mut self, split: &TensorSplit) -> Result<()> {
        let story = self.entropy_story(split)?;
        self.set_diagnostic("entropy", story)
    }

    fn columns(&self) -> Vec<CVector> {
        match &self.components {
            Some(c) => c.clone(),
            None => self.states.iter().map(|s| s.amplitudes().clone()).collect(),
        }
    }

    /// CSV: `time, re_c1, im_c1, …, <diagnostics…>`. Frame coordinates when a
    /// frame is attached, raw amplitudes otherwise.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let dim = self.states.first().map_or(0, State::dim);
        let mut header = vec!["time".to_string()];
        for k in 1..=dim {
            header.push(format!("re_c{k}"));
            header.push(format!("im_c{k}"));
        }
        header.extend(self.diagnostics.keys().cloned());
        w.write_record(&header)?;
        for (i, (t, c)) in self.times.iter().zip(self.columns()).enumerate() {
            let mut row = vec![fmt_f64(*t)];
            for z in c.iter() {
                row.push(fmt_f64(z.re));
                row.push(fmt_f64(z.im));
            }
            row.extend(self.diagnostics.values().map(|v| fmt_f64(v[i])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// JSON mirror of the CSV export.
    pub fn to_json(&self) -> TraceJson {
        let split = |rows: Vec<CVector>| ComplexRows {
            re: rows
                .iter()
                .map(|c| c.iter().map(|z| z.re).collect())
                .collect(),
            im: rows
                .iter()
                .map(|c| c.iter().map(|z| z.im).collect())
                .collect(),
        };
        TraceJson {
            times: self.times.clone(),
            amplitudes: split(self.states.iter().map(|s| s.amplitudes().clone()).collect()),
            components: self.components.clone().map(split),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexRows {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceJson {
    pub times: Vec<f64>,
    pub amplitudes: ComplexRows,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<ComplexRows>,
    pub diagnostics: BTreeMap<String, Vec<f64>>,
}

/// Shortest round-trip decimal, the same digits the JSON output uses.
pub(crate) fn fmt_f64(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}
