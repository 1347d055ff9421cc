//! JSON and CSV formats for states, measurements, strategies and
//! correlation tables.
//!
//! Matrices are row-major lists; an entry is a number or a `[re, im]` pair
//! (imaginary parts must vanish, all stored measurements are real).

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::certify::Certification;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::strategy::{
    BinaryObservable, CorrelationTable, ProjectiveMeasurement, Question, SchmidtState, Strategy,
};

/// Largest imaginary part accepted in an entry of a real matrix.
const IMAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

fn matrix_from_entries(entries: &[Entry]) -> Result<RealMatrix> {
    let data = entries
        .iter()
        .map(|e| match *e {
            Entry::Real(x) => Ok(x),
            Entry::Complex([re, im]) if im.abs() <= IMAG_TOL => Ok(re),
            Entry::Complex([_, im]) => Err(Error::Format(format!(
                "complex entry with imaginary part {im:e}; only real measurements are supported"
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    RealMatrix::from_row_major(data).map_err(|e| Error::Format(e.to_string()))
}

fn entries_of(m: &RealMatrix) -> Vec<Entry> {
    m.as_slice().iter().map(|x| Entry::Real(*x)).collect()
}

/// One question: a labelled projective measurement, or a binary observable
/// given directly by its matrix.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct QuestionDoc {
    #[serde(default)]
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projections: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Entry>>,
}

impl QuestionDoc {
    pub fn from_question(q: &Question) -> Self {
        Self {
            label: q.label.clone(),
            projections: Some(q.measurement.projections().iter().map(entries_of).collect()),
            matrix: None,
        }
    }

    pub fn to_measurement(&self, tol: &Tolerances) -> Result<ProjectiveMeasurement> {
        match (&self.projections, &self.matrix) {
            (Some(p), None) => {
                let projs = p.iter().map(|e| matrix_from_entries(e)).collect::<Result<_>>()?;
                ProjectiveMeasurement::new(projs, tol)
            }
            (None, Some(m)) => Ok(BinaryObservable::new(matrix_from_entries(m)?, tol)?.to_measurement()),
            _ => Err(Error::Format(format!(
                "question '{}' needs exactly one of `projections` or `matrix`",
                self.label
            ))),
        }
    }

    pub fn to_question(&self, tol: &Tolerances) -> Result<Question> {
        Ok(Question::new(self.label.clone(), self.to_measurement(tol)?))
    }

    /// The binary observable `M_0 − M_1`, for two-outcome questions.
    pub fn to_binary(&self, tol: &Tolerances) -> Result<BinaryObservable> {
        let m = self.to_measurement(tol)?;
        let o = m.binary_observable().ok_or_else(|| {
            Error::InvalidMeasurement(format!(
                "question '{}' has {} outcomes, expected 2",
                self.label,
                m.outputs()
            ))
        })?;
        BinaryObservable::new(o, tol)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifiesDoc {
    pub target: QuestionDoc,
    pub alice_questions: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategyDoc {
    pub dim: usize,
    pub schmidt_coeffs: Vec<f64>,
    pub alice: Vec<QuestionDoc>,
    pub bob: Vec<QuestionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certifies: Option<CertifiesDoc>,
}

impl StrategyDoc {
    pub fn from_strategy(s: &Strategy) -> Self {
        Self {
            dim: s.dim(),
            schmidt_coeffs: s.state.coeffs().to_vec(),
            alice: s.alice.iter().map(QuestionDoc::from_question).collect(),
            bob: s.bob.iter().map(QuestionDoc::from_question).collect(),
            certifies: None,
        }
    }

    pub fn from_certification(c: &Certification) -> Self {
        let mut doc = Self::from_strategy(&c.strategy);
        doc.certifies = Some(CertifiesDoc {
            target: QuestionDoc::from_question(&Question::new("target", c.target.clone())),
            alice_questions: c.target_questions.clone(),
        });
        doc
    }

    pub fn to_strategy(&self, tol: &Tolerances) -> Result<Strategy> {
        let state = SchmidtState::new(self.schmidt_coeffs.clone())?;
        if state.dim() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: state.dim() });
        }
        let alice = self.alice.iter().map(|q| q.to_question(tol)).collect::<Result<_>>()?;
        let bob = self.bob.iter().map(|q| q.to_question(tol)).collect::<Result<_>>()?;
        Strategy::new(state, alice, bob)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDoc {
    pub schmidt_coeffs: Vec<f64>,
}

impl StateDoc {
    pub fn to_state(&self) -> Result<SchmidtState> {
        SchmidtState::new(self.schmidt_coeffs.clone())
    }
}

/// A question list, either a bare array or `{"questions": [...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum QuestionListDoc {
    Bare(Vec<QuestionDoc>),
    Wrapped { questions: Vec<QuestionDoc> },
}

impl QuestionListDoc {
    pub fn into_vec(self) -> Vec<QuestionDoc> {
        match self {
            QuestionListDoc::Bare(v) | QuestionListDoc::Wrapped { questions: v } => v,
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_strategy(path: &Path, tol: &Tolerances) -> Result<Strategy> {
    read_json::<StrategyDoc>(path)?.to_strategy(tol)
}

pub fn write_strategy(path: &Path, s: &Strategy) -> Result<()> {
    write_json(path, &StrategyDoc::from_strategy(s))
}

pub fn read_questions(path: &Path) -> Result<Vec<QuestionDoc>> {
    Ok(read_json::<QuestionListDoc>(path)?.into_vec())
}

/// CSV with header `x,j,y,k,re,im`, 17 significant digits per value.
pub fn write_correlations_csv<W: Write>(mut w: W, table: &CorrelationTable) -> Result<()> {
    writeln!(w, "x,j,y,k,re,im")?;
    for ((x, j, y, k), v) in &table.entries {
        writeln!(w, "{x},{j},{y},{k},{:.16e},{:.16e}", v.re, v.im)?;
    }
    Ok(())
}

pub fn read_correlations_csv(text: &str) -> Result<CorrelationTable> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("x,j,y,k,re,im") {
        return Err(Error::Format("missing header x,j,y,k,re,im".into()));
    }
    let mut table = CorrelationTable::default();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::Format(format!("malformed correlation row {}: {line}", n + 2));
        if f.len() != 6 {
            return Err(bad());
        }
        let idx = |i: usize| f[i].parse::<usize>().map_err(|_| bad());
        let val = |i: usize| f[i].parse::<f64>().map_err(|_| bad());
        table.entries.insert(
            (idx(0)?, idx(1)?, idx(2)?, idx(3)?),
            num_complex::Complex64::new(val(4)?, val(5)?),
        );
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::initial_strategy;
    use crate::strategy::correlation_table;

    #[test]
    fn strategy_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let s = initial_strategy(5).unwrap();
        write_strategy(&path, &s).unwrap();
        let back = read_strategy(&path, &Tolerances::default()).unwrap();
        assert_eq!(back.alice.len(), s.alice.len());
        for (a, b) in s.alice.iter().chain(&s.bob).zip(back.alice.iter().chain(&back.bob)) {
            assert_eq!(a.label, b.label);
            for (p, q) in a.measurement.projections().iter().zip(b.measurement.projections()) {
                assert!(p.max_abs_diff(q) <= 1e-15);
            }
        }
        assert_eq!(back.state, s.state);
    }

    #[test]
    fn matrix_and_complex_entries() {
        let doc: QuestionDoc =
            serde_json::from_str(r#"{"label":"X","matrix":[0,[1,0],1.0,[0.0,0.0]]}"#).unwrap();
        let o = doc.to_binary(&Tolerances::default()).unwrap();
        assert_eq!(o.matrix(), &crate::matrix::pauli_x());
        let bad: QuestionDoc = serde_json::from_str(r#"{"matrix":[0,[1,0.5],1,0]}"#).unwrap();
        assert!(matches!(bad.to_measurement(&Tolerances::default()), Err(Error::Format(_))));
        let neither: QuestionDoc = serde_json::from_str(r#"{"label":"q"}"#).unwrap();
        assert!(neither.to_measurement(&Tolerances::default()).is_err());
    }

    #[test]
    fn question_list_forms() {
        let a: QuestionListDoc = serde_json::from_str(r#"[{"matrix":[1,0,0,-1]}]"#).unwrap();
        let b: QuestionListDoc =
            serde_json::from_str(r#"{"questions":[{"matrix":[1,0,0,-1]}]}"#).unwrap();
        assert_eq!(a.into_vec().len(), 1);
        assert_eq!(b.into_vec().len(), 1);
    }

    #[test]
    fn csv_round_trip() {
        let t = correlation_table(&initial_strategy(3).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_correlations_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,j,y,k,re,im\n"));
        let back = read_correlations_csv(&text).unwrap();
        assert_eq!(back.len(), t.len());
        assert!(back.max_abs_diff(&t) < 1e-15);
        assert!(read_correlations_csv("a,b\n").is_err());
    }
}
