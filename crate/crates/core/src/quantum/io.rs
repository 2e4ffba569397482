//! JSON encodings of operators, measurement sets, assemblages and bipartite states.
//!
//! Matrices are `{"dim": d, "re": [[...]], "im": [[...]]}` with row-major `d x d`
//! arrays. Every float is written with 17 significant digits.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::quantum::assemblage::{Assemblage, BipartiteState};
use crate::quantum::hermitian::{HermitianOperator, C64};
use crate::quantum::measurement::MeasurementSet;

/// A float serialized with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F17(pub f64);

pub fn format_f17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom(format!("non-finite float {}", self.0)));
        }
        let raw = RawValue::from_string(format_f17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(F17)
    }
}

/// Optional finite float written with 17 significant digits, `null` otherwise.
pub fn opt_f17(x: Option<f64>) -> Option<F17> {
    x.filter(|v| v.is_finite()).map(F17)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<F17>>,
    pub im: Vec<Vec<F17>>,
}

impl MatrixJson {
    pub fn from_operator(op: &HermitianOperator) -> Self {
        let d = op.dim();
        let m = op.matrix();
        let re = (0..d).map(|i| (0..d).map(|j| F17(m[(i, j)].re)).collect()).collect();
        let im = (0..d).map(|i| (0..d).map(|j| F17(m[(i, j)].im)).collect()).collect();
        Self { dim: d, re, im }
    }

    pub fn to_operator(&self) -> Result<HermitianOperator> {
        let d = self.dim;
        let rows_ok = |a: &Vec<Vec<F17>>| a.len() == d && a.iter().all(|r| r.len() == d);
        if !rows_ok(&self.re) || !rows_ok(&self.im) {
            return Err(Error::Format(format!("matrix arrays are not {d}x{d}")));
        }
        let mut m = DMatrix::<C64>::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = C64::new(self.re[i][j].0, self.im[i][j].0);
            }
        }
        HermitianOperator::new(m)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasurementFile {
    pub d: usize,
    pub k: usize,
    pub m: usize,
    pub elements: Vec<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssemblageFile {
    pub d: usize,
    pub k: usize,
    pub m: usize,
    pub elements: Vec<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub d_a: usize,
    pub d_b: usize,
    pub matrix: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

fn encode_family(family: &[Vec<HermitianOperator>]) -> Vec<Vec<MatrixJson>> {
    family.iter().map(|row| row.iter().map(MatrixJson::from_operator).collect()).collect()
}

fn decode_family(d: usize, k: usize, m: usize, rows: &[Vec<MatrixJson>]) -> Result<Vec<Vec<HermitianOperator>>> {
    if rows.len() != m {
        return Err(Error::Format(format!("expected {m} settings, found {}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(x, row)| {
            if row.len() != k {
                return Err(Error::Format(format!("setting {x}: expected {k} outcomes, found {}", row.len())));
            }
            row.iter()
                .map(|mj| {
                    if mj.dim != d {
                        return Err(Error::Format(format!("setting {x}: matrix of dimension {}, expected {d}", mj.dim)));
                    }
                    mj.to_operator()
                })
                .collect()
        })
        .collect()
}

impl MeasurementFile {
    pub fn from_set(set: &MeasurementSet, metadata: Option<serde_json::Value>) -> Self {
        Self {
            d: set.dim(),
            k: set.outcomes(),
            m: set.count(),
            elements: encode_family(set.elements()),
            metadata,
        }
    }

    /// Decoded elements without POVM validation.
    pub fn operators(&self) -> Result<Vec<Vec<HermitianOperator>>> {
        decode_family(self.d, self.k, self.m, &self.elements)
    }

    pub fn to_set(&self) -> Result<MeasurementSet> {
        MeasurementSet::new(self.operators()?)
    }
}

impl AssemblageFile {
    pub fn from_assemblage(a: &Assemblage, metadata: Option<serde_json::Value>) -> Self {
        Self {
            d: a.dim(),
            k: a.outcomes(),
            m: a.settings(),
            elements: encode_family(a.elements()),
            reduced: Some(MatrixJson::from_operator(a.reduced())),
            metadata,
        }
    }

    pub fn operators(&self) -> Result<Vec<Vec<HermitianOperator>>> {
        decode_family(self.d, self.k, self.m, &self.elements)
    }

    pub fn to_assemblage(&self) -> Result<Assemblage> {
        Assemblage::new(self.operators()?)
    }
}

impl StateFile {
    pub fn from_state(s: &BipartiteState, metadata: Option<serde_json::Value>) -> Self {
        Self { d_a: s.dim_a(), d_b: s.dim_b(), matrix: MatrixJson::from_operator(s.matrix()), metadata }
    }

    pub fn to_state(&self) -> Result<BipartiteState> {
        BipartiteState::new(self.d_a, self.d_b, self.matrix.to_operator()?)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}
