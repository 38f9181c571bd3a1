//! JSON schema v1 for functionals and behaviors:
//!
//! ```json
//! {"scenario": {"inputs": 2, "outputs": 2, "bottom": false},
//!  "tensor": [ ... N·N·K'·K' numbers, row-major [x][y][a][b] ... ],
//!  "kind": "functional"}
//! ```

use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::tensor::{BellFunctional, Behavior, Provenance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorKind {
    Functional,
    Behavior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub scenario: Scenario,
    pub tensor: Vec<f64>,
    pub kind: TensorKind,
}

impl TensorFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: TensorFile = serde_json::from_str(text)?;
        let s = Scenario::new(file.scenario.inputs, file.scenario.outputs, file.scenario.bottom)?;
        if file.tensor.len() != s.tensor_len() {
            return Err(Error::Shape(format!(
                "field `tensor`: {} entries, expected N·N·K'·K' = {}",
                file.tensor.len(),
                s.tensor_len()
            )));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tensor files always serialize")
    }

    pub fn into_functional(self) -> Result<BellFunctional> {
        if self.kind != TensorKind::Functional {
            return Err(Error::Invalid("field `kind`: expected \"functional\"".into()));
        }
        BellFunctional::new(self.scenario, self.tensor)
    }

    pub fn into_behavior(self) -> Result<Behavior> {
        if self.kind != TensorKind::Behavior {
            return Err(Error::Invalid("field `kind`: expected \"behavior\"".into()));
        }
        Behavior::new(self.scenario, self.tensor, Provenance::NonsignallingRaw)
    }
}

impl From<&BellFunctional> for TensorFile {
    fn from(m: &BellFunctional) -> Self {
        Self {
            scenario: *m.scenario(),
            tensor: m.as_slice().to_vec(),
            kind: TensorKind::Functional,
        }
    }
}

impl From<&Behavior> for TensorFile {
    fn from(p: &Behavior) -> Self {
        Self {
            scenario: *p.scenario(),
            tensor: p.as_slice().to_vec(),
            kind: TensorKind::Behavior,
        }
    }
}
