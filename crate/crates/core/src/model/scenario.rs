use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric bipartite scenario: both parties have `inputs` settings and
/// `outputs` regular outcomes, plus an optional "no detection" outcome `⊥`
/// stored as the last output index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub inputs: usize,
    pub outputs: usize,
    pub bottom: bool,
}

impl Scenario {
    pub fn new(inputs: usize, outputs: usize, bottom: bool) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(Error::Invalid(format!(
                "scenario needs at least one input and one output, got N={inputs}, K={outputs}"
            )));
        }
        Ok(Self {
            inputs,
            outputs,
            bottom,
        })
    }

    /// Two inputs, two outputs, no `⊥`.
    pub fn chsh() -> Self {
        Self {
            inputs: 2,
            outputs: 2,
            bottom: false,
        }
    }

    /// Output count including `⊥`.
    pub fn effective_outputs(&self) -> usize {
        self.outputs + usize::from(self.bottom)
    }

    /// Index of `⊥`, if present.
    pub fn bottom_index(&self) -> Option<usize> {
        self.bottom.then_some(self.outputs)
    }

    /// Number of entries of a `[x][y][a][b]` tensor on this scenario.
    pub fn tensor_len(&self) -> usize {
        let k = self.effective_outputs();
        self.inputs * self.inputs * k * k
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        let k = self.effective_outputs();
        ((x * self.inputs + y) * k + a) * k + b
    }

    /// The scenario with one more output appended as the new `⊥`; a previous
    /// `⊥` becomes an ordinary output.
    pub fn padded(&self) -> Self {
        Self {
            inputs: self.inputs,
            outputs: self.effective_outputs(),
            bottom: true,
        }
    }
}
