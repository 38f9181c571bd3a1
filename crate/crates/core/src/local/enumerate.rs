use crate::error::{Error, Result};
use crate::model::{Scenario, SignedStrategy};

/// Lexicographic enumeration of one party's deterministic strategies: each
/// input gets an output in `0..K'` and, for signed strategies, a sign with
/// `−1` ordered before `+1`. Unsigned strategies carry sign `+1`.
#[derive(Debug, Clone)]
pub struct Strategies {
    outputs: usize,
    signed: bool,
    digits: Vec<usize>,
    done: bool,
}

impl Strategies {
    fn radix(&self) -> usize {
        self.outputs * if self.signed { 2 } else { 1 }
    }
}

impl Iterator for Strategies {
    type Item = SignedStrategy;

    fn next(&mut self) -> Option<SignedStrategy> {
        if self.done {
            return None;
        }
        let choices = self
            .digits
            .iter()
            .map(|&d| {
                if self.signed {
                    (d / 2, if d % 2 == 0 { -1 } else { 1 })
                } else {
                    (d, 1)
                }
            })
            .collect();
        let radix = self.radix();
        // Increment with the last input least significant.
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < radix {
                break;
            }
            self.digits[i] = 0;
        }
        Some(SignedStrategy { choices })
    }
}

/// Number of strategies `(K'·(1 + signed))^N`, saturating.
pub fn strategy_count(scenario: &Scenario, signed: bool) -> u128 {
    let radix = (scenario.effective_outputs() * if signed { 2 } else { 1 }) as u128;
    (0..scenario.inputs).fold(1u128, |acc, _| acc.saturating_mul(radix))
}

pub fn enumerate_deterministic(scenario: &Scenario, signed: bool, budget: u64) -> Result<Strategies> {
    let count = strategy_count(scenario, signed);
    if count > u128::from(budget) {
        return Err(Error::budget(
            "deterministic strategy enumeration",
            count as f64,
            budget as f64,
        ));
    }
    Ok(Strategies {
        outputs: scenario.effective_outputs(),
        signed,
        digits: vec![0; scenario.inputs],
        done: false,
    })
}
