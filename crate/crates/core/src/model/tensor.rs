use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Where a behavior came from; decides which validity checks apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Quantum,
    Local,
    NonsignallingRaw,
}

/// Conditional probability table `P(a, b | x, y)`, stored dense and row-major
/// in `[x][y][a][b]` order.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    p: Vec<f64>,
    pub provenance: Provenance,
}

/// Coefficients `M_{x,y}^{a,b}` of a linear functional on behaviors.
#[derive(Debug, Clone, PartialEq)]
pub struct BellFunctional {
    scenario: Scenario,
    m: Vec<f64>,
}

fn check_len(scenario: &Scenario, len: usize) -> Result<()> {
    if len != scenario.tensor_len() {
        return Err(Error::Shape(format!(
            "tensor has {len} entries, scenario (N={}, K'={}) needs {}",
            scenario.inputs,
            scenario.effective_outputs(),
            scenario.tensor_len()
        )));
    }
    Ok(())
}

impl Behavior {
    pub fn new(scenario: Scenario, p: Vec<f64>, provenance: Provenance) -> Result<Self> {
        check_len(&scenario, p.len())?;
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("behavior has non-finite entries".into()));
        }
        Ok(Self {
            scenario,
            p,
            provenance,
        })
    }

    pub fn from_fn(
        scenario: Scenario,
        provenance: Provenance,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let k = scenario.effective_outputs();
        let mut p = Vec::with_capacity(scenario.tensor_len());
        for x in 0..scenario.inputs {
            for y in 0..scenario.inputs {
                for a in 0..k {
                    for b in 0..k {
                        p.push(f(x, y, a, b));
                    }
                }
            }
        }
        Self {
            scenario,
            p,
            provenance,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[self.scenario.index(x, y, a, b)]
    }

    /// `P(a | x)` as seen from the `(x, y)` block.
    pub fn alice_marginal(&self, x: usize, y: usize, a: usize) -> f64 {
        let k = self.scenario.effective_outputs();
        (0..k).map(|b| self.get(x, y, a, b)).sum()
    }

    /// `P(b | y)` as seen from the `(x, y)` block.
    pub fn bob_marginal(&self, x: usize, y: usize, b: usize) -> f64 {
        let k = self.scenario.effective_outputs();
        (0..k).map(|a| self.get(x, y, a, b)).sum()
    }

    /// The same probabilities on the padded scenario, with zero mass on the new `⊥`.
    pub fn embed(&self) -> Behavior {
        Behavior {
            scenario: self.scenario.padded(),
            p: pad_tensor(&self.scenario, &self.p),
            provenance: self.provenance,
        }
    }

    /// `Σ_i w_i P_i` over behaviors on a common scenario.
    pub fn combination(
        terms: &[(f64, &Behavior)],
        provenance: Provenance,
    ) -> Result<Behavior> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Invalid("empty combination".into()))?
            .1;
        let mut p = vec![0.0; first.p.len()];
        for (w, b) in terms {
            if b.scenario != first.scenario {
                return Err(Error::Shape("combination of behaviors on different scenarios".into()));
            }
            for (acc, v) in p.iter_mut().zip(&b.p) {
                *acc += w * v;
            }
        }
        Behavior::new(first.scenario, p, provenance)
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

impl BellFunctional {
    pub fn new(scenario: Scenario, m: Vec<f64>) -> Result<Self> {
        check_len(&scenario, m.len())?;
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("functional has non-finite coefficients".into()));
        }
        Ok(Self { scenario, m })
    }

    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let b = Behavior::from_fn(scenario, Provenance::NonsignallingRaw, &mut f);
        Self {
            scenario,
            m: b.p,
        }
    }

    pub fn zeros(scenario: Scenario) -> Self {
        Self {
            scenario,
            m: vec![0.0; scenario.tensor_len()],
        }
    }

    /// `M = (−1)^{a + b + xy}`.
    pub fn chsh() -> Self {
        Self::from_fn(Scenario::chsh(), |x, y, a, b| {
            if (a + b + x * y) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.m
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.m[self.scenario.index(x, y, a, b)]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            scenario: self.scenario,
            m: self.m.iter().map(|v| v * c).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Swaps the roles of Alice and Bob: `M'_{x,y}^{a,b} = M_{y,x}^{b,a}`.
    pub fn swapped(&self) -> Self {
        Self::from_fn(self.scenario, |x, y, a, b| self.get(y, x, b, a))
    }

    /// Linear combination `c₁ M₁ + c₂ M₂`.
    pub fn combine(c1: f64, m1: &Self, c2: f64, m2: &Self) -> Result<Self> {
        if m1.scenario != m2.scenario {
            return Err(Error::Shape("functionals on different scenarios".into()));
        }
        let m = m1.m.iter().zip(&m2.m).map(|(a, b)| c1 * a + c2 * b).collect();
        Self::new(m1.scenario, m)
    }

    /// True when `M_{x,y}^{a,b}` vanishes for every `y, b`: Alice's outcome `a`
    /// on input `x` never contributes.
    pub fn alice_output_is_null(&self, x: usize, a: usize) -> bool {
        let k = self.scenario.effective_outputs();
        (0..self.scenario.inputs).all(|y| (0..k).all(|b| self.get(x, y, a, b) == 0.0))
    }

    pub fn bob_output_is_null(&self, y: usize, b: usize) -> bool {
        let k = self.scenario.effective_outputs();
        (0..self.scenario.inputs).all(|x| (0..k).all(|a| self.get(x, y, a, b) == 0.0))
    }
}

fn pad_tensor(scenario: &Scenario, data: &[f64]) -> Vec<f64> {
    let padded = scenario.padded();
    let k = scenario.effective_outputs();
    let mut out = vec![0.0; padded.tensor_len()];
    for x in 0..scenario.inputs {
        for y in 0..scenario.inputs {
            for a in 0..k {
                for b in 0..k {
                    out[padded.index(x, y, a, b)] = data[scenario.index(x, y, a, b)];
                }
            }
        }
    }
    out
}

/// `⟨M, P⟩ = Σ M_{x,y}^{a,b} P(a, b | x, y)`.
pub fn pair(m: &BellFunctional, p: &Behavior) -> Result<f64> {
    if m.scenario != p.scenario {
        return Err(Error::Shape(format!(
            "pairing a functional on {:?} with a behavior on {:?}",
            m.scenario, p.scenario
        )));
    }
    Ok(m.m.iter().zip(&p.p).map(|(a, b)| a * b).sum())
}

/// Extends `M` by one output `⊥` whose coefficients all vanish.
pub fn pad_functional(m: &BellFunctional) -> BellFunctional {
    BellFunctional {
        scenario: m.scenario.padded(),
        m: pad_tensor(&m.scenario, &m.m),
    }
}

/// Detector inefficiency `η`: each party independently reports `⊥` with
/// probability `1 − η`, i.e. `η² P + η(1−η) P(a|x) δ_{b,⊥} + η(1−η) δ_{a,⊥} P(b|y)
/// + (1−η)² δ_{a,⊥} δ_{b,⊥}` on the padded scenario.
pub fn mix_detector_noise(p: &Behavior, eta: f64) -> Result<Behavior> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Invalid(format!("detector efficiency {eta} outside [0, 1]")));
    }
    let s = p.scenario;
    let padded = s.padded();
    let bot = padded.effective_outputs() - 1;
    let k = s.effective_outputs();
    let both = eta * eta;
    let one = eta * (1.0 - eta);
    let none = (1.0 - eta) * (1.0 - eta);
    let mut out = vec![0.0; padded.tensor_len()];
    for x in 0..s.inputs {
        for y in 0..s.inputs {
            for a in 0..k {
                for b in 0..k {
                    out[padded.index(x, y, a, b)] = both * p.get(x, y, a, b);
                }
                out[padded.index(x, y, a, bot)] = one * p.alice_marginal(x, y, a);
            }
            for b in 0..k {
                out[padded.index(x, y, bot, b)] = one * p.bob_marginal(x, y, b);
            }
            out[padded.index(x, y, bot, bot)] = none;
        }
    }
    Behavior::new(padded, out, p.provenance)
}

/// Residuals of the three validity conditions; never fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// `max(0, −min P)`.
    pub nonneg: f64,
    /// `max_{x,y} |Σ_{a,b} P − 1|`.
    pub normalized: f64,
    /// Largest variation of a marginal across the other party's input.
    pub nonsignalling: f64,
}

impl ValidationReport {
    pub fn passes(&self, tol: &Tolerances) -> bool {
        self.nonneg <= tol.nonneg && self.normalized <= tol.norm && self.nonsignalling <= tol.ns
    }
}

pub fn validate(p: &Behavior) -> ValidationReport {
    let s = p.scenario;
    let k = s.effective_outputs();
    let n = s.inputs;
    let nonneg = p.p.iter().fold(0.0f64, |acc, &v| acc.max(-v));
    let mut normalized = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            let total: f64 = (0..k).map(|a| p.alice_marginal(x, y, a)).sum();
            normalized = normalized.max((total - 1.0).abs());
        }
    }
    let mut nonsignalling = 0.0f64;
    for x in 0..n {
        for a in 0..k {
            let vals: Vec<f64> = (0..n).map(|y| p.alice_marginal(x, y, a)).collect();
            nonsignalling = nonsignalling.max(spread(&vals));
        }
    }
    for y in 0..n {
        for b in 0..k {
            let vals: Vec<f64> = (0..n).map(|x| p.bob_marginal(x, y, b)).collect();
            nonsignalling = nonsignalling.max(spread(&vals));
        }
    }
    ValidationReport {
        nonneg,
        normalized,
        nonsignalling,
    }
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let min = v.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    max - min
}

/// Quantum behavior reaching the Tsirelson value of CHSH:
/// `P(a, b | x, y) = (1 + (−1)^{a+b+xy}/√2) / 4`.
pub fn chsh_tsirelson_behavior() -> Behavior {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    Behavior::from_fn(Scenario::chsh(), Provenance::Quantum, |x, y, a, b| {
        let sign = if (a + b + x * y) % 2 == 0 { 1.0 } else { -1.0 };
        0.25 * (1.0 + sign * c)
    })
}

/// Popescu–Rohrlich box: `a ⊕ b = xy` with uniform marginals.
pub fn pr_box() -> Behavior {
    Behavior::from_fn(Scenario::chsh(), Provenance::NonsignallingRaw, |x, y, a, b| {
        if (a ^ b) == (x & y) {
            0.5
        } else {
            0.0
        }
    })
}

/// Uniform distribution over all outputs.
pub fn uniform_behavior(scenario: Scenario) -> Behavior {
    let k = scenario.effective_outputs() as f64;
    Behavior::from_fn(scenario, Provenance::Local, |_, _, _, _| 1.0 / (k * k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term_pairing() {
        let s = Scenario::new(1, 2, false).unwrap();
        let m = BellFunctional::from_fn(s, |_, _, a, b| if a == 0 && b == 0 { 1.0 } else { 0.0 });
        let p = Behavior::from_fn(s, Provenance::Local, |_, _, a, b| if a == b { 0.5 } else { 0.0 });
        assert_eq!(pair(&m, &p).unwrap(), 0.5);
        assert_eq!(pair(&BellFunctional::zeros(s), &p).unwrap(), 0.0);
    }

    #[test]
    fn pairing_rejects_shape_mismatch() {
        let m = BellFunctional::chsh();
        let p = uniform_behavior(Scenario::new(2, 3, false).unwrap());
        assert!(matches!(pair(&m, &p), Err(Error::Shape(_))));
        assert!(BellFunctional::new(Scenario::chsh(), vec![0.0; 15]).is_err());
    }

    #[test]
    fn padding_zeroes_bottom_slices() {
        let m = BellFunctional::chsh();
        let padded = pad_functional(&m);
        let s = *padded.scenario();
        assert_eq!((s.outputs, s.bottom), (2, true));
        for x in 0..2 {
            for y in 0..2 {
                for o in 0..3 {
                    assert_eq!(padded.get(x, y, 2, o), 0.0);
                    assert_eq!(padded.get(x, y, o, 2), 0.0);
                }
            }
        }
        let twice = pad_functional(&padded);
        assert_eq!(twice.scenario().effective_outputs(), 4);
        let p = chsh_tsirelson_behavior();
        let v = pair(&m, &p).unwrap();
        assert_eq!(pair(&padded, &p.embed()).unwrap(), v);
        assert_eq!(pair(&twice, &p.embed().embed()).unwrap(), v);
        let zero = pad_functional(&BellFunctional::zeros(Scenario::chsh()));
        assert!(zero.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn detector_noise_extremes() {
        let p = chsh_tsirelson_behavior();
        let full = mix_detector_noise(&p, 1.0).unwrap();
        assert_eq!(full, p.embed());
        let dead = mix_detector_noise(&p, 0.0).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..3 {
                    for b in 0..3 {
                        let expected = if a == 2 && b == 2 { 1.0 } else { 0.0 };
                        assert_eq!(dead.get(x, y, a, b), expected);
                    }
                }
            }
        }
        assert!(mix_detector_noise(&p, 1.5).is_err());
        assert!(mix_detector_noise(&p, -0.1).is_err());
    }

    #[test]
    fn detector_noise_matches_direct_formula() {
        let p = uniform_behavior(Scenario::chsh());
        let eta = 0.5;
        let noisy = mix_detector_noise(&p, eta).unwrap();
        // Every regular pair: η²/4; single ⊥: η(1−η)/2; double ⊥: (1−η)².
        for x in 0..2 {
            for y in 0..2 {
                let mut total = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        let v = noisy.get(x, y, a, b);
                        let expected = match (a == 2, b == 2) {
                            (false, false) => 0.0625,
                            (true, true) => 0.25,
                            _ => 0.125,
                        };
                        assert!((v - expected).abs() < 1e-15);
                        total += v;
                    }
                }
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn validation_catches_signalling() {
        let good = chsh_tsirelson_behavior().validate();
        assert!(good.passes(&Tolerances::default()));
        // Alice's marginal depends on Bob's input.
        let bad = Behavior::from_fn(Scenario::chsh(), Provenance::NonsignallingRaw, |_, y, a, b| {
            if a == y && b == 0 {
                1.0
            } else {
                0.0
            }
        });
        let r = bad.validate();
        assert_eq!(r.nonneg, 0.0);
        assert_eq!(r.normalized, 0.0);
        assert_eq!(r.nonsignalling, 1.0);
    }

    #[test]
    fn pr_box_is_nonsignalling() {
        let r = pr_box().validate();
        assert_eq!((r.nonneg, r.normalized, r.nonsignalling), (0.0, 0.0, 0.0));
    }
}
