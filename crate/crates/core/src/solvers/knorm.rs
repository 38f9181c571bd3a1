//! K- and J-norms of the couple `(ℓ∞, ℓ2, ℓ1)` at scalar level.
//!
//! `K(x; t) = inf { ‖x₁‖∞ + √t‖x₂‖₂ + t‖x₃‖₁ : x = x₁ + x₂ + x₃ }` and
//! `J(a; s) = max(‖a‖₁, √s‖a‖₂, s‖a‖∞)` are dual to each other with `s = 1/t`:
//! the unit ball of `K(·; t)*` is `{‖a‖₁ ≤ 1, ‖a‖₂ ≤ √t, ‖a‖∞ ≤ t}`.
//!
//! [`k_norm`] maximizes `⟨|x|, a⟩` over that ball. Lagrangian relaxation of the
//! `ℓ1` constraint (multiplier `λ`) and of the `ℓ2` constraint (multiplier `μ`)
//! gives the water-filling form `a_i = min(t, (|x_i| − λ)⁺ / μ)`; both
//! multipliers are found by bisection. The same multipliers define an explicit
//! splitting `x₁ = clip(x, λ)`, `x₂ = clip(x − x₁, μt)`, `x₃ = rest`, whose cost
//! is the primal value.

use crate::error::{Error, Result};

use super::linalg::norm2;

#[derive(Debug, Clone)]
pub struct KNorm {
    /// Dual (lower) value `⟨x, a⟩`.
    pub value: f64,
    /// Cost of the explicit splitting (upper value).
    pub primal: f64,
    /// Maximizer `a` of `⟨x, a⟩` over the dual ball.
    pub dual_vector: Vec<f64>,
    /// The splitting `(x₁, x₂, x₃)` with `x = x₁ + x₂ + x₃`.
    pub split: [Vec<f64>; 3],
}

/// Maximum primal/dual disagreement tolerated before [`k_norm`] reports a
/// numerical failure.
pub const K_NORM_GAP: f64 = 1e-6;

const BISECTIONS: usize = 200;

pub fn k_norm(x: &[f64], t: f64) -> Result<KNorm> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Invalid(format!("K-norm parameter t = {t} must be positive")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("K-norm of a non-finite vector".into()));
    }
    let c: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let cmax = c.iter().fold(0.0f64, |a, &b| a.max(b));
    let m = x.len();
    if cmax == 0.0 {
        return Ok(KNorm {
            value: 0.0,
            primal: 0.0,
            dual_vector: vec![0.0; m],
            split: [vec![0.0; m], vec![0.0; m], vec![0.0; m]],
        });
    }

    let (lambda_lo, lambda_hi) = {
        let (a0, _) = water_fill(&c, 0.0, t);
        if a0.iter().sum::<f64>() <= 1.0 {
            (0.0, 0.0)
        } else {
            let (mut lo, mut hi) = (0.0, cmax);
            for _ in 0..BISECTIONS {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let (a, _) = water_fill(&c, mid, t);
                if a.iter().sum::<f64>() > 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo, hi)
        }
    };

    // The mass Σa can jump across 1 at the final multiplier; blend the two
    // one-sided maximizers so the ℓ1 constraint is met with equality.
    let (a_hi, mu_hi) = water_fill(&c, lambda_hi, t);
    let g_hi: f64 = a_hi.iter().sum();
    let mut a = a_hi.clone();
    let mut mus = vec![(lambda_hi, mu_hi)];
    if lambda_hi > 0.0 {
        let (a_lo, mu_lo) = water_fill(&c, lambda_lo, t);
        let g_lo: f64 = a_lo.iter().sum();
        if g_lo > g_hi {
            let theta = ((1.0 - g_hi) / (g_lo - g_hi)).clamp(0.0, 1.0);
            for (ai, (l, h)) in a.iter_mut().zip(a_lo.iter().zip(&a_hi)) {
                *ai = theta * l + (1.0 - theta) * h;
            }
        }
        mus.push((lambda_lo, mu_lo));
    }
    let value: f64 = c.iter().zip(&a).map(|(ci, ai)| ci * ai).sum();

    let mut best: Option<(f64, [Vec<f64>; 3])> = None;
    for (lambda, mu) in mus {
        let (cost, split) = splitting(&c, lambda, mu * t, t);
        if best.as_ref().map_or(true, |(b, _)| cost < *b) {
            best = Some((cost, split));
        }
    }
    let (primal, mut split) = best.expect("at least one splitting");
    if primal - value > K_NORM_GAP * primal.max(1.0) || value - primal > K_NORM_GAP * primal.max(1.0) {
        return Err(Error::Numerical(format!(
            "K-norm primal {primal} and dual {value} disagree"
        )));
    }
    // Restore signs.
    for (i, xi) in x.iter().enumerate() {
        if *xi < 0.0 {
            a[i] = -a[i];
            for part in split.iter_mut() {
                part[i] = -part[i];
            }
        }
    }
    Ok(KNorm {
        value,
        primal,
        dual_vector: a,
        split,
    })
}

/// Maximizer of `⟨(c − λ)⁺, a⟩` over `{‖a‖₂ ≤ √t, 0 ≤ a ≤ t}` together with
/// the `ℓ2` multiplier `μ` (zero when the box corner already fits the ball).
fn water_fill(c: &[f64], lambda: f64, t: f64) -> (Vec<f64>, f64) {
    let r: Vec<f64> = c.iter().map(|ci| (ci - lambda).max(0.0)).collect();
    let positive = r.iter().filter(|&&v| v > 0.0).count();
    if positive as f64 * t <= 1.0 {
        let a = r.iter().map(|&v| if v > 0.0 { t } else { 0.0 }).collect();
        return (a, 0.0);
    }
    let radius = t.sqrt();
    let fill = |mu: f64| -> Vec<f64> { r.iter().map(|&v| (v / mu).min(t)).collect() };
    let mut hi = norm2(&r) / radius;
    let mut lo = hi;
    while norm2(&fill(lo)) <= radius && lo > 1e-300 {
        lo *= 0.5;
    }
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm2(&fill(mid)) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (fill(hi), hi)
}

fn splitting(c: &[f64], lambda: f64, tau: f64, t: f64) -> (f64, [Vec<f64>; 3]) {
    let x1: Vec<f64> = c.iter().map(|&ci| ci.min(lambda)).collect();
    let rest: Vec<f64> = c.iter().map(|&ci| (ci - lambda).max(0.0)).collect();
    let x2: Vec<f64> = rest.iter().map(|&r| r.min(tau)).collect();
    let x3: Vec<f64> = rest.iter().map(|&r| (r - tau).max(0.0)).collect();
    let cost = split_cost(&x1, &x2, &x3, t);
    (cost, [x1, x2, x3])
}

/// `‖x₁‖∞ + √t‖x₂‖₂ + t‖x₃‖₁`.
pub fn split_cost(x1: &[f64], x2: &[f64], x3: &[f64], t: f64) -> f64 {
    let inf = x1.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let one: f64 = x3.iter().map(|v| v.abs()).sum();
    inf + t.sqrt() * norm2(x2) + t * one
}

/// `max(‖a‖₁, √s‖a‖₂, s‖a‖∞)`.
pub fn j_norm(a: &[f64], s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Invalid(format!("J-norm parameter s = {s} must be positive")));
    }
    let one: f64 = a.iter().map(|v| v.abs()).sum();
    let inf = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(one.max(s.sqrt() * norm2(a)).max(s * inf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::rng::{GaussianSampler, RngStream};

    #[test]
    fn scalar_unit() {
        let k = k_norm(&[1.0], 1.0).unwrap();
        assert!((k.value - 1.0).abs() < 1e-12);
        assert!((k.primal - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_splittings_bound_the_norm() {
        let mut g = GaussianSampler::new(RngStream::new(2, 0));
        for &t in &[0.05, 0.3, 1.0, 4.0] {
            for m in 1..6 {
                let x = g.vector(m);
                let k = k_norm(&x, t).unwrap().value;
                let inf = x.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                let one: f64 = x.iter().map(|v| v.abs()).sum();
                let pure = inf.min(t.sqrt() * norm2(&x)).min(t * one);
                assert!(k <= pure + 1e-12, "{k} > {pure}");
            }
        }
    }

    #[test]
    fn split_reconstructs_and_dual_is_feasible() {
        let mut g = GaussianSampler::new(RngStream::new(3, 0));
        for &t in &[0.1, 0.5, 1.0] {
            for _ in 0..50 {
                let x = g.vector(4);
                let k = k_norm(&x, t).unwrap();
                for i in 0..4 {
                    let s = k.split[0][i] + k.split[1][i] + k.split[2][i];
                    assert!((s - x[i]).abs() < 1e-12);
                }
                assert!(j_norm(&k.dual_vector, 1.0 / t).unwrap() <= 1.0 + 1e-12);
                assert!((k.primal - k.value).abs() <= 1e-9 * k.value.max(1.0));
            }
        }
    }

    #[test]
    fn jump_in_l1_mass_is_blended() {
        // Equal coordinates: the optimal dual spreads 1/3 on each.
        let k = k_norm(&[1.0, 1.0, 1.0], 0.4).unwrap();
        assert!((k.value - 1.0).abs() < 1e-9, "{}", k.value);
    }

    #[test]
    fn j_norm_formula() {
        assert_eq!(j_norm(&[1.0, 1.0], 1.0).unwrap(), 2.0);
        assert_eq!(j_norm(&[1.0, 0.0], 4.0).unwrap(), 4.0);
        assert!(j_norm(&[1.0], 0.0).is_err());
        assert!(k_norm(&[1.0], -1.0).is_err());
    }

    #[test]
    fn holder_pairing() {
        let mut g = GaussianSampler::new(RngStream::new(4, 0));
        for i in 0..100 {
            let t = [0.1, 0.5, 1.0, 3.0][i % 4];
            let x = g.vector(3);
            let a = g.vector(3);
            let pair: f64 = x.iter().zip(&a).map(|(p, q)| p * q).sum();
            let bound = k_norm(&x, t).unwrap().value * j_norm(&a, 1.0 / t).unwrap();
            assert!(pair.abs() <= bound * (1.0 + 1e-12) + 1e-15);
        }
    }
}
