//! Platt scaling: a two-parameter sigmoid fitted over raw classifier margins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `p(s) = 1 / (1 + exp(a*s + b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattScaler {
    pub a: f64,
    pub b: f64,
}

impl PlattScaler {
    /// The plain logistic link `sigmoid(s)`.
    pub const IDENTITY: PlattScaler = PlattScaler { a: -1.0, b: 0.0 };

    pub fn apply(&self, margin: f64) -> f64 {
        platt_apply(self, margin)
    }
}

pub fn platt_apply(scaler: &PlattScaler, margin: f64) -> f64 {
    let z = scaler.a * margin + scaler.b;
    // 1/(1+e^z) computed without overflow
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

/// Fits `(a, b)` by Newton's method with backtracking on the cross-entropy
/// against Platt's smoothed targets `(N+ + 1)/(N+ + 2)` and `1/(N- + 2)`.
///
/// Follows the numerically careful formulation of Lin, Lin and Weng; stops
/// once the gradient norm drops below 1e-10.
pub fn platt_fit(margins: &[f64], labels: &[bool]) -> Result<PlattScaler> {
    if margins.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: margins.len(),
            got: labels.len(),
        });
    }
    if margins.iter().any(|m| !m.is_finite()) {
        return Err(Error::InvalidInput("non-finite margin".into()));
    }
    let prior1 = labels.iter().filter(|&&y| y).count() as f64;
    let prior0 = labels.len() as f64 - prior1;
    if prior1 == 0.0 || prior0 == 0.0 {
        return Err(Error::SingleClass);
    }
    let hi = (prior1 + 1.0) / (prior1 + 2.0);
    let lo = 1.0 / (prior0 + 2.0);
    let t: Vec<f64> = labels.iter().map(|&y| if y { hi } else { lo }).collect();

    if margins.iter().all(|&m| m == margins[0]) {
        // no information in the margins: the slope is unidentifiable, so
        // return the smoothed base rate everywhere
        let target = t.iter().sum::<f64>() / t.len() as f64;
        return Ok(PlattScaler {
            a: 0.0,
            b: ((1.0 - target) / target).ln(),
        });
    }

    const MAX_ITER: usize = 100;
    const MIN_STEP: f64 = 1e-10;
    const SIGMA: f64 = 1e-12;
    const EPS: f64 = 1e-10;

    let objective = |a: f64, b: f64| -> f64 {
        margins
            .iter()
            .zip(&t)
            .map(|(&s, &ti)| {
                let f = s * a + b;
                if f >= 0.0 {
                    ti * f + (-f).exp().ln_1p()
                } else {
                    (ti - 1.0) * f + f.exp().ln_1p()
                }
            })
            .sum()
    };

    let mut a = 0.0;
    let mut b = ((prior0 + 1.0) / (prior1 + 1.0)).ln();
    let mut fval = objective(a, b);
    for _ in 0..MAX_ITER {
        let (mut h11, mut h22, mut h21, mut g1, mut g2) = (SIGMA, SIGMA, 0.0, 0.0, 0.0);
        for (&s, &ti) in margins.iter().zip(&t) {
            let f = s * a + b;
            let (p, q) = if f >= 0.0 {
                let e = (-f).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = f.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += s * s * d2;
            h22 += d2;
            h21 += s * d2;
            let d1 = ti - p;
            g1 += s * d1;
            g2 += d1;
        }
        if g1.abs() < EPS && g2.abs() < EPS {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;
        let mut step = 1.0;
        while step >= MIN_STEP {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = objective(na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if step < MIN_STEP {
            break;
        }
    }
    Ok(PlattScaler { a, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::{rng, sigmoid};
    use rand::Rng;

    fn log_loss(p: &[f64], y: &[bool]) -> f64 {
        p.iter()
            .zip(y)
            .map(|(&p, &y)| {
                let p = p.clamp(1e-15, 1.0 - 1e-15);
                -(if y { p.ln() } else { (1.0 - p).ln() })
            })
            .sum::<f64>()
            / p.len() as f64
    }

    #[test]
    fn true_logits_give_near_identity() {
        let mut r = rng(4);
        let margins: Vec<f64> = (0..20_000).map(|_| r.random_range(-4.0..4.0)).collect();
        let labels: Vec<bool> = margins.iter().map(|&s| r.random_bool(sigmoid(s))).collect();
        let scaler = platt_fit(&margins, &labels).unwrap();
        assert!((scaler.a + 1.0).abs() < 0.05, "{scaler:?}");
        assert!(scaler.b.abs() < 0.05);
        let raw: Vec<f64> = margins.iter().map(|&s| sigmoid(s)).collect();
        let fitted: Vec<f64> = margins.iter().map(|&s| scaler.apply(s)).collect();
        assert!((log_loss(&raw, &labels) - log_loss(&fitted, &labels)).abs() < 1e-3);
    }

    #[test]
    fn equal_margins_give_smoothed_base_rate() {
        let labels: Vec<bool> = (0..10).map(|i| i < 3).collect();
        let scaler = platt_fit(&[0.7; 10], &labels).unwrap();
        // minimizer of the smoothed cross-entropy with constant input
        let smoothed = (3.0 * (4.0 / 5.0) + 7.0 * (1.0 / 9.0)) / 10.0;
        for s in [-5.0, 0.0, 0.7, 9.0] {
            assert!((scaler.apply(s) - smoothed).abs() < 1e-12);
        }
    }

    #[test]
    fn fitted_scaler_is_monotone_in_the_fitted_direction() {
        let margins = [-2.0, -1.0, -0.5, 0.3, 1.0, 2.5];
        let labels = [false, false, true, false, true, true];
        let s = platt_fit(&margins, &labels).unwrap();
        assert!(s.a < 0.0);
        assert!(s.apply(1.0) > s.apply(0.5));
    }

    #[test]
    fn beats_best_constant_on_informative_margins() {
        let mut r = rng(8);
        for _ in 0..20 {
            let margins: Vec<f64> = (0..300).map(|_| r.random_range(-3.0..3.0)).collect();
            let labels: Vec<bool> = margins.iter().map(|&s| r.random_bool(sigmoid(2.0 * s + 0.5))).collect();
            let scaler = platt_fit(&margins, &labels).unwrap();
            let rate = labels.iter().filter(|&&y| y).count() as f64 / labels.len() as f64;
            let constant = log_loss(&vec![rate; labels.len()], &labels);
            let fitted: Vec<f64> = margins.iter().map(|&s| scaler.apply(s)).collect();
            assert!(log_loss(&fitted, &labels) <= constant + 1e-9);
        }
    }

    #[test]
    fn single_class_is_an_error() {
        assert!(matches!(platt_fit(&[1.0, 2.0], &[true, true]), Err(Error::SingleClass)));
    }

    #[test]
    fn identity_is_the_logistic_link() {
        for s in [-30.0, -1.0, 0.0, 2.0, 40.0] {
            assert!((PlattScaler::IDENTITY.apply(s) - sigmoid(s)).abs() < 1e-15);
        }
    }
}
