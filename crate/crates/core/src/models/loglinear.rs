use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::optim::{fista, lbfgs, MAX_ITERATIONS, TOLERANCE};
use super::{expand, Dataset};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::util::{sigmoid, softplus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularization {
    L1,
    L2,
}

impl fmt::Display for Regularization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regularization::L1 => "l1",
            Regularization::L2 => "l2",
        })
    }
}

impl FromStr for Regularization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Regularization::L1),
            "l2" => Ok(Regularization::L2),
            other => Err(Error::InvalidInput(format!("unknown regularization `{other}`"))),
        }
    }
}

/// Binary logistic model `p(floor | x) = sigmoid(w.x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub regularization: Regularization,
    pub lambda: f64,
}

impl LinearModel {
    pub fn score(&self, x: &FeatureVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> f64 {
        sigmoid(self.score(x))
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }
}

/// Penalized negative log-likelihood of `theta = [w, b]` and its gradient.
///
/// The penalty is `lambda/2 ||w||^2` (L2) or `lambda ||w||_1` (L1, with the
/// subgradient `sign(w)`); the bias is never penalized.
pub fn loglinear_nll_grad(
    theta: &[f64],
    data: &Dataset,
    lambda: f64,
    reg: Regularization,
) -> Result<(f64, Vec<f64>)> {
    if theta.len() != data.dim + 1 {
        return Err(Error::DimensionMismatch {
            expected: data.dim + 1,
            got: theta.len(),
        });
    }
    let mut grad = vec![0.0; theta.len()];
    let mut loss = nll(theta, data, &mut grad);
    let d = data.dim;
    match reg {
        Regularization::L2 => {
            for j in 0..d {
                loss += 0.5 * lambda * theta[j] * theta[j];
                grad[j] += lambda * theta[j];
            }
        }
        Regularization::L1 => {
            for j in 0..d {
                loss += lambda * theta[j].abs();
                grad[j] += lambda * theta[j].signum() * (theta[j] != 0.0) as u8 as f64;
            }
        }
    }
    Ok((loss, grad))
}

/// Unpenalized NLL; overwrites `grad`.
fn nll(theta: &[f64], data: &Dataset, grad: &mut [f64]) -> f64 {
    grad.iter_mut().for_each(|g| *g = 0.0);
    let d = data.dim;
    let (w, b) = (&theta[..d], theta[d]);
    let mut loss = 0.0;
    for (x, &y) in data.rows.iter().zip(&data.labels) {
        let z = x.dot(w) + b;
        // -log p(y|x) = softplus(z) - y z
        loss += softplus(z) - if y { z } else { 0.0 };
        let r = sigmoid(z) - y as u8 as f64;
        for (j, v) in x.iter() {
            grad[j as usize] += r * v;
        }
        grad[d] += r;
    }
    loss
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLinearParams {
    pub lambda: f64,
    pub regularization: Regularization,
}

impl Default for LogLinearParams {
    fn default() -> Self {
        LogLinearParams {
            lambda: 1.0,
            regularization: Regularization::L2,
        }
    }
}

/// Minimizes the penalized NLL. L2 uses L-BFGS, L1 uses FISTA; both run to a
/// gradient (mapping) norm of 1e-6 on the per-example objective, or 1000
/// iterations. The optimizers are deterministic, so no seed is needed.
pub fn loglinear_train(data: &Dataset, params: &LogLinearParams) -> Result<LinearModel> {
    data.require_both_classes()?;
    if !(params.lambda >= 0.0 && params.lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("lambda must be >= 0, got {}", params.lambda)));
    }
    let full_dim = data.dim;
    let (data, columns) = data.compact();
    let data = &data;
    let n = data.len() as f64;
    let d = data.dim;
    let mut theta = vec![0.0; d + 1];
    let rate = data.positive_rate().clamp(1e-6, 1.0 - 1e-6);
    theta[d] = (rate / (1.0 - rate)).ln();

    let outcome = match params.regularization {
        Regularization::L2 => lbfgs(
            &mut theta,
            |t, g| {
                let mut f = nll(t, data, g);
                for j in 0..d {
                    f += 0.5 * params.lambda * t[j] * t[j];
                    g[j] += params.lambda * t[j];
                }
                g.iter_mut().for_each(|x| *x /= n);
                f / n
            },
            TOLERANCE,
            MAX_ITERATIONS,
        ),
        Regularization::L1 => fista(
            &mut theta,
            |t, g| {
                let f = nll(t, data, g);
                g.iter_mut().for_each(|x| *x /= n);
                f / n
            },
            params.lambda / n,
            d,
            TOLERANCE,
            MAX_ITERATIONS,
        ),
    };
    if !outcome.converged {
        log::debug!("log-linear fit stopped after {} iterations", outcome.iterations);
    }
    let bias = theta.pop().expect("bias present");
    Ok(LinearModel {
        weights: expand(&theta, &columns, full_dim),
        bias,
        regularization: params.regularization,
        lambda: params.lambda,
    })
}
