use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::sigmoid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlattConfig {
    pub max_iterations: usize,
    /// Stop once the gradient norm of the mean log loss is below this.
    pub gradient_tolerance: f64,
}

impl Default for PlattConfig {
    fn default() -> Self {
        Self {
            max_iterations: 50_000,
            gradient_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattFit {
    pub theta: [f64; 2],
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Mean log loss at `theta`.
    pub loss: f64,
}

/// `softplus(z) - y z`, the log loss of `sigmoid(z)` written without a log
/// of a probability.
fn log_loss(z: f64, y: f64) -> f64 {
    let softplus = if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    };
    softplus - y * z
}

struct Eval {
    loss: f64,
    grad: [f64; 2],
    /// Upper triangle of the Hessian: (pp, p1, 11).
    hess: [f64; 3],
}

fn evaluate(theta: [f64; 2], probs: &[f64], labels: &[u8]) -> Eval {
    let n = probs.len() as f64;
    let mut e = Eval {
        loss: 0.0,
        grad: [0.0; 2],
        hess: [0.0; 3],
    };
    for (&p, &y) in probs.iter().zip(labels) {
        let z = theta[0] * p + theta[1];
        let s = sigmoid(z);
        let y = f64::from(y);
        let w = s * (1.0 - s);
        e.loss += log_loss(z, y);
        e.grad[0] += (s - y) * p;
        e.grad[1] += s - y;
        e.hess[0] += w * p * p;
        e.hess[1] += w * p;
        e.hess[2] += w;
    }
    e.loss /= n;
    e.grad
        .iter_mut()
        .chain(e.hess.iter_mut())
        .for_each(|v| *v /= n);
    e
}

fn loss_at(theta: [f64; 2], probs: &[f64], labels: &[u8]) -> f64 {
    probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| log_loss(theta[0] * p + theta[1], f64::from(y)))
        .sum::<f64>()
        / probs.len() as f64
}

/// Maximum-likelihood fit of `sigmoid(theta1 p + theta2)` to the labels,
/// by damped Newton steps with a backtracking line search.
pub fn platt_fit(probs: &[f64], labels: &[u8], config: &PlattConfig) -> Result<PlattFit> {
    Error::check_len(labels.len(), probs.len())?;
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Parameter(format!("probability {p} outside [0, 1]")));
    }
    let pos = labels.iter().filter(|&&y| y == 1).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::Degenerate(
            "Platt scaling needs both classes in the labels".into(),
        ));
    }
    let ybar = pos as f64 / labels.len() as f64;
    let mut theta = [0.0, (ybar / (1.0 - ybar)).ln()];
    let mut e = evaluate(theta, probs, labels);
    for iteration in 0..config.max_iterations {
        let norm = e.grad[0].hypot(e.grad[1]);
        if norm < config.gradient_tolerance {
            return Ok(PlattFit {
                theta,
                iterations: iteration,
                gradient_norm: norm,
                loss: e.loss,
            });
        }
        let [hpp, hp1, h11] = e.hess;
        let det = hpp * h11 - hp1 * hp1;
        let dir = if det > 1e-12 * hpp * h11 && det.is_finite() {
            [
                -(h11 * e.grad[0] - hp1 * e.grad[1]) / det,
                -(hpp * e.grad[1] - hp1 * e.grad[0]) / det,
            ]
        } else {
            [-e.grad[0], -e.grad[1]]
        };
        let slope = dir[0] * e.grad[0] + dir[1] * e.grad[1];
        let mut t = 1.0;
        let next = loop {
            let cand = [theta[0] + t * dir[0], theta[1] + t * dir[1]];
            if loss_at(cand, probs, labels) <= e.loss + 1e-4 * t * slope || t < 1e-12 {
                break cand;
            }
            t *= 0.5;
        };
        if next == theta {
            break;
        }
        theta = next;
        e = evaluate(theta, probs, labels);
    }
    let norm = e.grad[0].hypot(e.grad[1]);
    if norm < config.gradient_tolerance {
        return Ok(PlattFit {
            theta,
            iterations: config.max_iterations,
            gradient_norm: norm,
            loss: e.loss,
        });
    }
    Err(Error::NotConverged {
        iterations: config.max_iterations,
        gradient_norm: norm,
    })
}
