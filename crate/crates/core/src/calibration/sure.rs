//! Stein's unbiased risk estimate as a calibration objective, and the
//! quadratic penalty solver that minimizes it under the mean constraint.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::maps::{clamp_kumaraswamy, kumaraswamy_point, sigmoid_point, Family, PointDerivatives};
use crate::error::{Error, Result};

/// Lower bound for the estimated noise variance.
pub const SIGMA2_FLOOR: f64 = 1e-6;

/// `mean((p - y)^2) - mean((y - mean(y))^2)`, floored at [`SIGMA2_FLOOR`].
pub fn estimate_noise_variance(probs: &[f64], labels: &[u8]) -> Result<f64> {
    Error::check_len(labels.len(), probs.len())?;
    if labels.is_empty() {
        return Err(Error::Precondition("empty input".into()));
    }
    let n = labels.len() as f64;
    let ybar = labels.iter().map(|&y| f64::from(y)).sum::<f64>() / n;
    let residual = labels
        .iter()
        .zip(probs)
        .map(|(&y, &p)| (p - f64::from(y)).powi(2))
        .sum::<f64>()
        / n;
    let spread = labels
        .iter()
        .map(|&y| (f64::from(y) - ybar).powi(2))
        .sum::<f64>()
        / n;
    let raw = residual - spread;
    if raw < SIGMA2_FLOOR {
        log::debug!("noise variance estimate {raw:e} floored to {SIGMA2_FLOOR:e}");
    }
    Ok(raw.max(SIGMA2_FLOOR))
}

/// Inputs prepared once for repeated evaluation of one family.
struct Inputs {
    family: Family,
    p: Vec<f64>,
    /// `ln p` and clamp flag for the Kumaraswamy family.
    ln_p: Vec<f64>,
    flat: Vec<bool>,
}

impl Inputs {
    fn new(family: Family, probs: &[f64]) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite()) {
            return Err(Error::Parameter("probabilities must be finite".into()));
        }
        match family {
            Family::Sigmoid => Ok(Self {
                family,
                p: probs.to_vec(),
                ln_p: Vec::new(),
                flat: Vec::new(),
            }),
            Family::Kumaraswamy => {
                let (p, flat): (Vec<f64>, Vec<bool>) =
                    probs.iter().map(|&p| clamp_kumaraswamy(p)).unzip();
                let ln_p = p.iter().map(|p| p.ln()).collect();
                Ok(Self {
                    family,
                    p,
                    ln_p,
                    flat,
                })
            }
        }
    }

    fn point(&self, theta: [f64; 2], i: usize) -> PointDerivatives {
        match self.family {
            Family::Sigmoid => sigmoid_point(theta, self.p[i]),
            Family::Kumaraswamy => kumaraswamy_point(theta, self.p[i], self.ln_p[i], self.flat[i]),
        }
    }

    /// One pass over the data accumulating SURE, `mean(G)` and the pieces
    /// of the penalty gradient. `raw` are the unclamped inputs.
    fn sums(&self, theta: [f64; 2], raw: &[f64], sigma2: f64) -> Sums {
        let mut s = Sums::default();
        for (i, &p) in raw.iter().enumerate() {
            let d = self.point(theta, i);
            let resid = d.g - p;
            s.squared += resid * resid;
            s.slope += d.dg_dp;
            s.mean_g += d.g;
            s.grad_sure[0] += 2.0 * resid * d.dg_dtheta1 + 2.0 * sigma2 * d.d2g_dp_dtheta1;
            s.grad_sure[1] += 2.0 * resid * d.dg_dtheta2 + 2.0 * sigma2 * d.d2g_dp_dtheta2;
            s.dc[0] += d.dg_dtheta1;
            s.dc[1] += d.dg_dtheta2;
        }
        let n = raw.len() as f64;
        s.sure = -n * sigma2 + s.squared + 2.0 * sigma2 * s.slope;
        s.mean_g /= n;
        s.dc[0] /= n;
        s.dc[1] /= n;
        s
    }
}

#[derive(Debug, Default)]
struct Sums {
    squared: f64,
    slope: f64,
    sure: f64,
    mean_g: f64,
    grad_sure: [f64; 2],
    /// Gradient of `mean(G)`.
    dc: [f64; 2],
}

fn label_mean(labels: &[u8]) -> f64 {
    labels.iter().map(|&y| f64::from(y)).sum::<f64>() / labels.len() as f64
}

fn check_inputs(probs: &[f64], labels: Option<&[u8]>) -> Result<()> {
    if let Some(labels) = labels {
        Error::check_len(labels.len(), probs.len())?;
    }
    if probs.is_empty() {
        return Err(Error::Precondition("empty input".into()));
    }
    Ok(())
}

/// `-N sigma2 + sum (G(p) - p)^2 + 2 sigma2 sum dG/dp`.
pub fn sure_loss(theta: [f64; 2], probs: &[f64], sigma2: f64, family: Family) -> Result<f64> {
    check_inputs(probs, None)?;
    family.check_theta(theta)?;
    Ok(Inputs::new(family, probs)?.sums(theta, probs, sigma2).sure)
}

/// `C(theta) = mean(G(p)) - mean(y)`.
pub fn constraint_value(
    theta: [f64; 2],
    probs: &[f64],
    labels: &[u8],
    family: Family,
) -> Result<f64> {
    check_inputs(probs, Some(labels))?;
    family.check_theta(theta)?;
    let g = Inputs::new(family, probs)?.sums(theta, probs, 0.0).mean_g;
    Ok(g - label_mean(labels))
}

/// Penalty objective `Q = SURE + (mu / 2) C^2`.
pub fn penalty_value(
    theta: [f64; 2],
    mu: f64,
    probs: &[f64],
    labels: &[u8],
    sigma2: f64,
    family: Family,
) -> Result<f64> {
    check_inputs(probs, Some(labels))?;
    family.check_theta(theta)?;
    let s = Inputs::new(family, probs)?.sums(theta, probs, sigma2);
    let c = s.mean_g - label_mean(labels);
    Ok(s.sure + 0.5 * mu * c * c)
}

/// Gradient of `Q` with respect to `theta`.
pub fn penalty_gradient(
    theta: [f64; 2],
    mu: f64,
    probs: &[f64],
    labels: &[u8],
    sigma2: f64,
    family: Family,
) -> Result<[f64; 2]> {
    check_inputs(probs, Some(labels))?;
    family.check_theta(theta)?;
    let s = Inputs::new(family, probs)?.sums(theta, probs, sigma2);
    Ok(gradient(&s, mu, label_mean(labels)))
}

fn gradient(s: &Sums, mu: f64, ybar: f64) -> [f64; 2] {
    let c = s.mean_g - ybar;
    [
        s.grad_sure[0] + mu * c * s.dc[0],
        s.grad_sure[1] + mu * c * s.dc[1],
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SureSolverConfig {
    /// Penalty rounds `K`.
    pub outer_iterations: usize,
    /// Steepest-descent steps per round.
    pub inner_iterations: usize,
    pub mu0: f64,
    pub mu_growth: f64,
    pub step_size: f64,
    pub gradient_tolerance: f64,
    /// A round is feasible when `|C(theta)| <= feasibility_eps`.
    pub feasibility_eps: f64,
    pub seed: u64,
}

impl Default for SureSolverConfig {
    fn default() -> Self {
        Self {
            outer_iterations: 10,
            inner_iterations: 15_000,
            mu0: 10.0,
            mu_growth: 10.0,
            step_size: 1e-4,
            gradient_tolerance: 1e-5,
            feasibility_eps: 0.1,
            seed: 0,
        }
    }
}

impl SureSolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.mu0,
            self.mu_growth,
            self.step_size,
            self.gradient_tolerance,
            self.feasibility_eps,
        ];
        if self.outer_iterations == 0 || self.inner_iterations == 0 {
            return Err(Error::Parameter(
                "iteration budgets must be at least 1".into(),
            ));
        }
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Parameter("solver constants must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SureFit {
    pub theta: [f64; 2],
    pub sigma2: f64,
    /// SURE at the returned parameters.
    pub sure: f64,
    /// `C(theta)` at the returned parameters (signed).
    pub constraint: f64,
    /// Penalty weight of the feasible round.
    pub mu: f64,
    /// Penalty rounds used.
    pub rounds: usize,
    /// Descent steps over all rounds.
    pub iterations: usize,
    /// Norm of the last descent direction.
    pub gradient_norm: f64,
}

/// Quadratic penalty method: steepest descent on `Q` with a fixed step,
/// growing `mu` until the mean constraint holds.
///
/// Kumaraswamy parameters are optimized as `theta = exp(phi)`, stepping on
/// the gradient with respect to `phi`.
pub fn sure_fit(
    probs: &[f64],
    labels: &[u8],
    family: Family,
    config: &SureSolverConfig,
) -> Result<SureFit> {
    config.validate()?;
    check_inputs(probs, Some(labels))?;
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Parameter(format!("probability {p} outside [0, 1]")));
    }
    let pos = labels.iter().filter(|&&y| y == 1).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::Degenerate(
            "SURE fit needs both classes in the labels".into(),
        ));
    }
    let sigma2 = estimate_noise_variance(probs, labels)?;
    let ybar = label_mean(labels);
    let inputs = Inputs::new(family, probs)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // optimization variable: theta for the sigmoid, log(theta) for Kumaraswamy
    let mut v: [f64; 2] = match family {
        Family::Sigmoid => [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
        Family::Kumaraswamy => [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)],
    };
    let to_theta = |v: [f64; 2]| match family {
        Family::Sigmoid => v,
        Family::Kumaraswamy => [v[0].exp(), v[1].exp()],
    };
    let direction = |theta: [f64; 2], s: &Sums, mu: f64| {
        let g = gradient(s, mu, ybar);
        match family {
            Family::Sigmoid => g,
            Family::Kumaraswamy => [theta[0] * g[0], theta[1] * g[1]],
        }
    };

    let mut mu = config.mu0;
    let mut iterations = 0;
    let mut best: Option<([f64; 2], f64)> = None;
    for round in 1..=config.outer_iterations {
        let mut gradient_norm = f64::NAN;
        for _ in 0..config.inner_iterations {
            let theta = to_theta(v);
            let d = direction(theta, &inputs.sums(theta, probs, sigma2), mu);
            let norm = d[0].hypot(d[1]);
            if !norm.is_finite() {
                log::debug!("round {round}: non-finite gradient, keeping last iterate");
                break;
            }
            gradient_norm = norm;
            if norm <= config.gradient_tolerance {
                break;
            }
            let next = [
                v[0] - config.step_size * d[0],
                v[1] - config.step_size * d[1],
            ];
            if !to_theta(next).iter().all(|t| t.is_finite()) {
                break;
            }
            v = next;
            iterations += 1;
        }
        let theta = to_theta(v);
        let s = inputs.sums(theta, probs, sigma2);
        let c = s.mean_g - ybar;
        log::debug!(
            "round {round}: mu {mu:e}, theta ({:.6}, {:.6}), C {c:.6}, SURE {:.6}",
            theta[0],
            theta[1],
            s.sure
        );
        if c.is_finite() && best.is_none_or(|(_, bc)| c.abs() < bc.abs()) {
            best = Some((theta, c));
        }
        if c.abs() <= config.feasibility_eps {
            return Ok(SureFit {
                theta,
                sigma2,
                sure: s.sure,
                constraint: c,
                mu,
                rounds: round,
                iterations,
                gradient_norm,
            });
        }
        mu *= config.mu_growth;
    }
    let (theta, c) = best.unwrap_or((to_theta(v), f64::NAN));
    Err(Error::Infeasible {
        rounds: config.outer_iterations,
        theta1: theta[0],
        theta2: theta[1],
        constraint: c.abs(),
    })
}
