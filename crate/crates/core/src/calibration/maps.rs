//! The two calibration function families and their partial derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::sigmoid;

/// Kumaraswamy inputs are clamped to `[KUMARASWAMY_DELTA, 1 - KUMARASWAMY_DELTA]`
/// wherever `log p` or `p^(a-1)` appear.
pub const KUMARASWAMY_DELTA: f64 = 1e-6;

/// Two-parameter increasing map `G_theta` from raw to calibrated probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `1 / (1 + exp(-(theta1 p + theta2)))`
    Sigmoid,
    /// `1 - (1 - p^theta1)^theta2`, with `theta1, theta2 > 0`
    Kumaraswamy,
}

/// Value and partial derivatives of `G_theta` at every input.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DerivativeBundle {
    pub g: Vec<f64>,
    pub dg_dp: Vec<f64>,
    pub dg_dtheta1: Vec<f64>,
    pub dg_dtheta2: Vec<f64>,
    pub d2g_dp_dtheta1: Vec<f64>,
    pub d2g_dp_dtheta2: Vec<f64>,
}

impl DerivativeBundle {
    fn with_capacity(n: usize) -> Self {
        let v = || Vec::with_capacity(n);
        Self {
            g: v(),
            dg_dp: v(),
            dg_dtheta1: v(),
            dg_dtheta2: v(),
            d2g_dp_dtheta1: v(),
            d2g_dp_dtheta2: v(),
        }
    }

    fn push(&mut self, d: PointDerivatives) {
        self.g.push(d.g);
        self.dg_dp.push(d.dg_dp);
        self.dg_dtheta1.push(d.dg_dtheta1);
        self.dg_dtheta2.push(d.dg_dtheta2);
        self.d2g_dp_dtheta1.push(d.d2g_dp_dtheta1);
        self.d2g_dp_dtheta2.push(d.d2g_dp_dtheta2);
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct PointDerivatives {
    pub g: f64,
    pub dg_dp: f64,
    pub dg_dtheta1: f64,
    pub dg_dtheta2: f64,
    pub d2g_dp_dtheta1: f64,
    pub d2g_dp_dtheta2: f64,
}

pub(crate) fn sigmoid_point(theta: [f64; 2], p: f64) -> PointDerivatives {
    let g = sigmoid(theta[0] * p + theta[1]);
    let s = g * (1.0 - g);
    let curv = s * (1.0 - 2.0 * g);
    PointDerivatives {
        g,
        dg_dp: theta[0] * s,
        dg_dtheta1: p * s,
        dg_dtheta2: s,
        d2g_dp_dtheta1: s + theta[0] * p * curv,
        d2g_dp_dtheta2: theta[0] * curv,
    }
}

/// Kumaraswamy derivatives at `p` with `ln_p = ln(p)`, `p` already inside
/// the clamp range. When `flat` is set the input was clamped, so the map is
/// constant in `p` there and the `p`-derivatives vanish.
pub(crate) fn kumaraswamy_point(
    theta: [f64; 2],
    p: f64,
    ln_p: f64,
    flat: bool,
) -> PointDerivatives {
    let [a, b] = theta;
    let q = (a * ln_p).exp(); // p^a
    let r = -(a * ln_p).exp_m1(); // 1 - p^a
    let ln_r = r.ln();
    let r_b = (b * ln_r).exp(); // (1 - p^a)^b
    let r_b1 = ((b - 1.0) * ln_r).exp(); // (1 - p^a)^(b-1)
    let g = -(b * ln_r).exp_m1();
    let dg_dtheta1 = b * ln_p * q * r_b1;
    let dg_dtheta2 = -ln_r * r_b;
    if flat {
        return PointDerivatives {
            g,
            dg_dtheta1,
            dg_dtheta2,
            ..PointDerivatives::default()
        };
    }
    let p_a1 = q / p; // p^(a-1)
    let base = p_a1 * r_b1;
    PointDerivatives {
        g,
        dg_dp: a * b * base,
        dg_dtheta1,
        dg_dtheta2,
        // p^(2a-1) (1-p^a)^(b-2) = base * q / r
        d2g_dp_dtheta1: b * (base * (1.0 + a * ln_p) - a * (b - 1.0) * base * q / r * ln_p),
        d2g_dp_dtheta2: a * base * (1.0 + b * ln_r),
    }
}

pub(crate) fn clamp_kumaraswamy(p: f64) -> (f64, bool) {
    let c = p.clamp(KUMARASWAMY_DELTA, 1.0 - KUMARASWAMY_DELTA);
    (c, c != p)
}

pub(crate) fn check_kumaraswamy_theta(theta: [f64; 2]) -> Result<()> {
    if theta.iter().all(|t| t.is_finite() && *t > 0.0) {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "Kumaraswamy parameters must be positive and finite, got ({}, {})",
            theta[0], theta[1]
        )))
    }
}

/// Platt-style sigmoid map applied elementwise.
pub fn sigmoid_apply(theta: [f64; 2], probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .map(|&p| sigmoid(theta[0] * p + theta[1]))
        .collect()
}

/// Kumaraswamy CDF applied elementwise; exact at 0 and 1, inputs outside
/// `[0, 1]` are clamped.
pub fn kumaraswamy_apply(theta: [f64; 2], probs: &[f64]) -> Result<Vec<f64>> {
    check_kumaraswamy_theta(theta)?;
    let [a, b] = theta;
    Ok(probs
        .iter()
        .map(|&p| {
            let ln_r = (-(a * p.clamp(0.0, 1.0).ln()).exp_m1()).ln();
            -(b * ln_r).exp_m1()
        })
        .collect())
}

pub fn sigmoid_derivatives(theta: [f64; 2], probs: &[f64]) -> DerivativeBundle {
    let mut out = DerivativeBundle::with_capacity(probs.len());
    for &p in probs {
        out.push(sigmoid_point(theta, p));
    }
    out
}

pub fn kumaraswamy_derivatives(theta: [f64; 2], probs: &[f64]) -> Result<DerivativeBundle> {
    check_kumaraswamy_theta(theta)?;
    let mut out = DerivativeBundle::with_capacity(probs.len());
    for &p in probs {
        let (c, flat) = clamp_kumaraswamy(p);
        out.push(kumaraswamy_point(theta, c, c.ln(), flat));
    }
    Ok(out)
}

impl Family {
    pub fn apply(self, theta: [f64; 2], probs: &[f64]) -> Result<Vec<f64>> {
        match self {
            Family::Sigmoid => Ok(sigmoid_apply(theta, probs)),
            Family::Kumaraswamy => kumaraswamy_apply(theta, probs),
        }
    }

    pub fn derivatives(self, theta: [f64; 2], probs: &[f64]) -> Result<DerivativeBundle> {
        match self {
            Family::Sigmoid => Ok(sigmoid_derivatives(theta, probs)),
            Family::Kumaraswamy => kumaraswamy_derivatives(theta, probs),
        }
    }

    pub(crate) fn check_theta(self, theta: [f64; 2]) -> Result<()> {
        match self {
            Family::Sigmoid if theta.iter().all(|t| t.is_finite()) => Ok(()),
            Family::Sigmoid => Err(Error::Parameter("sigmoid parameters must be finite".into())),
            Family::Kumaraswamy => check_kumaraswamy_theta(theta),
        }
    }
}
