use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates for a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    timestep: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            timestep: 0,
        }
    }

    pub fn timestep(&self) -> u64 {
        self.timestep
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// One bias-corrected Adam update. `params` and `grads` are walked in
    /// lockstep as consecutive chunks of the same flat vector.
    pub fn step<'a, P, G>(&mut self, params: P, grads: G, cfg: &AdamConfig)
    where
        P: IntoIterator<Item = &'a mut [f64]>,
        G: IntoIterator<Item = &'a [f64]>,
    {
        self.timestep += 1;
        let t = self.timestep as i32;
        let c1 = 1.0 - cfg.beta1.powi(t);
        let c2 = 1.0 - cfg.beta2.powi(t);
        let mut k = 0;
        for (p_chunk, g_chunk) in params.into_iter().zip(grads) {
            assert_eq!(
                p_chunk.len(),
                g_chunk.len(),
                "parameter/gradient chunk mismatch"
            );
            for (p, &g) in p_chunk.iter_mut().zip(g_chunk) {
                let m = &mut self.m[k];
                let v = &mut self.v[k];
                *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
                *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *p -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
                k += 1;
            }
        }
        assert_eq!(
            k,
            self.m.len(),
            "state sized for a different parameter vector"
        );
    }
}
