use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self {
            train: 0.6,
            validation: 0.2,
            test: 0.2,
        }
    }
}

impl SplitFractions {
    fn as_array(&self) -> [f64; 3] {
        [self.train, self.validation, self.test]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

impl SplitIndices {
    pub fn parts(&self) -> [&[usize]; 3] {
        [&self.train, &self.validation, &self.test]
    }
}

/// Integer apportionment of `total` proportionally to `weights` by largest
/// remainder; every share is within one unit of its exact value.
fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut shares: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut left = total - shares.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    // stable sort keeps ties in split order (train first)
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap()
    });
    for &k in order.iter().cycle() {
        if left == 0 {
            break;
        }
        shares[k] += 1;
        left -= 1;
    }
    shares
}

/// Shuffled train/validation/test split preserving the class ratio.
///
/// Split sizes are apportioned from `n`, then each split's positive count is
/// apportioned from the positives in proportion to split size. Each class is
/// shuffled independently and dealt out, and each split is shuffled again.
pub fn stratified_split(
    n: usize,
    labels: &[u8],
    fractions: SplitFractions,
    seed: u64,
) -> Result<SplitIndices> {
    Error::check_len(n, labels.len())?;
    let fr = fractions.as_array();
    if fr.iter().any(|f| !f.is_finite() || *f <= 0.0) || (fr.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(Error::Parameter(format!(
            "split fractions must be positive and sum to 1, got {fr:?}"
        )));
    }
    let mut positives: Vec<usize> = Vec::new();
    let mut negatives: Vec<usize> = Vec::new();
    for (i, &y) in labels.iter().enumerate() {
        match y {
            0 => negatives.push(i),
            1 => positives.push(i),
            _ => {
                return Err(Error::Row {
                    row: i + 1,
                    message: format!("label {y} is not 0 or 1"),
                })
            }
        }
    }
    for (name, count) in [("positive", positives.len()), ("negative", negatives.len())] {
        if count < fr.len() {
            return Err(Error::Degenerate(format!(
                "{name} class has {count} rows, fewer than the {} splits",
                fr.len()
            )));
        }
    }

    let sizes = apportion(n, &fr);
    let size_weights: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    let pos_counts = apportion(positives.len(), &size_weights);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    positives.shuffle(&mut rng);
    negatives.shuffle(&mut rng);

    let mut parts: Vec<Vec<usize>> = Vec::with_capacity(3);
    let (mut p, mut q) = (0, 0);
    for (size, npos) in sizes.iter().zip(&pos_counts) {
        let nneg = size - npos;
        let mut part = Vec::with_capacity(*size);
        part.extend_from_slice(&positives[p..p + npos]);
        part.extend_from_slice(&negatives[q..q + nneg]);
        p += npos;
        q += nneg;
        part.shuffle(&mut rng);
        parts.push(part);
    }
    let test = parts.pop().unwrap();
    let validation = parts.pop().unwrap();
    let train = parts.pop().unwrap();
    Ok(SplitIndices {
        train,
        validation,
        test,
        seed,
    })
}
