//! Synthetic clients with the same columns as the credit file.
//!
//! Used by tests and demos when the real file is not at hand. Default risk
//! is driven mostly by the repayment history (dynamic columns) and weakly by
//! the static ones, and the default rate lands near 22%.

use std::io::Write;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use super::dataset::RawDataset;
use super::schema;
use crate::error::{Error, Result};

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

pub fn synthetic_credit(n: usize, seed: u64) -> RawDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = Normal::<f64>::new(0.0, 1.0).unwrap();
    let limit_dist = LogNormal::<f64>::new(11.8, 0.75).unwrap();
    let columns = schema::raw_feature_columns();
    let mut values = Array2::zeros((n, columns.len()));
    let mut labels = Vec::with_capacity(n);

    for i in 0..n {
        let limit = ((limit_dist.sample(&mut rng) / 10_000.0)
            .round()
            .clamp(1.0, 100.0))
            * 10_000.0;
        let sex = if rng.random::<f64>() < 0.6 { 2.0 } else { 1.0 };
        let education = match rng.random::<f64>() {
            u if u < 0.35 => 1.0,
            u if u < 0.82 => 2.0,
            u if u < 0.98 => 3.0,
            u if u < 0.99 => 4.0,
            _ => 5.0,
        };
        let marriage = match rng.random::<f64>() {
            u if u < 0.45 => 1.0,
            u if u < 0.98 => 2.0,
            _ => 3.0,
        };
        let age = (35.0 + 9.0 * std_normal.sample(&mut rng))
            .round()
            .clamp(21.0, 75.0);

        // latent repayment trouble, persistent across months
        let trouble = std_normal.sample(&mut rng) - 0.25 * (limit / 100_000.0).ln();
        let mut pay = [0.0; 6];
        let mut bills = [0.0f64; 6];
        let mut paid = [0.0; 6];
        let base_util = sigmoid(0.8 * trouble + 0.5 * std_normal.sample(&mut rng));
        for m in 0..6 {
            let noise = 0.7 * std_normal.sample(&mut rng);
            let status = (1.4 * trouble + noise - 0.6).round().clamp(-2.0, 8.0);
            pay[m] = status;
            let util = (base_util + 0.08 * std_normal.sample(&mut rng)).clamp(-0.05, 1.3);
            bills[m] = (limit * util).round();
            let frac = if status > 0.0 {
                0.01
            } else {
                0.12 * (1.0 + rng.random::<f64>())
            };
            paid[m] = (bills[m].max(0.0) * frac).round();
        }

        let logit = -1.55 + 0.95 * pay[0] + 0.35 * pay[1] + 0.6 * (base_util - 0.5)
            - 0.12 * (limit / 100_000.0)
            + 0.1 * (sex - 1.5)
            + 0.004 * (age - 35.0)
            + 0.4 * trouble;
        let label = u8::from(rng.random::<f64>() < sigmoid(logit));

        let mut row = vec![limit, sex, education, marriage, age];
        row.extend(pay);
        row.extend(bills);
        row.extend(paid);
        for (j, v) in row.into_iter().enumerate() {
            values[[i, j]] = v;
        }
        labels.push(label);
    }
    RawDataset::new(columns, values, labels).expect("generator output is well formed")
}

/// Writes `ds` in the layout [`super::load_credit_csv`] reads. Only valid for
/// datasets with exactly the raw columns.
pub fn write_credit_csv<W: Write>(ds: &RawDataset, out: W) -> Result<()> {
    if ds.columns() != schema::raw_feature_columns().as_slice() {
        return Err(Error::Schema(
            "dataset does not have the raw file columns".into(),
        ));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(schema::expected_header())?;
    for (i, row) in ds.values().rows().into_iter().enumerate() {
        let mut rec = vec![(i + 1).to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        rec.push(ds.labels()[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}
