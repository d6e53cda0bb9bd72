//! Writes a synthetic dataset in the raw credit CSV layout.
//!
//! `cargo run --release --example synthetic_csv -- out.csv 30000 7`

use std::fs::File;
use std::io::BufWriter;

use credit_calib::data::synthetic::{synthetic_credit, write_credit_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "synthetic_credit.csv".into());
    let n: usize = args.next().map_or(Ok(30_000), |s| s.parse())?;
    let seed: u64 = args.next().map_or(Ok(7), |s| s.parse())?;
    let ds = synthetic_credit(n, seed);
    write_credit_csv(&ds, BufWriter::new(File::create(&path)?))?;
    println!("wrote {n} rows to {path}");
    Ok(())
}
