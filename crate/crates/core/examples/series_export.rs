//! Per-batch estimates with running mean and variance, as CSV.
//!
//! ```bash
//! cargo run --release --example series_export > series.csv
//! ```

use std::io;

use arident::repro::{cmd_series, parse_config, write_series_csv, BUNDLED_CONFIG};

fn main() -> arident::Result<()> {
    let cfg = parse_config(BUNDLED_CONFIG)?
        .into_iter()
        .find(|c| c.name == "white-ar2-n")
        .expect("bundled scenario");
    let rows = cmd_series(&cfg)?;
    let last = rows.last().unwrap();
    eprintln!(
        "after {} batches: mean {:.4?}, variance {:.5?}",
        last.batch, last.mean, last.variance
    );
    write_series_csv(cfg.order, &rows, io::stdout().lock())
}
