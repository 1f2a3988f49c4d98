//! Simulate `y(t) = lambda y(t-1) + q(t) + v(t) - lambda v(t-1)` and write it as CSV.
//!
//! ```bash
//! cargo run --release --example simulate_system > trajectory.csv
//! ```

use std::io;

use arident::moments::{sample_covariance, theoretical_covariance};
use arident::system::{simulate, DEFAULT_BURN_IN};
use arident::{NoiseSpec, SeededStream, SystemParams};

fn main() -> arident::Result<()> {
    // q ~ WN(1, 4), v ~ WN(4, 9): output mean 4 + 1 / (1 - 1/3) = 5.5
    let params = SystemParams::new(
        1.0 / 3.0,
        NoiseSpec::white(1.0, 4.0),
        NoiseSpec::white(4.0, 9.0),
    )?;
    let long = simulate(&params, 500_000, DEFAULT_BURN_IN, SeededStream::new(1, 0))?;

    let sample = sample_covariance(&long.values, 3)?;
    let exact = theoretical_covariance(&params, 3)?;
    eprintln!("mean   sample {:.4}  exact {:.4}", sample.mean, exact.mean);
    for tau in 0..=3 {
        eprintln!(
            "psi({tau}) sample {:.4}  exact {:.4}",
            sample.values[tau], exact.values[tau]
        );
    }

    let short = simulate(&params, 20, DEFAULT_BURN_IN, SeededStream::new(1, 1))?;
    short.write_csv(io::stdout().lock())
}
