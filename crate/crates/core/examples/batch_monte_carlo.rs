//! kappa independent simulate-and-fit batches, run in parallel but reproducible.
//!
//! ```bash
//! cargo run --release --example batch_monte_carlo
//! ```

use std::time::Instant;

use arident::lsq::batch_estimate;
use arident::system::DEFAULT_BURN_IN;
use arident::{ArOrder, SystemParams};

fn main() -> arident::Result<()> {
    let params = SystemParams::white(1.0 / 3.0, 4.0, 9.0)?;
    for order in [ArOrder::One, ArOrder::Two] {
        for n in [1000, 2000] {
            let start = Instant::now();
            let s = batch_estimate(&params, order, n, 100, DEFAULT_BURN_IN, 56)?;
            println!(
                "{order} N={n}: emp_mean {:.4?}, emp_variance {:?} ({:.0?})",
                s.emp_mean,
                s.emp_variance,
                start.elapsed()
            );
        }
    }

    // the thread count does not change the answer
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| batch_estimate(&params, ArOrder::Two, 1000, 32, DEFAULT_BURN_IN, 5))?;
    let many = batch_estimate(&params, ArOrder::Two, 1000, 32, DEFAULT_BURN_IN, 5)?;
    println!("1 thread == default pool: {}", one == many);

    // variances use 1/kappa, not 1/(kappa - 1)
    println!(
        "{}",
        serde_json::to_string_pretty(&many.summary_json()).unwrap()
    );
    Ok(())
}
