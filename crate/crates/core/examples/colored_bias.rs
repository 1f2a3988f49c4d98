//! Least squares under colored process noise converges to its own optimum,
//! not to the white-noise one.
//!
//! ```bash
//! cargo run --release --example colored_bias
//! ```

use arident::ar::optimal;
use arident::lsq::batch_estimate;
use arident::moments::covariance_for;
use arident::system::DEFAULT_BURN_IN;
use arident::{ArOrder, NoiseSpec, SystemParams};

fn main() -> arident::Result<()> {
    let white = SystemParams::white(1.0 / 3.0, 4.0, 9.0)?;
    let colored = SystemParams::new(
        1.0 / 3.0,
        NoiseSpec::colored(-0.5, 1.0),
        NoiseSpec::white(0.0, 9.0),
    )?;

    for order in [ArOrder::One, ArOrder::Two] {
        let white_opt = optimal(&covariance_for(&white, 2)?, order)?;
        let colored_opt = optimal(&covariance_for(&colored, 2)?, order)?;
        let s = batch_estimate(&colored, order, 100_000, 100, DEFAULT_BURN_IN, 62)?;
        println!("{order}");
        println!("  white optimum    {:.5?}", white_opt.coeffs);
        println!("  colored optimum  {:.5?}", colored_opt.coeffs);
        println!("  batch mean       {:.5?}", s.emp_mean);
    }
    Ok(())
}
