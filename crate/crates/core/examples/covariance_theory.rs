//! Exact mean and covariance sequences for white and colored process noise.
//!
//! ```bash
//! cargo run --example covariance_theory
//! ```

use arident::moments::{colored_covariance, covariance_recursion, theoretical_covariance};
use arident::{NoiseSpec, SystemParams};

fn main() -> arident::Result<()> {
    let white = SystemParams::white(1.0 / 3.0, 4.0, 9.0)?;
    let cov = theoretical_covariance(&white, 5)?;
    println!("white: mean {}, psi {:?}", cov.mean, cov.values);
    println!("       recursion route {:?}", covariance_recursion(&white)?);

    let shifted = SystemParams::new(
        1.0 / 3.0,
        NoiseSpec::white(1.0, 4.0),
        NoiseSpec::white(4.0, 9.0),
    )?;
    let s = theoretical_covariance(&shifted, 5)?;
    println!(
        "shifted means: mean {}, same psi: {}",
        s.mean,
        s.values == cov.values
    );

    let colored = SystemParams::new(
        1.0 / 3.0,
        NoiseSpec::colored(-0.5, 1.0),
        NoiseSpec::white(0.0, 9.0),
    )?;
    let c = colored_covariance(&colored, 5)?;
    println!("colored a=-0.5: psi {:?}", c.values);
    println!(
        "                psi(1)/psi(0) = {} (-1/47 = {})",
        c.values[1] / c.values[0],
        -1.0 / 47.0
    );

    let mut csv = Vec::new();
    cov.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
