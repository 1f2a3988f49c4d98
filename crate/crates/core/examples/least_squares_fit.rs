//! Least-squares fit of one trajectory, plus the residual orthogonality check.
//!
//! ```bash
//! cargo run --release --example least_squares_fit
//! ```

use arident::ar::optimal;
use arident::lsq::{build_problem, ls_fit};
use arident::moments::theoretical_covariance;
use arident::system::{simulate, DEFAULT_BURN_IN};
use arident::{ArOrder, SeededStream, SystemParams};

fn main() -> arident::Result<()> {
    let params = SystemParams::white(1.0 / 3.0, 4.0, 9.0)?;
    let cov = theoretical_covariance(&params, 2)?;

    for n in [1_000, 10_000, 100_000] {
        let traj = simulate(&params, n, DEFAULT_BURN_IN, SeededStream::new(3, 0))?;
        for order in [ArOrder::One, ArOrder::Two] {
            let problem = build_problem(&traj.values, order)?;
            let est = ls_fit(&problem)?;
            let target = optimal(&cov, order)?;
            println!(
                "N={n:>6} {order}: fit {:.4?} vs theta* {:.4?}; residual variance {:.3}; orthogonality {:.1e}",
                est.coeffs,
                target.coeffs,
                est.pred_error_variance.unwrap(),
                problem.orthogonality_defect(&est.coeffs)
            );
        }
    }

    // exact recovery when there is no noise at all
    let series: Vec<f64> = (0..50).map(|t| 2.0 * 0.7f64.powi(t)).collect();
    let est = ls_fit(&build_problem(&series, ArOrder::One)?)?;
    println!("noise-free y(t) = 0.7 y(t-1): phi1 = {}", est.coeffs[0]);
    Ok(())
}
