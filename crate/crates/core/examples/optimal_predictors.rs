//! PEM-optimal AR(1)/AR(2) predictors from covariances and from closed forms.
//!
//! ```bash
//! cargo run --example optimal_predictors
//! ```

use arident::ar::{closed_form_white, optimal, pem_cost};
use arident::moments::covariance_for;
use arident::{ArOrder, NoiseSpec, SystemParams};

fn show(label: &str, params: &SystemParams) -> arident::Result<()> {
    let cov = covariance_for(params, 2)?;
    println!("{label}");
    for order in [ArOrder::One, ArOrder::Two] {
        let est = optimal(&cov, order)?;
        let cost = pem_cost(&cov, &est.coeffs)?;
        print!(
            "  {order}: theta* = {:?}, error variance {:.6}, cost {:.6}",
            est.coeffs,
            est.pred_error_variance.unwrap(),
            cost
        );
        if params.q_spec.is_white() {
            let closed = closed_form_white(params, order)?;
            print!(", closed form {:?}", closed.coeffs);
        }
        println!();
    }
    Ok(())
}

fn main() -> arident::Result<()> {
    show(
        "white, zero mean",
        &SystemParams::white(1.0 / 3.0, 4.0, 9.0)?,
    )?;
    show(
        "white, mean 5.5",
        &SystemParams::new(
            1.0 / 3.0,
            NoiseSpec::white(1.0, 4.0),
            NoiseSpec::white(4.0, 9.0),
        )?,
    )?;
    show("noise-free output", &SystemParams::white(0.8, 1.0, 0.0)?)?;
    show(
        "colored process noise",
        &SystemParams::new(
            1.0 / 3.0,
            NoiseSpec::colored(-0.5, 1.0),
            NoiseSpec::white(0.0, 9.0),
        )?,
    )
}
