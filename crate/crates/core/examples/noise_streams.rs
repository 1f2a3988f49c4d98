//! White and colored noise sources from split, seeded streams.
//!
//! ```bash
//! cargo run --release --example noise_streams
//! ```

use arident::moments::sample_covariance;
use arident::noise::{sample_colored, sample_white};
use arident::{NoiseSpec, SeededStream};

fn main() -> arident::Result<()> {
    let master = SeededStream::new(7, 0);
    let (q_stream, v_stream) = master.split()?;
    println!("q stream {:?}, v stream {:?}", q_stream, v_stream);

    let white = sample_white(&NoiseSpec::white(1.0, 4.0), 200_000, q_stream)?;
    let w = sample_covariance(&white, 2)?;
    println!("white  WN(1, 4): mean {:.3}, psi {:.3?}", w.mean, w.values);

    // q(t) = -0.5 q(t-1) + eta(t), eta ~ WN(0, 1); stationary variance 4/3
    let spec = NoiseSpec::colored(-0.5, 1.0);
    let colored = sample_colored(&spec, 200_000, v_stream, 1000)?;
    let c = sample_covariance(&colored, 2)?;
    println!(
        "colored a=-0.5: psi {:.3?} (stationary variance {:.3})",
        c.values,
        spec.stationary_variance()
    );

    // same stream, same numbers
    let again = sample_white(&NoiseSpec::white(1.0, 4.0), 5, q_stream)?;
    assert_eq!(&again[..], &white[..5]);
    println!("first draws {:.4?}", again);
    Ok(())
}
