//! Run the bundled scenario suite and write per-scenario JSON/CSV.
//!
//! ```bash
//! cargo run --release --example reproduce_suite -- out/
//! ```

use std::io;
use std::path::PathBuf;

use arident::repro::{cmd_reproduce, parse_config, BUNDLED_CONFIG};

fn main() -> arident::Result<()> {
    let out = std::env::args_os().nth(1).map(PathBuf::from);
    let scenarios = parse_config(BUNDLED_CONFIG)?;
    let outcome = cmd_reproduce(&scenarios, out.as_deref())?;
    outcome.write_summary(io::stdout().lock())?;
    if let Some(r) = outcome.report("white-ar1-n") {
        println!("white-ar1-n deltas: {:?}", r.deltas);
    }
    std::process::exit(outcome.exit_code());
}
