use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use arident::repro::{self, config, ScenarioConfig};
use arident::system::simulate;
use arident::{Error, Result, SeededStream};

#[derive(Parser)]
#[command(
    name = "arident",
    version,
    about = "AR(1)/AR(2) identification of a filtered-noise process"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Closed-form mean, covariances and optimal predictors
    Theory,
    /// One simulated trajectory as `t,y`
    Simulate,
    /// Least-squares fit of one trajectory
    Fit,
    /// Batch least-squares statistics
    Batch,
    /// Per-batch estimates with running mean and variance
    Series,
    /// Run every scenario of a config file and check its bands
    Reproduce,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Opts {
    /// Scenario file; `reproduce` defaults to the bundled suite
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Scenario name (looked up in the bundled suite when no --config is given)
    #[arg(long, global = true)]
    scenario: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Variance of the process noise q (of eta for colored noise)
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta2: Option<String>,
    /// Variance of the measurement noise v
    #[arg(long, global = true, allow_hyphen_values = true)]
    xi2: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    qbar: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    vbar: Option<String>,
    /// Process noise kind: `white` or `colored:<coeff>`
    #[arg(long, global = true)]
    noise: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    order: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    seed: Option<String>,
    #[arg(long = "burn-in", global = true, allow_hyphen_values = true)]
    burn_in: Option<String>,
    /// Output file (directory for `reproduce`); stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

impl Opts {
    fn overrides(&self) -> Vec<(&'static str, &String)> {
        [
            ("lambda", &self.lambda),
            ("q.variance", &self.delta2),
            ("v.variance", &self.xi2),
            ("q.mean", &self.qbar),
            ("v.mean", &self.vbar),
            ("q.kind", &self.noise),
            ("n", &self.n),
            ("alpha", &self.alpha),
            ("kappa", &self.kappa),
            ("order", &self.order),
            ("seed", &self.seed),
            ("burn_in", &self.burn_in),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
        .collect()
    }

    fn config_text(&self) -> Result<Option<String>> {
        match (&self.config, &self.scenario) {
            (Some(path), _) => std::fs::read_to_string(path).map(Some).map_err(|e| {
                Error::config("--config", format!("cannot read {}: {e}", path.display()))
            }),
            (None, Some(_)) => Ok(Some(repro::BUNDLED_CONFIG.to_string())),
            (None, None) => Ok(None),
        }
    }

    /// Base section from the config (if any) with command-line flags on top.
    fn scenario(&self, mode: &str) -> Result<ScenarioConfig> {
        let sections = match self.config_text()? {
            Some(text) => config::parse_sections(&text)?,
            None => Vec::new(),
        };
        let (name, mut pairs) = match (&self.scenario, sections.len()) {
            (Some(name), _) => sections
                .into_iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| {
                    Error::config("--scenario", format!("no scenario named `{name}`"))
                })?,
            (None, 1) => sections.into_iter().next().unwrap(),
            (None, 0) => ("cli".to_string(), BTreeMap::new()),
            (None, _) => {
                return Err(Error::config(
                    "--scenario",
                    "config has several scenarios; pick one with --scenario",
                ))
            }
        };
        for (key, value) in self.overrides() {
            pairs.insert(key.to_string(), value.clone());
        }
        pairs.insert("mode".to_string(), mode.to_string());
        ScenarioConfig::from_pairs(&name, &pairs)
    }

    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn run(cli: &Cli) -> Result<i32> {
    let opts = &cli.opts;
    match cli.command {
        Command::Theory => {
            let cfg = opts.scenario("theory")?;
            let mut out = opts.writer()?;
            match opts.format.unwrap_or(Format::Json) {
                Format::Json => writeln!(out, "{}", repro::cmd_theory(&cfg)?.to_json()?)?,
                Format::Csv => {
                    arident::moments::covariance_for(&cfg.params()?, 2)?.write_csv(&mut out)?
                }
            }
            out.flush()?;
        }
        Command::Simulate => {
            let cfg = opts.scenario("theory")?;
            let traj = simulate(
                &cfg.params()?,
                cfg.effective_n(),
                cfg.burn_in,
                SeededStream::new(cfg.seed, 0),
            )?;
            let mut out = opts.writer()?;
            match opts.format.unwrap_or(Format::Csv) {
                Format::Csv => traj.write_csv(&mut out)?,
                Format::Json => writeln!(out, "{}", serde_json::to_string(&traj)?)?,
            }
            out.flush()?;
        }
        Command::Fit => {
            let cfg = opts.scenario("theory")?;
            let report = repro::cmd_fit(&cfg)?;
            let mut out = opts.writer()?;
            match opts.format.unwrap_or(Format::Json) {
                Format::Json => writeln!(out, "{}", report.to_json()?)?,
                Format::Csv => {
                    let coeffs = report
                        .empirical
                        .as_ref()
                        .map(|e| e.coeffs().to_vec())
                        .unwrap_or_default();
                    let header: Vec<String> =
                        (1..=coeffs.len()).map(|i| format!("phi{i}")).collect();
                    let row: Vec<String> = coeffs.iter().map(f64::to_string).collect();
                    writeln!(out, "{}\n{}", header.join(","), row.join(","))?;
                }
            }
            out.flush()?;
        }
        Command::Batch => {
            let cfg = opts.scenario("batch")?;
            let report = repro::cmd_batch(&cfg)?;
            let mut out = opts.writer()?;
            match (opts.format.unwrap_or(Format::Json), &report.empirical) {
                (Format::Csv, Some(repro::Empirical::Batch(summary))) => {
                    summary.write_csv(&mut out)?
                }
                _ => writeln!(out, "{}", report.to_json()?)?,
            }
            out.flush()?;
        }
        Command::Series => {
            let cfg = opts.scenario("batch")?;
            let rows = repro::cmd_series(&cfg)?;
            let mut out = opts.writer()?;
            repro::write_series_csv(cfg.order, &rows, &mut out)?;
            out.flush()?;
        }
        Command::Reproduce => {
            let text = match &opts.config {
                Some(path) => std::fs::read_to_string(path).map_err(|e| {
                    Error::config("--config", format!("cannot read {}: {e}", path.display()))
                })?,
                None => repro::BUNDLED_CONFIG.to_string(),
            };
            let mut scenarios = repro::parse_config(&text)?;
            if let Some(name) = &opts.scenario {
                scenarios.retain(|s| &s.name == name);
            }
            let outcome = repro::cmd_reproduce(&scenarios, opts.out.as_deref())?;
            let stdout = io::stdout();
            let mut out = stdout.lock();
            match opts.format {
                Some(Format::Json) => {
                    let reports: Vec<_> = outcome
                        .outcomes
                        .iter()
                        .filter_map(|o| o.result.as_ref().ok())
                        .collect();
                    writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?;
                }
                _ => outcome.write_summary(&mut out)?,
            }
            for o in &outcome.outcomes {
                if let Err(e) = &o.result {
                    eprintln!("error: scenario {}: {e}", o.name);
                }
            }
            return Ok(outcome.exit_code());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage problems are validation failures; help and version are not errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
