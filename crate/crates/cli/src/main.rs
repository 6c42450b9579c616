use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fso_sim::{core_formula, cross_check, load_config, render_csv, run_sweep, write_output, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "fso-sim", version, about = "2x2 FSO link BER and outage simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sweep and write CSV.
    Run(Common),
    /// Cross-check closed-form BERs against the waveform oracle.
    Validate(Common),
    /// Like `run`, with the sweep axis and grid given on the command line.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Axis to sweep: snr_db, d or w_z.
        #[arg(long)]
        axis: String,
        /// Comma-separated values or start:step:stop.
        #[arg(long)]
        grid: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a config key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output CSV path (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    samples: Option<u64>,
    #[arg(long, value_name = "N", env = "FSO_SIM_WORKERS")]
    workers: Option<usize>,
}

impl Common {
    fn load(&self, extra: &[String]) -> Result<RunConfig, CliError> {
        let mut overrides = self.overrides.clone();
        overrides.extend_from_slice(extra);
        if let Some(s) = self.seed {
            overrides.push(format!("mc.seed={s}"));
        }
        if let Some(n) = self.samples {
            overrides.push(format!("mc.samples={n}"));
        }
        if let Some(w) = self.workers {
            overrides.push(format!("mc.workers={w}"));
        }
        if let Some(p) = &self.out {
            overrides.push(format!("output.path={}", p.display()));
        }
        load_config(self.config.as_deref(), &overrides)
    }
}

fn run(common: &Common, extra: &[String]) -> Result<(), CliError> {
    let cfg = common.load(extra)?;
    let rows = run_sweep(&cfg)?;
    let bytes = render_csv(&cfg, &rows).map_err(|e| CliError::Io {
        path: PathBuf::from("<csv>"),
        source: e.into(),
    })?;
    match &cfg.output {
        Some(path) => write_output(path, &bytes),
        None => std::io::stdout().write_all(&bytes).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn validate(common: &Common) -> Result<(), CliError> {
    let cfg = common.load(&[])?;
    let results = cross_check(&cfg, &core_formula)?;
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    println!("{} of {} checks passed", results.len() - failed, results.len());
    if failed > 0 {
        return Err(CliError::ChecksFailed {
            failed,
            total: results.len(),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(common) => run(common, &[]),
        Command::Validate(common) => validate(common),
        Command::Sweep { common, axis, grid } => {
            let mut extra = vec![format!("sweep.axis={axis}")];
            if let Some(g) = grid {
                extra.push(format!("sweep.grid={g}"));
            }
            run(common, &extra)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fso-sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
