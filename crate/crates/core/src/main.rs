use clap::Parser;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use torus_vortex::io::{error_record, run_command, write_error_record, Command, Overrides, RunConfig};

/// Vortex dynamics on the unit torus: reduced law, sweeps, PDE cross-check.
#[derive(Parser, Debug)]
#[command(name = "torus-vortex", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration; omitted sections take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Grid size of the PDE (or of the harmonic map for verify-harmonic).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Run the inner loops on one thread.
    #[arg(long)]
    sequential: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        out: cli.out.clone(),
        dt: cli.dt,
        mu: cli.mu,
        t_final: cli.t_final,
        grid: cli.grid,
        eps: cli.eps,
    };
    let mut out_dir = None;
    let result = (|| {
        let mut cfg = match &cli.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        cfg.apply(cli.command, &overrides);
        if cli.sequential {
            cfg.parallel = false;
        }
        out_dir = Some(cfg.out.clone());
        run_command(&cfg)
    })();
    match result {
        Ok(outcome) => {
            // a closed pipe is not a failed run
            let mut so = std::io::stdout().lock();
            let _ = writeln!(so, "{}", serde_json::to_string_pretty(&outcome.results).expect("json"));
            for a in &outcome.artifacts {
                let _ = writeln!(so, "wrote {}", outcome.out.join(a).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            report(cli.command, &e, out_dir);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn report(command: Command, e: &torus_vortex::Error, out: Option<PathBuf>) {
    let rec = error_record(Some(command), e);
    eprintln!("{}", serde_json::to_string_pretty(&rec).expect("json"));
    if let Some(dir) = out {
        // best effort; the record is on stderr either way
        let _ = write_error_record(&dir, &rec);
    }
}
