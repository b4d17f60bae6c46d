mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use conharm::frequency::ToleranceProfile;

use commands::{Ctx, Outcome};
use config::ExperimentConfig;

/// Growth spectra and frequency experiments for harmonic functions and
/// 1-forms on Riemannian cones.
#[derive(Parser, Debug)]
#[command(name = "conharm", version, about)]
struct Cli {
    /// TOML experiment config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Where reports go (overrides `out_dir` in the config; default `out`).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Also write (log r, log H, log F, N) columns for plotting.
    #[arg(long, global = true)]
    plot_data: bool,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    tolerance_profile: Option<ProfileArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ProfileArg {
    Analytic,
    Mesh,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Function and 1-form growth spectra in the configured window.
    Spectrum,
    /// Every homogeneous harmonic 1-form family with its filter status.
    Classify,
    /// Frequency profile, monotonicity, 3-circle, decay and doubling checks.
    Frequency,
    /// Run the acceptance suite.
    Verify,
    /// Brute-force oracle reports: FFT, mesh eigensolves, ODE and finite differences.
    Oracle,
}

fn load(cli: &Cli) -> Result<Ctx> {
    let (mut cfg, base) = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            let base = p.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
            (ExperimentConfig::from_toml(&text)?, base)
        }
        None => (ExperimentConfig::default(), PathBuf::from(".")),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tolerance_profile {
        cfg.tolerance_profile = match t {
            ProfileArg::Analytic => ToleranceProfile::Analytic,
            ProfileArg::Mesh => ToleranceProfile::Mesh,
        };
    }
    let out_dir = match (&cli.out_dir, &cfg.out_dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => base.join(d),
        (None, None) => PathBuf::from("out"),
    };
    // the output location is not part of the experiment
    cfg.out_dir = None;
    Ok(Ctx {
        cfg,
        base,
        out_dir,
        plot_data: cli.plot_data,
    })
}

/// 1 for failed numerical checks, 2 for bad input.
fn error_code(err: &anyhow::Error) -> u8 {
    let core = err.chain().find_map(|e| e.downcast_ref::<conharm::Error>());
    match core {
        Some(conharm::Error::OracleMismatch(_) | conharm::Error::NoConvergence(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<Outcome> {
        let ctx = load(&cli)?;
        match cli.command {
            Command::Spectrum => commands::spectrum(&ctx),
            Command::Classify => commands::classify(&ctx),
            Command::Frequency => commands::frequency(&ctx),
            Command::Verify => commands::verify(&ctx),
            Command::Oracle => commands::oracle(&ctx),
        }
    };
    match run() {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        let check = anyhow::Error::new(conharm::Error::OracleMismatch("x".into())).context("running");
        assert_eq!(error_code(&check), 1);
        let solver = anyhow::Error::new(conharm::Error::NoConvergence("x".into()));
        assert_eq!(error_code(&solver), 1);
        let input = anyhow::Error::new(conharm::Error::Parse("x".into()));
        assert_eq!(error_code(&input), 2);
        assert_eq!(error_code(&anyhow::anyhow!("bad config")), 2);
    }
}
