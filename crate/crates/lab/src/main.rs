use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use folnerlab::{exit, reproduce, resolve_threads, run, ExperimentConfig, ExperimentKind, LabError};

#[derive(Parser)]
#[command(name = "folnerlab", version, about = "Følner, Wiener-Wintner and van der Corput experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output_dir`, then
    /// `folnerlab-out/<experiment>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; `FOLNERLAB_THREADS` takes precedence.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    FolnerCheck(RunArgs),
    Decompose(RunArgs),
    WwSweep(RunArgs),
    WwSup(RunArgs),
    Decay(RunArgs),
    VdcCheck(RunArgs),
    VdcFuzz(RunArgs),
    Correlation(RunArgs),
    /// Rerun a finished experiment and byte-compare its data files.
    Reproduce {
        /// Path to a `manifest.json`.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn run_experiment(kind: ExperimentKind, args: RunArgs) -> Result<i32, LabError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    if cfg.experiment != kind {
        return Err(LabError::Usage(format!(
            "experiment: config declares {} but the {kind} subcommand was invoked",
            cfg.experiment
        )));
    }
    let threads = resolve_threads(args.threads)?;
    let out = args
        .out
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("folnerlab-out").join(kind.as_str()));
    let outcome = run(&cfg, &out, threads)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for o in &outcome.manifest.outputs {
        println!("wrote {}", out.join(&o.path).display());
    }
    if outcome.ok() {
        Ok(exit::OK)
    } else {
        for v in &outcome.manifest.violations {
            eprintln!("invariant violated: {v}");
        }
        Ok(exit::INVARIANT)
    }
}

fn main_inner(cli: Cli) -> Result<i32, LabError> {
    let (kind, args) = match cli.command {
        Command::Reproduce { manifest, threads } => {
            let report = reproduce(&manifest, resolve_threads(threads)?)?;
            for n in &report.notes {
                eprintln!("{n}");
            }
            if let Some(d) = &report.first_diff {
                eprintln!(
                    "first difference in {} at byte {} (line {})\n  recorded: {}\n  rerun:    {}",
                    d.file,
                    d.byte_offset,
                    d.line,
                    d.recorded.as_deref().unwrap_or("<end of file>"),
                    d.rerun.as_deref().unwrap_or("<end of file>")
                );
            }
            println!(
                "reproduce: {} ({} files checked)",
                if report.matches { "identical" } else { "MISMATCH" },
                report.files_checked
            );
            return Ok(if report.matches { exit::OK } else { exit::INVARIANT });
        }
        Command::FolnerCheck(a) => (ExperimentKind::FolnerCheck, a),
        Command::Decompose(a) => (ExperimentKind::Decompose, a),
        Command::WwSweep(a) => (ExperimentKind::WwSweep, a),
        Command::WwSup(a) => (ExperimentKind::WwSup, a),
        Command::Decay(a) => (ExperimentKind::Decay, a),
        Command::VdcCheck(a) => (ExperimentKind::VdcCheck, a),
        Command::VdcFuzz(a) => (ExperimentKind::VdcFuzz, a),
        Command::Correlation(a) => (ExperimentKind::Correlation, a),
    };
    run_experiment(kind, args)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match main_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
