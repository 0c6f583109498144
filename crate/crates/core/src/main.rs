use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cyclicity_lab::cli::suite::{suite, SUITES};
use cyclicity_lab::cli::{run, write_outputs, Manifest, VERSION};
use cyclicity_lab::LabError;

#[derive(Parser)]
#[command(name = "cyclicity-lab", version, about = "Cyclicity experiments for the shift on spaces of analytic functions")]
struct Cli {
    /// Directory for JSON and CSV outputs.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Multiplies every pass/fail tolerance; recorded in the outputs.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment manifest.
    Run { manifest: PathBuf },
    /// Run a curated suite and print the per-criterion table.
    Suite { name: String },
    /// List the available suites.
    ListSuites,
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_COMPUTATION: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

fn exit_code(e: &LabError) -> ExitCode {
    match e {
        LabError::Validation { .. } | LabError::UnknownSuite(_) => ExitCode::from(EXIT_VALIDATION),
        _ => ExitCode::from(EXIT_COMPUTATION),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tolerance_scale > 0.0 && cli.tolerance_scale.is_finite()) {
        eprintln!("error: --tolerance-scale must be a positive number");
        return ExitCode::from(EXIT_VALIDATION);
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    }
    match cli.command {
        Command::ListSuites => {
            for (name, about) in SUITES {
                println!("{name:<10} {about}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { manifest } => {
            let text = match std::fs::read_to_string(&manifest) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", manifest.display());
                    return ExitCode::from(EXIT_VALIDATION);
                }
            };
            let m = match Manifest::parse(&text) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_code(&e);
                }
            };
            match run(&m, cli.tolerance_scale).and_then(|out| write_outputs(&m, &out, &cli.out).map(|_| out)) {
                Ok(out) => {
                    for w in &out.record.warnings {
                        eprintln!("warning: {w}");
                    }
                    println!(
                        "{} ({}) done in {:.2}s, manifest {}, outputs in {}",
                        m.name,
                        m.experiment.kind(),
                        out.record.elapsed_seconds,
                        &out.record.manifest_hash[..12],
                        cli.out.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: experiment `{}` ({}): {e}", m.name, m.experiment.kind());
                    exit_code(&e)
                }
            }
        }
        Command::Suite { name } => match suite(&name, cli.tolerance_scale) {
            Ok(report) => {
                print!("{}", report.summary_table());
                let record = serde_json::json!({
                    "suite": report.suite,
                    "software_version": VERSION,
                    "tolerance_scale": report.tolerance_scale,
                    "rows": report.rows,
                    "seconds": report.seconds,
                });
                let written = std::fs::create_dir_all(&cli.out).and_then(|_| {
                    std::fs::write(
                        cli.out.join(format!("suite-{name}.json")),
                        serde_json::to_string_pretty(&record).expect("record serializes") + "\n",
                    )
                });
                if let Err(e) = written {
                    eprintln!("error: cannot write suite summary: {e}");
                    return ExitCode::from(EXIT_COMPUTATION);
                }
                if report.all_pass() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_ACCEPTANCE)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        },
    }
}
