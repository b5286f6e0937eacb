//! `opmat`: analyze, generate and batch-check block operator matrices.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use opmat_core::harness::batch::{run_batch, BatchConfig};
use opmat_core::harness::generate::{generate, generate_hamiltonian, GeneratorKind, GeneratorSpec};
use opmat_core::harness::io::{load_instance, InstanceFile, LoadOptions, Report, ReportFormat};
use opmat_core::harness::selftest::selftest;
use opmat_core::{Error, ToleranceConfig, Verdict};

const EXIT_SINGULAR: u8 = 1;
const EXIT_INDETERMINATE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 1;

#[derive(Parser)]
#[command(name = "opmat", version, about = "Invertibility certificates for block operator matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify one instance file. Exit code: 0 invertible, 1 singular, 2 indeterminate, 3 bad input.
    Analyze {
        file: PathBuf,
        /// Rank coefficient; overrides OPMAT_TOL and the file's own value.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
        /// Replace B and C by their Hermitian parts (hamiltonian files only).
        #[arg(long)]
        symmetrize: bool,
    },
    /// Write a generated instance as JSON.
    Generate {
        #[arg(long)]
        kind: GeneratorKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        rank_a: Option<usize>,
        #[arg(long)]
        rank_b: Option<usize>,
        #[arg(long)]
        intersect: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Certify many generated instances against the oracle. Exit code 1 on any disagreement.
    Batch {
        #[arg(long)]
        kind: GeneratorKind,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_dim: usize,
        /// Include every per-instance report in the output.
        #[arg(long)]
        reports: bool,
    },
    /// Run the fixture families and invariant checks. Exit code 1 on any failure.
    Selftest {
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
}

// a closed pipe (e.g. `| head`) is not an error worth panicking over
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{}", text.trim_end());
}

fn input_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_INPUT)
}

fn base_tol() -> Result<ToleranceConfig, Error> {
    ToleranceConfig::from_env()
}

fn analyze(file: PathBuf, tol: Option<f64>, format: ReportFormat, symmetrize: bool) -> ExitCode {
    let text = match fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => return input_error(format!("{}: {e}", file.display())),
    };
    let opts = match base_tol() {
        Ok(base_tol) => LoadOptions {
            base_tol,
            rank_coeff: tol,
            symmetrize,
        },
        Err(e) => return input_error(e),
    };
    let inst = match load_instance(&text, &opts) {
        Ok(inst) => inst,
        Err(e) => return input_error(format!("{}: {e}", file.display())),
    };
    let report = Report::from(&inst.certify());
    emit(&report.render(format));
    match report.verdict {
        Verdict::Invertible => ExitCode::SUCCESS,
        Verdict::Singular => ExitCode::from(EXIT_SINGULAR),
        Verdict::Indeterminate => ExitCode::from(EXIT_INDETERMINATE),
    }
}

#[allow(clippy::too_many_arguments)]
fn generate_cmd(
    kind: GeneratorKind,
    n: usize,
    p: Option<usize>,
    rank_a: Option<usize>,
    rank_b: Option<usize>,
    intersect: Option<usize>,
    seed: u64,
    output: Option<PathBuf>,
) -> ExitCode {
    let tol = match base_tol() {
        Ok(t) => t,
        Err(e) => return input_error(e),
    };
    let p = match (kind, p) {
        (GeneratorKind::Hamiltonian | GeneratorKind::Special, None) => n,
        (_, Some(p)) => p,
        (_, None) => return input_error(format!("--p is required for kind {kind}")),
    };
    let spec = GeneratorSpec {
        rank_a,
        rank_b,
        dim_intersection: intersect,
        ..GeneratorSpec::new(kind, n, p, seed)
    };
    let file = match kind {
        GeneratorKind::Hamiltonian => generate_hamiltonian(&spec, &tol).map(|h| InstanceFile::from_hamiltonian(&h)),
        _ => generate(&spec, &tol).map(|inst| InstanceFile::from_instance(&inst)),
    };
    let json = match file {
        Ok(f) => f.to_json(),
        Err(e) => return input_error(e),
    };
    match output {
        Some(path) => {
            if let Err(e) = fs::write(&path, json + "\n") {
                return input_error(format!("{}: {e}", path.display()));
            }
        }
        None => emit(&json),
    }
    ExitCode::SUCCESS
}

fn batch(kind: GeneratorKind, count: usize, seed: u64, max_dim: usize, reports: bool) -> ExitCode {
    let tol = match base_tol() {
        Ok(t) => t,
        Err(e) => return input_error(e),
    };
    if max_dim == 0 {
        return input_error("--max-dim must be at least 1");
    }
    let out = run_batch(&BatchConfig {
        kind,
        count,
        seed,
        max_dim,
        tol,
    });
    let value = if reports {
        serde_json::json!({ "summary": out.summary, "items": out.items })
    } else {
        serde_json::json!({ "summary": out.summary })
    };
    emit(&serde_json::to_string_pretty(&value).expect("summaries serialize"));
    if out.summary.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn selftest_cmd(format: ReportFormat) -> ExitCode {
    let tol = match base_tol() {
        Ok(t) => t,
        Err(e) => return input_error(e),
    };
    let report = selftest(tol);
    match format {
        ReportFormat::Text => emit(&report.to_text()),
        ReportFormat::Json => emit(&serde_json::to_string_pretty(&report).expect("reports serialize")),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Analyze {
            file,
            tol,
            format,
            symmetrize,
        } => analyze(file, tol, format, symmetrize),
        Command::Generate {
            kind,
            n,
            p,
            rank_a,
            rank_b,
            intersect,
            seed,
            output,
        } => generate_cmd(kind, n, p, rank_a, rank_b, intersect, seed, output),
        Command::Batch {
            kind,
            count,
            seed,
            max_dim,
            reports,
        } => batch(kind, count, seed, max_dim, reports),
        Command::Selftest { format } => selftest_cmd(format),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn kinds_parse_by_name() {
        let cli = Cli::try_parse_from(["opmat", "batch", "--kind", "singular_planted"]).unwrap();
        assert!(matches!(cli.command, Command::Batch { kind: GeneratorKind::SingularPlanted, count: 1000, .. }));
        assert!(Cli::try_parse_from(["opmat", "batch", "--kind", "sparse"]).is_err());
    }
}
