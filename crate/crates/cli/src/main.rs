use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use qdiag_cli::dynamics::dynamics_stats;
use qdiag_cli::report::{emit_report, Format, RelationSummary, Report, VerifySummary};
use qdiag_cli::spec_io::{load_json, parse_certificate, parse_gen_word, parse_unitary_spec};
use qdiag_cli::sweep::{run_sweep, Predicate, SweepConfig, DEFAULT_BUDGET};
use qdiag_cli::CliError;
use qdiag_core::canrep::{verify_identity, GenSym, GenWord, IdentityReport};
use qdiag_core::extend::{
    decide_extendible, invert_check, verify_structural_identity, CheckInversion, Decision,
    ExtensionCertificate,
};

#[derive(Parser)]
#[command(
    name = "qdiag",
    version,
    about = "Decide, certify and sweep diagonal automorphisms of the 2-adic ring algebra"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Maximum table level (also read from QDIAG_LEVEL_CAP).
    #[arg(long, global = true)]
    level_cap: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum PredicateArg {
    #[value(name = "FIXEDPOINT")]
    FixedPoint,
    #[value(name = "S2FIXED")]
    S2Fixed,
    #[value(name = "S2_AND_S1SQ_FIXED")]
    S2AndS1SqFixed,
}

#[derive(Subcommand)]
enum Command {
    /// Decide extendibility of a localized diagonal unitary.
    Decide {
        /// Unitary spec: inline JSON or a file path.
        spec: String,
    },
    /// Compute the check image of an extendible unitary.
    Checkmap { spec: String },
    /// Invert the check map on a localized target.
    Invert { spec: String },
    /// Re-verify a certificate through the window oracle, or compare two
    /// generator words with --lhs/--rhs.
    Verify {
        /// Certificate JSON (inline or path); omit when using --lhs/--rhs.
        cert: Option<String>,
        /// Window half-width; default 2^(level+4) for certificates, 256 for words.
        #[arg(long)]
        window: Option<i64>,
        /// Left generator word, e.g. "D:cert.json#check U S2".
        #[arg(long, requires = "rhs")]
        lhs: Option<String>,
        /// Right generator word.
        #[arg(long, requires = "lhs")]
        rhs: Option<String>,
    },
    /// Odometer orbit statistics.
    Dynamics {
        /// Truncation depth; the orbit lives on words of this length.
        #[arg(long)]
        level: u32,
        /// Cylinder word over letters 1 and 2; empty for the whole set.
        #[arg(long, default_value = "")]
        cylinder: String,
        /// Iteration cap; default is one full period.
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Exhaustive sweep over a phase grid.
    Sweep {
        /// Table level to enumerate at.
        #[arg(long)]
        level: u32,
        /// Grid spec `roots:<n>` with n a power of two.
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum)]
        predicate: PredicateArg,
        /// Enumerate gauge x normalized inner instead of raw tables.
        #[arg(long)]
        coboundary: bool,
        /// Candidate limit; exceeding it exits with code 3. Default 2^27.
        #[arg(long)]
        budget: Option<u64>,
        /// Disable parallel workers.
        #[arg(long)]
        sequential: bool,
    },
}

fn parse_grid(grid: &str) -> Result<u32, CliError> {
    let n: u64 = grid
        .strip_prefix("roots:")
        .unwrap_or(grid)
        .parse()
        .map_err(|_| CliError::BadToken(format!("grid {grid}")))?;
    if n == 0 || !n.is_power_of_two() {
        return Err(CliError::BadToken(format!(
            "grid {grid}: root count must be a power of two"
        )));
    }
    Ok(n.trailing_zeros())
}

fn apply_level_cap(cli_cap: Option<u32>) -> Result<(), CliError> {
    let cap = match cli_cap {
        Some(c) => Some(c),
        None => match std::env::var("QDIAG_LEVEL_CAP") {
            Ok(v) => Some(v.parse().map_err(|_| {
                CliError::BadLevel(format!("QDIAG_LEVEL_CAP: {v} is not a number"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(cap) = cap {
        if cap > 62 {
            return Err(CliError::BadLevel(format!("level cap {cap} exceeds 62")));
        }
        qdiag_core::set_level_cap(cap);
    }
    Ok(())
}

fn relation_summary(name: &str, report: &IdentityReport) -> RelationSummary {
    RelationSummary {
        name: name.into(),
        safe_count: report.safe_count,
        mismatches: report.mismatches.len(),
        first_mismatch: report.mismatches.first().map(|mm| mm.m),
    }
}

/// The extension unitary relations for a certificate, as oracle words:
/// check U d S1 = d S2 check U and check U d S2 = d S1.
fn certificate_relations(cert: &ExtensionCertificate) -> [(String, GenWord, GenWord); 2] {
    let diag = |d: &qdiag_core::diagonal::DiagonalUnitary| GenSym::Diag(d.clone());
    let eq1 = (
        "check U d S1 == d S2 check U".to_string(),
        GenWord::new(vec![diag(&cert.check), GenSym::U, diag(&cert.source), GenSym::S1]),
        GenWord::new(vec![diag(&cert.source), GenSym::S2, diag(&cert.check), GenSym::U]),
    );
    let eq2 = (
        "check U d S2 == d S1".to_string(),
        GenWord::new(vec![diag(&cert.check), GenSym::U, diag(&cert.source), GenSym::S2]),
        GenWord::new(vec![diag(&cert.source), GenSym::S1]),
    );
    [eq1, eq2]
}

fn run(command: Command) -> Result<Report, CliError> {
    match command {
        Command::Decide { spec } => {
            let d = parse_unitary_spec(&load_json(&spec)?)?;
            let mut report = Report::new("decide");
            match decide_extendible(&d) {
                Decision::Extendible(cert) => {
                    report.verdict = Some("extendible".into());
                    report.certificate = Some(cert);
                }
                Decision::NotExtendible(ob) => {
                    report.verdict = Some("not_extendible".into());
                    report.obstruction = Some(ob);
                }
            }
            Ok(report)
        }
        Command::Checkmap { spec } => {
            let d = parse_unitary_spec(&load_json(&spec)?)?;
            let mut report = Report::new("checkmap");
            match decide_extendible(&d) {
                Decision::Extendible(cert) => {
                    report.verdict = Some("extendible".into());
                    report.table = Some(cert.check.clone());
                    report.certificate = Some(cert);
                }
                Decision::NotExtendible(ob) => {
                    report.verdict = Some("not_extendible".into());
                    report.obstruction = Some(ob);
                }
            }
            Ok(report)
        }
        Command::Invert { spec } => {
            let c = parse_unitary_spec(&load_json(&spec)?)?;
            let mut report = Report::new("invert");
            match invert_check(&c)? {
                CheckInversion::Preimage(d) => {
                    report.verdict = Some("in_image".into());
                    // The preimage certificate doubles as a receipt: its
                    // check image is the requested target.
                    if let Decision::Extendible(cert) = decide_extendible(&d) {
                        report.certificate = Some(cert);
                    }
                    report.table = Some(d);
                }
                CheckInversion::NotInImage { table_product } => {
                    report.verdict = Some("not_in_image".into());
                    report.image_witness = Some(table_product);
                }
            }
            Ok(report)
        }
        Command::Verify {
            cert,
            window,
            lhs,
            rhs,
        } => {
            let mut report = Report::new("verify");
            if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
                let window = window.unwrap_or(256);
                let lhs = parse_gen_word(&lhs)?;
                let rhs = parse_gen_word(&rhs)?;
                let identity = verify_identity(&lhs, &rhs, window)?;
                report.verify = Some(VerifySummary {
                    window,
                    certificate_consistent: None,
                    relations: vec![relation_summary("lhs == rhs", &identity)],
                    structural_checked: None,
                    structural_violations: None,
                });
                report.verdict = Some(if identity.passed() { "verified" } else { "failed" }.into());
                return Ok(report);
            }
            let cert = cert.ok_or_else(|| {
                CliError::BadToken("verify needs a certificate or --lhs/--rhs".into())
            })?;
            let cert = parse_certificate(&load_json(&cert)?)?;
            let window = window.unwrap_or(1i64 << (cert.source.level() + 4));
            let consistent = match decide_extendible(&cert.source) {
                Decision::Extendible(recomputed) => recomputed == cert,
                Decision::NotExtendible(_) => false,
            };
            let mut relations = Vec::new();
            let mut all_pass = consistent;
            for (name, lhs, rhs) in certificate_relations(&cert) {
                let identity = verify_identity(&lhs, &rhs, window)?;
                all_pass &= identity.passed();
                relations.push(relation_summary(&name, &identity));
            }
            let structural = verify_structural_identity(&cert, -window..window);
            all_pass &= structural.passed();
            report.verify = Some(VerifySummary {
                window,
                certificate_consistent: Some(consistent),
                relations,
                structural_checked: Some(structural.checked),
                structural_violations: Some(structural.violations.len()),
            });
            report.verdict = Some(if all_pass { "verified" } else { "failed" }.into());
            Ok(report)
        }
        Command::Dynamics {
            level,
            cylinder,
            steps,
        } => {
            let cylinder = cylinder
                .parse()
                .map_err(|e| CliError::BadWord(format!("{cylinder}: {e}")))?;
            let stats = dynamics_stats(level, &cylinder, steps)?;
            let mut report = Report::new("dynamics");
            report.dynamics = Some(stats);
            Ok(report)
        }
        Command::Sweep {
            level,
            grid,
            predicate,
            coboundary,
            budget,
            sequential,
        } => {
            let cfg = SweepConfig {
                level,
                grid_exp: parse_grid(&grid)?,
                predicate: match predicate {
                    PredicateArg::FixedPoint => Predicate::FixedPoint,
                    PredicateArg::S2Fixed => Predicate::S2Fixed,
                    PredicateArg::S2AndS1SqFixed => Predicate::S2AndS1SqFixed,
                },
                coboundary,
                budget: budget.unwrap_or(DEFAULT_BUDGET),
                parallel: !sequential,
            };
            let outcome = run_sweep(&cfg)?;
            let mut report = Report::new("sweep");
            report.verdict = Some(format!("{} survivors", outcome.survivors.len()));
            report.sweep = Some(outcome);
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
        FormatArg::Text => Format::Text,
    };
    let started = Instant::now();
    let outcome = apply_level_cap(cli.level_cap).and_then(|()| run(cli.command));
    match outcome {
        Ok(mut report) => {
            report.elapsed_ms = started.elapsed().as_millis() as u64;
            let rendered = emit_report(&report, format);
            match cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, rendered) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{rendered}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
