use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use simplexgrad::dfo::run;
use simplexgrad::io::{read_sample_set, write_csv, write_trace_csv, RunConfig};
use simplexgrad::repro::{run_repro, ReproName, ReproResult};
use simplexgrad::{BoundReport, Error};

#[derive(Parser)]
#[command(
    name = "simplexgrad",
    version,
    about = "Simplex-gradient error bounds and bound-constrained DFO"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print every bound for a sample set file (CSV or JSON).
    Bounds {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lipschitz: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Recompute a reference experiment and compare against stored values.
    Repro {
        #[arg(value_parser = parse_repro_name)]
        name: ReproName,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Directory for CSV tables and the check report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run the optimizer from a JSON configuration file.
    Dfo {
        #[arg(long)]
        input: PathBuf,
        /// Directory for `trace.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

fn parse_repro_name(s: &str) -> Result<ReproName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

const EXIT_PARSE: u8 = 2;
const EXIT_UNPOISED: u8 = 3;
const EXIT_GOLDEN: u8 = 4;
const EXIT_INFEASIBLE: u8 = 5;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnpoisedSet { .. } => EXIT_UNPOISED,
        Error::Infeasible | Error::BothSidesInfeasible { .. } => EXIT_INFEASIBLE,
        _ => EXIT_PARSE,
    }
}

fn report_error(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if let Error::UnpoisedSet { singular_values } = e {
        eprintln!("singular values: {singular_values:?}");
    }
    ExitCode::from(exit_code(e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds {
            input,
            lipschitz,
            delta,
            format,
        } => cmd_bounds(&input, lipschitz, delta, format),
        Command::Repro {
            name,
            seed,
            out,
            format,
        } => cmd_repro(name, seed, out.as_deref(), format),
        Command::Dfo { input, out, format } => cmd_dfo(&input, out.as_deref(), format),
    };
    match result {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}

fn cmd_bounds(input: &Path, lipschitz: f64, delta: f64, format: Format) -> Result<ExitCode, Error> {
    if !lipschitz.is_finite() || lipschitz < 0.0 || !delta.is_finite() || delta < 0.0 {
        return Err(Error::Parse(
            "lipschitz and delta must be finite and nonnegative".into(),
        ));
    }
    let set = read_sample_set(input)?;
    let report = BoundReport::compute(&set, lipschitz, delta)?;
    let stdout = io::stdout();
    match format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("serializable")
            );
        }
        Format::Csv => {
            let rows = report.rows();
            let mut cols: Vec<String> = rows.iter().map(|(k, _)| k.to_string()).collect();
            cols.push("orthogonal_columns".into());
            let mut vals: Vec<String> = rows.iter().map(|(_, v)| v.to_string()).collect();
            vals.push(report.orthogonal_columns.to_string());
            write_csv(stdout.lock(), &cols, &[vals])?;
        }
        Format::Table => {
            let mut out = stdout.lock();
            writeln!(
                out,
                "n_u = {}, reference = u{}, L = {}, delta = {}",
                report.n_u, report.ref_index, lipschitz, delta
            )?;
            for (k, v) in report.rows() {
                writeln!(out, "{k:>8}  {v:.6}")?;
            }
            writeln!(out, "orthogonal columns: {}", report.orthogonal_columns)?;
            writeln!(
                out,
                "l_min partition: {:?} | {:?}",
                report.argmin_partition.subset_a, report.argmin_partition.subset_c
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_repro_files(result: &ReproResult, dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    for t in &result.tables {
        let file = fs::File::create(dir.join(format!("{}.csv", t.name)))?;
        write_csv(io::BufWriter::new(file), &t.columns, &t.rows)?;
    }
    let report = json!({
        "name": result.name,
        "passed": result.passed(),
        "checks": result.checks,
        "summary": result.summary,
        "notes": result.notes,
    });
    fs::write(
        dir.join(format!("{}_checks.json", result.name)),
        serde_json::to_string_pretty(&report).expect("serializable"),
    )?;
    Ok(())
}

fn cmd_repro(
    name: ReproName,
    seed: u64,
    out: Option<&Path>,
    format: Format,
) -> Result<ExitCode, Error> {
    let result = run_repro(name, seed)?;
    if let Some(dir) = out {
        write_repro_files(&result, dir)?;
    }
    let stdout = io::stdout();
    let mut w = stdout.lock();
    match format {
        Format::Json => {
            let report = json!({
                "name": result.name,
                "passed": result.passed(),
                "checks": result.checks,
                "summary": result.summary,
                "notes": result.notes,
            });
            writeln!(
                w,
                "{}",
                serde_json::to_string_pretty(&report).expect("serializable")
            )?;
        }
        Format::Csv => {
            let cols: Vec<String> = ["label", "expected", "computed", "pass"]
                .map(String::from)
                .to_vec();
            let rows: Vec<Vec<String>> = result
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.label.clone(),
                        c.expected.to_string(),
                        c.computed.to_string(),
                        c.pass.to_string(),
                    ]
                })
                .collect();
            write_csv(w, &cols, &rows)?;
        }
        Format::Table => {
            writeln!(w, "{}", result.name)?;
            for c in &result.checks {
                writeln!(
                    w,
                    "  [{}] {:<40} expected {:>10.4}  computed {:>12.6}",
                    if c.pass { "pass" } else { "FAIL" },
                    c.label,
                    c.expected,
                    c.computed
                )?;
            }
            for (k, v) in &result.summary {
                writeln!(w, "  {k} = {v}")?;
            }
            for n in &result.notes {
                writeln!(w, "  note: {n}")?;
            }
        }
    }
    if result.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("reference comparison failed");
        Ok(ExitCode::from(EXIT_GOLDEN))
    }
}

fn cmd_dfo(input: &Path, out: Option<&Path>, format: Format) -> Result<ExitCode, Error> {
    let cfg = RunConfig::read(input)?;
    let dfo = cfg.dfo_config()?;
    let mut oracle = cfg.oracle()?;
    let (trace, failure) = match run(&mut oracle, &cfg.u0(), &dfo) {
        Ok(t) => (t, None),
        Err(f) => match f.trace {
            Some(t) => (t, Some(f.error)),
            None => return Err(f.error),
        },
    };
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let file = fs::File::create(dir.join("trace.csv"))?;
        write_trace_csv(io::BufWriter::new(file), &trace)?;
    }
    let last = trace.last_point();
    let best = trace
        .records()
        .iter()
        .map(|r| r.f_noisy)
        .chain(trace.init_values.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let stdout = io::stdout();
    let mut w = stdout.lock();
    match format {
        Format::Csv => write_trace_csv(&mut w, &trace)?,
        Format::Json => {
            let summary = json!({
                "final_point": last.iter().collect::<Vec<_>>(),
                "best_noisy_value": best,
                "iterations": trace.records().len(),
                "eval_count": trace.eval_count(),
                "stopped_by": failure.as_ref().map(|e| e.to_string()),
            });
            writeln!(
                w,
                "{}",
                serde_json::to_string_pretty(&summary).expect("serializable")
            )?;
        }
        Format::Table => {
            writeln!(w, "final point: {:?}", last.iter().collect::<Vec<_>>())?;
            writeln!(w, "best noisy value: {best}")?;
            writeln!(w, "iterations: {}", trace.records().len())?;
            writeln!(w, "evaluations: {}", trace.eval_count())?;
        }
    }
    match failure {
        Some(e) => Ok(report_error(&e)),
        None => Ok(ExitCode::SUCCESS),
    }
}
