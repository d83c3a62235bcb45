use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use l1a::center::CenterItem;
use l1a::diagonal::{regularized_norm_scan, write_scan_csv};
use l1a::error::{Error, Result};
use l1a::harness::{gen_instance, read_report, render_report, GeneratedInstance, InstanceBody, ReportFormat, SuiteConfig};
use l1a::io::{read_json, write_json};

#[derive(Parser)]
#[command(name = "l1a", version, about = "Seeded suites for a-weighted L1 norms on block matrix algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one instance of a profile.
    Gen {
        #[arg(long)]
        profile: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a suite; exits 1 if any trial fails.
    Run {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Center item, by name (`subadd_abs`) or numeral (`vii`).
        #[arg(long)]
        item: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a saved report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Regularized norms of a diagonal-model instance along a λ grid, as CSV.
    Scan {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000,10000,100000,1000000")]
        lambda: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::Json(j) if j.is_io() => 3,
        Error::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => 3,
        Error::Config(_) | Error::Profile(_) | Error::InvalidParameter(_) | Error::Json(_) => 2,
        _ => 1,
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_config(
    suite: Option<String>,
    config: Option<PathBuf>,
    trials: Option<usize>,
    seed: Option<u64>,
    item: Option<String>,
    out: Option<PathBuf>,
) -> Result<SuiteConfig> {
    let mut raw = match &config {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str::<serde_json::Value>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => serde_json::json!({}),
    };
    let obj = raw.as_object_mut().ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
    if let Some(s) = suite {
        obj.insert("suite".into(), s.into());
    }
    if let Some(t) = trials {
        obj.insert("trials".into(), t.into());
    }
    if let Some(s) = seed {
        obj.insert("seed".into(), s.into());
    }
    if let Some(i) = item {
        obj.insert("item".into(), i.parse::<CenterItem>()?.name().into());
    }
    if let Some(o) = out {
        obj.insert("output_path".into(), o.display().to_string().into());
    }
    serde_json::from_value(raw).map_err(|e| Error::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen { profile, seed, index, out } => {
            let inst = gen_instance(&profile.parse()?, seed, index)?;
            write_json(&out, &inst)?;
            println!("{} {}", inst.profile, inst.digest);
            Ok(true)
        }
        Command::Run { suite, config, trials, seed, item, out } => {
            let cfg = load_config(suite, config, trials, seed, item, out)?;
            let report = l1a::harness::run_suite(&cfg)?;
            println!("{}: {}/{} passed ({})", report.suite, report.passed, report.trials, report.profile);
            for r in report.records.iter().filter(|r| !r.pass).take(10) {
                println!("  trial {}: {}", r.index, r.note.as_deref().unwrap_or("failed"));
            }
            if cfg.output_path.is_none() {
                render_report(&report, ReportFormat::Json, io::stdout().lock())?;
            }
            Ok(report.all_pass())
        }
        Command::Report { input, format } => {
            let format: ReportFormat = format.parse()?;
            let report = read_report(&input)?;
            render_report(&report, format, io::stdout().lock())?;
            Ok(true)
        }
        Command::Scan { input, lambda, out } => {
            let inst: GeneratedInstance = read_json(&input)?;
            let InstanceBody::Diagonal(d) = &inst.instance else {
                return Err(Error::Config("scan needs a diagonal instance".into()));
            };
            let values = regularized_norm_scan(&d.operator()?, &d.support, &lambda)?;
            write_scan_csv(output(out.as_ref())?, &lambda, &values)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
