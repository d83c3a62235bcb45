//! Running a suite from code and rendering its report.

use l1a::error::Result;
use l1a::harness::{gen_instance, render_report, run_suite, ReportFormat, Suite, SuiteConfig};

fn main() -> Result<()> {
    let inst = gen_instance(&"inj-2x2".parse()?, 42, 0)?;
    println!("inj-2x2 seed 42 index 0 → {}", inst.digest);

    let mut cfg = SuiteConfig::new(Suite::Duality, 50, 42);
    cfg.profile = Some("noninj-rand5".into());
    let report = run_suite(&cfg)?;
    render_report(&report, ReportFormat::Json, std::io::stdout())?;

    let report = run_suite(&SuiteConfig::new(Suite::TraceFormula, 5, 1))?;
    render_report(&report, ReportFormat::Csv, std::io::stdout())?;
    Ok(())
}
