//! Verification runner: `diracop verify <suite>` builds operators and grids
//! from a [`RunConfig`], runs the named suite and writes `report.json` plus
//! any CSV tables into the output directory.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{Overrides, RunConfig, Suite, UsageError};
pub use report::{Check, Report, Table};
pub use suites::{run_suite, Run};

use std::path::Path;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub fn write_run(run: &Run, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, contents) in &run.files {
        report::write_atomic(dir, name, contents.as_bytes())?;
    }
    let mut json = serde_json::to_string_pretty(&run.report).expect("plain data");
    json.push('\n');
    report::write_atomic(dir, "report.json", json.as_bytes())
}

/// Runs a suite, writes its outputs and prints one line per check. Returns
/// the process exit code.
pub fn execute(cfg: &RunConfig) -> i32 {
    let run = match run_suite(cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                diracop::Error::InvalidArgument(_) | diracop::Error::Domain(_) | diracop::Error::Precondition(_) => {
                    EXIT_USAGE
                }
                _ => EXIT_FAIL,
            };
        }
    };
    if let Err(e) = write_run(&run, &cfg.out) {
        eprintln!("error: cannot write reports to {}: {e}", cfg.out.display());
        return EXIT_FAIL;
    }
    for c in &run.report.checks {
        let op = match c.relation {
            report::Relation::Le => "<=",
            report::Relation::Gt => ">",
        };
        println!("{} {}: {:.3e} {op} {:e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.metric, c.tol);
    }
    for o in &run.report.observations {
        println!("note {}: {}", o.name, o.value);
    }
    println!("report written to {}", cfg.out.join("report.json").display());
    if run.report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
