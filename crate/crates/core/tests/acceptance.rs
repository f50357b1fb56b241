//! Prints one PASS/FAIL line per acceptance criterion and fails if any fails.
//!
//! Runs without the libtest harness so the lines always reach the output.

use std::process::ExitCode;

use kdv_gas::validation::{Suite, CRITERION_IDS};

fn main() -> ExitCode {
    let suite = Suite::reference();
    let mut failed = 0;
    for id in CRITERION_IDS {
        match suite.criterion(id) {
            Ok(c) => {
                println!("{}", c.summary_line());
                if !c.pass() {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("FAIL criterion {id}: error: {e}");
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", CRITERION_IDS.len() - failed, CRITERION_IDS.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
