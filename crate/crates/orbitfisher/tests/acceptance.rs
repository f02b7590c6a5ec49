//! Verification suite for the library's headline contracts. Runs every
//! criterion with the default seed and tolerance and prints one line per
//! criterion with the measured values next to their bounds.

use orbitfisher::selftest::{format_result, run_criterion, CRITERIA, DEFAULT_SEED};
use orbitfisher::tol;

fn main() {
    let mut failures = 0usize;
    for id in 1..=CRITERIA {
        match run_criterion(id, DEFAULT_SEED, tol::DEFAULT_TOL) {
            Ok(result) => {
                println!("{}", format_result(&result));
                if !result.passed {
                    failures += 1;
                }
            }
            Err(err) => {
                println!("criterion {id} [FAIL] runner error: {err}");
                failures += 1;
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all {CRITERIA} criteria passed");
}
