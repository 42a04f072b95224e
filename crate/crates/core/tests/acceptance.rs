//! Runs the twelve acceptance criteria and prints one line per criterion.
//! Optional arguments select criteria by number, e.g. `cargo test --test acceptance -- 1 5`.

use critwave::acceptance::run_all;
use std::process::ExitCode;

fn main() -> ExitCode {
    let ids: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let outcomes = run_all(&ids, |o| println!("{}", o.line()));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
