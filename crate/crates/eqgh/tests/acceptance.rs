//! Runs every numbered check at its stated tolerance and time limit and
//! prints one PASS/FAIL line each. Exits nonzero if any check fails.

use eqgh::checks::{run_check, CheckParams, CHECK_COUNT};

fn main() {
    let params = CheckParams::default();
    let mut failed = 0;
    for id in 1..=CHECK_COUNT {
        let row = run_check(id, &params).expect("id in range");
        println!("{}", row.line());
        println!("    {}", row.detail);
        if !row.pass() {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", CHECK_COUNT as usize - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
