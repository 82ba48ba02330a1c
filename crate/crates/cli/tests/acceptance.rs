//! Runs every acceptance criterion at full size and prints one line each.
//! Exits nonzero when any criterion fails.

use std::process::ExitCode;

use cryptkit_core::selftest;

fn main() -> ExitCode {
    // `cargo test -- --list` and filters pass arguments; only a bare run executes.
    if std::env::args().skip(1).any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    for id in 1..=selftest::CRITERIA {
        let r = selftest::run(id, false);
        println!("{r} [{:.1} s]", r.elapsed.as_secs_f64());
        failed += usize::from(!r.passed);
    }
    println!("acceptance: {}/{} criteria passed", selftest::CRITERIA as usize - failed, selftest::CRITERIA);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
