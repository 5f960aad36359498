//! One line per acceptance criterion; exits non-zero if any fails.
//! `ACCEPTANCE_SEED` overrides the sampling seed.

use rmhd_contact::verification::{run_criterion, CRITERIA};

fn main() {
    let seed = std::env::var("ACCEPTANCE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20_240_601);
    let mut failed = 0;
    for id in CRITERIA {
        let outcome = run_criterion(id, seed);
        println!("{outcome}");
        failed += usize::from(!outcome.passed);
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
