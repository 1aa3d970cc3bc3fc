//! Run the cross-module invariant suite (the same checks as
//! `aspm verify`).
//!
//! ```bash
//! cargo run --release --example verify_invariants
//! ```

use aspm::cli::run_invariant_suite;
use aspm::shaping::design_psf;

fn main() {
    let psf = design_psf(256, 300).expect("design");
    let results = run_invariant_suite(&psf);
    let mut failed = 0;
    for r in &results {
        println!("{} {:<40} {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        failed += usize::from(!r.passed);
    }
    println!();
    if failed == 0 {
        println!("all {} checks passed", results.len());
    } else {
        println!("{failed} of {} checks failed", results.len());
        std::process::exit(1);
    }
}
