//! Design a pulse-shaping filter pair and inspect its diagnostics.
//!
//! ```bash
//! cargo run --release --example design_psf
//! ```

use aspm::shaping::{acf_diagnostics, design_psf, hilbert_pair_error, time_bandwidth_product};

fn main() {
    let psf = design_psf(256, 300).expect("refinement converges at L = 256");
    let d = acf_diagnostics(&psf).expect("diagnostics");

    println!("designed PSF: {} taps ({})", psf.length, psf.design_metadata.method);
    println!("refinement iterations used: {}", psf.design_metadata.iters);
    println!();

    println!("matched-filter response w[k] against the RC samples (1, 1/2, 0, ...):");
    for lag in 0..6isize {
        println!("  w[{lag:>2}] = {:+.5}", d.at_lag(&d.w, lag));
    }
    println!("  max |w[k] - RC[k]| over all lags: {:.2e}", d.acf_error);
    println!();

    println!("noncoherent response v2[k] on the n = 4 sampling lattice:");
    for lag in [4isize, 8, 12, 16, 32, 64] {
        println!("  v2[{lag:>2}] = {:.4e}", d.at_lag(&d.v2, lag));
    }
    println!("  (the +-4 value is the irreducible Hilbert-pair cross term)");
    println!();

    let ssb = hilbert_pair_error(&psf).unwrap();
    println!("negative-frequency energy fraction: {ssb:.2e} (single sideband)");

    let tbp_psf = time_bandwidth_product(&psf.taps_g, Some(&psf.taps_h));
    let tbp_acf = time_bandwidth_product(&d.w, None);
    println!("time-bandwidth product: psf {tbp_psf:.1} vs its ACF {tbp_acf:.1}");

    println!(
        "PAPR: sparse designed train {:.2} dB -> shaped train {:.2} dB",
        d.designed_train_papr_db, d.shaped_train_papr_db
    );

    let path = std::env::temp_dir().join("aspm_psf_256.json");
    std::fs::write(&path, serde_json::to_string_pretty(&psf).unwrap()).unwrap();
    println!("\narchive written to {}", path.display());
}
