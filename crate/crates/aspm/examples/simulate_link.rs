//! Monte Carlo BER sweep against the closed-form curves for coherent and
//! noncoherent 16-ASPM.
//!
//! ```bash
//! cargo run --release --example simulate_link
//! ```

use aspm::coding::{Detection, LinkConfig, Signaling};
use aspm::harness::{run_sweep, Axis, ReferenceMode, SweepSpec};
use aspm::shaping::design_psf;

fn main() {
    let psf = design_psf(256, 300).expect("design");

    for (label, config, grid) in [
        (
            "coherent 16-ASPM, N_p = 128 (spreading factor 16)",
            LinkConfig {
                m: 16,
                n_p: 128,
                n: 2,
                signaling: Signaling::Bipolar,
                detection: Detection::Coherent,
                psf_id: None,
                allow_overlap: true,
            },
            vec![-12.0, -11.0, -10.0, -9.0, -8.0],
        ),
        (
            "noncoherent 16-ASPM, N_p = 128 (spreading factor 16)",
            LinkConfig {
                m: 16,
                n_p: 128,
                n: 4,
                signaling: Signaling::Unipolar,
                detection: Detection::Noncoherent,
                psf_id: None,
                allow_overlap: true,
            },
            vec![-10.0, -9.0, -8.0, -7.0, -6.0],
        ),
    ] {
        println!("{label}:");
        let spec = SweepSpec {
            config,
            axis: Axis::SnrDb,
            grid,
            min_errors: 200,
            max_bits: 2_000_000,
            seed: 42,
            threads: 0,
            reference: ReferenceMode::IdealDecode,
        };
        let curve = run_sweep(&spec, &psf).expect("sweep");
        println!(
            "{:>8} {:>9} {:>8} {:>12} {:>12} {:>24}",
            "SNR dB", "bits", "errors", "simulated", "calculated", "Wilson 95% CI"
        );
        for p in &curve.points {
            println!(
                "{:>8.1} {:>9} {:>8} {:>12.4e} {:>12.4e} [{:.3e}, {:.3e}]{}",
                p.axis_value,
                p.bits,
                p.errors,
                p.ber,
                p.ber_analytic,
                p.ci_low,
                p.ci_high,
                if p.flagged { "  (low confidence)" } else { "" }
            );
        }
        println!();
    }
}
