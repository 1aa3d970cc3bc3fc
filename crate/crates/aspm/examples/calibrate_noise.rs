//! Noise calibration: solve for the channel sigma that hits a target
//! noncentrality and confirm it empirically.
//!
//! ```bash
//! cargo run --release --example calibrate_noise
//! ```

use aspm::coding::{Detection, LinkConfig, Signaling};
use aspm::harness::empirical_lambda;
use aspm::link::calibrate_noise;
use aspm::shaping::design_psf;

fn main() {
    let psf = design_psf(256, 300).expect("design");
    let configs = [
        LinkConfig {
            m: 16,
            n_p: 128,
            n: 2,
            signaling: Signaling::Bipolar,
            detection: Detection::Coherent,
            psf_id: None,
            allow_overlap: true,
        },
        LinkConfig {
            m: 16,
            n_p: 128,
            n: 4,
            signaling: Signaling::Unipolar,
            detection: Detection::Noncoherent,
            psf_id: None,
            allow_overlap: true,
        },
    ];

    for config in &configs {
        println!("{:?} detection:", config.detection);
        for &lambda in &[16.0, 64.0, 128.0] {
            let cal = calibrate_noise(lambda, config, &psf, 1.0).unwrap();
            let measured = empirical_lambda(config, &psf, cal.sigma, 1.0, 400_000, 7).unwrap();
            println!(
                "  target lambda {:>6.1}: sigma = {:.5}, A = {:.4}, sigma_n^2 = {:.5} -> measured {:>7.2} ({:+.2}%)",
                lambda,
                cal.sigma,
                cal.amplitude,
                cal.noise_variance,
                measured,
                100.0 * (measured - lambda) / lambda
            );
        }
    }

    println!("\nconversion chain at M = 16, N_p = 128 (lambda = N_p Gamma = 2 (Eb/N0) log2 M):");
    let p = aspm::analytics::convert(aspm::analytics::PointInput::Lambda(128.0), 16, 128).unwrap();
    println!(
        "  lambda 128 <-> Gamma {:.2} ({:.2} dB) <-> Eb/N0 {:.2} ({:.2} dB), mu = {}",
        p.snr, p.snr_db, p.ebn0, p.ebn0_db, p.mu
    );
}
