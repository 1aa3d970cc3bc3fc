//! Closed-form BER curves for every modulation variant.
//!
//! ```bash
//! cargo run --release --example analyze_ber
//! ```

use aspm::analytics::{
    ber_binary, ber_coherent, ber_coherent_unipolar, ber_noncoherent, convert, spreading_factor,
    BinaryMode, PointInput,
};

fn main() {
    println!("uncoded BER vs Eb/N0 for noncoherent M-ASPM (columns: M = 2..64):");
    println!("{:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}", "Eb/N0 dB", "M=2", "M=4", "M=8", "M=16", "M=32", "M=64");
    for db in (0..=14).step_by(2) {
        print!("{:>8}", db);
        for log2m in 1..=6u32 {
            let m = 1 << log2m;
            let p = convert(PointInput::Ebn0Db(db as f64), m, 128).unwrap();
            print!(" {:>12.4e}", ber_noncoherent(p.lambda, m).unwrap());
        }
        println!();
    }

    println!("\ncoherent 16-ASPM: bipolar vs unipolar signaling (vs Eb/N0):");
    println!("{:>8} {:>12} {:>12} {:>9}", "Eb/N0 dB", "bipolar", "unipolar", "ratio");
    for db in (0..=12).step_by(2) {
        let p = convert(PointInput::Ebn0Db(db as f64), 16, 128).unwrap();
        let bp = ber_coherent(p.lambda, 16).unwrap();
        let up = ber_coherent_unipolar(p.lambda, 16).unwrap();
        println!("{:>8} {:>12.4e} {:>12.4e} {:>9.3}", db, bp, up, up / bp);
    }

    println!("\nbinary reductions at M = 2 (coherent is antipodal, noncoherent orthogonal):");
    println!("{:>8} {:>14} {:>14}", "Eb/N0 dB", "coherent", "noncoherent");
    for db in (0..=12).step_by(3) {
        let p = convert(PointInput::Ebn0Db(db as f64), 2, 128).unwrap();
        println!(
            "{:>8} {:>14.4e} {:>14.4e}",
            db,
            ber_binary(p.lambda, BinaryMode::Coherent).unwrap(),
            ber_binary(p.lambda, BinaryMode::Noncoherent).unwrap()
        );
    }

    println!("\noperating-point bookkeeping for 16-ASPM at Eb/N0 = 12.04 dB:");
    let p = convert(PointInput::Ebn0Db(12.041199826559248), 16, 128).unwrap();
    println!("  lambda = {:.3} (peak signal power over post-filter noise power)", p.lambda);
    println!("  SNR Gamma = {:.3} ({:.2} dB)", p.snr, p.snr_db);
    println!("  mu = sqrt(lambda/2) = {:.3}", p.mu);
    println!(
        "  spreading factor B/f_b: N_p=128 -> {}, N_p=256 -> {}",
        spreading_factor(16, 128).unwrap(),
        spreading_factor(16, 256).unwrap()
    );
}
