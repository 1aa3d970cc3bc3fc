//! Follow a handful of bits through the whole chain: symbols, designed
//! train, shaped waveform, channel, matched filter, decisions.
//!
//! ```bash
//! cargo run --release --example waveform_tour
//! ```

use aspm::coding::{
    bits_to_symbols, symbols_to_bits, symbols_to_train, Detection, LinkConfig, Signaling,
};
use aspm::detection::detect_coherent;
use aspm::link::{channel_coherent, receive_coherent, shape, ChannelSpec, PhaseMode};
use aspm::shaping::{compute_papr, design_psf};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() {
    let config = LinkConfig {
        m: 16,
        n_p: 128,
        n: 2,
        signaling: Signaling::Bipolar,
        detection: Detection::Coherent,
        psf_id: Some("rc-chirp-256".into()),
        allow_overlap: true,
    };
    let psf = design_psf(256, 300).expect("design");

    let bits = [1u8, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 1];
    println!("bits: {bits:?}");
    println!(
        "config: {}-ary, {:?} {:?}, N_p = {}, n = {}, {} bits/pulse, spreading factor {}",
        config.m,
        config.signaling,
        config.detection,
        config.n_p,
        config.n,
        config.bits_per_symbol(),
        config.spreading_factor()
    );

    let symbols = bits_to_symbols(&bits, &config).unwrap();
    println!("\nsymbols (position, polarity):");
    for s in &symbols.symbols {
        println!(
            "  position {:>2} (offset {:>2} samples), amplitude {}",
            s.position,
            config.position_offset(s.position),
            if s.polarity == 0 { "+1" } else { "-1" }
        );
    }

    let train = symbols_to_train(&symbols, &config, psf.length).unwrap();
    println!("\ndesigned train: {} samples, pulses at {:?}", train.len, train.pulses);

    let (x_g, x_h) = shape(&train, &psf, &config);
    println!(
        "shaped train PAPR: {:.2} dB (one nonzero sample in {} would be {:.2} dB)",
        compute_papr(&x_g.samples).unwrap(),
        config.n_p,
        10.0 * (config.n_p as f64).log10()
    );

    let chan = ChannelSpec {
        sigma: 0.12,
        phase: PhaseMode::Fixed(0.0),
        gain: 1.0,
    };
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    let x_rx = channel_coherent(&x_g, &x_h, &chan, &mut rng).unwrap();
    let y = receive_coherent(&x_rx, &psf);
    println!("\nmatched-filter output around frame 0 (delay {} samples):", y.delay);
    let base = train.frame_offset + y.delay;
    for m in 1..=8u32 {
        let v = y.samples[base + config.position_offset(m) as usize];
        println!("  slot {m}: {v:+.3}");
    }

    let decoded = detect_coherent(&y, &config).unwrap();
    let out_bits = symbols_to_bits(&decoded, &config).unwrap();
    println!("\ndecoded bits: {out_bits:?}");
    assert_eq!(out_bits, bits.to_vec());
    println!("round trip exact");
}
