//! M-ary Aggregate Spread Pulse Modulation (M-ASPM) toolkit.
//!
//! Information is carried by the positions (and optionally polarities) of
//! sparse pulses in a designed train, which is spectrally spread by a
//! large time-bandwidth-product pulse shaping filter whose autocorrelation
//! is a raised-cosine pulse. This crate covers the whole chain:
//!
//! - [`specfun`] — erf/erfc, modified Bessel I0, Marcum Q, adaptive quadrature
//! - [`coding`] — bit ↔ symbol ↔ designed-train conversions
//! - [`shaping`] — constant-envelope chirp PSF design and ACF diagnostics
//! - [`link`] — baseband shaping, calibrated AWGN channel, matched-filter receivers
//! - [`detection`] — position/polarity decisions from receiver statistics
//! - [`analytics`] — closed-form BER for coherent/noncoherent, bipolar/unipolar
//! - [`harness`] — reproducible Monte Carlo BER sweeps with confidence intervals
//! - [`cli`] — file-based front end used by the `aspm` binary
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! ```bash
//! cargo run --release --example design_psf
//! cargo run --release --example waveform_tour
//! cargo run --release --example analyze_ber
//! cargo run --release --example calibrate_noise
//! cargo run --release --example simulate_link
//! cargo run --release --example verify_invariants
//! ```

pub mod analytics;
pub mod cli;
pub mod coding;
pub mod detection;
pub mod harness;
pub mod link;
pub mod shaping;
pub mod specfun;
