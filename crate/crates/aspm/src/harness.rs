//! Monte Carlo BER sweeps with reproducible seeding and early stopping.
//!
//! Every transmission batch draws its randomness from a dedicated stream
//! keyed by (seed, point index, batch index), so results are bit-identical
//! for any thread count and any scheduling order. Batches are processed in
//! fixed-size rounds; the stopping rule is evaluated only on round
//! boundaries, which keeps the set of simulated batches deterministic too.

use crate::analytics::{self, BerVariant, OperatingPoint, PointInput};
use crate::coding::{
    bits_to_symbols, symbols_to_bits, symbols_to_train, Detection, LinkConfig, Signaling,
};
use crate::detection::{decide_frame_coherent, decide_frame_noncoherent};
use crate::link::{
    calibrate_noise, channel_coherent, channel_noncoherent, matched_sample, receive_coherent,
    receive_noncoherent, shape, ChannelSpec, IqSignal, PhaseMode, RealSignal,
};
use crate::shaping::PsfPair;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::time::{Duration, Instant};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error(transparent)]
    Coding(#[from] crate::coding::CodingError),
    #[error(transparent)]
    Link(#[from] crate::link::LinkError),
    #[error(transparent)]
    Detection(#[from] crate::detection::DetectionError),
    #[error(transparent)]
    Analytics(#[from] crate::analytics::AnalyticsError),
}

/// Operating-point axis of a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    SnrDb,
    Ebn0Db,
    Lambda,
}

impl Axis {
    pub fn to_input(self, value: f64) -> PointInput {
        match self {
            Axis::SnrDb => PointInput::SnrDb(value),
            Axis::Ebn0Db => PointInput::Ebn0Db(value),
            Axis::Lambda => PointInput::Lambda(value),
        }
    }
}

/// Which bit sequence errors are counted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReferenceMode {
    /// Decode the noiseless waveform and compare against that (removes
    /// self-interference effects from the count).
    #[default]
    IdealDecode,
    /// Compare against the raw transmitted bits.
    TransmittedBits,
}

/// Monte Carlo sweep specification.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub config: LinkConfig,
    pub axis: Axis,
    /// Operating points in axis units, nonempty and sorted ascending.
    pub grid: Vec<f64>,
    /// Stop a point once this many errors are seen...
    pub min_errors: u64,
    /// ...or once this many bits have been simulated.
    pub max_bits: u64,
    pub seed: u64,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
    pub reference: ReferenceMode,
}

impl SweepSpec {
    fn validate(&self) -> Result<(), HarnessError> {
        self.config.validate()?;
        if self.grid.is_empty() {
            return Err(HarnessError::InvalidSweep("empty grid".into()));
        }
        if self.grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(HarnessError::InvalidSweep("grid must be sorted".into()));
        }
        if self.min_errors < 1 {
            return Err(HarnessError::InvalidSweep("min_errors must be >= 1".into()));
        }
        let bits_per_frame = self.config.bits_per_symbol() as u64;
        if self.max_bits < bits_per_frame {
            return Err(HarnessError::InvalidSweep(format!(
                "max_bits must cover at least one frame ({bits_per_frame} bits)"
            )));
        }
        Ok(())
    }
}

/// One measured point of a BER curve.
#[derive(Debug, Clone)]
pub struct BerPoint {
    pub point: OperatingPoint,
    pub axis_value: f64,
    pub bits: u64,
    /// Errors against the configured reference.
    pub errors: u64,
    /// Errors against the other reference, reported alongside.
    pub errors_alt: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ber_analytic: f64,
    /// True when max_bits was hit before min_errors.
    pub flagged: bool,
    pub wall_time: Duration,
}

/// A measured curve, one row per grid point.
#[derive(Debug, Clone)]
pub struct BerCurve {
    pub points: Vec<BerPoint>,
}

/// Analytic BER variant implied by a link config.
pub fn variant_of(config: &LinkConfig) -> BerVariant {
    match (config.detection, config.signaling) {
        (Detection::Coherent, Signaling::Bipolar) => BerVariant::Coherent,
        (Detection::Coherent, Signaling::Unipolar) => BerVariant::CoherentUnipolar,
        (Detection::Noncoherent, _) => BerVariant::Noncoherent,
    }
}

/// Wilson score interval for `errors` out of `n` at the 95% level.
pub fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054_f64; // two-sided 95%
    let nf = n as f64;
    let p = errors as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // the Wilson interval contains the point estimate analytically; keep
    // that true through floating-point rounding as well
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

fn batch_rng(seed: u64, point_index: usize, batch_index: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(point_index as u64).to_le_bytes());
    key[16..24].copy_from_slice(&batch_index.to_le_bytes());
    key[24..32].copy_from_slice(b"aspm-sub");
    ChaCha12Rng::from_seed(key)
}

/// Simulated frames per batch; one batch is one burst sharing a waveform.
/// Sized so the stopping rule lands close to min_errors without large
/// overshoot.
fn symbols_per_batch(config: &LinkConfig) -> usize {
    (128 / config.bits_per_symbol() as usize).clamp(16, 64)
}

struct BatchResult {
    bits: u64,
    errors_ideal: u64,
    errors_raw: u64,
}

/// Decode by sampling the matched-filter statistic only at the candidate
/// instants; values are bit-identical to running the full receiver and
/// reading it at those indices.
fn decode_coherent_sampled(
    x_rx: &RealSignal,
    psf: &PsfPair,
    config: &LinkConfig,
) -> crate::coding::SymbolStream {
    let combined: Vec<f64> = psf
        .taps_g
        .iter()
        .zip(&psf.taps_h)
        .map(|(&g, &h)| g + h)
        .collect();
    let delay = psf.length - 1;
    let layout = x_rx.layout;
    let n = config.n as usize;
    let count = config.position_count() as usize;
    let symbols = (0..layout.frame_count)
        .map(|frame| {
            let base = layout.offset + frame * layout.n_p + delay;
            let values =
                (0..count).map(|m| matched_sample(&x_rx.samples, &combined, base + m * n));
            decide_frame_coherent(values, config.signaling)
        })
        .collect();
    crate::coding::SymbolStream {
        symbols,
        pad_bits: 0,
    }
}

fn decode_noncoherent_sampled(
    iq: &IqSignal,
    psf: &PsfPair,
    config: &LinkConfig,
) -> crate::coding::SymbolStream {
    let delay = psf.length - 1;
    let layout = iq.layout;
    let n = config.n as usize;
    let count = config.position_count() as usize;
    let symbols = (0..layout.frame_count)
        .map(|frame| {
            let base = layout.offset + frame * layout.n_p + delay;
            let values = (0..count).map(|m| {
                let t = base + m * n;
                let u = matched_sample(&iq.i, &psf.taps_g, t)
                    + matched_sample(&iq.q, &psf.taps_h, t);
                let v = matched_sample(&iq.q, &psf.taps_g, t)
                    - matched_sample(&iq.i, &psf.taps_h, t);
                u * u + v * v
            });
            decide_frame_noncoherent(values)
        })
        .collect();
    crate::coding::SymbolStream {
        symbols,
        pad_bits: 0,
    }
}

fn run_batch(
    spec: &SweepSpec,
    psf: &PsfPair,
    sigma: f64,
    point_index: usize,
    batch_index: u64,
) -> Result<BatchResult, HarnessError> {
    let config = &spec.config;
    let mut rng = batch_rng(spec.seed, point_index, batch_index);
    let n_symbols = symbols_per_batch(config);
    let n_bits = n_symbols * config.bits_per_symbol() as usize;
    let bits: Vec<u8> = (0..n_bits).map(|_| rng.gen::<bool>() as u8).collect();

    let symbols = bits_to_symbols(&bits, config)?;
    let train = symbols_to_train(&symbols, config, psf.length)?;
    let (x_g, x_h) = shape(&train, psf, config);

    let noisy = ChannelSpec {
        sigma,
        phase: match config.detection {
            Detection::Coherent => PhaseMode::Fixed(0.0),
            Detection::Noncoherent => PhaseMode::RandomPerBurst,
        },
        gain: 1.0,
    };
    let clean = ChannelSpec::noiseless();

    let (decoded, reference) = match config.detection {
        Detection::Coherent => {
            let x_ref = channel_coherent(&x_g, &x_h, &clean, &mut rng)?;
            let x_rx = channel_coherent(&x_g, &x_h, &noisy, &mut rng)?;
            (
                decode_coherent_sampled(&x_rx, psf, config),
                decode_coherent_sampled(&x_ref, psf, config),
            )
        }
        Detection::Noncoherent => {
            let iq_ref = channel_noncoherent(&x_g, &x_h, &clean, &mut rng)?;
            let iq = channel_noncoherent(&x_g, &x_h, &noisy, &mut rng)?;
            (
                decode_noncoherent_sampled(&iq, psf, config),
                decode_noncoherent_sampled(&iq_ref, psf, config),
            )
        }
    };

    let decoded_bits = symbols_to_bits(&decoded, config)?;
    let reference_bits = symbols_to_bits(&reference, config)?;
    let errors_ideal = decoded_bits
        .iter()
        .zip(&reference_bits)
        .filter(|(a, b)| a != b)
        .count() as u64;
    let errors_raw = decoded_bits
        .iter()
        .zip(&bits)
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok(BatchResult {
        bits: n_bits as u64,
        errors_ideal,
        errors_raw,
    })
}

/// Run the full sweep. Deterministic for a fixed seed regardless of
/// `threads`.
pub fn run_sweep(spec: &SweepSpec, psf: &PsfPair) -> Result<BerCurve, HarnessError> {
    spec.validate()?;
    spec.config.validate_with_psf(psf.length)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| HarnessError::InvalidSweep(format!("thread pool: {e}")))?;

    let mut points = Vec::with_capacity(spec.grid.len());
    for (point_index, &axis_value) in spec.grid.iter().enumerate() {
        let started = Instant::now();
        let point = analytics::convert(spec.axis.to_input(axis_value), spec.config.m, spec.config.n_p)?;
        let ber_analytic = analytics::ber(variant_of(&spec.config), point.lambda, spec.config.m)?;
        let sigma = calibrate_noise(point.lambda, &spec.config, psf, 1.0)?.sigma;

        const ROUND_BATCHES: u64 = 8;
        let mut bits = 0u64;
        let mut errors_ideal = 0u64;
        let mut errors_raw = 0u64;
        let mut next_batch = 0u64;
        loop {
            let round: Vec<u64> = (next_batch..next_batch + ROUND_BATCHES).collect();
            next_batch += ROUND_BATCHES;
            let results: Result<Vec<BatchResult>, HarnessError> = pool.install(|| {
                round
                    .par_iter()
                    .map(|&b| run_batch(spec, psf, sigma, point_index, b))
                    .collect()
            });
            for r in results? {
                bits += r.bits;
                errors_ideal += r.errors_ideal;
                errors_raw += r.errors_raw;
            }
            let primary = match spec.reference {
                ReferenceMode::IdealDecode => errors_ideal,
                ReferenceMode::TransmittedBits => errors_raw,
            };
            if primary >= spec.min_errors || bits >= spec.max_bits {
                break;
            }
        }

        let (errors, errors_alt) = match spec.reference {
            ReferenceMode::IdealDecode => (errors_ideal, errors_raw),
            ReferenceMode::TransmittedBits => (errors_raw, errors_ideal),
        };
        let ber = errors as f64 / bits as f64;
        let (ci_low, ci_high) = wilson_interval(errors, bits);
        points.push(BerPoint {
            point,
            axis_value,
            bits,
            errors,
            errors_alt,
            ber,
            ci_low,
            ci_high,
            ber_analytic,
            flagged: errors < spec.min_errors,
            wall_time: started.elapsed(),
        });
    }
    Ok(BerCurve { points })
}

/// Measure the achieved noncentrality A^2 / sigma_n^2: the peak from one
/// noiseless pulse and the post-filter noise variance from a noise-only
/// run of at least `trials` samples.
pub fn empirical_lambda(
    config: &LinkConfig,
    psf: &PsfPair,
    sigma: f64,
    gain: f64,
    trials: usize,
    seed: u64,
) -> Result<f64, HarnessError> {
    let bps = config.bits_per_symbol() as usize;
    let symbols = bits_to_symbols(&vec![0u8; bps], config)?;
    let train = symbols_to_train(&symbols, config, psf.length)?;
    let (x_g, x_h) = shape(&train, psf, config);
    let k0 = train.pulses[0].0;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let clean = ChannelSpec {
        sigma: 0.0,
        phase: PhaseMode::Fixed(0.9),
        gain,
    };
    let noise_only = ChannelSpec {
        sigma,
        phase: PhaseMode::Fixed(0.3),
        gain,
    };
    let zeros = crate::link::RealSignal {
        samples: vec![0.0; trials],
        layout: x_g.layout,
    };

    // the first and last L-1 output samples only partially overlap the
    // filter, so they are left out of the variance estimate
    let interior = |samples: &[f64]| -> (usize, usize) {
        let edge = psf.length - 1;
        (edge, samples.len().saturating_sub(edge))
    };
    match config.detection {
        Detection::Coherent => {
            let clean_chan = ChannelSpec { phase: PhaseMode::Fixed(0.0), ..clean };
            let y = receive_coherent(
                &channel_coherent(&x_g, &x_h, &clean_chan, &mut rng)?,
                psf,
            );
            let amp_sq = y.samples[k0 + y.delay].powi(2);
            let yn = receive_coherent(
                &channel_coherent(&zeros, &zeros, &noise_only, &mut rng)?,
                psf,
            );
            let (lo, hi) = interior(&yn.samples);
            let var =
                yn.samples[lo..hi].iter().map(|v| v * v).sum::<f64>() / (hi - lo) as f64;
            Ok(amp_sq / var)
        }
        Detection::Noncoherent => {
            let y = receive_noncoherent(
                &channel_noncoherent(&x_g, &x_h, &clean, &mut rng)?,
                psf,
            );
            let amp_sq = y.samples[k0 + y.delay];
            let yn = receive_noncoherent(
                &channel_noncoherent(&zeros, &zeros, &noise_only, &mut rng)?,
                psf,
            );
            // E[y_nc^2] over noise = 2 sigma_n^2
            let (lo, hi) = interior(&yn.samples);
            let var = yn.samples[lo..hi].iter().sum::<f64>() / (hi - lo) as f64 / 2.0;
            Ok(amp_sq / var)
        }
    }
}
