//! Symbol decisions from receiver statistics.
//!
//! Perfect symbol timing is assumed: the composite filter delay is known,
//! so frame j is read at `offset + j*N_p + delta_k[m] + delay` for each
//! candidate position m. Ties break toward the smallest position index,
//! which makes degenerate inputs reproducible.

use crate::coding::{LinkConfig, Signaling, Symbol, SymbolStream};
use crate::link::ReceiverOutput;

#[derive(Debug, Clone, thiserror::Error)]
pub enum DetectionError {
    #[error("frame {frame} needs sample {needed} but the signal has {len}")]
    FrameOutOfBounds {
        frame: usize,
        needed: usize,
        len: usize,
    },
    #[error("config/detection mismatch: {0}")]
    ModeMismatch(&'static str),
}

fn frame_samples<'a>(
    out: &'a ReceiverOutput,
    config: &LinkConfig,
    frame: usize,
) -> Result<impl Iterator<Item = f64> + 'a, DetectionError> {
    let base = out.layout.offset + frame * out.layout.n_p + out.delay;
    let last = base + config.max_offset() as usize;
    if last >= out.samples.len() {
        return Err(DetectionError::FrameOutOfBounds {
            frame,
            needed: last,
            len: out.samples.len(),
        });
    }
    let n = config.n as usize;
    let count = config.position_count() as usize;
    Ok((0..count).map(move |m| out.samples[base + m * n]))
}

/// Position with the largest value, first (smallest) index on ties.
fn argmax(values: impl Iterator<Item = f64>) -> (u32, f64) {
    let mut best = f64::NEG_INFINITY;
    let mut best_m = 0u32;
    for (m, v) in values.enumerate() {
        if v > best {
            best = v;
            best_m = m as u32;
        }
    }
    (best_m + 1, best)
}

/// Decision rule for one frame of coherent candidate samples: the
/// position with the largest magnitude wins (for both signaling modes —
/// the receiver compares envelope peaks regardless of how many polarity
/// states the code uses), and bipolar takes the polarity bit from the
/// sign at the winning position. Smallest index wins ties.
pub fn decide_frame_coherent(values: impl Iterator<Item = f64>, signaling: Signaling) -> Symbol {
    let mut best = f64::NEG_INFINITY;
    let mut best_m = 0u32;
    let mut best_v = 0.0f64;
    for (m, v) in values.enumerate() {
        if v.abs() > best {
            best = v.abs();
            best_m = m as u32;
            best_v = v;
        }
    }
    Symbol {
        position: best_m + 1,
        polarity: match signaling {
            Signaling::Bipolar => (best_v < 0.0) as u8,
            Signaling::Unipolar => 0,
        },
    }
}

/// Decision rule for one frame of envelope samples.
pub fn decide_frame_noncoherent(values: impl Iterator<Item = f64>) -> Symbol {
    let (position, _) = argmax(values);
    Symbol {
        position,
        polarity: 0,
    }
}

/// Decide symbols from the sign-bearing coherent statistic y_c.
pub fn detect_coherent(
    out: &ReceiverOutput,
    config: &LinkConfig,
) -> Result<SymbolStream, DetectionError> {
    let mut symbols = Vec::with_capacity(out.layout.frame_count);
    for frame in 0..out.layout.frame_count {
        let samples = frame_samples(out, config, frame)?;
        symbols.push(decide_frame_coherent(samples, config.signaling));
    }
    Ok(SymbolStream {
        symbols,
        pad_bits: 0,
    })
}

/// Decide symbols from the envelope statistic y_nc^2 by position argmax
/// over all M candidate offsets.
pub fn detect_noncoherent(
    out: &ReceiverOutput,
    config: &LinkConfig,
) -> Result<SymbolStream, DetectionError> {
    if config.signaling != Signaling::Unipolar {
        return Err(DetectionError::ModeMismatch(
            "noncoherent detection requires unipolar signaling",
        ));
    }
    let mut symbols = Vec::with_capacity(out.layout.frame_count);
    for frame in 0..out.layout.frame_count {
        symbols.push(decide_frame_noncoherent(frame_samples(out, config, frame)?));
    }
    Ok(SymbolStream {
        symbols,
        pad_bits: 0,
    })
}
