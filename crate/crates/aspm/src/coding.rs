//! Bit-stream / symbol / designed-train conversions.
//!
//! A symbol occupies one frame of N_p samples and is one pulse whose
//! offset inside the frame (a multiple of the position spacing n) carries
//! the position bits. Bipolar signaling adds a polarity bit in the pulse
//! sign and needs only M/2 distinct positions; unipolar signaling uses
//! all M positions with amplitude +1.

use serde::{Deserialize, Serialize};

/// Errors from configuration validation and symbol mapping.
#[derive(Debug, Clone, thiserror::Error)]
pub enum CodingError {
    #[error("invalid link config: {0}")]
    InvalidConfig(String),
    #[error("symbol position index {index} out of range 1..={max}")]
    PositionOutOfRange { index: u32, max: u32 },
}

/// With or without a polarity bit per pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signaling {
    Bipolar,
    Unipolar,
}

/// Receiver statistic type: sign-bearing y_c or envelope y_nc^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detection {
    Coherent,
    Noncoherent,
}

/// Static description of one M-ASPM link.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Alphabet size, power of two >= 2.
    pub m: u32,
    /// Interpulse interval in samples.
    pub n_p: u32,
    /// Pulse-position spacing in samples.
    pub n: u32,
    pub signaling: Signaling,
    pub detection: Detection,
    /// Label of the PSF this link was designed against (informational).
    #[serde(default)]
    pub psf_id: Option<String>,
    /// Permit frames shorter than the PSF (pulses then overlap in time and
    /// the waveform is an aggregate rather than isolated constant-envelope
    /// pulses).
    #[serde(default)]
    pub allow_overlap: bool,
}

impl LinkConfig {
    /// Number of distinct pulse positions used by this config.
    pub fn position_count(&self) -> u32 {
        match self.signaling {
            Signaling::Bipolar => self.m / 2,
            Signaling::Unipolar => self.m,
        }
    }

    /// Bits carried per pulse.
    pub fn bits_per_symbol(&self) -> u32 {
        self.m.ilog2()
    }

    /// Position offset table, `delta_k[m] = (m-1) * n`.
    pub fn position_offset(&self, index: u32) -> u32 {
        (index - 1) * self.n
    }

    pub fn max_offset(&self) -> u32 {
        (self.position_count() - 1) * self.n
    }

    /// Spreading factor B / f_b = N_p / (2 log2 M).
    pub fn spreading_factor(&self) -> f64 {
        self.n_p as f64 / (2.0 * self.bits_per_symbol() as f64)
    }

    /// Raw bit rate as a fraction of the sample rate, f_b / F_s
    /// = log2(M) / N_p.
    pub fn bit_rate_fraction(&self) -> f64 {
        self.bits_per_symbol() as f64 / self.n_p as f64
    }

    /// Validate invariants that do not involve a PSF.
    pub fn validate(&self) -> Result<(), CodingError> {
        if self.m < 2 || !self.m.is_power_of_two() {
            return Err(CodingError::InvalidConfig(format!(
                "M must be a power of two >= 2, got {}",
                self.m
            )));
        }
        if self.signaling == Signaling::Bipolar && self.m % 2 != 0 {
            return Err(CodingError::InvalidConfig(
                "bipolar signaling requires even M".into(),
            ));
        }
        if self.n == 0 {
            return Err(CodingError::InvalidConfig("n must be >= 1".into()));
        }
        let min_n = match self.detection {
            Detection::Coherent => 2,
            Detection::Noncoherent => 4,
        };
        if self.n < min_n {
            return Err(CodingError::InvalidConfig(format!(
                "{:?} detection requires n >= {min_n}, got {}",
                self.detection, self.n
            )));
        }
        if self.detection == Detection::Noncoherent && self.signaling == Signaling::Bipolar {
            return Err(CodingError::InvalidConfig(
                "noncoherent detection cannot recover polarity; use unipolar signaling".into(),
            ));
        }
        if self.n_p % self.n != 0 {
            return Err(CodingError::InvalidConfig(format!(
                "N_p = {} must be a multiple of the position spacing n = {}",
                self.n_p, self.n
            )));
        }
        if self.max_offset() >= self.n_p {
            return Err(CodingError::InvalidConfig(format!(
                "position offsets reach {} but must stay below N_p = {}",
                self.max_offset(),
                self.n_p
            )));
        }
        Ok(())
    }

    /// Validate against a PSF of `psf_len` taps, including the no-overlap
    /// condition N_p > psf_len + max offset unless overlap is allowed.
    pub fn validate_with_psf(&self, psf_len: usize) -> Result<(), CodingError> {
        self.validate()?;
        if !self.allow_overlap && self.n_p as usize <= psf_len + self.max_offset() as usize {
            return Err(CodingError::InvalidConfig(format!(
                "pulses overlap: N_p = {} <= psf_len {} + max offset {}; set allow_overlap \
                 to accept the aggregate regime",
                self.n_p,
                psf_len,
                self.max_offset()
            )));
        }
        Ok(())
    }
}

/// One transmitted symbol: a 1-based position index and, for bipolar
/// signaling, a polarity bit (amplitude (-1)^polarity).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symbol {
    pub position: u32,
    pub polarity: u8,
}

/// A run of symbols plus the zero-pad length appended to the source bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStream {
    pub symbols: Vec<Symbol>,
    /// Number of zero bits appended so the bit count divides log2(M).
    pub pad_bits: usize,
}

/// Sparse designed pulse train: sample length plus (index, amplitude)
/// pairs with strictly increasing indices and amplitudes in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignedTrain {
    pub len: usize,
    pub pulses: Vec<(usize, i8)>,
    /// Sample index of the start of frame 0 (one guard frame precedes it).
    pub frame_offset: usize,
    pub frame_count: usize,
}

/// Map a bit stream onto symbols with the natural-binary weighting:
/// the most significant log2(M)-1 bits (bipolar) or all log2(M) bits
/// (unipolar) select the position, and the last bit of a bipolar symbol
/// is the polarity. The tail is zero-padded to a whole symbol.
pub fn bits_to_symbols(bits: &[u8], config: &LinkConfig) -> Result<SymbolStream, CodingError> {
    config.validate()?;
    let bps = config.bits_per_symbol() as usize;
    let pad_bits = (bps - bits.len() % bps) % bps;
    let mut symbols = Vec::with_capacity(bits.len() / bps + 1);
    let bit_at = |i: usize| -> u32 {
        if i < bits.len() {
            (bits[i] != 0) as u32
        } else {
            0
        }
    };
    let mut i = 0;
    while i < bits.len() {
        let (pos_bits, polarity) = match config.signaling {
            Signaling::Bipolar => (bps - 1, bit_at(i + bps - 1) as u8),
            Signaling::Unipolar => (bps, 0),
        };
        let mut value = 0u32;
        for j in 0..pos_bits {
            value = (value << 1) | bit_at(i + j);
        }
        symbols.push(Symbol {
            position: value + 1,
            polarity,
        });
        i += bps;
    }
    Ok(SymbolStream { symbols, pad_bits })
}

/// Inverse of [`bits_to_symbols`] modulo the zero padding.
pub fn symbols_to_bits(stream: &SymbolStream, config: &LinkConfig) -> Result<Vec<u8>, CodingError> {
    config.validate()?;
    let bps = config.bits_per_symbol() as usize;
    let max = config.position_count();
    let mut bits = Vec::with_capacity(stream.symbols.len() * bps);
    for s in &stream.symbols {
        if s.position < 1 || s.position > max {
            return Err(CodingError::PositionOutOfRange {
                index: s.position,
                max,
            });
        }
        let value = s.position - 1;
        let pos_bits = match config.signaling {
            Signaling::Bipolar => bps - 1,
            Signaling::Unipolar => bps,
        };
        for j in (0..pos_bits).rev() {
            bits.push(((value >> j) & 1) as u8);
        }
        if config.signaling == Signaling::Bipolar {
            bits.push(s.polarity);
        }
    }
    bits.truncate(bits.len() - stream.pad_bits.min(bits.len()));
    Ok(bits)
}

/// Place symbols on the frame lattice: the pulse of frame j sits at
/// `(j + 1) * N_p + delta_k[m_j]`, with one guard frame at the head and one
/// guard frame plus one PSF length at the tail, so the shaped waveform of
/// every pulse fits inside `len` samples.
pub fn symbols_to_train(
    stream: &SymbolStream,
    config: &LinkConfig,
    psf_len: usize,
) -> Result<DesignedTrain, CodingError> {
    config.validate_with_psf(psf_len)?;
    let n_p = config.n_p as usize;
    let count = stream.symbols.len();
    let len = (count + 2) * n_p + psf_len;
    let max = config.position_count();
    let mut pulses = Vec::with_capacity(count);
    for (j, s) in stream.symbols.iter().enumerate() {
        if s.position < 1 || s.position > max {
            return Err(CodingError::PositionOutOfRange {
                index: s.position,
                max,
            });
        }
        let k = (j + 1) * n_p + config.position_offset(s.position) as usize;
        let amp = match config.signaling {
            Signaling::Bipolar => {
                if s.polarity == 0 {
                    1
                } else {
                    -1
                }
            }
            Signaling::Unipolar => 1,
        };
        pulses.push((k, amp));
    }
    Ok(DesignedTrain {
        len,
        pulses,
        frame_offset: n_p,
        frame_count: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: u32, n_p: u32, n: u32, signaling: Signaling, detection: Detection) -> LinkConfig {
        LinkConfig {
            m,
            n_p,
            n,
            signaling,
            detection,
            psf_id: None,
            allow_overlap: true,
        }
    }

    fn bipolar16() -> LinkConfig {
        cfg(16, 128, 2, Signaling::Bipolar, Detection::Coherent)
    }

    fn unipolar16() -> LinkConfig {
        cfg(16, 128, 4, Signaling::Unipolar, Detection::Noncoherent)
    }

    #[test]
    fn bipolar_mapping_matches_four_bit_example() {
        // bits (a,b,c,d) = (1,0,1,1): offset (4a+2b+c)*n = 5n, amplitude -1
        let c = bipolar16();
        let s = bits_to_symbols(&[1, 0, 1, 1], &c).unwrap();
        assert_eq!(s.symbols.len(), 1);
        assert_eq!(s.symbols[0], Symbol { position: 6, polarity: 1 });
        assert_eq!(c.position_offset(6), 5 * c.n);
        let train = symbols_to_train(&s, &c, 16).unwrap();
        assert_eq!(train.pulses, vec![(128 + 10, -1)]);
    }

    #[test]
    fn unipolar_mapping_matches_four_bit_example() {
        // bits (1,1,1,1): offset (8+4+2+1)*n = 15n, amplitude +1
        let c = unipolar16();
        let s = bits_to_symbols(&[1, 1, 1, 1], &c).unwrap();
        assert_eq!(s.symbols[0], Symbol { position: 16, polarity: 0 });
        assert_eq!(c.position_offset(16), 15 * c.n);
        let train = symbols_to_train(&s, &c, 16).unwrap();
        assert_eq!(train.pulses, vec![(128 + 60, 1)]);
    }

    #[test]
    fn binary_bipolar_is_equidistant_with_signs() {
        let c = cfg(2, 64, 2, Signaling::Bipolar, Detection::Coherent);
        let bits = [0, 1, 1, 0, 1];
        let s = bits_to_symbols(&bits, &c).unwrap();
        let train = symbols_to_train(&s, &c, 8).unwrap();
        let expect: Vec<(usize, i8)> = bits
            .iter()
            .enumerate()
            .map(|(j, &b)| ((j + 1) * 64, if b == 0 { 1 } else { -1 }))
            .collect();
        assert_eq!(train.pulses, expect);
    }

    #[test]
    fn symbol_to_bits_inverse_example() {
        let c = bipolar16();
        let stream = SymbolStream {
            symbols: vec![Symbol { position: 6, polarity: 1 }],
            pad_bits: 0,
        };
        assert_eq!(symbols_to_bits(&stream, &c).unwrap(), vec![1, 0, 1, 1]);
    }

    #[test]
    fn out_of_range_position_rejected() {
        let c = unipolar16();
        let stream = SymbolStream {
            symbols: vec![Symbol { position: 17, polarity: 0 }],
            pad_bits: 0,
        };
        assert!(matches!(
            symbols_to_bits(&stream, &c),
            Err(CodingError::PositionOutOfRange { index: 17, max: 16 })
        ));
    }

    #[test]
    fn round_trip_identity_many_random_bits() {
        // simple xorshift so the test needs no RNG dependency
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next_bit = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state & 1) as u8
        };
        let configs = [
            cfg(2, 64, 2, Signaling::Bipolar, Detection::Coherent),
            cfg(16, 128, 2, Signaling::Bipolar, Detection::Coherent),
            cfg(16, 128, 4, Signaling::Unipolar, Detection::Noncoherent),
            cfg(64, 256, 4, Signaling::Unipolar, Detection::Noncoherent),
        ];
        for c in &configs {
            let bits: Vec<u8> = (0..10_000).map(|_| next_bit()).collect();
            let s = bits_to_symbols(&bits, c).unwrap();
            let back = symbols_to_bits(&s, c).unwrap();
            assert_eq!(back, bits, "config M={} {:?}", c.m, c.signaling);
        }
    }

    #[test]
    fn padding_recorded_and_stripped() {
        let c = bipolar16();
        let bits = [1, 0, 1, 1, 1, 1]; // 6 bits, 2 bits of pad to reach 8
        let s = bits_to_symbols(&bits, &c).unwrap();
        assert_eq!(s.pad_bits, 2);
        assert_eq!(s.symbols.len(), 2);
        assert_eq!(symbols_to_bits(&s, &c).unwrap(), bits.to_vec());
    }

    #[test]
    fn empty_symbol_list_gives_guard_only_train() {
        let c = bipolar16();
        let s = SymbolStream { symbols: vec![], pad_bits: 0 };
        let train = symbols_to_train(&s, &c, 32).unwrap();
        assert_eq!(train.len, 2 * 128 + 32);
        assert!(train.pulses.is_empty());
    }

    #[test]
    fn single_symbol_train_places_pulse_at_guard() {
        let c = bipolar16();
        let s = SymbolStream {
            symbols: vec![Symbol { position: 1, polarity: 0 }],
            pad_bits: 0,
        };
        let train = symbols_to_train(&s, &c, 32).unwrap();
        assert_eq!(train.pulses, vec![(128, 1)]);
        assert_eq!(train.len, 3 * 128 + 32);
    }

    #[test]
    fn pulse_spacing_stays_within_offset_envelope() {
        // enumerate all offset pairs: spacing in [N_p - max, N_p + max]
        let c = bipolar16();
        let mut symbols = Vec::new();
        for p in 1..=8u32 {
            for q in 1..=8u32 {
                symbols.push(Symbol { position: p, polarity: 0 });
                symbols.push(Symbol { position: q, polarity: 0 });
            }
        }
        let s = SymbolStream { symbols, pad_bits: 0 };
        let train = symbols_to_train(&s, &c, 16).unwrap();
        let max_off = c.max_offset() as isize;
        for w in train.pulses.windows(2) {
            let gap = w[1].0 as isize - w[0].0 as isize;
            assert!(gap >= 128 - max_off && gap <= 128 + max_off, "gap {gap}");
            assert!(gap as usize >= 128 - c.max_offset() as usize);
        }
    }

    #[test]
    fn pairwise_differences_are_multiples_of_n() {
        let c = unipolar16();
        let bits: Vec<u8> = (0..400).map(|i| ((i * 7) % 3 == 0) as u8).collect();
        let s = bits_to_symbols(&bits, &c).unwrap();
        let train = symbols_to_train(&s, &c, 16).unwrap();
        for a in &train.pulses {
            for b in &train.pulses {
                assert_eq!((a.0 as isize - b.0 as isize) % c.n as isize, 0);
            }
        }
    }

    #[test]
    fn config_validation_rules() {
        assert!(cfg(12, 128, 2, Signaling::Bipolar, Detection::Coherent)
            .validate()
            .is_err());
        // coherent needs n >= 2
        assert!(cfg(16, 128, 1, Signaling::Bipolar, Detection::Coherent)
            .validate()
            .is_err());
        // noncoherent needs n >= 4
        assert!(cfg(16, 128, 2, Signaling::Unipolar, Detection::Noncoherent)
            .validate()
            .is_err());
        // noncoherent cannot carry polarity
        assert!(cfg(16, 128, 4, Signaling::Bipolar, Detection::Noncoherent)
            .validate()
            .is_err());
        // offsets must fit in a frame: M=64 unipolar n=4 needs N_p > 252
        assert!(cfg(64, 128, 4, Signaling::Unipolar, Detection::Noncoherent)
            .validate()
            .is_err());
        assert!(cfg(64, 256, 4, Signaling::Unipolar, Detection::Noncoherent)
            .validate()
            .is_ok());
        // N_p must be a multiple of n
        assert!(cfg(16, 130, 4, Signaling::Unipolar, Detection::Noncoherent)
            .validate()
            .is_err());
    }

    #[test]
    fn overlap_flag_gates_psf_length() {
        let mut c = bipolar16();
        c.allow_overlap = false;
        // N_p = 128 <= 256 + 14: rejected without the flag
        assert!(c.validate_with_psf(256).is_err());
        c.allow_overlap = true;
        assert!(c.validate_with_psf(256).is_ok());
        // short PSF passes either way
        c.allow_overlap = false;
        assert!(c.validate_with_psf(64).is_ok());
    }

    #[test]
    fn rate_bookkeeping() {
        let c = unipolar16();
        assert_eq!(c.bits_per_symbol(), 4);
        assert_eq!(c.spreading_factor(), 16.0);
        assert!((c.bit_rate_fraction() - 4.0 / 128.0).abs() < 1e-15);
        let s = bits_to_symbols(&vec![0u8; 400], &c).unwrap();
        assert_eq!(s.symbols.len() * c.bits_per_symbol() as usize, 400);
    }
}
