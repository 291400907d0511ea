//! Binary arithmetic coder driven by the KT frequencies of [`ContextModel`].
//!
//! Classic 32-bit integer coder with underflow ("pending bit") handling.
//! Frequencies are `2 c + 1` over `2 T + A`, so the coded probabilities are
//! exactly the KT probabilities and the only loss is interval truncation
//! plus at most two termination bits.

use serde::{Deserialize, Serialize};

use super::{CoderError, ContextModel, Symbol};

const CODE_BITS: u32 = 32;
const TOP: u64 = (1 << CODE_BITS) - 1;
const HALF: u64 = 1 << (CODE_BITS - 1);
const FIRST_QUARTER: u64 = 1 << (CODE_BITS - 2);
const THIRD_QUARTER: u64 = 3 * FIRST_QUARTER;

/// Largest context total the coder accepts; keeps every interval nonempty.
pub const MAX_CODER_TOTAL: u64 = FIRST_QUARTER;

#[derive(Debug, Default)]
struct BitWriter {
    bytes: Vec<u8>,
    len: u64,
}

impl BitWriter {
    fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    len: u64,
    pos: u64,
}

impl BitReader<'_> {
    // Reads past the end yield zeros.
    fn next(&mut self) -> u64 {
        let bit = if self.pos < self.len {
            (self.bytes[(self.pos / 8) as usize] >> (7 - self.pos % 8)) & 1
        } else {
            0
        };
        self.pos += 1;
        u64::from(bit)
    }
}

struct Encoder {
    low: u64,
    high: u64,
    pending: u64,
    out: BitWriter,
}

impl Encoder {
    fn new() -> Self {
        Self {
            low: 0,
            high: TOP,
            pending: 0,
            out: BitWriter::default(),
        }
    }

    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        for _ in 0..self.pending {
            self.out.push(!bit);
        }
        self.pending = 0;
    }

    fn encode(&mut self, lo: u64, hi: u64, total: u64) {
        let range = self.high - self.low + 1;
        self.high = self.low + range * hi / total - 1;
        self.low += range * lo / total;
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= FIRST_QUARTER && self.high < THIRD_QUARTER {
                self.pending += 1;
                self.low -= FIRST_QUARTER;
                self.high -= FIRST_QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    fn finish(mut self) -> BitWriter {
        self.pending += 1;
        let bit = self.low >= FIRST_QUARTER;
        self.emit(bit);
        self.out
    }
}

struct Decoder<'a> {
    low: u64,
    high: u64,
    value: u64,
    input: BitReader<'a>,
}

impl<'a> Decoder<'a> {
    fn new(bytes: &'a [u8], len: u64) -> Self {
        let mut input = BitReader { bytes, len, pos: 0 };
        let mut value = 0;
        for _ in 0..CODE_BITS {
            value = (value << 1) | input.next();
        }
        Self {
            low: 0,
            high: TOP,
            value,
            input,
        }
    }

    fn target(&self, total: u64) -> u64 {
        let range = self.high - self.low + 1;
        ((self.value - self.low + 1) * total - 1) / range
    }

    fn consume(&mut self, lo: u64, hi: u64, total: u64) {
        let range = self.high - self.low + 1;
        self.high = self.low + range * hi / total - 1;
        self.low += range * lo / total;
        loop {
            if self.high < HALF {
            } else if self.low >= HALF {
                self.value -= HALF;
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= FIRST_QUARTER && self.high < THIRD_QUARTER {
                self.value -= FIRST_QUARTER;
                self.low -= FIRST_QUARTER;
                self.high -= FIRST_QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.input.next();
        }
    }
}

/// Encoded sequence. `num_bits` is the exact code length; `bytes` holds the
/// bits MSB-first, zero padded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codeword {
    pub bytes: Vec<u8>,
    pub num_bits: u64,
    pub num_symbols: usize,
    pub alphabet_size: usize,
}

fn primed_model(y_mem: &[Symbol], alphabet_size: usize) -> Result<ContextModel, CoderError> {
    let mut model = ContextModel::first_order(alphabet_size)?;
    model.prime(y_mem)?;
    Ok(model)
}

fn checked_total(model: &ContextModel, ctx: usize) -> Result<u64, CoderError> {
    let total = model.scaled_total(ctx);
    if total > MAX_CODER_TOTAL {
        Err(CoderError::TotalTooLarge(total))
    } else {
        Ok(total)
    }
}

/// Encodes `x` with a first-order KT model primed by `y_mem`.
pub fn encode(
    x: &[Symbol],
    y_mem: &[Symbol],
    alphabet_size: usize,
) -> Result<Codeword, CoderError> {
    let mut model = primed_model(y_mem, alphabet_size)?;
    x.iter().try_for_each(|&s| model.check_symbol(s))?;
    let mut enc = Encoder::new();
    let mut prev = None;
    for &s in x {
        let ctx = model.context(prev);
        checked_total(&model, ctx)?;
        let (lo, hi, total) = model.frequency(ctx, s);
        enc.encode(lo, hi, total);
        model.update(ctx, s);
        prev = Some(s);
    }
    let out = enc.finish();
    Ok(Codeword {
        bytes: out.bytes,
        num_bits: out.len,
        num_symbols: x.len(),
        alphabet_size,
    })
}

/// Decodes `codeword` with a model primed by `y_mem`. Only a decoder that
/// memorized the same `y_mem` as the encoder recovers the input.
pub fn decode(codeword: &Codeword, y_mem: &[Symbol]) -> Result<Vec<Symbol>, CoderError> {
    let mut model = primed_model(y_mem, codeword.alphabet_size)?;
    let mut dec = Decoder::new(&codeword.bytes, codeword.num_bits);
    let mut out = Vec::with_capacity(codeword.num_symbols);
    let mut prev = None;
    for _ in 0..codeword.num_symbols {
        let ctx = model.context(prev);
        let total = checked_total(&model, ctx)?;
        let target = dec.target(total).min(total - 1);
        let (s, lo, hi) = model.symbol_at(ctx, target);
        dec.consume(lo, hi, total);
        model.update(ctx, s);
        out.push(s);
        prev = Some(s);
    }
    Ok(out)
}

/// Result of a checked encode/decode cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrip {
    pub codeword: Codeword,
    pub decoded: Vec<Symbol>,
    /// Ideal KT code length in bits.
    pub ideal_bits: f64,
}

impl RoundTrip {
    /// Allowed coder overhead over the ideal length: `0.01 n + 4` bits.
    pub fn budget(num_symbols: usize) -> f64 {
        0.01 * num_symbols as f64 + 4.0
    }

    pub fn overhead(&self) -> f64 {
        self.codeword.num_bits as f64 - self.ideal_bits
    }
}

/// Encodes `x` given `y_mem`, decodes with the same memory, and checks both
/// losslessness and the overhead budget.
pub fn roundtrip(
    x: &[Symbol],
    y_mem: &[Symbol],
    alphabet_size: usize,
) -> Result<RoundTrip, CoderError> {
    let codeword = encode(x, y_mem, alphabet_size)?;
    let decoded = decode(&codeword, y_mem)?;
    if let Some(position) = x.iter().zip(&decoded).position(|(a, b)| a != b) {
        return Err(CoderError::DecodeMismatch { position });
    }
    let ideal_bits = super::codelength_with_mem(x, y_mem, alphabet_size)?;
    let budget = RoundTrip::budget(x.len());
    if codeword.num_bits as f64 > ideal_bits + budget {
        return Err(CoderError::OverheadBudgetExceeded {
            actual: codeword.num_bits,
            ideal: ideal_bits,
            budget,
        });
    }
    Ok(RoundTrip {
        codeword,
        decoded,
        ideal_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memcoder::sample_source;

    #[test]
    fn single_symbol_roundtrip() {
        let rt = roundtrip(&[1], &[], 2).unwrap();
        assert_eq!(rt.decoded, vec![1]);
        assert_eq!(rt.ideal_bits, 1.0);
        assert!(rt.codeword.num_bits as f64 <= 1.0 + 4.0);
    }

    #[test]
    fn empty_input_roundtrips() {
        let rt = roundtrip(&[], &[0, 1], 2).unwrap();
        assert!(rt.decoded.is_empty());
    }

    #[test]
    fn primed_roundtrip_on_sampled_source() {
        let src = sample_source(4, 77).unwrap();
        let y = src.generate(20_000, 0);
        let x = src.generate(3000, 1);
        let rt = roundtrip(&x, &y, 4).unwrap();
        assert_eq!(rt.decoded, x);
        assert!(rt.overhead() >= 0.0);
        assert!(rt.overhead() <= RoundTrip::budget(x.len()));
    }

    #[test]
    fn wrong_memory_does_not_decode() {
        let src = sample_source(4, 78).unwrap();
        let y = src.generate(4096, 0);
        let y_other = src.generate(4096, 5);
        let x = src.generate(512, 1);
        let codeword = encode(&x, &y, 4).unwrap();
        assert_eq!(decode(&codeword, &y).unwrap(), x);
        assert_ne!(decode(&codeword, &y_other).unwrap(), x);
    }

    #[test]
    fn oversized_context_total_is_rejected() {
        let mut model = ContextModel::first_order(2).unwrap();
        model.add_counts(0, 0, MAX_CODER_TOTAL / 2);
        assert!(matches!(
            checked_total(&model, 0),
            Err(CoderError::TotalTooLarge(_))
        ));
    }

    #[test]
    fn bad_symbol_is_rejected() {
        assert!(matches!(
            encode(&[0, 4], &[], 4),
            Err(CoderError::SymbolOutOfRange { symbol: 4, .. })
        ));
    }
}
