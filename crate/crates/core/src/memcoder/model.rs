use serde::{Deserialize, Serialize};

use super::{check_alphabet, CoderError, Symbol};

/// Which past the estimator conditions on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContextOrder {
    /// One shared context (i.i.d. model).
    Memoryless,
    /// Context is the previous symbol; the first symbol of every sequence is
    /// coded in a separate start context.
    FirstOrder,
}

/// Symbol counts per context for the KT estimator.
///
/// The KT estimate of symbol `s` in a context with counts `c` and total `T` is
/// `(c_s + 1/2) / (T + A/2)`, i.e. the integer frequency `2 c_s + 1` over
/// `2 T + A`. The arithmetic coder uses those integer frequencies directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextModel {
    alphabet_size: usize,
    order: ContextOrder,
    counts: Vec<u64>,
    totals: Vec<u64>,
}

impl ContextModel {
    pub fn new(alphabet_size: usize, order: ContextOrder) -> Result<Self, CoderError> {
        check_alphabet(alphabet_size)?;
        let contexts = match order {
            ContextOrder::Memoryless => 1,
            ContextOrder::FirstOrder => alphabet_size + 1,
        };
        Ok(Self {
            alphabet_size,
            order,
            counts: vec![0; contexts * alphabet_size],
            totals: vec![0; contexts],
        })
    }

    /// Fresh first-order model.
    pub fn first_order(alphabet_size: usize) -> Result<Self, CoderError> {
        Self::new(alphabet_size, ContextOrder::FirstOrder)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn order(&self) -> ContextOrder {
        self.order
    }

    pub fn num_contexts(&self) -> usize {
        self.totals.len()
    }

    /// Context index for a symbol whose predecessor is `prev`.
    pub fn context(&self, prev: Option<Symbol>) -> usize {
        match (self.order, prev) {
            (ContextOrder::Memoryless, _) => 0,
            (ContextOrder::FirstOrder, Some(p)) => p as usize,
            (ContextOrder::FirstOrder, None) => self.alphabet_size,
        }
    }

    pub fn count(&self, ctx: usize, symbol: Symbol) -> u64 {
        self.counts[ctx * self.alphabet_size + symbol as usize]
    }

    pub fn total(&self, ctx: usize) -> u64 {
        self.totals[ctx]
    }

    /// KT probability of `symbol` in context `ctx`.
    pub fn probability(&self, ctx: usize, symbol: Symbol) -> f64 {
        (2 * self.count(ctx, symbol) + 1) as f64 / self.scaled_total(ctx) as f64
    }

    /// Cumulative integer frequency interval `[lo, hi)` of `symbol` out of
    /// `total = 2 T + A`.
    pub fn frequency(&self, ctx: usize, symbol: Symbol) -> (u64, u64, u64) {
        let a = self.alphabet_size;
        let row = &self.counts[ctx * a..(ctx + 1) * a];
        let s = symbol as usize;
        let lo = 2 * row[..s].iter().sum::<u64>() + s as u64;
        (lo, lo + 2 * row[s] + 1, self.scaled_total(ctx))
    }

    pub fn scaled_total(&self, ctx: usize) -> u64 {
        2 * self.totals[ctx] + self.alphabet_size as u64
    }

    /// Symbol whose frequency interval contains `target < scaled_total(ctx)`,
    /// with its interval.
    pub fn symbol_at(&self, ctx: usize, target: u64) -> (Symbol, u64, u64) {
        let a = self.alphabet_size;
        let row = &self.counts[ctx * a..(ctx + 1) * a];
        let mut lo = 0;
        for (s, &c) in row.iter().enumerate() {
            let hi = lo + 2 * c + 1;
            if target < hi {
                return (s as Symbol, lo, hi);
            }
            lo = hi;
        }
        unreachable!("target {target} beyond context total")
    }

    pub fn update(&mut self, ctx: usize, symbol: Symbol) {
        self.counts[ctx * self.alphabet_size + symbol as usize] += 1;
        self.totals[ctx] += 1;
    }

    #[cfg(test)]
    pub(crate) fn add_counts(&mut self, ctx: usize, symbol: Symbol, by: u64) {
        self.counts[ctx * self.alphabet_size + symbol as usize] += by;
        self.totals[ctx] += by;
    }

    pub fn check_symbol(&self, symbol: Symbol) -> Result<(), CoderError> {
        if (symbol as usize) < self.alphabet_size {
            Ok(())
        } else {
            Err(CoderError::SymbolOutOfRange {
                symbol,
                alphabet_size: self.alphabet_size,
            })
        }
    }

    fn check_all(&self, seq: &[Symbol]) -> Result<(), CoderError> {
        seq.iter().try_for_each(|&s| self.check_symbol(s))
    }

    /// Adds the counts of `seq` without charging any bits. The first symbol
    /// of `seq` lands in the start context, exactly as if it had been coded.
    pub fn prime(&mut self, seq: &[Symbol]) -> Result<(), CoderError> {
        self.check_all(seq)?;
        let mut prev = None;
        for &s in seq {
            let ctx = self.context(prev);
            self.update(ctx, s);
            prev = Some(s);
        }
        Ok(())
    }

    /// Ideal sequential code length of `seq` in bits, updating counts as it
    /// goes.
    pub fn code(&mut self, seq: &[Symbol]) -> Result<f64, CoderError> {
        self.check_all(seq)?;
        let mut bits = 0.0;
        let mut prev = None;
        for &s in seq {
            let ctx = self.context(prev);
            bits -= self.probability(ctx, s).log2();
            self.update(ctx, s);
            prev = Some(s);
        }
        Ok(bits)
    }
}

/// `sum_t -log2 p_t` under the KT estimator; `model` keeps the updated counts.
pub fn kt_codelength(seq: &[Symbol], model: &mut ContextModel) -> Result<f64, CoderError> {
    model.code(seq)
}

/// Code length of `x` with a fresh first-order model.
pub fn codelength_no_mem(x: &[Symbol], alphabet_size: usize) -> Result<f64, CoderError> {
    ContextModel::first_order(alphabet_size)?.code(x)
}

/// Code length of `x` after both ends memorized `y_mem`.
pub fn codelength_with_mem(
    x: &[Symbol],
    y_mem: &[Symbol],
    alphabet_size: usize,
) -> Result<f64, CoderError> {
    let mut model = ContextModel::first_order(alphabet_size)?;
    model.prime(y_mem)?;
    model.code(x)
}

/// Both code lengths of one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodelengthReport {
    pub n: usize,
    pub m: usize,
    pub bits_no_mem: f64,
    pub bits_with_mem: f64,
}

impl CodelengthReport {
    pub fn measure(
        x: &[Symbol],
        y_mem: &[Symbol],
        alphabet_size: usize,
    ) -> Result<Self, CoderError> {
        Ok(Self {
            n: x.len(),
            m: y_mem.len(),
            bits_no_mem: codelength_no_mem(x, alphabet_size)?,
            bits_with_mem: codelength_with_mem(x, y_mem, alphabet_size)?,
        })
    }
}
