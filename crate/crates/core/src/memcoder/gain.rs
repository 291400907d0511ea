//! Monte Carlo estimates of the memorization gain.
//!
//! `Q` of a source is the ratio of mean code lengths without and with memory;
//! `g(n, m, ε)` is the largest `z` such that a fraction `1 - ε` of the source
//! family has `Q >= z`. Sources are drawn with [`sample_source`], so the
//! family measure is the Dirichlet(1/2) prior on each transition row.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{codelength_no_mem, codelength_with_mem, sample_source, CoderError, MarkovSource};
use crate::seed::mix;

/// How the memorized sequence is drawn across the `T` draws of one source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MemoryDraw {
    /// A new `y` for every draw (expectation over the memory too).
    #[default]
    Fresh,
    /// One `y` per source, shared by all draws (conditions on the memory).
    Shared,
}

/// Per-source estimate with its mean code lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QEstimate {
    pub q: f64,
    pub mean_bits_no_mem: f64,
    pub mean_bits_with_mem: f64,
}

/// `Q̂` for one source over `draws` paired draws. Draw `t` codes
/// `x = src.generate(n, mix(seed, 2t))` with a fresh model and again after
/// memorizing `y = src.generate(m, mix(seed, 2t + 1))`, so numerator and
/// denominator share their `x`.
pub fn estimate_q(
    src: &MarkovSource,
    n: usize,
    m: usize,
    draws: usize,
    seed: u64,
) -> Result<f64, CoderError> {
    Ok(estimate_q_detailed(src, n, m, draws, seed, MemoryDraw::Fresh)?.q)
}

pub fn estimate_q_detailed(
    src: &MarkovSource,
    n: usize,
    m: usize,
    draws: usize,
    seed: u64,
    memory: MemoryDraw,
) -> Result<QEstimate, CoderError> {
    if draws == 0 {
        return Err(CoderError::InvalidParameter(
            "need at least one draw".into(),
        ));
    }
    if n == 0 {
        return Err(CoderError::InvalidParameter(
            "sequence length must be >= 1".into(),
        ));
    }
    let a = src.alphabet_size();
    let shared = match memory {
        MemoryDraw::Shared => Some(src.generate(m, mix(seed, 1))),
        MemoryDraw::Fresh => None,
    };
    let (mut sum_no, mut sum_with) = (0.0, 0.0);
    for t in 0..draws as u64 {
        let x = src.generate(n, mix(seed, 2 * t));
        let fresh;
        let y = match &shared {
            Some(y) => y,
            None => {
                fresh = src.generate(m, mix(seed, 2 * t + 1));
                &fresh
            }
        };
        sum_no += codelength_no_mem(&x, a)?;
        sum_with += codelength_with_mem(&x, y, a)?;
    }
    let k = draws as f64;
    Ok(QEstimate {
        q: sum_no / sum_with,
        mean_bits_no_mem: sum_no / k,
        mean_bits_with_mem: sum_with / k,
    })
}

/// Inputs of [`estimate_g`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainParams {
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub num_sources: usize,
    pub seq_draws: usize,
    pub alphabet_size: usize,
    pub seed: u64,
    #[serde(default)]
    pub memory: MemoryDraw,
}

impl GainParams {
    pub const MIN_SOURCES: usize = 20;

    /// 1-based rank of the order statistic used as `g_hat`.
    pub fn quantile_rank(&self) -> usize {
        (self.epsilon * self.num_sources as f64).floor() as usize + 1
    }

    pub fn validate(&self) -> Result<(), CoderError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(CoderError::InvalidParameter(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.num_sources < Self::MIN_SOURCES || self.quantile_rank() > self.num_sources {
            return Err(CoderError::InvalidParameter(format!(
                "insufficient sources: K = {} (need K >= {} and floor(eps K) + 1 <= K)",
                self.num_sources,
                Self::MIN_SOURCES
            )));
        }
        if self.seq_draws == 0 || self.n == 0 {
            return Err(CoderError::InvalidParameter(
                "need n >= 1 and T >= 1".into(),
            ));
        }
        super::check_alphabet(self.alphabet_size)
    }
}

/// Sampled `Q̂` values and the empirical lower ε-quantile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainEstimate {
    /// One entry per source, in source order.
    pub q_samples: Vec<f64>,
    pub epsilon: f64,
    pub g_hat: f64,
    pub n: usize,
    pub m: usize,
    pub num_sources: usize,
    pub seq_draws: usize,
}

impl GainEstimate {
    pub fn mean_q(&self) -> f64 {
        self.q_samples.iter().sum::<f64>() / self.q_samples.len() as f64
    }

    /// Sample standard deviation of `Q̂`.
    pub fn std_q(&self) -> f64 {
        let k = self.q_samples.len();
        if k < 2 {
            return 0.0;
        }
        let mean = self.mean_q();
        let ss: f64 = self.q_samples.iter().map(|q| (q - mean).powi(2)).sum();
        (ss / (k - 1) as f64).sqrt()
    }

    /// Half-width of the normal-approximation 95% interval on the mean `Q̂`.
    pub fn mean_ci95(&self) -> f64 {
        1.96 * self.std_q() / (self.q_samples.len() as f64).sqrt()
    }

    /// Fraction of sources with `Q̂ >= g_hat`; at least `1 - ε` by
    /// construction.
    pub fn coverage(&self) -> f64 {
        let hits = self.q_samples.iter().filter(|&&q| q >= self.g_hat).count();
        hits as f64 / self.q_samples.len() as f64
    }
}

/// Estimates `g(n, m, ε)` from `K` sampled sources and `T` draws each.
///
/// Source `k` is `sample_source(A, mix(seed, 2k))` and its draws use seed
/// `mix(seed, 2k + 1)`. `g_hat` is the `(floor(εK) + 1)`-th smallest `Q̂`.
pub fn estimate_g(params: &GainParams) -> Result<GainEstimate, CoderError> {
    params.validate()?;
    let q_samples = (0..params.num_sources as u64)
        .into_par_iter()
        .map(|k| {
            let src = sample_source(params.alphabet_size, mix(params.seed, 2 * k))?;
            estimate_q_detailed(
                &src,
                params.n,
                params.m,
                params.seq_draws,
                mix(params.seed, 2 * k + 1),
                params.memory,
            )
            .map(|e| e.q)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut sorted = q_samples.clone();
    sorted.sort_by(f64::total_cmp);
    let g_hat = sorted[params.quantile_rank() - 1];
    Ok(GainEstimate {
        q_samples,
        epsilon: params.epsilon,
        g_hat,
        n: params.n,
        m: params.m,
        num_sources: params.num_sources,
        seq_draws: params.seq_draws,
    })
}
