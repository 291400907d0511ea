use serde::{Deserialize, Serialize};

use super::table::{Cell, Table};
use super::HarnessError;
use crate::memcoder::{estimate_g, GainEstimate, GainParams, MemoryDraw};

/// Grid of `(n, m)` points for the coding-gain estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodingConfig {
    pub alphabet: usize,
    pub seq_lens: Vec<usize>,
    pub mem_lens: Vec<usize>,
    pub epsilon: f64,
    pub sources: usize,
    pub draws: usize,
    pub seed: u64,
    #[serde(default)]
    pub memory: MemoryDraw,
}

impl CodingConfig {
    fn params(&self, n: usize, m: usize) -> GainParams {
        GainParams {
            n,
            m,
            epsilon: self.epsilon,
            num_sources: self.sources,
            seq_draws: self.draws,
            alphabet_size: self.alphabet,
            seed: self.seed,
            memory: self.memory,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seq_lens.is_empty() || self.mem_lens.is_empty() {
            return Err(HarnessError::ConfigInvalid(
                "need at least one sequence length and one memory length".into(),
            ));
        }
        for &n in &self.seq_lens {
            self.params(n, 0).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodingRow {
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub sources: usize,
    pub draws: usize,
    pub g_hat: f64,
    pub mean_q: f64,
    /// Half-width of the 95% interval on `mean_q`.
    pub ci: f64,
}

impl CodingRow {
    pub fn from_estimate(est: &GainEstimate) -> Self {
        Self {
            n: est.n,
            m: est.m,
            epsilon: est.epsilon,
            sources: est.num_sources,
            draws: est.seq_draws,
            g_hat: est.g_hat,
            mean_q: est.mean_q(),
            ci: est.mean_ci95(),
        }
    }
}

impl Table for CodingRow {
    const HEADERS: &'static [&'static str] =
        &["n", "m", "epsilon", "K", "T", "g_hat", "mean_Q", "ci"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.n as u64),
            Cell::Int(self.m as u64),
            Cell::Float(self.epsilon),
            Cell::Int(self.sources as u64),
            Cell::Int(self.draws as u64),
            Cell::Float(self.g_hat),
            Cell::Float(self.mean_q),
            Cell::Float(self.ci),
        ]
    }
}

/// One row per `(n, m)`, `n` outermost. Every grid point reuses the same
/// seed, so all points see the same sources and comparisons across `n` and
/// `m` are paired.
pub fn run_coding_experiment(cfg: &CodingConfig) -> Result<Vec<CodingRow>, HarnessError> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.seq_lens.len() * cfg.mem_lens.len());
    for &n in &cfg.seq_lens {
        for &m in &cfg.mem_lens {
            let est = estimate_g(&cfg.params(n, m))?;
            rows.push(CodingRow::from_estimate(&est));
        }
    }
    Ok(rows)
}
