use std::path::PathBuf;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::{Cell, OutputFormat, Table};
use super::HarnessError;
use crate::graph::{generate_er, Graph, RandomGraphSpec, VertexId};
use crate::memnet::{effective_distances, theory_gain, Deployment, FlowSummary};
use crate::seed::{mix, mix3, rng_from};

/// Source vertex of every sampled graph.
pub const SOURCE: VertexId = 0;

const MEMORY_STREAM: u64 = u64::MAX;

/// Network sweep over memory-count exponents `x`, with `M = round(N^x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub nodes: usize,
    pub degree_coeff: f64,
    pub gain: f64,
    pub mem_exponents: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        RandomGraphSpec::new(self.nodes, self.degree_coeff, 0)?;
        if !(self.gain > 1.0) || !self.gain.is_finite() {
            return Err(HarnessError::ConfigInvalid(format!(
                "gain must be finite and > 1, got {}",
                self.gain
            )));
        }
        if self.trials == 0 {
            return Err(HarnessError::ConfigInvalid("trials must be >= 1".into()));
        }
        if self.mem_exponents.is_empty() {
            return Err(HarnessError::ConfigInvalid(
                "no memory exponents given".into(),
            ));
        }
        if let Some(x) = self
            .mem_exponents
            .iter()
            .find(|x| !(0.0..=1.0).contains(*x))
        {
            return Err(HarnessError::ConfigInvalid(format!(
                "memory exponent {x} outside [0, 1]"
            )));
        }
        Ok(())
    }
}

/// `max(1, round(N^x))`, capped at `N - 1` (every vertex but the source).
pub fn memory_count(nodes: usize, exponent: f64) -> usize {
    let m = (nodes as f64).powf(exponent).round() as usize;
    m.clamp(1, nodes.saturating_sub(1).max(1))
}

/// Seed of trial `trial` at sweep point `point`: `mix3(master, point, trial)`.
pub fn trial_seed(master_seed: u64, point: usize, trial: usize) -> u64 {
    mix3(master_seed, point as u64, trial as u64)
}

/// Samples a connected graph from `seed` and places `num_memories` memories
/// uniformly without replacement on the non-source vertices.
pub fn sample_deployment_parts(
    nodes: usize,
    degree_coeff: f64,
    num_memories: usize,
    seed: u64,
) -> Result<(Graph, Vec<VertexId>), HarnessError> {
    let graph = generate_er(&RandomGraphSpec::new(nodes, degree_coeff, seed)?)?;
    let mut rng = rng_from(mix(seed, MEMORY_STREAM));
    let mut memories: Vec<VertexId> = index::sample(&mut rng, nodes - 1, num_memories)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    memories.sort_unstable();
    Ok((graph, memories))
}

/// One trial of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub nodes: usize,
    pub degree_coeff: f64,
    pub gain: f64,
    pub exponent: f64,
    pub memories: usize,
    pub trial: usize,
    pub flow_no_mem: f64,
    pub flow_with_mem: f64,
    pub net_gain: f64,
}

impl Table for SweepRow {
    const HEADERS: &'static [&'static str] =
        &["N", "c", "g", "exponent", "M", "trial", "F0", "F", "G"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.nodes as u64),
            Cell::Float(self.degree_coeff),
            Cell::Float(self.gain),
            Cell::Float(self.exponent),
            Cell::Int(self.memories as u64),
            Cell::Int(self.trial as u64),
            Cell::Float(self.flow_no_mem),
            Cell::Float(self.flow_with_mem),
            Cell::Float(self.net_gain),
        ]
    }
}

/// Per-exponent summary of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAggregate {
    pub nodes: usize,
    pub degree_coeff: f64,
    pub gain: f64,
    pub exponent: f64,
    pub memories: usize,
    pub trials: usize,
    pub mean_gain: f64,
    /// Sample standard deviation (0 for a single trial).
    pub std_gain: f64,
    /// Closed-form prediction at this `M`, unclamped.
    pub theory_gain: f64,
    pub above_threshold: bool,
}

impl Table for SweepAggregate {
    const HEADERS: &'static [&'static str] = &[
        "N",
        "c",
        "g",
        "exponent",
        "M",
        "trials",
        "mean_G",
        "std_G",
        "theory_G",
        "above_threshold",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.nodes as u64),
            Cell::Float(self.degree_coeff),
            Cell::Float(self.gain),
            Cell::Float(self.exponent),
            Cell::Int(self.memories as u64),
            Cell::Int(self.trials as u64),
            Cell::Float(self.mean_gain),
            Cell::Float(self.std_gain),
            Cell::Float(self.theory_gain),
            Cell::Bool(self.above_threshold),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Ordered by exponent index, then trial.
    pub trials: Vec<SweepRow>,
    /// One per exponent, in config order.
    pub aggregates: Vec<SweepAggregate>,
}

/// Runs every (exponent, trial) pair in parallel. Output order and values
/// depend only on the config, never on scheduling.
pub fn run_network_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize)> = (0..cfg.mem_exponents.len())
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(point, trial)| run_trial(cfg, point, trial))
        .collect::<Result<Vec<_>, _>>()?;

    let aggregates = cfg
        .mem_exponents
        .iter()
        .enumerate()
        .map(|(point, &exponent)| {
            let gains: Vec<f64> = rows[point * cfg.trials..(point + 1) * cfg.trials]
                .iter()
                .map(|r| r.net_gain)
                .collect();
            let (mean, std) = mean_std(&gains);
            let memories = memory_count(cfg.nodes, exponent);
            let theory = theory_gain(cfg.nodes as f64, memories as f64, cfg.gain)?;
            Ok(SweepAggregate {
                nodes: cfg.nodes,
                degree_coeff: cfg.degree_coeff,
                gain: cfg.gain,
                exponent,
                memories,
                trials: cfg.trials,
                mean_gain: mean,
                std_gain: std,
                theory_gain: theory.value,
                above_threshold: theory.above_threshold,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    Ok(SweepResult {
        trials: rows,
        aggregates,
    })
}

fn run_trial(cfg: &ExperimentConfig, point: usize, trial: usize) -> Result<SweepRow, HarnessError> {
    let exponent = cfg.mem_exponents[point];
    let memories = memory_count(cfg.nodes, exponent);
    let seed = trial_seed(cfg.master_seed, point, trial);
    let (graph, mem_ids) = sample_deployment_parts(cfg.nodes, cfg.degree_coeff, memories, seed)?;
    let dep = Deployment::new(&graph, SOURCE, mem_ids, cfg.gain)?;
    let field = effective_distances(&dep)?;
    let summary = FlowSummary::from_field(&dep, &field)?;
    Ok(SweepRow {
        nodes: cfg.nodes,
        degree_coeff: cfg.degree_coeff,
        gain: cfg.gain,
        exponent,
        memories,
        trial,
        flow_no_mem: summary.flow_no_mem,
        flow_with_mem: summary.flow_with_mem,
        net_gain: summary.net_gain,
    })
}

pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// One deployment in full detail.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleRun {
    pub summary: SingleSummary,
    pub destinations: Vec<DestinationRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleSummary {
    pub nodes: usize,
    pub degree_coeff: f64,
    pub gain: f64,
    pub memories: usize,
    pub seed: u64,
    pub flow: FlowSummary,
}

impl Table for SingleSummary {
    const HEADERS: &'static [&'static str] = &["N", "c", "g", "M", "seed", "F0", "F", "G"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.nodes as u64),
            Cell::Float(self.degree_coeff),
            Cell::Float(self.gain),
            Cell::Int(self.memories as u64),
            Cell::Int(self.seed),
            Cell::Float(self.flow.flow_no_mem),
            Cell::Float(self.flow.flow_with_mem),
            Cell::Float(self.flow.net_gain),
        ]
    }
}

/// Per-destination detail of a single deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DestinationRow {
    pub vertex: VertexId,
    pub dist: u32,
    pub eff_dist: f64,
    pub memory: Option<VertexId>,
    pub in_d1: bool,
}

impl Table for DestinationRow {
    const HEADERS: &'static [&'static str] = &["vertex", "dist", "eff_dist", "memory", "in_D1"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.vertex as u64),
            Cell::Int(u64::from(self.dist)),
            Cell::Float(self.eff_dist),
            Cell::Text(self.memory.map(|m| m.to_string()).unwrap_or_default()),
            Cell::Bool(self.in_d1),
        ]
    }
}

/// Samples one graph and deployment from `seed` (same construction as a
/// sweep trial) and reports every destination.
pub fn run_single(
    nodes: usize,
    degree_coeff: f64,
    gain: f64,
    num_memories: usize,
    seed: u64,
) -> Result<SingleRun, HarnessError> {
    if num_memories >= nodes {
        return Err(HarnessError::ConfigInvalid(format!(
            "at most N - 1 = {} memories fit, got {num_memories}",
            nodes.saturating_sub(1)
        )));
    }
    if !(gain > 1.0) || !gain.is_finite() {
        return Err(HarnessError::ConfigInvalid(format!(
            "gain must be finite and > 1, got {gain}"
        )));
    }
    let (graph, mem_ids) = sample_deployment_parts(nodes, degree_coeff, num_memories, seed)?;
    let dep = Deployment::new(&graph, SOURCE, mem_ids, gain)?;
    let field = effective_distances(&dep)?;
    let flow = FlowSummary::from_field(&dep, &field)?;
    let destinations = dep
        .destinations()
        .map(|v| DestinationRow {
            vertex: v,
            dist: field.direct_distance(v),
            eff_dist: field.eff_dist(v),
            memory: field.chosen_memory(v),
            in_d1: field.in_d1(v),
        })
        .collect();
    Ok(SingleRun {
        summary: SingleSummary {
            nodes,
            degree_coeff,
            gain,
            memories: num_memories,
            seed,
            flow,
        },
        destinations,
    })
}
