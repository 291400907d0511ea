use serde::{Deserialize, Serialize};

use super::table::{Cell, Table};
use super::HarnessError;
use crate::memnet::{theory_gain_at_exponent, threshold_memories};

/// Label of rows where the closed form does not apply.
pub const BELOW_THRESHOLD_NOTE: &str = "below-threshold G~1";

/// Predicted gain at `M = N^x`. Below threshold the prediction does not
/// apply and `theory_gain` is reported as 1; `raw_gain` keeps the formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub nodes: usize,
    pub gain: f64,
    pub exponent: f64,
    pub memories: f64,
    pub threshold: f64,
    pub theory_gain: f64,
    pub raw_gain: f64,
    pub above_threshold: bool,
}

impl Table for TheoryRow {
    const HEADERS: &'static [&'static str] = &[
        "N",
        "g",
        "exponent",
        "M",
        "threshold_M",
        "theory_G",
        "raw_G",
        "above_threshold",
        "note",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.nodes as u64),
            Cell::Float(self.gain),
            Cell::Float(self.exponent),
            Cell::Float(self.memories),
            Cell::Float(self.threshold),
            Cell::Float(self.theory_gain),
            Cell::Float(self.raw_gain),
            Cell::Bool(self.above_threshold),
            Cell::Text(
                if self.above_threshold {
                    ""
                } else {
                    BELOW_THRESHOLD_NOTE
                }
                .into(),
            ),
        ]
    }
}

pub fn emit_theory_curve(
    nodes: usize,
    gain: f64,
    exponents: &[f64],
) -> Result<Vec<TheoryRow>, HarnessError> {
    let n = nodes as f64;
    let threshold = threshold_memories(n, gain)?;
    exponents
        .iter()
        .map(|&x| {
            let t = theory_gain_at_exponent(x, gain)?;
            Ok(TheoryRow {
                nodes,
                gain,
                exponent: x,
                memories: n.powf(x),
                threshold,
                theory_gain: if t.above_threshold { t.value } else { 1.0 },
                raw_gain: t.value,
                above_threshold: t.above_threshold,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_is_flat_below_threshold_and_reaches_g() {
        let rows = emit_theory_curve(4096, 1.25, &[0.0, 0.5, 0.8, 0.9, 1.0]).unwrap();
        assert_eq!(rows[0].theory_gain, 1.0);
        assert!(rows[0].raw_gain < 1.0);
        assert!(!rows[1].above_threshold);
        assert!(rows[2].above_threshold);
        assert!((rows[2].theory_gain - 1.0).abs() < 1e-12);
        assert!((rows[3].theory_gain - 1.0 / 0.9).abs() < 1e-12);
        assert!((rows[4].theory_gain - 1.25).abs() < 1e-12);
        assert!((rows[0].threshold - 4096f64.powf(0.8)).abs() < 1e-9);
    }

    #[test]
    fn bad_inputs() {
        assert!(emit_theory_curve(4096, 1.0, &[0.5]).is_err());
        assert!(emit_theory_curve(4096, 2.0, &[1.5]).is_err());
    }
}
