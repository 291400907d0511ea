//! Closed-form predictions for uniformly placed memories in `G(N, p)`.

use serde::{Deserialize, Serialize};

use super::MemnetError;

fn invalid(msg: String) -> MemnetError {
    MemnetError::InvalidParameter(msg)
}

/// Radius of the benefit neighborhood, `(1 - 1/g - δ) ln N / ln ln N`.
/// `delta = 0` gives the full radius; larger `delta` shrinks it to limit
/// overlap between neighborhoods, reaching 0 at `delta = 1 - 1/g`.
pub fn predicted_radius(num_vertices: f64, gain: f64, delta: f64) -> Result<f64, MemnetError> {
    if !(num_vertices >= 3.0) {
        return Err(invalid(format!("radius needs N >= 3, got {num_vertices}")));
    }
    if !(gain > 1.0) {
        return Err(invalid(format!("radius needs g > 1, got {gain}")));
    }
    let span = 1.0 - 1.0 / gain;
    if !(0.0..=span).contains(&delta) {
        return Err(invalid(format!(
            "delta must lie in [0, 1 - 1/g] = [0, {span}], got {delta}"
        )));
    }
    let n = num_vertices.ln();
    Ok((span - delta) * (n / n.ln()))
}

/// Memory count `N^(1/g)` separating no gain from full coverage.
pub fn threshold_memories(num_vertices: f64, gain: f64) -> Result<f64, MemnetError> {
    if !(num_vertices >= 2.0) {
        return Err(invalid(format!(
            "threshold needs N >= 2, got {num_vertices}"
        )));
    }
    if !(gain >= 1.0) {
        return Err(invalid(format!("threshold needs g >= 1, got {gain}")));
    }
    Ok(num_vertices.powf(1.0 / gain))
}

/// Predicted network gain together with whether `M` clears the threshold.
/// The formula only describes the network above threshold; below it the
/// gain tends to 1 and `value` can even drop under 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryGain {
    pub value: f64,
    pub above_threshold: bool,
}

/// `g / (1 - g log_N(M/N))` for `M` memories among `N` vertices.
pub fn theory_gain(
    num_vertices: f64,
    num_memories: f64,
    gain: f64,
) -> Result<TheoryGain, MemnetError> {
    if !(num_vertices >= 2.0) {
        return Err(invalid(format!(
            "theory gain needs N >= 2, got {num_vertices}"
        )));
    }
    if !(1.0..=num_vertices).contains(&num_memories) {
        return Err(invalid(format!(
            "theory gain needs 1 <= M <= N, got M={num_memories}, N={num_vertices}"
        )));
    }
    if !(gain > 1.0) || !gain.is_finite() {
        return Err(invalid(format!(
            "theory gain needs finite g > 1, got {gain}"
        )));
    }
    let log_ratio = (num_memories / num_vertices).ln() / num_vertices.ln();
    Ok(TheoryGain {
        value: gain / (1.0 - gain * log_ratio),
        above_threshold: num_memories >= threshold_memories(num_vertices, gain)?,
    })
}

/// [`theory_gain`] parameterized by `x = log_N M`; equals `1 / (1 - δ)`
/// with `δ = x - 1/g`.
pub fn theory_gain_at_exponent(exponent: f64, gain: f64) -> Result<TheoryGain, MemnetError> {
    if !(0.0..=1.0).contains(&exponent) {
        return Err(invalid(format!(
            "exponent must lie in [0, 1], got {exponent}"
        )));
    }
    if !(gain > 1.0) || !gain.is_finite() {
        return Err(invalid(format!(
            "theory gain needs finite g > 1, got {gain}"
        )));
    }
    Ok(TheoryGain {
        value: gain / (1.0 - gain * (exponent - 1.0)),
        above_threshold: exponent >= 1.0 / gain,
    })
}
