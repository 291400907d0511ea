use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::{check_alphabet, CoderError, Symbol};
use crate::seed::{mix, rng_from, SimRng};

pub const MAX_SOURCE_ATTEMPTS: u32 = 100;

const STOCHASTIC_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-9;

/// First-order Markov source over `0..alphabet_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSource {
    alphabet_size: usize,
    /// Row-major `A x A`; row `i` is the distribution of the next symbol
    /// after `i`.
    transitions: Vec<f64>,
    initial: Vec<f64>,
    seed: u64,
}

impl MarkovSource {
    pub fn new(rows: Vec<Vec<f64>>, initial: Vec<f64>, seed: u64) -> Result<Self, CoderError> {
        let a = rows.len();
        check_alphabet(a)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != a {
                return Err(CoderError::InvalidSource(format!(
                    "row {i} has {} entries, expected {a}",
                    row.len()
                )));
            }
            check_distribution(row, &format!("row {i}"))?;
        }
        if initial.len() != a {
            return Err(CoderError::InvalidSource(format!(
                "initial distribution has {} entries, expected {a}",
                initial.len()
            )));
        }
        check_distribution(&initial, "initial distribution")?;
        Ok(Self {
            alphabet_size: a,
            transitions: rows.into_iter().flatten().collect(),
            initial,
            seed,
        })
    }

    /// Chain started from its stationary distribution.
    pub fn stationary(rows: Vec<Vec<f64>>, seed: u64) -> Result<Self, CoderError> {
        let a = rows.len();
        check_alphabet(a)?;
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        if flat.len() != a * a {
            return Err(CoderError::InvalidSource(
                "transition matrix is not square".into(),
            ));
        }
        let pi = stationary_distribution(&flat, a).ok_or_else(|| {
            CoderError::InvalidSource("stationary distribution not unique".into())
        })?;
        Self::new(rows, pi, seed)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let a = self.alphabet_size;
        &self.transitions[i * a..(i + 1) * a]
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// Entropy rate `sum_i pi_i H(row_i)` in bits per symbol, with `pi` the
    /// initial distribution (stationary for sampled sources).
    pub fn entropy_rate(&self) -> f64 {
        (0..self.alphabet_size)
            .map(|i| self.initial[i] * entropy_bits(self.row(i)))
            .sum()
    }

    /// Sequence of length `n` from an explicit random stream.
    pub fn generate_with<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(n);
        if n == 0 {
            return out;
        }
        let mut cur = draw(&self.initial, rng);
        out.push(cur as Symbol);
        for _ in 1..n {
            cur = draw(self.row(cur), rng);
            out.push(cur as Symbol);
        }
        out
    }

    /// Sequence number `draw` of length `n`; a pure function of the source
    /// seed, `draw` and `n`.
    pub fn generate(&self, n: usize, draw: u64) -> Vec<Symbol> {
        self.generate_with(n, &mut self.draw_rng(draw))
    }

    pub(crate) fn draw_rng(&self, draw: u64) -> SimRng {
        rng_from(mix(self.seed, draw))
    }
}

fn check_distribution(p: &[f64], what: &str) -> Result<(), CoderError> {
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(CoderError::InvalidSource(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(CoderError::InvalidSource(format!("{what} sums to {sum}")));
    }
    Ok(())
}

fn entropy_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

fn draw<R: Rng>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i;
        }
    }
    // Rounding left `acc` a hair under 1; fall back to the last positive entry.
    p.iter().rposition(|&x| x > 0.0).unwrap_or(p.len() - 1)
}

/// Unique stationary distribution of a row-stochastic `a x a` matrix, or
/// `None` when the chain has more than one (or the solve is ill-conditioned).
pub fn stationary_distribution(transitions: &[f64], a: usize) -> Option<Vec<f64>> {
    // Solve (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    let mut m = vec![0.0; a * (a + 1)];
    let w = a + 1;
    for i in 0..a {
        for j in 0..a {
            m[i * w + j] = transitions[j * a + i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..a {
        m[(a - 1) * w + j] = 1.0;
    }
    m[(a - 1) * w + a] = 1.0;

    for col in 0..a {
        let pivot =
            (col..a).max_by(|&r, &s| m[r * w + col].abs().total_cmp(&m[s * w + col].abs()))?;
        if m[pivot * w + col].abs() < 1e-12 {
            return None;
        }
        if pivot != col {
            for k in 0..w {
                m.swap(pivot * w + k, col * w + k);
            }
        }
        let p = m[col * w + col];
        for r in 0..a {
            if r != col {
                let f = m[r * w + col] / p;
                if f != 0.0 {
                    for k in col..w {
                        m[r * w + k] -= f * m[col * w + k];
                    }
                }
            }
        }
    }
    let mut pi: Vec<f64> = (0..a).map(|i| m[i * w + a] / m[i * w + i]).collect();
    if pi.iter().any(|&x| x < -STATIONARY_TOL) {
        return None;
    }
    for x in &mut pi {
        *x = x.max(0.0);
    }
    let sum: f64 = pi.iter().sum();
    for x in &mut pi {
        *x /= sum;
    }
    let fixed_point = (0..a).all(|j| {
        let next: f64 = (0..a).map(|i| pi[i] * transitions[i * a + j]).sum();
        (next - pi[j]).abs() <= STATIONARY_TOL
    });
    fixed_point.then_some(pi)
}

/// Random source from the family: each transition row drawn independently
/// from a symmetric Dirichlet(1/2) and the chain started from its stationary
/// distribution. Chains without a unique stationary distribution are
/// redrawn (seed `mix(seed, attempt)`), up to [`MAX_SOURCE_ATTEMPTS`].
pub fn sample_source(alphabet_size: usize, seed: u64) -> Result<MarkovSource, CoderError> {
    check_alphabet(alphabet_size)?;
    let a = alphabet_size;
    let gamma = Gamma::new(0.5, 1.0).expect("valid gamma parameters");
    for attempt in 0..MAX_SOURCE_ATTEMPTS {
        let mut rng = rng_from(mix(seed, u64::from(attempt)));
        let mut flat = Vec::with_capacity(a * a);
        let mut ok = true;
        for _ in 0..a {
            let row: Vec<f64> = (0..a).map(|_| gamma.sample(&mut rng)).collect();
            let sum: f64 = row.iter().sum();
            if !(sum > 0.0) || !sum.is_finite() {
                ok = false;
                break;
            }
            flat.extend(row.iter().map(|x| x / sum));
        }
        if !ok {
            continue;
        }
        // Renormalizing can leave a row ~1 ulp off; fold the residue into
        // the largest entry.
        for r in 0..a {
            let row = &mut flat[r * a..(r + 1) * a];
            let drift = 1.0 - row.iter().sum::<f64>();
            let big = (0..a).max_by(|&i, &j| row[i].total_cmp(&row[j])).unwrap();
            row[big] += drift;
        }
        if let Some(pi) = stationary_distribution(&flat, a) {
            let rows = flat.chunks(a).map(<[f64]>::to_vec).collect();
            return MarkovSource::new(rows, pi, seed);
        }
    }
    Err(CoderError::NonErgodicChain(MAX_SOURCE_ATTEMPTS))
}
