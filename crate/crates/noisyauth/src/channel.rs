//! Finite-alphabet discrete memoryless channels.
//!
//! A channel is a row-stochastic transition matrix over zero-based integer
//! alphabets. Blocks extend memorylessly: the probability of an output block
//! is the product of the per-symbol transition probabilities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for row/vector normalization checks.
pub const NORM_TOL: f64 = 1e-12;

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Builds a distribution, validating non-negativity and normalization.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::parameter("distribution must be non-empty"));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::parameter(
                "distribution entries must be finite and non-negative",
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::parameter(format!(
                "distribution sums to {sum}, expected 1 within {NORM_TOL}"
            )));
        }
        Ok(Self { probs })
    }

    /// Uniform distribution over `k` symbols.
    pub fn uniform(k: usize) -> Self {
        assert!(k > 0, "alphabet must be non-empty");
        Self {
            probs: vec![1.0 / k as f64; k],
        }
    }

    /// Point mass on symbol `i` of an alphabet of size `k`.
    pub fn point_mass(i: usize, k: usize) -> Self {
        assert!(i < k);
        let mut probs = vec![0.0; k];
        probs[i] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// Index of the largest entry, smallest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Internal constructor for vectors already known to be normalized
    /// (e.g. renormalized posteriors). Still asserts in debug builds.
    pub(crate) fn from_normalized(probs: Vec<f64>) -> Self {
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        Self { probs }
    }

    /// Samples a symbol index by inverse CDF.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }
}

/// A log-probability with a linear-space accessor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogProb(pub f64);

impl LogProb {
    /// Natural-log value.
    pub fn ln(self) -> f64 {
        self.0
    }

    /// Linear probability, `exp` of the stored log.
    pub fn linear(self) -> f64 {
        self.0.exp()
    }
}

/// A discrete memoryless channel: a row-stochastic matrix, one row per
/// input symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dmc {
    input_size: usize,
    output_size: usize,
    matrix: Vec<Vec<f64>>,
}

impl Dmc {
    /// Builds a channel from a transition matrix, validating that every row
    /// is a probability vector. Normalization is never silently repaired.
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        if matrix.is_empty() || matrix[0].is_empty() {
            return Err(Error::parameter("channel matrix must be non-empty"));
        }
        let output_size = matrix[0].len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != output_size {
                return Err(Error::parameter(format!(
                    "row {i} has {} entries, expected {output_size}",
                    row.len()
                )));
            }
            if row.iter().any(|&p| p < 0.0 || !p.is_finite()) {
                return Err(Error::parameter(format!(
                    "row {i} has a negative or non-finite entry"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > NORM_TOL {
                return Err(Error::parameter(format!(
                    "row {i} sums to {sum}, expected 1 within {NORM_TOL}"
                )));
            }
        }
        Ok(Self {
            input_size: matrix.len(),
            output_size,
            matrix,
        })
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    /// P(y|x) for single symbols.
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.matrix[x][y]
    }

    /// Parses a channel document: either `{"matrix": [[...], ...]}` or the
    /// BSC shortcut `{"bsc": p}`.
    pub fn from_json(doc: &str) -> Result<Self> {
        let spec: ChannelSpec =
            serde_json::from_str(doc).map_err(|e| Error::Parse(e.to_string()))?;
        spec.build()
    }

    /// Sends a block through the channel, drawing each output symbol
    /// independently from the row of its input symbol.
    pub fn transmit<R: Rng + ?Sized>(&self, x: &[usize], rng: &mut R) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(x.len());
        for &xi in x {
            if xi >= self.input_size {
                return Err(Error::parameter(format!(
                    "input symbol {xi} outside alphabet of size {}",
                    self.input_size
                )));
            }
            let row = &self.matrix[xi];
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut y = self.output_size - 1;
            for (j, &p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    y = j;
                    break;
                }
            }
            out.push(y);
        }
        Ok(out)
    }

    /// Block likelihood `∏_j P(y_j|x_j)`, accumulated in log-space.
    pub fn block_likelihood(&self, x: &[usize], y: &[usize]) -> Result<LogProb> {
        if x.len() != y.len() {
            return Err(Error::parameter(format!(
                "input block has length {}, output block {}",
                x.len(),
                y.len()
            )));
        }
        let mut log = 0.0f64;
        for (&xi, &yi) in x.iter().zip(y) {
            if xi >= self.input_size || yi >= self.output_size {
                return Err(Error::parameter(format!(
                    "symbol pair ({xi},{yi}) outside alphabets"
                )));
            }
            log += self.matrix[xi][yi].ln();
        }
        Ok(LogProb(log))
    }

    /// Marginal output distribution `inputᵀ · matrix`.
    pub fn output_distribution(&self, input: &Distribution) -> Result<Distribution> {
        if input.len() != self.input_size {
            return Err(Error::parameter(format!(
                "input distribution over {} symbols, channel expects {}",
                input.len(),
                self.input_size
            )));
        }
        let mut out = vec![0.0; self.output_size];
        for (x, row) in self.matrix.iter().enumerate() {
            let px = input.get(x);
            for (y, &p) in row.iter().enumerate() {
                out[y] += px * p;
            }
        }
        Ok(Distribution::from_normalized(out))
    }
}

/// Binary symmetric channel with the given crossover probability.
pub fn make_bsc(crossover: f64) -> Result<Dmc> {
    if !(0.0..=1.0).contains(&crossover) || !crossover.is_finite() {
        return Err(Error::parameter(format!(
            "crossover {crossover} outside [0,1]"
        )));
    }
    Dmc::new(vec![
        vec![1.0 - crossover, crossover],
        vec![crossover, 1.0 - crossover],
    ])
}

/// JSON channel document: full matrix or BSC shortcut.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Bsc { bsc: f64 },
    Matrix { matrix: Vec<Vec<f64>> },
}

impl ChannelSpec {
    pub fn build(&self) -> Result<Dmc> {
        match self {
            ChannelSpec::Bsc { bsc } => make_bsc(*bsc),
            ChannelSpec::Matrix { matrix } => Dmc::new(matrix.clone()),
        }
    }
}

/// A wiretap channel: main and wiretapper channels sharing one input
/// alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WiretapPair {
    main: Dmc,
    wiretap: Dmc,
}

impl WiretapPair {
    pub fn new(main: Dmc, wiretap: Dmc) -> Result<Self> {
        if main.input_size() != wiretap.input_size() {
            return Err(Error::parameter(format!(
                "main channel has {} inputs, wiretap {}",
                main.input_size(),
                wiretap.input_size()
            )));
        }
        Ok(Self { main, wiretap })
    }

    pub fn main(&self) -> &Dmc {
        &self.main
    }

    pub fn wiretap(&self) -> &Dmc {
        &self.wiretap
    }

    pub fn input_size(&self) -> usize {
        self.main.input_size()
    }
}

/// Visits every length-`n` block over an alphabet of `alphabet` symbols in
/// lexicographic order. Used by exhaustive enumerations; the fixed order
/// makes compensated sums reproducible.
pub fn for_each_block<F: FnMut(&[usize])>(alphabet: usize, n: usize, mut f: F) {
    let mut block = vec![0usize; n];
    loop {
        f(&block);
        // odometer increment
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            block[i] += 1;
            if block[i] < alphabet {
                break;
            }
            block[i] = 0;
        }
    }
}

/// Number of length-`n` blocks over `alphabet` symbols, saturating.
pub fn block_space_size(alphabet: usize, n: usize) -> u128 {
    let mut size: u128 = 1;
    for _ in 0..n {
        size = size.saturating_mul(alphabet as u128);
    }
    size
}
