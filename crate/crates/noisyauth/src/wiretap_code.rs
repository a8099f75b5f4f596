//! Binned constant-composition codebooks for the wiretap channel.
//!
//! A codebook is a set of distinct codewords drawn uniformly from one type
//! class and partitioned into equal-size disjoint bins, one bin per key
//! value. The encoder picks a uniform codeword inside the key's bin; the
//! decoder is maximum likelihood over the whole codebook. Leakage metrics
//! (the average L1 gap `d_av` between bin-conditional and overall
//! eavesdropper output distributions, and the exact key leakage `I(K;Z)`)
//! are computed by exhaustive enumeration of the eavesdropper's output
//! block space when it fits a budget, or by sampling otherwise.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{block_space_size, for_each_block, Distribution, Dmc, WiretapPair};
use crate::error::{Error, Result};
use crate::infotheory::{l1_distance_slices, mutual_information_bits};

/// Default cap on enumerated eavesdropper output states for exact modes.
pub const DEFAULT_ENUM_BUDGET: u64 = 1 << 24;

/// Constant-composition codebook partitioned into equal-size key bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    num_bins: usize,
    bin_size: usize,
    bins: Vec<Vec<Vec<usize>>>,
    composition: Vec<usize>,
}

/// Rates and slacks of a codebook against the binning-construction
/// thresholds. Negative slacks are reported, never enforced; they mark
/// parameter choices outside the regime where leakage vanishes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateReport {
    /// log2(|C|)/n.
    pub code_rate_bits: f64,
    /// log2(N)/n, N the number of bins.
    pub bin_rate_bits: f64,
    /// I(X;Y) at the quantized composition's empirical distribution.
    pub main_mi: f64,
    /// I(X;Z) at the same distribution.
    pub wire_mi: f64,
    /// main_mi − code_rate_bits.
    pub delta_slack: f64,
    /// (main_mi − wire_mi) − bin_rate_bits.
    pub secrecy_slack: f64,
    pub warnings: Vec<String>,
}

/// Posterior over bins given one eavesdropper output block.
#[derive(Debug, Clone)]
pub struct BinPosterior {
    pub dist: Distribution,
    /// False when the observed block has zero likelihood under every
    /// codeword; the posterior then falls back to the prior.
    pub reachable: bool,
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Largest-remainder rounding of `n * p` to integer counts summing to `n`.
pub fn quantize_composition(input: &Distribution, n: usize) -> Vec<usize> {
    let raw: Vec<f64> = input.probs().iter().map(|&p| p * n as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|&x| x.floor() as usize).collect();
    let mut short = n - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    // largest fractional part first; index breaks ties
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in &order {
        if short == 0 {
            break;
        }
        counts[i] += 1;
        short -= 1;
    }
    counts
}

impl Codebook {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    pub fn bin_size(&self) -> usize {
        self.bin_size
    }

    pub fn composition(&self) -> &[usize] {
        &self.composition
    }

    pub fn bin(&self, j: usize) -> &[Vec<usize>] {
        &self.bins[j]
    }

    pub fn word(&self, bin: usize, idx: usize) -> &[usize] {
        &self.bins[bin][idx]
    }

    /// Total codewords |C| = num_bins · bin_size.
    pub fn size(&self) -> usize {
        self.num_bins * self.bin_size
    }

    /// Uniformly random codeword from bin `bin_index`.
    pub fn encode<R: Rng + ?Sized>(&self, bin_index: usize, rng: &mut R) -> Result<Vec<usize>> {
        if bin_index >= self.num_bins {
            return Err(Error::parameter(format!(
                "bin index {bin_index} outside 0..{}",
                self.num_bins
            )));
        }
        let i = rng.gen_range(0..self.bin_size);
        Ok(self.bins[bin_index][i].clone())
    }

    /// Maximum-likelihood decoding over the whole codebook. Ties break to
    /// the smallest (bin, codeword) pair.
    pub fn decode(&self, main: &Dmc, y: &[usize]) -> Result<(usize, usize)> {
        if y.len() != self.n {
            return Err(Error::parameter(format!(
                "received block has length {}, codebook expects {}",
                y.len(),
                self.n
            )));
        }
        let mut best = (0usize, 0usize);
        let mut best_ll = f64::NEG_INFINITY;
        for (j, bin) in self.bins.iter().enumerate() {
            for (i, word) in bin.iter().enumerate() {
                let ll = main.block_likelihood(word, y)?.ln();
                if ll > best_ll {
                    best_ll = ll;
                    best = (j, i);
                }
            }
        }
        Ok(best)
    }

    /// Exact Bayes posterior over bins given eavesdropper output `z`:
    /// P(C_j|z) ∝ prior_j · (1/bin_size) · Σ_{x∈C_j} P(z|x).
    pub fn bin_posteriors(
        &self,
        wiretap: &Dmc,
        z: &[usize],
        key_prior: &Distribution,
    ) -> Result<BinPosterior> {
        if z.len() != self.n {
            return Err(Error::parameter(format!(
                "observed block has length {}, codebook expects {}",
                z.len(),
                self.n
            )));
        }
        if key_prior.len() != self.num_bins {
            return Err(Error::parameter(format!(
                "key prior over {} values, codebook has {} bins",
                key_prior.len(),
                self.num_bins
            )));
        }
        // per-bin log of Σ_x P(z|x), via logsumexp
        let mut log_weights = Vec::with_capacity(self.num_bins);
        for (j, bin) in self.bins.iter().enumerate() {
            let lls: Vec<f64> = bin
                .iter()
                .map(|w| wiretap.block_likelihood(w, z).map(|l| l.ln()))
                .collect::<Result<_>>()?;
            let m = lls.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lw = if m == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                m + lls.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
            };
            let prior = key_prior.get(j);
            log_weights.push(if prior > 0.0 {
                lw + prior.ln()
            } else {
                f64::NEG_INFINITY
            });
        }
        let m = log_weights
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Ok(BinPosterior {
                dist: key_prior.clone(),
                reachable: false,
            });
        }
        let mut probs: Vec<f64> = log_weights.iter().map(|&lw| (lw - m).exp()).collect();
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        Ok(BinPosterior {
            dist: Distribution::from_normalized(probs),
            reachable: true,
        })
    }

    /// Per-bin conditional output weights Σ_{x∈C_j} P(z|x) / bin_size, i.e.
    /// Q_j(z) for every bin at a single z. Linear space; callers keep n
    /// within the enumeration budget.
    pub(crate) fn bin_output_weights(&self, wiretap: &Dmc, z: &[usize]) -> Vec<f64> {
        let mat = wiretap.matrix();
        self.bins
            .iter()
            .map(|bin| {
                let s: f64 = bin
                    .iter()
                    .map(|w| w.iter().zip(z).map(|(&x, &zi)| mat[x][zi]).product::<f64>())
                    .sum();
                s / self.bin_size as f64
            })
            .collect()
    }

    /// Serializes to the compact `{n, bins}` document.
    pub fn to_json(&self) -> String {
        let doc = CodebookDoc {
            n: self.n,
            bins: self.bins.clone(),
        };
        serde_json::to_string(&doc).expect("codebook serialization cannot fail")
    }

    /// Rebuilds from the `{n, bins}` document, revalidating all invariants.
    pub fn from_json(doc: &str) -> Result<Self> {
        let doc: CodebookDoc =
            serde_json::from_str(doc).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.bins.is_empty() || doc.bins[0].is_empty() {
            return Err(Error::parameter(
                "codebook must have at least one non-empty bin",
            ));
        }
        let num_bins = doc.bins.len();
        let bin_size = doc.bins[0].len();
        let mut seen = HashSet::new();
        let mut composition: Option<Vec<usize>> = None;
        for bin in &doc.bins {
            if bin.len() != bin_size {
                return Err(Error::parameter("bins must have equal sizes"));
            }
            for word in bin {
                if word.len() != doc.n {
                    return Err(Error::parameter("codeword length differs from n"));
                }
                let max_sym = word.iter().max().copied().unwrap_or(0);
                let mut counts = vec![0usize; max_sym + 1];
                for &s in word {
                    counts[s] += 1;
                }
                match &composition {
                    None => composition = Some(counts),
                    Some(c) => {
                        let mut padded = c.clone();
                        padded.resize(padded.len().max(counts.len()), 0);
                        let mut counts2 = counts.clone();
                        counts2.resize(padded.len(), 0);
                        if padded != counts2 {
                            return Err(Error::parameter("codewords have mixed compositions"));
                        }
                    }
                }
                if !seen.insert(word.clone()) {
                    return Err(Error::parameter("duplicate codeword in codebook"));
                }
            }
        }
        Ok(Self {
            n: doc.n,
            num_bins,
            bin_size,
            bins: doc.bins,
            composition: composition.unwrap(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CodebookDoc {
    n: usize,
    bins: Vec<Vec<Vec<usize>>>,
}

/// Builds a binned constant-composition codebook: `num_bins · bin_size`
/// distinct codewords sampled uniformly without replacement from the type
/// class of the quantized composition, assigned to bins in sampling order.
pub fn build_codebook<R: Rng + ?Sized>(
    pair: &WiretapPair,
    n: usize,
    num_bins: usize,
    bin_size: usize,
    input: &Distribution,
    rng: &mut R,
) -> Result<(Codebook, RateReport)> {
    if n == 0 || num_bins == 0 || bin_size == 0 {
        return Err(Error::parameter("n, num_bins, bin_size must be positive"));
    }
    if input.len() != pair.input_size() {
        return Err(Error::parameter(format!(
            "input distribution over {} symbols, channel alphabet has {}",
            input.len(),
            pair.input_size()
        )));
    }
    let composition = quantize_composition(input, n);
    let target = num_bins * bin_size;
    // type class size check in log space
    let ln_class = ln_factorial(n) - composition.iter().map(|&c| ln_factorial(c)).sum::<f64>();
    if ln_class < (target as f64).ln() - 1e-9 {
        return Err(Error::parameter(format!(
            "type class of composition {composition:?} holds ~exp({ln_class:.2}) sequences, \
             fewer than the {target} requested codewords"
        )));
    }

    let mut base: Vec<usize> = Vec::with_capacity(n);
    for (sym, &count) in composition.iter().enumerate() {
        base.extend(std::iter::repeat_n(sym, count));
    }
    let mut words: Vec<Vec<usize>> = Vec::with_capacity(target);
    let mut seen: HashSet<Vec<usize>> = HashSet::with_capacity(target);
    let retry_cap = 200 * target + 10_000;
    let mut attempts = 0usize;
    while words.len() < target {
        attempts += 1;
        if attempts > retry_cap {
            return Err(Error::parameter(format!(
                "could not sample {target} distinct codewords from composition {composition:?} \
                 within {retry_cap} attempts"
            )));
        }
        let mut w = base.clone();
        w.shuffle(rng);
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    let bins: Vec<Vec<Vec<usize>>> = words.chunks(bin_size).map(|c| c.to_vec()).collect();
    let codebook = Codebook {
        n,
        num_bins,
        bin_size,
        bins,
        composition: composition.clone(),
    };

    let empirical = Distribution::new(composition.iter().map(|&c| c as f64 / n as f64).collect())?;
    let main_mi = mutual_information_bits(&empirical, pair.main())?;
    let wire_mi = mutual_information_bits(&empirical, pair.wiretap())?;
    let code_rate_bits = (target as f64).log2() / n as f64;
    let bin_rate_bits = (num_bins as f64).log2() / n as f64;
    let delta_slack = main_mi - code_rate_bits;
    let secrecy_slack = (main_mi - wire_mi) - bin_rate_bits;
    let mut warnings = Vec::new();
    if delta_slack < 0.0 {
        warnings.push(format!(
            "code rate {code_rate_bits:.4} exceeds I(X;Y) = {main_mi:.4}"
        ));
    }
    if secrecy_slack < 0.0 {
        warnings.push(format!(
            "bin rate {bin_rate_bits:.4} exceeds secrecy rate {:.4}",
            main_mi - wire_mi
        ));
    }
    let report = RateReport {
        code_rate_bits,
        bin_rate_bits,
        main_mi,
        wire_mi,
        delta_slack,
        secrecy_slack,
        warnings,
    };
    Ok((codebook, report))
}

fn check_enum_budget(codebook: &Codebook, wiretap: &Dmc, budget: u64) -> Result<()> {
    let states = block_space_size(wiretap.output_size(), codebook.n());
    if states > budget as u128 {
        return Err(Error::resource(format!(
            "exact enumeration needs {states} output states, budget is {budget}"
        )));
    }
    Ok(())
}

/// Kahan compensated accumulator; fixed visit order keeps exact-mode sums
/// reproducible.
#[derive(Default, Clone, Copy)]
pub(crate) struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Exact `d_av(f) = Σ_z Q(z) d(z)`, `d(z) = Σ_j |P(C_j|z) − P(C_j)|`,
/// enumerated over the full output block space.
pub fn leakage_dav_exact(
    codebook: &Codebook,
    wiretap: &Dmc,
    key_prior: &Distribution,
    budget: u64,
) -> Result<f64> {
    if key_prior.len() != codebook.num_bins() {
        return Err(Error::parameter(
            "key prior dimension differs from bin count",
        ));
    }
    check_enum_budget(codebook, wiretap, budget)?;
    let prior = key_prior.probs();
    let mut acc = Kahan::default();
    for_each_block(wiretap.output_size(), codebook.n(), |z| {
        let qj = codebook.bin_output_weights(wiretap, z);
        let qz: f64 = qj.iter().zip(prior).map(|(q, p)| q * p).sum();
        if qz > 0.0 {
            let d: f64 = qj
                .iter()
                .zip(prior)
                .map(|(q, p)| (p * q / qz - p).abs())
                .sum();
            acc.add(qz * d);
        }
    });
    Ok(acc.value())
}

/// The alternative form `d_av(f) = Σ_j P(C_j) · ||Q_j − Q||_1`, computed by
/// materializing the bin-conditional output distributions. Independent of
/// `leakage_dav_exact`'s posterior route; the two must agree.
pub fn leakage_dav_by_bins(
    codebook: &Codebook,
    wiretap: &Dmc,
    key_prior: &Distribution,
    budget: u64,
) -> Result<f64> {
    if key_prior.len() != codebook.num_bins() {
        return Err(Error::parameter(
            "key prior dimension differs from bin count",
        ));
    }
    check_enum_budget(codebook, wiretap, budget)?;
    let states = block_space_size(wiretap.output_size(), codebook.n()) as usize;
    let prior = key_prior.probs();
    let mut q_j: Vec<Vec<f64>> = vec![Vec::with_capacity(states); codebook.num_bins()];
    for_each_block(wiretap.output_size(), codebook.n(), |z| {
        for (j, w) in codebook
            .bin_output_weights(wiretap, z)
            .into_iter()
            .enumerate()
        {
            q_j[j].push(w);
        }
    });
    let mut q = vec![0.0; states];
    for (j, qj) in q_j.iter().enumerate() {
        for (i, &w) in qj.iter().enumerate() {
            q[i] += prior[j] * w;
        }
    }
    let mut d_av = Kahan::default();
    for (j, qj) in q_j.iter().enumerate() {
        d_av.add(prior[j] * l1_distance_slices(qj, &q));
    }
    Ok(d_av.value())
}

/// Sampled estimate of `d_av(f)`: draws z by sampling a key from the prior,
/// a uniform codeword in its bin, and the wiretap channel, then averages
/// `d(z)`. Returns (mean, standard error).
pub fn leakage_dav_sampled<R: Rng + ?Sized>(
    codebook: &Codebook,
    wiretap: &Dmc,
    key_prior: &Distribution,
    trials: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::parameter("trials must be positive"));
    }
    if key_prior.len() != codebook.num_bins() {
        return Err(Error::parameter(
            "key prior dimension differs from bin count",
        ));
    }
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let prior = key_prior.probs();
    for _ in 0..trials {
        let j = key_prior.sample(rng);
        let x = codebook.encode(j, rng)?;
        let z = wiretap.transmit(&x, rng)?;
        let post = codebook.bin_posteriors(wiretap, &z, key_prior)?;
        let d: f64 = post
            .dist
            .probs()
            .iter()
            .zip(prior)
            .map(|(a, b)| (a - b).abs())
            .sum();
        sum += d;
        sumsq += d * d;
    }
    let mean = sum / trials as f64;
    let var = (sumsq / trials as f64 - mean * mean).max(0.0);
    Ok((mean, (var / trials as f64).sqrt()))
}

/// Exact key leakage I(K;Z) in bits, from the joint of the key and the
/// eavesdropper's output block.
pub fn key_leakage_bits(
    codebook: &Codebook,
    wiretap: &Dmc,
    key_prior: &Distribution,
    budget: u64,
) -> Result<f64> {
    if key_prior.len() != codebook.num_bins() {
        return Err(Error::parameter(
            "key prior dimension differs from bin count",
        ));
    }
    check_enum_budget(codebook, wiretap, budget)?;
    let prior = key_prior.probs();
    let mut acc = Kahan::default();
    for_each_block(wiretap.output_size(), codebook.n(), |z| {
        let qj = codebook.bin_output_weights(wiretap, z);
        let qz: f64 = qj.iter().zip(prior).map(|(q, p)| q * p).sum();
        if qz > 0.0 {
            for (q, p) in qj.iter().zip(prior) {
                if *q > 0.0 && *p > 0.0 {
                    acc.add(p * q * (q / qz).log2());
                }
            }
        }
    });
    Ok(acc.value().max(0.0))
}
