//! Impersonation and substitution attacks, and exact evaluation of the
//! opponent's success-probability bounds.
//!
//! The opponent tracks a Bayesian posterior over the key from observed
//! key blocks. Impersonation injects the codeword of the most probable key;
//! substitution additionally replaces the message block with the message
//! least likely to be the original. The exact evaluators enumerate the
//! eavesdropper's output space and compute the expected posterior maximum,
//! which upper-bounds the attack success probability.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{block_space_size, for_each_block, Distribution, Dmc};
use crate::error::{Error, Result};
use crate::protocol::ProtocolConfig;
use crate::wiretap_code::{Codebook, Kahan};

/// The opponent's belief about the key after some observed key blocks.
#[derive(Debug, Clone)]
pub struct ObserverState {
    pub key_posterior: Distribution,
    pub observed_blocks: usize,
}

impl ObserverState {
    /// Fresh observer with the given key prior.
    pub fn new(key_prior: Distribution) -> Self {
        Self {
            key_posterior: key_prior,
            observed_blocks: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    Impersonation,
    Substitution,
}

impl std::fmt::Display for AttackKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttackKind::Impersonation => write!(f, "impersonation"),
            AttackKind::Substitution => write!(f, "substitution"),
        }
    }
}

/// A concrete injection the opponent will perform. The chosen indices are
/// deterministic given the observations; only the codeword picks inside the
/// forged bins are randomized.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackPlan {
    pub kind: AttackKind,
    pub forged_key: usize,
    pub forged_message: Option<usize>,
    pub x_msg: Vec<usize>,
    pub x_key: Vec<usize>,
}

/// Updates the key posterior with one observed key block. Key-block channel
/// uses are conditionally independent across rounds given the key, so
/// chaining the posterior as the next prior is exact Bayes.
pub fn observe_key_block(
    state: &ObserverState,
    codebook: &Codebook,
    wiretap: &Dmc,
    z: &[usize],
) -> Result<ObserverState> {
    let post = codebook.bin_posteriors(wiretap, z, &state.key_posterior)?;
    Ok(ObserverState {
        key_posterior: post.dist,
        observed_blocks: state.observed_blocks + 1,
    })
}

/// Impersonation: forge the posterior-argmax key (smallest index on ties)
/// and an arbitrary message (index 0).
pub fn plan_impersonation<R: Rng + ?Sized>(
    state: &ObserverState,
    protocol: &ProtocolConfig,
    rng: &mut R,
) -> Result<AttackPlan> {
    let forged_key = state.key_posterior.argmax();
    let forged_message = 0usize;
    let x_msg = protocol.message_codebook().encode(forged_message, rng)?;
    let x_key = protocol.key_codebook().encode(forged_key, rng)?;
    Ok(AttackPlan {
        kind: AttackKind::Impersonation,
        forged_key,
        forged_message: Some(forged_message),
        x_msg,
        x_key,
    })
}

/// Substitution: update the key posterior with the intercepted key block,
/// forge its argmax key, and forge the message with the smallest posterior
/// probability of being the original (maximizing Pr{m' != m}).
pub fn plan_substitution<R: Rng + ?Sized>(
    state: &ObserverState,
    protocol: &ProtocolConfig,
    z_msg: &[usize],
    z_key: &[usize],
    wiretap: &Dmc,
    rng: &mut R,
) -> Result<AttackPlan> {
    if protocol.num_messages() < 2 {
        return Err(Error::parameter(
            "substitution requires at least 2 messages so that m' != m is possible",
        ));
    }
    let key_state = observe_key_block(state, protocol.key_codebook(), wiretap, z_key)?;
    let forged_key = key_state.key_posterior.argmax();

    let msg_prior = Distribution::uniform(protocol.num_messages());
    let msg_post = protocol
        .message_codebook()
        .bin_posteriors(wiretap, z_msg, &msg_prior)?
        .dist;
    // argmin of P(m'|z_msg), smallest index on ties
    let mut forged_message = 0usize;
    for m in 1..msg_post.len() {
        if msg_post.get(m) < msg_post.get(forged_message) {
            forged_message = m;
        }
    }

    let x_msg = protocol.message_codebook().encode(forged_message, rng)?;
    let x_key = protocol.key_codebook().encode(forged_key, rng)?;
    Ok(AttackPlan {
        kind: AttackKind::Substitution,
        forged_key,
        forged_message: Some(forged_message),
        x_msg,
        x_key,
    })
}

/// Exact value of `Σ_z Q(z) · max_k P(k|z)` over the full output block
/// space: the single-observation upper bound on substitution success.
pub fn exact_substitution_upper(
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
    let states = block_space_size(wiretap.output_size(), codebook.n());
    if states > budget as u128 {
        return Err(Error::resource(format!(
            "exact enumeration needs {states} output states, budget is {budget}"
        )));
    }
    let prior = key_prior.probs();
    let mut acc = Kahan::default();
    for_each_block(wiretap.output_size(), codebook.n(), |z| {
        let qj = codebook.bin_output_weights(wiretap, z);
        // Q(z) * max_k P(k|z) = max_k prior_k * Q_k(z)
        let best = qj
            .iter()
            .zip(prior)
            .map(|(q, p)| q * p)
            .fold(0.0f64, f64::max);
        acc.add(best);
    });
    Ok(acc.value())
}

/// Exact multi-round bounds: entry `i` is
/// `Σ_{z_1..z_i} P(z_1..z_i) max_k P(k|z_1..z_i)`; entry 0 is the no-
/// observation guess `max_k P(k)`. Enumerates every history of up to
/// `rounds` key blocks.
pub fn exact_multiround_upper(
    codebook: &Codebook,
    wiretap: &Dmc,
    key_prior: &Distribution,
    rounds: usize,
    budget: u64,
) -> Result<Vec<f64>> {
    if key_prior.len() != codebook.num_bins() {
        return Err(Error::parameter(
            "key prior dimension differs from bin count",
        ));
    }
    if rounds == 0 {
        return Err(Error::parameter("rounds must be at least 1"));
    }
    let per_round = block_space_size(wiretap.output_size(), codebook.n());
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..rounds {
        level = level.saturating_mul(per_round);
        total = total.saturating_add(level);
    }
    if total > budget as u128 {
        return Err(Error::resource(format!(
            "exact multi-round enumeration needs {total} histories, budget is {budget}"
        )));
    }

    let mut acc: Vec<Kahan> = vec![Kahan::default(); rounds];
    // depth-first over histories; `joint` carries P(k, z_1..z_d) per key
    fn recurse(
        codebook: &Codebook,
        wiretap: &Dmc,
        joint: &[f64],
        depth: usize,
        rounds: usize,
        acc: &mut [Kahan],
    ) {
        for_each_block(wiretap.output_size(), codebook.n(), |z| {
            let qj = codebook.bin_output_weights(wiretap, z);
            let next: Vec<f64> = joint.iter().zip(&qj).map(|(j, q)| j * q).collect();
            let best = next.iter().cloned().fold(0.0f64, f64::max);
            acc[depth].add(best);
            if depth + 1 < rounds {
                recurse(codebook, wiretap, &next, depth + 1, rounds, acc);
            }
        });
    }
    recurse(codebook, wiretap, key_prior.probs(), 0, rounds, &mut acc);

    let mut result = Vec::with_capacity(rounds + 1);
    result.push(key_prior.max());
    result.extend(acc.iter().map(|k| k.value()));
    Ok(result)
}

/// Sampled estimator for the multi-round bounds: simulates key-block
/// histories forward and averages the posterior maximum per round. Returns
/// per-round (mean, standard error) with the exact round-0 entry first.
pub fn sampled_multiround_upper<R: Rng + ?Sized>(
    codebook: &Codebook,
    wiretap: &Dmc,
    key_prior: &Distribution,
    rounds: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<(f64, f64)>> {
    if rounds == 0 || trials == 0 {
        return Err(Error::parameter("rounds and trials must be positive"));
    }
    if key_prior.len() != codebook.num_bins() {
        return Err(Error::parameter(
            "key prior dimension differs from bin count",
        ));
    }
    let mut sums = vec![0.0f64; rounds];
    let mut sumsqs = vec![0.0f64; rounds];
    for _ in 0..trials {
        let k = key_prior.sample(rng);
        let mut state = ObserverState::new(key_prior.clone());
        for i in 0..rounds {
            let x = codebook.encode(k, rng)?;
            let z = wiretap.transmit(&x, rng)?;
            state = observe_key_block(&state, codebook, wiretap, &z)?;
            let m = state.key_posterior.max();
            sums[i] += m;
            sumsqs[i] += m * m;
        }
    }
    let mut result = Vec::with_capacity(rounds + 1);
    result.push((key_prior.max(), 0.0));
    for i in 0..rounds {
        let mean = sums[i] / trials as f64;
        let var = (sumsqs[i] / trials as f64 - mean * mean).max(0.0);
        result.push((mean, (var / trials as f64).sqrt()));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_bsc, WiretapPair};
    use crate::wiretap_code::{build_codebook, DEFAULT_ENUM_BUDGET};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn bsc_pair(pm: f64, pw: f64) -> WiretapPair {
        WiretapPair::new(make_bsc(pm).unwrap(), make_bsc(pw).unwrap()).unwrap()
    }

    fn codebook(pair: &WiretapPair, n: usize, bins: usize, bin_size: usize, seed: u64) -> Codebook {
        build_codebook(
            pair,
            n,
            bins,
            bin_size,
            &Distribution::uniform(2),
            &mut rng(seed),
        )
        .unwrap()
        .0
    }

    fn protocol(
        pair: &WiretapPair,
        n: usize,
        bins: usize,
        bin_size: usize,
        seed: u64,
    ) -> ProtocolConfig {
        let msg = codebook(pair, n, bins, bin_size, seed);
        let key = codebook(pair, n, bins, bin_size, seed + 1000);
        ProtocolConfig::with_uniform_key(Arc::new(msg), Arc::new(key))
    }

    #[test]
    fn observe_useless_wiretap_keeps_posterior() {
        let pair = bsc_pair(0.1, 0.5);
        let cb = codebook(&pair, 8, 4, 2, 1);
        let state = ObserverState::new(Distribution::uniform(4));
        let state = observe_key_block(&state, &cb, pair.wiretap(), &[0; 8]).unwrap();
        let state = observe_key_block(&state, &cb, pair.wiretap(), &[1; 8]).unwrap();
        assert_eq!(state.observed_blocks, 2);
        for j in 0..4 {
            assert!((state.key_posterior.get(j) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn observe_noiseless_singleton_bins_collapses() {
        let pair = bsc_pair(0.1, 0.0);
        let cb = codebook(&pair, 8, 4, 1, 2);
        let state = ObserverState::new(Distribution::uniform(4));
        let z = cb.word(3, 0).to_vec();
        let state = observe_key_block(&state, &cb, pair.wiretap(), &z).unwrap();
        assert!((state.key_posterior.get(3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sequential_updates_match_concatenated_evidence() {
        // Bayes-chaining oracle: posterior after (z1, z2) equals
        // prior_k * Q_k(z1) * Q_k(z2), normalized.
        let pair = bsc_pair(0.1, 0.2);
        let cb = codebook(&pair, 6, 4, 2, 3);
        let prior = Distribution::uniform(4);
        let mut r = rng(4);
        for _ in 0..50 {
            let z1: Vec<usize> = (0..6).map(|_| r.gen_range(0..2)).collect();
            let z2: Vec<usize> = (0..6).map(|_| r.gen_range(0..2)).collect();
            let s = ObserverState::new(prior.clone());
            let s = observe_key_block(&s, &cb, pair.wiretap(), &z1).unwrap();
            let s = observe_key_block(&s, &cb, pair.wiretap(), &z2).unwrap();

            let w1 = cb.bin_output_weights(pair.wiretap(), &z1);
            let w2 = cb.bin_output_weights(pair.wiretap(), &z2);
            let mut oracle: Vec<f64> = (0..4).map(|j| prior.get(j) * w1[j] * w2[j]).collect();
            let total: f64 = oracle.iter().sum();
            for o in &mut oracle {
                *o /= total;
            }
            for (j, &oracle_j) in oracle.iter().enumerate() {
                assert!(
                    (s.key_posterior.get(j) - oracle_j).abs() < 1e-12,
                    "bin {j}: {} vs {}",
                    s.key_posterior.get(j),
                    oracle[j]
                );
            }
        }
    }

    #[test]
    fn impersonation_plan_argmax() {
        let pair = bsc_pair(0.1, 0.3);
        let proto = protocol(&pair, 8, 4, 2, 5);
        let uniform = ObserverState::new(Distribution::uniform(4));
        let plan = plan_impersonation(&uniform, &proto, &mut rng(6)).unwrap();
        assert_eq!(plan.forged_key, 0);
        assert_eq!(plan.kind, AttackKind::Impersonation);

        let skewed = ObserverState::new(Distribution::new(vec![0.1, 0.7, 0.1, 0.1]).unwrap());
        let plan = plan_impersonation(&skewed, &proto, &mut rng(7)).unwrap();
        assert_eq!(plan.forged_key, 1);
        // injected key block is a codeword of the forged bin
        assert!(proto.key_codebook().bin(1).iter().any(|w| w == &plan.x_key));
    }

    #[test]
    fn substitution_plan_avoids_likely_original() {
        let pair = bsc_pair(0.0, 0.0); // noiseless everywhere
        let proto = protocol(&pair, 8, 2, 1, 8);
        let state = ObserverState::new(Distribution::uniform(2));
        // z_msg equal to message 0's codeword: posterior concentrates on 0
        let z_msg = proto.message_codebook().word(0, 0).to_vec();
        let z_key = proto.key_codebook().word(1, 0).to_vec();
        let plan =
            plan_substitution(&state, &proto, &z_msg, &z_key, pair.wiretap(), &mut rng(9)).unwrap();
        assert_eq!(plan.forged_message, Some(1));
        assert_eq!(plan.forged_key, 1); // noiseless wiretap exposes the key
    }

    #[test]
    fn substitution_requires_two_messages() {
        let pair = bsc_pair(0.1, 0.3);
        let msg = codebook(&pair, 8, 1, 2, 10);
        let key = codebook(&pair, 8, 4, 2, 11);
        let proto = ProtocolConfig::with_uniform_key(Arc::new(msg), Arc::new(key));
        let state = ObserverState::new(Distribution::uniform(4));
        let err = plan_substitution(
            &state,
            &proto,
            &[0; 8],
            &[0; 8],
            pair.wiretap(),
            &mut rng(12),
        );
        assert!(err.is_err());
    }

    #[test]
    fn substitution_uniform_posterior_tie_breaks() {
        let pair = bsc_pair(0.1, 0.5);
        let proto = protocol(&pair, 8, 4, 2, 13);
        let state = ObserverState::new(Distribution::uniform(4));
        let plan = plan_substitution(
            &state,
            &proto,
            &[0; 8],
            &[1; 8],
            pair.wiretap(),
            &mut rng(14),
        )
        .unwrap();
        assert_eq!(plan.forged_key, 0);
        assert_eq!(plan.forged_message, Some(0));
    }

    #[test]
    fn exact_upper_trivial_cases() {
        let prior = Distribution::uniform(4);
        // useless wiretap: posterior stays uniform
        let pair = bsc_pair(0.1, 0.5);
        let cb = codebook(&pair, 8, 4, 2, 15);
        let v = exact_substitution_upper(&cb, pair.wiretap(), &prior, DEFAULT_ENUM_BUDGET).unwrap();
        assert!((v - 0.25).abs() < 1e-12);
        // noiseless wiretap: z reveals the bin
        let pair = bsc_pair(0.1, 0.0);
        let cb = codebook(&pair, 8, 4, 2, 16);
        let v = exact_substitution_upper(&cb, pair.wiretap(), &prior, DEFAULT_ENUM_BUDGET).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_upper_dominates_prior_max() {
        for pw in [0.1, 0.25, 0.4, 0.5] {
            let pair = bsc_pair(0.05, pw);
            let cb = codebook(&pair, 8, 4, 2, 17);
            let prior = Distribution::uniform(4);
            let v =
                exact_substitution_upper(&cb, pair.wiretap(), &prior, DEFAULT_ENUM_BUDGET).unwrap();
            assert!(v >= prior.max() - 1e-15, "pw={pw}: {v}");
            assert!(v <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn exact_upper_matches_monte_carlo() {
        let pair = bsc_pair(0.05, 0.3);
        let cb = codebook(&pair, 10, 4, 2, 18);
        let prior = Distribution::uniform(4);
        let exact =
            exact_substitution_upper(&cb, pair.wiretap(), &prior, DEFAULT_ENUM_BUDGET).unwrap();
        let mut r = rng(19);
        let trials = 30_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..trials {
            let k = prior.sample(&mut r);
            let x = cb.encode(k, &mut r).unwrap();
            let z = pair.wiretap().transmit(&x, &mut r).unwrap();
            let m = cb
                .bin_posteriors(pair.wiretap(), &z, &prior)
                .unwrap()
                .dist
                .max();
            sum += m;
            sumsq += m * m;
        }
        let mean = sum / trials as f64;
        let var = (sumsq / trials as f64 - mean * mean).max(0.0);
        let se = (var / trials as f64).sqrt();
        assert!(
            (mean - exact).abs() <= 3.0 * se.max(1e-6),
            "{mean} ± {se} vs {exact}"
        );
    }

    #[test]
    fn multiround_trivial_and_monotone() {
        let prior = Distribution::uniform(4);
        // useless wiretap: flat at 0.25
        let pair = bsc_pair(0.1, 0.5);
        let cb = codebook(&pair, 4, 4, 1, 20);
        let v =
            exact_multiround_upper(&cb, pair.wiretap(), &prior, 2, DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(v.len(), 3);
        for x in &v {
            assert!((x - 0.25).abs() < 1e-12);
        }
        // noiseless wiretap: 1.0 after the first observation
        let pair = bsc_pair(0.1, 0.0);
        let cb = codebook(&pair, 4, 4, 1, 21);
        let v =
            exact_multiround_upper(&cb, pair.wiretap(), &prior, 2, DEFAULT_ENUM_BUDGET).unwrap();
        assert!((v[0] - 0.25).abs() < 1e-12);
        assert!((v[1] - 1.0).abs() < 1e-12);
        assert!((v[2] - 1.0).abs() < 1e-12);
        // noisy case: non-decreasing in the number of observations
        let pair = bsc_pair(0.05, 0.2);
        let cb = codebook(&pair, 4, 4, 1, 22);
        let v =
            exact_multiround_upper(&cb, pair.wiretap(), &prior, 3, DEFAULT_ENUM_BUDGET).unwrap();
        for w in v.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{v:?}");
        }
        // round 1 equals the single-shot bound by construction
        let single =
            exact_substitution_upper(&cb, pair.wiretap(), &prior, DEFAULT_ENUM_BUDGET).unwrap();
        assert!((v[1] - single).abs() < 1e-12);
    }

    #[test]
    fn multiround_matches_flat_history_oracle() {
        // brute-force oracle: directly enumerate (z1, z2) pairs
        let pair = bsc_pair(0.05, 0.25);
        let cb = codebook(&pair, 4, 4, 1, 23);
        let prior = Distribution::uniform(4);
        let v =
            exact_multiround_upper(&cb, pair.wiretap(), &prior, 2, DEFAULT_ENUM_BUDGET).unwrap();

        let mut oracle2 = 0.0;
        for_each_block(2, 4, |z1| {
            let w1 = cb.bin_output_weights(pair.wiretap(), z1);
            for_each_block(2, 4, |z2| {
                let w2 = cb.bin_output_weights(pair.wiretap(), z2);
                let best = (0..4)
                    .map(|j| prior.get(j) * w1[j] * w2[j])
                    .fold(0.0f64, f64::max);
                oracle2 += best;
            });
        });
        assert!((v[2] - oracle2).abs() < 1e-9, "{} vs {oracle2}", v[2]);
    }

    #[test]
    fn multiround_budget_error() {
        let pair = bsc_pair(0.05, 0.25);
        let cb = codebook(&pair, 8, 4, 2, 24);
        let prior = Distribution::uniform(4);
        let err = exact_multiround_upper(&cb, pair.wiretap(), &prior, 4, 1 << 20).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn sampled_multiround_matches_exact() {
        let pair = bsc_pair(0.05, 0.3);
        let cb = codebook(&pair, 6, 4, 1, 25);
        let prior = Distribution::uniform(4);
        let exact =
            exact_multiround_upper(&cb, pair.wiretap(), &prior, 2, DEFAULT_ENUM_BUDGET).unwrap();
        let sampled =
            sampled_multiround_upper(&cb, pair.wiretap(), &prior, 2, 20_000, &mut rng(26)).unwrap();
        assert_eq!(sampled[0].0, exact[0]);
        for i in 1..=2 {
            let (mean, se) = sampled[i];
            assert!(
                (mean - exact[i]).abs() <= 3.0 * se.max(1e-6),
                "round {i}: {mean} ± {se} vs {}",
                exact[i]
            );
        }
    }
}
