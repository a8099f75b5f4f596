//! The authentication scheme: the message and the shared key are sent as
//! separate wiretap-code blocks over the main channel; the receiver decodes
//! both and accepts iff the decoded key matches the key it holds.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{Distribution, Dmc};
use crate::error::{Error, Result};
use crate::wiretap_code::Codebook;

/// Message and key codebooks plus the key prior. Passing the same codebook
/// for both slots reproduces the single-shared-codebook scheme; distinct
/// codebooks allow |M| != |K| experiments.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    message_codebook: Arc<Codebook>,
    key_codebook: Arc<Codebook>,
    key_prior: Distribution,
}

impl ProtocolConfig {
    pub fn new(
        message_codebook: Arc<Codebook>,
        key_codebook: Arc<Codebook>,
        key_prior: Distribution,
    ) -> Result<Self> {
        if key_prior.len() != key_codebook.num_bins() {
            return Err(Error::parameter(format!(
                "key prior over {} values, key codebook has {} bins",
                key_prior.len(),
                key_codebook.num_bins()
            )));
        }
        Ok(Self {
            message_codebook,
            key_codebook,
            key_prior,
        })
    }

    /// Uniform key prior.
    pub fn with_uniform_key(message_codebook: Arc<Codebook>, key_codebook: Arc<Codebook>) -> Self {
        let key_prior = Distribution::uniform(key_codebook.num_bins());
        Self {
            message_codebook,
            key_codebook,
            key_prior,
        }
    }

    pub fn num_messages(&self) -> usize {
        self.message_codebook.num_bins()
    }

    pub fn num_keys(&self) -> usize {
        self.key_codebook.num_bins()
    }

    pub fn message_codebook(&self) -> &Codebook {
        &self.message_codebook
    }

    pub fn key_codebook(&self) -> &Codebook {
        &self.key_codebook
    }

    pub fn key_prior(&self) -> &Distribution {
        &self.key_prior
    }
}

/// Receiver output: accept with a decoded message, or reject.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    /// Present exactly when accepted.
    pub decoded_message: Option<usize>,
}

/// Completeness estimate: miss and wrong-accept components of P_e.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    /// Authentic frame rejected.
    pub p_miss: f64,
    /// Accepted but the message decoded incorrectly.
    pub p_wrong_accept: f64,
    /// p_miss + p_wrong_accept.
    pub p_e: f64,
    pub trials: usize,
}

/// Stochastic encoding of (message, key) into the two transmitted blocks.
pub fn send<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    m: usize,
    k: usize,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if m >= config.num_messages() {
        return Err(Error::parameter(format!(
            "message index {m} outside 0..{}",
            config.num_messages()
        )));
    }
    if k >= config.num_keys() {
        return Err(Error::parameter(format!(
            "key index {k} outside 0..{}",
            config.num_keys()
        )));
    }
    let x_msg = config.message_codebook.encode(m, rng)?;
    let x_key = config.key_codebook.encode(k, rng)?;
    Ok((x_msg, x_key))
}

/// Receiver side: decode the key block first; accept iff it matches the
/// held key, and only then decode the message block.
pub fn receive(
    config: &ProtocolConfig,
    main: &Dmc,
    y_msg: &[usize],
    y_key: &[usize],
    k: usize,
) -> Result<Verdict> {
    if k >= config.num_keys() {
        return Err(Error::parameter(format!(
            "key index {k} outside 0..{}",
            config.num_keys()
        )));
    }
    if y_msg.len() != config.message_codebook.n() {
        return Err(Error::parameter(format!(
            "message block has length {}, codebook expects {}",
            y_msg.len(),
            config.message_codebook.n()
        )));
    }
    let (k_hat, _) = config.key_codebook.decode(main, y_key)?;
    if k_hat != k {
        return Ok(Verdict {
            accepted: false,
            decoded_message: None,
        });
    }
    let (m_hat, _) = config.message_codebook.decode(main, y_msg)?;
    Ok(Verdict {
        accepted: true,
        decoded_message: Some(m_hat),
    })
}

/// Monte Carlo completeness over uniform (m, k): counts misses and
/// wrong-accepts of authentic frames.
pub fn measure_completeness<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    main: &Dmc,
    trials: usize,
    rng: &mut R,
) -> Result<ErrorBreakdown> {
    if trials == 0 {
        return Err(Error::parameter("trials must be positive"));
    }
    let mut misses = 0usize;
    let mut wrong = 0usize;
    for _ in 0..trials {
        let m = rng.gen_range(0..config.num_messages());
        let k = rng.gen_range(0..config.num_keys());
        let (x_msg, x_key) = send(config, m, k, rng)?;
        let y_msg = main.transmit(&x_msg, rng)?;
        let y_key = main.transmit(&x_key, rng)?;
        let verdict = receive(config, main, &y_msg, &y_key, k)?;
        if !verdict.accepted {
            misses += 1;
        } else if verdict.decoded_message != Some(m) {
            wrong += 1;
        }
    }
    let p_miss = misses as f64 / trials as f64;
    let p_wrong_accept = wrong as f64 / trials as f64;
    Ok(ErrorBreakdown {
        p_miss,
        p_wrong_accept,
        p_e: p_miss + p_wrong_accept,
        trials,
    })
}
