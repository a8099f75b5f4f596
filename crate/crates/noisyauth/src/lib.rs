//! Simulation and analysis toolkit for message authentication over noisy
//! channels.
//!
//! The toolkit models a wiretap channel (a main channel to the legitimate
//! receiver and a noisier channel to the opponent), builds binned
//! constant-composition codebooks on it, runs the send-message-then-key
//! authentication protocol, and evaluates impersonation and substitution
//! attacks both by Monte Carlo simulation and by exact enumeration, side by
//! side with the theoretical success-probability bounds.

pub mod adversary;
pub mod channel;
pub mod error;
pub mod infotheory;
pub mod protocol;
pub mod seed;
pub mod simulator;
pub mod wiretap_code;

pub use error::{Error, Result};
