//! Error-performance analysis of space shift keying (SSK) and spatial modulation
//! (SM) MIMO links over Extended Generalized-K, Generalized-K and Nakagami-m fading.
//!
//! - [`specfun`]: log-gamma, Gauss 2F1, Fox H / Meijer G.
//! - [`fading`]: link models, Hankel-transform kernels, envelope sampling, SNR MGFs.
//! - [`asymptotics`]: high-SNR coefficients, asymptotic PEP, diversity/coding gains.
//! - [`exactperf`]: exact MGF of the difference variable, PEP and ABEP bounds.
//! - [`montecarlo`]: link-level simulator with ML detection.
//! - [`sweep`]: SNR sweeps and CSV output; [`selftest`]: the fast identity gate.

pub mod asymptotics;
pub mod error;
pub mod exactperf;
pub mod quadrature;
pub mod fading;
pub mod montecarlo;
pub mod selftest;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
