//! Lossy compression of symmetric binary sources with low-density
//! generator-matrix codes, including closed-chain spatially coupled
//! ensembles, encoded by belief-propagation guided decimation.
//!
//! The pipeline: sample a factor graph from an ensemble ([`ensemble`]),
//! draw a source word ([`codec`]), run message passing ([`bp`]) interleaved
//! with decimation ([`bpgd`]) to obtain an index word, and measure the
//! resulting distortion against the information-theoretic bound
//! ([`metrics`]). [`harness`] drives many instances in parallel and
//! [`oracle`] provides exhaustive ground truth on tiny instances.

pub mod bp;
pub mod bpgd;
pub mod cli;
pub mod codec;
pub mod ensemble;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod oracle;

pub use bp::{BPParams, MessageState, StopCondition};
pub use bpgd::{encode, DecimationPolicy, EncodingResult};
pub use codec::{distortion, reconstruct, IndexWord, SourceWord};
pub use ensemble::{EnsembleSpec, FactorGraph};
pub use error::{Error, Result};
pub use harness::{derive_seed, run_experiment, sweep_beta, ExperimentConfig, ExperimentReport};
pub use metrics::{beta_from_bsc, rd_bound, DistortionProfile};
