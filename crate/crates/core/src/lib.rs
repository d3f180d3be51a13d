//! Successive partition zero-forcing (SPZF) for phase-only artificial-noise
//! beamforming.
//!
//! The crate covers channel generation, polygon-inequality feasibility and
//! phase solving, the partition optimizers, the SPZF beamformer itself, and
//! Monte Carlo estimators for outage probability and secrecy rate.

pub mod channel;
pub mod error;
pub mod metrics;
pub mod partition;
pub mod polygon;
pub mod rng;
pub mod spzf;

pub use channel::{ChannelModelConfig, ChannelVector, EveChannelMatrix, ModelKind};
pub use error::{Result, SpzfError};
pub use metrics::{
    LogBase, MeanEstimate, OutageEstimate, OutagePolicy, RateSample, SecrecyConfig, SecrecyEstimate,
    TwoUserOutage,
};
pub use num_complex::Complex64;
pub use partition::{AlgoSettings, GaConfig, IterConfig, Partition, PartitionAlgo};
pub use spzf::{ErrorEvent, OutageReport, SpzfOutcome, SpzfSolution};
