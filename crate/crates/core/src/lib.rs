//! Redundant RFID reader elimination.
//!
//! A network model of readers and tags, a tag-memory arena that counts every
//! write-to-tag operation, six detection schemes (simultaneous query, RRE,
//! LEO, LEO+RRE, overlap-aware OA and density-priority DRRE), exact oracles
//! for small networks, and a seeded experiment harness.

pub mod algorithms;
pub mod experiment;
pub mod fixtures;
pub mod metrics;
pub mod netfile;
pub mod network;
pub mod scenario;
pub mod tag_memory;

pub use algorithms::{AlgorithmId, DetectionResult};
pub use metrics::{CoverageVerdict, MetricsReport};
pub use network::{ExecutionOrder, Point2D, ReaderId, ReaderSpec, RfidNetwork, TagId, TagSpec};
pub use scenario::{ExperimentPlan, ScenarioConfig, Setup};
pub use tag_memory::{TagMemory, TagStatus, WriteLedger};
