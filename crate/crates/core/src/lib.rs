//! Finding length-`k` increasing subsequences with few queries.
//!
//! * [`view`]: masked, restricted access to a sequence with query counting.
//! * [`exact`]: full-information oracles (LIS, distance to pattern-free, greedy families).
//! * [`structure`]: growing-suffix and splittable certificates, interval robustification.
//! * [`tester`]: the randomized one-sided search.
//! * [`generators`]: certified far and free instances.
//! * [`harness`]: success-rate and query-scaling experiments.
//! * [`io`]: sequence files.

pub mod exact;
pub mod generators;
pub mod harness;
pub mod io;
pub mod structure;
pub mod tester;
pub mod view;

pub use exact::{DisjointFamily, PatternWitness};
pub use generators::{CertifiedInstance, InstanceSpec, Style};
pub use tester::{find_monotone, AlgorithmConstants, RunOutcome, TesterError, TrialRng};
pub use view::{IndexInterval, MaskedValue, SequenceView, ValueRange};
