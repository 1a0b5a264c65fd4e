//! Differential fuzzing: generation, checking, shrinking and banking.

pub mod bank;
pub mod campaign;
pub mod diff;
pub mod gen;
pub mod shrink;

pub use bank::{Bank, BankCheck, BankEntry, CounterexampleMeta};
pub use campaign::{campaign, minimize_finding, CampaignConfig, FuzzReport};
pub use diff::{run_differential, triggers, DiffConfig, DiffResult, FindingKind, OracleAnswer};
pub use gen::{gen_random, GenParams, QuantPattern};
pub use shrink::shrink;
