//! Deterministic income sharing for consortium supply chains.
//!
//! * [`model`]: the request tree, its JSON descriptor codec and validation.
//! * [`engine`]: unit costs, income shares, alignment, the profit/revenue
//!   sharing strategies and cent rounding, all in exact rationals.
//! * [`ledger`]: a hash-chained transaction log whose replay rebuilds every
//!   request's state.

pub mod canonical;
pub mod engine;
pub mod ledger;
pub mod model;
pub mod money;
#[cfg(feature = "testkit")]
pub mod testkit;

pub use canonical::Digest;
pub use engine::{run_sharing, EngineError, Participant, PayoutLine, SharingResult};
pub use ledger::{Ledger, LedgerBlock, LedgerEntry, LedgerError, Phase, RequestState, Transaction, TxKind};
pub use model::{
    parse_chain_descriptor, serialize_chain_descriptor, validate_chain, CostPolicy, NodeId,
    SharingScheme, SupplyChain, ValidationReport,
};
pub use money::{Money, Rational};
