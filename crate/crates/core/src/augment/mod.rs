//! Training-time transforms: specs, ops, chains and ZCA whitening.

pub mod chain;
pub mod ops;
pub mod spec;
pub mod zca;

pub use chain::{apply_chain, BatchTargets};
pub use spec::{AugChain, DsaOp, DsaPolicy, TransformSpec, CHAIN_GRAMMAR_VERSION};
pub use zca::ZcaWhitener;
