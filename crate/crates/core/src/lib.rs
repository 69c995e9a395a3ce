//! Blue/red colorings of Boolean lattices: constructions, the recursive
//! embedding procedure with failure-chain certificates, structural
//! verifiers and brute-force subposet oracles.

pub mod lattice;
pub mod seed;
pub mod oracle;
pub mod constructions;
pub mod verifier;
pub mod embedder;
pub mod cli;
