//! Finite Ramsey theory on ordered trees.
//!
//! The crate provides canonical ordered trees ([`tree`]), maps between them
//! including rigid surjections and their Galois adjoints ([`maps`]), finite
//! fragments of normed composition spaces and Ramsey domains ([`framework`]),
//! set partitions ([`partitions`]), an exhaustive Ramsey-witness decision
//! engine ([`witness`]), Moore's convex-combination statement over binary
//! trees ([`moore`], backed by the exact simplex in [`lp`]) and full sets of
//! partial vectors over `Z/p` ([`fullsets`]).

pub mod framework;
pub mod fullsets;
pub mod lp;
pub mod maps;
pub mod moore;
pub mod partitions;
pub mod tree;
pub mod witness;

pub use maps::{GaloisPair, TreeMap};
pub use tree::{NormPoint, OrderedTree};

/// Default cap on exhaustive coloring sweeps, overridable by `RAMSEY_FORGE_CAP`.
pub const DEFAULT_COLORING_CAP: u128 = 1 << 20;

/// The coloring cap from `RAMSEY_FORGE_CAP`, or [`DEFAULT_COLORING_CAP`].
pub fn coloring_cap_from_env() -> u128 {
    std::env::var("RAMSEY_FORGE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v: &u128| v > 0)
        .unwrap_or(DEFAULT_COLORING_CAP)
}
