//! Benchmark-only crate; see `benches/core_benches.rs`.

/// Shared instance sizes so the benches stay comparable across runs.
pub const TREE_DEPTH: usize = 4;
pub const WORD_BOUND: usize = 4;
