//! Similarity-based anonymization of DNA sequence datasets.
//!
//! The toolkit clusters a dataset into groups of two (or, once per odd-sized
//! dataset, three) highly similar sequences and publishes a single
//! generalized sequence per group: aligned members are merged position by
//! position into their lowest common ancestor in the IUPAC generalization
//! lattice, so no published record can be attributed to fewer than two
//! originals. Information loss is measured with the lattice level distance.
//!
//! Modules:
//!
//! * [`lattice`] — the 16-code generalization hierarchy, distances, and
//!   positionwise obfuscation of aligned sequences.
//! * [`seqio`] — strict FASTA parsing/writing and a seeded synthetic-corpus
//!   generator for benchmarks.
//! * [`align`] — k-mer indexed homolog search (greedy seed-and-extend) and
//!   optimal affine-gap global alignment.
//! * [`cluster`] — the iterative cluster-and-obfuscate pipeline built on the
//!   homolog search.
//! * [`matching`] — baseline pairing strategies over an explicit pairwise
//!   distance matrix: exact minimum-weight perfect matching (blossom),
//!   greedy, stochastic hill-climb refinement, random pairing, and a
//!   brute-force oracle.
//! * [`report`] — information-loss statistics, repeat-run aggregation, and
//!   TSV/JSON emission.

pub mod align;
pub mod cluster;
mod error;
pub mod lattice;
pub mod matching;
pub mod report;
pub mod seqio;

pub use error::{Error, Result};
