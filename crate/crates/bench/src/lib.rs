//! Fixtures shared by the benchmarks.

use poslog_core::corpus::{self, Corpus};
use poslog_core::structures::fixtures::{cycles, unary_signature};
use poslog_core::{FinStructure, SearchBudget};

pub fn corpus() -> Corpus {
    corpus::load().expect("bundled corpus parses")
}

/// A permutation with the given cycle lengths.
pub fn permutation(lengths: &[usize]) -> FinStructure {
    cycles("P", unary_signature(), lengths)
}

pub fn budget(n: usize) -> SearchBudget {
    SearchBudget::default().with_size(n)
}
