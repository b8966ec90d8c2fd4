//! Shared helpers for the integration suites: an enumeration oracle for
//! global alignment scores, plus random-instance generators.
#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use seqanon::align::ScoringParams;
use seqanon::lattice::Code;
use seqanon::matching::DistanceMatrix;
use seqanon::seqio::SequenceRecord;

pub const BASES: [Code; 4] = [Code::A, Code::C, Code::G, Code::T];

/// Score one complete alignment directly from its columns: intersecting
/// base sets earn the match reward, disjoint ones the mismatch penalty,
/// and each maximal gap run costs open plus length times extend unless it
/// touches an alignment end while end gaps are free. This is the scoring
/// contract restated without any dynamic program.
pub fn score_alignment(a: &[Code], b: &[Code], p: &ScoringParams) -> i64 {
    assert_eq!(a.len(), b.len());
    let cols = a.len();
    let mut score = 0i64;
    for i in 0..cols {
        let (x, y) = (a[i], b[i]);
        assert!(!(x.is_gap() && y.is_gap()), "column with two gaps");
        if !x.is_gap() && !y.is_gap() {
            score += if x.base_mask() & y.base_mask() != 0 {
                p.match_reward as i64
            } else {
                p.mismatch_penalty as i64
            };
        }
    }
    for row in [a, b] {
        let mut i = 0;
        while i < cols {
            if !row[i].is_gap() {
                i += 1;
                continue;
            }
            let start = i;
            while i < cols && row[i].is_gap() {
                i += 1;
            }
            let touches_end = start == 0 || i == cols;
            if !(p.end_gaps_free && touches_end) {
                score += p.gap_open as i64 + (i - start) as i64 * p.gap_extend as i64;
            }
        }
    }
    score
}

/// Optimal global alignment score by enumerating every monotone alignment
/// of `x` and `y` and scoring each with [`score_alignment`]. Exponential,
/// so only for short sequences.
pub fn best_alignment_score(x: &[Code], y: &[Code], p: &ScoringParams) -> i64 {
    fn recurse(
        x: &[Code],
        y: &[Code],
        i: usize,
        j: usize,
        row_a: &mut Vec<Code>,
        row_b: &mut Vec<Code>,
        p: &ScoringParams,
        best: &mut i64,
    ) {
        if i == x.len() && j == y.len() {
            *best = (*best).max(score_alignment(row_a, row_b, p));
            return;
        }
        if i < x.len() && j < y.len() {
            row_a.push(x[i]);
            row_b.push(y[j]);
            recurse(x, y, i + 1, j + 1, row_a, row_b, p, best);
            row_a.pop();
            row_b.pop();
        }
        if i < x.len() {
            row_a.push(x[i]);
            row_b.push(Code::Gap);
            recurse(x, y, i + 1, j, row_a, row_b, p, best);
            row_a.pop();
            row_b.pop();
        }
        if j < y.len() {
            row_a.push(Code::Gap);
            row_b.push(y[j]);
            recurse(x, y, i, j + 1, row_a, row_b, p, best);
            row_a.pop();
            row_b.pop();
        }
    }

    assert!(!x.is_empty() && !y.is_empty());
    let mut best = i64::MIN;
    recurse(x, y, 0, 0, &mut Vec::new(), &mut Vec::new(), p, &mut best);
    best
}

/// `len` random bases (ACGT only).
pub fn random_bases(rng: &mut ChaCha8Rng, len: usize) -> Vec<Code> {
    (0..len).map(|_| BASES[rng.random_range(0..4)]).collect()
}

/// `len` random codes drawn from the full 15-letter gap-free alphabet.
pub fn random_codes(rng: &mut ChaCha8Rng, len: usize) -> Vec<Code> {
    let letters: Vec<Code> = Code::ALL.into_iter().filter(|c| !c.is_gap()).collect();
    (0..len).map(|_| letters[rng.random_range(0..letters.len())]).collect()
}

pub fn record(id: &str, codes: Vec<Code>) -> SequenceRecord {
    SequenceRecord::new(id, "", codes).expect("generated records are valid")
}

/// A random symmetric zero-diagonal matrix with entries in `0..=max_entry`.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, max_entry: u64) -> DistanceMatrix {
    let upper: Vec<u64> =
        (0..n * n.saturating_sub(1) / 2).map(|_| rng.random_range(0..=max_entry)).collect();
    DistanceMatrix::from_upper(n, &upper).expect("generated matrix is valid")
}
