//! Similarity search and optimal pairwise alignment.
//!
//! Search is a k-mer seed-and-extend scheme: exact ACGT words are indexed,
//! every shared word nominates a (record, diagonal) candidate, and each
//! candidate is scored by ungapped x-drop extension plus a banded gapped
//! local pass. The homolog is the candidate record with the highest score.
//!
//! Alignment is a three-layer affine-gap global dynamic program over codes. A
//! gap run of length k costs `gap_open + k * gap_extend`; with
//! `end_gaps_free` the runs touching either end of the alignment cost
//! nothing. Two codes score `match_reward` when their base sets intersect and
//! `mismatch_penalty` otherwise, so ambiguity codes match everything they
//! cover.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::lattice::{obfuscate_aligned, sequence_distance, AlignedSequence, Code};
use crate::seqio::{Dataset, SequenceRecord};
use crate::{Error, Result};

/// Scoring parameters shared by search and alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoringParams {
    pub match_reward: i32,
    pub mismatch_penalty: i32,
    pub gap_open: i32,
    pub gap_extend: i32,
    pub word_size: usize,
    pub end_gaps_free: bool,
}

impl Default for ScoringParams {
    fn default() -> Self {
        ScoringParams {
            match_reward: 1,
            mismatch_penalty: -2,
            gap_open: -4,
            gap_extend: -1,
            word_size: 12,
            end_gaps_free: true,
        }
    }
}

impl ScoringParams {
    pub fn validate(&self) -> Result<()> {
        if self.match_reward <= 0 {
            return Err(Error::InvalidParameter(format!(
                "match reward must be positive, got {}",
                self.match_reward
            )));
        }
        if self.mismatch_penalty >= 0 {
            return Err(Error::InvalidParameter(format!(
                "mismatch penalty must be negative, got {}",
                self.mismatch_penalty
            )));
        }
        if self.gap_open >= 0 {
            return Err(Error::InvalidParameter(format!(
                "gap open must be negative, got {}",
                self.gap_open
            )));
        }
        if self.gap_extend > 0 {
            return Err(Error::InvalidParameter(format!(
                "gap extend must not be positive, got {}",
                self.gap_extend
            )));
        }
        check_word_size(self.word_size)
    }

    /// Extension stops once the running score falls this far below its best.
    pub fn x_drop_threshold(&self) -> i64 {
        2 * (self.mismatch_penalty as i64).abs() * self.word_size as i64
    }
}

fn check_word_size(word_size: usize) -> Result<()> {
    if word_size < 4 {
        return Err(Error::WordSizeTooSmall(word_size));
    }
    // Words are packed two bits per base into a u64.
    if word_size > 32 {
        return Err(Error::WordSizeTooLarge(word_size));
    }
    Ok(())
}

#[inline]
fn column_score(a: Code, b: Code, params: &ScoringParams) -> i64 {
    if a.base_mask() & b.base_mask() != 0 {
        params.match_reward as i64
    } else {
        params.mismatch_penalty as i64
    }
}

#[inline]
fn base_bits(c: Code) -> Option<u64> {
    match c {
        Code::A => Some(0),
        Code::C => Some(1),
        Code::G => Some(2),
        Code::T => Some(3),
        _ => None,
    }
}

/// Every ACGT-only window of width `w`, as (offset, packed word).
fn packed_words(codes: &[Code], w: usize) -> Vec<(usize, u64)> {
    let mask = if w == 32 { u64::MAX } else { (1u64 << (2 * w)) - 1 };
    let mut out = Vec::new();
    let mut acc = 0u64;
    let mut valid = 0usize;
    for (i, &c) in codes.iter().enumerate() {
        match base_bits(c) {
            Some(bits) => {
                acc = ((acc << 2) | bits) & mask;
                valid += 1;
                if valid >= w {
                    out.push((i + 1 - w, acc));
                }
            }
            None => valid = 0,
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Posting {
    record: u32,
    offset: u32,
}

/// Exact-word index over a dataset: packed ACGT word to its occurrences.
#[derive(Debug, Clone)]
pub struct KmerIndex {
    word_size: usize,
    postings: HashMap<u64, Vec<Posting>>,
    total: usize,
}

impl KmerIndex {
    #[inline]
    pub fn word_size(&self) -> usize {
        self.word_size
    }

    /// Number of (record, offset) entries across all words.
    #[inline]
    pub fn total_postings(&self) -> usize {
        self.total
    }
}

/// Index every ACGT-only window of every record. Windows containing an
/// ambiguity code are skipped; such regions can still align, they just never
/// seed.
pub fn build_index(db: &Dataset, word_size: usize) -> Result<KmerIndex> {
    check_word_size(word_size)?;
    if db.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let shortest = db.iter().map(|r| r.len()).min().expect("dataset is nonempty");
    if word_size > shortest {
        log::warn!(
            "word size {word_size} exceeds the shortest record length {shortest}; \
             short records can never seed a search"
        );
    }
    let mut postings: HashMap<u64, Vec<Posting>> = HashMap::new();
    let mut total = 0usize;
    for (rec_idx, rec) in db.iter().enumerate() {
        for (offset, word) in packed_words(rec.residues(), word_size) {
            postings.entry(word).or_default().push(Posting {
                record: rec_idx as u32,
                offset: offset as u32,
            });
            total += 1;
        }
    }
    Ok(KmerIndex {
        word_size,
        postings,
        total,
    })
}

/// One shared word occurrence anchoring an extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedHit {
    pub query_offset: usize,
    pub subject_offset: usize,
}

/// Width of the diagonal band explored by the gapped extension pass.
const BAND_RADIUS: usize = 16;

/// Score the candidate anchored at `seed`: the better of an ungapped x-drop
/// extension in both directions and a banded gapped local alignment around
/// the seed diagonal. Always at least `word_size * match_reward`.
pub fn greedy_extend(
    query: &[Code],
    subject: &[Code],
    seed: SeedHit,
    params: &ScoringParams,
) -> i64 {
    let w = params.word_size;
    debug_assert!(seed.query_offset + w <= query.len());
    debug_assert!(seed.subject_offset + w <= subject.len());
    let x_drop = params.x_drop_threshold();
    let seed_score = w as i64 * params.match_reward as i64;

    let mut best_right = 0i64;
    let mut cur = 0i64;
    let (mut qi, mut si) = (seed.query_offset + w, seed.subject_offset + w);
    while qi < query.len() && si < subject.len() {
        cur += column_score(query[qi], subject[si], params);
        best_right = best_right.max(cur);
        if best_right - cur > x_drop {
            break;
        }
        qi += 1;
        si += 1;
    }

    let mut best_left = 0i64;
    cur = 0;
    let (mut qi, mut si) = (seed.query_offset, seed.subject_offset);
    while qi > 0 && si > 0 {
        qi -= 1;
        si -= 1;
        cur += column_score(query[qi], subject[si], params);
        best_left = best_left.max(cur);
        if best_left - cur > x_drop {
            break;
        }
    }

    let ungapped = seed_score + best_right + best_left;
    ungapped.max(banded_local(query, subject, seed, params))
}

/// Smith-Waterman with affine gaps, restricted to diagonals within
/// `BAND_RADIUS` of the seed diagonal.
fn banded_local(query: &[Code], subject: &[Code], seed: SeedHit, params: &ScoringParams) -> i64 {
    let n = query.len();
    let m = subject.len() as i64;
    let open = params.gap_open as i64;
    let ext = params.gap_extend as i64;
    let d0 = seed.subject_offset as i64 - seed.query_offset as i64;
    let band = BAND_RADIUS as i64;
    let width = 2 * BAND_RADIUS + 3; // band plus a sentinel column on each side

    // Banded coordinates: slot k+1 holds diagonal j - i - d0 = k - BAND_RADIUS.
    // Out-of-range slots keep h=0 (starting fresh is always free in a local
    // alignment) and gap layers at NEG_INF (no gap run crosses the band edge).
    let mut h_prev = vec![0i64; width];
    let mut e_prev = vec![NEG_INF; width]; // ends consuming a query base against a gap
    let mut f_prev = vec![NEG_INF; width]; // ends consuming a subject base against a gap
    let mut h_cur = vec![0i64; width];
    let mut e_cur = vec![NEG_INF; width];
    let mut f_cur = vec![NEG_INF; width];

    let mut best = 0i64;
    for i in 1..=n as i64 {
        h_cur[0] = 0;
        e_cur[0] = NEG_INF;
        f_cur[0] = NEG_INF;
        for k in 0..=(2 * BAND_RADIUS) as i64 {
            let j = i + d0 + k - band;
            let slot = (k + 1) as usize;
            if j < 1 || j > m {
                h_cur[slot] = 0;
                e_cur[slot] = NEG_INF;
                f_cur[slot] = NEG_INF;
                continue;
            }
            let sub = column_score(query[(i - 1) as usize], subject[(j - 1) as usize], params);
            let h = (h_prev[slot].max(e_prev[slot]).max(f_prev[slot]) + sub).max(0);
            let e = (h_prev[slot + 1] + open + ext).max(e_prev[slot + 1] + ext);
            let f = (h_cur[slot - 1] + open + ext).max(f_cur[slot - 1] + ext);
            h_cur[slot] = h;
            e_cur[slot] = e;
            f_cur[slot] = f;
            best = best.max(h);
        }
        std::mem::swap(&mut h_prev, &mut h_cur);
        std::mem::swap(&mut e_prev, &mut e_cur);
        std::mem::swap(&mut f_prev, &mut f_cur);
    }
    best
}

/// Find the best-extending database record sharing at least one word with
/// the query. Ties go to the earliest record in the dataset. `None` when no
/// record shares a word.
///
/// The caller promises the query is not itself a database member; build the
/// index with the same word size as `params`.
pub fn search_top_homolog(
    query: &SequenceRecord,
    db: &Dataset,
    index: &KmerIndex,
    params: &ScoringParams,
) -> Result<Option<(String, i64)>> {
    params.validate()?;
    if db.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let hit = search_filtered(query.residues(), db, index, params, &|_| true);
    Ok(hit.map(|(idx, score)| (db.get(idx).id().to_string(), score)))
}

/// Search restricted to records where `keep(record index)` holds. Returns
/// the record index alongside the score.
pub(crate) fn search_filtered(
    query: &[Code],
    db: &Dataset,
    index: &KmerIndex,
    params: &ScoringParams,
    keep: &(dyn Fn(usize) -> bool + Sync),
) -> Option<(usize, i64)> {
    debug_assert_eq!(index.word_size(), params.word_size);
    // One representative seed per (record, diagonal): the first encountered
    // scanning query offsets in order, so the choice is deterministic.
    let mut candidates: BTreeMap<(u32, i64), SeedHit> = BTreeMap::new();
    for (q_off, word) in packed_words(query, index.word_size()) {
        if let Some(posts) = index.postings.get(&word) {
            for p in posts {
                if !keep(p.record as usize) {
                    continue;
                }
                let diag = p.offset as i64 - q_off as i64;
                candidates.entry((p.record, diag)).or_insert(SeedHit {
                    query_offset: q_off,
                    subject_offset: p.offset as usize,
                });
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }

    let mut grouped: Vec<(u32, Vec<SeedHit>)> = Vec::new();
    for ((record, _), seed) in candidates {
        match grouped.last_mut() {
            Some((last, seeds)) if *last == record => seeds.push(seed),
            _ => grouped.push((record, vec![seed])),
        }
    }

    // Order-preserving parallel map, then a sequential scan keeping the first
    // maximum, so thread count never changes the winner.
    let scored: Vec<(u32, i64)> = grouped
        .par_iter()
        .map(|(record, seeds)| {
            let subject = db.get(*record as usize).residues();
            let best = seeds
                .iter()
                .map(|&seed| greedy_extend(query, subject, seed, params))
                .max()
                .expect("candidate has at least one seed");
            (*record, best)
        })
        .collect();

    let mut best: Option<(usize, i64)> = None;
    for (record, score) in scored {
        if best.map_or(true, |(_, s)| score > s) {
            best = Some((record as usize, score));
        }
    }
    best
}

/// A global alignment: two equal-length gapped sequences plus its score.
///
/// No column holds two gaps, and stripping the gaps from either side
/// reproduces the corresponding input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedPair {
    pub first: AlignedSequence,
    pub second: AlignedSequence,
    pub score: i64,
}

impl AlignedPair {
    #[inline]
    pub fn len(&self) -> usize {
        self.first.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    /// Positionwise level distance across the alignment.
    pub fn distance(&self) -> u64 {
        sequence_distance(&self.first, &self.second).expect("aligned pair has equal lengths")
    }

    /// Positionwise generalization of the alignment.
    pub fn obfuscate(&self) -> AlignedSequence {
        obfuscate_aligned(&self.first, &self.second).expect("aligned pair has equal lengths")
    }

    /// Check the structural invariants against the ungapped inputs.
    pub fn check_against(&self, x: &[Code], y: &[Code]) -> Result<()> {
        if self.first.len() != self.second.len() {
            return Err(Error::LengthMismatch {
                left: self.first.len(),
                right: self.second.len(),
            });
        }
        for (a, b) in self.first.iter().zip(self.second.iter()) {
            if a.is_gap() && b.is_gap() {
                return Err(Error::Internal("alignment column with two gaps".into()));
            }
        }
        if self.first.without_gaps() != x || self.second.without_gaps() != y {
            return Err(Error::Internal(
                "stripping gaps does not reproduce the aligned inputs".into(),
            ));
        }
        Ok(())
    }
}

/// Optimal global alignment of two records.
pub fn global_align(
    x: &SequenceRecord,
    y: &SequenceRecord,
    params: &ScoringParams,
) -> Result<AlignedPair> {
    params.validate()?;
    Ok(align_codes(x.residues(), y.residues(), params))
}

/// Optimal global alignment of two code sequences; gaps in the inputs are
/// stripped first. Lets an already-obfuscated sequence align against a raw
/// one.
pub fn align_code_sequences(
    x: &AlignedSequence,
    y: &AlignedSequence,
    params: &ScoringParams,
) -> Result<AlignedPair> {
    params.validate()?;
    let xs = x.without_gaps();
    let ys = y.without_gaps();
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyAligned);
    }
    Ok(align_codes(&xs, &ys, params))
}

const NEG_INF: i64 = i64::MIN / 4;

const LAYER_M: u8 = 0; // column consumes one code from each side
const LAYER_X: u8 = 1; // column consumes a first-side code against a gap
const LAYER_Y: u8 = 2; // column consumes a second-side code against a gap

#[inline]
fn pick3(m: i64, x: i64, y: i64) -> (i64, u8) {
    // Ties prefer the earlier layer, keeping tracebacks deterministic.
    let mut best = m;
    let mut arg = LAYER_M;
    if x > best {
        best = x;
        arg = LAYER_X;
    }
    if y > best {
        best = y;
        arg = LAYER_Y;
    }
    (best, arg)
}

/// Three-layer affine-gap global DP over gap-free code slices.
fn align_codes(x: &[Code], y: &[Code], params: &ScoringParams) -> AlignedPair {
    debug_assert!(!x.is_empty() && !y.is_empty());
    let n = x.len();
    let m = y.len();
    let open = params.gap_open as i64;
    let ext = params.gap_extend as i64;
    let free = params.end_gaps_free;
    let width = m + 1;

    // One byte per cell: two bits of predecessor layer for each of M, X, Y.
    let mut trace = vec![0u8; (n + 1) * width];

    let mut m_prev = vec![NEG_INF; width];
    let mut x_prev = vec![NEG_INF; width];
    let mut y_prev = vec![NEG_INF; width];
    let mut m_cur = vec![NEG_INF; width];
    let mut x_cur = vec![NEG_INF; width];
    let mut y_cur = vec![NEG_INF; width];

    m_prev[0] = 0;
    for j in 1..=m {
        y_prev[j] = if free { 0 } else { open + ext * j as i64 };
    }

    // Best alignment end: with free end gaps any cell on the last row or
    // column may terminate (the rest is a free trailing run); otherwise only
    // the corner. Strict improvement keeps the first candidate visited.
    struct EndTracker {
        score: i64,
        end: (usize, usize, u8),
    }
    impl EndTracker {
        fn consider(&mut self, score: i64, i: usize, j: usize, layer: u8) {
            if score > self.score {
                self.score = score;
                self.end = (i, j, layer);
            }
        }
    }
    let mut best = EndTracker {
        score: NEG_INF,
        end: (0, 0, LAYER_M),
    };

    if free {
        best.consider(y_prev[m], 0, m, LAYER_Y);
    }

    for i in 1..=n {
        m_cur[0] = NEG_INF;
        x_cur[0] = if free { 0 } else { open + ext * i as i64 };
        y_cur[0] = NEG_INF;
        for j in 1..=m {
            let sub = column_score(x[i - 1], y[j - 1], params);
            let (m_best, m_arg) = pick3(m_prev[j - 1], x_prev[j - 1], y_prev[j - 1]);
            let (x_val, x_arg) = pick3(
                m_prev[j] + open + ext,
                x_prev[j] + ext,
                y_prev[j] + open + ext,
            );
            let (y_val, y_arg) = pick3(
                m_cur[j - 1] + open + ext,
                x_cur[j - 1] + open + ext,
                y_cur[j - 1] + ext,
            );
            m_cur[j] = m_best + sub;
            x_cur[j] = x_val;
            y_cur[j] = y_val;
            trace[i * width + j] = m_arg | (x_arg << 2) | (y_arg << 4);
        }

        if free || i == n {
            best.consider(m_cur[m], i, m, LAYER_M);
            best.consider(x_cur[m], i, m, LAYER_X);
            best.consider(y_cur[m], i, m, LAYER_Y);
        }
        if i == n && free {
            for j in 0..m {
                best.consider(m_cur[j], i, j, LAYER_M);
                best.consider(x_cur[j], i, j, LAYER_X);
                best.consider(y_cur[j], i, j, LAYER_Y);
            }
        }

        std::mem::swap(&mut m_prev, &mut m_cur);
        std::mem::swap(&mut x_prev, &mut x_cur);
        std::mem::swap(&mut y_prev, &mut y_cur);
    }

    // Rebuild the columns back to front: trailing free run, then the traced
    // core, then whatever leading run remains at the boundary.
    let best_score = best.score;
    let (end_i, end_j, end_layer) = best.end;
    let mut rev: Vec<(Code, Code)> = Vec::with_capacity(n + m);
    for k in (end_i..n).rev() {
        rev.push((x[k], Code::Gap));
    }
    for k in (end_j..m).rev() {
        rev.push((Code::Gap, y[k]));
    }

    let (mut ci, mut cj, mut layer) = (end_i, end_j, end_layer);
    while ci > 0 || cj > 0 {
        if ci == 0 {
            for k in (0..cj).rev() {
                rev.push((Code::Gap, y[k]));
            }
            break;
        }
        if cj == 0 {
            for k in (0..ci).rev() {
                rev.push((x[k], Code::Gap));
            }
            break;
        }
        let t = trace[ci * width + cj];
        match layer {
            LAYER_M => {
                rev.push((x[ci - 1], y[cj - 1]));
                layer = t & 0b11;
                ci -= 1;
                cj -= 1;
            }
            LAYER_X => {
                rev.push((x[ci - 1], Code::Gap));
                layer = (t >> 2) & 0b11;
                ci -= 1;
            }
            _ => {
                rev.push((Code::Gap, y[cj - 1]));
                layer = (t >> 4) & 0b11;
                cj -= 1;
            }
        }
    }
    rev.reverse();

    let first = AlignedSequence::new(rev.iter().map(|&(a, _)| a).collect())
        .expect("alignment has at least one column");
    let second = AlignedSequence::new(rev.iter().map(|&(_, b)| b).collect())
        .expect("alignment has at least one column");
    AlignedPair {
        first,
        second,
        score: best_score,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqio::parse_fasta;

    fn rec(id: &str, seq: &str) -> SequenceRecord {
        SequenceRecord::from_text(id, "", seq).unwrap()
    }

    fn codes(s: &str) -> Vec<Code> {
        s.chars().map(|c| Code::from_symbol(c).unwrap()).collect()
    }

    #[test]
    fn default_params_are_valid() {
        let p = ScoringParams::default();
        p.validate().unwrap();
        assert_eq!(p.match_reward, 1);
        assert_eq!(p.mismatch_penalty, -2);
        assert_eq!(p.gap_open, -4);
        assert_eq!(p.gap_extend, -1);
        assert_eq!(p.word_size, 12);
        assert!(p.end_gaps_free);
        assert_eq!(p.x_drop_threshold(), 48);
    }

    #[test]
    fn params_validation_rejects_bad_signs() {
        let base = ScoringParams::default();
        assert!(ScoringParams { match_reward: 0, ..base }.validate().is_err());
        assert!(ScoringParams { mismatch_penalty: 1, ..base }.validate().is_err());
        assert!(ScoringParams { gap_open: 0, ..base }.validate().is_err());
        assert!(ScoringParams { gap_extend: 1, ..base }.validate().is_err());
        assert!(matches!(
            ScoringParams { word_size: 3, ..base }.validate(),
            Err(Error::WordSizeTooSmall(3))
        ));
        assert!(matches!(
            ScoringParams { word_size: 33, ..base }.validate(),
            Err(Error::WordSizeTooLarge(33))
        ));
        assert!(ScoringParams { gap_extend: 0, ..base }.validate().is_ok());
    }

    #[test]
    fn index_counts_windows() {
        let db = parse_fasta(">a\nACGTACGT\n").unwrap();
        let idx = build_index(&db, 5).unwrap();
        assert_eq!(idx.total_postings(), 4);
        assert_eq!(idx.word_size(), 5);
    }

    #[test]
    fn index_skips_windows_containing_ambiguity_codes() {
        let db = parse_fasta(">a\nACGTNACGTA\n").unwrap();
        let idx = build_index(&db, 4).unwrap();
        // Valid window starts: 0, 5, 6. Starts 1..=4 cover the N.
        assert_eq!(idx.total_postings(), 3);
    }

    #[test]
    fn index_rejects_bad_inputs() {
        let db = parse_fasta(">a\nACGTACGT\n").unwrap();
        assert!(matches!(build_index(&db, 3), Err(Error::WordSizeTooSmall(3))));
        assert!(matches!(build_index(&db, 40), Err(Error::WordSizeTooLarge(40))));
        let empty = Dataset::new(Vec::new()).unwrap();
        assert!(matches!(build_index(&empty, 8), Err(Error::EmptyDataset)));
    }

    #[test]
    fn packed_words_roll_over_resets() {
        let ws = packed_words(&codes("ACGT"), 4);
        assert_eq!(ws.len(), 1);
        assert_eq!(ws[0].0, 0);
        // A=00 C=01 G=10 T=11 packed big-endian-ish by shift order.
        assert_eq!(ws[0].1, 0b00_01_10_11);
        assert!(packed_words(&codes("ACGN"), 4).is_empty());
        assert_eq!(packed_words(&codes("ACGTACGT"), 8).len(), 1);
    }

    #[test]
    fn extend_identical_sequences_reaches_full_length() {
        let p = ScoringParams::default();
        let q = codes(&"ACGT".repeat(25));
        let seed = SeedHit { query_offset: 40, subject_offset: 40 };
        assert_eq!(greedy_extend(&q, &q, seed, &p), 100);
    }

    #[test]
    fn extend_is_bounded_below_by_the_seed_score() {
        let p = ScoringParams { word_size: 4, ..ScoringParams::default() };
        let q = codes("TTTTACGTTTTT");
        let s = codes("GGGGACGTGGGG");
        let seed = SeedHit { query_offset: 4, subject_offset: 4 };
        assert!(greedy_extend(&q, &s, seed, &p) >= 4);
    }

    #[test]
    fn extend_tolerates_a_terminal_mismatch() {
        let p = ScoringParams::default();
        let mut a = codes(&"ACGT".repeat(25));
        let mut b = a.clone();
        b[99] = Code::C; // a[99] is T
        let seed = SeedHit { query_offset: 0, subject_offset: 0 };
        let score = greedy_extend(&a, &b, seed, &p);
        assert!(score >= 99 + p.mismatch_penalty as i64, "score {score}");
        // The best extension simply stops before the mismatch.
        assert_eq!(score, 99);
        a[0] = Code::G; // also perturb the far end relative to b's copy
        let seed = SeedHit { query_offset: 40, subject_offset: 40 };
        assert_eq!(greedy_extend(&a, &b, seed, &p), 98);
    }

    #[test]
    fn banded_pass_recovers_an_indel() {
        let p = ScoringParams::default();
        // b equals a with one base deleted at position 30; the ungapped
        // extension from an early seed stalls there, the banded pass bridges.
        let a = codes(&"ACGTACGTACGTACGTACGTAGGCATCCGATTGACCAGTTACCAGGTTAC".repeat(2));
        let mut bv = a.clone();
        bv.remove(30);
        let seed = SeedHit { query_offset: 0, subject_offset: 0 };
        let score = greedy_extend(&a, &bv, seed, &p);
        let gapped = 99 - 5; // 99 matched columns, one gap run of length 1
        assert_eq!(score, gapped as i64);
    }

    #[test]
    fn search_prefers_the_exact_copy() {
        let db = parse_fasta(concat!(
            ">decoy\nTTACGGATCCGGAAGCTTGGATCCTTAA\n",
            ">copy\nACGTACGTACGTACGTACGTACGT\n",
        ))
        .unwrap();
        let params = ScoringParams { word_size: 8, ..ScoringParams::default() };
        let idx = build_index(&db, 8).unwrap();
        let q = rec("q", "ACGTACGTACGTACGTACGTACGT");
        let (id, score) = search_top_homolog(&q, &db, &idx, &params).unwrap().unwrap();
        assert_eq!(id, "copy");
        assert_eq!(score, 24);
    }

    #[test]
    fn search_without_shared_words_returns_none() {
        let db = parse_fasta(">a\nAAAAAAAAAAAA\n").unwrap();
        let params = ScoringParams { word_size: 6, ..ScoringParams::default() };
        let idx = build_index(&db, 6).unwrap();
        let q = rec("q", "CCCCCCCCCCCC");
        assert_eq!(search_top_homolog(&q, &db, &idx, &params).unwrap(), None);
    }

    #[test]
    fn search_tie_breaks_by_dataset_position() {
        let db = parse_fasta(concat!(
            ">second_is_not_first\nGGGGGGGGGGGGGGGG\n",
            ">first_copy\nACGTACGTACGTACGT\n",
            ">second_copy\nACGTACGTACGTACGT\n",
        ))
        .unwrap();
        let params = ScoringParams { word_size: 8, ..ScoringParams::default() };
        let idx = build_index(&db, 8).unwrap();
        let q = rec("q", "ACGTACGTACGTACGT");
        let (id, _) = search_top_homolog(&q, &db, &idx, &params).unwrap().unwrap();
        assert_eq!(id, "first_copy");
    }

    #[test]
    fn search_rejects_empty_database() {
        let db = parse_fasta(">a\nACGTACGTACGT\n").unwrap();
        let idx = build_index(&db, 8).unwrap();
        let empty = Dataset::new(Vec::new()).unwrap();
        let q = rec("q", "ACGTACGTACGT");
        let params = ScoringParams { word_size: 8, ..ScoringParams::default() };
        assert!(search_top_homolog(&q, &empty, &idx, &params).is_err());
    }

    #[test]
    fn align_identity() {
        let p = ScoringParams::default();
        let pair = global_align(&rec("x", "ACGT"), &rec("y", "ACGT"), &p).unwrap();
        assert_eq!(pair.score, 4);
        assert_eq!(pair.first.to_string(), "ACGT");
        assert_eq!(pair.second.to_string(), "ACGT");
        assert_eq!(pair.distance(), 0);
        pair.check_against(&codes("ACGT"), &codes("ACGT")).unwrap();
    }

    #[test]
    fn align_all_mismatch_without_free_ends() {
        let p = ScoringParams { end_gaps_free: false, ..ScoringParams::default() };
        let pair = global_align(&rec("x", "AAAA"), &rec("y", "TTTT"), &p).unwrap();
        assert_eq!(pair.score, -8);
        pair.check_against(&codes("AAAA"), &codes("TTTT")).unwrap();
    }

    #[test]
    fn align_all_mismatch_with_free_ends_shifts_apart() {
        let p = ScoringParams::default();
        let pair = global_align(&rec("x", "AAAA"), &rec("y", "TTTT"), &p).unwrap();
        assert_eq!(pair.score, 0);
        pair.check_against(&codes("AAAA"), &codes("TTTT")).unwrap();
    }

    #[test]
    fn align_single_deletion() {
        let x = rec("x", "ACGT");
        let y = rec("y", "AGT");
        let free = global_align(&x, &y, &ScoringParams::default()).unwrap();
        assert_eq!(free.score, 0); // leading gap run is free: C/A mismatch path
        free.check_against(&codes("ACGT"), &codes("AGT")).unwrap();
        let charged = global_align(
            &x,
            &y,
            &ScoringParams { end_gaps_free: false, ..ScoringParams::default() },
        )
        .unwrap();
        assert_eq!(charged.score, -2); // 3 matches minus one length-1 gap run
        assert_eq!(charged.first.to_string(), "ACGT");
        assert_eq!(charged.second.to_string(), "A-GT");
    }

    #[test]
    fn align_scores_intersecting_codes_as_matches() {
        let p = ScoringParams::default();
        let x: AlignedSequence = "AMGT".parse().unwrap();
        let y: AlignedSequence = "ACGT".parse().unwrap();
        let pair = align_code_sequences(&x, &y, &p).unwrap();
        assert_eq!(pair.score, 4);
        assert_eq!(pair.first.to_string(), "AMGT");
    }

    #[test]
    fn align_code_sequences_strips_input_gaps() {
        let p = ScoringParams::default();
        let x: AlignedSequence = "AC-GT".parse().unwrap();
        let y: AlignedSequence = "ACGT".parse().unwrap();
        let pair = align_code_sequences(&x, &y, &p).unwrap();
        assert_eq!(pair.score, 4);
        assert_eq!(pair.first.to_string(), "ACGT");
        let all_gaps: AlignedSequence = "---".parse().unwrap();
        assert!(align_code_sequences(&all_gaps, &y, &p).is_err());
    }

    #[test]
    fn alignment_never_produces_double_gap_columns() {
        let p = ScoringParams::default();
        let pair = global_align(&rec("x", "ACGTACGTAC"), &rec("y", "TTGCA"), &p).unwrap();
        pair.check_against(&codes("ACGTACGTAC"), &codes("TTGCA")).unwrap();
    }
}
