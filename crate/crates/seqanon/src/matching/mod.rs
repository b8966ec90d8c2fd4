//! Pairing strategies over an explicit pairwise distance matrix: exact
//! minimum-weight perfect matching, a greedy baseline, a brute-force oracle,
//! stochastic hill-climb refinement, and random pairing.
//!
//! All strategies share one objective. A solution pairs every index; with an
//! odd index count one pair absorbs a third member and becomes a triple
//! (p, q, v) with v the absorbed leftover. Its cost at the matrix level is
//! d(p, q) + min(d(v, p), d(v, q)): the pair cost plus the cost of merging
//! the leftover into its nearer member. Realized clusters later recompute
//! the exact two-stage cost from the sequences themselves.

mod blossom;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::align::{global_align, ScoringParams};
use crate::seqio::Dataset;
use crate::{Error, Result};

/// Largest matrix entry accepted; keeps the matching weights inside i64.
const MAX_ENTRY: u64 = i64::MAX as u64 / 4;

/// Largest n for exhaustive matching; (n−1)!! alignments of pairings.
pub const BRUTE_FORCE_MAX: usize = 12;

/// Odd-n threshold below which every candidate leftover gets its own exact
/// matching run.
const EXHAUSTIVE_LEFTOVER_MAX: usize = 51;

/// Symmetric nonnegative integer distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<u64>,
}

impl DistanceMatrix {
    /// Build from row-major entries; validates shape, symmetry, diagonal
    /// and the entry bound.
    pub fn new(n: usize, entries: Vec<u64>) -> Result<DistanceMatrix> {
        if entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for n = {}, got {}",
                n * n,
                n,
                entries.len()
            )));
        }
        let m = DistanceMatrix { n, entries };
        for i in 0..n {
            if m.get(i, i) != 0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at ({i},{i})")));
            }
            for j in i + 1..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i},{j})")));
                }
                if m.get(i, j) > MAX_ENTRY {
                    return Err(Error::InvalidMatrix(format!("entry ({i},{j}) too large")));
                }
            }
        }
        Ok(m)
    }

    /// Build from the strict upper triangle, row by row; the rest is implied.
    pub fn from_upper(n: usize, upper: &[u64]) -> Result<DistanceMatrix> {
        let expected = n * n.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::InvalidMatrix(format!(
                "expected {expected} upper-triangle entries for n = {n}, got {}",
                upper.len()
            )));
        }
        let mut entries = vec![0u64; n * n];
        let mut next = 0;
        for i in 0..n {
            for j in i + 1..n {
                entries[i * n + j] = upper[next];
                entries[j * n + i] = upper[next];
                next += 1;
            }
        }
        DistanceMatrix::new(n, entries)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    /// Tab-separated dump with a label header row and column. Labels must
    /// match the matrix dimension.
    pub fn to_tsv(&self, labels: &[String]) -> Result<String> {
        if labels.len() != self.n {
            return Err(Error::InvalidMatrix(format!(
                "{} labels for a {}-point matrix",
                labels.len(),
                self.n
            )));
        }
        let mut out = String::new();
        for label in labels {
            out.push('\t');
            out.push_str(label);
        }
        out.push('\n');
        for i in 0..self.n {
            out.push_str(&labels[i]);
            for j in 0..self.n {
                out.push('\t');
                out.push_str(&self.get(i, j).to_string());
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// A pairing of all indices of a matrix. `triple` holds the odd leftover as
/// (p, q, v) where (p, q) is the pair that absorbed vertex v.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingSolution {
    pub pairs: Vec<(usize, usize)>,
    pub triple: Option<(usize, usize, usize)>,
    pub total_loss: u64,
}

impl PairingSolution {
    /// Check that the indices form a partition of 0..n−1 with the triple
    /// present exactly when n is odd.
    pub fn validate_partition(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        let mut mark = |i: usize| -> Result<()> {
            if i >= n {
                return Err(Error::InvalidPairing(format!("index {i} out of range for n = {n}")));
            }
            if seen[i] {
                return Err(Error::InvalidPairing(format!("index {i} appears twice")));
            }
            seen[i] = true;
            Ok(())
        };
        for &(a, b) in &self.pairs {
            mark(a)?;
            mark(b)?;
        }
        if let Some((p, q, v)) = self.triple {
            mark(p)?;
            mark(q)?;
            mark(v)?;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPairing(format!("index {missing} is unassigned")));
        }
        if self.triple.is_some() != (n % 2 == 1) {
            return Err(Error::InvalidPairing(format!(
                "triple {} for n = {n}",
                if self.triple.is_some() { "present" } else { "absent" }
            )));
        }
        Ok(())
    }

    /// Full check against a matrix: partition validity plus the total_loss
    /// objective.
    pub fn validate(&self, m: &DistanceMatrix) -> Result<()> {
        self.validate_partition(m.n())?;
        let recomputed = objective(m, &self.pairs, self.triple);
        if recomputed != self.total_loss {
            return Err(Error::InvalidPairing(format!(
                "total_loss {} does not match recomputed {recomputed}",
                self.total_loss
            )));
        }
        Ok(())
    }

    fn canonical(mut self) -> PairingSolution {
        for p in &mut self.pairs {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        self.pairs.sort_unstable();
        if let Some((p, q, v)) = self.triple {
            self.triple = Some((p.min(q), p.max(q), v));
        }
        self
    }
}

/// Cost of merging leftover v into pair (p, q).
#[inline]
fn merge_cost(m: &DistanceMatrix, v: usize, p: usize, q: usize) -> u64 {
    m.get(v, p).min(m.get(v, q))
}

/// Total loss of a full solution under the shared objective.
fn objective(m: &DistanceMatrix, pairs: &[(usize, usize)], triple: Option<(usize, usize, usize)>) -> u64 {
    let mut total: u64 = pairs.iter().map(|&(a, b)| m.get(a, b)).sum();
    if let Some((p, q, v)) = triple {
        total += m.get(p, q) + merge_cost(m, v, p, q);
    }
    total
}

/// Choose the pair that absorbs leftover v most cheaply (first such pair in
/// the given order on ties) and assemble the solution.
fn absorb_leftover(m: &DistanceMatrix, mut pairs: Vec<(usize, usize)>, v: usize) -> PairingSolution {
    debug_assert!(!pairs.is_empty());
    let mut best = 0;
    let mut best_cost = merge_cost(m, v, pairs[0].0, pairs[0].1);
    for (ix, &(p, q)) in pairs.iter().enumerate().skip(1) {
        let c = merge_cost(m, v, p, q);
        if c < best_cost {
            best = ix;
            best_cost = c;
        }
    }
    let (p, q) = pairs.remove(best);
    let triple = Some((p, q, v));
    let total_loss = objective(m, &pairs, triple);
    PairingSolution { pairs, triple, total_loss }.canonical()
}

fn pairing_from_pairs(m: &DistanceMatrix, pairs: Vec<(usize, usize)>) -> PairingSolution {
    let total_loss = objective(m, &pairs, None);
    PairingSolution { pairs, triple: None, total_loss }.canonical()
}

fn require_pairable(m: &DistanceMatrix) -> Result<()> {
    if m.n() < 2 {
        return Err(Error::DatasetTooSmall { n: m.n(), min: 2 });
    }
    Ok(())
}

/// Distance matrix of a dataset: entry (i, j) is the level distance of the
/// optimal global alignment of records i and j. The N(N−1)/2 alignments run
/// in parallel.
pub fn pairwise_distance_matrix(db: &Dataset, params: &ScoringParams) -> Result<DistanceMatrix> {
    if db.len() < 2 {
        return Err(Error::DatasetTooSmall { n: db.len(), min: 2 });
    }
    params.validate()?;
    let n = db.len();
    let index_pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let upper = index_pairs
        .into_par_iter()
        .map(|(i, j)| {
            let records = db.records();
            Ok(global_align(&records[i], &records[j], params)?.distance())
        })
        .collect::<Result<Vec<u64>>>()?;
    DistanceMatrix::from_upper(n, &upper)
}

/// Exact minimum-weight perfect matching on the complete graph with `skip`
/// removed. Returns pairs in original index space.
fn blossom_pairs(m: &DistanceMatrix, skip: Option<usize>) -> Vec<(usize, usize)> {
    let vertices: Vec<usize> = (0..m.n()).filter(|&v| Some(v) != skip).collect();
    let k = vertices.len();
    debug_assert!(k >= 2 && k % 2 == 0);
    let max_d = {
        let mut max_d = 0;
        for a in 0..k {
            for b in a + 1..k {
                max_d = max_d.max(m.get(vertices[a], vertices[b]));
            }
        }
        max_d
    };
    // Minimize distances by maximizing the reversed weights; maximum
    // cardinality forces the matching to be perfect.
    let mut edges = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            let w = (1 + max_d - m.get(vertices[a], vertices[b])) as i64;
            edges.push((a, b, w));
        }
    }
    let mate = blossom::max_weight_matching(&edges, true);
    let mut pairs = Vec::with_capacity(k / 2);
    for a in 0..k {
        let b = mate[a];
        assert!(b != blossom::NO_MATE, "complete graph must match perfectly");
        if a < b {
            pairs.push((vertices[a], vertices[b]));
        }
    }
    pairs
}

/// Minimum-weight pairing via the blossom algorithm.
///
/// Even n is solved exactly. Odd n removes one leftover vertex first: up to
/// n = 51 every candidate leftover gets its own matching run and the
/// cheapest full solution wins (smallest leftover index on ties); beyond
/// that the vertex with the largest nearest-neighbor distance sits out.
pub fn min_weight_perfect_matching(m: &DistanceMatrix) -> Result<PairingSolution> {
    require_pairable(m)?;
    let n = m.n();
    if n % 2 == 0 {
        return Ok(pairing_from_pairs(m, blossom_pairs(m, None)));
    }
    if n <= EXHAUSTIVE_LEFTOVER_MAX {
        let mut best: Option<PairingSolution> = None;
        for v in 0..n {
            let candidate = absorb_leftover(m, blossom_pairs(m, Some(v)), v);
            if best.as_ref().is_none_or(|b| candidate.total_loss < b.total_loss) {
                best = Some(candidate);
            }
        }
        Ok(best.expect("at least one candidate leftover"))
    } else {
        let mut leftover = 0;
        let mut leftover_d = 0;
        for v in 0..n {
            let nearest = (0..n).filter(|&u| u != v).map(|u| m.get(v, u)).min().unwrap();
            if nearest > leftover_d {
                leftover = v;
                leftover_d = nearest;
            }
        }
        Ok(absorb_leftover(m, blossom_pairs(m, Some(leftover)), leftover))
    }
}

/// Exhaustive enumeration of all pairings (and all leftover choices when n
/// is odd) under the shared objective. Supports n up to [`BRUTE_FORCE_MAX`].
pub fn brute_force_matching(m: &DistanceMatrix) -> Result<PairingSolution> {
    require_pairable(m)?;
    let n = m.n();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::MatrixTooLarge { n, max: BRUTE_FORCE_MAX });
    }

    fn enumerate(
        m: &DistanceMatrix,
        unused: &mut Vec<usize>,
        pairs: &mut Vec<(usize, usize)>,
        best: &mut Option<PairingSolution>,
        leftover: Option<usize>,
    ) {
        if unused.is_empty() {
            let candidate = match leftover {
                None => pairing_from_pairs(m, pairs.clone()),
                Some(v) => absorb_leftover(m, pairs.clone(), v),
            };
            if best.as_ref().is_none_or(|b| candidate.total_loss < b.total_loss) {
                *best = Some(candidate);
            }
            return;
        }
        let a = unused[0];
        unused.remove(0);
        for ix in 0..unused.len() {
            let b = unused.remove(ix);
            pairs.push((a, b));
            enumerate(m, unused, pairs, best, leftover);
            pairs.pop();
            unused.insert(ix, b);
        }
        unused.insert(0, a);
    }

    let mut best = None;
    if n % 2 == 0 {
        let mut unused: Vec<usize> = (0..n).collect();
        enumerate(m, &mut unused, &mut Vec::new(), &mut best, None);
    } else {
        for v in 0..n {
            let mut unused: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            enumerate(m, &mut unused, &mut Vec::new(), &mut best, Some(v));
        }
    }
    Ok(best.expect("at least one pairing exists"))
}

/// Repeatedly pair the globally closest unpaired indices; ties break toward
/// the smaller index pair. The odd leftover is absorbed afterwards.
pub fn greedy_matching(m: &DistanceMatrix) -> Result<PairingSolution> {
    require_pairable(m)?;
    let n = m.n();
    let mut unused: Vec<usize> = (0..n).collect();
    let mut pairs = Vec::with_capacity(n / 2);
    while unused.len() >= 2 {
        let mut best = (unused[0], unused[1]);
        let mut best_d = m.get(best.0, best.1);
        for a in 0..unused.len() {
            for b in a + 1..unused.len() {
                let d = m.get(unused[a], unused[b]);
                if d < best_d {
                    best = (unused[a], unused[b]);
                    best_d = d;
                }
            }
        }
        unused.retain(|&u| u != best.0 && u != best.1);
        pairs.push(best);
    }
    Ok(match unused.first() {
        None => pairing_from_pairs(m, pairs),
        Some(&v) => absorb_leftover(m, pairs, v),
    })
}

/// Stochastic 2-exchange local search over the pairs of a solution.
///
/// Each step picks two distinct pairs (a, b), (c, d) and one of the two
/// rewirings (a, c)(b, d) or (a, d)(b, c), accepting strict improvements
/// only. Stops after `iterations` consecutive proposals without
/// improvement. The triple, if any, is left as is, so its members never
/// re-enter the search. Deterministic for a fixed seed.
pub fn hill_climb_refine(
    s: &PairingSolution,
    m: &DistanceMatrix,
    iterations: usize,
    seed: u64,
) -> Result<PairingSolution> {
    s.validate(m)?;
    let mut pairs = s.pairs.clone();
    if pairs.len() < 2 || iterations == 0 {
        return Ok(s.clone().canonical());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idle = 0;
    while idle < iterations {
        let i = rng.random_range(0..pairs.len());
        let mut j = rng.random_range(0..pairs.len() - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = pairs[i];
        let (c, d) = pairs[j];
        let current = m.get(a, b) + m.get(c, d);
        let (p1, p2) = if rng.random::<bool>() {
            ((a, c), (b, d))
        } else {
            ((a, d), (b, c))
        };
        if m.get(p1.0, p1.1) + m.get(p2.0, p2.1) < current {
            pairs[i] = p1;
            pairs[j] = p2;
            idle = 0;
        } else {
            idle += 1;
        }
    }
    let total_loss = objective(m, &pairs, s.triple);
    Ok(PairingSolution { pairs, triple: s.triple, total_loss }.canonical())
}

/// Default hill-climb proposal budget for an n-point matrix.
pub fn default_hill_climb_iterations(n: usize) -> usize {
    100 * n
}

/// Pair indices by a seeded shuffle; the odd leftover is absorbed by the
/// usual rule. Deterministic for a fixed seed.
pub fn random_pairing(m: &DistanceMatrix, seed: u64) -> Result<PairingSolution> {
    require_pairable(m)?;
    let n = m.n();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let pairs: Vec<(usize, usize)> =
        order.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Ok(if n % 2 == 1 {
        absorb_leftover(m, pairs, order[n - 1])
    } else {
        pairing_from_pairs(m, pairs)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqio::{parse_fasta, synthesize_dataset};

    /// The n=4 matrix where greedy grabs (0,1) first and pays 11 while the
    /// optimum pays 4.
    fn adversarial() -> DistanceMatrix {
        // upper triangle rows: (0,1),(0,2),(0,3),(1,2),(1,3),(2,3)
        DistanceMatrix::from_upper(4, &[1, 2, 100, 100, 2, 10]).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, max: u64) -> DistanceMatrix {
        let upper: Vec<u64> =
            (0..n * (n - 1) / 2).map(|_| rng.random_range(0..=max)).collect();
        DistanceMatrix::from_upper(n, &upper).unwrap()
    }

    #[test]
    fn matrix_validation() {
        assert!(DistanceMatrix::new(2, vec![0, 3, 3, 0]).is_ok());
        assert!(matches!(
            DistanceMatrix::new(2, vec![0, 3, 3]),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            DistanceMatrix::new(2, vec![1, 3, 3, 0]),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            DistanceMatrix::new(2, vec![0, 3, 4, 0]),
            Err(Error::InvalidMatrix(_))
        ));
    }

    #[test]
    fn matrix_tsv_has_labels_and_rows() {
        let m = DistanceMatrix::from_upper(2, &[7]).unwrap();
        let tsv = m.to_tsv(&["a".into(), "b".into()]).unwrap();
        assert_eq!(tsv, "\ta\tb\na\t0\t7\nb\t7\t0\n");
        assert!(m.to_tsv(&["a".into()]).is_err());
    }

    #[test]
    fn pairwise_matrix_of_identical_records_is_zero() {
        let db = parse_fasta(">a\nACGT\n>b\nACGT\n>c\nACGT\n").unwrap();
        let m = pairwise_distance_matrix(&db, &ScoringParams::default()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), 0);
            }
        }
    }

    #[test]
    fn pairwise_matrix_matches_per_pair_recomputation() {
        let db = synthesize_dataset(11, 2, 3, 40, 0.1, 0.02).unwrap();
        let params = ScoringParams::default();
        let m = pairwise_distance_matrix(&db, &params).unwrap();
        assert_eq!(m.n(), 6);
        let records = db.records();
        for i in 0..db.len() {
            assert_eq!(m.get(i, i), 0);
            for j in 0..db.len() {
                assert_eq!(m.get(i, j), m.get(j, i));
                if i < j {
                    let d = global_align(&records[i], &records[j], &params)
                        .unwrap()
                        .distance();
                    assert_eq!(m.get(i, j), d);
                }
            }
        }
    }

    #[test]
    fn pairwise_matrix_needs_two_records() {
        let db = parse_fasta(">a\nACGT\n").unwrap();
        assert!(matches!(
            pairwise_distance_matrix(&db, &ScoringParams::default()),
            Err(Error::DatasetTooSmall { n: 1, min: 2 })
        ));
    }

    #[test]
    fn two_points_form_the_single_pair() {
        let m = DistanceMatrix::from_upper(2, &[5]).unwrap();
        let s = min_weight_perfect_matching(&m).unwrap();
        assert_eq!(s.pairs, vec![(0, 1)]);
        assert_eq!(s.triple, None);
        assert_eq!(s.total_loss, 5);
        s.validate(&m).unwrap();
    }

    #[test]
    fn adversarial_matrix_optimal_vs_greedy() {
        let m = adversarial();
        let opt = min_weight_perfect_matching(&m).unwrap();
        assert_eq!(opt.pairs, vec![(0, 2), (1, 3)]);
        assert_eq!(opt.total_loss, 4);
        let greedy = greedy_matching(&m).unwrap();
        assert_eq!(greedy.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(greedy.total_loss, 11);
        let brute = brute_force_matching(&m).unwrap();
        assert_eq!(brute.total_loss, 4);
    }

    #[test]
    fn hill_climb_fixes_the_greedy_mistake() {
        let m = adversarial();
        let greedy = greedy_matching(&m).unwrap();
        let refined =
            hill_climb_refine(&greedy, &m, default_hill_climb_iterations(4), 0).unwrap();
        assert_eq!(refined.total_loss, 4);
        assert_eq!(refined.pairs, vec![(0, 2), (1, 3)]);
        refined.validate(&m).unwrap();
    }

    #[test]
    fn hill_climb_never_worsens_and_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in [2usize, 4, 7, 9, 12] {
            let m = random_matrix(&mut rng, n, 50);
            let start = random_pairing(&m, 3).unwrap();
            let a = hill_climb_refine(&start, &m, default_hill_climb_iterations(n), 9).unwrap();
            let b = hill_climb_refine(&start, &m, default_hill_climb_iterations(n), 9).unwrap();
            assert!(a.total_loss <= start.total_loss);
            assert_eq!(a, b);
            a.validate(&m).unwrap();
        }
    }

    #[test]
    fn already_optimal_solution_is_left_at_its_loss() {
        let m = adversarial();
        let opt = min_weight_perfect_matching(&m).unwrap();
        let refined = hill_climb_refine(&opt, &m, 500, 1).unwrap();
        assert_eq!(refined.total_loss, opt.total_loss);
    }

    #[test]
    fn all_equal_matrix_pairs_in_index_order() {
        let m = DistanceMatrix::from_upper(6, &[3; 15]).unwrap();
        let s = greedy_matching(&m).unwrap();
        assert_eq!(s.pairs, vec![(0, 1), (2, 3), (4, 5)]);
        assert_eq!(s.total_loss, 9);
    }

    #[test]
    fn three_points_pick_the_best_pair_and_absorb_the_rest() {
        // d(0,1)=2, d(0,2)=9, d(1,2)=4. Leftover 0 gives 4 + min(2,9) = 6,
        // leftover 2 gives 2 + min(9,4) = 6; the tie breaks toward the
        // smaller leftover index, so 0 sits out and joins pair (1,2).
        let m = DistanceMatrix::from_upper(3, &[2, 9, 4]).unwrap();
        for s in [
            min_weight_perfect_matching(&m).unwrap(),
            brute_force_matching(&m).unwrap(),
        ] {
            assert_eq!(s.pairs, vec![]);
            assert_eq!(s.triple, Some((1, 2, 0)));
            assert_eq!(s.total_loss, 6);
            s.validate(&m).unwrap();
        }
    }

    #[test]
    fn matching_rejects_tiny_and_oversized_inputs() {
        let m1 = DistanceMatrix::new(1, vec![0]).unwrap();
        assert!(matches!(
            min_weight_perfect_matching(&m1),
            Err(Error::DatasetTooSmall { n: 1, min: 2 })
        ));
        assert!(matches!(greedy_matching(&m1), Err(Error::DatasetTooSmall { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = random_matrix(&mut rng, 14, 9);
        assert!(matches!(
            brute_force_matching(&m),
            Err(Error::MatrixTooLarge { n: 14, max: 12 })
        ));
    }

    #[test]
    fn blossom_equals_brute_force_on_even_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 4, 6, 8, 10] {
            for _ in 0..25 {
                let m = random_matrix(&mut rng, n, 30);
                let exact = min_weight_perfect_matching(&m).unwrap();
                let brute = brute_force_matching(&m).unwrap();
                assert_eq!(exact.total_loss, brute.total_loss, "n = {n}");
                exact.validate(&m).unwrap();
                brute.validate(&m).unwrap();
            }
        }
    }

    #[test]
    fn odd_sizes_stay_close_to_brute_force_and_valid() {
        // The per-leftover loop is exact for the pairing it commits to, but
        // the absorb step is greedy, so only ≥ is guaranteed vs. the
        // exhaustive optimum.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in [3usize, 5, 7, 9, 11] {
            for _ in 0..25 {
                let m = random_matrix(&mut rng, n, 30);
                let exact = min_weight_perfect_matching(&m).unwrap();
                let brute = brute_force_matching(&m).unwrap();
                assert!(exact.total_loss >= brute.total_loss, "n = {n}");
                exact.validate(&m).unwrap();
                brute.validate(&m).unwrap();
            }
        }
    }

    #[test]
    fn ordering_optimal_refined_greedy() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [4usize, 6, 9, 13] {
            for _ in 0..10 {
                let m = random_matrix(&mut rng, n, 40);
                let opt = min_weight_perfect_matching(&m).unwrap();
                let greedy = greedy_matching(&m).unwrap();
                let refined =
                    hill_climb_refine(&greedy, &m, default_hill_climb_iterations(n), 0).unwrap();
                assert!(opt.total_loss <= refined.total_loss);
                assert!(refined.total_loss <= greedy.total_loss);
            }
        }
    }

    #[test]
    fn random_pairing_is_valid_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in [2usize, 5, 8, 11] {
            let m = random_matrix(&mut rng, n, 20);
            let a = random_pairing(&m, 4).unwrap();
            let b = random_pairing(&m, 4).unwrap();
            assert_eq!(a, b);
            a.validate(&m).unwrap();
        }
    }

    #[test]
    fn validate_rejects_broken_solutions() {
        let m = adversarial();
        let s = PairingSolution { pairs: vec![(0, 1)], triple: None, total_loss: 1 };
        assert!(matches!(s.validate(&m), Err(Error::InvalidPairing(_))));
        let s = PairingSolution {
            pairs: vec![(0, 1), (1, 3)],
            triple: None,
            total_loss: 3,
        };
        assert!(matches!(s.validate(&m), Err(Error::InvalidPairing(_))));
        let s = PairingSolution {
            pairs: vec![(0, 1), (2, 3)],
            triple: None,
            total_loss: 12,
        };
        assert!(matches!(s.validate(&m), Err(Error::InvalidPairing(_))));
    }

    #[test]
    fn large_odd_size_uses_the_distant_leftover_rule() {
        // 53 points: 26 tight twin pairs at distance 1, plus one point far
        // from everything. The far point must sit out and join its nearest
        // pair.
        let n = 53;
        let mut entries = vec![0u64; n * n];
        let mut set = |i: usize, j: usize, d: u64| {
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        };
        for i in 0..n {
            for j in i + 1..n {
                set(i, j, 500);
            }
        }
        for k in 0..26 {
            set(2 * k, 2 * k + 1, 1);
        }
        for u in 0..n - 1 {
            set(u, n - 1, 600 + u as u64);
        }
        let m = DistanceMatrix::new(n, entries).unwrap();
        let s = min_weight_perfect_matching(&m).unwrap();
        assert_eq!(s.triple, Some((0, 1, n - 1)));
        assert_eq!(s.total_loss, 26 + 600);
        s.validate(&m).unwrap();
    }
}
