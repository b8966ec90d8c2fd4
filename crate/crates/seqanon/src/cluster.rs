//! Iterative cluster-and-obfuscate over a sequence dataset.
//!
//! The core procedure repeatedly draws a random query from the remaining
//! pool, finds its top homolog by indexed search, and collapses the two
//! into one obfuscated sequence. The last two survivors pair directly;
//! with an odd dataset the last three collapse in two stages: the query
//! and its top homolog first, then the second homolog against that
//! result. Every step is deterministic for a fixed seed.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::align::{
    align_code_sequences, build_index, global_align, search_filtered, KmerIndex, ScoringParams,
};
use crate::lattice::{obfuscate_aligned, sequence_distance, AlignedSequence, Code};
use crate::matching::PairingSolution;
use crate::report::Rational;
use crate::seqio::{Dataset, SequenceRecord};
use crate::{Error, Result};

/// Two or three records collapsed into one obfuscated sequence.
///
/// All members live in one coordinate frame: `aligned_members[i]` and
/// `obfuscated` have equal lengths, `obfuscated` is the positionwise
/// lattice join of the members, and `member_losses[i]` is member i's
/// distance to it. `pair_distance` is the two-member alignment distance;
/// for a triple it is the sum of the two stage distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub member_ids: Vec<String>,
    pub aligned_members: Vec<AlignedSequence>,
    pub obfuscated: AlignedSequence,
    pub member_losses: Vec<u64>,
    pub pair_distance: u64,
}

impl Cluster {
    /// Sum of the member losses.
    pub fn loss_total(&self) -> u64 {
        self.member_losses.iter().sum()
    }

    /// Check the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let k = self.member_ids.len();
        if !(2..=3).contains(&k) {
            return Err(Error::Internal(format!("cluster with {k} members")));
        }
        if self.aligned_members.len() != k || self.member_losses.len() != k {
            return Err(Error::Internal("cluster field lengths disagree".into()));
        }
        for m in &self.aligned_members {
            if m.len() != self.obfuscated.len() {
                return Err(Error::LengthMismatch {
                    left: m.len(),
                    right: self.obfuscated.len(),
                });
            }
        }
        let mut join = self.aligned_members[0].clone();
        for m in &self.aligned_members[1..] {
            join = obfuscate_aligned(&join, m)?;
        }
        if join != self.obfuscated {
            return Err(Error::Internal(
                "obfuscated sequence is not the join of its members".into(),
            ));
        }
        for (m, &loss) in self.aligned_members.iter().zip(&self.member_losses) {
            if sequence_distance(m, &self.obfuscated)? != loss {
                return Err(Error::Internal("member loss does not match its alignment".into()));
            }
        }
        // For a pair the two losses split the pair distance exactly; a
        // triple additionally loses what the first stage's output concedes
        // to the final frame.
        let loss_total = self.loss_total();
        if k == 2 && self.pair_distance != loss_total {
            return Err(Error::Internal("pair distance must equal the loss total".into()));
        }
        if k == 3 && self.pair_distance > loss_total {
            return Err(Error::Internal("triple stage distances exceed the loss total".into()));
        }
        Ok(())
    }
}

/// Result of clustering a whole dataset: ⌊N/2⌋ clusters partitioning the
/// records, with one triple exactly when N is odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObfuscationRun {
    pub clusters: Vec<Cluster>,
    pub rng_seed: u64,
    pub params: ScoringParams,
    pub total_pair_distance: u64,
    pub average_distance: Rational,
    pub wall_time: Duration,
    pub search_invocations: usize,
}

impl ObfuscationRun {
    /// Sum of member losses across all clusters; the numerator of
    /// `average_distance`.
    pub fn total_member_loss(&self) -> u64 {
        self.clusters.iter().map(Cluster::loss_total).sum()
    }

    /// Check every structural invariant against the source dataset.
    pub fn validate(&self, db: &Dataset) -> Result<()> {
        let n = db.len();
        if self.clusters.len() != n / 2 {
            return Err(Error::Internal(format!(
                "{} clusters for {n} records, expected {}",
                self.clusters.len(),
                n / 2
            )));
        }
        let mut seen: HashSet<&str> = HashSet::with_capacity(n);
        let mut triples = 0;
        for cluster in &self.clusters {
            cluster.validate()?;
            if cluster.member_ids.len() == 3 {
                triples += 1;
            }
            for id in &cluster.member_ids {
                if db.iter().all(|r| r.id() != id) {
                    return Err(Error::Internal(format!("unknown member id {id:?}")));
                }
                if !seen.insert(id) {
                    return Err(Error::Internal(format!("record {id:?} in two clusters")));
                }
            }
        }
        if seen.len() != n {
            return Err(Error::Internal(format!(
                "clusters cover {} of {n} records",
                seen.len()
            )));
        }
        if triples != n % 2 {
            return Err(Error::Internal(format!("{triples} triples for {n} records")));
        }
        if self.search_invocations > n / 2 {
            return Err(Error::Internal(format!(
                "{} search invocations for {n} records",
                self.search_invocations
            )));
        }
        let pair_total: u64 = self.clusters.iter().map(|c| c.pair_distance).sum();
        if pair_total != self.total_pair_distance {
            return Err(Error::Internal("total pair distance does not add up".into()));
        }
        if self.average_distance != Rational::new(self.total_member_loss(), n as u64)? {
            return Err(Error::Internal("average distance does not add up".into()));
        }
        Ok(())
    }
}

/// Collapse two records: globally align, then generalize columnwise.
pub fn obfuscate_pair(
    a: &SequenceRecord,
    b: &SequenceRecord,
    params: &ScoringParams,
) -> Result<Cluster> {
    if a.id() == b.id() {
        return Err(Error::InvalidParameter(format!(
            "cannot cluster record {:?} with itself",
            a.id()
        )));
    }
    let pair = global_align(a, b, params)?;
    let obfuscated = pair.obfuscate();
    let member_losses = vec![
        sequence_distance(&pair.first, &obfuscated)?,
        sequence_distance(&pair.second, &obfuscated)?,
    ];
    Ok(Cluster {
        member_ids: vec![a.id().to_string(), b.id().to_string()],
        pair_distance: pair.distance(),
        aligned_members: vec![pair.first, pair.second],
        obfuscated,
        member_losses,
    })
}

/// Collapse three records in two stages: a and b first, then c against
/// their obfuscation. Gap columns the second stage inserts into the
/// stage-one frame propagate into the stored alignments of a and b, so all
/// three members end up in the final coordinate frame.
pub fn obfuscate_triple(
    a: &SequenceRecord,
    b: &SequenceRecord,
    c: &SequenceRecord,
    params: &ScoringParams,
) -> Result<Cluster> {
    if a.id() == b.id() || a.id() == c.id() || b.id() == c.id() {
        return Err(Error::InvalidParameter("triple members must be distinct".into()));
    }
    let stage1 = global_align(a, b, params)?;
    let first_out = stage1.obfuscate();
    debug_assert!(!first_out.contains_gap(), "a pairwise obfuscation has no gaps");
    let stage2 = align_code_sequences(&first_out, &c.to_aligned(), params)?;

    // Lift the stage-one rows through the gaps stage two inserted; non-gap
    // columns of the lifted first output correspond 1:1 to stage-one columns.
    let mut lifted_a = Vec::with_capacity(stage2.len());
    let mut lifted_b = Vec::with_capacity(stage2.len());
    let mut col = 0;
    for code in stage2.first.codes() {
        if code.is_gap() {
            lifted_a.push(Code::Gap);
            lifted_b.push(Code::Gap);
        } else {
            lifted_a.push(stage1.first.codes()[col]);
            lifted_b.push(stage1.second.codes()[col]);
            col += 1;
        }
    }
    debug_assert_eq!(col, stage1.len());

    let obfuscated = stage2.obfuscate();
    let aligned_members = vec![
        AlignedSequence::new(lifted_a)?,
        AlignedSequence::new(lifted_b)?,
        stage2.second.clone(),
    ];
    let member_losses = aligned_members
        .iter()
        .map(|m| sequence_distance(m, &obfuscated))
        .collect::<Result<Vec<u64>>>()?;
    Ok(Cluster {
        member_ids: vec![a.id().to_string(), b.id().to_string(), c.id().to_string()],
        aligned_members,
        obfuscated,
        member_losses,
        pair_distance: stage1.distance() + stage2.distance(),
    })
}

/// Top homolog of record `q` among active records, or the smallest-distance
/// record (earliest on ties) when no candidate shares a seed word.
fn top_homolog(
    db: &Dataset,
    index: &KmerIndex,
    params: &ScoringParams,
    active: &[bool],
    q: usize,
    searches: &mut usize,
) -> Result<usize> {
    *searches += 1;
    let records = db.records();
    let keep = |r: usize| active[r] && r != q;
    if let Some((record, _score)) = search_filtered(records[q].residues(), db, index, params, &keep)
    {
        return Ok(record);
    }
    let mut best: Option<(usize, u64)> = None;
    for r in (0..db.len()).filter(|&r| keep(r)) {
        let d = global_align(&records[q], &records[r], params)?.distance();
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((r, d));
        }
    }
    best.map(|(r, _)| r)
        .ok_or_else(|| Error::Internal("homolog search over an empty pool".into()))
}

/// Iterative cluster-and-obfuscate of a whole dataset.
///
/// ⌊N/2⌋−1 times: draw a uniform random query from the pool, search its top
/// homolog among the rest of the pool, collapse the two, remove both. Two
/// survivors pair directly without a search. Three survivors collapse as a
/// triple: a random query's search ranks the other two into top and second
/// homolog. Search invocations therefore number ⌊N/2⌋−1 for even N and
/// ⌊N/2⌋ for odd N.
pub fn iter_megablast(
    db: &Dataset,
    params: &ScoringParams,
    rng_seed: u64,
) -> Result<ObfuscationRun> {
    if db.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if db.len() < 2 {
        return Err(Error::DatasetTooSmall { n: db.len(), min: 2 });
    }
    params.validate()?;
    let started = Instant::now();
    let index = build_index(db, params.word_size)?;
    let records = db.records();
    let n = db.len();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut active = vec![true; n];
    let mut clusters = Vec::with_capacity(n / 2);
    let mut search_invocations = 0;

    for _ in 0..n / 2 - 1 {
        let pool: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        let q = pool[rng.random_range(0..pool.len())];
        let hom = top_homolog(db, &index, params, &active, q, &mut search_invocations)?;
        clusters.push(obfuscate_pair(&records[q], &records[hom], params)?);
        active[q] = false;
        active[hom] = false;
    }

    let pool: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
    match pool.as_slice() {
        &[x, y] => clusters.push(obfuscate_pair(&records[x], &records[y], params)?),
        &[_, _, _] => {
            let q = pool[rng.random_range(0..pool.len())];
            let top = top_homolog(db, &index, params, &active, q, &mut search_invocations)?;
            let second = pool
                .iter()
                .copied()
                .find(|&i| i != q && i != top)
                .expect("three survivors leave a second homolog");
            clusters.push(obfuscate_triple(&records[q], &records[top], &records[second], params)?);
        }
        other => {
            return Err(Error::Internal(format!("{} survivors after the loop", other.len())))
        }
    }

    finish_run(db, clusters, rng_seed, *params, started, search_invocations)
}

/// Realize a matrix-level pairing into actual clusters: each pair is
/// re-aligned and obfuscated, the triple (if any) goes through the same
/// two-stage collapse with the leftover folded in last. No searches run.
pub fn clusters_from_pairing(
    db: &Dataset,
    solution: &PairingSolution,
    params: &ScoringParams,
    rng_seed: u64,
) -> Result<ObfuscationRun> {
    solution.validate_partition(db.len())?;
    params.validate()?;
    let started = Instant::now();
    let records = db.records();
    let mut clusters = solution
        .pairs
        .par_iter()
        .map(|&(a, b)| obfuscate_pair(&records[a], &records[b], params))
        .collect::<Result<Vec<Cluster>>>()?;
    if let Some((p, q, v)) = solution.triple {
        clusters.push(obfuscate_triple(&records[p], &records[q], &records[v], params)?);
    }
    finish_run(db, clusters, rng_seed, *params, started, 0)
}

fn finish_run(
    db: &Dataset,
    clusters: Vec<Cluster>,
    rng_seed: u64,
    params: ScoringParams,
    started: Instant,
    search_invocations: usize,
) -> Result<ObfuscationRun> {
    let total_pair_distance = clusters.iter().map(|c| c.pair_distance).sum();
    let total_loss: u64 = clusters.iter().map(Cluster::loss_total).sum();
    Ok(ObfuscationRun {
        clusters,
        rng_seed,
        params,
        total_pair_distance,
        average_distance: Rational::new(total_loss, db.len() as u64)?,
        wall_time: started.elapsed(),
        search_invocations,
    })
}
