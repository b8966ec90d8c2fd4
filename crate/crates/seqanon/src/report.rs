//! Information-loss statistics, aggregation over repeated runs, and report
//! rendering as TSV or JSON.
//!
//! Distances stay in exact integer/rational arithmetic end to end; floats
//! appear only in standard deviations and wall-time summaries. Wall times
//! are measurements, so determinism checks must exclude them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::cluster::ObfuscationRun;
use crate::matching::{DistanceMatrix, PairingSolution};
use crate::seqio::Dataset;
use crate::{Error, Result};

/// Nonnegative rational in lowest terms. Displays with fixed 4-decimal
/// precision (round half up), which is also the TSV rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    numer: u64,
    denom: u64,
}

impl Rational {
    pub fn new(numer: u64, denom: u64) -> Result<Rational> {
        if denom == 0 {
            return Err(Error::InvalidParameter("rational with zero denominator".into()));
        }
        let g = num_integer::gcd(numer, denom);
        Ok(Rational { numer: numer / g, denom: denom / g })
    }

    pub fn zero() -> Rational {
        Rational { numer: 0, denom: 1 }
    }

    #[inline]
    pub fn numer(self) -> u64 {
        self.numer
    }

    #[inline]
    pub fn denom(self) -> u64 {
        self.denom
    }

    pub fn to_f64(self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    /// Fixed 4-decimal rendering, rounding half up.
    pub fn to_decimal4(self) -> String {
        let scaled = self.numer as u128 * 10_000;
        let d = self.denom as u128;
        let mut q = scaled / d;
        if (scaled % d) * 2 >= d {
            q += 1;
        }
        format!("{}.{:04}", q / 10_000, q % 10_000)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> std::cmp::Ordering {
        let lhs = self.numer as u128 * other.denom as u128;
        let rhs = other.numer as u128 * self.denom as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal4())
    }
}

/// Pairing strategy behind a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    IterMegaBlast,
    Mwm,
    Greedy,
    HillClimb,
    Random,
}

impl Method {
    pub const ALL: [Method; 5] =
        [Method::IterMegaBlast, Method::Mwm, Method::Greedy, Method::HillClimb, Method::Random];

    pub fn name(self) -> &'static str {
        match self {
            Method::IterMegaBlast => "itermegablast",
            Method::Mwm => "mwm",
            Method::Greedy => "greedy",
            Method::HillClimb => "hillclimb",
            Method::Random => "random",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "itermegablast" => Ok(Method::IterMegaBlast),
            "mwm" => Ok(Method::Mwm),
            "greedy" => Ok(Method::Greedy),
            "hillclimb" => Ok(Method::HillClimb),
            "random" => Ok(Method::Random),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

/// One cluster of a run report. `loss_total` sums the member losses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub members: Vec<String>,
    pub member_losses: Vec<u64>,
    pub pair_distance: u64,
    pub loss_total: u64,
}

/// Statistics of a single anonymization run.
///
/// `total_distance` sums every member's loss against its cluster's
/// obfuscated sequence; `average_distance` divides it by the number of
/// original sequences, `per_cluster_average` by the number of clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub n_sequences: usize,
    pub n_clusters: usize,
    pub seed: u64,
    pub total_distance: u64,
    pub average_distance: Rational,
    pub per_cluster_average: Rational,
    pub total_pair_distance: u64,
    pub search_invocations: usize,
    pub wall_time: Duration,
    pub clusters: Vec<ClusterRow>,
}

/// Report for an [`ObfuscationRun`]; rows are ordered by the dataset
/// position of each cluster's first member.
pub fn summarize(run: &ObfuscationRun, db: &Dataset, method: Method) -> Result<RunReport> {
    let position: HashMap<&str, usize> =
        db.iter().enumerate().map(|(ix, r)| (r.id(), ix)).collect();
    let pos_of = |id: &str| -> Result<usize> {
        position
            .get(id)
            .copied()
            .ok_or_else(|| Error::Internal(format!("cluster member {id:?} not in dataset")))
    };

    let mut rows = Vec::with_capacity(run.clusters.len());
    for cluster in &run.clusters {
        let first = cluster.member_ids.first().map(String::as_str).unwrap_or_default();
        rows.push((
            pos_of(first)?,
            ClusterRow {
                members: cluster.member_ids.clone(),
                member_losses: cluster.member_losses.clone(),
                pair_distance: cluster.pair_distance,
                loss_total: cluster.member_losses.iter().sum(),
            },
        ));
    }
    rows.sort_by_key(|&(pos, _)| pos);

    let total_distance = rows.iter().map(|(_, r)| r.loss_total).sum();
    Ok(RunReport {
        method,
        n_sequences: db.len(),
        n_clusters: run.clusters.len(),
        seed: run.rng_seed,
        total_distance,
        average_distance: Rational::new(total_distance, db.len() as u64)?,
        per_cluster_average: Rational::new(total_distance, run.clusters.len() as u64)?,
        total_pair_distance: run.total_pair_distance,
        search_invocations: run.search_invocations,
        wall_time: run.wall_time,
        clusters: rows.into_iter().map(|(_, r)| r).collect(),
    })
}

/// Matrix-level report for a pairing that was never realized into
/// sequences: losses per member are unknown, so rows carry only the
/// matrix costs and `total_distance` equals the solution's total loss.
pub fn summarize_pairing(
    solution: &PairingSolution,
    m: &DistanceMatrix,
    db: &Dataset,
    method: Method,
    seed: u64,
    wall_time: Duration,
) -> Result<RunReport> {
    if db.len() != m.n() {
        return Err(Error::InvalidMatrix(format!(
            "matrix size {} does not match dataset size {}",
            m.n(),
            db.len()
        )));
    }
    solution.validate(m)?;
    let id_of = |ix: usize| db.records()[ix].id().to_string();

    let mut rows = Vec::new();
    for &(a, b) in &solution.pairs {
        let d = m.get(a, b);
        rows.push((
            a.min(b),
            ClusterRow {
                members: vec![id_of(a), id_of(b)],
                member_losses: Vec::new(),
                pair_distance: d,
                loss_total: d,
            },
        ));
    }
    if let Some((p, q, v)) = solution.triple {
        let d = m.get(p, q) + m.get(v, p).min(m.get(v, q));
        rows.push((
            p.min(q).min(v),
            ClusterRow {
                members: vec![id_of(p), id_of(q), id_of(v)],
                member_losses: Vec::new(),
                pair_distance: d,
                loss_total: d,
            },
        ));
    }
    rows.sort_by_key(|&(pos, _)| pos);

    Ok(RunReport {
        method,
        n_sequences: m.n(),
        n_clusters: rows.len(),
        seed,
        total_distance: solution.total_loss,
        average_distance: Rational::new(solution.total_loss, m.n() as u64)?,
        per_cluster_average: Rational::new(solution.total_loss, rows.len() as u64)?,
        total_pair_distance: solution.total_loss,
        search_invocations: 0,
        wall_time,
        clusters: rows.into_iter().map(|(_, r)| r).collect(),
    })
}

/// Per-run line of an aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub seed: u64,
    pub average_distance: Rational,
    pub total_distance: u64,
    pub wall_time: Duration,
}

/// Mean and sample standard deviation over repeated runs of one method on
/// one dataset. Means of distances are exact rationals; standard
/// deviations use floats (a single run reports 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub method: Method,
    pub n_sequences: usize,
    pub runs: usize,
    pub mean_average_distance: Rational,
    pub std_average_distance: f64,
    pub mean_total_distance: Rational,
    pub mean_wall_time: Duration,
    pub std_wall_time_s: f64,
    pub per_run: Vec<RunRow>,
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    var.sqrt()
}

/// Aggregate reports of the same method over the same dataset.
pub fn aggregate(reports: &[RunReport]) -> Result<AggregateReport> {
    let first = reports.first().ok_or(Error::NoReports)?;
    for r in reports {
        if r.method != first.method {
            return Err(Error::MixedReports(format!(
                "method {} vs {}",
                r.method, first.method
            )));
        }
        if r.n_sequences != first.n_sequences {
            return Err(Error::MixedReports(format!(
                "dataset size {} vs {}",
                r.n_sequences, first.n_sequences
            )));
        }
    }

    let runs = reports.len() as u64;
    let loss_sum: u64 = reports.iter().map(|r| r.total_distance).sum();
    let wall_sum: Duration = reports.iter().map(|r| r.wall_time).sum();
    Ok(AggregateReport {
        method: first.method,
        n_sequences: first.n_sequences,
        runs: reports.len(),
        mean_average_distance: Rational::new(loss_sum, runs * first.n_sequences as u64)?,
        std_average_distance: sample_std(
            &reports.iter().map(|r| r.average_distance.to_f64()).collect::<Vec<_>>(),
        ),
        mean_total_distance: Rational::new(loss_sum, runs)?,
        mean_wall_time: wall_sum / reports.len() as u32,
        std_wall_time_s: sample_std(
            &reports.iter().map(|r| r.wall_time.as_secs_f64()).collect::<Vec<_>>(),
        ),
        per_run: reports
            .iter()
            .map(|r| RunRow {
                seed: r.seed,
                average_distance: r.average_distance,
                total_distance: r.total_distance,
                wall_time: r.wall_time,
            })
            .collect(),
    })
}

/// Output encoding for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

fn seconds(d: Duration) -> String {
    format!("{:.6}", d.as_secs_f64())
}

/// Render a run report. The TSV layout is a `# key=value` preamble followed
/// by one row per cluster; see the README for the column list.
pub fn emit_run(report: &RunReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)
            .map_err(|e| Error::Internal(format!("report serialization failed: {e}")))?),
        ReportFormat::Tsv => {
            let mut out = String::new();
            out.push_str("# schema=seqanon-run-v1\n");
            out.push_str(&format!("# method={}\n", report.method));
            out.push_str(&format!("# n_sequences={}\n", report.n_sequences));
            out.push_str(&format!("# n_clusters={}\n", report.n_clusters));
            out.push_str(&format!("# seed={}\n", report.seed));
            out.push_str(&format!("# total_distance={}\n", report.total_distance));
            out.push_str(&format!("# average_distance={}\n", report.average_distance));
            out.push_str(&format!("# per_cluster_average={}\n", report.per_cluster_average));
            out.push_str(&format!("# total_pair_distance={}\n", report.total_pair_distance));
            out.push_str(&format!("# search_invocations={}\n", report.search_invocations));
            out.push_str(&format!("# wall_time_s={}\n", seconds(report.wall_time)));
            out.push_str("members\tsize\tpair_distance\tmember_losses\tloss_total\n");
            for row in &report.clusters {
                let losses: Vec<String> =
                    row.member_losses.iter().map(u64::to_string).collect();
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    row.members.join("+"),
                    row.members.len(),
                    row.pair_distance,
                    losses.join(","),
                    row.loss_total
                ));
            }
            Ok(out)
        }
    }
}

/// Render an aggregate report; same conventions as [`emit_run`].
pub fn emit_aggregate(report: &AggregateReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)
            .map_err(|e| Error::Internal(format!("report serialization failed: {e}")))?),
        ReportFormat::Tsv => {
            let mut out = String::new();
            out.push_str("# schema=seqanon-aggregate-v1\n");
            out.push_str(&format!("# method={}\n", report.method));
            out.push_str(&format!("# n_sequences={}\n", report.n_sequences));
            out.push_str(&format!("# runs={}\n", report.runs));
            out.push_str(&format!("# mean_average_distance={}\n", report.mean_average_distance));
            out.push_str(&format!("# std_average_distance={:.4}\n", report.std_average_distance));
            out.push_str(&format!("# mean_total_distance={}\n", report.mean_total_distance));
            out.push_str(&format!("# mean_wall_time_s={}\n", seconds(report.mean_wall_time)));
            out.push_str(&format!("# std_wall_time_s={:.6}\n", report.std_wall_time_s));
            out.push_str("seed\taverage_distance\ttotal_distance\twall_time_s\n");
            for row in &report.per_run {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    row.seed,
                    row.average_distance,
                    row.total_distance,
                    seconds(row.wall_time)
                ));
            }
            Ok(out)
        }
    }
}
