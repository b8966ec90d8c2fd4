//! Command-line front end: anonymize FASTA datasets, compare pairing
//! strategies, and dump the underlying distance machinery.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 internal
//! invariant violation. Every file is written atomically (temp file in the
//! same directory, then rename), so failures never leave partial output.
//! Diagnostics go to stderr; data goes to files or stdout only.

use std::collections::HashMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::Context;
use clap::{ArgAction, Args, Parser, Subcommand};

use seqanon::align::ScoringParams;
use seqanon::cluster::{clusters_from_pairing, iter_megablast, Cluster, ObfuscationRun};
use seqanon::lattice::{
    distance_table_tsv, generalize_table_tsv, obfuscate_aligned, sequence_distance,
};
use seqanon::matching::{
    default_hill_climb_iterations, greedy_matching, hill_climb_refine,
    min_weight_perfect_matching, pairwise_distance_matrix, random_pairing, DistanceMatrix,
    PairingSolution,
};
use seqanon::report::{
    aggregate, emit_aggregate, emit_run, summarize, Method, ReportFormat, RunReport,
};
use seqanon::seqio::{
    parse_fasta, parse_fasta_gapped, synthesize_dataset, write_fasta, AlignedRecord, Dataset,
    SequenceRecord,
};

#[derive(Parser)]
#[command(
    name = "seqanon",
    version,
    about = "Anonymize DNA datasets by clustering similar sequences and \
             generalizing each cluster with IUPAC ambiguity codes"
)]
struct Cli {
    /// Cap the worker-thread count (default: one per CPU)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a FASTA dataset and emit the obfuscated sequences plus a report
    Obfuscate(ObfuscateArgs),
    /// Align two single-record FASTA files and print alignment, obfuscation, distance
    Distance(DistanceArgs),
    /// Print the pairwise distance matrix of a FASTA dataset as TSV
    Matrix(MatrixArgs),
    /// Benchmark pairing methods over dataset prefixes with repeated seeded runs
    Bench(BenchArgs),
    /// Generate a synthetic family-structured FASTA corpus
    Synth(SynthArgs),
    /// Dump the 16x16 code generalization and distance tables
    Tables(TablesArgs),
}

/// Search and alignment scoring knobs, shared by every aligning subcommand.
#[derive(Args)]
struct ScoringArgs {
    /// Score when two codes share a base (must be positive)
    #[arg(long = "match", value_name = "SCORE", default_value_t = 1, allow_negative_numbers = true)]
    match_reward: i32,

    /// Score when two codes share no base (must be negative)
    #[arg(long, value_name = "SCORE", default_value_t = -2, allow_negative_numbers = true)]
    mismatch: i32,

    /// Cost to open a gap run (must be negative)
    #[arg(long, value_name = "SCORE", default_value_t = -4, allow_negative_numbers = true)]
    gap_open: i32,

    /// Cost per gapped column (must not be positive)
    #[arg(long, value_name = "SCORE", default_value_t = -1, allow_negative_numbers = true)]
    gap_extend: i32,

    /// Exact-match word length for the search index (4..=32)
    #[arg(long, value_name = "WIDTH", default_value_t = 12)]
    word_size: usize,

    /// Whether gap runs touching either sequence end cost nothing
    #[arg(long, value_name = "BOOL", default_value_t = true, action = ArgAction::Set)]
    end_gaps_free: bool,
}

impl ScoringArgs {
    fn to_params(&self) -> ScoringParams {
        ScoringParams {
            match_reward: self.match_reward,
            mismatch_penalty: self.mismatch,
            gap_open: self.gap_open,
            gap_extend: self.gap_extend,
            word_size: self.word_size,
            end_gaps_free: self.end_gaps_free,
        }
    }
}

#[derive(Args)]
struct ObfuscateArgs {
    /// Input FASTA file
    input: PathBuf,

    /// Pairing method: itermegablast, mwm, greedy, hillclimb, or random
    #[arg(long, value_name = "NAME", default_value = "itermegablast", value_parser = parse_method)]
    method: Method,

    /// Base RNG seed; all randomness flows from it
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Run seeds seed..seed+repeat-1 and report the aggregate instead.
    /// With repeat > 1 no FASTA is written (each run obfuscates differently)
    #[arg(long, value_name = "N", default_value_t = 1)]
    repeat: u64,

    /// Obfuscated FASTA path [default: <input stem>.obfuscated.fasta]
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Report path [default: <input stem>.report.<format>]
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,

    /// Report encoding: json or tsv
    #[arg(long, value_name = "NAME", default_value = "json", value_parser = parse_format)]
    format: ReportFormat,

    /// Idle-proposal budget for hillclimb [default: 100 per sequence]
    #[arg(long, value_name = "N")]
    hill_climb_iterations: Option<usize>,

    /// FASTA sequence line width
    #[arg(long, value_name = "COLS", default_value_t = 60)]
    line_width: usize,

    #[command(flatten)]
    scoring: ScoringArgs,
}

#[derive(Args)]
struct DistanceArgs {
    /// FASTA file holding the first sequence
    first: PathBuf,

    /// FASTA file holding the second sequence
    second: PathBuf,

    #[command(flatten)]
    scoring: ScoringArgs,
}

#[derive(Args)]
struct MatrixArgs {
    /// Input FASTA file
    input: PathBuf,

    /// Write the TSV here instead of stdout
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(flatten)]
    scoring: ScoringArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Input FASTA file; when omitted a corpus is synthesized from the synth-* flags
    input: Option<PathBuf>,

    /// Comma-separated prefix sizes to benchmark
    #[arg(long, value_name = "N,N,...", value_delimiter = ',', required = true)]
    sizes: Vec<usize>,

    /// Comma-separated methods to benchmark
    #[arg(
        long,
        value_name = "NAME,...",
        value_delimiter = ',',
        default_value = "itermegablast,mwm,greedy,hillclimb,random",
        value_parser = parse_method
    )]
    methods: Vec<Method>,

    /// Seeded runs per (size, method) cell; seeds are seed..seed+repeat-1
    #[arg(long, value_name = "N", default_value_t = 1)]
    repeat: u64,

    /// Base RNG seed for the benchmark runs
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the table here instead of stdout
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Ancestor families in the synthesized corpus
    #[arg(long, value_name = "N", default_value_t = 5)]
    synth_families: usize,

    /// Mutated copies per family
    #[arg(long, value_name = "N", default_value_t = 10)]
    synth_copies: usize,

    /// Ancestor length in bases
    #[arg(long, value_name = "N", default_value_t = 1000)]
    synth_length: usize,

    /// Per-base substitution probability in [0, 1)
    #[arg(long, value_name = "RATE", default_value_t = 0.01)]
    synth_substitution_rate: f64,

    /// Per-base single-base indel probability in [0, 1)
    #[arg(long, value_name = "RATE", default_value_t = 0.0)]
    synth_indel_rate: f64,

    /// Seed for corpus synthesis (separate from the run seed)
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    synth_seed: u64,

    #[command(flatten)]
    scoring: ScoringArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// RNG seed for the corpus
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Ancestor families
    #[arg(long, value_name = "N", default_value_t = 5)]
    families: usize,

    /// Mutated copies per family
    #[arg(long, value_name = "N", default_value_t = 10)]
    copies: usize,

    /// Ancestor length in bases
    #[arg(long, value_name = "N", default_value_t = 1000)]
    length: usize,

    /// Per-base substitution probability in [0, 1)
    #[arg(long, value_name = "RATE", default_value_t = 0.01)]
    substitution_rate: f64,

    /// Per-base single-base indel probability in [0, 1)
    #[arg(long, value_name = "RATE", default_value_t = 0.0)]
    indel_rate: f64,

    /// FASTA sequence line width
    #[arg(long, value_name = "COLS", default_value_t = 60)]
    line_width: usize,

    /// Write the FASTA here instead of stdout
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// Write both tables here instead of stdout
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: seqanon::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: seqanon::Error| e.to_string())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let informational =
                matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = err.print();
            return if informational { 0 } else { 1 };
        }
    };

    // Worker panics are internal invariant violations, not input errors;
    // the unwind is caught so they map to the dedicated exit code.
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => 0,
        Ok(Err(err)) => {
            eprintln!("error: {err:#}");
            if is_internal(&err) {
                2
            } else {
                1
            }
        }
        Err(_) => {
            eprintln!("error: internal invariant violated (panic)");
            2
        }
    }
}

fn is_internal(err: &anyhow::Error) -> bool {
    matches!(err.downcast_ref::<seqanon::Error>(), Some(seqanon::Error::Internal(_)))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            anyhow::bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.command {
        Command::Obfuscate(args) => run_obfuscate(args),
        Command::Distance(args) => run_distance(args),
        Command::Matrix(args) => run_matrix(args),
        Command::Bench(args) => run_bench(args),
        Command::Synth(args) => run_synth(args),
        Command::Tables(args) => run_tables(args),
    }
}

/// Read a whole file with a path-bearing error message.
fn read_input(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Write via a temporary file in the target directory plus rename, so a
/// failure mid-write never leaves a partial file at `path`.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::Builder::new()
        .prefix(".seqanon.")
        .tempfile_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|()| tmp.flush())
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("renaming into {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// Data goes to the chosen file, or to stdout when no path was given.
fn emit(output: Option<&Path>, contents: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// `<dir>/<stem><suffix>` next to the input file.
fn sibling(input: &Path, suffix: &str) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    input.with_file_name(format!("{stem}{suffix}"))
}

/// Solve the pairing at the matrix level. `itermegablast` has no matrix
/// formulation and is handled by the caller.
fn solve_pairing(
    method: Method,
    matrix: &DistanceMatrix,
    seed: u64,
    hill_climb_iterations: Option<usize>,
) -> anyhow::Result<PairingSolution> {
    let solution = match method {
        Method::Mwm => min_weight_perfect_matching(matrix)?,
        Method::Greedy => greedy_matching(matrix)?,
        Method::HillClimb => {
            let start = greedy_matching(matrix)?;
            let budget =
                hill_climb_iterations.unwrap_or_else(|| default_hill_climb_iterations(matrix.n()));
            hill_climb_refine(&start, matrix, budget, seed)?
        }
        Method::Random => random_pairing(matrix, seed)?,
        Method::IterMegaBlast => anyhow::bail!("itermegablast is not a matrix method"),
    };
    Ok(solution)
}

/// One seeded run of any method, realized into clusters and validated.
/// Pairing methods receive the precomputed matrix; its construction time is
/// accounted by the caller.
fn execute_run(
    db: &Dataset,
    params: &ScoringParams,
    method: Method,
    seed: u64,
    matrix: Option<&DistanceMatrix>,
    hill_climb_iterations: Option<usize>,
) -> anyhow::Result<(ObfuscationRun, RunReport)> {
    let run = match method {
        Method::IterMegaBlast => iter_megablast(db, params, seed)?,
        _ => {
            let matrix = matrix.expect("pairing methods receive a matrix");
            let started = Instant::now();
            let solution = solve_pairing(method, matrix, seed, hill_climb_iterations)?;
            let mut run = clusters_from_pairing(db, &solution, params, seed)?;
            run.wall_time = started.elapsed();
            run
        }
    };
    run.validate(db)?;
    let report = summarize(&run, db, method)?;
    Ok((run, report))
}

/// Obfuscated records in report order: one per cluster, id = member ids
/// joined with '+'. Cluster obfuscations are gap-free by construction.
fn obfuscated_dataset(run: &ObfuscationRun, db: &Dataset) -> anyhow::Result<Dataset> {
    let position: HashMap<&str, usize> =
        db.iter().enumerate().map(|(ix, r)| (r.id(), ix)).collect();
    let mut clusters: Vec<&Cluster> = run.clusters.iter().collect();
    clusters.sort_by_key(|c| {
        c.member_ids.first().and_then(|id| position.get(id.as_str())).copied()
    });
    let records = clusters
        .iter()
        .map(|c| {
            SequenceRecord::new(
                c.member_ids.join("+"),
                String::new(),
                c.obfuscated.codes().to_vec(),
            )
        })
        .collect::<seqanon::Result<Vec<_>>>()?;
    Ok(Dataset::new(records)?)
}

fn run_obfuscate(args: ObfuscateArgs) -> anyhow::Result<()> {
    let params = args.scoring.to_params();
    params.validate()?;
    if args.repeat == 0 {
        anyhow::bail!("--repeat must be at least 1");
    }
    if args.repeat > 1 && args.output.is_some() {
        anyhow::bail!(
            "--output conflicts with --repeat > 1; repeated runs emit only the aggregate report"
        );
    }
    args.seed.checked_add(args.repeat - 1).context("--seed + --repeat overflows")?;
    let db = parse_fasta(&read_input(&args.input)?)?;

    let needs_matrix = args.method != Method::IterMegaBlast;
    let mut matrix_elapsed = Duration::ZERO;
    let matrix = if needs_matrix {
        let started = Instant::now();
        let m = pairwise_distance_matrix(&db, &params)?;
        matrix_elapsed = started.elapsed();
        Some(m)
    } else {
        None
    };

    let mut runs = Vec::new();
    let mut reports = Vec::new();
    for seed in args.seed..args.seed + args.repeat {
        let (run, report) = execute_run(
            &db,
            &params,
            args.method,
            seed,
            matrix.as_ref(),
            args.hill_climb_iterations,
        )?;
        runs.push(run);
        reports.push(report);
    }

    let report_path = args.report.unwrap_or_else(|| {
        let ext = match args.format {
            ReportFormat::Json => "json",
            ReportFormat::Tsv => "tsv",
        };
        sibling(&args.input, &format!(".report.{ext}"))
    });

    if args.repeat == 1 {
        // A single run owns the matrix cost; repeated runs share it, so
        // their per-run wall times cover matching and realization only.
        reports[0].wall_time += matrix_elapsed;
        let fasta_path =
            args.output.unwrap_or_else(|| sibling(&args.input, ".obfuscated.fasta"));
        let out_db = obfuscated_dataset(&runs[0], &db)?;
        write_atomic(&fasta_path, &write_fasta(&out_db, args.line_width)?)?;
        write_atomic(&report_path, &emit_run(&reports[0], args.format)?)?;
    } else {
        let agg = aggregate(&reports)?;
        write_atomic(&report_path, &emit_aggregate(&agg, args.format)?)?;
    }
    Ok(())
}

/// The single record of a one-sequence FASTA file.
fn single_record(path: &Path) -> anyhow::Result<AlignedRecord> {
    let mut records = parse_fasta_gapped(&read_input(path)?)?;
    if records.len() != 1 {
        anyhow::bail!("{} holds {} records, expected exactly 1", path.display(), records.len());
    }
    Ok(records.remove(0))
}

fn run_distance(args: DistanceArgs) -> anyhow::Result<()> {
    let params = args.scoring.to_params();
    params.validate()?;
    let a = single_record(&args.first)?;
    let b = single_record(&args.second)?;

    // Gapped input is taken as a finished alignment and scored as-is;
    // gap-free input is aligned here first.
    let (row_a, row_b) = if a.sequence.contains_gap() || b.sequence.contains_gap() {
        (a.sequence, b.sequence)
    } else {
        let rec_a = SequenceRecord::new(a.id, a.description, a.sequence.codes().to_vec())?;
        let rec_b = SequenceRecord::new(b.id, b.description, b.sequence.codes().to_vec())?;
        let pair = seqanon::align::global_align(&rec_a, &rec_b, &params)?;
        (pair.first, pair.second)
    };

    let obfuscated = obfuscate_aligned(&row_a, &row_b)?;
    let distance = sequence_distance(&row_a, &row_b)?;
    println!("{row_a}");
    println!("{row_b}");
    println!("{obfuscated}");
    println!("{distance}");
    Ok(())
}

fn run_matrix(args: MatrixArgs) -> anyhow::Result<()> {
    let params = args.scoring.to_params();
    params.validate()?;
    let db = parse_fasta(&read_input(&args.input)?)?;
    let matrix = pairwise_distance_matrix(&db, &params)?;
    let labels: Vec<String> = db.iter().map(|r| r.id().to_string()).collect();
    emit(args.output.as_deref(), &matrix.to_tsv(&labels)?)
}

fn run_bench(args: BenchArgs) -> anyhow::Result<()> {
    let params = args.scoring.to_params();
    params.validate()?;
    if args.repeat == 0 {
        anyhow::bail!("--repeat must be at least 1");
    }
    args.seed.checked_add(args.repeat - 1).context("--seed + --repeat overflows")?;
    if args.methods.is_empty() {
        anyhow::bail!("--methods must name at least one method");
    }

    let db = match &args.input {
        Some(path) => parse_fasta(&read_input(path)?)?,
        None => synthesize_dataset(
            args.synth_seed,
            args.synth_families,
            args.synth_copies,
            args.synth_length,
            args.synth_substitution_rate,
            args.synth_indel_rate,
        )?,
    };
    for &size in &args.sizes {
        // Surface an oversized prefix before any work runs.
        db.prefix(size)?;
    }

    let needs_matrix = args.methods.iter().any(|&m| m != Method::IterMegaBlast);
    let mut out = String::new();
    out.push_str("# schema=seqanon-bench-v1\n");
    out.push_str(&format!("# n_sequences={}\n", db.len()));
    out.push_str(&format!("# repeat={}\n", args.repeat));
    out.push_str(&format!("# base_seed={}\n", args.seed));
    out.push_str(
        "size\tmethod\truns\tmean_average_distance\tstd_average_distance\t\
         mean_total_distance\tmax_search_invocations\tmatrix_wall_time_s\t\
         mean_wall_time_s\tstd_wall_time_s\n",
    );

    for &size in &args.sizes {
        let subset = db.prefix(size)?;
        let (matrix, matrix_elapsed) = if needs_matrix {
            let started = Instant::now();
            let m = pairwise_distance_matrix(&subset, &params)?;
            (Some(m), started.elapsed())
        } else {
            (None, Duration::ZERO)
        };

        for &method in &args.methods {
            let mut reports = Vec::new();
            for seed in args.seed..args.seed + args.repeat {
                let (_, report) =
                    execute_run(&subset, &params, method, seed, matrix.as_ref(), None)?;
                reports.push(report);
            }
            let agg = aggregate(&reports)?;
            let max_searches =
                reports.iter().map(|r| r.search_invocations).max().unwrap_or(0);
            let matrix_secs = if method == Method::IterMegaBlast {
                Duration::ZERO
            } else {
                matrix_elapsed
            };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{:.4}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\n",
                size,
                method,
                agg.runs,
                agg.mean_average_distance,
                agg.std_average_distance,
                agg.mean_total_distance,
                max_searches,
                matrix_secs.as_secs_f64(),
                agg.mean_wall_time.as_secs_f64(),
                agg.std_wall_time_s,
            ));
        }
    }
    emit(args.output.as_deref(), &out)
}

fn run_synth(args: SynthArgs) -> anyhow::Result<()> {
    let db = synthesize_dataset(
        args.seed,
        args.families,
        args.copies,
        args.length,
        args.substitution_rate,
        args.indel_rate,
    )?;
    emit(args.output.as_deref(), &write_fasta(&db, args.line_width)?)
}

fn run_tables(args: TablesArgs) -> anyhow::Result<()> {
    let mut out = String::new();
    out.push_str("# table=generalize\n");
    out.push_str(&generalize_table_tsv());
    out.push_str("\n# table=distance\n");
    out.push_str(&distance_table_tsv());
    emit(args.output.as_deref(), &out)
}
