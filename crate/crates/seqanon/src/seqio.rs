//! FASTA ingestion and emission, dataset validation, and synthetic corpora.
//!
//! Input records are restricted to the 15 gap-free IUPAC letters; gaps are
//! alignment artifacts, not data, and are rejected everywhere except the
//! lenient parser used for pre-aligned inputs. Whitespace inside a sequence
//! line is treated as corruption rather than formatting and is reported with
//! its line number.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lattice::{AlignedSequence, Code};
use crate::{Error, Result};

/// One named, gap-free sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRecord {
    id: String,
    description: String,
    residues: Vec<Code>,
}

impl SequenceRecord {
    /// Build a record, enforcing the gap-free invariant.
    pub fn new(
        id: impl Into<String>,
        description: impl Into<String>,
        residues: Vec<Code>,
    ) -> Result<Self> {
        let id = id.into();
        let description = description.into();
        if id.is_empty() {
            return Err(Error::InvalidParameter("record id must be nonempty".into()));
        }
        if id.chars().any(char::is_whitespace) || id.starts_with('>') {
            return Err(Error::InvalidParameter(format!(
                "record id {id:?} contains FASTA metacharacters"
            )));
        }
        if description.contains('\n') || description.contains('\r') {
            return Err(Error::InvalidParameter(format!(
                "description of {id:?} contains a line break"
            )));
        }
        if residues.is_empty() {
            return Err(Error::EmptySequence { id });
        }
        if residues.iter().any(|c| c.is_gap()) {
            return Err(Error::InvalidSymbol('-'));
        }
        Ok(SequenceRecord {
            id,
            description,
            residues,
        })
    }

    /// Parse the sequence text instead of taking codes directly.
    pub fn from_text(
        id: impl Into<String>,
        description: impl Into<String>,
        sequence: &str,
    ) -> Result<Self> {
        let residues = sequence
            .chars()
            .map(|ch| Code::from_symbol(ch).ok_or(Error::InvalidSymbol(ch)))
            .collect::<Result<Vec<_>>>()?;
        SequenceRecord::new(id, description, residues)
    }

    #[inline]
    pub fn id(&self) -> &str {
        &self.id
    }

    #[inline]
    pub fn description(&self) -> &str {
        &self.description
    }

    #[inline]
    pub fn residues(&self) -> &[Code] {
        &self.residues
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.residues.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    /// The residues as an (gap-free) aligned sequence, ready for obfuscation.
    pub fn to_aligned(&self) -> AlignedSequence {
        AlignedSequence::new(self.residues.clone()).expect("record residues are nonempty")
    }

    /// The sequence as its symbol string.
    pub fn sequence_string(&self) -> String {
        self.residues.iter().map(|c| c.symbol()).collect()
    }
}

/// An ordered collection of records with pairwise-distinct ids.
///
/// May be empty so that emptiness errors surface at the operations that care
/// (writing, indexing, anonymizing), each with its own message.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    records: Vec<SequenceRecord>,
}

impl Dataset {
    pub fn new(records: Vec<SequenceRecord>) -> Result<Self> {
        let mut seen = HashSet::new();
        for rec in &records {
            if !seen.insert(rec.id()) {
                return Err(Error::DuplicateId(rec.id().to_string()));
            }
        }
        Ok(Dataset { records })
    }

    #[inline]
    pub fn records(&self) -> &[SequenceRecord] {
        &self.records
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.records.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    #[inline]
    pub fn get(&self, index: usize) -> &SequenceRecord {
        &self.records[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &SequenceRecord> {
        self.records.iter()
    }

    /// The dataset truncated to its first `n` records.
    pub fn prefix(&self, n: usize) -> Result<Dataset> {
        if n > self.len() {
            return Err(Error::SizeExceedsDataset { size: n, n: self.len() });
        }
        Ok(Dataset {
            records: self.records[..n].to_vec(),
        })
    }
}

/// A record from the lenient parser: may contain gaps and is meant for
/// pre-aligned inputs to the distance tooling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedRecord {
    pub id: String,
    pub description: String,
    pub sequence: AlignedSequence,
}

struct RawEntry {
    id: String,
    description: String,
    codes: Vec<Code>,
}

fn parse_entries(text: &str, allow_gaps: bool) -> Result<Vec<RawEntry>> {
    let mut entries: Vec<RawEntry> = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            let header = header.trim();
            let (id, description) = match header.split_once(char::is_whitespace) {
                Some((id, rest)) => (id.to_string(), rest.trim().to_string()),
                None => (header.to_string(), String::new()),
            };
            if id.is_empty() {
                return Err(Error::MissingId { line: lineno });
            }
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            entries.push(RawEntry {
                id,
                description,
                codes: Vec::new(),
            });
        } else {
            let entry = entries
                .last_mut()
                .ok_or(Error::SequenceBeforeHeader { line: lineno })?;
            for ch in line.chars() {
                let code = Code::from_symbol(ch)
                    .filter(|c| allow_gaps || !c.is_gap())
                    .ok_or(Error::InvalidCharacter { line: lineno, ch })?;
                entry.codes.push(code);
            }
        }
    }
    if entries.is_empty() {
        return Err(Error::NoRecords);
    }
    for entry in &entries {
        if entry.codes.is_empty() {
            return Err(Error::EmptySequence {
                id: entry.id.clone(),
            });
        }
    }
    Ok(entries)
}

/// Parse strict FASTA: gap-free 15-letter alphabet, lowercase folded to
/// uppercase, wrapped sequence lines concatenated, blank lines skipped.
pub fn parse_fasta(text: &str) -> Result<Dataset> {
    let records = parse_entries(text, false)?
        .into_iter()
        .map(|e| SequenceRecord::new(e.id, e.description, e.codes))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(records)
}

/// Parse FASTA that may contain gap characters (pre-aligned input).
pub fn parse_fasta_gapped(text: &str) -> Result<Vec<AlignedRecord>> {
    parse_entries(text, true)?
        .into_iter()
        .map(|e| {
            Ok(AlignedRecord {
                id: e.id,
                description: e.description,
                sequence: AlignedSequence::new(e.codes)?,
            })
        })
        .collect()
}

/// Emit FASTA with sequence lines wrapped at `line_width` symbols.
///
/// Round trip: `parse_fasta(&write_fasta(d, w)?)` reproduces `d`.
pub fn write_fasta(dataset: &Dataset, line_width: usize) -> Result<String> {
    if line_width == 0 {
        return Err(Error::InvalidParameter("line width must be positive".into()));
    }
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut out = String::new();
    for rec in dataset.iter() {
        write_fasta_entry(&mut out, rec.id(), rec.description(), &rec.sequence_string(), line_width);
    }
    Ok(out)
}

fn write_fasta_entry(out: &mut String, id: &str, description: &str, sequence: &str, width: usize) {
    out.push('>');
    out.push_str(id);
    if !description.is_empty() {
        out.push(' ');
        out.push_str(description);
    }
    out.push('\n');
    // All symbols are ASCII, so byte chunks are character chunks.
    for chunk in sequence.as_bytes().chunks(width) {
        out.push_str(std::str::from_utf8(chunk).expect("symbols are ASCII"));
        out.push('\n');
    }
}

impl fmt::Display for SequenceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ">{}", self.id)?;
        if !self.description.is_empty() {
            write!(f, " {}", self.description)?;
        }
        writeln!(f)?;
        writeln!(f, "{}", self.sequence_string())
    }
}

const BASES: [Code; 4] = [Code::A, Code::C, Code::G, Code::T];

fn random_base(rng: &mut ChaCha8Rng) -> Code {
    BASES[rng.random_range(0..4)]
}

fn random_other_base(rng: &mut ChaCha8Rng, current: Code) -> Code {
    let others: Vec<Code> = BASES.iter().copied().filter(|&b| b != current).collect();
    others[rng.random_range(0..others.len())]
}

/// Generate a deterministic benchmark corpus: `families` random ancestors of
/// `length` bases, each copied `copies_per_family` times with independent
/// per-position substitutions and single-base indels.
///
/// Record ids are `f<family>c<copy>` so tests can recover family membership.
pub fn synthesize_dataset(
    seed: u64,
    families: usize,
    copies_per_family: usize,
    length: usize,
    substitution_rate: f64,
    indel_rate: f64,
) -> Result<Dataset> {
    if families == 0 || copies_per_family == 0 {
        return Err(Error::InvalidParameter(
            "families and copies_per_family must be positive".into(),
        ));
    }
    if length == 0 {
        return Err(Error::InvalidParameter("length must be positive".into()));
    }
    for (name, rate) in [("substitution_rate", substitution_rate), ("indel_rate", indel_rate)] {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie in [0, 1), got {rate}"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(families * copies_per_family);
    for family in 0..families {
        let ancestor: Vec<Code> = (0..length).map(|_| random_base(&mut rng)).collect();
        for copy in 0..copies_per_family {
            let mut residues = Vec::with_capacity(length);
            for &base in &ancestor {
                if rng.random::<f64>() < indel_rate {
                    if rng.random::<bool>() {
                        continue; // deletion
                    }
                    residues.push(random_base(&mut rng)); // insertion before the kept base
                    residues.push(base);
                } else if rng.random::<f64>() < substitution_rate {
                    residues.push(random_other_base(&mut rng, base));
                } else {
                    residues.push(base);
                }
            }
            if residues.is_empty() {
                // Heavy indel rates can delete everything; records must stay nonempty.
                residues.push(random_base(&mut rng));
            }
            records.push(SequenceRecord::new(
                format!("f{family}c{copy}"),
                String::new(),
                residues,
            )?);
        }
    }
    Dataset::new(records)
}
