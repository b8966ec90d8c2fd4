//! The IUPAC generalization lattice: codes, levels, distances, obfuscation.
//!
//! The four bases sit at level 1. The six two-base ambiguity codes sit at
//! level 2. The four three-base codes and the gap sit at level 3, and `N`
//! (anything) sits at level 4. Generalizing two codes replaces them by their
//! lowest common ancestor: the unique code covering the union of their base
//! sets, or `N` whenever a gap meets a non-gap. The level distance
//! `2*level(lca) - level(a) - level(b)` quantifies how much specificity the
//! replacement destroys; summed over an aligned pair it is the information
//! loss of publishing the generalized sequence instead of the originals.

use std::fmt;
use std::str::FromStr;

use once_cell::sync::Lazy;

use crate::{Error, Result};

/// One symbol of the 16-letter generalization alphabet.
///
/// Discriminant order is the canonical table order used by the TSV dumps:
/// bases, two-base codes, three-base codes, gap, `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Code {
    A = 0,
    C,
    G,
    T,
    R,
    Y,
    S,
    W,
    K,
    M,
    B,
    D,
    H,
    V,
    Gap,
    N,
}

/// Bitmask positions for the four bases inside a coverage set.
const MASK_A: u8 = 0b0001;
const MASK_C: u8 = 0b0010;
const MASK_G: u8 = 0b0100;
const MASK_T: u8 = 0b1000;

impl Code {
    /// All 16 codes in canonical table order.
    pub const ALL: [Code; 16] = [
        Code::A,
        Code::C,
        Code::G,
        Code::T,
        Code::R,
        Code::Y,
        Code::S,
        Code::W,
        Code::K,
        Code::M,
        Code::B,
        Code::D,
        Code::H,
        Code::V,
        Code::Gap,
        Code::N,
    ];

    /// Position of this code in [`Code::ALL`].
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// The set of bases this code covers, as a 4-bit mask (A=1, C=2, G=4, T=8).
    ///
    /// The gap covers nothing.
    #[inline]
    pub fn base_mask(self) -> u8 {
        match self {
            Code::A => MASK_A,
            Code::C => MASK_C,
            Code::G => MASK_G,
            Code::T => MASK_T,
            Code::R => MASK_A | MASK_G,
            Code::Y => MASK_C | MASK_T,
            Code::S => MASK_C | MASK_G,
            Code::W => MASK_A | MASK_T,
            Code::K => MASK_G | MASK_T,
            Code::M => MASK_A | MASK_C,
            Code::B => MASK_C | MASK_G | MASK_T,
            Code::D => MASK_A | MASK_G | MASK_T,
            Code::H => MASK_A | MASK_C | MASK_T,
            Code::V => MASK_A | MASK_C | MASK_G,
            Code::Gap => 0,
            Code::N => MASK_A | MASK_C | MASK_G | MASK_T,
        }
    }

    /// The hierarchy level, 1..=4. Bases are level 1; the gap is level 3.
    ///
    /// For gap-free codes the level equals the size of the coverage set.
    #[inline]
    pub fn level(self) -> u32 {
        match self {
            Code::Gap => 3,
            c => c.base_mask().count_ones(),
        }
    }

    /// The unique gap-free code covering exactly `mask`, or `Gap` for the
    /// empty mask.
    pub fn from_base_mask(mask: u8) -> Code {
        const BY_MASK: [Code; 16] = [
            Code::Gap, // 0b0000
            Code::A,   // 0b0001
            Code::C,   // 0b0010
            Code::M,   // 0b0011
            Code::G,   // 0b0100
            Code::R,   // 0b0101
            Code::S,   // 0b0110
            Code::V,   // 0b0111
            Code::T,   // 0b1000
            Code::W,   // 0b1001
            Code::Y,   // 0b1010
            Code::H,   // 0b1011
            Code::K,   // 0b1100
            Code::D,   // 0b1101
            Code::B,   // 0b1110
            Code::N,   // 0b1111
        ];
        BY_MASK[(mask & 0x0f) as usize]
    }

    /// The single-character symbol, `'-'` for the gap.
    #[inline]
    pub fn symbol(self) -> char {
        match self {
            Code::A => 'A',
            Code::C => 'C',
            Code::G => 'G',
            Code::T => 'T',
            Code::R => 'R',
            Code::Y => 'Y',
            Code::S => 'S',
            Code::W => 'W',
            Code::K => 'K',
            Code::M => 'M',
            Code::B => 'B',
            Code::D => 'D',
            Code::H => 'H',
            Code::V => 'V',
            Code::Gap => '-',
            Code::N => 'N',
        }
    }

    /// Parse a symbol; lowercase is accepted. `None` for anything outside the
    /// alphabet (`U` is rejected, not aliased to `T`).
    pub fn from_symbol(ch: char) -> Option<Code> {
        match ch.to_ascii_uppercase() {
            'A' => Some(Code::A),
            'C' => Some(Code::C),
            'G' => Some(Code::G),
            'T' => Some(Code::T),
            'R' => Some(Code::R),
            'Y' => Some(Code::Y),
            'S' => Some(Code::S),
            'W' => Some(Code::W),
            'K' => Some(Code::K),
            'M' => Some(Code::M),
            'B' => Some(Code::B),
            'D' => Some(Code::D),
            'H' => Some(Code::H),
            'V' => Some(Code::V),
            '-' => Some(Code::Gap),
            'N' => Some(Code::N),
            _ => None,
        }
    }

    /// True for `A`, `C`, `G`, `T`.
    #[inline]
    pub fn is_base(self) -> bool {
        self.level() == 1
    }

    /// True for the gap symbol.
    #[inline]
    pub fn is_gap(self) -> bool {
        self == Code::Gap
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

fn compute_generalize(a: Code, b: Code) -> Code {
    if a == b {
        a
    } else if a.is_gap() || b.is_gap() {
        // A gap has no coverage to merge with; only N hides the difference
        // between "some base" and "nothing".
        Code::N
    } else {
        Code::from_base_mask(a.base_mask() | b.base_mask())
    }
}

fn compute_distance(a: Code, b: Code) -> u32 {
    2 * compute_generalize(a, b).level() - a.level() - b.level()
}

static GENERALIZE_TABLE: Lazy<[[Code; 16]; 16]> = Lazy::new(|| {
    let mut table = [[Code::A; 16]; 16];
    for a in Code::ALL {
        for b in Code::ALL {
            table[a.index()][b.index()] = compute_generalize(a, b);
        }
    }
    table
});

static DISTANCE_TABLE: Lazy<[[u32; 16]; 16]> = Lazy::new(|| {
    let mut table = [[0u32; 16]; 16];
    for a in Code::ALL {
        for b in Code::ALL {
            table[a.index()][b.index()] = compute_distance(a, b);
        }
    }
    table
});

/// The hierarchy level of a code (1..=4).
#[inline]
pub fn level(c: Code) -> u32 {
    c.level()
}

/// The lowest common ancestor of two codes in the generalization lattice.
#[inline]
pub fn generalize(a: Code, b: Code) -> Code {
    GENERALIZE_TABLE[a.index()][b.index()]
}

/// The level distance `2*level(generalize(a, b)) - level(a) - level(b)`.
///
/// Always nonnegative; zero exactly when `a == b`.
#[inline]
pub fn nucleotide_distance(a: Code, b: Code) -> u32 {
    DISTANCE_TABLE[a.index()][b.index()]
}

/// The full 16x16 generalization table, in [`Code::ALL`] order.
pub fn generalize_table() -> &'static [[Code; 16]; 16] {
    &GENERALIZE_TABLE
}

/// The full 16x16 distance table, in [`Code::ALL`] order.
pub fn distance_table() -> &'static [[u32; 16]; 16] {
    &DISTANCE_TABLE
}

/// The generalization table as TSV (header row and column of symbols).
pub fn generalize_table_tsv() -> String {
    table_tsv(|a, b| generalize(a, b).symbol().to_string())
}

/// The distance table as TSV (header row and column of symbols).
pub fn distance_table_tsv() -> String {
    table_tsv(|a, b| nucleotide_distance(a, b).to_string())
}

fn table_tsv(cell: impl Fn(Code, Code) -> String) -> String {
    let mut out = String::new();
    for b in Code::ALL {
        out.push('\t');
        out.push(b.symbol());
    }
    out.push('\n');
    for a in Code::ALL {
        out.push(a.symbol());
        for b in Code::ALL {
            out.push('\t');
            out.push_str(&cell(a, b));
        }
        out.push('\n');
    }
    out
}

/// A nonempty sequence of codes, possibly containing gaps and ambiguity
/// codes. The common coordinate frame for obfuscation and loss measurement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlignedSequence {
    codes: Vec<Code>,
}

impl AlignedSequence {
    pub fn new(codes: Vec<Code>) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::EmptyAligned);
        }
        Ok(AlignedSequence { codes })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    #[inline]
    pub fn codes(&self) -> &[Code] {
        &self.codes
    }

    pub fn iter(&self) -> impl Iterator<Item = Code> + '_ {
        self.codes.iter().copied()
    }

    pub fn contains_gap(&self) -> bool {
        self.codes.contains(&Code::Gap)
    }

    /// The sequence with all gap columns removed.
    pub fn without_gaps(&self) -> Vec<Code> {
        self.codes.iter().copied().filter(|c| !c.is_gap()).collect()
    }
}

impl FromStr for AlignedSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let codes = s
            .chars()
            .map(|ch| Code::from_symbol(ch).ok_or(Error::InvalidSymbol(ch)))
            .collect::<Result<Vec<_>>>()?;
        AlignedSequence::new(codes)
    }
}

impl fmt::Display for AlignedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.codes {
            write!(f, "{}", c.symbol())?;
        }
        Ok(())
    }
}

/// Sum of nucleotide distances over all positions of an aligned pair.
///
/// # Errors
///
/// Fails when the sequences are not the same length, which means they were
/// never aligned against each other.
pub fn sequence_distance(x: &AlignedSequence, y: &AlignedSequence) -> Result<u64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.iter()
        .zip(y.iter())
        .map(|(a, b)| nucleotide_distance(a, b) as u64)
        .sum())
}

/// Positionwise generalization of an aligned pair.
///
/// # Errors
///
/// Fails when the sequences are not the same length.
pub fn obfuscate_aligned(x: &AlignedSequence, y: &AlignedSequence) -> Result<AlignedSequence> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let codes = x
        .iter()
        .zip(y.iter())
        .map(|(a, b)| generalize(a, b))
        .collect();
    AlignedSequence::new(codes)
}
