//! Exact arithmetic for partial unipotent matrix groups over Z/m and the
//! combinatorics that drives them: convex index sets, word-derived
//! filtrations, the associated graded Lie algebra, twisted 1- and 2-cocycles
//! of finite groups with their lifting obstructions, and Kummer-theoretic
//! instances over finite fields.
//!
//! Everything here is integer arithmetic on small objects (matrix size is
//! capped at 17×17, group order at 512, fields at 2^20 elements). There is
//! no floating point and no IO; the companion CLI crate carries the file
//! formats.

#![cfg_attr(not(test), no_std)]
// The numeric kernels walk several parallel arrays by position; indexed
// loops read better there than zipped iterator chains.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod cohomology;
pub mod freewords;
pub mod galois;
pub mod gradedlie;
pub mod indexsets;
pub mod unipotent;
pub mod verify;

mod arith;
mod snf;

pub use arith::Modulus;

use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong across the crate. Mathematical negatives
/// (an obstruction that does not vanish, a cocycle that fails its law) are
/// *not* errors; they are ordinary return values. Errors are violated
/// preconditions and exceeded caps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Error {
    /// Matrix size n outside 1..=16.
    SizeCap(u32),
    /// Modulus was 0 or 1, or above the arithmetic-safety cap 2^31.
    BadModulus(u64),
    /// An index pair violates 1 <= i <= j <= n+1.
    PairOutOfRange {
        n: u8,
        i: u8,
        j: u8,
    },
    /// A level-set element violates 1 <= k <= n.
    LevelOutOfRange {
        n: u8,
        k: u8,
    },
    /// Candidate index set is missing part of the diagonal.
    MissingDiagonal,
    /// Candidate index set fails downward closure; the witness pair is the
    /// member whose one-step shrink is absent.
    NotConvex {
        i: u8,
        j: u8,
    },
    /// Filtration level t must be >= 1.
    BadFiltrationLevel,
    NotInFiltration {
        t: u32,
    },
    DegreeMismatch {
        left: u32,
        right: u32,
    },
    /// Operands live on different supports, moduli or sizes.
    ShapeMismatch,
    /// The first set is not contained in the second where containment is
    /// required.
    NotASubset,
    /// An entry was supplied for a pair outside the support.
    OutsideSupport {
        i: u8,
        j: u8,
    },
    /// (j-i)! is not invertible modulo m but the operation needs it.
    FactorialNotInvertible {
        depth: u8,
        m: u64,
    },
    /// The claimed integer is not divisible by n! as required.
    NotDivisibleByFactorial {
        n: u8,
    },
    /// Twist value is not a unit modulo m.
    NotAUnit {
        value: u64,
        m: u64,
    },
    /// Empty or malformed letter / word text.
    BadLetter(String),
    /// Word length exceeds the syllable cap (10^4).
    WordTooLong(usize),
    /// A letter does not belong to the word's alphabet.
    UnknownLetter(String),
    /// Exponent arithmetic left i64 range.
    ExponentOverflow,
    /// The conjugating data f(g) must lie in the commutator subgroup.
    ConjugatorNotCommutator,
    /// Malformed multiplication table (not a group, wrong size, bad label).
    BadGroupTable(String),
    /// Group order exceeds the table cap.
    GroupCap {
        order: usize,
        cap: usize,
    },
    /// A map that was required to satisfy the 1-cocycle law does not.
    NotACocycle,
    /// A map that was required to satisfy the twisted 2-cocycle identity
    /// does not.
    NotA2Cocycle,
    /// Character values are not multiplicative units.
    BadCharacter,
    /// Exhaustive search space exceeds the desk-scale cap.
    SearchCap {
        size: u128,
        cap: u128,
    },
    /// Kernel slice of a window is not central in the big support's group,
    /// so the obstruction calculus does not apply.
    WindowNotCentral {
        i: u8,
        j: u8,
    },
    /// chain_lift: positions sharing a run outside Z must carry equal
    /// superdiagonal cocycles.
    RunValueMismatch {
        position: u8,
    },
    /// Not a prime where one is required.
    NotPrime(u64),
    /// Field size p^k exceeds 2^20.
    FieldCap {
        p: u64,
        k: u32,
    },
    /// No level k <= 32 works.
    LevelCap,
    /// z (or its companion) must avoid {0, 1} inside the prime field.
    BadKummerBase {
        z: u64,
    },
    /// gcd(m, p) must be 1.
    ModulusMeetsCharacteristic {
        m: u64,
        p: u64,
    },
    /// dlog modulus cap (m <= 2^10) exceeded.
    DlogCap {
        m: u64,
    },
    /// The element is not an m-th power at the given level.
    NoRoot {
        level: u32,
    },
    /// gcd(m, n!) = 1 required for this construction.
    FactorialModulusClash {
        n: u8,
        m: u64,
    },
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        use Error::*;
        match self {
            SizeCap(n) => write!(f, "size n = {n} outside 1..=16"),
            BadModulus(m) => write!(f, "modulus {m} rejected (need 2 <= m <= 2^31)"),
            PairOutOfRange { n, i, j } => {
                write!(f, "pair ({i},{j}) outside the triangle for n = {n}")
            }
            LevelOutOfRange { n, k } => write!(f, "level {k} outside 1..={n}"),
            MissingDiagonal => write!(f, "index set does not contain the diagonal"),
            NotConvex { i, j } => {
                write!(f, "index set not convex: ({i},{j}) lacks a one-step shrink")
            }
            BadFiltrationLevel => write!(f, "filtration level must be >= 1"),
            NotInFiltration { t } => {
                write!(f, "matrix is outside the level-{t} filtration subgroup")
            }
            DegreeMismatch { left, right } => {
                write!(f, "graded degrees {left} and {right} do not match")
            }
            ShapeMismatch => write!(f, "operands have different support, modulus or size"),
            NotASubset => write!(f, "required containment of index sets fails"),
            OutsideSupport { i, j } => write!(f, "entry at ({i},{j}) outside the support"),
            FactorialNotInvertible { depth, m } => {
                write!(f, "{depth}! is not invertible mod {m}")
            }
            NotDivisibleByFactorial { n } => write!(f, "integer argument not divisible by {n}!"),
            NotAUnit { value, m } => write!(f, "{value} is not a unit mod {m}"),
            BadLetter(s) => write!(f, "bad letter {s:?}"),
            WordTooLong(l) => write!(f, "word has {l} syllables (cap 10000)"),
            UnknownLetter(s) => write!(f, "letter {s:?} not in the word's alphabet"),
            ExponentOverflow => write!(f, "exponent arithmetic overflowed i64"),
            ConjugatorNotCommutator => {
                write!(f, "conjugating element is not in the commutator subgroup")
            }
            BadGroupTable(s) => write!(f, "bad group table: {s}"),
            GroupCap { order, cap } => write!(f, "group order {order} exceeds cap {cap}"),
            NotACocycle => write!(f, "map fails the twisted 1-cocycle law"),
            NotA2Cocycle => write!(f, "map fails the twisted 2-cocycle identity"),
            BadCharacter => write!(f, "character values must be multiplicative units"),
            SearchCap { size, cap } => write!(f, "search space {size} exceeds cap {cap}"),
            WindowNotCentral { i, j } => {
                write!(f, "window slice not central: slot ({i},{j}) mixes under the group")
            }
            RunValueMismatch { position } => {
                write!(f, "position {position} disagrees with its run-mates outside Z")
            }
            NotPrime(p) => write!(f, "{p} is not prime"),
            FieldCap { p, k } => write!(f, "field size {p}^{k} exceeds 2^20"),
            LevelCap => write!(f, "no usable level k <= 32"),
            BadKummerBase { z } => write!(f, "base {z} must avoid 0 and 1 in the prime field"),
            ModulusMeetsCharacteristic { m, p } => {
                write!(f, "gcd({m}, {p}) != 1: Kummer theory unavailable")
            }
            DlogCap { m } => write!(f, "discrete-log modulus {m} exceeds 2^10"),
            NoRoot { level } => write!(f, "no m-th root exists at level {level}"),
            FactorialModulusClash { n, m } => write!(f, "gcd({m}, {n}!) != 1 required"),
        }
    }
}

impl core::error::Error for Error {}
