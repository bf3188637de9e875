//! Convex index sets inside the triangle I = {(i,j) : 1 <= i <= j <= n+1},
//! the level filtration T(Z,t) attached to a set Z of marked positions, and
//! the index sets a word over a finite alphabet carves out.
//!
//! Convexity means: the diagonal is contained, and membership of (i,j)
//! forces membership of every (i',j') with i <= i' and j' <= j. Such sets
//! are exactly the supports on which partial unipotent matrices multiply.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Hard size cap; the bitmask representation assumes it.
pub const MAX_N: usize = 16;

/// A pair (i, j) with 1 <= i <= j <= n+1 (1-based, j = n+1 allowed).
pub type IndexPair = (u8, u8);

#[inline]
fn check_n(n: u8) -> Result<()> {
    if n == 0 || n as usize > MAX_N {
        return Err(Error::SizeCap(n as u32));
    }
    Ok(())
}

/// Row-major position of (i,j) among all pairs of the triangle for size n.
/// Row-major coincides with lexicographic order on (i, j).
#[inline]
pub(crate) fn pair_index(n: u8, i: u8, j: u8) -> usize {
    let (n, i, j) = (n as usize, i as usize, j as usize);
    // row r (1-based) holds n + 2 - r entries
    (i - 1) * (n + 2) - (i - 1) * i / 2 + (j - i)
}

#[inline]
fn triangle_size(n: u8) -> usize {
    let n = n as usize;
    (n + 1) * (n + 2) / 2
}

/// A set Z of marked positions inside {1, ..., n}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct LevelSet {
    n: u8,
    bits: u32,
}

impl LevelSet {
    pub fn new(n: u8, elems: &[u8]) -> Result<Self> {
        check_n(n)?;
        let mut bits = 0u32;
        for &k in elems {
            if k == 0 || k > n {
                return Err(Error::LevelOutOfRange { n, k });
            }
            bits |= 1 << (k - 1);
        }
        Ok(LevelSet { n, bits })
    }

    pub fn empty(n: u8) -> Result<Self> {
        Self::new(n, &[])
    }

    pub fn full(n: u8) -> Result<Self> {
        check_n(n)?;
        Ok(LevelSet { n, bits: (1u32 << n) - 1 })
    }

    /// All 2^n subsets for a fixed n, in mask order. Desk scale only.
    pub fn all(n: u8) -> Result<Vec<LevelSet>> {
        check_n(n)?;
        Ok((0..1u32 << n).map(|bits| LevelSet { n, bits }).collect())
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn len(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, k: u8) -> bool {
        k >= 1 && k <= self.n && self.bits >> (k - 1) & 1 == 1
    }

    pub fn elems(&self) -> Vec<u8> {
        (1..=self.n).filter(|&k| self.contains(k)).collect()
    }

    pub fn is_subset(&self, other: &LevelSet) -> bool {
        self.n == other.n && self.bits & !other.bits == 0
    }

    /// |[[i, j-1]] ∩ Z|, the number of marked positions k with i <= k < j.
    #[inline]
    pub fn count_interval(&self, i: u8, j: u8) -> u32 {
        if j <= i {
            return 0;
        }
        let lo = (i - 1) as u32;
        let hi = (j - 1) as u32; // exclusive
        let mask = ((1u64 << hi) - (1u64 << lo)) as u32;
        (self.bits & mask).count_ones()
    }
}

/// A convex subset of the triangle, stored as a membership bitmask.
/// Every value of this type satisfies both convexity conditions; the
/// constructors enforce it.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConvexSet {
    n: u8,
    bits: [u64; 3],
}

impl ConvexSet {
    /// Validates membership data and builds the set. The pair list must
    /// contain the whole diagonal and be downward closed.
    pub fn new(n: u8, pairs: &[IndexPair]) -> Result<Self> {
        check_n(n)?;
        let mut bits = [0u64; 3];
        for &(i, j) in pairs {
            if i < 1 || i > j || j > n + 1 {
                return Err(Error::PairOutOfRange { n, i, j });
            }
            let idx = pair_index(n, i, j);
            bits[idx / 64] |= 1 << (idx % 64);
        }
        let set = ConvexSet { n, bits };
        set.validate()?;
        Ok(set)
    }

    /// Convenience: the diagonal is implied, only strict pairs are given.
    pub fn from_strict(n: u8, strict: &[IndexPair]) -> Result<Self> {
        let mut pairs: Vec<IndexPair> = (1..=n + 1).map(|i| (i, i)).collect();
        pairs.extend_from_slice(strict);
        Self::new(n, &pairs)
    }

    /// Both convexity conditions as a predicate on raw pair lists.
    pub fn is_convex(n: u8, pairs: &[IndexPair]) -> bool {
        Self::new(n, pairs).is_ok()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 1..=n + 1 {
            if !self.contains(i, i) {
                return Err(Error::MissingDiagonal);
            }
        }
        // One-step shrinks suffice: (i,j) in T forces (i+1,j) and (i,j-1)
        // in T, and iterating reaches every (i',j') with i <= i', j' <= j.
        for i in 1..=n {
            for j in i + 1..=n + 1 {
                if self.contains(i, j) && !(self.contains(i + 1, j) && self.contains(i, j - 1)) {
                    return Err(Error::NotConvex { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn full(n: u8) -> Result<Self> {
        check_n(n)?;
        let mut bits = [0u64; 3];
        for idx in 0..triangle_size(n) {
            bits[idx / 64] |= 1 << (idx % 64);
        }
        Ok(ConvexSet { n, bits })
    }

    pub fn diagonal(n: u8) -> Result<Self> {
        check_n(n)?;
        let mut bits = [0u64; 3];
        for i in 1..=n + 1 {
            let idx = pair_index(n, i, i);
            bits[idx / 64] |= 1 << (idx % 64);
        }
        Ok(ConvexSet { n, bits })
    }

    /// T(Z, t): pairs whose interval [[i, j-1]] meets Z fewer than t times.
    /// t >= 1; T(Z, t) = I whenever t > |Z|.
    pub fn t_set(z: &LevelSet, t: u32) -> Result<Self> {
        if t == 0 {
            return Err(Error::BadFiltrationLevel);
        }
        let n = z.n;
        let mut bits = [0u64; 3];
        for i in 1..=n + 1 {
            for j in i..=n + 1 {
                if z.count_interval(i, j) < t {
                    let idx = pair_index(n, i, j);
                    bits[idx / 64] |= 1 << (idx % 64);
                }
            }
        }
        let set = ConvexSet { n, bits };
        debug_assert!(set.validate().is_ok());
        Ok(set)
    }

    /// The full chain T(Z,1) ⊂ T(Z,2) ⊂ ... ⊂ T(Z,|Z|+1) = I. Strictly
    /// increasing until it saturates.
    pub fn filtration_chain(z: &LevelSet) -> Result<Vec<Self>> {
        (1..=z.len() + 1).map(|t| Self::t_set(z, t)).collect()
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    #[inline]
    pub fn contains(&self, i: u8, j: u8) -> bool {
        if i < 1 || i > j || j > self.n + 1 {
            return false;
        }
        let idx = pair_index(self.n, i, j);
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// Member pairs in lexicographic order, diagonal included.
    pub fn pairs(&self) -> Vec<IndexPair> {
        let mut out = Vec::new();
        for i in 1..=self.n + 1 {
            for j in i..=self.n + 1 {
                if self.contains(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Member pairs with i < j, lexicographic.
    pub fn strict_pairs(&self) -> Vec<IndexPair> {
        self.pairs().into_iter().filter(|&(i, j)| i < j).collect()
    }

    pub fn strict_len(&self) -> usize {
        let total: u32 = self.bits.iter().map(|w| w.count_ones()).sum();
        total as usize - (self.n as usize + 1)
    }

    pub fn union(&self, other: &ConvexSet) -> Result<ConvexSet> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch);
        }
        let bits = [
            self.bits[0] | other.bits[0],
            self.bits[1] | other.bits[1],
            self.bits[2] | other.bits[2],
        ];
        let set = ConvexSet { n: self.n, bits };
        debug_assert!(set.validate().is_ok());
        Ok(set)
    }

    pub fn intersection(&self, other: &ConvexSet) -> Result<ConvexSet> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch);
        }
        let bits = [
            self.bits[0] & other.bits[0],
            self.bits[1] & other.bits[1],
            self.bits[2] & other.bits[2],
        ];
        let set = ConvexSet { n: self.n, bits };
        debug_assert!(set.validate().is_ok());
        Ok(set)
    }

    pub fn is_subset(&self, other: &ConvexSet) -> bool {
        self.n == other.n && self.bits.iter().zip(other.bits.iter()).all(|(a, b)| a & !b == 0)
    }
}

impl core::fmt::Debug for ConvexSet {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "ConvexSet(n={}, strict={:?})", self.n, self.strict_pairs())
    }
}

/// An alphabet letter: a short identifier like "x" or "y1".
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter(alloc::boxed::Box<str>);

impl Letter {
    pub fn new(s: &str) -> Result<Self> {
        let ok = !s.is_empty()
            && s.chars().next().unwrap().is_ascii_alphabetic()
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(Error::BadLetter(s.to_string()));
        }
        Ok(Letter(s.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl core::fmt::Display for Letter {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.0)
    }
}

/// A word w = (a_1, ..., a_n) over an alphabet; positions are 1-based.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WordSpec {
    letters: Vec<Letter>,
}

/// The three sets a word and a letter determine: marked positions
/// Z_{w,x} = {i : a_i != x}, the run support T_{w,x} = T(Z,1), and the
/// one-exception support T̃_{w,x} = T(Z,2).
#[derive(Clone, Debug)]
pub struct WordSets {
    pub z: LevelSet,
    pub runs: ConvexSet,
    pub one_exception: ConvexSet,
}

impl WordSpec {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        check_n(letters.len() as u8)?;
        if letters.len() > MAX_N {
            return Err(Error::SizeCap(letters.len() as u32));
        }
        Ok(WordSpec { letters })
    }

    /// "yxxy" (single-character letters) or "y x1 x1 y" (whitespace-
    /// separated letters).
    pub fn parse(s: &str) -> Result<Self> {
        let letters: Vec<Letter> = if s.contains(char::is_whitespace) {
            s.split_whitespace().map(Letter::new).collect::<Result<_>>()?
        } else {
            s.chars().map(|c| Letter::new(&c.to_string())).collect::<Result<_>>()?
        };
        if letters.is_empty() {
            return Err(Error::BadLetter(s.to_string()));
        }
        Self::new(letters)
    }

    /// Word length n; matrices attached to the word have size n+1.
    pub fn len(&self) -> u8 {
        self.letters.len() as u8
    }

    pub fn is_empty(&self) -> bool {
        false // constructor demands n >= 1
    }

    /// Letter at 1-based position.
    pub fn letter(&self, pos: u8) -> &Letter {
        &self.letters[pos as usize - 1]
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Distinct letters, sorted.
    pub fn alphabet(&self) -> Vec<Letter> {
        let mut out: Vec<Letter> = self.letters.to_vec();
        out.sort();
        out.dedup();
        out
    }

    pub fn has_letter(&self, x: &Letter) -> bool {
        self.letters.contains(x)
    }

    /// Z_{w,x}: positions holding a letter other than x.
    pub fn z_against(&self, x: &Letter) -> LevelSet {
        let n = self.len();
        let elems: Vec<u8> = (1..=n).filter(|&i| self.letter(i) != x).collect();
        LevelSet::new(n, &elems).expect("positions are in range by construction")
    }

    /// (Z_{w,x}, T_{w,x}, T̃_{w,x}) in one shot.
    pub fn word_sets(&self, x: &Letter) -> Result<WordSets> {
        if !self.has_letter(x) {
            return Err(Error::UnknownLetter(x.as_str().to_string()));
        }
        let z = self.z_against(x);
        Ok(WordSets { z, runs: ConvexSet::t_set(&z, 1)?, one_exception: ConvexSet::t_set(&z, 2)? })
    }

    /// T_w: the union of T_{w,x} over the alphabet. Convex, and pairwise
    /// intersections of the constituents meet only in the diagonal.
    pub fn t_word(&self) -> Result<ConvexSet> {
        let mut acc = ConvexSet::diagonal(self.len())?;
        for x in self.alphabet() {
            acc = acc.union(&ConvexSet::t_set(&self.z_against(&x), 1)?)?;
        }
        Ok(acc)
    }
}
