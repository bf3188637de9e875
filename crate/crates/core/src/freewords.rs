//! Free words over named letters, the evaluation maps into partial
//! unipotent groups, and the twisted letter action driven by a character
//! and a conjugator word.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::arith::Modulus;
use crate::cohomology::FiniteGroup;
use crate::indexsets::{ConvexSet, IndexPair, Letter, WordSpec};
use crate::unipotent::{xi, xi_multiple, PartialMatrix, Support, TwistValue};
use crate::{Error, Result};

/// Hard cap on reduced syllable count.
const WORD_CAP: usize = 10_000;

/// A freely reduced word: adjacent syllables carry distinct letters and
/// every exponent is nonzero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeWord {
    syll: Vec<(Letter, i64)>,
}

impl FreeWord {
    pub fn empty() -> Self {
        FreeWord { syll: Vec::new() }
    }

    pub fn generator(letter: Letter) -> Self {
        FreeWord { syll: alloc::vec![(letter, 1)] }
    }

    /// Reduce an arbitrary syllable string: merge equal neighbours, drop
    /// zero exponents, and repeat until stable.
    pub fn from_syllables(raw: Vec<(Letter, i64)>) -> Result<Self> {
        let mut stack: Vec<(Letter, i64)> = Vec::with_capacity(raw.len());
        for (letter, e) in raw {
            if e == 0 {
                continue;
            }
            match stack.last_mut() {
                Some((top, te)) if *top == letter => {
                    *te = te.checked_add(e).ok_or(Error::ExponentOverflow)?;
                    if *te == 0 {
                        stack.pop();
                    }
                }
                _ => stack.push((letter, e)),
            }
        }
        if stack.len() > WORD_CAP {
            return Err(Error::WordTooLong(stack.len()));
        }
        Ok(FreeWord { syll: stack })
    }

    /// Text form: whitespace-separated syllables, `x^3 y^-1 x`. An empty
    /// string is the identity.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for token in text.split_whitespace() {
            let (name, e) = match token.split_once('^') {
                Some((name, exp)) => {
                    let e: i64 = exp.parse().map_err(|_| Error::BadLetter(token.to_string()))?;
                    (name, e)
                }
                None => (token, 1),
            };
            raw.push((Letter::new(name)?, e));
        }
        Self::from_syllables(raw)
    }

    pub fn syllables(&self) -> &[(Letter, i64)] {
        &self.syll
    }

    pub fn is_empty(&self) -> bool {
        self.syll.is_empty()
    }

    pub fn len(&self) -> usize {
        self.syll.len()
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let mut raw = self.syll.clone();
        raw.extend_from_slice(&other.syll);
        Self::from_syllables(raw)
    }

    pub fn invert(&self) -> Result<Self> {
        let mut out = Vec::with_capacity(self.syll.len());
        for (letter, e) in self.syll.iter().rev() {
            out.push((letter.clone(), e.checked_neg().ok_or(Error::ExponentOverflow)?));
        }
        Ok(FreeWord { syll: out })
    }

    /// Exponent sum of each letter, exact.
    pub fn exponent_sums(&self) -> BTreeMap<Letter, i128> {
        let mut sums: BTreeMap<Letter, i128> = BTreeMap::new();
        for (letter, e) in &self.syll {
            *sums.entry(letter.clone()).or_insert(0) += i128::from(*e);
        }
        sums
    }

    /// Whether the word lies in the commutator subgroup of the free group,
    /// equivalently every letter has exponent sum zero.
    pub fn in_commutator_subgroup(&self) -> bool {
        self.exponent_sums().values().all(|&s| s == 0)
    }
}

impl core::fmt::Display for FreeWord {
    fn fmt(&self, fm: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (k, (letter, e)) in self.syll.iter().enumerate() {
            if k > 0 {
                fm.write_str(" ")?;
            }
            if *e == 1 {
                write!(fm, "{letter}")?;
            } else {
                write!(fm, "{letter}^{e}")?;
            }
        }
        Ok(())
    }
}

/// The scalar fed to ξ for one letter: either a residue (needs the
/// factorials up to n to be invertible) or an exact integer multiple of n!
/// (works over any modulus).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AlphaValue {
    Residue(u64),
    Multiple(i64),
}

/// Per-letter ξ scalars for evaluating words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlphaAssignment {
    entries: Vec<(Letter, AlphaValue)>,
}

impl AlphaAssignment {
    pub fn new(entries: Vec<(Letter, AlphaValue)>) -> Result<Self> {
        for (k, (letter, _)) in entries.iter().enumerate() {
            if entries[..k].iter().any(|(l, _)| l == letter) {
                return Err(Error::BadLetter(letter.as_str().to_string()));
            }
        }
        Ok(AlphaAssignment { entries })
    }

    pub fn get(&self, letter: &Letter) -> Option<AlphaValue> {
        self.entries.iter().find(|(l, _)| l == letter).map(|(_, v)| *v)
    }
}

/// Evaluate φ_w on a free word: each letter a goes to R_{T_{w,a}}(ξ(α_a)),
/// the whole word to the product of syllable powers. Letters without an α
/// entry are rejected; letters absent from w contribute the identity since
/// their run set is the diagonal.
pub fn phi_eval(
    w: &WordSpec,
    u: &FreeWord,
    alpha: &AlphaAssignment,
    m: Modulus,
) -> Result<PartialMatrix> {
    let sup = Support::full(w.len())?;
    let mut out = PartialMatrix::identity(&sup, m);
    for (letter, e) in u.syllables() {
        let value =
            alpha.get(letter).ok_or_else(|| Error::UnknownLetter(letter.as_str().to_string()))?;
        let runs = ConvexSet::t_set(&w.z_against(letter), 1)?;
        let base = match value {
            AlphaValue::Residue(a) => xi(&sup, m, a)?.retract(&runs)?,
            AlphaValue::Multiple(a) => xi_multiple(&sup, m, a)?.retract(&runs)?,
        };
        out = out.mul(&base.pow(*e))?;
    }
    Ok(out)
}

/// The data steering the letter action: a character χ given by integer
/// representatives and a conjugator word f(g) for each group element. The
/// action fixes the letter x up to the χ-power and bends y by f:
///
///   g · x = x^χ(g),    g · y = f(g)^-1 y^χ(g) f(g).
#[derive(Clone, Debug)]
pub struct ActionData {
    group: Arc<FiniteGroup>,
    m: Modulus,
    chi: Vec<i64>,
    f: Vec<FreeWord>,
}

fn letter_x() -> Letter {
    Letter::new("x").expect("fixed name")
}

fn letter_y() -> Letter {
    Letter::new("y").expect("fixed name")
}

impl ActionData {
    /// Checks: χ lands in units of Z/m and is multiplicative there; every
    /// f(g) is a word over {x, y} lying in the commutator subgroup.
    pub fn new(
        group: Arc<FiniteGroup>,
        m: Modulus,
        chi: Vec<i64>,
        f: Vec<FreeWord>,
    ) -> Result<Self> {
        let order = group.order();
        if chi.len() != order || f.len() != order {
            return Err(Error::ShapeMismatch);
        }
        let residues: Vec<u64> = chi.iter().map(|&c| m.reduce_signed(c)).collect();
        for &r in &residues {
            if !m.is_unit(r) {
                return Err(Error::NotAUnit { value: r, m: m.get() });
            }
        }
        for g in 0..order as u16 {
            for h in 0..order as u16 {
                let gh = group.mul(g, h);
                if residues[gh as usize] != m.mul(residues[g as usize], residues[h as usize]) {
                    return Err(Error::BadCharacter);
                }
            }
        }
        let x = letter_x();
        let y = letter_y();
        for word in &f {
            for (letter, _) in word.syllables() {
                if *letter != x && *letter != y {
                    return Err(Error::UnknownLetter(letter.as_str().to_string()));
                }
            }
            if !word.in_commutator_subgroup() {
                return Err(Error::ConjugatorNotCommutator);
            }
        }
        Ok(ActionData { group, m, chi, f })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn modulus(&self) -> Modulus {
        self.m
    }

    /// The integer representative of χ(g).
    pub fn chi_int(&self, g: u16) -> i64 {
        self.chi[g as usize]
    }

    /// χ(g) reduced into Z/m.
    pub fn chi_residue(&self, g: u16) -> u64 {
        self.m.reduce_signed(self.chi[g as usize])
    }

    pub fn conjugator(&self, g: u16) -> &FreeWord {
        &self.f[g as usize]
    }
}

/// Apply the letter action of g to a word over {x, y}.
pub fn act(g: u16, u: &FreeWord, data: &ActionData) -> Result<FreeWord> {
    let x = letter_x();
    let y = letter_y();
    let k = data.chi_int(g);
    let f = data.conjugator(g);
    let f_inv = f.invert()?;
    let mut raw = Vec::new();
    for (letter, e) in u.syllables() {
        let ke = k.checked_mul(*e).ok_or(Error::ExponentOverflow)?;
        if *letter == x {
            raw.push((x.clone(), ke));
        } else if *letter == y {
            raw.extend_from_slice(f_inv.syllables());
            raw.push((y.clone(), ke));
            raw.extend_from_slice(f.syllables());
        } else {
            return Err(Error::UnknownLetter(letter.as_str().to_string()));
        }
    }
    FreeWord::from_syllables(raw)
}

/// Whether f satisfies the twisted cocycle law f(gh) = f(g) · (g · f(h))
/// for every pair.
pub fn check_f_cocycle(data: &ActionData) -> Result<bool> {
    let order = data.group().order() as u16;
    for g in 0..order {
        for h in 0..order {
            let gh = data.group().mul(g, h);
            let rhs = data.conjugator(g).multiply(&act(g, data.conjugator(h), data)?)?;
            if *data.conjugator(gh) != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// How far φ_w strays from equivariance on one letter: the entrywise
/// mismatches between φ_w(g · a) and the χ(g)-twist of φ_w(a), and the
/// quotient defect between them.
#[derive(Clone, Debug)]
pub struct LetterReport {
    pub letter: Letter,
    pub defect: PartialMatrix,
    pub mismatched: Vec<IndexPair>,
    pub exact: bool,
    pub agrees_on_one_exception: bool,
}

#[derive(Clone, Debug)]
pub struct EquivarianceReport {
    /// T(Z_{w,x}, 2), the region where agreement is promised for y.
    pub one_exception: ConvexSet,
    pub letters: Vec<LetterReport>,
}

/// Compare φ_w(g · a) against ^g(φ_w(a)) for a in {x, y}. The x row is
/// exact; the y row agrees wherever at most one position of w carries a
/// letter other than x, so its defect lies in the kernel over
/// T(Z_{w,x}, 2).
pub fn equivariance_defect(
    w: &WordSpec,
    g: u16,
    data: &ActionData,
    alpha: &AlphaAssignment,
) -> Result<EquivarianceReport> {
    let m = data.modulus();
    let sup = Support::full(w.len())?;
    let one_exception = ConvexSet::t_set(&w.z_against(&letter_x()), 2)?;
    let twist = TwistValue::new(m, data.chi_residue(g))?;
    let mut letters = Vec::new();
    for letter in [letter_x(), letter_y()] {
        let gen = FreeWord::generator(letter.clone());
        let lhs = phi_eval(w, &act(g, &gen, data)?, alpha, m)?;
        let rhs = phi_eval(w, &gen, alpha, m)?.twist(twist)?;
        let mismatched: Vec<IndexPair> = sup
            .strict_pairs()
            .iter()
            .copied()
            .filter(|&(i, j)| lhs.entry(i, j) != rhs.entry(i, j))
            .collect();
        let defect = lhs.mul(&rhs.inverse())?;
        let exact = mismatched.is_empty();
        let agrees_on_one_exception = defect.in_kernel(&one_exception)?;
        letters.push(LetterReport { letter, defect, mismatched, exact, agrees_on_one_exception });
    }
    Ok(EquivarianceReport { one_exception, letters })
}
