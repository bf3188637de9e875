//! Twisted 1-cocycles of a finite group valued in partial unipotent
//! groups, the obstruction calculus for pushing them through central
//! window extensions, Massey cup sums, and the band-by-band chain lift
//! that assembles a cocycle from prescribed superdiagonal data.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{factorial, Modulus};
use crate::indexsets::{ConvexSet, IndexPair, LevelSet};
use crate::snf::{solve_congruences, solve_linear};
use crate::unipotent::{for_each_matrix, PartialMatrix, Support, TwistValue};
use crate::{Error, Result};

/// Order cap for groups given by an explicit multiplication table; the
/// validation and the double loops over G x G stay desk-scale under it.
const TABLE_CAP: usize = 64;
/// Cyclic groups skip table validation, so they may be larger; this bound
/// keeps the power walks and solver sweeps cheap.
const CYCLIC_CAP: usize = 512;

/// A finite group presented by its full multiplication table. Elements
/// are u16 indices into the label list, which keeps the nested loops over
/// G branch-free; labels matter only at the API boundary.
#[derive(PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<u16>,
    inv: Vec<u16>,
    identity: u16,
}

impl FiniteGroup {
    /// Validate a multiplication table and wrap it. The checks are the
    /// group axioms themselves: a two-sided identity, associativity on
    /// all triples, and a two-sided inverse per element.
    pub fn from_table(labels: Vec<String>, table: Vec<u16>) -> Result<Arc<FiniteGroup>> {
        let o = labels.len();
        if o == 0 {
            return Err(Error::BadGroupTable("no elements".to_string()));
        }
        if o > TABLE_CAP {
            return Err(Error::GroupCap { order: o, cap: TABLE_CAP });
        }
        if table.len() != o * o {
            return Err(Error::BadGroupTable(format!(
                "table has {} entries, expected {}",
                table.len(),
                o * o
            )));
        }
        if table.iter().any(|&g| g as usize >= o) {
            return Err(Error::BadGroupTable("table entry out of range".to_string()));
        }
        for a in 0..o {
            for b in a + 1..o {
                if labels[a] == labels[b] {
                    return Err(Error::BadGroupTable(format!("duplicate label {}", labels[a])));
                }
            }
        }
        let at = |g: usize, h: usize| table[g * o + h] as usize;
        let identity = (0..o)
            .find(|&e| (0..o).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or_else(|| Error::BadGroupTable("no identity element".to_string()))?;
        for g in 0..o {
            for h in 0..o {
                for k in 0..o {
                    if at(at(g, h), k) != at(g, at(h, k)) {
                        return Err(Error::BadGroupTable(format!(
                            "associativity fails at ({}, {}, {})",
                            labels[g], labels[h], labels[k]
                        )));
                    }
                }
            }
        }
        let mut inv = vec![0u16; o];
        for g in 0..o {
            let gi = (0..o)
                .find(|&h| at(g, h) == identity && at(h, g) == identity)
                .ok_or_else(|| Error::BadGroupTable(format!("{} has no inverse", labels[g])))?;
            inv[g] = gi as u16;
        }
        Ok(Arc::new(FiniteGroup { labels, table, inv, identity: identity as u16 }))
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn mul(&self, g: u16, h: u16) -> u16 {
        self.table[g as usize * self.order() + h as usize]
    }

    #[inline]
    pub fn inv(&self, g: u16) -> u16 {
        self.inv[g as usize]
    }

    pub fn identity(&self) -> u16 {
        self.identity
    }

    pub fn label(&self, g: u16) -> &str {
        &self.labels[g as usize]
    }

    pub fn index_of(&self, label: &str) -> Option<u16> {
        self.labels.iter().position(|l| l == label).map(|i| i as u16)
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..self.order() as u16
    }

    pub fn element_order(&self, g: u16) -> u32 {
        let mut acc = g;
        let mut k = 1;
        while acc != self.identity {
            acc = self.mul(acc, g);
            k += 1;
        }
        k
    }

    /// The least element generating the whole group, if there is one.
    pub fn cyclic_generator(&self) -> Option<u16> {
        self.elements().find(|&g| self.element_order(g) as usize == self.order())
    }
}

impl core::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "FiniteGroup(order={})", self.order())
    }
}

/// The cyclic group of the given order, elements labelled 1, s, s^2, ...
/// with s^i at index i. Built directly, so no table validation pass.
pub fn make_cyclic(order: u32) -> Result<Arc<FiniteGroup>> {
    let o = order as usize;
    if o == 0 || o > CYCLIC_CAP {
        return Err(Error::GroupCap { order: o, cap: CYCLIC_CAP });
    }
    let labels = (0..o)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "s".to_string(),
            _ => format!("s^{i}"),
        })
        .collect();
    let mut table = vec![0u16; o * o];
    for i in 0..o {
        for j in 0..o {
            table[i * o + j] = ((i + j) % o) as u16;
        }
    }
    let inv = (0..o).map(|i| ((o - i) % o) as u16).collect();
    Ok(Arc::new(FiniteGroup { labels, table, inv, identity: 0 }))
}

/// A character chi: G -> (Z/m)^*, the twisting datum for every cocycle
/// in this module.
#[derive(Clone, PartialEq, Eq)]
pub struct Character {
    group: Arc<FiniteGroup>,
    m: Modulus,
    values: Vec<u64>,
}

impl Character {
    pub fn new(group: &Arc<FiniteGroup>, m: Modulus, values: Vec<u64>) -> Result<Character> {
        if values.len() != group.order() {
            return Err(Error::ShapeMismatch);
        }
        let values: Vec<u64> = values.iter().map(|&v| m.reduce(v)).collect();
        if values.iter().any(|&v| !m.is_unit(v)) {
            return Err(Error::BadCharacter);
        }
        for g in group.elements() {
            for h in group.elements() {
                let lhs = values[group.mul(g, h) as usize];
                if lhs != m.mul(values[g as usize], values[h as usize]) {
                    return Err(Error::BadCharacter);
                }
            }
        }
        Ok(Character { group: group.clone(), m, values })
    }

    pub fn trivial(group: &Arc<FiniteGroup>, m: Modulus) -> Character {
        Character { group: group.clone(), m, values: vec![1 % m.get(); group.order()] }
    }

    /// For a cyclic group: the character sending the least generator to
    /// `value`. Fails unless value^|G| = 1 makes the walk consistent.
    pub fn from_generator_value(
        group: &Arc<FiniteGroup>,
        m: Modulus,
        value: u64,
    ) -> Result<Character> {
        let gen = group
            .cyclic_generator()
            .ok_or_else(|| Error::BadGroupTable("the group is not cyclic".to_string()))?;
        let mut values = vec![0u64; group.order()];
        let mut g = group.identity();
        let mut acc = 1 % m.get();
        loop {
            values[g as usize] = acc;
            g = group.mul(g, gen);
            if g == group.identity() {
                break;
            }
            acc = m.mul(acc, value);
        }
        Character::new(group, m, values)
    }

    #[inline]
    pub fn value(&self, g: u16) -> u64 {
        self.values[g as usize]
    }

    /// chi(g)^d, the twist acting on a band of depth d.
    #[inline]
    pub fn pow(&self, g: u16, d: u8) -> u64 {
        self.m.pow(self.values[g as usize], d as u64)
    }

    pub fn twist(&self, g: u16) -> TwistValue {
        TwistValue::new(self.m, self.values[g as usize]).expect("character values are units")
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn modulus(&self) -> Modulus {
        self.m
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

impl core::fmt::Debug for Character {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Character(m={}, values={:?})", self.m.get(), self.values)
    }
}

/// A scalar twisted 1-cocycle a: G -> Z/m with a(gh) = a(g) + chi(g)a(h).
/// These are the superdiagonal inputs to the chain lift and the Kummer
/// cocycles on the Galois side.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScalarCocycle1 {
    chi: Character,
    values: Vec<u64>,
}

impl ScalarCocycle1 {
    pub fn new(chi: Character, values: Vec<u64>) -> Result<ScalarCocycle1> {
        let group = chi.group().clone();
        let m = chi.modulus();
        if values.len() != group.order() {
            return Err(Error::ShapeMismatch);
        }
        let values: Vec<u64> = values.iter().map(|&v| m.reduce(v)).collect();
        for g in group.elements() {
            for h in group.elements() {
                let lhs = values[group.mul(g, h) as usize];
                let rhs = m.add(values[g as usize], m.mul(chi.value(g), values[h as usize]));
                if lhs != rhs {
                    return Err(Error::NotACocycle);
                }
            }
        }
        Ok(ScalarCocycle1 { chi, values })
    }

    pub fn zero(chi: Character) -> ScalarCocycle1 {
        let n = chi.group().order();
        ScalarCocycle1 { chi, values: vec![0; n] }
    }

    /// For a cyclic group: the cocycle with a(s) = d, extended along the
    /// powers of the least generator s. The wrap-around at s^|G| = 1 must
    /// close up, otherwise no cocycle has that generator value.
    pub fn from_generator_value(chi: &Character, d: u64) -> Result<ScalarCocycle1> {
        let group = chi.group().clone();
        let gen = group
            .cyclic_generator()
            .ok_or_else(|| Error::BadGroupTable("the group is not cyclic".to_string()))?;
        let m = chi.modulus();
        let mut values = vec![0u64; group.order()];
        let mut g = group.identity();
        loop {
            let next = group.mul(g, gen);
            if next == group.identity() {
                break;
            }
            // a(g s) = a(g) + chi(g) d
            values[next as usize] = m.add(values[g as usize], m.mul(chi.value(g), d));
            g = next;
        }
        ScalarCocycle1::new(chi.clone(), values)
    }

    #[inline]
    pub fn value(&self, g: u16) -> u64 {
        self.values[g as usize]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn chi(&self) -> &Character {
        &self.chi
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.chi.group()
    }

    pub fn modulus(&self) -> Modulus {
        self.chi.modulus()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Pull back along the canonical surjection between cyclic groups,
    /// s_big^i -> s_small^(i mod k). The result is validated against
    /// chi_big, which catches incompatible characters.
    pub fn inflate(&self, chi_big: &Character) -> Result<ScalarCocycle1> {
        let small = self.chi.group().clone();
        let big = chi_big.group().clone();
        let gen_s = small
            .cyclic_generator()
            .ok_or_else(|| Error::BadGroupTable("the group is not cyclic".to_string()))?;
        let gen_b = big
            .cyclic_generator()
            .ok_or_else(|| Error::BadGroupTable("the group is not cyclic".to_string()))?;
        if !big.order().is_multiple_of(small.order()) || chi_big.modulus() != self.modulus() {
            return Err(Error::ShapeMismatch);
        }
        let mut values = vec![0u64; big.order()];
        let mut gb = big.identity();
        let mut gs = small.identity();
        loop {
            values[gb as usize] = self.values[gs as usize];
            gb = big.mul(gb, gen_b);
            gs = small.mul(gs, gen_s);
            if gb == big.identity() {
                break;
            }
        }
        ScalarCocycle1::new(chi_big.clone(), values)
    }
}

/// A twisted 1-cocycle rho: G -> U_T, satisfying
/// rho(gh) = rho(g) * twist_chi(g)(rho(h)). Validated on construction, so
/// holding a Cocycle1 is holding a proof of the law.
#[derive(Clone)]
pub struct Cocycle1 {
    chi: Character,
    sup: Arc<Support>,
    values: Vec<PartialMatrix>,
}

/// The twisted law check behind both `Cocycle1::new` and `is_cocycle1`.
/// Shape violations are errors; a law violation is an ordinary false.
pub fn is_cocycle1(chi: &Character, values: &[PartialMatrix]) -> Result<bool> {
    let group = chi.group();
    if values.len() != group.order() {
        return Err(Error::ShapeMismatch);
    }
    let sup = values[0].support();
    for v in values {
        if v.support().set() != sup.set() || v.modulus() != chi.modulus() {
            return Err(Error::ShapeMismatch);
        }
    }
    for g in group.elements() {
        let tw = chi.twist(g);
        for h in group.elements() {
            let rhs = values[g as usize].mul(&values[h as usize].twist(tw)?)?;
            if values[group.mul(g, h) as usize] != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl Cocycle1 {
    pub fn new(chi: Character, values: Vec<PartialMatrix>) -> Result<Cocycle1> {
        if !is_cocycle1(&chi, &values)? {
            return Err(Error::NotACocycle);
        }
        let sup = values[0].support().clone();
        Ok(Cocycle1 { chi, sup, values })
    }

    pub fn zero(chi: Character, sup: &Arc<Support>) -> Cocycle1 {
        let values =
            chi.group().elements().map(|_| PartialMatrix::identity(sup, chi.modulus())).collect();
        Cocycle1 { chi, sup: sup.clone(), values }
    }

    /// The principal cocycle g -> s^{-1} * (g acting on s).
    pub fn principal(chi: &Character, s: &PartialMatrix) -> Result<Cocycle1> {
        if s.modulus() != chi.modulus() {
            return Err(Error::ShapeMismatch);
        }
        let s_inv = s.inverse();
        let values = chi
            .group()
            .elements()
            .map(|g| s_inv.mul(&s.twist(chi.twist(g))?))
            .collect::<Result<Vec<_>>>()?;
        Cocycle1::new(chi.clone(), values)
    }

    #[inline]
    pub fn value(&self, g: u16) -> &PartialMatrix {
        &self.values[g as usize]
    }

    pub fn values(&self) -> &[PartialMatrix] {
        &self.values
    }

    pub fn chi(&self) -> &Character {
        &self.chi
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.chi.group()
    }

    pub fn support(&self) -> &Arc<Support> {
        &self.sup
    }

    pub fn modulus(&self) -> Modulus {
        self.chi.modulus()
    }

    /// Restrict all values to a smaller support. Projection is an
    /// equivariant homomorphism, so the result is again a cocycle.
    pub fn project(&self, small: &Arc<Support>) -> Result<Cocycle1> {
        let values = self.values.iter().map(|v| v.project(small)).collect::<Result<Vec<_>>>()?;
        Cocycle1::new(self.chi.clone(), values)
    }

    /// Exhaustive search for s with other(g) = s^{-1} * self(g) * (g on s)
    /// for all g. None means the cohomology classes differ. The search
    /// space is |U_T| and is refused above `cap`.
    pub fn cohomologous(&self, other: &Cocycle1, cap: u128) -> Result<Option<PartialMatrix>> {
        if self.chi != other.chi || self.sup.set() != other.sup.set() {
            return Err(Error::ShapeMismatch);
        }
        let size = self.sup.element_count(self.modulus()).unwrap_or(u128::MAX);
        if size > cap {
            return Err(Error::SearchCap { size, cap });
        }
        let group = self.group().clone();
        let mut witness = None;
        for_each_matrix(&self.sup, self.modulus(), |s| {
            let s_inv = s.inverse();
            let matches = group.elements().all(|g| {
                let moved = s.twist(self.chi.twist(g)).expect("unit twist");
                let translated = s_inv
                    .mul(&self.values[g as usize])
                    .and_then(|t| t.mul(&moved))
                    .expect("same support");
                translated == other.values[g as usize]
            });
            if matches {
                witness = Some(s.clone());
            }
            witness.is_none()
        });
        Ok(witness)
    }
}

impl core::fmt::Debug for Cocycle1 {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Cocycle1(|G|={}, slots={})", self.group().order(), self.sup.slots())
    }
}

/// A lifting window: a convex inclusion small ⊆ big whose kernel slice
/// (the slots of big off small) is central in U_big. Centrality is exactly
/// the absence of any product splitting with a factor in the slice, and
/// the scan below checks that. It also forces slice * slice = 0, so the
/// slice is an abelian group under entrywise addition and inversion is
/// entrywise negation.
pub struct Window {
    small: Arc<Support>,
    big: Arc<Support>,
    slice_slots: Vec<u16>,
    slice_pairs: Vec<IndexPair>,
    slice_depths: Vec<u8>,
}

impl Window {
    pub fn new(small: &Arc<Support>, big: &Arc<Support>) -> Result<Arc<Window>> {
        if !small.set().is_subset(big.set()) {
            return Err(Error::NotASubset);
        }
        let in_slice: Vec<bool> =
            big.strict_pairs().iter().map(|&(i, j)| !small.set().contains(i, j)).collect();
        for dst in 0..big.slots() {
            for &(l, r) in big.product_terms(dst) {
                for factor in [l, r] {
                    if in_slice[factor as usize] {
                        let (i, j) = big.strict_pairs()[factor as usize];
                        return Err(Error::WindowNotCentral { i, j });
                    }
                }
            }
        }
        let slice_slots: Vec<u16> =
            (0..big.slots() as u16).filter(|&s| in_slice[s as usize]).collect();
        let slice_pairs = slice_slots.iter().map(|&s| big.strict_pairs()[s as usize]).collect();
        let slice_depths = slice_slots.iter().map(|&s| big.depth_of(s as usize)).collect();
        Ok(Arc::new(Window {
            small: small.clone(),
            big: big.clone(),
            slice_slots,
            slice_pairs,
            slice_depths,
        }))
    }

    pub fn small(&self) -> &Arc<Support> {
        &self.small
    }

    pub fn big(&self) -> &Arc<Support> {
        &self.big
    }

    pub fn slice_len(&self) -> usize {
        self.slice_slots.len()
    }

    pub fn slice_pairs(&self) -> &[IndexPair] {
        &self.slice_pairs
    }

    pub fn slice_depth(&self, k: usize) -> u8 {
        self.slice_depths[k]
    }

    /// The element of U_big with the given slice entries and zeros on the
    /// small part.
    pub fn embed(&self, vals: &[u64], m: Modulus) -> Result<PartialMatrix> {
        if vals.len() != self.slice_slots.len() {
            return Err(Error::ShapeMismatch);
        }
        let mut entries = vec![0u64; self.big.slots()];
        for (k, &slot) in self.slice_slots.iter().enumerate() {
            entries[slot as usize] = m.reduce(vals[k]);
        }
        PartialMatrix::from_slots(&self.big, m, entries)
    }

    /// Slice entries of a matrix on the big support.
    pub fn extract(&self, mat: &PartialMatrix) -> Result<Vec<u64>> {
        if mat.support().set() != self.big.set() {
            return Err(Error::ShapeMismatch);
        }
        Ok(self.slice_slots.iter().map(|&s| mat.entries()[s as usize]).collect())
    }
}

impl core::fmt::Debug for Window {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Window(slice={:?})", self.slice_pairs)
    }
}

/// A 2-cochain G x G -> slice, stored per window slot. A slot of band
/// depth d carries the chi^d twist.
#[derive(Clone)]
pub struct Cochain2Abelian {
    chi: Character,
    window: Arc<Window>,
    values: Vec<u64>,
}

impl Cochain2Abelian {
    pub fn new(chi: Character, window: &Arc<Window>, values: Vec<u64>) -> Result<Cochain2Abelian> {
        let o = chi.group().order();
        if values.len() != o * o * window.slice_len() {
            return Err(Error::ShapeMismatch);
        }
        let m = chi.modulus();
        let values = values.iter().map(|&v| m.reduce(v)).collect();
        Ok(Cochain2Abelian { chi, window: window.clone(), values })
    }

    pub fn zero(chi: Character, window: &Arc<Window>) -> Cochain2Abelian {
        let o = chi.group().order();
        let values = vec![0; o * o * window.slice_len()];
        Cochain2Abelian { chi, window: window.clone(), values }
    }

    /// The coboundary of a 1-cochain beta: G -> slice,
    /// (d beta)(g,h) = chi(g)^d beta(h) - beta(gh) + beta(g) per slot.
    pub fn coboundary(
        chi: &Character,
        window: &Arc<Window>,
        beta: &[Vec<u64>],
    ) -> Result<Cochain2Abelian> {
        let group = chi.group().clone();
        let o = group.order();
        let m = chi.modulus();
        let slots = window.slice_len();
        if beta.len() != o || beta.iter().any(|b| b.len() != slots) {
            return Err(Error::ShapeMismatch);
        }
        let mut values = vec![0u64; o * o * slots];
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h) as usize;
                let base = (g as usize * o + h as usize) * slots;
                for s in 0..slots {
                    let twisted =
                        m.mul(chi.pow(g, window.slice_depth(s)), m.reduce(beta[h as usize][s]));
                    let v =
                        m.add(m.sub(twisted, m.reduce(beta[gh][s])), m.reduce(beta[g as usize][s]));
                    values[base + s] = v;
                }
            }
        }
        Ok(Cochain2Abelian { chi: chi.clone(), window: window.clone(), values })
    }

    #[inline]
    pub fn value(&self, g: u16, h: u16) -> &[u64] {
        let o = self.chi.group().order();
        let slots = self.window.slice_len();
        let base = (g as usize * o + h as usize) * slots;
        &self.values[base..base + slots]
    }

    pub fn chi(&self) -> &Character {
        &self.chi
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.chi.group()
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// The twisted 2-cocycle identity
    /// chi(g)^d c(h,k) - c(gh,k) + c(g,hk) - c(g,h) = 0 on all triples.
    pub fn is_2cocycle(&self) -> bool {
        let group = self.chi.group().clone();
        let m = self.chi.modulus();
        let slots = self.window.slice_len();
        for g in group.elements() {
            let tw: Vec<u64> =
                (0..slots).map(|s| self.chi.pow(g, self.window.slice_depth(s))).collect();
            for h in group.elements() {
                let gh = group.mul(g, h);
                for k in group.elements() {
                    let hk = group.mul(h, k);
                    let chk = self.value(h, k);
                    let cghk = self.value(gh, k);
                    let cghk2 = self.value(g, hk);
                    let cgh = self.value(g, h);
                    for s in 0..slots {
                        let lhs = m.add(m.mul(tw[s], chk[s]), cghk2[s]);
                        let rhs = m.add(cghk[s], cgh[s]);
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn add(&self, other: &Cochain2Abelian) -> Result<Cochain2Abelian> {
        if !Arc::ptr_eq(&self.window, &other.window) || self.chi != other.chi {
            return Err(Error::ShapeMismatch);
        }
        let m = self.chi.modulus();
        let values =
            self.values.iter().zip(other.values.iter()).map(|(&a, &b)| m.add(a, b)).collect();
        Ok(Cochain2Abelian { chi: self.chi.clone(), window: self.window.clone(), values })
    }

    pub fn sub(&self, other: &Cochain2Abelian) -> Result<Cochain2Abelian> {
        if !Arc::ptr_eq(&self.window, &other.window) || self.chi != other.chi {
            return Err(Error::ShapeMismatch);
        }
        let m = self.chi.modulus();
        let values =
            self.values.iter().zip(other.values.iter()).map(|(&a, &b)| m.sub(a, b)).collect();
        Ok(Cochain2Abelian { chi: self.chi.clone(), window: self.window.clone(), values })
    }
}

impl PartialEq for Cochain2Abelian {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.window, &other.window)
            && self.chi == other.chi
            && self.values == other.values
    }
}

impl Eq for Cochain2Abelian {}

impl core::fmt::Debug for Cochain2Abelian {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Cochain2Abelian({:?}, values={:?})", self.window, self.values)
    }
}

/// The obstruction 2-cocycle c(g,h) = lift(g) * ^g lift(h) * lift(gh)^{-1}
/// of a cocycle on the window's small support. With no explicit lift the
/// zero-fill section is used; a custom lift must project back to rho.
/// The product lands in the central slice because its projection to the
/// small support is the cocycle law defect, which vanishes.
pub fn obstruction2(
    rho: &Cocycle1,
    window: &Arc<Window>,
    lift: Option<&[PartialMatrix]>,
) -> Result<Cochain2Abelian> {
    if rho.support().set() != window.small().set() {
        return Err(Error::ShapeMismatch);
    }
    let group = rho.group().clone();
    let o = group.order();
    let m = rho.modulus();
    let lifts: Vec<PartialMatrix> = match lift {
        None => {
            rho.values().iter().map(|v| v.zero_fill(window.big())).collect::<Result<Vec<_>>>()?
        }
        Some(given) => {
            if given.len() != o {
                return Err(Error::ShapeMismatch);
            }
            for (g, l) in given.iter().enumerate() {
                if l.support().set() != window.big().set()
                    || l.modulus() != m
                    || l.project(window.small())? != *rho.value(g as u16)
                {
                    return Err(Error::ShapeMismatch);
                }
            }
            given.to_vec()
        }
    };
    let slots = window.slice_len();
    let mut values = vec![0u64; o * o * slots];
    for g in group.elements() {
        let tw = rho.chi().twist(g);
        for h in group.elements() {
            let gh = group.mul(g, h);
            let prod = lifts[g as usize]
                .mul(&lifts[h as usize].twist(tw)?)?
                .mul(&lifts[gh as usize].inverse())?;
            debug_assert_eq!(prod.in_kernel(window.small().set()), Ok(true));
            let slice = window.extract(&prod)?;
            let base = (g as usize * o + h as usize) * slots;
            values[base..base + slots].copy_from_slice(&slice);
        }
    }
    Ok(Cochain2Abelian { chi: rho.chi().clone(), window: window.clone(), values })
}

/// Does d beta = c hold on every pair?
fn coboundary_matches(c: &Cochain2Abelian, beta: &[Vec<u64>]) -> bool {
    match Cochain2Abelian::coboundary(&c.chi, &c.window, beta) {
        Ok(db) => db == *c,
        Err(_) => false,
    }
}

/// Solve d beta = c over Z/m, returning beta as one slice vector per
/// group element, or None when c is not a coboundary. The input must
/// satisfy the twisted 2-cocycle identity.
///
/// For cyclic G the system collapses: writing every element as a power of
/// a generator s, the coboundary relation recursively determines
/// beta(s^{i+1}) from beta(s), and the only constraint left is the single
/// congruence N * beta(s) = sum_i c(s^i, s) per slot, with
/// N = 1 + lambda + ... + lambda^{K-1} and lambda the twist at s. For
/// other groups each band depth becomes one integer matrix handed to the
/// Smith reduction. Both routes verify d beta = c before returning.
pub fn solve_coboundary(c: &Cochain2Abelian) -> Result<Option<Vec<Vec<u64>>>> {
    if !c.is_2cocycle() {
        return Err(Error::NotA2Cocycle);
    }
    let group = c.chi.group().clone();
    let o = group.order();
    let m = c.chi.modulus();
    let slots = c.window.slice_len();
    if slots == 0 {
        return Ok(Some(vec![Vec::new(); o]));
    }
    let e = group.identity();
    // Normalize: subtracting the coboundary of the constant cochain
    // gamma = c(1,1) makes c(1,.) and c(.,1) vanish, which the cyclic
    // recursion needs. The shift is undone at the end.
    let gamma: Vec<u64> = c.value(e, e).to_vec();
    let mut cp = c.clone();
    for g in group.elements() {
        for h in group.elements() {
            let base = (g as usize * o + h as usize) * slots;
            for s in 0..slots {
                let shift = m.mul(c.chi.pow(g, c.window.slice_depth(s)), gamma[s]);
                cp.values[base + s] = m.sub(cp.values[base + s], shift);
            }
        }
    }

    let mut beta = vec![vec![0u64; slots]; o];
    if let Some(gen) = group.cyclic_generator() {
        let k = group.order();
        let mut pow_idx = Vec::with_capacity(k);
        let mut g = e;
        for _ in 0..k {
            pow_idx.push(g);
            g = group.mul(g, gen);
        }
        for s in 0..slots {
            let lambda = c.chi.pow(gen, c.window.slice_depth(s));
            // beta(s^i) = n_i * v + b_i with v = beta(s) unknown.
            let mut n = vec![0u64; k + 1];
            let mut b = vec![0u64; k + 1];
            let mut lam_pow = 1 % m.get();
            for i in 0..k {
                n[i + 1] = m.add(n[i], lam_pow);
                b[i + 1] = m.sub(b[i], cp.value(pow_idx[i], gen)[s]);
                lam_pow = m.mul(lam_pow, lambda);
            }
            // Closure at s^K = 1: n_K * v + b_K = 0.
            let Some(v) = solve_linear(n[k], m.neg(b[k]), m.get()) else {
                return Ok(None);
            };
            for i in 0..k {
                beta[pow_idx[i] as usize][s] = m.add(m.mul(n[i], v), b[i]);
            }
        }
    } else {
        // One integer system per band depth, all slots of that depth as
        // parallel right-hand sides. Row (g,h) of A reads
        // lambda_g * beta(h) - beta(gh) + beta(g).
        let mut depths: Vec<u8> = (0..slots).map(|s| c.window.slice_depth(s)).collect();
        depths.sort_unstable();
        depths.dedup();
        for d in depths {
            let mut a = vec![0i64; o * o * o];
            for g in group.elements() {
                let lam = c.chi.pow(g, d) as i64;
                for h in group.elements() {
                    let row = g as usize * o + h as usize;
                    let gh = group.mul(g, h) as usize;
                    a[row * o + h as usize] += lam;
                    a[row * o + gh] -= 1;
                    a[row * o + g as usize] += 1;
                }
            }
            let cols: Vec<usize> = (0..slots).filter(|&s| c.window.slice_depth(s) == d).collect();
            let rhs: Vec<Vec<i64>> = cols
                .iter()
                .map(|&s| {
                    let mut b = vec![0i64; o * o];
                    for g in group.elements() {
                        for h in group.elements() {
                            b[g as usize * o + h as usize] = cp.value(g, h)[s] as i64;
                        }
                    }
                    b
                })
                .collect();
            let sols = solve_congruences(o * o, o, &a, &rhs, m);
            for (&s, sol) in cols.iter().zip(sols) {
                let Some(x) = sol else { return Ok(None) };
                for g in 0..o {
                    beta[g][s] = x[g];
                }
            }
        }
    }

    // Undo the normalization shift and verify against the original c.
    for bg in &mut beta {
        for s in 0..slots {
            bg[s] = m.add(bg[s], gamma[s]);
        }
    }
    if !coboundary_matches(c, &beta) {
        debug_assert!(false, "solver produced a non-solution for a 2-cocycle");
        return Ok(None);
    }
    Ok(Some(beta))
}

/// Outcome of one window lift: either the corrected cocycle on the big
/// support or the obstruction cochain that refused to die.
pub enum LiftOutcome {
    Lifted(Cocycle1),
    Obstructed(Cochain2Abelian),
}

/// Lift a cocycle through the central window onto `big`: compute the
/// obstruction of the zero-fill lift, solve for a trivializing beta, and
/// correct by rho(g) = embed(beta(g))^{-1} * lift(g). The corrected map
/// goes through Cocycle1::new, so a sign slip here would refuse to
/// construct rather than return a wrong cocycle.
pub fn lift_cocycle(rho: &Cocycle1, big: &Arc<Support>) -> Result<LiftOutcome> {
    let window = Window::new(rho.support(), big)?;
    let c = obstruction2(rho, &window, None)?;
    let Some(beta) = solve_coboundary(&c)? else {
        return Ok(LiftOutcome::Obstructed(c));
    };
    let m = rho.modulus();
    let values = rho
        .group()
        .elements()
        .map(|g| {
            let correction = window.embed(&beta[g as usize], m)?;
            correction.inverse().mul(&rho.value(g).zero_fill(big)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Cocycle1::new(rho.chi().clone(), values).map(LiftOutcome::Lifted)
}

/// Outcome of the full chain lift: the cocycle on the top support, or the
/// band where the first obstruction survived together with that cochain.
pub enum ChainOutcome {
    Lifted(Cocycle1),
    Obstructed { band: u8, obstruction: Cochain2Abelian },
}

/// Assemble a cocycle with the prescribed superdiagonal and push it band
/// by band up to `top` (the full support when None).
///
/// The start level is S_1 = T(Z,1) plus the superdiagonal. On T(Z,1) the
/// entries are forced: positions i..j-1 of a pair (i,j) in T(Z,1) lie in
/// one maximal run outside Z, every position of a run must carry the same
/// scalar cocycle a, and the entry is a(g)^(j-i)/(j-i)!. The later levels
/// are S_d = T(Z,1) plus the slots of top with band depth at most d; each
/// step's new slots form a central slice (a factor of such a slot would
/// have to sit deeper or outside T(Z,1)'s runs), so lift_cocycle applies.
/// For Z = {1,...,n} this is exactly the T(Z,t) chain.
pub fn chain_lift(
    superdiag: &[ScalarCocycle1],
    z: &LevelSet,
    chi: &Character,
    top: Option<&ConvexSet>,
) -> Result<ChainOutcome> {
    let n = z.n();
    if superdiag.len() != n as usize {
        return Err(Error::ShapeMismatch);
    }
    for a in superdiag {
        if a.chi() != chi {
            return Err(Error::ShapeMismatch);
        }
    }
    let m = chi.modulus();
    let group = chi.group().clone();
    let top_set = match top {
        Some(t) => {
            if t.n() != n {
                return Err(Error::ShapeMismatch);
            }
            *t
        }
        None => ConvexSet::full(n)?,
    };
    if (1..=n).any(|i| !top_set.contains(i, i + 1)) {
        return Err(Error::NotASubset);
    }
    let t1 = ConvexSet::t_set(z, 1)?;
    if !t1.is_subset(&top_set) {
        return Err(Error::NotASubset);
    }

    // Positions in one maximal run outside Z must agree.
    for i in 2..=n {
        if !z.contains(i)
            && !z.contains(i - 1)
            && superdiag[i as usize - 1] != superdiag[i as usize - 2]
        {
            return Err(Error::RunValueMismatch { position: i });
        }
    }

    let superdiag_pairs: Vec<IndexPair> = (1..=n).map(|i| (i, i + 1)).collect();
    let s1_set = t1.union(&ConvexSet::from_strict(n, &superdiag_pairs)?)?;
    let sup1 = Support::new(s1_set);
    let mut inv_fact = vec![None; n as usize + 1];
    for &(i, j) in sup1.strict_pairs() {
        if t1.contains(i, j) {
            let d = (j - i) as usize;
            if inv_fact[d].is_none() {
                let f = m.reduce(factorial(d as u8) % m.get());
                inv_fact[d] =
                    Some(m.inv(f).map_err(|_| Error::FactorialNotInvertible {
                        depth: d as u8,
                        m: m.get(),
                    })?);
            }
        }
    }
    let values = group
        .elements()
        .map(|g| {
            let entries = sup1
                .strict_pairs()
                .iter()
                .map(|&(i, j)| {
                    let a = superdiag[i as usize - 1].value(g);
                    if t1.contains(i, j) {
                        let d = (j - i) as usize;
                        m.mul(m.pow(a, d as u64), inv_fact[d].expect("precomputed"))
                    } else {
                        a
                    }
                })
                .collect();
            PartialMatrix::from_slots(&sup1, m, entries)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rho = Cocycle1::new(chi.clone(), values)?;

    let max_depth = top_set.strict_pairs().iter().map(|&(i, j)| j - i).max().unwrap_or(1);
    for d in 2..=max_depth {
        let band: Vec<IndexPair> =
            top_set.strict_pairs().iter().copied().filter(|&(i, j)| j - i <= d).collect();
        let s_d = t1.union(&ConvexSet::from_strict(n, &band)?)?;
        if &s_d == rho.support().set() {
            continue;
        }
        let sup_d = Support::new(s_d);
        match lift_cocycle(&rho, &sup_d)? {
            LiftOutcome::Lifted(next) => rho = next,
            LiftOutcome::Obstructed(obstruction) => {
                return Ok(ChainOutcome::Obstructed { band: d, obstruction })
            }
        }
    }
    Ok(ChainOutcome::Lifted(rho))
}

/// The two sides of the corner identity: the obstruction of the
/// corner-filled lift equals the cup sum plus the coboundary of the
/// corner cochain, checked pointwise.
pub struct MasseyReport {
    pub cup_sum: Cochain2Abelian,
    pub corner_coboundary: Cochain2Abelian,
    pub obstruction: Cochain2Abelian,
    pub identity_holds: bool,
}

/// For a cocycle on the corner-deleted full support, the generalized
/// Massey sum sum_k rho_1k cup rho_k,n+1 with the chi^n corner twist:
/// (a cup b)(g,h) = a(g) * chi(g)^(n+1-k) * b(h). The report also carries
/// the obstruction of the lift whose corner entries are `corner`, and
/// whether the identity obstruction = cup sum + d(corner) held.
pub fn massey_sum(rho_bar: &Cocycle1, corner: &[u64]) -> Result<MasseyReport> {
    let n = rho_bar.support().n();
    let m = rho_bar.modulus();
    let chi = rho_bar.chi().clone();
    let group = rho_bar.group().clone();
    let o = group.order();
    let full = ConvexSet::full(n)?;
    let ubar_pairs: Vec<IndexPair> =
        full.strict_pairs().iter().copied().filter(|&p| p != (1, n + 1)).collect();
    let ubar = ConvexSet::from_strict(n, &ubar_pairs)?;
    if rho_bar.support().set() != &ubar || corner.len() != o {
        return Err(Error::ShapeMismatch);
    }
    let corner: Vec<u64> = corner.iter().map(|&v| m.reduce(v)).collect();
    let big = Support::full(n)?;
    let window = Window::new(rho_bar.support(), &big)?;
    let corner_slot = big.slot_of(1, n + 1).expect("corner in full support");

    let lifts = group
        .elements()
        .map(|g| {
            let mut entries = rho_bar.value(g).zero_fill(&big)?.entries().to_vec();
            entries[corner_slot] = corner[g as usize];
            PartialMatrix::from_slots(&big, m, entries)
        })
        .collect::<Result<Vec<_>>>()?;
    let obstruction = obstruction2(rho_bar, &window, Some(&lifts))?;

    let mut cup_values = vec![0u64; o * o];
    for g in group.elements() {
        for h in group.elements() {
            let mut acc = 0;
            for k in 2..=n {
                let a = rho_bar.value(g).entry(1, k).expect("in support");
                let b = rho_bar.value(h).entry(k, n + 1).expect("in support");
                acc = m.add(acc, m.mul(m.mul(a, chi.pow(g, n + 1 - k)), b));
            }
            cup_values[g as usize * o + h as usize] = acc;
        }
    }
    let cup_sum = Cochain2Abelian::new(chi.clone(), &window, cup_values)?;

    let betas: Vec<Vec<u64>> = corner.iter().map(|&v| vec![v]).collect();
    let corner_coboundary = Cochain2Abelian::coboundary(&chi, &window, &betas)?;

    let identity_holds = obstruction == cup_sum.add(&corner_coboundary)?;
    Ok(MasseyReport { cup_sum, corner_coboundary, obstruction, identity_holds })
}

/// The semidirect product U_T x| G with (u,g)(v,h) = (u * ^g v, gh),
/// elements ordered (matrix odometer) x (group index). The table goes
/// through the validating constructor, so associativity of the twisted
/// product is rechecked on every construction.
pub fn semidirect(t: &ConvexSet, chi: &Character) -> Result<Arc<FiniteGroup>> {
    let group = chi.group().clone();
    let go = group.order();
    let m = chi.modulus();
    let sup = Support::new(*t);
    let total = sup.element_count(m).and_then(|c| c.checked_mul(go as u128)).unwrap_or(u128::MAX);
    if total > TABLE_CAP as u128 {
        return Err(Error::GroupCap {
            order: total.min(usize::MAX as u128) as usize,
            cap: TABLE_CAP,
        });
    }

    let mut mats: Vec<PartialMatrix> = Vec::new();
    let mut index: BTreeMap<Vec<u64>, u16> = BTreeMap::new();
    for_each_matrix(&sup, m, |mat| {
        index.insert(mat.entries().to_vec(), mats.len() as u16);
        mats.push(mat.clone());
        true
    });

    let mut labels = Vec::with_capacity(mats.len() * go);
    for mat in &mats {
        for g in group.elements() {
            let nums: Vec<String> = mat.entries().iter().map(|e| e.to_string()).collect();
            labels.push(format!("({}){}", nums.join(","), group.label(g)));
        }
    }
    let order = mats.len() * go;
    let mut table = vec![0u16; order * order];
    for (ui, u) in mats.iter().enumerate() {
        for g in group.elements() {
            let row = ui * go + g as usize;
            let tw = chi.twist(g);
            for (vi, v) in mats.iter().enumerate() {
                for h in group.elements() {
                    let col = vi * go + h as usize;
                    let w = u.mul(&v.twist(tw)?)?;
                    let wi = index[w.entries()] as usize;
                    table[row * order + col] = (wi * go + group.mul(g, h) as usize) as u16;
                }
            }
        }
    }
    FiniteGroup::from_table(labels, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexsets::WordSpec;

    fn modulus(m: u64) -> Modulus {
        Modulus::new(m).unwrap()
    }

    /// The corner-deleted full support on n levels.
    fn corner_deleted(n: u8) -> Arc<Support> {
        let full = ConvexSet::full(n).unwrap();
        let pairs: Vec<IndexPair> =
            full.strict_pairs().into_iter().filter(|&p| p != (1, n + 1)).collect();
        Support::new(ConvexSet::from_strict(n, &pairs).unwrap())
    }

    #[test]
    fn make_cyclic_shapes() {
        let c1 = make_cyclic(1).unwrap();
        assert_eq!(c1.order(), 1);
        assert_eq!(c1.identity(), 0);

        let c4 = make_cyclic(4).unwrap();
        assert_eq!(c4.label(0), "1");
        assert_eq!(c4.label(1), "s");
        assert_eq!(c4.label(3), "s^3");
        for i in 0..4u16 {
            for j in 0..4u16 {
                assert_eq!(c4.mul(i, j), (i + j) % 4);
            }
        }
        assert_eq!(c4.index_of("s^2"), Some(2));
        assert_eq!(c4.cyclic_generator(), Some(1));

        let c6 = make_cyclic(6).unwrap();
        let mut orders: Vec<u32> = c6.elements().map(|g| c6.element_order(g)).collect();
        orders.sort_unstable();
        assert_eq!(orders, [1, 2, 3, 3, 6, 6]);

        assert!(matches!(make_cyclic(0), Err(Error::GroupCap { .. })));
        assert!(make_cyclic(512).is_ok());
        assert!(matches!(make_cyclic(513), Err(Error::GroupCap { .. })));
    }

    fn klein() -> Arc<FiniteGroup> {
        let labels = ["1", "a", "b", "ab"].map(String::from).to_vec();
        let table = vec![
            0, 1, 2, 3, //
            1, 0, 3, 2, //
            2, 3, 0, 1, //
            3, 2, 1, 0,
        ];
        FiniteGroup::from_table(labels, table).unwrap()
    }

    #[test]
    fn from_table_validates_the_axioms() {
        let k = klein();
        assert_eq!(k.order(), 4);
        assert_eq!(k.cyclic_generator(), None);
        assert_eq!(k.inv(3), 3);

        // Left-identity only: row of 0 is fine but column is not.
        let bad = FiniteGroup::from_table(["1", "x"].map(String::from).to_vec(), vec![0, 1, 0, 1]);
        assert!(matches!(bad, Err(Error::BadGroupTable(_))));

        // A non-associative magma on 3 elements.
        let bad = FiniteGroup::from_table(
            ["1", "x", "y"].map(String::from).to_vec(),
            vec![0, 1, 2, 1, 2, 2, 2, 0, 1],
        );
        assert!(matches!(bad, Err(Error::BadGroupTable(_))));

        let bad = FiniteGroup::from_table(["1", "1"].map(String::from).to_vec(), vec![0, 1, 1, 0]);
        assert!(matches!(bad, Err(Error::BadGroupTable(_))));

        let o = 65;
        let labels: Vec<String> = (0..o).map(|i| format!("g{i}")).collect();
        let mut table = vec![0u16; o * o];
        for i in 0..o {
            for j in 0..o {
                table[i * o + j] = ((i + j) % o) as u16;
            }
        }
        assert!(matches!(
            FiniteGroup::from_table(labels, table),
            Err(Error::GroupCap { order: 65, cap: 64 })
        ));
    }

    #[test]
    fn characters_are_multiplicative_units() {
        let c4 = make_cyclic(4).unwrap();
        let m5 = modulus(5);
        let chi = Character::from_generator_value(&c4, m5, 2).unwrap();
        assert_eq!(chi.values(), [1, 2, 4, 3]);
        assert_eq!(chi.pow(1, 2), 4);

        let chi3 = Character::from_generator_value(&c4, m5, 3).unwrap();
        assert_eq!(chi3.values(), [1, 3, 4, 2]);

        // 0 is not a unit mod 5; 3 has order 3, not a divisor of 4, mod 4.
        assert!(matches!(Character::from_generator_value(&c4, m5, 5), Err(Error::BadCharacter)));
        let c3 = make_cyclic(3).unwrap();
        assert!(matches!(
            Character::from_generator_value(&c3, modulus(4), 3),
            Err(Error::BadCharacter)
        ));

        assert!(matches!(Character::new(&c4, m5, vec![1, 2, 3, 4]), Err(Error::BadCharacter)));
        assert!(matches!(Character::new(&c4, m5, vec![1, 2, 4]), Err(Error::ShapeMismatch)));
        assert_eq!(Character::trivial(&c4, m5).values(), [1, 1, 1, 1]);
    }

    #[test]
    fn scalar_cocycles_close_up() {
        let c2 = make_cyclic(2).unwrap();
        let m3 = modulus(3);
        // With chi(s) = 2 the closure reads d + 2d = 0 mod 3, so every d
        // works; with chi trivial only d = 0 does.
        let chi = Character::from_generator_value(&c2, m3, 2).unwrap();
        let a = ScalarCocycle1::from_generator_value(&chi, 2).unwrap();
        assert_eq!(a.values(), [0, 2]);
        let triv = Character::trivial(&c2, m3);
        assert!(matches!(ScalarCocycle1::from_generator_value(&triv, 1), Err(Error::NotACocycle)));
        assert!(ScalarCocycle1::from_generator_value(&triv, 0).unwrap().is_zero());

        let c4 = make_cyclic(4).unwrap();
        let m5 = modulus(5);
        let chi4 = Character::from_generator_value(&c4, m5, 2).unwrap();
        let b = ScalarCocycle1::from_generator_value(&chi4, 1).unwrap();
        // a(s^i) = 1 + 2 + ... + 2^(i-1)
        assert_eq!(b.values(), [0, 1, 3, 2]);
    }

    #[test]
    fn scalar_inflation_pulls_back_along_the_projection() {
        let c2 = make_cyclic(2).unwrap();
        let c4 = make_cyclic(4).unwrap();
        let m3 = modulus(3);
        let chi2 = Character::from_generator_value(&c2, m3, 2).unwrap();
        let a = ScalarCocycle1::from_generator_value(&chi2, 1).unwrap();
        // chi on C4 through the projection: s -> 2, s^2 -> 1.
        let chi4 = Character::from_generator_value(&c4, m3, 2).unwrap();
        let inflated = a.inflate(&chi4).unwrap();
        assert_eq!(inflated.values(), [0, 1, 0, 1]);

        let c3 = make_cyclic(3).unwrap();
        let chi3 = Character::trivial(&c3, m3);
        assert!(matches!(a.inflate(&chi3), Err(Error::ShapeMismatch)));
    }

    #[test]
    fn cocycle_law_checks_and_principals() {
        let n = 2;
        let sup = Support::full(n).unwrap();
        let m5 = modulus(5);
        let c2 = make_cyclic(2).unwrap();
        let chi = Character::from_generator_value(&c2, m5, 4).unwrap();

        // Constant identity is always a cocycle.
        let id = PartialMatrix::identity(&sup, m5);
        assert!(is_cocycle1(&chi, &[id.clone(), id.clone()]).unwrap());

        // An order-2 element gives an untwisted homomorphism from C2.
        let triv = Character::trivial(&c2, modulus(2));
        let sup2 = Support::full(2).unwrap();
        let mat = PartialMatrix::from_slots(&sup2, modulus(2), vec![1, 0, 0]).unwrap();
        assert!(mat.mul(&mat).unwrap().is_identity());
        let idm = PartialMatrix::identity(&sup2, modulus(2));
        assert!(is_cocycle1(&triv, &[idm.clone(), mat.clone()]).unwrap());
        // Swapping the identity away breaks the law.
        assert!(!is_cocycle1(&triv, &[mat.clone(), idm]).unwrap());

        let s = PartialMatrix::from_slots(&sup, m5, vec![1, 2, 3]).unwrap();
        let principal = Cocycle1::principal(&chi, &s).unwrap();
        assert!(is_cocycle1(&chi, principal.values()).unwrap());
        assert!(principal.value(0).is_identity());
    }

    #[test]
    fn cohomologous_finds_translation_witnesses() {
        let sup = Support::full(2).unwrap();
        let m3 = modulus(3);
        let c2 = make_cyclic(2).unwrap();
        let chi = Character::from_generator_value(&c2, m3, 2).unwrap();

        let zero = Cocycle1::zero(chi.clone(), &sup);
        let s = PartialMatrix::from_slots(&sup, m3, vec![2, 1, 0]).unwrap();
        let principal = Cocycle1::principal(&chi, &s).unwrap();
        // zero translated by s is exactly the principal cocycle.
        let witness = zero.cohomologous(&principal, 1 << 16).unwrap();
        assert!(witness.is_some());
        let witness = witness.unwrap();
        let translated = Cocycle1::principal(&chi, &witness).unwrap();
        assert_eq!(translated.values(), principal.values());

        // Against itself the identity is the first witness found.
        let w = principal.cohomologous(&principal, 1 << 16).unwrap().unwrap();
        assert!(w.is_identity());

        // Two homomorphisms with different superdiagonals are never
        // cohomologous: untwisted translation fixes the superdiagonal.
        let m2 = modulus(2);
        let triv = Character::trivial(&c2, m2);
        let r1 = Cocycle1::new(
            triv.clone(),
            vec![
                PartialMatrix::identity(&sup, m2),
                PartialMatrix::from_slots(&sup, m2, vec![1, 0, 0]).unwrap(),
            ],
        )
        .unwrap();
        let r2 = Cocycle1::new(
            triv.clone(),
            vec![
                PartialMatrix::identity(&sup, m2),
                PartialMatrix::from_slots(&sup, m2, vec![0, 0, 1]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(r1.cohomologous(&r2, 1 << 16).unwrap(), None);

        assert!(matches!(r1.cohomologous(&r2, 4), Err(Error::SearchCap { size: 8, cap: 4 })));
    }

    #[test]
    fn windows_demand_a_central_slice() {
        let full = Support::full(3).unwrap();
        // Everything off the diagonal: (1,2) appears as a factor.
        let diag = Support::new(ConvexSet::diagonal(3).unwrap());
        assert!(matches!(Window::new(&diag, &full), Err(Error::WindowNotCentral { i: 1, j: 2 })));

        // Bandwidth-1 small: the slice {(1,3),(2,4),(1,4)} has (2,4)
        // feeding (1,4) = (1,2)(2,4).
        let z = LevelSet::full(3).unwrap();
        let band1 = Support::new(ConvexSet::t_set(&z, 2).unwrap());
        assert!(matches!(Window::new(&band1, &full), Err(Error::WindowNotCentral { i: 2, j: 4 })));

        // Bandwidth-2 small leaves only the corner, which is central.
        let band2 = Support::new(ConvexSet::t_set(&z, 3).unwrap());
        let w = Window::new(&band2, &full).unwrap();
        assert_eq!(w.slice_pairs(), [(1, 4)]);
        assert_eq!(w.slice_depth(0), 3);

        assert!(matches!(Window::new(&full, &band2), Err(Error::NotASubset)));
    }

    /// The no-lift instance: C2, m=2, both superdiagonals nontrivial on
    /// n=2. Its obstruction generates H^2(C2, Z/2).
    fn c2_obstructed_cocycle() -> (Cocycle1, Arc<Support>) {
        let sup = corner_deleted(2);
        let m2 = modulus(2);
        let c2 = make_cyclic(2).unwrap();
        let triv = Character::trivial(&c2, m2);
        let rho = Cocycle1::new(
            triv,
            vec![
                PartialMatrix::identity(&sup, m2),
                PartialMatrix::from_slots(&sup, m2, vec![1, 1]).unwrap(),
            ],
        )
        .unwrap();
        (rho, Support::full(2).unwrap())
    }

    #[test]
    fn the_order_two_obstruction_survives_and_its_pullback_dies() {
        let (rho, big) = c2_obstructed_cocycle();
        let window = Window::new(rho.support(), &big).unwrap();
        let c = obstruction2(&rho, &window, None).unwrap();
        assert!(c.is_2cocycle());
        assert_eq!(c.value(1, 1), [1]);
        assert_eq!(c.value(0, 1), [0]);
        assert_eq!(solve_coboundary(&c).unwrap(), None);
        match lift_cocycle(&rho, &big).unwrap() {
            LiftOutcome::Obstructed(obs) => assert_eq!(obs.value(1, 1), [1]),
            LiftOutcome::Lifted(_) => panic!("no lift exists over C2"),
        }

        // Pull the same data back along C4 ->> C2; now beta(s^i) = i(i-1)/2
        // trivializes the obstruction and the lift exists.
        let sup = rho.support().clone();
        let m2 = modulus(2);
        let c4 = make_cyclic(4).unwrap();
        let triv4 = Character::trivial(&c4, m2);
        let pulled = Cocycle1::new(
            triv4,
            (0..4)
                .map(|i| PartialMatrix::from_slots(&sup, m2, vec![i % 2, i % 2]).unwrap())
                .collect(),
        )
        .unwrap();
        let window4 = Window::new(pulled.support(), &big).unwrap();
        let c4obs = obstruction2(&pulled, &window4, None).unwrap();
        let beta = solve_coboundary(&c4obs).unwrap().expect("pullback trivializes");
        assert_eq!(beta, [vec![0], vec![0], vec![1], vec![1]], "beta(s^i) = binomial(i,2) mod 2");
        match lift_cocycle(&pulled, &big).unwrap() {
            LiftOutcome::Lifted(lifted) => {
                assert_eq!(lifted.project(&sup).unwrap().values(), pulled.values());
            }
            LiftOutcome::Obstructed(_) => panic!("the pullback lifts"),
        }
    }

    /// Brute-force coboundary decision: enumerate every map
    /// beta: G -> slice and test d beta = c with independent arithmetic.
    fn coboundary_by_exhaustion(c: &Cochain2Abelian) -> bool {
        let group = c.group().clone();
        let o = group.order();
        let m = c.chi().modulus();
        let md = m.get();
        let slots = c.window().slice_len();
        let vars = o * slots;
        let mut beta = vec![0u64; vars];
        loop {
            let ok = group.elements().all(|g| {
                group.elements().all(|h| {
                    let gh = group.mul(g, h) as usize;
                    (0..slots).all(|s| {
                        let lam = c.chi().pow(g, c.window().slice_depth(s));
                        let lhs = (lam * beta[h as usize * slots + s] + md - beta[gh * slots + s]
                            + beta[g as usize * slots + s])
                            % md;
                        lhs == c.value(g, h)[s]
                    })
                })
            });
            if ok {
                return true;
            }
            let mut k = 0;
            loop {
                if k == vars {
                    return false;
                }
                beta[k] += 1;
                if beta[k] < md {
                    break;
                }
                beta[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn both_solver_routes_agree_with_exhaustion() {
        let m2 = modulus(2);
        let big = Support::full(2).unwrap();

        // Cyclic route, solvable and unsolvable, with composite moduli
        // mixed in. The odd-odd pattern below is the pullback of the
        // generator class on C2, so it needs even group order.
        let small = corner_deleted(2);
        for (order, m, pattern) in [(2u32, 2u64, 1u64), (4, 2, 1), (2, 4, 1), (2, 4, 2), (4, 6, 3)]
        {
            let grp = make_cyclic(order).unwrap();
            let md = modulus(m);
            let chi = Character::trivial(&grp, md);
            let window = Window::new(&small, &Support::full(2).unwrap()).unwrap();
            let o = grp.order();
            // c(s^a, s^b) = pattern when a and b are both odd powers; the
            // pullback shape from the C2 generator class.
            let mut values = vec![0u64; o * o];
            for a in 0..o {
                for b in 0..o {
                    if a % 2 == 1 && b % 2 == 1 {
                        values[a * o + b] = pattern;
                    }
                }
            }
            let c = Cochain2Abelian::new(chi, &window, values).unwrap();
            assert!(c.is_2cocycle());
            let solved = solve_coboundary(&c).unwrap();
            assert_eq!(
                solved.is_some(),
                coboundary_by_exhaustion(&c),
                "cyclic route disagrees with brute force at ({order}, {m}, {pattern})"
            );
            if let Some(beta) = solved {
                assert!(coboundary_matches(&c, &beta));
            }
        }

        // Odd order: the carry cochain c(s^a, s^b) = [a + b >= 3] on C3
        // classifies Z/9 over Z/3, a nonzero class, so it cannot solve.
        let c3 = make_cyclic(3).unwrap();
        let chi3 = Character::trivial(&c3, modulus(3));
        let window3 = Window::new(&small, &big).unwrap();
        let mut carry = vec![0u64; 9];
        for a in 0..3 {
            for b in 0..3 {
                carry[a * 3 + b] = ((a + b) >= 3) as u64;
            }
        }
        let c = Cochain2Abelian::new(chi3, &window3, carry).unwrap();
        assert!(c.is_2cocycle());
        assert_eq!(solve_coboundary(&c).unwrap(), None);
        assert!(!coboundary_by_exhaustion(&c));

        // Smith route: the Klein group is not cyclic. The cochain
        // c((a^x b^y), (a^u b^v)) = x * u mod 2 restricts to the
        // nontrivial class on <a>, so it cannot be a coboundary.
        let k = klein();
        let chi = Character::trivial(&k, m2);
        let window = Window::new(&small, &big).unwrap();
        let comp = |g: u16| (g as u64) & 1; // exponent of a in g
        let mut values = vec![0u64; 16];
        for g in 0..4u16 {
            for h in 0..4u16 {
                values[g as usize * 4 + h as usize] = comp(g) * comp(h);
            }
        }
        let c = Cochain2Abelian::new(chi.clone(), &window, values).unwrap();
        assert!(c.is_2cocycle());
        assert_eq!(solve_coboundary(&c).unwrap(), None);
        assert!(!coboundary_by_exhaustion(&c));

        // A genuine Klein coboundary is recovered.
        let beta: Vec<Vec<u64>> = vec![vec![0], vec![1], vec![1], vec![0]];
        let cb = Cochain2Abelian::coboundary(&chi, &window, &beta).unwrap();
        let solved = solve_coboundary(&cb).unwrap().expect("coboundaries solve");
        assert!(coboundary_matches(&cb, &solved));

        // Non-cocycles are rejected up front.
        let mut bad = vec![0u64; 16];
        bad[1] = 1;
        let c = Cochain2Abelian::new(chi, &window, bad).unwrap();
        assert!(matches!(solve_coboundary(&c), Err(Error::NotA2Cocycle)));
    }

    #[test]
    fn obstruction_class_ignores_the_lift_choice() {
        // Changing the zero-fill lift by a slice 1-cochain t moves the
        // obstruction by exactly the coboundary of t, including t(1) != 0
        // which denormalizes the cochain.
        let sup = corner_deleted(2);
        let big = Support::full(2).unwrap();
        let m3 = modulus(3);
        let c4 = make_cyclic(4).unwrap();
        let chi = Character::from_generator_value(&c4, m3, 2).unwrap();
        let a1 = ScalarCocycle1::from_generator_value(&chi, 1).unwrap();
        let a2 = ScalarCocycle1::from_generator_value(&chi, 2).unwrap();
        let rho = Cocycle1::new(
            chi.clone(),
            (0..4u16)
                .map(|g| {
                    PartialMatrix::from_slots(&sup, m3, vec![a1.value(g), a2.value(g)]).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let window = Window::new(&sup, &big).unwrap();
        let c0 = obstruction2(&rho, &window, None).unwrap();
        assert!(c0.is_2cocycle());

        let t: Vec<Vec<u64>> = vec![vec![2], vec![0], vec![1], vec![2]];
        let lifts: Vec<PartialMatrix> = (0..4u16)
            .map(|g| {
                let mut entries = rho.value(g).zero_fill(&big).unwrap().entries().to_vec();
                let corner = big.slot_of(1, 3).unwrap();
                entries[corner] = t[g as usize][0];
                PartialMatrix::from_slots(&big, m3, entries).unwrap()
            })
            .collect();
        let c1 = obstruction2(&rho, &window, Some(&lifts)).unwrap();
        let dt = Cochain2Abelian::coboundary(&chi, &window, &t).unwrap();
        assert_eq!(c1, c0.add(&dt).unwrap());

        // c1 is not normalized (t(1) != 0) and still solves.
        assert_ne!(c1.value(0, 0), [0]);
        let beta = solve_coboundary(&c1).unwrap().expect("same class as c0");
        assert!(coboundary_matches(&c1, &beta));
    }

    #[test]
    fn chain_lift_assembles_runs_and_corrects_corners() {
        // Full Z on n=2 over m=5: the two-step chain ends with a forced
        // corner correction, and the superdiagonal survives untouched.
        let m5 = modulus(5);
        let c2 = make_cyclic(2).unwrap();
        let chi = Character::from_generator_value(&c2, m5, 4).unwrap();
        let z = LevelSet::full(2).unwrap();
        let t1 = ScalarCocycle1::from_generator_value(&chi, 1).unwrap();
        let t2 = ScalarCocycle1::from_generator_value(&chi, 2).unwrap();
        let rho = match chain_lift(&[t1.clone(), t2.clone()], &z, &chi, None).unwrap() {
            ChainOutcome::Lifted(rho) => rho,
            ChainOutcome::Obstructed { band, .. } => panic!("obstructed at band {band}"),
        };
        assert_eq!(rho.support().n(), 2);
        assert_eq!(rho.value(1).entry(1, 2), Some(1));
        assert_eq!(rho.value(1).entry(2, 3), Some(2));
        // beta(s) = 4 solves the corner congruence, and the correction
        // negates it into the entry.
        assert_eq!(rho.value(1).entry(1, 3), Some(1));

        // The C2/m=2 no-lift pair surfaces as an obstruction at band 2.
        let m2 = modulus(2);
        let triv = Character::trivial(&c2, m2);
        let u1 = ScalarCocycle1::from_generator_value(&triv, 1).unwrap();
        match chain_lift(&[u1.clone(), u1.clone()], &z, &triv, None).unwrap() {
            ChainOutcome::Obstructed { band, obstruction } => {
                assert_eq!(band, 2);
                assert_eq!(obstruction.value(1, 1), [1]);
            }
            ChainOutcome::Lifted(_) => panic!("this class does not lift"),
        }

        // Stopping at the corner-deleted top skips the obstructed step.
        let ubar = *corner_deleted(2).set();
        match chain_lift(&[u1.clone(), u1], &z, &triv, Some(&ubar)).unwrap() {
            ChainOutcome::Lifted(rho) => assert_eq!(rho.support().set(), &ubar),
            ChainOutcome::Obstructed { .. } => panic!("nothing to obstruct below the corner"),
        }
    }

    #[test]
    fn chain_lift_with_empty_z_is_direct_assembly() {
        // Z empty: one run covers everything, T(,1) is already full, and
        // the entries are a^d / d!.
        let m5 = modulus(5);
        let c2 = make_cyclic(2).unwrap();
        let chi = Character::from_generator_value(&c2, m5, 4).unwrap();
        let z = LevelSet::empty(2).unwrap();
        let a = ScalarCocycle1::from_generator_value(&chi, 1).unwrap();
        let rho = match chain_lift(&[a.clone(), a.clone()], &z, &chi, None).unwrap() {
            ChainOutcome::Lifted(rho) => rho,
            ChainOutcome::Obstructed { band, .. } => panic!("obstructed at band {band}"),
        };
        // a(s) = 1, so the matrix is xi(1): entries (1, 1, inv(2)) = 3.
        assert_eq!(rho.value(1).entry(1, 2), Some(1));
        assert_eq!(rho.value(1).entry(2, 3), Some(1));
        assert_eq!(rho.value(1).entry(1, 3), Some(3));

        // Unequal values on one run are refused.
        let b = ScalarCocycle1::from_generator_value(&chi, 2).unwrap();
        assert!(matches!(
            chain_lift(&[a.clone(), b], &z, &chi, None),
            Err(Error::RunValueMismatch { position: 2 })
        ));

        // Depth 2 needs 2 invertible; over m=2 it is not.
        let m2 = modulus(2);
        let triv = Character::trivial(&c2, m2);
        let u = ScalarCocycle1::from_generator_value(&triv, 1).unwrap();
        assert!(matches!(
            chain_lift(&[u.clone(), u], &z, &triv, None),
            Err(Error::FactorialNotInvertible { depth: 2, m: 2 })
        ));
    }

    #[test]
    fn chain_lift_matches_word_runs() {
        // w = yxy gives Z = {1,3}: the only run is position 2, the chain
        // is two genuine steps, and zero superdiagonals lift to zero.
        let w = WordSpec::parse("y x y").unwrap();
        let z = w.z_against(&Letter::new("x").unwrap());
        assert_eq!(z.elems(), [1, 3]);
        let m3 = modulus(3);
        let c3 = make_cyclic(3).unwrap();
        let chi = Character::trivial(&c3, m3);
        let zero = ScalarCocycle1::zero(chi.clone());
        match chain_lift(&[zero.clone(), zero.clone(), zero], &z, &chi, None).unwrap() {
            ChainOutcome::Lifted(rho) => {
                assert!(rho.values().iter().all(|v| v.is_identity()));
                assert_eq!(rho.support().n(), 3);
            }
            ChainOutcome::Obstructed { band, .. } => panic!("obstructed at band {band}"),
        }
    }

    use crate::indexsets::Letter;

    #[test]
    fn massey_reduces_to_the_single_cup_for_n_two() {
        let sup = corner_deleted(2);
        let m3 = modulus(3);
        let c4 = make_cyclic(4).unwrap();
        let chi = Character::from_generator_value(&c4, m3, 2).unwrap();
        let a1 = ScalarCocycle1::from_generator_value(&chi, 1).unwrap();
        let a2 = ScalarCocycle1::from_generator_value(&chi, 2).unwrap();
        let rho = Cocycle1::new(
            chi.clone(),
            (0..4u16)
                .map(|g| {
                    PartialMatrix::from_slots(&sup, m3, vec![a1.value(g), a2.value(g)]).unwrap()
                })
                .collect(),
        )
        .unwrap();

        let report = massey_sum(&rho, &[0, 0, 0, 0]).unwrap();
        assert!(report.identity_holds);
        assert!(report.corner_coboundary.is_zero());
        assert!(report.cup_sum.is_2cocycle());
        // (a cup b)(g,h) = a(g) chi(g) b(h), and with a zero corner the
        // obstruction is the cup itself.
        let m = m3;
        for g in 0..4u16 {
            for h in 0..4u16 {
                let expect = m.mul(m.mul(a1.value(g), chi.value(g)), a2.value(h));
                assert_eq!(report.cup_sum.value(g, h), [expect]);
            }
        }
        assert_eq!(report.obstruction, report.cup_sum);

        // Arbitrary corners shift the obstruction by an exact coboundary.
        let report = massey_sum(&rho, &[2, 1, 0, 2]).unwrap();
        assert!(report.identity_holds);
        assert!(!report.corner_coboundary.is_zero());

        // Zero superdiagonals kill the cup sum.
        let zero = Cocycle1::zero(chi.clone(), &sup);
        let report = massey_sum(&zero, &[1, 2, 0, 1]).unwrap();
        assert!(report.cup_sum.is_zero());
        assert!(report.identity_holds);
    }

    #[test]
    fn massey_identity_holds_pointwise_on_longer_words() {
        // n = 3 over m = 5 with chi(s) = 4: the band-2 congruences have a
        // unit coefficient, so the chain below the corner always lifts and
        // produces valid random-ish inputs from superdiagonal seeds.
        let m5 = modulus(5);
        let c4 = make_cyclic(4).unwrap();
        let chi = Character::from_generator_value(&c4, m5, 4).unwrap();
        let z = LevelSet::full(3).unwrap();
        let ubar = *corner_deleted(3).set();
        for seed in 0..(5 * 5 * 5u64) {
            let d = [seed % 5, (seed / 5) % 5, (seed / 25) % 5];
            let targets: Vec<ScalarCocycle1> = d
                .iter()
                .map(|&di| ScalarCocycle1::from_generator_value(&chi, di).unwrap())
                .collect();
            let rho = match chain_lift(&targets, &z, &chi, Some(&ubar)).unwrap() {
                ChainOutcome::Lifted(rho) => rho,
                ChainOutcome::Obstructed { band, .. } => {
                    panic!("band {band} should not obstruct below the corner")
                }
            };
            let corner = [seed % 5, (seed * 7 + 1) % 5, (seed * 3 + 2) % 5, 0];
            let report = massey_sum(&rho, &corner).unwrap();
            assert!(report.identity_holds, "identity failed at seed {seed}");
            assert!(report.obstruction.is_2cocycle());
        }
    }

    #[test]
    fn semidirect_products_validate_and_detect_cocycles() {
        let m2 = modulus(2);
        let c2 = make_cyclic(2).unwrap();
        let full = ConvexSet::full(2).unwrap();
        let triv = Character::trivial(&c2, m2);
        // |U| = 8 over m=2 and |G| = 2: the table of order 16 passes the
        // validating constructor, which includes associativity.
        let sd = semidirect(&full, &triv).unwrap();
        assert_eq!(sd.order(), 16);

        // Trivial G: the product is U_T itself.
        let c1 = make_cyclic(1).unwrap();
        let sd8 = semidirect(&full, &Character::trivial(&c1, m2)).unwrap();
        assert_eq!(sd8.order(), 8);

        // The homomorphism test g -> (rho(g), g): holds exactly for
        // cocycle values. Element (u, g) has index u_index * |G| + g with
        // u_index the odometer position, i.e. little-endian digits of u.
        let sup = Support::full(2).unwrap();
        let embed = |mat: &PartialMatrix, g: u16| -> u16 {
            let mut idx = 0u64;
            for (k, &e) in mat.entries().iter().enumerate() {
                idx += e << k;
            }
            (idx * 2 + g as u64) as u16
        };
        let good = PartialMatrix::from_slots(&sup, m2, vec![1, 0, 0]).unwrap();
        let idm = PartialMatrix::identity(&sup, m2);
        let rho = [idm.clone(), good];
        let hom = |rho: &[PartialMatrix]| {
            (0..2u16).all(|g| {
                (0..2u16).all(|h| {
                    let lhs = sd.mul(embed(&rho[g as usize], g), embed(&rho[h as usize], h));
                    lhs == embed(&rho[c2.mul(g, h) as usize], c2.mul(g, h))
                })
            })
        };
        assert!(hom(&rho));
        assert!(is_cocycle1(&triv, &rho).unwrap());

        let bad = [idm, PartialMatrix::from_slots(&sup, m2, vec![1, 0, 1]).unwrap()];
        assert!(!hom(&bad));
        assert!(!is_cocycle1(&triv, &bad).unwrap());

        // Cap: m=2, n=3 has |U| = 64, times |G| = 2 is over the table cap.
        let full3 = ConvexSet::full(3).unwrap();
        assert!(matches!(semidirect(&full3, &triv), Err(Error::GroupCap { order: 128, cap: 64 })));
    }
}
