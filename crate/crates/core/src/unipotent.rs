//! Partial unipotent upper-triangular matrices over Z/m.
//!
//! A convex index set T carves the group U_T out of the full unipotent
//! group: elements keep only the entries at pairs in T, and the product of
//! two elements is the matrix product with the sum truncated to T, which
//! convexity makes associative. The diagonal is implicitly all ones and is
//! never stored.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{factorial, gcd, Modulus};
use crate::indexsets::{pair_index, ConvexSet, IndexPair, Letter, WordSpec};
use crate::{Error, Result};

const NO_SLOT: u16 = u16::MAX;

/// Shared, precomputed layout for one convex support: the strict pairs in
/// lexicographic order (the entry storage order), a pair -> slot lookup,
/// and the triple table driving multiplication. Matrices on the same
/// support share one `Arc<Support>`.
pub struct Support {
    set: ConvexSet,
    strict: Vec<IndexPair>,
    slot_lookup: Vec<u16>,
    depth: Vec<u8>,
    /// Slots sorted by increasing band depth j-i; inversion resolves
    /// entries in this order.
    by_depth: Vec<u16>,
    /// Flattened (left, right) factor slots per destination slot: entry
    /// c[dst] accumulates a[left] * b[right] over i < k < j.
    terms: Vec<(u16, u16)>,
    term_ranges: Vec<(u32, u32)>,
}

impl Support {
    pub fn new(set: ConvexSet) -> Arc<Support> {
        let n = set.n();
        let strict = set.strict_pairs();
        let mut slot_lookup = vec![NO_SLOT; (n as usize + 1) * (n as usize + 2) / 2];
        for (s, &(i, j)) in strict.iter().enumerate() {
            slot_lookup[pair_index(n, i, j)] = s as u16;
        }
        let depth: Vec<u8> = strict.iter().map(|&(i, j)| j - i).collect();
        let mut by_depth: Vec<u16> = (0..strict.len() as u16).collect();
        by_depth.sort_by_key(|&s| depth[s as usize]);
        let mut terms = Vec::new();
        let mut term_ranges = Vec::with_capacity(strict.len());
        for &(i, j) in &strict {
            let start = terms.len() as u32;
            for k in i + 1..j {
                // Convexity puts (i,k) and (k,j) in the support whenever
                // (i,j) is, so the lookups cannot miss.
                let l = slot_lookup[pair_index(n, i, k)];
                let r = slot_lookup[pair_index(n, k, j)];
                debug_assert!(l != NO_SLOT && r != NO_SLOT);
                terms.push((l, r));
            }
            term_ranges.push((start, terms.len() as u32));
        }
        Arc::new(Support { set, strict, slot_lookup, depth, by_depth, terms, term_ranges })
    }

    pub fn full(n: u8) -> Result<Arc<Support>> {
        Ok(Self::new(ConvexSet::full(n)?))
    }

    pub fn set(&self) -> &ConvexSet {
        &self.set
    }

    pub fn n(&self) -> u8 {
        self.set.n()
    }

    /// Strict pairs in entry-storage (lexicographic) order.
    pub fn strict_pairs(&self) -> &[IndexPair] {
        &self.strict
    }

    pub fn slots(&self) -> usize {
        self.strict.len()
    }

    pub fn slot_of(&self, i: u8, j: u8) -> Option<usize> {
        if !self.set.contains(i, j) || i == j {
            return None;
        }
        Some(self.slot_lookup[pair_index(self.n(), i, j)] as usize)
    }

    /// Band depth j - i of a slot.
    pub fn depth_of(&self, slot: usize) -> u8 {
        self.depth[slot]
    }

    /// The (left, right) factor slots feeding `dst` in a product, i.e. the
    /// (i,k),(k,j) splittings with i < k < j.
    pub(crate) fn product_terms(&self, dst: usize) -> &[(u16, u16)] {
        let (lo, hi) = self.term_ranges[dst];
        &self.terms[lo as usize..hi as usize]
    }

    /// Number of elements of U_T over Z/m, as u128 to survive desk-scale
    /// counting; None if it overflows even that.
    pub fn element_count(&self, m: Modulus) -> Option<u128> {
        let mut acc: u128 = 1;
        for _ in 0..self.slots() {
            acc = acc.checked_mul(m.get() as u128)?;
        }
        Some(acc)
    }

    // --- allocation-free kernels -----------------------------------------
    //
    // The sweeps in the test suites iterate over hundreds of millions of
    // matrices; these raw-slice versions are the same arithmetic as the
    // PartialMatrix methods without the per-call allocation.

    /// out = a * b on this support.
    pub fn mul_entries(&self, m: Modulus, a: &[u64], b: &[u64], out: &mut [u64]) {
        let md = m.get();
        for dst in 0..self.strict.len() {
            let (lo, hi) = self.term_ranges[dst];
            let mut acc = a[dst] + b[dst];
            for &(l, r) in &self.terms[lo as usize..hi as usize] {
                acc += a[l as usize] * b[r as usize] % md;
            }
            out[dst] = acc % md;
        }
    }

    /// out = a^{-1} on this support.
    pub fn inv_entries(&self, m: Modulus, a: &[u64], out: &mut [u64]) {
        let md = m.get();
        for &slot in &self.by_depth {
            let dst = slot as usize;
            let (lo, hi) = self.term_ranges[dst];
            let mut acc = a[dst] % md;
            for &(l, r) in &self.terms[lo as usize..hi as usize] {
                // right factors are strictly shallower, already resolved
                acc = (acc + a[l as usize] * out[r as usize]) % md;
            }
            out[dst] = if acc == 0 { 0 } else { md - acc };
        }
    }

    /// out = a^{-1} b^{-1} a b = (ba)^{-1}(ab), using two scratch buffers.
    pub fn commutator_entries(
        &self,
        m: Modulus,
        a: &[u64],
        b: &[u64],
        scratch1: &mut [u64],
        scratch2: &mut [u64],
        out: &mut [u64],
    ) {
        self.mul_entries(m, a, b, scratch1); // ab
        self.mul_entries(m, b, a, out); // ba
        self.inv_entries(m, out, scratch2); // (ba)^{-1}
        self.mul_entries(m, scratch2, scratch1, out);
    }
}

/// A unit twist value, validated against its modulus.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TwistValue {
    lambda: u64,
    m: Modulus,
}

impl TwistValue {
    pub fn new(m: Modulus, lambda: u64) -> Result<Self> {
        let lambda = m.reduce(lambda);
        if !m.is_unit(lambda) {
            return Err(Error::NotAUnit { value: lambda, m: m.get() });
        }
        Ok(TwistValue { lambda, m })
    }

    pub fn get(self) -> u64 {
        self.lambda
    }

    pub fn modulus(self) -> Modulus {
        self.m
    }
}

/// A partial unipotent matrix: unit diagonal (implicit), entries at the
/// strict pairs of a convex support, reduced modulo m.
#[derive(Clone)]
pub struct PartialMatrix {
    sup: Arc<Support>,
    m: Modulus,
    e: Vec<u64>,
}

impl PartialMatrix {
    pub fn identity(sup: &Arc<Support>, m: Modulus) -> Self {
        PartialMatrix { sup: sup.clone(), m, e: vec![0; sup.slots()] }
    }

    pub fn from_entries(
        sup: &Arc<Support>,
        m: Modulus,
        entries: &[(IndexPair, u64)],
    ) -> Result<Self> {
        let mut mat = Self::identity(sup, m);
        for &((i, j), v) in entries {
            let slot = sup.slot_of(i, j).ok_or(Error::OutsideSupport { i, j })?;
            mat.e[slot] = m.reduce(v);
        }
        Ok(mat)
    }

    /// Entry vector in slot order; the raw-kernel counterpart of `entry`.
    pub fn entries(&self) -> &[u64] {
        &self.e
    }

    pub fn from_slots(sup: &Arc<Support>, m: Modulus, e: Vec<u64>) -> Result<Self> {
        if e.len() != sup.slots() {
            return Err(Error::ShapeMismatch);
        }
        let e = e.into_iter().map(|v| m.reduce(v)).collect();
        Ok(PartialMatrix { sup: sup.clone(), m, e })
    }

    pub fn support(&self) -> &Arc<Support> {
        &self.sup
    }

    pub fn modulus(&self) -> Modulus {
        self.m
    }

    pub fn n(&self) -> u8 {
        self.sup.n()
    }

    /// 1 on the diagonal, the stored value inside the support, None outside.
    pub fn entry(&self, i: u8, j: u8) -> Option<u64> {
        if i == j && i >= 1 && i <= self.n() + 1 {
            return Some(1 % self.m.get());
        }
        self.sup.slot_of(i, j).map(|s| self.e[s])
    }

    pub fn is_identity(&self) -> bool {
        self.e.iter().all(|&v| v == 0)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        let same_sup = Arc::ptr_eq(&self.sup, &other.sup) || self.sup.set == other.sup.set;
        if !same_sup || self.m != other.m {
            return Err(Error::ShapeMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = vec![0; self.e.len()];
        self.sup.mul_entries(self.m, &self.e, &other.e, &mut out);
        Ok(PartialMatrix { sup: self.sup.clone(), m: self.m, e: out })
    }

    pub fn inverse(&self) -> Self {
        let mut out = vec![0; self.e.len()];
        self.sup.inv_entries(self.m, &self.e, &mut out);
        PartialMatrix { sup: self.sup.clone(), m: self.m, e: out }
    }

    /// [M, N] = M^{-1} N^{-1} M N.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mn = self.mul(other)?;
        let nm = other.mul(self)?;
        Ok(nm.inverse().mul(&mn).expect("same support"))
    }

    pub fn pow(&self, e: i64) -> Self {
        // With every needed factorial invertible the group has exponent m,
        // so the exponent may be reduced; otherwise square-and-multiply on
        // the magnitude.
        let max_depth = self.sup.strict_pairs().iter().map(|&(i, j)| j - i).max().unwrap_or(0);
        let m = self.m.get();
        let reducible = gcd(factorial(max_depth), m) == 1;
        let (base, mut exp) = if reducible {
            (self.clone(), self.m.reduce_signed(e))
        } else if e < 0 {
            (self.inverse(), e.unsigned_abs())
        } else {
            (self.clone(), e as u64)
        };
        let mut acc = Self::identity(&self.sup, self.m);
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&sq).expect("same support");
            }
            sq = sq.mul(&sq).expect("same support");
            exp >>= 1;
        }
        acc
    }

    /// Restriction to a smaller support (a group homomorphism U_T -> U_T').
    pub fn project(&self, sub: &Arc<Support>) -> Result<Self> {
        if !sub.set.is_subset(&self.sup.set) {
            return Err(Error::NotASubset);
        }
        let mut out = Self::identity(sub, self.m);
        for (s, &(i, j)) in sub.strict_pairs().iter().enumerate() {
            out.e[s] = self.e[self.sup.slot_of(i, j).expect("subset")];
        }
        Ok(out)
    }

    /// The set-theoretic section into a bigger support: copied entries,
    /// zeros on the new slots. Not a homomorphism; it is the canonical
    /// lift choice for the obstruction calculus.
    pub fn zero_fill(&self, big: &Arc<Support>) -> Result<Self> {
        if !self.sup.set.is_subset(&big.set) {
            return Err(Error::NotASubset);
        }
        let mut out = Self::identity(big, self.m);
        for (s, &(i, j)) in self.sup.strict_pairs().iter().enumerate() {
            out.e[big.slot_of(i, j).expect("superset")] = self.e[s];
        }
        Ok(out)
    }

    /// R_T: zero out all entries off T, keep the support. For T = T_{w,x}
    /// this is a group endomorphism of U; for general convex T it is just
    /// the entry truncation.
    pub fn retract(&self, t: &ConvexSet) -> Result<Self> {
        if t.n() != self.n() {
            return Err(Error::ShapeMismatch);
        }
        let mut out = self.clone();
        for (s, &(i, j)) in self.sup.strict_pairs().iter().enumerate() {
            if !t.contains(i, j) {
                out.e[s] = 0;
            }
        }
        Ok(out)
    }

    /// Is the matrix in V_T = Ker(U_support -> U_T)? Requires T to be
    /// contained in the support so that the projection exists.
    pub fn in_kernel(&self, t: &ConvexSet) -> Result<bool> {
        if !t.is_subset(&self.sup.set) {
            return Err(Error::NotASubset);
        }
        for &(i, j) in &t.strict_pairs() {
            if self.e[self.sup.slot_of(i, j).expect("subset")] != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The twisted action: entry (i,j) is multiplied by lambda^(j-i).
    pub fn twist(&self, lambda: TwistValue) -> Result<Self> {
        if lambda.modulus() != self.m {
            return Err(Error::ShapeMismatch);
        }
        let mut out = self.clone();
        for s in 0..out.e.len() {
            let d = self.sup.depth_of(s) as u64;
            out.e[s] = self.m.mul(out.e[s], self.m.pow(lambda.get(), d));
        }
        Ok(out)
    }

    /// Entry (i,j) -> (-1)^(j-i) * entry. An automorphism of U_T.
    pub fn sign_automorphism(&self) -> Self {
        let mut out = self.clone();
        for s in 0..out.e.len() {
            if self.sup.depth_of(s) % 2 == 1 {
                out.e[s] = self.m.neg(out.e[s]);
            }
        }
        out
    }
}

impl PartialEq for PartialMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.sup.set == other.sup.set && self.m == other.m && self.e == other.e
    }
}
impl Eq for PartialMatrix {}

impl core::fmt::Debug for PartialMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "PartialMatrix(n={}, m={}, [", self.n(), self.m.get())?;
        for (s, &(i, j)) in self.sup.strict_pairs().iter().enumerate() {
            if s > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({i},{j})={}", self.e[s])?;
        }
        write!(f, "])")
    }
}

/// ξ(α): the matrix with entry α^(j-i)/(j-i)! at every pair. Defined on
/// the full triangle; requires gcd(n!, m) = 1. A homomorphism from the
/// additive group of Z/m into U.
pub fn xi(sup: &Arc<Support>, m: Modulus, alpha: u64) -> Result<PartialMatrix> {
    xi_on(sup, m, alpha).map_err(|e| match e {
        Error::FactorialNotInvertible { .. } => {
            Error::FactorialModulusClash { n: sup.n(), m: m.get() }
        }
        other => other,
    })
}

/// ξ(α) on a restricted support: only the factorials (j-i)! for pairs
/// actually present must be invertible. This is the per-entry relaxation
/// that makes ξ usable on one-exception supports even when gcd(n!, m) > 1.
pub fn xi_on(sup: &Arc<Support>, m: Modulus, alpha: u64) -> Result<PartialMatrix> {
    let alpha = m.reduce(alpha);
    let mut out = PartialMatrix::identity(sup, m);
    for (s, &(i, j)) in sup.strict_pairs().iter().enumerate() {
        let d = j - i;
        let fact = m.reduce(factorial(d));
        let inv =
            m.inv(fact).map_err(|_| Error::FactorialNotInvertible { depth: d, m: m.get() })?;
        out.e[s] = m.mul(m.pow(alpha, d as u64), inv);
    }
    Ok(out)
}

/// ξ(α) for an integer α divisible by n!: entries α^(j-i)/(j-i)! are then
/// integers, computed exactly and reduced, with no invertibility demand.
pub fn xi_multiple(sup: &Arc<Support>, m: Modulus, alpha: i64) -> Result<PartialMatrix> {
    let n = sup.n();
    let nfact = factorial(n) as i64;
    if alpha % nfact != 0 {
        return Err(Error::NotDivisibleByFactorial { n });
    }
    let alpha_mod = m.reduce_signed(alpha);
    let mut out = PartialMatrix::identity(sup, m);
    for (s, &(i, j)) in sup.strict_pairs().iter().enumerate() {
        let d = j - i;
        // alpha^d / d! = (alpha / d!) * alpha^(d-1), an exact integer split.
        let div = m.reduce_signed(alpha / factorial(d) as i64);
        out.e[s] = m.mul(div, m.pow(alpha_mod, d as u64 - 1));
    }
    Ok(out)
}

/// The generator image of the word homomorphism: R_{T_{w,a}}(ξ(α)).
pub fn phi_generator(
    sup: &Arc<Support>,
    m: Modulus,
    w: &WordSpec,
    a: &Letter,
    alpha: u64,
) -> Result<PartialMatrix> {
    if sup.n() != w.len() || sup.set != ConvexSet::full(w.len())? {
        return Err(Error::ShapeMismatch);
    }
    let sets = w.word_sets(a)?;
    xi(sup, m, alpha)?.retract(&sets.runs)
}

/// Split M in U (full support) as M = v * u with u = R_{T_{w,x}}(M) and
/// v in V_{T_{w,x}}. The factorization is unique.
pub fn semidirect_factor(
    mat: &PartialMatrix,
    w: &WordSpec,
    x: &Letter,
) -> Result<(PartialMatrix, PartialMatrix)> {
    if mat.sup.set != ConvexSet::full(mat.n())? || w.len() != mat.n() {
        return Err(Error::ShapeMismatch);
    }
    let sets = w.word_sets(x)?;
    let u = mat.retract(&sets.runs)?;
    let v = mat.mul(&u.inverse())?;
    debug_assert_eq!(v.in_kernel(&sets.runs), Ok(true));
    Ok((v, u))
}

/// Visit every element of U_T over Z/m (odometer over entry slots). The
/// callback returns false to stop early; the function reports whether the
/// sweep ran to completion.
pub fn for_each_matrix(
    sup: &Arc<Support>,
    m: Modulus,
    mut f: impl FnMut(&PartialMatrix) -> bool,
) -> bool {
    let mut mat = PartialMatrix::identity(sup, m);
    loop {
        if !f(&mat) {
            return false;
        }
        // odometer increment
        let mut s = 0;
        loop {
            if s == mat.e.len() {
                return true;
            }
            mat.e[s] += 1;
            if mat.e[s] < m.get() {
                break;
            }
            mat.e[s] = 0;
            s += 1;
        }
    }
}

/// Visit every element of V_T inside U (full support): entries range over
/// the slots off T, zeros on T.
pub fn for_each_kernel_matrix(
    full: &Arc<Support>,
    t: &ConvexSet,
    m: Modulus,
    mut f: impl FnMut(&PartialMatrix) -> bool,
) -> Result<bool> {
    if !t.is_subset(&full.set) {
        return Err(Error::NotASubset);
    }
    let free: Vec<usize> = full
        .strict_pairs()
        .iter()
        .enumerate()
        .filter(|&(_, &(i, j))| !t.contains(i, j))
        .map(|(s, _)| s)
        .collect();
    let mut mat = PartialMatrix::identity(full, m);
    loop {
        if !f(&mat) {
            return Ok(false);
        }
        let mut idx = 0;
        loop {
            if idx == free.len() {
                return Ok(true);
            }
            let s = free[idx];
            mat.e[s] += 1;
            if mat.e[s] < m.get() {
                break;
            }
            mat.e[s] = 0;
            idx += 1;
        }
    }
}
