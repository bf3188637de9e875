//! The graded Lie algebra attached to a level set Z: degree-t piece
//! V_{T(Z,t)} / V_{T(Z,t+1)}, with the bracket induced by group
//! commutators. Degrees outside 1..=|Z| carry only the zero element, so
//! pieces are built on demand and never materialized as a direct sum.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::Modulus;
use crate::indexsets::{ConvexSet, IndexPair, LevelSet};
use crate::unipotent::{PartialMatrix, Support};
use crate::{Error, Result};

/// Position of a matrix in the V_{T(Z,t)} chain. `NotFiltered` is the
/// "grade 0" answer for matrices outside V_{T(Z,1)}; the identity sits
/// below every level.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Grade {
    NotFiltered,
    Finite(u32),
    Infinite,
}

impl Grade {
    /// Numeric view used by the grade inequalities: 0 for unfiltered,
    /// u32::MAX standing in for infinity.
    pub fn as_number(self) -> u32 {
        match self {
            Grade::NotFiltered => 0,
            Grade::Finite(t) => t,
            Grade::Infinite => u32::MAX,
        }
    }
}

/// Largest t with M ∈ V_{T(Z,t)}. M must live on the full triangle.
pub fn grade_of(mat: &PartialMatrix, z: &LevelSet) -> Result<Grade> {
    let n = z.n();
    if mat.n() != n || *mat.support().set() != ConvexSet::full(n)? {
        return Err(Error::ShapeMismatch);
    }
    if mat.is_identity() {
        return Ok(Grade::Infinite);
    }
    let mut best = 0;
    for t in 1..=z.len() {
        if mat.in_kernel(&ConvexSet::t_set(z, t)?)? {
            best = t;
        } else {
            break;
        }
    }
    if best == 0 {
        Ok(Grade::NotFiltered)
    } else {
        Ok(Grade::Finite(best))
    }
}

/// An element of the degree-t quotient V_{T(Z,t)} / V_{T(Z,t+1)},
/// stored as its canonical representative: the entries at the window
/// T(Z,t+1) ∖ T(Z,t), everything else zero.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedElement {
    z: LevelSet,
    m: Modulus,
    t: u32,
    window: Vec<IndexPair>,
    rep: Vec<u64>,
}

fn window_pairs(z: &LevelSet, t: u32) -> Result<Vec<IndexPair>> {
    let low = ConvexSet::t_set(z, t)?;
    let high = ConvexSet::t_set(z, t + 1)?;
    Ok(high.strict_pairs().into_iter().filter(|&(i, j)| !low.contains(i, j)).collect())
}

impl GradedElement {
    pub fn zero(z: &LevelSet, m: Modulus, t: u32) -> Result<Self> {
        let window = window_pairs(z, t)?;
        let rep = vec![0; window.len()];
        Ok(GradedElement { z: *z, m, t, window, rep })
    }

    /// Reduce a matrix in V_{T(Z,t)} to its degree-t class.
    pub fn to_graded(mat: &PartialMatrix, z: &LevelSet, t: u32) -> Result<Self> {
        let n = z.n();
        if mat.n() != n || *mat.support().set() != ConvexSet::full(n)? {
            return Err(Error::ShapeMismatch);
        }
        if !mat.in_kernel(&ConvexSet::t_set(z, t)?)? {
            return Err(Error::NotInFiltration { t });
        }
        let mut out = Self::zero(z, mat.modulus(), t)?;
        for (s, &(i, j)) in out.window.iter().enumerate() {
            out.rep[s] = mat.entry(i, j).expect("window pair inside full support");
        }
        Ok(out)
    }

    pub fn z(&self) -> &LevelSet {
        &self.z
    }

    pub fn n(&self) -> u8 {
        self.z.n()
    }

    pub fn modulus(&self) -> Modulus {
        self.m
    }

    pub fn degree(&self) -> u32 {
        self.t
    }

    /// Window pairs in lexicographic order, aligned with `rep`.
    pub fn window(&self) -> &[IndexPair] {
        &self.window
    }

    pub fn rep(&self) -> &[u64] {
        &self.rep
    }

    pub fn coefficient(&self, i: u8, j: u8) -> Option<u64> {
        self.window.iter().position(|&p| p == (i, j)).map(|s| self.rep[s])
    }

    pub fn is_zero(&self) -> bool {
        self.rep.iter().all(|&v| v == 0)
    }

    /// The canonical lift: window entries placed on the full triangle.
    pub fn lift(&self) -> Result<PartialMatrix> {
        let sup = Support::full(self.n())?;
        let entries: Vec<(IndexPair, u64)> =
            self.window.iter().copied().zip(self.rep.iter().copied()).collect();
        PartialMatrix::from_entries(&sup, self.m, &entries)
    }

    fn same_piece(&self, other: &Self) -> Result<()> {
        if self.t != other.t {
            return Err(Error::DegreeMismatch { left: self.t, right: other.t });
        }
        if self.z != other.z || self.m != other.m {
            return Err(Error::ShapeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_piece(other)?;
        let mut out = self.clone();
        for (s, v) in other.rep.iter().enumerate() {
            out.rep[s] = self.m.add(out.rep[s], *v);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.rep {
            *v = self.m.neg(*v);
        }
        out
    }

    /// The induced bracket gr_t × gr_s -> gr_{t+s}: lift, commutate,
    /// reduce. Any lifts work; the canonical ones are used.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if self.z != other.z || self.m != other.m {
            return Err(Error::ShapeMismatch);
        }
        let c = self.lift()?.commutator(&other.lift()?)?;
        GradedElement::to_graded(&c, &self.z, self.t + other.t)
    }

    /// Z' ⊆ Z induces gr_t(Z') -> gr_t(Z): lift and reduce in the finer
    /// filtration. A graded Lie algebra homomorphism.
    pub fn functorial_map(&self, z: &LevelSet) -> Result<Self> {
        if !self.z.is_subset(z) {
            return Err(Error::NotASubset);
        }
        GradedElement::to_graded(&self.lift()?, z, self.t)
    }
}

impl core::fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "GradedElement(deg={}, [", self.t)?;
        for (s, &(i, j)) in self.window.iter().enumerate() {
            if s > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({i},{j})={}", self.rep[s])?;
        }
        write!(f, "])")
    }
}

/// Shared scaffolding for exhaustive sweeps: all (matrix, grade) data for
/// one Z is expensive to recompute per property, so the tests and the
/// verification suites both enumerate through this helper.
pub fn for_each_filtration_member(
    z: &LevelSet,
    m: Modulus,
    t: u32,
    mut f: impl FnMut(&PartialMatrix) -> bool,
) -> Result<bool> {
    let sup = Support::full(z.n())?;
    let low = ConvexSet::t_set(z, t)?;
    crate::unipotent::for_each_kernel_matrix(&sup, &low, m, |mat| f(mat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unipotent::for_each_matrix;

    fn m(v: u64) -> Modulus {
        Modulus::new(v).unwrap()
    }

    fn z(n: u8, elems: &[u8]) -> LevelSet {
        LevelSet::new(n, elems).unwrap()
    }

    fn full_mat(n: u8, md: Modulus, entries: &[(IndexPair, u64)]) -> PartialMatrix {
        PartialMatrix::from_entries(&Support::full(n).unwrap(), md, entries).unwrap()
    }

    #[test]
    fn grade_frozen_examples() {
        let md = m(5);
        let zz = z(3, &[1, 3]);
        let id = PartialMatrix::identity(&Support::full(3).unwrap(), md);
        assert_eq!(grade_of(&id, &zz).unwrap(), Grade::Infinite);
        let only14 = full_mat(3, md, &[((1, 4), 2)]);
        assert_eq!(grade_of(&only14, &zz).unwrap(), Grade::Finite(2));
        let at23 = full_mat(3, md, &[((2, 3), 1)]);
        assert_eq!(grade_of(&at23, &zz).unwrap(), Grade::NotFiltered);
    }

    #[test]
    fn grade_matches_definition_exhaustively() {
        let md = m(2);
        for zz in LevelSet::all(3).unwrap() {
            let sup = Support::full(3).unwrap();
            for_each_matrix(&sup, md, |mat| {
                let got = grade_of(mat, &zz).unwrap();
                let expected = if mat.is_identity() {
                    Grade::Infinite
                } else {
                    let mut best = 0;
                    for t in 1..=zz.len() {
                        let set = ConvexSet::t_set(&zz, t).unwrap();
                        if mat.in_kernel(&set).unwrap() {
                            best = t;
                        }
                    }
                    if best == 0 {
                        Grade::NotFiltered
                    } else {
                        Grade::Finite(best)
                    }
                };
                assert_eq!(got, expected, "{mat:?} Z={:?}", zz.elems());
                true
            });
        }
    }

    #[test]
    fn bandwidth_window_at_degree_one() {
        // Full Z turns the filtration into the bandwidth one; the degree-1
        // window is the superdiagonal.
        let zz = LevelSet::full(4).unwrap();
        let e = GradedElement::zero(&zz, m(5), 1).unwrap();
        assert_eq!(e.window(), &[(1, 2), (2, 3), (3, 4), (4, 5)]);
    }

    #[test]
    fn reduction_forgets_deeper_terms() {
        let md = m(4);
        let zz = z(3, &[1, 2, 3]);
        let a = full_mat(3, md, &[((1, 2), 3), ((1, 3), 1)]);
        let b = full_mat(3, md, &[((1, 2), 3), ((1, 3), 2), ((1, 4), 1)]);
        let ga = GradedElement::to_graded(&a, &zz, 1).unwrap();
        let gb = GradedElement::to_graded(&b, &zz, 1).unwrap();
        assert_eq!(ga, gb);
        assert_eq!(ga.coefficient(1, 2), Some(3));
        assert_eq!(ga.coefficient(1, 3), None);
        // a and b differ by an element one level deeper
        assert_eq!(grade_of(&a.mul(&b.inverse()).unwrap(), &zz).unwrap(), Grade::Finite(2));
    }

    #[test]
    fn to_graded_rejects_shallow_matrices() {
        let md = m(3);
        let zz = z(3, &[1, 2, 3]);
        let a = full_mat(3, md, &[((1, 2), 1)]);
        assert!(matches!(
            GradedElement::to_graded(&a, &zz, 2),
            Err(Error::NotInFiltration { t: 2 })
        ));
    }

    #[test]
    fn addition_is_the_group_law_on_the_quotient() {
        let md = m(3);
        let zz = z(3, &[1, 2]);
        for t in 1..=2 {
            for_each_filtration_member(&zz, md, t, |a| {
                let ga = GradedElement::to_graded(a, &zz, t).unwrap();
                assert_eq!(ga.add(&GradedElement::zero(&zz, md, t).unwrap()).unwrap(), ga);
                for_each_filtration_member(&zz, md, t, |b| {
                    let gb = GradedElement::to_graded(b, &zz, t).unwrap();
                    let sum = GradedElement::to_graded(&a.mul(b).unwrap(), &zz, t).unwrap();
                    assert_eq!(ga.add(&gb).unwrap(), sum);
                    assert_eq!(gb.add(&ga).unwrap(), sum);
                    true
                })
                .unwrap()
            })
            .unwrap();
        }
    }

    fn all_elements(zz: &LevelSet, md: Modulus, t: u32) -> Vec<GradedElement> {
        let mut out = Vec::new();
        for_each_filtration_member(zz, md, t, |mat| {
            out.push(GradedElement::to_graded(mat, zz, t).unwrap());
            true
        })
        .unwrap();
        out.sort_by(|a, b| a.rep.cmp(&b.rep));
        out.dedup();
        out
    }

    #[test]
    fn bracket_laws_small_exhaustive() {
        // Bilinearity, antisymmetry, alternating, Jacobi over the degree-1
        // piece for the bandwidth filtration on n = 3.
        let md = m(3);
        let zz = LevelSet::full(3).unwrap();
        let all = all_elements(&zz, md, 1);
        assert_eq!(all.len(), 27);
        for a in &all {
            assert!(a.bracket(a).unwrap().is_zero());
            for b in &all {
                let ab = a.bracket(b).unwrap();
                let ba = b.bracket(a).unwrap();
                assert!(ab.add(&ba).unwrap().is_zero());
                let a2 = a.add(a).unwrap();
                assert_eq!(a2.bracket(b).unwrap(), ab.add(&ab).unwrap());
                for c in &all {
                    let j1 = a.bracket(&b.bracket(c).unwrap()).unwrap();
                    let j2 = b.bracket(&c.bracket(a).unwrap()).unwrap();
                    let j3 = c.bracket(&a.bracket(b).unwrap()).unwrap();
                    assert!(j1.add(&j2).unwrap().add(&j3).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn bracket_reproduces_elementary_commutators() {
        let md = m(5);
        let zz = LevelSet::full(4).unwrap();
        let e = |i: u8, j: u8, v: u64| full_mat(4, md, &[((i, j), v)]);
        let g = |mat: &PartialMatrix| GradedElement::to_graded(mat, &zz, 1).unwrap();
        // [x_{12}(a), x_{23}(b)] = x_{13}(ab)
        let br = g(&e(1, 2, 2)).bracket(&g(&e(2, 3, 3))).unwrap();
        assert_eq!(br.coefficient(1, 3), Some(6 % 5));
        assert!(g(&e(1, 2, 2)).bracket(&g(&e(3, 4, 3))).unwrap().is_zero());
        // adjacent slots in the other order pick up the sign
        let br_rev = g(&e(2, 3, 3)).bracket(&g(&e(1, 2, 2))).unwrap();
        assert_eq!(br_rev.coefficient(1, 3), Some(md.neg(6 % 5)));
    }

    #[test]
    fn bracket_is_independent_of_lift() {
        let md = m(4);
        let zz = z(3, &[1, 2, 3]);
        let a = full_mat(3, md, &[((1, 2), 1), ((2, 3), 3), ((3, 4), 2)]);
        let ga = GradedElement::to_graded(&a, &zz, 1).unwrap();
        let b = full_mat(3, md, &[((1, 2), 2), ((2, 3), 1)]);
        let gb = GradedElement::to_graded(&b, &zz, 1).unwrap();
        let reference = ga.bracket(&gb).unwrap();
        // Replace the canonical lifts by arbitrary deeper perturbations.
        for_each_filtration_member(&zz, md, 2, |pa| {
            let alt_a = a.mul(pa).unwrap();
            for_each_filtration_member(&zz, md, 2, |pb| {
                let alt_b = pb.mul(&b).unwrap();
                let c = alt_a.commutator(&alt_b).unwrap();
                let got = GradedElement::to_graded(&c, &zz, 2).unwrap();
                assert_eq!(got, reference);
                true
            })
            .unwrap()
        })
        .unwrap();
    }

    #[test]
    fn functorial_map_behaviour() {
        let md = m(3);
        let small = z(3, &[2]);
        let big = z(3, &[1, 2]);
        let a = full_mat(3, md, &[((1, 3), 2), ((2, 4), 1), ((1, 4), 2)]);
        let ga = GradedElement::to_graded(&a, &small, 1).unwrap();
        // Z' = Z is the identity
        assert_eq!(ga.functorial_map(&small).unwrap(), ga);
        let mapped = ga.functorial_map(&big).unwrap();
        assert_eq!(mapped.degree(), 1);
        // zero maps to zero
        let zero = GradedElement::zero(&small, md, 1).unwrap();
        assert!(zero.functorial_map(&big).unwrap().is_zero());
        // reverse inclusion is rejected
        assert!(matches!(ga.functorial_map(&z(3, &[3])), Err(Error::NotASubset)));
    }

    #[test]
    fn functorial_map_commutes_with_bracket() {
        let md = m(2);
        let small = z(3, &[2]);
        let big = LevelSet::full(3).unwrap();
        for_each_filtration_member(&small, md, 1, |a| {
            let ga = GradedElement::to_graded(a, &small, 1).unwrap();
            for_each_filtration_member(&small, md, 1, |b| {
                let gb = GradedElement::to_graded(b, &small, 1).unwrap();
                let lhs = ga.bracket(&gb).unwrap().functorial_map(&big).unwrap();
                let rhs = ga
                    .functorial_map(&big)
                    .unwrap()
                    .bracket(&gb.functorial_map(&big).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
                true
            })
            .unwrap()
        })
        .unwrap();
    }

    #[test]
    fn grade_inequalities() {
        let md = m(2);
        let zz = z(3, &[1, 3]);
        let sup = Support::full(3).unwrap();
        for_each_matrix(&sup, md, |a| {
            for_each_matrix(&sup, md, |b| {
                let ga = grade_of(a, &zz).unwrap().as_number();
                let gb = grade_of(b, &zz).unwrap().as_number();
                let prod = grade_of(&a.mul(b).unwrap(), &zz).unwrap().as_number();
                assert!(prod >= ga.min(gb));
                let comm = grade_of(&a.commutator(b).unwrap(), &zz).unwrap().as_number();
                assert!(comm >= ga.saturating_add(gb));
                true
            });
            true
        });
    }
}
