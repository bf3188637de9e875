//! Linear congruence systems A x = b (mod m) by Smith-style diagonalization.
//!
//! The coboundary solver for a general finite group turns each band depth
//! into one integer matrix with many right-hand sides. Row operations are
//! applied to every right-hand side as they happen; column operations
//! accumulate in V, so a solution y of the diagonal system pulls back to
//! x = V y. No divisibility normalization of the diagonal is needed just
//! to solve, so the reduction stops at a diagonal matrix.
//!
//! All entries are kept as balanced residues in (-m/2, m/2]. Adding
//! multiples of m anywhere changes nothing modulo m, and with m <= 2^31
//! it keeps every intermediate product inside i64.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{egcd, gcd, Modulus};

/// Balanced representative of v mod m, in (-m/2, m/2].
fn balance(v: i64, m: i64) -> i64 {
    let r = v.rem_euclid(m);
    if r > m / 2 {
        r - m
    } else {
        r
    }
}

/// Least nonnegative y with d * y = c (mod m), if any.
pub(crate) fn solve_linear(d: u64, c: u64, m: u64) -> Option<u64> {
    let (d, c) = (d % m, c % m);
    if d == 0 {
        return if c == 0 { Some(0) } else { None };
    }
    let g = gcd(d, m);
    if c % g != 0 {
        return None;
    }
    let (m2, d2, c2) = (m / g, d / g, c / g);
    let (_, x, _) = egcd(d2 as i64, m2 as i64);
    Some((x.rem_euclid(m2 as i64) as u64) * (c2 % m2) % m2)
}

struct Reduction {
    rows: usize,
    cols: usize,
    m: i64,
    work: Vec<i64>,
    /// Column-operation accumulator, cols x cols; x = v y.
    v: Vec<i64>,
    rhs: Vec<Vec<i64>>,
}

impl Reduction {
    fn row_swap(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.work.swap(a * self.cols + j, b * self.cols + j);
        }
        for rhs in &mut self.rhs {
            rhs.swap(a, b);
        }
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.work.swap(i * self.cols + a, i * self.cols + b);
        }
        for i in 0..self.cols {
            self.v.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row a -= q * row b
    fn row_sub(&mut self, a: usize, b: usize, q: i64) {
        for j in 0..self.cols {
            let t = self.work[a * self.cols + j] - q * self.work[b * self.cols + j];
            self.work[a * self.cols + j] = balance(t, self.m);
        }
        for rhs in &mut self.rhs {
            rhs[a] = balance(rhs[a] - q * rhs[b], self.m);
        }
    }

    /// col a -= q * col b
    fn col_sub(&mut self, a: usize, b: usize, q: i64) {
        for i in 0..self.rows {
            let t = self.work[i * self.cols + a] - q * self.work[i * self.cols + b];
            self.work[i * self.cols + a] = balance(t, self.m);
        }
        for i in 0..self.cols {
            let t = self.v[i * self.cols + a] - q * self.v[i * self.cols + b];
            self.v[i * self.cols + a] = balance(t, self.m);
        }
    }

    /// Diagonalize, returning the rank (number of nonzero diagonal slots).
    fn diagonalize(&mut self) -> usize {
        let bound = self.rows.min(self.cols);
        let mut t = 0;
        while t < bound {
            // Nonzero entry of least magnitude in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..self.rows {
                for j in t..self.cols {
                    let val = self.work[i * self.cols + j].abs();
                    if val != 0
                        && best.is_none_or(|(bi, bj)| val < self.work[bi * self.cols + bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            self.row_swap(t, pi);
            self.col_swap(t, pj);
            // Clear row t and column t. A division leaving a remainder
            // strictly shrinks the pivot after the swap back, so this
            // terminates.
            loop {
                let p = self.work[t * self.cols + t];
                let bad_row = (t + 1..self.rows).find(|&i| self.work[i * self.cols + t] != 0);
                if let Some(i) = bad_row {
                    let q = self.work[i * self.cols + t].div_euclid(p);
                    self.row_sub(i, t, q);
                    if self.work[i * self.cols + t] != 0 {
                        self.row_swap(t, i);
                    }
                    continue;
                }
                let bad_col = (t + 1..self.cols).find(|&j| self.work[t * self.cols + j] != 0);
                if let Some(j) = bad_col {
                    let q = self.work[t * self.cols + j].div_euclid(p);
                    self.col_sub(j, t, q);
                    if self.work[t * self.cols + j] != 0 {
                        self.col_swap(t, j);
                    }
                    continue;
                }
                break;
            }
            t += 1;
        }
        t
    }
}

/// Solve a x = b (mod m) for every right-hand side in `rhs`. `a` is row
/// major with rows * cols entries. The returned solutions have entries in
/// 0..m; None marks an unsolvable congruence. Every claimed solution is
/// checked against the original system before being returned.
pub(crate) fn solve_congruences(
    rows: usize,
    cols: usize,
    a: &[i64],
    rhs: &[Vec<i64>],
    m: Modulus,
) -> Vec<Option<Vec<u64>>> {
    assert_eq!(a.len(), rows * cols);
    let md = m.get() as i64;
    let orig: Vec<i64> = a.iter().map(|&x| balance(x, md)).collect();
    let mut red = Reduction {
        rows,
        cols,
        m: md,
        work: orig.clone(),
        v: {
            let mut v = vec![0i64; cols * cols];
            for i in 0..cols {
                v[i * cols + i] = 1;
            }
            v
        },
        rhs: rhs
            .iter()
            .map(|b| {
                assert_eq!(b.len(), rows);
                b.iter().map(|&x| balance(x, md)).collect()
            })
            .collect(),
    };
    let rank = red.diagonalize();

    let mut out = Vec::with_capacity(rhs.len());
    for (b, b0) in red.rhs.iter().zip(rhs.iter()) {
        let mut y = vec![0u64; cols];
        let mut ok = true;
        for t in 0..rank {
            let d = m.reduce_signed(red.work[t * cols + t]);
            match solve_linear(d, m.reduce_signed(b[t]), m.get()) {
                Some(sol) => y[t] = sol,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        // Rows beyond the rank became zero rows; their right-hand sides
        // must have vanished too.
        if ok {
            ok = (rank..rows).all(|i| b[i].rem_euclid(md) == 0);
        }
        if !ok {
            out.push(None);
            continue;
        }
        let mut x = vec![0u64; cols];
        for i in 0..cols {
            let mut acc: i64 = 0;
            for (t, &yt) in y.iter().enumerate() {
                acc = balance(acc + red.v[i * cols + t] * yt as i64, md);
            }
            x[i] = m.reduce_signed(acc);
        }
        // The reduction is exact, so this can only fail on a bug; failing
        // closed keeps a claimed solution trustworthy.
        let verified = (0..rows).all(|i| {
            let mut acc: i64 = 0;
            for (j, &xj) in x.iter().enumerate() {
                acc = balance(acc + orig[i * cols + j] * xj as i64, md);
            }
            (acc - b0[i]).rem_euclid(md) == 0
        });
        debug_assert!(verified);
        out.push(if verified { Some(x) } else { None });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modulus(m: u64) -> Modulus {
        Modulus::new(m).unwrap()
    }

    #[test]
    fn solves_a_known_system() {
        // x + 2y = 1, 3x + 4y = 3 (mod 5); the determinant is a unit.
        let a = [1, 2, 3, 4];
        let sols = solve_congruences(2, 2, &a, &[vec![1, 3]], modulus(5));
        let x = sols[0].as_ref().expect("solvable");
        assert_eq!((x[0] + 2 * x[1]) % 5, 1);
        assert_eq!((3 * x[0] + 4 * x[1]) % 5, 3);
    }

    #[test]
    fn detects_unsolvable_congruences() {
        // 2x = 1 (mod 4) has no solution; 2x = 2 (mod 4) does.
        let sols = solve_congruences(1, 1, &[2], &[vec![1], vec![2]], modulus(4));
        assert_eq!(sols[0], None);
        assert!(sols[1].is_some());
    }

    #[test]
    fn zero_rows_constrain_the_rhs() {
        // Row 2 = 2 * row 1 over Z, so b = (1, 2) works and (1, 3) cannot.
        let a = [1, 2, 2, 4];
        let sols = solve_congruences(2, 2, &a, &[vec![1, 2], vec![1, 3]], modulus(6));
        assert!(sols[0].is_some());
        assert_eq!(sols[1], None);
    }

    #[test]
    fn agrees_with_brute_force_on_small_systems() {
        // Deterministic sweep of small matrices over Z/6 with wide rhs
        // coverage; brute force enumerates all of (Z/6)^3.
        let m = modulus(6);
        let mut lcg = 1u64;
        let mut next = || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((lcg >> 33) % 13) as i64 - 6
        };
        for _ in 0..60 {
            let a: Vec<i64> = (0..12).map(|_| next()).collect();
            let b: Vec<i64> = (0..4).map(|_| next()).collect();
            let got = solve_congruences(4, 3, &a, std::slice::from_ref(&b), m);
            let mut brute = None;
            'search: for x0 in 0..6i64 {
                for x1 in 0..6i64 {
                    for x2 in 0..6i64 {
                        let x = [x0, x1, x2];
                        if (0..4).all(|i| {
                            let s: i64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
                            (s - b[i]).rem_euclid(6) == 0
                        }) {
                            brute = Some(x);
                            break 'search;
                        }
                    }
                }
            }
            assert_eq!(got[0].is_some(), brute.is_some());
        }
    }
}
