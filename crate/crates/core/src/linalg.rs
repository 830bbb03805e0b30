//! Exact linear algebra over a generic field.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::kernel::{RatFunc, Q};

/// The field operations needed by elimination.
pub trait Field: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn fzero() -> Self;
    fn fone() -> Self;
    fn fis_zero(&self) -> bool;
    fn fadd(&self, o: &Self) -> Self;
    fn fsub(&self, o: &Self) -> Self;
    fn fmul(&self, o: &Self) -> Self;
    fn fneg(&self) -> Self;
    /// Inverse of a nonzero element.
    fn finv(&self) -> Self;
}

impl Field for Q {
    fn fzero() -> Self {
        Zero::zero()
    }
    fn fone() -> Self {
        One::one()
    }
    fn fis_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn fadd(&self, o: &Self) -> Self {
        self + o
    }
    fn fsub(&self, o: &Self) -> Self {
        self - o
    }
    fn fmul(&self, o: &Self) -> Self {
        self * o
    }
    fn fneg(&self) -> Self {
        -self
    }
    fn finv(&self) -> Self {
        self.recip()
    }
}

impl Field for RatFunc {
    fn fzero() -> Self {
        RatFunc::zero()
    }
    fn fone() -> Self {
        RatFunc::one()
    }
    fn fis_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn fadd(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn fsub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn fmul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn fneg(&self) -> Self {
        self.neg()
    }
    fn finv(&self) -> Self {
        self.inv().expect("pivot is nonzero")
    }
}

pub type Matrix<F> = Vec<Vec<F>>;

/// Reduces `m` (rows of length `ncols`) to reduced row echelon form in place
/// and returns the pivot columns. Zero rows are dropped.
pub fn rref<F: Field>(m: &mut Matrix<F>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].fis_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].finv();
        if inv != F::fone() {
            for x in m[row].iter_mut().skip(col) {
                *x = x.fmul(&inv);
            }
        }
        let pivot_row = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i == row || r[col].fis_zero() {
                continue;
            }
            let f = r[col].clone();
            for (x, p) in r.iter_mut().zip(&pivot_row).skip(col) {
                if !p.fis_zero() {
                    *x = x.fsub(&f.fmul(p));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    pivots
}

pub fn rank<F: Field>(m: &Matrix<F>, ncols: usize) -> usize {
    let mut m = m.clone();
    rref(&mut m, ncols).len()
}

/// A basis of `{v : m v = 0}`.
pub fn nullspace<F: Field>(m: &Matrix<F>, ncols: usize) -> Vec<Vec<F>> {
    let mut r = m.clone();
    let pivots = rref(&mut r, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::fzero(); ncols];
        v[free] = F::fone();
        for (row, &pc) in r.iter().zip(&pivots) {
            v[pc] = row[free].fneg();
        }
        basis.push(v);
    }
    basis
}

/// Some solution of `a x = b`, if one exists.
pub fn solve<F: Field>(a: &Matrix<F>, b: &[F], ncols: usize) -> Option<Vec<F>> {
    let mut aug: Matrix<F> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![F::fzero(); ncols];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

/// Characteristic polynomial `det(x I - a)`, coefficients in ascending
/// degree, by the Faddeev-LeVerrier recurrence.
pub fn charpoly(a: &Matrix<Q>) -> Vec<Q> {
    let n = a.len();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut mk: Matrix<Q> = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        let mut next = matmul(a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n + 1 - k];
        }
        mk = next;
        let am = matmul(a, &mk);
        let trace: Q = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -trace / Q::from_integer(BigInt::from(k));
    }
    coeffs
}

pub fn matmul(a: &Matrix<Q>, b: &Matrix<Q>) -> Matrix<Q> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![Q::zero(); m]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += aik * &b[k][j];
            }
        }
    }
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn eval_poly(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

/// Divides `p` by `(x - root)`, assuming `root` is a root.
fn deflate(p: &[Q], root: &Q) -> Vec<Q> {
    let n = p.len() - 1;
    let mut out = vec![Q::zero(); n];
    let mut carry = Q::zero();
    for i in (0..n).rev() {
        carry = &p[i + 1] + &carry * root;
        out[i] = carry.clone();
    }
    out
}

/// Rational roots with multiplicity, in increasing order, and the factor
/// of `p` left after removing them.
pub fn rational_roots(p: &[Q]) -> (Vec<(Q, usize)>, Vec<Q>) {
    let mut p: Vec<Q> = p.to_vec();
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let mut roots: Vec<(Q, usize)> = Vec::new();
    let push = |r: Q, roots: &mut Vec<(Q, usize)>| match roots.iter_mut().find(|(x, _)| *x == r) {
        Some(e) => e.1 += 1,
        None => roots.push((r, 1)),
    };
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        push(Q::zero(), &mut roots);
    }
    if p.len() > 1 {
        let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.iter().map(|c| (c * Q::from_integer(lcm.clone())).to_integer()).collect();
        let num_divs = divisors(&ints[0]);
        let den_divs = divisors(ints.last().expect("nonconstant"));
        let mut candidates: Vec<Q> = Vec::new();
        for a in &num_divs {
            for b in &den_divs {
                let c = Q::new(a.clone(), b.clone());
                candidates.push(c.clone());
                candidates.push(-c);
            }
        }
        candidates.sort();
        candidates.dedup();
        for c in candidates {
            while p.len() > 1 && eval_poly(&p, &c).is_zero() {
                p = deflate(&p, &c);
                push(c.clone(), &mut roots);
            }
        }
    }
    roots.sort();
    (roots, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::poly::{q, q2};

    fn m(rows: &[&[i64]]) -> Matrix<Q> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a, 3), 2);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        for row in &a {
            let dot: Q = row.iter().zip(&ns[0]).map(|(x, y)| x * y).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, &[q(3), q(1)], 2).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&b, &[q(1), q(3)], 2).is_none());
    }

    #[test]
    fn charpoly_of_companion() {
        // eigenvalues 1, -1, 4
        let a = m(&[&[1, 0, 0], &[0, -1, 0], &[5, 0, 4]]);
        let p = charpoly(&a);
        assert_eq!(p, vec![q(4), q(-1), q(-4), q(1)]);
        let (roots, rest) = rational_roots(&p);
        assert_eq!(roots, vec![(q(-1), 1), (q(1), 1), (q(4), 1)]);
        assert_eq!(rest, vec![q(1)]);
    }

    #[test]
    fn rational_roots_with_multiplicity_and_remainder() {
        // (x - 1/2)^2 * x * (x^2 - 2)
        let half = q2(1, 2);
        let mut poly = vec![q(1)];
        for r in [half.clone(), half.clone(), q(0)] {
            let mut next = vec![Q::zero(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * &r;
            }
            poly = next;
        }
        let mut with_irr = vec![Q::zero(); poly.len() + 2];
        for (i, c) in poly.iter().enumerate() {
            with_irr[i + 2] += c;
            with_irr[i] -= c * q(2);
        }
        let (roots, rest) = rational_roots(&with_irr);
        assert_eq!(roots, vec![(q(0), 1), (half, 2)]);
        assert_eq!(rest, vec![q(-2), q(0), q(1)]);
    }
}
