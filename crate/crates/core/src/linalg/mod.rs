//! Dense exact matrices and the determinant / characteristic-polynomial
//! kernels used by the Hecke and U-operator computations.

mod modular;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub use modular::{charpoly_multimodular, CoefficientBound};

/// Square matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zero(n: usize) -> Self {
        RationalMatrix { n, entries: vec![BigRational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zero(n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        RationalMatrix { n, entries }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: bad.len() });
        }
        Ok(RationalMatrix { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn diagonal(diag: Vec<BigRational>) -> Self {
        let n = diag.len();
        let mut m = RationalMatrix::zero(n);
        for (i, d) in diag.into_iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigRational]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    pub fn trace(&self) -> BigRational {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        RationalMatrix::from_fn(n, |i, j| {
            let mut acc = BigRational::zero();
            for k in 0..n {
                let a = self.get(i, k);
                if !a.is_zero() {
                    acc += a * rhs.get(k, j);
                }
            }
            acc
        })
    }

    /// Principal submatrix on the given (sorted or not) index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> RationalMatrix {
        RationalMatrix::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]).clone())
    }

    /// `(L, L * self)` with `L` the least common denominator of all entries.
    pub fn clear_denominators(&self) -> (BigInt, Vec<Vec<BigInt>>) {
        let l = self.entries.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let rows = self
            .rows()
            .map(|r| r.iter().map(|x| x.numer() * (&l / x.denom())).collect())
            .collect();
        (l, rows)
    }

    /// Entries as `"numerator/denominator"` strings, row by row.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        self.rows()
            .map(|r| r.iter().map(|x| format!("{}/{}", x.numer(), x.denom())).collect())
            .collect()
    }

    pub fn determinant(&self) -> BigRational {
        let (l, rows) = self.clear_denominators();
        let det = bareiss_determinant(rows);
        BigRational::new(det, l.pow(self.n as u32))
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string_rows().serialize(s)
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_string_rows() {
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Fraction-free Gaussian elimination. Every intermediate entry is a minor
/// of the input, so all divisions are exact.
pub fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Coefficients `c_0..c_n` of `det(I - X M)`.
///
/// Denominators are cleared first (`c_m(L M) = L^m c_m(M)`), then the
/// integer characteristic polynomial is computed modulo enough primes to
/// pin it down under a Hadamard-type bound.
pub fn reversed_charpoly(m: &RationalMatrix) -> Vec<BigRational> {
    reversed_charpoly_with(m, CoefficientBound::Hadamard)
}

/// As [`reversed_charpoly`], with an explicit choice of coefficient bound.
pub fn reversed_charpoly_with(m: &RationalMatrix, bound: CoefficientBound) -> Vec<BigRational> {
    let (l, rows) = m.clear_denominators();
    let monic = charpoly_multimodular(&rows, bound);
    monic_to_reversed(&monic, &l)
}

/// Monic `det(xI - M)` coefficients (lowest degree first) of `M / L`,
/// turned into `det(I - X M/L)` coefficients.
fn monic_to_reversed(monic: &[BigInt], l: &BigInt) -> Vec<BigRational> {
    let n = monic.len() - 1;
    let mut lpow = BigInt::one();
    (0..=n)
        .map(|m| {
            let c = BigRational::new(monic[n - m].clone(), lpow.clone());
            lpow *= l;
            c
        })
        .collect()
}

/// Division-free Berkowitz algorithm over the rationals; O(n^4) ring
/// operations. Used as an independent route for small matrices.
pub fn reversed_charpoly_berkowitz(m: &RationalMatrix) -> Vec<BigRational> {
    let n = m.dim();
    // Berkowitz builds monic det(xI - M) with highest degree first
    let mut poly = vec![BigRational::one()];
    for r in 0..n {
        // leading principal r x r block A, column c = M[0..r, r], row R = M[r, 0..r]
        let a = |i: usize, j: usize| m.get(i, j);
        let mut toeplitz_col = Vec::with_capacity(r + 2);
        toeplitz_col.push(BigRational::one());
        toeplitz_col.push(-a(r, r).clone());
        let mut vec: Vec<BigRational> = (0..r).map(|i| a(i, r).clone()).collect();
        for _ in 0..r {
            let dot: BigRational = (0..r).map(|j| a(r, j) * &vec[j]).sum();
            toeplitz_col.push(-dot);
            vec = (0..r)
                .map(|i| (0..r).map(|j| a(i, j) * &vec[j]).sum())
                .collect();
        }
        let mut next = vec![BigRational::zero(); r + 2];
        for (i, t) in toeplitz_col.iter().enumerate() {
            for (j, p) in poly.iter().enumerate() {
                if i + j < next.len() {
                    next[i + j] += t * p;
                }
            }
        }
        poly = next;
    }
    // highest-first monic coefficients p_0 = 1, p_1, ..., p_n equal c_0..c_n
    poly
}

/// `c_m = (-1)^m e_m(M)` with `e_m` the sum of all m x m principal minors.
/// Exponential; a test oracle for tiny matrices.
pub fn reversed_charpoly_by_minors(m: &RationalMatrix) -> Vec<BigRational> {
    let n = m.dim();
    let mut c = vec![BigRational::zero(); n + 1];
    c[0] = BigRational::one();
    for mask in 1u32..(1u32 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let d = m.principal_submatrix(&idx).determinant();
        let size = idx.len();
        if size.is_multiple_of(2) {
            c[size] += d;
        } else {
            c[size] -= d;
        }
    }
    c
}

pub(crate) fn abs_bits(x: &BigInt) -> u64 {
    x.abs().bits()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn charpoly_examples() {
        let m = RationalMatrix::from_i64_rows(&[&[-24]]).unwrap();
        assert_eq!(reversed_charpoly(&m), vec![r(1), r(24)]);
        assert_eq!(reversed_charpoly(&RationalMatrix::identity(2)), vec![r(1), r(-2), r(1)]);
        assert_eq!(reversed_charpoly(&RationalMatrix::zero(2)), vec![r(1), r(0), r(0)]);
        assert_eq!(reversed_charpoly(&RationalMatrix::zero(0)), vec![r(1)]);
    }

    #[test]
    fn rational_entries() {
        let half = BigRational::new(1.into(), 2.into());
        let m = RationalMatrix::from_rows(vec![vec![half.clone(), r(1)], vec![r(0), r(3)]]).unwrap();
        // (1 - X/2)(1 - 3X) = 1 - 7/2 X + 3/2 X^2
        let want = vec![r(1), BigRational::new((-7).into(), 2.into()), BigRational::new(3.into(), 2.into())];
        assert_eq!(reversed_charpoly(&m), want);
        assert_eq!(reversed_charpoly_berkowitz(&m), want);
    }

    #[test]
    fn determinant_examples() {
        let m = RationalMatrix::from_i64_rows(&[&[0, 2, 1], &[3, 1, 4], &[5, 9, 2]]).unwrap();
        // cofactor expansion by hand: 0*(2-36) - 2*(6-20) + 1*(27-5) = 28 + 22
        assert_eq!(m.determinant(), r(50));
        let singular = RationalMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(singular.determinant(), r(0));
        assert!(RationalMatrix::from_i64_rows(&[&[1, 2], &[3]]).is_err());
    }

    fn small_matrix(max_n: usize, range: i64) -> impl Strategy<Value = RationalMatrix> {
        (1..=max_n).prop_flat_map(move |n| {
            proptest::collection::vec(-range..=range, n * n).prop_map(move |v| {
                RationalMatrix::from_fn(n, |i, j| r(v[i * n + j]))
            })
        })
    }

    /// Sum over permutations with sign; fine up to 5x5.
    fn leibniz(m: &RationalMatrix) -> BigRational {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.dim();
        perms(n)
            .into_iter()
            .map(|p| {
                let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                let prod: BigRational = (0..n).map(|i| m.get(i, p[i]).clone()).product();
                if inversions % 2 == 0 { prod } else { -prod }
            })
            .sum()
    }

    proptest! {
        #[test]
        fn three_charpoly_routes_agree(m in small_matrix(5, 30)) {
            let minors = reversed_charpoly_by_minors(&m);
            prop_assert_eq!(reversed_charpoly_berkowitz(&m), minors.clone());
            prop_assert_eq!(reversed_charpoly(&m), minors);
        }

        #[test]
        fn huge_entries_agree(m in small_matrix(6, 5), shift in 100u32..400) {
            let scale = BigRational::from_integer(BigInt::from(2).pow(shift) + 1);
            let big = RationalMatrix::from_fn(m.dim(), |i, j| m.get(i, j) * &scale + r(i as i64));
            prop_assert_eq!(reversed_charpoly(&big), reversed_charpoly_berkowitz(&big));
        }

        /// Mostly-zero matrices force row swaps and skipped pivots.
        #[test]
        fn sparse_matrices_agree(
            n in 1usize..=9,
            v in proptest::collection::vec(prop_oneof![6 => Just(0i64), 1 => -3i64..=3], 81),
        ) {
            let m = RationalMatrix::from_fn(n, |i, j| r(v[i * 9 + j]));
            prop_assert_eq!(reversed_charpoly(&m), reversed_charpoly_berkowitz(&m));
        }

        #[test]
        fn bareiss_matches_leibniz(m in small_matrix(5, 50)) {
            prop_assert_eq!(m.determinant(), leibniz(&m));
        }
    }
}
