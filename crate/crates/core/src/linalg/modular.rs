//! Multimodular characteristic polynomial of an integer matrix: Hessenberg
//! reduction modulo word-sized primes, recombined by a CRT product tree.

use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::abs_bits;

/// How to bound the coefficients of `det(xI - M)` before recombination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientBound {
    /// `|e_m| <= prod_j (1 + |col_j|_2)`; valid for every matrix.
    Hadamard,
    /// For matrices known to have real spectrum (self-adjoint operators):
    /// `sum λ² = tr(M²)` gives `|e_m| <= C(n,m) (tr(M²)/n)^(m/2)`. Falls
    /// back to Hadamard when `tr(M²) < 0`, which rules out a real spectrum.
    RealSpectrum,
}

impl CoefficientBound {
    /// Upper bound on the bit length of every coefficient magnitude.
    pub fn bits(self, m: &[Vec<BigInt>]) -> u64 {
        let hadamard = hadamard_bits(m);
        match self {
            CoefficientBound::Hadamard => hadamard,
            CoefficientBound::RealSpectrum => {
                let n = m.len();
                let mut tr2 = BigInt::zero();
                for (i, row) in m.iter().enumerate() {
                    for (j, x) in row.iter().enumerate() {
                        if !x.is_zero() && !m[j][i].is_zero() {
                            tr2 += x * &m[j][i];
                        }
                    }
                }
                if tr2.is_negative() {
                    return hadamard;
                }
                let real = n as u64 + (tr2.bits() * n as u64).div_ceil(2) + 1;
                real.min(hadamard)
            }
        }
    }
}

fn hadamard_bits(m: &[Vec<BigInt>]) -> u64 {
    let n = m.len();
    let mut total = 1;
    for j in 0..n {
        let sq: BigInt = m.iter().map(|row| &row[j] * &row[j]).sum();
        // log2(1 + sqrt(sq)) <= (bits(sq) + 1) / 2 + 1
        total += sq.bits().div_ceil(2) + 1;
    }
    total
}

/// Monic `det(xI - M)` for an integer matrix, lowest degree first.
pub fn charpoly_multimodular(m: &[Vec<BigInt>], bound: CoefficientBound) -> Vec<BigInt> {
    let n = m.len();
    if n == 0 {
        return vec![BigInt::one()];
    }
    // need prod p > 2 * 2^bits to lift symmetric residues
    let bits = bound.bits(m) + 2;
    let primes = primes_covering(bits);
    let digits: Vec<Vec<(bool, Vec<u64>)>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| (x.sign() == Sign::Minus, x.magnitude().to_u64_digits()))
                .collect()
        })
        .collect();
    let max_digits = digits.iter().flatten().map(|(_, d)| d.len()).max().unwrap_or(0);
    let residues: Vec<Vec<u64>> = primes
        .par_iter()
        .map(|&p| {
            let f = Montgomery::new(p);
            let weights = f.digit_weights(max_digits);
            let reduced: Vec<u64> = digits
                .iter()
                .flatten()
                .map(|(neg, d)| f.reduce_digits(*neg, d, &weights))
                .collect();
            charpoly_mod_p(reduced, n, p)
        })
        .collect();
    let (values, modulus) = crt_tree(&residues, &primes);
    let half = &modulus >> 1;
    let out: Vec<BigInt> = values
        .into_iter()
        .map(|v| if v > half { v - &modulus } else { v })
        .collect();
    debug_assert!(out[n].is_one());
    debug_assert!(out.iter().all(|c| abs_bits(c) <= bits));
    out
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (p - b)
    }
}

#[inline]
fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// Montgomery arithmetic modulo an odd `p < 2^62`, with `R = 2^64`.
/// Values in Montgomery form are `x R mod p`; addition is unchanged.
#[derive(Debug, Clone, Copy)]
struct Montgomery {
    p: u64,
    /// `-p^(-1) mod 2^64`
    neg_inv: u64,
    /// `R^2 mod p`
    r2: u64,
}

impl Montgomery {
    fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < 1 << 62);
        // Newton iteration for p^(-1) mod 2^64
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        Montgomery { p, neg_inv: inv.wrapping_neg(), r2: mulmod(r, r, p) }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    fn to_form(self, a: u64) -> u64 {
        self.mul(a, self.r2)
    }

    fn from_form(self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    fn one(self) -> u64 {
        self.to_form(1)
    }

    fn inv(self, a: u64) -> u64 {
        let mut e = self.p - 2;
        let (mut base, mut r) = (a, self.one());
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    /// `R^(i+1) mod p` for `i < len`: `redc(d * table[i]) = d R^i mod p`
    /// for any 64-bit digit d.
    fn digit_weights(self, len: usize) -> Vec<u64> {
        let mut w = Vec::with_capacity(len);
        // R mod p, then repeated multiplication by R
        let mut x = self.to_form(1);
        for _ in 0..len {
            w.push(x);
            x = self.mul(x, self.r2);
        }
        w
    }

    /// Residue of `±Σ d_i 2^(64 i)` in standard form.
    fn reduce_digits(self, neg: bool, digits: &[u64], weights: &[u64]) -> u64 {
        let p = self.p;
        let r = digits
            .iter()
            .zip(weights)
            .fold(0u64, |acc, (&d, &w)| addmod(acc, self.redc(d as u128 * w as u128), p));
        if neg && r != 0 {
            p - r
        } else {
            r
        }
    }
}

/// Reduce to upper Hessenberg form by similarity, then run the standard
/// recurrence on the leading principal blocks. `h` is row-major `n x n`.
fn charpoly_mod_p(mut h: Vec<u64>, n: usize, p: u64) -> Vec<u64> {
    let f = Montgomery::new(p);
    for x in h.iter_mut() {
        *x = f.to_form(*x);
    }
    let mut mults = vec![0u64; n];
    for m in 1..n.saturating_sub(1) {
        let Some(piv) = (m..n).find(|&i| h[i * n + m - 1] != 0) else {
            continue;
        };
        if piv != m {
            for j in 0..n {
                h.swap(piv * n + j, m * n + j);
            }
            for r in 0..n {
                h.swap(r * n + piv, r * n + m);
            }
        }
        let inv = f.inv(h[m * n + m - 1]);
        // row_i -= u_i row_m for every i > m; the elementary transforms share
        // the pivot row, so they commute and the column step can be batched
        let (top, bottom) = h.split_at_mut((m + 1) * n);
        let row_m = &top[m * n + m - 1..(m + 1) * n];
        for (i, row_i) in bottom.chunks_exact_mut(n).enumerate() {
            let u = f.mul(row_i[m - 1], inv);
            mults[m + 1 + i] = u;
            if u == 0 {
                continue;
            }
            for (x, &y) in row_i[m - 1..].iter_mut().zip(row_m) {
                *x = submod(*x, f.mul(u, y), p);
            }
        }
        // col_m += Σ u_i col_i
        let us = &mults[m + 1..n];
        for row in h.chunks_exact_mut(n) {
            let add = row[m + 1..]
                .iter()
                .zip(us)
                .fold(0u64, |acc, (&x, &u)| addmod(acc, f.mul(u, x), p));
            row[m] = addmod(row[m], add, p);
        }
    }
    // polys[k] = charpoly of the leading k x k block, lowest degree first
    let one = f.one();
    let mut polys: Vec<Vec<u64>> = vec![vec![one]];
    for m in 1..=n {
        let prev = &polys[m - 1];
        let mut pm = vec![0u64; m + 1];
        let diag = h[(m - 1) * n + m - 1];
        for (d, &c) in prev.iter().enumerate() {
            pm[d + 1] = addmod(pm[d + 1], c, p);
            pm[d] = submod(pm[d], f.mul(diag, c), p);
        }
        let mut t = one;
        for i in 1..m {
            t = f.mul(t, h[(m - i) * n + m - i - 1]);
            let coef = f.mul(t, h[(m - i - 1) * n + m - 1]);
            if coef == 0 {
                continue;
            }
            for (x, &c) in pm.iter_mut().zip(&polys[m - i - 1]) {
                *x = submod(*x, f.mul(coef, c), p);
            }
        }
        polys.push(pm);
    }
    let top = polys.pop().expect("n >= 1");
    top.into_iter().map(|x| f.from_form(x)).collect()
}

fn crt_tree(residues: &[Vec<u64>], primes: &[u64]) -> (Vec<BigInt>, BigInt) {
    if primes.len() == 1 {
        return (residues[0].iter().map(|&r| BigInt::from(r)).collect(), BigInt::from(primes[0]));
    }
    let mid = primes.len() / 2;
    let ((x1, m1), (x2, m2)) = rayon::join(
        || crt_tree(&residues[..mid], &primes[..mid]),
        || crt_tree(&residues[mid..], &primes[mid..]),
    );
    let ext = (&m1 % &m2).extended_gcd(&m2);
    debug_assert!(ext.gcd.is_one());
    let inv = ext.x.mod_floor(&m2);
    let values = x1
        .into_iter()
        .zip(x2)
        .map(|(a, b)| {
            let t = ((b - &a) * &inv).mod_floor(&m2);
            a + &m1 * t
        })
        .collect();
    (values, m1 * m2)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

static PRIMES: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();

const PRIME_CEILING: u64 = 1 << 62;

/// Distinct primes just below 2^62 whose product exceeds 2^bits.
fn primes_covering(bits: u64) -> Vec<u64> {
    // every prime used is > 2^61
    let count = (bits / 61 + 1) as usize;
    let cache = PRIMES.get_or_init(|| Mutex::new(Vec::new()));
    let mut primes = cache.lock().expect("prime cache poisoned");
    let mut candidate = primes.last().map_or(PRIME_CEILING - 1, |&p| p - 2);
    while primes.len() < count {
        if is_prime_u64(candidate) {
            primes.push(candidate);
        }
        candidate -= 2;
    }
    primes[..count].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miller_rabin() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        // 2^61 - 1 is a Mersenne prime; 3215031751 is a strong pseudoprime to bases 2,3,5,7
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(3215031751));
        for p in [3u64, 1_000_000_007, (1 << 61) - 1, primes_covering(1)[0]] {
            let f = Montgomery::new(p);
            for (a, b) in [(0u64, 5u64), (1, 1), (p - 1, p - 1), (p / 3, p / 2 + 1)] {
                let (a, b) = (a % p, b % p);
                assert_eq!(f.from_form(f.mul(f.to_form(a), f.to_form(b))), mulmod(a, b, p));
            }
            let x = f.to_form(2 % p);
            if p > 2 {
                assert_eq!(f.from_form(f.mul(x, f.inv(x))), 1);
            }
            let w = f.digit_weights(3);
            assert_eq!(f.reduce_digits(false, &[5, 1], &w), (((1u128 << 64) + 5) % p as u128) as u64);
            assert_eq!(f.reduce_digits(true, &[p], &w), 0);
            let big: BigInt = (BigInt::from(u64::MAX) << 128usize) + 12345u32;
            let want = u64::try_from(&big % BigInt::from(p)).unwrap();
            assert_eq!(f.reduce_digits(false, &big.magnitude().to_u64_digits(), &w), want);
            assert_eq!(f.reduce_digits(true, &big.magnitude().to_u64_digits(), &w), (p - want) % p);
        }
        let ps = primes_covering(200);
        assert!(ps.len() >= 4);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(ps.iter().all(|&p| p > 1 << 61));
    }

    #[test]
    fn hessenberg_charpoly_small() {
        let p = 1_000_000_007;
        // [[2,1],[1,3]]: x^2 - 5x + 5
        let c = charpoly_mod_p(vec![2, 1, 1, 3], 2, p);
        assert_eq!(c, vec![5, p - 5, 1]);
        // needs a row swap: first subdiagonal pivot is zero
        let m = vec![1, 2, 3, 0, 4, 5, 6, 7, 8];
        // trace 13, principal 2x2 minors 4 - 10 - 3 = -9, det -15
        let c = charpoly_mod_p(m, 3, p);
        assert_eq!(c, vec![15, p - 9, p - 13, 1]);
    }

    #[test]
    fn bounds_are_ordered() {
        let m: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(1) << 300, BigInt::from(3)],
            vec![BigInt::from(3), BigInt::from(5)],
        ];
        let h = CoefficientBound::Hadamard.bits(&m);
        let r = CoefficientBound::RealSpectrum.bits(&m);
        assert!(r <= h);
        let c = charpoly_multimodular(&m, CoefficientBound::RealSpectrum);
        // x^2 - (2^300 + 5) x + (5 * 2^300 - 9)
        assert_eq!(c[2], BigInt::one());
        assert_eq!(c[1], -((BigInt::from(1) << 300usize) + 5i32));
        assert_eq!(c[0], (BigInt::from(5) << 300usize) - 9i32);
    }
}
