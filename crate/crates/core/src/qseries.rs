//! Truncated q-expansions with exact rational coefficients.
//!
//! A [`QSeries`] knows its coefficients for exponents `0..=prec`; anything
//! beyond `prec` is unknown, never implicitly zero. Every operation derives
//! the precision of its result from the precisions (and leading zeros) of
//! its inputs, so a comparison between two series is always a provable
//! statement up to the reported precision.
//!
//! The named series (`Δ`, the level-2 Hauptmodul `f`, `E4`, `E6`, `θ`) are
//! expanded from their product or divisor-sum definitions directly.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::ops::{Add, Mul, Neg, Sub};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigRational>,
}

/// Result of a precision-aware comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agreement {
    /// Highest exponent both sides know.
    pub prec: usize,
    pub first_mismatch: Option<usize>,
}

impl Agreement {
    pub fn equal(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

impl QSeries {
    /// Coefficients for `q^0..=q^prec`; missing entries are zero, extra ones dropped.
    pub fn new(mut coeffs: Vec<BigRational>, prec: usize) -> Self {
        coeffs.resize(prec + 1, BigRational::zero());
        QSeries { coeffs }
    }

    pub fn from_integers(coeffs: Vec<BigInt>, prec: usize) -> Self {
        QSeries::new(coeffs.into_iter().map(BigRational::from_integer).collect(), prec)
    }

    pub fn from_i64s(coeffs: &[i64], prec: usize) -> Self {
        QSeries::from_integers(coeffs.iter().map(|&c| BigInt::from(c)).collect(), prec)
    }

    pub fn zero(prec: usize) -> Self {
        QSeries::new(Vec::new(), prec)
    }

    pub fn one(prec: usize) -> Self {
        QSeries::monomial(0, BigRational::one(), prec)
    }

    pub fn monomial(exp: usize, c: BigRational, prec: usize) -> Self {
        let mut s = QSeries::zero(prec);
        if exp <= prec {
            s.coeffs[exp] = c;
        }
        s
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `q^n`, or `None` beyond the known precision.
    pub fn coeff(&self, n: usize) -> Option<&BigRational> {
        self.coeffs.get(n)
    }

    /// Index of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Like [`valuation`](Self::valuation) but `prec + 1` when every known
    /// coefficient vanishes; the right quantity for precision bookkeeping.
    fn order(&self) -> usize {
        self.valuation().unwrap_or(self.coeffs.len())
    }

    pub fn truncate(&self, prec: usize) -> QSeries {
        assert!(prec <= self.prec(), "cannot extend precision by truncation");
        QSeries { coeffs: self.coeffs[..=prec].to_vec() }
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integer coefficients; errors on the first non-integral one.
    pub fn to_integers(&self) -> Result<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| if c.is_integer() { Ok(c.to_integer()) } else { Err(Error::NonIntegral(c.to_string())) })
            .collect()
    }

    pub fn scale(&self, c: &BigRational) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn scale_int(&self, c: i64) -> QSeries {
        self.scale(&BigRational::from_integer(c.into()))
    }

    pub fn pow(&self, mut e: u32) -> QSeries {
        let mut result = QSeries::one(self.prec());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn invert(&self) -> Result<QSeries> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::NonInvertibleSeries);
        }
        let prec = self.prec();
        if self.is_integral() && a0.abs().is_one() {
            let a = self.to_integers()?;
            return Ok(QSeries::from_integers(invert_unit_int(&a, prec + 1), prec));
        }
        let inv0 = a0.recip();
        let mut b = vec![inv0.clone()];
        for n in 1..=prec {
            let mut acc = BigRational::zero();
            for i in 1..=n {
                if !self.coeffs[i].is_zero() {
                    acc += &self.coeffs[i] * &b[n - i];
                }
            }
            b.push(-acc * &inv0);
        }
        Ok(QSeries { coeffs: b })
    }

    /// `self / other`, where `other` may start at `q^v` with `v > 0`
    /// provided `self` vanishes below `q^v`.
    pub fn div(&self, other: &QSeries) -> Result<QSeries> {
        let v = other.valuation().ok_or(Error::NonInvertibleSeries)?;
        if self.prec() < v {
            return Err(Error::InvalidArgument(format!(
                "numerator precision {} is below the divisor's leading exponent {v}",
                self.prec()
            )));
        }
        if let Some(i) = self.coeffs[..v].iter().position(|c| !c.is_zero()) {
            return Err(Error::InvalidArgument(format!(
                "quotient has a pole: numerator has nonzero q^{i} below q^{v}"
            )));
        }
        let num = self.shift_down(v);
        let den = other.shift_down(v);
        Ok(&num * &den.invert()?)
    }

    fn shift_down(&self, v: usize) -> QSeries {
        QSeries { coeffs: self.coeffs[v..].to_vec() }
    }

    /// Substitute `q -> q^m`.
    pub fn substitute_power(&self, m: usize) -> QSeries {
        assert!(m >= 1, "substitution exponent must be positive");
        let prec = m * self.prec() + m - 1;
        let mut s = QSeries::zero(prec);
        for (n, c) in self.coeffs.iter().enumerate() {
            s.coeffs[n * m] = c.clone();
        }
        s
    }

    /// The operator U = U_2 on q-expansions: `(U s)_n = s_{2n}`.
    pub fn u_operator(&self) -> QSeries {
        let prec = self.prec() / 2;
        QSeries { coeffs: (0..=prec).map(|n| self.coeffs[2 * n].clone()).collect() }
    }

    /// Substitute `q -> -q`.
    pub fn negate_q(&self) -> QSeries {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| if n % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// Compare coefficients up to the common precision.
    pub fn agreement(&self, other: &QSeries) -> Agreement {
        let prec = self.prec().min(other.prec());
        let first_mismatch = (0..=prec).find(|&n| self.coeffs[n] != other.coeffs[n]);
        Agreement { prec, first_mismatch }
    }

    /// Tab-separated dump, one `n<TAB>num/den` line per known coefficient.
    pub fn write_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(w, "{n}\t{}/{}", c.numer(), c.denom())?;
        }
        Ok(())
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*q")?,
                _ => write!(f, "{c}*q^{n}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.prec() + 1)
    }
}

impl Add for &QSeries {
    type Output = QSeries;

    fn add(self, rhs: &QSeries) -> QSeries {
        let prec = self.prec().min(rhs.prec());
        QSeries { coeffs: (0..=prec).map(|n| &self.coeffs[n] + &rhs.coeffs[n]).collect() }
    }
}

impl Sub for &QSeries {
    type Output = QSeries;

    fn sub(self, rhs: &QSeries) -> QSeries {
        let prec = self.prec().min(rhs.prec());
        QSeries { coeffs: (0..=prec).map(|n| &self.coeffs[n] - &rhs.coeffs[n]).collect() }
    }
}

impl Neg for &QSeries {
    type Output = QSeries;

    fn neg(self) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &QSeries {
    type Output = QSeries;

    /// Known up to `min(prec_a + ord_b, prec_b + ord_a)`.
    fn mul(self, rhs: &QSeries) -> QSeries {
        let (va, vb) = (self.order(), rhs.order());
        let prec = (self.prec() + vb).min(rhs.prec() + va);
        let len = prec + 1;
        if self.is_integral() && rhs.is_integral() {
            let a: Vec<BigInt> = self.coeffs.iter().map(|c| c.to_integer()).collect();
            let b: Vec<BigInt> = rhs.coeffs.iter().map(|c| c.to_integer()).collect();
            return QSeries::from_integers(mul_int(&a, &b, len), prec);
        }
        let mut out = vec![BigRational::zero(); len];
        for (i, x) in self.coeffs.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate().take(len - i) {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        QSeries { coeffs: out }
    }
}

/// Truncated product of integer coefficient vectors, `len` output terms.
/// Entries beyond either input are treated as zero; callers handle precision.
pub(crate) fn mul_int(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn pow_int(a: &[BigInt], mut e: u32, len: usize) -> Vec<BigInt> {
    let mut result = vec![BigInt::zero(); len];
    result[0] = BigInt::one();
    let mut base = a[..a.len().min(len)].to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = mul_int(&result, &base, len);
        }
        e >>= 1;
        if e > 0 {
            base = mul_int(&base, &base, len);
        }
    }
    result
}

fn invert_unit_int(a: &[BigInt], len: usize) -> Vec<BigInt> {
    // a[0] = ±1, so 1/a[0] = a[0]
    let u = a[0].clone();
    let mut b = vec![u.clone()];
    for n in 1..len {
        let mut acc = BigInt::zero();
        for i in 1..=n.min(a.len() - 1) {
            if !a[i].is_zero() {
                acc += &a[i] * &b[n - i];
            }
        }
        b.push(-acc * &u);
    }
    b
}

/// Multiply `c` (in place, `c.len()` terms) by `(1 + sign*q^step)^times`,
/// one sparse binomial factor at a time.
fn mul_binomial_in_place(c: &mut [BigInt], step: usize, sign: i32, times: u32) {
    for _ in 0..times {
        for idx in (step..c.len()).rev() {
            if c[idx - step].is_zero() {
                continue;
            }
            let (lo, hi) = c.split_at_mut(idx);
            if sign > 0 {
                hi[0] += &lo[idx - step];
            } else {
                hi[0] -= &lo[idx - step];
            }
        }
    }
}

/// `q^shift * prod_{n in steps} (1 + sign q^n)^24`, coefficients `0..=prec`.
fn eta_like_product(prec: usize, shift: usize, sign: i32, steps: impl Iterator<Item = usize>) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); prec + 1];
    if shift > prec {
        return out;
    }
    // the product itself is only needed to exponent prec - shift
    let mut c = vec![BigInt::zero(); prec - shift + 1];
    c[0] = BigInt::one();
    let len = c.len();
    for n in steps.take_while(|&n| n < len) {
        mul_binomial_in_place(&mut c, n, sign, 24);
    }
    for (i, x) in c.into_iter().enumerate() {
        out[i + shift] = x;
    }
    out
}

/// `(U s)_n = s_{2n}`; precision halves (rounding down).
pub fn u_on_qexp(s: &QSeries) -> QSeries {
    s.u_operator()
}

/// `Δ = q ∏ (1 - q^n)^24`.
pub fn delta_qexp(prec: usize) -> QSeries {
    QSeries::from_integers(eta_like_product(prec, 1, -1, 1..), prec)
}

/// The Hauptmodul `f = Δ(2τ)/Δ(τ) = q ∏ (1 + q^n)^24`.
pub fn f_qexp(prec: usize) -> QSeries {
    QSeries::from_integers(eta_like_product(prec, 1, 1, 1..), prec)
}

/// `f` built as `q ∏ (1 - q^(2n-1))^(-24)`.
pub fn f_qexp_odd_product(prec: usize) -> QSeries {
    let inner = eta_like_product(prec, 0, -1, (1..).step_by(2));
    let inv = invert_unit_int(&inner, prec + 1);
    let mut out = vec![BigInt::zero(); prec + 1];
    out[1..].clone_from_slice(&inv[..prec]);
    QSeries::from_integers(out, prec)
}

/// `f` built as the quotient `Δ(q^2) / Δ(q)`.
pub fn f_qexp_delta_quotient(prec: usize) -> QSeries {
    let numerator = delta_qexp(prec.div_ceil(2)).substitute_power(2);
    let quotient = numerator.div(&delta_qexp(prec + 1)).expect("Δ has leading term q");
    quotient.truncate(prec)
}

/// `g = 2^6 f`, the Banach-basis generator.
pub fn g_qexp(prec: usize) -> QSeries {
    f_qexp(prec).scale_int(64)
}

fn divisor_power_sum(n: u64, power: u32) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += BigInt::from(d).pow(power);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(power);
            }
        }
        d += 1;
    }
    s
}

fn eisenstein(prec: usize, factor: i64, power: u32) -> Vec<BigInt> {
    let mut c = vec![BigInt::one()];
    c.extend((1..=prec as u64).map(|n| divisor_power_sum(n, power) * factor));
    c
}

/// `E4 = 1 + 240 Σ σ3(n) q^n`.
pub fn e4_qexp(prec: usize) -> QSeries {
    QSeries::from_integers(eisenstein(prec, 240, 3), prec)
}

/// `E6 = 1 - 504 Σ σ5(n) q^n`.
pub fn e6_qexp(prec: usize) -> QSeries {
    QSeries::from_integers(eisenstein(prec, -504, 5), prec)
}

/// `θ = Σ_{a,b ∈ Z} q^(a² + ab + b²)`.
pub fn theta_qexp(prec: usize) -> QSeries {
    let mut c = vec![BigInt::zero(); prec + 1];
    // a² + ab + b² >= 3/4 max(a,b)², so |a|,|b| <= sqrt(4 prec / 3)
    let bound = ((4 * prec) as f64 / 3.0).sqrt() as i64 + 1;
    for a in -bound..=bound {
        for b in -bound..=bound {
            let n = a * a + a * b + b * b;
            if n as usize <= prec {
                c[n as usize] += 1;
            }
        }
    }
    QSeries::from_integers(c, prec)
}

/// `1/j = Δ / E4^3`.
pub fn j_inverse_qexp(prec: usize) -> QSeries {
    let e4 = e4_qexp(prec);
    let e4_cubed = e4.pow(3);
    &delta_qexp(prec) * &e4_cubed.invert().expect("E4 has constant term 1")
}

/// Look up a named series for the coefficient dump.
pub fn named_series(name: &str, prec: usize) -> Option<QSeries> {
    Some(match name {
        "delta" => delta_qexp(prec),
        "f" => f_qexp(prec),
        "g" => g_qexp(prec),
        "e4" => e4_qexp(prec),
        "e6" => e6_qexp(prec),
        "theta" => theta_qexp(prec),
        "j-inverse" => j_inverse_qexp(prec),
        _ => return None,
    })
}

pub const SERIES_NAMES: [&str; 7] = ["delta", "f", "g", "e4", "e6", "theta", "j-inverse"];

/// A polynomial in the Hauptmodul `f`, stored sparsely by degree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FPolynomial {
    coeffs: BTreeMap<usize, BigRational>,
}

impl FPolynomial {
    pub fn zero() -> Self {
        FPolynomial::default()
    }

    pub fn one() -> Self {
        FPolynomial::monomial(0, BigRational::one())
    }

    pub fn monomial(deg: usize, c: BigRational) -> Self {
        let mut p = FPolynomial::zero();
        p.set(deg, c);
        p
    }

    pub fn from_i64s(coeffs: &[(usize, i64)]) -> Self {
        let mut p = FPolynomial::zero();
        for &(d, c) in coeffs {
            p.set(d, BigRational::from_integer(c.into()));
        }
        p
    }

    pub fn set(&mut self, deg: usize, c: BigRational) {
        if c.is_zero() {
            self.coeffs.remove(&deg);
        } else {
            self.coeffs.insert(deg, c);
        }
    }

    pub fn coeff(&self, deg: usize) -> BigRational {
        self.coeffs.get(&deg).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.coeffs.iter().map(|(&d, c)| (d, c))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// Expand as a q-series by substituting `f`.
    pub fn eval_series(&self, f: &QSeries) -> QSeries {
        let prec = f.prec();
        let mut acc = QSeries::zero(prec);
        let mut power = QSeries::one(prec);
        let mut last = 0;
        for (d, c) in self.iter() {
            while last < d {
                power = &power * f;
                last += 1;
            }
            acc = &acc + &power.scale(c);
        }
        acc
    }
}

impl Add for &FPolynomial {
    type Output = FPolynomial;

    fn add(self, rhs: &FPolynomial) -> FPolynomial {
        let mut out = self.clone();
        for (d, c) in rhs.iter() {
            let v = out.coeff(d) + c;
            out.set(d, v);
        }
        out
    }
}

impl Mul for &FPolynomial {
    type Output = FPolynomial;

    fn mul(self, rhs: &FPolynomial) -> FPolynomial {
        let mut out = FPolynomial::zero();
        for (d1, c1) in self.iter() {
            for (d2, c2) in rhs.iter() {
                let v = out.coeff(d1 + d2) + c1 * c2;
                out.set(d1 + d2, v);
            }
        }
        out
    }
}

impl fmt::Display for FPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self.iter().map(|(d, c)| format!("{c}*X^{d}")).collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Write `s` as a polynomial of degree `<= maxdeg` in `f`.
///
/// Since `f = q + O(q^2)` the change of basis is unitriangular: peel off
/// the coefficient of `q^i` with `c_i f^i`, for `i = 0..=maxdeg`. Whatever
/// remains above `q^maxdeg` within the known precision must vanish.
pub fn decompose_in_f(s: &QSeries, maxdeg: usize) -> Result<FPolynomial> {
    let prec = s.prec();
    if prec < maxdeg {
        return Err(Error::InvalidArgument(format!("series precision {prec} below degree bound {maxdeg}")));
    }
    let f = f_qexp(prec);
    let mut residual = s.clone();
    let mut power = QSeries::one(prec);
    let mut out = FPolynomial::zero();
    for i in 0..=maxdeg {
        let c = residual.coeffs[i].clone();
        if !c.is_zero() {
            residual = &residual - &power.scale(&c);
            out.set(i, c);
        }
        if i < maxdeg {
            power = &power * &f;
        }
    }
    if let Some(index) = residual.valuation() {
        return Err(Error::NotAnFPolynomial { maxdeg, index });
    }
    Ok(out)
}

/// Dimension of level-1 cusp forms of even weight `k >= 4`.
pub fn cusp_form_dimension(k: i64) -> Result<usize> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidWeight(k));
    }
    let d = k / 12 - if k % 12 == 2 { 1 } else { 0 };
    Ok(d as usize)
}

/// Echelonised integral basis of `S_k`: `f_i = q^i + O(q^(dim+1))`.
///
/// Starts from the monomials `Δ^i E4^a E6^b` of weight `k` (one for each
/// `i = 1..=dim`, with `b ∈ {0, 1}`), whose leading term is `q^i`, and
/// clears the coefficients of `q^(i+1)..q^dim` by exact elimination.
pub fn miller_basis(k: i64, prec: usize) -> Result<Vec<QSeries>> {
    if k < 12 || k % 2 != 0 {
        return Err(Error::InvalidWeight(k));
    }
    let dim = cusp_form_dimension(k)?;
    if prec < dim {
        return Err(Error::InvalidArgument(format!("precision {prec} below dim S_{k} = {dim}")));
    }
    let len = prec + 1;
    let delta = delta_qexp(prec).to_integers()?;
    let e4 = e4_qexp(prec).to_integers()?;
    let e6 = e6_qexp(prec).to_integers()?;

    // k - 12 i is congruent to k mod 4 for every i, so the E6 exponent is fixed
    let b = if k % 4 == 2 { 1 } else { 0 };
    let a_of = |i: usize| -> u32 { ((k - 12 * i as i64 - 6 * b as i64) / 4) as u32 };

    let mut eis = mul_int(&pow_int(&e4, a_of(dim), len), &pow_int(&e6, b, len), len);
    let e4_cubed = pow_int(&e4, 3, len);
    let mut rows: Vec<Vec<BigInt>> = vec![Vec::new(); dim + 1];
    let mut delta_pow = vec![BigInt::zero(); len];
    delta_pow[0] = BigInt::one();
    let mut delta_pows = Vec::with_capacity(dim + 1);
    for _ in 0..=dim {
        delta_pows.push(delta_pow.clone());
        delta_pow = mul_int(&delta_pow, &delta, len);
    }
    for i in (1..=dim).rev() {
        if i < dim {
            eis = mul_int(&eis, &e4_cubed, len);
        }
        rows[i] = mul_int(&delta_pows[i], &eis, len);
        debug_assert!(rows[i][i].is_one() && rows[i][..i].iter().all(Zero::is_zero));
    }
    for i in (1..dim).rev() {
        for j in i + 1..=dim {
            let c = rows[i][j].clone();
            if c.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(j);
            let (row_i, row_j) = (&mut head[i], &tail[0]);
            for (x, y) in row_i.iter_mut().zip(row_j).skip(j) {
                *x -= &c * y;
            }
        }
    }
    Ok(rows.into_iter().skip(1).map(|r| QSeries::from_integers(r, prec)).collect())
}

/// Check the two congruence/identity facts used to identify the
/// overconvergent region: `θ^4 ≡ E4 (mod 8)` and `64/j = g/(4g+1)^3`.
pub fn appendix_identities(prec: usize) -> VerificationReport {
    let started = Instant::now();
    let mut report = VerificationReport::new("appendix-identities").param("prec", prec);

    let theta4 = theta_qexp(prec).pow(4);
    let diff = &theta4 - &e4_qexp(prec);
    let eight = BigInt::from(8);
    let bad = diff
        .coeffs()
        .iter()
        .position(|c| !(c.is_integer() && c.to_integer().is_multiple_of(&eight)));
    report.set_detail("theta4_e4_mod8", json!({ "pass": bad.is_none(), "checked_to": diff.prec() }));
    report.check(bad.is_none(), || json!({ "identity": "theta^4 = E4 mod 8", "index": bad }));

    let lhs = j_inverse_qexp(prec).scale_int(64);
    let g = g_qexp(prec);
    let denom = (&g.scale_int(4) + &QSeries::one(prec)).pow(3);
    let rhs = &g * &denom.invert().expect("4g+1 has constant term 1");
    let agreement = lhs.agreement(&rhs);
    report.set_detail(
        "j_inverse_g",
        json!({ "pass": agreement.equal(), "checked_to": agreement.prec }),
    );
    report.check(agreement.equal(), || {
        json!({ "identity": "64/j = g/(4g+1)^3", "index": agreement.first_mismatch })
    });
    report.finish(started)
}
