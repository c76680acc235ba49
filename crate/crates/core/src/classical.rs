//! T2 on level-1 cusp forms and the conjectural product polygons.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::{reversed_charpoly_with, CoefficientBound};
use crate::newton::{polygon_from_points, polygon_of_poly, NewtonPolygon};
use crate::qseries::{cusp_form_dimension, miller_basis, QSeries};
use crate::report::VerificationReport;
use crate::valuation::{factorial, legendre, vp, Valuation};

pub use crate::linalg::{reversed_charpoly, RationalMatrix};

fn check_weight(k: i64) -> Result<()> {
    if k < 12 || k % 2 != 0 {
        Err(Error::InvalidWeight(k))
    } else {
        Ok(())
    }
}

/// `(T2 s)_n = s_{2n} + 2^(k-1) s_{n/2}`, the second term only for even `n`.
pub fn hecke_t2(s: &QSeries, k: i64) -> QSeries {
    let prec = s.prec() / 2;
    let scale = BigRational::from_integer(BigInt::one() << (k - 1) as usize);
    let coeffs = (0..=prec)
        .map(|n| {
            let mut c = s.coeff(2 * n).expect("within precision").clone();
            if n % 2 == 0 {
                c += &scale * s.coeff(n / 2).expect("within precision");
            }
            c
        })
        .collect();
    QSeries::new(coeffs, prec)
}

/// Matrix of T2 on `S_k` in the echelonised basis; column j holds the
/// coordinates of `T2 f_j`, read off from `q^1..q^dim`.
pub fn t2_matrix(k: i64) -> Result<RationalMatrix> {
    check_weight(k)?;
    let dim = cusp_form_dimension(k)?;
    let basis = miller_basis(k, 2 * dim)?;
    let images: Vec<QSeries> = basis.iter().map(|f| hecke_t2(f, k)).collect();
    let m = RationalMatrix::from_fn(dim, |i, j| images[j].coeff(i + 1).expect("T2 image has precision dim").clone());
    if let Some(bad) = m.rows().flatten().find(|x| !x.is_integer()) {
        return Err(Error::NonIntegral(bad.to_string()));
    }
    Ok(m)
}

/// `det(1 - X T2)` on `S_k`.
///
/// T2 is self-adjoint for the Petersson product, so its spectrum is real
/// and the tighter trace bound applies to the modular recombination.
pub fn t2_reversed_charpoly(k: i64) -> Result<Vec<BigRational>> {
    let m = t2_matrix(k)?;
    Ok(reversed_charpoly_with(&m, CoefficientBound::RealSpectrum))
}

/// Factor `j` of the weight-k product:
/// `2^(2j) (k-8j)! (k-8j-3)! (k-12j-2) / ((k-12j)! (k-6j-1)!)`.
fn classical_factor(k: i64, j: i64) -> Result<BigRational> {
    let lin = k - 12 * j - 2;
    if lin == 0 {
        return Err(Error::InvalidArgument(format!("factor k-12j-2 vanishes at k={k}, j={j}")));
    }
    let num = (BigInt::one() << (2 * j) as usize) * factorial(k - 8 * j)? * factorial(k - 8 * j - 3)? * lin;
    let den = factorial(k - 12 * j)? * factorial(k - 6 * j - 1)?;
    Ok(BigRational::new(num, den))
}

/// Coefficients `1, c_1, ..., c_m` of the conjectural classical product.
pub fn conjectural_coefficients_classical(k: i64) -> Result<Vec<BigRational>> {
    check_weight(k)?;
    let m = cusp_form_dimension(k)? as i64;
    let mut out = vec![BigRational::one()];
    let mut acc = BigRational::one();
    for j in 1..=m {
        acc *= classical_factor(k, j)?;
        out.push(acc.clone());
    }
    Ok(out)
}

/// 2-adic Newton polygon predicted for `det(1 - X T2)` on `S_k`.
pub fn conjectural_polygon_classical(k: i64) -> Result<NewtonPolygon> {
    polygon_of_poly(&conjectural_coefficients_classical(k)?, 2)
}

/// Per-factor 2-adic valuation of the overconvergent product at weight
/// `k <= 0`:
/// `2^(2j) (-k+2+12j)! (-k+6j)! / ((-k+2+8j)! (-k-2+8j)! (-k-12j))`.
///
/// Evaluated through Legendre's formula, so no factorial is expanded.
fn overconvergent_factor_valuation(k: i64, j: i64) -> Result<i64> {
    let lin = -k - 12 * j;
    if lin == 0 {
        return Err(Error::Pole(j as u64));
    }
    let fact = |n: i64| -> Result<i64> {
        if n < 0 {
            Err(Error::NegativeFactorial(n))
        } else {
            Ok(legendre(n as u64, 2) as i64)
        }
    };
    let lin_v = vp(&BigRational::from_integer(lin.into()), 2)?.finite().expect("nonzero");
    Ok(2 * j + fact(-k + 2 + 12 * j)? + fact(-k + 6 * j)? - fact(-k + 2 + 8 * j)? - fact(-k - 2 + 8 * j)? - lin_v)
}

/// Exact value of one factor of the overconvergent product (test oracle
/// and small-case use).
pub fn overconvergent_factor(k: i64, j: i64) -> Result<BigRational> {
    if k > 0 {
        return Err(Error::InvalidArgument(format!("weight {k} > 0 is not supported")));
    }
    let lin = -k - 12 * j;
    if lin == 0 {
        return Err(Error::Pole(j as u64));
    }
    let num = (BigInt::one() << (2 * j) as usize) * factorial(-k + 2 + 12 * j)? * factorial(-k + 6 * j)?;
    let den = factorial(-k + 2 + 8 * j)? * factorial(-k - 2 + 8 * j)? * lin;
    Ok(BigRational::new(num, den))
}

/// `(n, v2(c_n))` for `n = 1..=nmax` of the conjectural series at `k <= 0`.
pub fn conjectural_series_overconvergent(k: i64, nmax: usize) -> Result<Vec<(usize, Valuation)>> {
    if k > 0 {
        return Err(Error::InvalidArgument(format!("weight {k} > 0 is not supported")));
    }
    if nmax == 0 {
        return Err(Error::InvalidArgument("nmax must be positive".into()));
    }
    // report a pole before doing any work
    if k % 12 == 0 && (-k / 12) >= 1 && (-k / 12) as usize <= nmax {
        return Err(Error::Pole((-k / 12) as u64));
    }
    let mut out = Vec::with_capacity(nmax);
    let mut total = 0;
    for j in 1..=nmax as i64 {
        total += overconvergent_factor_valuation(k, j)?;
        out.push((j as usize, Valuation::Finite(total)));
    }
    Ok(out)
}

/// Newton polygon of the conjectural overconvergent series, first `nmax` terms.
pub fn conjectural_polygon_overconvergent(k: i64, nmax: usize) -> Result<NewtonPolygon> {
    let mut pts = vec![(0, Valuation::Finite(0))];
    pts.extend(conjectural_series_overconvergent(k, nmax)?);
    polygon_from_points(&pts)
}

/// Compare the 2-adic polygon of `det(1 - X T2)` on `S_k` with the
/// conjectural product polygon.
pub fn verify_conjecture1(k: i64) -> VerificationReport {
    let started = Instant::now();
    let mut report = VerificationReport::new("conjecture1").param("k", k);
    if let Err(e) = run_conjecture1(k, &mut report) {
        report.set_error(e);
    }
    report.finish(started)
}

fn run_conjecture1(k: i64, report: &mut VerificationReport) -> Result<()> {
    check_weight(k)?;
    let dim = cusp_form_dimension(k)?;
    let m = t2_matrix(k)?;
    report.set_detail("dim", dim);
    report.check(m.dim() == dim, || json!({ "check": "basis size", "dim": dim, "basis": m.dim() }));

    let charpoly = reversed_charpoly_with(&m, CoefficientBound::RealSpectrum);
    report.check(charpoly.iter().all(|c| c.is_integer()), || json!({ "check": "charpoly integrality" }));
    // cheap exact cross-check of the modular recombination
    let trace_ok = charpoly.len() < 2 || charpoly[1] == -m.trace();
    report.check(trace_ok, || json!({ "check": "c_1 = -trace" }));

    let actual = polygon_of_poly(&charpoly, 2)?;
    let predicted = conjectural_polygon_classical(k)?;
    report.set_detail("t2_polygon", actual.vertices());
    report.set_detail("conjectural_polygon", predicted.vertices());
    report.check(actual == predicted, || {
        json!({ "check": "polygons", "t2": actual.vertices(), "conjectural": predicted.vertices() })
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::SlopeSource;
    use num_traits::Zero;
    use crate::qseries::{delta_qexp, e4_qexp};
    use crate::valuation::slope_weight0;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn slopes(np: &NewtonPolygon) -> Vec<i64> {
        np.slopes(np.extent(), SlopeSource::Classical).unwrap().as_integers().unwrap()
    }

    #[test]
    fn delta_is_a_t2_eigenform() {
        let d = delta_qexp(40);
        let t = hecke_t2(&d, 12);
        assert!(t.agreement(&d.truncate(20).scale_int(-24)).equal());
    }

    #[test]
    fn small_t2_matrices() {
        let m12 = t2_matrix(12).unwrap();
        assert_eq!(m12, RationalMatrix::from_i64_rows(&[&[-24]]).unwrap());
        // E4 Δ is the weight-16 newform; its T2 eigenvalue is its q^2 coefficient
        let e4d = &e4_qexp(4) * &delta_qexp(4);
        assert_eq!(e4d.coeff(2).unwrap(), &r(216));
        assert_eq!(t2_matrix(16).unwrap(), RationalMatrix::from_i64_rows(&[&[216]]).unwrap());
        let m24 = t2_matrix(24).unwrap();
        assert_eq!(m24.dim(), 2);
        assert_eq!(m24.trace(), r(1080));
        assert!(t2_matrix(13).is_err());
        assert!(t2_matrix(10).is_err());
    }

    /// Weight 24: eigenvalues are the roots of x^2 - 1080x - 20468736
    /// (the q^2 coefficients of the two newforms, 540 ± 12 sqrt(144169)).
    #[test]
    fn weight24_charpoly() {
        let c = t2_reversed_charpoly(24).unwrap();
        assert_eq!(c, vec![r(1), r(-1080), r(-20468736)]);
    }

    #[test]
    fn conjectural_examples() {
        let c = conjectural_coefficients_classical(12).unwrap();
        assert_eq!(c[1], BigRational::new((-8).into(), 5.into()));
        assert_eq!(slopes(&conjectural_polygon_classical(12).unwrap()), vec![3]);
        let c = conjectural_coefficients_classical(16).unwrap();
        assert_eq!(c[1], BigRational::new(40.into(), 9.into()));
        let c = conjectural_coefficients_classical(22).unwrap();
        assert_eq!(c[1], BigRational::new((32 * 11).into(), 15.into()));
        assert_eq!(slopes(&conjectural_polygon_classical(22).unwrap()), vec![5]);
        // T2 eigenvalue on S_22 is -288, valuation 5
        assert_eq!(t2_matrix(22).unwrap(), RationalMatrix::from_i64_rows(&[&[-288]]).unwrap());
    }

    #[test]
    fn overconvergent_k0() {
        assert_eq!(overconvergent_factor(0, 1).unwrap(), r(-8008));
        let series = conjectural_series_overconvergent(0, 50).unwrap();
        assert_eq!(series[0], (1, Valuation::Finite(3)));
        let mut total = 0;
        for (n, v) in series {
            total += slope_weight0(n as i64).unwrap() as i64;
            assert_eq!(v, Valuation::Finite(total));
        }
    }

    #[test]
    fn overconvergent_valuations_match_exact_factors() {
        for k in [0i64, -4, -6, -13, -30] {
            for j in 1..=12 {
                let exact = overconvergent_factor(k, j).unwrap();
                let v = vp(&exact, 2).unwrap().finite().unwrap();
                assert_eq!(overconvergent_factor_valuation(k, j).unwrap(), v, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn overconvergent_poles_and_bad_weights() {
        assert_eq!(conjectural_series_overconvergent(-12, 1), Err(Error::Pole(1)));
        assert_eq!(conjectural_series_overconvergent(-24, 5), Err(Error::Pole(2)));
        assert!(conjectural_series_overconvergent(-24, 1).is_ok());
        assert!(conjectural_series_overconvergent(2, 3).is_err());
    }

    #[test]
    fn conjecture1_small_weights() {
        for k in [12, 16, 24, 36, 50, 64] {
            let r = verify_conjecture1(k);
            assert!(r.passed(), "{}", r.to_json_line());
        }
        let r = verify_conjecture1(24);
        assert_eq!(r.details["dim"], json!(2));
        assert_eq!(verify_conjecture1(13).outcome, crate::report::Outcome::Error);
    }

    #[test]
    fn charpoly_routes_agree_on_t2() {
        for k in [36, 48, 60] {
            let m = t2_matrix(k).unwrap();
            let fast = reversed_charpoly_with(&m, CoefficientBound::RealSpectrum);
            assert_eq!(fast, crate::linalg::reversed_charpoly_berkowitz(&m));
            assert_eq!(fast, reversed_charpoly(&m));
            assert!(fast.iter().all(|c| c.is_integer()));
            assert!(!fast.last().unwrap().is_zero());
        }
    }
}
