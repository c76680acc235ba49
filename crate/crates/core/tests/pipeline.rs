//! End-to-end paths through several modules at once.

use num_bigint::BigInt;
use num_rational::BigRational;

use ocslopes::classical::{
    conjectural_polygon_classical, conjectural_polygon_overconvergent, t2_matrix, t2_reversed_charpoly,
    verify_conjecture1,
};
use ocslopes::linalg::reversed_charpoly_berkowitz;
use ocslopes::newton::{polygon_of_poly, polygons_equal};
use ocslopes::qseries::{decompose_in_f, f_qexp, miller_basis};
use ocslopes::spectral::{spectral_slopes, truncated_char_series, u_entry, uf_polynomials};
use ocslopes::valuation::slope_weight0;
use ocslopes::{Outcome, SlopeSource};

#[test]
fn classical_reports_serialise() {
    let r = verify_conjecture1(36);
    assert_eq!(r.outcome, Outcome::Pass);
    let v: serde_json::Value = serde_json::from_str(&r.to_json_line()).unwrap();
    assert_eq!(v["details"]["dim"], 3);
    assert_eq!(v["details"]["t2_polygon"], v["details"]["conjectural_polygon"]);
}

#[test]
fn t2_charpoly_routes_agree_at_moderate_weight() {
    for k in [72, 96] {
        let m = t2_matrix(k).unwrap();
        assert_eq!(t2_reversed_charpoly(k).unwrap(), reversed_charpoly_berkowitz(&m));
        assert!(m.is_integral());
    }
}

#[test]
fn classical_and_overconvergent_polygons_share_a_prefix() {
    // for large k the classical polygon approximates the weight-k overconvergent one
    let k = 120;
    let classical = conjectural_polygon_classical(k).unwrap();
    let t2 = polygon_of_poly(&t2_reversed_charpoly(k).unwrap(), 2).unwrap();
    assert!(polygons_equal(&classical, &t2, classical.extent()).unwrap());
    let oc = conjectural_polygon_overconvergent(0, 30).unwrap();
    let predicted: Vec<i64> = (1..=30).map(|n| slope_weight0(n).unwrap() as i64).collect();
    assert_eq!(oc.slopes(30, SlopeSource::Conjectural).unwrap().as_integers().unwrap(), predicted);
}

#[test]
fn u_matrix_columns_come_from_q_expansions() {
    // column j of U in the basis g^i is 2^(6j-6i) times the f-decomposition of U(f^j)
    for j in 1..=8usize {
        let prec = 2 * (2 * j + 10);
        let poly = decompose_in_f(&f_qexp(prec).pow(j as u32).u_operator(), 2 * j).unwrap();
        assert_eq!(poly, uf_polynomials(j)[j]);
        for i in 1..=2 * j {
            let shift = 6 * j as i64 - 6 * i as i64;
            let scaled = poly.coeff(i)
                * if shift >= 0 {
                    BigRational::from_integer(BigInt::from(1) << shift as usize)
                } else {
                    BigRational::new(BigInt::from(1), BigInt::from(1) << (-shift) as usize)
                };
            assert_eq!(scaled, u_entry(i as i64, j as i64));
        }
    }
}

#[test]
fn spectral_slopes_match_truncation_polygon() {
    let s = spectral_slopes(6).unwrap();
    let np = polygon_of_poly(&truncated_char_series(s.certified_at), 2).unwrap();
    assert_eq!(np.slopes(6, SlopeSource::Spectral).unwrap(), s.slopes);
}

#[test]
fn miller_basis_is_echelon() {
    for k in [36, 48, 100] {
        let b = miller_basis(k, 40).unwrap();
        for (i, f) in b.iter().enumerate() {
            assert_eq!(f.valuation(), Some(i + 1));
            for (j, g) in b.iter().enumerate() {
                let c = g.coeff(i + 1).unwrap();
                assert_eq!(*c == BigRational::from_integer(1.into()), i == j, "k={k} ({i},{j})");
                if i != j {
                    assert_eq!(*c, BigRational::from_integer(0.into()));
                }
            }
        }
    }
}

#[test]
fn weight_matrix_diagonal_valuations() {
    use ocslopes::spectral::weight_matrix_valuations;
    for m in 0..4 {
        let v = weight_matrix_valuations(m, 12);
        let diag: Vec<i64> = (0..12).map(|i| v[i][i].unwrap()).collect();
        println!("m = {m}: diagonal v2 {diag:?}");
        if m == 0 {
            let u: Vec<i64> = (1..=12)
                .map(|i| {
                    let x = u_entry(i, i);
                    (x.numer().trailing_zeros().unwrap() - x.denom().trailing_zeros().unwrap()) as i64
                })
                .collect();
            assert_eq!(diag, u);
            assert_eq!(diag[..4], [3, 7, 12, 15]);
        }
    }
}
