use proptest::prelude::*;

use uhyp::detector::{extract_form, DetectOptions};
use uhyp::duality::{
    base_locus_check, bmss_check, diagonal_multiplicity, sample_points, swap_relation, taylor_cone,
    tangent_cone, SwapRelation,
};
use uhyp::pointsets::{root_system, PointSet, ProjectivePoint};
use uhyp::poly::{Block, SparsePoly, Var};
use uhyp::{FieldScalar, FieldSpec};

fn q() -> FieldSpec {
    FieldSpec::rationals()
}

fn int(v: i64) -> FieldScalar {
    FieldScalar::from_int(&q(), v)
}

fn x(i: usize) -> SparsePoly {
    SparsePoly::var(2, &q(), Var::x(i))
}

/// Σ_{j ≥ k} G_j(x1 - p1 x0, x2 - p2 x0) x0^(deg - j): a form vanishing to
/// order k at [1 : p1 : p2] whose lowest part G_k has coefficients `low`.
fn singular_form(p: (i64, i64), deg: u32, k: u32, low: &[i64], high: &[i64]) -> SparsePoly {
    let l1 = &x(1) - &x(0).scale(&int(p.0));
    let l2 = &x(2) - &x(0).scale(&int(p.1));
    let mut h = SparsePoly::zero(2, &q());
    let mut c = high.iter().cycle();
    for j in k..=deg {
        for i in 0..=j {
            let coef = if j == k { low[i as usize % low.len()] } else { *c.next().unwrap() };
            let term = &(&l1.pow(i) * &l2.pow(j - i)) * &x(0).pow(deg - j);
            h = &h + &term.scale(&int(coef));
        }
    }
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cone_formula_matches_taylor_shift(
        p in (-4i64..=4, -4i64..=4),
        deg in 3u32..=4,
        k in 1u32..=3,
        low in prop::collection::vec(prop_oneof![-5i64..=-1, 1i64..=5], 1..=4),
        high in prop::collection::vec(-5i64..=5, 1..=12),
    ) {
        let k = k.min(deg - 1);
        let h = singular_form(p, deg, k, &low, &high);
        let point = vec![int(1), int(p.0), int(p.1)];
        let cone = tangent_cone(&h, &point, k).unwrap();
        let (order, lowest) = taylor_cone(&h, &point).unwrap();
        prop_assert_eq!(order, k);
        prop_assert_eq!(cone.total_degree(), Some(k));
        prop_assert!(cone.proportionality(&lowest).is_some());
        prop_assert_eq!(cone, lowest);
    }

    #[test]
    fn swap_class_is_stable(coeffs in prop::collection::vec(-3i64..=3, 9)) {
        let mut f = SparsePoly::zero(2, &q());
        let mut c = coeffs.iter();
        for i in 0..3 {
            for j in 0..3 {
                let a = SparsePoly::var(2, &q(), Var::a(i));
                f = &f + &(&a * &x(j)).scale(&int(*c.next().unwrap()));
            }
        }
        prop_assert_eq!(swap_relation(&f), swap_relation(&f.swap_blocks()));
    }
}

#[test]
fn b4_and_d4_swap_symmetry() {
    let opts = DetectOptions::default();
    let b4 = root_system("B", 4).unwrap();
    let r = bmss_check(&b4, 4, 4, &sample_points(3, &q(), 21, 3), &opts).unwrap();
    assert_eq!(r.bidegree, (4, 4));
    assert_eq!(r.swap_relation, SwapRelation::Symmetric);
    assert_eq!(r.tangent_cone_match, Some(true));
    assert!(r.samples.iter().all(|s| s.sign_matches));

    let d4 = root_system("D", 4).unwrap();
    let r = bmss_check(&d4, 3, 3, &sample_points(3, &q(), 22, 3), &opts).unwrap();
    assert_eq!(r.bidegree, (3, 3));
    assert_eq!(r.swap_relation, SwapRelation::Antisymmetric);
    assert_eq!(r.tangent_cone_match, Some(true));
    assert!(r.samples.iter().all(|s| s.sign_matches));
}

#[test]
fn extracted_forms_respect_multiplicity_bound() {
    let opts = DetectOptions::default();
    for (name, rank, d, m) in [("B", 3, 4, 3), ("B", 4, 4, 4), ("D", 4, 3, 3), ("F", 4, 4, 4)] {
        let z = root_system(name, rank).unwrap();
        let f = extract_form(&z, d, m, 1, &opts).unwrap().remove(0);
        assert!(f.bidegree.0 >= m, "{name}{rank}");
        assert_eq!(f.bidegree.1, d);
        assert!(diagonal_multiplicity(&f.poly, Block::A) >= m);
        assert!(diagonal_multiplicity(&f.poly, Block::X) >= m);
        assert_eq!(base_locus_check(&f.poly, &z).len(), z.len());
    }
}

#[test]
fn b3_with_collinear_points_gives_composite_curve() {
    let b3 = root_system("B", 3).unwrap();
    let mut pts = b3.points().to_vec();
    for t in 1..=8 {
        pts.push(ProjectivePoint::from_ints(&q(), &[1, t, 5 + 7 * t]).unwrap());
    }
    let z = PointSet::new(2, &q(), pts, "B3+line").unwrap();
    let r = bmss_check(&z, 5, 3, &sample_points(2, &q(), 5, 3), &DetectOptions::default()).unwrap();
    assert_eq!(r.bidegree, (3, 5));
    assert_eq!(r.tangent_cone_match, Some(true));
    assert!(r.samples.iter().all(|s| s.sign_matches));
}

#[test]
fn non_unique_forms_rejected() {
    let f4 = root_system("F", 4).unwrap();
    assert!(bmss_check(&f4, 4, 3, &[], &DetectOptions::default()).is_err());
}
