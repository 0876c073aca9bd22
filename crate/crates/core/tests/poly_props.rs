use proptest::prelude::*;
use uhyp::poly::{gcd, Monomial, SparsePoly, Var};
use uhyp::{FieldScalar, FieldSpec};

const N: usize = 2;

fn q() -> FieldSpec {
    FieldSpec::rationals()
}

fn poly_strategy(max_exp: u16, max_terms: usize) -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec(
        (
            prop::collection::vec(0..=max_exp, 2 * (N + 1)),
            -6i64..=6,
        ),
        0..=max_terms,
    )
    .prop_map(|terms| {
        SparsePoly::from_terms(
            N,
            &q(),
            terms.into_iter().map(|(e, c)| {
                (
                    Monomial::from_blocks(&e[N + 1..], &e[..N + 1]),
                    FieldScalar::from_int(&q(), c),
                )
            }),
        )
    })
}

/// Bi-homogeneous polynomial of bi-degree (da, dx).
fn bihomogeneous(da: u16, dx: u16) -> impl Strategy<Value = SparsePoly> {
    let mono = move |seed: Vec<u16>| {
        let split = |d: u16, w: &[u16]| {
            let mut e = vec![0u16; N + 1];
            for k in 0..d as usize {
                e[w[k % w.len()] as usize % (N + 1)] += 1;
            }
            e
        };
        let a = split(da, &seed[..4]);
        let x = split(dx, &seed[4..]);
        Monomial::from_blocks(&a, &x)
    };
    prop::collection::vec((prop::collection::vec(0u16..3, 8), 1i64..=5), 1..5).prop_map(move |t| {
        SparsePoly::from_terms(N, &q(), t.into_iter().map(|(s, c)| (mono(s), FieldScalar::from_int(&q(), c))))
    })
}

fn pure_a(max_terms: usize) -> impl Strategy<Value = SparsePoly> {
    poly_strategy(2, max_terms).prop_map(|p| {
        SparsePoly::from_terms(
            N,
            &q(),
            p.terms().map(|(m, c)| (Monomial::from_blocks(m.a_exp(), &[0; N + 1]), c.clone())),
        )
    })
}

fn point() -> impl Strategy<Value = Vec<FieldScalar>> {
    prop::collection::vec(-4i64..=4, N + 1)
        .prop_map(|v| v.into_iter().map(|c| FieldScalar::from_int(&q(), c)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ring_axioms(f in poly_strategy(3, 5), g in poly_strategy(3, 5), h in poly_strategy(3, 5)) {
        prop_assert_eq!(&f + &g, &g + &f);
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&f - &f, SparsePoly::zero(N, &q()));
        prop_assert_eq!(&f * &SparsePoly::one(N, &q()), f.clone());
    }

    #[test]
    fn bidegree_is_additive(f in bihomogeneous(2, 1), g in bihomogeneous(1, 3)) {
        let p = &f * &g;
        prop_assert!(p.is_bihomogeneous());
        prop_assert_eq!(p.bidegree(), Some((3, 4)));
    }

    #[test]
    fn star_is_idempotent(f in bihomogeneous(1, 2), c in pure_a(3)) {
        prop_assume!(!c.is_zero());
        let s = (&c * &f).star().unwrap();
        prop_assert!(s.content_in_a().unwrap().is_constant());
        prop_assert_eq!(s.star().unwrap(), s.clone());
        prop_assert_eq!(s, f.star().unwrap());
    }

    #[test]
    fn diagonal_shift_keeps_total_degree(f in bihomogeneous(2, 2)) {
        let s = f.diagonal_shift();
        prop_assume!(!s.is_zero());
        let total = |m: &Monomial| { let (a, x) = m.bidegree(); a + x };
        prop_assert!(s.terms().all(|(m, _)| total(m) == 4));
    }

    #[test]
    fn diagonal_shift_detects_order(g in bihomogeneous(1, 1), m in 1u32..4, pairs in prop::collection::vec((0usize..3, 0usize..3), 3)) {
        let mut f = g.clone();
        for &(i, j) in pairs.iter().take(m as usize) {
            let (i, j) = if i == j { (i, (i + 1) % (N + 1)) } else { (i, j) };
            let l = &(&SparsePoly::var(N, &q(), Var::a(i)) * &SparsePoly::var(N, &q(), Var::x(j)))
                - &(&SparsePoly::var(N, &q(), Var::a(j)) * &SparsePoly::var(N, &q(), Var::x(i)));
            f = &f * &l;
        }
        // Order exactly m needs g nonzero on the diagonal a = x.
        let on_diag = g.diagonal_shift().a_homogeneous_part(0);
        prop_assume!(!on_diag.is_zero());
        prop_assert_eq!(f.diagonal_shift().min_a_degree(), Some(m));
    }

    #[test]
    fn evaluation_commutes_with_derivative(f in poly_strategy(3, 6), pt in point(), k in 0usize..3) {
        let assign: Vec<(Var, FieldScalar)> = pt.iter().enumerate().map(|(i, c)| (Var::a(i), c.clone())).collect();
        let v = Var::x(k);
        prop_assert_eq!(
            f.partial_derivative(v).evaluate(&assign),
            f.evaluate(&assign).partial_derivative(v)
        );
    }

    #[test]
    fn text_round_trip(f in poly_strategy(3, 6)) {
        prop_assert_eq!(SparsePoly::parse(N, &q(), &f.to_string()).unwrap(), f);
    }

    #[test]
    fn swap_is_involution(f in poly_strategy(3, 6)) {
        prop_assert_eq!(f.swap_blocks().swap_blocks(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn gcd_contains_common_factor(f in poly_strategy(2, 3), g in poly_strategy(2, 3), h in poly_strategy(1, 3)) {
        prop_assume!(!f.is_zero() && !g.is_zero() && !h.is_zero());
        let d = gcd(&(&f * &h), &(&g * &h));
        prop_assert!(d.div_exact(&h).is_some());
        prop_assert!((&f * &h).div_exact(&d).is_some());
        prop_assert!((&g * &h).div_exact(&d).is_some());
    }
}
