use std::collections::BTreeMap;

use proptest::prelude::*;

use genjacobi::cli::parse_poly;
use genjacobi::exactmath::{Monomial, Poly, PolyMatrix, Rational};
use genjacobi::free_algebra::FreeExpr;
use genjacobi::index_bracket::{bracket_apply, cyclic_sum, instantiate, BracketPositions, IndexTuple, Label, TupleSum};
use genjacobi::jacobi_verify::{verify_pth_jacobi_in, verify_pth_jacobi_matrix, RingInstance};
use genjacobi::rng::Lcg64;
use genjacobi::transport::{
    check_consistency, verify_transport_identity, FrameFamily, GammaKind, TransportIdentity, TransportParams,
    TransportScenario,
};

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rational::new(n, d))
}

fn poly(nvars: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u16..=3, nvars), rational()), 0..6).prop_map(move |terms| {
        Poly::from_terms(nvars, terms.into_iter().map(|(e, c)| (Monomial::from_exponents(&e), c))).unwrap()
    })
}

fn labels(names: &[&str]) -> Vec<Label> {
    names.iter().map(|n| Label::new(n)).collect()
}

/// A tuple over a small alphabet (repeats allowed) and valid positions.
fn tuple_and_positions() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (2usize..=5).prop_flat_map(|q| {
        (
            prop::collection::vec(0usize..4, q),
            Just((1..=q).collect::<Vec<_>>()).prop_shuffle(),
            2..=q,
        )
            .prop_map(|(t, pos, p)| (t, pos[..p].to_vec()))
    })
}

const ALPHABET: [&str; 4] = ["i", "j", "k", "l"];

fn tuple(idx: &[usize]) -> IndexTuple {
    IndexTuple::new(idx.iter().map(|&i| Label::new(ALPHABET[i])).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_polynomials_parse_back(p in poly(3)) {
        prop_assert_eq!(parse_poly(&p.to_string(), 3, false).unwrap(), p);
    }

    #[test]
    fn printed_two_point_polynomials_parse_back(p in poly(4)) {
        let names = Poly::point_names(2, 2);
        let text = p.display_with(&names).to_string();
        prop_assert_eq!(parse_poly(&text, 2, true).unwrap(), p);
    }

    #[test]
    fn rational_field_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a * &b) * &b.recip(), a.clone());
        }
        let parsed: Rational = a.to_string().parse().unwrap();
        prop_assert_eq!(parsed, a);
    }

    #[test]
    fn polynomial_ring_laws(p in poly(2), q in poly(2), r in poly(2)) {
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn derivative_obeys_leibniz(p in poly(2), q in poly(2), var in 0usize..2) {
        let lhs = (&p * &q).diff(var).unwrap();
        let rhs = &(&p.diff(var).unwrap() * &q) + &(&p * &q.diff(var).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_is_a_ring_map(p in poly(2), q in poly(2), x in rational(), y in rational()) {
        let pt = [x, y];
        let prod = (&p * &q).eval(&pt).unwrap();
        prop_assert_eq!(prod, &p.eval(&pt).unwrap() * &q.eval(&pt).unwrap());
    }

    #[test]
    fn bracket_output_sums_to_zero((t, pos) in tuple_and_positions()) {
        let ts = TupleSum::singleton(tuple(&t));
        let pos = BracketPositions::new(&pos, t.len()).unwrap();
        let out = bracket_apply(&ts, &pos).unwrap();
        prop_assert_eq!(out.coefficient_sum(), 0);
        prop_assert!(out.terms().all(|(tp, _)| tp.len() == t.len()));
    }

    #[test]
    fn bracket_commutes_with_cyclic_relabeling((t, pos) in tuple_and_positions()) {
        let ts = TupleSum::singleton(tuple(&t));
        let pos = BracketPositions::new(&pos, t.len()).unwrap();
        let cycle = labels(&ALPHABET[..3]);
        let a = cyclic_sum(&bracket_apply(&ts, &pos).unwrap(), &cycle).unwrap();
        let b = bracket_apply(&cyclic_sum(&ts, &cycle).unwrap(), &pos).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn instantiation_is_linear(
        (t, pos) in tuple_and_positions(),
        c in -3i64..=3,
    ) {
        let ts = TupleSum::singleton(tuple(&t));
        let pos = BracketPositions::new(&pos, t.len()).unwrap();
        let br = bracket_apply(&ts, &pos).unwrap();
        let words = |s: &TupleSum| instantiate(s, FreeExpr::zero(), |tp| FreeExpr::product_word("A", tp.labels()));
        let mut combo = ts.clone();
        combo.add_scaled(&br, c);
        let mut expected = words(&ts);
        let scaled = words(&br).scale(&c.into());
        expected = expected.add(&scaled);
        prop_assert_eq!(words(&combo), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn matrix_jacobi_for_any_seed(seed in any::<u64>(), p in 2usize..=4, dim in 2usize..=3) {
        let r = verify_pth_jacobi_matrix(p, dim, 2, seed).unwrap();
        prop_assert!(r.is_verified(), "{:?}", r.witness);
    }

    #[test]
    fn cross_product_jacobi_for_any_seed(seed in any::<u64>()) {
        let r = verify_pth_jacobi_in(RingInstance::CrossProduct3, 3, 3, seed).unwrap();
        prop_assert!(r.is_verified());
    }

    #[test]
    fn unipotent_inverse_is_an_inverse(seed in any::<u64>(), m in 1usize..=3) {
        let mut rng = Lcg64::new(seed);
        let label = [Label::new("a")];
        let frames = FrameFamily::random(2, m, &label, 2, 3, &mut rng);
        let f: &PolyMatrix = frames.frame(&label[0]).unwrap();
        let product = f.try_mul(&f.unipotent_inverse().unwrap()).unwrap();
        prop_assert_eq!(product, PolyMatrix::identity(m, 2));
    }

    #[test]
    fn transport_laws_for_any_seed(seed in any::<u64>(), n in 1usize..=2, m in 2usize..=3) {
        let s = TransportScenario::random(&TransportParams {
            base_dim: n,
            fiber_dim: m,
            labels: 3,
            seed,
            ..TransportParams::default()
        });
        for id in [TransportIdentity::Groupoid, TransportIdentity::IdentityTransport, TransportIdentity::DerivativeKillsTransport] {
            let r = verify_transport_identity(&s, id, 2, seed).unwrap();
            prop_assert!(r.is_verified(), "{}: {:?}", id, r.witness);
        }
        prop_assert!(check_consistency(&s, 2, seed).unwrap().is_verified());
    }

    #[test]
    fn curvature_components_stay_skew(seed in any::<u64>()) {
        let s = TransportScenario::random(&TransportParams {
            base_dim: 2,
            fiber_dim: 2,
            labels: 2,
            kind: GammaKind::Arbitrary,
            seed,
            ..TransportParams::default()
        });
        let r = verify_transport_identity(&s, TransportIdentity::CurvatureSkew, 1, seed).unwrap();
        prop_assert!(r.is_verified(), "{:?}", r.witness);
    }
}

#[test]
fn relabeling_is_a_bijection_on_tuples() {
    let ts = TupleSum::from_terms(3, vec![(IndexTuple::from_names(&["i", "j", "k"]), 2), (IndexTuple::from_names(&["k", "k", "j"]), -1)]).unwrap();
    let (i, j, k) = (Label::new("i"), Label::new("j"), Label::new("k"));
    let forward: BTreeMap<&Label, &Label> = [(&i, &j), (&j, &k), (&k, &i)].into_iter().collect();
    let back: BTreeMap<&Label, &Label> = [(&j, &i), (&k, &j), (&i, &k)].into_iter().collect();
    assert_eq!(ts.relabel(&forward).relabel(&back), ts);
}
