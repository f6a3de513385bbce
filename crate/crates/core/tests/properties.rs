use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use pdescent::arith::{int, is_qp_square_int, pow_int, vp_rat, Rat};
use pdescent::local::{crit_test_numberfield, crit_test_rational, decide_prop, Crit, PropInstance, Verdict};
use pdescent::nf::{NfElem, NumberField};
use pdescent::poly::{QPoly, ZPoly};
use pdescent::realroots::isolate_real_roots;
use pdescent::selmer::covering_group_order;

fn eval(g: &[i64], x: &BigInt) -> BigInt {
    g.iter().rev().fold(BigInt::zero(), |acc, &c| acc * x + c)
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, ..ProptestConfig::default() })]

    #[test]
    fn rational_criterion_never_eliminates_a_square(
        g in prop::collection::vec(-40i64..40, 1..6),
        p in small_prime(),
        n in 1u32..4,
        x0 in 0u64..1000,
    ) {
        prop_assume!(g.iter().any(|&c| c != 0));
        let pn = pow_int(p, n);
        let x0 = BigInt::from(x0) % &pn;
        let zg = ZPoly::from_i64(&g);
        if crit_test_rational(&zg, &x0, n, p) == Crit::Eliminable {
            for t in 0..(p * p * p) {
                let x = &x0 + &pn * BigInt::from(t);
                prop_assert!(!is_qp_square_int(&eval(&g, &x), p), "g({}) is a square", x);
            }
        }
    }
}

fn field(which: usize) -> Arc<NumberField> {
    match which {
        0 => NumberField::from_i64("Q(i)", &[1, 0, 1]).unwrap(),
        1 => NumberField::from_i64("Q(sqrt2)", &[-2, 0, 1]).unwrap(),
        _ => NumberField::from_i64("K1", &[-6, -15, -10, 0, 0, 1]).unwrap(),
    }
}

fn horner(k: &NumberField, g: &[NfElem], x: &BigInt) -> NfElem {
    let xe = k.from_int(x);
    g.iter().rev().fold(k.zero(), |acc, c| k.add(&k.mul(&acc, &xe), c))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1_500, ..ProptestConfig::default() })]

    #[test]
    fn numberfield_criterion_never_eliminates_a_square(
        which in 0usize..3,
        raw in prop::collection::vec(prop::collection::vec(-9i64..9, 2), 1..4),
        p in prop::sample::select(vec![2u64, 3, 5]),
        pick in 0usize..8,
        n in 1u32..3,
        x0 in 0u64..200,
    ) {
        let k = field(which);
        let g: Vec<NfElem> = raw.iter().map(|c| k.elem_i64(c)).collect();
        prop_assume!(g.iter().any(|c| !c.is_zero()));
        let mut places = k.primes_above(p).unwrap();
        let i = pick % places.len();
        let place = Arc::new(places.swap_remove(i));
        let pn = pow_int(p, n);
        let x0 = BigInt::from(x0) % &pn;
        if crit_test_numberfield(&g, &x0, n, &place).unwrap() == Crit::Eliminable {
            for t in 0..(p * p) {
                let x = &x0 + &pn * BigInt::from(t);
                let y = horner(&k, &g, &x);
                prop_assert!(!y.is_zero() && !place.is_local_square(&y), "square at {}", x);
            }
        }
    }

    #[test]
    fn valuation_sum_matches_norm(which in 0usize..3, c in prop::collection::vec(-30i64..30, 1..5), p in small_prime()) {
        let k = field(which);
        let x = k.elem_i64(&c);
        prop_assume!(!x.is_zero());
        let places = k.primes_above(p).unwrap();
        let total: i64 = places.iter().map(|pl| pl.f as i64 * pl.valuation(&x).unwrap()).sum();
        prop_assert_eq!(total, vp_rat(&k.norm(&x), p).unwrap());
        let ef: u32 = places.iter().map(|pl| pl.e * pl.f).sum();
        prop_assert_eq!(ef as usize, k.degree());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, ..ProptestConfig::default() })]

    #[test]
    fn decide_agrees_with_exhaustive_search(
        g in prop::collection::vec(-30i64..30, 1..5),
        p in prop::sample::select(vec![2u64, 3, 5]),
    ) {
        prop_assume!(g.iter().any(|&c| c != 0));
        let inst = PropInstance::new(p, ZPoly::from_i64(&g), vec![]);
        let r = decide_prop(&inst, 16);
        let bound = pow_int(p, 6);
        let mut found = false;
        let mut x = BigInt::zero();
        while x < bound {
            if is_qp_square_int(&eval(&g, &x), p) {
                found = true;
                break;
            }
            x += 1;
        }
        match r.verdict {
            Verdict::Soluble => {
                let w: BigInt = r.witness.unwrap().x.parse().unwrap();
                prop_assert!(inst.satisfied_at(&w));
            }
            Verdict::Insoluble => prop_assert!(!found, "exhaustive search found {}", x),
            Verdict::DepthExceeded => {}
        }
        if found {
            prop_assert_ne!(r.verdict, Verdict::Insoluble);
        }
    }

    #[test]
    fn isolated_roots_are_sorted_and_separated(
        roots in prop::collection::btree_set((-40i64..40, 1i64..6), 1..7),
        extra in 0i64..3,
    ) {
        let mut f = QPoly::from_ints(&[1 + extra, 0, 1]);
        let mut vals: Vec<Rat> = Vec::new();
        for &(a, b) in &roots {
            f = f.mul(&QPoly::from_ints(&[-a, b]));
            vals.push(Rat::new(int(a), int(b)));
        }
        vals.sort();
        vals.dedup();
        let iso = isolate_real_roots(&f);
        prop_assert_eq!(iso.len(), vals.len());
        for w in iso.windows(2) {
            prop_assert!(w[0].hi() < w[1].lo());
        }
        for (r, v) in iso.iter().zip(&vals) {
            prop_assert!(r.lo() <= v && v <= r.hi());
        }
    }

    #[test]
    fn covering_order_invariances(
        vs in prop::collection::vec(1u128..(1u128 << 20), 1..6),
        perm_seed in prop::collection::vec(0usize..1000, 20),
        pick in 0usize..6,
    ) {
        let n = 20;
        let base = covering_group_order(&vs, n);
        // A permutation of the 20 coordinates.
        let mut perm: Vec<usize> = (0..n).collect();
        for (i, s) in perm_seed.iter().enumerate() {
            perm.swap(i, s % n);
        }
        let permuted: Vec<u128> = vs
            .iter()
            .map(|v| (0..n).filter(|&i| v >> i & 1 == 1).fold(0u128, |acc, i| acc | 1 << perm[i]))
            .collect();
        prop_assert_eq!(covering_group_order(&permuted, n), base);
        let mut rev = vs.clone();
        rev.reverse();
        prop_assert_eq!(covering_group_order(&rev, n), base);
        let all = (1u128 << n) - 1;
        let w = vs[pick % vs.len()] ^ all;
        let mut with = vs.clone();
        with.push(w);
        prop_assert_eq!(covering_group_order(&with, n), base);
    }
}

#[test]
fn decide_rejects_constant_nonresidue() {
    let r = decide_prop(&PropInstance::new(5, ZPoly::from_i64(&[2, 0, 5]), vec![]), 40);
    assert_eq!(r.verdict, Verdict::Insoluble);
}
