use std::collections::BTreeSet;

use pdescent::arith::{int, Int};
use pdescent::edwards::{default_data_dir, descent_setup, Corpus};
use pdescent::local::Place;
use pdescent::nf::NfElem;
use pdescent::selmer::{
    delta_map, enumerate_candidates, fake_selmer_set, local_condition, DescentSetup, FakeSelmerSet, DEFAULT_DEPTH_CAP,
};

fn setup(i: usize) -> DescentSetup {
    descent_setup(&Corpus::builtin(), i, &default_data_dir()).unwrap()
}

fn run(s: &DescentSetup) -> FakeSelmerSet {
    fake_selmer_set(s, &s.default_places().unwrap(), DEFAULT_DEPTH_CAP).unwrap()
}

fn tuple(s: &DescentSetup, classes: &[i64]) -> u128 {
    let k = &s.field;
    let xs: Vec<NfElem> = classes.iter().map(|&a| k.from_int(&int(a))).collect();
    s.canonical(s.dlog(&xs).expect("classes lie in the candidate group"))
}

fn image(s: &DescentSetup, u: i64, v: i64, y: &Int) -> u128 {
    delta_map(s, &int(u), &int(v), y).unwrap()
}

#[test]
fn two_factor_curve_has_trivial_set() {
    let s = setup(28);
    assert_eq!(s.degrees(), vec![10, 20]);
    assert_eq!(s.cover_order, 2);
    let set = run(&s);
    assert_eq!(set.survivors(), vec![0]);
    assert_eq!(set.undecided(), 0);
    assert_eq!(s.labels(0), vec!["1", "1"]);
    let y = int(2985984);
    for m in [image(&s, 0, 1, &int(1)), image(&s, 0, 1, &int(-1)), image(&s, 1, 0, &y), image(&s, 1, 0, &-y.clone())] {
        assert_eq!(m, 0);
    }
}

#[test]
fn three_factor_curves_have_trivial_sets() {
    for i in [2, 10] {
        let s = setup(i);
        assert_eq!(s.degrees(), vec![6, 12, 12]);
        assert_eq!(run(&s).survivors(), vec![0], "index {}", i);
    }
    // With content c = -1 the single class is (2, -1, 2); rescaling the factors by these
    // constants makes c a square and the class trivial.
    let s = setup(26);
    let surv = run(&s).survivors();
    assert_eq!(surv.len(), 1);
    assert_eq!(s.labels(surv[0]), vec!["2", "-1", "2"]);
    let s = setup(2);
    assert_eq!(image(&s, 0, 1, &int(1)), 0);
    assert_eq!(s.labels(0), vec!["1", "1", "1"]);
}

#[test]
fn seven_factor_curve_has_two_classes() {
    let s = setup(3);
    assert_eq!(s.degrees(), vec![1, 1, 4, 4, 4, 8, 8]);
    assert_eq!(s.cover_order, 32);
    let set = run(&s);
    let got: BTreeSet<u128> = set.survivors().into_iter().collect();
    // Representatives in factor order (u, v, 45u^4 - v^4, ...), up to ordering.
    let expected: BTreeSet<u128> =
        [tuple(&s, &[2, 3, 5, 5, 15, 1, 5]), tuple(&s, &[-6, 5, -1, 1, 3, 1, 5])].into_iter().collect();
    assert_eq!(got, expected);
    let points: BTreeSet<u128> = [image(&s, 1, 0, &int(0)), image(&s, 0, 1, &int(0))].into_iter().collect();
    assert_eq!(points, expected);
    for m in &got {
        assert!(s.norm_condition(*m));
    }
}

#[test]
fn other_seven_factor_curves_have_two_classes() {
    for i in [4, 17, 18, 27] {
        let s = setup(i);
        assert_eq!(s.degrees(), vec![1, 1, 4, 4, 4, 8, 8]);
        assert_eq!(run(&s).survivors().len(), 2, "index {}", i);
    }
}

#[test]
fn sets_shrink_as_places_are_added() {
    for i in [28, 2, 3] {
        let s = setup(i);
        let mut prev: Option<BTreeSet<u128>> = None;
        for bound in [2, 8, 20, 50, 100] {
            let set = fake_selmer_set(&s, &s.places_below(bound).unwrap(), DEFAULT_DEPTH_CAP).unwrap();
            let cur: BTreeSet<u128> = set.survivors().into_iter().collect();
            if let Some(p) = &prev {
                assert!(cur.is_subset(p), "index {} bound {}", i, bound);
            }
            prev = Some(cur);
        }
    }
}

#[test]
fn norm_condition_is_constant_on_cosets() {
    let s = setup(2);
    for m in 0..(1u128 << s.total_bits()) {
        assert_eq!(s.norm_condition(m), s.norm_condition(s.canonical(m)));
    }
    let s = setup(3);
    assert_eq!(s.iota_rank(), 4);
    let iota: Vec<u128> = [-1, 2, 3, 5]
        .iter()
        .map(|&a| {
            let mut t = [1i64; 7];
            t[0] = a;
            t[1] = a;
            let xs: Vec<NfElem> = t.iter().map(|&b| s.field.from_int(&int(b))).collect();
            s.dlog(&xs).unwrap()
        })
        .collect();
    let mut x = 0x9e3779b97f4a7c15u64;
    for _ in 0..2000 {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        let m = (x as u128) & ((1u128 << s.total_bits()) - 1);
        let t = iota[(x >> 40) as usize % 4];
        assert_eq!(s.norm_condition(m), s.norm_condition(m ^ t));
        assert_eq!(s.canonical(m), s.canonical(m ^ t));
    }
    for m in enumerate_candidates(&s).unwrap().into_iter().take(500) {
        assert!(s.norm_condition(m));
    }
}

#[test]
fn survivors_pass_at_good_primes() {
    let s = setup(3);
    let disc = s.curve.f.discriminant().unwrap();
    let set = run(&s);
    for p in [101u64, 103, 107, 109] {
        if pdescent::arith::vp_rat(&disc, p) != Some(0) {
            continue;
        }
        for m in set.survivors() {
            assert!(local_condition(&s, m, p, DEFAULT_DEPTH_CAP).unwrap().holds());
        }
    }
}

#[test]
fn quintic_factorization_sets_are_empty() {
    for i in [23, 45] {
        let s = setup(i);
        assert_eq!(s.field.degree(), 5);
        assert_eq!(s.cover_order, 16);
        let set = run(&s);
        assert!(set.certified_empty(), "index {}", i);
        assert_eq!(set.undecided(), 0);
    }
}

#[test]
fn missing_data_names_the_file() {
    let dir = std::env::temp_dir().join("pdescent-empty-data");
    std::fs::create_dir_all(&dir).unwrap();
    let err = descent_setup(&Corpus::builtin(), 15, &dir).unwrap_err().to_string();
    assert!(err.contains("f15.json"), "{}", err);
}

#[test]
fn report_lists_survivors() {
    let s = setup(28);
    let set = run(&s);
    let j = set.to_json(&s, 0);
    assert_eq!(j["candidates"], serde_json::json!([{"classes": ["1", "1"], "status": "survives"}]));
    assert_eq!(j["rejected"]["count"], 15);
    assert_eq!(set.places.first(), Some(&Place::Infinity));
}
