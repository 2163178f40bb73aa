//! Text and JSON round trips, plus algebraic invariants of the DSL values.

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nerveq::associator::AssocSeries;
use nerveq::dsl::{eval_str, MorphismJson, Value};
use nerveq::exactalg::graded::GradedMapJson;
use nerveq::error::Span;
use nerveq::exactalg::GradedMap;
use nerveq::hopf_backend::{FiniteGroup, HopfAlgebra};
use nerveq::nerve::nerve_br;
use nerveq::props::BrMorphism;
use nerveq::transport::u_phi;

fn map_text(m: usize, n: usize, img: &[usize]) -> String {
    let a: Vec<String> = img.iter().map(|j| (j + 1).to_string()).collect();
    format!("map({m}->{n})[{}]", a.join(","))
}

fn arb_map(m: usize, n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(0..n, m).prop_map(move |img| map_text(m, n, &img))
}

fn arb_braid() -> impl Strategy<Value = BrMorphism> {
    (0usize..5, 1usize..5, 0usize..7, any::<u64>()).prop_map(|(s, t, l, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BrMorphism::random(&mut rng, s, t, l)
    })
}

fn reparse(v: &Value, order: usize) -> Value {
    eval_str(&v.to_string(), order).unwrap_or_else(|e| panic!("{v}: {e}"))
}

fn json(v: &Value) -> Value {
    let text = serde_json::to_string(&v.to_json()).unwrap();
    let j: MorphismJson = serde_json::from_str(&text).unwrap();
    Value::from_json(&j).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maps_round_trip(m in 0usize..5, n in 1usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let img: Vec<usize> = (0..m).map(|_| rand::Rng::gen_range(&mut rng, 0..n)).collect();
        let v = eval_str(&map_text(m, n, &img), 2).unwrap();
        prop_assert_eq!(v.arity(), (m, n));
        prop_assert_eq!(&reparse(&v, 2), &v);
        prop_assert_eq!(&json(&v), &v);
    }

    #[test]
    fn braids_round_trip(b in arb_braid()) {
        let v = eval_str(&b.to_string(), 2).unwrap();
        prop_assert_eq!(&reparse(&v, 2), &v);
        prop_assert_eq!(&json(&v), &v);
        prop_assert_eq!(&reparse(&v.normalize(), 2), &v.normalize());
    }

    #[test]
    fn transported_series_round_trip(b in arb_braid()) {
        let s = u_phi(&b, &AssocSeries::standard_degree_two(2), 2).unwrap();
        let v = Value::Linear(s.clone());
        // a chord-free series prints as a plain map
        let back = reparse(&v, 2).to_linear(2, Span::default()).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(&json(&v), &v);
    }

    #[test]
    fn composition_of_maps_is_associative(a in arb_map(3, 2), b in arb_map(2, 4), c in arb_map(4, 3)) {
        let (a, b, c) = (eval_str(&a, 2).unwrap(), eval_str(&b, 2).unwrap(), eval_str(&c, 2).unwrap());
        let left = c.compose(&b, 2).unwrap().compose(&a, 2).unwrap();
        let right = c.compose(&b.compose(&a, 2).unwrap(), 2).unwrap();
        prop_assert_eq!(left.normalize(), right.normalize());
    }

    #[test]
    fn braid_composition_agrees_with_text(b1 in arb_braid(), b2 in arb_braid()) {
        prop_assume!(b1.target() == b2.source());
        let text = format!("{b2} o {b1}");
        let v = eval_str(&text, 2).unwrap();
        prop_assert_eq!(v, Value::Braid(b2.compose(&b1).unwrap()));
    }
}

#[test]
fn graded_map_json_round_trip() {
    let h = HopfAlgebra::group_algebra(&FiniteGroup::symmetric(3)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (s, t, l) = (rand::Rng::gen_range(&mut rng, 0..4), rand::Rng::gen_range(&mut rng, 1..4), 4);
        let b = BrMorphism::random(&mut rng, s, t, l);
        let m = nerve_br(&h, &b).unwrap();
        let text = serde_json::to_string(&m.to_json()).unwrap();
        let j: GradedMapJson = serde_json::from_str(&text).unwrap();
        let back = GradedMap::from_json(&j).unwrap();
        assert_eq!(back, m, "{b}");
        assert!(Arc::ptr_eq(back.space(), m.space()) || back.space().labels == m.space().labels);
    }
}

#[test]
fn unicode_and_ascii_spellings_agree() {
    let a = eval_str("map(2->1)[1,1] ∘ braid(2){s1}", 2).unwrap();
    let b = eval_str("map(2->1)[1,1] o braid(2){s1}", 2).unwrap();
    assert_eq!(a, b);
    let c = eval_str("map(1->1)[1] ⊗ map(1->1)[1] + ħ map(2->2)[1,2] * (t12)", 2).unwrap();
    let d = eval_str("map(1->1)[1] x map(1->1)[1] + h map(2->2)[1,2] * (t(1,2))", 2).unwrap();
    assert_eq!(c, d);
}
