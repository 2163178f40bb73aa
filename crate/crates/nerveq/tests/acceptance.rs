//! Acceptance suite. Each test prints one `criterion N ... PASS/FAIL` line
//! to stderr (uncaptured) and then asserts.

use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nerveq::associator::{check_associator, solve_associator, AssocSeries};
use nerveq::chords::dk::{brute_force_dimension, pbw_dimension};
use nerveq::chords::{chord, DKElement};
use nerveq::exactalg::{GradedMap, Idx, Rational, Vector};
use nerveq::hopf_backend::{bialgebra_big, FiniteGroup, HopfAlgebra};
use nerveq::nerve::{
    group_nerve_dual, kappa_iota_checks, nerve_br, nerve_com, series_difference, tau_checks, HopfOps,
    NerveEvaluator, NerveMode,
};
use nerveq::props::{BraidWord, BrMorphism, FinMap};
use nerveq::quantizer::{quantize, tensor_compat_check};
use nerveq::transport::{check_braid_relations, u_phi_morphism};

/// Runs `body`, prints the verdict line, and fails the test on a failure
/// or on exceeding the time budget.
fn criterion(n: usize, title: &str, budget: Duration, body: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    let res = body();
    let took = start.elapsed();
    let res = res.and_then(|_| {
        if took > budget {
            Err(format!("took {took:.1?}, budget {budget:?}"))
        } else {
            Ok(())
        }
    });
    let verdict = match &res {
        Ok(()) => "PASS".to_string(),
        Err(e) => format!("FAIL: {e}"),
    };
    let _ = writeln!(std::io::stderr(), "criterion {n:>2} {title} ... {verdict} ({took:.2?})");
    if let Err(e) = res {
        panic!("criterion {n}: {e}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fun(g: &FiniteGroup) -> HopfAlgebra {
    HopfAlgebra::fun_group(g).unwrap()
}

fn qs3() -> HopfAlgebra {
    HopfAlgebra::group_algebra(&FiniteGroup::symmetric(3)).unwrap()
}

fn xy(d: u32) -> HopfAlgebra {
    HopfAlgebra::sym_trunc(&["X".into(), "Y".into()], &[(0, 1, 1, Rational::one())], d).unwrap()
}

fn br(n: usize, l: &[i32], t: usize, a: &[usize]) -> BrMorphism {
    BrMorphism::new(BraidWord::new(n, l.to_vec()).unwrap(), t, a.to_vec()).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[test]
fn criterion_01_group_nerve_oracle() {
    criterion(1, "group nerve oracle on Z2 and S3", Duration::from_secs(60), || {
        for g in [FiniteGroup::cyclic(2), FiniteGroup::symmetric(3)] {
            let h = fun(&g);
            let mut count = 0;
            for m in 0..=4 {
                for n in 0..=4 {
                    for f in FinMap::all(m, n) {
                        let a = nerve_com(&h, &f).map_err(err)?;
                        let b = group_nerve_dual(&h, &g, &f).map_err(err)?;
                        ensure(a == b, || format!("{f} on {}", h.name()))?;
                        count += 1;
                    }
                }
            }
            ensure(count == 499, || format!("{count} maps enumerated, expected 499"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_02_hopf_recovery() {
    criterion(2, "Hopf operations recovered from the nerve", Duration::from_secs(10), || {
        let cases = [
            (Arc::new(fun(&FiniteGroup::symmetric(3))), NerveMode::Symmetric),
            (Arc::new(fun(&FiniteGroup::symmetric(3))), NerveMode::Braided),
            (Arc::new(qs3()), NerveMode::Braided),
        ];
        for (h, mode) in cases {
            let ev = NerveEvaluator::new(h.clone(), mode).map_err(err)?;
            let ops = ev.extract_hopf().map_err(err)?;
            let cl = HopfOps::classical(&h, 0);
            for ((name, a), (_, b)) in ops.named().iter().zip(cl.named().iter()) {
                ensure(series_difference(a, b).is_none(), || format!("{name} on {}", h.name()))?;
            }
        }
        Ok(())
    });
}

/// `a ⊗ b ⊗ c ↦ S(b₂)c₁ ⊗ a S(b₁)c₂` from the structure maps alone.
fn worked_example_oracle(h: &HopfAlgebra) -> GradedMap {
    let (m, d, s) = (h.m(), h.delta(), h.antipode());
    let single = |x: u16| Vector::basis(Idx::from_slice(&[x]));
    let mul = |u: &Vector, v: &Vector| m.apply(&u.tensor(v));
    GradedMap::from_fn(h.space().clone(), 3, 2, |abc| {
        let (a, b, c) = (abc[0], abc[1], abc[2]);
        let mut out = Vector::new();
        for (bb, x) in d.apply(&single(b)).iter() {
            for (cc, y) in d.apply(&single(c)).iter() {
                let sb2 = s.apply(&single(bb[1]));
                let sb1 = s.apply(&single(bb[0]));
                let left = mul(&sb2, &single(cc[0]));
                let right = mul(&mul(&single(a), &sb1), &single(cc[1]));
                out.add_scaled(&left.tensor(&right), &(x.clone() * y));
            }
        }
        out
    })
}

#[test]
fn criterion_03_worked_example() {
    criterion(3, "worked braid fixture on QS3", Duration::from_secs(30), || {
        let h = qs3();
        let phi = br(4, &[1, 2], 3, &[0, 1, 2, 2]);
        let n = nerve_br(&h, &phi).map_err(err)?;
        let oracle = worked_example_oracle(&h);
        ensure(h.space().power_basis(3).len() == 216, || "domain is not 216-dimensional".into())?;
        ensure(n == oracle, || format!("differs at {:?}", n.first_difference(&oracle)))
    });
}

#[test]
fn criterion_04_functoriality() {
    criterion(4, "braided nerve functoriality and big bialgebra axiom", Duration::from_secs(120), || {
        let h = qs3();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let (a, b, c) = (rng.gen_range(0..=4), rng.gen_range(1..=4), rng.gen_range(1..=4));
            let (l1, l2) = (rng.gen_range(0..=6), rng.gen_range(0..=6));
            let phi = BrMorphism::random(&mut rng, a, b, l1);
            let psi = BrMorphism::random(&mut rng, b, c, l2);
            let whole = nerve_br(&h, &psi.compose(&phi).map_err(err)?).map_err(err)?;
            let parts = nerve_br(&h, &psi).map_err(err)?.compose(&nerve_br(&h, &phi).map_err(err)?).map_err(err)?;
            ensure(whole == parts, || format!("{psi} after {phi}"))?;
        }
        let f = fun(&FiniteGroup::symmetric(3));
        for p in 0..=3 {
            for q in 0..=3 {
                let (l, r) = bialgebra_big(&f, p, q).map_err(err)?;
                ensure(l == r, || format!("p = {p}, q = {q}"))?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_05_associator() {
    criterion(5, "associator to degree 4 with negative control", Duration::from_secs(120), || {
        let phi = solve_associator(4).map_err(err)?;
        let r = check_associator(&phi).map_err(err)?;
        ensure(r.ok(), || r.to_string())?;
        ensure(r.cap == 4, || format!("cap {}", r.cap))?;
        let two = phi.poly().degree_part(2);
        let expect = AssocSeries::standard_degree_two(4).poly().degree_part(2);
        ensure(two == expect, || "degree-two part".into())?;
        let table = phi.table();
        let coeff = |w: &str| table.iter().find(|(k, _)| k == w).map(|(_, c)| c.clone()).unwrap_or_default();
        ensure(coeff("xy") == Rational::new(1, 24) && coeff("yx") == Rational::new(-1, 24), || format!("{table:?}"))?;
        let bad = check_associator(&AssocSeries::one(4)).map_err(err)?;
        ensure(bad.hexagon == Some(2), || format!("Φ = 1: {bad}"))
    });
}

#[test]
fn criterion_06_drinfeld_kohno_pbw() {
    criterion(6, "Drinfeld-Kohno normal form dimensions", Duration::from_secs(60), || {
        for n in [3, 4] {
            for d in 0..=4 {
                let (p, b) = (pbw_dimension(n, d), brute_force_dimension(n, d));
                ensure(p == b, || format!("n = {n}, d = {d}: {p} vs {b}"))?;
            }
        }
        let one = Rational::one;
        let w = |ws: &[(usize, usize, usize, usize)], n: usize| {
            let mut e = DKElement::zero(n, 2);
            for &(a, b, c, d) in ws {
                e = e.add(&DKElement::from_word(n, 2, &[chord(a, b), chord(c, d)], one()));
                e = e.sub(&DKElement::from_word(n, 2, &[chord(c, d), chord(a, b)], one()));
            }
            e
        };
        // locality [t12, t34] and the four-term relation [t12 + t13, t23]
        ensure(w(&[(0, 1, 2, 3)], 4).is_zero(), || "locality".into())?;
        ensure(w(&[(0, 1, 1, 2), (0, 2, 1, 2)], 3).is_zero(), || "four-term".into())?;
        ensure(!w(&[(0, 1, 1, 2)], 3).is_zero(), || "[t12, t23] alone vanished".into())
    });
}

#[test]
fn criterion_07_transport_coherence() {
    criterion(7, "transport respects braid relations", Duration::from_secs(120), || {
        let phi = solve_associator(2).map_err(err)?;
        let good = check_braid_relations(&phi, 2, 4).map_err(err)?;
        ensure(good.ok(), || good.to_string())?;
        let bad = check_braid_relations(&AssocSeries::one(2), 2, 4).map_err(err)?;
        ensure(!bad.ok(), || "Φ = 1 passed".into())?;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let (a, b, l) = (rng.gen_range(0..=4), rng.gen_range(1..=4), rng.gen_range(0..=6));
            let f = BrMorphism::random(&mut rng, a, b, l);
            let u = u_phi_morphism(&f, &phi, 2).map_err(err)?;
            ensure(u.classical_part() == vec![(f.underlying(), Rational::one())], || format!("{f}"))?;
        }
        Ok(())
    });
}

fn label(h: &HopfAlgebra, l: &str) -> u16 {
    h.space().labels.iter().position(|x| x == l).unwrap() as u16
}

#[test]
fn criterion_08_quantization() {
    criterion(8, "quantization of Sym([X,Y] = Y), D = 4, N = 2", Duration::from_secs(600), || {
        let h = Arc::new(xy(4));
        let q = quantize(h.clone(), &solve_associator(2).map_err(err)?, 2).map_err(err)?;
        let r = q.full_report();
        ensure(r.ok(), || r.to_string())?;
        let (x, y) = (label(&h, "X"), label(&h, "Y"));
        let m1 = &q.m().coeffs()[1];
        let mut diff = m1.apply(&Vector::basis(Idx::from_slice(&[x, y])));
        diff.add_scaled(&m1.apply(&Vector::basis(Idx::from_slice(&[y, x]))), &-Rational::one());
        ensure(diff == Vector::basis(Idx::from_slice(&[y])), || format!("h-part of XY - YX is {:?}", diff.sorted()))
    });
}

#[test]
fn criterion_09_rigidity() {
    criterion(9, "Fun(S3) quantizes trivially; unit and counit undeformed", Duration::from_secs(60), || {
        let phi = solve_associator(2).map_err(err)?;
        let f = quantize(Arc::new(fun(&FiniteGroup::symmetric(3))), &phi, 2).map_err(err)?;
        ensure(f.is_trivial(), || "Fun(S3) deformed".into())?;
        ensure(f.full_report().ok(), || f.full_report().to_string())?;
        let s = quantize(Arc::new(xy(3)), &phi, 2).map_err(err)?;
        for q in [&f, &s] {
            for name in ["ε undeformed", "η undeformed"] {
                let c = q.classical_limit_check();
                let c = c.get(name).ok_or_else(|| format!("no check {name}"))?;
                ensure(c.ok, || format!("{name} on {}", q.base().name()))?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_10_tensor_compatibility() {
    criterion(10, "quantization commutes with tensor products", Duration::from_secs(600), || {
        let phi = solve_associator(2).map_err(err)?;
        let r = tensor_compat_check(Arc::new(fun(&FiniteGroup::symmetric(3))), Arc::new(xy(3)), &phi, 2).map_err(err)?;
        ensure(r.ok(), || r.to_string())
    });
}

#[test]
fn criterion_11_tau_and_kappa_iota() {
    criterion(11, "τ identities and κ∘ι = id on all backends", Duration::from_secs(120), || {
        for d in [3, 4] {
            for c in tau_checks(&xy(d)).map_err(err)? {
                ensure(c.ok, || format!("{} (D = {d}): {:?}", c.name, c.first_failure))?;
            }
        }
        let z2 = FiniteGroup::cyclic(2);
        let backends = [
            fun(&z2),
            fun(&FiniteGroup::symmetric(3)),
            HopfAlgebra::group_algebra(&z2).unwrap(),
            qs3(),
            xy(3),
            HopfAlgebra::tensor(&fun(&z2), &xy(2)).unwrap(),
        ];
        for h in &backends {
            for c in kappa_iota_checks(h, 4).map_err(err)? {
                ensure(c.ok, || format!("{} on {}", c.name, h.name()))?;
            }
        }
        Ok(())
    });
}
