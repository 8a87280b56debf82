use std::collections::BTreeMap;

use proptest::prelude::*;
use scott_core::dihedral;
use scott_core::fgab::{self, FgAbelianDesc, FiniteGroupTable};
use scott_core::formula::{classify, evaluate_exact, render, Complexity, FiniteStructure, Formula, RenderFormat, Signature, Term};
use scott_core::rank1::{DefaultRule, Rank1Char};

const VARS: [&str; 3] = ["x", "y", "z"];

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![prop::sample::select(VARS.to_vec()).prop_map(Term::var), Just(Term::Unit)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::op(l, r)),
            inner.clone().prop_map(Term::inv),
            (-3i64..4, inner).prop_map(|(k, t)| Term::scale(k, t)),
        ]
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (term(), term()).prop_map(|(l, r)| Formula::eq(l, r)),
        (term(), term()).prop_map(|(l, r)| Formula::neq(l, r)),
    ];
    atom.prop_recursive(3, 16, 3, |inner| {
        let var = prop::sample::select(VARS.to_vec());
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(Formula::FiniteAnd),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Formula::FiniteOr),
            (var.clone(), inner.clone()).prop_map(|(v, f)| Formula::Exists(vec![v.to_string()], Box::new(f))),
            (var, inner).prop_map(|(v, f)| Formula::Forall(vec![v.to_string()], Box::new(f))),
        ]
    })
}

fn close(f: Formula) -> Formula {
    Formula::Forall(VARS.iter().map(|v| v.to_string()).collect(), Box::new(f))
}

fn naive_term(t: &Term, n: i64, env: &BTreeMap<String, i64>) -> i64 {
    match t {
        Term::Var(v) => env[v],
        Term::Unit => 0,
        Term::Op(l, r) => (naive_term(l, n, env) + naive_term(r, n, env)).rem_euclid(n),
        Term::Inv(t) => (-naive_term(t, n, env)).rem_euclid(n),
        Term::Scale(k, t) => (k * naive_term(t, n, env)).rem_euclid(n),
    }
}

/// Direct recursive evaluation in `ℤ/n` for formulas without families.
fn naive(f: &Formula, n: i64, env: &mut BTreeMap<String, i64>) -> bool {
    match f {
        Formula::Atomic(l, r) => naive_term(l, n, env) == naive_term(r, n, env),
        Formula::NegAtomic(l, r) => naive_term(l, n, env) != naive_term(r, n, env),
        Formula::FiniteAnd(ps) => ps.iter().all(|p| naive(p, n, env)),
        Formula::FiniteOr(ps) => ps.iter().any(|p| naive(p, n, env)),
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let exists = matches!(f, Formula::Exists(..));
            let saved: Vec<Option<i64>> = vs.iter().map(|v| env.get(v).copied()).collect();
            let total = (n as usize).pow(vs.len() as u32);
            let mut found = !exists;
            for mut idx in 0..total {
                for v in vs {
                    env.insert(v.clone(), (idx % n as usize) as i64);
                    idx /= n as usize;
                }
                if naive(body, n, env) == exists {
                    found = exists;
                    break;
                }
            }
            for (v, old) in vs.iter().zip(saved) {
                match old {
                    Some(x) => env.insert(v.clone(), x),
                    None => env.remove(v),
                };
            }
            found
        }
        Formula::FamilyAnd(_) | Formula::FamilyOr(_) => unreachable!("generated formulas have no families"),
    }
}

proptest! {
    #[test]
    fn evaluation_matches_naive_oracle(f in formula(), n in 1usize..6) {
        let closed = close(f);
        let got = evaluate_exact(&closed, &FiniteStructure::cyclic(n), 4).unwrap();
        prop_assert!(got.exact);
        prop_assert_eq!(got.truth, naive(&closed, n as i64, &mut BTreeMap::new()));
    }

    #[test]
    fn formula_json_round_trip(f in formula()) {
        let value = serde_json::to_value(&f).unwrap();
        prop_assert_eq!(Formula::from_json(&value).unwrap(), f);
    }

    #[test]
    fn quantifier_prefixes_classify(f in (term(), term()).prop_map(|(l, r)| Formula::eq(l, r))) {
        let v = |s: &str| vec![s.to_string()];
        prop_assert_eq!(classify(&f), Complexity::QF);
        let pi1 = Formula::Forall(v("x"), Box::new(f.clone()));
        let sigma2 = Formula::Exists(v("y"), Box::new(pi1.clone()));
        prop_assert_eq!(classify(&pi1), Complexity::pi(1));
        prop_assert_eq!(classify(&sigma2), Complexity::sigma(2));
        prop_assert_eq!(classify(&Formula::FiniteAnd(vec![sigma2, Formula::Forall(v("z"), Box::new(Formula::Exists(v("x"), Box::new(f))))])),
            Complexity::dsigma(2));
    }
}

fn sentences() -> Vec<(&'static str, Formula)> {
    let linear = Rank1Char::with_default(DefaultRule::Linear { a: 1, b: 0 }).unwrap();
    let d = FgAbelianDesc::new(1, vec![2, 4]).unwrap();
    vec![
        ("z3", fgab::scott_sentence_zn(3).unwrap()),
        ("fg", fgab::scott_sentence_fg_abelian(&d).unwrap()),
        ("fg_sigma3", fgab::scott_sentence_sigma3(&d)),
        ("finite", fgab::scott_sentence_finite(&FiniteGroupTable::direct_product(&[2, 3]))),
        ("dinf", dihedral::scott_sentence()),
        ("dinf_sigma3", dihedral::scott_sentence_sigma3()),
        ("q", Rank1Char::rationals().scott_sentence()),
        ("linear", linear.scott_sentence()),
    ]
}

#[test]
fn sentences_survive_json() {
    for (name, f) in sentences() {
        let back = Formula::from_json(&serde_json::to_value(&f).unwrap()).unwrap();
        assert_eq!(classify(&back), classify(&f), "{name}");
        assert_eq!(back, f, "{name}");
    }
}

#[test]
fn negation_outside_atoms_is_rejected() {
    let bad = serde_json::json!({"not": {"atomic": [{"var": "x"}, "unit"]}});
    assert!(Formula::from_json(&bad).is_err());
}

#[test]
fn z_sentence_golden() {
    let f = fgab::scott_sentence_zn(1).unwrap();
    let text = render(&f, RenderFormat::Text, 3, Signature::Additive);
    assert_eq!(format!("{text}\n"), include_str!("golden/z_scott.txt"));
    let latex = render(&f, RenderFormat::Latex, 3, Signature::Additive);
    assert_eq!(format!("{latex}\n"), include_str!("golden/z_scott.tex"));
}

#[test]
fn truncated_families_are_inexact_unless_decided() {
    let z5 = FiniteStructure::cyclic(5);
    let tf = scott_core::formula::torsion_free();
    let short = evaluate_exact(&tf, &z5, 4).unwrap();
    assert!(short.truth && !short.exact);
    let long = evaluate_exact(&tf, &z5, 6).unwrap();
    assert!(!long.truth && long.exact);
}
