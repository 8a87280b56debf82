use std::collections::BTreeSet;

use proptest::prelude::*;
use scott_core::limitsim::{
    run_abelian, run_cofinality, run_dihedral, run_rank1, ConstructionTrace, DihedralTag, Rank1Target, StageReport, Step,
};
use scott_core::rank1::{DefaultRule, Exp, Rank1Char};

fn trace() -> impl Strategy<Value = ConstructionTrace> {
    prop::collection::vec((prop::bool::ANY, prop::bool::ANY), 1..=12)
        .prop_map(|bits| ConstructionTrace::from_bits(&bits).unwrap())
}

fn two_divisible() -> Rank1Char {
    Rank1Char::new([(2, Exp::Infinite)].into(), DefaultRule::Zero).unwrap()
}

fn bits(steps: &[(bool, bool)]) -> ConstructionTrace {
    ConstructionTrace::from_bits(steps).unwrap()
}

fn assert_append_only(reports: &[StageReport]) {
    let mut seen = 0;
    for (s, r) in reports.iter().enumerate() {
        assert_eq!(r.stage, s);
        seen += r.diagram_delta.len();
    }
    assert!(seen > 0);
}

#[test]
fn rank1_spec_examples() {
    let c = two_divisible();
    let h = run_rank1(&c, 3, 2, &bits(&[(false, false), (false, true)]), 2).unwrap();
    assert_eq!((h.final_tag, h.final_char.clone()), (Rank1Target::H, c.extend_infinite_at(3).unwrap()));
    let k = run_rank1(&c, 3, 2, &bits(&[(true, false), (true, true), (true, true)]), 2).unwrap();
    assert_eq!(k.final_char, c.kill_prime_at(2).unwrap());
    assert_eq!(k.final_char.exponent(2), Ok(Exp::Finite(0)));
    let hand = run_rank1(&c, 3, 2, &bits(&[(false, false), (true, false), (true, true)]), 1).unwrap();
    let unit: Vec<&serde_json::Value> = hand.reports.iter().map(|r| &r.partial_map["u"]).collect();
    assert_eq!(unit, ["1", "3", "6"]);
    assert_append_only(&hand.reports);
}

#[test]
fn dihedral_spec_examples() {
    let toggling: Vec<(bool, bool)> = (0..8).map(|i| (i % 2 == 0, false)).collect();
    let run = run_dihedral(&bits(&toggling), 1).unwrap();
    assert!(run.depth >= 4);
    let frozen = run_dihedral(&bits(&[(true, false), (true, true), (true, true)]), 2).unwrap();
    assert_eq!(frozen.final_tag, DihedralTag::FiniteFragment);
    assert!(frozen.reports[1..].iter().all(|r| r.diagram_delta.is_empty()));
    let settled = run_dihedral(&bits(&[(false, false), (true, false), (true, false)]), 2).unwrap();
    assert_eq!(settled.final_tag, DihedralTag::Dinf);
}

#[test]
fn abelian_targets_follow_guesses() {
    let run = run_abelian(2, &bits(&[(false, false), (true, false), (true, true), (false, false)]), 2).unwrap();
    let targets: Vec<&str> = run.reports.iter().map(|r| r.target.as_str()).collect();
    assert_eq!(targets, ["Z^1", "Z^2", "Z^3", "Z^1"]);
    assert!(run.verification.passed, "{:?}", run.verification.failures());
}

#[test]
fn cofinality_spec_examples() {
    let ones = Rank1Char::with_default(DefaultRule::Periodic(vec![Exp::Finite(1)])).unwrap();
    let all = run_cofinality(&ones, 8, &(0..8).collect(), 30).unwrap();
    assert_eq!((all.isomorphic, all.multiplier), (true, Some(1)));
    assert!(all.table.iter().all(|r| r.g_exponent == r.gn_exponent));
    let gap: BTreeSet<usize> = (0..8).filter(|&k| k != 2).collect();
    assert_eq!(run_cofinality(&ones, 8, &gap, 30).unwrap().multiplier, Some(5));
    let evens: BTreeSet<usize> = (0..10).step_by(2).collect();
    let run = run_cofinality(&ones, 10, &evens, 40).unwrap();
    assert!(!run.isomorphic && run.verification.passed);
}

#[test]
fn trace_files_parse() {
    let t: ConstructionTrace = serde_json::from_str(r#"{"steps":[[0,0],[1,0],[1,1]]}"#).unwrap();
    assert_eq!(t.steps()[2], Step::new(true, true));
}

proptest! {
    #[test]
    fn abelian_runs_verify(t in trace(), k in 2usize..5, growth in 0usize..4) {
        let run = run_abelian(k, &t, growth).unwrap();
        prop_assert!(run.verification.passed, "{:?}", run.verification.failures());
        prop_assert_eq!(run.final_rank, k - 1 + t.last().level());
    }

    #[test]
    fn dihedral_runs_verify(t in trace(), growth in 0usize..4) {
        let run = run_dihedral(&t, growth).unwrap();
        prop_assert!(run.verification.passed, "{:?}", run.verification.failures());
        let departures = std::iter::once(true).chain(t.steps().iter().map(|s| s.s1)).collect::<Vec<_>>()
            .windows(2).filter(|w| w[0] && !w[1]).count();
        prop_assert_eq!(run.depth, departures);
    }

    #[test]
    fn rank1_runs_verify(t in trace(), growth in 0usize..3, pq in prop::sample::select(vec![(3u64, 2u64), (5, 2), (7, 2)])) {
        let run = run_rank1(&two_divisible(), pq.0, pq.1, &t, growth).unwrap();
        prop_assert!(run.verification.passed, "{:?}", run.verification.failures());
    }

    #[test]
    fn reports_round_trip(t in trace()) {
        let run = run_abelian(3, &t, 2).unwrap();
        for r in &run.reports {
            let text = serde_json::to_string(r).unwrap();
            prop_assert_eq!(&serde_json::from_str::<StageReport>(&text).unwrap(), r);
        }
    }
}
