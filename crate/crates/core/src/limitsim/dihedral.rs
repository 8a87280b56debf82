//! Limit construction aimed at `D∞` with the ascending tower `H` as the
//! alternative.
//!
//! The current generator pair is `(aᵈ, b)` with images `(a, b)`. Leaving
//! `S₁` adds `aᵈ⁺¹` and `uᵈ⁺¹ = aᵈ⁺¹·b` with `uᵈ⁺¹·aᵈ⁺¹ = aᵈ`, so every old
//! image is pushed through `a ↦ aba`, `b ↦ b`. The diagram is frozen while
//! the guess is inside `S₁ ∩ S₂`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check, common_checks, fact_holds, ConstructionTrace, Snapshot, StageReport, VerificationReport};
use crate::dihedral::DihedralElement;
use crate::formula::{Formula, Term};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DihedralTag {
    Dinf,
    /// Guesses left `S₁` at least once; `depth` generators were added.
    H { depth: usize },
    FiniteFragment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DihedralRun {
    pub reports: Vec<StageReport>,
    pub final_tag: DihedralTag,
    pub depth: usize,
    pub verification: VerificationReport,
}

/// The embedding `a ↦ aba`, `b ↦ b` of `D∞` into itself.
pub(crate) fn push_down(x: DihedralElement) -> DihedralElement {
    let f = i64::from(x.flip);
    DihedralElement { translation: 2 * x.translation - f, flip: x.flip }
}

fn target_name(level: usize, depth: usize) -> String {
    match level {
        0 => format!("H[{depth}]"),
        1 => "Dinf".to_string(),
        _ => "fragment".to_string(),
    }
}

/// Runs the construction, adding `growth` constants per unfrozen stage.
/// The guess before stage 0 is inside `S₁ − S₂`.
pub fn run_dihedral(trace: &ConstructionTrace, growth: usize) -> Result<DihedralRun> {
    let e = |n: &str| Term::var(n);
    let mut map: BTreeMap<String, DihedralElement> =
        [("a0".to_string(), DihedralElement::A), ("b".to_string(), DihedralElement::B)].into();
    let mut order = vec!["a0".to_string(), "b".to_string()];
    let mut diagram = vec![
        Formula::eq(Term::op(e("a0"), e("a0")), Term::Unit),
        Formula::eq(Term::op(e("b"), e("b")), Term::Unit),
        Formula::neq(e("a0"), Term::Unit),
        Formula::neq(e("b"), Term::Unit),
        Formula::neq(e("a0"), e("b")),
    ];
    let mut depth = 0;
    let mut fresh = 0;
    let mut in_s1 = true;
    let mut departures = 0;
    let mut frozen_violation = None;

    let mut reports = Vec::new();
    let mut snapshots = Vec::new();
    let mut emitted = 0;
    for (s, step) in trace.steps().iter().enumerate() {
        let stage_start = diagram.len();
        if in_s1 && !step.s1 {
            departures += 1;
            let old = format!("a{depth}");
            depth += 1;
            let a = format!("a{depth}");
            let u = format!("u{depth}");
            for v in map.values_mut() {
                *v = push_down(*v);
            }
            map.insert(a.clone(), DihedralElement::A);
            map.insert(u.clone(), DihedralElement::A.mul(DihedralElement::B));
            diagram.push(Formula::eq(Term::op(e(&a), e("b")), e(&u)));
            diagram.push(Formula::eq(Term::op(e(&u), e(&a)), e(&old)));
            diagram.push(Formula::eq(Term::op(e(&a), e(&a)), Term::Unit));
            order.extend([a, u]);
        }
        in_s1 = step.s1;
        let frozen = step.level() == 2;
        if !frozen {
            for _ in 0..growth {
                let x = order.last().expect("constants are nonempty").clone();
                let g = if fresh % 2 == 0 { format!("a{depth}") } else { "b".to_string() };
                let y = format!("c{fresh}");
                fresh += 1;
                let value = map[&x].mul(map[&g]);
                map.insert(y.clone(), value);
                diagram.push(Formula::eq(Term::op(e(&x), e(&g)), e(&y)));
                diagram.push(Formula::neq(e(&y), e(&x)));
                let vs_unit = if value.is_identity() { Formula::eq } else { Formula::neq };
                diagram.push(vs_unit(e(&y), Term::Unit));
                order.push(y);
            }
        }
        let target = target_name(step.level(), depth);
        if frozen && diagram.len() != stage_start {
            frozen_violation.get_or_insert(format!("stage {s} added facts while frozen"));
        }
        reports.push(StageReport {
            stage: s,
            target: target.clone(),
            partial_map: map.iter().map(|(c, v)| (c.clone(), serde_json::json!(v.to_word().letters_string()))).collect(),
            diagram_delta: diagram[emitted..].to_vec(),
        });
        emitted = diagram.len();
        snapshots.push(Snapshot { target, level: step.level(), map: map.clone(), diagram_len: emitted });
    }

    let final_tag = match trace.last().level() {
        0 => DihedralTag::H { depth },
        1 => DihedralTag::Dinf,
        _ => DihedralTag::FiniteFragment,
    };
    // Old images move under the tower embedding, so maps are compared by
    // replaying the whole diagram instead of by extension.
    let mut checks = common_checks(&snapshots, &reports, &diagram, |_, _| true, false);
    let replay = diagram.iter().find(|f| fact_holds(*f, &map) != Some(true)).map(|f| format!("{f:?} fails at the end"));
    checks.push(check("final_replay", replay));
    checks.push(check(
        "tower_depth",
        (depth != departures).then(|| format!("depth {depth} after {departures} departures")),
    ));
    checks.push(check("frozen_diagram", frozen_violation));
    let tag_ok = match final_tag {
        DihedralTag::H { depth: d } => d >= 1 && !trace.last().s1,
        DihedralTag::Dinf => trace.last().s1 && !trace.last().s2,
        DihedralTag::FiniteFragment => trace.last().s1 && trace.last().s2,
    };
    checks.push(check("final_tag", (!tag_ok).then(|| format!("{final_tag:?} disagrees with the last guess"))));
    Ok(DihedralRun { reports, final_tag, depth, verification: VerificationReport::new(checks) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dihedral::DihedralWord;

    #[test]
    fn push_down_matches_substitution() {
        for i in 0..40 {
            let w = DihedralWord::nth(i);
            let substituted: String = w.letters_string().chars().map(|c| if c == 'a' { "aba" } else { "b" }).collect();
            let expected = DihedralWord::parse(&substituted).unwrap().to_element();
            assert_eq!(push_down(w.to_element()), expected, "{}", w.letters_string());
        }
    }

    #[test]
    fn toggling_builds_a_tower() {
        let bits: Vec<(bool, bool)> = (0..8).map(|i| (i % 2 == 1, false)).collect();
        let run = run_dihedral(&ConstructionTrace::from_bits(&bits).unwrap(), 2).unwrap();
        assert!(run.depth >= 4);
        assert_eq!(run.final_tag, DihedralTag::Dinf);
        assert!(run.verification.passed, "{:?}", run.verification.failures());
    }

    #[test]
    fn freezes_inside_both() {
        let t = ConstructionTrace::from_bits(&[(true, false), (true, true), (true, true), (true, true)]).unwrap();
        let run = run_dihedral(&t, 3).unwrap();
        assert_eq!(run.final_tag, DihedralTag::FiniteFragment);
        assert!(run.reports[2..].iter().all(|r| r.diagram_delta.is_empty()));
        assert!(run.verification.passed, "{:?}", run.verification.failures());
    }

    #[test]
    fn ends_in_tower() {
        let t = ConstructionTrace::from_bits(&[(false, false), (true, true), (false, true)]).unwrap();
        let run = run_dihedral(&t, 1).unwrap();
        assert_eq!(run.final_tag, DihedralTag::H { depth: 2 });
        assert!(run.verification.passed);
    }
}
