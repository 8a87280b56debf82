//! Stage-driven simulators for the index-set hardness constructions.
//!
//! Each simulator reads a finite trace of membership guesses, builds a
//! growing atomic diagram over named constants together with a stage-wise
//! map into the current target structure, and checks the run afterwards.
//! Claims about the limit are relative to the last stage's belief: a finite
//! trace cannot certify a Σ⁰₂ limit.

mod abelian;
mod cofinality;
mod dihedral;
mod rank1;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::dihedral::DihedralElement;
use crate::formula::{Formula, Term};
use crate::{Error, Result};

pub use abelian::{run_abelian, AbelianRun};
pub use cofinality::{run_cofinality, CofinalityRow, CofinalityRun};
pub use dihedral::{run_dihedral, DihedralRun, DihedralTag};
pub use rank1::{run_rank1, Rank1Run, Rank1Target};

/// Stage-`s` guesses `n ∈ S₁,ₛ` and `n ∈ S₂,ₛ`. Serialized as `[s1, s2]`
/// with `0`/`1` entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub s1: bool,
    pub s2: bool,
}

impl Step {
    pub fn new(s1: bool, s2: bool) -> Self {
        Self { s1, s2 }
    }

    /// 0 outside `S₁`, 1 in `S₁ − S₂`, 2 in `S₁ ∩ S₂`.
    pub fn level(self) -> usize {
        usize::from(self.s1) + usize::from(self.s1 && self.s2)
    }
}

impl Serialize for Step {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [u8::from(self.s1), u8::from(self.s2)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Step {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[u8; 2]>::deserialize(d)?;
        if a > 1 || b > 1 {
            return Err(serde::de::Error::custom("trace entries must be 0 or 1"));
        }
        Ok(Step::new(a == 1, b == 1))
    }
}

/// A nonempty sequence of stage guesses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TraceRepr", into = "TraceRepr")]
pub struct ConstructionTrace {
    steps: Vec<Step>,
}

#[derive(Serialize, Deserialize)]
struct TraceRepr {
    steps: Vec<Step>,
}

impl TryFrom<TraceRepr> for ConstructionTrace {
    type Error = Error;

    fn try_from(r: TraceRepr) -> Result<Self> {
        ConstructionTrace::new(r.steps)
    }
}

impl From<ConstructionTrace> for TraceRepr {
    fn from(t: ConstructionTrace) -> Self {
        TraceRepr { steps: t.steps }
    }
}

impl ConstructionTrace {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::EmptyTrace);
        }
        Ok(Self { steps })
    }

    pub fn from_bits(bits: &[(bool, bool)]) -> Result<Self> {
        Self::new(bits.iter().map(|&(a, b)| Step::new(a, b)).collect())
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> Step {
        *self.steps.last().expect("traces are nonempty")
    }
}

/// One stage of a run: the target believed at this stage, the full map of
/// constants into it, and the sentences added to the diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: usize,
    pub target: String,
    pub partial_map: BTreeMap<String, serde_json::Value>,
    pub diagram_delta: Vec<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
    pub caveat: String,
}

impl VerificationReport {
    fn new(checks: Vec<Check>) -> Self {
        Self {
            passed: checks.iter().all(|c| c.passed),
            checks,
            caveat: "the final tag reflects the last stage's belief; a finite trace does not determine the limit".into(),
        }
    }

    /// Names of the failed checks.
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

fn check(name: &str, failure: Option<String>) -> Check {
    Check { name: name.to_string(), passed: failure.is_none(), detail: failure.unwrap_or_default() }
}

/// Values of a target group, written additively.
pub(crate) trait GroupValue: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;

    fn times(&self, k: i64) -> Self {
        let mut base = if k < 0 { self.neg() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::zero();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.add(&base);
            }
            base = base.add(&base);
            e >>= 1;
        }
        acc
    }
}

/// Integer vector in some `ℤᵐ`; shorter vectors are padded with zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IntVec(pub Vec<i64>);

impl IntVec {
    fn normalized(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }
}

impl GroupValue for IntVec {
    fn zero() -> Self {
        IntVec(Vec::new())
    }

    fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let at = |v: &Vec<i64>, i: usize| v.get(i).copied().unwrap_or(0);
        IntVec((0..n).map(|i| at(&self.0, i) + at(&other.0, i)).collect()).normalized()
    }

    fn neg(&self) -> Self {
        IntVec(self.0.iter().map(|x| -x).collect())
    }

    fn times(&self, k: i64) -> Self {
        IntVec(self.0.iter().map(|x| x * k).collect()).normalized()
    }
}

impl GroupValue for Rational {
    fn zero() -> Self {
        Rational::from_integer(0)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn neg(&self) -> Self {
        -self
    }

    fn times(&self, k: i64) -> Self {
        self * Rational::from_integer(k as i128)
    }
}

impl GroupValue for DihedralElement {
    fn zero() -> Self {
        DihedralElement::IDENTITY
    }

    fn add(&self, other: &Self) -> Self {
        self.mul(*other)
    }

    fn neg(&self) -> Self {
        self.inverse()
    }
}

/// Value of a term over constants, or `None` if a constant is unmapped.
pub(crate) fn eval_term<V: GroupValue>(t: &Term, map: &BTreeMap<String, V>) -> Option<V> {
    Some(match t {
        Term::Var(c) => map.get(c)?.clone(),
        Term::Unit => V::zero(),
        Term::Op(l, r) => eval_term(l, map)?.add(&eval_term(r, map)?),
        Term::Inv(t) => eval_term(t, map)?.neg(),
        Term::Scale(k, t) => eval_term(t, map)?.times(*k),
    })
}

/// Truth of an atomic or negated atomic sentence under `map`.
pub(crate) fn fact_holds<V: GroupValue>(f: &Formula, map: &BTreeMap<String, V>) -> Option<bool> {
    match f {
        Formula::Atomic(l, r) => Some(eval_term(l, map)? == eval_term(r, map)?),
        Formula::NegAtomic(l, r) => Some(eval_term(l, map)? != eval_term(r, map)?),
        _ => None,
    }
}

/// What a simulator records per stage for verification.
#[derive(Debug, Clone)]
pub(crate) struct Snapshot<V> {
    pub target: String,
    pub level: usize,
    pub map: BTreeMap<String, V>,
    pub diagram_len: usize,
}

/// Checks shared by the simulators: the diagram only grows, each stage's
/// map satisfies the diagram so far and lands in that stage's target, and
/// (when `fallback` is set) a stage that drops to a lower level extends the
/// map of the latest earlier stage at that level, provided no stage in
/// between sat lower still.
pub(crate) fn common_checks<V: GroupValue>(
    snapshots: &[Snapshot<V>],
    reports: &[StageReport],
    diagram: &[Formula],
    in_target: impl Fn(usize, &V) -> bool,
    fallback: bool,
) -> Vec<Check> {
    let mut monotone = None;
    let mut emitted = 0;
    for (s, (snap, report)) in snapshots.iter().zip(reports).enumerate() {
        let prefix = &diagram[emitted..snap.diagram_len.max(emitted)];
        if snap.diagram_len < emitted || prefix != report.diagram_delta.as_slice() {
            monotone.get_or_insert(format!("stage {s}: delta is not an extension of the previous diagram"));
        }
        emitted = snap.diagram_len;
    }

    let mut soundness = None;
    'stages: for (s, snap) in snapshots.iter().enumerate() {
        for f in &diagram[..snap.diagram_len] {
            if fact_holds(f, &snap.map) != Some(true) {
                soundness = Some(format!("stage {s}: {f:?} fails in {}", snap.target));
                break 'stages;
            }
        }
        if let Some((c, v)) = snap.map.iter().find(|(_, v)| !in_target(snap.level, v)) {
            soundness = Some(format!("stage {s}: image {v:?} of {c} is outside {}", snap.target));
            break;
        }
    }

    let mut checks = vec![check("diagram_monotone", monotone), check("stage_soundness", soundness)];
    if fallback {
        let mut failure = None;
        for s in 1..snapshots.len() {
            let level = snapshots[s].level;
            if level >= snapshots[s - 1].level {
                continue;
            }
            let prev = snapshots[..s].iter().rev().take_while(|p| p.level >= level).find(|p| p.level == level);
            if let Some(prev) = prev {
                if let Some((c, _)) = prev.map.iter().find(|(c, v)| snapshots[s].map.get(*c) != Some(v)) {
                    failure = Some(format!("stage {s}: map does not extend the last {} map at {c}", prev.target));
                    break;
                }
            }
        }
        checks.push(check("fallback_extension", failure));
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_json() {
        let t: ConstructionTrace = serde_json::from_str(r#"{"steps":[[0,0],[1,0],[1,1]]}"#).unwrap();
        assert_eq!(t.steps().iter().map(|s| s.level()).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"steps":[[0,0],[1,0],[1,1]]}"#);
        assert!(serde_json::from_str::<ConstructionTrace>(r#"{"steps":[]}"#).is_err());
        assert!(serde_json::from_str::<ConstructionTrace>(r#"{"steps":[[2,0]]}"#).is_err());
    }

    #[test]
    fn vectors_pad() {
        let a = IntVec(vec![1, 2]);
        let b = IntVec(vec![0, -2, 3]);
        assert_eq!(a.add(&b), IntVec(vec![1, 0, 3]));
        assert_eq!(a.add(&a.neg()), IntVec::zero());
        assert_eq!(a.times(-3), IntVec(vec![-3, -6]));
    }

    #[test]
    fn facts() {
        let map: BTreeMap<String, Rational> =
            [("u".to_string(), Rational::from_integer(1)), ("d".to_string(), Rational::new(1, 3))].into();
        let f = Formula::eq(Term::scale(3, Term::var("d")), Term::var("u"));
        assert_eq!(fact_holds(&f, &map), Some(true));
        assert_eq!(fact_holds(&Formula::neq(Term::var("d"), Term::Unit), &map), Some(true));
        assert_eq!(fact_holds(&Formula::eq(Term::var("x"), Term::Unit), &map), None);
    }
}
