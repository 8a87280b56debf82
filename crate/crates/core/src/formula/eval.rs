use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Formula, Term};
use crate::{Error, Result};

/// A finite structure in the group signature: one binary operation given by
/// a total table, with identity and inverses read off the table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StructureRepr", into = "StructureRepr")]
pub struct FiniteStructure {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
    constants: BTreeMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct StructureRepr {
    order: usize,
    table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    constants: BTreeMap<String, usize>,
}

impl TryFrom<StructureRepr> for FiniteStructure {
    type Error = Error;

    fn try_from(r: StructureRepr) -> Result<Self> {
        if r.table.len() != r.order {
            return Err(Error::InvalidTable(format!("order {} but {} rows", r.order, r.table.len())));
        }
        FiniteStructure::new(r.table)?.with_constants(r.constants)
    }
}

impl From<FiniteStructure> for StructureRepr {
    fn from(s: FiniteStructure) -> Self {
        StructureRepr { order: s.table.len(), table: s.table, constants: s.constants }
    }
}

impl FiniteStructure {
    /// Checks that the table is square, closed, has a two-sided identity and
    /// two-sided inverses.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let k = table.len();
        if k == 0 {
            return Err(Error::InvalidTable("empty domain".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidTable(format!("row {i} has length {}, expected {k}", row.len())));
            }
            if let Some(v) = row.iter().find(|&&v| v >= k) {
                return Err(Error::InvalidTable(format!("entry {v} in row {i} is outside the domain")));
            }
        }
        let identity = (0..k)
            .find(|&e| (0..k).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidTable("no identity element".into()))?;
        let inverses = (0..k)
            .map(|x| {
                (0..k)
                    .find(|&y| table[x][y] == identity && table[y][x] == identity)
                    .ok_or_else(|| Error::InvalidTable(format!("element {x} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { table, identity, inverses, constants: BTreeMap::new() })
    }

    /// Names domain elements so formulas with free variables can be evaluated.
    pub fn with_constants(mut self, constants: BTreeMap<String, usize>) -> Result<Self> {
        if let Some((name, v)) = constants.iter().find(|(_, &v)| v >= self.order()) {
            return Err(Error::InvalidTable(format!("constant {name} = {v} is outside the domain")));
        }
        self.constants = constants;
        Ok(self)
    }

    /// The cyclic group `ℤ/n` under addition.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::new(table).expect("cyclic table is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inverses[x]
    }

    /// `x^k` (multiplicatively) or `k·x` (additively).
    pub fn power(&self, x: usize, k: i64) -> usize {
        let mut base = if k < 0 { self.inverse(x) } else { x };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.op(acc, base);
            }
            base = self.op(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn is_associative(&self) -> bool {
        let k = self.order();
        (0..k).all(|x| (0..k).all(|y| (0..k).all(|z| self.op(self.op(x, y), z) == self.op(x, self.op(y, z)))))
    }

    pub fn is_commutative(&self) -> bool {
        let k = self.order();
        (0..k).all(|x| (0..k).all(|y| self.op(x, y) == self.op(y, x)))
    }
}

/// Result of evaluation. `exact` is false when some infinite family was
/// cut off before its value was decided; `truth` is then the value of the
/// truncated formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub truth: bool,
    pub exact: bool,
}

impl Evaluation {
    const TRUE: Evaluation = Evaluation { truth: true, exact: true };
    const FALSE: Evaluation = Evaluation { truth: false, exact: true };

    fn decides(self, conjunctive: bool) -> bool {
        self.exact && self.truth != conjunctive
    }

    fn combine(self, other: Evaluation, conjunctive: bool) -> Evaluation {
        if self.decides(conjunctive) {
            return self;
        }
        if other.decides(conjunctive) {
            return other;
        }
        let truth = if conjunctive { self.truth && other.truth } else { self.truth || other.truth };
        Evaluation { truth, exact: self.exact && other.exact }
    }

    fn unit(conjunctive: bool) -> Evaluation {
        if conjunctive {
            Self::TRUE
        } else {
            Self::FALSE
        }
    }
}

/// Evaluates `f` in `s`. Quantifiers range over the whole domain; families
/// are expanded to their first `family_bound` members. Free variables are
/// looked up among the structure's constants.
pub fn evaluate_exact(f: &Formula, s: &FiniteStructure, family_bound: usize) -> Result<Evaluation> {
    let mut env: Vec<(String, usize)> = s.constants.iter().map(|(k, v)| (k.clone(), *v)).collect();
    Evaluator { s, bound: family_bound.max(1) }.eval(f, &mut env)
}

struct Evaluator<'a> {
    s: &'a FiniteStructure,
    bound: usize,
}

impl Evaluator<'_> {
    fn term(&self, t: &Term, env: &[(String, usize)]) -> Result<usize> {
        Ok(match t {
            Term::Var(v) => lookup(env, v)?,
            Term::Unit => self.s.identity,
            Term::Op(l, r) => self.s.op(self.term(l, env)?, self.term(r, env)?),
            Term::Inv(t) => self.s.inverse(self.term(t, env)?),
            Term::Scale(k, t) => self.s.power(self.term(t, env)?, *k),
        })
    }

    fn eval(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> Result<Evaluation> {
        match f {
            Formula::Atomic(l, r) => Ok(bool_eval(self.term(l, env)? == self.term(r, env)?)),
            Formula::NegAtomic(l, r) => Ok(bool_eval(self.term(l, env)? != self.term(r, env)?)),
            Formula::FiniteAnd(parts) => self.eval_parts(parts.iter(), env, true),
            Formula::FiniteOr(parts) => self.eval_parts(parts.iter(), env, false),
            Formula::FamilyAnd(fam) | Formula::FamilyOr(fam) => {
                let conjunctive = matches!(f, Formula::FamilyAnd(_));
                let n = fam.len().map_or(self.bound, |l| l.min(self.bound));
                let members = (0..n).map(|i| fam.member(i)).collect::<Vec<_>>();
                let acc = self.eval_parts(members.iter(), env, conjunctive)?;
                let complete = fam.len().is_some_and(|l| l <= self.bound);
                Ok(if acc.decides(conjunctive) || complete { acc } else { Evaluation { exact: false, ..acc } })
            }
            Formula::Exists(vars, body) => self.quantify(vars, body, env, false),
            Formula::Forall(vars, body) => self.quantify(vars, body, env, true),
        }
    }

    fn eval_parts<'f>(
        &self,
        parts: impl Iterator<Item = &'f Formula>,
        env: &mut Vec<(String, usize)>,
        conjunctive: bool,
    ) -> Result<Evaluation> {
        let mut acc = Evaluation::unit(conjunctive);
        for p in parts {
            acc = acc.combine(self.eval(p, env)?, conjunctive);
            if acc.decides(conjunctive) {
                break;
            }
        }
        Ok(acc)
    }

    /// Evaluates a quantifier block by backtracking over assignments. For an
    /// existential block over a conjunction (universal over a disjunction),
    /// each conjunct is checked as soon as its variables are bound.
    fn quantify(
        &self,
        vars: &[String],
        body: &Formula,
        env: &mut Vec<(String, usize)>,
        universal: bool,
    ) -> Result<Evaluation> {
        let parts: Vec<&Formula> = match (universal, body) {
            (false, Formula::FiniteAnd(_)) => body.conjuncts(),
            (true, Formula::FiniteOr(_)) => disjuncts(body),
            _ => vec![body],
        };
        // Level at which each part becomes fully bound: 0 for parts mentioning
        // no block variable, otherwise one past the last block variable used.
        let levels: Vec<usize> = parts
            .iter()
            .map(|p| {
                let fv = p.free_vars();
                vars.iter().rposition(|v| fv.contains(v)).map_or(0, |i| i + 1)
            })
            .collect();
        let search = Search {
            vars,
            parts: &parts,
            levels: &levels,
            // Inner connective: the body is a conjunction under ∃ and a
            // disjunction under ∀.
            inner_conjunctive: !universal,
            symmetric: equality_only(body),
        };
        let base = env.len();
        let result = self.search(&search, 0, env);
        env.truncate(base);
        result
    }

    fn search(&self, q: &Search<'_>, depth: usize, env: &mut Vec<(String, usize)>) -> Result<Evaluation> {
        // Check the parts that became fully bound at this depth.
        let mut branch = Evaluation::unit(q.inner_conjunctive);
        for (p, _) in q.parts.iter().zip(q.levels).filter(|(_, &l)| l == depth) {
            branch = branch.combine(self.eval(p, env)?, q.inner_conjunctive);
            if branch.decides(q.inner_conjunctive) {
                return Ok(branch);
            }
        }
        if depth == q.vars.len() {
            return Ok(branch);
        }
        // Outer connective over assignments: ∃ is a disjunction, ∀ a conjunction.
        let outer_conjunctive = !q.inner_conjunctive;
        let mut acc = Evaluation::unit(outer_conjunctive);
        for value in self.candidates(q, env) {
            env.push((q.vars[depth].clone(), value));
            let sub = self.search(q, depth + 1, env);
            env.pop();
            acc = acc.combine(branch.combine(sub?, q.inner_conjunctive), outer_conjunctive);
            if acc.decides(outer_conjunctive) {
                break;
            }
        }
        Ok(acc)
    }

    /// Domain values to try for the next variable. When the body only
    /// compares variables for equality, values already in use plus one fresh
    /// value cover every equality pattern.
    fn candidates(&self, q: &Search<'_>, env: &[(String, usize)]) -> Vec<usize> {
        let k = self.s.order();
        if !q.symmetric {
            return (0..k).collect();
        }
        let mut used: Vec<usize> = env.iter().map(|(_, v)| *v).collect();
        used.sort_unstable();
        used.dedup();
        if let Some(fresh) = (0..k).find(|v| used.binary_search(v).is_err()) {
            used.push(fresh);
        }
        used
    }
}

struct Search<'a> {
    vars: &'a [String],
    parts: &'a [&'a Formula],
    levels: &'a [usize],
    inner_conjunctive: bool,
    symmetric: bool,
}

fn bool_eval(b: bool) -> Evaluation {
    if b {
        Evaluation::TRUE
    } else {
        Evaluation::FALSE
    }
}

fn lookup(env: &[(String, usize)], name: &str) -> Result<usize> {
    env.iter()
        .rev()
        .find(|(k, _)| k == name)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::InvalidStructure(format!("free variable {name} has no value")))
}

fn disjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::FiniteOr(parts) => parts.iter().flat_map(disjuncts).collect(),
        other => vec![other],
    }
}

/// Whether every atom compares two variables and no family occurs.
fn equality_only(f: &Formula) -> bool {
    match f {
        Formula::Atomic(l, r) | Formula::NegAtomic(l, r) => {
            matches!((l, r), (Term::Var(_), Term::Var(_)))
        }
        Formula::FiniteAnd(parts) | Formula::FiniteOr(parts) => parts.iter().all(equality_only),
        Formula::FamilyAnd(_) | Formula::FamilyOr(_) => false,
        Formula::Exists(_, body) | Formula::Forall(_, body) => equality_only(body),
    }
}
