//! Computable infinitary formulas in normal form.
//!
//! Negation only occurs on atomic formulas. Infinite conjunctions and
//! disjunctions are [`Family`] values: a named, parameterized enumeration
//! whose `n`-th member is computed on demand, so formulas stay finite
//! objects that can be serialized without closures.

mod classify;
mod eval;
mod family;
mod render;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use classify::{classify, levels, Complexity, ComplexityKind};
pub use eval::{evaluate_exact, Evaluation, FiniteStructure};
pub use family::{int_tuple, rationals_by_height, Family, FamilyGen};
pub use render::{render, RenderFormat};

use crate::words::FreeWord;

/// Which group signature terms are written in. Only affects rendering;
/// evaluation interprets `Op`, `Inv` and `Unit` through the structure's tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    /// `+`, `-`, `0`.
    Additive,
    /// `·`, `^-1`, `e`.
    Multiplicative,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Var(String),
    Unit,
    Op(Box<Term>, Box<Term>),
    Inv(Box<Term>),
    /// Integer multiple (additive) or power (multiplicative).
    Scale(i64, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn op(l: Term, r: Term) -> Term {
        Term::Op(Box::new(l), Box::new(r))
    }

    pub fn inv(t: Term) -> Term {
        Term::Inv(Box::new(t))
    }

    pub fn scale(k: i64, t: Term) -> Term {
        if k == 1 {
            t
        } else {
            Term::Scale(k, Box::new(t))
        }
    }

    /// `k_1 x_1 + ... + k_n x_n`, skipping zero coefficients; `0` if all vanish.
    pub fn linear(coeffs: &[i64], vars: &[String]) -> Term {
        coeffs
            .iter()
            .zip(vars)
            .filter(|(k, _)| **k != 0)
            .map(|(k, v)| Term::scale(*k, Term::var(v.clone())))
            .reduce(Term::op)
            .unwrap_or(Term::Unit)
    }

    /// The word `w` with generator `i` replaced by `vars[i]`.
    pub fn word(w: &FreeWord, vars: &[String]) -> Term {
        w.letters()
            .iter()
            .map(|l| {
                let v = Term::var(vars[l.generator].clone());
                if l.exponent < 0 {
                    Term::inv(v)
                } else {
                    v
                }
            })
            .reduce(Term::op)
            .unwrap_or(Term::Unit)
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Unit => {}
            Term::Op(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Term::Inv(t) | Term::Scale(_, t) => t.collect_vars(out),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

/// A formula in normal form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    Atomic(Term, Term),
    NegAtomic(Term, Term),
    FiniteAnd(Vec<Formula>),
    FiniteOr(Vec<Formula>),
    FamilyAnd(Family),
    FamilyOr(Family),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Atomic(l, r)
    }

    pub fn neq(l: Term, r: Term) -> Formula {
        Formula::NegAtomic(l, r)
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        Formula::FiniteAnd(parts)
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        Formula::FiniteOr(parts)
    }

    pub fn exists(vars: Vec<String>, body: Formula) -> Formula {
        if vars.is_empty() {
            return body;
        }
        Formula::Exists(vars, Box::new(body))
    }

    pub fn forall(vars: Vec<String>, body: Formula) -> Formula {
        if vars.is_empty() {
            return body;
        }
        Formula::Forall(vars, Box::new(body))
    }

    pub fn family_and(gen: FamilyGen) -> Formula {
        Formula::FamilyAnd(Family::new(gen))
    }

    pub fn family_or(gen: FamilyGen) -> Formula {
        Formula::FamilyOr(Family::new(gen))
    }

    /// Free variables. For families, computed from the first few members.
    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Formula::Atomic(l, r) | Formula::NegAtomic(l, r) => {
                let mut out = l.vars();
                out.extend(r.vars());
                out
            }
            Formula::FiniteAnd(parts) | Formula::FiniteOr(parts) => {
                parts.iter().flat_map(Formula::free_vars).collect()
            }
            Formula::FamilyAnd(f) | Formula::FamilyOr(f) => f.free_vars(),
            Formula::Exists(vars, body) | Formula::Forall(vars, body) => {
                let mut out = body.free_vars();
                for v in vars {
                    out.remove(v);
                }
                out
            }
        }
    }

    /// Whether the formula mentions a family anywhere.
    pub fn has_family(&self) -> bool {
        match self {
            Formula::Atomic(..) | Formula::NegAtomic(..) => false,
            Formula::FiniteAnd(parts) | Formula::FiniteOr(parts) => parts.iter().any(Formula::has_family),
            Formula::FamilyAnd(_) | Formula::FamilyOr(_) => true,
            Formula::Exists(_, body) | Formula::Forall(_, body) => body.has_family(),
        }
    }

    /// Direct conjuncts, flattening nested finite conjunctions.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::FiniteAnd(parts) => parts.iter().flat_map(Formula::conjuncts).collect(),
            other => vec![other],
        }
    }

    /// Whether `needle` occurs as a subformula (families are not expanded).
    pub fn contains(&self, needle: &Formula) -> bool {
        if self == needle {
            return true;
        }
        match self {
            Formula::FiniteAnd(parts) | Formula::FiniteOr(parts) => parts.iter().any(|p| p.contains(needle)),
            Formula::Exists(_, body) | Formula::Forall(_, body) => body.contains(needle),
            _ => false,
        }
    }

    /// Parses the JSON AST, rejecting anything outside normal form with a
    /// diagnostic.
    pub fn from_json(value: &serde_json::Value) -> crate::Result<Formula> {
        reject_negations(value)?;
        serde_json::from_value(value.clone()).map_err(|e| crate::Error::NotNormalForm(e.to_string()))
    }
}

fn reject_negations(value: &serde_json::Value) -> crate::Result<()> {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                if k == "not" || k == "neg" || k == "negation" {
                    return Err(crate::Error::NotNormalForm(
                        "negation may only appear on atomic formulas (use neg_atomic)".into(),
                    ));
                }
                reject_negations(v)?;
            }
            Ok(())
        }
        serde_json::Value::Array(items) => items.iter().try_for_each(reject_negations),
        _ => Ok(()),
    }
}

/// `x_1, ..., x_n` style variable names.
pub fn var_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Abelian group axioms in the additive signature (finitary Π₁).
pub fn abelian_axioms() -> Formula {
    let (x, y, z) = (Term::var("x"), Term::var("y"), Term::var("z"));
    Formula::and(vec![
        Formula::forall(
            vec!["x".into(), "y".into(), "z".into()],
            Formula::eq(
                Term::op(Term::op(x.clone(), y.clone()), z.clone()),
                Term::op(x.clone(), Term::op(y.clone(), z)),
            ),
        ),
        Formula::forall(
            vec!["x".into(), "y".into()],
            Formula::eq(Term::op(x.clone(), y.clone()), Term::op(y, x.clone())),
        ),
        Formula::forall(
            vec!["x".into()],
            Formula::and(vec![
                Formula::eq(Term::op(x.clone(), Term::Unit), x.clone()),
                Formula::eq(Term::op(x.clone(), Term::inv(x)), Term::Unit),
            ]),
        ),
    ])
}

/// Group axioms in the multiplicative signature (finitary Π₁).
pub fn group_axioms() -> Formula {
    let (x, y, z) = (Term::var("x"), Term::var("y"), Term::var("z"));
    Formula::and(vec![
        Formula::forall(
            vec!["x".into(), "y".into(), "z".into()],
            Formula::eq(
                Term::op(Term::op(x.clone(), y.clone()), z.clone()),
                Term::op(x.clone(), Term::op(y, z)),
            ),
        ),
        Formula::forall(
            vec!["x".into()],
            Formula::and(vec![
                Formula::eq(Term::op(x.clone(), Term::Unit), x.clone()),
                Formula::eq(Term::op(Term::Unit, x.clone()), x.clone()),
                Formula::eq(Term::op(x.clone(), Term::inv(x.clone())), Term::Unit),
                Formula::eq(Term::op(Term::inv(x.clone()), x), Term::Unit),
            ]),
        ),
    ])
}

/// `(∀x)[x = 0 ∨ ⋀_{m>0} mx ≠ 0]`: torsion-freeness.
pub fn torsion_free() -> Formula {
    Formula::forall(
        vec!["x".into()],
        Formula::or(vec![
            Formula::eq(Term::var("x"), Term::Unit),
            Formula::family_and(FamilyGen::NonzeroMultiples { var: "x".into() }),
        ]),
    )
}
