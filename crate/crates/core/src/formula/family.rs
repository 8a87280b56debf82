use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Formula, Term};
use crate::arith::Rational;
use crate::dihedral;
use crate::fgab::FgAbelianDesc;
use crate::rank1::{PrimeClass, Rank1Char};
use crate::words::FreeWord;

/// The generator behind an infinite (or computably finite) conjunction or
/// disjunction. Each variant is a fixed enumeration identified by its tag;
/// its fields are the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyGen {
    /// `m·x ≠ 0` for `m = 1, 2, ...`.
    NonzeroMultiples { var: String },
    /// `k·y ≠ x_i` for every component `x_i` and `k >= 2`.
    Indivisible { xs: Vec<String>, y: String },
    /// `k_1 x_1 + ... + k_n x_n ≠ 0` for integer tuples not all zero.
    LinearIndependence { xs: Vec<String> },
    /// `k_1 x_1 + ... + k_n x_n = 0` for integer tuples not all zero.
    LinearDependence { xs: Vec<String> },
    /// The relations (`= 0`) and non-relations (`≠ 0`) of the standard
    /// generating tuple of a finitely generated abelian group.
    AbelianRelations { group: FgAbelianDesc, xs: Vec<String> },
    /// `y = k_1 x_1 + ... + k_n x_n` for all integer tuples.
    AbelianSpan { xs: Vec<String>, y: String },
    /// `w(x_1, x_2) = e` or `≠ e` according to whether `w(a, b)` is trivial in
    /// the infinite dihedral group, for every reduced free word `w`.
    DihedralRelations { xs: Vec<String> },
    /// `y = w(x̄)` for every reduced free word `w`.
    WordSpan { xs: Vec<String>, y: String },
    /// `w_1(ȳ) ≠ x_1 ∨ w_2(ȳ) ≠ x_2` for every imprimitive pair of
    /// dihedral words `(w_1, w_2)`.
    ImprimitivePairs { xs: Vec<String>, ys: Vec<String> },
    /// `(∃w) den·w = num·x` for every rational `num/den` in the group.
    RationalMembers { group: Rank1Char, x: String, witness: String },
    /// `den·y = num·x` for every rational `num/den` in the group.
    RationalSpan { group: Rank1Char, x: String, y: String },
    /// `(∃w) p^k·w = y` for `p` with infinite exponent and `k >= 1`.
    InfiniteDivisibility { group: Rank1Char, y: String, witness: String },
    /// `(∀w) p·w ≠ x` for every prime `p` without infinite exponent.
    PrimeIndivisibility { group: Rank1Char, x: String, witness: String },
}

/// A c.e. family of formulas given by a pure generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Family {
    pub gen: FamilyGen,
}

impl Family {
    pub fn new(gen: FamilyGen) -> Self {
        Self { gen }
    }

    /// Enumeration id.
    pub fn id(&self) -> &'static str {
        match &self.gen {
            FamilyGen::NonzeroMultiples { .. } => "nonzero_multiples",
            FamilyGen::Indivisible { .. } => "indivisible",
            FamilyGen::LinearIndependence { .. } => "linear_independence",
            FamilyGen::LinearDependence { .. } => "linear_dependence",
            FamilyGen::AbelianRelations { .. } => "abelian_relations",
            FamilyGen::AbelianSpan { .. } => "abelian_span",
            FamilyGen::DihedralRelations { .. } => "dihedral_relations",
            FamilyGen::WordSpan { .. } => "word_span",
            FamilyGen::ImprimitivePairs { .. } => "imprimitive_pairs",
            FamilyGen::RationalMembers { .. } => "rational_members",
            FamilyGen::RationalSpan { .. } => "rational_span",
            FamilyGen::InfiniteDivisibility { .. } => "infinite_divisibility",
            FamilyGen::PrimeIndivisibility { .. } => "prime_indivisibility",
        }
    }

    /// Short description of what the index ranges over.
    pub fn note(&self) -> String {
        let range = match &self.gen {
            FamilyGen::NonzeroMultiples { .. } => "m > 0",
            FamilyGen::Indivisible { .. } => "1 <= i <= n, k > 1",
            FamilyGen::LinearIndependence { .. } | FamilyGen::LinearDependence { .. } => "k_i not all 0",
            FamilyGen::AbelianRelations { .. } => "k_i not all 0, true of the generators",
            FamilyGen::AbelianSpan { .. } => "all integer tuples k",
            FamilyGen::DihedralRelations { .. } => "reduced words w, true of (a, b)",
            FamilyGen::WordSpan { .. } => "reduced words w",
            FamilyGen::ImprimitivePairs { .. } => "imprimitive pairs of words",
            FamilyGen::RationalMembers { .. } | FamilyGen::RationalSpan { .. } => "λ in Λ",
            FamilyGen::InfiniteDivisibility { .. } => "p in P^∞, k > 0",
            FamilyGen::PrimeIndivisibility { .. } => "p not in P^∞",
        };
        match self.len() {
            Some(n) => format!("{}: {range} ({n} members)", self.id()),
            None => format!("{}: {range}", self.id()),
        }
    }

    /// Number of members, or `None` when the family is infinite.
    pub fn len(&self) -> Option<usize> {
        match &self.gen {
            FamilyGen::NonzeroMultiples { .. } => None,
            FamilyGen::Indivisible { xs, .. } => (xs.is_empty()).then_some(0),
            FamilyGen::LinearIndependence { xs } | FamilyGen::LinearDependence { xs } => xs.is_empty().then_some(0),
            FamilyGen::AbelianRelations { xs, .. } => xs.is_empty().then_some(0),
            FamilyGen::AbelianSpan { xs, .. } => xs.is_empty().then_some(1),
            FamilyGen::DihedralRelations { .. } | FamilyGen::ImprimitivePairs { .. } => None,
            FamilyGen::WordSpan { xs, .. } => xs.is_empty().then_some(1),
            FamilyGen::RationalMembers { .. } | FamilyGen::RationalSpan { .. } => None,
            FamilyGen::InfiniteDivisibility { group, .. } => match group.finite_class(PrimeClass::Infinite) {
                Some(primes) if primes.is_empty() => Some(0),
                _ => None,
            },
            FamilyGen::PrimeIndivisibility { group, .. } => group.finite_complement_of_infinite().map(|v| v.len()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.len().is_some()
    }

    /// The `index`-th member. Panics if `index` is past the end of a finite
    /// family.
    pub fn member(&self, index: usize) -> Formula {
        if let Some(n) = self.len() {
            assert!(index < n, "member {index} of a family with {n} members");
        }
        match &self.gen {
            FamilyGen::NonzeroMultiples { var } => {
                Formula::neq(Term::scale(index as i64 + 1, Term::var(var.clone())), Term::Unit)
            }
            FamilyGen::Indivisible { xs, y } => {
                let k = (index / xs.len()) as i64 + 2;
                let x = &xs[index % xs.len()];
                Formula::neq(Term::scale(k, Term::var(y.clone())), Term::var(x.clone()))
            }
            FamilyGen::LinearIndependence { xs } => {
                Formula::neq(Term::linear(&int_tuple(xs.len(), index, false), xs), Term::Unit)
            }
            FamilyGen::LinearDependence { xs } => {
                Formula::eq(Term::linear(&int_tuple(xs.len(), index, false), xs), Term::Unit)
            }
            FamilyGen::AbelianRelations { group, xs } => {
                let k = int_tuple(xs.len(), index, false);
                let lhs = Term::linear(&k, xs);
                if group.combination_vanishes(&k) {
                    Formula::eq(lhs, Term::Unit)
                } else {
                    Formula::neq(lhs, Term::Unit)
                }
            }
            FamilyGen::AbelianSpan { xs, y } => {
                Formula::eq(Term::var(y.clone()), Term::linear(&int_tuple(xs.len(), index, true), xs))
            }
            FamilyGen::DihedralRelations { xs } => {
                let w = FreeWord::nth(xs.len(), index);
                let term = Term::word(&w, xs);
                if dihedral::evaluate_free_word(&w).is_identity() {
                    Formula::eq(term, Term::Unit)
                } else {
                    Formula::neq(term, Term::Unit)
                }
            }
            FamilyGen::WordSpan { xs, y } => {
                let w = FreeWord::nth(xs.len(), index);
                Formula::eq(Term::var(y.clone()), Term::word(&w, xs))
            }
            FamilyGen::ImprimitivePairs { xs, ys } => {
                let (w1, w2) = dihedral::nth_imprimitive_pair(index);
                Formula::or(vec![
                    Formula::neq(w1.to_term(ys), Term::var(xs[0].clone())),
                    Formula::neq(w2.to_term(ys), Term::var(xs[1].clone())),
                ])
            }
            FamilyGen::RationalMembers { group, x, witness } => {
                let q = group.lambda_nth(index);
                Formula::exists(vec![witness.clone()], rational_equation(&q, witness, x))
            }
            FamilyGen::RationalSpan { group, x, y } => {
                let q = group.lambda_nth(index);
                rational_equation(&q, y, x)
            }
            FamilyGen::InfiniteDivisibility { group, y, witness } => {
                let (p, k) = match group.finite_class(PrimeClass::Infinite) {
                    Some(primes) => (primes[index % primes.len()], index / primes.len() + 1),
                    None => {
                        let (a, b) = unpair(index);
                        (group.nth_in_class(PrimeClass::Infinite, a), b + 1)
                    }
                };
                let scaled = prime_power_term(p, k as u32, Term::var(witness.clone()));
                Formula::exists(vec![witness.clone()], Formula::eq(scaled, Term::var(y.clone())))
            }
            FamilyGen::PrimeIndivisibility { group, x, witness } => {
                let p = match group.finite_complement_of_infinite() {
                    Some(primes) => primes[index],
                    None => group.nth_not_infinite(index),
                };
                Formula::forall(
                    vec![witness.clone()],
                    Formula::neq(Term::scale(p as i64, Term::var(witness.clone())), Term::var(x.clone())),
                )
            }
        }
    }

    /// Free variables, read off the first few members.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let n = self.len().unwrap_or(4).min(4);
        (0..n).flat_map(|i| self.member(i).free_vars()).collect()
    }
}

/// `den·lhs = num·rhs` for the rational `num/den`.
fn rational_equation(q: &Rational, lhs: &str, rhs: &str) -> Formula {
    let num = *q.numer() as i64;
    let den = *q.denom() as i64;
    let right = if num == 0 { Term::Unit } else { Term::scale(num, Term::var(rhs)) };
    Formula::eq(Term::scale(den, Term::var(lhs)), right)
}

fn prime_power_term(p: u64, k: u32, t: Term) -> Term {
    match (p as i64).checked_pow(k) {
        Some(m) => Term::scale(m, t),
        None => (0..k).fold(t, |acc, _| Term::scale(p as i64, acc)),
    }
}

/// Inverse Cantor pairing.
fn unpair(index: usize) -> (usize, usize) {
    let mut diag = 0;
    while (diag + 1) * (diag + 2) / 2 <= index {
        diag += 1;
    }
    let offset = index - diag * (diag + 1) / 2;
    (diag - offset, offset)
}

/// The `index`-th integer tuple of the given arity in max-norm shells
/// (shell `r` holds the tuples with `max |k_i| = r`, lexicographic within
/// the shell). Without `include_zero` the all-zero tuple is skipped.
pub fn int_tuple(arity: usize, index: usize, include_zero: bool) -> Vec<i64> {
    if arity == 0 {
        assert!(include_zero && index == 0, "only the empty tuple has arity 0");
        return Vec::new();
    }
    let mut remaining = index;
    if include_zero {
        if remaining == 0 {
            return vec![0; arity];
        }
        remaining -= 1;
    }
    let mut r: i64 = 1;
    loop {
        let shell = (2 * r + 1).pow(arity as u32) - (2 * r - 1).pow(arity as u32);
        if (remaining as i64) < shell {
            break;
        }
        remaining -= shell as usize;
        r += 1;
    }
    let side = 2 * r + 1;
    let mut count = 0;
    for code in 0..side.pow(arity as u32) {
        let mut c = code;
        let mut tuple = vec![0; arity];
        for slot in tuple.iter_mut().rev() {
            *slot = c % side - r;
            c /= side;
        }
        if tuple.iter().any(|k| k.abs() == r) {
            if count == remaining {
                return tuple;
            }
            count += 1;
        }
    }
    unreachable!("shell size miscounted")
}

/// All rationals ordered by height `max(|num|, den)`, then numerator, then
/// denominator.
pub fn rationals_by_height() -> impl Iterator<Item = Rational> {
    (1i128..).flat_map(|h| {
        let mut level = Vec::new();
        for num in -h..=h {
            for den in 1..=h {
                if num.abs().max(den) == h && num_integer::gcd(num, den) == 1 {
                    level.push(Rational::new_raw(num, den));
                }
            }
        }
        level
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_shells() {
        let first: Vec<Vec<i64>> = (0..8).map(|i| int_tuple(2, i, false)).collect();
        assert_eq!(first[0], vec![-1, -1]);
        assert_eq!(first[7], vec![1, 1]);
        assert!(first.iter().all(|t| t.iter().any(|k| k.abs() == 1)));
        assert_eq!(int_tuple(2, 8, false), vec![-2, -2]);
        assert_eq!(int_tuple(2, 0, true), vec![0, 0]);
        assert_eq!(int_tuple(0, 0, true), Vec::<i64>::new());
        // |k| <= 3 in two variables: 48 nonzero tuples.
        let all: BTreeSet<Vec<i64>> = (0..48).map(|i| int_tuple(2, i, false)).collect();
        assert_eq!(all.len(), 48);
        assert!(all.iter().all(|t| t.iter().all(|k| k.abs() <= 3)));
    }

    #[test]
    fn rationals_order() {
        let first: Vec<String> = rationals_by_height().take(7).map(|q| q.to_string()).collect();
        assert_eq!(first, vec!["-1", "0", "1", "-2", "-1/2", "1/2", "2"]);
    }

    #[test]
    fn pairing_covers_grid() {
        let seen: BTreeSet<(usize, usize)> = (0..10).map(unpair).collect();
        for a in 0..4 {
            for b in 0..4 - a {
                assert!(seen.contains(&(a, b)));
            }
        }
    }

    #[test]
    fn indivisible_starts_at_two() {
        let fam = Family::new(FamilyGen::Indivisible { xs: vec!["x1".into(), "x2".into()], y: "y".into() });
        assert_eq!(fam.member(0), Formula::neq(Term::scale(2, Term::var("y")), Term::var("x1")));
        assert_eq!(fam.member(3), Formula::neq(Term::scale(3, Term::var("y")), Term::var("x2")));
    }
}
