//! Finitely generated abelian groups `ℤⁿ ⊕ T` and their Scott sentences.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::formula::{abelian_axioms, torsion_free, var_names, FamilyGen, FiniteStructure, Formula, Term};
use crate::{Error, Result};

/// `ℤ^rank ⊕ ℤ/d₁ ⊕ ... ⊕ ℤ/d_m` with `d₁ | d₂ | ... | d_m`, each `d_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DescRepr", into = "DescRepr")]
pub struct FgAbelianDesc {
    rank: usize,
    torsion: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct DescRepr {
    rank: usize,
    #[serde(default)]
    torsion: Vec<u64>,
}

impl TryFrom<DescRepr> for FgAbelianDesc {
    type Error = Error;

    fn try_from(r: DescRepr) -> Result<Self> {
        FgAbelianDesc::new(r.rank, r.torsion)
    }
}

impl From<FgAbelianDesc> for DescRepr {
    fn from(d: FgAbelianDesc) -> Self {
        DescRepr { rank: d.rank, torsion: d.torsion }
    }
}

impl FgAbelianDesc {
    /// Checks that `torsion` is an invariant-factor chain.
    pub fn new(rank: usize, torsion: Vec<u64>) -> Result<Self> {
        if let Some(&d) = torsion.iter().find(|&&d| d < 2) {
            return Err(Error::CyclicOrderTooSmall(d));
        }
        if let Some(w) = torsion.windows(2).find(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidTable(format!(
                "invariant factors must form a divisibility chain, but {} does not divide {}",
                w[0], w[1]
            )));
        }
        Ok(Self { rank, torsion })
    }

    /// `ℤ^rank ⊕ ⨁ ℤ/c_i` for arbitrary cyclic orders `c_i >= 2`.
    pub fn from_cyclic(rank: usize, orders: &[u64]) -> Result<Self> {
        Self::new(rank, normalize_torsion(orders)?)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    pub fn torsion_order(&self) -> u64 {
        self.torsion.iter().product()
    }

    /// Size of the standard generating tuple: `rank` free generators followed
    /// by one generator per invariant factor.
    pub fn generator_count(&self) -> usize {
        self.rank + self.torsion.len()
    }

    /// Whether `Σ k_i g_i = 0` for the standard generators `g_i`.
    pub fn combination_vanishes(&self, k: &[i64]) -> bool {
        debug_assert_eq!(k.len(), self.generator_count());
        k[..self.rank].iter().all(|&c| c == 0)
            && k[self.rank..].iter().zip(&self.torsion).all(|(&c, &d)| c.rem_euclid(d as i64) == 0)
    }

    /// Operation table of the torsion part.
    pub fn torsion_table(&self) -> FiniteGroupTable {
        FiniteGroupTable::direct_product(&self.torsion)
    }
}

impl std::fmt::Display for FgAbelianDesc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 { "ℤ".to_string() } else { format!("ℤ^{}", self.rank) });
        }
        parts.extend(self.torsion.iter().map(|d| format!("ℤ/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// Invariant factors (ascending, each dividing the next) of `⨁ ℤ/c_i`.
pub fn normalize_torsion(orders: &[u64]) -> Result<Vec<u64>> {
    if let Some(&c) = orders.iter().find(|&&c| c < 2) {
        return Err(Error::CyclicOrderTooSmall(c));
    }
    // Prime-power exponents per prime, largest first.
    let mut powers: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &c in orders {
        for (p, e) in factorize(c) {
            powers.entry(p).or_default().push(e);
        }
    }
    for exps in powers.values_mut() {
        exps.sort_unstable_by(|a, b| b.cmp(a));
    }
    let m = powers.values().map(Vec::len).max().unwrap_or(0);
    // The j-th largest factor collects the j-th largest power of each prime.
    let mut factors: Vec<u64> = (0..m)
        .map(|j| powers.iter().filter_map(|(p, exps)| exps.get(j).map(|&e| p.pow(e))).product())
        .collect();
    factors.reverse();
    Ok(factors)
}

/// Invariant-factor descriptors of every abelian group of order `n`, one
/// per isomorphism class.
pub fn abelian_groups_of_order(n: u64) -> Vec<FgAbelianDesc> {
    assert!(n >= 1);
    // Each prime contributes a partition of its exponent.
    let mut classes: Vec<Vec<u64>> = vec![Vec::new()];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for cyclic in &classes {
            for part in partitions(e, e) {
                let mut orders = cyclic.clone();
                orders.extend(part.iter().map(|&k| p.pow(k)));
                next.push(orders);
            }
        }
        classes = next;
    }
    classes
        .into_iter()
        .map(|orders| FgAbelianDesc::from_cyclic(0, &orders).expect("prime powers are at least 2"))
        .collect()
}

/// Partitions of `n` into parts of size at most `max`, parts non-increasing.
fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=max.min(n)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The operation table of a finite group, checked for closure, identity,
/// inverses and associativity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiniteStructure", into = "FiniteStructure")]
pub struct FiniteGroupTable {
    structure: FiniteStructure,
}

impl TryFrom<FiniteStructure> for FiniteGroupTable {
    type Error = Error;

    fn try_from(structure: FiniteStructure) -> Result<Self> {
        if !structure.is_associative() {
            return Err(Error::InvalidTable("operation is not associative".into()));
        }
        Ok(Self { structure })
    }
}

impl From<FiniteGroupTable> for FiniteStructure {
    fn from(t: FiniteGroupTable) -> Self {
        t.structure
    }
}

impl FiniteGroupTable {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        FiniteStructure::new(table)?.try_into()
    }

    /// `ℤ/c₁ × ... × ℤ/c_m`, elements numbered in mixed radix with the last
    /// factor varying fastest. The empty product is the trivial group.
    pub fn direct_product(orders: &[u64]) -> Self {
        let radices: Vec<usize> = orders.iter().map(|&c| c as usize).collect();
        let size: usize = radices.iter().product();
        let digits = |mut x: usize| {
            let mut d = vec![0; radices.len()];
            for (slot, r) in d.iter_mut().zip(&radices).rev() {
                *slot = x % r;
                x /= r;
            }
            d
        };
        let table = (0..size)
            .map(|x| {
                let dx = digits(x);
                (0..size)
                    .map(|y| {
                        let dy = digits(y);
                        dx.iter().zip(&dy).zip(&radices).fold(0, |acc, ((a, b), r)| acc * r + (a + b) % r)
                    })
                    .collect()
            })
            .collect();
        Self::new(table).expect("direct product of cyclic groups is a group")
    }

    pub fn order(&self) -> usize {
        self.structure.order()
    }

    pub fn structure(&self) -> &FiniteStructure {
        &self.structure
    }
}

/// Quantifier-free diagram `δ_T(x̄)` with one variable per element: every
/// product fact `x_i + x_j = x_{ij}` and every inequation `x_i ≠ x_j`.
pub fn diagram(t: &FiniteGroupTable, vars: &[String]) -> Formula {
    let s = t.structure();
    let k = s.order();
    assert_eq!(vars.len(), k);
    let v = |i: usize| Term::var(vars[i].clone());
    let mut parts = Vec::with_capacity(k * k + k * (k - 1) / 2);
    for i in 0..k {
        for j in 0..k {
            parts.push(Formula::eq(Term::op(v(i), v(j)), v(s.op(i, j))));
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            parts.push(Formula::neq(v(i), v(j)));
        }
    }
    Formula::and(parts)
}

/// `(∃x̄) δ_T(x̄) ∧ (∀x₁ ... x_{k+1}) ⋁_{i≠j} x_i = x_j`.
pub fn scott_sentence_finite(t: &FiniteGroupTable) -> Formula {
    let k = t.order();
    let xs = var_names("x", k);
    let ys = var_names("x", k + 1);
    let mut collisions = Vec::new();
    for i in 0..=k {
        for j in i + 1..=k {
            collisions.push(Formula::eq(Term::var(ys[i].clone()), Term::var(ys[j].clone())));
        }
    }
    Formula::and(vec![
        Formula::exists(xs.clone(), diagram(t, &xs)),
        Formula::forall(ys, Formula::or(collisions)),
    ])
}

/// `n` independent elements none of which is a proper multiple.
pub fn independence_sentence(n: usize) -> Formula {
    let xs = var_names("x", n);
    Formula::exists(
        xs.clone(),
        Formula::and(vec![
            Formula::forall(
                vec!["y".into()],
                Formula::family_and(FamilyGen::Indivisible { xs: xs.clone(), y: "y".into() }),
            ),
            Formula::family_and(FamilyGen::LinearIndependence { xs }),
        ]),
    )
}

/// Every `n + 1` elements are dependent.
pub fn dependence_sentence(n: usize) -> Formula {
    let xs = var_names("x", n + 1);
    Formula::forall(xs.clone(), Formula::family_or(FamilyGen::LinearDependence { xs }))
}

/// The three sentences of the `ℤⁿ` Scott sentence: torsion-freeness,
/// independence, dependence.
pub fn zn_sentences(n: usize) -> Result<[Formula; 3]> {
    if n == 0 {
        return Err(Error::ZeroRank);
    }
    Ok([torsion_free(), independence_sentence(n), dependence_sentence(n)])
}

pub fn scott_sentence_zn(n: usize) -> Result<Formula> {
    let [s1, s2, s3] = zn_sentences(n)?;
    Ok(Formula::and(vec![abelian_axioms(), s1, s2, s3]))
}

/// Every element lies in the torsion copy or has infinite order.
pub fn torsion_sentence(d: &FgAbelianDesc) -> Formula {
    let t = d.torsion_table();
    let xs = var_names("x", t.order());
    let x = || Term::var("x");
    let mut options = vec![Formula::family_and(FamilyGen::NonzeroMultiples { var: "x".into() })];
    options.extend(xs.iter().map(|xi| Formula::eq(x(), Term::var(xi.clone()))));
    Formula::exists(
        xs.clone(),
        Formula::forall(vec!["x".into()], Formula::and(vec![diagram(&t, &xs), Formula::or(options)])),
    )
}

/// The three sentences for `ℤⁿ ⊕ T`.
pub fn fg_abelian_sentences(d: &FgAbelianDesc) -> Result<[Formula; 3]> {
    if d.rank == 0 {
        return Err(Error::ZeroRank);
    }
    Ok([torsion_sentence(d), independence_sentence(d.rank), dependence_sentence(d.rank)])
}

pub fn scott_sentence_fg_abelian(d: &FgAbelianDesc) -> Result<Formula> {
    let [s1, s2, s3] = fg_abelian_sentences(d)?;
    Ok(Formula::and(vec![abelian_axioms(), s1, s2, s3]))
}

/// The general Σ₃ Scott sentence for a finitely generated group,
/// instantiated at `d` with its standard generating tuple.
pub fn scott_sentence_sigma3(d: &FgAbelianDesc) -> Formula {
    let xs = var_names("x", d.generator_count());
    Formula::and(vec![
        abelian_axioms(),
        Formula::exists(
            xs.clone(),
            Formula::and(vec![
                Formula::family_and(FamilyGen::AbelianRelations { group: d.clone(), xs: xs.clone() }),
                Formula::forall(vec!["y".into()], Formula::family_or(FamilyGen::AbelianSpan { xs, y: "y".into() })),
            ]),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{classify, evaluate_exact, Complexity, Evaluation};

    #[test]
    fn torsion_normalization() {
        assert_eq!(normalize_torsion(&[4, 6]).unwrap(), vec![2, 12]);
        assert_eq!(normalize_torsion(&[5]).unwrap(), vec![5]);
        assert_eq!(normalize_torsion(&[2, 2]).unwrap(), vec![2, 2]);
        assert_eq!(normalize_torsion(&[]).unwrap(), Vec::<u64>::new());
        assert_eq!(normalize_torsion(&[1]), Err(Error::CyclicOrderTooSmall(1)));
    }

    #[test]
    fn descriptor_json() {
        let d: FgAbelianDesc = serde_json::from_str(r#"{"rank":2,"torsion":[2,4]}"#).unwrap();
        assert_eq!(d.to_string(), "ℤ^2 ⊕ ℤ/2 ⊕ ℤ/4");
        assert!(serde_json::from_str::<FgAbelianDesc>(r#"{"rank":1,"torsion":[4,2]}"#).is_err());
    }

    #[test]
    fn class_counts() {
        let counts: Vec<usize> = (1..=12).map(|n| abelian_groups_of_order(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2]);
    }

    #[test]
    fn direct_product_table() {
        let t = FiniteGroupTable::direct_product(&[2, 2]);
        assert_eq!(t.order(), 4);
        assert!(t.structure().is_commutative());
        assert!((0..4).all(|x| t.structure().power(x, 2) == 0));
        assert_eq!(FiniteGroupTable::direct_product(&[]).order(), 1);
    }

    #[test]
    fn zn_sentence_classes() {
        assert_eq!(classify(&scott_sentence_zn(2).unwrap()), Complexity::dsigma(2));
        let [s1, s2, s3] = zn_sentences(1).unwrap();
        assert_eq!(classify(&s1), Complexity::pi(1));
        assert_eq!(classify(&s2), Complexity::sigma(2));
        assert_eq!(classify(&s3), Complexity::pi(2));
        assert_eq!(scott_sentence_zn(0), Err(Error::ZeroRank));
    }

    #[test]
    fn zn_sentences_on_z5() {
        let z5 = FiniteStructure::cyclic(5);
        let [s1, _, s3] = zn_sentences(1).unwrap();
        // Coefficients with |k_i| <= 3 in two variables: 48 tuples.
        assert_eq!(evaluate_exact(&s3, &z5, 48).unwrap(), Evaluation { truth: true, exact: true });
        assert_eq!(evaluate_exact(&s1, &z5, 6).unwrap(), Evaluation { truth: false, exact: true });
    }

    #[test]
    fn finite_sentences() {
        let z2 = FiniteGroupTable::direct_product(&[2]);
        let f = scott_sentence_finite(&z2);
        assert_eq!(classify(&f), Complexity::dsigma(1));
        let eval = |s: &FiniteStructure| evaluate_exact(&f, s, 1).unwrap();
        assert_eq!(eval(&FiniteStructure::cyclic(2)), Evaluation { truth: true, exact: true });
        assert!(!eval(&FiniteStructure::cyclic(3)).truth);

        let trivial = scott_sentence_finite(&FiniteGroupTable::direct_product(&[]));
        assert!(evaluate_exact(&trivial, &FiniteStructure::cyclic(1), 1).unwrap().truth);
        assert!(!evaluate_exact(&trivial, &FiniteStructure::cyclic(2), 1).unwrap().truth);

        let z4 = FiniteGroupTable::direct_product(&[4]);
        let v4 = FiniteGroupTable::direct_product(&[2, 2]);
        let s4 = scott_sentence_finite(&z4);
        let sv = scott_sentence_finite(&v4);
        assert!(evaluate_exact(&s4, z4.structure(), 1).unwrap().truth);
        assert!(!evaluate_exact(&s4, v4.structure(), 1).unwrap().truth);
        assert!(evaluate_exact(&sv, v4.structure(), 1).unwrap().truth);
        assert!(!evaluate_exact(&sv, z4.structure(), 1).unwrap().truth);
    }

    #[test]
    fn fg_abelian_sentences_share_parts() {
        let z = FgAbelianDesc::new(1, vec![]).unwrap();
        assert_eq!(classify(&scott_sentence_fg_abelian(&z).unwrap()), Complexity::dsigma(2));
        let d = FgAbelianDesc::new(2, vec![2]).unwrap();
        let [s1, s2, s3] = fg_abelian_sentences(&d).unwrap();
        let [_, z2, z3] = zn_sentences(2).unwrap();
        assert_eq!((s2, s3), (z2, z3));
        let xs = var_names("x", 2);
        assert!(s1.contains(&diagram(&d.torsion_table(), &xs)));
        assert_eq!(classify(&scott_sentence_sigma3(&d)), Complexity::sigma(3));
        assert_eq!(scott_sentence_fg_abelian(&FgAbelianDesc::new(0, vec![3]).unwrap()), Err(Error::ZeroRank));
    }
}
