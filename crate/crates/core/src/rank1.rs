//! Subgroups of `ℚ` described by their characteristic at a designated `1`:
//! membership, the `P⁰ / P^fin / P^∞` partition, isomorphism, case
//! classification and Scott sentences.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime, nth_prime, prime_index, Rational};
use crate::formula::{abelian_axioms, rationals_by_height, torsion_free, FamilyGen, Formula, Term};
use crate::{Error, Result};

/// Exponent of a prime in the characteristic: how often it divides `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "ExpRepr", into = "ExpRepr")]
pub enum Exp {
    Finite(u32),
    Infinite,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExpRepr {
    Number(u32),
    Name(String),
}

impl TryFrom<ExpRepr> for Exp {
    type Error = Error;

    fn try_from(r: ExpRepr) -> Result<Self> {
        match r {
            ExpRepr::Number(n) => Ok(Exp::Finite(n)),
            ExpRepr::Name(s) if s == "inf" || s == "∞" => Ok(Exp::Infinite),
            ExpRepr::Name(s) => Err(Error::InvalidCharacteristic(format!("exponent {s:?} is neither a natural nor \"inf\""))),
        }
    }
}

impl From<Exp> for ExpRepr {
    fn from(e: Exp) -> Self {
        match e {
            Exp::Finite(n) => ExpRepr::Number(n),
            Exp::Infinite => ExpRepr::Name("inf".into()),
        }
    }
}

impl Exp {
    pub fn class(self) -> PrimeClass {
        match self {
            Exp::Finite(0) => PrimeClass::Zero,
            Exp::Finite(_) => PrimeClass::Finite,
            Exp::Infinite => PrimeClass::Infinite,
        }
    }

    pub fn is_finite(self) -> bool {
        self != Exp::Infinite
    }
}

impl fmt::Display for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exp::Finite(n) => write!(f, "{n}"),
            Exp::Infinite => write!(f, "∞"),
        }
    }
}

/// Which of `P⁰`, `P^fin`, `P^∞` a prime belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeClass {
    Zero,
    Finite,
    Infinite,
}

/// Exponent assigned to the `i`-th prime (zero-indexed) outside the
/// exceptions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RuleRepr", into = "RuleRepr")]
pub enum DefaultRule {
    Zero,
    Infinity,
    /// `a·i + b`.
    Linear { a: u32, b: u32 },
    /// `pattern[i mod pattern.len()]`.
    Periodic(Vec<Exp>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RuleRepr {
    Name(String),
    Linear { linear: [u32; 2] },
    Periodic { periodic: Vec<Exp> },
}

impl TryFrom<RuleRepr> for DefaultRule {
    type Error = Error;

    fn try_from(r: RuleRepr) -> Result<Self> {
        match r {
            RuleRepr::Name(s) if s == "zero" => Ok(DefaultRule::Zero),
            RuleRepr::Name(s) if s == "inf" => Ok(DefaultRule::Infinity),
            RuleRepr::Name(s) => Err(Error::InvalidCharacteristic(format!("unknown default rule {s:?}"))),
            RuleRepr::Linear { linear: [a, b] } => Ok(DefaultRule::Linear { a, b }),
            RuleRepr::Periodic { periodic } if periodic.is_empty() => {
                Err(Error::InvalidCharacteristic("periodic pattern must be nonempty".into()))
            }
            RuleRepr::Periodic { periodic } => Ok(DefaultRule::Periodic(periodic)),
        }
    }
}

impl From<DefaultRule> for RuleRepr {
    fn from(r: DefaultRule) -> Self {
        match r {
            DefaultRule::Zero => RuleRepr::Name("zero".into()),
            DefaultRule::Infinity => RuleRepr::Name("inf".into()),
            DefaultRule::Linear { a, b } => RuleRepr::Linear { linear: [a, b] },
            DefaultRule::Periodic(p) => RuleRepr::Periodic { periodic: p },
        }
    }
}

impl DefaultRule {
    pub fn at(&self, i: usize) -> Exp {
        match self {
            DefaultRule::Zero => Exp::Finite(0),
            DefaultRule::Infinity => Exp::Infinite,
            DefaultRule::Linear { a, b } => Exp::Finite(a * i as u32 + b),
            DefaultRule::Periodic(p) => p[i % p.len()],
        }
    }

    /// Bounded rules as a repeating pattern; `None` for unbounded linear rules.
    fn pattern(&self) -> Option<Vec<Exp>> {
        match self {
            DefaultRule::Zero => Some(vec![Exp::Finite(0)]),
            DefaultRule::Infinity => Some(vec![Exp::Infinite]),
            DefaultRule::Linear { a: 0, b } => Some(vec![Exp::Finite(*b)]),
            DefaultRule::Linear { .. } => None,
            DefaultRule::Periodic(p) => Some(p.clone()),
        }
    }

    /// Whether the rule assigns `class` to infinitely many primes.
    fn hits_infinitely(&self, class: PrimeClass) -> bool {
        match self.pattern() {
            Some(p) => p.iter().any(|e| e.class() == class),
            // a > 0: every index past 0 gets a positive finite exponent.
            None => class == PrimeClass::Finite,
        }
    }

    /// Indices where the rule assigns `class`, provided there are finitely
    /// many.
    fn finite_hits(&self, class: PrimeClass) -> Vec<usize> {
        debug_assert!(!self.hits_infinitely(class));
        match self {
            DefaultRule::Linear { a, b: 0 } if *a > 0 && class == PrimeClass::Zero => vec![0],
            _ => Vec::new(),
        }
    }

    /// Identical rules as functions on indices.
    fn same_function(&self, other: &DefaultRule) -> bool {
        match (self.pattern(), other.pattern()) {
            (Some(p), Some(q)) => {
                let l = p.len().lcm(&q.len());
                (0..l).all(|i| p[i % p.len()] == q[i % q.len()])
            }
            (None, None) => self == other,
            _ => false,
        }
    }
}

/// A characteristic: exponents at finitely many exception primes and a
/// default rule elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CharRepr", into = "CharRepr")]
pub struct Rank1Char {
    exceptions: BTreeMap<u64, Exp>,
    default: DefaultRule,
}

#[derive(Serialize, Deserialize)]
struct CharRepr {
    #[serde(default)]
    exceptions: BTreeMap<u64, Exp>,
    #[serde(default = "zero_rule")]
    default: DefaultRule,
}

fn zero_rule() -> DefaultRule {
    DefaultRule::Zero
}

impl TryFrom<CharRepr> for Rank1Char {
    type Error = Error;

    fn try_from(r: CharRepr) -> Result<Self> {
        Rank1Char::new(r.exceptions, r.default)
    }
}

impl From<Rank1Char> for CharRepr {
    fn from(c: Rank1Char) -> Self {
        CharRepr { exceptions: c.exceptions, default: c.default }
    }
}

impl Rank1Char {
    /// Exceptions that agree with the default rule are dropped so equal
    /// characteristics compare equal.
    pub fn new(exceptions: BTreeMap<u64, Exp>, default: DefaultRule) -> Result<Self> {
        if let DefaultRule::Periodic(p) = &default {
            if p.is_empty() {
                return Err(Error::InvalidCharacteristic("periodic pattern must be nonempty".into()));
            }
        }
        if let Some(&p) = exceptions.keys().find(|&&p| !is_prime(p)) {
            return Err(Error::NotPrime(p));
        }
        let exceptions = exceptions.into_iter().filter(|(p, e)| default.at(prime_index(*p)) != *e).collect();
        Ok(Self { exceptions, default })
    }

    /// `ℤ`: no prime divides `1`.
    pub fn integers() -> Self {
        Self { exceptions: BTreeMap::new(), default: DefaultRule::Zero }
    }

    /// `ℚ`: every prime divides `1` infinitely.
    pub fn rationals() -> Self {
        Self { exceptions: BTreeMap::new(), default: DefaultRule::Infinity }
    }

    pub fn with_default(default: DefaultRule) -> Result<Self> {
        Self::new(BTreeMap::new(), default)
    }

    pub fn exceptions(&self) -> &BTreeMap<u64, Exp> {
        &self.exceptions
    }

    pub fn default_rule(&self) -> &DefaultRule {
        &self.default
    }

    pub fn exponent(&self, p: u64) -> Result<Exp> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(self.exp_at(p))
    }

    /// Exponent at a prime known to be prime.
    fn exp_at(&self, p: u64) -> Exp {
        self.exceptions.get(&p).copied().unwrap_or_else(|| self.default.at(prime_index(p)))
    }

    pub fn class_of(&self, p: u64) -> Result<PrimeClass> {
        Ok(self.exponent(p)?.class())
    }

    /// Whether the rational `q` lies in the group.
    pub fn contains(&self, q: &Rational) -> bool {
        factorize(q.denom().unsigned_abs() as u64)
            .into_iter()
            .all(|(p, e)| match self.exp_at(p) {
                Exp::Infinite => true,
                Exp::Finite(k) => e <= k,
            })
    }

    pub fn is_class_finite(&self, class: PrimeClass) -> bool {
        !self.default.hits_infinitely(class)
    }

    /// All primes in `class`, or `None` if there are infinitely many.
    pub fn finite_class(&self, class: PrimeClass) -> Option<Vec<u64>> {
        if !self.is_class_finite(class) {
            return None;
        }
        let mut primes: Vec<u64> = self
            .default
            .finite_hits(class)
            .into_iter()
            .map(nth_prime)
            .filter(|p| !self.exceptions.contains_key(p))
            .chain(self.exceptions.iter().filter(|(_, e)| e.class() == class).map(|(p, _)| *p))
            .collect();
        primes.sort_unstable();
        Some(primes)
    }

    /// The `n`-th prime (zero-indexed) in `class`. Loops forever if the
    /// class has at most `n` members.
    pub fn nth_in_class(&self, class: PrimeClass, n: usize) -> u64 {
        (0..).map(nth_prime).filter(|&p| self.exp_at(p).class() == class).nth(n).expect("primes are infinite")
    }

    /// Primes outside `P^∞`, if there are finitely many.
    pub fn finite_complement_of_infinite(&self) -> Option<Vec<u64>> {
        let mut out = self.finite_class(PrimeClass::Zero)?;
        out.extend(self.finite_class(PrimeClass::Finite)?);
        out.sort_unstable();
        Some(out)
    }

    /// The `n`-th prime outside `P^∞`.
    pub fn nth_not_infinite(&self, n: usize) -> u64 {
        (0..).map(nth_prime).filter(|&p| self.exp_at(p).is_finite()).nth(n).expect("primes are infinite")
    }

    /// The partition restricted to primes up to `bound`, with finiteness
    /// flags for the full sets.
    pub fn partition(&self, bound: u64) -> Partition {
        let mut part = Partition {
            p0: Vec::new(),
            pfin: Vec::new(),
            pinf: Vec::new(),
            p0_finite: self.is_class_finite(PrimeClass::Zero),
            pfin_finite: self.is_class_finite(PrimeClass::Finite),
            pinf_finite: self.is_class_finite(PrimeClass::Infinite),
        };
        for p in (2..=bound).filter(|&p| is_prime(p)) {
            match self.exp_at(p).class() {
                PrimeClass::Zero => part.p0.push(p),
                PrimeClass::Finite => part.pfin.push(p),
                PrimeClass::Infinite => part.pinf.push(p),
            }
        }
        part
    }

    /// The smallest extension in which `p` divides `1` infinitely.
    pub fn extend_infinite_at(&self, p: u64) -> Result<Self> {
        self.with_exception(p, Exp::Infinite)
    }

    /// The largest subgroup in which `q` does not divide `1`.
    pub fn kill_prime_at(&self, q: u64) -> Result<Self> {
        self.with_exception(q, Exp::Finite(0))
    }

    pub fn with_exception(&self, p: u64, e: Exp) -> Result<Self> {
        let mut exceptions = self.exceptions.clone();
        exceptions.insert(p, e);
        Self::new(exceptions, self.default.clone())
    }

    /// Isomorphism of the groups: equal exponents at all but finitely many
    /// primes, and finite exponents wherever they differ.
    pub fn is_isomorphic(&self, other: &Rank1Char) -> bool {
        self.isomorphism_multiplier(other).is_some()
    }

    /// A rational `r` such that multiplication by `r` maps this group onto
    /// `other`, if they are isomorphic.
    pub fn isomorphism_multiplier(&self, other: &Rank1Char) -> Option<Rational> {
        if !self.default.same_function(&other.default) {
            return None;
        }
        let primes: std::collections::BTreeSet<u64> =
            self.exceptions.keys().chain(other.exceptions.keys()).copied().collect();
        let mut r = Rational::from_integer(1);
        for p in primes {
            match (self.exp_at(p), other.exp_at(p)) {
                (a, b) if a == b => {}
                // x ↦ p^(a-b)·x sends a 1 divisible exactly by p^a to an
                // element divisible exactly by p^b.
                (Exp::Finite(a), Exp::Finite(b)) => r *= Rational::from_integer(p as i128).pow(a as i32 - b as i32),
                _ => return None,
            }
        }
        Some(r)
    }

    /// The isomorphic characteristic with `P^fin` empty, obtained by moving
    /// the designated `1`. Requires `P^fin` finite.
    pub fn rescale_finite(&self) -> Result<Self> {
        let pfin = self.finite_class(PrimeClass::Finite).ok_or_else(|| {
            Error::Precondition("P^fin is infinite, so no rescaling removes it".into())
        })?;
        let mut exceptions = self.exceptions.clone();
        for p in pfin {
            exceptions.insert(p, Exp::Finite(0));
        }
        Self::new(exceptions, self.default.clone())
    }

    /// The `i`-th rational of the group in height order.
    pub fn lambda_nth(&self, i: usize) -> Rational {
        rationals_by_height().filter(|q| self.contains(q)).nth(i).expect("every subgroup of ℚ is infinite")
    }

    /// The first `n` rationals of the group in height order.
    pub fn lambda_prefix(&self, n: usize) -> Vec<Rational> {
        rationals_by_height().filter(|q| self.contains(q)).take(n).collect()
    }

    pub fn case_tag(&self) -> CaseTag {
        let p0 = Finiteness::of(self.is_class_finite(PrimeClass::Zero));
        let pfin = Finiteness::of(self.is_class_finite(PrimeClass::Finite));
        let pinf = Finiteness::of(self.is_class_finite(PrimeClass::Infinite));
        use Finiteness::{Finite as F, Infinite as I};
        let all_infinite = self.finite_complement_of_infinite().is_some_and(|v| v.is_empty());
        let row = if all_infinite {
            Row::AllInf
        } else if self.finite_class(PrimeClass::Infinite).is_some_and(|v| v.is_empty()) && pfin == F {
            Row::All0
        } else {
            Row::Case(match (p0, pfin, pinf) {
                (I, F, F) => 1,
                (F, I, F) => 2,
                (F, F, I) => 3,
                (F, I, I) => 4,
                (I, F, I) => 5,
                (I, I, F) => 6,
                (I, I, I) => 7,
                (F, F, F) => unreachable!("there are infinitely many primes"),
            })
        };
        CaseTag { p0, pfin, pinf, row }
    }

    /// Case, complexity bounds and the recommended Scott sentence.
    pub fn classify(&self) -> Classification {
        let tag = self.case_tag();
        use Bound::{DSigma2, Pi2, Sigma3};
        let (lower, upper) = match tag.row {
            Row::All0 => (DSigma2, DSigma2),
            Row::AllInf => (Pi2, Pi2),
            Row::Case(1 | 3) => (DSigma2, DSigma2),
            Row::Case(2 | 6) => (Sigma3, Sigma3),
            Row::Case(_) => (DSigma2, Sigma3),
        };
        let recommendation = match tag.row {
            Row::All0 | Row::Case(1 | 3) => DSigma2,
            Row::AllInf => Pi2,
            Row::Case(_) => Sigma3,
        };
        Classification { tag, lower, upper, recommendation }
    }

    /// The emitter matching [`Rank1Char::classify`]'s recommendation.
    pub fn scott_sentence(&self) -> Formula {
        match self.classify().recommendation {
            Bound::Sigma3 => scott_sentence_sigma3(self),
            Bound::DSigma2 | Bound::Pi2 => {
                scott_sentence_dsigma2(self).expect("recommended only when P^fin is finite")
            }
        }
    }
}

impl fmt::Display for Rank1Char {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = match &self.default {
            DefaultRule::Zero => "0".to_string(),
            DefaultRule::Infinity => "∞".to_string(),
            DefaultRule::Linear { a, b } => format!("{a}i+{b}"),
            DefaultRule::Periodic(p) => {
                format!("[{}]", p.iter().map(Exp::to_string).collect::<Vec<_>>().join(","))
            }
        };
        let ex: Vec<String> = self.exceptions.iter().map(|(p, e)| format!("{p}:{e}")).collect();
        write!(f, "χ{{{}; default {rule}}}", ex.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub p0: Vec<u64>,
    pub pfin: Vec<u64>,
    pub pinf: Vec<u64>,
    pub p0_finite: bool,
    pub pfin_finite: bool,
    pub pinf_finite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finiteness {
    Finite,
    Infinite,
}

impl Finiteness {
    fn of(finite: bool) -> Self {
        if finite {
            Finiteness::Finite
        } else {
            Finiteness::Infinite
        }
    }
}

/// Row of the case table, or one of the degenerate cases `ℤ` (no prime
/// divides infinitely and finitely many divide at all) and `ℚ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Row {
    Case(u8),
    All0,
    AllInf,
}

impl Row {
    /// Row number or `all0` / `allinf`.
    pub fn to_json(self) -> serde_json::Value {
        match self {
            Row::Case(n) => serde_json::Value::from(n),
            Row::All0 => "all0".into(),
            Row::AllInf => "allinf".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaseTag {
    pub p0: Finiteness,
    pub pfin: Finiteness,
    pub pinf: Finiteness,
    pub row: Row,
}

/// Index-set complexity bound, also used to name the recommended sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bound {
    #[serde(rename = "dSigma02")]
    DSigma2,
    #[serde(rename = "Sigma03")]
    Sigma3,
    #[serde(rename = "Pi02")]
    Pi2,
}

impl Bound {
    pub fn name(self) -> &'static str {
        match self {
            Bound::DSigma2 => "dSigma02",
            Bound::Sigma3 => "Sigma03",
            Bound::Pi2 => "Pi02",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub tag: CaseTag,
    pub lower: Bound,
    pub upper: Bound,
    pub recommendation: Bound,
}

/// Parses `num/den` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: i128 = num.parse().map_err(|_| Error::RationalSyntax(s.to_string()))?;
    let den: i128 = den.parse().map_err(|_| Error::RationalSyntax(s.to_string()))?;
    if den == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational::new(num, den))
}

/// Torsion-free abelian groups of rank 1: abelian axioms, torsion-freeness,
/// nontriviality and pairwise dependence.
pub fn rank1_axioms() -> Formula {
    let xy = vec!["x".to_string(), "y".to_string()];
    Formula::and(vec![
        abelian_axioms(),
        torsion_free(),
        Formula::exists(vec!["x".into()], Formula::neq(Term::var("x"), Term::Unit)),
        Formula::forall(xy.clone(), Formula::family_or(FamilyGen::LinearDependence { xs: xy })),
    ])
}

/// The Σ₃ sentence: some `x` has exactly the multiples `λx` for `λ` in the
/// group, and every element is one of them.
pub fn scott_sentence_sigma3(c: &Rank1Char) -> Formula {
    let x = "x1".to_string();
    Formula::and(vec![
        abelian_axioms(),
        torsion_free(),
        Formula::exists(
            vec![x.clone()],
            Formula::and(vec![
                Formula::family_and(FamilyGen::RationalMembers { group: c.clone(), x: x.clone(), witness: "y".into() }),
                Formula::forall(
                    vec!["y".into()],
                    Formula::family_or(FamilyGen::RationalSpan { group: c.clone(), x, y: "y".into() }),
                ),
            ]),
        ),
    ])
}

/// The d-Σ₂ sentence: every element is divisible by all powers of the
/// primes in `P^∞`, and some element is divisible by no other prime.
/// Requires `P^fin` finite; the characteristic is rescaled first.
pub fn scott_sentence_dsigma2(c: &Rank1Char) -> Result<Formula> {
    let g = c.rescale_finite()?;
    Ok(Formula::and(vec![
        rank1_axioms(),
        Formula::forall(
            vec!["y".into()],
            Formula::family_and(FamilyGen::InfiniteDivisibility { group: g.clone(), y: "y".into(), witness: "z".into() }),
        ),
        Formula::exists(
            vec!["x".into()],
            Formula::family_and(FamilyGen::PrimeIndivisibility { group: g, x: "x".into(), witness: "z".into() }),
        ),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{classify, Complexity};

    fn ex(pairs: &[(u64, Exp)], default: DefaultRule) -> Rank1Char {
        Rank1Char::new(pairs.iter().copied().collect(), default).unwrap()
    }

    fn case2() -> Rank1Char {
        Rank1Char::with_default(DefaultRule::Linear { a: 1, b: 0 }).unwrap()
    }

    #[test]
    fn exponents() {
        assert_eq!(Rank1Char::integers().exponent(7), Ok(Exp::Finite(0)));
        assert_eq!(Rank1Char::rationals().exponent(2), Ok(Exp::Infinite));
        assert_eq!(case2().exponent(7), Ok(Exp::Finite(3)));
        assert_eq!(case2().exponent(8), Err(Error::NotPrime(8)));
    }

    #[test]
    fn membership() {
        let z = Rank1Char::integers();
        assert!(!z.contains(&Rational::new(1, 2)));
        assert!(z.contains(&Rational::from_integer(3)));
        let c = ex(&[(2, Exp::Infinite)], DefaultRule::Zero);
        assert!(c.contains(&Rational::new(5, 8)));
        assert!(!c.contains(&Rational::new(5, 6)));
        assert_eq!(parse_rational("5/8").unwrap(), Rational::new(5, 8));
        assert_eq!(parse_rational("1/0"), Err(Error::ZeroDenominator));
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn json_form() {
        let c: Rank1Char = serde_json::from_str(r#"{"exceptions":{"2":"inf","3":1},"default":"zero"}"#).unwrap();
        assert_eq!(c, ex(&[(2, Exp::Infinite), (3, Exp::Finite(1))], DefaultRule::Zero));
        let back = serde_json::to_value(&c).unwrap();
        assert_eq!(back, serde_json::json!({"exceptions":{"2":"inf","3":1},"default":"zero"}));
        let l: Rank1Char = serde_json::from_str(r#"{"default":{"linear":[1,0]}}"#).unwrap();
        assert_eq!(l, case2());
        assert!(serde_json::from_str::<Rank1Char>(r#"{"exceptions":{"4":1},"default":"zero"}"#).is_err());
    }

    #[test]
    fn partitions() {
        let q = Rank1Char::rationals().partition(10);
        assert_eq!((q.p0_finite, q.pfin_finite, q.pinf_finite), (true, true, false));
        assert_eq!(q.pinf, vec![2, 3, 5, 7]);
        let c2 = case2().partition(10);
        assert_eq!((c2.p0_finite, c2.pfin_finite, c2.pinf_finite), (true, false, true));
        let c = ex(&[(2, Exp::Infinite), (3, Exp::Finite(1))], DefaultRule::Zero);
        let part = c.partition(10);
        assert_eq!((part.p0_finite, part.pfin_finite, part.pinf_finite), (false, true, true));
        assert_eq!((part.pfin, part.pinf), (vec![3], vec![2]));
        assert_eq!(c.finite_class(PrimeClass::Finite), Some(vec![3]));
        assert_eq!(case2().finite_class(PrimeClass::Zero), Some(vec![2]));
    }

    #[test]
    fn isomorphism() {
        let z = Rank1Char::integers();
        let z5 = ex(&[(2, Exp::Finite(5))], DefaultRule::Zero);
        assert!(z.is_isomorphic(&z5));
        assert_eq!(z.isomorphism_multiplier(&z5), Some(Rational::new(1, 32)));
        assert!(!z.is_isomorphic(&Rank1Char::rationals()));
        let c = ex(&[(7, Exp::Finite(0))], DefaultRule::Linear { a: 1, b: 0 });
        assert!(c.is_isomorphic(&case2()));
        assert!(!case2().is_isomorphic(&Rank1Char::with_default(DefaultRule::Linear { a: 2, b: 0 }).unwrap()));
        let periodic = Rank1Char::with_default(DefaultRule::Periodic(vec![Exp::Finite(0), Exp::Finite(0)])).unwrap();
        assert!(periodic.is_isomorphic(&z));
    }

    #[test]
    fn derived_structures() {
        assert_eq!(Rank1Char::integers().extend_infinite_at(2).unwrap().exponent(2), Ok(Exp::Infinite));
        assert_eq!(Rank1Char::rationals().kill_prime_at(3).unwrap().exponent(3), Ok(Exp::Finite(0)));
        let g = ex(&[(2, Exp::Infinite)], DefaultRule::Zero);
        let h = g.extend_infinite_at(3).unwrap();
        let k = g.kill_prime_at(2).unwrap();
        assert!(!h.is_isomorphic(&g) && !g.is_isomorphic(&k) && !k.is_isomorphic(&h));
    }

    #[test]
    fn table_rows() {
        let row = |c: &Rank1Char| c.classify();
        let r1 = row(&ex(&[(2, Exp::Infinite)], DefaultRule::Zero));
        assert_eq!((r1.tag.row, r1.lower, r1.upper), (Row::Case(1), Bound::DSigma2, Bound::DSigma2));
        let r2 = row(&case2());
        assert_eq!((r2.tag.row, r2.lower, r2.upper), (Row::Case(2), Bound::Sigma3, Bound::Sigma3));
        let r4 = row(&Rank1Char::with_default(DefaultRule::Periodic(vec![Exp::Finite(1), Exp::Infinite])).unwrap());
        assert_eq!((r4.tag.row, r4.lower, r4.upper), (Row::Case(4), Bound::DSigma2, Bound::Sigma3));
        let q = row(&Rank1Char::rationals());
        assert_eq!((q.tag.row, q.recommendation), (Row::AllInf, Bound::Pi2));
        assert_eq!(row(&Rank1Char::integers()).tag.row, Row::All0);
    }

    #[test]
    fn lambda_enumeration() {
        let z = Rank1Char::integers().lambda_prefix(10);
        assert!(z.iter().all(|q| q.is_integer()));
        let c = ex(&[(2, Exp::Infinite)], DefaultRule::Zero).lambda_prefix(20);
        assert!(c.contains(&Rational::new(1, 2)) && c.contains(&Rational::new(1, 4)));
    }

    #[test]
    fn sentence_classes() {
        assert_eq!(classify(&scott_sentence_sigma3(&case2())), Complexity::sigma(3));
        let row3 = ex(&[(3, Exp::Finite(2)), (5, Exp::Finite(0))], DefaultRule::Infinity);
        assert_eq!(row3.classify().tag.row, Row::Case(3));
        assert_eq!(classify(&scott_sentence_dsigma2(&row3).unwrap()), Complexity::dsigma(2));
        assert_eq!(row3.rescale_finite().unwrap().finite_class(PrimeClass::Finite), Some(vec![]));
        assert_eq!(classify(&Rank1Char::rationals().scott_sentence()), Complexity::pi(2));
        assert_eq!(classify(&Rank1Char::integers().scott_sentence()), Complexity::dsigma(2));
        assert!(scott_sentence_dsigma2(&case2()).is_err());
    }
}
