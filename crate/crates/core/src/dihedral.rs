//! The infinite dihedral group `D∞ = ⟨a, b | a² = b² = 1⟩`: normal forms,
//! the shortening procedure deciding generating pairs, primitive pairs, and
//! Scott sentences.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::{group_axioms, Family, FamilyGen, Formula, Term};
use crate::words::FreeWord;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DLetter {
    A,
    B,
}

impl DLetter {
    pub fn other(self) -> DLetter {
        match self {
            DLetter::A => DLetter::B,
            DLetter::B => DLetter::A,
        }
    }

    fn char(self) -> char {
        match self {
            DLetter::A => 'a',
            DLetter::B => 'b',
        }
    }
}

/// An element of `D∞` in normal form: an alternating string of `a` and `b`,
/// determined by its first letter and its length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WordRepr", into = "WordRepr")]
pub struct DihedralWord {
    start: Option<DLetter>,
    len: usize,
}

#[derive(Serialize, Deserialize)]
struct WordRepr {
    letters: String,
}

impl TryFrom<WordRepr> for DihedralWord {
    type Error = Error;

    fn try_from(r: WordRepr) -> Result<Self> {
        DihedralWord::parse(&r.letters)
    }
}

impl From<DihedralWord> for WordRepr {
    fn from(w: DihedralWord) -> Self {
        WordRepr { letters: w.letters_string() }
    }
}

impl DihedralWord {
    pub const IDENTITY: DihedralWord = DihedralWord { start: None, len: 0 };
    pub const A: DihedralWord = DihedralWord { start: Some(DLetter::A), len: 1 };
    pub const B: DihedralWord = DihedralWord { start: Some(DLetter::B), len: 1 };

    /// The alternating word of the given length starting with `start`.
    pub fn alternating(start: DLetter, len: usize) -> Self {
        if len == 0 {
            Self::IDENTITY
        } else {
            Self { start: Some(start), len }
        }
    }

    /// Cancels adjacent `aa` and `bb` pairs.
    pub fn normalize(raw: &[DLetter]) -> Self {
        let mut stack: Vec<DLetter> = Vec::with_capacity(raw.len());
        for &l in raw {
            if stack.last() == Some(&l) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        match stack.first() {
            None => Self::IDENTITY,
            Some(&s) => Self::alternating(s, stack.len()),
        }
    }

    /// Parses a string over `{a, b}`. Inverse marks `^-1` are dropped since
    /// both generators are involutions; `1`, `ε` or the empty string denote
    /// the identity.
    pub fn parse(input: &str) -> Result<Self> {
        let trimmed = input.trim();
        if trimmed.is_empty() || trimmed == "1" || trimmed == "ε" {
            return Ok(Self::IDENTITY);
        }
        let cleaned = trimmed.replace("^-1", "");
        let mut raw = Vec::with_capacity(cleaned.len());
        for c in cleaned.chars() {
            match c {
                'a' => raw.push(DLetter::A),
                'b' => raw.push(DLetter::B),
                '*' | ' ' => {}
                other => {
                    return Err(Error::WordSyntax {
                        input: input.to_string(),
                        reason: format!("unexpected character {other:?}; expected a or b"),
                    })
                }
            }
        }
        Ok(Self::normalize(&raw))
    }

    /// The `index`-th normal-form word in the order `ε, a, b, ab, ba, aba, ...`.
    pub fn nth(index: usize) -> Self {
        if index == 0 {
            return Self::IDENTITY;
        }
        let start = if index % 2 == 1 { DLetter::A } else { DLetter::B };
        Self::alternating(start, index.div_ceil(2))
    }

    /// Position of this word in the order used by [`DihedralWord::nth`].
    pub fn index(&self) -> usize {
        match self.start {
            None => 0,
            Some(DLetter::A) => 2 * self.len - 1,
            Some(DLetter::B) => 2 * self.len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_identity(&self) -> bool {
        self.len == 0
    }

    pub fn first(&self) -> Option<DLetter> {
        self.start
    }

    pub fn last(&self) -> Option<DLetter> {
        self.start.map(|s| if self.len % 2 == 1 { s } else { s.other() })
    }

    pub fn letters(&self) -> Vec<DLetter> {
        let mut out = Vec::with_capacity(self.len);
        if let Some(mut l) = self.start {
            for _ in 0..self.len {
                out.push(l);
                l = l.other();
            }
        }
        out
    }

    pub fn letters_string(&self) -> String {
        self.letters().into_iter().map(DLetter::char).collect()
    }

    pub fn mul(&self, other: &DihedralWord) -> Self {
        let mut raw = self.letters();
        raw.extend(other.letters());
        Self::normalize(&raw)
    }

    /// The inverse is the reversed string.
    pub fn inverse(&self) -> Self {
        match self.last() {
            None => Self::IDENTITY,
            Some(l) => Self::alternating(l, self.len),
        }
    }

    /// Applies the automorphism exchanging `a` and `b`.
    pub fn swap_letters(&self) -> Self {
        Self { start: self.start.map(DLetter::other), len: self.len }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// The word with `a` replaced by `vars[0]` and `b` by `vars[1]`.
    pub fn to_term(&self, vars: &[String]) -> Term {
        self.letters()
            .into_iter()
            .map(|l| Term::var(vars[if l == DLetter::A { 0 } else { 1 }].clone()))
            .reduce(Term::op)
            .unwrap_or(Term::Unit)
    }

    /// The element in the `ℤ ⋊ ℤ/2` representation.
    pub fn to_element(&self) -> DihedralElement {
        self.letters().into_iter().fold(DihedralElement::IDENTITY, |acc, l| {
            acc.mul(match l {
                DLetter::A => DihedralElement::A,
                DLetter::B => DihedralElement::B,
            })
        })
    }
}

impl fmt::Display for DihedralWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            write!(f, "ε")
        } else {
            write!(f, "{}", self.letters_string())
        }
    }
}

/// `D∞` as `ℤ ⋊ ℤ/2`: `(t₁, f₁)(t₂, f₂) = (t₁ + (−1)^{f₁} t₂, f₁ xor f₂)`,
/// with `a = (0, flip)` and `b = (1, flip)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DihedralElement {
    pub translation: i64,
    pub flip: bool,
}

impl DihedralElement {
    pub const IDENTITY: DihedralElement = DihedralElement { translation: 0, flip: false };
    pub const A: DihedralElement = DihedralElement { translation: 0, flip: true };
    pub const B: DihedralElement = DihedralElement { translation: 1, flip: true };

    pub fn mul(self, other: DihedralElement) -> DihedralElement {
        let t = if self.flip { self.translation - other.translation } else { self.translation + other.translation };
        DihedralElement { translation: t, flip: self.flip ^ other.flip }
    }

    pub fn inverse(self) -> DihedralElement {
        if self.flip {
            self
        } else {
            DihedralElement { translation: -self.translation, flip: false }
        }
    }

    pub fn is_identity(self) -> bool {
        self == Self::IDENTITY
    }

    /// The normal-form word of this element.
    pub fn to_word(self) -> DihedralWord {
        let t = self.translation;
        let n = t.unsigned_abs() as usize;
        match (self.flip, t) {
            (false, t) if t <= 0 => DihedralWord::alternating(DLetter::A, 2 * n),
            (false, _) => DihedralWord::alternating(DLetter::B, 2 * n),
            (true, t) if t <= 0 => DihedralWord::alternating(DLetter::A, 2 * n + 1),
            (true, _) => DihedralWord::alternating(DLetter::B, 2 * n - 1),
        }
    }
}

/// Image of a rank-2 free word under `x0 ↦ a`, `x1 ↦ b`.
pub fn evaluate_free_word(w: &FreeWord) -> DihedralElement {
    w.letters().iter().fold(DihedralElement::IDENTITY, |acc, l| {
        acc.mul(if l.generator == 0 { DihedralElement::A } else { DihedralElement::B })
    })
}

/// Terminal case reached by the shortening procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseCase {
    /// One component is trivial.
    TrivialComponent,
    /// Both components are reflections of odd length other than `(a, b)`.
    Reflections,
    /// The pair is `(a, b)` up to order and the letter swap.
    Standard,
}

/// The shortening run for a pair: every intermediate pair (in the original
/// letters) and the base case reached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenoisRun {
    pub generating: bool,
    pub base_case: BaseCase,
    pub steps: Vec<(DihedralWord, DihedralWord)>,
}

/// Decides whether `(w1, w2)` generates `D∞` by repeatedly replacing the
/// pair with a strictly shorter Nielsen-equivalent pair until a base case.
pub fn benois(w1: &DihedralWord, w2: &DihedralWord) -> BenoisRun {
    let mut steps = vec![(*w1, *w2)];
    let (mut u, mut v) = (*w1, *w2);
    loop {
        if u.is_identity() || v.is_identity() {
            return BenoisRun { generating: false, base_case: BaseCase::TrivialComponent, steps };
        }
        // Longer word first; ties put the word starting with `a` first.
        if v.len > u.len || (v.len == u.len && v.start < u.start) {
            std::mem::swap(&mut u, &mut v);
        }
        let swapped = u.first() == Some(DLetter::B);
        if swapped {
            u = u.swap_letters();
            v = v.swap_letters();
        }
        if u == DihedralWord::A && v == DihedralWord::B {
            return BenoisRun { generating: true, base_case: BaseCase::Standard, steps };
        }
        if u.last() == Some(DLetter::A) && v.first() == Some(DLetter::B) && v.last() == Some(DLetter::B) {
            return BenoisRun { generating: false, base_case: BaseCase::Reflections, steps };
        }
        let before = u.len + v.len;
        u = if v.first() == Some(DLetter::A) {
            // v is a prefix of u.
            v.inverse().mul(&u)
        } else if u.last() == Some(DLetter::B) {
            u.mul(&v)
        } else {
            // u ends in a and v starts with b, so v ends in a.
            v.mul(&u)
        };
        assert!(u.len + v.len < before, "shortening step must reduce total length");
        if swapped {
            u = u.swap_letters();
            v = v.swap_letters();
        }
        steps.push((u, v));
    }
}

pub fn is_generating_pair(w1: &DihedralWord, w2: &DihedralWord) -> bool {
    benois(w1, w2).generating
}

/// Whether the pair lies in the automorphism orbit of `(a, b)`: the only
/// generating pairs of involutions are `(a, b)` and `(b, a)`.
pub fn is_primitive_pair(w1: &DihedralWord, w2: &DihedralWord) -> bool {
    matches!((*w1, *w2), (DihedralWord::A, DihedralWord::B) | (DihedralWord::B, DihedralWord::A))
}

/// The `k`-th pair of natural numbers in square-shell order:
/// `(0,0), (0,1), (1,0), (1,1), (0,2), (1,2), (2,0), (2,1), (2,2), ...`.
fn shell_pair(k: usize) -> (usize, usize) {
    let r = k.isqrt();
    let offset = k - r * r;
    if offset < r {
        (offset, r)
    } else {
        (r, offset - r)
    }
}

fn shell_position(i: usize, j: usize) -> usize {
    let r = i.max(j);
    if i < r {
        r * r + i
    } else {
        r * r + r + j
    }
}

/// The `index`-th imprimitive pair of words, enumerating pairs of word
/// indices (see [`DihedralWord::nth`]) in square-shell order.
pub fn nth_imprimitive_pair(index: usize) -> (DihedralWord, DihedralWord) {
    let mut primitive = [
        shell_position(DihedralWord::A.index(), DihedralWord::B.index()),
        shell_position(DihedralWord::B.index(), DihedralWord::A.index()),
    ];
    primitive.sort_unstable();
    let mut k = index;
    for p in primitive {
        if k >= p {
            k += 1;
        }
    }
    let (i, j) = shell_pair(k);
    (DihedralWord::nth(i), DihedralWord::nth(j))
}

fn names(prefix: &str) -> Vec<String> {
    vec![format!("{prefix}1"), format!("{prefix}2")]
}

/// Every triple lies in the subgroup generated by a pair of involutions.
pub fn sigma2() -> Formula {
    let xs = names("x");
    let zs = vec!["z1".to_string(), "z2".to_string(), "z3".to_string()];
    let mut parts: Vec<Formula> = xs
        .iter()
        .map(|x| Formula::eq(Term::op(Term::var(x.clone()), Term::var(x.clone())), Term::Unit))
        .collect();
    parts.extend(zs.iter().map(|z| Formula::family_or(FamilyGen::WordSpan { xs: xs.clone(), y: z.clone() })));
    Formula::forall(zs, Formula::exists(xs, Formula::and(parts)))
}

/// Some pair satisfies exactly the relations of `(a, b)` and is the image
/// of no pair of involutions under an imprimitive pair of words.
pub fn sigma3() -> Formula {
    let xs = names("x");
    let ys = names("y");
    let mut disjuncts: Vec<Formula> = ys
        .iter()
        .map(|y| Formula::neq(Term::op(Term::var(y.clone()), Term::var(y.clone())), Term::Unit))
        .collect();
    disjuncts.push(Formula::family_and(FamilyGen::ImprimitivePairs { xs: xs.clone(), ys: ys.clone() }));
    Formula::exists(
        xs.clone(),
        Formula::and(vec![
            Formula::family_and(FamilyGen::DihedralRelations { xs }),
            Formula::forall(ys, Formula::or(disjuncts)),
        ]),
    )
}

/// The d-Σ₂ Scott sentence: group axioms, [`sigma2`] and [`sigma3`].
pub fn scott_sentence() -> Formula {
    Formula::and(vec![group_axioms(), sigma2(), sigma3()])
}

/// The general Σ₃ Scott sentence for a finitely generated group,
/// instantiated at `D∞` with generating pair `(a, b)`.
pub fn scott_sentence_sigma3() -> Formula {
    let xs = names("x");
    Formula::and(vec![
        group_axioms(),
        Formula::exists(
            xs.clone(),
            Formula::and(vec![
                Formula::family_and(FamilyGen::DihedralRelations { xs: xs.clone() }),
                Formula::forall(
                    vec!["y".into()],
                    Formula::family_or(FamilyGen::WordSpan { xs, y: "y".into() }),
                ),
            ]),
        ),
    ])
}

/// The imprimitive-pair family used in [`sigma3`].
pub fn imprimitive_family() -> Family {
    Family::new(FamilyGen::ImprimitivePairs { xs: names("x"), ys: names("y") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{classify, Complexity};

    fn w(s: &str) -> DihedralWord {
        DihedralWord::parse(s).unwrap()
    }

    #[test]
    fn normal_forms() {
        assert_eq!(w("aab"), w("b"));
        assert_eq!(w(""), DihedralWord::IDENTITY);
        assert_eq!(w("baaba"), w("a"));
        assert_eq!(w("a^-1 b"), w("ab"));
        assert!(DihedralWord::parse("abc").is_err());
        assert_eq!(w("abab").letters_string(), "abab");
        assert_eq!(w("aba").inverse(), w("aba"));
        assert_eq!(w("ab").inverse(), w("ba"));
    }

    #[test]
    fn word_order() {
        let first: Vec<String> = (0..6).map(|i| DihedralWord::nth(i).to_string()).collect();
        assert_eq!(first, vec!["ε", "a", "b", "ab", "ba", "aba"]);
        for i in 0..50 {
            assert_eq!(DihedralWord::nth(i).index(), i);
        }
    }

    #[test]
    fn element_round_trip() {
        for i in 0..40 {
            let word = DihedralWord::nth(i);
            assert_eq!(word.to_element().to_word(), word);
        }
    }

    #[test]
    fn generating_pairs() {
        assert!(is_generating_pair(&w("a"), &w("b")));
        assert!(!is_generating_pair(&w("aba"), &w("bab")));
        assert!(is_generating_pair(&w("ab"), &w("b")));
        assert!(!is_generating_pair(&w("ab"), &w("ba")));
        assert!(!is_generating_pair(&w("aba"), &w("")));
        assert!(is_generating_pair(&w("b"), &w("a")));
        assert!(!is_generating_pair(&w("abab"), &w("ababa")));
        assert!(is_generating_pair(&w("ababa"), &w("ab")));
    }

    #[test]
    fn run_records_strictly_shorter_steps() {
        let run = benois(&w("ababa"), &w("ab"));
        assert!(run.steps.len() > 1);
        assert!(run.generating);
        for pair in run.steps.windows(2) {
            assert!(pair[1].0.len() + pair[1].1.len() < pair[0].0.len() + pair[0].1.len());
        }
    }

    #[test]
    fn primitive_pairs() {
        assert!(is_primitive_pair(&w("b"), &w("a")));
        assert!(!is_primitive_pair(&w("ab"), &w("b")));
        assert!(!is_primitive_pair(&w("aba"), &w("")));
    }

    #[test]
    fn imprimitive_family_window() {
        let window: Vec<(DihedralWord, DihedralWord)> =
            (0..398).map(nth_imprimitive_pair).collect();
        assert!(window.iter().all(|(a, b)| a.index() < 20 && b.index() < 20));
        assert!(window.contains(&(w("aba"), w("bab"))));
        assert!(!window.contains(&(w("a"), w("b"))));
        assert!(!window.contains(&(w("b"), w("a"))));
        assert_eq!(nth_imprimitive_pair(398).0.index().max(nth_imprimitive_pair(398).1.index()), 20);
    }

    #[test]
    fn sentence_classes() {
        assert_eq!(classify(&scott_sentence()), Complexity::dsigma(2));
        assert_eq!(classify(&sigma2()), Complexity::pi(2));
        assert_eq!(classify(&sigma3()), Complexity::sigma(2));
        assert_eq!(classify(&scott_sentence_sigma3()), Complexity::sigma(3));
    }
}
