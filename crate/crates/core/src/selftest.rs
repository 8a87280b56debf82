//! Acceptance checks against oracles that share no code with the
//! implementations they check.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dihedral::{self, DihedralWord};
use crate::fgab::{self, abelian_groups_of_order, FgAbelianDesc};
use crate::formula::{classify, evaluate_exact, Complexity, FiniteStructure};
use crate::limitsim::{run_abelian, run_cofinality, run_dihedral, run_rank1, ConstructionTrace, Rank1Target, Step};
use crate::rank1::{self, Bound, DefaultRule, Exp, PrimeClass, Rank1Char, Row};
use crate::words::{is_primitive, FreeWord, Letter, WordTuple};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn result(id: u8, name: &'static str, failures: Vec<String>, summary: String) -> CriterionResult {
    let passed = failures.is_empty();
    let detail = if passed { summary } else { format!("{summary}; first failures: {}", failures[..failures.len().min(3)].join(" | ")) };
    CriterionResult { id, name, passed, detail }
}

/// Runs every acceptance criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        primitivity_oracle(),
        benois_oracle(),
        finite_scott_sentences(),
        classifier_conformance(),
        rank1_table(),
        construction_sweep(),
        derived_separation(),
    ]
}

// ---- free-group words as signed generator codes: ±1 for x0, ±2 for x1 ----

type Raw = Vec<i8>;

fn raw_mul(u: &[i8], v: &[i8]) -> Raw {
    let mut out = u.to_vec();
    for &l in v {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn raw_inv(u: &[i8]) -> Raw {
    u.iter().rev().map(|l| -l).collect()
}

fn raw_words(max_len: usize) -> Vec<Raw> {
    let mut all = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in [1i8, -1, 2, -2] {
                if w.last() != Some(&-l) {
                    let mut x: Raw = w.clone();
                    x.push(l);
                    next.push(x);
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

/// Pairs reachable from `(x0, x1)` by elementary moves through pairs of
/// total length at most `limit`.
fn primitive_closure(limit: usize) -> HashSet<(Raw, Raw)> {
    let start = (vec![1i8], vec![2i8]);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((u, v)) = queue.pop_front() {
        let next = [
            (v.clone(), u.clone()),
            (raw_inv(&u), v.clone()),
            (u.clone(), raw_inv(&v)),
            (raw_mul(&u, &v), v.clone()),
            (u.clone(), raw_mul(&v, &u)),
        ];
        for pair in next {
            if pair.0.len() + pair.1.len() <= limit && seen.insert(pair.clone()) {
                queue.push_back(pair);
            }
        }
    }
    seen
}

fn to_free_word(w: &[i8]) -> FreeWord {
    let letters: Vec<Letter> = w.iter().map(|&l| Letter::new(l.unsigned_abs() as usize - 1, l.signum())).collect();
    FreeWord::reduce(&letters, 2).expect("rank-2 letters")
}

/// Criterion 1: primitivity agrees with the move-graph closure on all
/// pairs in `F₂` of total length at most 8.
pub fn primitivity_oracle() -> CriterionResult {
    let closure = primitive_closure(10);
    let words = raw_words(8);
    let mut failures = Vec::new();
    let mut cases = 0;
    for u in &words {
        for v in words.iter().filter(|v| u.len() + v.len() <= 8) {
            cases += 1;
            let expected = closure.contains(&(u.clone(), v.clone()));
            let t = WordTuple::new(2, vec![to_free_word(u), to_free_word(v)]).expect("rank-2 pair");
            match is_primitive(&t) {
                Ok(got) if got == expected => {}
                other => failures.push(format!("{u:?},{v:?}: expected {expected}, got {other:?}")),
            }
        }
    }
    result(1, "primitivity oracle equivalence", failures, format!("{cases} pairs agree"))
}

// ---- D∞ as pairs (translation, flip) computed directly from letters ----

fn oracle_element(letters: &str) -> (i64, bool) {
    letters.chars().fold((0, false), |(t, f), c| {
        let (lt, lf) = if c == 'a' { (0, true) } else { (1, true) };
        (if f { t - lt } else { t + lt }, f ^ lf)
    })
}

/// Two elements generate `D∞` iff one is a reflection and the rotation
/// subgroup they generate is all of `ℤ`.
fn oracle_generates(x: (i64, bool), y: (i64, bool)) -> bool {
    match (x.1, y.1) {
        (false, false) => false,
        (true, false) => y.0.abs() == 1,
        (false, true) => x.0.abs() == 1,
        (true, true) => (x.0 - y.0).abs() == 1,
    }
}

/// Criterion 2: the shortening algorithm agrees with the closure rule on
/// all pairs of words of length at most 10, and only `(a, b)` and `(b, a)`
/// are primitive.
pub fn benois_oracle() -> CriterionResult {
    let words: Vec<DihedralWord> = (0..21).map(DihedralWord::nth).collect();
    let mut failures = Vec::new();
    let mut primitive = Vec::new();
    for u in &words {
        for v in &words {
            let expected = oracle_generates(oracle_element(&u.letters_string()), oracle_element(&v.letters_string()));
            if dihedral::is_generating_pair(u, v) != expected {
                failures.push(format!("({}, {}): expected {expected}", u.letters_string(), v.letters_string()));
            }
            if dihedral::is_primitive_pair(u, v) {
                primitive.push(format!("({},{})", u.letters_string(), v.letters_string()));
            }
        }
    }
    primitive.sort();
    if primitive != ["(a,b)", "(b,a)"] {
        failures.push(format!("primitive pairs {primitive:?}"));
    }
    result(2, "D∞ generating-pair oracle equivalence", failures, format!("{} pairs agree", words.len() * words.len()))
}

/// Brute-force isomorphism of two group tables by backtracking over
/// bijections that respect every product between assigned elements.
pub fn tables_isomorphic(s: &FiniteStructure, t: &FiniteStructure) -> bool {
    let n = s.order();
    if n != t.order() {
        return false;
    }
    fn extend(s: &FiniteStructure, t: &FiniteStructure, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = map.len();
        if i == s.order() {
            return true;
        }
        for j in 0..t.order() {
            if used[j] {
                continue;
            }
            map.push(j);
            let consistent = (0..=i).all(|a| {
                [(a, i), (i, a)].iter().all(|&(x, y)| {
                    let xy = s.op(x, y);
                    xy > i || t.op(map[x], map[y]) == map[xy]
                })
            });
            if consistent {
                used[j] = true;
                if extend(s, t, map, used) {
                    return true;
                }
                used[j] = false;
            }
            map.pop();
        }
        false
    }
    extend(s, t, &mut Vec::new(), &mut vec![false; n])
}

/// Criterion 3: the finite Scott sentence of each abelian group of order
/// at most 12 holds exactly in the tables isomorphic to it.
pub fn finite_scott_sentences() -> CriterionResult {
    let tables: Vec<(String, fgab::FiniteGroupTable)> = (1..=12)
        .flat_map(abelian_groups_of_order)
        .map(|d| (d.to_string(), d.torsion_table()))
        .collect();
    let mut failures = Vec::new();
    for (name, t) in &tables {
        let sentence = fgab::scott_sentence_finite(t);
        for (other_name, other) in &tables {
            let expected = tables_isomorphic(t.structure(), other.structure());
            match evaluate_exact(&sentence, other.structure(), 1) {
                Ok(e) if e.exact && e.truth == expected => {}
                got => failures.push(format!("{name} on {other_name}: expected {expected}, got {got:?}")),
            }
        }
    }
    let n = tables.len();
    result(3, "finite Scott sentences", failures, format!("{n} classes, {} evaluations", n * n))
}

/// Criterion 4: stated complexity classes of the sentence builders.
pub fn classifier_conformance() -> CriterionResult {
    let linear = Rank1Char::with_default(DefaultRule::Linear { a: 1, b: 0 }).expect("valid rule");
    let z_plus_z2 = FgAbelianDesc::new(1, vec![2]).expect("valid description");
    let z2 = FgAbelianDesc::new(2, vec![]).expect("valid description");
    let cases: Vec<(&str, crate::formula::Formula, Complexity)> = vec![
        ("f.g. group Σ3", fgab::scott_sentence_sigma3(&z2), Complexity::sigma(3)),
        ("rank-1 Σ3", rank1::scott_sentence_sigma3(&linear), Complexity::sigma(3)),
        ("Z^2", fgab::scott_sentence_zn(2).expect("n ≥ 1"), Complexity::dsigma(2)),
        ("Z ⊕ Z/2", fgab::scott_sentence_fg_abelian(&z_plus_z2).expect("valid"), Complexity::dsigma(2)),
        ("D∞", dihedral::scott_sentence(), Complexity::dsigma(2)),
        ("Q", Rank1Char::rationals().scott_sentence(), Complexity::pi(2)),
    ];
    let failures = cases
        .iter()
        .filter_map(|(name, f, want)| {
            let got = classify(f);
            (got != *want).then(|| format!("{name}: {got}, expected {want}"))
        })
        .collect();
    result(4, "classifier conformance", failures, format!("{} sentences", cases.len()))
}

fn periodic(pattern: &[Exp]) -> Rank1Char {
    Rank1Char::with_default(DefaultRule::Periodic(pattern.to_vec())).expect("valid pattern")
}

/// Criterion 5: the rank-1 summary table, one characteristic per row plus
/// `ℤ` and `ℚ`.
pub fn rank1_table() -> CriterionResult {
    use Bound::{DSigma2 as D, Pi2 as P, Sigma3 as S};
    use Exp::{Finite as F, Infinite as I};
    let cases: Vec<(Rank1Char, Row, Bound, Bound)> = vec![
        (Rank1Char::new([(2, I)].into(), DefaultRule::Zero).expect("valid"), Row::Case(1), D, D),
        (Rank1Char::with_default(DefaultRule::Linear { a: 1, b: 0 }).expect("valid"), Row::Case(2), S, S),
        (Rank1Char::new([(3, F(2)), (5, F(0))].into(), DefaultRule::Infinity).expect("valid"), Row::Case(3), D, D),
        (periodic(&[F(1), I]), Row::Case(4), D, S),
        (periodic(&[F(0), I]), Row::Case(5), D, S),
        (periodic(&[F(0), F(1)]), Row::Case(6), S, S),
        (periodic(&[F(0), F(1), I]), Row::Case(7), D, S),
        (Rank1Char::integers(), Row::All0, D, D),
        (Rank1Char::rationals(), Row::AllInf, P, P),
    ];
    let failures = cases
        .iter()
        .filter_map(|(c, row, lower, upper)| {
            let got = c.classify();
            (got.tag.row != *row || got.lower != *lower || got.upper != *upper)
                .then(|| format!("expected {row:?} {lower:?}..{upper:?}, got {:?} {:?}..{:?}", got.tag.row, got.lower, got.upper))
        })
        .collect();
    result(5, "rank-1 table reproduction", failures, format!("{} rows", cases.len()))
}

/// Traces for the exhaustive sweep: every length-≤12 trace in which one
/// guess varies freely and the other is constant, plus every trace of
/// length ≤ 5.
pub fn sweep_traces() -> Vec<ConstructionTrace> {
    let mut set: BTreeSet<Vec<(bool, bool)>> = BTreeSet::new();
    for len in 1..=12usize {
        for bits in 0u32..(1 << len) {
            let b = |i: usize| bits >> i & 1 == 1;
            for fixed in [false, true] {
                set.insert((0..len).map(|i| (b(i), fixed)).collect());
                set.insert((0..len).map(|i| (fixed, b(i))).collect());
            }
        }
    }
    for len in 1..=5usize {
        for bits in 0u32..(1 << (2 * len)) {
            set.insert((0..len).map(|i| (bits >> (2 * i) & 1 == 1, bits >> (2 * i + 1) & 1 == 1)).collect());
        }
    }
    set.into_iter().map(|t| ConstructionTrace::from_bits(&t).expect("nonempty")).collect()
}

fn sweep_one(t: &ConstructionTrace, c: &Rank1Char) -> Vec<String> {
    let mut failures = Vec::new();
    let level = t.last().level();
    for k in [2, 3] {
        match run_abelian(k, t, 2) {
            Ok(run) if run.verification.passed && run.final_rank == k - 1 + level => {}
            Ok(run) => failures.push(format!("abelian k={k} {t:?}: {:?}", run.verification.failures())),
            Err(e) => failures.push(format!("abelian k={k} {t:?}: {e}")),
        }
    }
    let expected = [Rank1Target::H, Rank1Target::G, Rank1Target::K][level];
    match run_rank1(c, 3, 2, t, 2) {
        Ok(run) if run.verification.passed && run.final_tag == expected => {}
        Ok(run) => failures.push(format!("rank1 {t:?}: {:?}", run.verification.failures())),
        Err(e) => failures.push(format!("rank1 {t:?}: {e}")),
    }
    failures
}

/// Criterion 6: construction soundness over the exhaustive sweep, and the
/// dihedral and cofinality runs on a seeded random sample.
pub fn construction_sweep() -> CriterionResult {
    let traces = sweep_traces();
    let c = Rank1Char::new([(2, Exp::Infinite)].into(), DefaultRule::Zero).expect("valid");
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let chunk = traces.len().div_ceil(threads);
    let mut failures: Vec<String> = std::thread::scope(|scope| {
        let handles: Vec<_> = traces
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().flat_map(|t| sweep_one(t, &c)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    });

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let ones = periodic(&[Exp::Finite(1)]);
    for _ in 0..200 {
        let len = rng.gen_range(1..=12);
        let steps: Vec<Step> = (0..len).map(|_| Step::new(rng.gen(), rng.gen())).collect();
        let t = ConstructionTrace::new(steps).expect("nonempty");
        match run_dihedral(&t, rng.gen_range(0..=3)) {
            Ok(run) if run.verification.passed => {}
            other => failures.push(format!("dihedral {t:?}: {other:?}")),
        }
        let m = rng.gen_range(1..=12);
        let w: BTreeSet<usize> = (0..m).filter(|_| rng.gen()).collect();
        match run_cofinality(&ones, m, &w, 60) {
            Ok(run) if run.verification.passed => {}
            other => failures.push(format!("cofinality m={m} {w:?}: {other:?}")),
        }
    }
    result(6, "construction soundness sweep", failures, format!("{} traces × 3 runs, 200 random dihedral and cofinality runs", traces.len()))
}

/// A random characteristic with some prime of finite exponent and some
/// prime of infinite exponent among the first 30 primes.
fn sample_char(rng: &mut ChaCha8Rng) -> (Rank1Char, u64, u64) {
    loop {
        let pick = |rng: &mut ChaCha8Rng| match rng.gen_range(0..3) {
            0 => Exp::Finite(0),
            1 => Exp::Finite(rng.gen_range(1..4)),
            _ => Exp::Infinite,
        };
        let default = match rng.gen_range(0..4) {
            0 => DefaultRule::Zero,
            1 => DefaultRule::Infinity,
            2 => DefaultRule::Linear { a: rng.gen_range(0..3), b: rng.gen_range(0..3) },
            _ => DefaultRule::Periodic((0..rng.gen_range(1..4)).map(|_| pick(rng)).collect()),
        };
        let exceptions = (0..rng.gen_range(0..4)).map(|_| (crate::arith::nth_prime(rng.gen_range(0..10)), pick(rng))).collect();
        let Ok(c) = Rank1Char::new(exceptions, default) else { continue };
        let primes: Vec<u64> = (0..30).map(crate::arith::nth_prime).collect();
        let p = primes.iter().copied().find(|&p| c.class_of(p).is_ok_and(|k| k != PrimeClass::Infinite));
        let q = primes.iter().copied().find(|&q| c.class_of(q) == Ok(PrimeClass::Infinite));
        if let (Some(p), Some(q)) = (p, q) {
            return (c, p, q);
        }
    }
}

/// Criterion 7: the three targets of the rank-1 construction are pairwise
/// non-isomorphic for 10 sampled characteristics.
pub fn derived_separation() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let mut checks = 0;
    for _ in 0..10 {
        let (g, p, q) = sample_char(&mut rng);
        let (Ok(h), Ok(k)) = (g.extend_infinite_at(p), g.kill_prime_at(q)) else {
            failures.push(format!("{g:?}: derived structures failed"));
            continue;
        };
        for (a, b, label) in [(&h, &g, "H≅G"), (&g, &k, "G≅K"), (&k, &h, "K≅H")] {
            checks += 1;
            if a.is_isomorphic(b) {
                failures.push(format!("{label} for {g:?} with p={p}, q={q}"));
            }
        }
    }
    result(7, "derived-structure separation", failures, format!("{checks} pairwise checks"))
}
