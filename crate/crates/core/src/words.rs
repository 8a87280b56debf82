//! Free-group words, elementary Nielsen transformations, Nielsen reduction
//! and the primitivity test for n-tuples in the free group of rank n.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    /// `+1` or `-1`.
    pub exponent: i8,
}

impl Letter {
    pub fn new(generator: usize, exponent: i8) -> Self {
        debug_assert!(exponent == 1 || exponent == -1);
        Self { generator, exponent }
    }

    pub fn inverse(self) -> Self {
        Self { generator: self.generator, exponent: -self.exponent }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.exponent == -other.exponent
    }
}

/// A freely reduced word over generators `0..rank`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "WordRepr", into = "WordRepr")]
pub struct FreeWord {
    rank: usize,
    letters: Vec<Letter>,
}

#[derive(Serialize, Deserialize)]
struct WordRepr {
    rank: usize,
    letters: Vec<(usize, i8)>,
}

impl TryFrom<WordRepr> for FreeWord {
    type Error = Error;

    fn try_from(repr: WordRepr) -> Result<Self> {
        let mut letters = Vec::with_capacity(repr.letters.len());
        for (generator, exponent) in repr.letters {
            if exponent != 1 && exponent != -1 {
                return Err(Error::WordSyntax {
                    input: format!("[{generator},{exponent}]"),
                    reason: "exponent must be 1 or -1".into(),
                });
            }
            letters.push(Letter::new(generator, exponent));
        }
        FreeWord::reduce(&letters, repr.rank)
    }
}

impl From<FreeWord> for WordRepr {
    fn from(w: FreeWord) -> Self {
        WordRepr {
            rank: w.rank,
            letters: w.letters.iter().map(|l| (l.generator, l.exponent)).collect(),
        }
    }
}

impl FreeWord {
    /// Freely reduces a raw letter sequence.
    pub fn reduce(letters: &[Letter], rank: usize) -> Result<Self> {
        let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
        for &l in letters {
            if l.generator >= rank {
                return Err(Error::GeneratorOutOfRange { index: l.generator, rank });
            }
            if out.last().is_some_and(|&last| last.cancels(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(Self { rank, letters: out })
    }

    pub fn identity(rank: usize) -> Self {
        Self { rank, letters: Vec::new() }
    }

    pub fn generator(rank: usize, index: usize) -> Result<Self> {
        Self::reduce(&[Letter::new(index, 1)], rank)
    }

    /// The `index`-th reduced word of the given rank in shortlex order, with
    /// letters ordered `x0, x0^-1, x1, x1^-1, ...`. Index 0 is the empty word.
    pub fn nth(rank: usize, index: usize) -> Self {
        assert!(rank > 0 || index == 0, "rank 0 has only the empty word");
        let alphabet = 2 * rank;
        let letter = |code: usize| Letter::new(code / 2, if code % 2 == 0 { 1 } else { -1 });
        let mut remaining = index;
        let mut len = 0;
        loop {
            let count = if len == 0 { 1 } else { alphabet * (alphabet - 1).pow(len as u32 - 1) };
            if remaining < count {
                break;
            }
            remaining -= count;
            len += 1;
        }
        // Mixed radix: the first letter has `alphabet` choices, later ones
        // `alphabet - 1` (every letter except the inverse of its predecessor).
        let mut digits = vec![0; len];
        for (pos, d) in digits.iter_mut().enumerate().rev() {
            let radix = if pos == 0 { alphabet } else { alphabet - 1 };
            *d = remaining % radix;
            remaining /= radix;
        }
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        for (pos, d) in digits.into_iter().enumerate() {
            let code = match letters.last() {
                None => d,
                Some(prev) => {
                    let banned = prev.generator * 2 + usize::from(prev.exponent > 0);
                    if d >= banned {
                        d + 1
                    } else {
                        d
                    }
                }
            };
            debug_assert!(pos == 0 || code < alphabet);
            letters.push(letter(code));
        }
        Self { rank, letters }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Product `self * other`. Both words must share a rank.
    pub fn mul(&self, other: &FreeWord) -> Self {
        debug_assert_eq!(self.rank, other.rank);
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last().is_some_and(|&last| last.cancels(l)) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Self { rank: self.rank, letters }
    }

    /// Exponent sum of each generator (image in the abelianization).
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank];
        for l in &self.letters {
            sums[l.generator] += l.exponent as i64;
        }
        sums
    }

    /// Parses the text syntax: generators `x0, x1, ...` (or `a, b, c` when
    /// rank <= 3), inverse suffix `^-1` (any nonzero integer exponent is
    /// accepted), optional `*` between factors, and `1` for the empty word.
    pub fn parse(input: &str, rank: usize) -> Result<Self> {
        let syntax = |reason: &str| Error::WordSyntax { input: input.to_string(), reason: reason.to_string() };
        let chars: Vec<char> = input.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(syntax("empty input (write 1 for the identity)"));
        }
        if chars == ['1'] || chars == ['ε'] {
            return Ok(Self::identity(rank));
        }
        let mut raw = Vec::new();
        let mut pos = 0;
        while pos < chars.len() {
            let c = chars[pos];
            let generator = match c {
                '*' => {
                    pos += 1;
                    continue;
                }
                'a' | 'b' | 'c' if rank <= 3 => {
                    pos += 1;
                    (c as u8 - b'a') as usize
                }
                'x' => {
                    pos += 1;
                    let start = pos;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if start == pos {
                        return Err(syntax("expected generator index after 'x'"));
                    }
                    let digits: String = chars[start..pos].iter().collect();
                    digits.parse().map_err(|_| syntax("generator index too large"))?
                }
                _ => return Err(syntax(&format!("unexpected character {c:?}"))),
            };
            let mut power: i64 = 1;
            if pos < chars.len() && chars[pos] == '^' {
                pos += 1;
                let start = pos;
                if pos < chars.len() && chars[pos] == '-' {
                    pos += 1;
                }
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    pos += 1;
                }
                let digits: String = chars[start..pos].iter().collect();
                power = digits.parse().map_err(|_| syntax("malformed exponent"))?;
                if power == 0 {
                    return Err(syntax("exponent must be nonzero"));
                }
            }
            let letter = Letter::new(generator, if power > 0 { 1 } else { -1 });
            for _ in 0..power.unsigned_abs() {
                raw.push(letter);
            }
        }
        Self::reduce(&raw, rank)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if self.rank <= 3 {
                write!(f, "{}", (b'a' + l.generator as u8) as char)?;
            } else {
                if k > 0 {
                    write!(f, "*")?;
                }
                write!(f, "x{}", l.generator)?;
            }
            if l.exponent < 0 {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// A tuple of words sharing one rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordTuple {
    rank: usize,
    words: Vec<FreeWord>,
}

impl WordTuple {
    pub fn new(rank: usize, words: Vec<FreeWord>) -> Result<Self> {
        if let Some(w) = words.iter().find(|w| w.rank != rank) {
            return Err(Error::MixedRank { expected: rank, found: w.rank });
        }
        if words.len() > rank {
            return Err(Error::ArityMismatch { arity: words.len(), rank });
        }
        Ok(Self { rank, words })
    }

    /// The basis `(x0, ..., x_{n-1})`.
    pub fn identity(rank: usize) -> Self {
        let words = (0..rank)
            .map(|i| FreeWord { rank, letters: vec![Letter::new(i, 1)] })
            .collect();
        Self { rank, words }
    }

    pub fn parse(rank: usize, words: &[&str]) -> Result<Self> {
        let words = words.iter().map(|w| FreeWord::parse(w, rank)).collect::<Result<Vec<_>>>()?;
        Self::new(rank, words)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn arity(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[FreeWord] {
        &self.words
    }

    pub fn total_length(&self) -> usize {
        self.words.iter().map(FreeWord::len).sum()
    }

    fn require_full(&self) -> Result<()> {
        if self.arity() != self.rank {
            return Err(Error::ArityMismatch { arity: self.arity(), rank: self.rank });
        }
        Ok(())
    }

    pub fn apply_move(&self, m: &NielsenMove) -> Result<Self> {
        self.require_full()?;
        m.validate(self.rank)?;
        let mut words = self.words.clone();
        match m {
            NielsenMove::Permute(perm) => {
                words = perm.iter().map(|&src| self.words[src].clone()).collect();
            }
            NielsenMove::Invert(i) => words[*i] = self.words[*i].inverse(),
            NielsenMove::RightMultiply(i, j) => words[*i] = self.words[*i].mul(&self.words[*j]),
        }
        Ok(Self { rank: self.rank, words })
    }

    pub fn apply_moves(&self, moves: &[NielsenMove]) -> Result<Self> {
        moves.iter().try_fold(self.clone(), |t, m| t.apply_move(m))
    }

    fn with_word(&self, i: usize, w: FreeWord) -> Self {
        let mut words = self.words.clone();
        words[i] = w;
        Self { rank: self.rank, words }
    }
}

impl fmt::Display for WordTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, w) in self.words.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

/// An elementary Nielsen transformation on an n-tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NielsenMove {
    /// Position `i` of the result receives component `perm[i]`.
    Permute(Vec<usize>),
    Invert(usize),
    /// Replace component `i` by `w_i * w_j`.
    RightMultiply(usize, usize),
}

impl NielsenMove {
    pub fn validate(&self, rank: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMove(msg));
        match self {
            NielsenMove::Permute(perm) => {
                let mut seen = vec![false; rank];
                if perm.len() != rank {
                    return bad(format!("permutation has length {} for rank {rank}", perm.len()));
                }
                for &p in perm {
                    if p >= rank || seen[p] {
                        return bad(format!("{perm:?} is not a permutation of 0..{rank}"));
                    }
                    seen[p] = true;
                }
            }
            NielsenMove::Invert(i) if *i >= rank => return bad(format!("index {i} >= rank {rank}")),
            NielsenMove::RightMultiply(i, j) => {
                if *i >= rank || *j >= rank {
                    return bad(format!("indices ({i}, {j}) out of range for rank {rank}"));
                }
                if i == j {
                    return bad("right multiplication needs distinct indices".into());
                }
            }
            NielsenMove::Invert(_) => {}
        }
        Ok(())
    }

    /// Elementary moves undoing `self`.
    pub fn inverse(&self) -> Vec<NielsenMove> {
        match self {
            NielsenMove::Permute(perm) => {
                let mut inv = vec![0; perm.len()];
                for (i, &p) in perm.iter().enumerate() {
                    inv[p] = i;
                }
                vec![NielsenMove::Permute(inv)]
            }
            NielsenMove::Invert(i) => vec![NielsenMove::Invert(*i)],
            NielsenMove::RightMultiply(i, j) => vec![
                NielsenMove::Invert(*j),
                NielsenMove::RightMultiply(*i, *j),
                NielsenMove::Invert(*j),
            ],
        }
    }
}

/// One of the four products `w_i w_j`, `w_i w_j^-1`, `w_j^-1 w_i`, `w_j w_i`
/// written as a short composition of elementary moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum ProductKind {
    Right,
    RightInverse,
    LeftInverse,
    Left,
}

const PRODUCT_KINDS: [ProductKind; 4] =
    [ProductKind::Right, ProductKind::RightInverse, ProductKind::LeftInverse, ProductKind::Left];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Product {
    kind: ProductKind,
    target: usize,
    other: usize,
}

impl Product {
    fn result(&self, t: &WordTuple) -> FreeWord {
        let wi = &t.words[self.target];
        let wj = &t.words[self.other];
        match self.kind {
            ProductKind::Right => wi.mul(wj),
            ProductKind::RightInverse => wi.mul(&wj.inverse()),
            ProductKind::LeftInverse => wj.inverse().mul(wi),
            ProductKind::Left => wj.mul(wi),
        }
    }

    fn apply(&self, t: &WordTuple) -> WordTuple {
        t.with_word(self.target, self.result(t))
    }

    fn elementary(&self) -> Vec<NielsenMove> {
        use NielsenMove::{Invert, RightMultiply};
        let (i, j) = (self.target, self.other);
        match self.kind {
            ProductKind::Right => vec![RightMultiply(i, j)],
            ProductKind::RightInverse => vec![Invert(j), RightMultiply(i, j), Invert(j)],
            ProductKind::LeftInverse => vec![Invert(i), RightMultiply(i, j), Invert(i)],
            ProductKind::Left => vec![Invert(i), Invert(j), RightMultiply(i, j), Invert(j), Invert(i)],
        }
    }
}

fn products(rank: usize) -> Vec<Product> {
    let mut out = Vec::new();
    for kind in PRODUCT_KINDS {
        for target in 0..rank {
            for other in 0..rank {
                if target != other {
                    out.push(Product { kind, target, other });
                }
            }
        }
    }
    out
}

fn length_change(p: &Product, t: &WordTuple) -> isize {
    p.result(t).len() as isize - t.words[p.target].len() as isize
}

/// Finds a chain of length-preserving products leading to a tuple that
/// admits a strictly length-reducing product. Chains are at most `bound`
/// products long.
fn search_plateau(t: &WordTuple, all: &[Product], bound: usize) -> Option<Vec<Product>> {
    let mut parent: HashMap<WordTuple, (WordTuple, Product)> = HashMap::new();
    let mut seen: HashSet<WordTuple> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(t.clone());
    queue.push_back((t.clone(), 0usize));
    while let Some((cur, depth)) = queue.pop_front() {
        if depth > 0 && all.iter().any(|p| length_change(p, &cur) < 0) {
            let mut path = Vec::new();
            let mut node = cur;
            while let Some((prev, p)) = parent.get(&node) {
                path.push(*p);
                node = prev.clone();
            }
            path.reverse();
            return Some(path);
        }
        if depth == bound {
            continue;
        }
        for p in all {
            if length_change(p, &cur) != 0 {
                continue;
            }
            let next = p.apply(&cur);
            if seen.insert(next.clone()) {
                parent.insert(next.clone(), (cur.clone(), *p));
                queue.push_back((next, depth + 1));
            }
        }
    }
    None
}

/// Nielsen reduction: repeatedly apply the least length-reducing product;
/// at a local minimum search length-preserving chains (bounded by the total
/// word length) for a further reduction. Single-letter components are
/// finally normalized to positive letters in generator order, so a basis
/// reduces to exactly `(x0, ..., x_{n-1})`.
pub fn nielsen_reduce(t: &WordTuple) -> Result<(WordTuple, Vec<NielsenMove>)> {
    t.require_full()?;
    let all = products(t.rank);
    let mut cur = t.clone();
    let mut moves = Vec::new();
    loop {
        let reducing = all
            .iter()
            .filter(|p| length_change(p, &cur) < 0)
            .min_by_key(|p| (length_change(p, &cur), **p));
        if let Some(p) = reducing {
            moves.extend(p.elementary());
            cur = p.apply(&cur);
            continue;
        }
        let bound = cur.total_length();
        match search_plateau(&cur, &all, bound) {
            Some(path) => {
                for p in path {
                    moves.extend(p.elementary());
                    cur = p.apply(&cur);
                }
            }
            None => break,
        }
    }
    for i in 0..cur.rank {
        if cur.words[i].letters.len() == 1 && cur.words[i].letters[0].exponent < 0 {
            let m = NielsenMove::Invert(i);
            cur = cur.apply_move(&m)?;
            moves.push(m);
        }
    }
    if cur.words.iter().all(|w| w.len() == 1) {
        let mut perm: Vec<usize> = (0..cur.rank).collect();
        perm.sort_by_key(|&i| cur.words[i].letters[0]);
        if perm.iter().enumerate().any(|(i, &p)| i != p) {
            let m = NielsenMove::Permute(perm);
            cur = cur.apply_move(&m)?;
            moves.push(m);
        }
    }
    Ok((cur, moves))
}

fn determinant(mut m: Vec<Vec<i128>>) -> i128 {
    // Bareiss fraction-free elimination.
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Decides whether an n-tuple of words in the free group of rank n is a
/// basis (equivalently, carried to `(x0, ..., x_{n-1})` by a Nielsen
/// transformation).
pub fn is_primitive(t: &WordTuple) -> Result<bool> {
    t.require_full()?;
    let matrix: Vec<Vec<i128>> = t
        .words
        .iter()
        .map(|w| w.exponent_sums().into_iter().map(i128::from).collect())
        .collect();
    if determinant(matrix).abs() != 1 {
        return Ok(false);
    }
    let (reduced, _) = nielsen_reduce(t)?;
    Ok(reduced == WordTuple::identity(t.rank))
}
