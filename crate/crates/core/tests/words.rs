use proptest::prelude::*;
use scott_core::words::{is_primitive, nielsen_reduce, FreeWord, Letter, NielsenMove, WordTuple};

fn letters(rank: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..rank, prop::bool::ANY), 0..=10)
        .prop_map(|v| v.into_iter().map(|(g, pos)| Letter::new(g, if pos { 1 } else { -1 })).collect())
}

fn moves(rank: usize) -> Vec<NielsenMove> {
    let mut out = vec![NielsenMove::Permute((0..rank).rev().collect())];
    for i in 0..rank {
        out.push(NielsenMove::Invert(i));
        for j in (0..rank).filter(|&j| j != i) {
            out.push(NielsenMove::RightMultiply(i, j));
        }
    }
    out
}

/// Every pair in `F₂` of total length at most `n`.
fn pairs_up_to(n: usize) -> Vec<WordTuple> {
    let words: Vec<FreeWord> = (0..).map(|i| FreeWord::nth(2, i)).take_while(|w| w.len() <= n).collect();
    let mut out = Vec::new();
    for u in &words {
        for v in words.iter().filter(|v| u.len() + v.len() <= n) {
            out.push(WordTuple::new(2, vec![u.clone(), v.clone()]).unwrap());
        }
    }
    out
}

#[test]
fn reduce_examples() {
    let a = Letter::new(0, 1);
    let b = Letter::new(1, 1);
    assert_eq!(FreeWord::reduce(&[a, a.inverse(), b], 2).unwrap(), FreeWord::parse("b", 2).unwrap());
    assert!(FreeWord::reduce(&[], 2).unwrap().is_empty());
    assert_eq!(FreeWord::reduce(&[a, b, b.inverse(), a.inverse(), a], 2).unwrap().to_string(), "a");
    assert!(FreeWord::reduce(&[Letter::new(2, 1)], 2).is_err());
}

#[test]
fn move_examples() {
    let t = WordTuple::parse(2, &["a", "b"]).unwrap();
    assert_eq!(t.apply_move(&NielsenMove::Invert(0)).unwrap(), WordTuple::parse(2, &["a^-1", "b"]).unwrap());
    assert_eq!(t.apply_move(&NielsenMove::RightMultiply(0, 1)).unwrap(), WordTuple::parse(2, &["ab", "b"]).unwrap());
    let t = WordTuple::parse(2, &["ab", "b"]).unwrap();
    let got = t.apply_moves(&[NielsenMove::Invert(1), NielsenMove::RightMultiply(0, 1)]).unwrap();
    assert_eq!(got, WordTuple::parse(2, &["a", "b^-1"]).unwrap());
}

#[test]
fn primitivity_examples() {
    let p = |ws: &[&str]| is_primitive(&WordTuple::parse(2, ws).unwrap()).unwrap();
    assert!(p(&["a", "b"]));
    assert!(p(&["ab", "b"]));
    assert!(!p(&["aa", "b"]));
    let (reduced, moves) = nielsen_reduce(&WordTuple::parse(2, &["a", "b"]).unwrap()).unwrap();
    assert_eq!((reduced.total_length(), moves.len()), (2, 0));
    let (reduced, _) = nielsen_reduce(&WordTuple::parse(2, &["a", "ab"]).unwrap()).unwrap();
    assert_eq!(reduced.total_length(), 2);
    let (reduced, _) = nielsen_reduce(&WordTuple::parse(2, &["ab", "ba"]).unwrap()).unwrap();
    assert!(reduced.total_length() > 2);
    assert!(is_primitive(&WordTuple::parse(2, &["a"]).unwrap()).is_err());
}

#[test]
fn nielsen_moves_certify_the_result() {
    for t in pairs_up_to(5) {
        let (reduced, moves) = nielsen_reduce(&t).unwrap();
        assert_eq!(t.apply_moves(&moves).unwrap(), reduced, "{t}");
        assert!(reduced.total_length() <= t.total_length());
    }
}

#[test]
fn primitivity_is_move_invariant() {
    for t in pairs_up_to(6) {
        let before = is_primitive(&t).unwrap();
        for m in moves(2) {
            assert_eq!(is_primitive(&t.apply_move(&m).unwrap()).unwrap(), before, "{t} under {m:?}");
        }
    }
}

/// Every raw letter sequence of length at most `max_len` over `rank` generators.
fn raw_sequences(rank: usize, max_len: usize) -> impl Iterator<Item = Vec<Letter>> {
    let codes = 2 * rank;
    (0..=max_len).flat_map(move |len| {
        (0..codes.pow(len as u32)).map(move |mut n| {
            (0..len)
                .map(|_| {
                    let c = n % codes;
                    n /= codes;
                    Letter::new(c / 2, if c % 2 == 0 { 1 } else { -1 })
                })
                .collect()
        })
    })
}

#[test]
fn reduction_is_idempotent_and_cancels_exhaustively() {
    for (rank, max_len) in [(1, 10), (2, 10), (3, 8)] {
        for raw in raw_sequences(rank, max_len) {
            let w = FreeWord::reduce(&raw, rank).unwrap();
            assert_eq!(FreeWord::reduce(w.letters(), rank).unwrap(), w);
            assert!(w.mul(&w.inverse()).is_empty());
        }
    }
}

#[test]
fn enumeration_is_shortlex_without_repeats() {
    let words: Vec<FreeWord> = (0..161).map(|i| FreeWord::nth(2, i)).collect();
    assert!(words.windows(2).all(|p| p[0].len() <= p[1].len()));
    let distinct: std::collections::BTreeSet<_> = words.iter().collect();
    assert_eq!(distinct.len(), words.len());
    // 1 + 4 + 12 + 36 + 108 reduced words of length ≤ 4.
    assert_eq!(words.iter().filter(|w| w.len() <= 4).count(), 161);
}

proptest! {
    #[test]
    fn reduce_is_idempotent(rank in 1usize..=3, raw in letters(3)) {
        let raw: Vec<Letter> = raw.into_iter().filter(|l| l.generator < rank).collect();
        let w = FreeWord::reduce(&raw, rank).unwrap();
        prop_assert_eq!(FreeWord::reduce(w.letters(), rank).unwrap(), w.clone());
        prop_assert!(w.mul(&w.inverse()).is_empty());
    }

    #[test]
    fn moves_are_invertible(u in letters(3), v in letters(3), w in letters(3), k in 0usize..10) {
        let t = WordTuple::new(3, [u, v, w].iter().map(|l| FreeWord::reduce(l, 3).unwrap()).collect()).unwrap();
        let all = moves(3);
        let m = &all[k % all.len()];
        let there = t.apply_move(m).unwrap();
        prop_assert_eq!(there.apply_moves(&m.inverse()).unwrap(), t);
    }

    #[test]
    fn json_round_trip(raw in letters(3)) {
        let w = FreeWord::reduce(&raw, 3).unwrap();
        let text = serde_json::to_string(&w).unwrap();
        prop_assert_eq!(serde_json::from_str::<FreeWord>(&text).unwrap(), w.clone());
        prop_assert_eq!(FreeWord::parse(&w.to_string(), 3).unwrap(), w);
    }
}
