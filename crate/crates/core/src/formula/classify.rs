use std::fmt;

use serde::{Deserialize, Serialize};

use super::Formula;

/// Members sampled when computing the level of an infinite family. Family
/// members are uniform in shape, so a short prefix determines the level.
const FAMILY_SAMPLE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComplexityKind {
    QuantifierFree,
    Sigma,
    Pi,
    DSigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Complexity {
    pub kind: ComplexityKind,
    pub level: u32,
}

impl Complexity {
    pub const QF: Complexity = Complexity { kind: ComplexityKind::QuantifierFree, level: 0 };

    pub fn sigma(level: u32) -> Self {
        Self { kind: ComplexityKind::Sigma, level }
    }

    pub fn pi(level: u32) -> Self {
        Self { kind: ComplexityKind::Pi, level }
    }

    pub fn dsigma(level: u32) -> Self {
        Self { kind: ComplexityKind::DSigma, level }
    }
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ComplexityKind::QuantifierFree => write!(f, "QuantifierFree(0)"),
            ComplexityKind::Sigma => write!(f, "Sigma({})", self.level),
            ComplexityKind::Pi => write!(f, "Pi({})", self.level),
            ComplexityKind::DSigma => write!(f, "DSigma({})", self.level),
        }
    }
}

/// Least `(s, p)` such that the formula is computable `Σ_s` and `Π_p`.
/// Quantifier-free finitary formulas get `(0, 0)`.
pub fn levels(f: &Formula) -> (u32, u32) {
    match f {
        Formula::Atomic(..) | Formula::NegAtomic(..) => (0, 0),
        Formula::FiniteAnd(parts) | Formula::FiniteOr(parts) => {
            let (s, p) = parts
                .iter()
                .map(levels)
                .fold((0, 0), |(s, p), (si, pi)| (s.max(si), p.max(pi)));
            (s.min(p + 1), p.min(s + 1))
        }
        Formula::FamilyOr(fam) => {
            let n = fam.len().unwrap_or(FAMILY_SAMPLE).min(FAMILY_SAMPLE);
            if n == 0 {
                return (0, 0);
            }
            let s = (0..n)
                .map(|i| {
                    let (si, pi) = levels(&fam.member(i));
                    si.min(pi + 1)
                })
                .max()
                .unwrap_or(0)
                .max(1);
            (s, s + 1)
        }
        Formula::FamilyAnd(fam) => {
            let n = fam.len().unwrap_or(FAMILY_SAMPLE).min(FAMILY_SAMPLE);
            if n == 0 {
                return (0, 0);
            }
            let p = (0..n)
                .map(|i| {
                    let (si, pi) = levels(&fam.member(i));
                    pi.min(si + 1)
                })
                .max()
                .unwrap_or(0)
                .max(1);
            (p + 1, p)
        }
        Formula::Exists(_, body) => {
            let (sb, pb) = levels(body);
            let s = sb.min(pb + 1).max(1);
            (s, s + 1)
        }
        Formula::Forall(_, body) => {
            let (sb, pb) = levels(body);
            let p = pb.min(sb + 1).max(1);
            (p + 1, p)
        }
    }
}

/// The least class the formula belongs to. A top-level conjunction whose
/// `Σ` and `Π` levels coincide is split into a `Σ_n` part and a `Π_n` part
/// when that gives a smaller `n`, and then reported as `DSigma(n)`.
pub fn classify(f: &Formula) -> Complexity {
    let (s, p) = levels(f);
    if s == 0 {
        return Complexity::QF;
    }
    if s < p {
        return Complexity::sigma(s);
    }
    if p < s {
        return Complexity::pi(p);
    }
    match best_split(f) {
        Some(n) if n < s => Complexity::dsigma(n),
        _ => Complexity::sigma(s),
    }
}

/// Least `n` over all 2-partitions of the top-level conjuncts into a `Σ_n`
/// part and a `Π_n` part.
fn best_split(f: &Formula) -> Option<u32> {
    let conjuncts = f.conjuncts();
    if conjuncts.len() < 2 || conjuncts.len() > 20 {
        return None;
    }
    let lv: Vec<(u32, u32)> = conjuncts.iter().map(|c| levels(c)).collect();
    (0u32..1 << lv.len())
        .map(|mask| {
            let (mut s_part, mut p_part) = (0, 0);
            for (i, (s, p)) in lv.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s_part = s_part.max(*s);
                } else {
                    p_part = p_part.max(*p);
                }
            }
            s_part.max(p_part)
        })
        .min()
}
