//! Cofinality reduction on a finite window: from `G` with characteristic
//! `c` and an enumeration `W`, build `Gₙ` by lowering the exponent at the
//! `k`-th prime of `Pᶠⁱⁿ` by one for each `k ∉ W`.
//!
//! Only the first `m` primes of `Pᶠⁱⁿ` are inspected. The window treats the
//! complement of `W` as finite when it avoids the upper half `[⌊m/2⌋, m)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{check, VerificationReport};
use crate::arith::{primes_up_to, valuation};
use crate::rank1::{Exp, PrimeClass, Rank1Char};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CofinalityRow {
    pub prime: u64,
    pub g_exponent: Exp,
    pub gn_exponent: Exp,
    /// Position of `prime` in `Pᶠⁱⁿ` when inside the window.
    pub index: Option<usize>,
    pub in_w: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CofinalityRun {
    pub table: Vec<CofinalityRow>,
    pub isomorphic: bool,
    /// `Gₙ ≅ G` via `1 ↦ multiplier·1` when isomorphic.
    pub multiplier: Option<u128>,
    pub verification: VerificationReport,
}

/// Builds the exponent table of `Gₙ` on primes up to `bound`.
pub fn run_cofinality(c: &Rank1Char, m: usize, w: &BTreeSet<usize>, bound: u64) -> Result<CofinalityRun> {
    if c.is_class_finite(PrimeClass::Finite) {
        return Err(Error::Precondition("the characteristic needs infinitely many finite positive exponents".into()));
    }
    let window: Vec<u64> = (0..m).map(|k| c.nth_in_class(PrimeClass::Finite, k)).collect();
    if let Some(&p) = window.last() {
        if p > bound {
            return Err(Error::Precondition(format!("window prime {p} exceeds the bound {bound}")));
        }
    }

    let mut table = Vec::new();
    for p in primes_up_to(bound) {
        let g = c.exponent(p)?;
        let index = window.iter().position(|&q| q == p);
        let in_w = index.is_some_and(|k| w.contains(&k));
        let gn = match (index, g) {
            (Some(_), Exp::Finite(e)) if !in_w => Exp::Finite(e - 1),
            _ => g,
        };
        table.push(CofinalityRow { prime: p, g_exponent: g, gn_exponent: gn, index, in_w });
    }

    let missing: Vec<usize> = (0..m).filter(|k| !w.contains(k)).collect();
    let isomorphic = missing.iter().all(|&k| k < m / 2);
    let multiplier = isomorphic.then(|| missing.iter().map(|&k| window[k] as u128).product::<u128>());

    let mut rule = None;
    for row in &table {
        let expected = match (row.index, row.g_exponent) {
            (Some(_), Exp::Finite(e)) if !row.in_w => Exp::Finite(e - 1),
            _ => row.g_exponent,
        };
        let finite_positive = row.index.is_none() || matches!(row.g_exponent, Exp::Finite(e) if e >= 1);
        if row.gn_exponent != expected || !finite_positive {
            rule = Some(format!("exponent at {} breaks the lowering rule", row.prime));
            break;
        }
    }
    let mut checks = vec![check("lowering_rule", rule)];
    if let Some(mult) = multiplier {
        let bad = table.iter().find(|row| match (row.gn_exponent, row.g_exponent) {
            (Exp::Finite(a), Exp::Finite(b)) => a + valuation(mult, row.prime) != b,
            (a, b) => a != b,
        });
        checks.push(check("multiplier_restores", bad.map(|row| format!("rescaling misses at {}", row.prime))));
    } else {
        let lowered = table.iter().filter(|r| r.gn_exponent != r.g_exponent).count();
        checks.push(check(
            "lowered_count",
            (lowered != missing.len()).then(|| format!("{lowered} lowered exponents for {} missing indices", missing.len())),
        ));
    }
    Ok(CofinalityRun { table, isomorphic, multiplier, verification: VerificationReport::new(checks) })
}
