//! Limit construction for rank-1 groups: `G` with characteristic `c`,
//! `H ⊇ G` making `p` infinitely divide `1`, and `K ⊆ G` where `q` does not
//! divide `1`.
//!
//! Every constant carries an abstract rational `v`; its stage image is
//! `λ·v`. The scale is `1` toward `H`, `p^(kₛ−k)` toward `G` and that times
//! `q^ℓₛ` toward `K`, where `kₛ` and `ℓₛ` are the deepest `p`- and
//! `q`-divisions used so far.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check, common_checks, ConstructionTrace, Snapshot, StageReport, VerificationReport};
use crate::arith::{is_prime, pow, rational_valuation, Rational};
use crate::formula::{Formula, Term};
use crate::rank1::{Exp, PrimeClass, Rank1Char};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rank1Target {
    H,
    G,
    K,
}

impl Rank1Target {
    fn from_level(level: usize) -> Self {
        match level {
            0 => Rank1Target::H,
            1 => Rank1Target::G,
            _ => Rank1Target::K,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rank1Run {
    pub reports: Vec<StageReport>,
    pub final_tag: Rank1Target,
    pub final_char: Rank1Char,
    pub verification: VerificationReport,
}

fn r(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// Runs the construction with `p ∈ P⁰ ∪ Pᶠⁱⁿ` and `q ∈ P^∞` of `c`.
pub fn run_rank1(c: &Rank1Char, p: u64, q: u64, trace: &ConstructionTrace, growth: usize) -> Result<Rank1Run> {
    for prime in [p, q] {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
    }
    let k = match c.exponent(p)? {
        Exp::Finite(k) => k as i64,
        Exp::Infinite => return Err(Error::Precondition(format!("{p} must divide 1 only finitely often"))),
    };
    if c.class_of(q)? != PrimeClass::Infinite {
        return Err(Error::Precondition(format!("{q} must divide 1 infinitely often")));
    }
    let depth = (trace.len() * growth + 1 + k as usize) as f64;
    if depth * ((p as f64).log2() + (q as f64).log2()) > 100.0 {
        return Err(Error::Precondition("trace too long for exact rational arithmetic".into()));
    }
    let targets = [c.extend_infinite_at(p)?, c.clone(), c.kill_prime_at(q)?];

    let mut values: BTreeMap<String, Rational> = [("u".to_string(), r(1))].into();
    let mut diagram = vec![Formula::neq(Term::var("u"), Term::Unit)];
    let (mut p_tip, mut q_tip) = ("u".to_string(), "u".to_string());
    let mut k_unit: Option<String> = None;
    let mut k_tip = String::new();
    let mut fresh = 0;
    let mut lambda = r(1);
    let mut lambda_g = r(1);
    let mut prev_level = 0;

    let mut reports = Vec::new();
    let mut snapshots = Vec::new();
    let mut emitted = 0;
    for (s, step) in trace.steps().iter().enumerate() {
        let level = step.level();
        if level >= 1 && prev_level == 0 {
            let ks = values.values().map(|v| -rational_valuation(v, p)).max().unwrap_or(0).max(0);
            lambda_g = r(pow(p, (ks - k).max(0) as u32)) / r(pow(p, (k - ks).max(0) as u32));
        }
        let entering_k = level == 2 && prev_level != 2;
        lambda = match level {
            0 => r(1),
            1 => lambda_g,
            _ if entering_k => {
                let ls = values.values().map(|v| -rational_valuation(&(lambda_g * v), q)).max().unwrap_or(0).max(0);
                lambda_g * r(pow(q, ls as u32))
            }
            _ => lambda,
        };
        if entering_k {
            // The unit of K, written against u as (numer)·w = (denom)·u.
            let w_value = lambda.recip();
            let existing = values.iter().find(|(_, v)| **v == w_value).map(|(n, _)| n.clone());
            let w = existing.unwrap_or_else(|| {
                let w = format!("w{fresh}");
                fresh += 1;
                let (n, m) = (*lambda.numer() as i64, *lambda.denom() as i64);
                diagram.push(Formula::eq(Term::scale(n, Term::var(&w)), Term::scale(m, Term::var("u"))));
                values.insert(w.clone(), w_value);
                w
            });
            k_unit = Some(w.clone());
            k_tip = w;
        }

        for _ in 0..growth {
            let y = format!("c{fresh}");
            fresh += 1;
            let (fact, value) = match level {
                0 => {
                    let v = values[&p_tip] / r(p as i128);
                    let f = Formula::eq(Term::scale(p as i64, Term::var(&y)), Term::var(&p_tip));
                    p_tip = y.clone();
                    (f, v)
                }
                1 => {
                    let v = values[&q_tip] / r(q as i128);
                    let f = Formula::eq(Term::scale(q as i64, Term::var(&y)), Term::var(&q_tip));
                    q_tip = y.clone();
                    (f, v)
                }
                _ => {
                    let w = k_unit.clone().expect("K stages have a unit");
                    let v = values[&k_tip] + values[&w];
                    let f = Formula::eq(Term::op(Term::var(&k_tip), Term::var(&w)), Term::var(&y));
                    k_tip = y.clone();
                    (f, v)
                }
            };
            diagram.push(fact);
            diagram.push(Formula::neq(Term::var(&y), Term::Unit));
            values.insert(y, value);
        }

        let target = Rank1Target::from_level(level);
        let map: BTreeMap<String, Rational> = values.iter().map(|(n, v)| (n.clone(), lambda * v)).collect();
        reports.push(StageReport {
            stage: s,
            target: format!("{target:?}"),
            partial_map: map.iter().map(|(n, v)| (n.clone(), serde_json::json!(v.to_string()))).collect(),
            diagram_delta: diagram[emitted..].to_vec(),
        });
        emitted = diagram.len();
        snapshots.push(Snapshot { target: format!("{target:?}"), level, map, diagram_len: emitted });
        prev_level = level;
    }

    let final_level = trace.last().level();
    let final_tag = Rank1Target::from_level(final_level);
    let final_char = targets[final_level].clone();
    let mut checks = common_checks(&snapshots, &reports, &diagram, |level, v| targets[level].contains(v), true);
    let last_map = &snapshots.last().expect("traces are nonempty").map;
    let outside = last_map.iter().find(|(_, v)| !final_char.contains(v)).map(|(n, v)| format!("{n} ↦ {v} is outside the final group"));
    checks.push(check("final_divisibility", outside));
    let q_divides_unit = final_tag == Rank1Target::K && final_char.exponent(q)? != Exp::Finite(0);
    checks.push(check("final_tag", q_divides_unit.then(|| format!("{q} still divides 1 in the final group"))));
    Ok(Rank1Run { reports, final_tag, final_char, verification: VerificationReport::new(checks) })
}
