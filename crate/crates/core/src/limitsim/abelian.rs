//! Limit construction aimed at `ℤᵏ` from a copy of `ℤᵏ⁻¹`.
//!
//! Constants are formal integer combinations of generator constants. The
//! base generators stay independent; each rise in level adds a fresh
//! generator on a new coordinate, and each drop collapses the newest one
//! onto a large multiple of the first coordinate. A collapsed generator
//! keeps that image for the rest of the run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check, common_checks, ConstructionTrace, GroupValue, IntVec, Snapshot, StageReport, VerificationReport};
use crate::formula::{Formula, Term};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelianRun {
    pub reports: Vec<StageReport>,
    /// Rank of the free abelian group believed at the last stage.
    pub final_rank: usize,
    pub verification: VerificationReport,
}

impl AbelianRun {
    pub fn final_tag(&self) -> String {
        format!("Z^{}", self.final_rank)
    }
}

#[derive(Debug, Clone)]
enum GenImage {
    Coordinate(usize),
    Collapsed(IntVec),
}

struct State {
    base: usize,
    generators: Vec<(String, GenImage)>,
    /// Generator indices of the extra generators currently on coordinates.
    active: Vec<usize>,
    /// Name and coefficients over `generators` of every constant.
    constants: Vec<(String, Vec<i64>)>,
    diagram: Vec<Formula>,
    fresh: usize,
}

impl State {
    fn generator_image(&self, g: usize) -> IntVec {
        match &self.generators[g].1 {
            GenImage::Coordinate(i) => {
                let mut v = vec![0; i + 1];
                v[*i] = 1;
                IntVec(v)
            }
            GenImage::Collapsed(v) => v.clone(),
        }
    }

    fn image(&self, coeffs: &[i64]) -> IntVec {
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, k)| **k != 0)
            .fold(IntVec::zero(), |acc, (g, k)| acc.add(&self.generator_image(g).times(*k)))
    }

    fn map(&self) -> BTreeMap<String, IntVec> {
        self.constants.iter().map(|(c, k)| (c.clone(), self.image(k))).collect()
    }

    fn dimension(&self) -> usize {
        self.base + self.active.len()
    }

    fn push_generator(&mut self) {
        let g = self.generators.len();
        let name = format!("g{g}");
        self.generators.push((name.clone(), GenImage::Coordinate(self.dimension())));
        self.active.push(g);
        let mut coeffs = vec![0; g + 1];
        coeffs[g] = 1;
        self.constants.push((name.clone(), coeffs));
        self.diagram.push(Formula::neq(Term::var(&name), Term::Unit));
    }

    /// Collapses the newest extra generator onto `M·e₀` with `M` larger
    /// than twice every coordinate, so distinct images stay distinct.
    fn collapse(&mut self) {
        let g = self.active.pop().expect("collapse needs an active extra generator");
        let max = self.constants.iter().flat_map(|(_, k)| self.image(k).0).map(i64::abs).max().unwrap_or(0);
        let m = 1 + 2 * max;
        self.generators[g].1 = GenImage::Collapsed(IntVec(vec![m]));
        // Record the relation so the limit diagram sees it.
        let name = format!("c{}", self.fresh);
        self.fresh += 1;
        let mut coeffs = vec![0; self.generators.len()];
        coeffs[0] = m;
        self.constants.push((name.clone(), coeffs));
        self.diagram.push(Formula::eq(Term::scale(m, Term::var(&self.generators[0].0)), Term::var(&name)));
        self.diagram.push(Formula::eq(Term::var(&self.generators[g].0), Term::var(name)));
    }

    /// Adds `y = x + g` for the last constant `x` and a cycling generator
    /// `g` currently on a coordinate, with inequations against the
    /// coordinate generators and `x`.
    fn grow(&mut self) {
        let coordinate_gens: Vec<usize> = (0..self.base).chain(self.active.iter().copied()).collect();
        let g = coordinate_gens[self.fresh % coordinate_gens.len()];
        let (x_name, x_coeffs) = self.constants.last().cloned().expect("constants are nonempty");
        let mut coeffs = x_coeffs;
        coeffs.resize(self.generators.len(), 0);
        coeffs[g] += 1;
        let y = format!("c{}", self.fresh);
        self.fresh += 1;
        let y_image = self.image(&coeffs);
        self.diagram.push(Formula::eq(Term::op(Term::var(&x_name), Term::var(&self.generators[g].0)), Term::var(&y)));
        for other in coordinate_gens.iter().map(|&h| self.generators[h].0.clone()).chain([x_name]) {
            let other_image = self.image(&self.constants.iter().find(|(c, _)| *c == other).expect("known constant").1);
            let fact = if other_image == y_image { Formula::eq } else { Formula::neq };
            self.diagram.push(fact(Term::var(&y), Term::var(other)));
        }
        self.constants.push((y, coeffs));
    }
}

/// Runs the construction for target `ℤᵏ`, `k ≥ 2`, adding `growth`
/// constants per stage. The belief before stage 0 is `ℤᵏ⁻¹`.
pub fn run_abelian(k: usize, trace: &ConstructionTrace, growth: usize) -> Result<AbelianRun> {
    if k < 2 {
        return Err(Error::AbelianRankTooSmall(k));
    }
    let base = k - 1;
    let mut st = State {
        base,
        generators: Vec::new(),
        active: Vec::new(),
        constants: Vec::new(),
        diagram: Vec::new(),
        fresh: 0,
    };
    for i in 0..base {
        let name = format!("g{i}");
        st.generators.push((name.clone(), GenImage::Coordinate(i)));
        let mut coeffs = vec![0; i + 1];
        coeffs[i] = 1;
        st.constants.push((name.clone(), coeffs));
        st.diagram.push(Formula::neq(Term::var(name), Term::Unit));
    }

    let mut reports = Vec::new();
    let mut snapshots = Vec::new();
    let mut emitted = 0;
    for (s, step) in trace.steps().iter().enumerate() {
        let level = step.level();
        while st.active.len() > level {
            st.collapse();
        }
        while st.active.len() < level {
            st.push_generator();
        }
        for _ in 0..growth {
            st.grow();
        }
        let map = st.map();
        let target = format!("Z^{}", st.dimension());
        reports.push(StageReport {
            stage: s,
            target: target.clone(),
            partial_map: map.iter().map(|(c, v)| (c.clone(), serde_json::json!(padded(v, st.dimension())))).collect(),
            diagram_delta: st.diagram[emitted..].to_vec(),
        });
        emitted = st.diagram.len();
        snapshots.push(Snapshot { target, level, map, diagram_len: emitted });
    }

    let dims: Vec<usize> = snapshots.iter().map(|s| base + s.level).collect();
    let mut checks = common_checks(&snapshots, &reports, &st.diagram, |level, v: &IntVec| v.0.len() <= base + level, true);
    let final_rank = base + trace.last().level();
    let last = snapshots.last().expect("traces are nonempty");
    let images: Vec<Vec<i64>> = last.map.values().map(|v| padded(v, final_rank)).collect();
    let rank = integer_rank(&images);
    checks.push(check(
        "final_tag",
        (rank != final_rank || dims.last() != Some(&final_rank))
            .then(|| format!("images span rank {rank}, tag claims {final_rank}")),
    ));
    Ok(AbelianRun { reports, final_rank, verification: VerificationReport::new(checks) })
}

fn padded(v: &IntVec, n: usize) -> Vec<i64> {
    let mut out = v.0.clone();
    out.resize(n.max(out.len()), 0);
    out
}

/// Rank over `ℚ` of a list of integer vectors.
pub(crate) fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = m.iter().map(Vec::len).max().unwrap_or(0);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r].get(col).copied().unwrap_or(0) != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            let (a, b) = (m[rank][col], m[r].get(col).copied().unwrap_or(0));
            if b == 0 {
                continue;
            }
            let g = num_integer::gcd(a, b);
            let row: Vec<i128> =
                (0..cols).map(|c| m[r].get(c).copied().unwrap_or(0) * (a / g) - m[rank].get(c).copied().unwrap_or(0) * (b / g)).collect();
            m[r] = row;
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(bits: &[(bool, bool)]) -> ConstructionTrace {
        ConstructionTrace::from_bits(bits).unwrap()
    }

    #[test]
    fn settles_at_full_rank() {
        let run = run_abelian(2, &trace(&[(false, false), (true, false), (true, false)]), 2).unwrap();
        assert_eq!(run.final_tag(), "Z^2");
        assert!(run.verification.passed, "{:?}", run.verification.failures());
    }

    #[test]
    fn collapse_then_extend() {
        let t = trace(&[(false, false), (true, false), (false, false), (true, true), (true, false), (false, true)]);
        let run = run_abelian(3, &t, 3).unwrap();
        assert_eq!(run.final_rank, 2);
        assert!(run.verification.passed, "{:?}", run.verification.failures());
        let targets: Vec<&str> = run.reports.iter().map(|r| r.target.as_str()).collect();
        assert_eq!(targets, ["Z^2", "Z^3", "Z^2", "Z^4", "Z^3", "Z^2"]);
    }

    #[test]
    fn rank_of_vectors() {
        assert_eq!(integer_rank(&[vec![1, 0], vec![2, 0], vec![0, 3]]), 2);
        assert_eq!(integer_rank(&[vec![2, 4], vec![1, 2]]), 1);
        assert_eq!(integer_rank(&[]), 0);
    }

    #[test]
    fn rejects_small_rank() {
        assert!(run_abelian(1, &trace(&[(true, true)]), 1).is_err());
    }
}
