use serde::{Deserialize, Serialize};

use super::{Family, Formula, Signature, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderFormat {
    Text,
    Latex,
}

/// Renders `f` with each family expanded to its first `family_bound`
/// members, followed by an ellipsis and the family's enumeration note when
/// members remain. LaTeX output is wrapped in `$...$`.
pub fn render(f: &Formula, format: RenderFormat, family_bound: usize, signature: Signature) -> String {
    let r = Renderer { format, bound: family_bound, signature };
    let body = r.formula(f);
    match format {
        RenderFormat::Text => body,
        RenderFormat::Latex => format!("${body}$"),
    }
}

struct Renderer {
    format: RenderFormat,
    bound: usize,
    signature: Signature,
}

impl Renderer {
    fn latex(&self) -> bool {
        self.format == RenderFormat::Latex
    }

    fn sym(&self, text: &'static str, latex: &'static str) -> &'static str {
        if self.latex() {
            latex
        } else {
            text
        }
    }

    fn var(&self, v: &str) -> String {
        if !self.latex() {
            return v.to_string();
        }
        // x12 -> x_{12}
        let split = v.find(|c: char| c.is_ascii_digit()).unwrap_or(v.len());
        let (stem, digits) = v.split_at(split);
        if split > 0 && !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            format!("{stem}_{{{digits}}}")
        } else {
            v.to_string()
        }
    }

    fn term(&self, t: &Term) -> String {
        let additive = self.signature == Signature::Additive;
        match t {
            Term::Var(v) => self.var(v),
            Term::Unit => if additive { "0" } else { "e" }.to_string(),
            Term::Op(l, r) => {
                if additive {
                    match r.as_ref() {
                        Term::Scale(k, inner) if *k < 0 => {
                            format!("{} - {}", self.term(l), self.term(&Term::scale(-k, (**inner).clone())))
                        }
                        Term::Inv(inner) => format!("{} - {}", self.term(l), self.atomic_term(inner)),
                        Term::Op(..) => format!("{} + ({})", self.term(l), self.term(r)),
                        _ => format!("{} + {}", self.term(l), self.term(r)),
                    }
                } else {
                    let dot = self.sym("·", " \\cdot ");
                    format!("{}{dot}{}", self.factor(l), self.factor(r))
                }
            }
            Term::Inv(inner) => {
                if additive {
                    format!("-{}", self.atomic_term(inner))
                } else if self.latex() {
                    format!("{}^{{-1}}", self.atomic_term(inner))
                } else {
                    format!("{}^-1", self.atomic_term(inner))
                }
            }
            Term::Scale(k, inner) => {
                if additive {
                    match *k {
                        -1 => format!("-{}", self.atomic_term(inner)),
                        _ => format!("{k}{}", self.atomic_term(inner)),
                    }
                } else if self.latex() {
                    format!("{}^{{{k}}}", self.atomic_term(inner))
                } else {
                    format!("{}^{k}", self.atomic_term(inner))
                }
            }
        }
    }

    /// Operand of a product: sums and products are parenthesized.
    fn factor(&self, t: &Term) -> String {
        match t {
            Term::Op(..) if self.signature == Signature::Additive => format!("({})", self.term(t)),
            _ => self.term(t),
        }
    }

    fn atomic_term(&self, t: &Term) -> String {
        match t {
            Term::Var(_) | Term::Unit => self.term(t),
            _ => format!("({})", self.term(t)),
        }
    }

    fn formula(&self, f: &Formula) -> String {
        match f {
            Formula::Atomic(l, r) => format!("{} = {}", self.term(l), self.term(r)),
            Formula::NegAtomic(l, r) => {
                format!("{} {} {}", self.term(l), self.sym("≠", "\\neq"), self.term(r))
            }
            Formula::FiniteAnd(parts) => self.join(parts, self.sym(" ∧ ", " \\wedge "), "⊤", "\\top"),
            Formula::FiniteOr(parts) => self.join(parts, self.sym(" ∨ ", " \\vee "), "⊥", "\\bot"),
            Formula::FamilyAnd(fam) => self.family(fam, true),
            Formula::FamilyOr(fam) => self.family(fam, false),
            Formula::Exists(vars, body) => self.quantifier(self.sym("∃", "\\exists "), vars, body),
            Formula::Forall(vars, body) => self.quantifier(self.sym("∀", "\\forall "), vars, body),
        }
    }

    fn operand(&self, f: &Formula) -> String {
        match f {
            Formula::FiniteAnd(p) | Formula::FiniteOr(p) if p.len() > 1 => format!("({})", self.formula(f)),
            _ => self.formula(f),
        }
    }

    fn join(&self, parts: &[Formula], sep: &str, empty_text: &str, empty_latex: &str) -> String {
        if parts.is_empty() {
            return if self.latex() { empty_latex } else { empty_text }.to_string();
        }
        parts.iter().map(|p| self.operand(p)).collect::<Vec<_>>().join(sep)
    }

    fn quantifier(&self, symbol: &str, vars: &[String], body: &Formula) -> String {
        let vs: Vec<String> = vars.iter().map(|v| self.var(v)).collect();
        let sep = if self.latex() { "\\," } else { " " };
        let body = match body {
            Formula::Exists(..) | Formula::Forall(..) => self.formula(body),
            _ => {
                let (open, close) = if self.latex() { ("\\left[", "\\right]") } else { ("[", "]") };
                format!("{open}{}{close}", self.formula(body))
            }
        };
        format!("({symbol}{}){sep}{body}", vs.join(", "))
    }

    fn family(&self, fam: &Family, conjunctive: bool) -> String {
        let shown = fam.len().map_or(self.bound, |n| n.min(self.bound));
        let mut items: Vec<String> = (0..shown).map(|i| self.formula(&fam.member(i))).collect();
        let truncated = fam.len().map_or(true, |n| n > shown);
        if self.latex() {
            let big = if conjunctive { "\\bigwedge" } else { "\\bigvee" };
            if truncated {
                items.push("\\ldots".into());
            }
            let id = fam.id().replace('_', "\\_");
            format!("{big}\\left\\{{{}\\right\\}}_{{\\mathrm{{{id}}}}}", items.join(",\\ "))
        } else {
            let big = if conjunctive { "⋀" } else { "⋁" };
            if truncated {
                items.push("…".into());
            }
            format!("{big}{{{}}}[{}]", items.join("; "), fam.note())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::torsion_free;

    #[test]
    fn atoms() {
        let f = Formula::eq(Term::var("x"), Term::Unit);
        assert_eq!(render(&f, RenderFormat::Text, 3, Signature::Additive), "x = 0");
        assert_eq!(render(&f, RenderFormat::Latex, 3, Signature::Additive), "$x = 0$");
        assert_eq!(render(&f, RenderFormat::Text, 3, Signature::Multiplicative), "x = e");
    }

    #[test]
    fn terms() {
        let t = Term::op(Term::scale(2, Term::var("x1")), Term::scale(-3, Term::var("x2")));
        let f = Formula::neq(t, Term::Unit);
        assert_eq!(render(&f, RenderFormat::Text, 1, Signature::Additive), "2x1 - 3x2 ≠ 0");
        assert_eq!(render(&f, RenderFormat::Latex, 1, Signature::Additive), "$2x_{1} - 3x_{2} \\neq 0$");
        let w = Formula::eq(Term::op(Term::var("a"), Term::inv(Term::var("b"))), Term::Unit);
        assert_eq!(render(&w, RenderFormat::Text, 1, Signature::Multiplicative), "a·b^-1 = e");
        let (x, y, z) = (Term::var("x"), Term::var("y"), Term::var("z"));
        let assoc = Formula::eq(Term::op(Term::op(x.clone(), y.clone()), z.clone()), Term::op(x, Term::op(y, z)));
        assert_eq!(render(&assoc, RenderFormat::Text, 1, Signature::Additive), "x + y + z = x + (y + z)");
    }

    #[test]
    fn families_are_truncated() {
        let text = render(&torsion_free(), RenderFormat::Text, 2, Signature::Additive);
        assert_eq!(text, "(∀x) [x = 0 ∨ ⋀{x ≠ 0; 2x ≠ 0; …}[nonzero_multiples: m > 0]]");
    }
}
