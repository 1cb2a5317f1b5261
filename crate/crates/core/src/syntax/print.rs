//! Text rendering in the same surface syntax the parser reads, so that
//! `parse(print(x)) == x` for every well-formed object.

use std::fmt;

use crate::structures::{tuple_at, FinStructure};

use super::{Atom, CompanionAxiom, HInductiveSentence, PositiveFormula, Signature, Term, Theory};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Eq(l, r) => write!(f, "{l} = {r}"),
            Atom::Rel(r, args) => write!(f, "{}", Term::App(r.clone(), args.clone())),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    InOr,
    InAnd,
}

fn write_formula(phi: &PositiveFormula, ctx: Ctx, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match phi {
        PositiveFormula::Atom(a) => write!(f, "{a}"),
        PositiveFormula::And(v) if v.is_empty() => f.write_str("true"),
        PositiveFormula::Or(v) if v.is_empty() => f.write_str("false"),
        // one-element nodes never come out of the parser; print the child
        PositiveFormula::And(v) | PositiveFormula::Or(v) if v.len() == 1 => write_formula(&v[0], ctx, f),
        PositiveFormula::And(v) => {
            let paren = ctx == Ctx::InAnd;
            if paren {
                f.write_str("(")?;
            }
            for (i, p) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(" and ")?;
                }
                write_formula(p, Ctx::InAnd, f)?;
            }
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
        PositiveFormula::Or(v) => {
            let paren = ctx != Ctx::Top;
            if paren {
                f.write_str("(")?;
            }
            for (i, p) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(" or ")?;
                }
                write_formula(p, Ctx::InOr, f)?;
            }
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
        PositiveFormula::Exists(vars, body) => {
            let paren = ctx != Ctx::Top;
            if paren {
                f.write_str("(")?;
            }
            write!(f, "exists {}. ", vars.join(" "))?;
            write_formula(body, Ctx::Top, f)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for PositiveFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, Ctx::Top, f)
    }
}

impl fmt::Display for HInductiveSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = |f: &mut fmt::Formatter<'_>| {
            if self.vars.is_empty() {
                Ok(())
            } else {
                write!(f, "forall {}. ", self.vars.join(" "))
            }
        };
        if self.consequent.is_false() {
            let implicit: Vec<String> = self.antecedent.free_vars().into_iter().collect();
            if implicit != self.vars {
                prefix(f)?;
            }
            return write!(f, "not {}", self.antecedent);
        }
        prefix(f)?;
        if self.antecedent.is_true() {
            // a bare `Q` parses back with the same empty antecedent
            write!(f, "{}", self.consequent)
        } else {
            write!(f, "{} -> {}", self.antecedent, self.consequent)
        }
    }
}

impl fmt::Display for CompanionAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.vars.is_empty() {
            write!(f, "forall {}. ", self.vars.join(" "))?;
        }
        write!(f, "({}) or ", self.psi)?;
        if !self.witness_vars.is_empty() {
            write!(f, "exists {}. ", self.witness_vars.join(" "))?;
        }
        write!(f, "(({}) and not ({}))", self.theta1, self.theta2)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "signature {} {{", self.name)?;
        for (g, a) in self.functions() {
            write!(f, " func {g}/{a};")?;
        }
        for (r, a) in self.relations() {
            write!(f, " rel {r}/{a};")?;
        }
        for c in self.constants() {
            write!(f, " const {c};")?;
        }
        f.write_str(" }")
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theory {} over {} {{", self.name, self.signature.name)?;
        for ax in &self.axioms {
            writeln!(f, "  axiom {}: {};", ax.name, ax.sentence)?;
        }
        for ax in &self.companion_axioms {
            writeln!(f, "  companion {}: {};", ax.name, ax.axiom)?;
        }
        f.write_str("}")
    }
}

fn write_tuple(s: &FinStructure, t: &[usize], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if t.len() == 1 {
        return f.write_str(s.element_name(t[0]));
    }
    let names: Vec<&str> = t.iter().map(|&a| s.element_name(a)).collect();
    write!(f, "({})", names.join(", "))
}

impl fmt::Display for FinStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = self.signature();
        let n = self.size();
        writeln!(f, "structure {} over {} {{", self.name, sig.name)?;
        writeln!(f, "  universe {{{}}};", self.elements().join(", "))?;
        for (fi, (g, arity)) in sig.functions().iter().enumerate() {
            write!(f, "  {g}: ")?;
            for (idx, &v) in self.function_table(fi).iter().enumerate() {
                if idx > 0 {
                    f.write_str(", ")?;
                }
                write_tuple(self, &tuple_at(n, *arity, idx), f)?;
                write!(f, " -> {}", self.element_name(v))?;
            }
            writeln!(f, ";")?;
        }
        for (ri, (r, _)) in sig.relations().iter().enumerate() {
            let tuples = self.relation_tuples(ri);
            if tuples.is_empty() {
                continue;
            }
            write!(f, "  {r}: ")?;
            for (i, t) in tuples.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_tuple(self, t, f)?;
            }
            writeln!(f, ";")?;
        }
        for (ci, c) in sig.constants().iter().enumerate() {
            writeln!(f, "  {c} = {};", self.element_name(self.constant(ci)))?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::{parse_formula, parse_sentence, parse_structure, parse_theory, ParseContext};
    use super::*;

    fn sig() -> Arc<Signature> {
        Arc::new(Signature::new("S").with_function("f", 1).unwrap().with_relation("R", 2).unwrap().with_constant("c").unwrap())
    }

    #[test]
    fn formulas_round_trip() {
        let sig = sig();
        for src in [
            "f(x) = y",
            "R(x, f(c)) and (x = y or y = c)",
            "exists y z. f(y) = z and R(z, x)",
            "(exists y. f(y) = x) and x = x",
            "(a = b and b = c) and c = a",
            "((a = b or b = c) or c = a) or true",
            "false",
        ] {
            let f = parse_formula(src, &sig).unwrap();
            let printed = f.to_string();
            assert_eq!(parse_formula(&printed, &sig).unwrap(), f, "{src} -> {printed}");
        }
    }

    #[test]
    fn sentences_round_trip() {
        let sig = sig();
        for src in [
            "forall x y. f(x) = f(y) -> x = y",
            "not exists x. f(x) = x",
            "not f(x) = x",
            "forall x y. not f(x) = x",
            "forall x. exists y. f(y) = x",
            "R(c, c)",
        ] {
            let s = parse_sentence(src, &sig).unwrap();
            let printed = s.to_string();
            assert_eq!(parse_sentence(&printed, &sig).unwrap(), s, "{src} -> {printed}");
        }
    }

    #[test]
    fn structures_and_theories_round_trip() {
        let ctx = ParseContext::new().with_signature(sig());
        let a = parse_structure("structure A over S { universe {a, b}; f: a -> b, b -> b; R: (a, b), (b, b); c = b; }", &ctx).unwrap();
        assert_eq!(parse_structure(&a.to_string(), &ctx).unwrap(), a);
        let t = parse_theory(
            "theory T over S { axiom a1: forall x. R(x, x) -> x = c; companion k: forall x. (x = x) or exists y. ((f(y) = x) and not (y = x)); }",
            &ctx,
        )
        .unwrap();
        assert_eq!(parse_theory(&t.to_string(), &ctx).unwrap(), t);
    }
}
