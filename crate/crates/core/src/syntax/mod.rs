//! Signatures, terms and the positive / h-inductive formula family.
//!
//! Positivity is enforced by construction: [`PositiveFormula`] has no node for
//! negation, implication or universal quantification. The only places where
//! those appear are the top-level shapes of [`HInductiveSentence`] (an
//! implication under a universal prefix) and [`CompanionAxiom`].

mod enumerate;
mod parser;
mod print;

pub use enumerate::{canonical_atom, enumerate_atoms, enumerate_qf_positive, enumerate_terms, QfShape};
pub use parser::{
    parse, parse_document, parse_formula, parse_sentence, parse_signature, parse_structure, parse_theory, Document, ParseContext, Parsed,
    ParsedKind,
};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::SortError;

/// A single-sorted first-order signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub name: String,
    functions: Vec<(String, usize)>,
    relations: Vec<(String, usize)>,
    constants: Vec<String>,
}

/// What a symbol names in a signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Function(usize),
    Relation(usize),
    Constant,
}

impl Signature {
    pub fn new(name: impl Into<String>) -> Self {
        Signature { name: name.into(), functions: Vec::new(), relations: Vec::new(), constants: Vec::new() }
    }

    pub fn with_function(mut self, symbol: &str, arity: usize) -> Result<Self, SortError> {
        self.check_fresh(symbol)?;
        if arity == 0 {
            return Err(SortError::ZeroArity(symbol.to_string()));
        }
        self.functions.push((symbol.to_string(), arity));
        Ok(self)
    }

    pub fn with_relation(mut self, symbol: &str, arity: usize) -> Result<Self, SortError> {
        self.check_fresh(symbol)?;
        if arity == 0 {
            return Err(SortError::ZeroArity(symbol.to_string()));
        }
        self.relations.push((symbol.to_string(), arity));
        Ok(self)
    }

    pub fn with_constant(mut self, symbol: &str) -> Result<Self, SortError> {
        self.check_fresh(symbol)?;
        self.constants.push(symbol.to_string());
        Ok(self)
    }

    fn check_fresh(&self, symbol: &str) -> Result<(), SortError> {
        if self.kind_of(symbol).is_some() {
            return Err(SortError::DuplicateSymbol(symbol.to_string()));
        }
        Ok(())
    }

    pub fn functions(&self) -> &[(String, usize)] {
        &self.functions
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn kind_of(&self, symbol: &str) -> Option<SymbolKind> {
        if let Some((_, a)) = self.functions.iter().find(|(s, _)| s == symbol) {
            return Some(SymbolKind::Function(*a));
        }
        if let Some((_, a)) = self.relations.iter().find(|(s, _)| s == symbol) {
            return Some(SymbolKind::Relation(*a));
        }
        if self.constants.iter().any(|c| c == symbol) {
            return Some(SymbolKind::Constant);
        }
        None
    }

    pub fn function_index(&self, symbol: &str) -> Option<usize> {
        self.functions.iter().position(|(s, _)| s == symbol)
    }

    pub fn relation_index(&self, symbol: &str) -> Option<usize> {
        self.relations.iter().position(|(s, _)| s == symbol)
    }

    pub fn constant_index(&self, symbol: &str) -> Option<usize> {
        self.constants.iter().position(|s| s == symbol)
    }

    /// L(A): the signature extended by one fresh constant per name in `elements`.
    /// Constant names are `c_<element>`, with underscores appended on clashes.
    pub fn expand_with_constants(&self, elements: &[String]) -> (Signature, Vec<String>) {
        let mut sig = self.clone();
        sig.name = format!("{}_expanded", self.name);
        let mut names = Vec::with_capacity(elements.len());
        for e in elements {
            let mut name = format!("c_{e}");
            while sig.kind_of(&name).is_some() {
                name.push('_');
            }
            sig.constants.push(name.clone());
            names.push(name);
        }
        (sig, names)
    }
}

/// A first-order term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.to_string(), args)
    }

    /// `f(f(...f(t)))` with `k` applications.
    pub fn iterate(f: &str, k: usize, t: Term) -> Term {
        (0..k).fold(t, |acc, _| Term::app(f, vec![acc]))
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn check_sorts(&self, sig: &Signature) -> Result<(), SortError> {
        match self {
            Term::Var(_) => Ok(()),
            Term::Const(c) => match sig.kind_of(c) {
                Some(SymbolKind::Constant) => Ok(()),
                _ => Err(SortError::UnknownSymbol(c.clone())),
            },
            Term::App(f, args) => {
                match sig.kind_of(f) {
                    Some(SymbolKind::Function(a)) if a == args.len() => {}
                    Some(SymbolKind::Function(a)) => return Err(SortError::Arity { symbol: f.clone(), expected: a, found: args.len() }),
                    _ => return Err(SortError::UnknownSymbol(f.clone())),
                }
                args.iter().try_for_each(|t| t.check_sorts(sig))
            }
        }
    }

    pub fn rename(&self, map: &dyn Fn(&str) -> Option<String>) -> Term {
        match self {
            Term::Var(v) => Term::Var(map(v).unwrap_or_else(|| v.clone())),
            Term::Const(c) => Term::Const(c.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename(map)).collect()),
        }
    }
}

/// Atomic formula: built-in equality or a relation application.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
}

impl Atom {
    pub fn eq(l: Term, r: Term) -> Atom {
        Atom::Eq(l, r)
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Eq(l, r) => vec![l, r],
            Atom::Rel(_, args) => args.iter().collect(),
        }
    }

    pub fn check_sorts(&self, sig: &Signature) -> Result<(), SortError> {
        match self {
            Atom::Eq(l, r) => {
                l.check_sorts(sig)?;
                r.check_sorts(sig)
            }
            Atom::Rel(r, args) => {
                match sig.kind_of(r) {
                    Some(SymbolKind::Relation(a)) if a == args.len() => {}
                    Some(SymbolKind::Relation(a)) => return Err(SortError::Arity { symbol: r.clone(), expected: a, found: args.len() }),
                    _ => return Err(SortError::UnknownSymbol(r.clone())),
                }
                args.iter().try_for_each(|t| t.check_sorts(sig))
            }
        }
    }

    pub fn rename(&self, map: &dyn Fn(&str) -> Option<String>) -> Atom {
        match self {
            Atom::Eq(l, r) => Atom::Eq(l.rename(map), r.rename(map)),
            Atom::Rel(s, args) => Atom::Rel(s.clone(), args.iter().map(|a| a.rename(map)).collect()),
        }
    }
}

/// A formula built from atoms with conjunction, disjunction and existential
/// quantification. `And(vec![])` is `true`, `Or(vec![])` is `false`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PositiveFormula {
    Atom(Atom),
    And(Vec<PositiveFormula>),
    Or(Vec<PositiveFormula>),
    Exists(Vec<String>, Box<PositiveFormula>),
}

impl PositiveFormula {
    pub fn truth() -> Self {
        PositiveFormula::And(Vec::new())
    }

    pub fn falsity() -> Self {
        PositiveFormula::Or(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        PositiveFormula::Atom(a)
    }

    /// Conjunction that collapses a single conjunct to itself.
    pub fn and(mut parts: Vec<PositiveFormula>) -> Self {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            PositiveFormula::And(parts)
        }
    }

    /// Disjunction that collapses a single disjunct to itself.
    pub fn or(mut parts: Vec<PositiveFormula>) -> Self {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            PositiveFormula::Or(parts)
        }
    }

    /// Existential closure over `vars`; no node is created for an empty list.
    pub fn exists(vars: Vec<String>, body: PositiveFormula) -> Self {
        if vars.is_empty() {
            body
        } else {
            PositiveFormula::Exists(vars, Box::new(body))
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, PositiveFormula::And(v) if v.is_empty())
    }

    pub fn is_false(&self) -> bool {
        matches!(self, PositiveFormula::Or(v) if v.is_empty())
    }

    pub fn quantifier_free(&self) -> bool {
        match self {
            PositiveFormula::Atom(_) => true,
            PositiveFormula::And(v) | PositiveFormula::Or(v) => v.iter().all(Self::quantifier_free),
            PositiveFormula::Exists(..) => false,
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            PositiveFormula::Atom(_) => 0,
            PositiveFormula::And(v) | PositiveFormula::Or(v) => v.iter().map(Self::quantifier_depth).max().unwrap_or(0),
            PositiveFormula::Exists(vs, b) => vs.len() + b.quantifier_depth(),
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            PositiveFormula::Atom(_) => 1,
            PositiveFormula::And(v) | PositiveFormula::Or(v) => v.iter().map(Self::atom_count).sum(),
            PositiveFormula::Exists(_, b) => b.atom_count(),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            PositiveFormula::Atom(a) => out.push(a),
            PositiveFormula::And(v) | PositiveFormula::Or(v) => v.iter().for_each(|f| f.collect_atoms(out)),
            PositiveFormula::Exists(_, b) => b.collect_atoms(out),
        }
    }

    /// Free variables in sorted order.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            PositiveFormula::Atom(a) => {
                let mut vs = BTreeSet::new();
                a.terms().iter().for_each(|t| t.collect_vars(&mut vs));
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            PositiveFormula::And(v) | PositiveFormula::Or(v) => v.iter().for_each(|f| f.collect_free(bound, out)),
            PositiveFormula::Exists(vs, b) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                b.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    pub fn check_sorts(&self, sig: &Signature) -> Result<(), SortError> {
        self.atoms().into_iter().try_for_each(|a| a.check_sorts(sig))
    }

    /// Renames free variables according to `map`. Bound variables are left
    /// untouched, so callers must pick targets that do not collide with them.
    pub fn rename_free(&self, map: &dyn Fn(&str) -> Option<String>) -> PositiveFormula {
        fn go(f: &PositiveFormula, bound: &mut Vec<String>, map: &dyn Fn(&str) -> Option<String>) -> PositiveFormula {
            match f {
                PositiveFormula::Atom(a) => {
                    let m = |v: &str| if bound.iter().any(|b| b == v) { None } else { map(v) };
                    PositiveFormula::Atom(a.rename(&m))
                }
                PositiveFormula::And(v) => PositiveFormula::And(v.iter().map(|g| go(g, bound, map)).collect()),
                PositiveFormula::Or(v) => PositiveFormula::Or(v.iter().map(|g| go(g, bound, map)).collect()),
                PositiveFormula::Exists(vs, b) => {
                    let n = bound.len();
                    bound.extend(vs.iter().cloned());
                    let body = go(b, bound, map);
                    bound.truncate(n);
                    PositiveFormula::Exists(vs.clone(), Box::new(body))
                }
            }
        }
        go(self, &mut Vec::new(), map)
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(f: &PositiveFormula, out: &mut BTreeSet<String>) {
            match f {
                PositiveFormula::Atom(a) => a.terms().iter().for_each(|t| t.collect_vars(out)),
                PositiveFormula::And(v) | PositiveFormula::Or(v) => v.iter().for_each(|g| go(g, out)),
                PositiveFormula::Exists(vs, b) => {
                    out.extend(vs.iter().cloned());
                    go(b, out);
                }
            }
        }
        go(self, &mut out);
        out
    }
}

/// `∀ vars (antecedent → consequent)` with both sides positive.
///
/// With `antecedent = true` this is a positive sentence; with
/// `consequent = false` it is h-universal (`¬∃ vars antecedent`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HInductiveSentence {
    pub vars: Vec<String>,
    pub antecedent: PositiveFormula,
    pub consequent: PositiveFormula,
}

impl HInductiveSentence {
    pub fn new(vars: Vec<String>, antecedent: PositiveFormula, consequent: PositiveFormula) -> Result<Self, SortError> {
        let s = HInductiveSentence { vars, antecedent, consequent };
        s.check_closed()?;
        Ok(s)
    }

    /// `¬∃ free(φ). φ`, with the free variables of `φ` universally closed.
    pub fn h_universal(body: PositiveFormula) -> Self {
        let vars = body.free_vars().into_iter().collect();
        HInductiveSentence { vars, antecedent: body, consequent: PositiveFormula::falsity() }
    }

    pub fn is_h_universal(&self) -> bool {
        self.consequent.is_false()
    }

    pub fn check_closed(&self) -> Result<(), SortError> {
        for side in [&self.antecedent, &self.consequent] {
            if let Some(v) = side.free_vars().into_iter().find(|v| !self.vars.contains(v)) {
                return Err(SortError::UnboundVariable(v));
            }
        }
        Ok(())
    }

    pub fn check_sorts(&self, sig: &Signature) -> Result<(), SortError> {
        self.antecedent.check_sorts(sig)?;
        self.consequent.check_sorts(sig)
    }
}

/// `∀x̄ (ψ(x̄) ∨ ∃ȳ (θ1(x̄,ȳ) ∧ ¬θ2(x̄,ȳ)))`.
///
/// Inductive but not h-inductive; only ever evaluated directly on finite
/// structures.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompanionAxiom {
    pub vars: Vec<String>,
    pub psi: PositiveFormula,
    pub witness_vars: Vec<String>,
    pub theta1: PositiveFormula,
    pub theta2: PositiveFormula,
}

impl CompanionAxiom {
    pub fn check_closed(&self) -> Result<(), SortError> {
        if let Some(v) = self.psi.free_vars().into_iter().find(|v| !self.vars.contains(v)) {
            return Err(SortError::UnboundVariable(v));
        }
        for side in [&self.theta1, &self.theta2] {
            if let Some(v) = side.free_vars().into_iter().find(|v| !self.vars.contains(v) && !self.witness_vars.contains(v)) {
                return Err(SortError::UnboundVariable(v));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NamedAxiom {
    pub name: String,
    pub sentence: HInductiveSentence,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NamedCompanionAxiom {
    pub name: String,
    pub axiom: CompanionAxiom,
}

/// A named set of h-inductive axioms over a signature, optionally extended by
/// companion axioms (see [`CompanionAxiom`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Theory {
    pub name: String,
    pub signature: Arc<Signature>,
    pub axioms: Vec<NamedAxiom>,
    pub companion_axioms: Vec<NamedCompanionAxiom>,
}

impl Theory {
    pub fn new(name: impl Into<String>, signature: Arc<Signature>) -> Self {
        Theory { name: name.into(), signature, axioms: Vec::new(), companion_axioms: Vec::new() }
    }

    pub fn with_axiom(mut self, name: &str, sentence: HInductiveSentence) -> Result<Self, SortError> {
        sentence.check_sorts(&self.signature)?;
        sentence.check_closed()?;
        self.axioms.push(NamedAxiom { name: name.to_string(), sentence });
        Ok(self)
    }

    pub fn with_companion_axiom(mut self, name: &str, axiom: CompanionAxiom) -> Result<Self, SortError> {
        axiom.psi.check_sorts(&self.signature)?;
        axiom.theta1.check_sorts(&self.signature)?;
        axiom.theta2.check_sorts(&self.signature)?;
        axiom.check_closed()?;
        self.companion_axioms.push(NamedCompanionAxiom { name: name.to_string(), axiom });
        Ok(self)
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Function(a) => write!(f, "function/{a}"),
            SymbolKind::Relation(a) => write!(f, "relation/{a}"),
            SymbolKind::Constant => write!(f, "constant"),
        }
    }
}
