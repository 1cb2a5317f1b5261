//! Constant expansions L(A) and the atomic / literal diagrams of a finite
//! structure.

use std::fmt;
use std::sync::Arc;

use crate::syntax::{enumerate_atoms, Atom, PositiveFormula, Term};

use super::{all_tuples, tuple_at, CompiledFormula, FinStructure};

/// An atomic sentence or its negation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "not ({})", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

/// `A` as an L(A)-structure: one fresh constant per element, named after
/// it. Returns the expanded structure and the constant naming each element.
pub fn expand_with_constants(a: &FinStructure) -> (FinStructure, Vec<String>) {
    let (sig, names) = a.signature().expand_with_constants(a.elements());
    let mut constants = a.constants().to_vec();
    constants.extend(0..a.size());
    let relations = (0..a.signature().relations().len()).map(|ri| a.relation_table(ri).to_vec()).collect();
    let functions = (0..a.signature().functions().len()).map(|fi| a.function_table(fi).to_vec()).collect();
    let expanded =
        FinStructure::from_tables(format!("{}_expanded", a.name), Arc::new(sig), a.elements().to_vec(), functions, relations, constants)
            .expect("expansion of a valid structure is valid");
    (expanded, names)
}

/// Atomic facts of `A` over L(A): `c_a = c_a`, `f(c_ā) = c_b`, `R(c_ā)` and
/// `c = c_a` for the original constants. Every true atomic L(A)-sentence
/// follows from these by congruence.
pub fn diag_plus(a: &FinStructure) -> Vec<Atom> {
    let (_, names) = expand_with_constants(a);
    let n = a.size();
    let c = |i: usize| Term::Const(names[i].clone());
    let mut out: Vec<Atom> = (0..n).map(|i| Atom::Eq(c(i), c(i))).collect();
    for (fi, (g, arity)) in a.signature().functions().iter().enumerate() {
        for (idx, &v) in a.function_table(fi).iter().enumerate() {
            let args = tuple_at(n, *arity, idx).into_iter().map(c).collect();
            out.push(Atom::Eq(Term::App(g.clone(), args), c(v)));
        }
    }
    for (ri, (r, arity)) in a.signature().relations().iter().enumerate() {
        for t in all_tuples(n, *arity) {
            if a.holds(ri, &t) {
                out.push(Atom::Rel(r.clone(), t.into_iter().map(c).collect()));
            }
        }
    }
    for (ci, k) in a.signature().constants().iter().enumerate() {
        out.push(Atom::Eq(Term::Const(k.clone()), c(a.constant(ci))));
    }
    out
}

/// Every atomic L(A)-sentence with terms of depth at most `depth`, each
/// with its truth value in `A` (false ones negated).
pub fn diag(a: &FinStructure, depth: usize) -> Vec<Literal> {
    let (expanded, _) = expand_with_constants(a);
    let sig = expanded.signature().clone();
    enumerate_atoms(&sig, &[], depth)
        .into_iter()
        .map(|atom| {
            let formula = PositiveFormula::Atom(atom.clone());
            let holds = CompiledFormula::compile(&sig, &formula, &[]).expect("well-sorted").eval(&expanded, &[]);
            Literal { atom, negated: !holds }
        })
        .collect()
}
