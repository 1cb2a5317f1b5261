//! Enumeration of terms, atoms and quantifier-free positive formulas in a
//! fixed, reproducible order: fewer atoms first, then lexicographic in the
//! atom order.

use std::cmp::Ordering;

use crate::error::CheckError;
use crate::structures::advance_odometer;

use super::{Atom, PositiveFormula, Signature, Term};

/// Shallower terms first, then structural order.
fn term_cmp(a: &Term, b: &Term) -> Ordering {
    a.depth().cmp(&b.depth()).then_with(|| a.cmp(b))
}

fn atom_key(a: &Atom) -> (usize, usize) {
    let depth = a.terms().iter().map(|t| t.depth()).max().unwrap_or(0);
    let kind = matches!(a, Atom::Rel(..)) as usize;
    (depth, kind)
}

fn atom_cmp(a: &Atom, b: &Atom) -> Ordering {
    atom_key(a).cmp(&atom_key(b)).then_with(|| a.cmp(b))
}

/// Orients an equation so the smaller side (in term order) is on the left.
pub fn canonical_atom(atom: &Atom) -> Atom {
    match atom {
        Atom::Eq(l, r) if term_cmp(r, l) == Ordering::Less => Atom::Eq(r.clone(), l.clone()),
        other => other.clone(),
    }
}

/// All terms of depth at most `max_depth` built from the variables `vars`
/// and the constants of `sig`, sorted by depth and then structure.
pub fn enumerate_terms(sig: &Signature, vars: &[String], max_depth: usize) -> Vec<Term> {
    let mut all: Vec<Term> = vars.iter().map(|v| Term::Var(v.clone())).collect();
    all.extend(sig.constants().iter().map(|c| Term::Const(c.clone())));
    let mut frontier_start = 0;
    for _ in 0..max_depth {
        if all.is_empty() {
            break;
        }
        let previous = all.clone();
        let mut fresh = Vec::new();
        for (g, arity) in sig.functions() {
            let mut idx = vec![0usize; *arity];
            loop {
                // at least one argument from the last layer keeps layers disjoint
                if idx.iter().any(|&i| i >= frontier_start) {
                    fresh.push(Term::App(g.clone(), idx.iter().map(|&i| previous[i].clone()).collect()));
                }
                if !advance_odometer(&mut idx, previous.len()) {
                    break;
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        frontier_start = previous.len();
        all.extend(fresh);
    }
    all.sort_by(term_cmp);
    all.dedup();
    all
}

/// Every atom over the terms of [`enumerate_terms`], equations oriented by
/// [`canonical_atom`] and trivial equations `t = t` included.
pub fn enumerate_atoms(sig: &Signature, vars: &[String], max_term_depth: usize) -> Vec<Atom> {
    let terms = enumerate_terms(sig, vars, max_term_depth);
    let mut atoms = Vec::new();
    for i in 0..terms.len() {
        for j in i..terms.len() {
            atoms.push(Atom::Eq(terms[i].clone(), terms[j].clone()));
        }
    }
    for (r, arity) in sig.relations().iter().filter(|_| !terms.is_empty()) {
        let mut idx = vec![0usize; *arity];
        loop {
            atoms.push(Atom::Rel(r.clone(), idx.iter().map(|&i| terms[i].clone()).collect()));
            if !advance_odometer(&mut idx, terms.len()) {
                break;
            }
        }
    }
    atoms.sort_by(atom_cmp);
    atoms
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QfShape {
    ConjunctionOfAtoms,
    DisjunctionOfAtoms,
}

/// Lazily yields each set of `1..=max_atoms` distinct atoms, combined by
/// the chosen connective.
pub struct QfFormulas {
    atoms: Vec<Atom>,
    shape: QfShape,
    max_atoms: usize,
    current: Vec<usize>,
}

impl QfFormulas {
    /// The atom pool the formulas are drawn from.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn step(&mut self) -> bool {
        let n = self.atoms.len();
        let k = self.current.len();
        // next k-combination in lex order
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.current[i] < n - (k - i) {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return true;
            }
        }
        if k < self.max_atoms && k < n {
            self.current = (0..=k).collect();
            return true;
        }
        false
    }
}

impl Iterator for QfFormulas {
    type Item = PositiveFormula;

    fn next(&mut self) -> Option<PositiveFormula> {
        if self.current.is_empty() {
            if self.atoms.is_empty() {
                return None;
            }
            self.current = vec![0];
        } else if !self.step() {
            self.max_atoms = 0;
            return None;
        }
        if self.max_atoms == 0 {
            return None;
        }
        let parts: Vec<PositiveFormula> = self.current.iter().map(|&i| PositiveFormula::Atom(self.atoms[i].clone())).collect();
        Some(match self.shape {
            QfShape::ConjunctionOfAtoms => PositiveFormula::and(parts),
            QfShape::DisjunctionOfAtoms => PositiveFormula::or(parts),
        })
    }
}

pub fn enumerate_qf_positive(
    sig: &Signature,
    vars: &[String],
    shape: QfShape,
    max_atoms: usize,
    max_term_depth: usize,
) -> Result<QfFormulas, CheckError> {
    if max_atoms == 0 {
        return Err(CheckError::Precondition("max_atoms must be at least 1".into()));
    }
    let atoms = enumerate_atoms(sig, vars, max_term_depth);
    Ok(QfFormulas { atoms, shape, max_atoms, current: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Independent count of terms: depth-0 leaves `l`, then each layer adds
    /// every application not already present.
    fn count_terms(leaves: usize, arities: &[usize], depth: usize) -> usize {
        let mut total = leaves;
        let mut below: usize = 0;
        for _ in 0..depth {
            let upto = total;
            let mut fresh = 0;
            for &a in arities {
                fresh += upto.pow(a as u32) - below.pow(a as u32);
            }
            below = upto;
            total += fresh;
        }
        total
    }

    #[test]
    fn unary_terms_and_atoms() {
        let sig = Signature::new("S").with_function("f", 1).unwrap();
        let vars = vec!["x".to_string()];
        let terms = enumerate_terms(&sig, &vars, 1);
        assert_eq!(terms.iter().map(|t| t.to_string()).collect::<Vec<_>>(), ["x", "f(x)"]);
        let atoms = enumerate_atoms(&sig, &vars, 1);
        let printed: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
        assert_eq!(printed, ["x = x", "x = f(x)", "f(x) = f(x)"]);
    }

    #[test]
    fn counts_match_independent_formulae() {
        let sig = Signature::new("S")
            .with_function("f", 1)
            .unwrap()
            .with_function("g", 2)
            .unwrap()
            .with_relation("R", 2)
            .unwrap()
            .with_constant("c")
            .unwrap();
        let vars: Vec<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        for depth in 0..=2 {
            let terms = enumerate_terms(&sig, &vars, depth);
            let t = count_terms(3, &[1, 2], depth);
            assert_eq!(terms.len(), t);
            let atoms = enumerate_atoms(&sig, &vars, depth);
            assert_eq!(atoms.len(), t * (t + 1) / 2 + t * t);
        }
        let atoms = enumerate_atoms(&sig, &vars, 0).len();
        for max in 1..=3 {
            let n = enumerate_qf_positive(&sig, &vars, QfShape::ConjunctionOfAtoms, max, 0).unwrap().count();
            assert_eq!(n, (1..=max).map(|k| binom(atoms, k)).sum::<usize>());
        }
    }

    #[test]
    fn fewer_atoms_first() {
        let sig = Signature::new("S").with_function("f", 1).unwrap();
        let vars = vec!["x".to_string()];
        let sizes: Vec<usize> =
            enumerate_qf_positive(&sig, &vars, QfShape::DisjunctionOfAtoms, 3, 1).unwrap().map(|f| f.atom_count()).collect();
        assert_eq!(sizes, [1, 1, 1, 2, 2, 2, 3]);
        assert!(enumerate_qf_positive(&sig, &vars, QfShape::DisjunctionOfAtoms, 0, 1).is_err());
    }
}
