//! Finite structures and the semantic operations on them.

mod canon;
mod diagram;
mod enumerate;
mod eval;
mod json;

pub use canon::{canonical_code, canonical_form, CanonicalForm};
pub use diagram::{diag, diag_plus, expand_with_constants, Literal};
pub use enumerate::{enumerate_models, enumerate_structures, EnumLimits, ModelSet, ModelStream};
pub(crate) use eval::advance as advance_odometer;
pub use eval::{
    eval_positive, satisfies, satisfies_companion, satisfies_theory, violation, CompiledFormula, CompiledSentence, Interpretation, Truth,
};
pub use json::{DiagramJson, StructureJson};

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::StructureError;
use crate::syntax::Signature;

/// Row-major index of `args` in a table over a universe of size `n`.
#[inline]
pub fn tuple_index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

/// Inverse of [`tuple_index`].
pub fn tuple_at(n: usize, arity: usize, mut index: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

/// All tuples of length `arity` over `0..n` in lexicographic order.
pub fn all_tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.checked_pow(arity as u32).expect("tuple space overflow");
    (0..total).map(move |i| tuple_at(n, arity, i))
}

/// A finite L-structure with total function tables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinStructure {
    pub name: String,
    signature: Arc<Signature>,
    elements: Vec<String>,
    functions: Vec<Vec<usize>>,
    relations: Vec<Vec<bool>>,
    constants: Vec<usize>,
}

impl FinStructure {
    /// Builds a structure from raw tables, checking every invariant.
    pub fn from_tables(
        name: impl Into<String>,
        signature: Arc<Signature>,
        elements: Vec<String>,
        functions: Vec<Vec<usize>>,
        relations: Vec<Vec<bool>>,
        constants: Vec<usize>,
    ) -> Result<Self, StructureError> {
        let n = elements.len();
        if n == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(StructureError::DuplicateElement(e.clone()));
            }
        }
        let sig_f = signature.functions();
        if functions.len() != sig_f.len() {
            return Err(StructureError::NotTotal { symbol: "<functions>".into(), args: String::new() });
        }
        for ((sym, arity), table) in sig_f.iter().zip(&functions) {
            if table.len() != n.pow(*arity as u32) {
                return Err(StructureError::NotTotal { symbol: sym.clone(), args: "..".into() });
            }
            if let Some(&v) = table.iter().find(|&&v| v >= n) {
                return Err(StructureError::UnknownElement(format!("#{v}")));
            }
        }
        let sig_r = signature.relations();
        if relations.len() != sig_r.len() {
            return Err(StructureError::UnknownElement("<relations>".into()));
        }
        for ((_, arity), table) in sig_r.iter().zip(&relations) {
            if table.len() != n.pow(*arity as u32) {
                return Err(StructureError::UnknownElement("<relation table>".into()));
            }
        }
        if constants.len() != signature.constants().len() {
            let missing = signature.constants().get(constants.len()).cloned().unwrap_or_default();
            return Err(StructureError::MissingConstant(missing));
        }
        if let Some(&v) = constants.iter().find(|&&v| v >= n) {
            return Err(StructureError::UnknownElement(format!("#{v}")));
        }
        Ok(FinStructure { name: name.into(), signature, elements, functions, relations, constants })
    }

    /// Structure over a signature with one unary function and nothing else.
    pub fn unary(name: &str, signature: Arc<Signature>, elements: &[&str], table: &[usize]) -> Result<Self, StructureError> {
        let rels = signature.relations().iter().map(|(_, a)| vec![false; elements.len().pow(*a as u32)]).collect();
        FinStructure::from_tables(name, signature, elements.iter().map(|s| s.to_string()).collect(), vec![table.to_vec()], rels, Vec::new())
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    #[inline]
    pub fn apply(&self, function: usize, args: &[usize]) -> usize {
        self.functions[function][tuple_index(self.size(), args)]
    }

    #[inline]
    pub fn holds(&self, relation: usize, args: &[usize]) -> bool {
        self.relations[relation][tuple_index(self.size(), args)]
    }

    #[inline]
    pub fn constant(&self, c: usize) -> usize {
        self.constants[c]
    }

    pub fn function_table(&self, function: usize) -> &[usize] {
        &self.functions[function]
    }

    pub fn relation_table(&self, relation: usize) -> &[bool] {
        &self.relations[relation]
    }

    pub fn constants(&self) -> &[usize] {
        &self.constants
    }

    pub fn function_arity(&self, function: usize) -> usize {
        self.signature.functions()[function].1
    }

    pub fn relation_arity(&self, relation: usize) -> usize {
        self.signature.relations()[relation].1
    }

    /// Tuples in the interpretation of `relation`, lexicographically.
    pub fn relation_tuples(&self, relation: usize) -> Vec<Vec<usize>> {
        let n = self.size();
        let arity = self.relation_arity(relation);
        self.relations[relation].iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| tuple_at(n, arity, i)).collect()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Renames elements; `names` must have one distinct entry per element.
    pub fn with_element_names(mut self, names: Vec<String>) -> Result<Self, StructureError> {
        if names.len() != self.size() {
            return Err(StructureError::UnknownElement("<rename>".into()));
        }
        for (i, e) in names.iter().enumerate() {
            if names[..i].contains(e) {
                return Err(StructureError::DuplicateElement(e.clone()));
            }
        }
        self.elements = names;
        Ok(self)
    }

    /// The isomorphic copy in which element `i` becomes element `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> FinStructure {
        let n = self.size();
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let mut elements = vec![String::new(); n];
        for (i, &p) in perm.iter().enumerate() {
            elements[p] = self.elements[i].clone();
        }
        let functions = self
            .functions
            .iter()
            .enumerate()
            .map(|(fi, table)| {
                let arity = self.function_arity(fi);
                (0..table.len())
                    .map(|idx| {
                        let args: Vec<usize> = tuple_at(n, arity, idx).into_iter().map(|a| inv[a]).collect();
                        perm[self.apply(fi, &args)]
                    })
                    .collect()
            })
            .collect();
        let relations = self
            .relations
            .iter()
            .enumerate()
            .map(|(ri, table)| {
                let arity = self.relation_arity(ri);
                (0..table.len())
                    .map(|idx| {
                        let args: Vec<usize> = tuple_at(n, arity, idx).into_iter().map(|a| inv[a]).collect();
                        self.holds(ri, &args)
                    })
                    .collect()
            })
            .collect();
        let constants = self.constants.iter().map(|&c| perm[c]).collect();
        FinStructure { name: self.name.clone(), signature: self.signature.clone(), elements, functions, relations, constants }
    }

    /// Disjoint union. Constants are taken from `self`; clashing element
    /// names from `other` are primed until fresh.
    pub fn disjoint_union(&self, other: &FinStructure, name: impl Into<String>) -> FinStructure {
        assert_eq!(self.signature, other.signature, "disjoint union across signatures");
        let (n, m) = (self.size(), other.size());
        let total = n + m;
        let mut elements = self.elements.clone();
        for e in &other.elements {
            let mut e = e.clone();
            while elements.contains(&e) {
                e.push('\'');
            }
            elements.push(e);
        }
        let side = |i: usize| if i < n { (0, i) } else { (1, i - n) };
        let functions = (0..self.functions.len())
            .map(|fi| {
                let arity = self.function_arity(fi);
                all_tuples(total, arity)
                    .map(|args| {
                        let sides: Vec<(usize, usize)> = args.iter().map(|&a| side(a)).collect();
                        if sides.iter().all(|s| s.0 == 0) {
                            self.apply(fi, &sides.iter().map(|s| s.1).collect::<Vec<_>>())
                        } else if sides.iter().all(|s| s.0 == 1) {
                            n + other.apply(fi, &sides.iter().map(|s| s.1).collect::<Vec<_>>())
                        } else {
                            // mixed tuples: send to the first argument
                            args[0]
                        }
                    })
                    .collect()
            })
            .collect();
        let relations = (0..self.relations.len())
            .map(|ri| {
                let arity = self.relation_arity(ri);
                all_tuples(total, arity)
                    .map(|args| {
                        let sides: Vec<(usize, usize)> = args.iter().map(|&a| side(a)).collect();
                        if sides.iter().all(|s| s.0 == 0) {
                            self.holds(ri, &sides.iter().map(|s| s.1).collect::<Vec<_>>())
                        } else if sides.iter().all(|s| s.0 == 1) {
                            other.holds(ri, &sides.iter().map(|s| s.1).collect::<Vec<_>>())
                        } else {
                            false
                        }
                    })
                    .collect()
            })
            .collect();
        FinStructure {
            name: name.into(),
            signature: self.signature.clone(),
            elements,
            functions,
            relations,
            constants: self.constants.clone(),
        }
    }
}

/// Partial map from variable names to elements of one structure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<String, usize>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn with(mut self, var: &str, element: usize) -> Self {
        self.0.insert(var.to_string(), element);
        self
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, usize)>) -> Self {
        Assignment(pairs.into_iter().map(|(v, e)| (v.to_string(), e)).collect())
    }

    pub fn zip(vars: &[String], values: &[usize]) -> Self {
        Assignment(vars.iter().cloned().zip(values.iter().copied()).collect())
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.0.get(var).copied()
    }

    pub fn insert(&mut self, var: &str, element: usize) {
        self.0.insert(var.to_string(), element);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &usize)> {
        self.0.iter()
    }

    /// Variable/element-name pairs for reports.
    pub fn named(&self, structure: &FinStructure) -> Vec<(String, String)> {
        self.0.iter().map(|(v, &e)| (v.clone(), structure.element_name(e).to_string())).collect()
    }
}

/// Fixture builders used by the corpus, tests and benches.
pub mod fixtures {
    use super::*;

    /// `{f/1}`.
    pub fn unary_signature() -> Arc<Signature> {
        Arc::new(Signature::new("Unary").with_function("f", 1).expect("fresh"))
    }

    /// Disjoint union of cycles of the given lengths (a length-1 cycle is a
    /// fixed point). Elements are named `c{i}_{j}` for the `j`-th element of
    /// the `i`-th cycle, except single fixed points which are named `e{i}`.
    pub fn cycles(name: &str, signature: Arc<Signature>, lengths: &[usize]) -> FinStructure {
        let mut names = Vec::new();
        let mut table = Vec::new();
        for (ci, &k) in lengths.iter().enumerate() {
            let base = table.len();
            for j in 0..k {
                names.push(if k == 1 { format!("e{ci}") } else { format!("c{ci}_{j}") });
                table.push(base + (j + 1) % k);
            }
        }
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        FinStructure::unary(name, signature, &refs, &table).expect("valid cycle structure")
    }
}
