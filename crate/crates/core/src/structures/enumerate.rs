//! Enumeration of the finite models of a theory, one representative per
//! isomorphism class.
//!
//! For each size the tables are filled cell by cell (function cells, then
//! constants, then relation bits). A value for a function cell or constant
//! is drawn from the elements already mentioned plus one fresh element:
//! fresh elements are interchangeable, so trying one of them suffices. After
//! every assignment the axioms are evaluated three-valuedly on the partial
//! tables and the branch is cut as soon as one is definitely false. Complete
//! models are deduplicated by canonical code and emitted in code order,
//! relabelled canonically with elements `e0 .. e{n-1}`.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;
use std::time::Instant;

use crate::error::CheckError;
use crate::syntax::{Signature, Theory};

use super::eval::{CompiledSentence, Interpretation, Truth};
use super::{canonical_form, satisfies_companion, tuple_at, tuple_index, FinStructure};

/// The models found up to a size bound.
#[derive(Clone, Debug)]
pub struct ModelSet {
    pub theory: String,
    pub max_size: usize,
    pub models: Vec<FinStructure>,
    /// The node or time budget ran out; `models` is incomplete.
    pub truncated: bool,
    pub nodes: u64,
}

impl ModelSet {
    pub fn of_size(&self, n: usize) -> impl Iterator<Item = &FinStructure> {
        self.models.iter().filter(move |m| m.size() == n)
    }
}

/// Limits for one enumeration. `max_nodes` counts assignments tried.
#[derive(Clone, Copy, Debug)]
pub struct EnumLimits {
    pub max_nodes: u64,
    pub deadline: Option<Instant>,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_nodes: u64::MAX, deadline: None }
    }
}

#[derive(Clone, Copy, Debug)]
enum Cell {
    Func(usize, usize),
    Const(usize),
    Rel(usize, usize),
}

struct Partial {
    n: usize,
    functions: Vec<Vec<Option<usize>>>,
    relations: Vec<Vec<Option<bool>>>,
    constants: Vec<Option<usize>>,
}

impl Interpretation for Partial {
    fn size(&self) -> usize {
        self.n
    }
    fn apply(&self, function: usize, args: &[usize]) -> Option<usize> {
        self.functions[function][tuple_index(self.n, args)]
    }
    fn holds(&self, relation: usize, args: &[usize]) -> Option<bool> {
        self.relations[relation][tuple_index(self.n, args)]
    }
    fn constant(&self, c: usize) -> Option<usize> {
        self.constants[c]
    }
}

struct SizeSearch<'a> {
    theory: &'a Theory,
    sentences: &'a [CompiledSentence],
    cells: Vec<(Cell, Vec<usize>)>,
    partial: Partial,
    seen: HashSet<Vec<u32>>,
    found: Vec<(Vec<u32>, FinStructure)>,
    nodes: &'a mut u64,
    limits: EnumLimits,
    truncated: bool,
}

impl SizeSearch<'_> {
    fn consistent(&self) -> bool {
        self.sentences.iter().all(|s| s.check_partial(&self.partial) != Truth::False)
    }

    fn out_of_budget(&mut self) -> bool {
        *self.nodes += 1;
        if *self.nodes > self.limits.max_nodes {
            self.truncated = true;
        }
        if (*self.nodes).is_multiple_of(4096) && self.limits.deadline.is_some_and(|d| Instant::now() >= d) {
            self.truncated = true;
        }
        self.truncated
    }

    fn set(&mut self, cell: Cell, value: Option<usize>) {
        match cell {
            Cell::Func(fi, idx) => self.partial.functions[fi][idx] = value,
            Cell::Const(ci) => self.partial.constants[ci] = value,
            Cell::Rel(ri, idx) => self.partial.relations[ri][idx] = value.map(|v| v == 1),
        }
    }

    /// `mentioned` is one more than the largest element occurring so far.
    fn search(&mut self, depth: usize, mentioned: usize) {
        if self.truncated {
            return;
        }
        let n = self.partial.n;
        if depth == self.cells.len() {
            self.leaf();
            return;
        }
        let (cell, args) = self.cells[depth].clone();
        let here = args.iter().map(|&a| a + 1).max().unwrap_or(0).max(mentioned);
        let candidates = match cell {
            Cell::Rel(..) => 2,
            _ => (here + 1).min(n),
        };
        for v in 0..candidates {
            if self.out_of_budget() {
                return;
            }
            self.set(cell, Some(v));
            if self.consistent() {
                let next = match cell {
                    Cell::Rel(..) => here,
                    _ => here.max(v + 1),
                };
                self.search(depth + 1, next);
            }
            self.set(cell, None);
            if self.truncated {
                return;
            }
        }
    }

    fn leaf(&mut self) {
        let p = &self.partial;
        let n = p.n;
        let s = FinStructure::from_tables(
            "candidate",
            self.theory.signature.clone(),
            (0..n).map(|i| format!("e{i}")).collect(),
            p.functions.iter().map(|t| t.iter().map(|v| v.expect("complete")).collect()).collect(),
            p.relations.iter().map(|t| t.iter().map(|v| v.expect("complete")).collect()).collect(),
            p.constants.iter().map(|v| v.expect("complete")).collect(),
        )
        .expect("complete tables");
        if self.sentences.iter().any(|c| c.violation(&s).is_some()) {
            return;
        }
        for ax in &self.theory.companion_axioms {
            if !satisfies_companion(&s, &ax.axiom).expect("checked at compile time") {
                return;
            }
        }
        let form = canonical_form(&s);
        if self.seen.insert(form.code.clone()) {
            self.found.push((form.code, s.permuted(&form.labeling)));
        }
    }
}

fn cells_for(sig: &Signature, n: usize) -> Vec<(Cell, Vec<usize>)> {
    let mut cells = Vec::new();
    for (fi, (_, arity)) in sig.functions().iter().enumerate() {
        for idx in 0..n.pow(*arity as u32) {
            cells.push((Cell::Func(fi, idx), tuple_at(n, *arity, idx)));
        }
    }
    for ci in 0..sig.constants().len() {
        cells.push((Cell::Const(ci), Vec::new()));
    }
    for (ri, (_, arity)) in sig.relations().iter().enumerate() {
        for idx in 0..n.pow(*arity as u32) {
            cells.push((Cell::Rel(ri, idx), tuple_at(n, *arity, idx)));
        }
    }
    cells
}

/// Lazily produces the models size by size.
pub struct ModelStream {
    theory: Theory,
    sentences: Vec<CompiledSentence>,
    next_size: usize,
    max_size: usize,
    batch: VecDeque<FinStructure>,
    limits: EnumLimits,
    nodes: u64,
    truncated: bool,
}

impl ModelStream {
    pub fn new(theory: &Theory, max_size: usize, limits: EnumLimits) -> Result<Self, CheckError> {
        if max_size == 0 {
            return Err(CheckError::Precondition("max_size must be at least 1".into()));
        }
        let sentences = theory
            .axioms
            .iter()
            .map(|ax| {
                ax.sentence.check_sorts(&theory.signature)?;
                Ok(CompiledSentence::compile(&theory.signature, &ax.sentence)?)
            })
            .collect::<Result<Vec<_>, CheckError>>()?;
        Ok(ModelStream {
            theory: theory.clone(),
            sentences,
            next_size: 1,
            max_size,
            batch: VecDeque::new(),
            limits,
            nodes: 0,
            truncated: false,
        })
    }

    /// True once the budget cut the enumeration short.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    fn fill(&mut self, n: usize) {
        let sig = self.theory.signature.clone();
        let partial = Partial {
            n,
            functions: sig.functions().iter().map(|(_, a)| vec![None; n.pow(*a as u32)]).collect(),
            relations: sig.relations().iter().map(|(_, a)| vec![None; n.pow(*a as u32)]).collect(),
            constants: vec![None; sig.constants().len()],
        };
        let mut search = SizeSearch {
            theory: &self.theory,
            sentences: &self.sentences,
            cells: cells_for(&sig, n),
            partial,
            seen: HashSet::new(),
            found: Vec::new(),
            nodes: &mut self.nodes,
            limits: self.limits,
            truncated: false,
        };
        if search.consistent() {
            search.search(0, 0);
        }
        let truncated = search.truncated;
        let mut found = std::mem::take(&mut search.found);
        found.sort_by(|a, b| a.0.cmp(&b.0));
        let prefix = format!("{}_{n}_", self.theory.name);
        for (k, (_, s)) in found.into_iter().enumerate() {
            let names = (0..n).map(|i| format!("e{i}")).collect();
            let s = s.with_name(format!("{prefix}{k}")).with_element_names(names).expect("distinct names");
            self.batch.push_back(s);
        }
        self.truncated |= truncated;
    }
}

impl Iterator for ModelStream {
    type Item = FinStructure;

    fn next(&mut self) -> Option<FinStructure> {
        loop {
            if let Some(s) = self.batch.pop_front() {
                return Some(s);
            }
            if self.truncated || self.next_size > self.max_size {
                return None;
            }
            let n = self.next_size;
            self.next_size += 1;
            self.fill(n);
        }
    }
}

/// Every model of `theory` of size `1..=max_size` up to isomorphism, in size
/// order and canonical-code order within a size.
pub fn enumerate_models(theory: &Theory, max_size: usize, limits: EnumLimits) -> Result<ModelSet, CheckError> {
    let mut stream = ModelStream::new(theory, max_size, limits)?;
    let models: Vec<FinStructure> = stream.by_ref().collect();
    Ok(ModelSet { theory: theory.name.clone(), max_size, models, truncated: stream.truncated(), nodes: stream.nodes() })
}

/// All `L`-structures up to `max_size`, i.e. the models of the empty theory.
pub fn enumerate_structures(sig: &Arc<Signature>, max_size: usize, limits: EnumLimits) -> Result<ModelSet, CheckError> {
    enumerate_models(&Theory::new("L", sig.clone()), max_size, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::fixtures::unary_signature;
    use crate::structures::{canonical_code, satisfies_theory};
    use crate::syntax::parse_sentence;

    fn theory(name: &str, axioms: &[&str]) -> Theory {
        let sig = unary_signature();
        let mut t = Theory::new(name, sig.clone());
        for (i, a) in axioms.iter().enumerate() {
            t = t.with_axiom(&format!("a{i}"), parse_sentence(a, &sig).unwrap()).unwrap();
        }
        t
    }

    /// Brute force: every f-table, deduplicated by trying all permutations.
    fn brute_count(t: &Theory, n: usize) -> usize {
        let sig = t.signature.clone();
        let mut reps: Vec<FinStructure> = Vec::new();
        let mut table = vec![0usize; n];
        let perms = permutations(n);
        loop {
            let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let s = FinStructure::unary("x", sig.clone(), &refs, &table).unwrap();
            if satisfies_theory(&s, t).unwrap().is_none()
                && !reps.iter().any(|r| perms.iter().any(|p| s.permuted(p).function_table(0) == r.function_table(0)))
            {
                reps.push(s);
            }
            if !crate::structures::advance_odometer(&mut table, n) {
                break;
            }
        }
        reps.len()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn injective_models_are_cycle_types() {
        let t = theory("Tinj", &["forall x y. f(x) = f(y) -> x = y"]);
        let set = enumerate_models(&t, 3, EnumLimits::default()).unwrap();
        assert_eq!(set.models.len(), 6);
        assert!(!set.truncated);
    }

    #[test]
    fn fixed_point_free_on_two_points() {
        let t = theory("Tnofix", &["not exists x. f(x) = x"]);
        let set = enumerate_models(&t, 2, EnumLimits::default()).unwrap();
        assert_eq!(set.models.len(), 1);
        assert_eq!(set.models[0].function_table(0), &[1, 0]);
    }

    #[test]
    fn inconsistent_theory_has_no_models() {
        let t = theory("Bot", &["not exists x. x = x"]);
        assert!(enumerate_models(&t, 3, EnumLimits::default()).unwrap().models.is_empty());
    }

    #[test]
    fn functional_digraph_counts_match_brute_force() {
        let t = theory("L", &[]);
        let set = enumerate_models(&t, 4, EnumLimits::default()).unwrap();
        for n in 1..=4 {
            assert_eq!(set.of_size(n).count(), brute_count(&t, n), "size {n}");
        }
        // 1, 3, 7, 19 functional digraphs on 1..4 points
        assert_eq!(set.models.len(), 30);
    }

    #[test]
    fn representatives_are_canonical_and_sorted() {
        let t = theory("L", &[]);
        let set = enumerate_models(&t, 3, EnumLimits::default()).unwrap();
        for m in &set.models {
            assert_eq!(canonical_code(m), canonical_code(&m.permuted(&canonical_form(m).labeling)));
        }
        let codes: Vec<Vec<u32>> = set.of_size(3).map(canonical_code).collect();
        let mut sorted = codes.clone();
        sorted.sort();
        assert_eq!(codes, sorted);
    }

    #[test]
    fn node_budget_marks_truncation() {
        let t = theory("L", &[]);
        let set = enumerate_models(&t, 4, EnumLimits { max_nodes: 20, deadline: None }).unwrap();
        assert!(set.truncated);
    }
}
