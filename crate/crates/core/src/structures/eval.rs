//! Tarskian evaluation of positive formulas over finite (possibly partial)
//! interpretations.
//!
//! Formulas are compiled once into a slot-indexed form. Existential blocks
//! are evaluated by backtracking over the bound variables, checking each
//! conjunct of the body as soon as all of its variables are bound.

use crate::error::{EvalError, SortError};
use crate::syntax::{Atom, CompanionAxiom, HInductiveSentence, PositiveFormula, Signature, Term, Theory};

use super::{tuple_index, Assignment, FinStructure};

/// Kleene truth values; `Unknown` only arises on partial interpretations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

/// Read access to a finite interpretation whose tables may have holes.
pub trait Interpretation {
    fn size(&self) -> usize;
    fn apply(&self, function: usize, args: &[usize]) -> Option<usize>;
    fn holds(&self, relation: usize, args: &[usize]) -> Option<bool>;
    fn constant(&self, c: usize) -> Option<usize>;
}

impl Interpretation for FinStructure {
    #[inline]
    fn size(&self) -> usize {
        FinStructure::size(self)
    }
    #[inline]
    fn apply(&self, function: usize, args: &[usize]) -> Option<usize> {
        Some(self.function_table(function)[tuple_index(self.size(), args)])
    }
    #[inline]
    fn holds(&self, relation: usize, args: &[usize]) -> Option<bool> {
        Some(self.relation_table(relation)[tuple_index(self.size(), args)])
    }
    #[inline]
    fn constant(&self, c: usize) -> Option<usize> {
        Some(self.constants()[c])
    }
}

#[derive(Clone, Debug)]
enum CTerm {
    Slot(usize),
    Const(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Clone, Debug)]
enum CNode {
    Eq(CTerm, CTerm),
    Rel(usize, Vec<CTerm>),
    And(Vec<CNode>),
    Or(Vec<CNode>),
    Exists(ExistsBlock),
}

#[derive(Clone, Debug)]
struct ExistsBlock {
    slots: Vec<usize>,
    /// Conjuncts needing none of the bound slots.
    upfront: Vec<CNode>,
    /// `levels[i]`: conjuncts whose last needed bound slot is `slots[i]`.
    levels: Vec<Vec<CNode>>,
}

/// A positive formula resolved against a signature, with its free variables
/// in a fixed slot order.
#[derive(Clone, Debug)]
pub struct CompiledFormula {
    root: CNode,
    free: Vec<String>,
    slots: usize,
}

struct Compiler<'a> {
    sig: &'a Signature,
    scope: Vec<(String, usize)>,
    next: usize,
}

impl Compiler<'_> {
    fn term(&self, t: &Term) -> Result<CTerm, EvalError> {
        Ok(match t {
            Term::Var(v) => CTerm::Slot(self.lookup(v)?),
            Term::Const(c) => CTerm::Const(self.sig.constant_index(c).ok_or_else(|| SortError::UnknownSymbol(c.clone()))?),
            Term::App(f, args) => {
                let fi = self.sig.function_index(f).ok_or_else(|| SortError::UnknownSymbol(f.clone()))?;
                let arity = self.sig.functions()[fi].1;
                if arity != args.len() {
                    return Err(SortError::Arity { symbol: f.clone(), expected: arity, found: args.len() }.into());
                }
                CTerm::App(fi, args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?)
            }
        })
    }

    fn lookup(&self, v: &str) -> Result<usize, EvalError> {
        self.scope.iter().rev().find(|(name, _)| name == v).map(|(_, s)| *s).ok_or_else(|| EvalError::Unbound(v.to_string()))
    }

    fn atom(&self, a: &Atom) -> Result<CNode, EvalError> {
        Ok(match a {
            Atom::Eq(l, r) => CNode::Eq(self.term(l)?, self.term(r)?),
            Atom::Rel(r, args) => {
                let ri = self.sig.relation_index(r).ok_or_else(|| SortError::UnknownSymbol(r.clone()))?;
                let arity = self.sig.relations()[ri].1;
                if arity != args.len() {
                    return Err(SortError::Arity { symbol: r.clone(), expected: arity, found: args.len() }.into());
                }
                CNode::Rel(ri, args.iter().map(|t| self.term(t)).collect::<Result<_, _>>()?)
            }
        })
    }

    fn node(&mut self, f: &PositiveFormula) -> Result<CNode, EvalError> {
        Ok(match f {
            PositiveFormula::Atom(a) => self.atom(a)?,
            PositiveFormula::And(v) => CNode::And(v.iter().map(|g| self.node(g)).collect::<Result<_, _>>()?),
            PositiveFormula::Or(v) => CNode::Or(v.iter().map(|g| self.node(g)).collect::<Result<_, _>>()?),
            PositiveFormula::Exists(vars, body) => {
                let depth = self.scope.len();
                let mut slots = Vec::with_capacity(vars.len());
                for v in vars {
                    let s = self.next;
                    self.next += 1;
                    self.scope.push((v.clone(), s));
                    slots.push(s);
                }
                let conjuncts = match body.as_ref() {
                    PositiveFormula::And(parts) => parts.iter().map(|g| self.node(g)).collect::<Result<Vec<_>, _>>()?,
                    other => vec![self.node(other)?],
                };
                self.scope.truncate(depth);
                let mut upfront = Vec::new();
                let mut levels = vec![Vec::new(); slots.len()];
                for c in conjuncts {
                    let mut used = Vec::new();
                    c.slots_used(&mut used);
                    match slots.iter().rposition(|s| used.contains(s)) {
                        Some(level) => levels[level].push(c),
                        None => upfront.push(c),
                    }
                }
                CNode::Exists(ExistsBlock { slots, upfront, levels })
            }
        })
    }
}

impl CTerm {
    fn slots_used(&self, out: &mut Vec<usize>) {
        match self {
            CTerm::Slot(s) => out.push(*s),
            CTerm::Const(_) => {}
            CTerm::App(_, args) => args.iter().for_each(|a| a.slots_used(out)),
        }
    }

    #[inline]
    fn eval<I: Interpretation>(&self, s: &I, env: &[usize]) -> Option<usize> {
        match self {
            CTerm::Slot(i) => Some(env[*i]),
            CTerm::Const(c) => s.constant(*c),
            CTerm::App(f, args) => match args.as_slice() {
                [a] => s.apply(*f, &[a.eval(s, env)?]),
                [a, b] => s.apply(*f, &[a.eval(s, env)?, b.eval(s, env)?]),
                _ => {
                    let vals = args.iter().map(|a| a.eval(s, env)).collect::<Option<Vec<_>>>()?;
                    s.apply(*f, &vals)
                }
            },
        }
    }
}

impl CNode {
    fn slots_used(&self, out: &mut Vec<usize>) {
        match self {
            CNode::Eq(l, r) => {
                l.slots_used(out);
                r.slots_used(out);
            }
            CNode::Rel(_, args) => args.iter().for_each(|a| a.slots_used(out)),
            CNode::And(v) | CNode::Or(v) => v.iter().for_each(|c| c.slots_used(out)),
            CNode::Exists(b) => {
                b.upfront.iter().chain(b.levels.iter().flatten()).for_each(|c| c.slots_used(out));
            }
        }
    }

    fn eval<I: Interpretation>(&self, s: &I, env: &mut [usize]) -> Truth {
        match self {
            CNode::Eq(l, r) => match (l.eval(s, env), r.eval(s, env)) {
                (Some(a), Some(b)) => truth(a == b),
                _ => Truth::Unknown,
            },
            CNode::Rel(r, args) => {
                let vals: Option<Vec<usize>> = args.iter().map(|a| a.eval(s, env)).collect();
                match vals.and_then(|v| s.holds(*r, &v)) {
                    Some(b) => truth(b),
                    None => Truth::Unknown,
                }
            }
            CNode::And(v) => conjunction(v, s, env),
            CNode::Or(v) => {
                let mut unknown = false;
                for c in v {
                    match c.eval(s, env) {
                        Truth::True => return Truth::True,
                        Truth::Unknown => unknown = true,
                        Truth::False => {}
                    }
                }
                if unknown {
                    Truth::Unknown
                } else {
                    Truth::False
                }
            }
            CNode::Exists(block) => {
                let up = conjunction(&block.upfront, s, env);
                if up == Truth::False {
                    return Truth::False;
                }
                let rest = block.search(0, s, env);
                and2(up, rest)
            }
        }
    }
}

impl ExistsBlock {
    fn search<I: Interpretation>(&self, level: usize, s: &I, env: &mut [usize]) -> Truth {
        if level == self.slots.len() {
            return Truth::True;
        }
        let slot = self.slots[level];
        let mut unknown = false;
        for v in 0..s.size() {
            env[slot] = v;
            let here = conjunction(&self.levels[level], s, env);
            if here == Truth::False {
                continue;
            }
            match and2(here, self.search(level + 1, s, env)) {
                Truth::True => return Truth::True,
                Truth::Unknown => unknown = true,
                Truth::False => {}
            }
        }
        if unknown {
            Truth::Unknown
        } else {
            Truth::False
        }
    }
}

#[inline]
fn truth(b: bool) -> Truth {
    if b {
        Truth::True
    } else {
        Truth::False
    }
}

#[inline]
fn and2(a: Truth, b: Truth) -> Truth {
    match (a, b) {
        (Truth::False, _) | (_, Truth::False) => Truth::False,
        (Truth::True, Truth::True) => Truth::True,
        _ => Truth::Unknown,
    }
}

fn conjunction<I: Interpretation>(parts: &[CNode], s: &I, env: &mut [usize]) -> Truth {
    let mut unknown = false;
    for c in parts {
        match c.eval(s, env) {
            Truth::False => return Truth::False,
            Truth::Unknown => unknown = true,
            Truth::True => {}
        }
    }
    if unknown {
        Truth::Unknown
    } else {
        Truth::True
    }
}

impl CompiledFormula {
    /// Compiles `formula` with the given free-variable order. Every free
    /// variable of the formula must appear in `free`.
    pub fn compile(sig: &Signature, formula: &PositiveFormula, free: &[String]) -> Result<Self, EvalError> {
        let mut c = Compiler { sig, scope: free.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect(), next: free.len() };
        let root = c.node(formula)?;
        Ok(CompiledFormula { root, free: free.to_vec(), slots: c.next })
    }

    pub fn free_vars(&self) -> &[String] {
        &self.free
    }

    /// Evaluates with `args[i]` bound to the `i`-th free variable.
    pub fn eval(&self, s: &FinStructure, args: &[usize]) -> bool {
        self.eval3(s, args) == Truth::True
    }

    pub fn eval3<I: Interpretation>(&self, s: &I, args: &[usize]) -> Truth {
        debug_assert_eq!(args.len(), self.free.len());
        let mut env = vec![0usize; self.slots.max(1)];
        env[..args.len()].copy_from_slice(args);
        self.root.eval(s, &mut env)
    }
}

/// An h-inductive sentence compiled for repeated checking.
#[derive(Clone, Debug)]
pub struct CompiledSentence {
    arity: usize,
    antecedent: CompiledFormula,
    consequent: CompiledFormula,
}

impl CompiledSentence {
    pub fn compile(sig: &Signature, sentence: &HInductiveSentence) -> Result<Self, EvalError> {
        Ok(CompiledSentence {
            arity: sentence.vars.len(),
            antecedent: CompiledFormula::compile(sig, &sentence.antecedent, &sentence.vars)?,
            consequent: CompiledFormula::compile(sig, &sentence.consequent, &sentence.vars)?,
        })
    }

    /// First tuple (lexicographic) where the antecedent holds and the
    /// consequent fails.
    pub fn violation(&self, s: &FinStructure) -> Option<Vec<usize>> {
        let n = s.size();
        let mut tuple = vec![0usize; self.arity];
        loop {
            if self.antecedent.eval(s, &tuple) && !self.consequent.eval(s, &tuple) {
                return Some(tuple);
            }
            if !advance(&mut tuple, n) {
                return None;
            }
        }
    }

    /// `False` when a tuple definitely violates the sentence, `True` when it
    /// definitely holds everywhere, `Unknown` otherwise.
    pub fn check_partial<I: Interpretation>(&self, s: &I) -> Truth {
        let n = s.size();
        let mut tuple = vec![0usize; self.arity];
        let mut unknown = false;
        loop {
            match self.antecedent.eval3(s, &tuple) {
                Truth::False => {}
                a => match self.consequent.eval3(s, &tuple) {
                    Truth::True => {}
                    Truth::False if a == Truth::True => return Truth::False,
                    _ => unknown = true,
                },
            }
            if !advance(&mut tuple, n) {
                return if unknown { Truth::Unknown } else { Truth::True };
            }
        }
    }
}

/// Odometer step over `0..n` tuples; false after the last tuple.
pub(crate) fn advance(tuple: &mut [usize], n: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Truth of a positive formula under an assignment covering its free variables.
pub fn eval_positive(a: &FinStructure, formula: &PositiveFormula, sigma: &Assignment) -> Result<bool, EvalError> {
    formula.check_sorts(a.signature())?;
    let free: Vec<String> = formula.free_vars().into_iter().collect();
    let mut args = Vec::with_capacity(free.len());
    for v in &free {
        let e = sigma.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?;
        if e >= a.size() {
            return Err(EvalError::OutOfRange(e));
        }
        args.push(e);
    }
    Ok(CompiledFormula::compile(a.signature(), formula, &free)?.eval(a, &args))
}

/// The first falsifying tuple of `sentence` in `a`, if any.
pub fn violation(a: &FinStructure, sentence: &HInductiveSentence) -> Result<Option<Assignment>, EvalError> {
    sentence.check_sorts(a.signature())?;
    sentence.check_closed()?;
    let compiled = CompiledSentence::compile(a.signature(), sentence)?;
    Ok(compiled.violation(a).map(|t| Assignment::zip(&sentence.vars, &t)))
}

pub fn satisfies(a: &FinStructure, sentence: &HInductiveSentence) -> Result<bool, EvalError> {
    Ok(violation(a, sentence)?.is_none())
}

/// Direct evaluation of `∀x̄ (ψ ∨ ∃ȳ (θ1 ∧ ¬θ2))`.
pub fn satisfies_companion(a: &FinStructure, axiom: &CompanionAxiom) -> Result<bool, EvalError> {
    let sig = a.signature();
    axiom.check_closed()?;
    let psi = CompiledFormula::compile(sig, &axiom.psi, &axiom.vars)?;
    let mut all = axiom.vars.clone();
    all.extend(axiom.witness_vars.iter().cloned());
    let t1 = CompiledFormula::compile(sig, &axiom.theta1, &all)?;
    let t2 = CompiledFormula::compile(sig, &axiom.theta2, &all)?;
    let n = a.size();
    let mut xs = vec![0usize; axiom.vars.len()];
    loop {
        if !psi.eval(a, &xs) {
            let mut ys = vec![0usize; axiom.witness_vars.len()];
            let mut found = false;
            loop {
                let args: Vec<usize> = xs.iter().chain(ys.iter()).copied().collect();
                if t1.eval(a, &args) && !t2.eval(a, &args) {
                    found = true;
                    break;
                }
                if !advance(&mut ys, n) {
                    break;
                }
            }
            if !found {
                return Ok(false);
            }
        }
        if !advance(&mut xs, n) {
            return Ok(true);
        }
    }
}

/// Name of the first axiom of `theory` that fails in `a`, if any.
pub fn satisfies_theory(a: &FinStructure, theory: &Theory) -> Result<Option<String>, EvalError> {
    if a.signature() != &theory.signature {
        return Err(SortError::SignatureMismatch(a.signature().name.clone(), theory.signature.name.clone()).into());
    }
    for ax in &theory.axioms {
        if !satisfies(a, &ax.sentence)? {
            return Ok(Some(ax.name.clone()));
        }
    }
    for ax in &theory.companion_axioms {
        if !satisfies_companion(a, &ax.axiom)? {
            return Ok(Some(ax.name.clone()));
        }
    }
    Ok(None)
}
