//! Homomorphisms, embeddings and immersions between finite structures.
//!
//! Maps are searched as a constraint problem: one variable per domain
//! element, a bitmask of candidate images per variable, most-constrained
//! variable first and values in universe order. Function symbols propagate
//! natively: once every argument of `f(ā)` is fixed, the image of `f^A(ā)`
//! is forced to `f^B(h(ā))`.
//!
//! A homomorphism `m: A → B` is an immersion iff some homomorphism
//! `j: B → A` satisfies `j ∘ m = id`. That retraction search is the
//! decision procedure used throughout.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::MorphismError;
use crate::structures::{eval_positive, tuple_at, Assignment, FinStructure};
use crate::syntax::{Atom, PositiveFormula, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Hom,
    Embedding,
    Immersion,
    Unchecked,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Hom => "hom",
            Kind::Embedding => "embedding",
            Kind::Immersion => "immersion",
            Kind::Unchecked => "unchecked",
        })
    }
}

impl std::str::FromStr for Kind {
    type Err = MorphismError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hom" | "homomorphism" => Ok(Kind::Hom),
            "embedding" | "emb" => Ok(Kind::Embedding),
            "immersion" | "imm" => Ok(Kind::Immersion),
            "unchecked" => Ok(Kind::Unchecked),
            other => Err(MorphismError::Literal(format!("unknown kind `{other}`"))),
        }
    }
}

/// A total element map with the kind it has been checked to have.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub map: Vec<usize>,
    pub kind: Kind,
}

impl Morphism {
    pub fn identity(n: usize) -> Self {
        Morphism { map: (0..n).collect(), kind: Kind::Immersion }
    }

    /// `self` followed by `then`, with no kind claim.
    pub fn then(&self, then: &Morphism) -> Morphism {
        Morphism { map: compose(&self.map, &then.map), kind: Kind::Unchecked }
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn record(&self, domain: &FinStructure, codomain: &FinStructure) -> MorphismJson {
        MorphismJson {
            domain: domain.name.clone(),
            codomain: codomain.name.clone(),
            map: self
                .map
                .iter()
                .enumerate()
                .map(|(a, &b)| (domain.element_name(a).to_string(), codomain.element_name(b).to_string()))
                .collect(),
            kind: self.kind,
            verified: self.kind != Kind::Unchecked && check_kind(domain, codomain, &self.map, self.kind).unwrap_or(false),
        }
    }

    /// `a0=b1, a1=b0` in domain order.
    pub fn literal(&self, domain: &FinStructure, codomain: &FinStructure) -> String {
        self.map
            .iter()
            .enumerate()
            .map(|(a, &b)| format!("{}={}", domain.element_name(a), codomain.element_name(b)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// `first` then `second` (i.e. `second ∘ first`).
pub fn compose(first: &[usize], second: &[usize]) -> Vec<usize> {
    first.iter().map(|&x| second[x]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub domain: String,
    pub codomain: String,
    pub map: Vec<(String, String)>,
    pub kind: Kind,
    pub verified: bool,
}

/// Parses `a0=b1,a1=b0`; every domain element must be mapped exactly once.
pub fn parse_map(literal: &str, domain: &FinStructure, codomain: &FinStructure) -> Result<Vec<usize>, MorphismError> {
    let mut map = vec![None; domain.size()];
    for part in literal.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (a, b) = part.split_once('=').ok_or_else(|| MorphismError::Literal(format!("`{part}` is not of the form a=b")))?;
        let (a, b) = (a.trim(), b.trim());
        let ai = domain.element_index(a).ok_or_else(|| MorphismError::Literal(format!("`{a}` is not an element of {}", domain.name)))?;
        let bi =
            codomain.element_index(b).ok_or_else(|| MorphismError::Literal(format!("`{b}` is not an element of {}", codomain.name)))?;
        if map[ai].replace(bi).is_some() {
            return Err(MorphismError::Literal(format!("`{a}` mapped twice")));
        }
    }
    map.iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| MorphismError::Literal(format!("`{}` is not mapped", domain.element_name(i)))))
        .collect()
}

fn validate(a: &FinStructure, b: &FinStructure, map: &[usize]) -> Result<(), MorphismError> {
    if a.signature() != b.signature() {
        return Err(MorphismError::SignatureMismatch);
    }
    if map.len() != a.size() {
        return Err(MorphismError::NotTotal { expected: a.size(), found: map.len() });
    }
    if let Some(&v) = map.iter().find(|&&v| v >= b.size()) {
        return Err(MorphismError::OutOfRange(v));
    }
    Ok(())
}

fn preserves(a: &FinStructure, b: &FinStructure, map: &[usize], reflect: bool) -> bool {
    let n = a.size();
    let sig = a.signature();
    let mut image = Vec::new();
    for (fi, (_, arity)) in sig.functions().iter().enumerate() {
        for (idx, &v) in a.function_table(fi).iter().enumerate() {
            image.clear();
            image.extend(tuple_at(n, *arity, idx).into_iter().map(|x| map[x]));
            if b.apply(fi, &image) != map[v] {
                return false;
            }
        }
    }
    for (ri, (_, arity)) in sig.relations().iter().enumerate() {
        for idx in 0..a.relation_table(ri).len() {
            let t = tuple_at(n, *arity, idx);
            image.clear();
            image.extend(t.iter().map(|&x| map[x]));
            let (src, dst) = (a.holds(ri, &t), b.holds(ri, &image));
            if (src && !dst) || (reflect && dst && !src) {
                return false;
            }
        }
    }
    (0..sig.constants().len()).all(|c| map[a.constant(c)] == b.constant(c))
}

pub fn is_hom(a: &FinStructure, b: &FinStructure, map: &[usize]) -> Result<bool, MorphismError> {
    validate(a, b, map)?;
    Ok(preserves(a, b, map, false))
}

pub fn is_embedding(a: &FinStructure, b: &FinStructure, map: &[usize]) -> Result<bool, MorphismError> {
    validate(a, b, map)?;
    let injective = map.iter().collect::<BTreeSet<_>>().len() == map.len();
    Ok(injective && preserves(a, b, map, true))
}

/// A homomorphism `j: B → A` with `j(m(a)) = a` for every `a`, if any.
pub fn find_retraction(a: &FinStructure, b: &FinStructure, map: &[usize]) -> Result<Option<Vec<usize>>, MorphismError> {
    validate(a, b, map)?;
    let mut pin = Vec::with_capacity(map.len());
    for (x, &y) in map.iter().enumerate() {
        if pin.iter().any(|&(py, px)| py == y && px != x) {
            return Ok(None);
        }
        pin.push((y, x));
    }
    let found = find_morphisms(b, a, Kind::Hom, Some(1), &pin, u64::MAX)?;
    Ok(found.morphisms.into_iter().next().map(|m| m.map))
}

pub fn is_immersion(a: &FinStructure, b: &FinStructure, map: &[usize]) -> Result<bool, MorphismError> {
    Ok(is_hom(a, b, map)? && find_retraction(a, b, map)?.is_some())
}

/// Whether `map` is a morphism of the given kind. `Unchecked` only
/// validates the shape of the map.
pub fn check_kind(a: &FinStructure, b: &FinStructure, map: &[usize], kind: Kind) -> Result<bool, MorphismError> {
    match kind {
        Kind::Hom => is_hom(a, b, map),
        Kind::Embedding => is_embedding(a, b, map),
        Kind::Immersion => is_immersion(a, b, map),
        Kind::Unchecked => validate(a, b, map).map(|_| true),
    }
}

#[derive(Clone, Debug)]
struct FnCon {
    function: usize,
    args: Vec<usize>,
    out: usize,
}

#[derive(Clone, Debug)]
struct RelCon {
    relation: usize,
    args: Vec<usize>,
    holds: bool,
}

struct Csp<'a> {
    b: &'a FinStructure,
    injective: bool,
    fns: Vec<FnCon>,
    rels: Vec<RelCon>,
    var_fns: Vec<Vec<usize>>,
    var_rels: Vec<Vec<usize>>,
    nodes: u64,
    max_nodes: u64,
    truncated: bool,
}

#[inline]
fn single(mask: u64) -> Option<usize> {
    (mask.count_ones() == 1).then(|| mask.trailing_zeros() as usize)
}

impl Csp<'_> {
    /// Narrows `dom[var]`; queues the variable when it becomes fixed.
    fn restrict(&self, dom: &mut [u64], queue: &mut Vec<usize>, var: usize, mask: u64) -> bool {
        let before = dom[var];
        let after = before & mask;
        if after == 0 {
            return false;
        }
        if after != before {
            dom[var] = after;
            if after.count_ones() == 1 {
                queue.push(var);
            }
        }
        true
    }

    fn propagate(&self, dom: &mut [u64], mut queue: Vec<usize>) -> bool {
        let mut args = Vec::new();
        while let Some(x) = queue.pop() {
            let v = single(dom[x]).expect("queued variables are fixed");
            if self.injective {
                for y in 0..dom.len() {
                    if y != x && !self.restrict(dom, &mut queue, y, !(1u64 << v)) {
                        return false;
                    }
                }
            }
            for &ci in &self.var_fns[x] {
                let c = &self.fns[ci];
                args.clear();
                if c.args.iter().all(|&y| single(dom[y]).map(|w| args.push(w)).is_some()) {
                    let w = self.b.apply(c.function, &args);
                    if !self.restrict(dom, &mut queue, c.out, 1u64 << w) {
                        return false;
                    }
                }
            }
            for &ci in &self.var_rels[x] {
                let c = &self.rels[ci];
                let open: Vec<usize> = c.args.iter().copied().filter(|&y| single(dom[y]).is_none()).collect();
                let open_var = open.first().copied();
                if open.iter().any(|&y| Some(y) != open_var) {
                    continue;
                }
                match open_var {
                    None => {
                        args.clear();
                        args.extend(c.args.iter().map(|&y| single(dom[y]).unwrap()));
                        if self.b.holds(c.relation, &args) != c.holds {
                            return false;
                        }
                    }
                    Some(y) => {
                        let mut allowed = 0u64;
                        let mut m = dom[y];
                        while m != 0 {
                            let w = m.trailing_zeros() as usize;
                            m &= m - 1;
                            args.clear();
                            args.extend(c.args.iter().map(|&z| if z == y { w } else { single(dom[z]).unwrap() }));
                            if self.b.holds(c.relation, &args) == c.holds {
                                allowed |= 1u64 << w;
                            }
                        }
                        if !self.restrict(dom, &mut queue, y, allowed) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn search(&mut self, dom: Vec<u64>, visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        let pick = (0..dom.len()).filter(|&x| dom[x].count_ones() > 1).min_by_key(|&x| (dom[x].count_ones(), x));
        let Some(x) = pick else {
            let map: Vec<usize> = dom.iter().map(|&m| m.trailing_zeros() as usize).collect();
            return visit(&map);
        };
        let mut m = dom[x];
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.truncated = true;
                return ControlFlow::Break(());
            }
            let mut next = dom.clone();
            next[x] = 1u64 << v;
            if self.propagate(&mut next, vec![x]) {
                self.search(next, visit)?;
            }
        }
        ControlFlow::Continue(())
    }
}

/// Calls `visit` on every map of the requested kind extending `pin`, in
/// search order, until it breaks. Returns whether the node budget ran out.
pub fn for_each_morphism(
    a: &FinStructure,
    b: &FinStructure,
    kind: Kind,
    pin: &[(usize, usize)],
    max_nodes: u64,
    visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> Result<bool, MorphismError> {
    if a.signature() != b.signature() {
        return Err(MorphismError::SignatureMismatch);
    }
    if a.size() > 64 || b.size() > 64 {
        return Err(MorphismError::TooLarge);
    }
    let (n, m) = (a.size(), b.size());
    let embedding = matches!(kind, Kind::Embedding | Kind::Immersion);
    let sig = a.signature();
    let mut fns = Vec::new();
    for (fi, (_, arity)) in sig.functions().iter().enumerate() {
        for (idx, &out) in a.function_table(fi).iter().enumerate() {
            fns.push(FnCon { function: fi, args: tuple_at(n, *arity, idx), out });
        }
    }
    let mut rels = Vec::new();
    for (ri, (_, arity)) in sig.relations().iter().enumerate() {
        for idx in 0..a.relation_table(ri).len() {
            let args = tuple_at(n, *arity, idx);
            let holds = a.holds(ri, &args);
            if holds || embedding {
                rels.push(RelCon { relation: ri, args, holds });
            }
        }
    }
    let mut var_fns = vec![Vec::new(); n];
    for (ci, c) in fns.iter().enumerate() {
        for &x in c.args.iter().collect::<BTreeSet<_>>() {
            var_fns[x].push(ci);
        }
    }
    let mut var_rels = vec![Vec::new(); n];
    for (ci, c) in rels.iter().enumerate() {
        for &x in c.args.iter().collect::<BTreeSet<_>>() {
            var_rels[x].push(ci);
        }
    }
    let mut csp = Csp { b, injective: embedding, fns, rels, var_fns, var_rels, nodes: 0, max_nodes, truncated: false };
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut dom = vec![full; n];
    let mut queue = Vec::new();
    let mut ok = true;
    for &(x, y) in pin {
        if x >= n {
            return Err(MorphismError::OutOfRange(x));
        }
        if y >= m {
            return Err(MorphismError::OutOfRange(y));
        }
        ok &= csp.restrict(&mut dom, &mut queue, x, 1u64 << y);
    }
    for c in 0..sig.constants().len() {
        ok &= csp.restrict(&mut dom, &mut queue, a.constant(c), 1u64 << b.constant(c));
    }
    queue.extend((0..n).filter(|&x| dom[x].count_ones() == 1));
    queue.sort_unstable();
    queue.dedup();
    if !ok || !csp.propagate(&mut dom, queue) {
        return Ok(false);
    }
    if kind == Kind::Immersion {
        let mut filtered = |map: &[usize]| {
            if find_retraction(a, b, map).expect("validated").is_some() {
                visit(map)
            } else {
                ControlFlow::Continue(())
            }
        };
        let _ = csp.search(dom, &mut filtered);
    } else {
        let _ = csp.search(dom, visit);
    }
    Ok(csp.truncated)
}

#[derive(Clone, Debug, Default)]
pub struct MorphismSearch {
    pub morphisms: Vec<Morphism>,
    /// The node budget ran out before the search space was exhausted.
    pub truncated: bool,
}

/// Up to `limit` maps of the requested kind extending `pin`.
pub fn find_morphisms(
    a: &FinStructure,
    b: &FinStructure,
    kind: Kind,
    limit: Option<usize>,
    pin: &[(usize, usize)],
    max_nodes: u64,
) -> Result<MorphismSearch, MorphismError> {
    let search_kind = if kind == Kind::Unchecked { Kind::Hom } else { kind };
    let mut out = Vec::new();
    let truncated = for_each_morphism(a, b, search_kind, pin, max_nodes, &mut |map| {
        out.push(Morphism { map: map.to_vec(), kind: search_kind });
        if limit.is_some_and(|l| out.len() >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(MorphismSearch { morphisms: out, truncated })
}

/// A positive formula with its parameters, true of the image tuple in the
/// codomain and false of the source tuple in the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub formula: PositiveFormula,
    /// Free variables of `formula` and the domain elements they denote.
    pub params: Vec<(String, usize)>,
}

impl Separation {
    pub fn describe(&self, a: &FinStructure) -> String {
        if self.params.is_empty() {
            return self.formula.to_string();
        }
        let ps: Vec<String> = self.params.iter().map(|(v, e)| format!("{v}={}", a.element_name(*e))).collect();
        format!("{} at ({})", self.formula, ps.join(", "))
    }

    /// Re-evaluates both sides: true in `b` at the image, false in `a`.
    pub fn verify(&self, a: &FinStructure, b: &FinStructure, map: &[usize]) -> bool {
        let src = Assignment::from_pairs(self.params.iter().map(|(v, e)| (v.as_str(), *e)));
        let dst = Assignment::from_pairs(self.params.iter().map(|(v, e)| (v.as_str(), map[*e])));
        eval_positive(b, &self.formula, &dst) == Ok(true) && eval_positive(a, &self.formula, &src) == Ok(false)
    }
}

fn param_var(i: usize) -> String {
    format!("x{i}")
}

/// The existentially closed positive diagram of `b`, with the image of each
/// domain element named by a parameter variable `x{i}` (`i` the first
/// preimage) and the other elements bound. Equalities among parameters
/// record collapsed preimages. It holds of the domain tuple in the domain iff
/// `map` has a retraction.
pub fn diagram_formula(b: &FinStructure, map: &[usize]) -> Separation {
    let mut name: Vec<Option<String>> = vec![None; b.size()];
    let mut params = Vec::new();
    let mut conj = Vec::new();
    for (x, &y) in map.iter().enumerate() {
        match &name[y] {
            Some(existing) => conj.push(PositiveFormula::Atom(Atom::Eq(Term::Var(existing.clone()), Term::Var(param_var(x))))),
            None => name[y] = Some(param_var(x)),
        }
        params.push((param_var(x), x));
    }
    let mut bound = Vec::new();
    for (y, slot) in name.iter_mut().enumerate() {
        if slot.is_none() {
            let v = format!("y{y}");
            bound.push(v.clone());
            *slot = Some(v);
        }
    }
    let t = |y: usize| Term::Var(name[y].clone().unwrap());
    let sig = b.signature();
    let n = b.size();
    for (fi, (g, arity)) in sig.functions().iter().enumerate() {
        for (idx, &v) in b.function_table(fi).iter().enumerate() {
            let args = tuple_at(n, *arity, idx).into_iter().map(t).collect();
            conj.push(PositiveFormula::Atom(Atom::Eq(Term::App(g.clone(), args), t(v))));
        }
    }
    for (ri, (r, _)) in sig.relations().iter().enumerate() {
        for tuple in b.relation_tuples(ri) {
            conj.push(PositiveFormula::Atom(Atom::Rel(r.clone(), tuple.into_iter().map(t).collect())));
        }
    }
    for (ci, c) in sig.constants().iter().enumerate() {
        conj.push(PositiveFormula::Atom(Atom::Eq(Term::Const(c.clone()), t(b.constant(ci)))));
    }
    Separation { formula: PositiveFormula::exists(bound, PositiveFormula::And(conj)), params }
}

/// A short positive formula witnessing that the hom `map` is not an
/// immersion, or `None` if it is one.
///
/// Tried in order: a collapsed pair `x = x'`; for a unary function `f`, the
/// cycle sentences `∃y fᵏ(y) = y`, `k ≤ |B|`; otherwise the diagram formula,
/// greedily shortened.
pub fn separating_formula(a: &FinStructure, b: &FinStructure, map: &[usize]) -> Result<Option<Separation>, MorphismError> {
    if !is_hom(a, b, map)? || find_retraction(a, b, map)?.is_some() {
        return Ok(None);
    }
    for x in 0..map.len() {
        for x2 in x + 1..map.len() {
            if map[x] == map[x2] {
                let (v, w) = (param_var(x), param_var(x2));
                let formula = PositiveFormula::Atom(Atom::Eq(Term::Var(v.clone()), Term::Var(w.clone())));
                return Ok(Some(Separation { formula, params: vec![(v, x), (w, x2)] }));
            }
        }
    }
    let sig = a.signature();
    if let Some((f, _)) = sig.functions().iter().find(|(_, arity)| *arity == 1) {
        for k in 1..=b.size() {
            let y = Term::var("y");
            let formula = PositiveFormula::exists(vec!["y".into()], PositiveFormula::Atom(Atom::Eq(Term::iterate(f, k, y.clone()), y)));
            let sep = Separation { formula, params: Vec::new() };
            if sep.verify(a, b, map) {
                return Ok(Some(sep));
            }
        }
    }
    let full = diagram_formula(b, map);
    let (bound, mut conj) = match full.formula.clone() {
        PositiveFormula::Exists(vars, body) => match *body {
            PositiveFormula::And(c) => (vars, c),
            other => (vars, vec![other]),
        },
        PositiveFormula::And(c) => (Vec::new(), c),
        other => (Vec::new(), vec![other]),
    };
    let build = |conj: &[PositiveFormula]| {
        let body = PositiveFormula::and(conj.to_vec());
        let used = body.free_vars();
        let vars: Vec<String> = bound.iter().filter(|v| used.contains(*v)).cloned().collect();
        let formula = PositiveFormula::exists(vars, body);
        let free = formula.free_vars();
        let params = full.params.iter().filter(|(v, _)| free.contains(v)).cloned().collect();
        Separation { formula, params }
    };
    let mut i = 0;
    while i < conj.len() {
        let mut shorter = conj.clone();
        shorter.remove(i);
        if !shorter.is_empty() && build(&shorter).verify(a, b, map) {
            conj = shorter;
        } else {
            i += 1;
        }
    }
    let sep = build(&conj);
    debug_assert!(sep.verify(a, b, map));
    Ok(Some(sep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::fixtures::{cycles, unary_signature};

    #[test]
    fn identity_is_every_kind() {
        let a = cycles("A", unary_signature(), &[2, 1]);
        let id: Vec<usize> = (0..a.size()).collect();
        for kind in [Kind::Hom, Kind::Embedding, Kind::Immersion, Kind::Unchecked] {
            assert!(check_kind(&a, &a, &id, kind).unwrap());
        }
    }

    #[test]
    fn collapse_of_two_cycle() {
        let sig = unary_signature();
        let c2 = cycles("C2", sig.clone(), &[2]);
        let ae = cycles("Ae", sig, &[1]);
        assert!(check_kind(&c2, &ae, &[0, 0], Kind::Hom).unwrap());
        assert!(!check_kind(&c2, &ae, &[0, 0], Kind::Embedding).unwrap());
        assert!(!check_kind(&c2, &ae, &[0, 0], Kind::Immersion).unwrap());
    }

    #[test]
    fn inclusion_gaining_a_fixed_point() {
        let sig = unary_signature();
        let c2 = cycles("C2", sig.clone(), &[2]);
        let c2e = cycles("C2e", sig, &[2, 1]);
        assert!(check_kind(&c2, &c2e, &[0, 1], Kind::Embedding).unwrap());
        assert!(!check_kind(&c2, &c2e, &[0, 1], Kind::Immersion).unwrap());
        let sep = separating_formula(&c2, &c2e, &[0, 1]).unwrap().unwrap();
        assert_eq!(sep.formula.to_string(), "exists y. f(y) = y");
    }

    #[test]
    fn search_examples() {
        let sig = unary_signature();
        let ae = cycles("Ae", sig.clone(), &[1]);
        let c2e = cycles("C2e", sig.clone(), &[2, 1]);
        let homs = find_morphisms(&ae, &c2e, Kind::Hom, None, &[], u64::MAX).unwrap();
        assert_eq!(homs.morphisms.iter().map(|m| m.map.clone()).collect::<Vec<_>>(), vec![vec![2]]);
        let c3 = cycles("C3", sig.clone(), &[3]);
        let c2 = cycles("C2", sig, &[2]);
        assert!(find_morphisms(&c3, &c2, Kind::Hom, None, &[], u64::MAX).unwrap().morphisms.is_empty());
        let imm = find_morphisms(&c2, &c2, Kind::Immersion, None, &[], u64::MAX).unwrap();
        assert_eq!(imm.morphisms.len(), 2);
    }

    #[test]
    fn map_literals() {
        let sig = unary_signature();
        let c2 = cycles("C2", sig, &[2]);
        assert_eq!(parse_map("c0_0=c0_1, c0_1=c0_0", &c2, &c2).unwrap(), vec![1, 0]);
        assert!(parse_map("c0_0=c0_1", &c2, &c2).is_err());
        assert!(parse_map("c0_0=zz,c0_1=c0_0", &c2, &c2).is_err());
    }

    #[test]
    fn node_budget_truncates() {
        let sig = unary_signature();
        let a = cycles("A", sig.clone(), &[1, 1, 1, 1]);
        let b = cycles("B", sig, &[1, 1, 1, 1]);
        let r = find_morphisms(&a, &b, Kind::Hom, None, &[], 5).unwrap();
        assert!(r.truncated);
        assert_eq!(find_morphisms(&a, &b, Kind::Hom, None, &[], u64::MAX).unwrap().morphisms.len(), 256);
    }
}
