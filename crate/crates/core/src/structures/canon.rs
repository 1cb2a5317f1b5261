//! Canonical labelling of finite structures by individualisation and
//! refinement.
//!
//! Colours are refined with order-independent hashes of each element's
//! neighbourhood in the function graphs and relations. When refinement
//! stalls, every element of the first non-singleton cell is individualised
//! in turn; the canonical code is the lexicographically least relabelled
//! encoding over all leaves of that search tree. Every step is defined
//! without reference to the element order, so isomorphic structures get
//! identical codes. Two leaves with the same code yield an automorphism;
//! siblings in one orbit of the automorphisms fixing the current prefix
//! lead to identical subtrees and are skipped.

use super::{tuple_at, FinStructure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    /// Encoding of the relabelled structure: size, function tables,
    /// constants, relation bits.
    pub code: Vec<u32>,
    /// `labeling[old] = new`.
    pub labeling: Vec<usize>,
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn combine(h: u64, v: u64) -> u64 {
    mix(h ^ v.wrapping_mul(0x2545_f491_4f6c_dd1d))
}

/// Cached tuple lists so refinement rounds do not decode indices repeatedly.
struct Tables<'a> {
    s: &'a FinStructure,
    fn_tuples: Vec<Vec<Vec<usize>>>,
    rel_tuples: Vec<Vec<Vec<usize>>>,
}

impl<'a> Tables<'a> {
    fn new(s: &'a FinStructure) -> Self {
        let n = s.size();
        let fn_tuples = (0..s.signature().functions().len())
            .map(|fi| {
                let k = s.function_arity(fi);
                (0..n.pow(k as u32)).map(|i| tuple_at(n, k, i)).collect()
            })
            .collect();
        let rel_tuples = (0..s.signature().relations().len()).map(|ri| s.relation_tuples(ri)).collect();
        Tables { s, fn_tuples, rel_tuples }
    }

    /// One refinement round; returns the new number of colours.
    fn refine_once(&self, colors: &mut [usize]) -> usize {
        let n = colors.len();
        let mut acc: Vec<u64> = vec![0; n];
        for (fi, tuples) in self.fn_tuples.iter().enumerate() {
            let table = self.s.function_table(fi);
            let tag = mix(1000 + fi as u64);
            for (idx, t) in tuples.iter().enumerate() {
                let v = table[idx];
                let mut whole = tag;
                for &a in t {
                    whole = combine(whole, colors[a] as u64);
                }
                acc[v] = acc[v].wrapping_add(combine(whole, u64::MAX));
                for (p, &a) in t.iter().enumerate() {
                    let mut h = combine(tag, p as u64);
                    for (q, &b) in t.iter().enumerate() {
                        h = combine(h, if p == q { u64::MAX - 1 } else { colors[b] as u64 });
                    }
                    acc[a] = acc[a].wrapping_add(combine(h, colors[v] as u64));
                }
            }
        }
        for (ri, tuples) in self.rel_tuples.iter().enumerate() {
            let tag = mix(5000 + ri as u64);
            for t in tuples {
                for (p, &a) in t.iter().enumerate() {
                    let mut h = combine(tag, p as u64);
                    for (q, &b) in t.iter().enumerate() {
                        h = combine(h, if p == q { u64::MAX - 1 } else { colors[b] as u64 });
                    }
                    acc[a] = acc[a].wrapping_add(h);
                }
            }
        }
        rerank(colors, |i, c| (c, acc[i]))
    }

    fn refine(&self, colors: &mut [usize]) {
        let mut count = distinct(colors);
        loop {
            let next = self.refine_once(colors);
            if next <= count {
                return;
            }
            count = next;
        }
    }
}

fn distinct(colors: &[usize]) -> usize {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Replaces colours by the rank of `key(i, colour)`; returns the colour count.
fn rerank(colors: &mut [usize], key: impl Fn(usize, usize) -> (usize, u64)) -> usize {
    let keys: Vec<(usize, u64)> = colors.iter().enumerate().map(|(i, &c)| key(i, c)).collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    sorted.dedup();
    for (c, k) in colors.iter_mut().zip(&keys) {
        *c = sorted.binary_search(k).expect("present");
    }
    sorted.len()
}

fn encode(s: &FinStructure, labeling: &[usize]) -> Vec<u32> {
    let n = s.size();
    let mut inv = vec![0; n];
    for (old, &new) in labeling.iter().enumerate() {
        inv[new] = old;
    }
    let mut code = vec![n as u32];
    let mut args = Vec::new();
    for fi in 0..s.signature().functions().len() {
        let k = s.function_arity(fi);
        for idx in 0..n.pow(k as u32) {
            args.clear();
            args.extend(tuple_at(n, k, idx).into_iter().map(|a| inv[a]));
            code.push(labeling[s.apply(fi, &args)] as u32);
        }
    }
    code.extend(s.constants().iter().map(|&c| labeling[c] as u32));
    for ri in 0..s.signature().relations().len() {
        let k = s.relation_arity(ri);
        let mut word = 0u32;
        let mut bits = 0;
        for idx in 0..n.pow(k as u32) {
            args.clear();
            args.extend(tuple_at(n, k, idx).into_iter().map(|a| inv[a]));
            word = (word << 1) | s.holds(ri, &args) as u32;
            bits += 1;
            if bits == 31 {
                code.push(word);
                word = 0;
                bits = 0;
            }
        }
        if bits > 0 {
            code.push(word);
        }
    }
    code
}

struct Search<'a> {
    tables: Tables<'a>,
    best: Option<(Vec<u32>, Vec<usize>)>,
    /// Automorphisms discovered from leaves with equal codes.
    autos: Vec<Vec<usize>>,
    prefix: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Search<'_> {
    /// Orbit partition under the known automorphisms fixing the current
    /// individualisation prefix pointwise.
    fn orbits(&self, n: usize) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..n).collect();
        for g in self.autos.iter().filter(|g| self.prefix.iter().all(|&p| g[p] == p)) {
            for (x, &y) in g.iter().enumerate() {
                let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..n).map(|x| find(&mut parent, x)).collect()
    }

    fn descend(&mut self, colors: Vec<usize>) {
        let n = colors.len();
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c] += 1;
        }
        let target = (0..n).find(|&c| sizes[c] > 1);
        let Some(target) = target else {
            let code = encode(self.tables.s, &colors);
            match &self.best {
                Some((b, labeling)) if code == *b => {
                    let mut inv = vec![0; n];
                    for (old, &new) in labeling.iter().enumerate() {
                        inv[new] = old;
                    }
                    let g: Vec<usize> = colors.iter().map(|&new| inv[new]).collect();
                    if g.iter().enumerate().any(|(x, &y)| x != y) {
                        self.autos.push(g);
                    }
                }
                Some((b, _)) if code > *b => {}
                _ => self.best = Some((code, colors)),
            }
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for v in (0..n).filter(|&v| colors[v] == target) {
            let orbits = self.orbits(n);
            if tried.iter().any(|&t| orbits[t] == orbits[v]) {
                continue;
            }
            tried.push(v);
            let mut next = colors.clone();
            rerank(&mut next, |i, c| (c, (i != v) as u64));
            self.tables.refine(&mut next);
            self.prefix.push(v);
            self.descend(next);
            self.prefix.pop();
        }
    }
}

/// Canonical code and labelling of `s`.
pub fn canonical_form(s: &FinStructure) -> CanonicalForm {
    let tables = Tables::new(s);
    let n = s.size();
    let mut colors = vec![0usize; n];
    let mut init = vec![0u64; n];
    for (ci, &c) in s.constants().iter().enumerate() {
        init[c] = init[c].wrapping_add(mix(9000 + ci as u64));
    }
    rerank(&mut colors, |i, c| (c, init[i]));
    tables.refine(&mut colors);
    let mut search = Search { tables, best: None, autos: Vec::new(), prefix: Vec::new() };
    search.descend(colors);
    let (code, labeling) = search.best.expect("at least one leaf");
    CanonicalForm { code, labeling }
}

pub fn canonical_code(s: &FinStructure) -> Vec<u32> {
    canonical_form(s).code
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::fixtures::{cycles, unary_signature};
    use crate::structures::FinStructure;
    use crate::syntax::Signature;
    use std::sync::Arc;

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

    /// Independent isomorphism test: try every bijection.
    fn brute_isomorphic(a: &FinStructure, b: &FinStructure) -> bool {
        a.size() == b.size() && permutations(a.size()).iter().any(|p| strip(&a.permuted(p)) == strip(b))
    }

    fn strip(s: &FinStructure) -> FinStructure {
        let names = (0..s.size()).map(|i| format!("v{i}")).collect();
        s.clone().with_name("x").with_element_names(names).unwrap()
    }

    #[test]
    fn permuted_copies_share_code() {
        let sig = unary_signature();
        let a = cycles("A", sig, &[3, 2, 1, 1]);
        let base = canonical_code(&a);
        for p in permutations(7).into_iter().step_by(97) {
            assert_eq!(canonical_code(&a.permuted(&p)), base);
        }
    }

    #[test]
    fn codes_separate_exactly_the_iso_classes() {
        let sig = Arc::new(Signature::new("S").with_function("f", 1).unwrap().with_relation("R", 2).unwrap());
        let n = 3;
        let mut structs = Vec::new();
        // a deterministic spread of tables
        for seed in 0..60u64 {
            let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let mut next = || {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (x >> 33) as usize
            };
            let f: Vec<usize> = (0..n).map(|_| next() % n).collect();
            let r: Vec<bool> = (0..n * n).map(|_| next() % 4 == 0).collect();
            let names = (0..n).map(|i| format!("v{i}")).collect();
            structs.push(FinStructure::from_tables("x", sig.clone(), names, vec![f], vec![r], vec![]).unwrap());
        }
        for a in &structs {
            for b in &structs {
                let same = canonical_code(a) == canonical_code(b);
                let iso = brute_isomorphic(a, b);
                assert_eq!(same, iso);
            }
        }
    }
}
