//! Bounded constructive search for embedding-immersion amalgamation squares,
//! and the plain embedding-amalgamation probe.
//!
//! ```text
//!   A --e--> B
//!   |        |
//!   i        i'
//!   v        v
//!   C --e'-> D
//! ```
//!
//! `e` an embedding, `i` an immersion; `e'` must be an embedding and `i'` an
//! immersion with `i' ∘ e = e' ∘ i`. Asking `D` to model the full
//! h-inductive diagram of `B` is replaced by asking `i'` to be an immersion.

use std::ops::ControlFlow;

use serde_json::{json, Value};

use crate::error::CheckError;
use crate::morphisms::{check_kind, compose, for_each_morphism, is_embedding, is_immersion, Kind};
use crate::structures::{FinStructure, ModelSet, StructureJson};
use crate::syntax::Theory;
use crate::theories::{models_within, require_model, SearchBudget};

#[derive(Clone, Debug)]
pub struct AmalgamRequest {
    pub base: FinStructure,
    /// `B` with the embedding `e: A → B`.
    pub top: FinStructure,
    pub e: Vec<usize>,
    /// `C` with the immersion `i: A → C`.
    pub left: FinStructure,
    pub i: Vec<usize>,
    pub theory: Theory,
    pub budget: SearchBudget,
}

impl AmalgamRequest {
    /// Checks the request invariants: all three structures model `T`, `e`
    /// is an embedding and `i` an immersion.
    pub fn validate(&self) -> Result<(), CheckError> {
        for s in [&self.base, &self.top, &self.left] {
            require_model(s, &self.theory)?;
        }
        if !is_embedding(&self.base, &self.top, &self.e)? {
            return Err(CheckError::Precondition(format!("e: {} -> {} is not an embedding", self.base.name, self.top.name)));
        }
        if !is_immersion(&self.base, &self.left, &self.i)? {
            return Err(CheckError::Precondition(format!("i: {} -> {} is not an immersion", self.base.name, self.left.name)));
        }
        self.budget.check()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamResult {
    pub d: FinStructure,
    /// `e': C → D`.
    pub e_prime: Vec<usize>,
    /// `i': B → D`.
    pub i_prime: Vec<usize>,
    pub e_prime_embedding: bool,
    pub i_prime_immersion: bool,
    pub commutes: bool,
}

impl AmalgamResult {
    pub fn all_true(&self) -> bool {
        self.e_prime_embedding && self.i_prime_immersion && self.commutes
    }

    /// Recomputes the three flags through the independent kind checks.
    pub fn reverify(&self, req: &AmalgamRequest) -> bool {
        check_kind(&req.left, &self.d, &self.e_prime, Kind::Embedding).unwrap_or(false)
            && check_kind(&req.top, &self.d, &self.i_prime, Kind::Immersion).unwrap_or(false)
            && compose(&req.e, &self.i_prime) == compose(&req.i, &self.e_prime)
    }

    pub fn to_json(&self, req: &AmalgamRequest) -> Value {
        let pairs = |from: &FinStructure, map: &[usize]| -> Vec<(String, String)> {
            map.iter().enumerate().map(|(x, &y)| (from.element_name(x).to_string(), self.d.element_name(y).to_string())).collect()
        };
        json!({
            "d": StructureJson::from(&self.d),
            "e_prime": pairs(&req.left, &self.e_prime),
            "i_prime": pairs(&req.top, &self.i_prime),
            "e_prime_embedding": self.e_prime_embedding,
            "i_prime_immersion": self.i_prime_immersion,
            "commutes": self.commutes,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Amalgam {
    Found(Box<AmalgamResult>),
    NotFoundWithinBudget { truncated: bool },
}

impl Amalgam {
    pub fn result(&self) -> Option<&AmalgamResult> {
        match self {
            Amalgam::Found(r) => Some(r),
            Amalgam::NotFoundWithinBudget { .. } => None,
        }
    }
}

/// First `(D, e', i')` in model order, then `e'` search order.
pub fn amalgamate_ei(req: &AmalgamRequest) -> Result<Amalgam, CheckError> {
    req.validate()?;
    let models = models_within(&req.theory, &req.budget)?;
    amalgamate_ei_in(req, &models)
}

/// [`amalgamate_ei`] over an already enumerated model set.
pub fn amalgamate_ei_in(req: &AmalgamRequest, models: &ModelSet) -> Result<Amalgam, CheckError> {
    req.validate()?;
    let (b, c) = (&req.top, &req.left);
    let mut truncated = models.truncated;
    let max_nodes = req.budget.max_nodes;
    for d in models.models.iter().filter(|d| d.size() >= b.size().max(c.size()) && d.size() <= req.budget.max_model_size) {
        let mut found = None;
        let mut err = None;
        truncated |= for_each_morphism(c, d, Kind::Embedding, &[], max_nodes, &mut |e_prime| {
            // i'(e(a)) = e'(i(a))
            let pin: Vec<(usize, usize)> = (0..req.base.size()).map(|a| (req.e[a], e_prime[req.i[a]])).collect();
            let mut hit = None;
            match for_each_morphism(b, d, Kind::Immersion, &pin, max_nodes, &mut |i_prime| {
                hit = Some(i_prime.to_vec());
                ControlFlow::Break(())
            }) {
                Ok(t) => truncated |= t,
                Err(e) => {
                    err = Some(e);
                    return ControlFlow::Break(());
                }
            }
            match hit {
                Some(i_prime) => {
                    found = Some((e_prime.to_vec(), i_prime));
                    ControlFlow::Break(())
                }
                None => ControlFlow::Continue(()),
            }
        })?;
        if let Some(e) = err {
            return Err(e.into());
        }
        if let Some((e_prime, i_prime)) = found {
            let e_prime_embedding = is_embedding(c, d, &e_prime)?;
            let i_prime_immersion = is_immersion(b, d, &i_prime)?;
            let commutes = compose(&req.e, &i_prime) == compose(&req.i, &e_prime);
            return Ok(Amalgam::Found(Box::new(AmalgamResult {
                d: d.clone(),
                e_prime,
                i_prime,
                e_prime_embedding,
                i_prime_immersion,
                commutes,
            })));
        }
    }
    Ok(Amalgam::NotFoundWithinBudget { truncated })
}

/// A pair of embeddings out of `A` with no amalgam found within the budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnamalgamatedPair {
    pub b1: FinStructure,
    pub e1: Vec<usize>,
    pub b2: FinStructure,
    pub e2: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingAmalgamationReport {
    pub pairs_checked: usize,
    pub failures: Vec<UnamalgamatedPair>,
    pub truncated: bool,
}

impl EmbeddingAmalgamationReport {
    pub fn to_json(&self, a: &FinStructure) -> Value {
        let pairs = |from: &FinStructure, to: &FinStructure, map: &[usize]| -> Vec<(String, String)> {
            map.iter().enumerate().map(|(x, &y)| (from.element_name(x).to_string(), to.element_name(y).to_string())).collect()
        };
        json!({
            "pairs_checked": self.pairs_checked,
            "truncated": self.truncated,
            "failures": self.failures.iter().map(|f| json!({
                "b1": f.b1.name,
                "e1": pairs(a, &f.b1, &f.e1),
                "b2": f.b2.name,
                "e2": pairs(a, &f.b2, &f.e2),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Whether some `D` (size ≤ N) has embeddings `g1: B1 → D`, `g2: B2 → D`
/// with `g1 ∘ e1 = g2 ∘ e2`.
fn embeddings_amalgamate(
    models: &ModelSet,
    budget: &SearchBudget,
    (b1, e1): (&FinStructure, &[usize]),
    (b2, e2): (&FinStructure, &[usize]),
) -> Result<(bool, bool), CheckError> {
    let mut truncated = false;
    for d in models.models.iter().filter(|d| d.size() >= b1.size().max(b2.size()) && d.size() <= budget.max_model_size) {
        let mut ok = false;
        let mut err = None;
        truncated |= for_each_morphism(b1, d, Kind::Embedding, &[], budget.max_nodes, &mut |g1| {
            let pin: Vec<(usize, usize)> = (0..e1.len()).map(|a| (e2[a], g1[e1[a]])).collect();
            match for_each_morphism(b2, d, Kind::Embedding, &pin, budget.max_nodes, &mut |_| {
                ok = true;
                ControlFlow::Break(())
            }) {
                Ok(t) => truncated |= t,
                Err(e) => err = Some(e),
            }
            if ok || err.is_some() {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        if let Some(e) = err {
            return Err(e.into());
        }
        if ok {
            return Ok((true, truncated));
        }
    }
    Ok((false, truncated))
}

/// Every pair of embeddings `A → B1`, `A → B2` with `|B1|, |B2| ≤ sample`
/// (unordered over the model list), checked for an embedding amalgam of
/// size ≤ N. No equivalence with pac-ness is asserted.
pub fn embedding_amalgamation_probe(
    a: &FinStructure,
    theory: &Theory,
    sample: usize,
    budget: &SearchBudget,
) -> Result<EmbeddingAmalgamationReport, CheckError> {
    require_model(a, theory)?;
    let models = models_within(theory, budget)?;
    let mut truncated = models.truncated;
    let mut extensions: Vec<(&FinStructure, Vec<usize>)> = Vec::new();
    for b in models.models.iter().filter(|b| b.size() >= a.size() && b.size() <= sample) {
        truncated |= for_each_morphism(a, b, Kind::Embedding, &[], budget.max_nodes, &mut |e| {
            extensions.push((b, e.to_vec()));
            ControlFlow::Continue(())
        })?;
    }
    let mut failures = Vec::new();
    let mut pairs_checked = 0;
    for (x, (b1, e1)) in extensions.iter().enumerate() {
        for (b2, e2) in &extensions[x..] {
            pairs_checked += 1;
            let (ok, t) = embeddings_amalgamate(&models, budget, (b1, e1), (b2, e2))?;
            truncated |= t;
            if !ok {
                failures.push(UnamalgamatedPair { b1: (*b1).clone(), e1: e1.clone(), b2: (*b2).clone(), e2: e2.clone() });
            }
        }
    }
    Ok(EmbeddingAmalgamationReport { pairs_checked, failures, truncated })
}
