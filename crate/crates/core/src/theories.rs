//! Bounded semantic engine: entailment by countermodel search over the
//! enumerated finite models, Ctr_T probing, and common continuations.
//!
//! `Holds` always means "no counterexample among the models of size at most
//! N"; verdicts carry the budget they were computed under.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CheckError;
use crate::morphisms::{find_morphisms, Kind, Separation};
use crate::structures::{enumerate_models, satisfies_theory, CompiledSentence, EnumLimits, FinStructure, ModelSet, StructureJson};
use crate::syntax::{enumerate_qf_positive, HInductiveSentence, PositiveFormula, QfShape, Theory};

/// Bounds for every search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// N: largest model size enumerated.
    pub max_model_size: usize,
    /// Largest number of atoms in an enumerated formula.
    pub max_formula_atoms: usize,
    pub max_term_depth: usize,
    /// Search-tree nodes per enumeration or morphism search.
    pub max_nodes: u64,
    /// Longest auxiliary parameter tuple `b̄` in certificate search.
    pub max_params: usize,
    pub time_limit: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_model_size: 6, max_formula_atoms: 3, max_term_depth: 1, max_nodes: 200_000_000, max_params: 2, time_limit: None }
    }
}

impl SearchBudget {
    pub fn with_size(mut self, n: usize) -> Self {
        self.max_model_size = n;
        self
    }

    pub fn with_atoms(mut self, atoms: usize) -> Self {
        self.max_formula_atoms = atoms;
        self
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.max_term_depth = depth;
        self
    }

    pub fn with_nodes(mut self, nodes: u64) -> Self {
        self.max_nodes = nodes;
        self
    }

    pub fn with_params(mut self, params: usize) -> Self {
        self.max_params = params;
        self
    }

    pub fn limits(&self) -> EnumLimits {
        EnumLimits { max_nodes: self.max_nodes, deadline: self.time_limit.map(|t| Instant::now() + t) }
    }

    pub fn check(&self) -> Result<(), CheckError> {
        if self.max_model_size == 0 || self.max_formula_atoms == 0 || self.max_nodes == 0 {
            return Err(CheckError::Precondition("model size, formula atoms and nodes must be at least 1".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "N": self.max_model_size,
            "d": self.max_term_depth,
            "atoms": self.max_formula_atoms,
            "nodes": self.max_nodes,
            "params": self.max_params,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Holds,
    Fails,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// No model of the theory exists up to the bound.
    InconsistentUpToBound,
    /// A budget ran out; the search was incomplete.
    Truncated,
}

/// Re-checkable evidence behind a `Fails` (or `Found`) outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A model violating a sentence at the given tuple.
    Countermodel { model: FinStructure, assignment: Vec<(String, usize)> },
    /// A target model with a map of the stated kind that is not an
    /// immersion, and a positive formula gained along it.
    NonImmersion { target: FinStructure, map: Vec<usize>, kind: Kind, separation: Option<Separation> },
    /// A common continuation with both homomorphisms.
    Continuation { model: FinStructure, left: Vec<usize>, right: Vec<usize> },
}

impl Witness {
    pub fn to_json(&self, source: Option<&FinStructure>) -> Value {
        match self {
            Witness::Countermodel { model, assignment } => json!({
                "type": "countermodel",
                "model": StructureJson::from(model),
                "assignment": assignment.iter().map(|(v, e)| (v.clone(), model.element_name(*e).to_string())).collect::<Vec<_>>(),
            }),
            Witness::NonImmersion { target, map, kind, separation } => json!({
                "type": "non_immersion",
                "target": StructureJson::from(target),
                "map": map_pairs(source, target, map),
                "kind": kind,
                "gained": separation.as_ref().map(|s| match source {
                    Some(a) => s.describe(a),
                    None => s.formula.to_string(),
                }),
            }),
            Witness::Continuation { model, left, right } => json!({
                "type": "continuation",
                "model": StructureJson::from(model),
                "left": left.iter().map(|&e| model.element_name(e).to_string()).collect::<Vec<_>>(),
                "right": right.iter().map(|&e| model.element_name(e).to_string()).collect::<Vec<_>>(),
            }),
        }
    }
}

fn map_pairs(source: Option<&FinStructure>, target: &FinStructure, map: &[usize]) -> Vec<(String, String)> {
    map.iter()
        .enumerate()
        .map(|(a, &b)| {
            let from = source.map(|s| s.element_name(a).to_string()).unwrap_or_else(|| a.to_string());
            (from, target.element_name(b).to_string())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedVerdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub bound: SearchBudget,
    pub flags: Vec<Flag>,
}

impl BoundedVerdict {
    pub fn holds(bound: SearchBudget) -> Self {
        BoundedVerdict { outcome: Outcome::Holds, witness: None, bound, flags: Vec::new() }
    }

    pub fn fails(bound: SearchBudget, witness: Witness) -> Self {
        BoundedVerdict { outcome: Outcome::Fails, witness: Some(witness), bound, flags: Vec::new() }
    }

    pub fn flag(mut self, flag: Flag) -> Self {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
            self.flags.sort();
        }
        self
    }

    /// `Holds` turns into `Unknown` when the search was truncated.
    pub(crate) fn settle(mut self, truncated: bool) -> Self {
        if truncated {
            self = self.flag(Flag::Truncated);
            if self.outcome == Outcome::Holds {
                self.outcome = Outcome::Unknown;
            }
        }
        self
    }

    pub fn to_json(&self, source: Option<&FinStructure>) -> Value {
        let mut v = json!({
            "outcome": self.outcome,
            "bound": self.bound.to_json(),
            "flags": self.flags,
        });
        if let Some(w) = &self.witness {
            v["witness"] = w.to_json(source);
        }
        v
    }

    /// One-line human summary; every `Holds` names its bound.
    pub fn summary(&self) -> String {
        let n = self.bound.max_model_size;
        let mut s = match self.outcome {
            Outcome::Holds => format!("Holds (no counterexample up to size N={n})"),
            Outcome::Fails => "Fails".to_string(),
            Outcome::Unknown => format!("Unknown (search incomplete up to size N={n})"),
        };
        for f in &self.flags {
            s.push_str(match f {
                Flag::InconsistentUpToBound => " [no models up to the bound]",
                Flag::Truncated => " [budget exhausted]",
            });
        }
        s
    }
}

/// The models of `theory` up to the budget's size bound.
pub fn models_within(theory: &Theory, budget: &SearchBudget) -> Result<ModelSet, CheckError> {
    budget.check()?;
    enumerate_models(theory, budget.max_model_size, budget.limits())
}

/// Bounded `T ⊢ σ`, searching the given model set for a countermodel.
pub fn entails_in(models: &ModelSet, sentence: &HInductiveSentence, budget: &SearchBudget) -> Result<BoundedVerdict, CheckError> {
    let Some(first) = models.models.first() else {
        let v = BoundedVerdict::holds(*budget);
        let v = if models.truncated { v } else { v.flag(Flag::InconsistentUpToBound) };
        return Ok(v.settle(models.truncated));
    };
    sentence.check_sorts(first.signature())?;
    sentence.check_closed()?;
    let compiled = CompiledSentence::compile(first.signature(), sentence)?;
    for m in models.models.iter().filter(|m| m.size() <= budget.max_model_size) {
        if let Some(tuple) = compiled.violation(m) {
            let assignment = sentence.vars.iter().cloned().zip(tuple).collect();
            return Ok(BoundedVerdict::fails(*budget, Witness::Countermodel { model: m.clone(), assignment }));
        }
    }
    Ok(BoundedVerdict::holds(*budget).settle(models.truncated))
}

/// Bounded `T ⊢ σ` by countermodel search.
pub fn entails_bounded(theory: &Theory, sentence: &HInductiveSentence, budget: &SearchBudget) -> Result<BoundedVerdict, CheckError> {
    sentence.check_sorts(&theory.signature)?;
    let models = models_within(theory, budget)?;
    let mut v = entails_in(&models, sentence, budget)?;
    if models.models.is_empty() && !models.truncated {
        v = v.flag(Flag::InconsistentUpToBound);
    }
    Ok(v)
}

/// Members of Ctr_T(φ) among the enumerated candidates.
#[derive(Clone, Debug)]
pub struct CtrProbe {
    /// Free variables shared by φ and every candidate ψ.
    pub vars: Vec<String>,
    pub members: Vec<(PositiveFormula, BoundedVerdict)>,
    pub candidates: usize,
    pub truncated: bool,
}

/// Candidates ψ are conjunctions of atoms over the free variables of φ;
/// ψ is reported when `T ⊢ ¬∃x̄(φ ∧ ψ)` holds within the budget.
pub fn ctr_probe(theory: &Theory, phi: &PositiveFormula, budget: &SearchBudget) -> Result<CtrProbe, CheckError> {
    phi.check_sorts(&theory.signature)?;
    let vars: Vec<String> = phi.free_vars().into_iter().collect();
    let models = models_within(theory, budget)?;
    let mut members = Vec::new();
    let mut candidates = 0;
    for psi in
        enumerate_qf_positive(&theory.signature, &vars, QfShape::ConjunctionOfAtoms, budget.max_formula_atoms, budget.max_term_depth)?
    {
        candidates += 1;
        let sentence = HInductiveSentence {
            vars: vars.clone(),
            antecedent: PositiveFormula::And(vec![phi.clone(), psi.clone()]),
            consequent: PositiveFormula::falsity(),
        };
        let v = entails_in(&models, &sentence, budget)?;
        if v.outcome == Outcome::Holds {
            members.push((psi, v));
        }
    }
    Ok(CtrProbe { vars, members, candidates, truncated: models.truncated })
}

/// Outcome of a common-continuation search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Continuation {
    Found(BoundedVerdict),
    NotFoundWithinBudget(BoundedVerdict),
}

impl Continuation {
    pub fn verdict(&self) -> &BoundedVerdict {
        match self {
            Continuation::Found(v) | Continuation::NotFoundWithinBudget(v) => v,
        }
    }
}

pub(crate) fn require_model(a: &FinStructure, theory: &Theory) -> Result<(), CheckError> {
    if a.signature() != &theory.signature {
        return Err(crate::error::SortError::SignatureMismatch(a.signature().name.clone(), theory.signature.name.clone()).into());
    }
    if let Some(axiom) = satisfies_theory(a, theory)? {
        return Err(CheckError::NotAModel { structure: a.name.clone(), theory: theory.name.clone(), axiom });
    }
    Ok(())
}

/// A model `D` of `T` with `|D| ≤ N` receiving homomorphisms from both `A`
/// and `B`; the first in enumeration order.
pub fn common_continuation(a: &FinStructure, b: &FinStructure, theory: &Theory, budget: &SearchBudget) -> Result<Continuation, CheckError> {
    require_model(a, theory)?;
    require_model(b, theory)?;
    let models = models_within(theory, budget)?;
    let mut truncated = models.truncated;
    for d in &models.models {
        let left = find_morphisms(a, d, Kind::Hom, Some(1), &[], budget.max_nodes)?;
        truncated |= left.truncated;
        let Some(l) = left.morphisms.into_iter().next() else { continue };
        let right = find_morphisms(b, d, Kind::Hom, Some(1), &[], budget.max_nodes)?;
        truncated |= right.truncated;
        if let Some(r) = right.morphisms.into_iter().next() {
            let w = Witness::Continuation { model: d.clone(), left: l.map, right: r.map };
            return Ok(Continuation::Found(BoundedVerdict {
                outcome: Outcome::Holds,
                witness: Some(w),
                bound: *budget,
                flags: Vec::new(),
            }));
        }
    }
    let mut v = BoundedVerdict { outcome: Outcome::Fails, witness: None, bound: *budget, flags: Vec::new() };
    if truncated {
        v = v.flag(Flag::Truncated);
        v.outcome = Outcome::Unknown;
    }
    Ok(Continuation::NotFoundWithinBudget(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::fixtures::{cycles, unary_signature};
    use crate::syntax::{parse_formula, parse_sentence};

    fn theory(name: &str, axioms: &[&str]) -> Theory {
        let sig = unary_signature();
        let mut t = Theory::new(name, sig.clone());
        for (i, a) in axioms.iter().enumerate() {
            t = t.with_axiom(&format!("a{i}"), parse_sentence(a, &sig).unwrap()).unwrap();
        }
        t
    }

    #[test]
    fn verdict_flips_with_budget() {
        let t = theory("Tnofix", &["not exists x. f(x) = x"]);
        let s = parse_sentence("not exists x. f(f(f(x))) = x", &t.signature).unwrap();
        let small = entails_bounded(&t, &s, &SearchBudget::default().with_size(2)).unwrap();
        assert_eq!(small.outcome, Outcome::Holds);
        let big = entails_bounded(&t, &s, &SearchBudget::default().with_size(3)).unwrap();
        assert_eq!(big.outcome, Outcome::Fails);
        match big.witness {
            Some(Witness::Countermodel { model, .. }) => assert_eq!(model.size(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_theory_refutes_identity() {
        let t = theory("L", &[]);
        let s = parse_sentence("forall x. f(x) = x", &t.signature).unwrap();
        let v = entails_bounded(&t, &s, &SearchBudget::default().with_size(2)).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
    }

    #[test]
    fn inconsistent_theory_is_flagged() {
        let t = theory("Bot", &["not exists x. x = x"]);
        let s = parse_sentence("forall x. f(x) = x", &t.signature).unwrap();
        let v = entails_bounded(&t, &s, &SearchBudget::default().with_size(3)).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert_eq!(v.flags, vec![Flag::InconsistentUpToBound]);
        assert!(v.summary().contains("up to size N=3"));
    }

    #[test]
    fn truncation_turns_holds_into_unknown() {
        let t = theory("Tinj", &["forall x y. f(x) = f(y) -> x = y"]);
        let s = parse_sentence("forall x. x = x", &t.signature).unwrap();
        let v = entails_bounded(&t, &s, &SearchBudget::default().with_size(5).with_nodes(10)).unwrap();
        assert_eq!(v.outcome, Outcome::Unknown);
        assert!(v.flags.contains(&Flag::Truncated));
    }

    #[test]
    fn continuation_of_fixed_point() {
        let t = theory("Tinj", &["forall x y. f(x) = f(y) -> x = y"]);
        let sig = t.signature.clone();
        let ae = cycles("Ae", sig.clone(), &[1]);
        let c2 = cycles("C2", sig, &[2]);
        match common_continuation(&c2, &ae, &t, &SearchBudget::default().with_size(3)).unwrap() {
            Continuation::Found(v) => match v.witness {
                Some(Witness::Continuation { model, left, right }) => {
                    assert_eq!(model.size(), 1);
                    assert_eq!(left, vec![0, 0]);
                    assert_eq!(right, vec![0]);
                }
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ctr_of_valid_formula_is_empty() {
        let t = theory("L", &[]);
        let phi = parse_formula("x = x", &t.signature).unwrap();
        let probe = ctr_probe(&t, &phi, &SearchBudget::default().with_size(3).with_atoms(2)).unwrap();
        assert!(probe.members.is_empty());
        assert!(probe.candidates > 0);
    }
}
