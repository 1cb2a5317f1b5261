//! Bounded pc / pac checks, pac certificates, Alc_T probing and the T_h
//! axiom constructor, greedy pac saturation, and e-elementary extensions.

mod alc;
mod certificate;
mod elementary;
mod saturate;

pub use alc::{
    alc_disjunction_combine, alc_equivalent_pair, alc_probe, alc_probe_sources, build_th_axioms, AlcPair, AlcProbe, CombinedPair, ThBinding,
};
pub use certificate::{
    find_certificate, find_certificates, verify_certificate, verify_certificate_in, CertificateCheck, CertificateSearch, PacCertificate,
};
pub use elementary::is_e_elementary_bounded;
pub use saturate::{pac_saturate, Saturation, SaturationStep};

use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CheckError;
use crate::morphisms::{find_retraction, for_each_morphism, separating_formula, Kind, Morphism, Separation};
use crate::structures::{CompiledFormula, FinStructure, ModelSet};
use crate::syntax::{enumerate_qf_positive, Atom, PositiveFormula, QfShape, Signature, Term, Theory};
use crate::theories::{models_within, require_model, BoundedVerdict, Outcome, SearchBudget, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Pc,
    Pac,
    EElementary,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Pc => "pc",
            Mode::Pac => "pac",
            Mode::EElementary => "e_elementary",
        })
    }
}

/// Result of a pc / pac / e-elementary check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub subject: FinStructure,
    pub theory: String,
    pub mode: Mode,
    pub verdict: BoundedVerdict,
    /// Domain of the witness map when it is not `subject` (e-elementary
    /// Stage 1, where the map under test starts at the smaller structure).
    pub witness_domain: Option<FinStructure>,
}

impl CheckReport {
    pub fn outcome(&self) -> Outcome {
        self.verdict.outcome
    }

    /// The map of the required kind that is not an immersion, with its target.
    pub fn counterexample(&self) -> Option<(Morphism, &FinStructure)> {
        match &self.verdict.witness {
            Some(Witness::NonImmersion { target, map, kind, .. }) => Some((Morphism { map: map.clone(), kind: *kind }, target)),
            _ => None,
        }
    }

    /// Re-checks a `Fails` witness through the independent kind checks: the
    /// map has the required kind, is not an immersion, and the separating
    /// formula (if any) really is gained.
    pub fn witness_verifies(&self) -> bool {
        let domain = self.domain();
        match &self.verdict.witness {
            Some(Witness::NonImmersion { target, map, kind, separation }) => {
                let kind_ok = crate::morphisms::check_kind(domain, target, map, *kind).unwrap_or(false);
                let not_imm = !crate::morphisms::is_immersion(domain, target, map).unwrap_or(true);
                let sep_ok = separation.as_ref().is_none_or(|s| s.verify(domain, target, map));
                kind_ok && not_imm && sep_ok
            }
            _ => false,
        }
    }

    /// The structure the witness map starts from.
    pub fn domain(&self) -> &FinStructure {
        self.witness_domain.as_ref().unwrap_or(&self.subject)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "subject": self.subject.name,
            "theory": self.theory,
            "mode": self.mode,
            "verdict": self.verdict.to_json(Some(self.domain())),
        })
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{} {} under {}: {}", self.mode, self.subject.name, self.theory, self.verdict.summary());
        if let Some(Witness::NonImmersion { target, map, kind, separation }) = &self.verdict.witness {
            let m = Morphism { map: map.clone(), kind: *kind };
            let d = self.domain();
            s.push_str(&format!("\n  {} {} -> {}: {}", kind, d.name, target.name, m.literal(d, target)));
            if let Some(sep) = separation {
                s.push_str(&format!("\n  gained: {}", sep.describe(d)));
            }
        }
        s
    }
}

/// Searches `models` (sizes ≤ N) for a map of `kind` out of `a` that is not
/// an immersion. First failure in enumeration order wins.
fn closure_check(
    a: &FinStructure,
    theory: &Theory,
    models: &ModelSet,
    budget: &SearchBudget,
    kind: Kind,
    mode: Mode,
) -> Result<CheckReport, CheckError> {
    let mut truncated = models.truncated;
    for b in models.models.iter().filter(|b| b.size() <= budget.max_model_size) {
        if kind == Kind::Embedding && b.size() < a.size() {
            continue;
        }
        let mut found: Option<Vec<usize>> = None;
        truncated |= for_each_morphism(a, b, kind, &[], budget.max_nodes, &mut |map| {
            if find_retraction(a, b, map).expect("validated").is_none() {
                found = Some(map.to_vec());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        if let Some(map) = found {
            let separation = separating_formula(a, b, &map)?;
            let witness = Witness::NonImmersion { target: b.clone(), map, kind, separation };
            return Ok(CheckReport {
                subject: a.clone(),
                theory: theory.name.clone(),
                mode,
                verdict: BoundedVerdict::fails(*budget, witness),
                witness_domain: None,
            });
        }
    }
    Ok(CheckReport {
        subject: a.clone(),
        theory: theory.name.clone(),
        mode,
        verdict: BoundedVerdict::holds(*budget).settle(truncated),
        witness_domain: None,
    })
}

/// Bounded pc: every homomorphism from `a` into a model of `theory` of size
/// at most N is an immersion.
pub fn is_pc_bounded(a: &FinStructure, theory: &Theory, budget: &SearchBudget) -> Result<CheckReport, CheckError> {
    require_model(a, theory)?;
    let models = models_within(theory, budget)?;
    closure_check(a, theory, &models, budget, Kind::Hom, Mode::Pc)
}

/// Bounded pac: every embedding from `a` into a model of `theory` of size at
/// most N is an immersion.
pub fn is_pac_bounded(a: &FinStructure, theory: &Theory, budget: &SearchBudget) -> Result<CheckReport, CheckError> {
    require_model(a, theory)?;
    let models = models_within(theory, budget)?;
    closure_check(a, theory, &models, budget, Kind::Embedding, Mode::Pac)
}

/// [`is_pc_bounded`] against an already enumerated model set.
pub fn is_pc_in(a: &FinStructure, theory: &Theory, models: &ModelSet, budget: &SearchBudget) -> Result<CheckReport, CheckError> {
    require_model(a, theory)?;
    closure_check(a, theory, models, budget, Kind::Hom, Mode::Pc)
}

/// [`is_pac_bounded`] against an already enumerated model set.
pub fn is_pac_in(a: &FinStructure, theory: &Theory, models: &ModelSet, budget: &SearchBudget) -> Result<CheckReport, CheckError> {
    require_model(a, theory)?;
    closure_check(a, theory, models, budget, Kind::Embedding, Mode::Pac)
}

/// The first target `B` (model order) with a map of `kind` from `a` along
/// which one of the closed positive `sentences` is gained: false in `a`,
/// true in `B`. Any such map is a non-immersion; the report carries the
/// sentence as its separation.
pub fn find_gained_sentence(
    a: &FinStructure,
    theory: &Theory,
    models: &ModelSet,
    kind: Kind,
    sentences: &[PositiveFormula],
    budget: &SearchBudget,
) -> Result<Option<CheckReport>, CheckError> {
    require_model(a, theory)?;
    let mut compiled = Vec::new();
    for s in sentences {
        if !s.free_vars().is_empty() {
            return Err(CheckError::Precondition(format!("`{s}` is not a sentence")));
        }
        compiled.push(CompiledFormula::compile(a.signature(), s, &[])?);
    }
    let false_in_a: Vec<usize> = (0..sentences.len()).filter(|&i| !compiled[i].eval(a, &[])).collect();
    let mode = if kind == Kind::Hom { Mode::Pc } else { Mode::Pac };
    for b in models.models.iter().filter(|b| b.size() <= budget.max_model_size) {
        let Some(&gained) = false_in_a.iter().find(|&&i| compiled[i].eval(b, &[])) else { continue };
        let mut found = None;
        for_each_morphism(a, b, kind, &[], budget.max_nodes, &mut |map| {
            found = Some(map.to_vec());
            ControlFlow::Break(())
        })?;
        if let Some(map) = found {
            let separation = Some(Separation { formula: sentences[gained].clone(), params: Vec::new() });
            let witness = Witness::NonImmersion { target: b.clone(), map, kind, separation };
            return Ok(Some(CheckReport {
                subject: a.clone(),
                theory: theory.name.clone(),
                mode,
                verdict: BoundedVerdict::fails(*budget, witness),
                witness_domain: None,
            }));
        }
    }
    Ok(None)
}

/// The ψ family used for whole-structure certificate audits: every
/// `∃ȳ χ` with `|ȳ| ≤ max_exists`, `χ` a conjunction, disjunction, or
/// mixed `α ∧ (β ∨ γ)` / `α ∨ (β ∧ γ)` of at most `max_atoms` non-trivial
/// atoms over `free ∪ ȳ`, every bound variable used. Prenex forms cover all
/// positive formulas of that size up to equivalence.
pub fn psi_family(
    sig: &Signature,
    free: &[String],
    max_exists: usize,
    max_atoms: usize,
    term_depth: usize,
) -> Result<Vec<PositiveFormula>, CheckError> {
    let mut out = Vec::new();
    for k in 0..=max_exists {
        let bound: Vec<String> = (0..k).map(|i| format!("z{i}")).collect();
        let mut vars = free.to_vec();
        vars.extend(bound.iter().cloned());
        let atoms: Vec<Atom> =
            crate::syntax::enumerate_atoms(sig, &vars, term_depth).into_iter().filter(|a| !matches!(a, Atom::Eq(l, r) if l == r)).collect();
        let wrap = |chi: PositiveFormula| -> Option<PositiveFormula> {
            let used = chi.free_vars();
            if bound.iter().all(|v| used.contains(v)) {
                Some(PositiveFormula::exists(bound.clone(), chi))
            } else {
                None
            }
        };
        let a = |i: usize| PositiveFormula::Atom(atoms[i].clone());
        for shape in [QfShape::ConjunctionOfAtoms, QfShape::DisjunctionOfAtoms] {
            for chi in enumerate_qf_positive(sig, &vars, shape, max_atoms, term_depth)? {
                if chi.atoms().iter().any(|at| matches!(at, Atom::Eq(l, r) if l == r)) {
                    continue;
                }
                // singletons come out of both shapes
                if shape == QfShape::DisjunctionOfAtoms && chi.atom_count() == 1 {
                    continue;
                }
                out.extend(wrap(chi));
            }
        }
        if max_atoms >= 3 {
            for i in 0..atoms.len() {
                for j in 0..atoms.len() {
                    for l in j + 1..atoms.len() {
                        if i == j || i == l {
                            continue;
                        }
                        let pair_or = PositiveFormula::Or(vec![a(j), a(l)]);
                        let pair_and = PositiveFormula::And(vec![a(j), a(l)]);
                        out.extend(wrap(PositiveFormula::And(vec![a(i), pair_or])));
                        out.extend(wrap(PositiveFormula::Or(vec![a(i), pair_and])));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `∃y fᵏ(y) = y` for `k = 1..=max_k`, over the first unary function.
pub fn cycle_sentences(sig: &Signature, max_k: usize) -> Vec<PositiveFormula> {
    let Some((f, _)) = sig.functions().iter().find(|(_, arity)| *arity == 1) else { return Vec::new() };
    (1..=max_k)
        .map(|k| {
            let y = Term::var("y");
            PositiveFormula::exists(vec!["y".into()], PositiveFormula::Atom(Atom::Eq(Term::iterate(f, k, y.clone()), y)))
        })
        .collect()
}
