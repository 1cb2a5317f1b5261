//! Alc_T(ψ): pairs `(θ1, θ2)` harvested from certificates on bounded-pac
//! models, their disjunctive combination, and the T_h axioms built from
//! chosen pairs.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::CheckError;
use crate::structures::{all_tuples, CompiledFormula, FinStructure, ModelSet};
use crate::syntax::{CompanionAxiom, HInductiveSentence, PositiveFormula, Theory};
use crate::theories::{entails_in, models_within, BoundedVerdict, Outcome, SearchBudget};

use super::certificate::fresh_names;
use super::{find_certificates, is_pac_in, verify_certificate, verify_certificate_in, CertificateCheck, PacCertificate};

/// A member of Alc_T(ψ) with the source that witnesses (⋆).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlcPair {
    pub psi: PositiveFormula,
    pub x_vars: Vec<String>,
    pub y_vars: Vec<String>,
    pub theta1: PositiveFormula,
    pub theta2: PositiveFormula,
    pub source: FinStructure,
    pub a_tuple: Vec<usize>,
    pub b_tuple: Vec<usize>,
    pub entailment: BoundedVerdict,
}

impl AlcPair {
    fn from_certificate(c: PacCertificate, source: &FinStructure) -> Self {
        AlcPair {
            psi: c.psi,
            x_vars: c.x_vars,
            y_vars: c.y_vars,
            theta1: c.theta1,
            theta2: c.theta2,
            source: source.clone(),
            a_tuple: c.a_tuple,
            b_tuple: c.b_tuple,
            entailment: c.entailment,
        }
    }

    pub fn as_certificate(&self) -> PacCertificate {
        PacCertificate {
            psi: self.psi.clone(),
            x_vars: self.x_vars.clone(),
            a_tuple: self.a_tuple.clone(),
            y_vars: self.y_vars.clone(),
            b_tuple: self.b_tuple.clone(),
            theta1: self.theta1.clone(),
            theta2: self.theta2.clone(),
            entailment: self.entailment.clone(),
        }
    }

    /// Re-checks (⋆) on the recorded source.
    pub fn verify(&self, theory: &Theory, budget: &SearchBudget) -> CertificateCheck {
        verify_certificate(&self.as_certificate(), &self.source, theory, budget)
    }

    fn key(&self) -> (String, String) {
        (self.theta1.to_string(), self.theta2.to_string())
    }

    pub fn to_json(&self) -> Value {
        let named = |vars: &[String], tuple: &[usize]| -> Vec<(String, String)> {
            vars.iter().zip(tuple).map(|(v, &e)| (v.clone(), self.source.element_name(e).to_string())).collect()
        };
        json!({
            "theta1": self.theta1.to_string(),
            "theta2": self.theta2.to_string(),
            "source": self.source.name,
            "a": named(&self.x_vars, &self.a_tuple),
            "b": named(&self.y_vars, &self.b_tuple),
        })
    }
}

#[derive(Clone, Debug)]
pub struct AlcProbe {
    pub psi: PositiveFormula,
    pub pairs: Vec<AlcPair>,
    /// Names of the models that passed the bounded pac check.
    pub pac_models: Vec<FinStructure>,
    /// Number of `(A, ā)` with `A` bounded-pac and `A ⊭ ψ(ā)`.
    pub failures: usize,
    pub truncated: bool,
    /// The model set the probe ran over; entailments are checked against it.
    pub models: ModelSet,
}

impl AlcProbe {
    pub fn to_json(&self) -> Value {
        json!({
            "psi": self.psi.to_string(),
            "pac_models": self.pac_models.iter().map(|m| m.name.clone()).collect::<Vec<_>>(),
            "failures": self.failures,
            "truncated": self.truncated,
            "pairs": self.pairs.iter().map(AlcPair::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Harvests every certificate within the budget from every bounded-pac
/// model of `theory` and tuple refuting ψ; pairs are deduplicated
/// syntactically, keeping the first source.
///
/// A model of size exactly N has no proper extension inside the budget and
/// passes the bounded pac check vacuously; [`alc_probe_sources`] restricts
/// the sources.
pub fn alc_probe(theory: &Theory, psi: &PositiveFormula, budget: &SearchBudget) -> Result<AlcProbe, CheckError> {
    alc_probe_sources(theory, psi, budget.max_model_size, budget)
}

/// [`alc_probe`] with source models limited to `max_source_size` elements.
pub fn alc_probe_sources(
    theory: &Theory,
    psi: &PositiveFormula,
    max_source_size: usize,
    budget: &SearchBudget,
) -> Result<AlcProbe, CheckError> {
    psi.check_sorts(&theory.signature)?;
    let models = models_within(theory, budget)?;
    let x_vars: Vec<String> = psi.free_vars().into_iter().collect();
    let compiled = CompiledFormula::compile(&theory.signature, psi, &x_vars)?;
    let mut pairs: Vec<AlcPair> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut pac_models = Vec::new();
    let mut failures = 0;
    let mut truncated = models.truncated;
    for a in models.models.iter().filter(|a| a.size() <= max_source_size) {
        let report = is_pac_in(a, theory, &models, budget)?;
        truncated |= report.verdict.flags.contains(&crate::theories::Flag::Truncated);
        if report.outcome() != Outcome::Holds {
            continue;
        }
        pac_models.push(a.clone());
        for at in all_tuples(a.size(), x_vars.len()) {
            if compiled.eval(a, &at) {
                continue;
            }
            failures += 1;
            for c in find_certificates(a, theory, psi, &at, &models, budget, None)? {
                let pair = AlcPair::from_certificate(c, a);
                if seen.insert(pair.key()) {
                    pairs.push(pair);
                }
            }
        }
    }
    Ok(AlcProbe { psi: psi.clone(), pairs, pac_models, failures, truncated, models })
}

/// A combined pair with the source found for it and the result of
/// re-checking (⋆) there.
#[derive(Clone, Debug)]
pub struct CombinedPair {
    pub pair: AlcPair,
    pub check: CertificateCheck,
}

/// `(α1 ∨ β1, α2 ∨ β2)` with the parameters of β renamed apart. The source
/// is searched on α's structure (extending α's `b̄`), then on β's
/// (extending β's), then over every bounded-pac model of the probe; (⋆) is
/// re-verified on the first one found. With no source at all the pair is
/// reported against α's structure and the check rejects it.
pub fn alc_disjunction_combine(
    probe: &AlcProbe,
    alpha: &AlcPair,
    beta: &AlcPair,
    budget: &SearchBudget,
) -> Result<CombinedPair, CheckError> {
    if alpha.psi != probe.psi || beta.psi != probe.psi || alpha.x_vars != beta.x_vars {
        return Err(CheckError::Precondition("pairs belong to different formulas".into()));
    }
    let mut taken = alpha.psi.all_vars();
    taken.extend(alpha.x_vars.iter().cloned());
    taken.extend(alpha.y_vars.iter().cloned());
    let renamed = fresh_names("w", beta.y_vars.len(), &taken);
    let rename = |v: &str| beta.y_vars.iter().position(|y| y == v).map(|i| renamed[i].clone());
    let theta1 = PositiveFormula::Or(vec![alpha.theta1.clone(), beta.theta1.rename_free(&rename)]);
    let theta2 = PositiveFormula::Or(vec![alpha.theta2.clone(), beta.theta2.rename_free(&rename)]);
    let mut y_vars = alpha.y_vars.clone();
    y_vars.extend(renamed.iter().cloned());
    let mut vars = alpha.x_vars.clone();
    vars.extend(y_vars.iter().cloned());

    let (na, nb) = (alpha.y_vars.len(), renamed.len());
    let sig = alpha.source.signature();
    let (c1, c2) = (CompiledFormula::compile(sig, &theta1, &vars)?, CompiledFormula::compile(sig, &theta2, &vars)?);
    // fills the free parameter slots of `fixed` (None = free) with every tuple
    let complete = |s: &FinStructure, fixed: &[Option<usize>]| -> Option<Vec<usize>> {
        let free = fixed.iter().filter(|v| v.is_none()).count();
        all_tuples(s.size(), free).find_map(|t| {
            let mut it = t.into_iter();
            let vals: Vec<usize> = fixed.iter().map(|v| v.unwrap_or_else(|| it.next().expect("sized"))).collect();
            (c1.eval(s, &vals) && !c2.eval(s, &vals)).then_some(vals)
        })
    };
    let seeded = |p: &AlcPair, alpha_side: bool| -> Vec<Option<usize>> {
        let mut fixed: Vec<Option<usize>> = p.a_tuple.iter().map(|&e| Some(e)).collect();
        let own = p.b_tuple.iter().map(|&e| Some(e));
        if alpha_side {
            fixed.extend(own);
            fixed.extend(std::iter::repeat_n(None, nb));
        } else {
            fixed.extend(std::iter::repeat_n(None, na));
            fixed.extend(own);
        }
        fixed
    };
    let nx = alpha.x_vars.len();
    let mut source = None;
    for (p, side) in [(alpha, true), (beta, false)] {
        if let Some(vals) = complete(&p.source, &seeded(p, side)) {
            source = Some((p.source.clone(), vals));
            break;
        }
    }
    if source.is_none() {
        let psi = CompiledFormula::compile(sig, &alpha.psi, &alpha.x_vars)?;
        'models: for m in &probe.pac_models {
            for at in all_tuples(m.size(), nx) {
                if psi.eval(m, &at) {
                    continue;
                }
                let mut fixed: Vec<Option<usize>> = at.into_iter().map(Some).collect();
                fixed.extend(std::iter::repeat_n(None, na + nb));
                if let Some(vals) = complete(m, &fixed) {
                    source = Some((m.clone(), vals));
                    break 'models;
                }
            }
        }
    }
    let (src, vals) = source.unwrap_or_else(|| {
        let mut vals = alpha.a_tuple.clone();
        vals.extend(alpha.b_tuple.iter().copied());
        vals.extend(std::iter::repeat_n(0, nb));
        (alpha.source.clone(), vals)
    });
    let sentence = HInductiveSentence {
        vars: vars.clone(),
        antecedent: PositiveFormula::And(vec![alpha.psi.clone(), theta1.clone()]),
        consequent: theta2.clone(),
    };
    let entailment = entails_in(&probe.models, &sentence, budget)?;
    let pair = AlcPair {
        psi: alpha.psi.clone(),
        x_vars: alpha.x_vars.clone(),
        y_vars,
        theta1,
        theta2,
        source: src,
        a_tuple: vals[..nx].to_vec(),
        b_tuple: vals[nx..].to_vec(),
        entailment,
    };
    let check = verify_certificate_in(&pair.as_certificate(), &pair.source, &probe.models, budget);
    Ok(CombinedPair { pair, check })
}

/// A pair `(φ1, φ2)` with `Alc_T(ψ) ≡ {(φ1, φ2)}` over the bounded-pac
/// models: every `A`, `ā` with `A ⊭ ψ(ā)` has `b̄` with `φ1` true and `φ2`
/// false. First such pair in probe order.
pub fn alc_equivalent_pair(probe: &AlcProbe) -> Option<&AlcPair> {
    probe.pairs.iter().find(|p| {
        let c1 = CompiledFormula::compile(p.source.signature(), &p.psi, &p.x_vars).expect("checked");
        let vars: Vec<String> = p.x_vars.iter().chain(&p.y_vars).cloned().collect();
        let t1 = CompiledFormula::compile(p.source.signature(), &p.theta1, &vars).expect("checked");
        let t2 = CompiledFormula::compile(p.source.signature(), &p.theta2, &vars).expect("checked");
        probe.pac_models.iter().all(|a| {
            all_tuples(a.size(), p.x_vars.len()).all(|at| {
                c1.eval(a, &at)
                    || all_tuples(a.size(), p.y_vars.len()).any(|bt| {
                        let mut args = at.clone();
                        args.extend(bt);
                        t1.eval(a, &args) && !t2.eval(a, &args)
                    })
            })
        })
    })
}

/// One ψ's contribution to T_h.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum ThBinding {
    /// An equivalent pair: emits `∀x̄ȳ((ψ∧φ1)→φ2)` and
    /// `∀x̄(ψ ∨ ∃ȳ(φ1 ∧ ¬φ2))`.
    Pair(AlcPair),
    /// No bounded-pac model refutes ψ, so Alc_T(ψ) is empty and the pac
    /// models satisfy `∀x̄ ψ`; the verdict records the bound.
    Vacuous { psi: PositiveFormula, verdict: BoundedVerdict },
}

impl ThBinding {
    /// Vacuous when nothing in the probe refutes ψ, else the first
    /// equivalent pair; `None` if no pair is equivalent within the budget.
    pub fn from_probe(probe: &AlcProbe, budget: &SearchBudget) -> Option<ThBinding> {
        if probe.failures == 0 {
            let verdict = BoundedVerdict::holds(*budget).settle(probe.truncated);
            return Some(ThBinding::Vacuous { psi: probe.psi.clone(), verdict });
        }
        alc_equivalent_pair(probe).cloned().map(ThBinding::Pair)
    }

    pub fn psi(&self) -> &PositiveFormula {
        match self {
            ThBinding::Pair(p) => &p.psi,
            ThBinding::Vacuous { psi, .. } => psi,
        }
    }
}

/// `T` plus, per binding, the two axiom schemata; the second is stored as a
/// companion axiom since it is inductive but not h-inductive.
pub fn build_th_axioms(theory: &Theory, bindings: &[ThBinding]) -> Result<Theory, CheckError> {
    if bindings.is_empty() {
        return Ok(theory.clone());
    }
    let mut th = theory.clone();
    th.name = format!("{}_h", theory.name);
    for (i, b) in bindings.iter().enumerate() {
        match b {
            ThBinding::Pair(p) => {
                if p.entailment.outcome != Outcome::Holds {
                    return Err(CheckError::Precondition(format!("binding {i} for {} is unverified: {}", p.psi, p.entailment.summary())));
                }
                let vars: Vec<String> = p.x_vars.iter().chain(&p.y_vars).cloned().collect();
                let imp = HInductiveSentence::new(vars, PositiveFormula::And(vec![p.psi.clone(), p.theta1.clone()]), p.theta2.clone())?;
                th = th.with_axiom(&format!("th{i}_imp"), imp)?;
                let alg = CompanionAxiom {
                    vars: p.x_vars.clone(),
                    psi: p.psi.clone(),
                    witness_vars: p.y_vars.clone(),
                    theta1: p.theta1.clone(),
                    theta2: p.theta2.clone(),
                };
                th = th.with_companion_axiom(&format!("th{i}_alg"), alg)?;
            }
            ThBinding::Vacuous { psi, verdict } => {
                if verdict.outcome != Outcome::Holds {
                    return Err(CheckError::Precondition(format!("binding {i} for {psi} is unverified: {}", verdict.summary())));
                }
                let vars: Vec<String> = psi.free_vars().into_iter().collect();
                let s = HInductiveSentence::new(vars, PositiveFormula::truth(), psi.clone())?;
                th = th.with_axiom(&format!("th{i}_all"), s)?;
            }
        }
    }
    Ok(th)
}
