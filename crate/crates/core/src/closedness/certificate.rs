//! Certificates for the syntactic pac characterisation: for `A ⊭ ψ(ā)`, a
//! tuple `b̄`, a conjunction `θ1` true at `(ā,b̄)`, a disjunction `θ2` false
//! there, and `T ⊢ ∀x̄ȳ((ψ ∧ θ1) → θ2)`.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::CheckError;
use crate::structures::{all_tuples, eval_positive, Assignment, CompiledFormula, FinStructure, ModelSet};
use crate::syntax::{enumerate_atoms, Atom, HInductiveSentence, PositiveFormula, Theory};
use crate::theories::{entails_in, models_within, require_model, BoundedVerdict, Outcome, SearchBudget};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PacCertificate {
    pub psi: PositiveFormula,
    /// `x̄`: the free variables of ψ, sorted.
    pub x_vars: Vec<String>,
    pub a_tuple: Vec<usize>,
    /// `ȳ`, named apart from every variable of ψ.
    pub y_vars: Vec<String>,
    pub b_tuple: Vec<usize>,
    pub theta1: PositiveFormula,
    pub theta2: PositiveFormula,
    pub entailment: BoundedVerdict,
}

impl PacCertificate {
    /// `∀x̄ȳ ((ψ ∧ θ1) → θ2)`.
    pub fn sentence(&self) -> HInductiveSentence {
        let mut vars = self.x_vars.clone();
        vars.extend(self.y_vars.iter().cloned());
        HInductiveSentence {
            vars,
            antecedent: PositiveFormula::And(vec![self.psi.clone(), self.theta1.clone()]),
            consequent: self.theta2.clone(),
        }
    }

    pub fn atom_count(&self) -> usize {
        self.theta1.atom_count() + self.theta2.atom_count()
    }

    pub fn to_json(&self, a: &FinStructure) -> Value {
        let named = |vars: &[String], tuple: &[usize]| -> Vec<(String, String)> {
            vars.iter().zip(tuple).map(|(v, &e)| (v.clone(), a.element_name(e).to_string())).collect()
        };
        json!({
            "psi": self.psi.to_string(),
            "a": named(&self.x_vars, &self.a_tuple),
            "b": named(&self.y_vars, &self.b_tuple),
            "theta1": self.theta1.to_string(),
            "theta2": self.theta2.to_string(),
            "entailment": self.entailment.to_json(None),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateSearch {
    Found(Box<PacCertificate>),
    NotFoundWithinBudget { truncated: bool },
}

impl CertificateSearch {
    pub fn certificate(&self) -> Option<&PacCertificate> {
        match self {
            CertificateSearch::Found(c) => Some(c),
            CertificateSearch::NotFoundWithinBudget { .. } => None,
        }
    }
}

pub(crate) fn fresh_names(prefix: &str, count: usize, taken: &BTreeSet<String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < count {
        let name = format!("{prefix}{i}");
        if !taken.contains(&name) {
            out.push(name);
        }
        i += 1;
    }
    out
}

fn conj(atoms: Vec<Atom>) -> PositiveFormula {
    match atoms.len() {
        1 => PositiveFormula::Atom(atoms.into_iter().next().unwrap()),
        _ => PositiveFormula::And(atoms.into_iter().map(PositiveFormula::Atom).collect()),
    }
}

fn disj(atoms: Vec<Atom>) -> PositiveFormula {
    match atoms.len() {
        1 => PositiveFormula::Atom(atoms.into_iter().next().unwrap()),
        _ => PositiveFormula::Or(atoms.into_iter().map(PositiveFormula::Atom).collect()),
    }
}

/// Per parameter length: the atoms over `x̄ȳ`, their truth at every `(ā,b̄)`
/// and the distinct truth masks of tuples satisfying ψ in the models.
struct Layer {
    y_vars: Vec<String>,
    atoms: Vec<Atom>,
    /// bit i set iff atom i mentions y_j, per j
    mentions: Vec<u128>,
    at_a: Vec<(Vec<usize>, u128)>,
    psi_masks: Vec<u128>,
}

/// Receives a layer, a `b̄` tuple and the θ1 / θ2 atom masks; `false` stops.
type Visit<'v> = dyn FnMut(&Layer, &[usize], u128, u128) -> bool + 'v;

struct Engine<'a> {
    a: &'a FinStructure,
    psi: &'a PositiveFormula,
    x_vars: Vec<String>,
    a_tuple: Vec<usize>,
    layers: Vec<Layer>,
}

impl<'a> Engine<'a> {
    fn new(
        a: &'a FinStructure,
        psi: &'a PositiveFormula,
        a_tuple: &[usize],
        models: &ModelSet,
        budget: &SearchBudget,
    ) -> Result<Self, CheckError> {
        let sig = a.signature();
        let x_vars: Vec<String> = psi.free_vars().into_iter().collect();
        let psi_c = CompiledFormula::compile(sig, psi, &x_vars)?;
        // tuples of the models at which ψ holds
        let mut psi_tuples: Vec<(&FinStructure, Vec<usize>)> = Vec::new();
        for m in models.models.iter().filter(|m| m.size() <= budget.max_model_size) {
            for t in all_tuples(m.size(), x_vars.len()) {
                if psi_c.eval(m, &t) {
                    psi_tuples.push((m, t));
                }
            }
        }
        let mut taken = psi.all_vars();
        taken.extend(x_vars.iter().cloned());
        let names = fresh_names("y", budget.max_params, &taken);
        let mut layers = Vec::new();
        for len in 0..=budget.max_params {
            let y_vars = names[..len].to_vec();
            let mut vars = x_vars.clone();
            vars.extend(y_vars.iter().cloned());
            let atoms: Vec<Atom> = enumerate_atoms(sig, &vars, budget.max_term_depth)
                .into_iter()
                .filter(|at| !matches!(at, Atom::Eq(l, r) if l == r))
                .collect();
            if atoms.len() > 128 {
                return Err(CheckError::Precondition(format!(
                    "{} candidate atoms over {} variables; lower the term depth or parameter count",
                    atoms.len(),
                    vars.len()
                )));
            }
            let compiled: Vec<CompiledFormula> = atoms
                .iter()
                .map(|at| CompiledFormula::compile(sig, &PositiveFormula::Atom(at.clone()), &vars))
                .collect::<Result<_, _>>()?;
            let mask_of = |s: &FinStructure, args: &[usize]| -> u128 {
                compiled.iter().enumerate().fold(0u128, |m, (i, c)| if c.eval(s, args) { m | (1 << i) } else { m })
            };
            let mentions = y_vars
                .iter()
                .map(|y| {
                    atoms.iter().enumerate().fold(0u128, |m, (i, at)| {
                        if PositiveFormula::Atom(at.clone()).free_vars().contains(y) {
                            m | (1 << i)
                        } else {
                            m
                        }
                    })
                })
                .collect();
            let mut at_a = Vec::new();
            for b in all_tuples(a.size(), len) {
                let mut args = a_tuple.to_vec();
                args.extend(b.iter().copied());
                at_a.push((b, mask_of(a, &args)));
            }
            let mut seen = BTreeSet::new();
            for (m, t) in &psi_tuples {
                for ys in all_tuples(m.size(), len) {
                    let mut args = t.clone();
                    args.extend(ys);
                    seen.insert(mask_of(m, &args));
                }
            }
            layers.push(Layer { y_vars, atoms, mentions, at_a, psi_masks: seen.into_iter().collect() });
        }
        Ok(Engine { a, psi, x_vars, a_tuple: a_tuple.to_vec(), layers })
    }

    /// Visits candidate certificates passing the model-mask filter, fewer
    /// atoms first, then shorter `b̄`, then `b̄` and atom subsets in order.
    fn run(&self, max_atoms: usize, visit: &mut Visit<'_>) {
        for k in 0..=max_atoms {
            for layer in &self.layers {
                if layer.y_vars.len() > k {
                    // every parameter must occur in θ1 or θ2
                    continue;
                }
                let all = if layer.atoms.len() == 128 { u128::MAX } else { (1u128 << layer.atoms.len()) - 1 };
                for (b, pos) in &layer.at_a {
                    let neg = all & !pos;
                    let mut chosen = Vec::with_capacity(k);
                    if !subsets(layer.atoms.len(), k, 0, &mut chosen, &mut |idx| {
                        let set = idx.iter().fold(0u128, |m, &i| m | (1 << i));
                        if layer.mentions.iter().any(|&ym| ym & set == 0) {
                            return true;
                        }
                        let s1 = set & pos;
                        let s2 = set & neg;
                        let ok = layer.psi_masks.iter().all(|&m| m & s1 != s1 || m & s2 != 0);
                        !ok || visit(layer, b, s1, s2)
                    }) {
                        return;
                    }
                }
            }
        }
    }

    fn certificate(
        &self,
        layer: &Layer,
        b: &[usize],
        s1: u128,
        s2: u128,
        models: &ModelSet,
        budget: &SearchBudget,
    ) -> Result<PacCertificate, CheckError> {
        let pick =
            |s: u128| -> Vec<Atom> { layer.atoms.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).map(|(_, a)| a.clone()).collect() };
        let mut c = PacCertificate {
            psi: self.psi.clone(),
            x_vars: self.x_vars.clone(),
            a_tuple: self.a_tuple.clone(),
            y_vars: layer.y_vars.clone(),
            b_tuple: b.to_vec(),
            theta1: conj(pick(s1)),
            theta2: disj(pick(s2)),
            entailment: BoundedVerdict::holds(*budget),
        };
        c.entailment = entails_in(models, &c.sentence(), budget)?;
        debug_assert!(self.a.size() > 0);
        Ok(c)
    }
}

/// k-subsets of `0..n` in lexicographic order; stops when `f` returns false.
fn subsets(n: usize, k: usize, start: usize, chosen: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if chosen.len() == k {
        return f(chosen);
    }
    for i in start..n {
        if n - i < k - chosen.len() {
            break;
        }
        chosen.push(i);
        let go_on = subsets(n, k, i + 1, chosen, f);
        chosen.pop();
        if !go_on {
            return false;
        }
    }
    true
}

fn check_request(a: &FinStructure, theory: &Theory, psi: &PositiveFormula, a_tuple: &[usize]) -> Result<(), CheckError> {
    require_model(a, theory)?;
    psi.check_sorts(a.signature())?;
    let x_vars: Vec<String> = psi.free_vars().into_iter().collect();
    if x_vars.len() != a_tuple.len() {
        return Err(CheckError::Precondition(format!(
            "ψ has free variables ({}) but {} element(s) were given",
            x_vars.join(", "),
            a_tuple.len()
        )));
    }
    if let Some(&e) = a_tuple.iter().find(|&&e| e >= a.size()) {
        return Err(CheckError::Precondition(format!("element index {e} outside {}", a.name)));
    }
    if eval_positive(a, psi, &Assignment::zip(&x_vars, a_tuple))? {
        return Err(CheckError::Precondition(format!("ψ already holds at the given tuple in {}", a.name)));
    }
    Ok(())
}

/// All certificates for `A ⊭ ψ(ā)` within the budget, in search order,
/// checked against the given model set.
pub fn find_certificates(
    a: &FinStructure,
    theory: &Theory,
    psi: &PositiveFormula,
    a_tuple: &[usize],
    models: &ModelSet,
    budget: &SearchBudget,
    limit: Option<usize>,
) -> Result<Vec<PacCertificate>, CheckError> {
    check_request(a, theory, psi, a_tuple)?;
    budget.check()?;
    if models.truncated {
        return Ok(Vec::new());
    }
    let engine = Engine::new(a, psi, a_tuple, models, budget)?;
    let mut out = Vec::new();
    let mut err = None;
    engine.run(budget.max_formula_atoms, &mut |layer, b, s1, s2| {
        match engine.certificate(layer, b, s1, s2, models, budget) {
            Ok(c) if c.entailment.outcome == Outcome::Holds => out.push(c),
            Ok(_) => {}
            Err(e) => {
                err = Some(e);
                return false;
            }
        }
        limit.is_none_or(|l| out.len() < l)
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// The first certificate in search order: fewer atoms, then shorter `b̄`.
pub fn find_certificate(
    a: &FinStructure,
    theory: &Theory,
    psi: &PositiveFormula,
    a_tuple: &[usize],
    budget: &SearchBudget,
) -> Result<CertificateSearch, CheckError> {
    check_request(a, theory, psi, a_tuple)?;
    let models = models_within(theory, budget)?;
    let found = find_certificates(a, theory, psi, a_tuple, &models, budget, Some(1))?;
    Ok(match found.into_iter().next() {
        Some(c) => CertificateSearch::Found(Box::new(c)),
        None => CertificateSearch::NotFoundWithinBudget { truncated: models.truncated },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateCheck {
    pub accepted: bool,
    pub reasons: Vec<String>,
    pub entailment: Option<BoundedVerdict>,
}

/// Re-evaluates the three satisfaction facts and re-runs bounded entailment.
pub fn verify_certificate(c: &PacCertificate, a: &FinStructure, theory: &Theory, budget: &SearchBudget) -> CertificateCheck {
    match models_within(theory, budget) {
        Ok(models) => verify_certificate_in(c, a, &models, budget),
        Err(e) => CertificateCheck { accepted: false, reasons: vec![format!("entailment: {e}")], entailment: None },
    }
}

/// [`verify_certificate`] with entailment checked over an enumerated model set.
pub fn verify_certificate_in(c: &PacCertificate, a: &FinStructure, models: &ModelSet, budget: &SearchBudget) -> CertificateCheck {
    let mut reasons = Vec::new();
    if c.x_vars.len() != c.a_tuple.len() || c.y_vars.len() != c.b_tuple.len() {
        reasons.push("tuple lengths do not match the variable lists".to_string());
    }
    if c.a_tuple.iter().chain(&c.b_tuple).any(|&e| e >= a.size()) {
        reasons.push("tuple element outside the structure".to_string());
    }
    if !c.theta1.quantifier_free() || !c.theta2.quantifier_free() {
        reasons.push("θ1 and θ2 must be quantifier-free".to_string());
    }
    if !reasons.is_empty() {
        return CertificateCheck { accepted: false, reasons, entailment: None };
    }
    let xs = Assignment::zip(&c.x_vars, &c.a_tuple);
    let mut all_vars = c.x_vars.clone();
    all_vars.extend(c.y_vars.iter().cloned());
    let mut all_vals = c.a_tuple.clone();
    all_vals.extend(c.b_tuple.iter().copied());
    let xys = Assignment::zip(&all_vars, &all_vals);
    match eval_positive(a, &c.psi, &xs) {
        Ok(false) => {}
        Ok(true) => reasons.push("ψ holds at ā".to_string()),
        Err(e) => reasons.push(format!("ψ: {e}")),
    }
    match eval_positive(a, &c.theta1, &xys) {
        Ok(true) => {}
        Ok(false) => reasons.push("θ1 is false at (ā, b̄)".to_string()),
        Err(e) => reasons.push(format!("θ1: {e}")),
    }
    match eval_positive(a, &c.theta2, &xys) {
        Ok(false) => {}
        Ok(true) => reasons.push("θ2 is true at (ā, b̄)".to_string()),
        Err(e) => reasons.push(format!("θ2: {e}")),
    }
    let entailment = match entails_in(models, &c.sentence(), budget) {
        Ok(v) => {
            if v.outcome != Outcome::Holds {
                reasons.push(format!("entailment: {}", v.summary()));
            }
            Some(v)
        }
        Err(e) => {
            reasons.push(format!("entailment: {e}"));
            None
        }
    };
    CertificateCheck { accepted: reasons.is_empty(), reasons, entailment }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::fixtures::{cycles, unary_signature};
    use crate::syntax::{parse_formula, parse_sentence};

    fn t_inj() -> Theory {
        let sig = unary_signature();
        Theory::new("Tinj", sig.clone()).with_axiom("inj", parse_sentence("forall x y. f(x) = f(y) -> x = y", &sig).unwrap()).unwrap()
    }

    #[test]
    fn first_certificate_for_fixed_point_formula() {
        let t = t_inj();
        let a = cycles("A", t.signature.clone(), &[1, 2]);
        let psi = parse_formula("f(x) = x", &t.signature).unwrap();
        let c = find_certificate(&a, &t, &psi, &[1], &SearchBudget::default().with_size(4)).unwrap();
        let c = c.certificate().expect("certificate").clone();
        // fewest atoms: θ2 is ψ's own atom
        assert_eq!(c.atom_count(), 1);
        assert_eq!(c.theta2.to_string(), "x = f(x)");
        assert!(verify_certificate(&c, &a, &t, &SearchBudget::default().with_size(4)).accepted);
    }

    #[test]
    fn two_param_certificate_verifies_and_tampering_is_caught() {
        let t = t_inj();
        let sig = t.signature.clone();
        let a = cycles("A", sig.clone(), &[1, 2]);
        let budget = SearchBudget::default().with_size(4);
        let mut c = PacCertificate {
            psi: parse_formula("f(x) = x", &sig).unwrap(),
            x_vars: vec!["x".into()],
            a_tuple: vec![1],
            y_vars: vec!["y".into()],
            b_tuple: vec![2],
            theta1: parse_formula("f(x) = y and f(y) = x", &sig).unwrap(),
            theta2: parse_formula("x = y", &sig).unwrap(),
            entailment: BoundedVerdict::holds(budget),
        };
        assert!(verify_certificate(&c, &a, &t, &budget).accepted);
        // θ2 = ψ's own atom is still a (degenerate) certificate
        c.theta2 = parse_formula("f(x) = x", &sig).unwrap();
        assert!(verify_certificate(&c, &a, &t, &budget).accepted);
        // θ2 true at (ā, b̄)
        c.theta2 = parse_formula("f(x) = y", &sig).unwrap();
        let check = verify_certificate(&c, &a, &t, &budget);
        assert!(!check.accepted);
        assert_eq!(check.reasons, vec!["θ2 is true at (ā, b̄)".to_string()]);
        // entailment broken: θ1 weakened so a 2-cycle refutes it
        c.theta1 = parse_formula("f(y) = x", &sig).unwrap();
        c.theta2 = parse_formula("x = f(y)", &sig).unwrap();
        c.psi = parse_formula("x = x", &sig).unwrap();
        let check = verify_certificate(&c, &a, &t, &budget);
        assert!(!check.accepted);
    }

    #[test]
    fn no_certificate_for_two_cycle() {
        let t = t_inj();
        let c2 = cycles("C2", t.signature.clone(), &[2]);
        let psi = parse_formula("exists y. f(y) = y", &t.signature).unwrap();
        for n in 3..=5 {
            let r = find_certificate(&c2, &t, &psi, &[], &SearchBudget::default().with_size(n)).unwrap();
            assert_eq!(r, CertificateSearch::NotFoundWithinBudget { truncated: false }, "N={n}");
        }
    }

    #[test]
    fn psi_true_is_a_precondition_error() {
        let t = t_inj();
        let a = cycles("A", t.signature.clone(), &[1, 2]);
        let psi = parse_formula("f(x) = x", &t.signature).unwrap();
        assert!(matches!(find_certificate(&a, &t, &psi, &[0], &SearchBudget::default()), Err(CheckError::Precondition(_))));
    }

    #[test]
    fn subsets_are_lexicographic() {
        let mut seen = Vec::new();
        subsets(4, 2, 0, &mut Vec::new(), &mut |s| {
            seen.push(s.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }
}
