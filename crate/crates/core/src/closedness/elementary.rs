//! Bounded e-elementary extensions: `B` is a pac model of T_A.
//!
//! T_A is never materialised. For finite structures, `D ⊨ T_A` (with the
//! constants of A interpreted by `i: A → D`) holds iff `i` is an immersion,
//! so models of T_A up to size N are pairs `(D, i)` with `i` an immersion.

use std::ops::ControlFlow;

use crate::error::CheckError;
use crate::morphisms::{compose, find_retraction, for_each_morphism, is_embedding, separating_formula, Kind};
use crate::structures::{enumerate_structures, FinStructure};
use crate::theories::{BoundedVerdict, SearchBudget, Witness};

use super::{CheckReport, Mode};

/// Stage 1: `m: A → B` is an immersion. Stage 2: every embedding
/// `e: B → D` (`|D| ≤ N`) with `e ∘ m` an immersion is itself an immersion.
pub fn is_e_elementary_bounded(a: &FinStructure, b: &FinStructure, m: &[usize], budget: &SearchBudget) -> Result<CheckReport, CheckError> {
    budget.check()?;
    if !is_embedding(a, b, m)? {
        return Err(CheckError::Precondition(format!("the map {} -> {} is not an embedding", a.name, b.name)));
    }
    let theory = format!("T_{}", a.name);
    let report = |verdict, witness_domain| CheckReport {
        subject: b.clone(),
        theory: theory.clone(),
        mode: Mode::EElementary,
        verdict,
        witness_domain,
    };
    if find_retraction(a, b, m)?.is_none() {
        let separation = separating_formula(a, b, m)?;
        let w = Witness::NonImmersion { target: b.clone(), map: m.to_vec(), kind: Kind::Embedding, separation };
        return Ok(report(BoundedVerdict::fails(*budget, w), Some(a.clone())));
    }
    let ds = enumerate_structures(b.signature(), budget.max_model_size, budget.limits())?;
    let mut truncated = ds.truncated;
    for d in ds.models.iter().filter(|d| d.size() >= b.size()) {
        let mut found = None;
        truncated |= for_each_morphism(b, d, Kind::Embedding, &[], budget.max_nodes, &mut |e| {
            let i = compose(m, e);
            if find_retraction(a, d, &i).expect("validated").is_some() && find_retraction(b, d, e).expect("validated").is_none() {
                found = Some(e.to_vec());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        if let Some(e) = found {
            let separation = separating_formula(b, d, &e)?;
            let w = Witness::NonImmersion { target: d.clone(), map: e, kind: Kind::Embedding, separation };
            return Ok(report(BoundedVerdict::fails(*budget, w), None));
        }
    }
    Ok(report(BoundedVerdict::holds(*budget).settle(truncated), None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::fixtures::{cycles, unary_signature};
    use crate::theories::Outcome;

    #[test]
    fn reflexive() {
        let c2 = cycles("C2", unary_signature(), &[2]);
        let r = is_e_elementary_bounded(&c2, &c2, &[0, 1], &SearchBudget::default()).unwrap();
        assert_eq!(r.outcome(), Outcome::Holds);
    }

    #[test]
    fn gaining_a_fixed_point_fails_stage_one() {
        let sig = unary_signature();
        let c2 = cycles("C2", sig.clone(), &[2]);
        let b = cycles("B", sig, &[2, 1]);
        let r = is_e_elementary_bounded(&c2, &b, &[0, 1], &SearchBudget::default()).unwrap();
        assert_eq!(r.outcome(), Outcome::Fails);
        assert_eq!(r.domain().name, "C2");
        assert!(r.witness_verifies());
    }

    #[test]
    fn doubled_two_cycle_holds() {
        let sig = unary_signature();
        let c2 = cycles("C2", sig.clone(), &[2]);
        let b = cycles("B", sig, &[2, 2]);
        let r = is_e_elementary_bounded(&c2, &b, &[0, 1], &SearchBudget::default()).unwrap();
        assert_eq!(r.outcome(), Outcome::Holds);
    }

    #[test]
    fn non_embedding_is_an_error() {
        let sig = unary_signature();
        let c2 = cycles("C2", sig.clone(), &[2]);
        let ae = cycles("Ae", sig, &[1]);
        assert!(matches!(is_e_elementary_bounded(&c2, &ae, &[0, 0], &SearchBudget::default()), Err(CheckError::Precondition(_))));
    }
}
