//! Greedy bounded approximation of "every model embeds in a pac model".

use serde_json::{json, Value};

use crate::error::CheckError;
use crate::morphisms::{compose, Separation};
use crate::structures::{FinStructure, StructureJson};
use crate::syntax::Theory;
use crate::theories::{models_within, require_model, Outcome, SearchBudget, Witness};

use super::{is_pac_in, CheckReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationStep {
    pub from: FinStructure,
    pub to: FinStructure,
    /// The embedding `from → to`.
    pub map: Vec<usize>,
    /// Positive formula with parameters in `from` that becomes true in `to`.
    pub gained: Option<Separation>,
}

#[derive(Clone, Debug)]
pub struct Saturation {
    pub start: FinStructure,
    pub result: FinStructure,
    pub steps: Vec<SaturationStep>,
    /// The bounded pac check on the final structure. `Holds` is bounded: the
    /// result need not be pac.
    pub report: CheckReport,
}

impl Saturation {
    /// The composed embedding from the start into the result.
    pub fn embedding(&self) -> Vec<usize> {
        self.steps.iter().fold((0..self.start.size()).collect(), |acc, s| compose(&acc, &s.map))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "start": self.start.name,
            "result": StructureJson::from(&self.result),
            "steps": self.steps.iter().map(|s| json!({
                "from": s.from.name,
                "to": s.to.name,
                "map": s.map.iter().enumerate()
                    .map(|(a, &b)| (s.from.element_name(a).to_string(), s.to.element_name(b).to_string()))
                    .collect::<Vec<_>>(),
                "gained": s.gained.as_ref().map(|g| g.describe(&s.from)),
            })).collect::<Vec<_>>(),
            "embedding": self.embedding(),
            "final": self.report.to_json(),
        })
    }
}

/// Repeatedly replaces the current structure by the target of the first
/// non-immersive embedding into a model of size at most N, until the bounded
/// pac check holds (or is inconclusive). A result of size N has no room for
/// a proper extension, so its pac check passes vacuously; that stop is
/// reported as `Unknown` with the truncation flag.
pub fn pac_saturate(a: &FinStructure, theory: &Theory, budget: &SearchBudget) -> Result<Saturation, CheckError> {
    require_model(a, theory)?;
    let models = models_within(theory, budget)?;
    let mut current = a.clone();
    let mut steps = Vec::new();
    loop {
        let mut report = is_pac_in(&current, theory, &models, budget)?;
        if report.outcome() != Outcome::Fails {
            if current.size() >= budget.max_model_size {
                report.verdict = report.verdict.settle(true);
            }
            return Ok(Saturation { start: a.clone(), result: current, steps, report });
        }
        let Some(Witness::NonImmersion { target, map, separation, .. }) = report.verdict.witness else {
            unreachable!("pac failures carry a non-immersion witness");
        };
        steps.push(SaturationStep { from: current, to: target.clone(), map, gained: separation });
        current = target;
    }
}
