use std::collections::BTreeMap;
use std::sync::Arc;

use super::{apply_rule, compose_fractions, is_active, Fraction, InferenceStep};
use crate::engine::{
    find_homomorphisms, find_homomorphisms_with, isomorphism_with, saturate, SaturationConfig,
    SaturationStatus, SearchOptions, SpecMorphism, Specification,
};
use crate::error::{Error, Result};
use crate::logic::DiagrammaticLogic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchDirective {
    /// The first match, in search order, that the rule would change.
    First,
    /// Hypothesis element -> target element, per point.
    Bindings(BTreeMap<String, BTreeMap<String, String>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub rule: String,
    pub directive: MatchDirective,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProofScript {
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Clone)]
pub struct ProofOutcome {
    pub spec: Arc<Specification>,
    pub trace: Vec<InferenceStep>,
    /// `final -> start`: numerator the identity, denominator the accumulated
    /// entailment `start -> final`.
    pub fraction: Fraction,
}

pub fn run_proof(
    logic: &DiagrammaticLogic,
    script: &ProofScript,
    start: Arc<Specification>,
) -> Result<ProofOutcome> {
    let mut current = start.clone();
    let mut trace = Vec::new();
    let mut fraction = Fraction::identity(start);
    for (i, step) in script.steps.iter().enumerate() {
        let rule = logic.rule(&step.rule).ok_or_else(|| Error::Unknown {
            kind: "rule",
            name: step.rule.clone(),
        })?;
        let no_match = || Error::NoMatch {
            step: i + 1,
            rule: rule.name.clone(),
        };
        let m = match &step.directive {
            MatchDirective::First => find_homomorphisms(&rule.hypothesis, &current, None)
                .into_iter()
                .find(|m| is_active(rule, m))
                .ok_or_else(no_match)?,
            MatchDirective::Bindings(b) => {
                let options = SearchOptions {
                    limit: Some(1),
                    bindings: b.clone(),
                    injective: false,
                };
                let bound_ok = b.iter().all(|(p, xs)| {
                    xs.iter()
                        .all(|(x, y)| rule.hypothesis.has_atom(p, x) && current.has_atom(p, y))
                });
                if !bound_ok {
                    return Err(no_match());
                }
                find_homomorphisms_with(&rule.hypothesis, &current, &options)
                    .into_iter()
                    .next()
                    .ok_or_else(no_match)?
            }
        };
        let inference = apply_rule(rule, &m)?;
        let step_fraction = Fraction {
            numerator: SpecMorphism::identity(inference.result.clone()),
            denominator: inference.injection.clone(),
        };
        fraction = compose_fractions(&fraction, &step_fraction)?;
        current = inference.result.clone();
        trace.push(inference);
    }
    Ok(ProofOutcome {
        spec: current,
        trace,
        fraction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Confirmed,
    Refuted,
    Inconclusive,
}

/// Whether `tau` becomes invertible in the generated theories: both ends are
/// saturated and the induced morphism is tested for being an isomorphism.
pub fn check_entailment(
    logic: &DiagrammaticLogic,
    tau: &SpecMorphism,
    config: SaturationConfig,
) -> Verdict {
    let lower = saturate(logic, tau.source.clone(), config);
    let upper = saturate(logic, tau.target.clone(), config);
    if lower.status == SaturationStatus::Truncated || upper.status == SaturationStatus::Truncated {
        return Verdict::Inconclusive;
    }
    let along = tau.then(&upper.unit);
    let mut bindings: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for (point, map) in &lower.unit.maps {
        for (x, y) in map {
            if let Some(z) = along.map_atom(point, x) {
                let slot = bindings.entry(point.clone()).or_default();
                if slot.get(y).is_some_and(|prev| prev != z) {
                    return Verdict::Refuted;
                }
                slot.insert(y.clone(), z.to_string());
            }
        }
    }
    match isomorphism_with(&lower.spec, &upper.spec, &bindings) {
        Some(_) => Verdict::Confirmed,
        None => Verdict::Refuted,
    }
}
