//! Bounded chase computing the theory generated by a specification.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{
    find_homomorphisms, find_homomorphisms_with, SearchOptions, SpecMorphism, Specification,
};
use crate::fraction::{apply_rule, is_active, predicted_fresh_names};
use crate::logic::DiagrammaticLogic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaturationConfig {
    /// Maximum number of rule applications.
    pub budget: usize,
    /// Largest term depth a created element may have.
    pub depth: usize,
}

impl Default for SaturationConfig {
    fn default() -> Self {
        SaturationConfig {
            budget: 10_000,
            depth: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SaturationStatus {
    Fixpoint,
    Truncated,
}

#[derive(Debug, Clone)]
pub struct Saturation {
    pub status: SaturationStatus,
    pub spec: Arc<Specification>,
    /// The canonical morphism from the input into the result.
    pub unit: SpecMorphism,
    pub applications: usize,
    /// Applications skipped by the depth cap.
    pub skipped: usize,
    /// Applied rules with their matches, in order.
    pub trace: Vec<(String, SpecMorphism)>,
}

/// Term depth of an element name: one more than its number of compositions,
/// maximized over the sides of an equation.
pub fn term_depth(name: &str) -> usize {
    name.split(['≡', '~'])
        .map(|side| side.matches('∘').count() + 1)
        .max()
        .unwrap_or(1)
}

type Delta = BTreeMap<String, BTreeSet<String>>;

/// Elements of the result that are new, merged or renamed by an injection.
fn changed(injection: &SpecMorphism, fresh: &[(String, String)]) -> Delta {
    let mut out: Delta = BTreeMap::new();
    for (p, n) in fresh {
        out.entry(p.clone()).or_default().insert(n.clone());
    }
    for (p, map) in &injection.maps {
        let mut hits: BTreeMap<&str, usize> = BTreeMap::new();
        for (x, y) in map {
            *hits.entry(y).or_default() += 1;
            if x != y {
                out.entry(p.clone()).or_default().insert(y.clone());
            }
        }
        for (y, n) in hits {
            if n > 1 {
                out.entry(p.clone()).or_default().insert(y.to_string());
            }
        }
    }
    out
}

fn carry(delta: &mut Delta, injection: &SpecMorphism, step: &Delta) {
    for (p, names) in delta.iter_mut() {
        *names = names
            .iter()
            .map(|n| {
                injection
                    .map_atom(p, n)
                    .map_or_else(|| n.clone(), str::to_string)
            })
            .collect();
    }
    for (p, names) in step {
        delta
            .entry(p.clone())
            .or_default()
            .extend(names.iter().cloned());
    }
}

/// Matches of `hypothesis` sending some element onto an element of `delta`,
/// deduplicated in discovery order.
fn matches_touching(
    hypothesis: &Arc<Specification>,
    spec: &Arc<Specification>,
    delta: &Delta,
) -> Vec<SpecMorphism> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (p, names) in delta {
        for x in hypothesis.atoms(p) {
            for n in names {
                let options = SearchOptions {
                    limit: None,
                    bindings: BTreeMap::from([(
                        p.clone(),
                        BTreeMap::from([(x.to_string(), n.clone())]),
                    )]),
                    injective: false,
                };
                for m in find_homomorphisms_with(hypothesis, spec, &options) {
                    if seen.insert(m.maps.clone()) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Applies the logic's rules until none is active or a bound is hit.
///
/// Rules are tried in declaration order. The first scan of a rule visits all
/// matches in search order; later scans visit only matches touching elements
/// created, merged or renamed since. A match that already extends along the
/// rule's entailment is not applied; a match is applied at most once. Once a
/// rule has identified elements, the scan restarts from the first rule after
/// that rule's pending matches.
pub fn saturate(
    logic: &DiagrammaticLogic,
    spec: Arc<Specification>,
    config: SaturationConfig,
) -> Saturation {
    let mut current = spec.clone();
    let mut unit = SpecMorphism::identity(spec);
    let mut applied = BTreeSet::new();
    let mut applications = 0;
    let mut skipped = 0;
    let mut truncated = false;
    let mut trace = Vec::new();
    let mut pending: Vec<Option<Delta>> = vec![None; logic.rules.len()];

    'scan: loop {
        let mut progress = false;
        for (ri, rule) in logic.rules.iter().enumerate() {
            let queue = match pending[ri].replace(Delta::new()) {
                None => find_homomorphisms(&rule.hypothesis, &current, None),
                Some(delta) => matches_touching(&rule.hypothesis, &current, &delta),
            };
            let mut since = SpecMorphism::identity(current.clone());
            let mut moved = false;
            let mut merged = false;
            for m in queue {
                let m = if moved { m.then(&since) } else { m };
                let key = (ri, m.maps.clone());
                if applied.contains(&key) || !is_active(rule, &m) {
                    continue;
                }
                applied.insert(key);
                let too_deep =
                    |names: &[String]| names.iter().any(|n| term_depth(n) > config.depth);
                if predicted_fresh_names(rule, &m).is_some_and(|names| too_deep(&names)) {
                    skipped += 1;
                    truncated = true;
                    continue;
                }
                let Ok(step) = apply_rule(rule, &m) else {
                    continue;
                };
                if step.fresh.iter().any(|(_, n)| term_depth(n) > config.depth) {
                    skipped += 1;
                    truncated = true;
                    continue;
                }
                if applications >= config.budget {
                    truncated = true;
                    break 'scan;
                }
                applications += 1;
                trace.push((rule.name.clone(), m));
                progress = true;
                let delta = changed(&step.injection, &step.fresh);
                for d in pending.iter_mut().flatten() {
                    carry(d, &step.injection, &delta);
                }
                unit = unit.then(&step.injection);
                current = step.result.clone();
                merged |= rule.is_merging() || !step.injection.is_injective();
                since = since.then(&step.injection);
                moved = true;
            }
            if merged {
                continue 'scan;
            }
        }
        if !progress {
            break;
        }
    }

    Saturation {
        status: if truncated {
            SaturationStatus::Truncated
        } else {
            SaturationStatus::Fixpoint
        },
        spec: current,
        unit,
        applications,
        skipped,
        trace,
    }
}

/// True when no rule of the logic has an active match.
pub fn is_saturated(logic: &DiagrammaticLogic, spec: &Arc<Specification>) -> bool {
    logic.rules.iter().all(|r| {
        find_homomorphisms(&r.hypothesis, spec, None)
            .iter()
            .all(|m| !is_active(r, m))
    })
}
