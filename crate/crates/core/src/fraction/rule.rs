use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::Fraction;
use crate::engine::{
    find_homomorphisms_with, pushout, Provenance, SearchOptions, Side, SpecMorphism, Specification,
};
use crate::error::{Error, Result};

/// Names for elements an inference step creates: point -> intermediate
/// element -> template. `{x}` is replaced by the current name of the
/// intermediate element `x`; `{(x)}` does the same, parenthesized when the
/// name is itself compound.
pub type Templates = BTreeMap<String, BTreeMap<String, String>>;

/// An inference rule `ρ = s/τ: C -> H`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub name: String,
    pub hypothesis: Arc<Specification>,
    pub intermediate: Arc<Specification>,
    pub conclusion: Arc<Specification>,
    pub tau: SpecMorphism,
    pub numerator: SpecMorphism,
    pub fresh: Templates,
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        tau: SpecMorphism,
        numerator: SpecMorphism,
        fresh: Templates,
    ) -> Result<Self> {
        let name = name.into();
        let tau = tau.checked()?;
        let numerator = numerator.checked()?;
        if *tau.target != *numerator.target {
            return Err(Error::InvalidMorphism(format!(
                "rule `{name}`: τ and s must share the intermediate specification"
            )));
        }
        for (point, names) in &fresh {
            for x in names.keys() {
                if !tau.target.has_atom(point, x) {
                    return Err(Error::Unknown {
                        kind: "intermediate element",
                        name: format!("{point}:{x}"),
                    });
                }
            }
        }
        Ok(Rule {
            name,
            hypothesis: tau.source.clone(),
            intermediate: tau.target.clone(),
            conclusion: numerator.source.clone(),
            tau,
            numerator,
            fresh,
        })
    }

    pub fn as_fraction(&self) -> Fraction {
        Fraction {
            numerator: self.numerator.clone(),
            denominator: self.tau.clone(),
        }
    }

    /// A rule whose entailment identifies hypothesis elements.
    pub fn is_merging(&self) -> bool {
        !self.tau.is_injective()
    }
}

/// One application of a rule: `S_H` is the pushout of `τ` along the match.
#[derive(Debug, Clone)]
pub struct InferenceStep {
    pub rule: String,
    pub matched: SpecMorphism,
    pub result: Arc<Specification>,
    /// The instance `C -> S`: numerator `C -> H' -> S_H`, denominator `S -> S_H`.
    pub instance: Fraction,
    pub injection: SpecMorphism,
    pub intermediate: SpecMorphism,
    pub provenance: Provenance,
    /// Elements created by the step, as (point, name).
    pub fresh: Vec<(String, String)>,
}

/// True unless the match already extends along `τ`, in which case applying
/// the rule would only rebuild what is present.
pub fn is_active(rule: &Rule, m: &SpecMorphism) -> bool {
    let mut bindings: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for (point, map) in &rule.tau.maps {
        for (x, y) in map {
            let image = m.map_atom(point, x).expect("total match").to_string();
            let slot = bindings.entry(point.clone()).or_default();
            match slot.get(y) {
                Some(prev) if *prev != image => return true,
                _ => {
                    slot.insert(y.clone(), image);
                }
            }
        }
    }
    let determined = rule.intermediate.carriers().iter().all(|(p, c)| {
        c.iter()
            .all(|y| bindings.get(p).is_some_and(|b| b.contains_key(y)))
    });
    if determined {
        let extension = SpecMorphism::new(rule.intermediate.clone(), m.target.clone(), bindings);
        return !extension.validate().is_empty();
    }
    let options = SearchOptions {
        limit: Some(1),
        bindings,
        injective: false,
    };
    find_homomorphisms_with(&rule.intermediate, &m.target, &options).is_empty()
}

pub fn apply_rule(rule: &Rule, m: &SpecMorphism) -> Result<InferenceStep> {
    if *m.source != *rule.hypothesis {
        return Err(Error::InvalidMorphism(format!(
            "match is not defined on the hypothesis of `{}`",
            rule.name
        )));
    }
    let po = pushout(&rule.tau, m)?;

    let mut fresh: Vec<(String, String)> = Vec::new();
    for (point, classes) in &po.provenance {
        for (name, members) in classes {
            if members.iter().all(|(side, _)| *side == Side::Left) {
                fresh.push((point.clone(), name.clone()));
            }
        }
    }

    let mut apex = (*po.apex).clone().with_name(m.target.name.clone());
    let mut left = po.left.maps.clone();
    let mut provenance = po.provenance.clone();
    let mut pending: Vec<(String, String, String)> = Vec::new();
    for (point, name) in &fresh {
        let template = provenance[point][name]
            .iter()
            .find_map(|(_, x)| rule.fresh.get(point).and_then(|t| t.get(x)));
        if let Some(t) = template {
            pending.push((point.clone(), name.clone(), t.clone()));
        }
    }
    let fresh_names: BTreeSet<(String, String)> = fresh.iter().cloned().collect();
    let mut renamed: BTreeMap<(String, String), String> = BTreeMap::new();
    while !pending.is_empty() {
        let ready = pending.iter().position(|(_, _, t)| {
            placeholders(t)
                .iter()
                .all(|x| match locate(&rule.intermediate, &left, x) {
                    Some((p, current)) => {
                        !fresh_names.contains(&(p.clone(), current.clone()))
                            || renamed.contains_key(&(p, current))
                    }
                    None => true,
                })
        });
        let (point, name, template) = pending.remove(ready.unwrap_or(0));
        let wanted = instantiate(&template, |x| {
            locate(&rule.intermediate, &left, x).map(|(_, n)| n)
        });
        let target = free_name(&apex, &point, &name, &wanted);
        apex.rename(&point, &name, &target);
        for x in left
            .get_mut(&point)
            .into_iter()
            .flat_map(|m| m.values_mut())
        {
            if *x == name {
                *x = target.clone();
            }
        }
        if let Some(classes) = provenance.get_mut(&point) {
            if let Some(members) = classes.remove(&name) {
                classes.insert(target.clone(), members);
            }
        }
        renamed.insert((point, target), name);
    }
    let fresh = fresh
        .into_iter()
        .map(|(p, n)| {
            let now = renamed
                .iter()
                .find(|((q, _), old)| *q == p && **old == n)
                .map(|((_, new), _)| new.clone())
                .unwrap_or(n);
            (p, now)
        })
        .collect();

    let apex = Arc::new(apex);
    let intermediate = SpecMorphism::new(rule.intermediate.clone(), apex.clone(), left);
    let injection = SpecMorphism::new(m.target.clone(), apex.clone(), po.right.maps);
    Ok(InferenceStep {
        rule: rule.name.clone(),
        matched: m.clone(),
        instance: Fraction {
            numerator: rule.numerator.then(&intermediate),
            denominator: injection.clone(),
        },
        result: apex,
        injection,
        intermediate,
        provenance,
        fresh,
    })
}

/// Names the step along `m` would give to the elements it creates, computed
/// without the pushout. Only for rules whose entailment is injective, where
/// no created element can be identified with an existing one.
pub(crate) fn predicted_fresh_names(rule: &Rule, m: &SpecMorphism) -> Option<Vec<String>> {
    if rule.is_merging() {
        return None;
    }
    let mut image: BTreeMap<&str, String> = BTreeMap::new();
    for (p, map) in &rule.tau.maps {
        for (h, x) in map {
            image.insert(x.as_str(), m.map_atom(p, h)?.to_string());
        }
    }
    let templates: BTreeMap<&str, &str> = rule
        .fresh
        .values()
        .flat_map(|t| t.iter().map(|(x, t)| (x.as_str(), t.as_str())))
        .collect();
    fn name(
        x: &str,
        image: &BTreeMap<&str, String>,
        templates: &BTreeMap<&str, &str>,
        fuel: usize,
    ) -> String {
        if let Some(n) = image.get(x) {
            return n.clone();
        }
        match templates.get(x) {
            Some(t) if fuel > 0 => instantiate(t, |y| Some(name(y, image, templates, fuel - 1))),
            _ => x.to_string(),
        }
    }
    let fuel = templates.len();
    Some(
        rule.intermediate
            .carriers()
            .values()
            .flatten()
            .filter(|x| !image.contains_key(x.as_str()))
            .map(|x| name(x, &image, &templates, fuel))
            .collect(),
    )
}

fn placeholders(template: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        let Some(len) = rest[start..].find('}') else {
            break;
        };
        let inner = &rest[start + 1..start + len];
        out.push(
            inner
                .trim_start_matches('(')
                .trim_end_matches(')')
                .to_string(),
        );
        rest = &rest[start + len + 1..];
    }
    out
}

/// Replaces `{x}` and `{(x)}` in `template`.
pub(crate) fn instantiate(template: &str, lookup: impl Fn(&str) -> Option<String>) -> String {
    let mut out = String::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let Some(len) = rest[start..].find('}') else {
            out.push_str(&rest[start..]);
            return out;
        };
        let inner = &rest[start + 1..start + len];
        let (key, paren) = match inner.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            Some(k) => (k, true),
            None => (inner, false),
        };
        let value = lookup(key).unwrap_or_else(|| key.to_string());
        if paren && is_compound(&value) {
            out.push_str(&format!("({value})"));
        } else {
            out.push_str(&value);
        }
        rest = &rest[start + len + 1..];
    }
    out.push_str(rest);
    out
}

pub(crate) fn is_compound(name: &str) -> bool {
    name.contains(['∘', '⇒', '×', '≡', '~'])
}

/// The point of an intermediate element and its current name in the apex.
fn locate(
    intermediate: &Specification,
    left: &BTreeMap<String, BTreeMap<String, String>>,
    x: &str,
) -> Option<(String, String)> {
    intermediate
        .carriers()
        .iter()
        .find(|(_, c)| c.contains(x))
        .and_then(|(p, _)| left.get(p)?.get(x).map(|n| (p.clone(), n.clone())))
}

fn free_name(spec: &Specification, point: &str, current: &str, wanted: &str) -> String {
    if wanted == current || !spec.has_atom(point, wanted) {
        return wanted.to_string();
    }
    (1..)
        .map(|k| format!("{wanted}#{k}"))
        .find(|n| n == current || !spec.has_atom(point, n))
        .expect("unbounded")
}
