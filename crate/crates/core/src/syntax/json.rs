//! JSON export of specifications, morphisms and inference steps.

use serde_json::{json, Map, Value};

use crate::engine::{Elem, SpecMorphism, Specification};
use crate::fraction::InferenceStep;

fn elem_json(e: &Elem) -> Value {
    match e {
        Elem::Atom(a) => json!(a),
        Elem::Tuple(t) => json!(t),
    }
}

/// `{name, sketch, carriers: {point: [..]}, actions: {arrow: [[x, y], ..]}}`.
pub fn spec_json(spec: &Specification) -> Value {
    let carriers: Map<String, Value> = spec
        .carriers()
        .iter()
        .filter(|(_, c)| !c.is_empty())
        .map(|(p, c)| (p.clone(), json!(c)))
        .collect();
    let actions: Map<String, Value> = spec
        .stored_actions()
        .iter()
        .filter(|(_, a)| !a.is_empty())
        .map(|(arrow, a)| {
            let pairs: Vec<Value> = a
                .iter()
                .map(|(x, y)| json!([elem_json(x), elem_json(y)]))
                .collect();
            (arrow.clone(), Value::Array(pairs))
        })
        .collect();
    json!({
        "name": spec.name,
        "sketch": spec.sketch().name,
        "carriers": carriers,
        "actions": actions,
    })
}

pub fn morphism_json(m: &SpecMorphism) -> Value {
    let maps: Map<String, Value> = m
        .maps
        .iter()
        .filter(|(_, map)| !map.is_empty())
        .map(|(p, map)| (p.clone(), json!(map)))
        .collect();
    json!({ "source": m.source.name, "target": m.target.name, "maps": maps })
}

/// The rule, its match, the created elements and the provenance of every
/// merged class.
pub fn step_json(step: &InferenceStep) -> Value {
    let mut merged = Map::new();
    for (point, classes) in &step.provenance {
        for (name, members) in classes {
            if members.len() > 1 {
                let names: Vec<Value> = members
                    .iter()
                    .map(|(side, x)| json!({ "side": side, "element": x }))
                    .collect();
                merged
                    .entry(point.clone())
                    .or_insert_with(|| Value::Object(Map::new()))
                    .as_object_mut()
                    .expect("object")
                    .insert(name.clone(), Value::Array(names));
            }
        }
    }
    let fresh: Vec<Value> = step
        .fresh
        .iter()
        .map(|(p, x)| json!({ "point": p, "element": x }))
        .collect();
    json!({
        "rule": step.rule,
        "match": morphism_json(&step.matched)["maps"],
        "fresh": fresh,
        "merged": merged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_document, Env};

    #[test]
    fn derived_tuples_are_arrays() {
        let doc = parse_document(
            "sketch G { point V, E  arrow s : E -> V  arrow t : E -> V }
             sketch H { point V, P  arrow p : P -> V }
             spec A over G { V: x, y  E: e  s(e) = x  t(e) = y }",
            &Env::new(),
        )
        .unwrap();
        let v = spec_json(&doc.specs[0]);
        assert_eq!(v["carriers"]["V"], json!(["x", "y"]));
        assert_eq!(v["actions"]["s"], json!([["e", "x"]]));
    }
}
