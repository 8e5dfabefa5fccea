use std::collections::BTreeMap;
use std::sync::Arc;

use super::{generate_category, ConeShape, Diagnostic, DiagnosticKind, LimitSketch, Word};

/// A morphism of sketches. Arrows may be sent to paths of the target
/// (an empty path is the identity of the image point).
#[derive(Debug, Clone)]
pub struct SketchMorphism {
    pub source: Arc<LimitSketch>,
    pub target: Arc<LimitSketch>,
    pub point_map: BTreeMap<String, String>,
    pub arrow_map: BTreeMap<String, Word>,
}

impl SketchMorphism {
    pub fn identity(sketch: Arc<LimitSketch>) -> Self {
        let point_map = sketch
            .points
            .iter()
            .map(|p| (p.clone(), p.clone()))
            .collect();
        let arrow_map = sketch
            .arrows
            .iter()
            .map(|a| (a.name.clone(), vec![a.name.clone()]))
            .collect();
        SketchMorphism {
            source: sketch.clone(),
            target: sketch,
            point_map,
            arrow_map,
        }
    }

    /// Sends every cell to the cell of the same name.
    pub fn inclusion(source: Arc<LimitSketch>, target: Arc<LimitSketch>) -> Self {
        let point_map = source
            .points
            .iter()
            .map(|p| (p.clone(), p.clone()))
            .collect();
        let arrow_map = source
            .arrows
            .iter()
            .map(|a| (a.name.clone(), vec![a.name.clone()]))
            .collect();
        SketchMorphism {
            source,
            target,
            point_map,
            arrow_map,
        }
    }

    pub fn map_point(&self, point: &str) -> Option<&str> {
        self.point_map.get(point).map(String::as_str)
    }

    pub fn map_arrow(&self, arrow: &str) -> Option<&Word> {
        self.arrow_map.get(arrow)
    }
}

pub fn check_sketch_morphism(m: &SketchMorphism) -> Vec<Diagnostic> {
    let (src, tgt) = (&*m.source, &*m.target);
    let mut out = Vec::new();
    for p in &src.points {
        match m.point_map.get(p) {
            None => out.push(Diagnostic::new(
                DiagnosticKind::UnknownPoint,
                format!("point `{p}` has no image"),
            )),
            Some(q) if !tgt.has_point(q) => out.push(Diagnostic::new(
                DiagnosticKind::UnknownPoint,
                format!(
                    "point `{p}` is sent to `{q}`, which is not in `{}`",
                    tgt.name
                ),
            )),
            Some(_) => {}
        }
    }
    for a in &src.arrows {
        let Some(path) = m.arrow_map.get(&a.name) else {
            out.push(Diagnostic::new(
                DiagnosticKind::UnknownArrow,
                format!("arrow `{}` has no image", a.name),
            ));
            continue;
        };
        let (Some(s), Some(t)) = (m.point_map.get(&a.source), m.point_map.get(&a.target)) else {
            continue;
        };
        let mut cur = s.clone();
        let mut ok = true;
        for (i, step) in path.iter().enumerate() {
            match tgt.arrow_named(step) {
                None => {
                    out.push(Diagnostic::new(
                        DiagnosticKind::UnknownArrow,
                        format!(
                            "arrow `{}` is sent through `{step}`, which is not in `{}`",
                            a.name, tgt.name
                        ),
                    ));
                    ok = false;
                    break;
                }
                Some(b) if b.source != cur => {
                    let kind = if i == 0 {
                        DiagnosticKind::SourceNotPreserved
                    } else {
                        DiagnosticKind::CompositeEndpointMismatch
                    };
                    out.push(Diagnostic::new(
                        kind,
                        format!(
                            "image of `{}` starts at `{}`, expected `{cur}`",
                            a.name, b.source
                        ),
                    ));
                    ok = false;
                    break;
                }
                Some(b) => cur = b.target.clone(),
            }
        }
        if ok && &cur != t {
            out.push(Diagnostic::new(
                DiagnosticKind::TargetNotPreserved,
                format!(
                    "image of `{}: {} -> {}` ends at `{cur}`, expected `{t}`",
                    a.name, a.source, a.target
                ),
            ));
        }
    }
    if !out.is_empty() {
        return out;
    }

    let longest = m.arrow_map.values().map(Vec::len).max().unwrap_or(1);
    let cat = generate_category(tgt, 2 * longest.max(1) + 1);
    let class = |source: &str, word: &[String]| cat.resolve(tgt, source, word);

    for (a, p) in &src.identities {
        let q = &m.point_map[p];
        let image = &m.arrow_map[a];
        if class(q, image) != class(q, &[]) {
            out.push(Diagnostic::new(
                DiagnosticKind::FeatureNotPreserved,
                format!("identity `{a} @ {p}` is not sent to an identity"),
            ));
        }
    }
    for c in &src.composites {
        let from = &m.point_map[&src.arrow_named(&c.first).expect("valid sketch").source];
        let mut path = m.arrow_map[&c.first].clone();
        path.extend(m.arrow_map[&c.second].iter().cloned());
        let lhs = class(from, &m.arrow_map[&c.composite]);
        if lhs.is_none() || lhs != class(from, &path) {
            out.push(Diagnostic::new(
                DiagnosticKind::FeatureNotPreserved,
                format!(
                    "composite `{} = {} . {}` is not preserved",
                    c.composite, c.second, c.first
                ),
            ));
        }
    }
    for cone in &src.cones {
        let apex = &m.point_map[&cone.apex];
        let images: Vec<&Word> = cone.projections.iter().map(|p| &m.arrow_map[p]).collect();
        let found = tgt.cones.iter().any(|tc| {
            &tc.apex == apex
                && same_shape(&cone.shape, &tc.shape)
                && tc.projections.len() == images.len()
                && tc
                    .projections
                    .iter()
                    .zip(&images)
                    .all(|(tp, img)| class(apex, std::slice::from_ref(tp)) == class(apex, img))
        });
        if !found {
            out.push(Diagnostic::new(
                DiagnosticKind::FeatureNotPreserved,
                format!("cone at `{}` is not sent to a cone", cone.apex),
            ));
        }
    }
    out
}

fn same_shape(a: &ConeShape, b: &ConeShape) -> bool {
    match (a, b) {
        (ConeShape::Terminal, ConeShape::Terminal) => true,
        (ConeShape::Product(x), ConeShape::Product(y)) => x.len() == y.len(),
        (ConeShape::Pullback { .. }, ConeShape::Pullback { .. }) => true,
        _ => false,
    }
}
