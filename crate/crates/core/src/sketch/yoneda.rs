use std::sync::Arc;

use super::{generate_category, Diagnostic, LimitSketch};
use crate::engine::{Elem, Specification};
use crate::error::{Error, Result};

/// The representable realization `Y(X)`: at each stored point `Q` the arrows
/// `X -> Q` of the presented category, acted on by post-composition.
///
/// Cone constraints are checked on the result and returned alongside it.
pub fn representable(
    sketch: &Arc<LimitSketch>,
    point: &str,
    depth_budget: usize,
) -> Result<(Specification, Vec<Diagnostic>)> {
    if !sketch.has_point(point) {
        return Err(Error::Unknown {
            kind: "point",
            name: point.to_string(),
        });
    }
    let cat = generate_category(sketch, depth_budget);
    if cat.is_truncated_from(point) {
        return Err(Error::Truncated(format!(
            "hom-sets from `{point}` exceed depth budget {depth_budget}"
        )));
    }
    let mut spec = Specification::new(format!("Y({point})"), sketch.clone());
    for q in sketch.stored_points() {
        for c in cat.hom(point, q) {
            spec.insert(q, cat.arrows[c].name.clone())?;
        }
    }
    let resolve = |rep: &[String], step: &str| {
        let mut word = rep.to_vec();
        word.push(step.to_string());
        cat.resolve(sketch, point, &word)
            .map(|c| cat.arrows[c].name.clone())
    };
    for a in sketch.stored_arrows() {
        for c in cat.hom(point, &a.source) {
            let arrow = &cat.arrows[c];
            let unresolved = || Error::Truncated(format!("`{}` after `{}`", a.name, arrow.name));
            let image = match sketch.derived_cone(&a.target) {
                None => Elem::atom(resolve(&arrow.representative, &a.name).ok_or_else(unresolved)?),
                Some(cone) => {
                    let mut word = arrow.representative.clone();
                    word.push(a.name.clone());
                    let parts = cone
                        .projections
                        .iter()
                        .map(|p| resolve(&word, p))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(unresolved)?;
                    Elem::Tuple(parts)
                }
            };
            spec.set_action(&a.name, Elem::atom(&arrow.name), image)?;
        }
    }
    let diagnostics = spec.validate();
    Ok((spec, diagnostics))
}
