//! Diagrammatic logics, the builtin ones, and morphisms between them.

mod builtin;
mod elements;
mod translate;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fraction::Rule;
use crate::sketch::LimitSketch;

pub use builtin::{
    builtin, builtin_decorated_logic, builtin_equational_logic, builtin_modus_ponens_logic,
    builtin_pointed_equational_logic, builtin_source, BUILTIN_NAMES,
};
pub use elements::{
    category_of_elements, ElementObject, ElementsCategory, FiniteCategory, FunctorData, Lift,
};
pub use translate::{
    derive_rule, far, model_transpose, model_transpose_inverse, near, reread, translate,
    translate_morphism, translate_spec, LogicMorphism, Strategy, Translation,
};

/// A logic presented by its source sketch and the rules whose entailments
/// the target sketch inverts.
#[derive(Debug, Clone)]
pub struct DiagrammaticLogic {
    pub name: String,
    pub sketch: Arc<LimitSketch>,
    pub rules: Vec<Rule>,
}

impl DiagrammaticLogic {
    pub fn new(
        name: impl Into<String>,
        sketch: Arc<LimitSketch>,
        rules: Vec<Rule>,
    ) -> Result<Self> {
        let logic = DiagrammaticLogic {
            name: name.into(),
            sketch,
            rules,
        };
        logic.validate()?;
        Ok(logic)
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    fn validate(&self) -> Result<()> {
        let diagnostics = self.sketch.validate();
        if !diagnostics.is_empty() {
            return Err(Error::InvalidSketch {
                sketch: self.sketch.name.clone(),
                details: diagnostics
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            });
        }
        for (i, r) in self.rules.iter().enumerate() {
            if self.rules[..i].iter().any(|q| q.name == r.name) {
                return Err(Error::InvalidSpec {
                    spec: self.name.clone(),
                    details: format!("rule `{}` declared twice", r.name),
                });
            }
            for s in [&r.hypothesis, &r.intermediate, &r.conclusion] {
                if **s.sketch() != *self.sketch {
                    return Err(Error::SketchMismatch(
                        s.sketch().name.clone(),
                        self.sketch.name.clone(),
                    ));
                }
            }
        }
        Ok(())
    }
}
