//! The category of elements of a set-valued functor and its projection.

use std::collections::BTreeMap;

use crate::engine::{Elem, Specification};
use crate::error::{Error, Result};

/// A finite category read from an equational specification: types are
/// objects, terms are arrows, `Selid` marks identities and `Comp` gives
/// composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCategory {
    pub objects: Vec<String>,
    /// Arrow -> (domain, codomain).
    pub arrows: BTreeMap<String, (String, String)>,
    pub identities: BTreeMap<String, String>,
    /// (first, second) -> second ∘ first.
    pub composition: BTreeMap<(String, String), String>,
}

fn atom(spec: &Specification, arrow: &str, x: &str) -> Result<String> {
    spec.apply(arrow, &Elem::atom(x))
        .and_then(|e| e.as_atom().map(str::to_string))
        .ok_or_else(|| Error::InvalidSpec {
            spec: spec.name.clone(),
            details: format!("`{arrow}` is undefined at `{x}`"),
        })
}

impl FiniteCategory {
    /// Requires an identity for every type and a composite for every
    /// consecutive pair.
    pub fn from_spec(spec: &Specification) -> Result<Self> {
        let objects: Vec<String> = spec.atoms("Type").map(str::to_string).collect();
        let mut arrows = BTreeMap::new();
        for f in spec.atoms("Term") {
            arrows.insert(
                f.to_string(),
                (atom(spec, "dom", f)?, atom(spec, "codom", f)?),
            );
        }
        let mut identities = BTreeMap::new();
        for s in spec.atoms("Selid") {
            let f = atom(spec, "selid", s)?;
            identities.entry(arrows[&f].0.clone()).or_insert(f);
        }
        let mut composition = BTreeMap::new();
        for k in spec.atoms("Comp") {
            let Some(Elem::Tuple(pair)) = spec.apply("i", &Elem::atom(k)) else {
                continue;
            };
            let h = atom(spec, "comp", k)?;
            let key = (pair[0].clone(), pair[1].clone());
            if composition.get(&key).is_some_and(|prev| *prev != h) {
                return Err(Error::InvalidSpec {
                    spec: spec.name.clone(),
                    details: format!("`{}` then `{}` has two composites", pair[0], pair[1]),
                });
            }
            composition.insert(key, h);
        }
        let cat = FiniteCategory {
            objects,
            arrows,
            identities,
            composition,
        };
        for x in &cat.objects {
            if !cat.identities.contains_key(x) {
                return Err(Error::InvalidSpec {
                    spec: spec.name.clone(),
                    details: format!("`{x}` has no identity"),
                });
            }
        }
        for (f, (_, y)) in &cat.arrows {
            for (g, (z, _)) in &cat.arrows {
                if y == z && !cat.composition.contains_key(&(f.clone(), g.clone())) {
                    return Err(Error::InvalidSpec {
                        spec: spec.name.clone(),
                        details: format!("`{f}` then `{g}` has no composite"),
                    });
                }
            }
        }
        Ok(cat)
    }

    pub fn compose(&self, first: &str, second: &str) -> Option<&str> {
        self.composition
            .get(&(first.to_string(), second.to_string()))
            .map(String::as_str)
    }
}

/// A functor to finite sets: a fiber per object and a function per arrow.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FunctorData {
    pub fibers: BTreeMap<String, Vec<String>>,
    pub actions: BTreeMap<String, BTreeMap<String, String>>,
}

impl FunctorData {
    pub fn apply(&self, arrow: &str, x: &str) -> Option<&str> {
        self.actions.get(arrow)?.get(x).map(String::as_str)
    }
}

/// The object `X^x`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ElementObject {
    pub name: String,
    pub base: String,
    pub element: String,
}

/// The arrow `f^x: X^x -> Y^{Pf(x)}`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Lift {
    pub name: String,
    pub arrow: String,
    pub element: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone)]
pub struct ElementsCategory {
    pub base: FiniteCategory,
    pub functor: FunctorData,
    pub objects: Vec<ElementObject>,
    pub lifts: Vec<Lift>,
}

fn object_name(x: &str, e: &str) -> String {
    format!("{x}^{e}")
}

impl ElementsCategory {
    pub fn object(&self, base: &str, element: &str) -> Option<&ElementObject> {
        self.objects
            .iter()
            .find(|o| o.base == base && o.element == element)
    }

    /// Lifts of `arrow` starting at the fiber element `element`.
    pub fn lifts_of<'a>(
        &'a self,
        arrow: &'a str,
        element: &'a str,
    ) -> impl Iterator<Item = &'a Lift> + 'a {
        self.lifts
            .iter()
            .filter(move |l| l.arrow == arrow && l.element == element)
    }

    pub fn lift(&self, arrow: &str, element: &str) -> Option<&Lift> {
        self.lifts
            .iter()
            .find(|l| l.arrow == arrow && l.element == element)
    }

    /// The projection on objects.
    pub fn project_object<'a>(&'a self, object: &str) -> Option<&'a str> {
        self.objects
            .iter()
            .find(|o| o.name == object)
            .map(|o| o.base.as_str())
    }

    /// The projection on arrows.
    pub fn project_arrow<'a>(&'a self, lift: &str) -> Option<&'a str> {
        self.lifts
            .iter()
            .find(|l| l.name == lift)
            .map(|l| l.arrow.as_str())
    }

    /// `first` followed by `second`, when they are consecutive.
    pub fn compose(&self, first: &Lift, second: &Lift) -> Option<&Lift> {
        if first.target != second.source {
            return None;
        }
        let h = self.base.compose(&first.arrow, &second.arrow)?;
        self.lift(h, &first.element)
    }
}

/// `Elt(P)` together with its projection to the base.
pub fn category_of_elements(base: &Specification, p: &FunctorData) -> Result<ElementsCategory> {
    let cat = FiniteCategory::from_spec(base)?;
    for x in &cat.objects {
        if !p.fibers.contains_key(x) {
            return Err(Error::NotFunctorial(format!("no fiber over `{x}`")));
        }
    }
    for (f, (x, y)) in &cat.arrows {
        for e in &p.fibers[x] {
            match p.apply(f, e) {
                Some(v) if p.fibers[y].iter().any(|w| w == v) => {}
                Some(v) => {
                    return Err(Error::NotFunctorial(format!(
                        "`{f}` sends `{e}` to `{v}`, outside the fiber over `{y}`"
                    )))
                }
                None => return Err(Error::NotFunctorial(format!("`{f}` is undefined at `{e}`"))),
            }
        }
    }
    for (x, id) in &cat.identities {
        for e in &p.fibers[x] {
            if p.apply(id, e) != Some(e) {
                return Err(Error::NotFunctorial(format!("identity `{id}` moves `{e}`")));
            }
        }
    }
    for ((f, g), h) in &cat.composition {
        for e in &p.fibers[&cat.arrows[f].0] {
            let two_step = p.apply(f, e).and_then(|v| p.apply(g, v));
            if two_step != p.apply(h, e) {
                return Err(Error::NotFunctorial(format!(
                    "`{f}` then `{g}` differs from `{h}` at `{e}`"
                )));
            }
        }
    }

    let mut objects = Vec::new();
    for x in &cat.objects {
        for e in &p.fibers[x] {
            objects.push(ElementObject {
                name: object_name(x, e),
                base: x.clone(),
                element: e.clone(),
            });
        }
    }
    let mut lifts = Vec::new();
    for (f, (x, y)) in &cat.arrows {
        for e in &p.fibers[x] {
            let v = p.apply(f, e).expect("checked");
            lifts.push(Lift {
                name: object_name(f, e),
                arrow: f.clone(),
                element: e.clone(),
                source: object_name(x, e),
                target: object_name(y, v),
            });
        }
    }
    Ok(ElementsCategory {
        base: cat,
        functor: p.clone(),
        objects,
        lifts,
    })
}
