use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Elem, Specification};
use crate::error::{Error, Result};
use crate::sketch::{Diagnostic, DiagnosticKind};

/// Per-point element maps between stored carriers. Derived apexes are mapped
/// componentwise.
#[derive(Debug, Clone)]
pub struct SpecMorphism {
    pub source: Arc<Specification>,
    pub target: Arc<Specification>,
    pub maps: BTreeMap<String, BTreeMap<String, String>>,
}

impl SpecMorphism {
    pub fn new(
        source: Arc<Specification>,
        target: Arc<Specification>,
        maps: BTreeMap<String, BTreeMap<String, String>>,
    ) -> Self {
        SpecMorphism {
            source,
            target,
            maps,
        }
    }

    pub fn identity(spec: Arc<Specification>) -> Self {
        let maps = spec
            .carriers()
            .iter()
            .map(|(p, c)| {
                (
                    p.clone(),
                    c.iter().map(|x| (x.clone(), x.clone())).collect(),
                )
            })
            .collect();
        SpecMorphism {
            source: spec.clone(),
            target: spec,
            maps,
        }
    }

    /// The name-preserving inclusion of `source` into `target`.
    pub fn inclusion(source: Arc<Specification>, target: Arc<Specification>) -> Result<Self> {
        let maps = source
            .carriers()
            .iter()
            .map(|(p, c)| {
                (
                    p.clone(),
                    c.iter().map(|x| (x.clone(), x.clone())).collect(),
                )
            })
            .collect();
        SpecMorphism {
            source,
            target,
            maps,
        }
        .checked()
    }

    pub fn map_atom(&self, point: &str, name: &str) -> Option<&str> {
        self.maps.get(point)?.get(name).map(String::as_str)
    }

    pub fn map(&self, point: &str, e: &Elem) -> Option<Elem> {
        let sk = self.source.sketch();
        match e {
            Elem::Atom(a) => self.map_atom(point, a).map(Elem::atom),
            Elem::Tuple(t) => {
                let cone = sk.derived_cone(point)?;
                let base = sk.cone_base(cone);
                t.iter()
                    .zip(&base)
                    .map(|(x, b)| self.map_atom(b, x).map(str::to_string))
                    .collect::<Option<Vec<_>>>()
                    .map(Elem::Tuple)
            }
        }
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let (src, dst) = (&*self.source, &*self.target);
        if src.sketch().name != dst.sketch().name {
            out.push(Diagnostic::new(
                DiagnosticKind::ActionMismatch,
                format!(
                    "sketches differ: `{}` vs `{}`",
                    src.sketch().name,
                    dst.sketch().name
                ),
            ));
            return out;
        }
        for (point, carrier) in src.carriers() {
            for x in carrier {
                match self.map_atom(point, x) {
                    None => out.push(Diagnostic::new(
                        DiagnosticKind::MissingAction,
                        format!("`{x}` at `{point}` has no image"),
                    )),
                    Some(y) if !dst.has_atom(point, y) => out.push(Diagnostic::new(
                        DiagnosticKind::UnknownElement,
                        format!("`{x}` at `{point}` is sent to `{y}`, not in the target"),
                    )),
                    Some(_) => {}
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for a in src.sketch().stored_arrows() {
            for x in src.elements(&a.source) {
                let lhs = src.apply(&a.name, &x).and_then(|y| self.map(&a.target, &y));
                let rhs = self
                    .map(&a.source, &x)
                    .and_then(|mx| dst.apply(&a.name, &mx));
                if lhs.is_none() || lhs != rhs {
                    out.push(Diagnostic::new(
                        DiagnosticKind::ActionMismatch,
                        format!("does not commute with `{}` at `{x}`", a.name),
                    ));
                }
            }
        }
        out
    }

    pub fn checked(self) -> Result<Self> {
        let d = self.validate();
        if d.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidMorphism(
                d.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SpecMorphism) -> SpecMorphism {
        let maps = self
            .maps
            .iter()
            .map(|(p, m)| {
                let composed = m
                    .iter()
                    .filter_map(|(x, y)| next.map_atom(p, y).map(|z| (x.clone(), z.to_string())))
                    .collect();
                (p.clone(), composed)
            })
            .collect();
        SpecMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            maps,
        }
    }

    pub fn is_injective(&self) -> bool {
        self.maps.values().all(|m| {
            let mut images: Vec<&String> = m.values().collect();
            images.sort();
            images.windows(2).all(|w| w[0] != w[1])
        })
    }

    pub fn is_surjective(&self) -> bool {
        self.target.carriers().iter().all(|(p, c)| {
            let images: std::collections::BTreeSet<&String> = self
                .maps
                .get(p)
                .map(|m| m.values().collect())
                .unwrap_or_default();
            c.iter().all(|x| images.contains(x))
        })
    }

    /// Same element maps (sources and targets are not compared).
    pub fn same_maps(&self, other: &SpecMorphism) -> bool {
        self.maps == other.maps
    }
}
