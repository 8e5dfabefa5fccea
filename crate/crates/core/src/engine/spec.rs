use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::search::SearchIndex;
use crate::error::{Error, Result};
use crate::sketch::{ArrowKind, ConeShape, Diagnostic, DiagnosticKind, LimitSketch};

/// An element of a carrier. Elements of derived cone apexes are tuples of
/// base elements, one component per projection.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Atom(String),
    Tuple(Vec<String>),
}

impl Elem {
    pub fn atom(name: impl Into<String>) -> Self {
        Elem::Atom(name.into())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Elem::Atom(a) => Some(a),
            Elem::Tuple(_) => None,
        }
    }

    /// The atom names mentioned by this element.
    pub fn atoms(&self) -> Vec<&str> {
        match self {
            Elem::Atom(a) => vec![a.as_str()],
            Elem::Tuple(t) => t.iter().map(String::as_str).collect(),
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Atom(a) => f.write_str(a),
            Elem::Tuple(t) => write!(f, "⟨{}⟩", t.join(",")),
        }
    }
}

/// A finite realization of a sketch.
///
/// Carriers are stored for every point except derived cone apexes; actions are
/// stored for arrows of kind [`ArrowKind::Stored`] and computed for the rest.
/// Equality compares content and ignores the specification's name.
#[derive(Debug, Clone)]
pub struct Specification {
    pub name: String,
    sketch: Arc<LimitSketch>,
    carriers: BTreeMap<String, BTreeSet<String>>,
    actions: BTreeMap<String, BTreeMap<Elem, Elem>>,
    index: OnceLock<Arc<SearchIndex>>,
}

impl PartialEq for Specification {
    fn eq(&self, other: &Self) -> bool {
        self.sketch.name == other.sketch.name
            && self.carriers == other.carriers
            && self.actions == other.actions
    }
}

impl Specification {
    pub fn new(name: impl Into<String>, sketch: Arc<LimitSketch>) -> Self {
        let carriers = sketch
            .stored_points()
            .into_iter()
            .map(|p| (p.to_string(), BTreeSet::new()))
            .collect();
        let actions = sketch
            .stored_arrows()
            .map(|a| (a.name.clone(), BTreeMap::new()))
            .collect();
        Specification {
            name: name.into(),
            sketch,
            carriers,
            actions,
            index: OnceLock::new(),
        }
    }

    /// The search index of this specification as a target, built on first use.
    pub(crate) fn search_index(&self) -> Arc<SearchIndex> {
        self.index
            .get_or_init(|| Arc::new(SearchIndex::new(self)))
            .clone()
    }

    pub fn sketch(&self) -> &Arc<LimitSketch> {
        &self.sketch
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn insert(&mut self, point: &str, element: impl Into<String>) -> Result<()> {
        let element = element.into();
        self.index = OnceLock::new();
        match self.carriers.get_mut(point) {
            Some(c) => {
                c.insert(element);
                Ok(())
            }
            None if self.sketch.is_derived(point) => Err(Error::InvalidSpec {
                spec: self.name.clone(),
                details: format!("`{point}` is a derived apex; its elements are computed"),
            }),
            None => Err(Error::Unknown {
                kind: "point",
                name: point.to_string(),
            }),
        }
    }

    pub fn set_action(&mut self, arrow: &str, from: Elem, to: Elem) -> Result<()> {
        self.index = OnceLock::new();
        match self.actions.get_mut(arrow) {
            Some(m) => {
                m.insert(from, to);
                Ok(())
            }
            None if self.sketch.arrow_named(arrow).is_some() => Err(Error::InvalidSpec {
                spec: self.name.clone(),
                details: format!("the action of `{arrow}` is computed and cannot be set"),
            }),
            None => Err(Error::Unknown {
                kind: "arrow",
                name: arrow.to_string(),
            }),
        }
    }

    /// Convenience for atom-to-atom actions.
    pub fn set(&mut self, arrow: &str, from: &str, to: &str) -> Result<()> {
        self.set_action(arrow, Elem::atom(from), Elem::atom(to))
    }

    /// Stored element names at a non-derived point (empty for unknown points).
    pub fn atoms(&self, point: &str) -> impl Iterator<Item = &str> {
        self.carriers
            .get(point)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub fn has_atom(&self, point: &str, name: &str) -> bool {
        self.carriers.get(point).is_some_and(|c| c.contains(name))
    }

    pub fn carriers(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.carriers
    }

    pub fn stored_actions(&self) -> &BTreeMap<String, BTreeMap<Elem, Elem>> {
        &self.actions
    }

    /// All elements at `point`, computing tuples at derived apexes.
    pub fn elements(&self, point: &str) -> Vec<Elem> {
        match self.sketch.derived_cone(point) {
            None => self.atoms(point).map(Elem::atom).collect(),
            Some(cone) => {
                let base = self.sketch.cone_base(cone);
                match &cone.shape {
                    ConeShape::Terminal => vec![Elem::Tuple(Vec::new())],
                    ConeShape::Product(_) => {
                        let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
                        for b in &base {
                            let mut next = Vec::new();
                            for t in &tuples {
                                for a in self.atoms(b) {
                                    let mut t = t.clone();
                                    t.push(a.to_string());
                                    next.push(t);
                                }
                            }
                            tuples = next;
                        }
                        tuples.into_iter().map(Elem::Tuple).collect()
                    }
                    ConeShape::Pullback { left, right } => {
                        let mut out = Vec::new();
                        for a in self.atoms(&base[0]) {
                            let la = self.apply(left, &Elem::atom(a));
                            for b in self.atoms(&base[1]) {
                                if la.is_some() && la == self.apply(right, &Elem::atom(b)) {
                                    out.push(Elem::Tuple(vec![a.to_string(), b.to_string()]));
                                }
                            }
                        }
                        out
                    }
                }
            }
        }
    }

    pub fn contains(&self, point: &str, e: &Elem) -> bool {
        match (self.sketch.derived_cone(point), e) {
            (None, Elem::Atom(a)) => self.has_atom(point, a),
            (Some(cone), Elem::Tuple(t)) => {
                let base = self.sketch.cone_base(cone);
                if t.len() != base.len() || !t.iter().zip(&base).all(|(x, p)| self.has_atom(p, x)) {
                    return false;
                }
                match &cone.shape {
                    ConeShape::Pullback { left, right } => {
                        let l = self.apply(left, &Elem::atom(&t[0]));
                        l.is_some() && l == self.apply(right, &Elem::atom(&t[1]))
                    }
                    _ => true,
                }
            }
            _ => false,
        }
    }

    /// The action of any arrow, stored or computed.
    pub fn apply(&self, arrow: &str, e: &Elem) -> Option<Elem> {
        match self.sketch.arrow_kind(arrow)? {
            ArrowKind::Stored => self.actions.get(arrow)?.get(e).cloned(),
            ArrowKind::Identity => Some(e.clone()),
            ArrowKind::Projection { index, .. } => match e {
                Elem::Tuple(t) => t.get(*index).map(Elem::atom),
                Elem::Atom(_) => None,
            },
            ArrowKind::Defined { first, second } => {
                let mid = self.apply(first, e)?;
                self.apply(second, &mid)
            }
        }
    }

    /// Number of stored elements over all points.
    pub fn size(&self) -> usize {
        self.carriers.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let sk = &*self.sketch;
        let mut out = Vec::new();
        for a in sk.stored_arrows() {
            let map = &self.actions[&a.name];
            let sources = self.elements(&a.source);
            for x in &sources {
                match map.get(x) {
                    None => out.push(Diagnostic::new(
                        DiagnosticKind::MissingAction,
                        format!("`{}` is undefined on `{x}`", a.name),
                    )),
                    Some(y) if !self.contains(&a.target, y) => out.push(Diagnostic::new(
                        DiagnosticKind::UnknownElement,
                        format!("`{}({x}) = {y}` but `{y}` is not in `{}`", a.name, a.target),
                    )),
                    Some(_) => {}
                }
            }
            for x in map.keys() {
                if !sources.contains(x) {
                    out.push(Diagnostic::new(
                        DiagnosticKind::UnknownElement,
                        format!(
                            "`{}` is defined on `{x}`, which is not in `{}`",
                            a.name, a.source
                        ),
                    ));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for c in &sk.composites {
            if let Some(ArrowKind::Defined { first, second }) = sk.arrow_kind(&c.composite) {
                if first == &c.first && second == &c.second {
                    continue;
                }
            }
            let source = &sk.arrow_named(&c.first).expect("valid sketch").source;
            for x in self.elements(source) {
                let direct = self.apply(&c.composite, &x);
                let path = self
                    .apply(&c.first, &x)
                    .and_then(|y| self.apply(&c.second, &y));
                if direct != path {
                    out.push(Diagnostic::new(
                        DiagnosticKind::ActionMismatch,
                        format!(
                            "composite `{} = {} . {}` fails at `{x}`",
                            c.composite, c.second, c.first
                        ),
                    ));
                }
            }
        }
        for cone in sk.cones.iter().filter(|c| !c.derived) {
            out.extend(self.check_stored_cone(cone));
        }
        out
    }

    pub(crate) fn validate_stored_cones(&self) -> Vec<Diagnostic> {
        let sk = self.sketch.clone();
        sk.cones
            .iter()
            .filter(|c| !c.derived)
            .flat_map(|c| self.check_stored_cone(c))
            .collect()
    }

    fn check_stored_cone(&self, cone: &crate::sketch::Cone) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let base = self.sketch.cone_base(cone);
        let mut seen: BTreeMap<Vec<String>, String> = BTreeMap::new();
        for x in self.atoms(&cone.apex) {
            let e = Elem::atom(x);
            let tuple: Option<Vec<String>> = cone
                .projections
                .iter()
                .map(|p| {
                    self.apply(p, &e)
                        .and_then(|y| y.as_atom().map(str::to_string))
                })
                .collect();
            let Some(tuple) = tuple else { continue };
            if let Some(prev) = seen.insert(tuple.clone(), x.to_string()) {
                out.push(Diagnostic::new(
                    DiagnosticKind::ConeViolation,
                    format!(
                        "apex `{}`: `{prev}` and `{x}` have the same projections",
                        cone.apex
                    ),
                ));
            }
        }
        // Expected tuples, enumerated over the base.
        let mut expected: Vec<Vec<String>> = vec![Vec::new()];
        for b in &base {
            let mut next = Vec::new();
            for t in &expected {
                for a in self.atoms(b) {
                    let mut t = t.clone();
                    t.push(a.to_string());
                    next.push(t);
                }
            }
            expected = next;
        }
        if let ConeShape::Pullback { left, right } = &cone.shape {
            expected.retain(|t| {
                let l = self.apply(left, &Elem::atom(&t[0]));
                l.is_some() && l == self.apply(right, &Elem::atom(&t[1]))
            });
        }
        for t in &expected {
            if !seen.contains_key(t) {
                out.push(Diagnostic::new(
                    DiagnosticKind::ConeViolation,
                    format!("apex `{}` has no element over ⟨{}⟩", cone.apex, t.join(",")),
                ));
            }
        }
        for (t, x) in &seen {
            if !expected.contains(t) {
                out.push(Diagnostic::new(
                    DiagnosticKind::ConeViolation,
                    format!("apex element `{x}` does not lie over the base diagram"),
                ));
            }
        }
        out
    }

    /// Fails with the collected diagnostics if the realization is ill-formed.
    pub fn checked(self) -> Result<Self> {
        let d = self.validate();
        if d.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidSpec {
                spec: self.name.clone(),
                details: d
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            })
        }
    }

    /// Renames one stored element, rewriting every action that mentions it.
    pub fn rename(&mut self, point: &str, from: &str, to: &str) {
        if from == to {
            return;
        }
        self.index = OnceLock::new();
        if let Some(c) = self.carriers.get_mut(point) {
            if c.remove(from) {
                c.insert(to.to_string());
            }
        }
        let sk = self.sketch.clone();
        let rename_in = |e: &Elem, p: &str| -> Elem {
            match e {
                Elem::Atom(a) if p == point && a == from => Elem::atom(to),
                Elem::Tuple(t) if sk.is_derived(p) => {
                    let base = sk.cone_base(sk.derived_cone(p).expect("derived"));
                    Elem::Tuple(
                        t.iter()
                            .zip(&base)
                            .map(|(x, b)| {
                                if b == point && x == from {
                                    to.to_string()
                                } else {
                                    x.clone()
                                }
                            })
                            .collect(),
                    )
                }
                other => other.clone(),
            }
        };
        for a in sk.stored_arrows() {
            let old = std::mem::take(self.actions.get_mut(&a.name).expect("stored"));
            let renamed = old
                .into_iter()
                .map(|(k, v)| (rename_in(&k, &a.source), rename_in(&v, &a.target)))
                .collect();
            self.actions.insert(a.name.clone(), renamed);
        }
    }
}
