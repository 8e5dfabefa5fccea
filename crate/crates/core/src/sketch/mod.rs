//! Finite limit sketches.
//!
//! A sketch is a graph together with *potential* identities, composites and
//! limit cones. Potential features only become real in the category the sketch
//! presents ([`generate_category`]) and in its realizations
//! ([`crate::engine::Specification`]).

mod category;
mod morphism;
mod yoneda;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

pub use category::{generate_category, CategoryArrow, PresentedCategory, RewriteStep, Word};
pub use morphism::{check_sketch_morphism, SketchMorphism};
pub use yoneda::representable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: String,
    pub target: String,
}

/// `h = g . f`, i.e. `h` is a potential composite of `f` followed by `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composite {
    pub composite: String,
    pub first: String,
    pub second: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeShape {
    Terminal,
    /// Discrete base; one projection per factor.
    Product(Vec<String>),
    /// Cospan base `left: A -> C <- B :right`; projections to `A` then `B`.
    Pullback {
        left: String,
        right: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub apex: String,
    pub shape: ConeShape,
    pub projections: Vec<String>,
    /// Carriers at a derived apex are recomputed from the base, never stored.
    pub derived: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagnosticKind {
    DuplicateName,
    UnknownPoint,
    UnknownArrow,
    IdentityMismatch,
    CompositeEndpointMismatch,
    ConeMismatch,
    SourceNotPreserved,
    TargetNotPreserved,
    FeatureNotPreserved,
    ActionMismatch,
    MissingAction,
    UnknownElement,
    ConeViolation,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::DuplicateName => "duplicate name",
            DiagnosticKind::UnknownPoint => "unknown point",
            DiagnosticKind::UnknownArrow => "unknown arrow",
            DiagnosticKind::IdentityMismatch => "identity mismatch",
            DiagnosticKind::CompositeEndpointMismatch => "composite endpoint mismatch",
            DiagnosticKind::ConeMismatch => "cone mismatch",
            DiagnosticKind::SourceNotPreserved => "source not preserved",
            DiagnosticKind::TargetNotPreserved => "target not preserved",
            DiagnosticKind::FeatureNotPreserved => "feature not preserved",
            DiagnosticKind::ActionMismatch => "action mismatch",
            DiagnosticKind::MissingAction => "missing action",
            DiagnosticKind::UnknownElement => "unknown element",
            DiagnosticKind::ConeViolation => "cone violation",
        };
        write!(f, "{kind}: {}", self.message)
    }
}

/// How a realization obtains the action of an arrow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrowKind {
    /// Stored explicitly in each realization.
    Stored,
    /// A potential identity; acts as the identity function.
    Identity,
    /// Projection `index` of a derived cone apex.
    Projection { apex: String, index: usize },
    /// Computed as `second . first` from the first acyclic composite declaring it.
    Defined { first: String, second: String },
}

#[derive(Debug, Clone)]
struct SketchIndex {
    kinds: BTreeMap<String, ArrowKind>,
    derived: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Default)]
pub struct LimitSketch {
    pub name: String,
    pub points: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub identities: Vec<(String, String)>,
    pub composites: Vec<Composite>,
    pub cones: Vec<Cone>,
    index: OnceLock<SketchIndex>,
}

impl PartialEq for LimitSketch {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.points == other.points
            && self.arrows == other.arrows
            && self.identities == other.identities
            && self.composites == other.composites
            && self.cones == other.cones
    }
}

impl LimitSketch {
    pub fn new(name: impl Into<String>) -> Self {
        LimitSketch {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn point(mut self, name: &str) -> Self {
        self.points.push(name.to_string());
        self
    }

    pub fn arrow(mut self, name: &str, source: &str, target: &str) -> Self {
        self.arrows.push(Arrow {
            name: name.to_string(),
            source: source.to_string(),
            target: target.to_string(),
        });
        self
    }

    pub fn identity(mut self, arrow: &str, point: &str) -> Self {
        self.identities.push((arrow.to_string(), point.to_string()));
        self
    }

    /// Declares `composite = second . first`.
    pub fn composite(mut self, composite: &str, first: &str, second: &str) -> Self {
        self.composites.push(Composite {
            composite: composite.to_string(),
            first: first.to_string(),
            second: second.to_string(),
        });
        self
    }

    pub fn cone(mut self, cone: Cone) -> Self {
        self.cones.push(cone);
        self
    }

    pub fn has_point(&self, name: &str) -> bool {
        self.points.iter().any(|p| p == name)
    }

    pub fn arrow_named(&self, name: &str) -> Option<&Arrow> {
        self.arrows.iter().find(|a| a.name == name)
    }

    pub fn arrows_from<'a>(&'a self, point: &'a str) -> impl Iterator<Item = &'a Arrow> + 'a {
        self.arrows.iter().filter(move |a| a.source == point)
    }

    /// Points sorted by name; the canonical iteration order for searches.
    pub fn sorted_points(&self) -> Vec<&str> {
        let mut points: Vec<&str> = self.points.iter().map(String::as_str).collect();
        points.sort();
        points
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for p in &self.points {
            if !seen.insert(p.as_str()) {
                out.push(Diagnostic::new(
                    DiagnosticKind::DuplicateName,
                    format!("point `{p}` declared twice"),
                ));
            }
        }
        let mut seen = BTreeSet::new();
        for a in &self.arrows {
            if !seen.insert(a.name.as_str()) {
                out.push(Diagnostic::new(
                    DiagnosticKind::DuplicateName,
                    format!("arrow `{}` declared twice", a.name),
                ));
            }
            for end in [&a.source, &a.target] {
                if !self.has_point(end) {
                    out.push(Diagnostic::new(
                        DiagnosticKind::UnknownPoint,
                        format!("arrow `{}` uses undeclared point `{end}`", a.name),
                    ));
                }
            }
        }
        for (a, p) in &self.identities {
            match self.arrow_named(a) {
                None => out.push(Diagnostic::new(
                    DiagnosticKind::UnknownArrow,
                    format!("identity `{a} @ {p}` names an undeclared arrow"),
                )),
                Some(arrow) if arrow.source != *p || arrow.target != *p => {
                    out.push(Diagnostic::new(
                        DiagnosticKind::IdentityMismatch,
                        format!(
                            "identity `{a} @ {p}` but `{a}` is {} -> {}",
                            arrow.source, arrow.target
                        ),
                    ))
                }
                Some(_) => {}
            }
        }
        for c in &self.composites {
            let cells = [&c.composite, &c.first, &c.second].map(|n| self.arrow_named(n));
            for (name, cell) in [&c.composite, &c.first, &c.second].iter().zip(cells.iter()) {
                if cell.is_none() {
                    out.push(Diagnostic::new(
                        DiagnosticKind::UnknownArrow,
                        format!(
                            "composite `{} = {} . {}` names undeclared arrow `{name}`",
                            c.composite, c.second, c.first
                        ),
                    ));
                }
            }
            if let [Some(h), Some(f), Some(g)] = cells {
                if f.target != g.source || h.source != f.source || h.target != g.target {
                    out.push(Diagnostic::new(
                        DiagnosticKind::CompositeEndpointMismatch,
                        format!(
                            "composite `{} = {} . {}`: {}: {} -> {}, {}: {} -> {}, {}: {} -> {}",
                            c.composite,
                            c.second,
                            c.first,
                            f.name,
                            f.source,
                            f.target,
                            g.name,
                            g.source,
                            g.target,
                            h.name,
                            h.source,
                            h.target
                        ),
                    ));
                }
            }
        }
        for cone in &self.cones {
            out.extend(self.validate_cone(cone));
        }
        let mut apexes = BTreeSet::new();
        for cone in &self.cones {
            if !apexes.insert(cone.apex.as_str()) {
                out.push(Diagnostic::new(
                    DiagnosticKind::DuplicateName,
                    format!("point `{}` is the apex of two cones", cone.apex),
                ));
            }
        }
        if out.is_empty() {
            out.extend(self.validate_derivations());
        }
        out
    }

    fn validate_cone(&self, cone: &Cone) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mismatch = |msg: String| Diagnostic::new(DiagnosticKind::ConeMismatch, msg);
        if !self.has_point(&cone.apex) {
            out.push(Diagnostic::new(
                DiagnosticKind::UnknownPoint,
                format!("cone apex `{}` is not a declared point", cone.apex),
            ));
            return out;
        }
        let base: Vec<String> = match &cone.shape {
            ConeShape::Terminal => Vec::new(),
            ConeShape::Product(factors) => factors.clone(),
            ConeShape::Pullback { left, right } => {
                match (self.arrow_named(left), self.arrow_named(right)) {
                    (Some(l), Some(r)) => {
                        if l.target != r.target {
                            out.push(mismatch(format!(
                                "pullback at `{}`: `{left}` and `{right}` do not share a target",
                                cone.apex
                            )));
                        }
                        vec![l.source.clone(), r.source.clone()]
                    }
                    _ => {
                        out.push(Diagnostic::new(
                            DiagnosticKind::UnknownArrow,
                            format!("pullback at `{}` names an undeclared arrow", cone.apex),
                        ));
                        return out;
                    }
                }
            }
        };
        if base.len() != cone.projections.len() {
            out.push(mismatch(format!(
                "cone at `{}` has {} base points but {} projections",
                cone.apex,
                base.len(),
                cone.projections.len()
            )));
            return out;
        }
        for (point, proj) in base.iter().zip(&cone.projections) {
            if !self.has_point(point) {
                out.push(Diagnostic::new(
                    DiagnosticKind::UnknownPoint,
                    format!(
                        "cone at `{}` has undeclared base point `{point}`",
                        cone.apex
                    ),
                ));
                continue;
            }
            match self.arrow_named(proj) {
                None => out.push(Diagnostic::new(
                    DiagnosticKind::UnknownArrow,
                    format!(
                        "cone at `{}` names undeclared projection `{proj}`",
                        cone.apex
                    ),
                )),
                Some(a) if a.source != cone.apex => out.push(mismatch(format!(
                    "projection `{proj}` has source `{}`, not the apex `{}`",
                    a.source, cone.apex
                ))),
                Some(a) if &a.target != point => out.push(mismatch(format!(
                    "projection `{proj}` targets `{}`, expected `{point}`",
                    a.target
                ))),
                Some(_) => {}
            }
        }
        if cone.derived {
            for point in &base {
                if self.cones.iter().any(|c| c.derived && &c.apex == point) {
                    out.push(mismatch(format!(
                        "derived cone at `{}` has derived base point `{point}`",
                        cone.apex
                    )));
                }
            }
        }
        out
    }

    fn validate_derivations(&self) -> Vec<Diagnostic> {
        let index = self.index();
        let mut out = Vec::new();
        for (name, kind) in &index.kinds {
            if let ArrowKind::Stored = kind {
                let arrow = self.arrow_named(name).expect("indexed arrow");
                if index.derived.contains_key(&arrow.source) {
                    out.push(Diagnostic::new(
                        DiagnosticKind::ConeMismatch,
                        format!(
                            "arrow `{name}` leaves derived apex `{}` but is neither a projection nor a composite",
                            arrow.source
                        ),
                    ));
                }
            }
        }
        out
    }

    fn index(&self) -> &SketchIndex {
        self.index.get_or_init(|| self.build_index())
    }

    fn build_index(&self) -> SketchIndex {
        let mut derived = BTreeMap::new();
        for (i, cone) in self.cones.iter().enumerate() {
            if cone.derived {
                derived.insert(cone.apex.clone(), i);
            }
        }
        let mut kinds: BTreeMap<String, ArrowKind> = BTreeMap::new();
        for (a, _) in &self.identities {
            kinds.insert(a.clone(), ArrowKind::Identity);
        }
        for cone in self.cones.iter().filter(|c| c.derived) {
            for (index, p) in cone.projections.iter().enumerate() {
                kinds.entry(p.clone()).or_insert(ArrowKind::Projection {
                    apex: cone.apex.clone(),
                    index,
                });
            }
        }
        // Definitions are taken in declaration order as long as they keep the
        // dependency graph acyclic.
        for c in &self.composites {
            if kinds.contains_key(&c.composite) || c.first == c.composite || c.second == c.composite
            {
                continue;
            }
            let mut trial = kinds.clone();
            trial.insert(
                c.composite.clone(),
                ArrowKind::Defined {
                    first: c.first.clone(),
                    second: c.second.clone(),
                },
            );
            if !depends_on(&trial, &c.first, &c.composite)
                && !depends_on(&trial, &c.second, &c.composite)
            {
                kinds = trial;
            }
        }
        for a in &self.arrows {
            kinds.entry(a.name.clone()).or_insert(ArrowKind::Stored);
        }
        SketchIndex { kinds, derived }
    }

    pub fn arrow_kind(&self, arrow: &str) -> Option<&ArrowKind> {
        self.index().kinds.get(arrow)
    }

    pub fn derived_cone(&self, point: &str) -> Option<&Cone> {
        self.index().derived.get(point).map(|&i| &self.cones[i])
    }

    pub fn is_derived(&self, point: &str) -> bool {
        self.index().derived.contains_key(point)
    }

    /// Points whose carriers are stored in realizations.
    pub fn stored_points(&self) -> Vec<&str> {
        self.sorted_points()
            .into_iter()
            .filter(|p| !self.is_derived(p))
            .collect()
    }

    /// Stored points ordered for matching: points reaching more stored points
    /// through stored arrows come first, ties by name.
    pub fn search_order(&self) -> Vec<&str> {
        let stored = self.stored_points();
        let mut next: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for a in self.stored_arrows() {
            let targets = match self.derived_cone(&a.target) {
                Some(cone) => self.cone_base(cone),
                None => vec![a.target.clone()],
            };
            for t in targets {
                if let Some(t) = stored.iter().find(|q| **q == t) {
                    next.entry(a.source.as_str()).or_default().insert(t);
                }
            }
        }
        let reach = |p: &str| {
            let mut seen: BTreeSet<&str> = BTreeSet::new();
            let mut stack = vec![p];
            while let Some(q) = stack.pop() {
                for &r in next.get(q).into_iter().flatten() {
                    if seen.insert(r) {
                        stack.push(r);
                    }
                }
            }
            seen.remove(p);
            seen.len()
        };
        let mut order: Vec<(usize, &str)> = stored.iter().map(|p| (reach(p), *p)).collect();
        order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));
        order.into_iter().map(|(_, p)| p).collect()
    }

    /// Arrows whose actions are stored in realizations, in declaration order.
    pub fn stored_arrows(&self) -> impl Iterator<Item = &Arrow> {
        self.arrows
            .iter()
            .filter(|a| matches!(self.arrow_kind(&a.name), Some(ArrowKind::Stored)))
    }

    /// Base points of a cone, one per projection.
    pub fn cone_base(&self, cone: &Cone) -> Vec<String> {
        cone.projections
            .iter()
            .filter_map(|p| self.arrow_named(p).map(|a| a.target.clone()))
            .collect()
    }
}

fn depends_on(kinds: &BTreeMap<String, ArrowKind>, arrow: &str, needle: &str) -> bool {
    let mut stack = vec![arrow.to_string()];
    let mut seen = BTreeSet::new();
    while let Some(a) = stack.pop() {
        if a == needle {
            return true;
        }
        if !seen.insert(a.clone()) {
            continue;
        }
        if let Some(ArrowKind::Defined { first, second }) = kinds.get(&a) {
            stack.push(first.clone());
            stack.push(second.clone());
        }
    }
    false
}
