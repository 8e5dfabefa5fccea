//! Morphisms of logics: translation of specifications along the left adjoint
//! and transposition of models through the re-reading right adjoint.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use super::{
    builtin_decorated_logic, builtin_equational_logic, builtin_pointed_equational_logic,
    DiagrammaticLogic,
};
use crate::engine::{
    find_homomorphisms_with, saturate, shortlex, Elem, SaturationConfig, SearchOptions,
    SpecMorphism, Specification, UnionFind,
};
use crate::error::{Error, Result};
use crate::fraction::{MatchDirective, ProofScript, ProofStep};
use crate::sketch::{check_sketch_morphism, SketchMorphism};

/// How a logic morphism acts on specifications beyond relabelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Cells are sent along the sketch morphism; arrows sent to identities
    /// identify elements.
    Relabel,
    /// Decorated to pointed equational: modifiers `X -> Y` become terms
    /// `S×X -> S×Y`, weak equations compare second projections.
    StateExpand,
}

#[derive(Debug, Clone)]
pub struct LogicMorphism {
    pub name: String,
    pub source: Arc<DiagrammaticLogic>,
    pub target: Arc<DiagrammaticLogic>,
    pub sketch_map: SketchMorphism,
    /// Source rule -> a proof script deriving its translation in the target.
    pub rule_map: BTreeMap<String, ProofScript>,
    pub strategy: Strategy,
}

/// A translated specification with the image of every stored source element.
#[derive(Debug, Clone)]
pub struct Translation {
    pub spec: Arc<Specification>,
    /// Source point -> element -> (target point, element).
    pub names: BTreeMap<String, BTreeMap<String, (String, String)>>,
}

impl Translation {
    pub fn image(&self, point: &str, element: &str) -> Option<(&str, &str)> {
        self.names
            .get(point)?
            .get(element)
            .map(|(q, n)| (q.as_str(), n.as_str()))
    }
}

impl LogicMorphism {
    pub fn new(
        name: impl Into<String>,
        source: Arc<DiagrammaticLogic>,
        target: Arc<DiagrammaticLogic>,
        sketch_map: SketchMorphism,
        strategy: Strategy,
    ) -> Result<Self> {
        let name = name.into();
        if *sketch_map.source != *source.sketch || *sketch_map.target != *target.sketch {
            return Err(Error::Translation(format!(
                "`{name}`: the sketch morphism must go from `{}` to `{}`",
                source.sketch.name, target.sketch.name
            )));
        }
        let diagnostics = check_sketch_morphism(&sketch_map);
        if !diagnostics.is_empty() {
            return Err(Error::Translation(format!(
                "`{name}`: {}",
                diagnostics
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; ")
            )));
        }
        if strategy == Strategy::StateExpand
            && (source.sketch.name != DEC_SKETCH || target.sketch.name != POINTED_SKETCH)
        {
            return Err(Error::Translation(format!(
                "`{name}`: state expansion goes from `{DEC_SKETCH}` to `{POINTED_SKETCH}`"
            )));
        }
        Ok(LogicMorphism {
            name,
            source,
            target,
            sketch_map,
            rule_map: BTreeMap::new(),
            strategy,
        })
    }

    pub fn identity(logic: Arc<DiagrammaticLogic>) -> Self {
        LogicMorphism {
            name: format!("id_{}", logic.name),
            sketch_map: SketchMorphism::identity(logic.sketch.clone()),
            source: logic.clone(),
            target: logic,
            rule_map: BTreeMap::new(),
            strategy: Strategy::Relabel,
        }
    }

    /// Fills `rule_map` with derivations found by [`derive_rule`]; returns the
    /// rules for which none was found within the configuration's bounds.
    pub fn derive_rule_map(&mut self, config: SaturationConfig) -> Result<Vec<String>> {
        let mut missing = Vec::new();
        for rule in self.source.rules.clone() {
            match derive_rule(self, &rule.name, config)? {
                Some(script) => {
                    self.rule_map.insert(rule.name.clone(), script);
                }
                None => missing.push(rule.name.clone()),
            }
        }
        Ok(missing)
    }
}

const DEC_SKETCH: &str = "Dec";
const POINTED_SKETCH: &str = "EqStar";

fn decorated_erasure(target: &DiagrammaticLogic) -> SketchMorphism {
    let dec = builtin_decorated_logic();
    let points = [
        ("Type", "Type"),
        ("TermP", "Term"),
        ("TermM", "Term"),
        ("SelidP", "Selid"),
        ("ConsP", "Cons"),
        ("CompP", "Comp"),
        ("ConsM", "Cons"),
        ("CompM", "Comp"),
        ("EqS", "Eq"),
        ("EqW", "Eq"),
    ];
    let arrows: [(&str, &[&str]); 19] = [
        ("domM", &["dom"]),
        ("codomM", &["codom"]),
        ("c", &[]),
        ("domP", &["dom"]),
        ("codomP", &["codom"]),
        ("selidP", &["selid"]),
        ("j0", &["i0"]),
        ("fstP", &["fst"]),
        ("sndP", &["snd"]),
        ("iP", &["i"]),
        ("compP", &["comp"]),
        ("fstM", &["fst"]),
        ("sndM", &["snd"]),
        ("iM", &["i"]),
        ("compM", &["comp"]),
        ("lhsS", &["lhs"]),
        ("rhsS", &["rhs"]),
        ("lhsW", &["lhs"]),
        ("rhsW", &["rhs"]),
    ];
    SketchMorphism {
        source: dec.sketch.clone(),
        target: target.sketch.clone(),
        point_map: points
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        arrow_map: arrows
            .iter()
            .map(|(a, w)| (a.to_string(), w.iter().map(|s| s.to_string()).collect()))
            .collect(),
    }
}

/// `F_far`: decorated to equational logic, forgetting the decorations.
pub fn far() -> LogicMorphism {
    let target = Arc::new(builtin_equational_logic());
    let map = decorated_erasure(&target);
    LogicMorphism::new(
        "far",
        Arc::new(builtin_decorated_logic()),
        target,
        map,
        Strategy::Relabel,
    )
    .expect("builtin morphism")
}

/// `F_near`: decorated to pointed equational logic, making the state explicit.
pub fn near() -> LogicMorphism {
    let target = Arc::new(builtin_pointed_equational_logic());
    let map = decorated_erasure(&target);
    LogicMorphism::new(
        "near",
        Arc::new(builtin_decorated_logic()),
        target,
        map,
        Strategy::StateExpand,
    )
    .expect("builtin morphism")
}

pub fn translate(f: &LogicMorphism, spec: &Specification) -> Result<Translation> {
    if **spec.sketch() != *f.source.sketch {
        return Err(Error::SketchMismatch(
            spec.sketch().name.clone(),
            f.source.sketch.name.clone(),
        ));
    }
    match f.strategy {
        Strategy::Relabel => relabel(f, spec),
        Strategy::StateExpand => state_expand(f, spec),
    }
}

/// The action of the left adjoint on a specification.
pub fn translate_spec(f: &LogicMorphism, spec: &Specification) -> Result<Specification> {
    translate(f, spec).map(|t| (*t.spec).clone())
}

/// The translation of a specification morphism, between the translations of
/// its ends.
pub fn translate_morphism(f: &LogicMorphism, m: &SpecMorphism) -> Result<SpecMorphism> {
    let a = translate(f, &m.source)?;
    let b = translate(f, &m.target)?;
    let mut bindings: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for (p, xs) in &a.names {
        for (x, (q, n)) in xs {
            let y = m
                .map_atom(p, x)
                .ok_or_else(|| Error::InvalidMorphism(format!("`{x}` at `{p}` has no image")))?;
            let (_, image) = b
                .image(p, y)
                .ok_or_else(|| Error::Translation(format!("`{y}` at `{p}` was not translated")))?;
            let slot = bindings.entry(q.clone()).or_default();
            if slot.get(n).is_some_and(|prev| prev != image) {
                return Err(Error::Translation(format!(
                    "`{n}` at `{q}` would have two images, `{}` and `{image}`",
                    slot[n]
                )));
            }
            slot.insert(n.clone(), image.to_string());
        }
    }
    let options = SearchOptions {
        limit: Some(1),
        bindings,
        injective: false,
    };
    find_homomorphisms_with(&a.spec, &b.spec, &options)
        .into_iter()
        .next()
        .ok_or_else(|| {
            Error::Translation(format!("no translation of the morphism for `{}`", f.name))
        })
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Node {
    One(usize),
    Many(Vec<usize>),
}

fn relabel(f: &LogicMorphism, spec: &Specification) -> Result<Translation> {
    let src = spec.sketch();
    let tgt = &f.target.sketch;
    let mut nodes: Vec<(String, String)> = Vec::new();
    let mut index: HashMap<(String, String), usize> = HashMap::new();
    let image_point = |p: &str| -> Result<String> {
        f.sketch_map
            .map_point(p)
            .map(str::to_string)
            .ok_or_else(|| Error::Translation(format!("point `{p}` has no image")))
    };
    for p in src.stored_points() {
        let q = image_point(p)?;
        if tgt.is_derived(&q) {
            return Err(Error::Translation(format!(
                "stored point `{p}` is sent to the derived apex `{q}`"
            )));
        }
        for x in spec.atoms(p) {
            index.entry((q.clone(), x.to_string())).or_insert_with(|| {
                nodes.push((q.clone(), x.to_string()));
                nodes.len() - 1
            });
        }
    }
    let node_of = |point: &str, e: &Elem| -> Result<Node> {
        match e {
            Elem::Atom(a) => Ok(Node::One(index[&(image_point(point)?, a.clone())])),
            Elem::Tuple(t) => {
                let base = src.cone_base(src.derived_cone(point).expect("derived"));
                t.iter()
                    .zip(&base)
                    .map(|(x, b)| Ok(index[&(image_point(b)?, x.clone())]))
                    .collect::<Result<Vec<_>>>()
                    .map(Node::Many)
            }
        }
    };

    let mut uf = UnionFind::new(nodes.len());
    let mut facts: Vec<(String, Node, Node)> = Vec::new();
    for a in src.stored_arrows() {
        let path = f
            .sketch_map
            .map_arrow(&a.name)
            .ok_or_else(|| Error::Translation(format!("arrow `{}` has no image", a.name)))?;
        for x in spec.elements(&a.source) {
            let Some(y) = spec.apply(&a.name, &x) else {
                continue;
            };
            let (nx, ny) = (node_of(&a.source, &x)?, node_of(&a.target, &y)?);
            match path.len() {
                0 => unify(&mut uf, &nx, &ny),
                1 => facts.push((path[0].clone(), nx, ny)),
                _ => {
                    return Err(Error::Translation(format!(
                        "arrow `{}` is sent to a path; only arrows and identities translate",
                        a.name
                    )))
                }
            }
        }
    }
    loop {
        let mut seen: HashMap<(String, Node), Node> = HashMap::new();
        let mut changed = false;
        for (arrow, nx, ny) in &facts {
            let (cx, cy) = (canon(&mut uf, nx), canon(&mut uf, ny));
            match seen.get(&(arrow.clone(), cx.clone())) {
                Some(prev) if *prev != cy => {
                    let prev = prev.clone();
                    unify(&mut uf, &prev, &cy);
                    changed = true;
                }
                Some(_) => {}
                None => {
                    seen.insert((arrow.clone(), cx), cy);
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut rep: HashMap<usize, String> = HashMap::new();
    for (i, (_, name)) in nodes.iter().enumerate() {
        let r = uf.find(i);
        let slot = rep.entry(r).or_insert_with(|| name.clone());
        if shortlex(name, slot).is_lt() {
            *slot = name.clone();
        }
    }
    let mut out = Specification::new(spec.name.clone(), tgt.clone());
    for (i, (q, _)) in nodes.iter().enumerate() {
        out.insert(q, rep[&uf.find(i)].clone())?;
    }
    let elem = |uf: &mut UnionFind, n: &Node| match n {
        Node::One(i) => Elem::Atom(rep[&uf.find(*i)].clone()),
        Node::Many(v) => Elem::Tuple(v.iter().map(|i| rep[&uf.find(*i)].clone()).collect()),
    };
    for (arrow, nx, ny) in &facts {
        let (ex, ey) = (elem(&mut uf, nx), elem(&mut uf, ny));
        out.set_action(arrow, ex, ey)?;
    }
    let diagnostics = out.validate();
    if !diagnostics.is_empty() {
        return Err(Error::Translation(
            diagnostics
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }

    let mut names: BTreeMap<String, BTreeMap<String, (String, String)>> = BTreeMap::new();
    for p in src.stored_points() {
        let q = image_point(p)?;
        for x in spec.atoms(p) {
            let i = index[&(q.clone(), x.to_string())];
            names
                .entry(p.to_string())
                .or_default()
                .insert(x.to_string(), (q.clone(), rep[&uf.find(i)].clone()));
        }
    }
    Ok(Translation {
        spec: Arc::new(out),
        names,
    })
}

fn canon(uf: &mut UnionFind, n: &Node) -> Node {
    match n {
        Node::One(i) => Node::One(uf.find(*i)),
        Node::Many(v) => Node::Many(v.iter().map(|i| uf.find(*i)).collect()),
    }
}

fn unify(uf: &mut UnionFind, a: &Node, b: &Node) {
    match (a, b) {
        (Node::One(x), Node::One(y)) => {
            uf.union(*x, *y);
        }
        (Node::Many(xs), Node::Many(ys)) => {
            for (x, y) in xs.iter().zip(ys) {
                uf.union(*x, *y);
            }
        }
        _ => {}
    }
}

fn paren(name: &str) -> String {
    if crate::fraction::is_compound(name) {
        format!("({name})")
    } else {
        name.to_string()
    }
}

pub(crate) fn state_product(x: &str) -> String {
    format!("S×{x}")
}

fn second_projection(x: &str) -> String {
    format!("π2_{}", state_product(x))
}

/// Builder for pointed equational specifications.
struct Pointed {
    spec: Specification,
    /// Term name -> the source element it came from, to detect clashes.
    origin: BTreeMap<String, String>,
}

impl Pointed {
    fn term(&mut self, name: &str, dom: &str, codom: &str, origin: &str) -> Result<()> {
        if let Some(prev) = self.origin.get(name) {
            if prev != origin {
                return Err(Error::Translation(format!(
                    "`{origin}` and `{prev}` would both be named `{name}`"
                )));
            }
        }
        self.origin.insert(name.to_string(), origin.to_string());
        self.spec.insert("Term", name)?;
        self.spec.set("dom", name, dom)?;
        self.spec.set("codom", name, codom)
    }

    fn value_type(&mut self, x: &str) -> Result<()> {
        let p = state_product(x);
        self.spec.insert("Type", x)?;
        self.spec.insert("Val", x)?;
        self.spec.set("vt", x, x)?;
        self.spec.insert("Type", &p)?;
        let (p1, p2) = (format!("π1_{p}"), second_projection(x));
        self.term(&p1, &p, "S", &p1)?;
        self.term(&p2, &p, x, &p2)?;
        self.spec.insert("SProd", &p)?;
        self.spec.set("sst", &p, "S")?;
        self.spec.set("pst", &p, &p1)?;
        self.spec.set("pval", &p, &p2)
    }

    fn comp(&mut self, name: &str, first: &str, second: &str, result: &str) -> Result<()> {
        self.spec.insert("Comp", name)?;
        self.spec.set_action(
            "i",
            Elem::atom(name),
            Elem::Tuple(vec![first.to_string(), second.to_string()]),
        )?;
        self.spec.set("comp", name, result)
    }

    fn eq(&mut self, name: &str, lhs: &str, rhs: &str) -> Result<()> {
        self.spec.insert("Eq", name)?;
        self.spec.set("lhs", name, lhs)?;
        self.spec.set("rhs", name, rhs)
    }
}

fn atom_of(spec: &Specification, arrow: &str, x: &str) -> Result<String> {
    spec.apply(arrow, &Elem::atom(x))
        .and_then(|e| e.as_atom().map(str::to_string))
        .ok_or_else(|| Error::Translation(format!("`{arrow}` is undefined at `{x}`")))
}

fn pair_of(spec: &Specification, arrow: &str, x: &str) -> Result<(String, String)> {
    match spec.apply(arrow, &Elem::atom(x)) {
        Some(Elem::Tuple(t)) if t.len() == 2 => Ok((t[0].clone(), t[1].clone())),
        _ => Err(Error::Translation(format!(
            "`{arrow}` is undefined at `{x}`"
        ))),
    }
}

fn state_expand(f: &LogicMorphism, spec: &Specification) -> Result<Translation> {
    let mut b = Pointed {
        spec: Specification::new(spec.name.clone(), f.target.sketch.clone()),
        origin: BTreeMap::new(),
    };
    let mut names: BTreeMap<String, BTreeMap<String, (String, String)>> = BTreeMap::new();
    let mut record = |p: &str, x: &str, q: &str, n: &str| {
        names
            .entry(p.to_string())
            .or_default()
            .insert(x.to_string(), (q.to_string(), n.to_string()));
    };

    if spec.has_atom("Type", "S") {
        return Err(Error::Translation(
            "`S` names the state sort and cannot be a value type".into(),
        ));
    }
    b.spec.insert("Type", "S")?;
    b.spec.insert("St", "S")?;
    b.spec.set("st", "S", "S")?;
    for x in spec.atoms("Type") {
        b.value_type(x)?;
        record("Type", x, "Type", x);
    }

    let mut view_of: BTreeMap<String, String> = BTreeMap::new();
    for p in spec.atoms("TermP") {
        view_of
            .entry(atom_of(spec, "c", p)?)
            .or_insert_with(|| p.to_string());
    }
    let modifier = |g: &str| {
        if view_of.contains_key(g) {
            state_product(&paren(g))
        } else {
            g.to_string()
        }
    };

    for p in spec.atoms("TermP") {
        let (x, y) = (atom_of(spec, "domP", p)?, atom_of(spec, "codomP", p)?);
        b.term(p, &x, &y, &format!("{p}^p"))?;
        record("TermP", p, "Term", p);
    }
    for g in spec.atoms("TermM") {
        let (x, y) = (atom_of(spec, "domM", g)?, atom_of(spec, "codomM", g)?);
        let name = modifier(g);
        b.term(
            &name,
            &state_product(&x),
            &state_product(&y),
            &format!("{g}^m"),
        )?;
        record("TermM", g, "Term", &name);
    }
    for p in spec.atoms("TermP") {
        let l = state_product(&paren(p));
        b.spec.insert("Lift", &l)?;
        b.spec.set("lbase", &l, p)?;
        b.spec
            .set("llift", &l, &modifier(&atom_of(spec, "c", p)?))?;
        b.spec
            .set("lsrc", &l, &state_product(&atom_of(spec, "domP", p)?))?;
        b.spec
            .set("ltgt", &l, &state_product(&atom_of(spec, "codomP", p)?))?;
    }
    for s in spec.atoms("SelidP") {
        b.spec.insert("Selid", s)?;
        b.spec.set("selid", s, &atom_of(spec, "selidP", s)?)?;
        record("SelidP", s, "Selid", s);
    }
    for k in spec.atoms("CompP") {
        let (g, h) = pair_of(spec, "iP", k)?;
        b.comp(k, &g, &h, &atom_of(spec, "compP", k)?)?;
        record("CompP", k, "Comp", k);
    }
    for k in spec.atoms("CompM") {
        let (g, h) = pair_of(spec, "iM", k)?;
        let name = if spec.has_atom("CompP", k) {
            state_product(&paren(k))
        } else {
            k.to_string()
        };
        b.comp(
            &name,
            &modifier(&g),
            &modifier(&h),
            &modifier(&atom_of(spec, "compM", k)?),
        )?;
        record("CompM", k, "Comp", &name);
    }
    for e in spec.atoms("EqS") {
        let (l, r) = (atom_of(spec, "lhsS", e)?, atom_of(spec, "rhsS", e)?);
        let (ml, mr) = (modifier(&l), modifier(&r));
        let name = if *e == format!("{l}≡{r}") {
            format!("{ml}≡{mr}")
        } else {
            e.to_string()
        };
        b.eq(&name, &ml, &mr)?;
        record("EqS", e, "Eq", &name);
    }
    for w in spec.atoms("EqW") {
        let (l, r) = (atom_of(spec, "lhsW", w)?, atom_of(spec, "rhsW", w)?);
        let y = atom_of(spec, "codomM", &l)?;
        let pi = second_projection(&y);
        let mut values = Vec::new();
        for side in [&l, &r] {
            let m = modifier(side);
            let dom = state_product(&atom_of(spec, "domM", side)?);
            let v = format!("{pi}∘{}", paren(&m));
            b.term(&v, &dom, &y, &v)?;
            b.comp(&v, &m, &pi, &v)?;
            values.push(v);
        }
        let name = if *w == format!("{l}~{r}") {
            format!("{}≡{}", values[0], values[1])
        } else {
            w.to_string()
        };
        b.eq(&name, &values[0], &values[1])?;
        record("EqW", w, "Eq", &name);
    }

    let diagnostics = b.spec.validate();
    if !diagnostics.is_empty() {
        return Err(Error::Translation(
            diagnostics
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    Ok(Translation {
        spec: Arc::new(b.spec),
        names,
    })
}

/// The right adjoint on a target theory: `t2` re-read over the source sketch.
pub fn reread(f: &LogicMorphism, t2: &Specification) -> Result<Specification> {
    if **t2.sketch() != *f.target.sketch {
        return Err(Error::SketchMismatch(
            t2.sketch().name.clone(),
            f.target.sketch.name.clone(),
        ));
    }
    match f.strategy {
        Strategy::Relabel => precompose(f, t2),
        Strategy::StateExpand => reread_pointed(f, t2),
    }
}

fn precompose(f: &LogicMorphism, t2: &Specification) -> Result<Specification> {
    let src = &f.source.sketch;
    let mut out = Specification::new(format!("U({})", t2.name), src.clone());
    for p in src.stored_points() {
        let q = f.sketch_map.map_point(p).expect("checked morphism");
        for x in t2.atoms(q) {
            out.insert(p, x)?;
        }
    }
    for a in src.stored_arrows() {
        let path = f.sketch_map.map_arrow(&a.name).expect("checked morphism");
        let q = f.sketch_map.map_point(&a.source).expect("checked morphism");
        for x in t2.elements(q) {
            let mut y = Some(x.clone());
            for step in path {
                y = y.and_then(|e| t2.apply(step, &e));
            }
            if let Some(y) = y {
                out.set_action(&a.name, x, y)?;
            }
        }
    }
    Ok(out)
}

struct PointedView<'a> {
    t2: &'a Specification,
    /// Value type -> (its product with the state, second projection).
    products: BTreeMap<String, (String, String)>,
}

impl<'a> PointedView<'a> {
    fn new(t2: &'a Specification) -> Result<Self> {
        let states: Vec<&str> = t2.atoms("St").collect();
        let [state] = states[..] else {
            return Err(Error::Translation(format!(
                "`{}` must have exactly one state sort, found {}",
                t2.name,
                states.len()
            )));
        };
        let mut products = BTreeMap::new();
        for v in t2.atoms("Val") {
            let x = atom_of(t2, "vt", v)?;
            for a in t2.atoms("SProd") {
                if atom_of(t2, "sst", a)? == state && atom_of(t2, "base", a)? == x {
                    products
                        .entry(x.clone())
                        .or_insert((atom_of(t2, "prod", a)?, atom_of(t2, "pval", a)?));
                }
            }
        }
        Ok(PointedView { t2, products })
    }

    fn value_of(&self, product: &str) -> Option<&str> {
        self.products
            .iter()
            .find(|(_, (p, _))| p == product)
            .map(|(x, _)| x.as_str())
    }

    fn is_pure(&self, f: &str) -> bool {
        let (Ok(x), Ok(y)) = (atom_of(self.t2, "dom", f), atom_of(self.t2, "codom", f)) else {
            return false;
        };
        self.products.contains_key(&x) && self.products.contains_key(&y)
    }

    fn modifier_type(&self, g: &str) -> Option<(String, String)> {
        let x = self.value_of(&atom_of(self.t2, "dom", g).ok()?)?;
        let y = self.value_of(&atom_of(self.t2, "codom", g).ok()?)?;
        Some((x.to_string(), y.to_string()))
    }
}

fn reread_pointed(f: &LogicMorphism, t2: &Specification) -> Result<Specification> {
    let view = PointedView::new(t2)?;
    let mut out = Specification::new(format!("U({})", t2.name), f.source.sketch.clone());
    for x in view.products.keys() {
        out.insert("Type", x)?;
    }
    let mut lift: BTreeMap<String, String> = BTreeMap::new();
    for l in t2.atoms("Lift") {
        lift.entry(atom_of(t2, "lbase", l)?)
            .or_insert(atom_of(t2, "llift", l)?);
    }
    let mut modifiers = BTreeSet::new();
    for g in t2.atoms("Term") {
        if let Some((x, y)) = view.modifier_type(g) {
            out.insert("TermM", g)?;
            out.set("domM", g, &x)?;
            out.set("codomM", g, &y)?;
            modifiers.insert(g.to_string());
        }
    }
    let mut pure = BTreeSet::new();
    for p in t2.atoms("Term") {
        if view.is_pure(p) {
            if let Some(l) = lift.get(p).filter(|l| modifiers.contains(*l)) {
                out.insert("TermP", p)?;
                out.set("c", p, l)?;
                pure.insert(p.to_string());
            }
        }
    }
    for s in t2.atoms("Selid") {
        let t = atom_of(t2, "selid", s)?;
        if pure.contains(&t) {
            out.insert("SelidP", s)?;
            out.set("selidP", s, &t)?;
        }
    }
    let mut composite: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for k in t2.atoms("Comp") {
        let (g, h) = pair_of(t2, "i", k)?;
        let r = atom_of(t2, "comp", k)?;
        composite
            .entry((g.clone(), h.clone()))
            .or_default()
            .push(r.clone());
        for (set, point, ia, ca) in [
            (&pure, "CompP", "iP", "compP"),
            (&modifiers, "CompM", "iM", "compM"),
        ] {
            if set.contains(&g) && set.contains(&h) && set.contains(&r) {
                out.insert(point, k)?;
                out.set_action(ia, Elem::atom(k), Elem::Tuple(vec![g.clone(), h.clone()]))?;
                out.set(ca, k, &r)?;
            }
        }
    }
    let mut equations: BTreeSet<(String, String)> = BTreeSet::new();
    for e in t2.atoms("Eq") {
        let (l, r) = (atom_of(t2, "lhs", e)?, atom_of(t2, "rhs", e)?);
        if modifiers.contains(&l) && modifiers.contains(&r) {
            out.insert("EqS", e)?;
            out.set("lhsS", e, &l)?;
            out.set("rhsS", e, &r)?;
        }
        equations.insert((l, r));
    }
    for l in &modifiers {
        for r in &modifiers {
            let (Some(tl), Some(tr)) = (view.modifier_type(l), view.modifier_type(r)) else {
                continue;
            };
            if tl != tr {
                continue;
            }
            let pi = &view.products[&tl.1].1;
            let values = |g: &String| {
                composite
                    .get(&(g.clone(), pi.clone()))
                    .cloned()
                    .unwrap_or_default()
            };
            let witnessed = values(l).iter().any(|u| {
                values(r)
                    .iter()
                    .any(|v| equations.contains(&(u.clone(), v.clone())))
            });
            if witnessed {
                let w = format!("{l}~{r}");
                out.insert("EqW", &w)?;
                out.set("lhsW", &w, l)?;
                out.set("rhsW", &w, r)?;
            }
        }
    }
    Ok(out)
}

fn check_translation_source(t: &Translation, m: &SpecMorphism) -> Result<()> {
    if *m.source != *t.spec {
        return Err(Error::Type(
            "the model is not defined on the translated specification".into(),
        ));
    }
    Ok(())
}

/// Transposes a model `m: F(s1) -> t2` into `s1 -> U(t2)`.
pub fn model_transpose(
    f: &LogicMorphism,
    s1: &Arc<Specification>,
    t2: &Arc<Specification>,
    m: &SpecMorphism,
) -> Result<SpecMorphism> {
    let t = translate(f, s1)?;
    check_translation_source(&t, m)?;
    let u = Arc::new(reread(f, t2)?);
    let mut maps: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for (p, xs) in &t.names {
        for (x, (q, n)) in xs {
            let y = m
                .map_atom(q, n)
                .ok_or_else(|| Error::Type(format!("`{n}` at `{q}` has no image")))?;
            let image = if f.strategy == Strategy::StateExpand && p == "EqW" {
                let side = |arrow: &str| -> Result<String> {
                    let g = atom_of(s1, arrow, x)?;
                    let (q, n) = t.image("TermM", &g).expect("translated");
                    Ok(m.map_atom(q, n).expect("total").to_string())
                };
                format!("{}~{}", side("lhsW")?, side("rhsW")?)
            } else {
                y.to_string()
            };
            maps.entry(p.clone()).or_default().insert(x.clone(), image);
        }
    }
    for p in s1.carriers().keys() {
        maps.entry(p.clone()).or_default();
    }
    SpecMorphism::new(s1.clone(), u, maps).checked()
}

/// Transposes a model `n: s1 -> U(t2)` back into `F(s1) -> t2`.
pub fn model_transpose_inverse(
    f: &LogicMorphism,
    s1: &Arc<Specification>,
    t2: &Arc<Specification>,
    n: &SpecMorphism,
) -> Result<SpecMorphism> {
    let t = translate(f, s1)?;
    let mut bindings: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for (p, xs) in &t.names {
        if f.strategy == Strategy::StateExpand && p == "EqW" {
            continue;
        }
        for (x, (q, name)) in xs {
            let y = n
                .map_atom(p, x)
                .ok_or_else(|| Error::Type(format!("`{x}` at `{p}` has no image")))?;
            let slot = bindings.entry(q.clone()).or_default();
            if slot.get(name).is_some_and(|prev| prev != y) {
                return Err(Error::Type(format!(
                    "`{name}` at `{q}` would have two images"
                )));
            }
            slot.insert(name.clone(), y.to_string());
        }
    }
    let options = SearchOptions {
        limit: Some(1),
        bindings,
        injective: false,
    };
    find_homomorphisms_with(&t.spec, t2, &options)
        .into_iter()
        .next()
        .ok_or_else(|| {
            Error::Type("the model does not extend to the translated specification".into())
        })
}

/// A proof script deriving the translation of a source rule in the target
/// logic, found by saturating the translated hypothesis until the translated
/// entailment factors through it. `None` when the bounds are reached first.
pub fn derive_rule(
    f: &LogicMorphism,
    rule: &str,
    config: SaturationConfig,
) -> Result<Option<ProofScript>> {
    let r = f.source.rule(rule).ok_or_else(|| Error::Unknown {
        kind: "rule",
        name: rule.to_string(),
    })?;
    let tau = translate_morphism(f, &r.tau)?;
    let factors = |budget: usize| {
        let sat = saturate(
            &f.target,
            tau.source.clone(),
            SaturationConfig { budget, ..config },
        );
        let mut bindings: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for (p, map) in &tau.maps {
            for (x, y) in map {
                let image = sat.unit.map_atom(p, x).expect("total").to_string();
                let slot = bindings.entry(p.clone()).or_default();
                if slot.get(y).is_some_and(|prev| *prev != image) {
                    return (false, sat);
                }
                slot.insert(y.clone(), image);
            }
        }
        let options = SearchOptions {
            limit: Some(1),
            bindings,
            injective: false,
        };
        (
            !find_homomorphisms_with(&tau.target, &sat.spec, &options).is_empty(),
            sat,
        )
    };
    let (ok, full) = factors(config.budget);
    if !ok {
        return Ok(None);
    }
    // Factoring persists along later steps, so the shortest prefix is found by bisection.
    let (mut lo, mut hi) = (0, full.applications);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if factors(mid).0 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let steps = full.trace[..lo]
        .iter()
        .map(|(rule, m)| ProofStep {
            rule: rule.clone(),
            directive: MatchDirective::Bindings(m.maps.clone()),
        })
        .collect();
    Ok(Some(ProofScript { steps }))
}
