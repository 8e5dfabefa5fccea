use std::collections::BTreeMap;
use std::sync::Arc;

use super::lexer::{tokenize, Tok, Token};
use crate::engine::{Elem, SpecMorphism, Specification};
use crate::error::{Error, ParseError, Result};
use crate::fraction::{MatchDirective, ProofScript, ProofStep, Rule, Templates};
use crate::logic::DiagrammaticLogic;
use crate::sketch::{Cone, ConeShape, LimitSketch};

type Maps = BTreeMap<String, BTreeMap<String, String>>;

/// Everything declared in one source text, in declaration order.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub sketches: Vec<Arc<LimitSketch>>,
    pub specs: Vec<Arc<Specification>>,
    pub morphisms: Vec<(String, SpecMorphism)>,
    pub logics: Vec<DiagrammaticLogic>,
    pub proofs: Vec<(String, ProofScript)>,
}

impl Document {
    pub fn spec(&self, name: &str) -> Option<&Arc<Specification>> {
        self.specs.iter().find(|s| s.name == name)
    }

    pub fn morphism(&self, name: &str) -> Option<&SpecMorphism> {
        self.morphisms
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
    }

    pub fn is_empty(&self) -> bool {
        self.sketches.is_empty()
            && self.specs.is_empty()
            && self.morphisms.is_empty()
            && self.logics.is_empty()
            && self.proofs.is_empty()
    }
}

/// Sketches a document may refer to without declaring them.
#[derive(Debug, Clone, Default)]
pub struct Env {
    sketches: BTreeMap<String, Arc<LimitSketch>>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    /// Makes the logic's sketch available under both its own name and the logic's.
    pub fn with_logic(mut self, logic: &DiagrammaticLogic) -> Self {
        self.sketches
            .insert(logic.name.clone(), logic.sketch.clone());
        self.sketches
            .insert(logic.sketch.name.clone(), logic.sketch.clone());
        self
    }

    pub fn with_sketch(mut self, sketch: Arc<LimitSketch>) -> Self {
        self.sketches.insert(sketch.name.clone(), sketch);
        self
    }
}

pub fn parse_document(src: &str, env: &Env) -> Result<Document> {
    let tokens = tokenize(src)?;
    let mut p = Parser::new(tokens, src);
    p.sketches = env.sketches.clone();
    p.document()
}

/// Parses a source that declares exactly one logic.
pub fn parse_logic(src: &str) -> Result<DiagrammaticLogic> {
    let doc = parse_document(src, &Env::new())?;
    let mut logics = doc.logics.into_iter();
    match (logics.next(), logics.next()) {
        (Some(l), None) => Ok(l),
        _ => Err(ParseError::new(1, 1, "expected exactly one logic").into()),
    }
}

#[derive(Debug, Clone)]
enum Cell {
    Point(String),
    Arrow(String, String, String),
    Identity(String, String),
    Composite(String, String, String),
    Cone(Cone),
}

#[derive(Debug, Clone)]
struct RawLogic {
    sketch_name: Option<String>,
    cells: Vec<Cell>,
    rules: Vec<Vec<Token>>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    sketches: BTreeMap<String, Arc<LimitSketch>>,
    specs: BTreeMap<String, Arc<Specification>>,
    raw_logics: BTreeMap<String, RawLogic>,
}

fn build_sketch(name: &str, cells: &[Cell]) -> LimitSketch {
    let mut sk = LimitSketch::new(name);
    for c in cells {
        sk = match c {
            Cell::Point(p) => sk.point(p),
            Cell::Arrow(a, s, t) => sk.arrow(a, s, t),
            Cell::Identity(a, p) => sk.identity(a, p),
            Cell::Composite(h, f, g) => sk.composite(h, f, g),
            Cell::Cone(cone) => sk.cone(cone.clone()),
        };
    }
    sk
}

impl Parser {
    fn new(toks: Vec<Token>, src: &str) -> Self {
        let line = src.lines().count().max(1);
        let column = src.lines().last().map_or(0, |l| l.chars().count()) + 1;
        Parser {
            toks,
            pos: 0,
            end: (line, column),
            sketches: BTreeMap::new(),
            specs: BTreeMap::new(),
            raw_logics: BTreeMap::new(),
        }
    }

    fn sub(&self, toks: Vec<Token>) -> Parser {
        Parser {
            toks,
            pos: 0,
            end: self.end,
            sketches: self.sketches.clone(),
            specs: self.specs.clone(),
            raw_logics: self.raw_logics.clone(),
        }
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.column))
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.here();
        ParseError::new(l, c, msg).into()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(x)) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<()> {
        if self.at_kw(k) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{k}`")))
        }
    }

    fn name(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Name(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.err("expected a name")),
        }
    }

    fn skip_separators(&mut self) {
        while self.eat_sym(";") {}
    }

    /// Tokens of a brace-delimited block, without the braces.
    fn block(&mut self) -> Result<Vec<Token>> {
        self.expect_sym("{")?;
        let start = self.pos;
        let mut depth = 1;
        while depth > 0 {
            match self.peek() {
                None => return Err(self.err("unclosed `{`")),
                Some(Tok::Sym("{")) => depth += 1,
                Some(Tok::Sym("}")) => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        Ok(self.toks[start..self.pos - 1].to_vec())
    }

    fn document(&mut self) -> Result<Document> {
        let mut doc = Document::default();
        self.skip_separators();
        if self.peek().is_none() {
            return Err(self.err("empty input"));
        }
        while self.peek().is_some() {
            match self.peek() {
                Some(Tok::Name(k)) if k == "sketch" => {
                    self.pos += 1;
                    let name = self.name()?;
                    self.expect_sym("{")?;
                    let cells = self.cells()?;
                    let sk = Arc::new(build_sketch(&name, &cells));
                    check_sketch(&sk)?;
                    self.sketches.insert(name, sk.clone());
                    doc.sketches.push(sk);
                }
                Some(Tok::Name(k)) if k == "spec" => {
                    self.pos += 1;
                    let name = self.name()?;
                    self.expect_kw("over")?;
                    let sk = self.sketch_ref()?;
                    self.expect_sym("{")?;
                    let spec = Arc::new(self.spec_body(&name, &sk)?);
                    self.specs.insert(name, spec.clone());
                    doc.specs.push(spec);
                }
                Some(Tok::Name(k)) if k == "morphism" => {
                    self.pos += 1;
                    let name = self.name()?;
                    self.expect_sym(":")?;
                    let src = self.spec_ref()?;
                    self.expect_sym("->")?;
                    let dst = self.spec_ref()?;
                    self.expect_sym("{")?;
                    let maps = self.bindings()?;
                    doc.morphisms
                        .push((name, complete(src, dst, maps).checked()?));
                }
                Some(Tok::Name(k)) if k == "logic" => {
                    self.pos += 1;
                    let logic = self.logic()?;
                    self.sketches
                        .insert(logic.name.clone(), logic.sketch.clone());
                    self.sketches
                        .insert(logic.sketch.name.clone(), logic.sketch.clone());
                    doc.logics.push(logic);
                }
                Some(Tok::Name(k)) if k == "prove" => {
                    self.pos += 1;
                    let name = match self.peek() {
                        Some(Tok::Name(_)) => self.name()?,
                        _ => String::new(),
                    };
                    self.expect_sym("{")?;
                    doc.proofs.push((name, self.proof()?));
                }
                _ => {
                    return Err(
                        self.err("expected `sketch`, `spec`, `morphism`, `logic` or `prove`")
                    )
                }
            }
            self.skip_separators();
        }
        Ok(doc)
    }

    fn sketch_ref(&mut self) -> Result<Arc<LimitSketch>> {
        let at = self.pos;
        let name = self.name()?;
        self.sketches.get(&name).cloned().ok_or_else(|| {
            self.pos = at;
            self.err(format!("unknown sketch `{name}`"))
        })
    }

    fn spec_ref(&mut self) -> Result<Arc<Specification>> {
        let at = self.pos;
        let name = self.name()?;
        self.specs.get(&name).cloned().ok_or_else(|| {
            self.pos = at;
            self.err(format!("unknown specification `{name}`"))
        })
    }

    /// Sketch cells up to and including the closing brace.
    fn cells(&mut self) -> Result<Vec<Cell>> {
        let mut out = Vec::new();
        loop {
            self.skip_separators();
            if self.eat_sym("}") {
                return Ok(out);
            }
            let kw = self.name()?;
            match kw.as_str() {
                "point" => {
                    out.push(Cell::Point(self.name()?));
                    while self.eat_sym(",") {
                        out.push(Cell::Point(self.name()?));
                    }
                }
                "arrow" => {
                    let a = self.name()?;
                    self.expect_sym(":")?;
                    let s = self.name()?;
                    self.expect_sym("->")?;
                    let t = self.name()?;
                    out.push(Cell::Arrow(a, s, t));
                }
                "identity" => {
                    let a = self.name()?;
                    self.expect_sym("@")?;
                    out.push(Cell::Identity(a, self.name()?));
                }
                "composite" => {
                    let h = self.name()?;
                    self.expect_sym("=")?;
                    let g = self.name()?;
                    self.expect_sym(".")?;
                    let f = self.name()?;
                    out.push(Cell::Composite(h, f, g));
                }
                "cone" => {
                    self.expect_kw("apex")?;
                    let apex = self.name()?;
                    let shape = self.name()?;
                    let (shape, projections) = match shape.as_str() {
                        "terminal" => (ConeShape::Terminal, Vec::new()),
                        "product" | "pullback" => {
                            self.expect_kw("of")?;
                            let base = self.name_tuple()?;
                            self.expect_kw("with")?;
                            let projections = self.name_tuple()?;
                            if shape == "product" {
                                (ConeShape::Product(base), projections)
                            } else if base.len() == 2 {
                                let mut b = base.into_iter();
                                let left = b.next().expect("two");
                                let right = b.next().expect("two");
                                (ConeShape::Pullback { left, right }, projections)
                            } else {
                                return Err(self.err("a pullback has a base of two arrows"));
                            }
                        }
                        other => return Err(self.err(format!("unknown cone shape `{other}`"))),
                    };
                    let derived = self.at_kw("derived");
                    if derived {
                        self.pos += 1;
                    }
                    out.push(Cell::Cone(Cone {
                        apex,
                        shape,
                        projections,
                        derived,
                    }));
                }
                other => {
                    self.pos -= 1;
                    return Err(self.err(format!("unknown sketch cell `{other}`")));
                }
            }
        }
    }

    fn name_tuple(&mut self) -> Result<Vec<String>> {
        self.expect_sym("(")?;
        let mut out = Vec::new();
        if self.eat_sym(")") {
            return Ok(out);
        }
        loop {
            out.push(self.name()?);
            if self.eat_sym(")") {
                return Ok(out);
            }
            self.expect_sym(",")?;
        }
    }

    fn elem(&mut self) -> Result<Elem> {
        if self.eat_sym("<") {
            let mut parts = Vec::new();
            if !self.eat_sym(">") {
                loop {
                    parts.push(self.name()?);
                    if self.eat_sym(">") {
                        break;
                    }
                    self.expect_sym(",")?;
                }
            }
            Ok(Elem::Tuple(parts))
        } else {
            Ok(Elem::Atom(self.name()?))
        }
    }

    /// Carrier and action entries up to and including the closing brace.
    fn spec_body(&mut self, name: &str, sk: &Arc<LimitSketch>) -> Result<Specification> {
        let mut spec = Specification::new(name, sk.clone());
        let mut actions = Vec::new();
        loop {
            self.skip_separators();
            if self.eat_sym("}") {
                break;
            }
            let at = self.pos;
            let head = self.name()?;
            if self.eat_sym(":") {
                if !sk.has_point(&head) {
                    self.pos = at;
                    return Err(self.err(format!("unknown point `{head}`")));
                }
                if sk.is_derived(&head) {
                    self.pos = at;
                    return Err(self.err(format!("`{head}` is computed from its cone")));
                }
                spec.insert(&head, self.name()?)?;
                while self.eat_sym(",") {
                    let e = self.name()?;
                    spec.insert(&head, e)?;
                }
            } else if self.eat_sym("(") {
                let from = self.elem()?;
                self.expect_sym(")")?;
                self.expect_sym("=")?;
                let to = self.elem()?;
                if sk.arrow_named(&head).is_none() {
                    self.pos = at;
                    return Err(self.err(format!("unknown arrow `{head}`")));
                }
                actions.push((at, head, from, to));
            } else {
                return Err(self.err("expected `:` or `(`"));
            }
        }
        for (at, arrow, from, to) in actions {
            let a = sk.arrow_named(&arrow).expect("checked");
            for (e, p) in [(&from, &a.source), (&to, &a.target)] {
                if !spec.contains(p, e) {
                    self.pos = at;
                    return Err(self.err(format!("`{e}` is not an element of `{p}`")));
                }
            }
            spec.set_action(&arrow, from, to)?;
        }
        spec.checked()
    }

    /// `P: x -> y, ...` entries up to and including the closing brace.
    fn bindings(&mut self) -> Result<Maps> {
        let mut out: Maps = BTreeMap::new();
        loop {
            self.skip_separators();
            if self.eat_sym("}") {
                return Ok(out);
            }
            let point = self.name()?;
            self.expect_sym(":")?;
            loop {
                let x = self.name()?;
                self.expect_sym("->")?;
                let y = self.name()?;
                out.entry(point.clone()).or_default().insert(x, y);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
    }

    fn templates(&mut self) -> Result<Templates> {
        let mut out: Templates = BTreeMap::new();
        loop {
            self.skip_separators();
            if self.eat_sym("}") {
                return Ok(out);
            }
            let point = self.name()?;
            self.expect_sym(":")?;
            loop {
                let x = self.name()?;
                self.expect_sym("=")?;
                let t = self.name()?;
                out.entry(point.clone()).or_default().insert(x, t);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
    }

    fn logic(&mut self) -> Result<DiagrammaticLogic> {
        let name = self.name()?;
        let base = if self.at_kw("extends") {
            self.pos += 1;
            let at = self.pos;
            let b = self.name()?;
            Some((at, b))
        } else {
            None
        };
        let body = self.block()?;
        let mut inner = self.sub(body);
        let mut raw = match &base {
            None => RawLogic {
                sketch_name: None,
                cells: Vec::new(),
                rules: Vec::new(),
            },
            Some((at, b)) => match self.raw_logic(b)? {
                Some(r) => r,
                None => {
                    self.pos = *at;
                    return Err(self.err(format!("unknown logic `{b}`")));
                }
            },
        };
        raw.sketch_name = None;
        while inner.peek().is_some() {
            inner.skip_separators();
            if inner.peek().is_none() {
                break;
            }
            if inner.at_kw("sketch") {
                inner.pos += 1;
                raw.sketch_name = Some(inner.name()?);
                inner.expect_sym("{")?;
                raw.cells.extend(inner.cells()?);
            } else if inner.at_kw("rule") {
                let start = inner.pos;
                inner.pos += 1;
                inner.name()?;
                inner.block()?;
                raw.rules.push(inner.toks[start..inner.pos].to_vec());
            } else {
                return Err(inner.err("expected `sketch` or `rule`"));
            }
        }
        let sketch_name = raw.sketch_name.clone().unwrap_or_else(|| name.clone());
        let sk = Arc::new(build_sketch(&sketch_name, &raw.cells));
        check_sketch(&sk)?;
        let mut rules = Vec::new();
        for toks in &raw.rules {
            let mut rp = self.sub(toks.clone());
            rules.push(rp.rule(&sk)?);
        }
        self.raw_logics.insert(name.clone(), raw);
        DiagrammaticLogic::new(name, sk, rules)
    }

    fn raw_logic(&self, name: &str) -> Result<Option<RawLogic>> {
        if let Some(r) = self.raw_logics.get(name) {
            return Ok(Some(r.clone()));
        }
        let Some(src) = crate::logic::builtin_source(name) else {
            return Ok(None);
        };
        let mut p = Parser::new(tokenize(src)?, src);
        p.document()?;
        Ok(p.raw_logics.into_values().last())
    }

    fn rule(&mut self, sk: &Arc<LimitSketch>) -> Result<Rule> {
        self.expect_kw("rule")?;
        let name = self.name()?;
        self.expect_sym("{")?;
        let mut specs: BTreeMap<&str, Arc<Specification>> = BTreeMap::new();
        let mut tau = None;
        let mut s = None;
        let mut fresh = Templates::new();
        loop {
            self.skip_separators();
            if self.eat_sym("}") {
                break;
            }
            let at = self.pos;
            let section = self.name()?;
            match section.as_str() {
                "hypothesis" | "intermediate" | "conclusion" => {
                    self.expect_sym("{")?;
                    let key = match section.as_str() {
                        "hypothesis" => "hypothesis",
                        "intermediate" => "intermediate",
                        _ => "conclusion",
                    };
                    let spec = self.spec_body(&format!("{name}.{key}"), sk)?;
                    specs.insert(key, Arc::new(spec));
                }
                "tau" => {
                    self.expect_sym("{")?;
                    tau = Some(self.bindings()?);
                }
                "s" => {
                    self.expect_sym("{")?;
                    s = Some(self.bindings()?);
                }
                "fresh" => {
                    self.expect_sym("{")?;
                    fresh = self.templates()?;
                }
                other => {
                    self.pos = at;
                    return Err(self.err(format!("unknown rule section `{other}`")));
                }
            }
        }
        let get = |key: &str| -> Result<Arc<Specification>> {
            specs.get(key).cloned().ok_or_else(|| Error::InvalidSpec {
                spec: name.clone(),
                details: format!("rule has no {key}"),
            })
        };
        let (h, h1, c) = (get("hypothesis")?, get("intermediate")?, get("conclusion")?);
        let tau = complete(h, h1.clone(), tau.unwrap_or_default());
        let s = complete(c, h1, s.unwrap_or_default());
        Rule::new(name, tau, s, fresh)
    }

    fn proof(&mut self) -> Result<ProofScript> {
        let mut steps = Vec::new();
        loop {
            self.skip_separators();
            if self.eat_sym("}") {
                return Ok(ProofScript { steps });
            }
            self.expect_kw("apply")?;
            let rule = self.name()?;
            let directive = if self.at_kw("first") {
                self.pos += 1;
                MatchDirective::First
            } else if self.at_kw("with") {
                self.pos += 1;
                self.expect_sym("{")?;
                MatchDirective::Bindings(self.bindings()?)
            } else {
                MatchDirective::First
            };
            steps.push(ProofStep { rule, directive });
        }
    }
}

/// Unlisted source elements map to the target element of the same name.
fn complete(src: Arc<Specification>, dst: Arc<Specification>, mut maps: Maps) -> SpecMorphism {
    for (point, carrier) in src.carriers() {
        let m = maps.entry(point.clone()).or_default();
        for x in carrier {
            if !m.contains_key(x) && dst.has_atom(point, x) {
                m.insert(x.clone(), x.clone());
            }
        }
    }
    SpecMorphism::new(src, dst, maps)
}

fn check_sketch(sk: &LimitSketch) -> Result<()> {
    let d = sk.validate();
    if d.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidSketch {
            sketch: sk.name.clone(),
            details: d
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRAPH: &str = r#"
        sketch G { point V, E  arrow s : E -> V  arrow t : E -> V }
        spec A over G { V: x, y  E: e  s(e) = x  t(e) = y }
        spec B over G { V: x, y, z  E: e, k  s(e) = x t(e) = y s(k) = y t(k) = z }
        morphism i : A -> B { }
    "#;

    #[test]
    fn parses_specs_and_morphisms() {
        let doc = parse_document(GRAPH, &Env::new()).unwrap();
        assert_eq!(doc.specs.len(), 2);
        assert_eq!(doc.spec("B").unwrap().size(), 5);
        assert!(doc.morphism("i").unwrap().validate().is_empty());
    }

    #[test]
    fn reports_positions() {
        let e =
            parse_document("sketch G {\n  point V\n  arrow s : V => V }", &Env::new()).unwrap_err();
        match e {
            Error::Parse(p) => assert_eq!((p.line, p.column), (3, 15)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            parse_document("  // nothing\n", &Env::new()),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn unknown_elements_in_actions() {
        let e = parse_document(
            "sketch G { point V, E arrow s : E -> V } spec A over G { E: e s(e) = v }",
            &Env::new(),
        );
        assert!(matches!(e, Err(Error::Parse(_))));
    }
}
