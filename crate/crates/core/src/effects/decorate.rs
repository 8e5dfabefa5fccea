//! Programs as decorated specifications, and the two readings of the zoom.
//!
//! Every subexpression `e` of type `T` becomes a term `U -> T` named by its
//! source text. Operations are atoms: `&x: U -> V` names a variable,
//! `!: V -> E` looks it up, `:=: V×E -> U` assigns, `⟨a, b⟩` pairs the
//! arguments of an operation and `!T: T -> U` discards a statement value.

use std::sync::Arc;

use super::program::{Expr, Program, Type};
use super::semantics::{DecoratedTerm, Decoration};
use crate::engine::{Elem, Specification};
use crate::error::Result;
use crate::logic::{builtin_decorated_logic, builtin_equational_logic, far, near, translate_spec};

pub const UNIT: &str = "U";
pub const VARIABLES: &str = "V";

/// A decorated specification together with the term denoting the program.
#[derive(Debug, Clone)]
pub struct DecoratedProgram {
    pub spec: Arc<Specification>,
    pub root: DecoratedTerm,
}

struct Builder {
    dec: Specification,
    eq: Specification,
}

impl Builder {
    fn new() -> Self {
        Builder {
            dec: Specification::new("Program", builtin_decorated_logic().sketch),
            eq: Specification::new("Program", builtin_equational_logic().sketch),
        }
    }

    fn ty(&mut self, t: &str) {
        self.dec.insert("Type", t).expect("sketch point");
        self.eq.insert("Type", t).expect("sketch point");
    }

    fn term(&mut self, t: &DecoratedTerm) {
        let (src, tgt) = (t.source[0].as_str(), t.target[0].as_str());
        self.ty(src);
        self.ty(tgt);
        let n = t.name.as_str();
        self.dec.insert("TermM", n).expect("sketch point");
        self.dec.set("domM", n, src).expect("typed");
        self.dec.set("codomM", n, tgt).expect("typed");
        if t.is_pure() {
            self.dec.insert("TermP", n).expect("sketch point");
            self.dec.set("c", n, n).expect("typed");
        }
        self.eq.insert("Term", n).expect("sketch point");
        self.eq.set("dom", n, src).expect("typed");
        self.eq.set("codom", n, tgt).expect("typed");
    }

    /// Records `second ∘ first` and returns it.
    fn comp(
        &mut self,
        first: &DecoratedTerm,
        second: &DecoratedTerm,
        name: String,
    ) -> DecoratedTerm {
        let mut h = first.then(second).expect("well typed");
        h.name = name;
        h.source = first.source.clone();
        self.term(&h);
        let pair = Elem::Tuple(vec![first.name.clone(), second.name.clone()]);
        let k = h.name.as_str();
        if h.is_pure() {
            self.dec.insert("CompP", k).expect("sketch point");
            self.dec
                .set_action("iP", Elem::atom(k), pair.clone())
                .expect("typed");
            self.dec.set("compP", k, k).expect("typed");
        }
        self.dec.insert("CompM", k).expect("sketch point");
        self.dec
            .set_action("iM", Elem::atom(k), pair.clone())
            .expect("typed");
        self.dec.set("compM", k, k).expect("typed");
        self.eq.insert("Comp", k).expect("sketch point");
        self.eq.set_action("i", Elem::atom(k), pair).expect("typed");
        self.eq.set("comp", k, k).expect("typed");
        h
    }

    fn atom(&mut self, name: String, source: &str, target: &str, d: Decoration) -> DecoratedTerm {
        let t = DecoratedTerm::atom(name, &[source], &[target], d);
        self.term(&t);
        t
    }

    /// The pairing of the arguments of an operation, `U -> T1×..×Tn`.
    fn pair(&mut self, args: &[&Expr]) -> DecoratedTerm {
        let mut decoration = Decoration::Pure;
        let mut types = Vec::new();
        let mut names = Vec::new();
        for a in args {
            let t = self.expr(a);
            decoration = decoration.join(t.decoration);
            types.push(a.type_of().expect("typed"));
            names.push(a.to_string());
        }
        let target = Type::Product(types).to_string();
        self.atom(format!("⟨{}⟩", names.join(", ")), UNIT, &target, decoration)
    }

    fn expr(&mut self, e: &Expr) -> DecoratedTerm {
        let name = e.to_string();
        let ty = e.type_of().expect("typed").to_string();
        match e {
            Expr::Num(_) => self.atom(name, UNIT, &ty, Decoration::Pure),
            Expr::Var(x) => {
                let address = self.atom(format!("&{}", x.name), UNIT, VARIABLES, Decoration::Pure);
                let lookup = self.atom("!".into(), VARIABLES, &ty, Decoration::Modifier);
                self.comp(&address, &lookup, name)
            }
            Expr::Add(a, b) | Expr::Mul(a, b) => {
                let pair = self.pair(&[&**a, &**b]);
                let symbol = if matches!(e, Expr::Add(..)) {
                    "_ + _"
                } else {
                    "_ * _"
                };
                let op = self.atom(symbol.into(), &pair.target[0], &ty, Decoration::Pure);
                self.comp(&pair, &op, name)
            }
            Expr::App(f, args) => {
                let refs: Vec<&Expr> = args.iter().collect();
                let pair = self.pair(&refs);
                let holes = vec!["_"; args.len()].join(", ");
                let op = self.atom(
                    format!("{f}({holes})"),
                    &pair.target[0],
                    &ty,
                    Decoration::Pure,
                );
                self.comp(&pair, &op, name)
            }
            Expr::Assign(x, v) => {
                let address = self.atom(format!("&{}", x.name), UNIT, VARIABLES, Decoration::Pure);
                let value = self.expr(v);
                let target = format!("{VARIABLES}×{}", Type::Int);
                let pair = self.atom(
                    format!("⟨&{}, {v}⟩", x.name),
                    UNIT,
                    &target,
                    address.decoration.join(value.decoration),
                );
                let op = self.atom(":=".into(), &target, &ty, Decoration::Modifier);
                self.comp(&pair, &op, name)
            }
        }
    }

    fn program(&mut self, p: &Program) -> DecoratedTerm {
        let mut acc = self.expr(&p.stmts[0]);
        let mut text = p.stmts[0].to_string();
        for s in &p.stmts[1..] {
            let discard_ty = acc.target[0].clone();
            let discard = self.atom(
                format!("!{discard_ty}"),
                &discard_ty,
                UNIT,
                Decoration::Pure,
            );
            let done = self.comp(&acc, &discard, format!("{text};"));
            let next = self.expr(s);
            text = format!("{text}; {s}");
            acc = self.comp(&done, &next, text.clone());
        }
        acc
    }
}

pub fn decorate_program(p: &Program) -> Result<DecoratedProgram> {
    p.type_of()?;
    let mut b = Builder::new();
    let root = b.program(p);
    Ok(DecoratedProgram {
        spec: Arc::new(b.dec.checked()?),
        root,
    })
}

/// The undecorated equational specification of the program's terms.
pub fn grammar_spec(p: &Program) -> Result<Specification> {
    p.type_of()?;
    let mut b = Builder::new();
    b.program(p);
    b.eq.checked()
}

/// The hidden-state reading: decorations are erased.
pub fn forget_decorations(spec: &Specification) -> Result<Specification> {
    translate_spec(&far(), spec)
}

/// The explicit-state reading: modifiers `X -> Y` become terms `S×X -> S×Y`.
pub fn state_expand(spec: &Specification) -> Result<Specification> {
    translate_spec(&near(), spec)
}
