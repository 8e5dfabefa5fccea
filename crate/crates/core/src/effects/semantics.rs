//! Decorated terms and their explicit-state semantics over finite carriers.
//!
//! A modifier `f: X -> Y` is interpreted as a function `𝕊×X -> 𝕊×Y`, a pure
//! term as a function `X -> Y` that leaves the state alone.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Decoration {
    #[serde(rename = "p")]
    Pure,
    #[serde(rename = "m")]
    Modifier,
}

impl Decoration {
    pub fn join(self, other: Decoration) -> Decoration {
        self.max(other)
    }
}

impl fmt::Display for Decoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decoration::Pure => "p",
            Decoration::Modifier => "m",
        })
    }
}

/// The flavor of a decorated equation: `=` compares results and states,
/// `~` compares results only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Flavor {
    Strong,
    Weak,
}

/// Where the passenger of a semi-pure product sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `f ⋊ id`: the passenger is the second factor.
    Right,
    /// `id ⋉ f`: the passenger is the first factor.
    Left,
}

/// A product of base types; the empty product is the unit.
pub type Ty = Vec<String>;

pub fn type_name(ty: &[String]) -> String {
    if ty.is_empty() {
        "1".into()
    } else {
        ty.join("×")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Atom,
    /// The modifier view of a pure term.
    Convert(Box<DecoratedTerm>),
    /// `first` then `second`.
    Compose(Box<DecoratedTerm>, Box<DecoratedTerm>),
    /// The pure projection onto `len` factors starting at `start`.
    Projection {
        start: usize,
        len: usize,
    },
    SemiPure {
        term: Box<DecoratedTerm>,
        side: Side,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoratedTerm {
    pub name: String,
    pub source: Ty,
    pub target: Ty,
    pub decoration: Decoration,
    pub body: Body,
}

fn ty(factors: &[&str]) -> Ty {
    factors.iter().map(|s| s.to_string()).collect()
}

impl DecoratedTerm {
    pub fn atom(
        name: impl Into<String>,
        source: &[&str],
        target: &[&str],
        decoration: Decoration,
    ) -> Self {
        DecoratedTerm {
            name: name.into(),
            source: ty(source),
            target: ty(target),
            decoration,
            body: Body::Atom,
        }
    }

    pub fn pure(name: impl Into<String>, source: &[&str], target: &[&str]) -> Self {
        Self::atom(name, source, target, Decoration::Pure)
    }

    pub fn modifier(name: impl Into<String>, source: &[&str], target: &[&str]) -> Self {
        Self::atom(name, source, target, Decoration::Modifier)
    }

    pub fn is_pure(&self) -> bool {
        self.decoration == Decoration::Pure
    }

    /// The modifier view `c(f)` of a pure term, a distinct term named `(f)`.
    pub fn convert(&self) -> Result<Self> {
        if !self.is_pure() {
            return Err(Error::Type(format!(
                "`{}` is already a modifier",
                self.name
            )));
        }
        Ok(DecoratedTerm {
            name: format!("({})", self.name),
            source: self.source.clone(),
            target: self.target.clone(),
            decoration: Decoration::Modifier,
            body: Body::Convert(Box::new(self.clone())),
        })
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &DecoratedTerm) -> Result<Self> {
        if self.target != next.source {
            return Err(Error::Type(format!(
                "`{}` ends in {} but `{}` starts from {}",
                self.name,
                type_name(&self.target),
                next.name,
                type_name(&next.source)
            )));
        }
        Ok(DecoratedTerm {
            name: format!("{}∘{}", next.name, self.name),
            source: self.source.clone(),
            target: next.target.clone(),
            decoration: self.decoration.join(next.decoration),
            body: Body::Compose(Box::new(self.clone()), Box::new(next.clone())),
        })
    }

    pub fn identity(source: &[&str]) -> Self {
        Self::projection(source, 0, source.len())
    }

    pub fn projection(source: &[&str], start: usize, len: usize) -> Self {
        assert!(start + len <= source.len(), "projection out of range");
        let target = &source[start..start + len];
        let name = if len == source.len() {
            format!("id_{}", type_name(&ty(source)))
        } else {
            format!("π[{start}..{}]_{}", start + len, type_name(&ty(source)))
        };
        DecoratedTerm {
            name,
            source: ty(source),
            target: ty(target),
            decoration: Decoration::Pure,
            body: Body::Projection { start, len },
        }
    }
}

/// `f1 ⋊ id_X2` (right) or `id_X2 ⋉ f1` (left), for a modifier `f1`.
pub fn semi_pure_product(
    f1: &DecoratedTerm,
    passenger: &[&str],
    side: Side,
) -> Result<DecoratedTerm> {
    if f1.is_pure() {
        return Err(Error::Type(format!(
            "`{}` is pure; convert it or use the cartesian product",
            f1.name
        )));
    }
    let p = ty(passenger);
    let (source, target, name) = match side {
        Side::Right => (
            [f1.source.clone(), p.clone()].concat(),
            [f1.target.clone(), p.clone()].concat(),
            format!("{}⋊id_{}", f1.name, type_name(&p)),
        ),
        Side::Left => (
            [p.clone(), f1.source.clone()].concat(),
            [p.clone(), f1.target.clone()].concat(),
            format!("id_{}⋉{}", type_name(&p), f1.name),
        ),
    };
    Ok(DecoratedTerm {
        name,
        source,
        target,
        decoration: Decoration::Modifier,
        body: Body::SemiPure {
            term: Box::new(f1.clone()),
            side,
        },
    })
}

/// `(id_Y1 ⋉ f2) ∘ (f1 ⋊ id_X2)`: first `f1`, then `f2`.
pub fn sequential_product(f1: &DecoratedTerm, f2: &DecoratedTerm) -> Result<DecoratedTerm> {
    let x2: Vec<&str> = f2.source.iter().map(String::as_str).collect();
    let y1: Vec<&str> = f1.target.iter().map(String::as_str).collect();
    let first = semi_pure_product(f1, &x2, Side::Right)?;
    let second = semi_pure_product(f2, &y1, Side::Left)?;
    let mut out = first.then(&second)?;
    out.name = format!("{}⋉⋊{}", f1.name, f2.name);
    Ok(out)
}

/// The two squares characterizing a semi-pure product: on the active
/// track the equation is strong, on the passenger track only weak.
#[derive(Debug, Clone)]
pub struct SemiPureDiagram {
    pub product: DecoratedTerm,
    pub active: (DecoratedTerm, DecoratedTerm),
    pub passenger: (DecoratedTerm, DecoratedTerm),
}

pub fn semi_pure_diagram(
    f1: &DecoratedTerm,
    passenger: &[&str],
    side: Side,
) -> Result<SemiPureDiagram> {
    let product = semi_pure_product(f1, passenger, side)?;
    let src: Vec<&str> = product.source.iter().map(String::as_str).collect();
    let tgt: Vec<&str> = product.target.iter().map(String::as_str).collect();
    let (n1, m1, n2) = (f1.source.len(), f1.target.len(), passenger.len());
    let (src_active, tgt_active, src_pass, tgt_pass) = match side {
        Side::Right => ((0, n1), (0, m1), (n1, n2), (m1, n2)),
        Side::Left => ((n2, n1), (n2, m1), (0, n2), (0, n2)),
    };
    let proj = |t: &[&str], (start, len): (usize, usize)| {
        DecoratedTerm::projection(t, start, len).convert()
    };
    let active = (
        product.then(&proj(&tgt, tgt_active)?)?,
        proj(&src, src_active)?.then(f1)?,
    );
    let passenger = (product.then(&proj(&tgt, tgt_pass)?)?, proj(&src, src_pass)?);
    Ok(SemiPureDiagram {
        product,
        active,
        passenger,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Table {
    /// Indexed by the encoded input.
    Pure(Vec<Vec<usize>>),
    /// Indexed by `state * |X| + input`.
    Modifier(Vec<(usize, Vec<usize>)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Interpretation {
    source: Ty,
    target: Ty,
    table: Table,
}

/// Finite carriers, a finite state set `𝕊 = {0, .., states - 1}` and a
/// function per atomic term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModel {
    pub states: usize,
    pub carriers: BTreeMap<String, usize>,
    terms: BTreeMap<String, Interpretation>,
}

impl FiniteModel {
    pub fn new(states: usize, carriers: &[(&str, usize)]) -> Self {
        FiniteModel {
            states,
            carriers: carriers.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            terms: BTreeMap::new(),
        }
    }

    fn carrier(&self, name: &str) -> Result<usize> {
        self.carriers
            .get(name)
            .copied()
            .ok_or_else(|| Error::Type(format!("no carrier for `{name}`")))
    }

    /// The number of elements of a product type.
    pub fn size(&self, ty: &[String]) -> Result<usize> {
        ty.iter().try_fold(1usize, |n, x| Ok(n * self.carrier(x)?))
    }

    fn encode(&self, ty: &[String], xs: &[usize]) -> Result<usize> {
        if xs.len() != ty.len() {
            return Err(Error::Type(format!(
                "expected {} components for {}, got {}",
                ty.len(),
                type_name(ty),
                xs.len()
            )));
        }
        let mut code = 0;
        for (x, v) in ty.iter().zip(xs) {
            let n = self.carrier(x)?;
            if *v >= n {
                return Err(Error::Type(format!("{v} is outside the carrier of `{x}`")));
            }
            code = code * n + v;
        }
        Ok(code)
    }

    fn decode(&self, ty: &[String], mut code: usize) -> Result<Vec<usize>> {
        let mut out = vec![0; ty.len()];
        for (i, x) in ty.iter().enumerate().rev() {
            let n = self.carrier(x)?;
            out[i] = code % n;
            code /= n;
        }
        Ok(out)
    }

    /// Every element of a product type, in lexicographic order.
    pub fn elements(&self, ty: &[String]) -> Result<Vec<Vec<usize>>> {
        (0..self.size(ty)?).map(|c| self.decode(ty, c)).collect()
    }

    fn check_output(&self, name: &str, ty: &[String], ys: &[usize]) -> Result<()> {
        self.encode(ty, ys)
            .map(|_| ())
            .map_err(|e| Error::Type(format!("`{name}`: {e}")))
    }

    pub fn with_pure(
        mut self,
        name: &str,
        source: &[&str],
        target: &[&str],
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        let (source, target) = (ty(source), ty(target));
        let mut table = Vec::new();
        for x in self.elements(&source)? {
            let y = f(&x);
            self.check_output(name, &target, &y)?;
            table.push(y);
        }
        self.terms.insert(
            name.to_string(),
            Interpretation {
                source,
                target,
                table: Table::Pure(table),
            },
        );
        Ok(self)
    }

    pub fn with_modifier(
        mut self,
        name: &str,
        source: &[&str],
        target: &[&str],
        f: impl Fn(usize, &[usize]) -> (usize, Vec<usize>),
    ) -> Result<Self> {
        let (source, target) = (ty(source), ty(target));
        let mut table = Vec::new();
        for s in 0..self.states {
            for x in self.elements(&source)? {
                let (t, y) = f(s, &x);
                if t >= self.states {
                    return Err(Error::Type(format!("`{name}` leaves 𝕊 with state {t}")));
                }
                self.check_output(name, &target, &y)?;
                table.push((t, y));
            }
        }
        self.terms.insert(
            name.to_string(),
            Interpretation {
                source,
                target,
                table: Table::Modifier(table),
            },
        );
        Ok(self)
    }

    fn atom(&self, t: &DecoratedTerm, state: usize, args: &[usize]) -> Result<(usize, Vec<usize>)> {
        let i = self
            .terms
            .get(&t.name)
            .ok_or_else(|| Error::Type(format!("`{}` has no interpretation", t.name)))?;
        if i.source != t.source || i.target != t.target {
            return Err(Error::Type(format!(
                "`{}` is interpreted at another type",
                t.name
            )));
        }
        let x = self.encode(&i.source, args)?;
        match (&i.table, t.decoration) {
            (Table::Pure(tab), Decoration::Pure) => Ok((state, tab[x].clone())),
            (Table::Modifier(tab), Decoration::Modifier) => {
                Ok(tab[state * self.size(&i.source)? + x].clone())
            }
            _ => Err(Error::Type(format!(
                "`{}` is interpreted with another decoration",
                t.name
            ))),
        }
    }
}

/// Runs the explicit-state reading of `term` from `(state, args)`.
pub fn evaluate(
    model: &FiniteModel,
    term: &DecoratedTerm,
    state: usize,
    args: &[usize],
) -> Result<(usize, Vec<usize>)> {
    if state >= model.states {
        return Err(Error::Type(format!("state {state} is outside 𝕊")));
    }
    model.encode(&term.source, args)?;
    match &term.body {
        Body::Atom => model.atom(term, state, args),
        Body::Convert(f) => evaluate(model, f, state, args),
        Body::Compose(f, g) => {
            let (s, y) = evaluate(model, f, state, args)?;
            evaluate(model, g, s, &y)
        }
        Body::Projection { start, len } => Ok((state, args[*start..start + len].to_vec())),
        Body::SemiPure { term: f, side } => {
            let n = f.source.len();
            match side {
                Side::Right => {
                    let (s, mut y) = evaluate(model, f, state, &args[..n])?;
                    y.extend_from_slice(&args[n..]);
                    Ok((s, y))
                }
                Side::Left => {
                    let k = args.len() - n;
                    let (s, y) = evaluate(model, f, state, &args[k..])?;
                    Ok((s, [&args[..k], &y[..]].concat()))
                }
            }
        }
    }
}

/// The lexicographically least `(state, input)` on which the equation fails.
pub fn equation_counterexample(
    model: &FiniteModel,
    f: &DecoratedTerm,
    g: &DecoratedTerm,
    flavor: Flavor,
) -> Result<Option<(usize, Vec<usize>)>> {
    if f.source != g.source || f.target != g.target {
        return Err(Error::Type(format!(
            "`{}` and `{}` are not parallel",
            f.name, g.name
        )));
    }
    let inputs = model.elements(&f.source)?;
    for s in 0..model.states {
        for x in &inputs {
            let (a, b) = (evaluate(model, f, s, x)?, evaluate(model, g, s, x)?);
            let agree = match flavor {
                Flavor::Strong => a == b,
                Flavor::Weak => a.1 == b.1,
            };
            if !agree {
                return Ok(Some((s, x.clone())));
            }
        }
    }
    Ok(None)
}

pub fn check_decorated_equation(
    model: &FiniteModel,
    f: &DecoratedTerm,
    g: &DecoratedTerm,
    flavor: Flavor,
) -> Result<bool> {
    Ok(equation_counterexample(model, f, g, flavor)?.is_none())
}
