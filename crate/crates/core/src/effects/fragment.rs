//! Finite fragments of the category of sets with a fixed state set, as
//! theories of the pointed equational logic.
//!
//! Every term is a function given by its table and named after it, so
//! equal functions are the same term and equations are reflexive only.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::engine::{Elem, Specification};
use crate::error::{Error, Result};
use crate::logic::builtin_pointed_equational_logic;

pub const STATE: &str = "S";

/// Refuses to build fragments with more terms than this.
const MAX_TERMS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteFunction {
    pub source: String,
    pub target: String,
    pub table: Vec<usize>,
}

fn digit(v: usize) -> char {
    std::char::from_digit(v as u32, 36).unwrap_or('?')
}

impl FiniteFunction {
    pub fn new(source: &str, target: &str, table: Vec<usize>) -> Self {
        FiniteFunction {
            source: source.to_string(),
            target: target.to_string(),
            table,
        }
    }

    /// `X→Y[t0t1..]`, table entries in base 36.
    pub fn name(&self) -> String {
        let t: String = self.table.iter().map(|&v| digit(v)).collect();
        format!("{}→{}[{t}]", self.source, self.target)
    }

    /// `self` then `next`.
    pub fn then(&self, next: &FiniteFunction) -> FiniteFunction {
        FiniteFunction {
            source: self.source.clone(),
            target: next.target.clone(),
            table: self.table.iter().map(|&x| next.table[x]).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fragment {
    pub spec: Arc<Specification>,
    /// Term name -> function.
    pub functions: BTreeMap<String, FiniteFunction>,
    pub sizes: BTreeMap<String, usize>,
}

fn product(x: &str) -> String {
    format!("{STATE}×{x}")
}

fn identity(x: &str, n: usize) -> FiniteFunction {
    FiniteFunction::new(x, x, (0..n).collect())
}

/// Closes `fs` under composition.
fn close(fs: &mut BTreeSet<FiniteFunction>) -> Result<()> {
    loop {
        let mut new = Vec::new();
        for f in fs.iter() {
            for g in fs.iter().filter(|g| g.source == f.target) {
                let h = f.then(g);
                if !fs.contains(&h) {
                    new.push(h);
                }
            }
        }
        if new.is_empty() {
            return Ok(());
        }
        fs.extend(new);
        if fs.len() > MAX_TERMS {
            return Err(Error::Truncated(format!(
                "the fragment exceeds {MAX_TERMS} terms"
            )));
        }
    }
}

/// The fragment generated by `generators` over the value types `values`
/// and `𝕊 = {0, .., states - 1}`, with projections, identities and the
/// lift `id_𝕊 × p` of every pure `p`. The pair `(s, x)` of `S×X` is
/// encoded as `s * |X| + x`.
pub fn set_fragment(
    states: usize,
    values: &[(&str, usize)],
    generators: &[FiniteFunction],
) -> Result<Fragment> {
    let mut sizes: BTreeMap<String, usize> = BTreeMap::from([(STATE.to_string(), states)]);
    for (x, n) in values {
        if *x == STATE {
            return Err(Error::Type(format!("`{STATE}` is reserved for the state")));
        }
        sizes.insert(x.to_string(), *n);
        sizes.insert(product(x), states * n);
    }
    for g in generators {
        let (Some(&n), Some(&m)) = (sizes.get(&g.source), sizes.get(&g.target)) else {
            return Err(Error::Type(format!(
                "`{}` mentions an unknown type",
                g.name()
            )));
        };
        if g.table.len() != n || g.table.iter().any(|&v| v >= m) {
            return Err(Error::Type(format!("`{}` is not a function", g.name())));
        }
    }
    let is_value = |x: &str| values.iter().any(|(v, _)| *v == x);

    let mut pure: BTreeSet<FiniteFunction> = generators
        .iter()
        .filter(|g| is_value(&g.source) && is_value(&g.target))
        .cloned()
        .collect();
    pure.extend(values.iter().map(|(x, n)| identity(x, *n)));
    close(&mut pure)?;

    let lift = |p: &FiniteFunction| {
        let (n, m) = (sizes[&p.source], sizes[&p.target]);
        let table = (0..states * n)
            .map(|i| (i / n) * m + p.table[i % n])
            .collect();
        FiniteFunction::new(&product(&p.source), &product(&p.target), table)
    };
    let mut all: BTreeSet<FiniteFunction> = generators.iter().cloned().collect();
    all.extend(pure.iter().cloned());
    all.extend(pure.iter().map(lift));
    all.extend(sizes.iter().map(|(x, n)| identity(x, *n)));
    let mut projections = BTreeMap::new();
    for (x, n) in values {
        let p = product(x);
        let p1 = FiniteFunction::new(&p, STATE, (0..states * n).map(|i| i / n).collect());
        let p2 = FiniteFunction::new(&p, x, (0..states * n).map(|i| i % n).collect());
        projections.insert(x.to_string(), (p1.name(), p2.name()));
        all.insert(p1);
        all.insert(p2);
    }
    close(&mut all)?;

    let mut spec = Specification::new(
        format!("Set_{STATE}"),
        builtin_pointed_equational_logic().sketch,
    );
    for x in sizes.keys() {
        spec.insert("Type", x)?;
    }
    spec.insert("St", STATE)?;
    spec.set("st", STATE, STATE)?;
    let mut functions = BTreeMap::new();
    for f in &all {
        let n = f.name();
        spec.insert("Term", &n)?;
        spec.set("dom", &n, &f.source)?;
        spec.set("codom", &n, &f.target)?;
        functions.insert(n, f.clone());
    }
    for (x, n) in &sizes {
        let id = identity(x, *n).name();
        spec.insert("Selid", x)?;
        spec.set("selid", x, &id)?;
    }
    for f in &all {
        for g in all.iter().filter(|g| g.source == f.target) {
            let k = format!("{}∘{}", g.name(), f.name());
            spec.insert("Comp", &k)?;
            spec.set_action("i", Elem::atom(&k), Elem::Tuple(vec![f.name(), g.name()]))?;
            spec.set("comp", &k, &f.then(g).name())?;
        }
        let e = format!("{0}≡{0}", f.name());
        spec.insert("Eq", &e)?;
        spec.set("lhs", &e, &f.name())?;
        spec.set("rhs", &e, &f.name())?;
    }
    for (x, (p1, p2)) in &projections {
        let p = product(x);
        spec.insert("Val", x)?;
        spec.set("vt", x, x)?;
        spec.insert("SProd", &p)?;
        spec.set("sst", &p, STATE)?;
        spec.set("pst", &p, p1)?;
        spec.set("pval", &p, p2)?;
    }
    for p in &pure {
        let l = product(&p.name());
        spec.insert("Lift", &l)?;
        spec.set("lbase", &l, &p.name())?;
        spec.set("llift", &l, &lift(p).name())?;
        spec.set("lsrc", &l, &product(&p.source))?;
        spec.set("ltgt", &l, &product(&p.target))?;
    }
    Ok(Fragment {
        spec: Arc::new(spec.checked()?),
        functions,
        sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{near, reread};

    #[test]
    fn fragment_is_closed_and_valid() {
        let not = FiniteFunction::new("X", "X", vec![1, 0]);
        let f = set_fragment(2, &[("X", 2)], std::slice::from_ref(&not)).unwrap();
        assert!(f.spec.has_atom("Term", &not.name()));
        assert!(f.spec.has_atom("Lift", &product(&not.name())));
        assert!(f.spec.has_atom("Term", "S×X→S×X[1032]"));
        assert_eq!(f.spec.atoms("SProd").count(), 1);
    }

    #[test]
    fn reread_finds_pure_terms_and_modifiers() {
        let flip_state = FiniteFunction::new("S×X", "S×X", vec![2, 3, 0, 1]);
        let f = set_fragment(2, &[("X", 2)], std::slice::from_ref(&flip_state)).unwrap();
        let u = reread(&near(), &f.spec).unwrap();
        assert!(u.has_atom("TermM", &flip_state.name()));
        assert!(u.has_atom("TermP", "X→X[01]"));
        assert!(!u.has_atom("TermP", &flip_state.name()));
    }

    #[test]
    fn the_state_name_is_reserved() {
        assert!(set_fragment(2, &[("S", 2)], &[]).is_err());
    }
}
