use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::{Elem, SpecMorphism, Specification};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Side {
    Left,
    Right,
}

/// Apex element name -> the leg elements it identifies.
pub type Provenance = BTreeMap<String, BTreeMap<String, Vec<(Side, String)>>>;

#[derive(Debug, Clone)]
pub struct PushoutResult {
    pub apex: Arc<Specification>,
    /// Injection of the first leg's target.
    pub left: SpecMorphism,
    /// Injection of the second leg's target.
    pub right: SpecMorphism,
    pub provenance: Provenance,
}

impl PushoutResult {
    /// Classes at `point`, keyed by apex element name.
    pub fn classes(&self, point: &str) -> impl Iterator<Item = (&String, &Vec<(Side, String)>)> {
        self.provenance.get(point).into_iter().flatten()
    }
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let n = self.0[c];
            self.0[c] = r;
            c = n;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    One(usize),
    Many(Vec<usize>),
}

/// Shortlex order on names: shorter first, then lexicographic.
pub(crate) fn shortlex(a: &str, b: &str) -> std::cmp::Ordering {
    a.chars()
        .count()
        .cmp(&b.chars().count())
        .then_with(|| a.cmp(b))
}

/// Pushout of a span `B <-f- A -g-> C`, computed pointwise on stored points and
/// closed under the congruence generated by the arrow actions.
///
/// Each class is named after its shortlex-least member from `C` when it has
/// one, otherwise its shortlex-least member; clashes get a `#k` suffix. Names
/// of `C` therefore survive unless the pushout identifies them.
pub fn pushout(f: &SpecMorphism, g: &SpecMorphism) -> Result<PushoutResult> {
    let (a, b, c) = (&f.source, &f.target, &g.target);
    if a.sketch().name != g.source.sketch().name
        || a.sketch().name != b.sketch().name
        || a.sketch().name != c.sketch().name
    {
        return Err(Error::SketchMismatch(
            b.sketch().name.clone(),
            c.sketch().name.clone(),
        ));
    }
    let sk = a.sketch().clone();

    let mut nodes: Vec<(String, Side, String)> = Vec::new();
    let mut index: HashMap<(String, Side, String), usize> = HashMap::new();
    for (side, spec) in [(Side::Left, b), (Side::Right, c)] {
        for (p, carrier) in spec.carriers() {
            for x in carrier {
                index.insert((p.clone(), side, x.clone()), nodes.len());
                nodes.push((p.clone(), side, x.clone()));
            }
        }
    }
    let node = |p: &str, side: Side, x: &str| -> Result<usize> {
        index
            .get(&(p.to_string(), side, x.to_string()))
            .copied()
            .ok_or_else(|| Error::Pushout(format!("`{x}` is not an element of `{p}`")))
    };
    let mut uf = UnionFind::new(nodes.len());
    for (p, carrier) in a.carriers() {
        for x in carrier {
            let fx = f
                .map_atom(p, x)
                .ok_or_else(|| Error::Pushout(format!("first leg undefined on `{x}`")))?;
            let gx = g
                .map_atom(p, x)
                .ok_or_else(|| Error::Pushout(format!("second leg undefined on `{x}`")))?;
            uf.union(node(p, Side::Left, fx)?, node(p, Side::Right, gx)?);
        }
    }

    let key_of = |uf: &mut UnionFind, point: &str, side: Side, e: &Elem| -> Result<Key> {
        Ok(match e {
            Elem::Atom(x) => Key::One(uf.find(node(point, side, x)?)),
            Elem::Tuple(t) => {
                let base = sk.cone_base(sk.derived_cone(point).expect("derived"));
                let mut ids = Vec::new();
                for (x, bp) in t.iter().zip(&base) {
                    ids.push(uf.find(node(bp, side, x)?));
                }
                Key::Many(ids)
            }
        })
    };

    // Congruence closure: equal sources must have equal images.
    loop {
        let mut changed = false;
        for arrow in sk.stored_arrows() {
            let mut seen: HashMap<Key, Key> = HashMap::new();
            for (side, spec) in [(Side::Left, b), (Side::Right, c)] {
                for x in spec.elements(&arrow.source) {
                    let y = spec.apply(&arrow.name, &x).ok_or_else(|| {
                        Error::Pushout(format!("`{}` undefined on `{x}`", arrow.name))
                    })?;
                    let kx = key_of(&mut uf, &arrow.source, side, &x)?;
                    let ky = key_of(&mut uf, &arrow.target, side, &y)?;
                    match seen.get(&kx) {
                        None => {
                            seen.insert(kx, ky);
                        }
                        Some(prev) if *prev == ky => {}
                        Some(prev) => match (prev.clone(), ky) {
                            (Key::One(u), Key::One(v)) => changed |= uf.union(u, v),
                            (Key::Many(us), Key::Many(vs)) => {
                                for (u, v) in us.into_iter().zip(vs) {
                                    changed |= uf.union(u, v);
                                }
                            }
                            _ => return Err(Error::Pushout("mixed element shapes".into())),
                        },
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Name the classes.
    let mut classes: BTreeMap<(String, usize), Vec<usize>> = BTreeMap::new();
    for (n, node) in nodes.iter().enumerate() {
        let root = uf.find(n);
        classes.entry((node.0.clone(), root)).or_default().push(n);
    }
    let mut per_point: BTreeMap<String, Vec<(String, Vec<usize>)>> = BTreeMap::new();
    for ((p, _), mut members) in classes {
        members.sort_by(|&x, &y| {
            (nodes[x].1 == Side::Left)
                .cmp(&(nodes[y].1 == Side::Left))
                .then(shortlex(&nodes[x].2, &nodes[y].2))
        });
        let base = nodes[members[0]].2.clone();
        per_point.entry(p).or_default().push((base, members));
    }
    let mut name_of_node: Vec<String> = vec![String::new(); nodes.len()];
    let mut apex = Specification::new(format!("{}+{}", b.name, c.name), sk.clone());
    let mut provenance: Provenance = BTreeMap::new();
    for (p, mut list) in per_point {
        // Classes holding second-leg elements claim their names first.
        list.sort_by(|(n1, m1), (n2, m2)| {
            let left_only = |m: &Vec<usize>| nodes[m[0]].1 == Side::Left;
            left_only(m1)
                .cmp(&left_only(m2))
                .then(shortlex(n1, n2))
                .then_with(|| {
                    let k1: Vec<_> = m1.iter().map(|&i| (&nodes[i].2, nodes[i].1)).collect();
                    let k2: Vec<_> = m2.iter().map(|&i| (&nodes[i].2, nodes[i].1)).collect();
                    k1.cmp(&k2)
                })
        });
        let mut taken: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
        let point_prov = provenance.entry(p.clone()).or_default();
        for (base, members) in list {
            let mut name = base.clone();
            let mut k = 1;
            while taken.contains(&name) {
                name = format!("{base}#{k}");
                k += 1;
            }
            taken.insert(name.clone());
            apex.insert(&p, name.clone())?;
            for &m in &members {
                name_of_node[m] = name.clone();
            }
            let mut origin: Vec<(Side, String)> = members
                .iter()
                .map(|&m| (nodes[m].1, nodes[m].2.clone()))
                .collect();
            origin.sort();
            point_prov.insert(name, origin);
        }
    }

    let rename = |point: &str, side: Side, e: &Elem| -> Result<Elem> {
        Ok(match e {
            Elem::Atom(x) => Elem::atom(name_of_node[node(point, side, x)?].clone()),
            Elem::Tuple(t) => {
                let base = sk.cone_base(sk.derived_cone(point).expect("derived"));
                let mut out = Vec::new();
                for (x, bp) in t.iter().zip(&base) {
                    out.push(name_of_node[node(bp, side, x)?].clone());
                }
                Elem::Tuple(out)
            }
        })
    };
    for arrow in sk.stored_arrows() {
        for (side, spec) in [(Side::Left, b), (Side::Right, c)] {
            for x in spec.elements(&arrow.source) {
                let y = spec.apply(&arrow.name, &x).expect("checked above");
                apex.set_action(
                    &arrow.name,
                    rename(&arrow.source, side, &x)?,
                    rename(&arrow.target, side, &y)?,
                )?;
            }
        }
    }

    // Actions are functional by the congruence and equations transfer to the
    // quotient; only stored cones can fail.
    let diagnostics = apex.validate_stored_cones();
    if !diagnostics.is_empty() {
        return Err(Error::Pushout(
            diagnostics
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    let apex = Arc::new(apex);
    let injection = |side: Side, spec: &Arc<Specification>| -> SpecMorphism {
        let maps = spec
            .carriers()
            .iter()
            .map(|(p, carrier)| {
                let m = carrier
                    .iter()
                    .map(|x| {
                        (
                            x.clone(),
                            name_of_node[index[&(p.clone(), side, x.clone())]].clone(),
                        )
                    })
                    .collect();
                (p.clone(), m)
            })
            .collect();
        SpecMorphism::new(spec.clone(), apex.clone(), maps)
    };
    Ok(PushoutResult {
        left: injection(Side::Left, b),
        right: injection(Side::Right, c),
        apex,
        provenance,
    })
}

/// Colimit of several specifications glued along a common interface, by
/// iterated binary pushout.
pub fn amalgamate(
    specs: &[Arc<Specification>],
    sharing: &[SpecMorphism],
) -> Result<Arc<Specification>> {
    if specs.is_empty() {
        return Err(Error::Pushout("nothing to amalgamate".into()));
    }
    if specs.len() != sharing.len() && !sharing.is_empty() {
        return Err(Error::Pushout(
            "one sharing leg is needed per specification".into(),
        ));
    }
    if sharing.is_empty() {
        // Plain coproduct: glue along the empty interface.
        let empty = Arc::new(Specification::new("∅", specs[0].sketch().clone()));
        let legs: Vec<SpecMorphism> = specs
            .iter()
            .map(|s| SpecMorphism::new(empty.clone(), s.clone(), BTreeMap::new()))
            .collect();
        return amalgamate(specs, &legs);
    }
    let interface = sharing[0].source.clone();
    for (leg, spec) in sharing.iter().zip(specs) {
        if !Arc::ptr_eq(&leg.source, &interface) && *leg.source != *interface {
            return Err(Error::Pushout(
                "legs must share the interface as source".into(),
            ));
        }
        if *leg.target != **spec {
            return Err(Error::Pushout(
                "leg target differs from its specification".into(),
            ));
        }
    }
    let mut acc = specs[0].clone();
    let mut acc_leg = sharing[0].clone();
    for leg in &sharing[1..] {
        let po = pushout(&acc_leg, leg)?;
        acc_leg = acc_leg.then(&po.left);
        acc = po.apex.clone();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::LimitSketch;

    fn single() -> Arc<LimitSketch> {
        Arc::new(LimitSketch::new("One").point("P"))
    }

    fn set(names: &[&str]) -> Arc<Specification> {
        let mut s = Specification::new(names.join(""), single());
        for n in names {
            s.insert("P", *n).unwrap();
        }
        Arc::new(s)
    }

    fn map(
        src: &Arc<Specification>,
        dst: &Arc<Specification>,
        pairs: &[(&str, &str)],
    ) -> SpecMorphism {
        let m = pairs
            .iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        SpecMorphism::new(src.clone(), dst.clone(), [("P".to_string(), m)].into())
    }

    #[test]
    fn quotient_of_disjoint_union() {
        let a = set(&["a"]);
        let b = set(&["b1", "b2"]);
        let c = set(&["c"]);
        let po = pushout(&map(&a, &b, &[("a", "b1")]), &map(&a, &c, &[("a", "c")])).unwrap();
        let names: Vec<&str> = po.apex.atoms("P").collect();
        assert_eq!(names, vec!["b2", "c"]);
        let classes = &po.provenance["P"];
        assert_eq!(
            classes["c"],
            vec![(Side::Left, "b1".into()), (Side::Right, "c".into())]
        );
        assert_eq!(classes["b2"], vec![(Side::Left, "b2".into())]);
    }

    #[test]
    fn collisions_get_suffixes() {
        let a = set(&[]);
        let b = set(&["x"]);
        let po = pushout(&map(&a, &b, &[]), &map(&a, &b, &[])).unwrap();
        let names: Vec<&str> = po.apex.atoms("P").collect();
        assert_eq!(names, vec!["x", "x#1"]);
        assert_eq!(po.left.map_atom("P", "x"), Some("x#1"));
        assert_eq!(po.right.map_atom("P", "x"), Some("x"));
    }

    #[test]
    fn congruence_merges_images() {
        let sk = Arc::new(
            LimitSketch::new("G")
                .point("V")
                .point("E")
                .arrow("s", "E", "V"),
        );
        let mut a = Specification::new("A", sk.clone());
        a.insert("E", "e").unwrap();
        a.insert("E", "e2").unwrap();
        a.insert("V", "u").unwrap();
        a.insert("V", "v").unwrap();
        a.set("s", "e", "u").unwrap();
        a.set("s", "e2", "v").unwrap();
        let a = Arc::new(a);
        let mut quotient = Specification::new("Q", sk.clone());
        quotient.insert("E", "e").unwrap();
        quotient.insert("V", "u").unwrap();
        quotient.set("s", "e", "u").unwrap();
        let quotient = Arc::new(quotient);
        let mut b = Specification::new("B", sk.clone());
        b.insert("E", "e").unwrap();
        b.insert("E", "e2").unwrap();
        b.insert("V", "u").unwrap();
        b.insert("V", "v").unwrap();
        b.set("s", "e", "u").unwrap();
        b.set("s", "e2", "v").unwrap();
        let b = Arc::new(b);
        let merge = SpecMorphism::new(
            a.clone(),
            quotient,
            [
                (
                    "E".to_string(),
                    [("e".into(), "e".into()), ("e2".into(), "e".into())].into(),
                ),
                (
                    "V".to_string(),
                    [("u".into(), "u".into()), ("v".into(), "u".into())].into(),
                ),
            ]
            .into(),
        );
        let id = SpecMorphism::identity(a.clone());
        let _ = b;
        let po = pushout(&merge, &id).unwrap();
        assert_eq!(po.apex.size(), 2);
    }
}
