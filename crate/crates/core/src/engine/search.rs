//! Backtracking search for specification morphisms.
//!
//! Variables are the stored source elements, grouped by point in the
//! sketch's search order and by name within a point; candidates are target
//! elements in name order. Arrow actions propagate
//! forced images, so enumeration stays lexicographic in the variable order.

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;
use std::sync::Arc;

use super::{Elem, SpecMorphism, Specification};

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    /// Maximum number of morphisms to return.
    pub limit: Option<usize>,
    /// Pre-assigned images: point -> (source element -> target element).
    pub bindings: BTreeMap<String, BTreeMap<String, String>>,
    pub injective: bool,
}

struct Constraint {
    table: usize,
    source_vars: Vec<usize>,
    target_vars: Vec<usize>,
}

/// The action of a target arrow on candidate indices, componentwise for
/// elements of derived apexes.
#[derive(Debug)]
enum Table {
    /// Sources at a stored point, indexed directly.
    Direct(Vec<Option<Vec<usize>>>),
    Keyed(HashMap<Vec<usize>, Vec<usize>>),
}

impl Table {
    fn get(&self, key: &[usize]) -> Option<&Vec<usize>> {
        match self {
            Table::Direct(rows) => rows.get(key[0])?.as_ref(),
            Table::Keyed(map) => map.get(key),
        }
    }

    fn entries(&self) -> Vec<(Vec<usize>, &Vec<usize>)> {
        match self {
            Table::Direct(rows) => rows
                .iter()
                .enumerate()
                .filter_map(|(i, r)| r.as_ref().map(|r| (vec![i], r)))
                .collect(),
            Table::Keyed(map) => map.iter().map(|(k, v)| (k.clone(), v)).collect(),
        }
    }
}

#[derive(Debug)]
struct PointIndex {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

/// Candidate lists and integer action tables of a search target, built once
/// per specification.
/// Per target component, the sorted sources mapping to each index.
type Preimages = Vec<HashMap<usize, Vec<usize>>>;

#[derive(Debug)]
pub(crate) struct SearchIndex {
    point_ids: HashMap<String, usize>,
    points: Vec<PointIndex>,
    arrow_ids: HashMap<String, usize>,
    tables: Vec<Table>,
    /// For arrows out of stored points: target component -> value -> sources, ascending.
    preimages: Vec<Option<Preimages>>,
}

impl SearchIndex {
    pub(crate) fn new(dst: &Specification) -> Self {
        let sk = dst.sketch();
        let mut point_ids = HashMap::new();
        let mut points = Vec::new();
        for p in sk.stored_points() {
            let names: Vec<String> = dst.atoms(p).map(str::to_string).collect();
            let index = names
                .iter()
                .enumerate()
                .map(|(i, c)| (c.clone(), i))
                .collect();
            point_ids.insert(p.to_string(), points.len());
            points.push(PointIndex { names, index });
        }
        let components = |point: &str| -> Vec<usize> {
            match sk.derived_cone(point) {
                Some(cone) => sk
                    .cone_base(cone)
                    .iter()
                    .map(|b| point_ids[b.as_str()])
                    .collect(),
                None => vec![point_ids[point]],
            }
        };
        let encode = |ps: &[usize], e: &Elem| -> Option<Vec<usize>> {
            match e {
                Elem::Atom(a) => points[ps[0]].index.get(a).map(|&i| vec![i]),
                Elem::Tuple(t) => t
                    .iter()
                    .zip(ps)
                    .map(|(x, &p)| points[p].index.get(x).copied())
                    .collect(),
            }
        };
        let mut arrow_ids = HashMap::new();
        let mut tables = Vec::new();
        let mut preimages = Vec::new();
        for a in sk.stored_arrows() {
            let (from, to) = (components(&a.source), components(&a.target));
            let mut table = if from.len() == 1 {
                Table::Direct(vec![None; points[from[0]].names.len()])
            } else {
                Table::Keyed(HashMap::new())
            };
            for x in dst.elements(&a.source) {
                let image = dst.apply(&a.name, &x).and_then(|y| encode(&to, &y));
                if let (Some(k), Some(v)) = (encode(&from, &x), image) {
                    match &mut table {
                        Table::Direct(rows) => rows[k[0]] = Some(v),
                        Table::Keyed(map) => {
                            map.insert(k, v);
                        }
                    }
                }
            }
            let preimage = (from.len() == 1).then(|| {
                let mut by_component: Vec<HashMap<usize, Vec<usize>>> =
                    vec![HashMap::new(); to.len()];
                let mut entries = table.entries();
                entries.sort();
                for (k, v) in entries {
                    for (j, y) in v.iter().enumerate() {
                        by_component[j].entry(*y).or_default().push(k[0]);
                    }
                }
                by_component
            });
            arrow_ids.insert(a.name.clone(), tables.len());
            tables.push(table);
            preimages.push(preimage);
        }
        SearchIndex {
            point_ids,
            points,
            arrow_ids,
            tables,
            preimages,
        }
    }
}

struct Search {
    vars: Vec<(String, String)>,
    index: Arc<SearchIndex>,
    /// Index point of each variable.
    point_of_var: Vec<usize>,
    constraints: Vec<Constraint>,
    by_var: Vec<Vec<usize>>,
    assignment: Vec<Option<usize>>,
    used: Vec<HashMap<usize, usize>>,
    trail: Vec<usize>,
    injective: bool,
}

impl Search {
    fn new(src: &Specification, dst: &Specification, injective: bool) -> Self {
        let sk = src.sketch();
        let index = dst.search_index();
        let mut vars = Vec::new();
        let mut var_index: HashMap<(String, String), usize> = HashMap::new();
        let mut point_of_var = Vec::new();
        for p in sk.search_order() {
            for x in src.atoms(p) {
                var_index.insert((p.to_string(), x.to_string()), vars.len());
                vars.push((p.to_string(), x.to_string()));
                point_of_var.push(index.point_ids[p]);
            }
        }
        let vars_of = |point: &str, e: &Elem| -> Vec<usize> {
            match e {
                Elem::Atom(a) => vec![var_index[&(point.to_string(), a.clone())]],
                Elem::Tuple(t) => {
                    let base = sk.cone_base(sk.derived_cone(point).expect("derived"));
                    t.iter()
                        .zip(&base)
                        .map(|(x, b)| var_index[&(b.clone(), x.clone())])
                        .collect()
                }
            }
        };
        let mut constraints = Vec::new();
        for a in sk.stored_arrows() {
            for x in src.elements(&a.source) {
                let Some(t) = src.apply(&a.name, &x) else {
                    continue;
                };
                constraints.push(Constraint {
                    table: index.arrow_ids[&a.name],
                    source_vars: vars_of(&a.source, &x),
                    target_vars: vars_of(&a.target, &t),
                });
            }
        }
        let mut by_var = vec![Vec::new(); vars.len()];
        for (ci, c) in constraints.iter().enumerate() {
            for &v in c.source_vars.iter().chain(&c.target_vars) {
                if !by_var[v].contains(&ci) {
                    by_var[v].push(ci);
                }
            }
        }
        let n = vars.len();
        Search {
            vars,
            used: vec![HashMap::new(); index.points.len()],
            index,
            point_of_var,
            constraints,
            by_var,
            assignment: vec![None; n],
            trail: Vec::new(),
            injective,
        }
    }

    fn candidates(&self, v: usize) -> &PointIndex {
        &self.index.points[self.point_of_var[v]]
    }

    fn name(&self, v: usize) -> Option<&str> {
        self.assignment[v].map(|i| self.candidates(v).names[i].as_str())
    }

    fn assign(&mut self, v: usize, value: usize) -> bool {
        if let Some(cur) = self.assignment[v] {
            return cur == value;
        }
        if self.injective {
            let p = self.point_of_var[v];
            if self.used[p].contains_key(&value) {
                return false;
            }
            self.used[p].insert(value, v);
        }
        self.assignment[v] = Some(value);
        self.trail.push(v);
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail");
            if self.injective {
                let p = self.point_of_var[v];
                self.used[p].remove(&self.assignment[v].expect("assigned"));
            }
            self.assignment[v] = None;
        }
    }

    /// Assigns and propagates; false on conflict.
    fn assign_and_propagate(&mut self, v: usize, value: usize) -> bool {
        if !self.assign(v, value) {
            return false;
        }
        let index = self.index.clone();
        let mut queue = vec![v];
        let mut key = Vec::new();
        while let Some(v) = queue.pop() {
            for i in 0..self.by_var[v].len() {
                let c = &self.constraints[self.by_var[v][i]];
                key.clear();
                if !c.source_vars.iter().all(|&sv| match self.assignment[sv] {
                    Some(x) => {
                        key.push(x);
                        true
                    }
                    None => false,
                }) {
                    continue;
                }
                let Some(forced) = index.tables[c.table].get(&key) else {
                    return false;
                };
                for (j, &idx) in forced.iter().enumerate() {
                    let tv = self.constraints[self.by_var[v][i]].target_vars[j];
                    match self.assignment[tv] {
                        Some(cur) if cur != idx => return false,
                        Some(_) => {}
                        None => {
                            if !self.assign(tv, idx) {
                                return false;
                            }
                            queue.push(tv);
                        }
                    }
                }
            }
        }
        true
    }

    /// The smallest preimage list constraining `v` through an assigned target.
    fn restriction<'i>(&self, index: &'i SearchIndex, v: usize) -> Option<&'i [usize]> {
        let mut best: Option<&[usize]> = None;
        for &ci in &self.by_var[v] {
            let c = &self.constraints[ci];
            if c.source_vars != [v] {
                continue;
            }
            let Some(by_component) = &index.preimages[c.table] else {
                continue;
            };
            for (j, &tv) in c.target_vars.iter().enumerate() {
                let Some(y) = self.assignment[tv] else {
                    continue;
                };
                let list = by_component[j].get(&y).map_or(&[][..], Vec::as_slice);
                if best.is_none_or(|b| list.len() < b.len()) {
                    best = Some(list);
                }
            }
        }
        best
    }

    fn run<F>(&mut self, from: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&Search) -> ControlFlow<()>,
    {
        let Some(v) = (from..self.vars.len()).find(|&v| self.assignment[v].is_none()) else {
            return visit(self);
        };
        let index = self.index.clone();
        let all: Vec<usize>;
        let values: &[usize] = match self.restriction(&index, v) {
            Some(vs) => vs,
            None => {
                all = (0..self.candidates(v).names.len()).collect();
                &all
            }
        };
        for &value in values {
            let mark = self.trail.len();
            if self.assign_and_propagate(v, value) {
                self.run(v + 1, visit)?;
            }
            self.undo(mark);
        }
        ControlFlow::Continue(())
    }
}

/// Visits every morphism `src -> dst` in the deterministic order; the
/// callback receives per-point maps.
pub fn for_each_homomorphism<F>(
    src: &Specification,
    dst: &Specification,
    options: &SearchOptions,
    mut visit: F,
) where
    F: FnMut(BTreeMap<String, BTreeMap<String, String>>) -> ControlFlow<()>,
{
    if src.sketch().name != dst.sketch().name {
        return;
    }
    let mut search = Search::new(src, dst, options.injective);
    for (point, binds) in &options.bindings {
        for (x, y) in binds {
            let Some(v) = search.vars.iter().position(|(p, n)| p == point && n == x) else {
                return;
            };
            let Some(&idx) = search.candidates(v).index.get(y) else {
                return;
            };
            if !search.assign_and_propagate(v, idx) {
                return;
            }
        }
    }
    let points: Vec<String> = src.carriers().keys().cloned().collect();
    let _ = search.run(0, &mut |search| {
        let mut maps: BTreeMap<String, BTreeMap<String, String>> = points
            .iter()
            .map(|p| (p.clone(), BTreeMap::new()))
            .collect();
        for (v, (p, x)) in search.vars.iter().enumerate() {
            let y = search.name(v).expect("complete").to_string();
            maps.get_mut(p).expect("point").insert(x.clone(), y);
        }
        visit(maps)
    });
}

/// All (or the first `limit`) morphisms `src -> dst`, in the deterministic order.
pub fn find_homomorphisms(
    src: &Arc<Specification>,
    dst: &Arc<Specification>,
    limit: Option<usize>,
) -> Vec<SpecMorphism> {
    find_homomorphisms_with(
        src,
        dst,
        &SearchOptions {
            limit,
            ..Default::default()
        },
    )
}

pub fn find_homomorphisms_with(
    src: &Arc<Specification>,
    dst: &Arc<Specification>,
    options: &SearchOptions,
) -> Vec<SpecMorphism> {
    let mut out = Vec::new();
    if options.limit == Some(0) {
        return out;
    }
    for_each_homomorphism(src, dst, options, |maps| {
        out.push(SpecMorphism::new(src.clone(), dst.clone(), maps));
        if options.limit.is_some_and(|l| out.len() >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

pub fn count_homomorphisms(
    src: &Specification,
    dst: &Specification,
    options: &SearchOptions,
) -> usize {
    let mut n = 0;
    for_each_homomorphism(src, dst, options, |_| {
        n += 1;
        ControlFlow::Continue(())
    });
    n
}

/// A mutually inverse pair of morphisms, if the two specifications are isomorphic.
pub fn specs_isomorphic(
    a: &Arc<Specification>,
    b: &Arc<Specification>,
) -> Option<(SpecMorphism, SpecMorphism)> {
    isomorphism_with(a, b, &BTreeMap::new())
}

/// An isomorphism extending the given bindings.
pub fn isomorphism_with(
    a: &Arc<Specification>,
    b: &Arc<Specification>,
    bindings: &BTreeMap<String, BTreeMap<String, String>>,
) -> Option<(SpecMorphism, SpecMorphism)> {
    if a.sketch().name != b.sketch().name {
        return None;
    }
    for (p, c) in a.carriers() {
        if b.carriers().get(p).map_or(0, |d| d.len()) != c.len() {
            return None;
        }
    }
    let options = SearchOptions {
        limit: Some(1),
        bindings: bindings.clone(),
        injective: true,
    };
    let forward = find_homomorphisms_with(a, b, &options).into_iter().next()?;
    let maps = forward
        .maps
        .iter()
        .map(|(p, m)| {
            (
                p.clone(),
                m.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
            )
        })
        .collect();
    let backward = SpecMorphism::new(b.clone(), a.clone(), maps);
    debug_assert!(backward.validate().is_empty());
    Some((forward, backward))
}
