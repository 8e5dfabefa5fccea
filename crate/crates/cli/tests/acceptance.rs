//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use diaglog::effects::{
    check_decorated_equation, evaluate, semi_pure_diagram, sequential_product, set_fragment,
    DecoratedTerm, FiniteFunction, FiniteModel, Flavor, Side,
};
use diaglog::engine::{
    count_homomorphisms, find_homomorphisms, pushout, saturate, specs_isomorphic, term_depth, Elem,
    SaturationConfig, SaturationStatus, SearchOptions, SpecMorphism, Specification,
};
use diaglog::fraction::{check_entailment, Verdict};
use diaglog::logic::{
    builtin_decorated_logic, builtin_equational_logic, builtin_modus_ponens_logic,
    category_of_elements, model_transpose, model_transpose_inverse, near, reread, translate,
    FunctorData,
};
use diaglog::sketch::LimitSketch;
use diaglog::syntax::{parse_document, Env};

const SEED: u64 = 0x5eed;

const LIMIT_MP: Duration = Duration::from_secs(1);
const LIMIT_PUSHOUT: Duration = Duration::from_secs(30);
const LIMIT_SATURATION: Duration = Duration::from_secs(60);
const LIMIT_SEQPROD: Duration = Duration::from_secs(60);
const LIMIT_TRANSPOSE: Duration = Duration::from_secs(120);

const PUSHOUT_CASES: usize = 200;
const SATURATION_CASES: usize = 100;
const SATURATION_DEPTH: usize = 3;
const ENTAILMENT_RUNS: usize = 5;
const SEQPROD_PAIRS: usize = 50;
const TRANSPOSE_PAIRS: usize = 20;
const FUNCTORS: usize = 50;

type Maps = BTreeMap<String, BTreeMap<String, String>>;

struct Check {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Check {
    Check {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Check {
    Check {
        ok: false,
        detail: detail.into(),
    }
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn diaglog(args: &[&str]) -> diaglog_cli::RunOutput {
    diaglog_cli::run(std::iter::once("diaglog").chain(args.iter().copied()))
}

fn within(elapsed: Duration, limit: Duration, v: Check) -> Check {
    if v.ok && elapsed >= limit {
        fail(format!("{} but took longer than {limit:?}", v.detail))
    } else {
        v
    }
}

fn modus_ponens_demo() -> Check {
    let start = Instant::now();
    let out = diaglog(&["demo", "mp"]);
    let elapsed = start.elapsed();
    let lines: Vec<&str> = out.stdout.lines().collect();
    let expect = [
        "  H  = {A, A⇒B}",
        "  C  = {C}",
        "  tau: H -> H' inclusion",
        "  s: C -> H' C ↦ A⇒B, ⊢C ↦ ⊢A⇒B",
        "start: provable {A, A⇒B}",
        "result: provable {A, A⇒B, B}",
        "B provable: yes",
        "tau is an entailment: confirmed",
    ];
    if out.code != 0 {
        return fail(format!("exit code {}", out.code));
    }
    if let Some(missing) = expect.iter().find(|l| !lines.contains(l)) {
        return fail(format!("missing line `{missing}`"));
    }
    if out.stdout != golden("demo_mp.txt") {
        return fail("output differs from demo_mp.txt");
    }
    within(
        elapsed,
        LIMIT_MP,
        pass("B derived, tau inclusion, s maps C to A⇒B"),
    )
}

fn random_sketch(rng: &mut ChaCha8Rng, id: usize) -> Arc<LimitSketch> {
    let points: Vec<String> = (0..rng.gen_range(3..=4)).map(|i| format!("P{i}")).collect();
    let mut sketch = LimitSketch::new(format!("G{id}"));
    for p in &points {
        sketch = sketch.point(p);
    }
    let mut arrows = Vec::new();
    for i in 0..rng.gen_range(2..=4) {
        let (s, t) = (points.choose(rng).unwrap(), points.choose(rng).unwrap());
        let name = format!("a{i}");
        sketch = sketch.arrow(&name, s, t);
        arrows.push((name, s.clone(), t.clone()));
    }
    let pair = arrows
        .iter()
        .flat_map(|f| arrows.iter().map(move |g| (f, g)))
        .find(|(f, g)| f.2 == g.1);
    if let (Some((f, g)), true) = (pair, rng.gen_bool(0.5)) {
        sketch = sketch.arrow("h", &f.1, &g.2).composite("h", &f.0, &g.0);
    }
    assert!(sketch.validate().is_empty(), "random sketch is invalid");
    Arc::new(sketch)
}

fn random_realization(
    rng: &mut ChaCha8Rng,
    sketch: &Arc<LimitSketch>,
    name: &str,
) -> Arc<Specification> {
    let points: Vec<String> = sketch
        .stored_points()
        .into_iter()
        .map(str::to_string)
        .collect();
    let mut sizes: BTreeMap<String, usize> = points
        .iter()
        .map(|p| (p.clone(), rng.gen_range(0..=4)))
        .collect();
    loop {
        let mut changed = false;
        for a in sketch.stored_arrows() {
            if sizes[&a.source] > 0 && sizes[&a.target] == 0 {
                sizes.insert(a.target.clone(), rng.gen_range(1..=4));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut spec = Specification::new(name, sketch.clone());
    for (p, n) in &sizes {
        for i in 0..*n {
            spec.insert(p, format!("{}{i}", p.to_lowercase())).unwrap();
        }
    }
    for a in sketch.stored_arrows() {
        for i in 0..sizes[&a.source] {
            let j = rng.gen_range(0..sizes[&a.target]);
            spec.set(
                &a.name,
                &format!("{}{i}", a.source.to_lowercase()),
                &format!("{}{j}", a.target.to_lowercase()),
            )
            .unwrap();
        }
    }
    Arc::new(spec.checked().expect("random realization is valid"))
}

fn random_hom(
    rng: &mut ChaCha8Rng,
    src: &Arc<Specification>,
    dst: &Arc<Specification>,
) -> Option<SpecMorphism> {
    let all = find_homomorphisms(src, dst, Some(256));
    all.choose(rng).cloned()
}

fn uncovered(apex: &Specification, injections: [&SpecMorphism; 2]) -> Option<String> {
    for (p, carrier) in apex.carriers() {
        for y in carrier {
            let hit = injections
                .iter()
                .any(|m| m.maps.get(p).is_some_and(|m| m.values().any(|z| z == y)));
            if !hit {
                return Some(format!("{p} {y}"));
            }
        }
    }
    None
}

/// Bindings for the mediating morphism, or `None` when two elements glued by
/// the pushout have different images in the cocone.
fn mediating_bindings(legs: [(&SpecMorphism, &SpecMorphism); 2]) -> Option<Maps> {
    let mut out: Maps = BTreeMap::new();
    for (inj, leg) in legs {
        for (p, m) in &inj.maps {
            for (x, y) in m {
                let z = leg.map_atom(p, x)?;
                let slot = out.entry(p.clone()).or_default();
                if slot.get(y).is_some_and(|prev| prev != z) {
                    return None;
                }
                slot.insert(y.clone(), z.to_string());
            }
        }
    }
    Some(out)
}

fn pushout_universal_property() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut cases, mut cocones, mut failures) = (0, 0, Vec::new());
    let mut id = 0;
    while cases < PUSHOUT_CASES {
        id += 1;
        let sketch = random_sketch(&mut rng, id);
        let a = random_realization(&mut rng, &sketch, "A");
        let b = random_realization(&mut rng, &sketch, "B");
        let c = random_realization(&mut rng, &sketch, "C");
        let (Some(f), Some(g)) = (random_hom(&mut rng, &a, &b), random_hom(&mut rng, &a, &c))
        else {
            continue;
        };
        let po = match pushout(&f, &g) {
            Ok(po) => po,
            Err(e) => {
                failures.push(format!("case {id}: {e}"));
                cases += 1;
                continue;
            }
        };
        if !po.apex.validate().is_empty() || !f.then(&po.left).same_maps(&g.then(&po.right)) {
            failures.push(format!(
                "case {id}: the pushout square is not a commuting square of models"
            ));
        }
        // Jointly surjective injections allow at most one mediating morphism.
        if let Some(orphan) = uncovered(&po.apex, [&po.left, &po.right]) {
            failures.push(format!(
                "case {id}: {orphan} is not in the image of either injection"
            ));
        }
        for _ in 0..3 {
            let d = random_realization(&mut rng, &sketch, "D");
            let bs = find_homomorphisms(&b, &d, Some(16));
            let cs = find_homomorphisms(&c, &d, Some(16));
            for u in &bs {
                for v in cs.iter().filter(|v| f.then(u).same_maps(&g.then(v))) {
                    cocones += 1;
                    let Some(bindings) = mediating_bindings([(&po.left, u), (&po.right, v)]) else {
                        failures.push(format!(
                            "case {id}: a cocone identifies less than the pushout"
                        ));
                        continue;
                    };
                    let options = SearchOptions {
                        limit: Some(2),
                        bindings,
                        injective: false,
                    };
                    let n = count_homomorphisms(&po.apex, &d, &options);
                    if n != 1 {
                        failures.push(format!("case {id}: {n} mediating morphisms"));
                        continue;
                    }
                }
            }
        }
        cases += 1;
    }
    let elapsed = start.elapsed();
    let v = if failures.is_empty() {
        pass(format!("{cases} spans, {cocones} cocones, 0 failures"))
    } else {
        fail(format!(
            "{} failures, first: {}",
            failures.len(),
            failures[0]
        ))
    };
    within(elapsed, LIMIT_PUSHOUT, v)
}

fn random_equational_spec(rng: &mut ChaCha8Rng) -> Arc<Specification> {
    let eq = builtin_equational_logic();
    let types: Vec<String> = (0..rng.gen_range(1..=3))
        .map(|i| ["X", "Y", "Z"][i].to_string())
        .collect();
    let mut spec = Specification::new("R", eq.sketch);
    for t in &types {
        spec.insert("Type", t).unwrap();
    }
    for i in 0..rng.gen_range(0..=4) {
        let name = ["f", "g", "h", "k"][i];
        spec.insert("Term", name).unwrap();
        spec.set("dom", name, types.choose(rng).unwrap()).unwrap();
        spec.set("codom", name, types.choose(rng).unwrap()).unwrap();
    }
    Arc::new(spec.checked().unwrap())
}

fn typing(spec: &Specification, term: &str) -> (String, String) {
    let get = |a: &str| {
        spec.apply(a, &Elem::atom(term))
            .and_then(|e| e.as_atom().map(str::to_string))
            .expect("typed term")
    };
    (get("dom"), get("codom"))
}

fn closure_defects(spec: &Specification, original: &Specification) -> Option<String> {
    for t in spec.atoms("Type") {
        let has_id = spec.atoms("Selid").any(|s| {
            spec.apply("selid", &Elem::atom(s))
                .and_then(|e| {
                    e.as_atom()
                        .map(|x| typing(spec, x) == (t.to_string(), t.to_string()))
                })
                .unwrap_or(false)
        });
        if !has_id {
            return Some(format!("no identity on {t}"));
        }
    }
    let comps: BTreeSet<(String, String)> = spec
        .atoms("Comp")
        .filter_map(|k| match spec.apply("i", &Elem::atom(k))? {
            Elem::Tuple(t) if t.len() == 2 => Some((t[0].clone(), t[1].clone())),
            _ => None,
        })
        .collect();
    let terms: Vec<&str> = spec.atoms("Term").collect();
    for f in &terms {
        for g in &terms {
            let within_cap = term_depth(f) + term_depth(g) <= SATURATION_DEPTH;
            let from_input = original.has_atom("Term", f) && original.has_atom("Term", g);
            if !(within_cap || from_input) || typing(spec, f).1 != typing(spec, g).0 {
                continue;
            }
            if !comps.contains(&(f.to_string(), g.to_string())) {
                return Some(format!("no composite of {f} then {g}"));
            }
        }
    }
    None
}

fn saturation_soundness() -> Check {
    let start = Instant::now();
    let eq = builtin_equational_logic();
    let config = SaturationConfig {
        depth: SATURATION_DEPTH,
        ..SaturationConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut failures = Vec::new();
    let mut largest = 0;
    let mut exact = 0;
    for case in 0..SATURATION_CASES {
        let spec = random_equational_spec(&mut rng);
        let once = saturate(&eq, spec.clone(), config);
        largest = largest.max(once.spec.size());
        // A depth-capped chase stops with skipped matches; it is a fixpoint
        // of the capped rule set when the budget was never reached.
        if once.applications >= config.budget {
            failures.push(format!("case {case}: budget exhausted"));
            continue;
        }
        if once.status == SaturationStatus::Fixpoint {
            exact += 1;
        }
        let twice = saturate(&eq, once.spec.clone(), config);
        if twice.applications != 0
            || twice.status != once.status
            || specs_isomorphic(&once.spec, &twice.spec).is_none()
        {
            failures.push(format!("case {case}: not idempotent"));
            continue;
        }
        if !once.spec.validate().is_empty() {
            failures.push(format!("case {case}: invalid result"));
            continue;
        }
        if let Some(d) = closure_defects(&once.spec, &spec) {
            failures.push(format!("case {case}: {d}"));
        }
    }
    let elapsed = start.elapsed();
    let v = if failures.is_empty() {
        pass(format!(
            "{SATURATION_CASES} specs at depth {SATURATION_DEPTH}, {exact} unbounded fixpoints, largest theory {largest} elements"
        ))
    } else {
        fail(format!(
            "{} failures, first: {}",
            failures.len(),
            failures[0]
        ))
    };
    within(elapsed, LIMIT_SATURATION, v)
}

fn entailment_verdicts() -> Check {
    let mp = builtin_modus_ponens_logic();
    let eq = builtin_equational_logic();
    let env = Env::new().with_logic(&eq);
    let doc = parse_document(
        &std::fs::read_to_string(fixture("compose.dl")).unwrap(),
        &env,
    )
    .unwrap();
    let morphism = |name: &str| {
        doc.morphisms
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m.clone())
            .expect("fixture morphism")
    };
    let cases = [
        (
            "modus ponens tau",
            &mp,
            mp.rule("modus-ponens").unwrap().tau.clone(),
            Verdict::Confirmed,
        ),
        (
            "composition tau",
            &eq,
            eq.rule("compose").unwrap().tau.clone(),
            Verdict::Confirmed,
        ),
        (
            "composite inclusion",
            &eq,
            morphism("composition"),
            Verdict::Confirmed,
        ),
        (
            "bare type inclusion",
            &eq,
            morphism("bare"),
            Verdict::Refuted,
        ),
    ];
    let mut seen = Vec::new();
    for (name, logic, tau, expected) in &cases {
        let runs: BTreeSet<String> = (0..ENTAILMENT_RUNS)
            .map(|_| {
                format!(
                    "{:?}",
                    check_entailment(logic, tau, SaturationConfig::default())
                )
            })
            .collect();
        if runs.len() != 1 {
            return fail(format!("{name}: unstable verdicts {runs:?}"));
        }
        let got = runs.into_iter().next().unwrap();
        if got != format!("{expected:?}") {
            return fail(format!("{name}: {got}, expected {expected:?}"));
        }
        seen.push(format!("{name} {}", got.to_lowercase()));
    }
    pass(format!("{} over {ENTAILMENT_RUNS} runs", seen.join(", ")))
}

struct Table {
    n_in: usize,
    n_out: usize,
    rows: Vec<(usize, usize)>,
}

fn random_table(rng: &mut ChaCha8Rng, states: usize, n_in: usize, n_out: usize) -> Table {
    let rows = (0..states * n_in)
        .map(|_| (rng.gen_range(0..states), rng.gen_range(0..n_out)))
        .collect();
    Table { n_in, n_out, rows }
}

impl Table {
    fn at(&self, s: usize, x: usize) -> (usize, usize) {
        self.rows[s * self.n_in + x]
    }
}

fn sequential_product_law() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let (mut checked, mut mismatches) = (0usize, Vec::new());
    let mut pairs = 0;
    let mut run = |states: usize, t1: Table, t2: Table, exhaustive: bool| -> Result<(), String> {
        let model = FiniteModel::new(
            states,
            &[
                ("X1", t1.n_in),
                ("Y1", t1.n_out),
                ("X2", t2.n_in),
                ("Y2", t2.n_out),
            ],
        )
        .with_modifier("f1", &["X1"], &["Y1"], |s, x| {
            let (t, y) = t1.at(s, x[0]);
            (t, vec![y])
        })
        .and_then(|m| {
            m.with_modifier("f2", &["X2"], &["Y2"], |s, x| {
                let (t, y) = t2.at(s, x[0]);
                (t, vec![y])
            })
        })
        .map_err(|e| e.to_string())?;
        let f1 = DecoratedTerm::modifier("f1", &["X1"], &["Y1"]);
        let f2 = DecoratedTerm::modifier("f2", &["X2"], &["Y2"]);
        let product = sequential_product(&f1, &f2).map_err(|e| e.to_string())?;
        if !exhaustive {
            return Ok(());
        }
        for s in 0..states {
            for x1 in 0..t1.n_in {
                for x2 in 0..t2.n_in {
                    let (s1, y1) = t1.at(s, x1);
                    let (s2, y2) = t2.at(s1, x2);
                    let got =
                        evaluate(&model, &product, s, &[x1, x2]).map_err(|e| e.to_string())?;
                    checked += 1;
                    if got != (s2, vec![y1, y2]) {
                        mismatches.push(format!(
                            "s={s} x1={x1} x2={x2}: {got:?} vs ({s2}, [{y1}, {y2}])"
                        ));
                    }
                }
            }
        }
        Ok(())
    };
    for _ in 0..SEQPROD_PAIRS {
        let states = rng.gen_range(1..=4);
        let dims: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=4)).collect();
        let t1 = random_table(&mut rng, states, dims[0], dims[1]);
        let t2 = random_table(&mut rng, states, dims[2], dims[3]);
        if let Err(e) = run(states, t1, t2, true) {
            return fail(e);
        }
        pairs += 1;
    }

    let worked = FiniteModel::new(32, &[("X", 32)])
        .with_modifier("f1", &["X"], &["X"], |s, x| ((s + x[0]) % 32, vec![s]))
        .and_then(|m| m.with_modifier("f2", &["X"], &["X"], |s, x| (s, vec![(s * x[0]) % 32])))
        .and_then(|m| {
            let f1 = DecoratedTerm::modifier("f1", &["X"], &["X"]);
            let f2 = DecoratedTerm::modifier("f2", &["X"], &["X"]);
            evaluate(&m, &sequential_product(&f1, &f2)?, 2, &[3, 4])
        });
    let elapsed = start.elapsed();
    let v = match worked {
        Ok(r) if r == (5, vec![2, 20]) && mismatches.is_empty() => pass(format!(
            "{pairs} pairs, {checked} inputs, 0 mismatches, (2,3,4) ↦ (5,2,20)"
        )),
        Ok(r) if mismatches.is_empty() => fail(format!("worked triple gives {r:?}")),
        Ok(_) => fail(format!(
            "{} mismatches, first: {}",
            mismatches.len(),
            mismatches[0]
        )),
        Err(e) => fail(e.to_string()),
    };
    within(elapsed, LIMIT_SEQPROD, v)
}

fn consistency_separation() -> Check {
    let check = || -> diaglog::Result<Check> {
        // Same values, f leaves the state alone, g resets it.
        let model = FiniteModel::new(3, &[("X", 2)])
            .with_modifier("f", &["X"], &["X"], |s, x| (s, vec![x[0]]))?
            .with_modifier("g", &["X"], &["X"], |_, x| (0, vec![x[0]]))?
            .with_modifier("h", &["X"], &["X"], |s, x| {
                ((s + 1) % 3, vec![(x[0] + s) % 2])
            })?;
        let f = DecoratedTerm::modifier("f", &["X"], &["X"]);
        let g = DecoratedTerm::modifier("g", &["X"], &["X"]);
        let weak = check_decorated_equation(&model, &f, &g, Flavor::Weak)?;
        let strong = check_decorated_equation(&model, &f, &g, Flavor::Strong)?;
        if !weak || strong {
            return Ok(fail(format!("f ~ g {weak}, f = g {strong}")));
        }
        let h = DecoratedTerm::modifier("h", &["X"], &["X"]);
        for side in [Side::Right, Side::Left] {
            let d = semi_pure_diagram(&h, &["X"], side)?;
            let active =
                check_decorated_equation(&model, &d.active.0, &d.active.1, Flavor::Strong)?;
            let pw =
                check_decorated_equation(&model, &d.passenger.0, &d.passenger.1, Flavor::Weak)?;
            let ps =
                check_decorated_equation(&model, &d.passenger.0, &d.passenger.1, Flavor::Strong)?;
            if !(active && pw && !ps) {
                return Ok(fail(format!(
                    "{side:?} diagram: active = {active}, passenger ~ {pw}, passenger = {ps}"
                )));
            }
        }
        Ok(pass(
            "f ~ g holds, f = g fails; semi-pure squares: active =, passenger ~ only",
        ))
    };
    check().unwrap_or_else(|e| fail(e.to_string()))
}

type Terms = Vec<(String, String, String)>;

fn add_term(spec: &mut Specification, terms: &mut Terms, name: &str, s: &str, t: &str, pure: bool) {
    spec.insert("TermM", name).unwrap();
    spec.set("domM", name, s).unwrap();
    spec.set("codomM", name, t).unwrap();
    if pure {
        spec.insert("TermP", name).unwrap();
        spec.set("c", name, name).unwrap();
    }
    terms.push((name.to_string(), s.to_string(), t.to_string()));
}

fn random_decorated_spec(rng: &mut ChaCha8Rng) -> Arc<Specification> {
    let dec = builtin_decorated_logic();
    let types: Vec<&str> = ["A", "B"][..rng.gen_range(1..=2)].to_vec();
    let mut spec = Specification::new("S1", dec.sketch);
    for t in &types {
        spec.insert("Type", *t).unwrap();
    }
    let mut terms: Terms = Vec::new();
    for i in 0..rng.gen_range(1..=2) {
        let (s, t) = (*types.choose(rng).unwrap(), *types.choose(rng).unwrap());
        add_term(&mut spec, &mut terms, &format!("m{i}"), s, t, false);
    }
    if rng.gen_bool(0.5) {
        let (s, t) = (*types.choose(rng).unwrap(), *types.choose(rng).unwrap());
        add_term(&mut spec, &mut terms, "p", s, t, true);
    }
    let consecutive: Vec<(usize, usize)> = (0..terms.len())
        .flat_map(|i| (0..terms.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| terms[i].2 == terms[j].1)
        .collect();
    if let (Some(&(i, j)), true) = (consecutive.choose(rng), rng.gen_bool(0.5)) {
        let (f, g) = (terms[i].clone(), terms[j].clone());
        let k = format!("{}∘{}", g.0, f.0);
        add_term(&mut spec, &mut terms, &k, &f.1, &g.2, false);
        spec.insert("CompM", &k).unwrap();
        spec.set_action("iM", Elem::atom(&k), Elem::Tuple(vec![f.0, g.0]))
            .unwrap();
        spec.set("compM", &k, &k).unwrap();
    }
    let parallel: Vec<(usize, usize)> = (0..terms.len())
        .flat_map(|i| (0..terms.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| i < j && terms[i].1 == terms[j].1 && terms[i].2 == terms[j].2)
        .collect();
    if let Some(&(i, j)) = parallel.choose(rng) {
        let (point, l, r, sym) = if rng.gen_bool(0.5) {
            ("EqW", "lhsW", "rhsW", "~")
        } else {
            ("EqS", "lhsS", "rhsS", "≡")
        };
        let e = format!("{}{sym}{}", terms[i].0, terms[j].0);
        spec.insert(point, &e).unwrap();
        spec.set(l, &e, &terms[i].0).unwrap();
        spec.set(r, &e, &terms[j].0).unwrap();
    }
    Arc::new(spec.checked().expect("random decorated spec is valid"))
}

fn random_fragment(rng: &mut ChaCha8Rng) -> diaglog::Result<Arc<Specification>> {
    let states = rng.gen_range(1..=2);
    let values: Vec<(&str, usize)> =
        [("X", rng.gen_range(1..=2)), ("Y", rng.gen_range(1..=2))][..rng.gen_range(1..=2)].to_vec();
    let mut generators = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let (x, n) = *values.choose(rng).unwrap();
        let (y, m) = *values.choose(rng).unwrap();
        let table = (0..states * n)
            .map(|_| rng.gen_range(0..states) * m + rng.gen_range(0..m))
            .collect();
        generators.push(FiniteFunction::new(
            &format!("S×{x}"),
            &format!("S×{y}"),
            table,
        ));
    }
    if rng.gen_bool(0.5) {
        let (x, n) = *values.choose(rng).unwrap();
        generators.push(FiniteFunction::new(
            x,
            x,
            (0..n).map(|_| rng.gen_range(0..n)).collect(),
        ));
    }
    Ok(set_fragment(states, &values, &generators)?.spec)
}

fn transposition() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let f = near();
    let (mut models, mut failures) = (0usize, Vec::new());
    for case in 0..TRANSPOSE_PAIRS {
        let s1 = random_decorated_spec(&mut rng);
        let outcome = (|| -> diaglog::Result<Option<String>> {
            let t2 = random_fragment(&mut rng)?;
            let fs1 = translate(&f, &s1)?.spec;
            let u = Arc::new(reread(&f, &t2)?);
            let left = find_homomorphisms(&fs1, &t2, None);
            let right = find_homomorphisms(&s1, &u, None);
            if left.len() != right.len() {
                return Ok(Some(format!(
                    "{} models of F(S1) vs {} of S1 in U(T2)",
                    left.len(),
                    right.len()
                )));
            }
            models += left.len();
            for m in &left {
                let n = model_transpose(&f, &s1, &t2, m)?;
                if !model_transpose_inverse(&f, &s1, &t2, &n)?.same_maps(m) {
                    return Ok(Some("a model is not recovered from its transpose".into()));
                }
            }
            for n in &right {
                let m = model_transpose_inverse(&f, &s1, &t2, n)?;
                if !model_transpose(&f, &s1, &t2, &m)?.same_maps(n) {
                    return Ok(Some("a transpose is not recovered from its model".into()));
                }
            }
            Ok(None)
        })();
        match outcome {
            Ok(None) => {}
            Ok(Some(d)) => failures.push(format!("pair {case}: {d}")),
            Err(e) => failures.push(format!("pair {case}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let v = if failures.is_empty() {
        pass(format!(
            "{TRANSPOSE_PAIRS} pairs, {models} models on each side, round trips are identities"
        ))
    } else {
        fail(format!(
            "{} failures, first: {}",
            failures.len(),
            failures[0]
        ))
    };
    within(elapsed, LIMIT_TRANSPOSE, v)
}

/// An equational spec presenting the category with the given arrows and
/// composition table, identities included.
fn category_spec(
    objects: &[String],
    arrows: &BTreeMap<String, (String, String)>,
    comp: &BTreeMap<(String, String), String>,
) -> Specification {
    let mut spec = Specification::new("Base", builtin_equational_logic().sketch);
    for o in objects {
        spec.insert("Type", o).unwrap();
        spec.insert("Selid", o).unwrap();
        spec.set("selid", o, &format!("id_{o}")).unwrap();
    }
    for (a, (s, t)) in arrows {
        spec.insert("Term", a).unwrap();
        spec.set("dom", a, s).unwrap();
        spec.set("codom", a, t).unwrap();
    }
    for ((f, g), h) in comp {
        let k = format!("{g}∘{f}");
        spec.insert("Comp", &k).unwrap();
        spec.set_action("i", Elem::atom(&k), Elem::Tuple(vec![f.clone(), g.clone()]))
            .unwrap();
        spec.set("comp", &k, h).unwrap();
    }
    spec.checked().expect("category spec is valid")
}

fn lift_defects(
    base: &Specification,
    p: &FunctorData,
    arrows: &BTreeMap<String, (String, String)>,
) -> Option<String> {
    let elt = match category_of_elements(base, p) {
        Ok(e) => e,
        Err(e) => return Some(e.to_string()),
    };
    for (a, (s, t)) in arrows {
        for x in &p.fibers[s] {
            let lifts: Vec<_> = elt.lifts_of(a, x).collect();
            if lifts.len() != 1 {
                return Some(format!("{a} from {x} has {} lifts", lifts.len()));
            }
            let y = p.apply(a, x).expect("total");
            if lifts[0].source != format!("{s}^{x}") || lifts[0].target != format!("{t}^{y}") {
                return Some(format!("{a} from {x} lifts to the wrong arrow"));
            }
            if elt.project_arrow(&lifts[0].name) != Some(a.as_str()) {
                return Some(format!("{} does not project to {a}", lifts[0].name));
            }
        }
    }
    None
}

/// `T₀`: one object `D` with idempotent `p` and absorbing `m`, and the
/// functor choosing the decoration of a composite.
fn t0_lifts() -> Option<String> {
    let objects = vec!["D".to_string()];
    let ar = |n: &str| (n.to_string(), ("D".to_string(), "D".to_string()));
    let arrows: BTreeMap<_, _> = [ar("id_D"), ar("p"), ar("m")].into();
    let mut comp = BTreeMap::new();
    for f in ["id_D", "p", "m"] {
        for g in ["id_D", "p", "m"] {
            let h = match (f, g) {
                ("id_D", x) | (x, "id_D") => x,
                ("p", "p") => "p",
                _ => "m",
            };
            comp.insert((f.to_string(), g.to_string()), h.to_string());
        }
    }
    let base = category_spec(&objects, &arrows, &comp);
    let action = |pairs: [(&str, &str); 2]| {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    };
    let p = FunctorData {
        fibers: [("D".to_string(), vec!["pure".to_string(), "mod".to_string()])].into(),
        actions: [
            (
                "id_D".to_string(),
                action([("pure", "pure"), ("mod", "mod")]),
            ),
            ("p".to_string(), action([("pure", "pure"), ("mod", "mod")])),
            ("m".to_string(), action([("pure", "mod"), ("mod", "mod")])),
        ]
        .into(),
    };
    lift_defects(&base, &p, &arrows)
}

/// A random concrete category: generator functions between small sets closed
/// under composition; arrows are named by their tables.
fn random_concrete(
    rng: &mut ChaCha8Rng,
) -> (
    Vec<String>,
    BTreeMap<String, usize>,
    BTreeSet<FiniteFunction>,
) {
    let objects: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("O{i}")).collect();
    let sizes: BTreeMap<String, usize> = objects
        .iter()
        .map(|o| (o.clone(), rng.gen_range(1..=3)))
        .collect();
    let mut fs: BTreeSet<FiniteFunction> = objects
        .iter()
        .map(|o| FiniteFunction::new(o, o, (0..sizes[o]).collect()))
        .collect();
    for _ in 0..rng.gen_range(1..=3) {
        let (s, t) = (objects.choose(rng).unwrap(), objects.choose(rng).unwrap());
        fs.insert(FiniteFunction::new(
            s,
            t,
            (0..sizes[s]).map(|_| rng.gen_range(0..sizes[t])).collect(),
        ));
    }
    loop {
        let new: Vec<_> = fs
            .iter()
            .flat_map(|f| {
                fs.iter()
                    .filter(|g| g.source == f.target)
                    .map(move |g| f.then(g))
            })
            .filter(|h| !fs.contains(h))
            .collect();
        if new.is_empty() {
            break;
        }
        fs.extend(new);
    }
    (objects, sizes, fs)
}

fn random_functor_lifts(rng: &mut ChaCha8Rng) -> Option<String> {
    let (objects, sizes, fs) = random_concrete(rng);
    let is_id = |f: &FiniteFunction| {
        f.source == f.target && f.table.iter().enumerate().all(|(i, &v)| i == v)
    };
    let name = |f: &FiniteFunction| {
        if is_id(f) {
            format!("id_{}", f.source)
        } else {
            f.name()
        }
    };
    let arrows: BTreeMap<String, (String, String)> = fs
        .iter()
        .map(|f| (name(f), (f.source.clone(), f.target.clone())))
        .collect();
    let mut comp = BTreeMap::new();
    for f in &fs {
        for g in fs.iter().filter(|g| g.source == f.target) {
            comp.insert((name(f), name(g)), name(&f.then(g)));
        }
    }
    let base = category_spec(&objects, &arrows, &comp);

    // Either the underlying-set functor or the representable at a random object.
    let p = if rng.gen_bool(0.5) {
        FunctorData {
            fibers: objects
                .iter()
                .map(|o| (o.clone(), (0..sizes[o]).map(|i| i.to_string()).collect()))
                .collect(),
            actions: fs
                .iter()
                .map(|f| {
                    let m = f
                        .table
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (i.to_string(), v.to_string()))
                        .collect();
                    (name(f), m)
                })
                .collect(),
        }
    } else {
        let at = objects.choose(rng).unwrap();
        let hom = |o: &str| -> Vec<&FiniteFunction> {
            fs.iter()
                .filter(|g| g.source == *at && g.target == o)
                .collect()
        };
        FunctorData {
            fibers: objects
                .iter()
                .map(|o| (o.clone(), hom(o).into_iter().map(name).collect()))
                .collect(),
            actions: fs
                .iter()
                .map(|f| {
                    (
                        name(f),
                        hom(&f.source)
                            .into_iter()
                            .map(|g| (name(g), name(&g.then(f))))
                            .collect(),
                    )
                })
                .collect(),
        }
    };
    lift_defects(&base, &p, &arrows)
}

fn opfibration_lifts() -> Check {
    if let Some(d) = t0_lifts() {
        return fail(format!("T₀: {d}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    for i in 0..FUNCTORS {
        if let Some(d) = random_functor_lifts(&mut rng) {
            return fail(format!("functor {i}: {d}"));
        }
    }
    pass(format!(
        "T₀ and {FUNCTORS} random functors, one lift per arrow and fiber element"
    ))
}

fn evaluation_order() -> Check {
    let prog = fixture("order.prog");
    let left = diaglog(&["eval", &prog, "--order", "left", "--format", "json"]);
    let right = diaglog(&["eval", &prog, "--order", "right", "--format", "json"]);
    if left.code != 0 || right.code != 0 {
        return fail(format!("exit codes {} and {}", left.code, right.code));
    }
    if left.stdout == right.stdout {
        return fail("both orders give the same result");
    }
    if left.stdout != golden("eval_left.json") || right.stdout != golden("eval_right.json") {
        return fail("traces differ from the golden files");
    }
    let value =
        |s: &str| serde_json::from_str::<serde_json::Value>(s).map(|v| v["value"].to_string());
    match (value(&left.stdout), value(&right.stdout)) {
        (Ok(l), Ok(r)) if l != r => pass(format!("left {l}, right {r}, golden traces match")),
        _ => fail("the values do not differ"),
    }
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 9] = [
        ("modus ponens end-to-end", modus_ponens_demo),
        ("pushout universal property", pushout_universal_property),
        ("saturation soundness and idempotence", saturation_soundness),
        ("entailment verification", entailment_verdicts),
        ("sequential product semantics", sequential_product_law),
        ("consistency equation separation", consistency_separation),
        ("transposition of models", transposition),
        ("opfibration lift uniqueness", opfibration_lifts),
        ("order of evaluation", evaluation_order),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let word = if v.ok { "PASS" } else { "FAIL" };
        failed += usize::from(!v.ok);
        println!(
            "criterion {}: {word} {name} ({}; {:.2}s)",
            i + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
