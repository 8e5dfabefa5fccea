use std::fmt::Write;
use std::sync::Arc;

use anyhow::anyhow;
use serde_json::json;

use diaglog::effects::{
    check_decorated_equation, evaluate, semi_pure_diagram, sequential_product, DecoratedTerm,
    FiniteModel, Flavor, Side,
};
use diaglog::engine::{SaturationConfig, SpecMorphism, Specification};
use diaglog::fraction::{
    check_entailment, run_proof, MatchDirective, ProofScript, ProofStep, Verdict,
};
use diaglog::logic::builtin_modus_ponens_logic;
use diaglog::syntax::{format_spec, parse_document, spec_json, step_json, Env};

use super::Report;

const START: &str = r#"
spec S over MP {
  Formula: A, B, A⇒B
  Imp: imp  lhs(imp) = A  rhs(imp) = B  res(imp) = A⇒B
  Prov: ⊢A, ⊢A⇒B  of(⊢A) = A  of(⊢A⇒B) = A⇒B
}
"#;

fn provable(spec: &Specification) -> Vec<String> {
    spec.atoms("Prov")
        .filter_map(|p| {
            spec.apply("of", &diaglog::engine::Elem::atom(p))
                .and_then(|f| f.as_atom().map(str::to_string))
        })
        .collect()
}

fn braces(xs: &[String]) -> String {
    format!("{{{}}}", xs.join(", "))
}

fn map_text(m: &SpecMorphism) -> String {
    let mut parts = Vec::new();
    for map in m.maps.values() {
        for (x, y) in map {
            parts.push(format!("{x} ↦ {y}"));
        }
    }
    parts.join(", ")
}

/// The modus ponens rule as a fraction, applied to `{A, A⇒B}`.
pub(crate) fn modus_ponens() -> anyhow::Result<Report> {
    let logic = builtin_modus_ponens_logic();
    let rule = logic
        .rule("modus-ponens")
        .ok_or_else(|| anyhow!("the builtin logic lacks modus-ponens"))?;
    let doc = parse_document(START, &Env::new().with_logic(&logic))?;
    let start: Arc<Specification> = doc.specs[0].clone();

    let mut text = String::new();
    let (h, h1, c) = (
        provable(&rule.hypothesis),
        provable(&rule.intermediate),
        provable(&rule.conclusion),
    );
    let _ = writeln!(text, "rule modus-ponens");
    let _ = writeln!(text, "  H  = {}", braces(&h));
    let _ = writeln!(text, "  H' = {}", braces(&h1));
    let _ = writeln!(text, "  C  = {}", braces(&c));
    let inclusion =
        rule.tau.is_injective() && rule.tau.maps.values().flatten().all(|(x, y)| x == y);
    let _ = writeln!(
        text,
        "  tau: H -> H' {}",
        if inclusion {
            "inclusion"
        } else {
            "not an inclusion"
        }
    );
    let _ = writeln!(text, "  s: C -> H' {}", map_text(&rule.numerator));

    let script = ProofScript {
        steps: vec![ProofStep {
            rule: "modus-ponens".into(),
            directive: MatchDirective::First,
        }],
    };
    let outcome = run_proof(&logic, &script, start.clone())?;
    let step = &outcome.trace[0];
    let _ = writeln!(text, "start: provable {}", braces(&provable(&start)));
    let _ = writeln!(text, "step 1: modus-ponens at {}", map_text(&step.matched));
    let _ = writeln!(
        text,
        "result: provable {}",
        braces(&provable(&outcome.spec))
    );
    let b_provable = provable(&outcome.spec).iter().any(|f| f == "B");
    let _ = writeln!(
        text,
        "B provable: {}",
        if b_provable { "yes" } else { "no" }
    );
    let verdict = check_entailment(&logic, &rule.tau, SaturationConfig::default());
    let word = serde_json::to_value(verdict)?;
    let _ = writeln!(
        text,
        "tau is an entailment: {}",
        word.as_str().expect("string")
    );
    text.push_str(&format_spec(&outcome.spec));

    let json = json!({
        "rule": {
            "hypothesis": h,
            "intermediate": h1,
            "conclusion": c,
            "tau_inclusion": inclusion,
            "s": rule.numerator.maps,
        },
        "step": step_json(step),
        "result": spec_json(&outcome.spec),
        "b_provable": b_provable,
        "tau": word,
    });
    Ok(Report {
        text,
        json,
        code: i32::from(!(b_provable && verdict == Verdict::Confirmed)),
    })
}

const MODULUS: usize = 32;

/// `f1(s, x) = (s + x, s)` then `f2(s, x) = (s, s·x)` over `ℤ/32`.
pub(crate) fn sequential_products() -> anyhow::Result<Report> {
    let model = FiniteModel::new(MODULUS, &[("X", MODULUS)])
        .with_modifier("f1", &["X"], &["X"], |s, x| ((s + x[0]) % MODULUS, vec![s]))?
        .with_modifier("f2", &["X"], &["X"], |s, x| (s, vec![(s * x[0]) % MODULUS]))?;
    let f1 = DecoratedTerm::modifier("f1", &["X"], &["X"]);
    let f2 = DecoratedTerm::modifier("f2", &["X"], &["X"]);
    let (s, x1, x2) = (2, 3, 4);

    let forward = sequential_product(&f1, &f2)?;
    let backward = sequential_product(&f2, &f1)?;
    let (s_fwd, y_fwd) = evaluate(&model, &forward, s, &[x1, x2])?;
    let (s1, y1) = evaluate(&model, &f1, s, &[x1])?;
    let (s2, y2) = evaluate(&model, &f2, s1, &[x2])?;
    let formula = (s2, vec![y1[0], y2[0]]);
    let (s_bwd, y_bwd) = evaluate(&model, &backward, s, &[x1, x2])?;

    let diagram = semi_pure_diagram(&f1, &["X"], Side::Right)?;
    let active =
        check_decorated_equation(&model, &diagram.active.0, &diagram.active.1, Flavor::Strong)?;
    let pass_weak = check_decorated_equation(
        &model,
        &diagram.passenger.0,
        &diagram.passenger.1,
        Flavor::Weak,
    )?;
    let pass_strong = check_decorated_equation(
        &model,
        &diagram.passenger.0,
        &diagram.passenger.1,
        Flavor::Strong,
    )?;

    let agrees = (s_fwd, y_fwd.clone()) == formula;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "f1(s, x) = (s + x, s), f2(s, x) = (s, s·x) over ℤ/{MODULUS}"
    );
    let _ = writeln!(
        text,
        "{} at ({s}, {x1}, {x2}) = ({s_fwd}, {}, {})",
        forward.name, y_fwd[0], y_fwd[1]
    );
    let _ = writeln!(
        text,
        "two steps: (s1, y1) = f1({s}, {x1}) = ({s1}, {}), (s2, y2) = f2({s1}, {x2}) = ({s2}, {})",
        y1[0], y2[0]
    );
    let _ = writeln!(
        text,
        "agrees with the two steps: {}",
        if agrees { "yes" } else { "no" }
    );
    let _ = writeln!(
        text,
        "{} at ({s}, {x1}, {x2}) = ({s_bwd}, {}, {})",
        backward.name, y_bwd[0], y_bwd[1]
    );
    let _ = writeln!(text, "semi-pure product {}:", diagram.product.name);
    let _ = writeln!(
        text,
        "  active square =: {}",
        if active { "holds" } else { "fails" }
    );
    let _ = writeln!(
        text,
        "  passenger square ~: {}",
        if pass_weak { "holds" } else { "fails" }
    );
    let _ = writeln!(
        text,
        "  passenger square =: {}",
        if pass_strong { "holds" } else { "fails" }
    );

    let json = json!({
        "input": [s, x1, x2],
        "forward": { "term": forward.name, "state": s_fwd, "value": y_fwd },
        "two_steps": { "state": formula.0, "value": formula.1 },
        "agrees": agrees,
        "backward": { "term": backward.name, "state": s_bwd, "value": y_bwd },
        "semi_pure": {
            "product": diagram.product.name,
            "active_strong": active,
            "passenger_weak": pass_weak,
            "passenger_strong": pass_strong,
        },
    });
    let ok = agrees && active && pass_weak && !pass_strong;
    Ok(Report {
        text,
        json,
        code: i32::from(!ok),
    })
}
