use std::sync::Arc;

use diaglog::engine::{saturate, SaturationConfig, SaturationStatus, Specification};
use diaglog::logic::{
    builtin_decorated_logic, builtin_equational_logic, builtin_modus_ponens_logic,
    builtin_pointed_equational_logic, DiagrammaticLogic,
};
use diaglog::syntax::{parse_document, Env};

fn spec(logic: &DiagrammaticLogic, src: &str) -> Arc<Specification> {
    let doc = parse_document(src, &Env::new().with_logic(logic)).unwrap();
    Arc::clone(&doc.specs[0])
}

#[test]
fn composable_pair_saturates() {
    let eq = builtin_equational_logic();
    let s = spec(
        &eq,
        "spec S over Eq { Type: X, Y, Z  Term: f, g  dom(f) = X codom(f) = Y dom(g) = Y codom(g) = Z }",
    );
    let out = saturate(&eq, s, SaturationConfig::default());
    assert_eq!(out.status, SaturationStatus::Fixpoint);
    let terms: Vec<&str> = out.spec.atoms("Term").collect();
    for t in ["f", "g", "g∘f", "id_X", "id_Y", "id_Z"] {
        assert!(terms.contains(&t), "{t} missing from {terms:?}");
    }
}

#[test]
fn modus_ponens_saturates() {
    let mp = builtin_modus_ponens_logic();
    let s = spec(
        &mp,
        "spec S over MP { Formula: p, q, p⇒q  Imp: i  lhs(i) = p rhs(i) = q res(i) = p⇒q  Prov: ⊢p, ⊢p⇒q  of(⊢p) = p  of(⊢p⇒q) = p⇒q }",
    );
    let out = saturate(&mp, s, SaturationConfig::default());
    assert_eq!(out.status, SaturationStatus::Fixpoint);
    assert!(out.spec.has_atom("Prov", "⊢q"));
}

#[test]
fn pointed_logic_builds_the_state_product() {
    let eqs = builtin_pointed_equational_logic();
    let s = spec(&eqs, "spec S over EqStar { Type: X  Val: v  vt(v) = X }");
    let out = saturate(&eqs, s, SaturationConfig::default());
    let types: Vec<&str> = out.spec.atoms("Type").collect();
    let terms: Vec<&str> = out.spec.atoms("Term").collect();
    assert!(types.contains(&"S×X"), "{types:?}");
    assert!(
        terms.contains(&"π1_S×X") && terms.contains(&"π2_S×X"),
        "{terms:?}"
    );
}

#[test]
fn decorated_logic_composes_pure_and_modifier() {
    let dec = builtin_decorated_logic();
    let s = spec(
        &dec,
        "spec S over Dec { Type: X, Y, Z  TermM: f, g  TermP: f  c(f) = f  domM(f) = X codomM(f) = Y domM(g) = Y codomM(g) = Z }",
    );
    let out = saturate(&dec, s, SaturationConfig::default());
    let pure: Vec<&str> = out.spec.atoms("TermP").collect();
    let modifiers: Vec<&str> = out.spec.atoms("TermM").collect();
    assert!(modifiers.contains(&"g∘f"));
    assert!(!pure.contains(&"g∘f"));
}
