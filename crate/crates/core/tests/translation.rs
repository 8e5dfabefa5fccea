use std::sync::Arc;

use diaglog::engine::{SaturationConfig, Specification};
use diaglog::logic::{
    builtin_decorated_logic, builtin_equational_logic, derive_rule, far, near, translate,
    translate_spec, LogicMorphism,
};
use diaglog::syntax::{parse_document, Env};

fn dec(body: &str) -> Arc<Specification> {
    let logic = builtin_decorated_logic();
    let doc = parse_document(
        &format!("spec D over Dec {{ {body} }}"),
        &Env::new().with_logic(&logic),
    )
    .unwrap();
    Arc::clone(&doc.specs[0])
}

fn typing(spec: &Specification, term: &str) -> (String, String) {
    let get = |a: &str| {
        spec.apply(a, &diaglog::engine::Elem::atom(term))
            .unwrap()
            .as_atom()
            .unwrap()
            .to_string()
    };
    (get("dom"), get("codom"))
}

#[test]
fn far_forgets_decorations() {
    let s = dec("Type: X, Y, Z  TermP: g  TermM: f, g  c(g) = g  domM(f) = X codomM(f) = Y domM(g) = Y codomM(g) = Z");
    let out = translate_spec(&far(), &s).unwrap();
    let terms: Vec<&str> = out.atoms("Term").collect();
    assert_eq!(terms, ["f", "g"]);
    assert_eq!(typing(&out, "g"), ("Y".into(), "Z".into()));
    assert_eq!(out.atoms("Type").count(), 3);
}

#[test]
fn far_identifies_a_pure_term_with_its_view() {
    let s = dec("Type: X  TermP: p  TermM: f  c(p) = f  domM(f) = X codomM(f) = X");
    let t = translate(&far(), &s).unwrap();
    assert_eq!(t.spec.atoms("Term").collect::<Vec<_>>(), ["f"]);
    assert_eq!(t.image("TermP", "p"), Some(("Term", "f")));
}

#[test]
fn near_keeps_pure_terms() {
    let s = dec("Type: X, Y  TermP: f  TermM: f  c(f) = f  domM(f) = X codomM(f) = Y");
    let out = translate_spec(&near(), &s).unwrap();
    assert_eq!(typing(&out, "f"), ("X".into(), "Y".into()));
    assert_eq!(typing(&out, "S×f"), ("S×X".into(), "S×Y".into()));
    assert!(out.has_atom("Lift", "S×f"));
}

#[test]
fn near_expands_modifiers() {
    let s = dec("Type: X, Y  TermM: f  domM(f) = X codomM(f) = Y");
    let out = translate_spec(&near(), &s).unwrap();
    assert_eq!(typing(&out, "f"), ("S×X".into(), "S×Y".into()));
    assert_eq!(typing(&out, "π1_S×X"), ("S×X".into(), "S".into()));
    assert_eq!(typing(&out, "π2_S×Y"), ("S×Y".into(), "Y".into()));
}

#[test]
fn assignment_reads_and_returns_the_state() {
    let s = dec(r#"Type: "V×E", U  TermM: ":="  domM(":=") = "V×E" codomM(":=") = U"#);
    let out = translate_spec(&near(), &s).unwrap();
    assert_eq!(typing(&out, ":="), ("S×V×E".into(), "S×U".into()));
}

#[test]
fn weak_equations_compare_values() {
    let s = dec("Type: X, Y  TermM: f, g  domM(f) = X codomM(f) = Y domM(g) = X codomM(g) = Y  EqW: f~g  lhsW(f~g) = f  rhsW(f~g) = g");
    let t = translate(&near(), &s).unwrap();
    let (point, name) = t.image("EqW", "f~g").unwrap();
    assert_eq!((point, name), ("Eq", "π2_S×Y∘f≡π2_S×Y∘g"));
    assert_eq!(typing(&t.spec, "π2_S×Y∘f"), ("S×X".into(), "Y".into()));
}

#[test]
fn identity_morphism_translates_identically() {
    let eq = Arc::new(builtin_equational_logic());
    let doc = parse_document(
        "spec S over Eq { Type: X, Y  Term: f  dom(f) = X codom(f) = Y }",
        &Env::new().with_logic(&eq),
    )
    .unwrap();
    let id = LogicMorphism::identity(eq);
    assert_eq!(translate_spec(&id, &doc.specs[0]).unwrap(), *doc.specs[0]);
}

#[test]
fn every_decorated_rule_is_derivable_after_forgetting() {
    let mut f = far();
    let missing = f.derive_rule_map(SaturationConfig::default()).unwrap();
    assert!(missing.is_empty(), "{missing:?}");
    assert_eq!(f.rule_map["identity"].steps.len(), 1);
    assert!(f.rule_map["strong-weak"].steps.is_empty());
}

#[test]
fn decorated_composition_is_derivable_with_explicit_state() {
    let f = near();
    for rule in ["identity", "comp-m", "view-unique", "eqs-unique"] {
        assert!(
            derive_rule(&f, rule, SaturationConfig::default())
                .unwrap()
                .is_some(),
            "{rule}"
        );
    }
}

#[test]
#[ignore = "about a minute in release mode"]
fn every_decorated_rule_is_derivable_with_explicit_state() {
    let mut f = near();
    let missing = f.derive_rule_map(SaturationConfig::default()).unwrap();
    assert!(missing.is_empty(), "{missing:?}");
}
