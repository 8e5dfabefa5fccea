use std::collections::BTreeMap;

use diaglog::engine::{count_homomorphisms, pushout, Elem, SearchOptions};
use diaglog::logic::builtin_equational_logic;
use diaglog::syntax::{parse_document, Document, Env};

const SRC: &str = r#"
spec Shared over Eq { Type: X, Y }
spec Loop over Eq {
  Type: X, Y
  Term: f  dom(f) = X  codom(f) = Y
}
spec Point over Eq {
  Type: X, Y, Z
}
spec Glued over Eq { Type: W }

morphism into_loop : Shared -> Loop { }
morphism into_point : Shared -> Point { }
morphism glue : Shared -> Glued { Type: X -> W, Y -> W }
"#;

fn doc() -> Document {
    let eq = builtin_equational_logic();
    parse_document(SRC, &Env::new().with_logic(&eq)).unwrap()
}

#[test]
fn disjoint_extensions_are_united() {
    let d = doc();
    let po = pushout(
        d.morphism("into_loop").unwrap(),
        d.morphism("into_point").unwrap(),
    )
    .unwrap();
    assert_eq!(po.apex.atoms("Type").count(), 3);
    assert_eq!(po.apex.atoms("Term").count(), 1);
    assert!(po.apex.validate().is_empty());
    assert!(d
        .morphism("into_loop")
        .unwrap()
        .then(&po.left)
        .same_maps(&d.morphism("into_point").unwrap().then(&po.right)));
}

#[test]
fn gluing_identifies_the_typing() {
    let d = doc();
    let po = pushout(
        d.morphism("into_loop").unwrap(),
        d.morphism("glue").unwrap(),
    )
    .unwrap();
    assert_eq!(po.apex.atoms("Type").count(), 1);
    let f = po.left.map_atom("Term", "f").unwrap();
    let w = po.right.map_atom("Type", "W").unwrap();
    assert_eq!(po.apex.apply("dom", &Elem::atom(f)), Some(Elem::atom(w)));
    assert_eq!(po.apex.apply("codom", &Elem::atom(f)), Some(Elem::atom(w)));
}

#[test]
fn the_apex_has_one_mediator_per_cocone_into_itself() {
    let d = doc();
    let po = pushout(
        d.morphism("into_loop").unwrap(),
        d.morphism("into_point").unwrap(),
    )
    .unwrap();
    let mut bindings = BTreeMap::new();
    for leg in [&po.left, &po.right] {
        for (p, carrier) in leg.source.carriers() {
            for x in carrier {
                let y = leg.map_atom(p, x).unwrap().to_string();
                bindings
                    .entry(p.clone())
                    .or_insert_with(BTreeMap::new)
                    .insert(y.clone(), y);
            }
        }
    }
    let options = SearchOptions {
        limit: None,
        bindings,
        injective: false,
    };
    assert_eq!(count_homomorphisms(&po.apex, &po.apex, &options), 1);
}
