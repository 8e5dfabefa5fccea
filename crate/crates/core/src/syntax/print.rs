use std::fmt::Write;

use crate::engine::{Elem, Specification};

/// A name as it must be written to parse back: quoted when it holds
/// reserved characters.
pub fn format_name(name: &str) -> String {
    let plain = !name.is_empty()
        && !name.contains("->")
        && !name.contains("//")
        && name
            .chars()
            .all(|c| !c.is_whitespace() && !"{}()<>,:;=\"@.".contains(c));
    if plain {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

fn format_elem(e: &Elem) -> String {
    match e {
        Elem::Atom(a) => format_name(a),
        Elem::Tuple(t) => format!(
            "<{}>",
            t.iter()
                .map(|x| format_name(x))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

/// The specification in the `spec NAME over SKETCH { ... }` format, with
/// points and arrows in sorted order.
pub fn format_spec(spec: &Specification) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "spec {} over {} {{",
        format_name(&spec.name),
        format_name(&spec.sketch().name)
    );
    for (point, carrier) in spec.carriers() {
        if carrier.is_empty() {
            continue;
        }
        let names: Vec<String> = carrier.iter().map(|x| format_name(x)).collect();
        let _ = writeln!(out, "  {}: {}", format_name(point), names.join(", "));
    }
    let mut arrows: Vec<_> = spec.stored_actions().iter().collect();
    arrows.sort_by(|a, b| a.0.cmp(b.0));
    for (arrow, action) in arrows {
        for (x, y) in action {
            let _ = writeln!(
                out,
                "  {}({}) = {}",
                format_name(arrow),
                format_elem(x),
                format_elem(y)
            );
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_names_are_quoted() {
        assert_eq!(format_name("g∘f"), "g∘f");
        assert_eq!(format_name("x:="), "\"x:=\"");
        assert_eq!(format_name("a->b"), "\"a->b\"");
    }
}
