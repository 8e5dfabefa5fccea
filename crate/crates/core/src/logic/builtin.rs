use super::DiagrammaticLogic;
use crate::syntax::parse_logic;

const EQ: &str = include_str!("../../logics/eq.logic");
const EQ_STAR: &str = include_str!("../../logics/eq_star.logic");
const DEC: &str = include_str!("../../logics/dec.logic");
const MP: &str = include_str!("../../logics/mp.logic");

/// Reserved names of the builtin logics.
pub const BUILTIN_NAMES: [&str; 4] = ["eq", "eq*", "dec", "mp"];

pub fn builtin_source(name: &str) -> Option<&'static str> {
    match name {
        "eq" => Some(EQ),
        "eq*" => Some(EQ_STAR),
        "dec" => Some(DEC),
        "mp" => Some(MP),
        _ => None,
    }
}

pub fn builtin(name: &str) -> Option<DiagrammaticLogic> {
    builtin_source(name)
        .map(|src| parse_logic(src).unwrap_or_else(|e| panic!("builtin logic `{name}`: {e}")))
}

pub fn builtin_equational_logic() -> DiagrammaticLogic {
    builtin("eq").expect("builtin")
}

pub fn builtin_modus_ponens_logic() -> DiagrammaticLogic {
    builtin("mp").expect("builtin")
}

pub fn builtin_pointed_equational_logic() -> DiagrammaticLogic {
    builtin("eq*").expect("builtin")
}

pub fn builtin_decorated_logic() -> DiagrammaticLogic {
    builtin("dec").expect("builtin")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_parse() {
        for name in BUILTIN_NAMES {
            let logic = builtin(name).unwrap();
            assert!(!logic.rules.is_empty(), "{name}");
        }
    }
}
