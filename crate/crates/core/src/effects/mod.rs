//! Decorated state semantics: a small imperative language, its decorated
//! specification, and explicit-state models over finite carriers.

mod decorate;
mod fragment;
mod interp;
mod program;
mod semantics;

pub use decorate::{
    decorate_program, forget_decorations, grammar_spec, state_expand, DecoratedProgram,
};
pub use fragment::{set_fragment, FiniteFunction, Fragment};
pub use interp::{
    evaluate_program, initial_state, Event, Order, Outcome, State, Value, DEFAULT_MODULUS,
};
pub use program::{parse_program, parse_program_in, Expr, Ident, Program, Type};
pub use semantics::{
    check_decorated_equation, equation_counterexample, evaluate, semi_pure_diagram,
    semi_pure_product, sequential_product, type_name, Body, DecoratedTerm, Decoration, FiniteModel,
    Flavor, SemiPureDiagram, Side, Ty,
};
