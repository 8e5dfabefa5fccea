//! Textual formats for sketches, specifications, morphisms, logics and proofs.

mod json;
mod lexer;
mod parser;
mod print;

pub use json::{morphism_json, spec_json, step_json};
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse_document, parse_logic, Document, Env};
pub use print::{format_name, format_spec};
