//! The imperative mini-language: integer literals, variables, `+` and `*`,
//! assignment, sequencing and application.
//!
//! Application symbols are uninterpreted pairing constructors, so
//! `f(x := 1, x)` evaluates to the tuple of its arguments.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, ParseError, Result};

/// A variable occurrence with its source location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num(u64),
    Var(Ident),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    App(String, Vec<Expr>),
    Assign(Ident, Box<Expr>),
}

/// A sequence of statements; the value is that of the last one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub stmts: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Int,
    Unit,
    Product(Vec<Type>),
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("E"),
            Type::Unit => f.write_str("U"),
            Type::Product(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "{}", parts.join("×"))
            }
        }
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Assign(..) => 0,
        Expr::Add(..) => 1,
        Expr::Mul(..) => 2,
        _ => 3,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Var(x) => f.write_str(&x.name),
            Expr::Add(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" + ")?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str(" * ")?;
                write_operand(f, b, 3)
            }
            Expr::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::Assign(x, e) => {
                write!(f, "{} := ", x.name)?;
                write_operand(f, e, 1)
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.stmts.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Expr {
    fn visit_vars<'a>(&'a self, out: &mut Vec<&'a Ident>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(x) => out.push(x),
            Expr::Add(a, b) | Expr::Mul(a, b) => {
                a.visit_vars(out);
                b.visit_vars(out);
            }
            Expr::App(_, args) => args.iter().for_each(|a| a.visit_vars(out)),
            Expr::Assign(x, e) => {
                out.push(x);
                e.visit_vars(out);
            }
        }
    }

    pub fn type_of(&self) -> Result<Type> {
        match self {
            Expr::Num(_) | Expr::Var(_) => Ok(Type::Int),
            Expr::Add(a, b) | Expr::Mul(a, b) => {
                for side in [a, b] {
                    let t = side.type_of()?;
                    if t != Type::Int {
                        return Err(Error::Type(format!("`{side}` has type {t}, expected E")));
                    }
                }
                Ok(Type::Int)
            }
            Expr::App(_, args) => Ok(Type::Product(
                args.iter().map(Expr::type_of).collect::<Result<_>>()?,
            )),
            Expr::Assign(_, e) => match e.type_of()? {
                Type::Int => Ok(Type::Unit),
                t => Err(Error::Type(format!("`{e}` has type {t}, expected E"))),
            },
        }
    }

    /// Whether the expression may touch the state.
    pub fn is_modifier(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(_) | Expr::Assign(..) => true,
            Expr::Add(a, b) | Expr::Mul(a, b) => a.is_modifier() || b.is_modifier(),
            Expr::App(_, args) => args.iter().any(Expr::is_modifier),
        }
    }
}

impl Program {
    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for x in self.occurrences() {
            if seen.insert(x.name.clone()) {
                out.push(x.name.clone());
            }
        }
        out
    }

    fn occurrences(&self) -> Vec<&Ident> {
        let mut out = Vec::new();
        self.stmts.iter().for_each(|s| s.visit_vars(&mut out));
        out
    }

    /// Rejects variables outside `declared`, reporting the first occurrence.
    pub fn check_variables(&self, declared: &BTreeSet<String>) -> Result<()> {
        match self
            .occurrences()
            .into_iter()
            .find(|x| !declared.contains(&x.name))
        {
            Some(x) => {
                Err(
                    ParseError::new(x.line, x.column, format!("unknown variable `{}`", x.name))
                        .into(),
                )
            }
            None => Ok(()),
        }
    }

    pub fn type_of(&self) -> Result<Type> {
        let mut t = Type::Unit;
        for s in &self.stmts {
            t = s.type_of()?;
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(u64),
    Ident(String),
    Sym(&'static str),
    End,
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l, col) = (line, column);
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let start = i;
        let tok =
            if c.is_ascii_digit() {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                Tok::Num(text.parse().map_err(|_| {
                    ParseError::new(l, col, format!("literal `{text}` is too large"))
                })?)
            } else if c.is_alphabetic() || c == '_' {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            } else if c == ':' && chars.get(i + 1) == Some(&'=') {
                i += 2;
                Tok::Sym(":=")
            } else {
                let sym = match c {
                    '+' => "+",
                    '*' => "*",
                    '(' => "(",
                    ')' => ")",
                    ',' => ",",
                    ';' => ";",
                    _ => {
                        return Err(ParseError::new(
                            l,
                            col,
                            format!("unexpected character `{c}`"),
                        ))
                    }
                };
                i += 1;
                Tok::Sym(sym)
            };
        column += i - start;
        out.push(Lexed {
            tok,
            line: l,
            column: col,
        });
    }
    out.push(Lexed {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::new(t.line, t.column, message)
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Num(n) => format!("`{n}`"),
            Tok::Ident(x) => format!("`{x}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::End => "end of input".into(),
        }
    }

    fn eat(&mut self, sym: &'static str) -> bool {
        if *self.peek() == Tok::Sym(sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &'static str) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{sym}`, found {}", self.describe())))
        }
    }

    fn ident(&mut self) -> Ident {
        let t = &self.toks[self.pos];
        let Tok::Ident(name) = &t.tok else {
            unreachable!("checked by caller")
        };
        let id = Ident {
            name: name.clone(),
            line: t.line,
            column: t.column,
        };
        self.pos += 1;
        id
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut stmts = vec![self.stmt()?];
        while self.eat(";") {
            stmts.push(self.stmt()?);
        }
        if *self.peek() != Tok::End {
            return Err(self.error(format!(
                "expected `;` or end of input, found {}",
                self.describe()
            )));
        }
        Ok(Program { stmts })
    }

    /// An assignment or an expression; assignments may also appear as arguments.
    fn stmt(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Tok::Ident(_)) && *self.peek2() == Tok::Sym(":=") {
            let x = self.ident();
            self.pos += 1;
            let e = self.expr()?;
            return Ok(Expr::Assign(x, Box::new(e)));
        }
        self.expr()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.product()?;
        while self.eat("+") {
            e = Expr::Add(Box::new(e), Box::new(self.product()?));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        while self.eat("*") {
            e = Expr::Mul(Box::new(e), Box::new(self.term()?));
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Tok::Ident(_) => {
                let x = self.ident();
                if self.eat("(") {
                    let mut args = vec![self.stmt()?];
                    while self.eat(",") {
                        args.push(self.stmt()?);
                    }
                    self.expect(")")?;
                    Ok(Expr::App(x.name, args))
                } else {
                    Ok(Expr::Var(x))
                }
            }
            Tok::Sym("(") => {
                self.pos += 1;
                let e = self.stmt()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => Err(self.error(format!("expected an expression, found {}", self.describe()))),
        }
    }
}

pub fn parse_program(source: &str) -> Result<Program> {
    let toks = lex(source)?;
    let program = Parser { toks, pos: 0 }.program()?;
    program.type_of()?;
    Ok(program)
}

/// Parses and rejects variables outside `declared`.
pub fn parse_program_in(source: &str, declared: &BTreeSet<String>) -> Result<Program> {
    let program = parse_program(source)?;
    program.check_variables(declared)?;
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(e: &Expr) -> &str {
        match e {
            Expr::Var(x) => &x.name,
            other => panic!("not a variable: {other:?}"),
        }
    }

    #[test]
    fn assignment() {
        let p = parse_program("x := 1").unwrap();
        let [Expr::Assign(x, e)] = p.stmts.as_slice() else {
            panic!("{p:?}")
        };
        assert_eq!(x.name, "x");
        assert_eq!(**e, Expr::Num(1));
    }

    #[test]
    fn sequence_of_assignments() {
        let p = parse_program("x := 1; y := x + 2").unwrap();
        assert_eq!(p.stmts.len(), 2);
        let Expr::Assign(y, e) = &p.stmts[1] else {
            panic!()
        };
        assert_eq!(y.name, "y");
        let Expr::Add(a, b) = &**e else { panic!() };
        assert_eq!(var(a), "x");
        assert_eq!(**b, Expr::Num(2));
    }

    #[test]
    fn assignment_as_argument() {
        let p = parse_program("f(x := 1, x)").unwrap();
        let [Expr::App(f, args)] = p.stmts.as_slice() else {
            panic!()
        };
        assert_eq!(f, "f");
        assert!(matches!(args[0], Expr::Assign(..)));
        assert_eq!(var(&args[1]), "x");
        assert_eq!(p.to_string(), "f(x := 1, x)");
    }

    #[test]
    fn precedence_round_trips() {
        for src in [
            "1 + 2 * 3",
            "(1 + 2) * 3",
            "f(x := 2 * 3, y)",
            "1 + (2 + 3)",
        ] {
            assert_eq!(parse_program(src).unwrap().to_string(), src);
        }
    }

    #[test]
    fn errors_are_located() {
        let Err(Error::Parse(e)) = parse_program("x := 1;\n  y +") else {
            panic!()
        };
        assert_eq!((e.line, e.column), (2, 6));
        let Err(Error::Parse(e)) = parse_program("x ? 1") else {
            panic!()
        };
        assert_eq!((e.line, e.column), (1, 3));
    }

    #[test]
    fn unknown_variables_are_rejected() {
        let declared: BTreeSet<String> = ["x".to_string()].into();
        let Err(Error::Parse(e)) = parse_program_in("x := 1; y", &declared) else {
            panic!()
        };
        assert_eq!((e.line, e.column), (1, 9));
        assert!(e.message.contains("`y`"));
    }

    #[test]
    fn ill_typed_programs_are_rejected() {
        assert!(matches!(parse_program("(x := 1) + 2"), Err(Error::Type(_))));
    }

    #[test]
    fn decoration_propagates() {
        assert!(!parse_program("1 + 2").unwrap().stmts[0].is_modifier());
        assert!(parse_program("x + 1").unwrap().stmts[0].is_modifier());
        assert!(parse_program("x := 1").unwrap().stmts[0].is_modifier());
    }
}
