//! State-passing evaluation of mini-language programs.

use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::program::{Expr, Program};
use crate::error::{Error, Result};

pub const DEFAULT_MODULUS: u64 = 1 << 16;

/// Evaluation order of the arguments of an application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    /// First argument first.
    #[default]
    Left,
    /// Last argument first.
    Right,
}

impl std::str::FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Order::Left),
            "right" => Ok(Order::Right),
            _ => Err(Error::Unknown {
                kind: "order",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(u64),
    Unit,
    Tuple(Vec<Value>),
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Int(n) => s.serialize_u64(*n),
            Value::Unit => s.serialize_unit(),
            Value::Tuple(vs) => {
                let mut seq = s.serialize_seq(Some(vs.len()))?;
                for v in vs {
                    seq.serialize_element(v)?;
                }
                seq.end()
            }
        }
    }
}

/// A total map from the declared variables to values.
pub type State = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Event {
    Lookup { var: String, value: u64 },
    Assign { var: String, value: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub final_state: State,
    pub value: Value,
    pub trace: Vec<Event>,
}

struct Machine {
    state: State,
    trace: Vec<Event>,
    order: Order,
    modulus: u64,
}

impl Machine {
    fn int(&mut self, e: &Expr) -> Result<u64> {
        match self.eval(e)? {
            Value::Int(n) => Ok(n),
            v => Err(Error::Type(format!(
                "`{e}` evaluated to {v:?}, expected an integer"
            ))),
        }
    }

    fn operands(&mut self, a: &Expr, b: &Expr) -> Result<(u128, u128)> {
        let (x, y) = match self.order {
            Order::Left => {
                let x = self.int(a)?;
                (x, self.int(b)?)
            }
            Order::Right => {
                let y = self.int(b)?;
                (self.int(a)?, y)
            }
        };
        Ok((x as u128, y as u128))
    }

    fn eval(&mut self, e: &Expr) -> Result<Value> {
        let m = self.modulus as u128;
        match e {
            Expr::Num(n) => Ok(Value::Int(n % self.modulus)),
            Expr::Var(x) => {
                let value = *self
                    .state
                    .get(&x.name)
                    .ok_or_else(|| Error::Type(format!("unbound variable `{}`", x.name)))?;
                self.trace.push(Event::Lookup {
                    var: x.name.clone(),
                    value,
                });
                Ok(Value::Int(value))
            }
            Expr::Add(a, b) => {
                let (x, y) = self.operands(a, b)?;
                Ok(Value::Int(((x + y) % m) as u64))
            }
            Expr::Mul(a, b) => {
                let (x, y) = self.operands(a, b)?;
                Ok(Value::Int(((x * y) % m) as u64))
            }
            Expr::App(_, args) => {
                let mut values = vec![Value::Unit; args.len()];
                let indices: Vec<usize> = match self.order {
                    Order::Left => (0..args.len()).collect(),
                    Order::Right => (0..args.len()).rev().collect(),
                };
                for i in indices {
                    values[i] = self.eval(&args[i])?;
                }
                Ok(Value::Tuple(values))
            }
            Expr::Assign(x, e) => {
                let value = self.int(e)?;
                if !self.state.contains_key(&x.name) {
                    return Err(Error::Type(format!("unbound variable `{}`", x.name)));
                }
                self.state.insert(x.name.clone(), value);
                self.trace.push(Event::Assign {
                    var: x.name.clone(),
                    value,
                });
                Ok(Value::Unit)
            }
        }
    }
}

/// The initial state: the given values, and 0 for every other program variable.
pub fn initial_state(program: &Program, given: &State, modulus: u64) -> State {
    let mut state: State = given
        .iter()
        .map(|(k, v)| (k.clone(), v % modulus))
        .collect();
    for x in program.variables() {
        state.entry(x).or_insert(0);
    }
    state
}

pub fn evaluate_program(
    program: &Program,
    state: &State,
    order: Order,
    modulus: u64,
) -> Result<Outcome> {
    if modulus == 0 {
        return Err(Error::Type("the modulus must be positive".into()));
    }
    let mut machine = Machine {
        state: initial_state(program, state, modulus),
        trace: Vec::new(),
        order,
        modulus,
    };
    let mut value = Value::Unit;
    for s in &program.stmts {
        value = machine.eval(s)?;
    }
    Ok(Outcome {
        final_state: machine.state,
        value,
        trace: machine.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effects::parse_program;

    fn run(src: &str, order: Order) -> Outcome {
        evaluate_program(
            &parse_program(src).unwrap(),
            &State::new(),
            order,
            DEFAULT_MODULUS,
        )
        .unwrap()
    }

    #[test]
    fn assignment_then_lookup() {
        let out = run("x := 1; x + 2", Order::Left);
        assert_eq!(out.final_state["x"], 1);
        assert_eq!(out.value, Value::Int(3));
    }

    #[test]
    fn pure_programs_leave_the_state() {
        let out = run("1 + 2", Order::Left);
        assert!(out.final_state.is_empty());
        assert!(out.trace.is_empty());
        assert_eq!(out.value, Value::Int(3));
    }

    #[test]
    fn argument_order_is_observable() {
        let left = run("f(x := 1, x)", Order::Left);
        let right = run("f(x := 1, x)", Order::Right);
        assert_eq!(left.value, Value::Tuple(vec![Value::Unit, Value::Int(1)]));
        assert_eq!(right.value, Value::Tuple(vec![Value::Unit, Value::Int(0)]));
        assert_eq!(left.final_state, right.final_state);
    }

    #[test]
    fn arithmetic_wraps() {
        let p = parse_program("x := 7; x * 3 + 1").unwrap();
        let out = evaluate_program(&p, &State::new(), Order::Left, 16).unwrap();
        assert_eq!(out.value, Value::Int(6));
    }

    #[test]
    fn outcome_serializes() {
        let out = run("f(x := 1, x)", Order::Left);
        assert_eq!(
            serde_json::to_string(&out).unwrap(),
            r#"{"final_state":{"x":1},"value":[null,1],"trace":[{"op":"assign","var":"x","value":1},{"op":"lookup","var":"x","value":1}]}"#
        );
    }
}
