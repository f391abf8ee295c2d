use std::fmt;

use super::ExprError;

/// A variable of the DSL: time `t` or the k-th derivative `xk` of the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Time,
    State(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Time => write!(f, "t"),
            Var::State(k) => write!(f, "x{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tanh => x.tanh(),
            Func::Exp => x.exp(),
            Func::Ln => {
                if x > 0.0 {
                    x.ln()
                } else {
                    f64::NAN
                }
            }
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
        }
    }
}

/// Parsed expression tree. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Variable bindings for evaluation: time plus the state vector `x0..x(n-1)`.
#[derive(Debug, Clone, Copy)]
pub struct Env<'a> {
    pub t: f64,
    pub x: &'a [f64],
}

impl<'a> Env<'a> {
    pub fn new(t: f64, x: &'a [f64]) -> Self {
        Self { t, x }
    }

    pub fn get(&self, var: Var) -> Option<f64> {
        match var {
            Var::Time => Some(self.t),
            Var::State(k) => self.x.get(k).copied(),
        }
    }
}

impl Expr {
    /// Evaluates in IEEE-754 double precision. Any non-finite intermediate
    /// value is an error naming the offending node.
    pub fn eval(&self, env: &Env<'_>) -> Result<f64, ExprError> {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var(v) => env
                .get(*v)
                .ok_or_else(|| ExprError::Unbound { name: v.to_string() })?,
            Expr::Neg(inner) => -inner.eval(env)?,
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval(env)?;
                let b = rhs.eval(env)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(func, arg) => func.apply(arg.eval(env)?),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ExprError::NonFinite {
                at: self.to_string(),
            })
        }
    }

    /// Central finite difference of the expression with respect to `var`,
    /// using the step `h = eps * max(1, |value of var|)`.
    pub fn partial_fd(&self, var: Var, env: &Env<'_>, eps: f64) -> Result<f64, ExprError> {
        let v = env
            .get(var)
            .ok_or_else(|| ExprError::Unbound { name: var.to_string() })?;
        let h = eps * v.abs().max(1.0);
        let shifted = |value: f64| -> Result<f64, ExprError> {
            match var {
                Var::Time => self.eval(&Env::new(value, env.x)),
                Var::State(k) => {
                    let mut x = env.x.to_vec();
                    x[k] = value;
                    self.eval(&Env::new(env.t, &x))
                }
            }
        };
        let plus = shifted(v + h)?;
        let minus = shifted(v - h)?;
        Ok((plus - minus) / (2.0 * h))
    }

    /// Visits every variable occurring in the tree.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Highest state index referenced, if any.
    pub fn max_state_index(&self) -> Option<usize> {
        self.variables()
            .into_iter()
            .filter_map(|v| match v {
                Var::State(k) => Some(k),
                Var::Time => None,
            })
            .max()
    }
}

// Fully parenthesized so the printed form re-parses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}
