//! Arithmetic expression DSL for drift and diffusion coefficients.
//!
//! Variables are `t` (time) and `x0..x{n-1}`, where `x0` is the position and
//! `xk` its k-th time derivative. Functions: `sin cos tanh exp ln sqrt abs`.
//! The full grammar is in `docs/grammar.md` at the repository root.

mod ast;
mod lexer;
mod parser;

pub use ast::{BinOp, Env, Expr, Func, Var};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("unexpected character {character:?} at byte {position}")]
    Lex { position: usize, character: char },
    #[error("parse error at byte {position}: expected {expected}")]
    Parse { position: usize, expected: String },
    #[error("unknown variable `{name}`")]
    UnknownVariable { name: String },
    #[error("unknown function `{name}`")]
    UnknownFunction { name: String },
    #[error("non-finite value at `{at}`")]
    NonFinite { at: String },
    #[error("variable `{name}` is not bound")]
    Unbound { name: String },
}

/// Tokenizes and parses `source` in one go.
pub fn parse_str(source: &str, order: usize) -> Result<Expr, ExprError> {
    parse(&tokenize(source)?, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_expr(order: usize) -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..1e6).prop_map(Expr::Const),
            Just(Expr::Var(Var::Time)),
            (0..order).prop_map(|k| Expr::Var(Var::State(k))),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            let op = prop_oneof![
                Just(BinOp::Add),
                Just(BinOp::Sub),
                Just(BinOp::Mul),
                Just(BinOp::Div),
                Just(BinOp::Pow),
            ];
            let func = prop_oneof![
                Just(Func::Sin),
                Just(Func::Cos),
                Just(Func::Tanh),
                Just(Func::Exp),
                Just(Func::Ln),
                Just(Func::Sqrt),
                Just(Func::Abs),
            ];
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (op, inner.clone(), inner.clone())
                    .prop_map(|(op, a, b)| Expr::Binary(op, Box::new(a), Box::new(b))),
                (func, inner).prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
            ]
        })
    }

    proptest! {
        #[test]
        fn printed_tree_reparses_identically(e in arb_expr(3)) {
            let printed = e.to_string();
            let back = parse_str(&printed, 3).unwrap();
            prop_assert_eq!(back, e);
        }

        #[test]
        fn eval_is_bit_deterministic(e in arb_expr(2), t in -2.0f64..2.0, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let x = [a, b];
            let env = Env::new(t, &x);
            let first = e.eval(&env).map(f64::to_bits);
            let second = e.eval(&env).map(f64::to_bits);
            prop_assert_eq!(first, second);
        }

        #[test]
        fn quadratic_partials_match_analytic(
            c0 in -5.0f64..5.0, c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, x in -10.0f64..10.0,
        ) {
            let src = format!("{c0:?} + {c1:?}*x0 + {c2:?}*x0^2");
            let e = parse_str(&src, 1).unwrap();
            let fd = e.partial_fd(Var::State(0), &Env::new(0.0, &[x]), 1e-6).unwrap();
            let exact = c1 + 2.0 * c2 * x;
            let scale = exact.abs().max(1.0);
            prop_assert!((fd - exact).abs() <= 1e-6 * scale, "fd {} vs {}", fd, exact);
        }
    }

    #[test]
    fn corpus_round_trips() {
        let corpus = [
            "0",
            "1",
            "x0",
            "0-x0",
            "2+tanh(x0)",
            "t-0.5",
            "x0 + 2*t",
            "-x1^2 / (1 + exp(-t))",
            "sqrt(abs(x0)) * cos(3*t) - ln(2 + x1^2)",
            "2^3^2",
            "1e-3*x2",
        ];
        for src in corpus {
            let e = parse_str(src, 3).unwrap();
            assert_eq!(parse_str(&e.to_string(), 3).unwrap(), e, "{src}");
        }
    }
}
