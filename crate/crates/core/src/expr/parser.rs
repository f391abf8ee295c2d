//! Recursive-descent parser.
//!
//! ```text
//! expr    = term { ("+" | "-") term }
//! term    = unary { ("*" | "/") unary }
//! unary   = "-" unary | power
//! power   = primary [ "^" unary ]
//! primary = number | variable | function "(" expr ")" | "(" expr ")"
//! ```

use super::ast::{BinOp, Expr, Func, Var};
use super::lexer::{Token, TokenKind};
use super::ExprError;

/// Parses a token stream for an equation of the given order. Only `t` and
/// `x0..x{order-1}` are legal variables.
pub fn parse(tokens: &[Token], order: usize) -> Result<Expr, ExprError> {
    let end = tokens
        .last()
        .map(|t| t.position + t.lexeme.len())
        .unwrap_or(0);
    let mut parser = Parser {
        tokens,
        pos: 0,
        order,
        end,
    };
    let expr = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(ExprError::Parse {
            position: tok.position,
            expected: "operator or end of input".into(),
        });
    }
    Ok(expr)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    order: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self, ops: &[&str]) -> Option<&'a str> {
        self.peek()
            .filter(|t| t.kind == TokenKind::Operator && ops.contains(&t.lexeme.as_str()))
            .map(|t| t.lexeme.as_str())
    }

    fn here(&self) -> usize {
        self.peek().map(|t| t.position).unwrap_or(self.end)
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<(), ExprError> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ExprError::Parse {
                position: self.here(),
                expected: what.into(),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(op) = self.peek_op(&["+", "-"]) {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if op == "+" { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek_op(&["*", "/"]) {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if op == "*" { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek_op(&["-"]).is_some() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.peek_op(&["^"]).is_some() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let Some(tok) = self.peek() else {
            return Err(ExprError::Parse {
                position: self.end,
                expected: "number, variable, function or '('".into(),
            });
        };
        match tok.kind {
            TokenKind::Number => {
                self.pos += 1;
                // The lexer guarantees a finite literal.
                Ok(Expr::Const(tok.lexeme.parse().unwrap()))
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(TokenKind::RParen, "')'")?;
                Ok(inner)
            }
            TokenKind::Ident => {
                self.pos += 1;
                let is_call = matches!(self.peek(), Some(t) if t.kind == TokenKind::LParen);
                if is_call {
                    let func = Func::from_name(&tok.lexeme).ok_or_else(|| {
                        ExprError::UnknownFunction {
                            name: tok.lexeme.clone(),
                        }
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(TokenKind::RParen, "')'")?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else {
                    self.variable(tok)
                }
            }
            _ => Err(ExprError::Parse {
                position: tok.position,
                expected: "number, variable, function or '('".into(),
            }),
        }
    }

    fn variable(&self, tok: &Token) -> Result<Expr, ExprError> {
        let name = tok.lexeme.as_str();
        if name == "t" {
            return Ok(Expr::Var(Var::Time));
        }
        if Func::from_name(name).is_some() {
            return Err(ExprError::Parse {
                position: tok.position + name.len(),
                expected: "'(' after function name".into(),
            });
        }
        let index = name
            .strip_prefix('x')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .filter(|d| d.len() == 1 || !d.starts_with('0'))
            .and_then(|d| d.parse::<usize>().ok());
        match index {
            Some(k) if k < self.order => Ok(Expr::Var(Var::State(k))),
            _ => Err(ExprError::UnknownVariable {
                name: name.to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse_str, Env, ExprError};

    fn value(src: &str) -> f64 {
        parse_str(src, 2)
            .unwrap()
            .eval(&Env::new(0.0, &[0.0, 0.0]))
            .unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(value("1+2*3"), 7.0);
        assert_eq!(value("(1+2)*3"), 9.0);
        assert_eq!(value("8-2-1"), 5.0);
        assert_eq!(value("8/4/2"), 1.0);
    }

    #[test]
    fn power_is_right_associative() {
        assert_eq!(value("2^3^2"), 512.0);
    }

    #[test]
    fn power_binds_tighter_than_negation() {
        assert_eq!(value("-2^2"), -4.0);
        assert_eq!(value("2^-1"), 0.5);
        assert_eq!(value("--3"), 3.0);
    }

    #[test]
    fn variable_outside_order() {
        assert_eq!(
            parse_str("x2", 2),
            Err(ExprError::UnknownVariable { name: "x2".into() })
        );
        assert!(parse_str("x1", 2).is_ok());
        assert!(matches!(
            parse_str("y", 2),
            Err(ExprError::UnknownVariable { .. })
        ));
        assert!(matches!(
            parse_str("x01", 2),
            Err(ExprError::UnknownVariable { .. })
        ));
    }

    #[test]
    fn unknown_function() {
        assert_eq!(
            parse_str("erf(x0)", 1),
            Err(ExprError::UnknownFunction { name: "erf".into() })
        );
    }

    #[test]
    fn malformed_inputs() {
        for src in ["", "1+", "(1", "1)", "sin x0", "sin(1,2)", "* 2", "1 2"] {
            assert!(
                matches!(parse_str(src, 1), Err(ExprError::Parse { .. })),
                "{src} should fail to parse"
            );
        }
    }

    #[test]
    fn error_positions() {
        assert_eq!(
            parse_str("1 + * 2", 1),
            Err(ExprError::Parse {
                position: 4,
                expected: "number, variable, function or '('".into()
            })
        );
    }
}
