use super::ExprError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Ident,
    Operator,
    LParen,
    RParen,
    Comma,
}

/// A lexeme together with its byte offset in the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub position: usize,
}

impl Token {
    fn new(kind: TokenKind, lexeme: &str, position: usize) -> Self {
        Self {
            kind,
            lexeme: lexeme.to_string(),
            position,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `source` into tokens.
///
/// Numbers are decimal literals with an optional fraction and exponent
/// (`2`, `0.5`, `.5`, `1e-3`). A number immediately followed by an
/// identifier character is rejected: there is no implicit multiplication.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;

    while pos < source.len() {
        let c = source[pos..].chars().next().unwrap();
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        let start = pos;
        match c {
            '+' | '-' | '*' | '/' | '^' => {
                tokens.push(Token::new(TokenKind::Operator, &source[start..start + 1], start));
                pos += 1;
            }
            '(' => {
                tokens.push(Token::new(TokenKind::LParen, "(", start));
                pos += 1;
            }
            ')' => {
                tokens.push(Token::new(TokenKind::RParen, ")", start));
                pos += 1;
            }
            ',' => {
                tokens.push(Token::new(TokenKind::Comma, ",", start));
                pos += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                pos = scan_number(bytes, start)?;
                let lexeme = &source[start..pos];
                match lexeme.parse::<f64>() {
                    Ok(v) if v.is_finite() => {}
                    _ => {
                        return Err(ExprError::Lex {
                            position: start,
                            character: c,
                        })
                    }
                }
                if let Some(next) = source[pos..].chars().next() {
                    if is_ident_start(next) || next == '.' {
                        return Err(ExprError::Lex {
                            position: pos,
                            character: next,
                        });
                    }
                }
                tokens.push(Token::new(TokenKind::Number, lexeme, start));
            }
            c if is_ident_start(c) => {
                while pos < bytes.len() && is_ident_continue(bytes[pos] as char) {
                    pos += 1;
                }
                tokens.push(Token::new(TokenKind::Ident, &source[start..pos], start));
            }
            other => {
                return Err(ExprError::Lex {
                    position: start,
                    character: other,
                })
            }
        }
    }
    Ok(tokens)
}

fn scan_number(bytes: &[u8], start: usize) -> Result<usize, ExprError> {
    let mut pos = start;
    let digits = |pos: &mut usize| {
        let from = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        *pos - from
    };
    let mut mantissa = digits(&mut pos);
    if pos < bytes.len() && bytes[pos] == b'.' {
        pos += 1;
        mantissa += digits(&mut pos);
    }
    if mantissa == 0 {
        return Err(ExprError::Lex {
            position: start,
            character: bytes[start] as char,
        });
    }
    if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
        let mut probe = pos + 1;
        if probe < bytes.len() && (bytes[probe] == b'+' || bytes[probe] == b'-') {
            probe += 1;
        }
        if digits(&mut probe) == 0 {
            // `2e` or `2ex`: the exponent marker is an illegal trailing identifier.
            return Err(ExprError::Lex {
                position: pos,
                character: bytes[pos] as char,
            });
        }
        pos = probe;
    }
    Ok(pos)
}
