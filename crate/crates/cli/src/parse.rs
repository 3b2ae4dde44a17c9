//! Expression parser for bivariate polynomials over the complex numbers.
//!
//! Grammar (no implicit multiplication, `^` wants a nonnegative integer):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := number | number'i' | 'i' | 'x' | 'y' | '(' expr ')'
//! ```
//!
//! `2i` is the imaginary literal two-i; `i` alone is the imaginary unit.
//! Errors carry the byte offset of the offending token and what was
//! expected there.

use thiserror::Error;
use varsep::polynomial::{BivariatePoly, PolyError, MAX_DEGREE};
use varsep::Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("term at byte {offset} exceeds the supported total degree {MAX_DEGREE}")]
    DegreeOverflow { offset: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TokenKind {
    /// Real literal; the flag records whether it was written as a plain
    /// integer and so may follow `^`.
    Number(f64, bool),
    /// Real literal immediately followed by `i`, e.g. `2i` or `0.5i`.
    Imaginary(f64),
    ImagUnit,
    VarX,
    VarY,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

/// One lexed token with its byte range in the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenSpan {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

/// A successfully parsed expression: the raw text, its tokens, and the
/// expanded coefficient grid.
#[derive(Debug, Clone)]
pub struct ParsedExpression {
    pub source: String,
    pub tokens: Vec<TokenSpan>,
    pub poly: BivariatePoly,
}

fn lex(src: &str) -> Result<Vec<TokenSpan>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let start = pos;
        let b = bytes[pos];
        let kind = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                pos += 1;
                continue;
            }
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'^' => TokenKind::Caret,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'x' => TokenKind::VarX,
            b'y' => TokenKind::VarY,
            b'i' => TokenKind::ImagUnit,
            b'0'..=b'9' => {
                let mut end = pos;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                let mut integer = true;
                if end < bytes.len() && bytes[end] == b'.' {
                    integer = false;
                    end += 1;
                    while end < bytes.len() && bytes[end].is_ascii_digit() {
                        end += 1;
                    }
                }
                // Exponent part, only when digits actually follow.
                if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                    let mut probe = end + 1;
                    if probe < bytes.len() && (bytes[probe] == b'+' || bytes[probe] == b'-') {
                        probe += 1;
                    }
                    if probe < bytes.len() && bytes[probe].is_ascii_digit() {
                        integer = false;
                        end = probe;
                        while end < bytes.len() && bytes[end].is_ascii_digit() {
                            end += 1;
                        }
                    }
                }
                let value: f64 = src[pos..end].parse().map_err(|_| ParseError::Syntax {
                    offset: pos,
                    expected: "a numeric literal".into(),
                    found: format!("{:?}", &src[pos..end]),
                })?;
                if end < bytes.len() && bytes[end] == b'i' {
                    end += 1;
                    toks.push(TokenSpan {
                        kind: TokenKind::Imaginary(value),
                        start,
                        end,
                    });
                } else {
                    toks.push(TokenSpan {
                        kind: TokenKind::Number(value, integer),
                        start,
                        end,
                    });
                }
                pos = end;
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    offset: pos,
                    expected: "a number, 'i', 'x', 'y', an operator, or a parenthesis".into(),
                    found: format!("'{}'", other as char),
                })
            }
        };
        pos += 1;
        toks.push(TokenSpan {
            kind,
            start,
            end: pos,
        });
    }
    Ok(toks)
}

fn describe(kind: TokenKind) -> String {
    match kind {
        TokenKind::Number(v, _) => format!("number {v}"),
        TokenKind::Imaginary(v) => format!("imaginary literal {v}i"),
        TokenKind::ImagUnit => "'i'".into(),
        TokenKind::VarX => "'x'".into(),
        TokenKind::VarY => "'y'".into(),
        TokenKind::Plus => "'+'".into(),
        TokenKind::Minus => "'-'".into(),
        TokenKind::Star => "'*'".into(),
        TokenKind::Caret => "'^'".into(),
        TokenKind::LParen => "'('".into(),
        TokenKind::RParen => "')'".into(),
    }
}

struct Parser<'a> {
    toks: &'a [TokenSpan],
    pos: usize,
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&TokenSpan> {
        self.toks.get(self.pos)
    }

    fn syntax(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::Syntax {
                offset: t.start,
                expected: expected.into(),
                found: describe(t.kind),
            },
            None => ParseError::Syntax {
                offset: self.src_len,
                expected: expected.into(),
                found: "end of input".into(),
            },
        }
    }

    fn overflow_at(&self, offset: usize) -> impl Fn(PolyError) -> ParseError {
        move |_| ParseError::DegreeOverflow { offset }
    }

    fn expr(&mut self) -> Result<BivariatePoly, ParseError> {
        let mut acc = self.term()?;
        while let Some(&TokenSpan { kind, start, .. }) = self.peek() {
            let sub = match kind {
                TokenKind::Plus => false,
                TokenKind::Minus => true,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = if sub {
                acc.sub(&rhs).map_err(self.overflow_at(start))?
            } else {
                acc.add(&rhs).map_err(self.overflow_at(start))?
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BivariatePoly, ParseError> {
        let mut acc = self.unary()?;
        while let Some(&TokenSpan {
            kind: TokenKind::Star,
            start,
            ..
        }) = self.peek()
        {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = acc.mul(&rhs).map_err(self.overflow_at(start))?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<BivariatePoly, ParseError> {
        if let Some(&TokenSpan {
            kind: TokenKind::Minus,
            ..
        }) = self.peek()
        {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<BivariatePoly, ParseError> {
        let base = self.atom()?;
        let Some(&TokenSpan {
            kind: TokenKind::Caret,
            start,
            ..
        }) = self.peek()
        else {
            return Ok(base);
        };
        self.pos += 1;
        let Some(&TokenSpan {
            kind: TokenKind::Number(v, true),
            start: nstart,
            ..
        }) = self.peek()
        else {
            return Err(self.syntax("a nonnegative integer exponent"));
        };
        self.pos += 1;
        if v > MAX_DEGREE as f64 {
            return Err(ParseError::DegreeOverflow { offset: nstart });
        }
        base.powi(v as u32).map_err(self.overflow_at(start))
    }

    fn atom(&mut self) -> Result<BivariatePoly, ParseError> {
        let Some(&TokenSpan { kind, .. }) = self.peek() else {
            return Err(self.syntax("a number, 'i', 'x', 'y', '-', or '('"));
        };
        let poly =
            match kind {
                TokenKind::Number(v, _) => {
                    BivariatePoly::constant(Complex64::new(v, 0.0)).expect("finite literal")
                }
                TokenKind::Imaginary(v) => {
                    BivariatePoly::constant(Complex64::new(0.0, v)).expect("finite literal")
                }
                TokenKind::ImagUnit => {
                    BivariatePoly::constant(Complex64::new(0.0, 1.0)).expect("finite literal")
                }
                TokenKind::VarX => BivariatePoly::from_terms([((1, 0), Complex64::new(1.0, 0.0))])
                    .expect("monomial"),
                TokenKind::VarY => BivariatePoly::from_terms([((0, 1), Complex64::new(1.0, 0.0))])
                    .expect("monomial"),
                TokenKind::LParen => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    let Some(&TokenSpan {
                        kind: TokenKind::RParen,
                        ..
                    }) = self.peek()
                    else {
                        return Err(self.syntax("')'"));
                    };
                    self.pos += 1;
                    return Ok(inner);
                }
                _ => return Err(self.syntax("a number, 'i', 'x', 'y', '-', or '('")),
            };
        self.pos += 1;
        Ok(poly)
    }
}

/// Parses an expression into its dense coefficient grid.
pub fn parse_poly(text: &str) -> Result<ParsedExpression, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        toks: &tokens,
        pos: 0,
        src_len: text.len(),
    };
    let poly = parser.expr()?;
    if parser.pos != tokens.len() {
        return Err(parser.syntax("an operator or end of input"));
    }
    Ok(ParsedExpression {
        source: text.to_string(),
        tokens,
        poly,
    })
}

/// Canonical textual form: one `( re+imi )*x^i*y^j` factor per nonzero
/// coefficient in row-major order, joined with ` + `. Re-parsing the
/// result reproduces the coefficient grid exactly, because float literals
/// are printed in shortest round-trip form.
pub fn pretty(f: &BivariatePoly) -> String {
    if f.is_zero() {
        return "(0+0i)".to_string();
    }
    let mut parts = Vec::new();
    for ((i, j), c) in f.terms() {
        let sign = if c.im.is_sign_negative() { '-' } else { '+' };
        let mut s = format!("({}{}{}i)", c.re, sign, c.im.abs());
        if i == 1 {
            s.push_str("*x");
        } else if i > 1 {
            s.push_str(&format!("*x^{i}"));
        }
        if j == 1 {
            s.push_str("*y");
        } else if j > 1 {
            s.push_str(&format!("*y^{j}"));
        }
        parts.push(s);
    }
    parts.join(" + ")
}
