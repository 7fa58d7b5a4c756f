//! Text grammar for jet polynomials, shared by the CLI and JSON reports.
//!
//! Variables `x0`, `x1`, ... denote `x`, `x'`, `x''`, ...; a tuple index is
//! attached as a suffix, `x0_1`. Terms look like `3*x1^2*x0` and are joined
//! by `+` / `-`; whitespace is insignificant. `parse(print(f)) == f` holds
//! for exact polynomials.

use num_bigint::BigInt;
use num_traits::One;

use super::{Coeff, DeltaPolynomial, JetVariable, Monomial};
use crate::arith::PrimeContext;
use crate::error::{Error, Result};

struct Lexer<'a> {
    input: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Caret,
    Int(BigInt),
    Var(JetVariable),
    End,
}

impl<'a> Lexer<'a> {
    fn new(input: &'a str) -> Self {
        Lexer {
            input: input.as_bytes(),
            pos: 0,
        }
    }

    fn next(&mut self) -> Result<Token> {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.input.len() {
            return Ok(Token::End);
        }
        let c = self.input[self.pos];
        match c {
            b'+' => {
                self.pos += 1;
                Ok(Token::Plus)
            }
            b'-' => {
                self.pos += 1;
                Ok(Token::Minus)
            }
            b'*' => {
                self.pos += 1;
                Ok(Token::Star)
            }
            b'^' => {
                self.pos += 1;
                Ok(Token::Caret)
            }
            b'0'..=b'9' => {
                let start = self.pos;
                while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
                Ok(Token::Int(s.parse().unwrap()))
            }
            b'x' => {
                self.pos += 1;
                let order = self.read_number("jet order after 'x'")?;
                let base = if self.pos < self.input.len() && self.input[self.pos] == b'_' {
                    self.pos += 1;
                    self.read_number("tuple index after '_'")?
                } else {
                    0
                };
                Ok(Token::Var(JetVariable::new(base, order)))
            }
            other => Err(Error::Parse(format!(
                "unexpected character '{}' at position {}",
                other as char, self.pos
            ))),
        }
    }

    fn read_number(&mut self, what: &str) -> Result<u16> {
        let start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!("expected {}", what)));
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse(format!("{} out of range", what)))
    }
}

/// Parses the polynomial grammar into an exact-coefficient polynomial.
pub fn parse(input: &str, ctx: PrimeContext) -> Result<DeltaPolynomial> {
    let mut lx = Lexer::new(input);
    let mut out = DeltaPolynomial::zero(ctx);
    let mut tok = lx.next()?;
    if tok == Token::End {
        return Err(Error::Parse("empty polynomial".into()));
    }
    loop {
        // sign
        let mut sign = BigInt::one();
        loop {
            match tok {
                Token::Plus => {}
                Token::Minus => sign = -sign,
                _ => break,
            }
            tok = lx.next()?;
        }
        // term: factors separated by '*'
        let mut coeff = sign;
        let mut mono = Monomial::one();
        let mut saw_factor = false;
        loop {
            match &tok {
                Token::Int(n) => {
                    coeff *= n.clone();
                    tok = lx.next()?;
                }
                Token::Var(v) => {
                    let v = *v;
                    tok = lx.next()?;
                    let e = if tok == Token::Caret {
                        match lx.next()? {
                            Token::Int(n) => {
                                tok = lx.next()?;
                                u64::try_from(n)
                                    .map_err(|_| Error::Parse("exponent out of range".into()))?
                            }
                            _ => return Err(Error::Parse("expected exponent after '^'".into())),
                        }
                    } else {
                        1
                    };
                    mono = mono.mul(&Monomial::var_pow(v, e));
                }
                _ => {
                    if !saw_factor {
                        return Err(Error::Parse("expected a term".into()));
                    }
                    break;
                }
            }
            saw_factor = true;
            if tok == Token::Star {
                tok = lx.next()?;
            } else {
                break;
            }
        }
        out = out.add(&DeltaPolynomial::monomial(mono, Coeff::Int(coeff), ctx));
        match tok {
            Token::End => break,
            Token::Plus | Token::Minus => {}
            _ => return Err(Error::Parse("expected '+', '-' or end of input".into())),
        }
    }
    Ok(out)
}

/// Prints in the same grammar; inverse of `parse` on exact polynomials.
pub fn print(f: &DeltaPolynomial) -> String {
    f.to_string()
}
