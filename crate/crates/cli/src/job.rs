//! Job files: a field line, a vars line, then generator and boundary statements.
//!
//! ```text
//! field F_3
//! vars y | u1 u2
//! f = y^3 + y*u1^36*u2^36 + u1^2*u2*(u1+u2)^12
//! boundary E : u1 old
//! ```

use std::fmt;
use std::sync::Arc;

use charpoly::algebra::field::THETA;
use charpoly::algebra::{FieldSpec, Frame, Polynomial};
use charpoly::charpoly::{BoundaryComponent, Label};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobFile {
    pub frame: Arc<Frame>,
    pub generators: Vec<(String, Polynomial)>,
    pub boundary: Vec<BoundaryComponent>,
}

impl JobFile {
    pub fn label(&self) -> Result<Label> {
        if self.generators.is_empty() {
            return Err(CliError::Usage("the job declares no generators".into()));
        }
        let gens = self.generators.iter().map(|(_, g)| g.clone()).collect();
        Ok(Label::new(&self.frame, gens, self.boundary.clone())?)
    }
}

impl fmt::Display for JobFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field {}", self.frame.field)?;
        writeln!(
            f,
            "vars {} | {}",
            self.frame.y.join(" "),
            self.frame.u.join(" ")
        )?;
        for (name, g) in &self.generators {
            writeln!(f, "{name} = {g}")?;
        }
        for b in &self.boundary {
            let age = if b.old { "old" } else { "new" };
            writeln!(f, "boundary {} : {} {age}", b.id, b.l)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(line: usize, text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Ident(s),
                col,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse::<BigInt>().expect("digits");
            out.push(Token {
                tok: Tok::Int(n),
                col,
            });
        } else if "+-*/^()=:|[]".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                col,
            });
            i += 1;
        } else {
            return Err(CliError::Syntax {
                line,
                col,
                expected: format!("a token, found {c:?}"),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Expr {
    Int(BigInt),
    Var { name: String, col: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, u32),
}

const KEYWORDS: [&str; 2] = ["old", "new"];

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
    end: usize,
}

impl Cursor {
    fn new(line: usize, text: &str) -> Result<Self> {
        let toks = lex(line, text)?;
        let end = text.chars().count() + 1;
        Ok(Cursor {
            toks,
            pos: 0,
            line,
            end,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.col)
    }

    fn fail<T>(&self, expected: &str) -> Result<T> {
        Err(CliError::Syntax {
            line: self.line,
            col: self.col(),
            expected: expected.into(),
        })
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&format!("'{c}'"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail(what),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(&format!("'{kw}'")),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.fail("end of line")
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => !KEYWORDS.contains(&s.as_str()),
            Some(Tok::Int(_)) | Some(Tok::Sym('(')) => true,
            _ => false,
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = if self.eat('-') {
            Expr::Neg(Box::new(self.product()?))
        } else {
            self.eat('+');
            self.product()?
        };
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.product()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.product()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.power()?;
        loop {
            if self.eat('*') {
                e = Expr::Mul(Box::new(e), Box::new(self.power()?));
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let col = self.col();
                self.pos += 1;
                e = Expr::Div(Box::new(e), Box::new(self.power()?), col);
            } else if self.starts_atom() {
                e = Expr::Mul(Box::new(e), Box::new(self.power()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        match self.peek() {
            Some(Tok::Int(n)) => match n.to_u32() {
                Some(k) => {
                    self.pos += 1;
                    Ok(Expr::Pow(Box::new(base), k))
                }
                None => self.fail("an exponent below 2^32"),
            },
            _ => self.fail("a non-negative integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        if !self.starts_atom() {
            return self.fail("a number, a variable or '('");
        }
        let t = self.bump().expect("atom");
        match t.tok {
            Tok::Int(n) => Ok(Expr::Int(n)),
            Tok::Ident(name) => Ok(Expr::Var { name, col: t.col }),
            Tok::Sym(_) => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
        }
    }
}

fn eval(e: &Expr, frame: &Arc<Frame>, line: usize) -> Result<Polynomial> {
    let field = &frame.field;
    Ok(match e {
        Expr::Int(n) => Polynomial::constant(frame, field.from_bigint(n)),
        Expr::Var { name, col } => match frame.lookup(name) {
            Some(v) => Polynomial::var(frame, v),
            None => match field.theta() {
                Some(t) if name == THETA => Polynomial::constant(frame, t),
                _ => {
                    return Err(CliError::UndeclaredVariable {
                        name: name.clone(),
                        line,
                        col: *col,
                    })
                }
            },
        },
        Expr::Neg(a) => -&eval(a, frame, line)?,
        Expr::Add(a, b) => &eval(a, frame, line)? + &eval(b, frame, line)?,
        Expr::Sub(a, b) => &eval(a, frame, line)? - &eval(b, frame, line)?,
        Expr::Mul(a, b) => &eval(a, frame, line)? * &eval(b, frame, line)?,
        Expr::Div(a, b, col) => {
            let d = eval(b, frame, line)?;
            let inv = if d.is_constant() {
                field.inv(&d.constant_term())
            } else {
                None
            };
            let Some(inv) = inv else {
                return Err(CliError::Syntax {
                    line,
                    col: *col,
                    expected: "a non-zero constant divisor".into(),
                });
            };
            eval(a, frame, line)?.scale(&inv)
        }
        Expr::Pow(a, k) => eval(a, frame, line)?.pow(*k),
    })
}

/// Integer coefficients of a polynomial in THETA, low degree first.
fn eval_modulus(e: &Expr, line: usize) -> Result<Vec<BigInt>> {
    fn add(a: Vec<BigInt>, b: Vec<BigInt>, sign: i32) -> Vec<BigInt> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_default();
                let y = b.get(i).cloned().unwrap_or_default();
                if sign > 0 {
                    x + y
                } else {
                    x - y
                }
            })
            .collect()
    }
    fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); a.len() + b.len()];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
    Ok(match e {
        Expr::Int(n) => vec![n.clone()],
        Expr::Var { name, col } if name == THETA => {
            let _ = col;
            vec![BigInt::zero(), BigInt::from(1)]
        }
        Expr::Var { name, col } => {
            return Err(CliError::UndeclaredVariable {
                name: name.clone(),
                line,
                col: *col,
            })
        }
        Expr::Neg(a) => add(vec![], eval_modulus(a, line)?, -1),
        Expr::Add(a, b) => add(eval_modulus(a, line)?, eval_modulus(b, line)?, 1),
        Expr::Sub(a, b) => add(eval_modulus(a, line)?, eval_modulus(b, line)?, -1),
        Expr::Mul(a, b) => mul(&eval_modulus(a, line)?, &eval_modulus(b, line)?),
        Expr::Div(_, _, col) => {
            return Err(CliError::Syntax {
                line,
                col: *col,
                expected: format!("a polynomial in {THETA} with integer coefficients"),
            })
        }
        Expr::Pow(a, k) => {
            let base = eval_modulus(a, line)?;
            let mut out = vec![BigInt::from(1)];
            for _ in 0..*k {
                out = mul(&out, &base);
            }
            out
        }
    })
}

fn parse_field(cur: &mut Cursor) -> Result<FieldSpec> {
    cur.keyword("field")?;
    let col = cur.col();
    let name = cur.ident("Q or F_p")?;
    let field = if name == "Q" {
        FieldSpec::Rationals
    } else if let Some(p) = name.strip_prefix("F_").and_then(|s| s.parse::<u64>().ok()) {
        if cur.eat('[') {
            let m = cur.sum()?;
            cur.expect(']')?;
            let coeffs = eval_modulus(&m, cur.line)?;
            let pb = BigInt::from(p);
            let small: Vec<i64> = coeffs
                .iter()
                .map(|c| {
                    let r = ((c % &pb) + &pb) % &pb;
                    r.to_i64().expect("reduced modulo p")
                })
                .collect();
            FieldSpec::extension(p, &small)?
        } else {
            FieldSpec::prime(p)?
        }
    } else {
        return Err(CliError::Syntax {
            line: cur.line,
            col,
            expected: "Q or F_p".into(),
        });
    };
    cur.finish()?;
    Ok(field)
}

fn parse_vars(cur: &mut Cursor, field: FieldSpec) -> Result<Arc<Frame>> {
    cur.keyword("vars")?;
    let mut y = Vec::new();
    while let Some(Tok::Ident(_)) = cur.peek() {
        y.push(cur.ident("a y-variable")?);
    }
    if y.is_empty() {
        return cur.fail("a y-variable");
    }
    cur.expect('|')?;
    let mut u = Vec::new();
    while let Some(Tok::Ident(_)) = cur.peek() {
        u.push(cur.ident("a u-variable")?);
    }
    if u.is_empty() {
        return cur.fail("a u-variable");
    }
    cur.finish()?;
    let line = cur.line;
    for name in y.iter().chain(&u) {
        if KEYWORDS.contains(&name.as_str()) || name == "boundary" {
            return Err(CliError::Invalid {
                line,
                msg: format!("{name} is a reserved word"),
            });
        }
        if field.theta().is_some() && name == THETA {
            return Err(CliError::Invalid {
                line,
                msg: format!("{THETA} names the field generator"),
            });
        }
    }
    Frame::new(y, u, field).map_err(|e| CliError::Invalid {
        line,
        msg: e.to_string(),
    })
}

/// Parse a whole job file.
pub fn parse_job(text: &str) -> Result<JobFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        });
    let Some((n, l)) = lines.next() else {
        return Err(CliError::Syntax {
            line: 1,
            col: 1,
            expected: "'field'".into(),
        });
    };
    let field = parse_field(&mut Cursor::new(n, l)?)?;
    let Some((n, l)) = lines.next() else {
        return Err(CliError::Syntax {
            line: n + 1,
            col: 1,
            expected: "'vars'".into(),
        });
    };
    let frame = parse_vars(&mut Cursor::new(n, l)?, field)?;
    let mut generators: Vec<(String, Polynomial)> = Vec::new();
    let mut boundary: Vec<BoundaryComponent> = Vec::new();
    for (n, l) in lines {
        let mut cur = Cursor::new(n, l)?;
        let name = cur.ident("a statement")?;
        let taken = |id: &str| {
            frame.lookup(id).is_some()
                || generators.iter().any(|(g, _)| g == id)
                || boundary.iter().any(|b| b.id == id)
        };
        if name == "boundary" && !cur.eat('=') {
            let id = cur.ident("a boundary name")?;
            cur.expect(':')?;
            let e = cur.sum()?;
            let old = match cur.peek() {
                Some(Tok::Ident(s)) if s == "old" => true,
                Some(Tok::Ident(s)) if s == "new" => false,
                _ => return cur.fail("'old' or 'new'"),
            };
            cur.pos += 1;
            cur.finish()?;
            if taken(&id) {
                return Err(CliError::Invalid {
                    line: n,
                    msg: format!("{id} is already defined"),
                });
            }
            let l = eval(&e, &frame, n)?;
            boundary.push(BoundaryComponent { id, l, old });
        } else {
            if name != "boundary" {
                cur.expect('=')?;
            }
            let e = cur.sum()?;
            cur.finish()?;
            if taken(&name) {
                return Err(CliError::Invalid {
                    line: n,
                    msg: format!("{name} is already defined"),
                });
            }
            generators.push((name, eval(&e, &frame, n)?));
        }
    }
    Ok(JobFile {
        frame,
        generators,
        boundary,
    })
}

/// Parse one polynomial over an existing frame.
pub fn parse_polynomial(text: &str, frame: &Arc<Frame>) -> Result<Polynomial> {
    let mut cur = Cursor::new(1, text)?;
    let e = cur.sum()?;
    cur.finish()?;
    eval(&e, frame, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_contact_job() {
        let job =
            parse_job("field F_3\nvars y | u1 u2\nf = y^3 + y*u1^36*u2^36 + u1^2*u2*(u1+u2)^12\n")
                .unwrap();
        let l = job.label().unwrap();
        assert_eq!(l.generators().len(), 1);
        assert_eq!(l.orders(), &[3]);
    }

    #[test]
    fn empty_u_block() {
        let err = parse_job("field Q\nvars y |").unwrap_err();
        assert!(
            matches!(
                err,
                CliError::Syntax {
                    line: 2,
                    col: 9,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn undeclared() {
        let err = parse_job("field Q\nvars y | u\nf = y^2 + v^3").unwrap_err();
        assert!(
            matches!(
                err,
                CliError::UndeclaredVariable {
                    line: 3,
                    col: 11,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn fractions_and_implicit_products() {
        let job = parse_job("field Q\nvars y | u\nf = y^2 - 3/2 u^3\n").unwrap();
        assert_eq!(job.generators[0].1.to_string(), "y^2 - (3/2)*u^3");
    }

    #[test]
    fn extension_field() {
        let job =
            parse_job("field F_3[t^2+1]\nvars y | u1 u2\nf = y^2 + t*u1^3 + (1+t)*u2^3\n").unwrap();
        let again = parse_job(&job.to_string()).unwrap();
        assert_eq!(job, again);
    }

    #[test]
    fn boundary_statements() {
        let job =
            parse_job("field Q\nvars y | u1 u2\nf = y^2 + u1^3\nboundary E : u1 old\n").unwrap();
        assert_eq!(job.boundary.len(), 1);
        assert!(job.boundary[0].old);
        assert_eq!(parse_job(&job.to_string()).unwrap(), job);
    }
}
