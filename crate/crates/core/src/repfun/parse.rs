//! One-line function spec grammar.
//!
//! ```text
//! spec     := builtin | rep
//! builtin  := ("id" | "log" | "inv" | "exp" | "pow" REAL | "const" REAL) ["on" interval]
//! rep      := ("ktone" INT | "monotone" | "decreasing" | "convex") clause* "atoms" "[" pairs? "]"
//! clause   := "on" interval | "alpha" REAL | "beta" REAL | "gamma" REAL | "poly" "[" REAL ("," REAL)* "]"
//! interval := "(" (REAL | "-inf") "," (REAL | "inf") ")"
//! pairs    := "(" REAL "," REAL ")" ("," "(" REAL "," REAL ")")*
//! ```
//!
//! For `convex`, `alpha` and `beta` are the constant and linear coefficients
//! around `x = 1`. Atom pairs are `(weight, node)`.

use super::{Atom, Builtin, Form, FunctionSpec, Interval};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Num(f64),
    Punct(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start_col = col;
        if "()[],".contains(c) {
            out.push(Token { tok: Tok::Punct(c), line, column: start_col });
            i += 1;
            col += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[s..i].iter().collect();
            col += i - s;
            if word == "inf" {
                out.push(Token { tok: Tok::Num(f64::INFINITY), line, column: start_col });
            } else {
                out.push(Token { tok: Tok::Word(word), line, column: start_col });
            }
        } else if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' {
            let s = i;
            i += 1;
            while i < chars.len() {
                let d = chars[i];
                let exp_sign = (d == '-' || d == '+') && matches!(chars[i - 1], 'e' | 'E');
                if d.is_ascii_alphanumeric() || d == '.' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            let text: String = chars[s..i].iter().collect();
            col += i - s;
            let value = match text.as_str() {
                "-inf" => f64::NEG_INFINITY,
                "+inf" => f64::INFINITY,
                _ => text.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Parse {
                    line,
                    column: start_col,
                    message: format!("malformed number `{text}`"),
                })?,
            };
            out.push(Token { tok: Tok::Num(value), line, column: start_col });
        } else {
            return Err(Error::Parse { line, column: start_col, message: format!("unexpected character `{c}`") });
        }
    }
    out.push(Token { tok: Tok::End, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(t: &Token, message: impl Into<String>) -> Error {
        Error::Parse { line: t.line, column: t.column, message: message.into() }
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Num(v) => format!("number {v}"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Punct(c) {
            Ok(())
        } else {
            Err(Self::err_at(&t, format!("expected `{c}`, found {}", Self::describe(&t.tok))))
        }
    }

    fn real(&mut self) -> Result<f64> {
        let t = self.next();
        match &t.tok {
            Tok::Num(v) if v.is_finite() => Ok(*v),
            other => Err(Self::err_at(&t, format!("expected a number, found {}", Self::describe(other)))),
        }
    }

    fn integer(&mut self) -> Result<usize> {
        let t = self.next();
        match &t.tok {
            Tok::Num(v) if v.is_finite() && *v >= 0.0 && v.fract() == 0.0 && *v < 1e6 => Ok(*v as usize),
            other => Err(Self::err_at(&t, format!("expected a non-negative integer, found {}", Self::describe(other)))),
        }
    }

    fn interval(&mut self) -> Result<Interval> {
        let open = self.peek().clone();
        self.expect_punct('(')?;
        let a = self.endpoint()?;
        self.expect_punct(',')?;
        let b = self.endpoint()?;
        self.expect_punct(')')?;
        Interval::new(a, b).map_err(|_| Self::err_at(&open, format!("empty interval ({a}, {b})")))
    }

    fn endpoint(&mut self) -> Result<f64> {
        let t = self.next();
        match &t.tok {
            Tok::Num(v) => Ok(*v),
            other => Err(Self::err_at(&t, format!("expected an endpoint, found {}", Self::describe(other)))),
        }
    }

    fn real_list(&mut self) -> Result<Vec<f64>> {
        self.expect_punct('[')?;
        let mut out = vec![self.real()?];
        while self.peek().tok == Tok::Punct(',') {
            self.next();
            out.push(self.real()?);
        }
        self.expect_punct(']')?;
        Ok(out)
    }

    fn atoms(&mut self) -> Result<Vec<Atom>> {
        self.expect_punct('[')?;
        let mut out = Vec::new();
        if self.peek().tok == Tok::Punct(']') {
            self.next();
            return Ok(out);
        }
        loop {
            self.expect_punct('(')?;
            let weight = self.real()?;
            self.expect_punct(',')?;
            let node = self.real()?;
            self.expect_punct(')')?;
            out.push(Atom { weight, node });
            let t = self.next();
            match &t.tok {
                Tok::Punct(',') => continue,
                Tok::Punct(']') => return Ok(out),
                other => return Err(Self::err_at(&t, format!("expected `,` or `]`, found {}", Self::describe(other)))),
            }
        }
    }

    fn finish(&mut self) -> Result<()> {
        let t = self.next();
        match &t.tok {
            Tok::End => Ok(()),
            other => Err(Self::err_at(&t, format!("unexpected trailing {}", Self::describe(other)))),
        }
    }
}

#[derive(Default)]
struct Clauses {
    on: Option<Interval>,
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    poly: Option<Vec<f64>>,
    atoms: Option<Vec<Atom>>,
}

/// Parses a function spec; errors carry 1-based line and column.
pub fn parse_spec(src: &str) -> Result<FunctionSpec> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0 };
    let head = p.next();
    let word = match &head.tok {
        Tok::Word(w) => w.clone(),
        other => return Err(Parser::err_at(&head, format!("expected a function name, found {}", Parser::describe(other)))),
    };
    let builtin = match word.as_str() {
        "id" => Some(Builtin::Id),
        "log" => Some(Builtin::Log),
        "inv" => Some(Builtin::Inv),
        "exp" => Some(Builtin::Exp),
        "pow" => Some(Builtin::Pow { p: p.real()? }),
        "const" => Some(Builtin::Const { value: p.real()? }),
        _ => None,
    };
    if let Some(b) = builtin {
        let domain = if p.peek().tok == Tok::Word("on".into()) {
            p.next();
            p.interval()?
        } else {
            match b {
                Builtin::Id | Builtin::Const { .. } | Builtin::Exp => Interval::real_line(),
                _ => Interval::positive(),
            }
        };
        p.finish()?;
        return FunctionSpec::new(domain, Form::Builtin(b));
    }

    let order = match word.as_str() {
        "ktone" => Some(p.integer()?),
        "monotone" | "decreasing" | "convex" => None,
        _ => return Err(Parser::err_at(&head, format!("unknown function `{word}`"))),
    };
    let allowed: &[&str] = match word.as_str() {
        "ktone" => &["on", "poly", "atoms"],
        "convex" => &["on", "alpha", "beta", "gamma", "atoms"],
        _ => &["on", "alpha", "beta", "atoms"],
    };
    let mut c = Clauses::default();
    while c.atoms.is_none() {
        let t = p.next();
        let kw = match &t.tok {
            Tok::Word(w) => w.clone(),
            other => return Err(Parser::err_at(&t, format!("expected a clause keyword, found {}", Parser::describe(other)))),
        };
        if !allowed.contains(&kw.as_str()) {
            return Err(Parser::err_at(&t, format!("`{kw}` is not a valid clause for `{word}`")));
        }
        let dup = || Parser::err_at(&t, format!("duplicate `{kw}` clause"));
        match kw.as_str() {
            "on" if c.on.is_none() => c.on = Some(p.interval()?),
            "alpha" if c.alpha.is_none() => c.alpha = Some(p.real()?),
            "beta" if c.beta.is_none() => c.beta = Some(p.real()?),
            "gamma" if c.gamma.is_none() => c.gamma = Some(p.real()?),
            "poly" if c.poly.is_none() => c.poly = Some(p.real_list()?),
            "atoms" => c.atoms = Some(p.atoms()?),
            _ => return Err(dup()),
        }
    }
    p.finish()?;
    let atoms = c.atoms.unwrap_or_default();
    let (domain, form) = match word.as_str() {
        "ktone" => (
            c.on.unwrap_or(Interval::symmetric_unit()),
            Form::KtoneRep { order: order.unwrap_or(1), poly: c.poly.unwrap_or_default(), atoms },
        ),
        "monotone" => (
            c.on.unwrap_or(Interval::positive()),
            Form::MonotoneRep { alpha: c.alpha.unwrap_or(0.0), beta: c.beta.unwrap_or(0.0), atoms },
        ),
        "decreasing" => (
            c.on.unwrap_or(Interval::positive()),
            Form::DecreasingRep { alpha: c.alpha.unwrap_or(0.0), beta: c.beta.unwrap_or(0.0), atoms },
        ),
        _ => (
            c.on.unwrap_or(Interval::positive()),
            Form::ConvexRep {
                c0: c.alpha.unwrap_or(0.0),
                c1: c.beta.unwrap_or(0.0),
                gamma: c.gamma.unwrap_or(0.0),
                atoms,
            },
        ),
    };
    FunctionSpec::new(domain, form)
}
