//! Formulae over X: letters, concatenation and ω+★.
//!
//! Text form: letters separated by whitespace, `(τ)^w*` for ω+★, `ε` (or
//! nothing at all) for the empty formula.  Terms are kept canonical by the
//! constructors: concatenations are flat and never contain `ε`, and the
//! body of an ω+★ is never a proper power (roots are extracted).

use std::fmt;

use crate::error::{Error, Result};
use crate::monoid::is_token;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlowTerm {
    Epsilon,
    Letter(String),
    /// At least two factors, none of them `Epsilon` or `Concat`.
    Concat(Vec<FlowTerm>),
    OmegaStar(Box<FlowTerm>),
}

impl FlowTerm {
    pub fn letter(x: &str) -> Self {
        FlowTerm::Letter(x.to_string())
    }

    pub fn word<S: AsRef<str>>(w: &[S]) -> Self {
        Self::concat(w.iter().map(|x| Self::letter(x.as_ref())).collect())
    }

    pub fn concat(parts: Vec<FlowTerm>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                FlowTerm::Epsilon => {}
                FlowTerm::Concat(ps) => flat.extend(ps),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => FlowTerm::Epsilon,
            1 => flat.pop().unwrap(),
            _ => FlowTerm::Concat(flat),
        }
    }

    /// ω+★ of the root of `body`; ω+★ of ε is ε.
    pub fn omega_star(body: FlowTerm) -> Self {
        let body = body.root();
        if body == FlowTerm::Epsilon {
            FlowTerm::Epsilon
        } else {
            FlowTerm::OmegaStar(Box::new(body))
        }
    }

    pub fn then(self, other: FlowTerm) -> Self {
        Self::concat(vec![self, other])
    }

    /// The factors of a concatenation (a single factor otherwise, none for ε).
    pub fn factors(&self) -> &[FlowTerm] {
        match self {
            FlowTerm::Epsilon => &[],
            FlowTerm::Concat(ps) => ps,
            other => std::slice::from_ref(other),
        }
    }

    /// The shortest `u` with `self = u^k`.
    pub fn root(self) -> Self {
        let fs = self.factors();
        let n = fs.len();
        for d in 1..n {
            if n.is_multiple_of(d) && (d..n).all(|i| fs[i] == fs[i - d]) {
                return Self::concat(fs[..d].to_vec());
            }
        }
        self
    }

    pub fn is_proper_power(&self) -> bool {
        self.clone().root().factors().len() < self.factors().len()
    }

    /// The letters, if this is a plain word.
    pub fn as_word(&self) -> Option<Vec<&str>> {
        self.factors()
            .iter()
            .map(|f| match f {
                FlowTerm::Letter(x) => Some(x.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Number of letter occurrences.
    pub fn size(&self) -> usize {
        match self {
            FlowTerm::Epsilon => 0,
            FlowTerm::Letter(_) => 1,
            FlowTerm::Concat(ps) => ps.iter().map(Self::size).sum(),
            FlowTerm::OmegaStar(b) => b.size(),
        }
    }

    /// Number of ω+★ nodes.
    pub fn stars(&self) -> usize {
        match self {
            FlowTerm::Epsilon | FlowTerm::Letter(_) => 0,
            FlowTerm::Concat(ps) => ps.iter().map(Self::stars).sum(),
            FlowTerm::OmegaStar(b) => 1 + b.stars(),
        }
    }

    /// Deepest nesting of ω+★.
    pub fn star_depth(&self) -> usize {
        match self {
            FlowTerm::Epsilon | FlowTerm::Letter(_) => 0,
            FlowTerm::Concat(ps) => ps.iter().map(Self::star_depth).max().unwrap_or(0),
            FlowTerm::OmegaStar(b) => 1 + b.star_depth(),
        }
    }

    /// Structural canonicity: what the constructors guarantee.
    pub fn is_canonical(&self) -> bool {
        match self {
            FlowTerm::Epsilon | FlowTerm::Letter(_) => true,
            FlowTerm::Concat(ps) => {
                ps.len() >= 2
                    && ps.iter().all(|p| !matches!(p, FlowTerm::Epsilon | FlowTerm::Concat(_)) && p.is_canonical())
            }
            FlowTerm::OmegaStar(b) => **b != FlowTerm::Epsilon && !b.is_proper_power() && b.is_canonical(),
        }
    }

    pub fn letters(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            FlowTerm::Epsilon => {}
            FlowTerm::Letter(x) => out.push(x),
            FlowTerm::Concat(ps) => ps.iter().for_each(|p| p.collect_letters(out)),
            FlowTerm::OmegaStar(b) => b.collect_letters(out),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { s: text, pos: 0 };
        let t = p.sequence()?;
        p.skip_ws();
        if p.pos < p.s.len() {
            return Err(p.error("unexpected `)`"));
        }
        Ok(t)
    }
}

impl fmt::Display for FlowTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowTerm::Epsilon => f.write_str("ε"),
            FlowTerm::Letter(x) => f.write_str(x),
            FlowTerm::Concat(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            FlowTerm::OmegaStar(b) => write!(f, "({b})^w*"),
        }
    }
}

impl std::str::FromStr for FlowTerm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("term `{}` at offset {}: {msg}", self.s, self.pos))
    }

    fn skip_ws(&mut self) {
        let rest = &self.s[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn sequence(&mut self) -> Result<FlowTerm> {
        let mut parts = Vec::new();
        loop {
            self.skip_ws();
            let rest = &self.s[self.pos..];
            if rest.is_empty() || rest.starts_with(')') {
                return Ok(FlowTerm::concat(parts));
            }
            if rest.starts_with('(') {
                self.pos += 1;
                let body = self.sequence()?;
                if !self.s[self.pos..].starts_with(')') {
                    return Err(self.error("unclosed `(`"));
                }
                self.pos += 1;
                if !self.s[self.pos..].starts_with("^w*") {
                    return Err(self.error("a parenthesized term must be followed by `^w*`"));
                }
                self.pos += 3;
                parts.push(FlowTerm::omega_star(body));
            } else {
                let len = rest.find(|c: char| c.is_whitespace() || c == '(' || c == ')').unwrap_or(rest.len());
                let tok = &rest[..len];
                if tok != "ε" && !is_token(tok) {
                    return Err(self.error(&format!("bad letter `{tok}`")));
                }
                self.pos += len;
                if tok != "ε" {
                    parts.push(FlowTerm::letter(tok));
                }
            }
        }
    }
}
