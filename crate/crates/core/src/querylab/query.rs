use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub relation: String,
    pub args: Vec<String>,
}

/// One existentially closed conjunction of atoms and inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disjunct {
    pub atoms: Vec<Atom>,
    pub inequalities: Vec<(String, String)>,
}

impl Disjunct {
    /// Query variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for a in &self.atoms {
            for v in &a.args {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
        out
    }
}

/// Boolean union of conjunctive queries with inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ucq {
    pub disjuncts: Vec<Disjunct>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Open,
    Close,
    Comma,
    Neq,
    Bar,
    Turnstile,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Open => f.write_str("`(`"),
            Tok::Close => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Turnstile => f.write_str("`:-`"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize, usize)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("");
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut j = 0;
        while j < chars.len() {
            let (pos, c) = chars[j];
            let col = line[..pos].chars().count() + 1;
            let next = chars.get(j + 1).map(|p| p.1);
            let tok = match c {
                c if c.is_whitespace() => {
                    j += 1;
                    continue;
                }
                '(' => Tok::Open,
                ')' => Tok::Close,
                ',' => Tok::Comma,
                '|' => Tok::Bar,
                '!' if next == Some('=') => {
                    j += 1;
                    Tok::Neq
                }
                ':' if next == Some('-') => {
                    j += 1;
                    Tok::Turnstile
                }
                c if c.is_ascii_alphanumeric() || c == '_' => {
                    let start = pos;
                    while j + 1 < chars.len()
                        && (chars[j + 1].1.is_ascii_alphanumeric() || chars[j + 1].1 == '_')
                    {
                        j += 1;
                    }
                    let end = chars.get(j + 1).map_or(line.len(), |p| p.0);
                    Tok::Ident(line[start..end].to_string())
                }
                other => {
                    return Err(Error::parse(
                        i + 1,
                        col,
                        format!("unexpected character `{other}`"),
                    ))
                }
            };
            out.push((tok, i + 1, col));
            j += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.1, t.2))
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(Error::parse(l, c, msg))
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => {
                let t = t.clone();
                self.fail(format!("expected {want}, found {t}"))
            }
            None => self.fail(format!("expected {want}, found end of input")),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(t) => {
                let t = t.clone();
                self.fail(format!("expected a name, found {t}"))
            }
            None => self.fail("expected a name, found end of input"),
        }
    }

    fn args(&mut self) -> Result<Vec<String>> {
        self.expect(Tok::Open)?;
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::Close) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            let at = self.here();
            let v = self.ident()?;
            if !super::db::is_identifier(&v) {
                return Err(Error::parse(
                    at.0,
                    at.1,
                    format!("`{v}` is not a query variable"),
                ));
            }
            out.push(v);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                _ => break,
            }
        }
        self.expect(Tok::Close)?;
        Ok(out)
    }

    /// Skip an optional `q() :-` head.
    fn head(&mut self) -> Result<()> {
        if matches!(self.toks.get(self.pos + 1), Some((Tok::Open, ..)))
            && self.toks[self.pos..]
                .iter()
                .take_while(|t| t.0 != Tok::Bar)
                .any(|t| t.0 == Tok::Turnstile)
        {
            self.ident()?;
            if !self.args()?.is_empty() {
                return self.fail("only Boolean queries are supported");
            }
            self.expect(Tok::Turnstile)?;
        }
        Ok(())
    }

    fn disjunct(&mut self) -> Result<Disjunct> {
        self.head()?;
        let mut d = Disjunct {
            atoms: Vec::new(),
            inequalities: Vec::new(),
        };
        let mut neq_at = Vec::new();
        loop {
            let at = self.here();
            let name = self.ident()?;
            match self.peek() {
                Some(Tok::Open) => {
                    let args = self.args()?;
                    d.atoms.push(Atom {
                        relation: name,
                        args,
                    });
                }
                Some(Tok::Neq) => {
                    self.pos += 1;
                    let rhs = self.ident()?;
                    d.inequalities.push((name, rhs));
                    neq_at.push(at);
                }
                _ => return self.fail("expected `(` or `!=`"),
            }
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                _ => break,
            }
        }
        if d.atoms.is_empty() {
            return Err(Error::parse(
                self.here().0,
                self.here().1,
                "a disjunct needs at least one atom",
            ));
        }
        let vars = d.variables();
        for ((a, b), at) in d.inequalities.iter().zip(neq_at) {
            for v in [a, b] {
                if !vars.contains(v) {
                    return Err(Error::parse(
                        at.0,
                        at.1,
                        format!("inequality variable `{v}` occurs in no atom"),
                    ));
                }
            }
        }
        Ok(d)
    }
}

impl Ucq {
    /// Parse `q() :- R(x,y), S(y,z), x != z | T(x)`. The head is optional,
    /// may be repeated after each `|`, and `%` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let toks = tokenize(text)?;
        let lines = text.lines().count().max(1);
        let last = text.lines().last().map_or(0, |l| l.chars().count());
        let mut p = Parser {
            toks,
            pos: 0,
            end: (lines, last + 1),
        };
        let mut disjuncts = vec![p.disjunct()?];
        while p.peek() == Some(&Tok::Bar) {
            p.pos += 1;
            disjuncts.push(p.disjunct()?);
        }
        if let Some(t) = p.peek() {
            let t = t.clone();
            return p.fail(format!("unexpected {t}"));
        }
        Ok(Ucq { disjuncts })
    }
}

impl fmt::Display for Ucq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("q() :- ")?;
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            let mut items: Vec<String> = d
                .atoms
                .iter()
                .map(|a| format!("{}({})", a.relation, a.args.join(",")))
                .collect();
            items.extend(d.inequalities.iter().map(|(a, b)| format!("{a} != {b}")));
            f.write_str(&items.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let q = Ucq::parse("q() :- R(x,y), S(y, z), x != z | q() :- T(x)").unwrap();
        assert_eq!(q.disjuncts.len(), 2);
        assert_eq!(q.disjuncts[0].variables(), vec!["x", "y", "z"]);
        assert_eq!(
            q.disjuncts[0].inequalities,
            vec![("x".to_string(), "z".to_string())]
        );
        assert_eq!(Ucq::parse(&q.to_string()).unwrap(), q);
        let bare = Ucq::parse("R(x) | T(x)").unwrap();
        assert_eq!(bare.disjuncts.len(), 2);
    }

    #[test]
    fn rejects_unsafe_inequalities() {
        let e = Ucq::parse("q() :- R(x), x != y").unwrap_err();
        assert!(
            matches!(
                e,
                Error::Parse {
                    line: 1,
                    column: 14,
                    ..
                }
            ),
            "{e:?}"
        );
    }

    #[test]
    fn syntax_errors_have_positions() {
        let e = Ucq::parse("q() :- R(x,\n  y, )").unwrap_err();
        assert!(
            matches!(
                e,
                Error::Parse {
                    line: 2,
                    column: 6,
                    ..
                }
            ),
            "{e:?}"
        );
        assert!(Ucq::parse("q() :- R(x) S(y)").is_err());
        assert!(Ucq::parse("q() :- x != x").is_err());
        assert!(Ucq::parse("q() :- R(1)").is_err());
        assert!(Ucq::parse("q(x) :- R(x)").is_err());
        assert!(Ucq::parse("q() :- R(x) $").is_err());
    }
}
