use std::collections::HashMap;

use num_rational::BigRational;

use crate::analysis::{parse_rational, WeightMap};
use crate::boolfn::{VarId, Variables};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tuple {
    pub relation: String,
    pub args: Vec<i64>,
    pub prob: Option<BigRational>,
    pub var: VarId,
}

/// Named relations over integers. Tuple `t` is the Boolean variable `t.var`,
/// numbered in order of appearance and named like `R(1,2)`.
#[derive(Clone, Debug, Default)]
pub struct Database {
    arity: HashMap<String, usize>,
    relations: Vec<String>,
    tuples: Vec<Tuple>,
    names: Variables,
}

fn tuple_name(rel: &str, args: &[i64]) -> String {
    let args: Vec<String> = args.iter().map(i64::to_string).collect();
    format!("{rel}({})", args.join(","))
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, arity: usize) -> Result<()> {
        match self.arity.get(name) {
            Some(&a) if a != arity => Err(Error::Query(format!(
                "relation {name} declared with arities {a} and {arity}"
            ))),
            Some(_) => Ok(()),
            None => {
                self.arity.insert(name.to_string(), arity);
                self.relations.push(name.to_string());
                Ok(())
            }
        }
    }

    pub fn insert(
        &mut self,
        relation: &str,
        args: Vec<i64>,
        prob: Option<BigRational>,
    ) -> Result<VarId> {
        let arity = *self
            .arity
            .get(relation)
            .ok_or_else(|| Error::Query(format!("undeclared relation {relation}")))?;
        if args.len() != arity {
            return Err(Error::Query(format!(
                "{relation} has arity {arity} but the tuple has {} values",
                args.len()
            )));
        }
        let name = tuple_name(relation, &args);
        if self.names.lookup(&name).is_some() {
            return Err(Error::Query(format!("duplicate tuple {name}")));
        }
        let var = self.names.intern(&name);
        self.tuples.push(Tuple {
            relation: relation.to_string(),
            args,
            prob,
            var,
        });
        Ok(var)
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.arity.get(relation).copied()
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn tuples_of<'a>(&'a self, relation: &'a str) -> impl Iterator<Item = &'a Tuple> + 'a {
        self.tuples.iter().filter(move |t| t.relation == relation)
    }

    pub fn names(&self) -> &Variables {
        &self.names
    }

    /// Sorted constants occurring in some tuple.
    pub fn active_domain(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self
            .tuples
            .iter()
            .flat_map(|t| t.args.iter().copied())
            .collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Weights of the tuples that carry a probability.
    pub fn weights(&self) -> WeightMap {
        let mut w = WeightMap::new();
        for t in &self.tuples {
            if let Some(p) = &t.prob {
                w.insert(t.var, p.clone()).expect("checked when parsed");
            }
        }
        w
    }

    /// Parse `rel R/2` declarations and `t R 1 2 p=0.5` tuple lines. `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut db = Database::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("");
            let mut words = Vec::new();
            let mut rest = line;
            while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
                let tail = &rest[start..];
                let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
                let col = line.len() - rest.len() + start + 1;
                words.push((col, &tail[..len]));
                rest = &tail[len..];
            }
            let Some(&(col0, head)) = words.first() else {
                continue;
            };
            let err = |col: usize, m: String| Error::parse(line_no, col, m);
            match head {
                "rel" => {
                    let &(col, decl) = words
                        .get(1)
                        .ok_or_else(|| err(col0, "expected `rel NAME/ARITY`".into()))?;
                    let (name, arity) = decl
                        .split_once('/')
                        .ok_or_else(|| err(col, format!("expected NAME/ARITY, found `{decl}`")))?;
                    let arity: usize = arity
                        .parse()
                        .map_err(|_| err(col, format!("bad arity in `{decl}`")))?;
                    if !is_identifier(name) {
                        return Err(err(col, format!("bad relation name `{name}`")));
                    }
                    if let Some(&(c, w)) = words.get(2) {
                        return Err(err(c, format!("unexpected `{w}`")));
                    }
                    db.declare(name, arity)
                        .map_err(|e| err(col, e.to_string()))?;
                }
                "t" => {
                    let &(col, rel) = words
                        .get(1)
                        .ok_or_else(|| err(col0, "expected `t NAME VALUES..`".into()))?;
                    let mut args = Vec::new();
                    let mut prob = None;
                    for &(c, w) in &words[2..] {
                        if let Some(p) = w.strip_prefix("p=") {
                            let p = parse_rational(p)
                                .ok_or_else(|| err(c, format!("bad probability `{p}`")))?;
                            if p < BigRational::from_integer(0.into())
                                || p > BigRational::from_integer(1.into())
                            {
                                return Err(err(c, format!("probability {p} is outside [0, 1]")));
                            }
                            prob = Some(p);
                        } else if prob.is_some() {
                            return Err(err(c, "values must precede the probability".into()));
                        } else {
                            args.push(
                                w.parse::<i64>()
                                    .map_err(|_| err(c, format!("bad constant `{w}`")))?,
                            );
                        }
                    }
                    db.insert(rel, args, prob)
                        .map_err(|e| err(col, e.to_string()))?;
                }
                other => return Err(err(col0, format!("unknown directive `{other}`"))),
            }
        }
        Ok(db)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.relations {
            s.push_str(&format!("rel {r}/{}\n", self.arity[r]));
        }
        for t in &self.tuples {
            s.push_str(&format!("t {}", t.relation));
            for a in &t.args {
                s.push_str(&format!(" {a}"));
            }
            if let Some(p) = &t.prob {
                s.push_str(&format!(" p={p}"));
            }
            s.push('\n');
        }
        s
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let text = "rel R/2\nrel S/1 # unary\n\nt R 1 2 p=1/2\nt S 3\n";
        let db = Database::parse(text).unwrap();
        assert_eq!(db.tuples().len(), 2);
        assert_eq!(db.names().lookup("R(1,2)"), Some(VarId(0)));
        assert_eq!(db.active_domain(), vec![1, 2, 3]);
        assert_eq!(db.weights().len(), 1);
        let again = Database::parse(&db.to_text()).unwrap();
        assert_eq!(again.tuples(), db.tuples());
    }

    #[test]
    fn errors_carry_positions() {
        let e = Database::parse("rel R/2\nt R 1").unwrap_err();
        assert!(
            matches!(
                e,
                Error::Parse {
                    line: 2,
                    column: 3,
                    ..
                }
            ),
            "{e:?}"
        );
        let e = Database::parse("rel R/2\nt R 1 x").unwrap_err();
        assert!(
            matches!(
                e,
                Error::Parse {
                    line: 2,
                    column: 7,
                    ..
                }
            ),
            "{e:?}"
        );
        assert!(Database::parse("t R 1").is_err());
        assert!(Database::parse("rel R/1\nt R 1\nt R 1").is_err());
        assert!(Database::parse("rel R/1\nt R 1 p=2").is_err());
        assert!(Database::parse("rel R/1\nrel R/2").is_err());
        assert!(Database::parse("fact R 1").is_err());
    }
}
