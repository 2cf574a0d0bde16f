//! Readers for the `.bc` circuit format and DIMACS CNF.
//!
//! `.bc` grammar, one statement per line, `#` starts a comment:
//!
//! ```text
//! v <nvars>                       header, first statement, exactly once
//! g<i> input <name>
//! g<i> const 0|1
//! g<i> not g<j>
//! g<i> and g<j> ...               zero or more children
//! g<i> or g<j> ...
//! out g<i>                        exactly once
//! ```
//!
//! Gate ids are arbitrary distinct naturals and may be referenced before
//! they are defined. Variables get ids in order of their input lines.

use std::collections::HashMap;

use super::{topological_order, Circuit, Gate, GateId};
use crate::boolfn::{VarId, Variables};
use crate::error::{Error, Result};

struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok {
                    text: &body[s..i],
                    col: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok {
            text: &body[s..],
            col: s + 1,
        });
    }
    out
}

fn gate_label(t: &Tok<'_>, line: usize) -> Result<u64> {
    t.text
        .strip_prefix('g')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| {
            Error::parse(
                line,
                t.col,
                format!("expected a gate id like g3, found `{}`", t.text),
            )
        })
}

enum Pending {
    Input(String),
    Const(bool),
    Not(u64, usize, usize),
    And(Vec<(u64, usize, usize)>),
    Or(Vec<(u64, usize, usize)>),
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut declared: Option<usize> = None;
    let mut defs: Vec<(u64, Pending, usize)> = Vec::new();
    let mut index: HashMap<u64, GateId> = HashMap::new();
    let mut output: Option<(u64, usize, usize)> = None;
    let mut last_line = 0;

    for (lno, raw) in text.lines().enumerate() {
        let line = lno + 1;
        last_line = line;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        if declared.is_none() && head.text != "v" {
            return Err(Error::parse(line, head.col, "expected header `v <nvars>`"));
        }
        match head.text {
            "v" => {
                if declared.is_some() {
                    return Err(Error::parse(line, head.col, "duplicate header"));
                }
                let [_, n] = toks.as_slice() else {
                    return Err(Error::parse(line, head.col, "header takes one number"));
                };
                declared = Some(n.text.parse().map_err(|_| {
                    Error::parse(line, n.col, format!("bad variable count `{}`", n.text))
                })?);
            }
            "out" => {
                if output.is_some() {
                    return Err(Error::parse(line, head.col, "duplicate `out`"));
                }
                let [_, g] = toks.as_slice() else {
                    return Err(Error::parse(line, head.col, "`out` takes one gate"));
                };
                output = Some((gate_label(g, line)?, line, g.col));
            }
            _ => {
                let id = gate_label(head, line)?;
                if index.contains_key(&id) {
                    return Err(Error::parse(
                        line,
                        head.col,
                        format!("gate g{id} defined twice"),
                    ));
                }
                let Some(kind) = toks.get(1) else {
                    return Err(Error::parse(
                        line,
                        head.col + head.text.len(),
                        "missing gate kind",
                    ));
                };
                let args = &toks[2..];
                let refs = || -> Result<Vec<(u64, usize, usize)>> {
                    args.iter()
                        .map(|t| Ok((gate_label(t, line)?, line, t.col)))
                        .collect()
                };
                let pending = match kind.text {
                    "input" => match args {
                        [name] => Pending::Input(name.text.to_string()),
                        _ => return Err(Error::parse(line, kind.col, "input takes one name")),
                    },
                    "const" => match args {
                        [b] if b.text == "0" || b.text == "1" => Pending::Const(b.text == "1"),
                        _ => return Err(Error::parse(line, kind.col, "const takes 0 or 1")),
                    },
                    "not" => match args {
                        [c] => Pending::Not(gate_label(c, line)?, line, c.col),
                        _ => {
                            return Err(Error::parse(
                                line,
                                kind.col,
                                format!("not takes exactly one child, found {}", args.len()),
                            ))
                        }
                    },
                    "and" => Pending::And(refs()?),
                    "or" => Pending::Or(refs()?),
                    other => {
                        return Err(Error::parse(
                            line,
                            kind.col,
                            format!("unknown gate kind `{other}`"),
                        ))
                    }
                };
                index.insert(id, defs.len());
                defs.push((id, pending, line));
            }
        }
    }

    let Some(nvars) = declared else {
        return Err(Error::parse(
            last_line.max(1),
            1,
            "missing header `v <nvars>`",
        ));
    };
    let Some((out_id, out_line, out_col)) = output else {
        return Err(Error::parse(last_line.max(1), 1, "missing `out` statement"));
    };

    let resolve = |(id, line, col): (u64, usize, usize)| -> Result<GateId> {
        index
            .get(&id)
            .copied()
            .ok_or_else(|| Error::parse(line, col, format!("reference to undefined gate g{id}")))
    };

    let mut names = Variables::new();
    let mut gates = Vec::with_capacity(defs.len());
    for (_, p, line) in &defs {
        gates.push(match p {
            Pending::Input(name) => {
                if names.lookup(name).is_some() {
                    return Err(Error::parse(
                        *line,
                        1,
                        format!("variable `{name}` has two input gates"),
                    ));
                }
                Gate::Input(names.intern(name))
            }
            Pending::Const(b) => Gate::Const(*b),
            Pending::Not(r, l, c) => Gate::Not(resolve((*r, *l, *c))?),
            Pending::And(rs) => Gate::And(rs.iter().map(|&r| resolve(r)).collect::<Result<_>>()?),
            Pending::Or(rs) => Gate::Or(rs.iter().map(|&r| resolve(r)).collect::<Result<_>>()?),
        });
    }
    if names.len() != nvars {
        return Err(Error::parse(
            1,
            1,
            format!(
                "header declares {nvars} variables but {} input gates are defined",
                names.len()
            ),
        ));
    }
    if let Err(g) = topological_order(&gates) {
        return Err(Error::parse(
            defs[g].2,
            1,
            format!("cycle through gate g{}", defs[g].0),
        ));
    }
    let output = resolve((out_id, out_line, out_col))?;
    Circuit::new(gates, output, names)
}

/// Read DIMACS CNF. Variable `i` becomes `VarId(i-1)` named `x<i>`; every
/// declared variable gets an input gate, each clause an Or gate and the
/// formula a single And gate.
pub fn parse_dimacs(text: &str) -> Result<Circuit> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for (lno, raw) in text.lines().enumerate() {
        let line = lno + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        if head.text.starts_with('c') {
            continue;
        }
        if head.text == "%" {
            break;
        }
        if head.text == "p" {
            if header.is_some() {
                return Err(Error::parse(line, head.col, "duplicate problem line"));
            }
            match toks.as_slice() {
                [_, fmt, v, c] if fmt.text == "cnf" => {
                    let v = v
                        .text
                        .parse()
                        .map_err(|_| Error::parse(line, v.col, "bad variable count"))?;
                    let c = c
                        .text
                        .parse()
                        .map_err(|_| Error::parse(line, c.col, "bad clause count"))?;
                    header = Some((v, c));
                }
                _ => {
                    return Err(Error::parse(
                        line,
                        head.col,
                        "expected `p cnf <vars> <clauses>`",
                    ))
                }
            }
            continue;
        }
        let Some((nv, _)) = header else {
            return Err(Error::parse(
                line,
                head.col,
                "clause before the problem line",
            ));
        };
        for t in &toks {
            let lit: i64 = t
                .text
                .parse()
                .map_err(|_| Error::parse(line, t.col, format!("bad literal `{}`", t.text)))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > nv {
                return Err(Error::parse(
                    line,
                    t.col,
                    format!("literal {lit} exceeds variable count {nv}"),
                ));
            } else {
                current.push(lit);
            }
        }
    }
    let Some((nv, nc)) = header else {
        return Err(Error::parse(1, 1, "missing problem line"));
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != nc {
        return Err(Error::parse(
            1,
            1,
            format!(
                "problem line announces {nc} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    let names = Variables::from_names((1..=nv).map(|i| format!("x{i}")))?;
    let mut gates: Vec<Gate> = (0..nv).map(|i| Gate::Input(VarId(i as u32))).collect();
    let mut negs: HashMap<usize, GateId> = HashMap::new();
    let mut ors = Vec::with_capacity(clauses.len());
    for clause in &clauses {
        let mut kids = Vec::with_capacity(clause.len());
        for &lit in clause {
            let v = lit.unsigned_abs() as usize - 1;
            if lit > 0 {
                kids.push(v);
            } else {
                let g = *negs.entry(v).or_insert_with(|| {
                    gates.push(Gate::Not(v));
                    gates.len() - 1
                });
                kids.push(g);
            }
        }
        gates.push(Gate::Or(kids));
        ors.push(gates.len() - 1);
    }
    gates.push(Gate::And(ors));
    let out = gates.len() - 1;
    Circuit::new(gates, out, names)
}
