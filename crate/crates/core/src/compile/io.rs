//! Text format for compiled forms (`.sdd` / `.dnnf`).
//!
//! ```text
//! f <kind> <ngates> <root>        kind: dsnnf | sdd | sdd-noncanonical
//! x <varid> <name>                one line per variable of the function
//! L/D/I/R ...                     the vtree, in `.vtree` syntax (optional)
//! T <gid> | F <gid>               constants
//! V <gid> <varid>                 input gate
//! N <gid> <child>                 negated input
//! A <gid> <vnode> <left> <right>  structured conjunction
//! O <gid> <vnode|-> <k> <c1> .. <ck>
//! ```
//!
//! Gates are numbered `0..ngates` and listed in that order, children first.

use std::collections::HashMap;
use std::fmt::Write;

use super::form::{CompiledForm, FormKind, Node};
use crate::boolfn::{VarId, VarSet, Variables};
use crate::error::{Error, Result};
use crate::vtree::{parse_vtree_lines, write_vtree};

pub fn write_form(form: &CompiledForm) -> String {
    let mut s = format!(
        "f {} {} {}\n",
        form.kind().token(),
        form.size(),
        form.root()
    );
    for x in form.vars().iter() {
        let _ = writeln!(s, "x {} {}", x.0, form.names().display(x));
    }
    if let Some(t) = form.vtree() {
        s.push_str(&write_vtree(t, form.names()));
    }
    for (g, n) in form.nodes().iter().enumerate() {
        let _ = match n {
            Node::Const(true) => writeln!(s, "T {g}"),
            Node::Const(false) => writeln!(s, "F {g}"),
            Node::Input(x) => writeln!(s, "V {g} {}", x.0),
            Node::Not(c) => writeln!(s, "N {g} {c}"),
            Node::And { vnode, parts } => writeln!(s, "A {g} {vnode} {} {}", parts[0], parts[1]),
            Node::Or { vnode, children } => {
                let scope = vnode.map_or("-".to_string(), |v| v.to_string());
                let list: String = children.iter().map(|c| format!(" {c}")).collect();
                writeln!(s, "O {g} {scope} {}{list}", children.len())
            }
        };
    }
    s
}

pub fn parse_form(text: &str) -> Result<CompiledForm> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let Some(&(hline, header)) = lines.first() else {
        return Err(Error::parse(1, 1, "empty form file"));
    };
    let h: Vec<&str> = header.split_whitespace().collect();
    let (kind, ngates, root) = match h.as_slice() {
        ["f", k, n, r] => (
            FormKind::from_token(k)
                .ok_or_else(|| Error::parse(hline, 3, format!("unknown kind `{k}`")))?,
            n.parse::<usize>()
                .map_err(|_| Error::parse(hline, 1, "bad gate count"))?,
            r.parse::<usize>()
                .map_err(|_| Error::parse(hline, 1, "bad root id"))?,
        ),
        _ => {
            return Err(Error::parse(
                hline,
                1,
                "expected `f <kind> <ngates> <root>`",
            ))
        }
    };

    let mut named: Vec<(VarId, String, usize)> = Vec::new();
    let mut vtree_lines: Vec<(usize, &str)> = Vec::new();
    let mut gate_lines: Vec<(usize, Vec<&str>)> = Vec::new();
    for &(line, body) in &lines[1..] {
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks[0] {
            "x" => {
                let [_, id, name] = toks.as_slice() else {
                    return Err(Error::parse(line, 1, "expected `x <varid> <name>`"));
                };
                let id: u32 = id
                    .parse()
                    .map_err(|_| Error::parse(line, 3, "bad variable id"))?;
                named.push((VarId(id), name.to_string(), line));
            }
            "L" | "D" | "I" | "R" => vtree_lines.push((line, body)),
            _ => gate_lines.push((line, toks)),
        }
    }

    let top = named.iter().map(|(x, _, _)| x.0 + 1).max().unwrap_or(0) as usize;
    let mut slots: Vec<Option<String>> = vec![None; top];
    for (x, name, line) in &named {
        if slots[x.index()].replace(name.clone()).is_some() {
            return Err(Error::parse(
                *line,
                1,
                format!("variable {} declared twice", x.0),
            ));
        }
    }
    let filled: Vec<String> = slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.unwrap_or_else(|| format!("_{i}")))
        .collect();
    let names = Variables::from_names(filled).map_err(|e| Error::parse(hline, 1, e.to_string()))?;
    let vars: VarSet = named.iter().map(|(x, _, _)| *x).collect();

    let (vtree, vmap) = if vtree_lines.is_empty() {
        (None, HashMap::new())
    } else {
        let (t, m) = parse_vtree_lines(&vtree_lines, &names)?;
        (Some(t), m)
    };

    if gate_lines.len() != ngates {
        return Err(Error::parse(
            hline,
            1,
            format!(
                "header announces {ngates} gates, found {}",
                gate_lines.len()
            ),
        ));
    }
    let mut nodes = Vec::with_capacity(ngates);
    for (expect, (line, toks)) in gate_lines.iter().enumerate() {
        let line = *line;
        let num = |i: usize| -> Result<usize> {
            toks.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| {
                Error::parse(line, 1, format!("expected a number in field {}", i + 1))
            })
        };
        let gref = |i: usize| -> Result<usize> {
            let c = num(i)?;
            if c >= expect {
                return Err(Error::parse(
                    line,
                    1,
                    format!("gate {c} is not defined before gate {expect}"),
                ));
            }
            Ok(c)
        };
        let vnode = |i: usize| -> Result<usize> {
            let k = num(i)? as u64;
            vmap.get(&k)
                .copied()
                .ok_or_else(|| Error::parse(line, 1, format!("unknown vtree node {k}")))
        };
        if num(1)? != expect {
            return Err(Error::parse(line, 1, format!("expected gate id {expect}")));
        }
        let arity = |n: usize| -> Result<()> {
            if toks.len() == n {
                Ok(())
            } else {
                Err(Error::parse(
                    line,
                    1,
                    format!("`{}` line takes {} fields", toks[0], n),
                ))
            }
        };
        let node = match toks[0] {
            "T" => arity(2).map(|_| Node::Const(true))?,
            "F" => arity(2).map(|_| Node::Const(false))?,
            "V" => {
                arity(3)?;
                let x = VarId(num(2)? as u32);
                if !vars.contains(x) {
                    return Err(Error::parse(
                        line,
                        1,
                        format!("variable {} was not declared", x.0),
                    ));
                }
                Node::Input(x)
            }
            "N" => {
                arity(3)?;
                Node::Not(gref(2)?)
            }
            "A" => {
                arity(5)?;
                Node::And {
                    vnode: vnode(2)?,
                    parts: [gref(3)?, gref(4)?],
                }
            }
            "O" => {
                let scope = match toks.get(2) {
                    Some(&"-") => None,
                    Some(_) => Some(vnode(2)?),
                    None => return Err(Error::parse(line, 1, "missing scope")),
                };
                let k = num(3)?;
                arity(4 + k)?;
                Node::Or {
                    vnode: scope,
                    children: (4..4 + k).map(gref).collect::<Result<_>>()?,
                }
            }
            other => {
                return Err(Error::parse(
                    line,
                    1,
                    format!("unknown gate kind `{other}`"),
                ))
            }
        };
        nodes.push(node);
    }
    CompiledForm::from_parts(kind, vtree, vars, names, nodes, root)
}
