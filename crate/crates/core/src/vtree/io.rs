//! `.vtree` text format.
//!
//! ```text
//! L <id> <var>            leaf for a named variable
//! D <id>                  dummy leaf
//! I <id> <left> <right>   internal node (a single child is also accepted)
//! R <id>                  root marker, exactly once
//! ```
//!
//! Children must be defined before their parents. `#` starts a comment.
//! Nodes are written in index order, so written ids are node indices.

use std::collections::HashMap;
use std::fmt::Write;

use super::{Label, VNodeId, Vtree, VtreeBuilder};
use crate::boolfn::Variables;
use crate::error::{Error, Result};

pub fn write_vtree(t: &Vtree, names: &Variables) -> String {
    let mut s = String::new();
    for v in 0..t.len() {
        let n = t.node(v);
        let _ = match (n.label(), n.children()) {
            (Some(Label::Var(x)), _) => writeln!(s, "L {v} {}", names.display(x)),
            (Some(Label::Dummy(_)), _) => writeln!(s, "D {v}"),
            (None, [c]) => writeln!(s, "I {v} {c}"),
            (None, [l, r]) => writeln!(s, "I {v} {l} {r}"),
            (None, _) => unreachable!("validated on construction"),
        };
    }
    let _ = writeln!(s, "R {}", t.root());
    s
}

/// Parse a vtree whose leaf names are resolved through `names`.
pub fn parse_vtree(text: &str, names: &Variables) -> Result<Vtree> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    parse_vtree_lines(&lines, names).map(|(t, _)| t)
}

/// Parse numbered lines; also returns the map from written ids to nodes.
pub(crate) fn parse_vtree_lines(
    lines: &[(usize, &str)],
    names: &Variables,
) -> Result<(Vtree, HashMap<u64, VNodeId>)> {
    let mut b = VtreeBuilder::new();
    let mut ids: HashMap<u64, VNodeId> = HashMap::new();
    let mut root: Option<VNodeId> = None;
    let mut dummies = 0u32;
    for &(line, raw) in lines {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let id = |i: usize| -> Result<u64> {
            toks.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| {
                Error::parse(line, 1, format!("expected a node id in field {}", i + 1))
            })
        };
        let node = |i: usize| -> Result<VNodeId> {
            let k = id(i)?;
            ids.get(&k)
                .copied()
                .ok_or_else(|| Error::parse(line, 1, format!("node {k} used before definition")))
        };
        let fresh = |k: u64| -> Result<()> {
            if ids.contains_key(&k) {
                Err(Error::parse(line, 1, format!("node {k} defined twice")))
            } else {
                Ok(())
            }
        };
        match toks[0] {
            "L" if toks.len() == 3 => {
                let k = id(1)?;
                fresh(k)?;
                let x = names.lookup(toks[2]).ok_or_else(|| {
                    Error::parse(line, 1, format!("unknown variable `{}`", toks[2]))
                })?;
                ids.insert(k, b.leaf(x));
            }
            "D" if toks.len() == 2 => {
                let k = id(1)?;
                fresh(k)?;
                ids.insert(k, b.dummy(dummies));
                dummies += 1;
            }
            "I" if toks.len() == 3 || toks.len() == 4 => {
                let k = id(1)?;
                fresh(k)?;
                let v = if toks.len() == 4 {
                    b.node(node(2)?, node(3)?)
                } else {
                    b.unary(node(2)?)
                };
                ids.insert(k, v);
            }
            "R" if toks.len() == 2 => {
                if root.is_some() {
                    return Err(Error::parse(line, 1, "duplicate root marker"));
                }
                root = Some(node(1)?);
            }
            other => {
                return Err(Error::parse(
                    line,
                    1,
                    format!("malformed vtree line starting with `{other}`"),
                ))
            }
        }
    }
    let last = lines.last().map_or(1, |l| l.0);
    let root = root.ok_or_else(|| Error::parse(last, 1, "missing root marker"))?;
    Ok((b.build(root)?, ids))
}
