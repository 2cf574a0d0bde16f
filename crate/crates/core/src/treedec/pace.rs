//! PACE `.td` exchange format. Bags and vertices are 1-based on disk.

use std::fmt::Write;

use super::TreeDecomposition;
use crate::error::{Error, Result};

/// Serialize with bag `i` written as `b <i+1> ...`; tree edges follow the
/// parent relation.
pub fn write_pace(td: &TreeDecomposition, nvertices: usize) -> String {
    let mut s = format!("s td {} {} {}\n", td.len(), td.width() + 1, nvertices);
    for (i, bag) in td.bags().iter().enumerate() {
        let _ = write!(s, "b {}", i + 1);
        for v in bag {
            let _ = write!(s, " {}", v + 1);
        }
        s.push('\n');
    }
    for t in 0..td.len() {
        if let Some(p) = td.parent(t) {
            let _ = writeln!(s, "{} {}", p + 1, t + 1);
        }
    }
    s
}

/// Parse a `.td` file, rooting the tree at bag 1. Returns the decomposition
/// and the declared vertex count.
pub fn parse_pace(text: &str) -> Result<(TreeDecomposition, usize)> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (lno, raw) in text.lines().enumerate() {
        let line = lno + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let num = |i: usize| -> Result<usize> {
            toks.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| {
                Error::parse(line, 1, format!("expected a number in field {}", i + 1))
            })
        };
        match toks.first() {
            None | Some(&"c") => {}
            Some(&"s") => {
                if toks.get(1) != Some(&"td") || toks.len() != 5 {
                    return Err(Error::parse(
                        line,
                        1,
                        "expected `s td <bags> <max bag> <vertices>`",
                    ));
                }
                let h = (num(2)?, num(3)?, num(4)?);
                bags = vec![None; h.0];
                header = Some(h);
            }
            Some(&"b") => {
                let Some((nb, _, nv)) = header else {
                    return Err(Error::parse(line, 1, "bag before the solution line"));
                };
                let id = num(1)?;
                if id == 0 || id > nb || bags[id - 1].is_some() {
                    return Err(Error::parse(
                        line,
                        3,
                        format!("bad or repeated bag id {id}"),
                    ));
                }
                let mut bag = Vec::new();
                for i in 2..toks.len() {
                    let v = num(i)?;
                    if v == 0 || v > nv {
                        return Err(Error::parse(line, 1, format!("vertex {v} out of range")));
                    }
                    bag.push(v - 1);
                }
                bags[id - 1] = Some(bag);
            }
            Some(_) => {
                let Some((nb, _, _)) = header else {
                    return Err(Error::parse(line, 1, "edge before the solution line"));
                };
                if toks.len() != 2 {
                    return Err(Error::parse(line, 1, "tree edge lines hold two bag ids"));
                }
                let (a, b) = (num(0)?, num(1)?);
                if a == 0 || b == 0 || a > nb || b > nb {
                    return Err(Error::parse(line, 1, "tree edge refers to a missing bag"));
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    let Some((nb, maxbag, nv)) = header else {
        return Err(Error::parse(1, 1, "missing solution line"));
    };
    let bags: Vec<Vec<usize>> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::Decomposition(format!("bag {} missing", i + 1))))
        .collect::<Result<_>>()?;
    if nb == 0 {
        return Err(Error::Decomposition("no bags".into()));
    }
    if edges.len() != nb - 1 {
        return Err(Error::Decomposition(format!(
            "{nb} bags need {} tree edges",
            nb - 1
        )));
    }
    let mut adj = vec![Vec::new(); nb];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut parent = vec![None; nb];
    let mut seen = vec![false; nb];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(t) = stack.pop() {
        for &u in &adj[t] {
            if !seen[u] {
                seen[u] = true;
                parent[u] = Some(t);
                stack.push(u);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Decomposition(
            "tree edges do not connect all bags".into(),
        ));
    }
    let td = TreeDecomposition::new(bags, parent)?;
    if td.width() + 1 != maxbag && !(maxbag == 0 && td.width() == 0) {
        return Err(Error::Decomposition(format!(
            "declared bag size {maxbag} but largest bag has {}",
            td.width() + 1
        )));
    }
    Ok((td, nv))
}
