use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::boolfn::{VarId, Variables};
use crate::compile::{CompiledForm, Node};
use crate::error::{Error, Result};

/// Probability `p(x)` of each variable being true.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightMap {
    weights: BTreeMap<VarId, BigRational>,
}

impl WeightMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every variable in `vars` at probability `1/2`.
    pub fn uniform(vars: impl IntoIterator<Item = VarId>) -> Self {
        let half = BigRational::new(1.into(), 2.into());
        WeightMap {
            weights: vars.into_iter().map(|x| (x, half.clone())).collect(),
        }
    }

    pub fn insert(&mut self, x: VarId, p: BigRational) -> Result<()> {
        if p < BigRational::zero() || p > BigRational::one() {
            return Err(Error::Domain(format!(
                "weight {p} of {x:?} is outside [0, 1]"
            )));
        }
        self.weights.insert(x, p);
        Ok(())
    }

    pub fn get(&self, x: VarId) -> Option<&BigRational> {
        self.weights.get(&x)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Parse `name = value` lines (`#` starts a comment) or a JSON object
    /// mapping names to numbers or strings. Values may be fractions like
    /// `1/3` or exact decimals like `0.25`.
    pub fn parse(text: &str, names: &Variables) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return Self::parse_json(text, names);
        }
        let mut out = WeightMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let col = |s: &str| raw.find(s.trim()).unwrap_or(0) + 1;
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, col(line), "expected `name = value`"))?;
            let x = names.lookup(k.trim()).ok_or_else(|| {
                Error::parse(i + 1, col(k), format!("unknown variable `{}`", k.trim()))
            })?;
            let p = parse_rational(v.trim())
                .ok_or_else(|| Error::parse(i + 1, col(v), format!("bad weight `{}`", v.trim())))?;
            out.insert(x, p)
                .map_err(|e| Error::parse(i + 1, col(v), e.to_string()))?;
        }
        Ok(out)
    }

    fn parse_json(text: &str, names: &Variables) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::parse(1, 1, "expected a JSON object"))?;
        let mut out = WeightMap::new();
        for (k, v) in obj {
            let x = names
                .lookup(k)
                .ok_or_else(|| Error::parse(1, 1, format!("unknown variable `{k}`")))?;
            let p = match v {
                serde_json::Value::String(s) => parse_rational(s),
                serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                _ => None,
            }
            .ok_or_else(|| Error::parse(1, 1, format!("bad weight for `{k}`")))?;
            out.insert(x, p)
                .map_err(|e| Error::parse(1, 1, e.to_string()))?;
        }
        Ok(out)
    }
}

/// Parse `a/b`, an integer or a finite decimal exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let negative = int.starts_with('-');
    let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
    if digits.is_empty() || digits.chars().any(|c| !c.is_ascii_digit()) {
        return None;
    }
    let mut n: BigInt = digits.parse().ok()?;
    if negative {
        n = -n;
    }
    Some(BigRational::new(
        n,
        BigInt::from(10u32).pow(frac.len() as u32),
    ))
}

/// Probability that the form evaluates to true when each variable is
/// independently true with its given weight. Exact for deterministic,
/// decomposable forms.
pub fn weighted_count(form: &CompiledForm, w: &WeightMap) -> Result<BigRational> {
    let reach = form.reachable();
    let mut val: Vec<BigRational> = Vec::with_capacity(form.size());
    for (g, n) in form.nodes().iter().enumerate() {
        if !reach[g] {
            val.push(BigRational::zero());
            continue;
        }
        let v = match n {
            Node::Const(b) => {
                if *b {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
            Node::Input(x) => w.get(*x).cloned().ok_or_else(|| {
                Error::Domain(format!(
                    "no weight for variable {}",
                    form.names().display(*x)
                ))
            })?,
            Node::Not(c) => BigRational::one() - &val[*c],
            Node::And { parts, .. } => &val[parts[0]] * &val[parts[1]],
            Node::Or { children, .. } => children
                .iter()
                .fold(BigRational::zero(), |acc, &c| acc + &val[c]),
        };
        val.push(v);
    }
    Ok(val.swap_remove(form.root()))
}

/// Number of models over the form's variables.
pub fn model_count(form: &CompiledForm) -> Result<BigInt> {
    let p = weighted_count(form, &WeightMap::uniform(form.vars().iter()))?;
    let scaled = p * BigRational::from_integer(BigInt::one() << form.vars().len());
    Ok(scaled.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{BoolFunc, VarSet};
    use crate::compile::compile_dsnnf;
    use crate::vtree::Vtree;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/3"), Some(r(1, 3)));
        assert_eq!(parse_rational("0.25"), Some(r(1, 4)));
        assert_eq!(parse_rational("1"), Some(r(1, 1)));
        assert_eq!(parse_rational(".5"), Some(r(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("1e-3"), None);
    }

    #[test]
    fn weights_text_and_json() {
        let names = Variables::from_names(["x", "y"]).unwrap();
        let a = WeightMap::parse("x = 1/3  # comment\n\ny=0.5\n", &names).unwrap();
        let b = WeightMap::parse(r#"{"x": "1/3", "y": 0.5}"#, &names).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get(VarId(0)), Some(&r(1, 3)));
        let e = WeightMap::parse("x = 3/2", &names).unwrap_err();
        assert!(e.is_parse());
        assert!(WeightMap::parse("z = 1", &names).unwrap_err().is_parse());
        assert!(WeightMap::parse("x 1", &names).unwrap_err().is_parse());
    }

    #[test]
    fn implication_probability() {
        // 1 - p(x)(1 - p(y)) = 1 - 1/3 * 1/2
        let f = BoolFunc::var(VarId(0))
            .not()
            .or(&BoolFunc::var(VarId(1)))
            .unwrap();
        let t = Vtree::balanced(&[VarId(0), VarId(1)]).unwrap();
        let form = compile_dsnnf(&f, &t).unwrap();
        let mut w = WeightMap::new();
        w.insert(VarId(0), r(1, 3)).unwrap();
        w.insert(VarId(1), r(1, 2)).unwrap();
        assert_eq!(weighted_count(&form, &w).unwrap(), r(5, 6));
        assert_eq!(model_count(&form).unwrap(), BigInt::from(3));
        w.weights.remove(&VarId(1));
        assert!(weighted_count(&form, &w).is_err());
    }

    #[test]
    fn count_of_constant_over_variables() {
        let f = BoolFunc::constant(VarSet::range(3), true).unwrap();
        let t = Vtree::balanced(&[VarId(0), VarId(1), VarId(2)]).unwrap();
        assert_eq!(
            model_count(&compile_dsnnf(&f, &t).unwrap()).unwrap(),
            BigInt::from(8)
        );
    }
}
