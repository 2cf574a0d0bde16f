use std::collections::{BTreeSet, HashMap};

use super::db::Database;
use super::query::{Disjunct, Ucq};
use crate::boolfn::VarId;
use crate::circuit::{Circuit, CircuitBuilder};
use crate::error::{Error, Result};

/// Monotone Or-of-Ands over the tuple variables: one And per valuation of a
/// disjunct that maps every atom to a tuple of `db` and respects the
/// inequalities. Valuations matching the same tuple set share one gate.
pub fn lineage(q: &Ucq, db: &Database) -> Result<Circuit> {
    for d in &q.disjuncts {
        for a in &d.atoms {
            match db.arity(&a.relation) {
                None => {
                    return Err(Error::Query(format!(
                        "relation {} is not in the database",
                        a.relation
                    )))
                }
                Some(k) if k != a.args.len() => {
                    return Err(Error::Query(format!(
                        "atom {}({}) has arity {} but the relation has {k}",
                        a.relation,
                        a.args.join(","),
                        a.args.len()
                    )))
                }
                _ => {}
            }
        }
    }
    let mut terms: Vec<BTreeSet<VarId>> = Vec::new();
    let mut seen = BTreeSet::new();
    for d in &q.disjuncts {
        let mut binding = HashMap::new();
        let mut used = Vec::new();
        matches(d, db, 0, &mut binding, &mut used, &mut |set| {
            if seen.insert(set.clone()) {
                terms.push(set);
            }
        });
    }

    let mut b = CircuitBuilder::with_names(db.names().clone());
    let inputs: Vec<usize> = db.tuples().iter().map(|t| b.input_var(t.var)).collect();
    let ands: Vec<usize> = terms
        .iter()
        .map(|set| {
            let cs: Vec<usize> = set.iter().map(|x| inputs[x.index()]).collect();
            if cs.len() == 1 {
                cs[0]
            } else {
                b.and(cs)
            }
        })
        .collect();
    let out = match ands[..] {
        [] => b.constant(false),
        [g] => g,
        _ => b.or(ands),
    };
    b.build(out)
}

/// Backtracking join over the atoms of `d`, calling `emit` with the tuple set
/// of every complete valuation.
fn matches(
    d: &Disjunct,
    db: &Database,
    i: usize,
    binding: &mut HashMap<String, i64>,
    used: &mut Vec<VarId>,
    emit: &mut dyn FnMut(BTreeSet<VarId>),
) {
    if i == d.atoms.len() {
        if d.inequalities.iter().all(|(a, b)| binding[a] != binding[b]) {
            emit(used.iter().copied().collect());
        }
        return;
    }
    let atom = &d.atoms[i];
    for t in db.tuples_of(&atom.relation) {
        let mut fresh = Vec::new();
        let mut ok = true;
        for (v, &c) in atom.args.iter().zip(&t.args) {
            match binding.get(v) {
                Some(&b) if b != c => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    binding.insert(v.clone(), c);
                    fresh.push(v.clone());
                }
            }
        }
        if ok {
            used.push(t.var);
            matches(d, db, i + 1, binding, used, emit);
            used.pop();
        }
        for v in fresh {
            binding.remove(&v);
        }
    }
}

/// Direct semantics: whether the subdatabase given by `present` satisfies `q`,
/// by enumerating valuations into the active domain.
pub fn holds(q: &Ucq, db: &Database, present: &dyn Fn(VarId) -> bool) -> bool {
    let dom = db.active_domain();
    let lookup: HashMap<(String, Vec<i64>), VarId> = db
        .tuples()
        .iter()
        .map(|t| ((t.relation.clone(), t.args.clone()), t.var))
        .collect();
    q.disjuncts.iter().any(|d| {
        let vars = d.variables();
        let mut val = vec![0usize; vars.len()];
        if dom.is_empty() {
            return false;
        }
        loop {
            let env: HashMap<&str, i64> = vars
                .iter()
                .map(String::as_str)
                .zip(val.iter().map(|&i| dom[i]))
                .collect();
            let sat = d
                .inequalities
                .iter()
                .all(|(a, b)| env[a.as_str()] != env[b.as_str()])
                && d.atoms.iter().all(|a| {
                    let args: Vec<i64> = a.args.iter().map(|v| env[v.as_str()]).collect();
                    lookup
                        .get(&(a.relation.clone(), args))
                        .is_some_and(|&x| present(x))
                });
            if sat {
                return true;
            }
            // odometer step
            let mut k = 0;
            while k < val.len() {
                val[k] += 1;
                if val[k] < dom.len() {
                    break;
                }
                val[k] = 0;
                k += 1;
            }
            if k == val.len() {
                return false;
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{Assignment, BoolFunc};

    fn check(q: &str, db: &str) -> (Circuit, Database, Ucq) {
        let (q, db) = (Ucq::parse(q).unwrap(), Database::parse(db).unwrap());
        let c = lineage(&q, &db).unwrap();
        let all = db.names().all();
        for idx in 0..(1u64 << all.len()) {
            let a = Assignment::from_index(&all, idx);
            let direct = holds(&q, &db, &|x| a.get(x).unwrap());
            assert_eq!(c.eval(&a).unwrap(), direct, "subdatabase {a:?}");
        }
        (c, db, q)
    }

    #[test]
    fn unary_exists() {
        let (c, db, _) = check("q() :- R(x)", "rel R/1\nt R 1\nt R 2");
        let f = c.to_function().unwrap();
        let r1 = BoolFunc::var(db.names().lookup("R(1)").unwrap());
        let r2 = BoolFunc::var(db.names().lookup("R(2)").unwrap());
        assert_eq!(f, r1.or(&r2).unwrap());
    }

    #[test]
    fn inequality_kills_the_only_valuation() {
        let (c, _, _) = check(
            "q() :- R(x), S(y), x != y",
            "rel R/1\nrel S/1\nt R 1\nt S 1",
        );
        assert!(c.to_function().unwrap().is_false());
    }

    #[test]
    fn join_on_shared_variable() {
        let (c, db, _) = check("q() :- R(x), S(x)", "rel R/1\nrel S/1\nt R 1\nt S 1\nt R 2");
        let f = c.to_function().unwrap();
        let r1 = BoolFunc::var(db.names().lookup("R(1)").unwrap());
        let s1 = BoolFunc::var(db.names().lookup("S(1)").unwrap());
        let expect = r1.and(&s1).unwrap().extend(f.vars()).unwrap();
        assert_eq!(f, expect);
    }

    #[test]
    fn union_and_repeated_variables() {
        check(
            "q() :- R(x,x) | q() :- R(x,y), S(y), x != y",
            "rel R/2\nrel S/1\nt R 1 1\nt R 1 2\nt R 2 3\nt S 2\nt S 3",
        );
    }

    #[test]
    fn mismatches_are_errors() {
        let db = Database::parse("rel R/1\nt R 1").unwrap();
        assert!(lineage(&Ucq::parse("q() :- R(x,y)").unwrap(), &db).is_err());
        assert!(lineage(&Ucq::parse("q() :- T(x)").unwrap(), &db).is_err());
    }
}
