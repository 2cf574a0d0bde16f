use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};
use twsdd_core::analysis::{
    comm_rank, disjointness, disjointness_blocks, model_count, verify, weighted_count, WeightMap,
};
use twsdd_core::boolfn::set_var_cap;
use twsdd_core::compile::{factor_width, structured_width, write_form};
use twsdd_core::isa::{isa_sdd, isa_size_audit, IsaParams};
use twsdd_core::querylab::{
    hardness_experiment, lineage, Database, HardnessReport, Ucq, VtreeMode,
};
use twsdd_core::treedec::{
    exact_elimination_order, min_fill_decompose, write_pace, TreeDecomposition,
};
use twsdd_core::vtree::write_vtree;
use twsdd_core::{compile_dsnnf, compile_sdd, Assignment, Error, VarSet};

use crate::input::{self, load_circuit, load_form, read, usage, UsageError, VtreeSource};
use crate::{Cli, Command, Common, Mode};

/// Largest graph `decompose --exact` accepts.
const EXACT_DECOMPOSE_LIMIT: usize = 20;

/// 1 for malformed input, 2 when the variable cap is exceeded, 3 otherwise.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Parse { .. } => 1,
                Error::Capacity { .. } => 2,
                _ => 3,
            };
        }
        if cause.is::<UsageError>() || cause.is::<std::io::Error>() {
            return 1;
        }
    }
    3
}

fn configure_cap(common: &Common) -> Result<()> {
    let cap = match common.cap {
        Some(c) => Some(c),
        None => match std::env::var("TWSDD_CAP") {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| usage(format!("TWSDD_CAP is not a number: `{v}`")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(c) = cap {
        if c == 0 || c > 32 {
            bail!(usage(format!(
                "variable cap must be between 1 and 32, got {c}"
            )));
        }
        set_var_cap(c);
    }
    Ok(())
}

struct Output<'a> {
    common: &'a Common,
    start: Instant,
}

impl Output<'_> {
    /// Print `summary` or the report, and write the report file if asked.
    fn emit(&self, command: &str, mut report: Value, summary: &str) -> Result<()> {
        let obj = report.as_object_mut().expect("reports are objects");
        obj.insert("schema".into(), json!(1));
        obj.insert("command".into(), json!(command));
        if self.common.timing {
            obj.insert(
                "wall_ms".into(),
                json!(self.start.elapsed().as_secs_f64() * 1e3),
            );
        }
        let text = serde_json::to_string_pretty(&report)?;
        if let Some(path) = &self.common.report {
            write(path, &(text.clone() + "\n"))?;
        }
        if self.common.json {
            println!("{text}");
        } else {
            print!("{summary}");
        }
        Ok(())
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn ratio(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    configure_cap(&cli.common)?;
    let out = Output {
        common: &cli.common,
        start: Instant::now(),
    };
    let seed = cli.common.seed;
    match &cli.command {
        Command::Compile {
            input,
            sdd,
            dsnnf: _,
            vtree,
            output,
            vtree_out,
            no_verify,
        } => compile(
            &out,
            input,
            *sdd,
            vtree,
            seed,
            output.as_deref(),
            vtree_out.as_deref(),
            *no_verify,
        ),
        Command::Count { form, weights } => count(&out, form, weights.as_deref()),
        Command::Verify { form, circuit } => verify_cmd(&out, form, circuit.as_deref()),
        Command::Rank { function, left } => rank(&out, function, left.as_deref()),
        Command::BenchH {
            k,
            n,
            mode,
            csv,
            jobs,
        } => bench_h(&out, *k, n, *mode, csv.as_deref(), *jobs),
        Command::Isa {
            k,
            m,
            audit,
            output,
        } => isa(&out, *k, *m, *audit, output.as_deref()),
        Command::Lineage {
            query,
            db,
            output,
            no_prob,
        } => lineage_cmd(&out, query, db, output.as_deref(), *no_prob, seed),
        Command::Decompose {
            input,
            exact,
            output,
        } => decompose(&out, input, *exact, output.as_deref()),
    }
}

#[allow(clippy::too_many_arguments)]
fn compile(
    out: &Output,
    input: &Path,
    sdd: bool,
    src: &VtreeSource,
    seed: u64,
    output: Option<&Path>,
    vtree_out: Option<&Path>,
    no_verify: bool,
) -> Result<u8> {
    let c = load_circuit(input)?;
    let f = c.to_function()?;
    let (t, td_width) = input::vtree_for(&c, src, seed)?;
    let mut form = if sdd {
        compile_sdd(&f, &t)?
    } else {
        compile_dsnnf(&f, &t)?
    };
    form.set_names(c.names().clone())?;
    let fw = factor_width(&f, &t)?.width;
    let width = structured_width(&form).width;
    let check = (!no_verify).then(|| verify(&form)).transpose()?;
    if let Some(path) = output {
        write(path, &write_form(&form))?;
    }
    if let Some(path) = vtree_out {
        write(path, &write_vtree(&t, c.names()))?;
    }
    let kind = form.kind().token();
    let width_key = if sdd { "sdw" } else { "fiw" };
    let mut report = json!({
        "input": input.display().to_string(),
        "kind": kind,
        "n": f.arity(),
        "size": form.size(),
        "fw": fw,
        width_key: width,
        "decomposition_width": td_width,
        "verified": check.as_ref().map(|r| r.ok()),
        "violations": check.as_ref().map(|r| r.violations.clone()),
        "output": output.map(|p| p.display().to_string()),
    });
    if *src == VtreeSource::Random {
        report["seed"] = json!(seed);
    }
    let verdict = match &check {
        None => "not verified".to_string(),
        Some(r) if r.ok() => "verified".to_string(),
        Some(r) => format!("{} violations", r.violations.len()),
    };
    let summary = format!(
        "{kind}: n={} size={} fw={fw} {width_key}={width} ({verdict})\n",
        f.arity(),
        form.size()
    );
    out.emit("compile", report, &summary)?;
    Ok(if check.is_some_and(|r| !r.ok()) { 3 } else { 0 })
}

fn count(out: &Output, path: &Path, weights: Option<&Path>) -> Result<u8> {
    let form = load_form(path)?;
    let models = model_count(&form)?;
    let mut w = match weights {
        Some(p) => WeightMap::parse(&read(p)?, form.names())
            .with_context(|| format!("in {}", p.display()))?,
        None => WeightMap::new(),
    };
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for x in form.vars().iter() {
        if w.get(x).is_none() {
            w.insert(x, half.clone())?;
        }
    }
    let p = weighted_count(&form, &w)?;
    let report = json!({
        "form": path.display().to_string(),
        "n": form.vars().len(),
        "model_count": models.to_string(),
        "weighted": ratio(&p),
        "weighted_approx": p.to_f64(),
    });
    let summary = format!("models: {models}\nweighted: {}\n", ratio(&p));
    out.emit("count", report, &summary)?;
    Ok(0)
}

fn verify_cmd(out: &Output, path: &Path, circuit: Option<&Path>) -> Result<u8> {
    let form = load_form(path)?;
    let rep = verify(&form)?;
    let mut equivalent = None;
    if let Some(cp) = circuit {
        let c = load_circuit(cp)?;
        let f = form.to_function()?;
        let mut map = Vec::new();
        for x in form.vars().iter() {
            let name = form.names().display(x);
            let y = c
                .names()
                .lookup(&name)
                .ok_or_else(|| usage(format!("the circuit has no variable `{name}`")))?;
            map.push(y);
        }
        if let Some(y) = c.vars().iter().find(|y| !map.contains(y)) {
            bail!(usage(format!(
                "the form has no variable `{}`",
                c.names().display(y)
            )));
        }
        let mut same = true;
        for idx in 0..1u64 << f.arity() {
            let a = Assignment::new(
                map.iter()
                    .enumerate()
                    .map(|(i, &y)| (y, (idx >> i) & 1 == 1)),
            )?;
            if c.eval(&a)? != f.get(idx) {
                same = false;
                break;
            }
        }
        equivalent = Some(same);
    }
    let ok = rep.ok() && equivalent != Some(false);
    let mut summary = format!(
        "{}: {} gates, {} decision nodes, {} violations\n",
        form.kind().token(),
        rep.checked_gates,
        rep.decisions,
        rep.violations.len()
    );
    for v in rep.violations.iter().take(10) {
        summary.push_str(&format!(
            "  {:?} at gate {}: {}\n",
            v.property, v.gate, v.detail
        ));
    }
    if let Some(e) = equivalent {
        summary.push_str(&format!("equivalent to circuit: {e}\n"));
    }
    let report = json!({
        "form": path.display().to_string(),
        "kind": form.kind().token(),
        "ok": ok,
        "checked_gates": rep.checked_gates,
        "decisions": rep.decisions,
        "violations": rep.violations,
        "equivalent": equivalent,
    });
    out.emit("verify", report, &summary)?;
    Ok(if ok { 0 } else { 3 })
}

fn rank(out: &Output, function: &str, left: Option<&str>) -> Result<u8> {
    let (f, x, y, names) = if let Some(n) = function.strip_prefix("disjointness:") {
        let n: u32 = n
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad size in `{function}`")))?;
        if n == 0 {
            bail!(usage("disjointness needs n ≥ 1"));
        }
        let (x, y) = disjointness_blocks(n);
        (disjointness(n)?, x, y, None)
    } else {
        let c = load_circuit(Path::new(function))?;
        let left = left.ok_or_else(|| usage("--left is required for a circuit"))?;
        let mut x = VarSet::empty();
        for name in left.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            x.insert(
                c.names()
                    .lookup(name)
                    .ok_or_else(|| usage(format!("unknown variable `{name}`")))?,
            );
        }
        let y = c.vars().difference(&x);
        (c.to_function()?, x, y, Some(c.names().clone()))
    };
    let r = comm_rank(&f, &x, &y)?;
    let show = |s: &VarSet| -> Vec<String> {
        s.iter()
            .map(|v| names.as_ref().map_or(format!("v{}", v.0), |n| n.display(v)))
            .collect()
    };
    let report = json!({
        "function": function,
        "rows": show(&x),
        "columns": show(&y),
        "rank": r,
    });
    out.emit("rank", report, &format!("{r}\n"))?;
    Ok(0)
}

fn bench_h(
    out: &Output,
    k: u32,
    ns: &str,
    mode: Mode,
    csv: Option<&Path>,
    jobs: usize,
) -> Result<u8> {
    let ns = input::parse_list(ns)?;
    let mode = match mode {
        Mode::Separating => VtreeMode::Separating,
        Mode::Auto => VtreeMode::Auto,
    };
    let jobs = if jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        jobs
    };
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<twsdd_core::Result<HardnessReport>>>> =
        Mutex::new(vec![None; ns.len()].into_iter().collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.min(ns.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&n) = ns.get(i) else { break };
                let r = hardness_experiment(k, [n], mode);
                results.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    let mut merged = HardnessReport {
        k,
        mode,
        rows: Vec::new(),
    };
    for r in results.into_inner().expect("worker panicked") {
        merged.rows.extend(r.expect("every instance ran")?.rows);
    }
    if let Some(path) = csv {
        write(path, &merged.to_csv())?;
    }
    let pass = merged.pass();
    let mut summary = String::from("  n  i  size  cover  rank  floor  pass\n");
    for r in &merged.rows {
        summary.push_str(&format!(
            "{:>3} {:>2} {:>5} {:>6} {:>5} {:>6}  {}\n",
            r.n,
            r.i,
            r.size,
            r.cover_size,
            r.rank,
            r.floor.map_or("-".to_string(), |f| f.to_string()),
            r.pass
        ));
    }
    let mut report = serde_json::to_value(&merged)?;
    report["pass"] = json!(pass);
    out.emit("bench-h", report, &summary)?;
    Ok(if pass { 0 } else { 3 })
}

fn isa(out: &Output, k: u32, m: u32, audit: bool, output: Option<&Path>) -> Result<u8> {
    let p = IsaParams::new(k, m).map_err(|e| usage(e.to_string()))?;
    let form = isa_sdd(p)?;
    if let Some(path) = output {
        write(path, &write_form(&form))?;
    }
    if !audit {
        let report = json!({ "k": k, "m": m, "n": p.n(), "size": form.size() });
        out.emit(
            "isa",
            report,
            &format!("isa k={k} m={m}: n={} size={}\n", p.n(), form.size()),
        )?;
        return Ok(0);
    }
    let a = isa_size_audit(p)?;
    let summary = format!(
        "isa k={k} m={m}: n={} size={} bound={} (constant {:.3})\n  v-ands {} <= {}, w-ands {} <= {}, largest prime {} vars\n  equivalent={} verified={} {}\n",
        a.n,
        a.size,
        a.bound_total,
        a.constant,
        a.ands_v,
        a.bound_ands_v,
        a.ands_w,
        a.bound_ands_w,
        a.max_prime_vars,
        a.equivalent,
        a.verified,
        if a.pass { "PASS" } else { "FAIL" }
    );
    out.emit("isa", serde_json::to_value(&a)?, &summary)?;
    Ok(if a.pass { 0 } else { 3 })
}

fn lineage_cmd(
    out: &Output,
    query: &str,
    db: &Path,
    output: Option<&Path>,
    no_prob: bool,
    seed: u64,
) -> Result<u8> {
    let text = match query.strip_prefix('@') {
        Some(p) => read(Path::new(p))?,
        None => query.to_string(),
    };
    let q = Ucq::parse(&text)?;
    let d = Database::parse(&read(db)?).with_context(|| format!("in {}", db.display()))?;
    let c = lineage(&q, &d)?;
    if let Some(path) = output {
        write(path, &c.to_bc_string())?;
    }
    let mut prob = None;
    if !no_prob && !d.tuples().is_empty() {
        let f = c.to_function()?;
        let (t, _) = input::vtree_for(&c, &VtreeSource::Derive, seed)?;
        let form = compile_dsnnf(&f, &t)?;
        let mut w = d.weights();
        for tup in d.tuples() {
            if w.get(tup.var).is_none() {
                w.insert(tup.var, BigRational::one())?;
            }
        }
        prob = Some(weighted_count(&form, &w)?);
    }
    let report = json!({
        "query": q.to_string(),
        "tuples": d.tuples().len(),
        "gates": c.len(),
        "probability": prob.as_ref().map(ratio),
        "probability_approx": prob.as_ref().and_then(|p| p.to_f64()),
    });
    let mut summary = format!(
        "{q}\nlineage: {} gates over {} tuples\n",
        c.len(),
        d.tuples().len()
    );
    if let Some(p) = &prob {
        summary.push_str(&format!("probability: {}\n", ratio(p)));
    }
    out.emit("lineage", report, &summary)?;
    Ok(0)
}

fn decompose(out: &Output, input: &Path, exact: bool, output: Option<&Path>) -> Result<u8> {
    let c = load_circuit(input)?;
    let g = c.underlying_graph();
    let td = if exact {
        let (_, order) = exact_elimination_order(&g, EXACT_DECOMPOSE_LIMIT)?;
        TreeDecomposition::from_elimination_order(&g, &order)?
    } else {
        min_fill_decompose(&g)
    };
    td.validate(&g)?;
    if let Some(path) = output {
        write(path, &write_pace(&td, g.vertex_count()))?;
    }
    let report = json!({
        "input": input.display().to_string(),
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "bags": td.len(),
        "width": td.width(),
        "exact": exact,
    });
    let summary = format!(
        "{} vertices, {} edges: width {}{}\n",
        g.vertex_count(),
        g.edge_count(),
        td.width(),
        if exact { " (exact)" } else { "" }
    );
    out.emit("decompose", report, &summary)?;
    Ok(0)
}
