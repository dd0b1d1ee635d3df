//! One function per subcommand.

use std::path::Path;

use matdisc::bounds::{bound_all, BoundReport};
use matdisc::coloring::{
    brute_force_min, coloring_strategy, partial_color, BoundRule, PartialColoringParams, SolveParams,
};
use matdisc::entropy_net::{
    build_entropy_net_capped, entropy_from_op_check, net_error_sampled, sample_op_triple, starts_from_json,
    BlockSampler, NET_SIZE_CAP,
};
use matdisc::instance::{family, FamilySpec};
use matdisc::measure::{mc_gaussian_measure, measure_exponent_sweep, MeasureRow, ThresholdRule};
use matdisc::mirror::{mirror_setup, verify_cover_sampled, StartSet};
use matdisc::{rng, Error, Exponent, Instance};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{
    BoundsArgs, Command, GenArgs, InstanceArgs, MdcheckArgs, MeasureArgs, NetcheckArgs, SolveArgs, SweepArgs,
};
use crate::config::Resolved;
use crate::output::{echo_config, emit, Table};
use crate::{row, CliError, Status};

pub fn dispatch(r: &Resolved) -> Result<Status, CliError> {
    let echo = serde_json::to_value(r).expect("config serializes");
    let out = r.out.as_deref();
    match &r.command {
        Command::Gen(a) => cmd_gen(a, r.seed, out),
        Command::Solve(a) => cmd_solve(a, r, out),
        Command::Bounds(a) => with_echo(cmd_bounds(a, out), &echo, out),
        Command::Mdcheck(a) => with_echo(cmd_mdcheck(a, r.seed, out), &echo, out),
        Command::Netcheck(a) => with_echo(cmd_netcheck(a, r.seed, out), &echo, out),
        Command::Measure(a) => with_echo(cmd_measure(a, r.seed, out), &echo, out),
        Command::Sweep(a) => with_echo(cmd_sweep(a, r, out), &echo, out),
    }
}

fn with_echo(res: Result<Status, CliError>, echo: &serde_json::Value, out: Option<&Path>) -> Result<Status, CliError> {
    let s = res?;
    echo_config(echo, out)?;
    Ok(s)
}

fn parse_rule(s: Option<&str>) -> Result<BoundRule, CliError> {
    Ok(s.unwrap_or("spencer").parse()?)
}

pub fn load_instance(a: &InstanceArgs, seed: u64) -> Result<Instance, CliError> {
    let mut inst = match (&a.instance, &a.family) {
        (Some(path), None) => matdisc::instance::load(path)?,
        (None, Some(name)) => family(name)?.generate(&FamilySpec {
            n: a.n,
            m: a.m,
            p: a.p.unwrap_or(Exponent::INF),
            q: a.q,
            r: a.r,
            h: a.h,
            seed,
            symmetrize: !a.raw.unwrap_or(false),
        })?,
        (Some(_), Some(_)) => return Err(CliError::Config("give either an instance file or a family, not both".into())),
        (None, None) => return Err(CliError::Config("an instance file or a generator family is required".into())),
    };
    if a.instance.is_some() {
        if let Some(q) = a.q {
            inst.q = q;
            inst.validate()?;
        }
    }
    Ok(inst)
}

fn cmd_gen(a: &GenArgs, seed: u64, out: Option<&Path>) -> Result<Status, CliError> {
    let inst = load_instance(&a.inst, seed)?;
    emit(&matdisc::instance::to_json_string(&inst)?, out)?;
    Ok(Status::Pass)
}

fn bound_ratios(report: &BoundReport, value: f64) -> serde_json::Map<String, serde_json::Value> {
    BoundReport::NAMES
        .iter()
        .filter_map(|name| report.get(name).filter(|b| *b > 0.0).map(|b| (name.to_string(), json!(value / b))))
        .collect()
}

fn cmd_solve(a: &SolveArgs, r: &Resolved, out: Option<&Path>) -> Result<Status, CliError> {
    let inst = load_instance(&a.inst, r.seed)?;
    let rule = parse_rule(a.rule.as_deref())?;
    let mode = a.mode.as_deref().unwrap_or("full");
    let c_max = a.c_max.unwrap_or(6.0);
    let target = rule.target(&inst, inst.n)?;
    let bounds = bound_all(inst.n, inst.m, inst.p, inst.q, inst.r, inst.h)?;

    let mut report = json!({
        "mode": mode,
        "rule": rule.to_string(),
        "n": inst.n,
        "m": inst.m,
        "p": inst.p,
        "q": inst.q,
        "seed": r.seed,
        "target": target,
        "bounds": bounds,
    });
    let (x, value, retries, max_c, strategy) = match mode {
        "full" => {
            let name = a.strategy.as_deref().unwrap_or("gaussian-projection");
            let params = SolveParams {
                q: inst.q,
                rule,
                partial: r.partial.clone(),
                random_trials: a.random_trials.unwrap_or(64),
            };
            match coloring_strategy(name)?.solve(&inst, &params) {
                Ok(o) => {
                    let (retries, max_c) = match &o.full {
                        Some(f) => (Some(f.rounds.iter().map(|x| x.retries).sum::<usize>()), Some(f.max_c)),
                        None => (None, None),
                    };
                    report["rounds"] = json!(o.full.as_ref().map(|f| &f.rounds));
                    (o.x, o.value, retries, max_c, name.to_string())
                }
                Err(e @ Error::ColoringFailed { .. }) => return fail_report(report, &e, out),
                Err(e) => return Err(e.into()),
            }
        }
        "partial" => {
            let t = a.t.unwrap_or(target);
            let rep = partial_color(&inst, t, None, &r.partial)?;
            report["target"] = json!(t);
            report["frozen"] = json!(rep.coloring.frozen);
            report["oracle_calls"] = json!(rep.oracle_calls);
            if !rep.success {
                report["x"] = json!(rep.coloring.x);
                let e = Error::ColoringFailed {
                    round: 1,
                    reason: rep.message.unwrap_or_else(|| "fewer than half the coordinates froze".into()),
                };
                return fail_report(report, &e, out);
            }
            (rep.coloring.x, rep.value, Some(rep.retries), Some(rep.c), "gaussian-projection".to_string())
        }
        other => return Err(CliError::Config(format!("mode must be partial or full, got `{other}`"))),
    };
    let target = report["target"].as_f64().expect("target set");
    let ratio = value / target;
    report["strategy"] = json!(strategy);
    report["x"] = json!(x);
    report["value"] = json!(value);
    report["ratio"] = json!(ratio);
    report["bound_ratios"] = json!(bound_ratios(&bounds, value));
    report["retries"] = json!(retries);
    report["c"] = json!(max_c);
    let optimum = if a.brute_check.unwrap_or(false) {
        let (bx, bv) = brute_force_min(&inst, inst.q)?;
        report["brute_force"] = json!({ "x": bx, "value": bv, "ratio_to_optimum": value / bv });
        Some(bv)
    } else {
        None
    };
    emit(&(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"), out)?;
    if let Some(path) = &a.report {
        let mut t = Table::new(&[
            "n", "m", "p", "q", "mode", "strategy", "rule", "value", "target", "ratio", "retries", "c", "optimum", "seed",
        ]);
        t.push(row![
            inst.n, inst.m, inst.p, inst.q, mode, strategy, rule.to_string(), value, target, ratio, retries, max_c,
            optimum, r.seed
        ]);
        std::fs::write(path, t.to_csv_string()?)?;
    }
    eprintln!("{mode} coloring: value {value:.6} target {target:.6} ratio {ratio:.4}");
    Ok(if ratio > c_max { Status::OverBound } else { Status::Pass })
}

fn fail_report(mut report: serde_json::Value, e: &Error, out: Option<&Path>) -> Result<Status, CliError> {
    report["error"] = json!(e.to_string());
    emit(&(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"), out)?;
    eprintln!("error: {e}");
    Ok(Status::Violation)
}

fn cmd_bounds(a: &BoundsArgs, out: Option<&Path>) -> Result<Status, CliError> {
    let ns = a.n.clone().unwrap_or_else(|| vec![16]);
    let p = a.p.unwrap_or(Exponent::INF);
    let q = a.q.unwrap_or(p);
    let mut t = Table::new(&[
        "n", "m", "p", "q", "r", "h", "k", "spencer", "matrix_spencer_conj", "lowrank", "block", "schatten",
        "schatten_full", "banaszczyk", "komlos", "out_of_regime",
    ]);
    for &n in &ns {
        let ms = a.m.clone().unwrap_or_else(|| vec![n]);
        for &m in &ms {
            let b = bound_all(n, m, p, q, a.r, a.h)?;
            t.push(row![
                b.n, b.m, b.p, b.q, b.r, b.h, b.k, b.spencer, b.matrix_spencer_conj, b.lowrank, b.block, b.schatten,
                b.schatten_full, b.banaszczyk, b.komlos, b.out_of_regime.join(";")
            ]);
        }
    }
    emit(&t.to_csv_string()?, out)?;
    Ok(Status::Pass)
}

fn cmd_mdcheck(a: &MdcheckArgs, seed: u64, out: Option<&Path>) -> Result<Status, CliError> {
    let setup = mirror_setup(a.setup.as_deref().unwrap_or("spectraplex"))?;
    let m = a.m.unwrap_or(16);
    let n = a.n.unwrap_or(2 * m);
    let runs = a.runs.unwrap_or(200);
    let samples = a.samples.unwrap_or(1);
    let starts_kind = a.starts.as_deref().unwrap_or("default");
    let starts: Box<dyn StartSet> = match starts_kind {
        "default" => Box::new(vec![setup.default_start(m)]),
        "net" => Box::new(build_entropy_net_capped(m, 1, n, NET_SIZE_CAP)?),
        path => Box::new(starts_from_json(&std::fs::read_to_string(path)?)?),
    };
    let p = setup.dual_exponent();
    let reports = (0..runs)
        .into_par_iter()
        .map(|k| {
            let run_seed = rng::derive(seed, k as u64);
            let inst = matdisc::instance::gen_random(n, m, p, None, None, run_seed)?;
            verify_cover_sampled(&inst, starts.as_ref(), setup.clone(), samples, run_seed)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut t = Table::new(&["run", "setup", "m", "n", "starts", "sample", "d", "bound", "best_value", "ratio", "ok"]);
    let mut failures = Vec::new();
    for (k, rep) in reports.iter().enumerate() {
        for s in &rep.records {
            let ratio = if s.bound > 0.0 { s.best_value / s.bound } else { 0.0 };
            if !s.ok {
                failures.push(format!("run {k} sample {}: best {} > bound {}", s.sample, s.best_value, s.bound));
            }
            t.push(row![k, rep.setup.clone(), m, n, starts_kind, s.sample, s.d, s.bound, s.best_value, ratio, s.ok]);
        }
    }
    emit(&t.to_csv_string()?, out)?;
    let total = runs * samples;
    eprintln!(
        "mdcheck {}: success fraction {:.4} ({} of {total})",
        setup.name(),
        (total - failures.len()) as f64 / total.max(1) as f64,
        total - failures.len()
    );
    for f in &failures {
        eprintln!("violation: {f}");
    }
    Ok(if failures.is_empty() { Status::Pass } else { Status::Violation })
}

fn cmd_netcheck(a: &NetcheckArgs, seed: u64, out: Option<&Path>) -> Result<Status, CliError> {
    let (m, h, n) = (a.m.unwrap_or(8), a.h.unwrap_or(1), a.n.unwrap_or(8));
    let trials = a.trials.unwrap_or(1000);
    let c_limit = a.c_limit.unwrap_or(4.0);
    let lemma_trials = a.lemma_trials.unwrap_or(1000);
    let cap = a.size_cap.map(u128::from).unwrap_or(NET_SIZE_CAP);
    let net = build_entropy_net_capped(m, h, n, cap)?;
    let rep = net_error_sampled(&net, &BlockSampler { m, h }, trials, seed, c_limit)?;
    if let Some(path) = &a.export {
        std::fs::write(path, net.to_json_string(100_000)?)?;
    }
    let checks = (0..lemma_trials)
        .into_par_iter()
        .map(|k| {
            let mut g = rng::stream(rng::derive(seed, 0x6c656d), k as u64);
            let (x, y, eps) = sample_op_triple(m, &mut g);
            entropy_from_op_check(&x, &y, eps).map(|c| (k, c))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let lemma_fail: Vec<_> = checks.iter().filter(|(_, c)| !c.holds).collect();
    let worst_slack = checks.iter().map(|(_, c)| c.entropy - c.bound).fold(f64::NEG_INFINITY, f64::max);
    let net_violation = rep.max_entropy > net.construction_error + 1e-9;

    let mut t = Table::new(&[
        "check", "m", "h", "n", "h_used", "eps", "grid", "size", "trials", "worst", "declared_error",
        "construction_error", "c_net", "c_limit", "failures", "pass",
    ]);
    t.push(row![
        "net", m, h, n, net.h, net.eps, net.grid, net.size, trials, rep.max_entropy, net.declared_error,
        net.construction_error, rep.c_net, c_limit, usize::from(net_violation), rep.pass && !net_violation
    ]);
    t.push(row![
        "op-lemma", m, None::<usize>, None::<usize>, None::<usize>, None::<f64>, None::<usize>, None::<u64>,
        lemma_trials, worst_slack, None::<f64>, None::<f64>, None::<f64>, None::<f64>, lemma_fail.len(),
        lemma_fail.is_empty()
    ]);
    emit(&t.to_csv_string()?, out)?;
    eprintln!(
        "netcheck m={m} h={h} n={n}: h used {}, size {}, max entropy {:.4}, c_net {:.4}",
        net.h, net.size, rep.max_entropy, rep.c_net
    );
    for (k, c) in &lemma_fail {
        eprintln!("violation: triple {k}: entropy {} > bound {}", c.entropy, c.bound);
    }
    if net_violation {
        eprintln!("violation: sampled entropy {} exceeds construction error {}", rep.max_entropy, net.construction_error);
    }
    Ok(if !lemma_fail.is_empty() || net_violation {
        Status::Violation
    } else if !rep.pass {
        Status::OverBound
    } else {
        Status::Pass
    })
}

fn measure_table() -> Table {
    Table::new(&[
        "n", "m", "p", "q", "r", "h", "t", "samples", "hits", "estimate", "log2_per_coord", "ci_halfwidth", "seed",
        "censored",
    ])
}

fn push_measure(t: &mut Table, r: &MeasureRow) {
    t.push(row![
        r.n, r.m, r.p, r.q, r.r, r.h, r.t, r.samples, r.hits, r.estimate, r.log2_per_coord, r.ci_halfwidth, r.seed,
        r.censored
    ]);
}

fn cmd_measure(a: &MeasureArgs, seed: u64, out: Option<&Path>) -> Result<Status, CliError> {
    let samples = a.samples.unwrap_or(100_000);
    let rule: ThresholdRule = match a.t {
        Some(t) => ThresholdRule::Constant(t),
        None => a.rule.as_deref().unwrap_or("spencer").parse()?,
    };
    let mut t = measure_table();
    match &a.n_list {
        Some(ns) => {
            let base = a.inst.clone();
            if base.family.is_none() {
                return Err(CliError::Config("--n-list needs a generator family".into()));
            }
            let gen = move |n: usize| -> matdisc::Result<Instance> {
                let spec = InstanceArgs { n: Some(n), ..base.clone() };
                load_instance(&spec, rng::derive(seed, n as u64)).map_err(|e| match e {
                    CliError::Core(e) => e,
                    other => Error::InvalidParameter(other.to_string()),
                })
            };
            let sweep = measure_exponent_sweep(&gen, rule, ns, a.inst.q, samples, seed, a.alpha.unwrap_or(2.0))?;
            for r in &sweep.rows {
                push_measure(&mut t, r);
            }
            eprintln!(
                "measure sweep: alpha {} bounded {} collapsed {} fitted alpha {:.4}",
                sweep.alpha, sweep.bounded, sweep.collapsed, sweep.alpha_fit
            );
        }
        None => {
            let inst = load_instance(&a.inst, seed)?;
            let e = mc_gaussian_measure(&inst, rule.threshold(&inst), inst.q, samples, seed)?;
            push_measure(&mut t, &MeasureRow::new(&inst, inst.q, &e));
            eprintln!("measure: estimate {:.6} ± {:.6}", e.estimate, e.ci_halfwidth);
        }
    }
    emit(&t.to_csv_string()?, out)?;
    Ok(Status::Pass)
}

struct GridPoint {
    n: usize,
    m: usize,
    r: Option<usize>,
    p: Exponent,
    q: Option<Exponent>,
    seed: u64,
}

fn cmd_sweep(a: &SweepArgs, res: &Resolved, out: Option<&Path>) -> Result<Status, CliError> {
    let fam = family(a.family.as_deref().unwrap_or("diagonal-spencer"))?;
    let strategy = coloring_strategy(a.strategy.as_deref().unwrap_or("gaussian-projection"))?;
    let rule = parse_rule(a.rule.as_deref())?;
    let c_max = a.c_max.unwrap_or(6.0);
    let seeds = a.seeds.unwrap_or(5);
    let ns = a.n.clone().unwrap_or_else(|| vec![16]);
    let rs: Vec<Option<usize>> = a.r.as_ref().map(|v| v.iter().copied().map(Some).collect()).unwrap_or(vec![None]);
    let ps = a.p.clone().unwrap_or_else(|| vec![Exponent::INF]);
    let qs: Vec<Option<Exponent>> = a.q.as_ref().map(|v| v.iter().copied().map(Some).collect()).unwrap_or(vec![None]);
    let mut grid = Vec::new();
    for &n in &ns {
        for m in a.m.clone().unwrap_or_else(|| vec![n]) {
            for &r in &rs {
                for &p in &ps {
                    for &q in &qs {
                        for _ in 0..seeds {
                            let seed = rng::derive(res.seed, grid.len() as u64);
                            grid.push(GridPoint { n, m, r, p, q, seed });
                        }
                    }
                }
            }
        }
    }
    let rows = grid
        .par_iter()
        .map(|g| -> Result<_, Error> {
            let inst = fam.generate(&FamilySpec {
                n: Some(g.n),
                m: Some(g.m),
                p: g.p,
                q: g.q,
                r: g.r,
                h: None,
                seed: g.seed,
                symmetrize: true,
            })?;
            let params = SolveParams {
                q: inst.q,
                rule,
                partial: PartialColoringParams { seed: g.seed, ..res.partial.clone() },
                random_trials: 64,
            };
            let target = rule.target(&inst, inst.n)?;
            Ok((inst.clone(), g.seed, target, strategy.solve(&inst, &params)))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut t = Table::new(&[
        "n", "m", "p", "q", "r", "h", "seed", "strategy", "rule", "value", "target", "ratio", "max_c", "retries",
        "success", "message",
    ]);
    let mut status = Status::Pass;
    for (inst, seed, target, res) in rows {
        match res {
            Ok(o) => {
                let ratio = o.value / target;
                let (max_c, retries) = match &o.full {
                    Some(f) => (Some(f.max_c), Some(f.rounds.iter().map(|x| x.retries).sum::<usize>())),
                    None => (None, None),
                };
                if ratio > c_max {
                    status = status.worst(Status::OverBound);
                }
                t.push(row![
                    inst.n, inst.m, inst.p, inst.q, inst.r, inst.h, seed, o.strategy, rule.to_string(), o.value,
                    target, ratio, max_c, retries, true, ""
                ]);
            }
            Err(e) => {
                status = Status::Violation;
                t.push(row![
                    inst.n, inst.m, inst.p, inst.q, inst.r, inst.h, seed, strategy.name(), rule.to_string(),
                    None::<f64>, target, None::<f64>, None::<f64>, None::<usize>, false, e.to_string()
                ]);
            }
        }
    }
    emit(&t.to_csv_string()?, out)?;
    Ok(status)
}
