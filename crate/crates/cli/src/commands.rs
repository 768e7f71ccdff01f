use std::fmt::{self, Display};
use std::fs;
use std::path::Path;

use serde_json::json;

use permwalk::exhaustive::verify_subsets;
use permwalk::measure::parse_ratio;
use permwalk::measure::verify::{enumerate_joint, verify_majorization_chain, ChainConfig, ChainReport, DEFAULT_ENUMERATION_BUDGET};
use permwalk::rng::{run_replicates, stream};
use permwalk::schedule::{random_bijection_schedule, random_edge_shift_schedule};
use permwalk::walks::{
    automorphism_coupling, epoch_coupling, run_exceptional, simulate, slowdown_composition, BinomialCoupling,
    CouplingReport, EpochPlan, ExactWeight, SimConfig, Weight,
};
use permwalk::{Laziness, Schedule, TreeParams};

use crate::output::{emit, json, Meta};
use crate::{
    Arithmetic, CoupleArgs, CoupleMode, EntropyArgs, ExactWalk, ExceptionalArgs, IsoArgs, MajorizationArgs, SimulateArgs,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Outcome {
    Pass = 0,
    Violation = 1,
}

impl Outcome {
    fn from_pass(passed: bool) -> Outcome {
        if passed {
            Outcome::Pass
        } else {
            Outcome::Violation
        }
    }
}

/// Configuration, input or I/O problem; exit code 2.
#[derive(Debug)]
pub struct Failure(String);

impl Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<permwalk::Error> for Failure {
    fn from(e: permwalk::Error) -> Failure {
        match e {
            permwalk::Error::ArithmeticOverflow => Failure(format!("{e}; rerun with --arithmetic float")),
            e => Failure(e.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Failure {
        Failure(s)
    }
}

type Run = Result<Outcome, Failure>;

pub fn run(command: crate::Command, meta: &Meta) -> Run {
    use crate::Command::*;
    match command {
        VerifyIso(a) => verify_iso(a, meta),
        VerifyMajorization(a) => verify_majorization(a, meta),
        Simulate(a) => cmd_simulate(a, meta),
        Couple(a) => couple(a, meta),
        ExceptionalTimes(a) => exceptional(a, meta),
        Entropy(a) => entropy(a, meta),
    }
}

fn need_seed(seed: Option<u64>, why: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| Failure(format!("--seed is required {why}")))
}

fn load_schedule(path: &Path) -> Result<Schedule, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("reading {}: {e}", path.display())))?;
    let schedule = Schedule::from_json(&text)?;
    if let Some((t, report)) = schedule.validate(schedule.depth.max(3)).into_iter().next() {
        return Err(Failure(format!("{}: permutation #{t} is invalid: {}", path.display(), report.issues.join("; "))));
    }
    Ok(schedule)
}

/// Degree from `--d`, the schedule, or 3.
fn resolve_d(d: Option<u32>, schedule: Option<&Schedule>) -> Result<u32, Failure> {
    match (d, schedule) {
        (Some(d), Some(s)) if s.d != d => Err(Failure(format!("--d {d} but the schedule is for d = {}", s.d))),
        (Some(d), _) => Ok(d),
        (None, Some(s)) => Ok(s.d),
        (None, None) => Ok(3),
    }
}

fn verify_iso(a: IsoArgs, meta: &Meta) -> Run {
    let report = match verify_subsets(a.d, a.depth, a.workers) {
        Err(permwalk::Error::BudgetExceeded { .. }) => {
            let ball = TreeParams::new(a.d, a.depth)?.vertex_count();
            return Err(Failure(format!(
                "refusing: the ball of radius {} in T_{} has {ball} vertices, so 2^{ball} subsets; the limit is 2^{}",
                a.depth,
                a.d,
                permwalk::exhaustive::MAX_BALL_VERTICES
            )));
        }
        r => r?,
    };
    eprintln!(
        "verify-iso d={} depth={}: {} subsets, {} violations",
        a.d,
        a.depth,
        report.subsets,
        report.total_violations()
    );
    emit(a.output.as_deref(), &json(&report)?, meta)?;
    Ok(Outcome::from_pass(report.passed()))
}

fn chain(tree: TreeParams, schedule: &Schedule, config: ChainConfig, arithmetic: Arithmetic) -> permwalk::Result<ChainReport> {
    match arithmetic {
        Arithmetic::Exact => verify_majorization_chain::<u128>(tree, schedule, config),
        Arithmetic::Float => verify_majorization_chain::<f64>(tree, schedule, config),
    }
}

fn chain_config(walk: &ExactWalk, d: u32) -> ChainConfig {
    ChainConfig { kind: walk.kind.into(), gamma: walk.gamma.unwrap_or(Laziness::uniform(d)), horizon: walk.horizon }
}

fn check_chain(schedule: &Schedule, walk: &ExactWalk, d: u32) -> permwalk::Result<ChainReport> {
    let tree = TreeParams::new(d, schedule.required_depth_cap(walk.horizon)?)?;
    chain(tree, schedule, chain_config(walk, d), walk.arithmetic)
}

fn verify_majorization(a: MajorizationArgs, meta: &Meta) -> Run {
    let file = a.walk.schedule.as_deref().map(load_schedule).transpose()?;
    let d = resolve_d(a.walk.d, file.as_ref())?;
    let schedules: Vec<(String, Schedule)> = if let Some(s) = file {
        vec![(a.walk.schedule.as_ref().expect("loaded from a path").display().to_string(), s)]
    } else if a.random_schedules > 0 {
        let seed = need_seed(a.seed, "with --random-schedules")?;
        (0..a.random_schedules)
            .map(|i| {
                let s = random_bijection_schedule(d, a.radius, a.walk.horizon, &mut stream(seed, i))?;
                Ok((format!("random #{i}"), s))
            })
            .collect::<permwalk::Result<_>>()?
    } else {
        vec![("identity".to_string(), Schedule::identity(d))]
    };
    let reports = run_replicates(schedules.len() as u64, a.workers, |i| check_chain(&schedules[i as usize].1, &a.walk, d))?
        .into_iter()
        .collect::<permwalk::Result<Vec<_>>>()?;
    let passed = reports.iter().filter(|r| r.passed()).count();
    let entries: Vec<_> = schedules.iter().zip(&reports).map(|((label, _), r)| json!({ "schedule": label, "report": r })).collect();
    let config = chain_config(&a.walk, d);
    let mut out = json!({
        "d": d,
        "kind": config.kind,
        "gamma": config.gamma,
        "horizon": a.walk.horizon,
        "arithmetic": format!("{:?}", a.walk.arithmetic).to_lowercase(),
        "schedules": schedules.len(),
        "passed": passed,
        "runs": entries,
    });
    if a.joint {
        let stat = |depths: &[u32]| depths[2] + depths[3] <= 2;
        let law = |s: &Schedule| enumerate_joint(s, config.kind, 3, DEFAULT_ENUMERATION_BUDGET, stat).map(|t| t.probability(|&b| b));
        let plain = law(&Schedule::identity(d))?;
        let permuted = law(&schedules[0].1)?;
        out["joint"] = json!({
            "statistic": "|X_2| + |X_3| <= 2",
            "schedule": schedules[0].0,
            "plain": plain.to_string(),
            "permuted": permuted.to_string(),
            "plain_f64": *plain.numer() as f64 / *plain.denom() as f64,
            "permuted_f64": *permuted.numer() as f64 / *permuted.denom() as f64,
            "permuted_exceeds_plain": permuted > plain,
        });
        eprintln!("joint Pr(|X_2| + |X_3| <= 2): plain {plain}, permuted {permuted}");
    }
    eprintln!("verify-majorization: {passed}/{} schedules pass", schedules.len());
    emit(a.output.as_deref(), &json(&out)?, meta)?;
    Ok(Outcome::from_pass(passed == schedules.len()))
}

fn cmd_simulate(a: SimulateArgs, meta: &Meta) -> Run {
    let schedule = a.schedule.as_deref().map(load_schedule).transpose()?;
    let d = resolve_d(a.d, schedule.as_ref())?;
    let config = SimConfig {
        d,
        kind: a.kind.into(),
        gamma: a.gamma.unwrap_or(Laziness::uniform(d)),
        horizon: a.horizon,
        record_positions: None,
    };
    let traces = run_replicates(a.replicates, a.workers, |r| simulate(&config, schedule.as_ref(), a.seed, r))?
        .into_iter()
        .collect::<permwalk::Result<Vec<_>>>()?;
    let mut csv = String::from("replicate,t,depth,speed\n");
    for trace in &traces {
        for (t, depth) in trace.depths.iter().enumerate() {
            let t = t as u64;
            if t.is_multiple_of(a.stride) || t == a.horizon {
                let speed = if t == 0 { 0.0 } else { *depth as f64 / t as f64 };
                csv.push_str(&format!("{},{t},{depth},{speed}\n", trace.replicate));
            }
        }
    }
    let mean = traces.iter().map(|t| t.speed()).sum::<f64>() / traces.len().max(1) as f64;
    eprintln!("simulate: {} replicates, mean final speed {mean:.4}", traces.len());
    emit(a.output.as_deref(), csv.as_bytes(), meta)?;
    Ok(Outcome::Pass)
}

fn thin(report: &mut CouplingReport, stride: u64) {
    let horizon = report.summary.horizon;
    report.rows.retain(|r| r.t.is_multiple_of(stride) || r.t == horizon);
}

/// Schedule from a file, random edge shifts drawn from the last stream of
/// the master seed, or the identity.
fn coupling_schedule(a: &CoupleArgs, seed: u64) -> Result<Schedule, Failure> {
    if let Some(path) = &a.schedule {
        let s = load_schedule(path)?;
        resolve_d(a.d, Some(&s))?;
        return Ok(s);
    }
    let d = resolve_d(a.d, None)?;
    match a.shift_rate {
        Some(rate) if (0.0..=1.0).contains(&rate) => {
            Ok(random_edge_shift_schedule(d, a.horizon as usize, rate, &mut stream(seed, u64::MAX)))
        }
        Some(rate) => Err(Failure(format!("--shift-rate {rate} outside [0, 1]"))),
        None => Ok(Schedule::identity(d)),
    }
}

fn couple(a: CoupleArgs, meta: &Meta) -> Run {
    if a.mode == CoupleMode::Binomial {
        return binomial(&a, meta);
    }
    let seed = need_seed(a.seed, "for this coupling")?;
    let keep = |r: u64| r == 0;
    let results: Vec<permwalk::Result<CouplingReport>> = match a.mode {
        CoupleMode::Automorphism => {
            let schedule = coupling_schedule(&a, seed)?;
            let config = SimConfig {
                d: schedule.d,
                kind: a.kind.into(),
                gamma: a.gamma.unwrap_or(Laziness::uniform(schedule.d)),
                horizon: a.horizon,
                record_positions: None,
            };
            run_replicates(a.replicates, a.workers, |r| {
                automorphism_coupling(&config, &schedule, seed, r, keep(r)).map(|(_, _, report)| report)
            })?
        }
        CoupleMode::Epochs => {
            let plan = EpochPlan::new(parse_ratio(&a.p)?, a.horizon)?;
            run_replicates(a.replicates, a.workers, |r| {
                epoch_coupling(&plan, a.horizon, a.c, seed, r, keep(r)).map(|run| run.report)
            })?
        }
        CoupleMode::Slowdown => {
            let schedule = coupling_schedule(&a, seed)?;
            run_replicates(a.replicates, a.workers, |r| slowdown_composition(&schedule, a.horizon, a.c, seed, r, keep(r)))?
        }
        CoupleMode::Binomial => unreachable!("handled above"),
    };
    let mut reports = results.into_iter().collect::<permwalk::Result<Vec<_>>>()?;
    for report in &mut reports {
        thin(report, a.stride);
    }
    let settle_by = a.settle_by.unwrap_or(a.horizon / 4);
    let settled = reports.iter().filter(|r| r.summary.settles_by(settle_by)).count();
    if let (Some(path), Some(first)) = (&a.csv, reports.first()) {
        let mut buf = Vec::new();
        first.write_csv(&mut buf)?;
        emit(Some(path), &buf, meta)?;
    }
    let out = json!({
        "mode": format!("{:?}", a.mode).to_lowercase(),
        "horizon": a.horizon,
        "c": a.c,
        "seed": seed,
        "replicates": a.replicates,
        "settle_by": settle_by,
        "settled": settled,
        "runs": reports,
    });
    eprintln!("couple: {settled}/{} replicates settle by t = {settle_by}", reports.len());
    emit(a.report.as_deref(), &json(&out)?, meta)?;
    Ok(Outcome::Pass)
}

fn binomial_outputs<W: Weight + Display>(c: &BinomialCoupling<W>, exact: bool) -> (serde_json::Value, String, bool) {
    let (first, second) = c.marginals();
    let error = first
        .iter()
        .zip(&second)
        .zip(c.pmf())
        .map(|((x, y), f)| (x.to_f64() - f.to_f64()).abs().max((y.to_f64() - f.to_f64()).abs()))
        .fold(0.0, f64::max);
    let matches = if exact { first == c.pmf() && second == c.pmf() } else { error < 1e-12 };
    let value = |w: W| json!({ "value": w.to_string(), "f64": w.to_f64() });
    let report = json!({
        "n": c.n,
        "p": c.p.to_string(),
        "m": c.m,
        "interval_i": c.interval_i,
        "interval_j": c.interval_j,
        "prob_in_j": value(c.prob_in_j()),
        "prob_backward": value(c.prob_backward()),
        "prob_advanced": value(c.prob_advanced()),
        "prob_transported": value(c.prob_transported()),
        "max_marginal_error": error,
        "marginals_match": matches,
    });
    let mut csv = String::from("b,b_prime,mass\n");
    for ((b, b2), w) in c.joint() {
        csv.push_str(&format!("{b},{b2},{w}\n"));
    }
    (report, csv, matches)
}

fn binomial(a: &CoupleArgs, meta: &Meta) -> Run {
    let p = parse_ratio(&a.p)?;
    let (report, csv, matches) = match a.arithmetic {
        Arithmetic::Exact => binomial_outputs(&BinomialCoupling::<ExactWeight>::new(a.n, p, a.m)?, true),
        Arithmetic::Float => binomial_outputs(&BinomialCoupling::<f64>::new(a.n, p, a.m)?, false),
    };
    if let Some(path) = &a.csv {
        emit(Some(path), csv.as_bytes(), meta)?;
    }
    eprintln!("couple binomial n={} p={p}: marginals {}", a.n, if matches { "match" } else { "DO NOT match" });
    emit(a.report.as_deref(), &json(&report)?, meta)?;
    Ok(Outcome::from_pass(matches))
}

fn exceptional(a: ExceptionalArgs, meta: &Meta) -> Run {
    let reports = run_replicates(a.replicates, a.workers, |r| run_exceptional(a.horizon, a.growth, a.seed, r, r == 0))?
        .into_iter()
        .collect::<permwalk::Result<Vec<_>>>()?;
    let mut csv = String::from("t,depth_X,depth_Y,gap,phi_t,running_max\n");
    if let Some(first) = reports.first() {
        let mut running = f64::NEG_INFINITY;
        for row in &first.rows {
            running = running.max(row.gap as f64 / row.scale);
            if row.t.is_multiple_of(a.stride) || row.t == a.horizon {
                csv.push_str(&format!("{},{},{},{},{},{running}\n", row.t, row.depth_x, row.depth_y, row.gap, row.scale));
            }
        }
    }
    let above = reports.iter().filter(|r| r.summary.max_over_phi.is_some_and(|m| m > 0.5)).count();
    eprintln!("exceptional-times: running max of gap/phi exceeds 0.5 in {above}/{} replicates", reports.len());
    emit(a.output.as_deref(), csv.as_bytes(), meta)?;
    if let Some(path) = &a.report {
        let summaries: Vec<_> = reports.iter().map(|r| json!({ "replicate": r.replicate, "summary": r.summary })).collect();
        let out = json!({
            "horizon": a.horizon,
            "growth": a.growth.to_string(),
            "seed": a.seed,
            "replicates": a.replicates,
            "max_over_phi_above_half": above,
            "runs": summaries,
        });
        emit(Some(path), &json(&out)?, meta)?;
    }
    Ok(Outcome::Pass)
}

fn entropy(a: EntropyArgs, meta: &Meta) -> Run {
    let file = a.walk.schedule.as_deref().map(load_schedule).transpose()?;
    let d = resolve_d(a.walk.d, file.as_ref())?;
    let schedule = match (file, a.random_radius) {
        (Some(s), _) => s,
        (None, Some(radius)) => {
            let seed = need_seed(a.seed, "with --random-radius")?;
            random_bijection_schedule(d, radius, a.walk.horizon, &mut stream(seed, 0))?
        }
        (None, None) => Schedule::identity(d),
    };
    let report = check_chain(&schedule, &a.walk, d)?;
    let mut csv = String::from("t,entropy_p,entropy_q,majorizes,entropy_ordered\n");
    for s in &report.steps {
        csv.push_str(&format!("{},{},{},{},{}\n", s.t, s.entropy_p, s.entropy_q, s.majorizes, s.entropy_ordered));
    }
    emit(a.output.as_deref(), csv.as_bytes(), meta)?;
    Ok(Outcome::from_pass(report.steps.iter().all(|s| s.majorizes && s.entropy_ordered)))
}
