use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use tvc::analytics::{
    average_node_degree, hitting_time, hitting_time_with, meeting_time, meeting_time_with, network_degree, HittingReport, InPeriodWait,
    MeetingReport, OccupancyView,
};
use tvc::experiments::{contact_rates, epidemic_simulate, greedy_forwarding_success, nodes_needed, si_solve, EpidemicCurve, Population, SiParams};
use tvc::geometry::Point;
use tvc::model::{parse_document, Document, NodeProfile};
use tvc::rng::iteration_seed;
use tvc::simulator::{emit, generate_trace, write_metadata, Format, RunSpec, Snapshots, Trace};
use tvc::stats::{
    contact_report, contacts, empirical_hitting_time, empirical_meeting_time, empirical_node_degree, ingest_contacts_csv, ingest_csv,
    reappearance_curve, timeout_cap, visiting_preference, DegreeAccumulator, McEstimate, ReappearanceEstimator,
};

use crate::args::{Common, EpidemicArgs, GenerateArgs, RouteArgs, StatsArgs, TheoryArgs, TraceFormat, ValidateArgs, Wait};
use crate::error::CliError;
use crate::output::{sha256_hex, ConfigRef, Outputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ValidationFailed,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    CliError::Usage(msg.into()).into()
}

struct Loaded {
    doc: Document,
    profiles: Vec<NodeProfile>,
    config: ConfigRef,
}

impl Loaded {
    fn digest(&self) -> String {
        tvc::simulator::profile_digest(&self.profiles)
    }

    /// Index of the first node of every template.
    fn representatives(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut next = 0;
        for t in &self.doc.nodes {
            out.push(next);
            next += t.instances();
        }
        out
    }

    fn cycle(&self) -> f64 {
        self.profiles.iter().map(NodeProfile::cycle_duration).fold(0.0, f64::max)
    }
}

fn read_document(path: &Path) -> Result<(Document, ConfigRef)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading configuration {}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).with_context(|| format!("configuration {} is not UTF-8", path.display()))?;
    let shown = path.display().to_string();
    let doc = parse_document(&text).map_err(|source| CliError::Config { path: shown.clone(), source })?;
    Ok((doc, ConfigRef { path: shown, sha256: sha256_hex(&bytes) }))
}

fn load(common: &Common, stochastic: bool) -> Result<Loaded> {
    let path = common.config.as_deref().ok_or_else(|| usage("--config is required"))?;
    let (doc, config) = read_document(path)?;
    if common.seed.is_none() && (stochastic || doc.is_randomized()) {
        return Err(usage(if stochastic {
            "--seed is required for this command"
        } else {
            "the configuration uses random placement, --seed is required"
        }));
    }
    let profiles = doc
        .instantiate(common.seed.unwrap_or(0))
        .map_err(|source| CliError::Config { path: config.path.clone(), source })?;
    Ok(Loaded { doc, profiles, config })
}

fn run_spec(seed: u64, duration: f64, dt: f64, profiles: Vec<NodeProfile>) -> Result<RunSpec> {
    RunSpec::new(seed, duration, dt, profiles).map_err(|e| usage(e.to_string()))
}

fn wait(w: Wait) -> InPeriodWait {
    match w {
        Wait::Geometric => InPeriodWait::Geometric,
        Wait::Truncated => InPeriodWait::Truncated,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn params<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialise")
}

fn finish(out: Outputs, verb: &str, seed: Option<u64>, loaded: Option<&Loaded>, args: &Value) -> Result<()> {
    let digest = loaded.map(Loaded::digest);
    out.finish(verb, seed, loaded.map(|l| &l.config), digest.as_deref(), args)
}

pub fn generate(a: &GenerateArgs) -> Result<Outcome> {
    let loaded = load(&a.common, true)?;
    let seed = a.common.seed.expect("checked by load");
    let run = run_spec(seed, a.duration, a.dt, loaded.profiles.clone())?;
    let trace = generate_trace(&run)?;
    let mut out = Outputs::create(&a.common.out)?;
    let formats = match a.format {
        Some(TraceFormat::Ns2) => vec![Format::Ns2],
        Some(TraceFormat::Csv) => vec![Format::Csv],
        None => vec![Format::Ns2, Format::Csv],
    };
    for f in formats {
        let mut bytes = Vec::new();
        emit(&trace, f, &mut bytes)?;
        out.write(if f == Format::Ns2 { "trace.ns2" } else { "trace.csv" }, &bytes)?;
    }
    let mut meta = Vec::new();
    write_metadata(&trace, &mut meta)?;
    out.write("trace.meta.json", &meta)?;
    println!("generated {} nodes x {} samples into {}", trace.node_count(), trace.len(), a.common.out.display());
    finish(out, "generate", Some(seed), Some(&loaded), &params(a))?;
    Ok(Outcome::Success)
}

/// Hourly gaps up to `max_h`; traces under two hours use a twentieth of their span.
fn reappearance_gaps(trace: &Trace, max_h: f64) -> Vec<f64> {
    let dt = trace.dt();
    let span = (trace.len().saturating_sub(1)) as f64 * dt;
    let limit = (max_h * 3600.0).min(span - dt);
    let step = if span >= 7200.0 { 3600.0 } else { ((span / 20.0 / dt).floor() * dt).max(dt) };
    (1..).map(|k| k as f64 * step).take_while(|g| *g <= limit).collect()
}

pub fn stats(a: &StatsArgs) -> Result<Outcome> {
    let mut out;
    let mut summary = serde_json::Map::new();
    let mut loaded = None;
    if let Some(path) = &a.contacts {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let report = contact_report(ingest_contacts_csv(BufReader::new(file))?);
        out = Outputs::create(&a.common.out)?;
        out.write("contact_durations.csv", report.durations.to_csv().as_bytes())?;
        out.write("inter_meetings.csv", report.inter_meetings.to_csv().as_bytes())?;
        summary.insert("contacts".into(), json!(report.events.len()));
        summary.insert("source".into(), json!(path.display().to_string()));
    } else {
        let trace = if let Some(path) = &a.trace {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            summary.insert("source".into(), json!(path.display().to_string()));
            ingest_csv(BufReader::new(file))?
        } else {
            let l = load(&a.common, true)?;
            let duration = a.duration.ok_or_else(|| usage("--duration is required when generating a trace"))?;
            let run = run_spec(a.common.seed.expect("checked by load"), duration, a.dt, l.profiles.clone())?;
            loaded = Some(l);
            generate_trace(&run)?
        };
        out = Outputs::create(&a.common.out)?;
        let pref = visiting_preference(&trace, a.grid)?;
        out.write("preference.csv", pref.to_csv().as_bytes())?;
        let gaps = reappearance_gaps(&trace, a.max_gap_h);
        if !gaps.is_empty() {
            let curve = reappearance_curve(&trace, a.grid, &gaps, ReappearanceEstimator::Conditional)?;
            out.write("reappearance.csv", curve.to_csv().as_bytes())?;
        }
        let report = contacts(&trace, a.range)?;
        out.write("contact_durations.csv", report.durations.to_csv().as_bytes())?;
        out.write("inter_meetings.csv", report.inter_meetings.to_csv().as_bytes())?;
        let degree = empirical_node_degree(&trace, a.range)?;
        let mut csv = String::from("node,degree\n");
        for (n, d) in trace.nodes.iter().zip(&degree) {
            csv.push_str(&format!("{},{d}\n", n.id));
        }
        out.write("degree.csv", csv.as_bytes())?;
        let mean = degree.iter().sum::<f64>() / degree.len().max(1) as f64;
        summary.insert("nodes".into(), json!(trace.node_count()));
        summary.insert("samples".into(), json!(trace.len()));
        summary.insert("dt".into(), json!(trace.dt()));
        summary.insert("mean_degree".into(), json!(mean));
        summary.insert("contacts".into(), json!(report.events.len()));
        let never_on: Vec<&str> = pref.nodes.iter().filter(|n| n.empty).map(|n| n.node.as_str()).collect();
        summary.insert("never_on".into(), json!(never_on));
    }
    out.write_json("stats.json", &summary)?;
    println!("statistics written to {}", a.common.out.display());
    finish(out, "stats", a.common.seed, loaded.as_ref(), &params(a))?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct NodeDegree {
    node: String,
    degree: f64,
}

#[derive(Serialize)]
struct HitSummary {
    node: String,
    #[serde(serialize_with = "finite_or_inf")]
    ht: f64,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<McSummary>,
}

#[derive(Serialize)]
struct MeetSummary {
    a: String,
    b: String,
    #[serde(serialize_with = "finite_or_inf")]
    mt: f64,
    q: f64,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<McSummary>,
}

#[derive(Serialize)]
struct McSummary {
    mean: f64,
    stderr: f64,
    iterations: usize,
    timeouts: usize,
    relative_error: f64,
}

impl McSummary {
    fn new(analytic: f64, mc: &McEstimate) -> Self {
        McSummary {
            mean: mc.mean,
            stderr: mc.stderr,
            iterations: mc.iterations,
            timeouts: mc.timeouts,
            relative_error: rel(analytic, mc.mean),
        }
    }
}

/// Unordered pairs of representatives, including each with a copy of itself.
fn rep_pairs(reps: &[usize]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i..] {
            pairs.push((*a, *b));
        }
    }
    pairs
}

fn hitting(view: &OccupancyView, k: f64, w: InPeriodWait) -> Result<HittingReport> {
    Ok(hitting_time_with(view, k, w)?)
}

fn meeting(a: &OccupancyView, b: &OccupancyView, k: f64, w: InPeriodWait) -> Result<Option<MeetingReport>> {
    match meeting_time_with(a, b, k, w) {
        Ok(r) => Ok(Some(r)),
        Err(tvc::Error::NoMeetingPossible) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn theory(a: &TheoryArgs) -> Result<Outcome> {
    let loaded = load(&a.common, false)?;
    if a.iters.is_some() && a.common.seed.is_none() {
        return Err(usage("--seed is required with --iters"));
    }
    let k = a.range;
    let w = wait(a.wait);
    let views: Vec<OccupancyView> = loaded.profiles.iter().map(OccupancyView::from_profile).collect();
    let reps = loaded.representatives();
    let mut out = Outputs::create(&a.common.out)?;
    let mut csv = String::from("quantity,subject,analytic,simulated,stderr,relative_error\n");

    let (network, degrees) = if views.len() >= 2 {
        let mut degrees = Vec::with_capacity(views.len());
        for i in 0..views.len() {
            let r = average_node_degree(i, &views, k)?;
            degrees.push(NodeDegree { node: r.node, degree: r.degree });
        }
        let network = network_degree(&views, k)?;
        csv.push_str(&format!("degree,network,{network},,,\n"));
        (Some(network), degrees)
    } else {
        (None, Vec::new())
    };

    let mut hits = Vec::new();
    for (n, &i) in reps.iter().enumerate() {
        let report = hitting(&views[i], k, w)?;
        let mc = match a.iters {
            Some(iters) => {
                let cap = timeout_cap(report.ht);
                let est = empirical_hitting_time(&loaded.profiles[i], k, iters, iteration_seed(a.common.seed.unwrap(), n as u64), cap)?;
                Some(McSummary::new(report.ht, &est))
            }
            None => None,
        };
        push_row(&mut csv, "hitting_time", &report.node, report.ht, mc.as_ref());
        out.write(&format!("hitting-{}.csv", report.node), report.to_csv().as_bytes())?;
        hits.push(HitSummary { node: report.node, ht: report.ht, warnings: report.warnings, monte_carlo: mc });
    }

    let mut meets = Vec::new();
    for (n, (i, j)) in rep_pairs(&reps).into_iter().enumerate() {
        let Some(report) = meeting(&views[i], &views[j], k, w)? else {
            meets.push(MeetSummary {
                a: views[i].id.clone(),
                b: views[j].id.clone(),
                mt: f64::INFINITY,
                q: 0.0,
                warnings: vec!["communities never overlap, the nodes cannot meet".into()],
                monte_carlo: None,
            });
            continue;
        };
        let mc = match a.iters {
            Some(iters) => {
                let cap = timeout_cap(report.mt);
                let seed = iteration_seed(a.common.seed.unwrap(), (1 << 32) + n as u64);
                let est = empirical_meeting_time(&loaded.profiles[i], &loaded.profiles[j], k, iters, seed, cap)?;
                Some(McSummary::new(report.mt, &est))
            }
            None => None,
        };
        let subject = format!("{}~{}", report.a, report.b);
        push_row(&mut csv, "meeting_time", &subject, report.mt, mc.as_ref());
        out.write(&format!("meeting-{}-{}.csv", report.a, report.b), report.to_csv().as_bytes())?;
        meets.push(MeetSummary { a: report.a, b: report.b, mt: report.mt, q: report.q, warnings: report.warnings, monte_carlo: mc });
    }

    let report = json!({
        "range": k,
        "wait": a.wait,
        "network_degree": network,
        "degrees": degrees,
        "hitting": hits,
        "meeting": meets,
    });
    out.write_json("theory.json", &report)?;
    out.write("theory.csv", csv.as_bytes())?;
    print!("{csv}");
    finish(out, "theory", a.common.seed, Some(&loaded), &params(a))?;
    Ok(Outcome::Success)
}

fn push_row(csv: &mut String, quantity: &str, subject: &str, analytic: f64, mc: Option<&McSummary>) {
    match mc {
        Some(m) => csv.push_str(&format!("{quantity},{subject},{analytic},{},{},{}\n", m.mean, m.stderr, m.relative_error)),
        None => csv.push_str(&format!("{quantity},{subject},{analytic},,,\n")),
    }
}

/// JSON has no infinity; write it as the string "inf".
fn finite_or_inf<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

#[derive(Debug, Serialize)]
struct Check {
    quantity: &'static str,
    subject: String,
    #[serde(serialize_with = "finite_or_inf")]
    analytic: f64,
    simulated: f64,
    stderr: f64,
    relative_error: f64,
    /// Threshold before widening by twice the relative standard error.
    nominal_threshold: f64,
    threshold: f64,
    applicable: bool,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl Check {
    fn new(quantity: &'static str, subject: String, analytic: f64, simulated: f64, stderr: f64, nominal: f64) -> Self {
        let relative_error = rel(analytic, simulated);
        let threshold = nominal + 2.0 * (stderr / simulated.abs()).min(1.0);
        Check {
            quantity,
            subject,
            analytic,
            simulated,
            stderr,
            relative_error,
            nominal_threshold: nominal,
            threshold,
            applicable: true,
            pass: relative_error <= threshold,
            note: None,
        }
    }
}

/// Smallest non-roaming community edge over all nodes and periods, or the
/// field edge when every community is the roaming one.
fn smallest_community(profiles: &[NodeProfile]) -> f64 {
    profiles
        .iter()
        .flat_map(|p| p.schedule.iter().flat_map(|t| t.communities.iter()))
        .filter(|c| !c.community.is_roaming)
        .map(|c| c.community.edge_length)
        .fold(f64::INFINITY, f64::min)
        .min(profiles[0].field.edge_length)
}

/// Degree over the sample grid, with the standard error from ten batches.
fn simulated_degree(run: &RunSpec, k: f64) -> (f64, f64) {
    const BATCHES: usize = 10;
    let samples = run.sample_count();
    let mut accs: Vec<DegreeAccumulator> = (0..BATCHES).map(|_| DegreeAccumulator::new(run.profiles.len(), k)).collect();
    for (s, snap) in Snapshots::grid(run).enumerate() {
        accs[s * BATCHES / samples].add(&snap);
    }
    let means: Vec<f64> = accs.iter().map(DegreeAccumulator::mean).collect();
    let mean = means.iter().sum::<f64>() / BATCHES as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    (mean, (var / BATCHES as f64).sqrt())
}

pub fn validate(a: &ValidateArgs) -> Result<Outcome> {
    let loaded = load(&a.common, true)?;
    let seed = a.common.seed.expect("checked by load");
    let k = a.range;
    let w = wait(a.wait);
    let views: Vec<OccupancyView> = loaded.profiles.iter().map(OccupancyView::from_profile).collect();
    let reps = loaded.representatives();
    let mut checks = Vec::new();

    if views.len() >= 2 {
        let analytic = network_degree(&views, k)?;
        let duration = a.duration.unwrap_or(20.0 * loaded.cycle());
        let run = run_spec(seed, duration, a.dt, loaded.profiles.clone())?;
        let (mean, se) = simulated_degree(&run, k);
        let mut c = Check::new("degree", "network".into(), analytic, mean, se, a.threshold_deg);
        let edge = smallest_community(&loaded.profiles);
        if std::f64::consts::PI * k * k > 0.2 * edge * edge {
            c.applicable = false;
            c.note = Some(format!("range disk exceeds 20% of the smallest community ({edge} m edge); not judged"));
        }
        checks.push(c);
    }
    for (n, &i) in reps.iter().enumerate() {
        let geometric = hitting_time(&views[i], k)?.ht;
        let analytic = if w == InPeriodWait::Geometric { geometric } else { hitting(&views[i], k, w)?.ht };
        let est = empirical_hitting_time(&loaded.profiles[i], k, a.iters, iteration_seed(seed, n as u64), timeout_cap(geometric))?;
        let mut c = Check::new("hitting_time", views[i].id.clone(), analytic, est.mean, est.stderr, a.threshold_ht);
        if est.timeouts > 0 {
            c.note = Some(format!("{} iterations timed out and were excluded", est.timeouts));
        }
        checks.push(c);
    }
    for (n, (i, j)) in rep_pairs(&reps).into_iter().enumerate() {
        let geometric = match meeting_time(&views[i], &views[j], k) {
            Ok(r) => r.mt,
            Err(tvc::Error::NoMeetingPossible) => continue,
            Err(e) => return Err(e.into()),
        };
        let analytic = if w == InPeriodWait::Geometric { geometric } else { meeting_time_with(&views[i], &views[j], k, w)?.mt };
        let s = iteration_seed(seed, (1 << 32) + n as u64);
        let est = empirical_meeting_time(&loaded.profiles[i], &loaded.profiles[j], k, a.iters, s, timeout_cap(geometric))?;
        let mut c = Check::new("meeting_time", format!("{}~{}", views[i].id, views[j].id), analytic, est.mean, est.stderr, a.threshold_mt);
        if est.timeouts > 0 {
            c.note = Some(format!("{} iterations timed out and were excluded", est.timeouts));
        }
        checks.push(c);
    }

    let pass = checks.iter().all(|c| c.pass || !c.applicable);
    let mut csv = String::from("quantity,subject,analytic,simulated,stderr,relative_error,threshold,applicable,pass\n");
    for c in &checks {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.quantity, c.subject, c.analytic, c.simulated, c.stderr, c.relative_error, c.threshold, c.applicable, c.pass
        ));
    }
    let mut out = Outputs::create(&a.common.out)?;
    let report = json!({
        "range": k,
        "iterations": a.iters,
        "wait": a.wait,
        "threshold_rule": "nominal threshold plus twice the simulated relative standard error",
        "checks": checks,
        "pass": pass,
    });
    out.write_json("validation.json", &report)?;
    out.write("validation.csv", csv.as_bytes())?;
    print!("{csv}");
    println!("validation {}", if pass { "passed" } else { "FAILED" });
    finish(out, "validate", Some(seed), Some(&loaded), &params(a))?;
    Ok(if pass { Outcome::Success } else { Outcome::ValidationFailed })
}

/// SI solution at the simulation's sample times, halving the step until the
/// solver accepts it.
fn si_curve(params: &SiParams, horizon: f64, dt: f64) -> Result<EpidemicCurve> {
    let mut step = dt;
    for _ in 0..12 {
        match si_solve(params, horizon, step) {
            Err(tvc::Error::StepTooCoarse { .. }) => step *= 0.5,
            other => return Ok(other?),
        }
    }
    Ok(si_solve(params, horizon, step)?)
}

pub fn epidemic(a: &EpidemicArgs) -> Result<Outcome> {
    let loaded = load(&a.common, true)?;
    let seed = a.common.seed.expect("checked by load");
    let duration = a.duration.unwrap_or(loaded.cycle());
    let run = run_spec(seed, duration, a.dt, loaded.profiles.clone())?;
    let sim = epidemic_simulate(&run, a.range, a.source, a.iters).map_err(|e| usage(e.to_string()))?;
    let mut out = Outputs::create(&a.common.out)?;
    out.write("simulation.csv", sim.to_csv().as_bytes())?;
    let mut summary = json!({
        "nodes": loaded.profiles.len(),
        "trials": a.iters,
        "range": a.range,
        "final_infected": sim.infected.last(),
    });

    if !loaded.doc.is_randomized() {
        let reps = loaded.representatives();
        let views: Vec<OccupancyView> = reps.iter().map(|i| OccupancyView::from_profile(&loaded.profiles[*i])).collect();
        let refs: Vec<&OccupancyView> = views.iter().collect();
        let beta = contact_rates(&refs, a.range)?;
        let sizes: Vec<f64> = loaded.doc.nodes.iter().map(|t| t.instances() as f64).collect();
        let group_of = |node: usize| reps.iter().rposition(|r| *r <= node).expect("first representative is node 0");
        // a random source lands in each group in proportion to its size
        let starts: Vec<(usize, f64)> = match a.source {
            Some(s) => vec![(group_of(s), 1.0)],
            None => sizes.iter().enumerate().map(|(g, m)| (g, m / sizes.iter().sum::<f64>())).collect(),
        };
        let mut theory = vec![0.0; sim.times.len()];
        for (g, share) in starts {
            let mut initial = vec![0.0; sizes.len()];
            initial[g] = 1.0;
            let curve = si_curve(&SiParams { sizes: sizes.clone(), beta: beta.clone(), initial }, duration, a.dt)?;
            for (x, t) in theory.iter_mut().zip(&sim.times) {
                *x += share * curve.at(*t);
            }
        }
        let theory = EpidemicCurve { times: sim.times.clone(), infected: theory, groups: Vec::new() };
        out.write("theory.csv", theory.to_csv().as_bytes())?;
        let worst = sim.infected.iter().zip(&theory.infected).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max);
        summary["beta"] = json!(beta);
        summary["max_abs_difference"] = json!(worst);
    } else {
        summary["note"] = json!("random placement: no per-template SI model");
    }
    out.write_json("epidemic.json", &summary)?;
    println!("epidemic curves written to {}", a.common.out.display());
    finish(out, "epidemic", Some(seed), Some(&loaded), &params(a))?;
    Ok(Outcome::Success)
}

pub fn route(a: &RouteArgs) -> Result<Outcome> {
    let loaded = load(&a.common, true)?;
    let seed = a.common.seed.expect("checked by load");
    if a.range.is_empty() || a.range.iter().any(|k| !(*k > 0.0)) {
        return Err(usage("--range needs positive values"));
    }
    let duration = a.duration.unwrap_or(5.0 * loaded.cycle());
    let run = run_spec(seed, duration, a.dt, loaded.profiles.clone())?;
    let src = Point::new(a.src.0, a.src.1);
    let dst = Point::new(a.dst.0, a.dst.1);
    let results = greedy_forwarding_success(&run, &a.range, src, dst, a.iters).map_err(|e| usage(e.to_string()))?;
    let mut csv = String::from("range,successes,trials,success_rate\n");
    for r in &results {
        csv.push_str(&format!("{},{},{},{}\n", r.range, r.successes, r.trials, r.success_rate()));
    }
    let mut summary = json!({ "nodes": loaded.profiles.len(), "results": results });
    if let Some(path) = &a.reference {
        let (reference, _) = read_document(path)?;
        let k = a.range[0];
        let to_usage = |e: tvc::Error| usage(e.to_string());
        let ref_pop = Population::from_document(&reference).map_err(to_usage)?;
        let target = Population::from_document(&loaded.doc).map_err(to_usage)?;
        let degree = ref_pop.mean_degree(reference.node_count() as f64, k)?;
        let needed = nodes_needed(&target, degree, k)?;
        summary["reference"] = json!({
            "config": path.display().to_string(),
            "nodes": reference.node_count(),
            "range": k,
            "mean_degree": degree,
            "nodes_needed": needed,
        });
        println!("nodes needed to match the reference degree {degree:.4} at K = {k}: {needed}");
    }
    let mut out = Outputs::create(&a.common.out)?;
    out.write("routing.csv", csv.as_bytes())?;
    out.write_json("route.json", &summary)?;
    print!("{csv}");
    finish(out, "route", Some(seed), Some(&loaded), &params(a))?;
    Ok(Outcome::Success)
}
