//! Job lists for each subcommand. A job yields the reports of one check.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use preduals_core::config::load_spec;
use preduals_core::power::{
    central_binomial_check, fourier_cross_check, named_element, newman_decay_check, newman_modulus_check,
    newman_power_table, power_norm_table, probe_from_table,
};
use preduals_core::semigroup::{
    embed_sequence, idempotent_scan, involution_check, kernel_generators, limit_predict, theta_homomorphism_check,
    topology_check, KernelReport, Limit, LimitParams, ProjectionSpec, SemiElem,
};
use preduals_core::sparse::{additively_sparse_check, disjoint_family, hausdorff_condition_check, SparseParams, SparseSet};
use preduals_core::szlenk::{
    random_admissible_family, shrink_factor, shrink_iteration_bound, shrink_radius, shrink_witness_check,
    witness_chain_check, ShrinkParams, WitnessFamily,
};
use preduals_core::xzero::{
    class_disjointness_check, class_limit_check, extend as extend_seq, isometry_witness, limit_law_check,
    minimal_threshold, pairing_check, verify_intertwine, verify_identities, ClassLabel, ClassMeasure, GeneratorBattery,
};
use preduals_core::{parse_complex, Error, FinSeq, LambdaParam, Report, Result, Scalar, Status, ToReport, Window};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{lambda, ExtendArgs, LimitArgs, PowerArgs, SparseArgs, SuiteArgs, SzlenkArgs, ThetaArgs, XzeroArgs};

pub type Job = Box<dyn Fn() -> Result<Vec<Report>> + Send + Sync>;

const EXTENSION_SLACK: f64 = 1e-12;
const NEWMAN_THRESHOLD: f64 = 0.05;
const NEWMAN_ONSET: u32 = 157;

fn one<F>(f: F) -> Job
where
    F: Fn() -> Result<Report> + Send + Sync + 'static,
{
    Box::new(move || Ok(vec![f()?]))
}

/// Folds the reports of a parameter grid into one: any failure fails the grid
/// and is kept as a witness.
fn grid(name: &str, reports: Vec<Report>) -> Report {
    let status = if reports.iter().any(Report::is_fail) {
        Status::Fail
    } else if reports.iter().any(|r| r.status == Status::EvidenceOnly) {
        Status::EvidenceOnly
    } else {
        Status::Pass
    };
    let max_error = reports.iter().map(|r| r.max_error).fold(0.0, f64::max);
    let mut out = Report::new(name, status).param("cells", reports.len()).max_error(max_error);
    for r in reports.into_iter().filter(Report::is_fail) {
        out = out.witness(r);
    }
    out.finalize()
}

pub fn verify_xzero(a: &XzeroArgs, seed: u64) -> Result<Vec<Job>> {
    let l = lambda(&a.lambda)?;
    let w = Window::radius(a.window)?;
    let depth = a.depth;
    let terms = (a.window / 2 + 1) as u32;
    let mut jobs: Vec<Job> = Vec::new();
    {
        let l = l.clone();
        jobs.push(one(move || Ok(verify_identities(&l, w, terms)?.to_report())));
    }
    {
        let l = l.clone();
        jobs.push(one(move || Ok(verify_intertwine(&l, w, 16, seed)?.to_report())));
    }
    {
        let l = l.clone();
        jobs.push(one(move || {
            let n_max = depth.clamp(5, 120);
            let cells = (-8..=8)
                .map(|t| Ok(limit_law_check(&l, t, n_max)?.to_report()))
                .collect::<Result<Vec<_>>>()?;
            Ok(grid("limit-law-grid", cells))
        }));
    }
    {
        let l = l.clone();
        jobs.push(one(move || {
            let mut cells = Vec::new();
            for t in -4..=4 {
                for k in 1..=3 {
                    cells.push(class_limit_check(ClassLabel::class(t, k)?, &l, depth, 6)?.to_report());
                }
            }
            Ok(grid("class-limit-grid", cells))
        }));
    }
    jobs.push(one(|| {
        let mut cells = Vec::new();
        for s in -4..=4 {
            for t in -4..=4 {
                for k in 1..=2 {
                    for m in 1..=2 {
                        cells.push(class_disjointness_check(s, t, k, m, minimal_threshold(s, t), 14)?.to_report());
                    }
                }
            }
        }
        Ok(grid("class-disjointness-grid", cells))
    }));
    {
        let l = l.clone();
        jobs.push(Box::new(move || {
            let battery = GeneratorBattery::default_battery();
            let measures = [
                ClassMeasure::unit(ClassLabel::Point(0))?,
                ClassMeasure::unit(ClassLabel::class(0, 1)?)?,
                ClassMeasure::new()
                    .with(ClassLabel::class(1, 1)?, Scalar::ratio(1, 2))?
                    .with(ClassLabel::class(-3, 2)?, Scalar::int(-2))?
                    .with(ClassLabel::Point(5), Scalar::int(3))?,
            ];
            measures
                .iter()
                .map(|mu| Ok(pairing_check(mu, &battery, &l)?.to_report()))
                .collect()
        }));
    }
    jobs.push(Box::new(move || {
        let dipole = FinSeq::from_entries([(0, Scalar::one()), (1, Scalar::int(-1))])?;
        Ok(vec![
            isometry_witness(&dipole, &l, 1e-3)?.to_report(),
            isometry_witness(&FinSeq::delta(3), &l, 1e-3)?.to_report(),
        ])
    }));
    Ok(jobs)
}

/// Parses `n=VALUE;n=VALUE`.
pub fn parse_sequence(text: &str) -> Result<FinSeq> {
    let mut entries = Vec::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (n, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected `n=value`, got `{item}`")))?;
        let n: i64 = n.trim().parse().map_err(|e| Error::Parse(format!("index `{n}`: {e}")))?;
        entries.push((n, parse_complex(v)?));
    }
    FinSeq::from_entries(entries)
}

fn extension_report(y: &FinSeq, l: &LambdaParam, w: Window, csv: Option<&Path>) -> Result<Report> {
    let ext = extend_seq(y, l)?;
    let cert = ext.certificate(w)?;
    if let Some(path) = csv {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "n,re,im")?;
        for n in w.indices() {
            let z = ext.at(n).to_complex();
            writeln!(out, "{n},{},{}", z.re, z.im)?;
        }
        out.flush()?;
    }
    let holds = cert.holds(l.is_exact(), EXTENSION_SLACK);
    let mut r = Report::new("extension", Status::from_pass(holds))
        .param("lambda", l)
        .param("y", y)
        .param("window", w)
        .max_error((cert.max_off_support - cert.bound).max(0.0))
        .detail("certificate", &cert);
    if !holds {
        r = r.witness(json!({ "worst_off_support": cert.worst_off_support, "on_support": cert.on_support }));
    }
    Ok(r.finalize())
}

pub fn extend(a: &ExtendArgs) -> Result<Vec<Job>> {
    let l = lambda(&a.lambda)?;
    let y = parse_sequence(&a.y)?;
    let w = Window::radius(a.window)?;
    let csv = a.csv.clone();
    Ok(vec![one(move || extension_report(&y, &l, w, csv.as_deref()))])
}

pub fn power_table(a: &PowerArgs) -> Result<Vec<Job>> {
    let l = lambda(&a.lambda)?;
    let name = a.element.clone();
    let element = named_element(&name, Some(&l))?;
    let (max_m, bound, csv) = (a.max_m, a.bound, a.csv.clone());
    let mut jobs: Vec<Job> = Vec::new();
    {
        let element = element.clone();
        let name = name.clone();
        jobs.push(Box::new(move || {
            let table = if name == "newman" {
                newman_power_table(max_m)?
            } else {
                power_norm_table(&element, max_m)?
            };
            if let Some(path) = &csv {
                table.write_csv(File::create(path)?)?;
            }
            let violations = table.submultiplicative_violations();
            let mut r = Report::new("power-table", Status::from_pass(violations.is_empty()))
                .param("element", &name)
                .param("max_m", max_m)
                .detail("rows", table.rows.len())
                .detail("last", table.rows.last());
            for v in violations.iter().take(16) {
                r = r.witness(v);
            }
            Ok(vec![r.finalize(), probe_from_table(&table, bound).to_report()])
        }));
    }
    jobs.push(one(move || Ok(fourier_cross_check(&element, max_m.min(64), 8)?.to_report())));
    if name == "binomial" {
        jobs.push(one(move || Ok(central_binomial_check(max_m)?.to_report())));
    }
    if name == "newman" {
        jobs.push(one(|| Ok(newman_modulus_check(10_000).to_report())));
    }
    Ok(jobs)
}

pub fn sparse_check(a: &SparseArgs) -> Result<Vec<Job>> {
    let set = SparseSet::parse(&a.set)?;
    let params = SparseParams::new(a.t, a.depth, a.depth, a.bound);
    let (t, depth, bound, k) = (a.t, a.depth, a.bound, a.k);
    let mut jobs: Vec<Job> = Vec::new();
    {
        let set = set.clone();
        jobs.push(one(move || Ok(additively_sparse_check(&set, &params)?.to_report())));
    }
    jobs.push(one(move || {
        let fam = disjoint_family(&set, k)?;
        Ok(hausdorff_condition_check(&fam, t.min(16), depth, bound, None)?.to_report())
    }));
    Ok(jobs)
}

fn kernel_gammas(k: usize) -> Result<Vec<SemiElem>> {
    let mut out = vec![SemiElem::finite(3, vec![0; k])];
    for i in 0..k {
        let unit = |c: u32| {
            let mut g = vec![0; k];
            g[i] = c;
            g
        };
        out.push(SemiElem::generator(i + 1, k)?);
        out.push(SemiElem::finite(1, unit(2)));
        out.push(SemiElem::finite(-5, unit(4)));
    }
    Ok(out)
}

pub fn semigroup_theta(a: &ThetaArgs, seed: u64) -> Result<Vec<Job>> {
    let spec = load_spec(&a.config)?;
    Ok(theta_jobs(spec, a.trials, seed))
}

fn theta_jobs(spec: ProjectionSpec, trials: usize, seed: u64) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    {
        let spec = spec.clone();
        jobs.push(one(move || Ok(spec.validate()?.to_report())));
    }
    {
        let spec = spec.clone();
        jobs.push(one(move || Ok(theta_homomorphism_check(&spec, trials, seed)?.to_report())));
    }
    {
        let spec = spec.clone();
        jobs.push(one(move || {
            let generators = kernel_generators(&spec, &kernel_gammas(spec.k())?)?;
            Ok(KernelReport { generators }.to_report())
        }));
    }
    {
        let spec = spec.clone();
        jobs.push(Box::new(move || match involution_check(&spec, trials, seed) {
            Ok(r) => Ok(vec![r.to_report()]),
            // Only symmetric configurations admit the involution check.
            Err(Error::Precondition(reason)) => {
                eprintln!("involution check skipped: {reason}");
                Ok(Vec::new())
            }
            Err(e) => Err(e),
        }));
    }
    jobs.push(one(move || {
        let k = spec.k();
        let mut samples = vec![SemiElem::zero(k), SemiElem::Infinity];
        samples.extend(kernel_gammas(k)?);
        Ok(idempotent_scan(&spec, &samples)?.to_report())
    }));
    jobs
}

/// Named test sequences with their expected limits (`None` for divergent).
/// Tails run up to the search bound: with larger members still in the pools,
/// decompositions reusing one fixed large member tie with the true limit.
fn limit_sequences(spec: &ProjectionSpec, len: usize) -> Vec<(String, Vec<i64>, Option<SemiElem>)> {
    let k = spec.k();
    let mut out = Vec::new();
    for (i, set) in spec.family.sets.iter().enumerate() {
        if !set.is_infinite() {
            continue;
        }
        let members: Vec<i64> = set
            .members(spec.search_bound)
            .into_iter()
            .map(|(_, v)| v)
            .collect();
        let tail = |v: Vec<i64>| v[v.len().saturating_sub(len)..].to_vec();
        let unit = |t: i64, c: u32| {
            let mut g = vec![0; k];
            g[i] = c;
            SemiElem::finite(t, g)
        };
        out.push((format!("members-{i}"), tail(members.clone()), Some(unit(0, 1))));
        out.push((
            format!("shifted-members-{i}"),
            tail(members.iter().map(|v| v + 3).collect()),
            Some(unit(3, 1)),
        ));
        out.push((
            format!("pair-sums-{i}"),
            tail(members.windows(2).map(|w| w[0] + w[1]).filter(|&v| v != 0).collect()),
            Some(unit(0, 2)),
        ));
        out.push((
            format!("alternating-{i}"),
            tail(members.iter().enumerate().map(|(j, v)| v + (j % 2) as i64).collect()),
            None,
        ));
    }
    out
}

pub fn limit_sim(a: &LimitArgs, seed: u64) -> Result<Vec<Job>> {
    let spec = load_spec(&a.config)?;
    let params = LimitParams {
        depth: a.depth,
        ..LimitParams::default()
    };
    Ok(limit_jobs(spec, params, a.max_m, a.cells, seed))
}

fn limit_jobs(spec: ProjectionSpec, params: LimitParams, len: usize, cells: usize, seed: u64) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for (name, values, expected) in limit_sequences(&spec, len) {
        let spec = spec.clone();
        jobs.push(one(move || {
            let seq = embed_sequence(&values, spec.k());
            let p = limit_predict(&seq, &spec, &params)?;
            let matches = match (&p.limit, &expected) {
                (Limit::Converges(g), Some(e)) => g == e,
                (Limit::Divergent, None) => true,
                _ => false,
            };
            let mut r = p.to_report().param("sequence", &name).param("expected", &expected);
            r.status = Status::evidence(matches);
            r.witnesses.clear();
            if !matches {
                r = r.witness(json!({ "values": values, "limit": p.limit }));
            }
            Ok(r)
        }));
    }
    jobs.push(one(move || Ok(topology_check(&spec, cells, seed)?.to_report())));
    jobs
}

pub fn szlenk_probe(a: &SzlenkArgs, seed: u64) -> Result<Vec<Job>> {
    let l = lambda(&a.lambda)?;
    let spec = load_spec(&a.config)?;
    szlenk_jobs(l, a.epsilon, a.depth, spec, a.families, seed)
}

fn szlenk_jobs(
    l: LambdaParam,
    eps: f64,
    depth: u32,
    spec: ProjectionSpec,
    families: usize,
    seed: u64,
) -> Result<Vec<Job>> {
    let params = ShrinkParams::new(l.clone(), eps, 1.0)?;
    let mut jobs: Vec<Job> = Vec::new();
    {
        let (l, params) = (l.clone(), params.clone());
        jobs.push(one(move || {
            let radius = shrink_radius(&params);
            let ok = radius > 0.0 && radius < params.r;
            Ok(Report::new("shrink-radius", Status::from_pass(ok))
                .param("lambda", &l)
                .param("eps", eps)
                .param("r", params.r)
                .detail("factor", shrink_factor(&l))
                .detail("radius", radius)
                .detail("iteration_bound", shrink_iteration_bound(&l, eps)?)
                .finalize())
        }));
    }
    {
        let (l, params) = (l.clone(), params.clone());
        jobs.push(one(move || {
            let fam = WitnessFamily::canonical(&l, 60)?;
            Ok(shrink_witness_check(&fam, &params)?.to_report())
        }));
    }
    if l.modulus() >= 2.0 && families > 0 {
        let l = l.clone();
        jobs.push(one(move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cells = Vec::new();
            for _ in 0..families {
                let (fam, p) = random_admissible_family(&mut rng, &l)?;
                cells.push(shrink_witness_check(&fam, &p)?.to_report());
            }
            Ok(grid("shrink-random-families", cells))
        }));
    }
    jobs.push(one(move || Ok(witness_chain_check(&spec, eps, depth, 4)?.to_report())));
    Ok(jobs)
}

pub fn suite(a: &SuiteArgs, seed: u64) -> Result<Vec<Job>> {
    let l = lambda(&a.lambda)?;
    let spec = load_spec(&a.config)?;
    let mut jobs = verify_xzero(
        &XzeroArgs {
            lambda: a.lambda.clone(),
            window: 4096,
            depth: 60,
        },
        seed,
    )?;
    {
        let l = l.clone();
        jobs.push(one(move || {
            let y = FinSeq::from_entries([(1, Scalar::one()), (2, Scalar::int(-1)), (5, Scalar::ratio(1, 3))])?;
            extension_report(&y, &l, Window::radius(1024)?, None)
        }));
    }
    jobs.extend(power_table(&PowerArgs {
        element: "binomial".into(),
        lambda: a.lambda.clone(),
        max_m: 256,
        bound: 1.0 + 1e-9,
        csv: None,
    })?);
    jobs.push(one(|| Ok(newman_modulus_check(10_000).to_report())));
    jobs.push(one(|| Ok(newman_decay_check(256, NEWMAN_THRESHOLD, NEWMAN_ONSET)?.to_report())));
    for (set, bound) in [("powers:2", 1u64 << 16), ("factorials", 3_628_800)] {
        jobs.extend(sparse_check(&SparseArgs {
            set: set.into(),
            bound,
            t: 100,
            depth: 3,
            k: 2,
        })?);
    }
    jobs.extend(theta_jobs(spec.clone(), 100, seed));
    jobs.push(one(move || {
        let a = FinSeq::from_entries([(-1, Scalar::ratio(1, 2)), (1, Scalar::ratio(1, 2))])?;
        let fam = disjoint_family(&SparseSet::factorials(), 1)?;
        let symmetric = ProjectionSpec::new(vec![a], fam)?.with_search_bound(3_628_800);
        Ok(involution_check(&symmetric, 100, seed)?.to_report())
    }));
    jobs.extend(limit_jobs(spec.clone(), LimitParams::default(), 16, 200, seed));
    jobs.extend(szlenk_jobs(l, 1.0, 20, spec, 8, seed)?);
    Ok(jobs)
}

/// One line summarizing the statuses of a suite run.
pub fn summary(reports: &[Report]) -> Report {
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    let failed: Vec<&str> = reports.iter().filter(|r| r.is_fail()).map(|r| r.check_name.as_str()).collect();
    let mut r = Report::new("suite", Status::from_pass(failed.is_empty()))
        .param("checks", reports.len())
        .detail("pass", count(Status::Pass))
        .detail("evidence_only", count(Status::EvidenceOnly))
        .detail("fail", failed.len());
    for name in failed {
        r = r.witness(name);
    }
    r.finalize()
}
