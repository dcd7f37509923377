//! Acceptance criteria 1 to 9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use etale_lab::freeness::{freeness_report, is_minimal, pure_infiniteness_witness, PureInfiniteness, Verdict};
use etale_lab::gallery::{self, FixtureStatus};
use etale_lab::groupoid::GermSystem;
use etale_lab::orbit::{lambda_matrix, point_orbit_matrix, Matrix};
use etale_lab::random::DEFAULT_SEED;
use etale_lab::scenario::Loaded;
use etale_lab::section::{el_kernel_member, ess_equal, is_singular, normal_form};
use etale_lab::selftest::{self, SuiteResult};
use etale_lab::topology::{ConstructibleSet, OpenSet, UPPoint};

type Outcome = Result<String, String>;
type Criterion = (usize, &'static str, u64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load(name: &str) -> Result<Loaded, String> {
    gallery::scenario(name)
        .and_then(|s| s.load_all())
        .map_err(|e| format!("{name}: {e}"))
}

fn suite(r: SuiteResult) -> Result<usize, String> {
    if r.passed() {
        Ok(r.cases)
    } else {
        Err(r.to_string())
    }
}

/// All partial injections of `{0, …, n-1}` as image vectors.
fn symmetric_inverse_monoid(n: usize) -> Vec<Vec<Option<usize>>> {
    fn extend(n: usize, prefix: &mut Vec<Option<usize>>, used: &mut Vec<bool>, out: &mut Vec<Vec<Option<usize>>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        prefix.push(None);
        extend(n, prefix, used, out);
        prefix.pop();
        for y in 0..n {
            if !used[y] {
                used[y] = true;
                prefix.push(Some(y));
                extend(n, prefix, used, out);
                prefix.pop();
                used[y] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Germs of `I_n` on `n` points: pairs `(t, x)` with `x ∈ dom t`, merged
/// when some `w ≤ t, u` (graph inclusion) has `x ∈ dom w`.
fn brute_force_germ_count(n: usize) -> usize {
    let monoid = symmetric_inverse_monoid(n);
    let below = |w: &[Option<usize>], t: &[Option<usize>]| w.iter().zip(t).all(|(a, b)| a.is_none() || a == b);
    let mut classes = 0;
    for x in 0..n {
        let mut reps: Vec<&Vec<Option<usize>>> = Vec::new();
        for t in monoid.iter().filter(|t| t[x].is_some()) {
            let merged = reps
                .iter()
                .any(|u| monoid.iter().any(|w| w[x].is_some() && below(w, t) && below(w, u)));
            if !merged {
                reps.push(t);
            }
        }
        classes += reps.len();
    }
    classes
}

fn criterion_1() -> Outcome {
    let mut details = Vec::new();
    for n in 2..=4 {
        let start = Instant::now();
        let loaded = load(&format!("pair{n}"))?;
        let gs = &loaded.gs;
        let brute = brute_force_germ_count(n);
        ensure(brute == n * n, || format!("n = {n}: brute-force enumerator found {brute} germs"))?;
        let arrows = gs.enumerate_arrows().map_err(|e| e.to_string())?;
        ensure(arrows.len() == brute, || format!("n = {n}: {} arrows, brute force {brute}", arrows.len()))?;
        ensure(gs.is_hausdorff(1), || format!("n = {n}: not Hausdorff"))?;
        let fr = freeness_report(gs, 1);
        ensure(fr.effective.passes(), || format!("n = {n}: not effective"))?;
        ensure(fr.topologically_principal.passes(), || format!("n = {n}: not principal"))?;
        let minimal = is_minimal(gs, 2, 64).map_err(|e| e.to_string())?;
        ensure(minimal == Verdict::Holds, || format!("n = {n}: minimality {minimal}"))?;
        let elapsed = start.elapsed();
        ensure(elapsed < Duration::from_secs(1), || format!("n = {n} took {elapsed:?}"))?;
        details.push(format!("n={n}: {} arrows", arrows.len()));
    }
    Ok(details.join(", "))
}

fn criterion_2() -> Outcome {
    let loaded = load("dbl")?;
    let gs = &loaded.gs;
    ensure(!gs.is_hausdorff(1), || "dbl is Hausdorff".into())?;
    let fr = freeness_report(gs, 1);
    ensure(fr.topologically_free.passes(), || "not topologically free".into())?;
    ensure(!fr.effective.passes(), || "effective".into())?;
    let zero = gs.space().parse_point("(0)").map_err(|e| e.to_string())?;
    let dangerous = gs.dangerous_set(1);
    let expected = ConstructibleSet::point(gs.space(), &zero).map_err(|e| e.to_string())?;
    ensure(dangerous == expected, || format!("dangerous set {dangerous}"))?;
    ensure(dangerous.is_meagre(), || "dangerous set not meagre".into())?;
    let section = |n: &str| loaded.section(n).cloned().map_err(|e| e.to_string());
    let (f, dg, d1) = (section("f")?, section("dg")?, section("d1")?);
    ensure(!normal_form(gs, &f).is_zero(), || "f is zero".into())?;
    ensure(is_singular(gs, &f), || "f not singular by the support route".into())?;
    ensure(el_kernel_member(gs, &f), || "f not singular by the expectation route".into())?;
    ensure(ess_equal(gs, &dg, &d1), || "δ_g and δ_1 not essentially equal".into())?;
    let m = lambda_matrix(gs, &f, &zero, 1).map_err(|e| e.to_string())?;
    let expected = Matrix::from_ints(&[&[-1, 1], &[1, -1]]);
    ensure(m.matrix == expected, || format!("orbit matrix at (0) is\n{}", m.matrix))?;
    Ok("non-Hausdorff, free, not effective, f singular by both routes and λ(f) = [[-1,1],[1,-1]]".into())
}

fn criterion_3() -> Outcome {
    let loaded = load("z2_point")?;
    let gs = &loaded.gs;
    let fr = freeness_report(gs, 1);
    ensure(!fr.topologically_free.passes(), || "topologically free".into())?;
    let f = loaded.section("f").cloned().map_err(|e| e.to_string())?;
    ensure(!normal_form(gs, &f).is_zero(), || "f is zero".into())?;
    ensure(!is_singular(gs, &f), || "f singular by the support route".into())?;
    ensure(!el_kernel_member(gs, &f), || "f singular by the expectation route".into())?;
    let points: Vec<UPPoint> = gs.space().points().ok_or("space not finite")?;
    for x in &points {
        let m = point_orbit_matrix(gs, &f, x, 1).map_err(|e| e.to_string())?;
        ensure(m.matrix.is_zero(), || format!("orbit representation at {x:?} is\n{}", m.matrix))?;
        let l = lambda_matrix(gs, &f, x, 1).map_err(|e| e.to_string())?;
        ensure(!l.matrix.is_zero(), || "regular representation vanishes".into())?;
    }
    Ok(format!("f nonzero, non-singular, killed by the orbit representations of all {} points", points.len()))
}

fn criterion_4() -> Outcome {
    let mut total = 0;
    for (k, name) in ["cuntz2", "pair2", "pair3", "pair4"].iter().enumerate() {
        let sys = selftest::gallery_systems()
            .into_iter()
            .find(|s| s.name == *name)
            .ok_or_else(|| format!("no gallery system {name}"))?;
        total += suite(selftest::faithfulness_suite(&sys, DEFAULT_SEED + k as u64, 200))?;
    }
    Ok(format!("{total} sections"))
}

fn criterion_5() -> Outcome {
    let n = suite(selftest::freeness_suite(DEFAULT_SEED, 100))?;
    Ok(format!("{n} systems"))
}

fn criterion_6() -> Outcome {
    let systems = selftest::gallery_systems();
    let mut total = 0;
    for (k, sys) in systems.iter().enumerate() {
        total += suite(selftest::algebra_suite(sys, DEFAULT_SEED + k as u64, 500))?;
    }
    Ok(format!("{total} triples over {} systems", systems.len()))
}

/// Re-derives each clause of a witness from its labels.
fn verify_witness(gs: &GermSystem, v: &OpenSet, labels: &[String]) -> Result<(), String> {
    let e = |e: etale_lab::Error| e.to_string();
    let mut sources = Vec::new();
    let mut ranges = Vec::new();
    for l in labels {
        let map = gs.map(&gs.parse_label(l).map_err(e)?).clone();
        let source = v.intersect(&map.preimage(v).map_err(e)?).map_err(e)?;
        ranges.push(map.image(&source).map_err(e)?);
        sources.push(source);
    }
    let mut cover = OpenSet::empty(gs.space());
    for s in &sources {
        cover = cover.union(s).map_err(e)?;
    }
    ensure(cover == *v, || format!("sources cover {cover}, not {v}"))?;
    for (i, a) in ranges.iter().enumerate() {
        for b in &ranges[i + 1..] {
            ensure(a.intersect(b).map_err(e)?.is_empty(), || format!("ranges {a} and {b} meet"))?;
        }
    }
    let mut union = OpenSet::empty(gs.space());
    for r in &ranges {
        union = union.union(r).map_err(e)?;
    }
    let closure = union.closure();
    let vc: ConstructibleSet = v.clone().into();
    ensure(closure.is_subset(&vc).map_err(e)? && closure != vc, || {
        format!("closure of the ranges {closure} is not a proper subset of {v}")
    })
}

fn criterion_7() -> Outcome {
    let loaded = load("cuntz2")?;
    let gs = &loaded.gs;
    let x = OpenSet::full(gs.space());
    match pure_infiniteness_witness(gs, &x, 2, 2).map_err(|e| e.to_string())? {
        PureInfiniteness::Witness { v, labels, .. } => {
            ensure(v == x && labels == ["v0"], || format!("witness ({v}, {labels:?})"))?;
            verify_witness(gs, &v, &labels)?;
        }
        other => return Err(format!("cuntz2: {other:?}")),
    }
    let mut checked = vec!["dbl"];
    checked.extend(gallery::finite_names());
    for name in &checked {
        let loaded = load(name)?;
        let x = OpenSet::full(loaded.gs.space());
        let r = pure_infiniteness_witness(&loaded.gs, &x, 2, 2).map_err(|e| e.to_string())?;
        ensure(r == PureInfiniteness::NotFoundUpTo { depth: 2, len: 2 }, || format!("{name}: {r:?}"))?;
    }
    Ok(format!("cuntz2 witness (X, [v0]) verified; none for {}", checked.join(", ")))
}

fn criterion_8() -> Outcome {
    let n = suite(selftest::topology_suite(DEFAULT_SEED, 500))?;
    Ok(format!("{n} random regular opens"))
}

fn criterion_9() -> Outcome {
    let names = gallery::names();
    for name in &names {
        let first = gallery::run(name, false).map_err(|e| format!("{name}: {e}"))?;
        let second = gallery::run(name, false).map_err(|e| format!("{name}: {e}"))?;
        ensure(first.report.to_json() == second.report.to_json(), || format!("{name}: two runs differ"))?;
        ensure(first.report.to_text() == second.report.to_text(), || format!("{name}: text renderings differ"))?;
        ensure(first.fixture == FixtureStatus::Match, || format!("{name}: fixture {:?}", first.fixture))?;
    }
    let results = selftest::run_all(DEFAULT_SEED, None);
    let failed: BTreeSet<String> = results.iter().filter(|r| !r.passed()).map(|r| r.to_string()).collect();
    ensure(failed.is_empty(), || failed.into_iter().collect::<Vec<_>>().join("; "))?;
    Ok(format!("{} gallery scenarios stable, {} selftest suites pass", names.len(), results.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "pair-groupoid oracle", 3, criterion_1),
        (2, "doubled point", 1, criterion_2),
        (3, "non-free failure mode", 1, criterion_3),
        (4, "Hausdorff faithfulness", 10, criterion_4),
        (5, "freeness logic", 10, criterion_5),
        (6, "algebra laws", 30, criterion_6),
        (7, "pure-infiniteness witness", 5, criterion_7),
        (8, "topology engine", 10, criterion_8),
        (9, "gallery and selftest", 60, criterion_9),
    ];
    let mut all = true;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(d) if secs >= limit as f64 => Err(format!("{d}, but took {secs:.2} s (limit {limit} s)")),
            o => o,
        };
        match outcome {
            Ok(d) => println!("PASS criterion {n} ({name}): {d} [{secs:.2} s < {limit} s]"),
            Err(e) => {
                all = false;
                println!("FAIL criterion {n} ({name}): {e} [{secs:.2} s]");
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
