//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 1-7 run under an 8-thread pool while appending their reports to a
//! transcript; criterion 8 reruns them under a 1-thread pool and compares the
//! transcripts byte for byte.

mod common;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use bvcert::cli::{main_with_args, EXIT_OK, EXIT_VIOLATED};
use bvcert::fixtures::{
    cycle, grid_graph, grid_graph_with, path_graph, random_field, random_graph_space,
    random_measure, random_space, sine_bump, two_point,
};
use bvcert::maximal::superlevel_mass;
use bvcert::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = std::result::Result<String, String>;

/// Reports appended by each criterion, compared across thread counts.
#[derive(Default)]
struct Transcript(String);

impl Transcript {
    fn push(&mut self, tag: &str, body: &str) {
        let _ = writeln!(self.0, "{tag} {body}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn criterion_1(tr: &mut Transcript) -> Outcome {
    let mut balls = 0usize;
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let n = 20 + (seed as usize * 37) % 81;
        let s = random_space(seed, n);
        let u = random_field(seed, n);
        let nu = random_measure(seed, n);
        let diam = s.diameter();
        for r_max in [0.3 * diam, 0.61 * diam, f64::INFINITY] {
            let mut lib_u = Vec::with_capacity(n);
            let mut lib_nu = Vec::with_capacity(n);
            for x in 0..n {
                let shells = s.shells(x);
                let lib_family: BTreeSet<Vec<usize>> = (0..shells.realizable(r_max))
                    .map(|i| {
                        let mut m: Vec<usize> =
                            shells.members(i).iter().map(|&p| p as usize).collect();
                        m.sort_unstable();
                        m
                    })
                    .collect();
                let family = common::ball_family(&s, x, r_max);
                ensure(lib_family == family, || {
                    format!(
                        "seed {seed} x {x} R {r_max}: {} vs {} balls",
                        lib_family.len(),
                        family.len()
                    )
                })?;
                balls += family.len();
                let mut want_u: f64 = 0.0;
                let mut want_nu: f64 = 0.0;
                for b in &family {
                    let m = common::mass(&s, b);
                    want_u = want_u.max(b.iter().map(|&i| u[i].abs() * s.mass(i)).sum::<f64>() / m);
                    want_nu = want_nu.max(b.iter().map(|&i| nu[i]).sum::<f64>() / m);
                }
                let got_u = restricted_maximal(&s, &u, x, r_max).map_err(|e| e.to_string())?;
                let got_nu =
                    restricted_maximal_measure(&s, &nu, x, r_max).map_err(|e| e.to_string())?;
                for (got, want) in [(got_u, want_u), (got_nu, want_nu)] {
                    let e = rel_err(got, want);
                    worst = worst.max(e);
                    ensure(e <= 1e-12, || {
                        format!("seed {seed} x {x} R {r_max}: {got} vs {want}")
                    })?;
                }
                lib_u.push(got_u);
                lib_nu.push(got_nu);
            }
            tr.push("c1-u", &to_json(&lib_u));
            tr.push("c1-nu", &to_json(&lib_nu));
        }
    }
    Ok(format!(
        "50 spaces, {balls} balls identical, max rel err {worst:.1e}"
    ))
}

fn closed_tripling_oracle(s: &MetricMeasureSpace) -> f64 {
    let mut best: f64 = 1.0;
    for x in 0..s.n() {
        for y in 0..s.n() {
            let t = s.dist(x, y);
            let small: f64 = (0..s.n())
                .filter(|&z| s.dist(x, z) <= t)
                .map(|z| s.mass(z))
                .sum();
            let big: f64 = (0..s.n())
                .filter(|&z| s.dist(x, z) <= 3.0 * t)
                .map(|z| s.mass(z))
                .sum();
            best = best.max(big / small);
        }
    }
    best
}

fn criterion_2(tr: &mut Transcript) -> Outcome {
    let mut cases: Vec<(MetricMeasureSpace, PointMeasure)> = Vec::new();
    for seed in 0..50u64 {
        let n = 10 + (seed as usize * 13) % 60;
        let s = random_space(seed, n);
        cases.push((s, random_measure(seed, n)));
    }
    for g in [grid_graph(8), grid_graph(16), grid_graph_with(5, 11, 0.5)] {
        let u = sine_bump(&g);
        let nu = variation_measure(&g, &u, VariationMode::Grid).map_err(|e| e.to_string())?;
        cases.push((g, nu));
    }
    for s in [two_point(), path_graph(15, 1.0 / 15.0), cycle(12)] {
        let nu = PointMeasure::new(s.masses().to_vec()).map_err(|e| e.to_string())?;
        cases.push((s, nu));
    }
    let mut checks = 0usize;
    let mut tightest: f64 = 0.0;
    for (s, nu) in &cases {
        let cw = weak_type_constant(s);
        let oracle = closed_tripling_oracle(s);
        ensure(rel_err(cw, oracle) <= 1e-12, || {
            format!("{}: C_w {cw} vs oracle {oracle}", s.name())
        })?;
        let m = maximal_function_measure(s, nu, f64::INFINITY).map_err(|e| e.to_string())?;
        let total = nu.total();
        let top = m.values().iter().copied().fold(0.0, f64::max);
        if top == 0.0 {
            continue;
        }
        let mut masses = Vec::new();
        for j in -60..=8 {
            let t = top * 2f64.powf(j as f64 / 4.0);
            let lhs = superlevel_mass(s, &m, t);
            let rhs = cw * total / t;
            ensure(lhs <= rhs, || {
                format!("{}: t = {t}: {lhs} > {rhs}", s.name())
            })?;
            tightest = tightest.max(lhs / rhs);
            checks += 1;
            masses.push(lhs);
        }
        tr.push(
            "c2",
            &format!("{} {} {}", s.name(), to_json(&cw), to_json(&masses)),
        );
    }
    Ok(format!(
        "{} space/measure pairs, {checks} levels, 0 violations, tightest ratio {tightest:.3}",
        cases.len()
    ))
}

fn criterion_3(tr: &mut Transcript) -> Outcome {
    let spaces = [
        path_graph(15, 1.0 / 15.0),
        path_graph(9, 1.0),
        grid_graph(15),
        grid_graph_with(6, 9, 1.0),
    ];
    let mut combos = 0usize;
    let mut witnesses = 0usize;
    for s in &spaces {
        let mesh = s
            .edges()
            .unwrap()
            .iter()
            .map(|e| e.length)
            .fold(0.0, f64::max);
        let cd = doubling_constant(s);
        let exponent = cd.log2();
        let stride = (s.n() / 8).max(1);
        let mut summary = Vec::new();
        for x0 in (0..s.n()).step_by(stride) {
            for big_r in [1.5, 2.5, 4.0, 6.5].map(|k| k * mesh) {
                for x in (0..s.n()).filter(|&x| s.dist(x, x0) < big_r) {
                    for r in [1.0, 2.0, 3.0, 5.0, 8.0, 13.0]
                        .map(|k| k * mesh)
                        .into_iter()
                        .filter(|&r| r <= 2.0 * big_r)
                    {
                        combos += 1;
                        let out = check_geodesic_lemma(s, x0, big_r, x, r, mesh)
                            .map_err(|e| e.to_string())?;
                        ensure(out.succeeded(), || {
                            format!("{}: x0 {x0} R {big_r} x {x} r {r}: no witness", s.name())
                        })?;
                        let exact = check_geodesic_lemma(s, x0, big_r, x, r, 0.0)
                            .map_err(|e| e.to_string())?;
                        if exact.succeeded() {
                            witnesses += 1;
                            let sb = small_ball_bound(s, x0, big_r, x, r, cd, exponent);
                            ensure(sb.holds, || {
                                format!(
                                    "{}: small ball at x0 {x0} R {big_r} x {x} r {r}: {} < {}",
                                    s.name(),
                                    sb.lhs,
                                    sb.rhs
                                )
                            })?;
                        }
                        let w = out.witness.unwrap();
                        summary.push((w.center, w.radius, exact.succeeded()));
                    }
                }
            }
        }
        tr.push("c3", &format!("{} {}", s.name(), to_json(&summary)));
    }
    ensure(combos >= 500, || format!("only {combos} combinations"))?;
    Ok(format!("{combos} combinations succeed at slack = mesh, small-ball bound holds at {witnesses} exact witnesses"))
}

struct GridRun {
    n: usize,
    c0: f64,
    cert: CharacterizationCertificate,
}

fn grid_runs(tr: &mut Transcript) -> std::result::Result<Vec<GridRun>, String> {
    let mut runs = Vec::new();
    for n in [8usize, 16, 32] {
        let s = grid_graph(n);
        let u = sine_bump(&s);
        let nu = variation_measure(&s, &u, VariationMode::Grid).map_err(|e| e.to_string())?;
        let pw = check_pointwise(&s, &u, &nu, 2.0, None).map_err(|e| e.to_string())?;
        ensure(pw.c0_minimal.is_finite(), || {
            format!("n = {n}: c0 infinite")
        })?;
        let at =
            check_pointwise(&s, &u, &nu, 2.0, Some(pw.c0_minimal)).map_err(|e| e.to_string())?;
        ensure(at.passed, || {
            format!("n = {n}: pointwise fails at its own minimum")
        })?;
        let cert =
            poincare_from_pointwise(&s, &u, &nu, pw.c0_minimal, 2.0, &AuditSelection::Default)
                .map_err(|e| e.to_string())?;
        tr.push("c4", &to_json(&cert));
        runs.push(GridRun {
            n,
            c0: pw.c0_minimal,
            cert,
        });
    }
    Ok(runs)
}

fn criterion_4(runs: &[GridRun]) -> Outcome {
    for r in runs {
        ensure(r.cert.eta == 6.0, || {
            format!("n = {}: eta {}", r.n, r.cert.eta)
        })?;
        ensure(r.cert.passed, || format!("n = {}: certificate fails", r.n))?;
    }
    let ratio = |a: f64, b: f64| a.max(b) / a.min(b);
    let c0_ratio = ratio(runs[1].c0, runs[2].c0);
    let c_ratio = ratio(runs[1].cert.overall_constant, runs[2].cert.overall_constant);
    ensure(c0_ratio < 2.0, || format!("c0 ratio {c0_ratio}"))?;
    ensure(c_ratio < 2.0, || format!("C ratio {c_ratio}"))?;
    let list = |f: &dyn Fn(&GridRun) -> f64| {
        runs.iter()
            .map(|r| format!("{:.4}", f(r)))
            .collect::<Vec<_>>()
            .join("/")
    };
    Ok(format!(
        "c0 = {}, C = {} (16 vs 32 ratios {c0_ratio:.3}, {c_ratio:.3})",
        list(&|r| r.c0),
        list(&|r| r.cert.overall_constant)
    ))
}

fn run_cli(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("bvcert").chain(args.iter().copied()))
}

fn leaves(v: &Value, path: String, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => m
            .iter()
            .for_each(|(k, x)| leaves(x, format!("{path}/{k}"), out)),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, x)| leaves(x, format!("{path}/{i}"), out)),
        Value::Null => {}
        _ => out.push(path),
    }
}

/// Changes one leaf: booleans flip, integers step, nonzero floats grow by 10%.
fn mutate(leaf: &Value) -> Option<Value> {
    match leaf {
        Value::Bool(b) => Some(Value::Bool(!b)),
        Value::Number(n) if n.is_i64() => Some(serde_json::json!(n.as_i64().unwrap() + 1)),
        Value::Number(n) => {
            let x = n.as_f64().unwrap();
            (x != 0.0).then(|| serde_json::json!(x * 1.1))
        }
        _ => None,
    }
}

fn criterion_5(runs: &[GridRun], tr: &mut Transcript) -> Outcome {
    let mut traces = 0usize;
    for r in runs {
        for t in &r.cert.traces {
            traces += 1;
            ensure(t.passed(), || {
                format!(
                    "n = {}: trace at {:?} fails {:?}",
                    r.n,
                    (t.ball.center, t.ball.radius),
                    t.verified
                )
            })?;
            let b = t
                .k0_bounds
                .ok_or_else(|| format!("n = {}: no k0 bounds", r.n))?;
            ensure(b.lower <= b.value && b.value <= b.upper, || {
                format!("n = {}: k0 bounds {b:?}", r.n)
            })?;
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for r in runs {
        let path = dir.path().join(format!("cert-{}.json", r.n));
        std::fs::write(&path, to_json(&r.cert)).map_err(|e| e.to_string())?;
        let code = run_cli(&[
            "audit",
            path.to_str().unwrap(),
            "--output",
            dir.path().join("a.json").to_str().unwrap(),
        ]);
        ensure(code == EXIT_OK, || {
            format!("n = {}: audit exit {code}", r.n)
        })?;
    }

    let base: Value = serde_json::from_str(&to_json(&runs[0].cert)).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut caught = 0;
    let mut tried = Vec::new();
    while tried.len() < 20 {
        let i = rng.gen_range(0..runs[0].cert.traces.len());
        let mut paths = Vec::new();
        leaves(&base["traces"][i], format!("/traces/{i}"), &mut paths);
        let p = &paths[rng.gen_range(0..paths.len())];
        let Some(new) = mutate(base.pointer(p).unwrap()) else {
            continue;
        };
        let mut m = base.clone();
        *m.pointer_mut(p).unwrap() = new;
        let path = dir.path().join("mutant.json");
        std::fs::write(&path, serde_json::to_string(&m).unwrap()).map_err(|e| e.to_string())?;
        let code = run_cli(&[
            "audit",
            path.to_str().unwrap(),
            "--output",
            dir.path().join("m.json").to_str().unwrap(),
        ]);
        if code == EXIT_VIOLATED {
            caught += 1;
        } else {
            return Err(format!("mutant {p} not caught (exit {code})"));
        }
        tried.push(p.clone());
    }
    tr.push("c5", &to_json(&tried));
    Ok(format!(
        "{traces} traces pass all flags, 3 audits exit 0, {caught}/20 mutants exit 2"
    ))
}

struct Triple {
    space: MetricMeasureSpace,
    u: ScalarField,
    nu: PointMeasure,
}

fn triple(seed: u64) -> Triple {
    let n = 8 + (seed as usize) % 25;
    let space = random_space(seed, n);
    // dyadic values keep differences exact under integer shifts
    let u = random_field(seed, n).map(|v| (v * 64.0).round() / 64.0);
    Triple {
        space,
        u,
        nu: random_measure(seed, n),
    }
}

/// Index of the reported worst row must attain the maximum of `rows` to `tol`.
fn tie_aware(reported: f64, max: f64, tol: f64) -> bool {
    rel_err(reported, max) <= tol
}

fn pair_ratio(
    p: &PointwiseReport,
    s: &MetricMeasureSpace,
    u: &ScalarField,
    x: usize,
    y: usize,
) -> f64 {
    let (mx, my) = p.pair_maximal(x, y);
    let osc = (u[x] - u[y]).abs();
    if osc == 0.0 {
        0.0
    } else {
        osc / (s.dist(x, y) * (mx + my))
    }
}

fn criterion_6(tr: &mut Transcript) -> Outcome {
    const SIGMA: f64 = 1.5;
    const ETA: f64 = 3.0;
    const TOL: f64 = 1e-10;
    let mut worst_generic = 0.0f64;
    for seed in 1000..1100u64 {
        let Triple { space: s, u, nu } = triple(seed);
        let err = |e: Error| format!("seed {seed}: {e}");
        let pw = check_pointwise(&s, &u, &nu, SIGMA, None).map_err(err)?;
        let pc = check_ball_poincare(&s, &u, &nu, ETA, false).map_err(err)?;
        let pcn = check_ball_poincare(&s, &u, &nu, ETA, true).map_err(err)?;
        let worst_pair = |p: &PointwiseReport| p.worst_pair.map(|w| (w.x, w.y));
        let worst_ball =
            |p: &PoincareReport| p.worst_ball.as_ref().map(|w| (w.center, w.radius_limit));
        tr.push(
            "c6",
            &format!(
                "{} {} {}",
                to_json(&pw),
                to_json(&pc.minimal_constant),
                to_json(&pcn.minimal_constant)
            ),
        );

        // shift
        let c = (seed % 7) as f64 - 3.0;
        let shifted = u.map(|v| v + c);
        let pw_s = check_pointwise(&s, &shifted, &nu, SIGMA, None).map_err(err)?;
        ensure(to_json(&pw_s) == to_json(&pw), || {
            format!("seed {seed}: pointwise report changes under shift {c}")
        })?;
        if s.edges().is_some() {
            let a = total_variation(&s, &u, VariationMode::Graph).map_err(err)?;
            let b = total_variation(&s, &shifted, VariationMode::Graph).map_err(err)?;
            ensure(a == b, || {
                format!("seed {seed}: variation {a} vs {b} under shift")
            })?;
        }
        for (base, normalized) in [(&pc, false), (&pcn, true)] {
            let p = check_ball_poincare(&s, &shifted, &nu, ETA, normalized).map_err(err)?;
            for (x, y) in base.per_ball.iter().zip(&p.per_ball) {
                ensure(rel_err(x.constant, y.constant) <= TOL, || {
                    format!(
                        "seed {seed}: ball constant {} vs {} under shift",
                        x.constant, y.constant
                    )
                })?;
            }
            if let Some(w) = &p.worst_ball {
                let idx = p.per_ball.iter().position(|r| r == w).unwrap();
                ensure(
                    tie_aware(base.per_ball[idx].constant, base.minimal_constant, TOL),
                    || format!("seed {seed}: worst ball moves under shift"),
                )?;
            }
        }

        // scaling u: a power of two is exact, a generic factor is checked to tolerance
        let k = (seed % 5) as i32 - 2;
        for (t, exact) in [
            (-(2f64.powi(k)), true),
            (if seed % 2 == 0 { 1.37 } else { -0.61 }, false),
        ] {
            let su = u.map(|v| t * v);
            let p = check_pointwise(&s, &su, &nu, SIGMA, None).map_err(err)?;
            let q = check_ball_poincare(&s, &su, &nu, ETA, false).map_err(err)?;
            let want_c0 = t.abs() * pw.c0_minimal;
            let want_c = t.abs() * pc.minimal_constant;
            if exact {
                ensure(
                    p.c0_minimal == want_c0 && q.minimal_constant == want_c,
                    || format!("seed {seed}: scaling u by {t} not exact"),
                )?;
                ensure(
                    worst_pair(&p) == worst_pair(&pw) && worst_ball(&q) == worst_ball(&pc),
                    || format!("seed {seed}: witness moves under scaling by {t}"),
                )?;
            } else {
                let e = rel_err(p.c0_minimal, want_c0).max(rel_err(q.minimal_constant, want_c));
                worst_generic = worst_generic.max(e);
                ensure(e <= TOL, || {
                    format!("seed {seed}: scaling u by {t}: rel err {e}")
                })?;
                if let Some(w) = p.worst_pair {
                    ensure(
                        tie_aware(pair_ratio(&pw, &s, &u, w.x, w.y), pw.c0_minimal, TOL),
                        || format!("seed {seed}: worst pair moves under scaling by {t}"),
                    )?;
                }
                if let Some(w) = &q.worst_ball {
                    let idx = q.per_ball.iter().position(|r| r == w).unwrap();
                    ensure(
                        tie_aware(pc.per_ball[idx].constant, pc.minimal_constant, TOL),
                        || format!("seed {seed}: worst ball moves under scaling by {t}"),
                    )?;
                }
            }
        }

        // scaling ν
        let r_max = 0.5 * s.diameter();
        let m = maximal_function_measure(&s, &nu, r_max).map_err(err)?;
        for (t, exact) in [(2f64.powi(k), true), (3.3, false)] {
            let snu = nu.scaled(t);
            let p = check_pointwise(&s, &u, &snu, SIGMA, None).map_err(err)?;
            let sm = maximal_function_measure(&s, &snu, r_max).map_err(err)?;
            let want_c0 = pw.c0_minimal / t;
            if exact {
                ensure(p.c0_minimal == want_c0, || {
                    format!("seed {seed}: scaling nu by {t} not exact")
                })?;
                ensure(
                    sm.values().iter().zip(m.values()).all(|(a, b)| *a == t * b),
                    || format!("seed {seed}: maximal function not scaled by {t}"),
                )?;
                ensure(worst_pair(&p) == worst_pair(&pw), || {
                    format!("seed {seed}: worst pair moves")
                })?;
            } else {
                let e = sm
                    .values()
                    .iter()
                    .zip(m.values())
                    .map(|(a, b)| rel_err(*a, t * b))
                    .fold(rel_err(p.c0_minimal, want_c0), f64::max);
                worst_generic = worst_generic.max(e);
                ensure(e <= TOL, || {
                    format!("seed {seed}: scaling nu by {t}: rel err {e}")
                })?;
                if let Some(w) = p.worst_pair {
                    ensure(
                        tie_aware(pair_ratio(&pw, &s, &u, w.x, w.y), pw.c0_minimal, TOL),
                        || format!("seed {seed}: worst pair moves under nu scaling"),
                    )?;
                }
            }
        }
    }
    Ok(format!("100 triples invariant; power-of-two scalings exact, generic max rel err {worst_generic:.1e}"))
}

fn criterion_7(tr: &mut Transcript) -> Outcome {
    let mut cases: Vec<MetricMeasureSpace> = vec![
        two_point(),
        path_graph(9, 0.3),
        grid_graph(8),
        grid_graph_with(4, 7, 0.7),
    ];
    cases.extend((0..10).map(|seed| random_graph_space(seed, 10 + seed as usize, 5)));
    let mut checked = 0usize;
    for s in &cases {
        let n = s.n();
        let nu = {
            let mut m = random_measure(n as u64, n).masses().to_vec();
            m[0] += 1.0;
            PointMeasure::new(m).map_err(|e| e.to_string())?
        };
        let g = random_field(7, n).map(f64::abs);
        for c in [0.0, 0.3, -7.1, 1e6 / 3.0] {
            let u = ScalarField::constant(n, c);
            let err = |e: Error| format!("{} c = {c}: {e}", s.name());
            let mut zeros: Vec<(&str, f64)> = Vec::new();
            let modes: &[VariationMode] = if s.grid().is_some() {
                &[VariationMode::Graph, VariationMode::Grid]
            } else {
                &[VariationMode::Graph]
            };
            for &mode in modes {
                let vm = variation_measure(s, &u, mode).map_err(err)?;
                zeros.push(("variation", vm.total()));
                zeros.push((
                    "variation max",
                    vm.masses().iter().copied().fold(0.0, f64::max),
                ));
            }
            zeros.push((
                "pointwise",
                check_pointwise(s, &u, &nu, 1.5, None)
                    .map_err(err)?
                    .c0_minimal,
            ));
            zeros.push((
                "sobolev",
                check_sobolev_pointwise(s, &u, &g, 2.0, 1.5)
                    .map_err(err)?
                    .c0_minimal,
            ));
            for normalized in [false, true] {
                zeros.push((
                    "poincare",
                    check_ball_poincare(s, &u, &nu, 3.0, normalized)
                        .map_err(err)?
                        .minimal_constant,
                ));
            }
            let cert =
                poincare_from_pointwise(s, &u, &nu, 1.0, 1.0, &AuditSelection::All).map_err(err)?;
            ensure(cert.passed, || {
                format!("{} c = {c}: certificate fails", s.name())
            })?;
            zeros.push(("overall", cert.overall_constant));
            for t in &cert.traces {
                zeros.extend(t.levels.iter().map(|l| ("a_k", l.sup)));
                zeros.extend([
                    ("a_k0", t.a_k0),
                    ("level sum", t.level_sum),
                    ("final lhs", t.final_lhs),
                ]);
            }
            for (what, v) in &zeros {
                ensure(*v == 0.0 && v.is_sign_positive(), || {
                    format!("{} c = {c}: {what} = {v:e}", s.name())
                })?;
            }
            checked += zeros.len();
            tr.push("c7", &to_json(&cert.poincare.minimal_constant));
        }
    }
    Ok(format!(
        "{checked} values exactly 0 across {} spaces",
        cases.len()
    ))
}

fn run_all(tr: &mut Transcript) -> Vec<(usize, Outcome)> {
    let mut out = vec![
        (1, criterion_1(tr)),
        (2, criterion_2(tr)),
        (3, criterion_3(tr)),
    ];
    match grid_runs(tr) {
        Ok(runs) => {
            out.push((4, criterion_4(&runs)));
            out.push((5, criterion_5(&runs, tr)));
        }
        Err(e) => {
            out.push((4, Err(e.clone())));
            out.push((5, Err(e)));
        }
    }
    out.push((6, criterion_6(tr)));
    out.push((7, criterion_7(tr)));
    out
}

const NAMES: [&str; 8] = [
    "maximal operators match the dense-radius oracle",
    "weak-type estimate",
    "geodesic lemma sweep and small-ball bound",
    "end-to-end grids 8/16/32",
    "proof trace soundness, audit and mutants",
    "homogeneity and shift invariance",
    "trivial exactness for constant fields",
    "determinism at 1 and 8 threads",
];

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

fn main() {
    let start = Instant::now();
    let mut wide = Transcript::default();
    let results = pool(8).install(|| run_all(&mut wide));
    let mut failed = 0;
    for (i, outcome) in &results {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => {
                failed += 1;
                ("FAIL", d.clone())
            }
        };
        println!("[{tag}] criterion {i}: {}: {detail}", NAMES[i - 1]);
    }

    let mut narrow = Transcript::default();
    pool(1).install(|| run_all(&mut narrow));
    let identical = wide.0 == narrow.0;
    if !identical {
        failed += 1;
    }
    println!(
        "[{}] criterion 8: {}: {} transcript bytes {}",
        if identical { "PASS" } else { "FAIL" },
        NAMES[7],
        wide.0.len(),
        if identical { "identical" } else { "differ" }
    );
    println!(
        "acceptance: {} of 8 passed in {:.1}s",
        8 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
