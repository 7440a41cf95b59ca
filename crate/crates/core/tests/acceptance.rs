//! Acceptance suite: one PASS/FAIL line per criterion, exact integer
//! equality throughout, each criterion timed against its limit.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;

use common::*;
use dctk::conjugate::{SeparableConvex, UnivariateConvex};
use dctk::extint::{ExtInt, Fin, PlusInf};
use dctk::fixtures::{self, FixtureRng, PhiKind, PHI_KINDS};
use dctk::inverse::{self, InverseInstance};
use dctk::mconvex::{self, SupermodularFn};
use dctk::netflow::{self, FlowInstance, Variant};
use dctk::polyhedron::{self, DualWitness, LinearSystem, SearchStatus, Window};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e:?}"))
}

struct MCase {
    seed: u64,
    p: SupermodularFn,
    phi: SeparableConvex,
    kind: PhiKind,
}

fn mconvex_corpus() -> Vec<MCase> {
    (0..104u64)
        .map(|i| {
            let seed = 1000 + i;
            let mut r = fixtures::rng(seed);
            let n = 2 + (i as usize % 4);
            let kind = PHI_KINDS[(i as usize / 4) % 4];
            let p = fixtures::random_supermodular(&mut r, n, 5);
            let phi = fixtures::random_phi(&mut r, n, kind);
            MCase { seed, p, phi, kind }
        })
        .collect()
}

fn univariate_corpus() -> Vec<UnivariateConvex> {
    let mut r = fixtures::rng(1);
    (0..240).map(|_| fixtures::random_univariate(&mut r)).collect()
}

fn flow_corpus() -> Vec<FlowInstance> {
    (0..50u64).map(|i| fixtures::random_flow(&mut fixtures::rng(2000 + i), 4, 6, 3)).collect()
}

fn uncapacitated(inst: &FlowInstance) -> FlowInstance {
    let mut u = inst.clone();
    u.upper = vec![PlusInf; u.num_arcs()];
    u
}

fn criterion_1() -> Outcome {
    let corpus = univariate_corpus();
    let mut closed = 0;
    for (i, f) in corpus.iter().enumerate() {
        for ell in -12..=12 {
            let want = conj_scan(f, ell, -8, 8);
            let got = ok(f.conjugate_eval(ell), "conjugate_eval")?;
            ensure!(got == want, "instance {i} ({f:?}) at ℓ={ell}: conjugate_eval {got} vs scan {want}");
            match f.conjugate_closed(ell) {
                Ok(c) => {
                    ensure!(c == want, "instance {i} ({f:?}) at ℓ={ell}: conjugate_closed {c} vs scan {want}");
                    closed += 1;
                }
                Err(dctk::Error::UnsupportedForm) => {}
                Err(e) => return Err(format!("instance {i}: conjugate_closed error {e:?}")),
            }
        }
        // biconjugate over a slope range wide enough to reach every subgradient
        let (smin, smax) = slope_range(f, -8, 8);
        let (lo, hi) = f.domain().unwrap();
        for k in lo.finite().unwrap()..=hi.finite().unwrap() {
            let mut best = None::<i128>;
            for ell in smin - 1..=smax + 1 {
                let c = ok(f.conjugate_eval(ell), "conjugate_eval")?.finite().unwrap();
                best = Some(best.map_or(k * ell - c, |b: i128| b.max(k * ell - c)));
            }
            ensure!(Fin(best.unwrap()) == f.eval(k).unwrap(), "instance {i}: biconjugate differs at k={k}");
        }
    }
    Ok(format!("{} functions × 25 values of ℓ; {closed} closed-form comparisons", corpus.len()))
}

fn criterion_2() -> Outcome {
    let corpus = univariate_corpus();
    let mut pairs = 0;
    for (i, f) in corpus.iter().enumerate() {
        let (lo, hi) = f.domain().unwrap();
        for k in lo.finite().unwrap()..=hi.finite().unwrap() {
            for ell in -12..=12 {
                let (fit, _) = ok(f.is_fitting(k, ell), "is_fitting")?;
                let eq = f.eval(k).unwrap().add(conj_scan(f, ell, -8, 8)).unwrap() == Fin(k * ell);
                ensure!(fit == eq, "instance {i} at (k*,ℓ*)=({k},{ell}): fitting {fit}, equality {eq}");
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} (k*, ℓ*) pairs"))
}

fn criterion_3() -> Outcome {
    let corpus = mconvex_corpus();
    let mut square = 0;
    for c in &corpus {
        let pts = base_points(&c.p);
        let (want, _) = min_over(&pts, &c.phi).ok_or(format!("seed {}: empty base", c.seed))?;
        let z = ok(mconvex::minimize_separable(&c.p, &c.phi), "minimize_separable")?;
        ensure!(in_base(&c.p, &z), "seed {}: descent left the base polyhedron", c.seed);
        let got = c.phi.eval(&z).unwrap();
        ensure!(got == want, "seed {}: descent value {got} vs brute force {want}", c.seed);
        let cert = ok(mconvex::dual_certificate(&c.p, &c.phi, &z), "dual_certificate")?;
        let rep = ok(mconvex::verify_mconvex_optimality(&c.p, &c.phi, &z, &cert.w), "verify")
            .map_err(|e| format!("seed {}: {e}", c.seed))?;
        ensure!(rep.equality && rep.dual_value == want, "seed {}: min-max values {} vs {}", c.seed, rep.primal_value, rep.dual_value);
        if c.kind == PhiKind::SquareSum {
            // p̂(w*) by brute force, minus Σ⌊w/2⌋⌈w/2⌉
            let expr = min_linear(&pts, &cert.w) - half_products(&cert.w);
            ensure!(Fin(expr) == want, "seed {}: square-sum expression {expr} vs {want}", c.seed);
            square += 1;
        }
    }
    Ok(format!("{} instances (n = 2..5), {square} square-sum specializations", corpus.len()))
}

fn criterion_4() -> Outcome {
    let corpus = mconvex_corpus();
    let mut checks = 0;
    for c in &corpus {
        let pts = base_points(&c.p);
        let mut r = fixtures::rng(c.seed ^ 0xabcd);
        let n = c.p.n();
        for _ in 0..20 {
            let w: Vec<i128> = (0..n).map(|_| r.gen_range(-4..=4)).collect();
            let z = ok(mconvex::greedy_min(&c.p, &w), "greedy_min")?;
            let lov = ok(mconvex::lovasz_extension(&c.p, &w), "lovasz_extension")?;
            let brute = min_linear(&pts, &w);
            ensure!(in_base(&c.p, &z), "seed {}: greedy base infeasible for w={w:?}", c.seed);
            ensure!(
                Fin(dotp(&w, &z)) == lov && lov == Fin(brute),
                "seed {} w={w:?}: w·greedy {}, p̂ {lov}, brute {brute}",
                c.seed,
                dotp(&w, &z)
            );
            for top in mconvex::strict_top_sets(&w) {
                let sum: i128 = (0..n).filter(|s| top >> s & 1 == 1).map(|s| z[s]).sum();
                ensure!(c.p.p(top) == Fin(sum), "seed {} w={w:?}: top set {top:#b} not tight", c.seed);
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} (p, w) pairs"))
}

fn same_total(r: &mut FixtureRng, n: usize, total: i128) -> SupermodularFn {
    let p = fixtures::random_supermodular(r, n, 2);
    let full = (1usize << n) - 1;
    let shift = total - p.p(full).finite().unwrap();
    // adding a modular term keeps supermodularity
    let table: Vec<i128> = (0..=full).map(|x| p.p(x).finite().unwrap() + if x & 1 == 1 { shift } else { 0 }).collect();
    SupermodularFn::from_finite(n, &table).unwrap()
}

fn criterion_5() -> Outcome {
    // |p| ≤ 2 keeps every optimal split inside the ±3 window
    let kinds = [PhiKind::SquareSum, PhiKind::L1Deviation];
    let mut done = 0;
    let mut seed = 3000u64;
    let mut square = 0;
    while done < 30 {
        seed += 1;
        let mut r = fixtures::rng(seed);
        let n = 2 + (done % 3);
        let p1 = fixtures::random_supermodular(&mut r, n, 2);
        let p2 = same_total(&mut r, n, p1.p((1 << n) - 1).finite().unwrap());
        let common: Vec<Vec<i128>> = base_points(&p1).into_iter().filter(|z| in_base(&p2, z)).collect();
        if common.is_empty() {
            continue;
        }
        let kind = kinds[done % 2];
        let phi = fixtures::random_phi(&mut r, n, kind);
        let (want, _) = min_over(&common, &phi).unwrap();
        let w = Window::uniform(n, -3, 3).unwrap();
        let rep = ok(mconvex::m2_minimize_and_split(&p1, &p2, &phi, &w), "m2_minimize_and_split")?;
        ensure!(rep.report.primal_value == want, "seed {seed}: primal {} vs brute {want}", rep.report.primal_value);
        ensure!(rep.report.equality, "seed {seed}: dual {} vs primal {want}", rep.report.dual_value);
        if kind == PhiKind::SquareSum {
            let DualWitness::Split(w1, w2) = &rep.report.dual_witness else { return Err("no split".into()) };
            let sum: Vec<i128> = w1.iter().zip(w2).map(|(a, b)| a + b).collect();
            let expr = min_linear(&base_points(&p1), w1) + min_linear(&base_points(&p2), w2) - half_products(&sum);
            ensure!(Fin(expr) == want && rep.square_sum_value == Some(want), "seed {seed}: square-sum expression {expr}");
            square += 1;
        }
        done += 1;
    }
    Ok(format!("{done} pairs (n = 2..4, |p| ≤ 2, window ±3), {square} square-sum"))
}

fn criterion_6() -> Outcome {
    let corpus = flow_corpus();
    let mut embedded = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let (want, _) = min_over(&flow_points(inst, 3), &inst.cost).ok_or(format!("flow {i}: infeasible corpus instance"))?;
        let sol = ok(netflow::min_convex_cost_flow(inst), "min_convex_cost_flow")?;
        ensure!(inst.is_feasible(&sol.x).unwrap(), "flow {i}: solver flow violates conservation or bounds");
        ensure!(sol.value == want, "flow {i}: solver {} vs enumeration {want}", sol.value);
        // uncapacitated version: Theorem-level duality with potentials
        let free = uncapacitated(inst);
        let cap = total_supply(&free);
        let (want_u, _) = min_over(&flow_points(&free, cap), &free.cost).unwrap();
        let sol_u = ok(netflow::min_convex_cost_flow(&free), "min_convex_cost_flow")?;
        ensure!(sol_u.value == want_u, "flow {i} uncapacitated: solver {} vs enumeration {want_u}", sol_u.value);
        ensure!(sol_u.pi.iter().all(|&p| p >= 0), "flow {i}: negative shifted potential");
        let dual = ok(netflow::flow_dual_value(&free.digraph, &free.m, &sol_u.pi, Variant::Nonneg), "flow_dual_value")?;
        ensure!(dual == want_u, "flow {i}: potential gives {dual} vs primal {want_u}");
        ok(netflow::certify_flow_square_sum(&free, &sol_u.x, &sol_u.pi), "certify")?;
        if embedded < 5 && free.num_arcs() >= 2 {
            let sys = ok(netflow::embedding_system(&free.digraph, &free.m), "embedding")?;
            let b = 2 * sol_u.x.iter().copied().max().unwrap_or(0) + 2;
            let rep = ok(polyhedron::dual_search_bruteforce(&sys, &free.cost, b.max(6)), "dual_search")?;
            ensure!(rep.dual_value == want_u, "flow {i}: embedding dual {} vs {want_u}", rep.dual_value);
            embedded += 1;
        }
    }
    ensure!(embedded >= 5, "only {embedded} embeddings checked");
    Ok(format!("{} capacitated + {} uncapacitated instances, {embedded} embeddings", corpus.len(), corpus.len()))
}

/// A system with objective and a primal window containing its minimizers.
struct BoxCase {
    name: String,
    sys: LinearSystem,
    phi: SeparableConvex,
    win: Window,
}

fn box_tdi_corpus() -> Vec<BoxCase> {
    let mut out = Vec::new();
    for c in mconvex_corpus() {
        let win = c.p.base_window().unwrap().unwrap();
        out.push(BoxCase { name: format!("base seed {}", c.seed), sys: mconvex::to_system(&c.p).unwrap(), phi: c.phi, win });
    }
    for (i, inst) in flow_corpus().into_iter().enumerate() {
        let sys = netflow::flow_system(&inst).unwrap();
        let hi: Vec<i128> = inst.upper.iter().map(|g| g.finite().unwrap()).collect();
        let win = Window::new(vec![0; hi.len()], hi).unwrap();
        out.push(BoxCase { name: format!("flow {i}"), sys, phi: inst.cost.clone(), win });
        let free = uncapacitated(&inst);
        let sys = netflow::flow_system(&free).unwrap();
        let win = Window::uniform(free.num_arcs(), 0, total_supply(&free)).unwrap();
        out.push(BoxCase { name: format!("flow {i} uncapacitated"), sys, phi: free.cost, win });
    }
    out
}

fn criterion_7() -> Outcome {
    let corpus = box_tdi_corpus();
    let mut beyond = Vec::new();
    for c in &corpus {
        let prim = ok(polyhedron::minimize_bruteforce(&c.sys, &c.phi, &c.win), "minimize_bruteforce")?;
        let dual = ok(polyhedron::dual_search_bruteforce(&c.sys, &c.phi, polyhedron::DEFAULT_Y_BOUND), "dual_search")?;
        let wwin = Window::uniform(c.sys.n(), -polyhedron::DEFAULT_W_RADIUS, polyhedron::DEFAULT_W_RADIUS).unwrap();
        let mu = ok(polyhedron::mu_form_dual_search(&c.sys, &c.phi, &wwin), "mu_form_dual_search")?;
        ensure!(prim.primal_value >= dual.dual_value && prim.primal_value >= mu.dual_value, "{}: weak duality fails", c.name);
        let rows_gap = dual.status != SearchStatus::Exact || dual.dual_value != prim.primal_value;
        if prim.primal_value != mu.dual_value || rows_gap {
            // the μ-form scan is exhaustive, so its gap must close once the window is widened
            let radius = (8..=32)
                .step_by(4)
                .find(|&r| {
                    let w = Window::uniform(c.sys.n(), -r, r).unwrap();
                    polyhedron::mu_form_dual_search(&c.sys, &c.phi, &w).unwrap().dual_value == prim.primal_value
                })
                .ok_or(format!("{}: primal {} / μ dual {} even at ±32", c.name, prim.primal_value, mu.dual_value))?;
            let rows = match dual.status {
                SearchStatus::Exact if rows_gap => format!("rows max {}", dual.dual_value),
                SearchStatus::Exact => "rows ok".to_string(),
                _ => "rows inconclusive".to_string(),
            };
            let muw = if prim.primal_value == mu.dual_value { "μ ok".to_string() } else { format!("μ max {}", mu.dual_value) };
            beyond.push(format!("{} [primal {}, {rows}, {muw}, μ closes at ±{radius}]", c.name, prim.primal_value));
            continue;
        }
        let z = prim.primal_witness.clone().unwrap();
        let DualWitness::Rows(y) = &dual.dual_witness else { return Err(format!("{}: no multipliers", c.name)) };
        let cert = ok(polyhedron::verify_certificate(&c.sys, &z, y, &c.phi), &c.name)?;
        ensure!(cert.equality, "{}: certificate values differ", c.name);
        ensure!(dual.support_within_bound == Some(true), "{}: no maximizer with support ≤ 2|S| found", c.name);
    }
    ensure!(
        beyond.is_empty(),
        "{} of {} systems have no optimal dual within the default bounds y ≤ {}, w ∈ ±{}; per system: {}",
        beyond.len(),
        corpus.len(),
        polyhedron::DEFAULT_Y_BOUND,
        polyhedron::DEFAULT_W_RADIUS,
        beyond.join(", ")
    );
    Ok(format!("{} systems (base polyhedra and flows)", corpus.len()))
}

fn random_ext_bounds(r: &mut FixtureRng, n: usize) -> (Vec<ExtInt>, Vec<ExtInt>) {
    let mut l = Vec::new();
    let mut u = Vec::new();
    for _ in 0..n {
        let a = r.gen_range(-4..=4i128);
        let b = r.gen_range(a..=4);
        l.push(Fin(a));
        u.push(Fin(b));
    }
    (l, u)
}

fn criterion_8() -> Outcome {
    let corpus = box_tdi_corpus();
    let mut r = fixtures::rng(4000);
    let mut triples = 0;
    let mut feasible = 0;
    let mut i = 0usize;
    while triples < 120 {
        let c = &corpus[(i * 7) % corpus.len()];
        i += 1;
        let pts = system_points(&c.sys, &c.win.lo, &c.win.hi);
        if pts.is_empty() || c.sys.n() > 5 {
            continue;
        }
        let z = pts[r.gen_range(0..pts.len())].clone();
        let (l, u) = random_ext_bounds(&mut r, c.sys.n());
        let (cond, _) = ok(polyhedron::feasibility_condition(&c.sys, &z, &l, &u), "feasibility_condition")?;
        let wwin = Window::uniform(c.sys.n(), -6, 6).unwrap();
        let found = ok(polyhedron::find_weight_in_box(&c.sys, &z, &l, &u, &wwin), "find_weight_in_box")?;
        ensure!(cond == found.is_some(), "{} z*={z:?} ℓ={l:?} u={u:?}: condition {cond}, weight {found:?}", c.name);
        feasible += usize::from(cond);
        triples += 1;
    }
    Ok(format!("{triples} triples ({feasible} feasible)"))
}

fn inverse_case(r: &mut FixtureRng, k: usize, weighted: bool) -> Option<(InverseInstance, LinearSystem, Vec<i128>)> {
    let n = r.gen_range(2..=4);
    let p = fixtures::random_supermodular(r, n, 3);
    let sys = mconvex::to_system(&p).unwrap();
    let pts = base_points(&p);
    let targets: Vec<Vec<i128>> = (0..k).map(|_| pts[r.gen_range(0..pts.len())].clone()).collect();
    let w0: Vec<i128> = (0..n).map(|_| r.gen_range(-3..=3)).collect();
    let deviation = if weighted {
        let c1: Vec<i128> = (0..n).map(|_| r.gen_range(1..=3)).collect();
        let c2: Vec<i128> = (0..n).map(|_| r.gen_range(1..=3)).collect();
        inverse::weighted_l1_deviation(&w0, &c1, &c2)
    } else {
        inverse::l1_deviation(&w0)
    };
    let inst = InverseInstance { parent: sys, targets, deviation };
    let (dsys, z0) = inst.reduced().ok()?;
    Some((inst, dsys, z0))
}

fn check_inverse(inst: &InverseInstance, dsys: &LinearSystem, z0: &[i128], label: &str) -> Result<ExtInt, String> {
    let n = z0.len();
    let wwin = Window::uniform(n, -6, 6).unwrap();
    let sol = ok(inverse::inverse_minimize(inst, &wwin), "inverse_minimize").map_err(|e| format!("{label}: {e}"))?;
    let cone = ok(inverse::tangent_cone(dsys, z0), "tangent_cone")?;
    let zwin = ok(inverse::default_z_window(&inst.deviation), "default_z_window")?;
    let rep = ok(inverse::inverse_dual_search(&cone, &inst.deviation, &zwin, Some(&sol.w)), "inverse_dual_search")?;
    ensure!(
        rep.report.dual_value == sol.value && rep.report.equality,
        "{label}: primal {} at {:?}, dual {}",
        sol.value,
        sol.w,
        rep.report.dual_value
    );
    ensure!(rep.orthogonal == Some(true) && rep.fitting == Some(true), "{label}: orthogonality/fitting certificate fails");
    Ok(sol.value)
}

fn criterion_9() -> Outcome {
    let mut r = fixtures::rng(5000);
    let (mut single, mut multi) = (0, 0);
    while single < 50 {
        let Some((inst, dsys, z0)) = inverse_case(&mut r, 1, single % 2 == 1) else { continue };
        check_inverse(&inst, &dsys, &z0, &format!("single {single}"))?;
        single += 1;
    }
    while multi < 20 {
        let k = 2 + multi % 2;
        let Some((inst, dsys, z0)) = inverse_case(&mut r, k, multi % 2 == 0) else { continue };
        check_inverse(&inst, &dsys, &z0, &format!("multi {multi}"))?;
        // each target is a w*-minimizer of the parent
        let sol = inverse::inverse_minimize(&inst, &Window::uniform(z0.len(), -6, 6).unwrap()).unwrap();
        for t in &inst.targets {
            ensure!(inverse::is_minimizer(&inst.parent, t, &sol.w).unwrap(), "multi {multi}: target not optimal for w*");
        }
        multi += 1;
    }
    let p2 = InverseInstance {
        parent: fixtures::p2sys(),
        targets: vec![vec![2, 0]],
        deviation: inverse::l1_deviation(&[3, 1]),
    };
    let v = check_inverse(&p2, &fixtures::p2sys(), &[2, 0], "worked example")?;
    ensure!(v == Fin(2), "worked example gives {v}");
    Ok(format!("{single} single-target, {multi} multi-target, worked example value 2"))
}

fn criterion_10() -> Outcome {
    let mut systems = 0;
    for c in mconvex_corpus() {
        let base = mconvex::to_system(&c.p).unwrap();
        let win = c.p.base_window().unwrap().unwrap();
        for k in 1..=3 {
            let sys = polyhedron::dilation(&base, k).unwrap();
            let kwin = Window::new(win.lo.iter().map(|v| v * k).collect(), win.hi.iter().map(|v| v * k).collect()).unwrap();
            let (pass, witness) = ok(polyhedron::probe_box_integer(&sys, &kwin), "probe_box_integer")?;
            ensure!(pass, "seed {} k={k}: fractional vertex {witness:?}", c.seed);
            systems += 1;
        }
    }
    Ok(format!("{systems} systems (base polyhedra × dilations 1..3)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("1 conjugate oracle suite", criterion_1, 10),
        ("2 fitting iff conjugate equality", criterion_2, 10),
        ("3 M-convex strong duality", criterion_3, 60),
        ("4 greedy / Lovász agreement", criterion_4, 30),
        ("5 M2 duality and square-sum split", criterion_5, 60),
        ("6 flow suite", criterion_6, 60),
        ("7 general box-TDI min-max", criterion_7, 120),
        ("8 feasibility equivalence", criterion_8, 60),
        ("9 inverse suite", criterion_9, 60),
        ("10 box-integrality probe", criterion_10, 60),
    ];
    let only: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (name, f, limit) in criteria {
        if only.as_deref().is_some_and(|o| !name.starts_with(&format!("{o} "))) {
            continue;
        }
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let res = match res {
            Ok(msg) if took > Duration::from_secs(limit) => Err(format!("{msg}; exceeded {limit} s")),
            other => other,
        };
        match res {
            Ok(msg) => println!("criterion {name}: PASS ({msg}; {:.2} s)", took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({msg}; {:.2} s)", took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
