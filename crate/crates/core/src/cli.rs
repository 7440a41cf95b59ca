//! The `dctk` command-line front end.
//!
//! Every command prints one line of canonical JSON and maps its outcome to
//! an exit code: 0 OK, 2 infeasible, 3 unbounded, 4 invalid input,
//! 5 criteria violated, 6 inconclusive.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::conjugate::{SeparableConvex, UnivariateConvex};
use crate::error::Error;
use crate::extint::{ExtInt, Fin, MinusInf, PlusInf};
use crate::fixtures;
use crate::inverse::{self, InverseInstance};
use crate::io::{self, ext_json, int_json, ints_json};
use crate::mconvex::{self, SupermodularFn};
use crate::netflow::{self, FlowInstance, Variant};
use crate::polyhedron::{self, LinearSystem, SearchStatus, Window};
use crate::rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;
pub const EXIT_INVALID: i32 = 4;
pub const EXIT_VIOLATED: i32 = 5;
pub const EXIT_INCONCLUSIVE: i32 = 6;

#[derive(Parser, Debug)]
#[command(name = "dctk", version, about = "Separable discrete convex minimization with exact min-max certificates")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the JSON output to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the discrete conjugate of a univariate function.
    Conjugate(Opts),
    /// Minimize and report the min-max certificate.
    Minimize {
        subject: Subject,
        #[command(flatten)]
        opts: Opts,
    },
    /// Check a supplied primal/dual pair.
    Certify {
        subject: Subject,
        #[command(flatten)]
        opts: Opts,
    },
    /// Least-deviation cost that makes the targets optimal.
    Inverse(Opts),
    /// Search integral boxes for a fractional vertex.
    Probe {
        subject: Subject,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run the bundled fixtures through all equality checks.
    Selftest(Opts),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Subject {
    Mconvex,
    M2,
    Flow,
    Boxtdi,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VariantArg {
    Nonneg,
    Free,
}

/// Flags shared by all commands. JSON arguments are inline JSON or a path.
#[derive(Args, Debug, Default)]
struct Opts {
    /// Instance: supermodular function, {"p1","p2"} pair, flow, or inverse instance.
    #[arg(long)]
    instance: Option<String>,
    /// Linear system (boxtdi, inverse).
    #[arg(long)]
    system: Option<String>,
    /// Objective: univariate (conjugate) or separable function.
    #[arg(long)]
    phi: Option<String>,
    /// Deviation function of an inverse problem.
    #[arg(long)]
    deviation: Option<String>,
    /// Primal window LO..HI, per element l..h,l..h, or ±K.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Bound on row multipliers in the dual search
    #[arg(long)]
    y_bound: Option<i128>,
    /// Cost window ±K or LO..HI.
    #[arg(long, allow_hyphen_values = true)]
    w_window: Option<String>,
    /// Seed of the random fixtures.
    #[arg(long)]
    seed: Option<u64>,
    /// Flow bounds: nonneg = [0,+inf], free = [-inf,+inf].
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Slope at which to evaluate the conjugate
    #[arg(long, allow_hyphen_values = true)]
    ell: Option<i128>,
    /// Point k for a fitting check (conjugate).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i128>,
    /// Target point; repeat for several targets.
    #[arg(long, allow_hyphen_values = true)]
    target: Vec<String>,
    /// Primal point to certify.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Dual cost vector to certify (mconvex).
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<String>,
    /// Row multipliers to certify (boxtdi).
    #[arg(long, allow_hyphen_values = true)]
    multipliers: Option<String>,
    /// Flow to certify.
    #[arg(long, allow_hyphen_values = true)]
    flow: Option<String>,
    /// Node potential to certify.
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
    /// Dilation factor (probe).
    #[arg(long)]
    dilation: Option<i128>,
}

/// Final output of a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub json: Value,
}

impl Outcome {
    fn new(code: i32, json: Value) -> Self {
        Outcome { code, json }
    }

    fn status(status: &str, mut json: Value) -> Self {
        let code = match status {
            "OK" => EXIT_OK,
            "INFEASIBLE" => EXIT_INFEASIBLE,
            "UNBOUNDED" => EXIT_UNBOUNDED,
            "CRITERIA_VIOLATED" => EXIT_VIOLATED,
            "INCONCLUSIVE" => EXIT_INCONCLUSIVE,
            _ => EXIT_INVALID,
        };
        json["status"] = json!(status);
        Outcome { code, json }
    }
}

type CmdResult = Result<Outcome, Error>;

/// Runs the command line and returns the exit code; JSON goes to stdout,
/// usage errors to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = thread_count() {
        eprintln!("{msg}");
        return EXIT_INVALID;
    }
    let out = execute(&cli);
    let text = io::canonical(&out.json);
    println!("{text}");
    if let Some(path) = &cli.json_out {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            eprintln!("cannot write {}: {e}", path.display());
            return EXIT_INVALID;
        }
    }
    out.code
}

/// `DCTK_THREADS`: a positive integer, default 1. Scans are sequential, so
/// the value only has to be valid.
fn thread_count() -> Result<usize, String> {
    match std::env::var("DCTK_THREADS") {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("DCTK_THREADS must be a positive integer, got \"{s}\"")),
        },
    }
}

/// Parses and executes a command line without printing.
pub fn execute_args<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => execute(&cli),
        Err(e) => Outcome::status("INVALID_INPUT", json!({"error": e.to_string()})),
    }
}

fn execute(cli: &Cli) -> Outcome {
    let res = match &cli.command {
        Command::Conjugate(o) => conjugate_cmd(o),
        Command::Minimize { subject, opts } => match subject {
            Subject::Mconvex => minimize_mconvex(opts),
            Subject::M2 => minimize_m2(opts),
            Subject::Flow => minimize_flow(opts),
            Subject::Boxtdi => minimize_boxtdi(opts),
        },
        Command::Certify { subject, opts } => match subject {
            Subject::Mconvex => certify_mconvex(opts),
            Subject::Flow => certify_flow(opts),
            Subject::Boxtdi => certify_boxtdi(opts),
            Subject::M2 => Err(Error::InvalidInput("certify supports mconvex, flow and boxtdi".into())),
        },
        Command::Inverse(o) => inverse_cmd(o),
        Command::Probe { subject, opts } => match subject {
            Subject::Boxtdi => probe_cmd(opts),
            _ => Err(Error::InvalidInput("probe supports boxtdi only".into())),
        },
        Command::Selftest(o) => Ok(selftest(o.seed)),
    };
    res.unwrap_or_else(error_outcome)
}

fn error_outcome(e: Error) -> Outcome {
    let status = match e {
        Error::Infeasible | Error::NotFeasible | Error::EmptyIntersection | Error::NoFeasibleWeight => "INFEASIBLE",
        Error::Unbounded => "UNBOUNDED",
        Error::CriteriaViolated(_) | Error::ValueMismatch { .. } | Error::NotPrimalFeasible | Error::NotSignFeasible(_) => {
            "CRITERIA_VIOLATED"
        }
        _ => "INVALID_INPUT",
    };
    Outcome::status(status, json!({"error": e.to_string()}))
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Inline JSON (starting with `{`, `[` or a digit/sign) or a file path.
fn load(arg: &str) -> Result<Value, Error> {
    let t = arg.trim();
    if t.starts_with(['{', '[', '-', '"']) || t.starts_with(|c: char| c.is_ascii_digit()) {
        return io::parse_json_text(t);
    }
    let text = std::fs::read_to_string(t).map_err(|e| bad(format!("cannot read {t}: {e}")))?;
    io::parse_json_text(&text)
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, Error> {
    v.as_deref().ok_or_else(|| bad(format!("--{flag} is required")))
}

/// A vector given as JSON `[1,2]` or as `1,2`.
fn vector(arg: &str) -> Result<Vec<i128>, Error> {
    let t = arg.trim();
    if t.starts_with('[') {
        return io::parse_ints(&io::parse_json_text(t)?);
    }
    t.split(',').map(|s| s.trim().parse::<i128>().map_err(|_| bad(format!("bad integer \"{s}\"")))).collect()
}

fn separable(arg: Option<&str>, n: usize, names: &[String]) -> Result<SeparableConvex, Error> {
    let f = match arg {
        None => {
            let mut f = SeparableConvex::square_sum(n);
            f.names = names.to_vec();
            f
        }
        Some(a) => io::separable_from_json(&load(a)?, Some(names))?,
    };
    if f.len() != n {
        return Err(bad(format!("objective has {} parts for {n} elements", f.len())));
    }
    Ok(f)
}

fn w_window(o: &Opts, n: usize) -> Result<Window, Error> {
    match &o.w_window {
        Some(s) => io::parse_window_spec(s, n),
        None => Window::uniform(n, -polyhedron::DEFAULT_W_RADIUS, polyhedron::DEFAULT_W_RADIUS),
    }
}

fn report_status(rep: &polyhedron::MinMaxReport) -> &'static str {
    if rep.equality {
        "OK"
    } else {
        // a bounded search that did not certify equality
        "INCONCLUSIVE"
    }
}

fn numbered(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn conjugate_cmd(o: &Opts) -> CmdResult {
    let f: UnivariateConvex = io::univariate_from_json(&load(need(&o.phi, "phi")?)?)?;
    let ell = o.ell.ok_or_else(|| bad("--ell is required"))?;
    let value = f.conjugate_eval(ell)?;
    let mut out = json!({"value": ext_json(value)});
    if let Some(k) = o.k {
        let (fit, w) = f.is_fitting(k, ell)?;
        out["fitting"] = json!(fit);
        out["slopes"] = json!([ext_json(w.lower), ext_json(w.upper)]);
    }
    Ok(Outcome::new(EXIT_OK, out))
}

fn supermodular(o: &Opts) -> Result<SupermodularFn, Error> {
    io::supermodular_from_json(&load(need(&o.instance, "instance")?)?)
}

fn minimize_mconvex(o: &Opts) -> CmdResult {
    let p = supermodular(o)?;
    let phi = separable(o.phi.as_deref(), p.n(), &numbered(p.n()))?;
    let z = mconvex::minimize_separable(&p, &phi)?;
    let cert = mconvex::dual_certificate(&p, &phi, &z)?;
    let rep = mconvex::verify_mconvex_optimality(&p, &phi, &z, &cert.w)?;
    let out = json!({
        "value": ext_json(rep.primal_value),
        "witness": ints_json(&z),
        "dual": mconvex::certificate_json(&cert),
        "report": io::report_to_json(&rep),
    });
    Ok(Outcome::status(report_status(&rep), out))
}

fn minimize_m2(o: &Opts) -> CmdResult {
    let inst = load(need(&o.instance, "instance")?)?;
    let p1 = io::supermodular_from_json(inst.get("p1").ok_or_else(|| bad("instance needs \"p1\""))?)?;
    let p2 = io::supermodular_from_json(inst.get("p2").ok_or_else(|| bad("instance needs \"p2\""))?)?;
    let phi = separable(o.phi.as_deref(), p1.n(), &numbered(p1.n()))?;
    let win = w_window(o, p1.n())?;
    let rep = mconvex::m2_minimize_and_split(&p1, &p2, &phi, &win)?;
    let out = json!({
        "value": ext_json(rep.report.primal_value),
        "witness": rep.report.primal_witness.as_deref().map(ints_json),
        "square_sum_value": rep.square_sum_value.map(ext_json),
        "report": io::report_to_json(&rep.report),
    });
    Ok(Outcome::status(report_status(&rep.report), out))
}

fn flow_instance(o: &Opts) -> Result<FlowInstance, Error> {
    let mut inst = io::flow_from_json(&load(need(&o.instance, "instance")?)?)?;
    if let Some(v) = o.variant {
        let na = inst.num_arcs();
        inst.lower = vec![if v == VariantArg::Nonneg { Fin(0) } else { MinusInf }; na];
        inst.upper = vec![PlusInf; na];
        inst = FlowInstance::new(inst.digraph, inst.m, inst.lower, inst.upper, inst.cost)?;
    }
    Ok(inst)
}

fn node_names(inst: &FlowInstance, set: &[usize]) -> Value {
    json!(set.iter().map(|&v| inst.digraph.nodes[v].clone()).collect::<Vec<_>>())
}

fn minimize_flow(o: &Opts) -> CmdResult {
    let inst = flow_instance(o)?;
    let nonneg_uncapacitated =
        inst.lower.iter().all(|&l| l == Fin(0)) && inst.upper.iter().all(|&u| u == PlusInf);
    if nonneg_uncapacitated {
        let (ok, witness) = netflow::hoffman_feasible(&inst.digraph, &inst.m)?;
        if !ok {
            let set = witness.unwrap_or_default();
            return Ok(Outcome::status(
                "INFEASIBLE",
                json!({"witness_set": node_names(&inst, &set), "reason": "no arc leaves the set and its demand is negative"}),
            ));
        }
    }
    let sol = netflow::min_convex_cost_flow(&inst)?;
    let mut out = json!({
        "value": ext_json(sol.value),
        "flow": ints_json(&sol.x),
        "potential": ints_json(&sol.pi),
        "tension": ints_json(&netflow::tension(&inst.digraph, &sol.pi)?),
    });
    if mconvex::is_square_sum(&inst.cost) && netflow::variant_of(&inst).is_ok() {
        let rep = netflow::certify_flow_square_sum(&inst, &sol.x, &sol.pi)?;
        out["dual_value"] = ext_json(rep.dual_value);
        out["verified"] = json!(rep.equality);
    }
    Ok(Outcome::status("OK", out))
}

fn system(o: &Opts) -> Result<LinearSystem, Error> {
    io::system_from_json(&load(need(&o.system, "system")?)?)
}

fn primal_window(o: &Opts, sys: &LinearSystem, phi: &SeparableConvex) -> Result<Window, Error> {
    match &o.window {
        Some(s) => io::parse_window_spec(s, sys.n()),
        None => {
            let vrep = polyhedron::VRep::new(sys)?;
            polyhedron::primal_window(sys, &vrep, phi)?.ok_or(Error::Infeasible)
        }
    }
}

fn minimize_boxtdi(o: &Opts) -> CmdResult {
    let sys = system(o)?;
    let phi = separable(o.phi.as_deref(), sys.n(), &sys.elements)?;
    let win = primal_window(o, &sys, &phi)?;
    let prim = polyhedron::minimize_bruteforce(&sys, &phi, &win)?;
    if prim.primal_witness.is_none() {
        return Ok(Outcome::status("INFEASIBLE", json!({"primal": io::report_to_json(&prim)})));
    }
    let y_bound = o.y_bound.unwrap_or(polyhedron::DEFAULT_Y_BOUND);
    let opts = polyhedron::DualSearchOptions {
        y_bound,
        primal_hints: vec![prim.primal_witness.clone().unwrap()],
        node_budget: polyhedron::DEFAULT_NODE_BUDGET,
    };
    let dual = polyhedron::dual_search_with(&sys, &phi, &opts)?;
    let mu = polyhedron::mu_form_dual_search(&sys, &phi, &w_window(o, sys.n())?)?;
    let equal = dual.dual_value == prim.primal_value && mu.dual_value == prim.primal_value;
    let out = json!({
        "value": ext_json(prim.primal_value),
        "witness": prim.primal_witness.as_deref().map(ints_json),
        "primal": io::report_to_json(&prim),
        "dual": io::report_to_json(&dual),
        "mu_form": io::report_to_json(&mu),
        "verified": equal,
    });
    Ok(Outcome::status(if equal { "OK" } else { "INCONCLUSIVE" }, out))
}

fn certify_mconvex(o: &Opts) -> CmdResult {
    let p = supermodular(o)?;
    let phi = separable(o.phi.as_deref(), p.n(), &numbered(p.n()))?;
    let z = vector(need(&o.point, "point")?)?;
    let w = vector(need(&o.weight, "weight")?)?;
    let rep = mconvex::verify_mconvex_optimality(&p, &phi, &z, &w)?;
    let status = if rep.equality { "OK" } else { "CRITERIA_VIOLATED" };
    Ok(Outcome::status(status, json!({"report": io::report_to_json(&rep)})))
}

fn certify_flow(o: &Opts) -> CmdResult {
    let inst = flow_instance(o)?;
    let x = vector(need(&o.flow, "flow")?)?;
    let pi = vector(need(&o.potential, "potential")?)?;
    let variant = match netflow::variant_of(&inst)? {
        Variant::Nonneg => "nonneg",
        Variant::Free => "free",
    };
    let rep = netflow::certify_flow_square_sum(&inst, &x, &pi)?;
    Ok(Outcome::status("OK", json!({"variant": variant, "report": io::report_to_json(&rep)})))
}

fn certify_boxtdi(o: &Opts) -> CmdResult {
    let sys = system(o)?;
    let phi = separable(o.phi.as_deref(), sys.n(), &sys.elements)?;
    let z = vector(need(&o.point, "point")?)?;
    let y = vector(need(&o.multipliers, "multipliers")?)?;
    let rep = polyhedron::verify_certificate(&sys, &z, &y, &phi)?;
    let status = if rep.equality { "OK" } else { "CRITERIA_VIOLATED" };
    Ok(Outcome::status(status, json!({"report": io::report_to_json(&rep)})))
}

fn inverse_cmd(o: &Opts) -> CmdResult {
    let inst_json = match &o.instance {
        Some(a) => Some(load(a)?),
        None => None,
    };
    let sys = match (&o.system, inst_json.as_ref().and_then(|v| v.get("system"))) {
        (Some(_), _) => system(o)?,
        (None, Some(v)) => io::system_from_json(v)?,
        (None, None) => return Err(bad("--system or an instance with \"system\" is required")),
    };
    let mut targets = o.target.iter().map(|t| vector(t)).collect::<Result<Vec<_>, _>>()?;
    if targets.is_empty() {
        if let Some(t) = inst_json.as_ref().and_then(|v| v.get("targets")) {
            targets = t.as_array().ok_or_else(|| bad("\"targets\" must be an array"))?.iter().map(io::parse_ints).collect::<Result<_, _>>()?;
        }
    }
    if targets.is_empty() {
        return Err(bad("at least one --target is required"));
    }
    let deviation = match (&o.deviation, inst_json.as_ref().and_then(|v| v.get("deviation"))) {
        (Some(d), _) => io::separable_from_json(&load(d)?, Some(&sys.elements))?,
        (None, Some(v)) => io::separable_from_json(v, Some(&sys.elements))?,
        (None, None) => return Err(bad("--deviation is required")),
    };
    let inst = InverseInstance { parent: sys, targets, deviation };
    let (dsys, z0) = inst.reduced()?;
    let sol = inverse::inverse_minimize(&inst, &w_window(o, z0.len())?)?;
    let cone = inverse::tangent_cone(&dsys, &z0)?;
    let zwin = match &o.window {
        Some(s) => io::parse_window_spec(s, z0.len())?,
        None => inverse::default_z_window(&inst.deviation)?,
    };
    let rep = inverse::inverse_dual_search(&cone, &inst.deviation, &zwin, Some(&sol.w))?;
    let ok = rep.report.equality && rep.orthogonal == Some(true) && rep.fitting == Some(true);
    let out = json!({
        "value": ext_json(sol.value),
        "w_star": ints_json(&sol.w),
        "dilated_target": ints_json(&z0),
        "orthogonal": rep.orthogonal,
        "fitting": rep.fitting,
        "report": io::report_to_json(&rep.report),
    });
    Ok(Outcome::status(if ok { "OK" } else { "INCONCLUSIVE" }, out))
}

fn probe_cmd(o: &Opts) -> CmdResult {
    let base = system(o)?;
    let k = o.dilation.unwrap_or(1);
    let sys = polyhedron::dilation(&base, k)?;
    let win = io::parse_window_spec(need(&o.window, "window")?, sys.n())?;
    let (pass, witness) = polyhedron::probe_box_integer(&sys, &win)?;
    let witness = witness.map(|w| {
        json!({
            "f": ints_json(&w.f),
            "g": ints_json(&w.g),
            "vertex": w.vertex.iter().map(|r| json!(rational::rat_string(r))).collect::<Vec<_>>(),
        })
    });
    let out = json!({"box_integer": pass, "dilation": int_json(k), "window": io::window_to_json(&win), "witness": witness});
    Ok(Outcome::status("OK", out))
}

/// One named equality check of the self test.
fn check(failures: &mut Vec<Value>, name: &str, res: Result<bool, Error>) {
    match res {
        Ok(true) => {}
        Ok(false) => failures.push(json!({"check": name, "error": "values differ"})),
        Err(e) => failures.push(json!({"check": name, "error": e.to_string()})),
    }
}

fn selftest(seed: Option<u64>) -> Outcome {
    let mut failures = Vec::new();
    let mut checks = 0usize;
    let mut run = |name: String, res: Result<bool, Error>| {
        checks += 1;
        check(&mut failures, &name, res);
    };
    run("P2 square-sum".into(), mconvex_check(&fixtures::p2(), &SeparableConvex::square_sum(2), Some(Fin(2))));
    run("P2b square-sum".into(), mconvex_check(&fixtures::p2b(), &SeparableConvex::square_sum(2), Some(Fin(2))));
    run("P2 ∩ P2b split".into(), m2_check(&fixtures::p2(), &fixtures::p2b(), &SeparableConvex::square_sum(2)));
    run("D2 flow".into(), flow_check(&fixtures::d2(), Some(Fin(2))));
    run("P2 box-TDI".into(), boxtdi_check(&fixtures::p2sys(), &SeparableConvex::square_sum(2)));
    run("S3 facet system probe".into(), s3_check());
    let seeds: Vec<u64> = match seed {
        Some(s) => vec![s],
        None => (1..=32).collect(),
    };
    for &s in &seeds {
        let mut r = fixtures::rng(s);
        let n = 2 + (s as usize % 3);
        let p = fixtures::random_supermodular(&mut r, n, 2);
        let kind = if s % 2 == 0 { fixtures::PhiKind::SquareSum } else { fixtures::PhiKind::L1Deviation };
        let phi = fixtures::random_phi(&mut r, n, kind);
        run(format!("seed {s} M-convex"), mconvex_check(&p, &phi, None));
        run(format!("seed {s} box-TDI"), mconvex::to_system(&p).and_then(|sys| boxtdi_check(&sys, &phi)));
        let p2 = fixtures::random_supermodular(&mut r, n, 2);
        run(format!("seed {s} M2"), m2_check(&p, &p2, &phi));
        let inst = fixtures::random_uncapacitated_flow(&mut r, 4, 5, 2);
        run(format!("seed {s} flow"), flow_check(&inst, None));
        run(format!("seed {s} inverse"), inverse_check(&p, &mut r));
    }
    let seeds_json = json!(seeds);
    let status = if failures.is_empty() { "OK" } else { "CRITERIA_VIOLATED" };
    Outcome::status(status, json!({"checks": checks, "seeds": seeds_json, "failures": failures}))
}

fn mconvex_check(p: &SupermodularFn, phi: &SeparableConvex, expect: Option<ExtInt>) -> Result<bool, Error> {
    let z = mconvex::minimize_separable(p, phi)?;
    let cert = mconvex::dual_certificate(p, phi, &z)?;
    let rep = mconvex::verify_mconvex_optimality(p, phi, &z, &cert.w)?;
    let win = p.base_window()?.ok_or(Error::Infeasible)?;
    let brute = polyhedron::minimize_bruteforce(&mconvex::to_system(p)?, phi, &win)?;
    Ok(rep.equality && brute.primal_value == rep.primal_value && expect.is_none_or(|v| v == rep.primal_value))
}

fn m2_check(p1: &SupermodularFn, p2: &SupermodularFn, phi: &SeparableConvex) -> Result<bool, Error> {
    let n = p1.n();
    match mconvex::m2_minimize_and_split(p1, p2, phi, &Window::uniform(n, -3, 3)?) {
        Ok(rep) => Ok(rep.report.equality),
        // disjoint random pairs carry no equality to check
        Err(Error::EmptyIntersection) => Ok(true),
        Err(e) => Err(e),
    }
}

fn flow_check(inst: &FlowInstance, expect: Option<ExtInt>) -> Result<bool, Error> {
    let sol = netflow::min_convex_cost_flow(inst)?;
    let rep = netflow::certify_flow_square_sum(inst, &sol.x, &sol.pi)?;
    Ok(rep.equality && expect.is_none_or(|v| v == sol.value))
}

fn boxtdi_check(sys: &LinearSystem, phi: &SeparableConvex) -> Result<bool, Error> {
    let vrep = polyhedron::VRep::new(sys)?;
    let win = polyhedron::primal_window(sys, &vrep, phi)?.ok_or(Error::Infeasible)?;
    let prim = polyhedron::minimize_bruteforce(sys, phi, &win)?;
    let dual = polyhedron::dual_search_bruteforce(sys, phi, polyhedron::DEFAULT_Y_BOUND)?;
    let r = polyhedron::DEFAULT_W_RADIUS;
    let mu = polyhedron::mu_form_dual_search(sys, phi, &Window::uniform(sys.n(), -r, r)?)?;
    if dual.status != SearchStatus::Exact {
        return Ok(false);
    }
    let y = match &dual.dual_witness {
        polyhedron::DualWitness::Rows(y) => y.clone(),
        _ => return Ok(false),
    };
    let cert = polyhedron::verify_certificate(sys, prim.primal_witness.as_deref().ok_or(Error::Infeasible)?, &y, phi)?;
    Ok(cert.equality && prim.primal_value == dual.dual_value && mu.dual_value == prim.primal_value)
}

fn s3_check() -> Result<bool, Error> {
    // the 2-dilation of S₃ has a fractional vertex in a unit box
    let sys = polyhedron::dilation(&fixtures::s3_system(), 2)?;
    let (pass, _) = polyhedron::probe_box_integer(&sys, &Window::uniform(6, 0, 2)?)?;
    Ok(!pass)
}

fn inverse_check(p: &SupermodularFn, r: &mut fixtures::FixtureRng) -> Result<bool, Error> {
    use rand::Rng;
    let sys = mconvex::to_system(p)?;
    let n = p.n();
    let z0 = mconvex::greedy_min(p, &(0..n).map(|_| r.gen_range(-2..=2)).collect::<Vec<_>>())?;
    let w0: Vec<i128> = (0..n).map(|_| r.gen_range(-3..=3)).collect();
    let inst = InverseInstance { parent: sys.clone(), targets: vec![z0.clone()], deviation: inverse::l1_deviation(&w0) };
    let sol = inverse::inverse_minimize(&inst, &Window::uniform(n, -6, 6)?)?;
    let cone = inverse::tangent_cone(&sys, &z0)?;
    let rep = inverse::inverse_dual_search(&cone, &inst.deviation, &inverse::default_z_window(&inst.deviation)?, Some(&sol.w))?;
    Ok(rep.report.equality && rep.orthogonal == Some(true) && rep.fitting == Some(true))
}
