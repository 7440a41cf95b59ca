//! Integral m-flows on digraphs with separable convex arc costs.
//!
//! The solver finds a feasible flow by augmenting paths, then cancels
//! negative residual cycles one unit at a time. Potentials come from
//! shortest distances in the final residual network.

use std::collections::VecDeque;

use crate::conjugate::SeparableConvex;
use crate::error::{Error, Result};
use crate::extint::{cadd, csub, ExtInt, Fin, MinusInf, PlusInf};
use crate::mconvex::half_floor_ceil;
use crate::polyhedron::{DualWitness, LinearSystem, MinMaxReport, Row, SearchStatus};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    pub nodes: Vec<String>,
    /// `(tail, head)` node indices; parallel arcs and loops allowed.
    pub arcs: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(nodes: Vec<String>, arcs: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = arcs.iter().find(|&&(u, v)| u >= nodes.len() || v >= nodes.len()) {
            return Err(Error::InvalidInput(format!("arc ({u},{v}) uses an undeclared node")));
        }
        Ok(Digraph { nodes, arcs })
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|v| v == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowInstance {
    pub digraph: Digraph,
    pub m: Vec<i128>,
    pub lower: Vec<ExtInt>,
    pub upper: Vec<ExtInt>,
    pub cost: SeparableConvex,
}

impl FlowInstance {
    pub fn new(
        digraph: Digraph,
        m: Vec<i128>,
        lower: Vec<ExtInt>,
        upper: Vec<ExtInt>,
        cost: SeparableConvex,
    ) -> Result<Self> {
        let na = digraph.arcs.len();
        if m.len() != digraph.nodes.len() {
            return Err(Error::InvalidInput("m needs one value per node".into()));
        }
        if lower.len() != na || upper.len() != na || cost.len() != na {
            return Err(Error::InvalidInput("bounds and costs need one entry per arc".into()));
        }
        if m.iter().try_fold(0i128, |a, &b| cadd(a, b))? != 0 {
            return Err(Error::InvalidInput("m(V) must be 0".into()));
        }
        for a in 0..na {
            if lower[a] == PlusInf || upper[a] == MinusInf || lower[a] > upper[a] {
                return Err(Error::InvalidInput(format!("arc {a} has bounds {} > {}", lower[a], upper[a])));
            }
        }
        Ok(FlowInstance { digraph, m, lower, upper, cost })
    }

    /// The nonnegative uncapacitated instance: `f = 0`, `g = +inf`.
    pub fn nonneg(digraph: Digraph, m: Vec<i128>, cost: SeparableConvex) -> Result<Self> {
        let na = digraph.arcs.len();
        FlowInstance::new(digraph, m, vec![Fin(0); na], vec![PlusInf; na], cost)
    }

    pub fn num_arcs(&self) -> usize {
        self.digraph.arcs.len()
    }

    /// `[max(f, dom lo), min(g, dom hi)]` per arc.
    fn effective_bounds(&self) -> Result<Vec<(ExtInt, ExtInt)>> {
        (0..self.num_arcs())
            .map(|a| {
                let (dl, dh) = self.cost.parts[a].domain()?;
                Ok((self.lower[a].max(dl), self.upper[a].min(dh)))
            })
            .collect()
    }

    /// `ϱ_x(v) − δ_x(v) = m(v)` and `f ≤ x ≤ g`.
    pub fn is_feasible(&self, x: &[i128]) -> Result<bool> {
        if x.len() != self.num_arcs() {
            return Ok(false);
        }
        for a in 0..x.len() {
            if Fin(x[a]) < self.lower[a] || Fin(x[a]) > self.upper[a] {
                return Ok(false);
            }
        }
        Ok(net_inflow(&self.digraph, x)? == self.m)
    }
}

/// `ϱ_x(v) − δ_x(v)` for every node.
pub fn net_inflow(d: &Digraph, x: &[i128]) -> Result<Vec<i128>> {
    let mut net = vec![0i128; d.nodes.len()];
    for (a, &(u, v)) in d.arcs.iter().enumerate() {
        net[v] = cadd(net[v], x[a])?;
        net[u] = csub(net[u], x[a])?;
    }
    Ok(net)
}

/// Signed incidence matrix: one row per node, `+1` on entering arcs, `-1`
/// on leaving arcs, `0` on loops.
pub fn incidence_matrix(d: &Digraph) -> Vec<Vec<i128>> {
    let mut q = vec![vec![0i128; d.arcs.len()]; d.nodes.len()];
    for (a, &(u, v)) in d.arcs.iter().enumerate() {
        if u != v {
            q[v][a] = 1;
            q[u][a] = -1;
        }
    }
    q
}

/// The system `[Q_D; I] x ≥ (m; 0)` over the arcs.
pub fn embedding_system(d: &Digraph, m: &[i128]) -> Result<LinearSystem> {
    let na = d.arcs.len();
    let mut rows: Vec<Row> = incidence_matrix(d).into_iter().zip(m).map(|(r, &b)| Row::geq(r, b)).collect();
    for a in 0..na {
        rows.push(Row::geq((0..na).map(|b| i128::from(a == b)).collect(), 0));
    }
    LinearSystem::numbered(na, rows)
}

/// `Q_D x ≥ m`, then `x ≥ f` and `−x ≥ −g` for every finite bound.
pub fn flow_system(inst: &FlowInstance) -> Result<LinearSystem> {
    let na = inst.num_arcs();
    let mut sys = embedding_system(&inst.digraph, &inst.m)?;
    sys.rows.truncate(inst.digraph.nodes.len());
    let unit = |a: usize, c: i128| -> Vec<i128> { (0..na).map(|b| if a == b { c } else { 0 }).collect() };
    for a in 0..na {
        if let Fin(f) = inst.lower[a] {
            sys.rows.push(Row::geq(unit(a, 1), f));
        }
    }
    for a in 0..na {
        if let Fin(g) = inst.upper[a] {
            sys.rows.push(Row::geq(unit(a, -1), -g));
        }
    }
    sys.elements = crate::io::arc_names(na);
    Ok(sys)
}

/// Hoffman's condition for a nonnegative uncapacitated m-flow: every
/// `X ⊆ V` with no leaving arc has `m̃(X) ≥ 0`. Returns the first violating
/// `X` in bitmask order.
pub fn hoffman_feasible(d: &Digraph, m: &[i128]) -> Result<(bool, Option<Vec<usize>>)> {
    let nv = d.nodes.len();
    if nv > 20 {
        return Err(Error::InvalidInput("hoffman_feasible scans at most 20 nodes".into()));
    }
    for x in 0usize..(1 << nv) {
        let leaves = d.arcs.iter().any(|&(u, v)| x >> u & 1 == 1 && x >> v & 1 == 0);
        if leaves {
            continue;
        }
        let mut total = 0i128;
        for v in (0..nv).filter(|v| x >> v & 1 == 1) {
            total = cadd(total, m[v])?;
        }
        if total < 0 {
            return Ok((false, Some((0..nv).filter(|v| x >> v & 1 == 1).collect())));
        }
    }
    Ok((true, None))
}

/// Residual arc: arc index and direction.
#[derive(Debug, Clone, Copy)]
struct Residual {
    arc: usize,
    forward: bool,
    from: usize,
    to: usize,
}

fn residual_arcs(inst: &FlowInstance, bounds: &[(ExtInt, ExtInt)], x: &[i128]) -> Vec<Residual> {
    let mut out = Vec::new();
    for (a, &(u, v)) in inst.digraph.arcs.iter().enumerate() {
        if Fin(x[a]) < bounds[a].1 {
            out.push(Residual { arc: a, forward: true, from: u, to: v });
        }
        if Fin(x[a]) > bounds[a].0 {
            out.push(Residual { arc: a, forward: false, from: v, to: u });
        }
    }
    out
}

fn residual_cost(inst: &FlowInstance, x: &[i128], r: &Residual) -> Result<i128> {
    let f = &inst.cost.parts[r.arc];
    let c = if r.forward { f.right_derivative(x[r.arc])? } else { f.right_derivative(x[r.arc] - 1)?.neg()? };
    c.finite().ok_or_else(|| Error::InvalidInput(format!("infinite residual cost on arc {}", r.arc)))
}

/// Starting flow inside the effective bounds, before balancing.
fn initial_flow(bounds: &[(ExtInt, ExtInt)]) -> Vec<i128> {
    bounds
        .iter()
        .map(|&(l, h)| match (l, h) {
            (Fin(a), _) => a,
            (_, Fin(b)) => b.min(0),
            _ => 0,
        })
        .collect()
}

/// Balances `x` by augmenting paths from surplus to deficit nodes.
fn make_feasible(inst: &FlowInstance, bounds: &[(ExtInt, ExtInt)], x: &mut [i128]) -> Result<()> {
    let nv = inst.digraph.nodes.len();
    let net = net_inflow(&inst.digraph, x)?;
    // need[v] > 0: v must receive more flow; need[v] < 0: v must send flow out
    let mut need: Vec<i128> = (0..nv).map(|v| csub(inst.m[v], net[v])).collect::<Result<_>>()?;
    loop {
        let Some(src) = (0..nv).find(|&v| need[v] < 0) else { return Ok(()) };
        let res = residual_arcs(inst, bounds, x);
        let mut pred: Vec<Option<usize>> = vec![None; nv];
        let mut seen = vec![false; nv];
        seen[src] = true;
        let mut queue = VecDeque::from([src]);
        let mut sink = None;
        while let Some(u) = queue.pop_front() {
            if need[u] > 0 {
                sink = Some(u);
                break;
            }
            for (i, r) in res.iter().enumerate() {
                if r.from == u && !seen[r.to] {
                    seen[r.to] = true;
                    pred[r.to] = Some(i);
                    queue.push_back(r.to);
                }
            }
        }
        let Some(sink) = sink else { return Err(Error::Infeasible) };
        let mut path = Vec::new();
        let mut v = sink;
        while v != src {
            let i = pred[v].expect("reached by BFS");
            path.push(res[i]);
            v = res[i].from;
        }
        let mut amount = (-need[src]).min(need[sink]);
        for r in &path {
            let cap = if r.forward { bounds[r.arc].1.sub(Fin(x[r.arc]))? } else { Fin(x[r.arc]).sub(bounds[r.arc].0)? };
            if let Fin(c) = cap {
                amount = amount.min(c);
            }
        }
        for r in &path {
            x[r.arc] = if r.forward { cadd(x[r.arc], amount)? } else { csub(x[r.arc], amount)? };
        }
        need[src] += amount;
        need[sink] -= amount;
    }
}

/// Shortest distances from a virtual source joined to every node at cost 0,
/// or a negative cycle as a list of residual arcs.
fn bellman_ford(nv: usize, res: &[Residual], cost: &[i128]) -> Result<std::result::Result<Vec<i128>, Vec<usize>>> {
    let mut dist = vec![0i128; nv];
    let mut pred: Vec<Option<usize>> = vec![None; nv];
    let mut last = None;
    for _ in 0..=nv {
        last = None;
        for (i, r) in res.iter().enumerate() {
            let cand = cadd(dist[r.from], cost[i])?;
            if cand < dist[r.to] {
                dist[r.to] = cand;
                pred[r.to] = Some(i);
                last = Some(r.to);
            }
        }
        if last.is_none() {
            return Ok(Ok(dist));
        }
    }
    let mut v = last.expect("relaxed in the final round");
    for _ in 0..nv {
        v = res[pred[v].expect("on a relaxation chain")].from;
    }
    let start = v;
    let mut cycle = Vec::new();
    loop {
        let i = pred[v].expect("on the cycle");
        cycle.push(i);
        v = res[i].from;
        if v == start {
            break;
        }
    }
    cycle.reverse();
    Ok(Err(cycle))
}

struct Solution {
    x: Vec<i128>,
    value: ExtInt,
}

fn solve(inst: &FlowInstance) -> Result<Solution> {
    let bounds = inst.effective_bounds()?;
    if bounds.iter().any(|(l, h)| l > h) {
        return Err(Error::Infeasible);
    }
    let nv = inst.digraph.nodes.len();
    let mut x = initial_flow(&bounds);
    make_feasible(inst, &bounds, &mut x)?;
    loop {
        let res = residual_arcs(inst, &bounds, &x);
        let cost: Vec<i128> = res.iter().map(|r| residual_cost(inst, &x, r)).collect::<Result<_>>()?;
        match bellman_ford(nv, &res, &cost)? {
            Ok(_) => {
                let value = inst.cost.eval(&x)?;
                return Ok(Solution { x, value });
            }
            Err(cycle) => {
                if cycle_is_unbounded(inst, &bounds, &res, &cycle)? {
                    return Err(Error::Unbounded);
                }
                for &i in &cycle {
                    let r = res[i];
                    x[r.arc] += if r.forward { 1 } else { -1 };
                }
            }
        }
    }
}

/// True when every arc of the cycle has infinite residual capacity and the
/// asymptotic cycle cost is negative.
fn cycle_is_unbounded(inst: &FlowInstance, bounds: &[(ExtInt, ExtInt)], res: &[Residual], cycle: &[usize]) -> Result<bool> {
    let mut total = Fin(0);
    for &i in cycle {
        let r = res[i];
        let (l, h) = inst.cost.parts[r.arc].slope_limits()?;
        if r.forward {
            if bounds[r.arc].1 != PlusInf {
                return Ok(false);
            }
            total = total.add(h)?;
        } else {
            if bounds[r.arc].0 != MinusInf {
                return Ok(false);
            }
            total = total.add(l.neg()?)?;
        }
    }
    Ok(total < Fin(0))
}

/// A minimum-cost flow with node potentials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSolution {
    /// The lexicographically least optimal flow.
    pub x: Vec<i128>,
    pub value: ExtInt,
    /// Shortest residual distances; tensions `π(v) − π(u)` fit `x` on every arc.
    pub pi_raw: Vec<i128>,
    /// `pi_raw` shifted so that its minimum is 0.
    pub pi: Vec<i128>,
}

/// Minimizes `Σ φ_a(x(a))` over integral m-flows with `f ≤ x ≤ g`.
///
/// Among optimal flows the lexicographically least (in arc order) is
/// returned: each arc in turn is pushed to the least value that keeps the
/// optimum, found by binary search on its upper bound.
pub fn min_convex_cost_flow(inst: &FlowInstance) -> Result<FlowSolution> {
    let first = solve(inst)?;
    let opt = first.value;
    let mut cur = inst.clone();
    let mut best = first;
    for a in 0..inst.num_arcs() {
        let hi = best.x[a];
        let (eff_lo, _) = cur.effective_bounds()?[a];
        let attains = |v: i128| -> Result<Option<Solution>> {
            let mut trial = cur.clone();
            trial.upper[a] = Fin(v);
            match solve(&trial) {
                Ok(s) if s.value == opt => Ok(Some(s)),
                Ok(_) | Err(Error::Infeasible) => Ok(None),
                Err(e) => Err(e),
            }
        };
        let mut lo = match eff_lo {
            Fin(l) => l,
            _ => {
                let mut step = 1i128;
                loop {
                    let v = csub(hi, step)?;
                    if attains(v)?.is_none() {
                        break v;
                    }
                    if step > 1 << 40 {
                        return Err(Error::InvalidInput(format!("optimal flows are unbounded below on arc {a}")));
                    }
                    step *= 2;
                }
            }
        };
        // invariant: lo - 1 fails or lo is the effective lower bound; hi attains
        let mut top = hi;
        if lo < top {
            if let Some(s) = attains(lo)? {
                top = lo;
                best = s;
            } else {
                lo += 1;
                while lo < top {
                    let mid = lo + (top - lo) / 2;
                    match attains(mid)? {
                        Some(s) => {
                            top = mid;
                            best = s;
                        }
                        None => lo = mid + 1,
                    }
                }
            }
        }
        if best.x[a] != top {
            best = attains(top)?.expect("top attains the optimum");
        }
        cur.lower[a] = Fin(top);
        cur.upper[a] = Fin(top);
    }
    // potentials from the original bounds, so that fixed arcs do not hide tension
    let full = potentials_for(inst, &best.x)?;
    let shift = full.iter().copied().min().unwrap_or(0);
    let pi = full.iter().map(|&p| p - shift).collect();
    Ok(FlowSolution { x: best.x, value: best.value, pi_raw: full, pi })
}

/// Shortest residual distances for an optimal `x` of `inst`.
pub fn potentials_for(inst: &FlowInstance, x: &[i128]) -> Result<Vec<i128>> {
    let bounds = inst.effective_bounds()?;
    let res = residual_arcs(inst, &bounds, x);
    let cost: Vec<i128> = res.iter().map(|r| residual_cost(inst, x, r)).collect::<Result<_>>()?;
    match bellman_ford(inst.digraph.nodes.len(), &res, &cost)? {
        Ok(d) => Ok(d),
        Err(_) => Err(Error::CriteriaViolated("flow admits a negative residual cycle".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `x ≥ 0`: tension clamped at 0.
    Nonneg,
    /// `x` free: raw tension.
    Free,
}

/// `Δπ(uv) = π(v) − π(u)` for every arc.
pub fn tension(d: &Digraph, pi: &[i128]) -> Result<Vec<i128>> {
    d.arcs.iter().map(|&(u, v)| csub(pi[v], pi[u])).collect()
}

/// `mπ − Σ_a ⌊t(a)/2⌋⌈t(a)/2⌉` with `t = max(Δπ, 0)` (Nonneg) or `t = Δπ` (Free).
pub fn flow_dual_value(d: &Digraph, m: &[i128], pi: &[i128], variant: Variant) -> Result<ExtInt> {
    if pi.len() != d.nodes.len() || m.len() != d.nodes.len() {
        return Err(Error::InvalidInput("m and pi need one value per node".into()));
    }
    let mut acc = crate::extint::dot(m, pi)?;
    for t in tension(d, pi)? {
        let t = match variant {
            Variant::Nonneg => t.max(0),
            Variant::Free => t,
        };
        acc = csub(acc, half_floor_ceil(t)?)?;
    }
    Ok(Fin(acc))
}

/// The dual variant matching the bounds: `[0, +inf]` on every arc gives
/// Nonneg, `[-inf, +inf]` gives Free.
pub fn variant_of(inst: &FlowInstance) -> Result<Variant> {
    if inst.upper.iter().any(|&g| g != PlusInf) {
        return Err(Error::InvalidInput("the square-sum certificate needs uncapacitated arcs".into()));
    }
    if inst.lower.iter().all(|&f| f == Fin(0)) {
        Ok(Variant::Nonneg)
    } else if inst.lower.iter().all(|&f| f == MinusInf) {
        Ok(Variant::Free)
    } else {
        Err(Error::InvalidInput("lower bounds must be all 0 or all -inf".into()))
    }
}

/// Checks `Σ x(a)² = flow_dual_value(π)`.
pub fn certify_flow_square_sum(inst: &FlowInstance, x: &[i128], pi: &[i128]) -> Result<MinMaxReport> {
    let variant = variant_of(inst)?;
    if !inst.is_feasible(x)? {
        return Err(Error::NotFeasible);
    }
    let mut primal = 0i128;
    for &v in x {
        primal = cadd(primal, crate::extint::cmul(v, v)?)?;
    }
    let dual = flow_dual_value(&inst.digraph, &inst.m, pi, variant)?;
    if dual != Fin(primal) {
        return Err(Error::ValueMismatch { primal: primal.to_string(), dual: dual.to_string() });
    }
    let mut rep = MinMaxReport {
        primal_value: Fin(primal),
        dual_value: dual,
        primal_witness: Some(x.to_vec()),
        dual_witness: DualWitness::Potential(pi.to_vec()),
        status: SearchStatus::Exact,
        ..Default::default()
    };
    rep.set_equality();
    Ok(rep)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::conjugate::UnivariateConvex;

    pub(crate) fn d2() -> Digraph {
        Digraph::new(vec!["s".into(), "t".into()], vec![(0, 1), (0, 1)]).unwrap()
    }

    fn d2_inst(cost: SeparableConvex) -> FlowInstance {
        FlowInstance::nonneg(d2(), vec![-2, 2], cost).unwrap()
    }

    #[test]
    fn incidence_examples() {
        let q = incidence_matrix(&d2());
        assert_eq!(q[1], vec![1, 1]);
        assert_eq!(q[0], vec![-1, -1]);
        let loop_d = Digraph::new(vec!["v".into()], vec![(0, 0)]).unwrap();
        assert_eq!(incidence_matrix(&loop_d), vec![vec![0]]);
    }

    #[test]
    fn hoffman_examples() {
        assert_eq!(hoffman_feasible(&d2(), &[-2, 2]).unwrap(), (true, None));
        let one = Digraph::new(vec!["s".into(), "t".into()], vec![(0, 1)]).unwrap();
        assert_eq!(hoffman_feasible(&one, &[1, -1]).unwrap(), (false, Some(vec![1])));
        assert_eq!(hoffman_feasible(&d2(), &[0, 0]).unwrap(), (true, None));
    }

    #[test]
    fn flow_examples() {
        let s = min_convex_cost_flow(&d2_inst(SeparableConvex::square_sum(2))).unwrap();
        assert_eq!((s.x.clone(), s.value), (vec![1, 1], Fin(2)));
        assert_eq!(flow_dual_value(&d2(), &[-2, 2], &s.pi, Variant::Nonneg).unwrap(), Fin(2));
        let weighted = SeparableConvex::from_parts(vec![
            UnivariateConvex::quadratic(1).unwrap(),
            UnivariateConvex::quadratic(3).unwrap(),
        ]);
        let s = min_convex_cost_flow(&d2_inst(weighted)).unwrap();
        assert_eq!((s.x, s.value), (vec![1, 1], Fin(4)));
        let s = min_convex_cost_flow(&d2_inst(SeparableConvex::linear(&[1, 1]))).unwrap();
        assert_eq!((s.x, s.value), (vec![0, 2], Fin(2)));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let one = Digraph::new(vec!["s".into(), "t".into()], vec![(0, 1)]).unwrap();
        let inst = FlowInstance::nonneg(one, vec![1, -1], SeparableConvex::square_sum(1)).unwrap();
        assert_eq!(min_convex_cost_flow(&inst), Err(Error::Infeasible));
        let cyc = Digraph::new(vec!["a".into(), "b".into()], vec![(0, 1), (1, 0)]).unwrap();
        let inst = FlowInstance::nonneg(cyc, vec![0, 0], SeparableConvex::linear(&[-1, 0])).unwrap();
        assert_eq!(min_convex_cost_flow(&inst), Err(Error::Unbounded));
    }

    #[test]
    fn dual_value_examples() {
        assert_eq!(flow_dual_value(&d2(), &[-2, 2], &[0, 2], Variant::Nonneg).unwrap(), Fin(2));
        assert_eq!(flow_dual_value(&d2(), &[-2, 2], &[0, 0], Variant::Nonneg).unwrap(), Fin(0));
        assert_eq!(flow_dual_value(&d2(), &[-2, 2], &[0, 3], Variant::Nonneg).unwrap(), Fin(2));
        assert_eq!(flow_dual_value(&d2(), &[-2, 2], &[3, 0], Variant::Nonneg).unwrap(), Fin(-6));
        assert_eq!(flow_dual_value(&d2(), &[-2, 2], &[3, 0], Variant::Free).unwrap(), Fin(-10));
    }

    #[test]
    fn certify_examples() {
        let inst = d2_inst(SeparableConvex::square_sum(2));
        let rep = certify_flow_square_sum(&inst, &[1, 1], &[0, 2]).unwrap();
        assert!(rep.equality);
        assert_eq!(
            certify_flow_square_sum(&inst, &[2, 0], &[0, 2]),
            Err(Error::ValueMismatch { primal: "4".into(), dual: "2".into() })
        );
        assert_eq!(
            certify_flow_square_sum(&inst, &[1, 1], &[0, 0]),
            Err(Error::ValueMismatch { primal: "2".into(), dual: "0".into() })
        );
        assert_eq!(certify_flow_square_sum(&inst, &[1, 0], &[0, 2]), Err(Error::NotFeasible));
    }
}
