//! Base polyhedra `B'(p) = {x : x̃(Z) ≥ p(Z) ∀Z, x̃(S) = p(S)}` of
//! supermodular functions and separable convex minimization over their
//! integer points.
//!
//! Set functions are dense tables indexed by bitmask (bit `i` is element `i`).
//! Submodular minimization is replaced by enumeration of all `2^n` subsets.

use serde_json::json;

use crate::conjugate::{check_len, SeparableConvex, UnivariateConvex};
use crate::error::{Error, Result};
use crate::extint::{cadd, cmul, csub, dot, ExtInt, Fin, MinusInf, PlusInf};
use crate::polyhedron::{
    for_each_integer_point, DualWitness, LinearSystem, MinMaxReport, Row, SearchStatus, Window,
};

pub const MAX_N: usize = 20;
/// Largest `n` for which the full `4^n` supermodularity check runs on
/// functions with `-inf` values.
pub const FULL_CHECK_MAX_N: usize = 12;

/// A supermodular set function with `p(∅) = 0` and `p(S)` finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupermodularFn {
    n: usize,
    table: Vec<ExtInt>,
}

impl SupermodularFn {
    pub fn new(n: usize, table: Vec<ExtInt>) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidInput(format!("ground set size must be in 1..={MAX_N}")));
        }
        if table.len() != 1 << n {
            return Err(Error::InvalidInput(format!("table needs {} entries", 1usize << n)));
        }
        if table[0] != Fin(0) {
            return Err(Error::InvalidInput("p(empty set) must be 0".into()));
        }
        if !table[(1 << n) - 1].is_finite() {
            return Err(Error::InvalidInput("p(S) must be finite".into()));
        }
        if table.contains(&PlusInf) {
            return Err(Error::InvalidInput("p may not take the value +inf".into()));
        }
        let f = SupermodularFn { n, table };
        if let Some((x, y)) = f.supermodularity_violation()? {
            return Err(Error::InvalidInput(format!("not supermodular at X={x:#b}, Y={y:#b}")));
        }
        Ok(f)
    }

    pub fn from_finite(n: usize, table: &[i128]) -> Result<Self> {
        SupermodularFn::new(n, table.iter().map(|&v| Fin(v)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> usize {
        (1 << self.n) - 1
    }

    pub fn table(&self) -> &[ExtInt] {
        &self.table
    }

    pub fn p(&self, mask: usize) -> ExtInt {
        self.table[mask]
    }

    pub fn p_total(&self) -> i128 {
        self.table[self.full()].finite().expect("p(S) is finite")
    }

    /// A pair `(X, Y)` with `p(X) + p(Y) > p(X∩Y) + p(X∪Y)`, if any.
    ///
    /// Finite tables use the local test on `X+s, X+t`; tables with `-inf`
    /// values use the full pairwise test (limited to `n ≤ 12`).
    pub fn supermodularity_violation(&self) -> Result<Option<(usize, usize)>> {
        let n = self.n;
        let viol = |x: usize, y: usize| -> Result<bool> {
            let lhs = self.table[x].add(self.table[y])?;
            let rhs = self.table[x & y].add(self.table[x | y])?;
            Ok(lhs > rhs)
        };
        if self.table.iter().all(|v| v.is_finite()) {
            for x in 0..(1usize << n) {
                for s in 0..n {
                    for t in s + 1..n {
                        if x >> s & 1 == 0 && x >> t & 1 == 0 && viol(x | 1 << s, x | 1 << t)? {
                            return Ok(Some((x | 1 << s, x | 1 << t)));
                        }
                    }
                }
            }
            return Ok(None);
        }
        if n > FULL_CHECK_MAX_N {
            return Err(Error::InvalidInput("-inf values need n <= 12 for the supermodularity check".into()));
        }
        for x in 0..(1usize << n) {
            for y in x + 1..(1usize << n) {
                if viol(x, y)? {
                    return Ok(Some((x, y)));
                }
            }
        }
        Ok(None)
    }

    fn members(&self, mask: usize) -> Vec<usize> {
        (0..self.n).filter(|s| mask >> s & 1 == 1).collect()
    }

    fn z_sum(z: &[i128], mask: usize) -> Result<i128> {
        let mut acc = 0i128;
        for (s, &v) in z.iter().enumerate() {
            if mask >> s & 1 == 1 {
                acc = cadd(acc, v)?;
            }
        }
        Ok(acc)
    }

    pub fn is_tight(&self, z: &[i128], mask: usize) -> Result<bool> {
        Ok(self.table[mask] == Fin(Self::z_sum(z, mask)?))
    }

    /// Coordinate bounds of `B'(p)`: `p({s}) ≤ z(s) ≤ p(S) − p(S−s)`.
    pub fn coordinate_bounds(&self) -> Result<Vec<(ExtInt, ExtInt)>> {
        (0..self.n)
            .map(|s| Ok((self.table[1 << s], Fin(self.p_total()).sub(self.table[self.full() & !(1 << s)])?)))
            .collect()
    }

    /// The box spanned by [`Self::coordinate_bounds`], when finite.
    pub fn base_window(&self) -> Result<Option<Window>> {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for (l, h) in self.coordinate_bounds()? {
            match (l, h) {
                (Fin(a), Fin(b)) => {
                    lo.push(a);
                    hi.push(b);
                }
                _ => return Ok(None),
            }
        }
        Ok(Some(Window::new(lo, hi)?))
    }
}

/// `p̄(X) = p(S) − p(S−X)`, mapping a supermodular table to a submodular one
/// and back.
pub fn complement(n: usize, table: &[ExtInt]) -> Result<Vec<ExtInt>> {
    let full = (1usize << n) - 1;
    let total = table[full];
    (0..=full).map(|x| total.sub(table[full & !x])).collect()
}

/// One GEQ row per proper nonempty `Z` with finite `p(Z)` (in bitmask order),
/// then the EQ row for `S`.
pub fn to_system(p: &SupermodularFn) -> Result<LinearSystem> {
    let n = p.n;
    let row = |mask: usize| -> Vec<i128> { (0..n).map(|s| i128::from(mask >> s & 1 == 1)).collect() };
    let mut rows = Vec::new();
    for mask in 1..p.full() {
        if let Fin(v) = p.table[mask] {
            rows.push(Row::geq(row(mask), v));
        }
    }
    rows.push(Row::eq(row(p.full()), p.p_total()));
    LinearSystem::numbered(n, rows)
}

/// `z ∈ ⊙B'(p)`.
pub fn member(p: &SupermodularFn, z: &[i128]) -> Result<bool> {
    check_len(p.n, z.len())?;
    if SupermodularFn::z_sum(z, p.full())? != p.p_total() {
        return Ok(false);
    }
    for mask in 1..p.full() {
        if let Fin(v) = p.table[mask] {
            if SupermodularFn::z_sum(z, mask)? < v {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Elements sorted by decreasing `w`, ties by increasing index.
fn decreasing_order(w: &[i128]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].cmp(&w[a]).then(a.cmp(&b)));
    order
}

/// `p̂(w) = p(S_n)w(s_n) + Σ_{j<n} p(S_j)(w(s_j) − w(s_{j+1}))`.
///
/// A zero difference times `-inf` contributes 0; a positive one gives `-inf`.
pub fn lovasz_extension(p: &SupermodularFn, w: &[i128]) -> Result<ExtInt> {
    check_len(p.n, w.len())?;
    let order = decreasing_order(w);
    let n = p.n;
    let mut acc = p.table[p.full()].mul_int(w[order[n - 1]])?;
    let mut mask = 0usize;
    for j in 0..n - 1 {
        mask |= 1 << order[j];
        let diff = csub(w[order[j]], w[order[j + 1]])?;
        acc = acc.add(p.table[mask].mul_int(diff)?)?;
    }
    Ok(acc)
}

/// The greedy base along the decreasing order of `w`.
///
/// Within a class of equal weights the elements are taken in index order,
/// skipping ahead past elements whose addition would reach a `-inf` set.
pub fn greedy_min(p: &SupermodularFn, w: &[i128]) -> Result<Vec<i128>> {
    check_len(p.n, w.len())?;
    if lovasz_extension(p, w)? == MinusInf {
        return Err(Error::Unbounded);
    }
    let order = decreasing_order(w);
    let mut z = vec![0i128; p.n];
    let mut mask = 0usize;
    let mut prev = 0i128;
    let mut i = 0;
    while i < p.n {
        let mut j = i;
        while j < p.n && w[order[j]] == w[order[i]] {
            j += 1;
        }
        let mut class: Vec<usize> = order[i..j].to_vec();
        while !class.is_empty() {
            let Some(pos) = class.iter().position(|&s| p.table[mask | 1 << s].is_finite()) else {
                return Err(Error::DegenerateSystem(
                    "no unit-step chain of finite sets through a tie class".into(),
                ));
            };
            let s = class.remove(pos);
            mask |= 1 << s;
            let v = p.table[mask].finite().expect("checked finite");
            z[s] = csub(v, prev)?;
            prev = v;
        }
        i = j;
    }
    Ok(z)
}

/// `z − χ_s + χ_t ∈ ⊙B` iff no `z`-tight set contains `s` and avoids `t`.
pub fn exchange_feasible(p: &SupermodularFn, z: &[i128], s: usize, t: usize) -> Result<bool> {
    for mask in 0..=p.full() {
        if mask >> s & 1 == 1 && mask >> t & 1 == 0 && p.is_tight(z, mask)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Change of `Φ` under `z − χ_s + χ_t`.
fn exchange_delta(phi: &SeparableConvex, z: &[i128], s: usize, t: usize) -> Result<ExtInt> {
    let down = phi.parts[s].eval(z[s] - 1)?.sub(phi.parts[s].eval(z[s])?)?;
    let up = phi.parts[t].eval(z[t] + 1)?.sub(phi.parts[t].eval(z[t])?)?;
    down.add(up)
}

/// Steepest exchange descent; returns the local minimum and the step count.
fn descend(p: &SupermodularFn, phi: &SeparableConvex, mut z: Vec<i128>, budget: u64) -> Result<(Vec<i128>, u64)> {
    let n = p.n;
    let mut steps = 0u64;
    loop {
        let mut best: Option<(ExtInt, usize, usize)> = None;
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                let d = exchange_delta(phi, &z, s, t)?;
                if d >= Fin(0) || best.is_some_and(|(b, _, _)| d >= b) {
                    continue;
                }
                let mut zp = z.clone();
                zp[s] -= 1;
                zp[t] += 1;
                if member(p, &zp)? {
                    best = Some((d, s, t));
                }
            }
        }
        let Some((_, s, t)) = best else { return Ok((z, steps)) };
        z[s] -= 1;
        z[t] += 1;
        steps += 1;
        if steps > budget {
            return Err(Error::Unbounded);
        }
    }
}

/// Distance to `dom φ_s`, as a separable convex penalty.
fn domain_penalty(phi: &SeparableConvex) -> Result<SeparableConvex> {
    let parts = phi
        .parts
        .iter()
        .map(|f| {
            let (lo, hi) = f.domain()?;
            Ok(UnivariateConvex::FlatBottom {
                a: lo.finite().unwrap_or(i128::MIN / 4),
                b: hi.finite().unwrap_or(i128::MAX / 4),
                c_minus: -1,
                c_plus: 1,
                lo: MinusInf,
                hi: PlusInf,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeparableConvex { names: phi.names.clone(), parts })
}

/// Minimizes `Φ` over `⊙B'(p)` by steepest exchange descent.
///
/// Starts from the greedy base for `w = 0`; if that base is outside
/// `dom Φ`, a first descent minimizes the distance to `dom Φ`. Each step
/// takes the most improving exchange `z − χ_s + χ_t`, ties broken by
/// `(s, t)` lexicographically.
pub fn minimize_separable(p: &SupermodularFn, phi: &SeparableConvex) -> Result<Vec<i128>> {
    check_len(p.n, phi.len())?;
    let mut z = greedy_min(p, &vec![0; p.n])?;
    let range = descent_range(p, phi, &z)?;
    let budget = (10 * p.n as u64).saturating_mul(range);
    if phi.eval(&z)? == PlusInf {
        let pen = domain_penalty(phi)?;
        z = descend(p, &pen, z, budget)?.0;
        if pen.eval(&z)? != Fin(0) {
            return Err(Error::Infeasible);
        }
    }
    Ok(descend(p, phi, z, budget)?.0)
}

/// Value range used for the descent budget: total width of the finite
/// coordinate bounds of `B'(p) ∩ dom Φ`, plus the distance from the start.
fn descent_range(p: &SupermodularFn, phi: &SeparableConvex, z0: &[i128]) -> Result<u64> {
    let mut total: u64 = 1;
    for (s, (l, h)) in p.coordinate_bounds()?.into_iter().enumerate() {
        let (dl, dh) = phi.parts[s].domain()?;
        let lo = l.max(dl).finite().unwrap_or(z0[s] - 1000);
        let hi = h.min(dh).finite().unwrap_or(z0[s] + 1000);
        let width = (hi - lo).unsigned_abs() + (z0[s] - lo).unsigned_abs() + 1;
        total = total.saturating_add(u64::try_from(width).unwrap_or(u64::MAX));
    }
    Ok(total)
}

/// `T(s)`: the intersection of all `z`-tight sets containing `s`.
pub fn smallest_tight_set(p: &SupermodularFn, z: &[i128], s: usize) -> Result<usize> {
    let mut t = p.full();
    for mask in 0..=p.full() {
        if mask >> s & 1 == 1 && p.is_tight(z, mask)? {
            t &= mask;
        }
    }
    Ok(t)
}

/// The constructive dual `w*(s) = min{φ'_t(z*(t)) : t ∈ T(s)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    pub w: Vec<i128>,
    /// Elements whose minimum was `+inf` and were set to `φ'_s(z*(s) − 1)`.
    pub infinite_slope: Vec<usize>,
}

pub fn dual_certificate(p: &SupermodularFn, phi: &SeparableConvex, z_star: &[i128]) -> Result<DualCertificate> {
    check_len(p.n, z_star.len())?;
    check_len(p.n, phi.len())?;
    let slopes = phi.upper_derivative(z_star)?;
    let mut w = Vec::with_capacity(p.n);
    let mut flagged = Vec::new();
    for s in 0..p.n {
        let t = smallest_tight_set(p, z_star, s)?;
        let m = (0..p.n).filter(|&u| t >> u & 1 == 1).map(|u| slopes[u]).min().expect("s ∈ T(s)");
        match m {
            Fin(v) => w.push(v),
            MinusInf => return Err(Error::InfiniteSlope(s)),
            PlusInf => {
                let Fin(v) = phi.parts[s].right_derivative(z_star[s] - 1)? else {
                    return Err(Error::InfiniteSlope(s));
                };
                w.push(v);
                flagged.push(s);
            }
        }
    }
    Ok(DualCertificate { w, infinite_slope: flagged })
}

/// Strict `w`-top sets `{s : w(s) ≥ β}` for every value `β` except the
/// smallest, as bitmasks from the top.
pub fn strict_top_sets(w: &[i128]) -> Vec<usize> {
    let mut levels: Vec<i128> = w.to_vec();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    levels.pop();
    levels
        .into_iter()
        .map(|beta| (0..w.len()).filter(|&s| w[s] >= beta).fold(0usize, |m, s| m | 1 << s))
        .collect()
}

/// Checks that every strict `w*`-top set is `z*`-tight and that
/// `Φ'(z*−1) ≤ w* ≤ Φ'(z*)`, then reports `Φ(z*)` against `p̂(w*) − Φ•(w*)`.
pub fn verify_mconvex_optimality(
    p: &SupermodularFn,
    phi: &SeparableConvex,
    z_star: &[i128],
    w_star: &[i128],
) -> Result<MinMaxReport> {
    check_len(p.n, z_star.len())?;
    check_len(p.n, w_star.len())?;
    if !member(p, z_star)? {
        return Err(Error::NotPrimalFeasible);
    }
    for mask in strict_top_sets(w_star) {
        if !p.is_tight(z_star, mask)? {
            let set: Vec<String> = p.members(mask).iter().map(|s| phi.names[*s].clone()).collect();
            return Err(Error::CriteriaViolated(format!("strict top set {{{}}} is not tight", set.join(","))));
        }
    }
    if let Some(s) = phi.first_unfit(z_star, w_star)? {
        return Err(Error::CriteriaViolated(format!("w* does not fit z* at element {}", phi.names[s])));
    }
    let mut rep = MinMaxReport {
        primal_value: phi.eval(z_star)?,
        dual_value: lovasz_extension(p, w_star)?.sub(phi.conjugate(w_star)?)?,
        primal_witness: Some(z_star.to_vec()),
        dual_witness: DualWitness::Cost(w_star.to_vec()),
        ..Default::default()
    };
    rep.set_equality();
    Ok(rep)
}

/// `⌊k/2⌋⌈k/2⌉`.
pub fn half_floor_ceil(k: i128) -> Result<i128> {
    cmul(k.div_euclid(2), k.div_euclid(2) + k.rem_euclid(2))
}

/// `p̂(w) − Σ ⌊w(s)/2⌋⌈w(s)/2⌉`.
pub fn square_sum_dual(p: &SupermodularFn, w: &[i128]) -> Result<ExtInt> {
    let mut c = 0i128;
    for &v in w {
        c = cadd(c, half_floor_ceil(v)?)?;
    }
    lovasz_extension(p, w)?.sub(Fin(c))
}

/// `p̂₁(w₁) + p̂₂(w₂) − Σ ⌊(w₁+w₂)(s)/2⌋⌈(w₁+w₂)(s)/2⌉`.
pub fn square_sum_dual_m2(p1: &SupermodularFn, p2: &SupermodularFn, w1: &[i128], w2: &[i128]) -> Result<ExtInt> {
    let mut c = 0i128;
    for (a, b) in w1.iter().zip(w2) {
        c = cadd(c, half_floor_ceil(cadd(*a, *b)?)?)?;
    }
    lovasz_extension(p1, w1)?.add(lovasz_extension(p2, w2)?)?.sub(Fin(c))
}

pub fn is_square_sum(phi: &SeparableConvex) -> bool {
    phi.parts.iter().all(|f| *f == UnivariateConvex::Quadratic { a: 1 })
}

/// Result of [`m2_minimize_and_split`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M2Report {
    pub report: MinMaxReport,
    /// The square-sum expression at the dual witness, when `Φ` is the square-sum.
    pub square_sum_value: Option<ExtInt>,
}

/// Windowed primal minimum over `⊙B₁ ∩ ⊙B₂` and the weight-splitting dual
/// `max{p̂₁(w₁) + p̂₂(w₂) − Φ•(w₁+w₂)}` over `(w₁, w₂)` in `w_window²`.
///
/// For every `z` in the intersection the dual objective is at most `Φ(z)`,
/// with equality exactly when `z` minimizes `w₁` over `B₁`, `w₂` over `B₂`,
/// and `(z, w₁+w₂)` is Φ-fitting. The lexicographically least pair meeting
/// these conditions for the primal minimizer is searched first; otherwise
/// the full window is scanned.
pub fn m2_minimize_and_split(
    p1: &SupermodularFn,
    p2: &SupermodularFn,
    phi: &SeparableConvex,
    w_window: &Window,
) -> Result<M2Report> {
    let n = p1.n;
    if p2.n != n {
        return Err(Error::InvalidInput("p1 and p2 have different ground sets".into()));
    }
    check_len(n, phi.len())?;
    check_len(n, w_window.len())?;
    let win = intersection_window(p1, p2, phi)?;
    let mut sys = to_system(p1)?;
    sys.rows.extend(to_system(p2)?.rows);
    let mut best: Option<(ExtInt, Vec<i128>)> = None;
    if let Some(win) = &win {
        for_each_integer_point(&sys, win, |x| {
            let v = phi.eval(x)?;
            if v != PlusInf && best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, x.to_vec()));
            }
            Ok(())
        })?;
    }
    let Some((pv, z)) = best else { return Err(Error::EmptyIntersection) };
    let mut rep = MinMaxReport { primal_value: pv, primal_witness: Some(z.clone()), ..Default::default() };
    if let Some(win) = &win {
        rep.bound("primal_window", crate::polyhedron::window_json(win));
    }
    rep.bound("w_window", crate::polyhedron::window_json(w_window));
    let objective = |w1: &[i128], w2: &[i128]| -> Result<ExtInt> {
        let w: Vec<i128> = w1.iter().zip(w2).map(|(a, b)| a + b).collect();
        let c = phi.conjugate(&w)?;
        if c == PlusInf {
            return Ok(MinusInf);
        }
        lovasz_extension(p1, w1)?.add(lovasz_extension(p2, w2)?)?.sub(c)
    };
    let lower = phi.lower_derivative(&z)?;
    let upper = phi.upper_derivative(&z)?;
    let mut found: Option<(ExtInt, Vec<i128>, Vec<i128>)> = None;
    'outer: for w1 in w_window.points() {
        if lovasz_extension(p1, &w1)? != Fin(dot(&w1, &z)?) {
            continue;
        }
        let lo: Vec<ExtInt> = (0..n).map(|s| lower[s].add_int(-w1[s])).collect::<Result<_>>()?;
        let hi: Vec<ExtInt> = (0..n).map(|s| upper[s].add_int(-w1[s])).collect::<Result<_>>()?;
        let Some(bx) = w_window.clip(&lo, &hi) else { continue };
        for w2 in bx.points() {
            if lovasz_extension(p2, &w2)? != Fin(dot(&w2, &z)?) {
                continue;
            }
            let v = objective(&w1, &w2)?;
            if v == pv {
                found = Some((v, w1, w2));
                break 'outer;
            }
        }
    }
    if found.is_none() {
        rep.notes.push("no split matches the primal minimizer; scanned the full window".into());
        for w1 in w_window.points() {
            for w2 in w_window.points() {
                let v = objective(&w1, &w2)?;
                if v != MinusInf && found.as_ref().is_none_or(|(b, _, _)| v > *b) {
                    found = Some((v, w1.clone(), w2));
                }
            }
        }
    }
    let mut square_sum_value = None;
    if let Some((v, w1, w2)) = found {
        rep.dual_value = v;
        if is_square_sum(phi) {
            square_sum_value = Some(square_sum_dual_m2(p1, p2, &w1, &w2)?);
        }
        rep.dual_witness = DualWitness::Split(w1, w2);
    }
    rep.status = SearchStatus::Exact;
    rep.set_equality();
    Ok(M2Report { report: rep, square_sum_value })
}

/// Box containing `B'(p1) ∩ B'(p2) ∩ dom Φ`, or `None` when unbounded.
fn intersection_window(p1: &SupermodularFn, p2: &SupermodularFn, phi: &SeparableConvex) -> Result<Option<Window>> {
    let b1 = p1.coordinate_bounds()?;
    let b2 = p2.coordinate_bounds()?;
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for s in 0..p1.n {
        let (dl, dh) = phi.parts[s].domain()?;
        let l = b1[s].0.max(b2[s].0).max(dl);
        let h = b1[s].1.min(b2[s].1).min(dh);
        match (l, h) {
            (Fin(a), Fin(b)) if a <= b => {
                lo.push(a);
                hi.push(b);
            }
            (Fin(_), Fin(_)) => return Ok(None),
            _ => return Err(Error::InvalidInput("intersection is unbounded; bound it through dom Φ".into())),
        }
    }
    Ok(Some(Window { lo, hi }))
}

/// JSON summary of a certificate, used by the CLI.
pub fn certificate_json(cert: &DualCertificate) -> serde_json::Value {
    json!({
        "w_star": cert.w.iter().map(|&v| v as i64).collect::<Vec<_>>(),
        "infinite_slope": cert.infinite_slope,
    })
}
