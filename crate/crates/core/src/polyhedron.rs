//! Integral linear systems `[Q'x ≥ p', Q⁼x = p⁼]` at desk scale.
//!
//! Integer points are enumerated inside finite windows. Linear programs are
//! solved exactly by enumerating basic solutions of the system. Dual searches
//! run over bounded boxes of row multipliers (or costs) and record the bounds
//! they used.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use itertools::Itertools;
use serde_json::{json, Value};

use crate::conjugate::{check_len, SeparableConvex};
use crate::error::{Error, Result};
use crate::extint::{cadd, cmul, csub, dot, ExtInt, Fin, MinusInf, PlusInf};
use crate::rational::{self, rat, ExtRat, Rat};

/// Default multiplier bound of [`dual_search_bruteforce`].
pub const DEFAULT_Y_BOUND: i128 = 6;
/// Default half-width of the cost window of [`mu_form_dual_search`].
pub const DEFAULT_W_RADIUS: i128 = 6;
/// Default node budget of the branch-and-bound dual search.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;
/// Largest number of row subsets a basis enumeration may visit.
pub const BASIS_CAP: u128 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    Geq,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    pub coeffs: Vec<i128>,
    pub rhs: i128,
    pub kind: RowKind,
}

impl Row {
    pub fn geq(coeffs: Vec<i128>, rhs: i128) -> Self {
        Row { coeffs, rhs, kind: RowKind::Geq }
    }

    pub fn eq(coeffs: Vec<i128>, rhs: i128) -> Self {
        Row { coeffs, rhs, kind: RowKind::Eq }
    }

    /// `row·x − rhs`.
    pub fn slack(&self, x: &[i128]) -> Result<i128> {
        csub(dot(&self.coeffs, x)?, self.rhs)
    }

    pub fn holds(&self, x: &[i128]) -> Result<bool> {
        let s = self.slack(x)?;
        Ok(match self.kind {
            RowKind::Geq => s >= 0,
            RowKind::Eq => s == 0,
        })
    }

    /// Whether the rational point `num / den` (`den > 0`) satisfies the row.
    fn holds_rat(&self, num: &[i128], den: i128) -> Result<bool> {
        let s = csub(dot(&self.coeffs, num)?, cmul(self.rhs, den)?)?;
        Ok(match self.kind {
            RowKind::Geq => s >= 0,
            RowKind::Eq => s == 0,
        })
    }
}

/// An integral linear system over a named ground set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearSystem {
    pub elements: Vec<String>,
    pub rows: Vec<Row>,
}

impl LinearSystem {
    pub fn new(elements: Vec<String>, rows: Vec<Row>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidInput("a system needs at least one element".into()));
        }
        if rows.is_empty() {
            return Err(Error::InvalidInput("a system needs at least one row".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.coeffs.len() != elements.len() {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} coefficients for {} elements",
                    r.coeffs.len(),
                    elements.len()
                )));
            }
        }
        Ok(LinearSystem { elements, rows })
    }

    /// Elements named `"1"`, ..., `"n"`.
    pub fn numbered(n: usize, rows: Vec<Row>) -> Result<Self> {
        LinearSystem::new((1..=n).map(|i| i.to_string()).collect(), rows)
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: &[i128]) -> Result<bool> {
        check_len(self.n(), x.len())?;
        for r in &self.rows {
            if !r.holds(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `yQ`.
    pub fn y_q(&self, y: &[i128]) -> Result<Vec<i128>> {
        check_len(self.rows.len(), y.len())?;
        let mut w = vec![0i128; self.n()];
        for (r, &yi) in self.rows.iter().zip(y) {
            if yi == 0 {
                continue;
            }
            for (ws, &q) in w.iter_mut().zip(&r.coeffs) {
                *ws = cadd(*ws, cmul(yi, q)?)?;
            }
        }
        Ok(w)
    }

    /// `yp`.
    pub fn y_p(&self, y: &[i128]) -> Result<i128> {
        check_len(self.rows.len(), y.len())?;
        let mut acc = 0i128;
        for (r, &yi) in self.rows.iter().zip(y) {
            acc = cadd(acc, cmul(yi, r.rhs)?)?;
        }
        Ok(acc)
    }

    /// First row where `y` has the wrong sign, if any.
    pub fn sign_violation(&self, y: &[i128]) -> Option<usize> {
        self.rows.iter().zip(y).position(|(r, &yi)| r.kind == RowKind::Geq && yi < 0)
    }

    fn geq_indices(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.rows[i].kind == RowKind::Geq).collect()
    }

    fn eq_indices(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.rows[i].kind == RowKind::Eq).collect()
    }
}

/// A finite integer box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: Vec<i128>,
    pub hi: Vec<i128>,
}

impl Window {
    pub fn new(lo: Vec<i128>, hi: Vec<i128>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::InvalidInput("window bounds differ in length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidInput("window needs lo <= hi".into()));
        }
        Ok(Window { lo, hi })
    }

    pub fn uniform(n: usize, lo: i128, hi: i128) -> Result<Self> {
        Window::new(vec![lo; n], vec![hi; n])
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    /// Number of integer points.
    pub fn size(&self) -> u128 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a + 1) as u128)
            .fold(1u128, |acc, k| acc.saturating_mul(k))
    }

    pub fn contains(&self, x: &[i128]) -> bool {
        x.len() == self.len() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| a <= v && v <= b)
    }

    /// All integer points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Vec<i128>> + '_ {
        self.lo.iter().zip(&self.hi).map(|(&a, &b)| a..=b).multi_cartesian_product()
    }

    /// Intersection with `[l, u]`; `None` when empty.
    pub fn clip(&self, l: &[ExtInt], u: &[ExtInt]) -> Option<Window> {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        for s in 0..self.len() {
            if let Fin(v) = l[s] {
                lo[s] = lo[s].max(v);
            }
            if let Fin(v) = u[s] {
                hi[s] = hi[s].min(v);
            }
            if l[s] == PlusInf || u[s] == MinusInf || lo[s] > hi[s] {
                return None;
            }
        }
        Some(Window { lo, hi })
    }
}

/// The dual side of a min-max report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualWitness {
    None,
    /// Row multipliers `y`.
    Rows(Vec<i128>),
    /// A cost vector `w`.
    Cost(Vec<i128>),
    /// A weight split `(w1, w2)`.
    Split(Vec<i128>, Vec<i128>),
    /// Node potentials.
    Potential(Vec<i128>),
    /// A point of a cone.
    Point(Vec<i128>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    /// The search covered its whole range (or stopped at a proven optimum).
    Exact,
    /// A budget ran out before the range was covered.
    Inconclusive,
}

/// Both sides of a min-max formula together with the bounds used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinMaxReport {
    pub primal_value: ExtInt,
    pub dual_value: ExtInt,
    pub primal_witness: Option<Vec<i128>>,
    pub dual_witness: DualWitness,
    pub equality: bool,
    pub support_size: Option<usize>,
    /// Whether a maximizer with support at most `2|S|` exists within the bound.
    pub support_within_bound: Option<bool>,
    pub status: SearchStatus,
    pub bounds: BTreeMap<String, Value>,
    pub notes: Vec<String>,
}

impl Default for MinMaxReport {
    fn default() -> Self {
        MinMaxReport {
            primal_value: PlusInf,
            dual_value: MinusInf,
            primal_witness: None,
            dual_witness: DualWitness::None,
            equality: false,
            support_size: None,
            support_within_bound: None,
            status: SearchStatus::Exact,
            bounds: BTreeMap::new(),
            notes: Vec::new(),
        }
    }
}

impl MinMaxReport {
    pub fn set_equality(&mut self) {
        self.equality = self.primal_value.is_finite() && self.primal_value == self.dual_value;
    }

    pub fn bound(&mut self, key: &str, v: Value) {
        self.bounds.insert(key.to_string(), v);
    }
}

/// All points of `⊙R` inside `win`, in lexicographic order.
pub fn enumerate_integer_points(sys: &LinearSystem, win: &Window) -> Result<Vec<Vec<i128>>> {
    let mut out = Vec::new();
    for_each_integer_point(sys, win, |x| {
        out.push(x.to_vec());
        Ok(())
    })?;
    Ok(out)
}

/// Visits the points of `⊙R ∩ win` in lexicographic order.
///
/// Coordinates are assigned left to right and a branch is cut as soon as
/// some row cannot be met by any completion inside the window.
pub fn for_each_integer_point<F>(sys: &LinearSystem, win: &Window, mut f: F) -> Result<()>
where
    F: FnMut(&[i128]) -> Result<()>,
{
    let n = sys.n();
    check_len(n, win.len())?;
    // rem[i][j] = (min, max) of Σ_{t ≥ j} q_it x_t over the window
    let mut rem = Vec::with_capacity(sys.rows.len());
    for r in &sys.rows {
        let mut v = vec![(0i128, 0i128); n + 1];
        for j in (0..n).rev() {
            let a = cmul(r.coeffs[j], win.lo[j])?;
            let b = cmul(r.coeffs[j], win.hi[j])?;
            v[j] = (cadd(v[j + 1].0, a.min(b))?, cadd(v[j + 1].1, a.max(b))?);
        }
        rem.push(v);
    }
    let mut x = win.lo.clone();
    let mut partial = vec![0i128; sys.rows.len()];
    fn rec<F: FnMut(&[i128]) -> Result<()>>(
        sys: &LinearSystem,
        win: &Window,
        rem: &[Vec<(i128, i128)>],
        j: usize,
        x: &mut Vec<i128>,
        partial: &mut Vec<i128>,
        f: &mut F,
    ) -> Result<()> {
        for (i, r) in sys.rows.iter().enumerate() {
            let lo = cadd(partial[i], rem[i][j].0)?;
            let hi = cadd(partial[i], rem[i][j].1)?;
            let ok = match r.kind {
                RowKind::Geq => hi >= r.rhs,
                RowKind::Eq => lo <= r.rhs && r.rhs <= hi,
            };
            if !ok {
                return Ok(());
            }
        }
        if j == x.len() {
            return f(x);
        }
        for v in win.lo[j]..=win.hi[j] {
            x[j] = v;
            for (i, r) in sys.rows.iter().enumerate() {
                partial[i] = cadd(partial[i], cmul(r.coeffs[j], v)?)?;
            }
            rec(sys, win, rem, j + 1, x, partial, f)?;
            for (i, r) in sys.rows.iter().enumerate() {
                partial[i] -= r.coeffs[j] * v;
            }
        }
        Ok(())
    }
    rec(sys, win, &rem, 0, &mut x, &mut partial, &mut f)
}

/// A rational point `num / den` with `den > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoint {
    pub num: Vec<i128>,
    pub den: i128,
}

impl RatPoint {
    pub fn to_rats(&self) -> Vec<Rat> {
        rational::to_rats(&self.num, self.den)
    }

    pub fn is_integral(&self) -> bool {
        self.num.iter().all(|x| x % self.den == 0)
    }

    fn cmp_lex(&self, other: &RatPoint) -> Ordering {
        for (a, b) in self.num.iter().zip(&other.num) {
            let o = (a * other.den).cmp(&(b * self.den));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }
}

/// Exact vertex/ray description of `R = {x : Q'x ≥ p', Q⁼x = p⁼}`.
///
/// The lineality space is split off first, so the remaining polyhedron is
/// pointed and is described by its basic feasible solutions and extreme rays.
#[derive(Debug, Clone)]
pub struct VRep {
    pub n: usize,
    pub vertices: Vec<RatPoint>,
    pub rays: Vec<Vec<i128>>,
    pub lineality: Vec<Vec<i128>>,
}

fn binom(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((m - i) as u128) / (i as u128 + 1);
    }
    acc
}

impl VRep {
    pub fn new(sys: &LinearSystem) -> Result<Self> {
        let n = sys.n();
        let all: Vec<Vec<i128>> = sys.rows.iter().map(|r| r.coeffs.clone()).collect();
        let lineality = rational::nullspace(&all, n)?;
        // equality part: EQ rows plus d·x = 0 for each lineality direction
        let mut eq_rows: Vec<(Vec<i128>, i128)> =
            sys.eq_indices().into_iter().map(|i| (sys.rows[i].coeffs.clone(), sys.rows[i].rhs)).collect();
        eq_rows.extend(lineality.iter().map(|d| (d.clone(), 0)));
        let eq_mat: Vec<Vec<i128>> = eq_rows.iter().map(|(c, _)| c.clone()).collect();
        let basis_eq: Vec<(Vec<i128>, i128)> =
            rational::independent_subset(&eq_mat, n)?.into_iter().map(|i| eq_rows[i].clone()).collect();
        let r = basis_eq.len();
        let geq = sys.geq_indices();
        let k = n - r;
        if binom(geq.len(), k) > BASIS_CAP {
            return Err(Error::DegenerateSystem("basis enumeration exceeds the cap".into()));
        }
        let mut vertices: Vec<RatPoint> = Vec::new();
        for g in geq.iter().copied().combinations(k) {
            let mut a: Vec<Vec<i128>> = basis_eq.iter().map(|(c, _)| c.clone()).collect();
            let mut b: Vec<i128> = basis_eq.iter().map(|(_, p)| *p).collect();
            for &i in &g {
                a.push(sys.rows[i].coeffs.clone());
                b.push(sys.rows[i].rhs);
            }
            let Some((num, den)) = rational::solve_square(&a, &b)? else { continue };
            let mut ok = true;
            for row in &sys.rows {
                if !row.holds_rat(&num, den)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                let p = RatPoint { num, den };
                if !vertices.contains(&p) {
                    vertices.push(p);
                }
            }
        }
        let mut rays: Vec<Vec<i128>> = Vec::new();
        if k >= 1 {
            for g in geq.iter().copied().combinations(k - 1) {
                let mut a: Vec<Vec<i128>> = basis_eq.iter().map(|(c, _)| c.clone()).collect();
                for &i in &g {
                    a.push(sys.rows[i].coeffs.clone());
                }
                let ns = rational::nullspace(&a, n)?;
                if ns.len() != 1 {
                    continue;
                }
                for sign in [1i128, -1] {
                    let d: Vec<i128> = ns[0].iter().map(|x| x * sign).collect();
                    let mut ok = true;
                    for &i in &geq {
                        if dot(&sys.rows[i].coeffs, &d)? < 0 {
                            ok = false;
                            break;
                        }
                    }
                    if ok && !rays.contains(&d) {
                        rays.push(d);
                    }
                }
            }
        }
        Ok(VRep { n, vertices, rays, lineality })
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `min{wx : x ∈ R}` as `num / den`, or an infinity.
    pub fn min_value(&self, w: &[i128]) -> Result<MuValue> {
        check_len(self.n, w.len())?;
        if self.vertices.is_empty() {
            return Ok(MuValue::Infeasible);
        }
        for d in self.lineality.iter().chain(&self.rays) {
            let wd = dot(w, d)?;
            if wd < 0 || (wd != 0 && self.lineality.contains(d)) {
                return Ok(MuValue::Unbounded);
            }
        }
        let mut best: Option<(i128, i128, usize)> = None;
        for (idx, v) in self.vertices.iter().enumerate() {
            let val = dot(w, &v.num)?;
            let better = match best {
                None => true,
                Some((bn, bd, bi)) => {
                    let o = cmul(val, bd)?.cmp(&cmul(bn, v.den)?);
                    o == Ordering::Less || (o == Ordering::Equal && v.cmp_lex(&self.vertices[bi]) == Ordering::Less)
                }
            };
            if better {
                best = Some((val, v.den, idx));
            }
        }
        let (num, den, idx) = best.expect("nonempty vertex list");
        let g = rational::gcd(num, den).max(1);
        Ok(MuValue::Value { num: num / g, den: den / g, argmin: idx })
    }
}

/// Outcome of an exact linear minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuValue {
    Infeasible,
    Unbounded,
    /// `num / den` (reduced, `den > 0`), attained at vertex `argmin`.
    Value { num: i128, den: i128, argmin: usize },
}

/// Exact LP optimum with a (lexicographically least) optimal vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpResult {
    pub value: ExtRat,
    pub argmin: Option<Vec<Rat>>,
}

/// `μ_R(w) = min{wx : x ∈ R}` by exhaustive basic-solution enumeration.
pub fn lp_min(sys: &LinearSystem, w: &[i128]) -> Result<LpResult> {
    let vrep = VRep::new(sys)?;
    lp_min_with(&vrep, w)
}

pub fn lp_min_with(vrep: &VRep, w: &[i128]) -> Result<LpResult> {
    Ok(match vrep.min_value(w)? {
        MuValue::Infeasible => LpResult { value: ExtRat::PlusInf, argmin: None },
        MuValue::Unbounded => LpResult { value: ExtRat::MinusInf, argmin: None },
        MuValue::Value { num, den, argmin } => {
            LpResult { value: ExtRat::Fin(rat(num, den)), argmin: Some(vrep.vertices[argmin].to_rats()) }
        }
    })
}

/// `Φ'(z−1) ≤ yQ ≤ Φ'(z)` componentwise.
pub fn check_compatibility(sys: &LinearSystem, z: &[i128], y: &[i128], phi: &SeparableConvex) -> Result<bool> {
    check_len(sys.n(), z.len())?;
    let w = sys.y_q(y)?;
    Ok(phi.first_unfit(z, &w)?.is_none())
}

/// Checks feasibility, sign-feasibility, complementary slackness and
/// compatibility of `(z, y)`, then reports `Φ(z)` against `yp − Φ•(yQ)`.
pub fn verify_certificate(
    sys: &LinearSystem,
    z: &[i128],
    y: &[i128],
    phi: &SeparableConvex,
) -> Result<MinMaxReport> {
    check_len(sys.n(), z.len())?;
    check_len(sys.rows.len(), y.len())?;
    if !sys.contains(z)? {
        return Err(Error::NotPrimalFeasible);
    }
    if let Some(i) = sys.sign_violation(y) {
        return Err(Error::NotSignFeasible(i));
    }
    for (i, r) in sys.rows.iter().enumerate() {
        if y[i] != 0 && r.slack(z)? != 0 {
            return Err(Error::CriteriaViolated(format!("complementary slackness fails at row {i}")));
        }
    }
    let w = sys.y_q(y)?;
    if let Some(s) = phi.first_unfit(z, &w)? {
        return Err(Error::CriteriaViolated(format!(
            "compatibility fails at element {}",
            sys.elements[s]
        )));
    }
    let mut rep = MinMaxReport {
        primal_value: phi.eval(z)?,
        dual_value: dual_objective(sys, phi, y)?,
        primal_witness: Some(z.to_vec()),
        dual_witness: DualWitness::Rows(y.to_vec()),
        ..Default::default()
    };
    let support = y.iter().filter(|&&v| v != 0).count();
    rep.support_size = Some(support);
    rep.support_within_bound = Some(support <= 2 * sys.n());
    rep.set_equality();
    Ok(rep)
}

/// `yp − Φ•(yQ)`.
pub fn dual_objective(sys: &LinearSystem, phi: &SeparableConvex, y: &[i128]) -> Result<ExtInt> {
    let w = sys.y_q(y)?;
    Fin(sys.y_p(y)?).sub(phi.conjugate(&w)?)
}

/// Windowed minimum of `Φ` over `⊙R` with the lexicographically least argmin.
pub fn minimize_bruteforce(sys: &LinearSystem, phi: &SeparableConvex, win: &Window) -> Result<MinMaxReport> {
    check_len(sys.n(), phi.len())?;
    let mut best: Option<(ExtInt, Vec<i128>)> = None;
    for_each_integer_point(sys, win, |x| {
        let v = phi.eval(x)?;
        if v != PlusInf && best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, x.to_vec()));
        }
        Ok(())
    })?;
    let mut rep = MinMaxReport::default();
    if let Some((v, x)) = best {
        rep.primal_value = v;
        rep.primal_witness = Some(x);
    }
    rep.bound("window", window_json(win));
    Ok(rep)
}

pub fn window_json(win: &Window) -> Value {
    json!({"lo": win.lo.iter().map(|&v| v as i64).collect::<Vec<_>>(),
           "hi": win.hi.iter().map(|&v| v as i64).collect::<Vec<_>>()})
}

/// Half-width used for unbounded coordinates when a primal window is derived.
const PRIMAL_RADIUS: i128 = 4;
/// Largest derived primal window, in points.
const PRIMAL_WINDOW_CAP: u128 = 200_000;

/// A finite window for primal incumbents: coordinate bounds of `R` and of
/// `dom Φ` where finite, a small radius elsewhere.
pub fn primal_window(sys: &LinearSystem, vrep: &VRep, phi: &SeparableConvex) -> Result<Option<Window>> {
    let n = sys.n();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    let mut centre = Vec::with_capacity(n);
    for s in 0..n {
        let mut e = vec![0i128; n];
        e[s] = 1;
        let l = match vrep.min_value(&e)? {
            MuValue::Infeasible => return Ok(None),
            MuValue::Unbounded => MinusInf,
            MuValue::Value { num, den, .. } => Fin(num.div_euclid(den) + i128::from(num.rem_euclid(den) != 0)),
        };
        e[s] = -1;
        let h = match vrep.min_value(&e)? {
            MuValue::Infeasible => return Ok(None),
            MuValue::Unbounded => PlusInf,
            MuValue::Value { num, den, .. } => Fin((-num).div_euclid(den)),
        };
        let (dl, dh) = phi.parts[s].domain()?;
        let (l, h) = (l.max(dl), h.min(dh));
        let c = phi.parts[s].conjugate_argmax(0)?.1.unwrap_or(0);
        let (a, b) = match (l, h) {
            (Fin(a), Fin(b)) => (a, b),
            (Fin(a), _) => (a, a.max(c) + PRIMAL_RADIUS),
            (_, Fin(b)) => (b.min(c) - PRIMAL_RADIUS, b),
            _ => (c - PRIMAL_RADIUS, c + PRIMAL_RADIUS),
        };
        if a > b {
            return Ok(None);
        }
        lo.push(a);
        hi.push(b);
        centre.push(c.clamp(a, b));
    }
    let mut win = Window { lo, hi };
    while win.size() > PRIMAL_WINDOW_CAP {
        // shrink the widest coordinate from the side away from the minimizer of φ_s
        let s = (0..n).max_by_key(|&s| (win.hi[s] - win.lo[s], std::cmp::Reverse(s))).unwrap();
        let width = win.hi[s] - win.lo[s];
        if width == 0 {
            break;
        }
        let cut = width / 4 + 1;
        if centre[s] - win.lo[s] > win.hi[s] - centre[s] {
            win.lo[s] = (win.lo[s] + cut).min(centre[s]);
        } else {
            win.hi[s] = (win.hi[s] - cut).max(centre[s]);
        }
    }
    Ok(Some(win))
}

/// Options of the bounded dual searches.
#[derive(Debug, Clone)]
pub struct DualSearchOptions {
    pub y_bound: i128,
    /// Feasible points used for pruning bounds; derived from a window when empty.
    pub primal_hints: Vec<Vec<i128>>,
    pub node_budget: u64,
}

impl Default for DualSearchOptions {
    fn default() -> Self {
        DualSearchOptions { y_bound: DEFAULT_Y_BOUND, primal_hints: Vec::new(), node_budget: DEFAULT_NODE_BUDGET }
    }
}

/// Best feasible points (by `Φ`, then lexicographically) from the hints or
/// from a derived primal window. At most `keep` points are returned.
fn primal_candidates(
    sys: &LinearSystem,
    vrep: &VRep,
    phi: &SeparableConvex,
    hints: &[Vec<i128>],
    keep: usize,
) -> Result<Vec<(i128, Vec<i128>)>> {
    let mut cands: Vec<(i128, Vec<i128>)> = Vec::new();
    for h in hints {
        if sys.contains(h)? {
            if let Fin(v) = phi.eval(h)? {
                cands.push((v, h.clone()));
            }
        }
    }
    if cands.is_empty() {
        if let Some(win) = primal_window(sys, vrep, phi)? {
            for_each_integer_point(sys, &win, |x| {
                if let Fin(v) = phi.eval(x)? {
                    cands.push((v, x.to_vec()));
                }
                Ok(())
            })?;
        }
    }
    cands.sort();
    cands.dedup();
    cands.truncate(keep);
    Ok(cands)
}

/// `max{yp − Φ•(yQ)}` over sign-feasible integer `y` with `|y(i)| ≤ y_bound`.
pub fn dual_search_bruteforce(sys: &LinearSystem, phi: &SeparableConvex, y_bound: i128) -> Result<MinMaxReport> {
    dual_search_with(sys, phi, &DualSearchOptions { y_bound, ..Default::default() })
}

/// Bounded dual search by exact branch and bound.
///
/// For every `x` and every `y`, `yp − Φ•(yQ) ≤ Φ(x) + y(p − Qx)`. With `x`
/// feasible this bounds every completion of a partial `y`, which prunes the
/// lexicographic enumeration of the box. When a feasible `x` is already
/// matched by some `y`, that `y` is optimal and only the lexicographically
/// least one among multipliers compatible with `x` is searched.
pub fn dual_search_with(sys: &LinearSystem, phi: &SeparableConvex, opts: &DualSearchOptions) -> Result<MinMaxReport> {
    check_len(sys.n(), phi.len())?;
    if opts.y_bound < 0 {
        return Err(Error::InvalidInput("y_bound must be nonnegative".into()));
    }
    let k = opts.y_bound;
    let m = sys.rows.len();
    let lo: Vec<i128> = sys.rows.iter().map(|r| if r.kind == RowKind::Geq { 0 } else { -k }).collect();
    let hi = vec![k; m];
    let vrep = VRep::new(sys)?;
    let cands = primal_candidates(sys, &vrep, phi, &opts.primal_hints, 8)?;
    let mut rep = MinMaxReport::default();
    rep.bound("y_bound", json!(k as i64));
    rep.bound("node_budget", json!(opts.node_budget));
    if let Some((v, x)) = cands.first() {
        rep.primal_value = Fin(*v);
        rep.primal_witness = Some(x.clone());
        rep.notes.push("primal side is the best feasible point among the pruning candidates".into());
        // fast path: multipliers compatible with x and complementary to it
        let (dlo, dhi) = complementary_box(sys, x, &lo, &hi)?;
        let lower = phi.lower_derivative(x)?;
        let upper = phi.upper_derivative(x)?;
        let mut budget = opts.node_budget;
        if let Some(y) = fitting_multipliers(sys, &dlo, &dhi, &lower, &upper, None, &mut budget)? {
            let val = dual_objective(sys, phi, &y)?;
            debug_assert_eq!(val, Fin(*v));
            finish_dual(&mut rep, sys, y, val);
            let support_ok = rep.support_size.unwrap() <= 2 * sys.n()
                || fitting_multipliers(sys, &dlo, &dhi, &lower, &upper, Some(2 * sys.n()), &mut budget)?.is_some();
            rep.support_within_bound = Some(support_ok);
            rep.set_equality();
            return Ok(rep);
        }
    }
    // full branch and bound over the box
    let mut bb = BranchBound::new(sys, phi, &cands, lo, hi, opts.node_budget)?;
    bb.run()?;
    if bb.exhausted {
        rep.status = SearchStatus::Inconclusive;
        rep.notes.push("node budget exhausted; dual value is a lower bound on the boxed maximum".into());
    }
    if let Some((val, y)) = bb.best {
        finish_dual(&mut rep, sys, y, val);
        if rep.support_size.unwrap() > 2 * sys.n() {
            rep.support_within_bound = None;
            rep.notes.push("support bound not checked on the branch-and-bound path".into());
        }
    }
    rep.set_equality();
    Ok(rep)
}

fn finish_dual(rep: &mut MinMaxReport, sys: &LinearSystem, y: Vec<i128>, val: ExtInt) {
    let support = y.iter().filter(|&&v| v != 0).count();
    rep.dual_value = val;
    rep.support_size = Some(support);
    rep.support_within_bound = Some(support <= 2 * sys.n());
    rep.dual_witness = DualWitness::Rows(y);
}

/// Multiplier box with every GEQ row that is slack at `x` fixed to zero.
fn complementary_box(sys: &LinearSystem, x: &[i128], lo: &[i128], hi: &[i128]) -> Result<(Vec<i128>, Vec<i128>)> {
    let mut dlo = lo.to_vec();
    let mut dhi = hi.to_vec();
    for (i, r) in sys.rows.iter().enumerate() {
        if r.kind == RowKind::Geq && r.slack(x)? != 0 {
            dlo[i] = 0;
            dhi[i] = 0;
        }
    }
    Ok((dlo, dhi))
}

/// Lexicographically least integer `y` in `[lo, hi]` with
/// `lower ≤ yQ ≤ upper`, optionally with at most `max_support` nonzeros.
pub(crate) fn fitting_multipliers(
    sys: &LinearSystem,
    lo: &[i128],
    hi: &[i128],
    lower: &[ExtInt],
    upper: &[ExtInt],
    max_support: Option<usize>,
    budget: &mut u64,
) -> Result<Option<Vec<i128>>> {
    let m = sys.rows.len();
    let n = sys.n();
    // suffix ranges of Σ_{i ≥ j} y_i q_is
    let mut rmin = vec![vec![0i128; n]; m + 1];
    let mut rmax = vec![vec![0i128; n]; m + 1];
    for j in (0..m).rev() {
        for s in 0..n {
            let q = sys.rows[j].coeffs[s];
            let a = cmul(lo[j], q)?;
            let b = cmul(hi[j], q)?;
            rmin[j][s] = cadd(rmin[j + 1][s], a.min(b))?;
            rmax[j][s] = cadd(rmax[j + 1][s], a.max(b))?;
        }
    }
    struct Ctx<'a> {
        sys: &'a LinearSystem,
        lo: &'a [i128],
        hi: &'a [i128],
        lower: &'a [ExtInt],
        upper: &'a [ExtInt],
        rmin: Vec<Vec<i128>>,
        rmax: Vec<Vec<i128>>,
        max_support: Option<usize>,
        /// Partial states `(j, w, support)` known to have no completion.
        dead: HashSet<(usize, Vec<i128>, usize)>,
    }
    fn rec(c: &mut Ctx, j: usize, y: &mut Vec<i128>, w: &mut Vec<i128>, support: usize, budget: &mut u64) -> Result<bool> {
        if *budget == 0 {
            return Ok(false);
        }
        *budget -= 1;
        if let Some(ms) = c.max_support {
            if support > ms {
                return Ok(false);
            }
        }
        for s in 0..w.len() {
            if Fin(w[s] + c.rmax[j][s]) < c.lower[s] || Fin(w[s] + c.rmin[j][s]) > c.upper[s] {
                return Ok(false);
            }
        }
        if j == y.len() {
            return Ok(true);
        }
        let key = (j, w.clone(), if c.max_support.is_some() { support } else { 0 });
        if c.dead.contains(&key) {
            return Ok(false);
        }
        for v in c.lo[j]..=c.hi[j] {
            y[j] = v;
            for (ws, &q) in w.iter_mut().zip(&c.sys.rows[j].coeffs) {
                *ws += v * q;
            }
            let found = rec(c, j + 1, y, w, support + usize::from(v != 0), budget)?;
            for (ws, &q) in w.iter_mut().zip(&c.sys.rows[j].coeffs) {
                *ws -= v * q;
            }
            if found {
                return Ok(true);
            }
        }
        y[j] = 0;
        // a subtree cut short by the budget proves nothing
        if *budget > 0 {
            c.dead.insert(key);
        }
        Ok(false)
    }
    let mut ctx = Ctx { sys, lo, hi, lower, upper, rmin, rmax, max_support, dead: HashSet::new() };
    let mut y = vec![0i128; m];
    let mut w = vec![0i128; n];
    if rec(&mut ctx, 0, &mut y, &mut w, 0, budget)? {
        Ok(Some(y))
    } else {
        Ok(None)
    }
}

struct BranchBound<'a> {
    sys: &'a LinearSystem,
    phi: &'a SeparableConvex,
    lo: Vec<i128>,
    hi: Vec<i128>,
    /// Φ(x) per candidate.
    base: Vec<i128>,
    /// s[c][i] = p_i − Q_i x_c.
    s: Vec<Vec<i128>>,
    /// suffix[c][j] = Σ_{i ≥ j} max(lo_i s_ci, hi_i s_ci).
    suffix: Vec<Vec<i128>>,
    budget: u64,
    exhausted: bool,
    best: Option<(ExtInt, Vec<i128>)>,
}

impl<'a> BranchBound<'a> {
    fn new(
        sys: &'a LinearSystem,
        phi: &'a SeparableConvex,
        cands: &[(i128, Vec<i128>)],
        lo: Vec<i128>,
        hi: Vec<i128>,
        budget: u64,
    ) -> Result<Self> {
        let m = sys.rows.len();
        let mut base = Vec::new();
        let mut s = Vec::new();
        let mut suffix = Vec::new();
        for (v, x) in cands {
            let sc: Vec<i128> = sys.rows.iter().map(|r| r.slack(x).map(|t| -t)).collect::<Result<_>>()?;
            let mut suf = vec![0i128; m + 1];
            for j in (0..m).rev() {
                suf[j] = cadd(suf[j + 1], cmul(lo[j], sc[j])?.max(cmul(hi[j], sc[j])?))?;
            }
            base.push(*v);
            s.push(sc);
            suffix.push(suf);
        }
        Ok(BranchBound { sys, phi, lo, hi, base, s, suffix, budget, exhausted: false, best: None })
    }

    fn run(&mut self) -> Result<()> {
        let m = self.sys.rows.len();
        let mut y = vec![0i128; m];
        let mut acc = vec![0i128; self.base.len()];
        self.rec(0, &mut y, &mut acc)
    }

    fn rec(&mut self, j: usize, y: &mut Vec<i128>, acc: &mut Vec<i128>) -> Result<()> {
        if self.budget == 0 {
            self.exhausted = true;
            return Ok(());
        }
        self.budget -= 1;
        if let Some((b, _)) = &self.best {
            let mut ub = PlusInf;
            for c in 0..self.base.len() {
                ub = ub.min(Fin(cadd(cadd(self.base[c], acc[c])?, self.suffix[c][j])?));
            }
            if ub <= *b {
                return Ok(());
            }
        }
        if j == y.len() {
            let v = dual_objective(self.sys, self.phi, y)?;
            if self.best.as_ref().is_none_or(|(b, _)| v > *b) {
                self.best = Some((v, y.clone()));
            }
            return Ok(());
        }
        for v in self.lo[j]..=self.hi[j] {
            y[j] = v;
            for c in 0..acc.len() {
                acc[c] += v * self.s[c][j];
            }
            self.rec(j + 1, y, acc)?;
            for c in 0..acc.len() {
                acc[c] -= v * self.s[c][j];
            }
            if self.exhausted {
                break;
            }
        }
        y[j] = 0;
        Ok(())
    }
}

/// `max{μ_R(w) − Φ•(w)}` over integral `w` in `w_window`.
///
/// `μ_R(w) − Φ•(w) ≤ wx − Φ•(w) ≤ Φ(x)` for feasible `x`, with equality
/// in the second step exactly when `(x, w)` is Φ-fitting. When some `w`
/// reaches `Φ(x)` the scan is therefore confined to the fitting box of `x`.
pub fn mu_form_dual_search(sys: &LinearSystem, phi: &SeparableConvex, w_window: &Window) -> Result<MinMaxReport> {
    mu_form_dual_search_with(sys, phi, w_window, &[])
}

pub fn mu_form_dual_search_with(
    sys: &LinearSystem,
    phi: &SeparableConvex,
    w_window: &Window,
    hints: &[Vec<i128>],
) -> Result<MinMaxReport> {
    check_len(sys.n(), phi.len())?;
    check_len(sys.n(), w_window.len())?;
    let vrep = VRep::new(sys)?;
    let cands = primal_candidates(sys, &vrep, phi, hints, 8)?;
    let mut rep = MinMaxReport::default();
    rep.bound("w_window", window_json(w_window));
    let mut fractional = false;
    let mut value_of = |w: &[i128]| -> Result<Option<Rat>> {
        let conj = phi.conjugate(w)?;
        let Fin(c) = conj else { return Ok(None) };
        match vrep.min_value(w)? {
            MuValue::Value { num, den, .. } => {
                if den != 1 {
                    fractional = true;
                }
                Ok(Some(rat(num, den) - rational::rat_int(c)))
            }
            _ => Ok(None),
        }
    };
    if let Some((v, x)) = cands.first() {
        rep.primal_value = Fin(*v);
        rep.primal_witness = Some(x.clone());
        let lower = phi.lower_derivative(x)?;
        let upper = phi.upper_derivative(x)?;
        let target = rational::rat_int(*v);
        if let Some(bx) = w_window.clip(&lower, &upper) {
            for w in bx.points() {
                if value_of(&w)?.as_ref() == Some(&target) {
                    rep.dual_value = Fin(*v);
                    rep.dual_witness = DualWitness::Cost(w);
                    rep.set_equality();
                    return Ok(rep);
                }
            }
        }
    }
    let mut best: Option<(Rat, Vec<i128>)> = None;
    for w in w_window.points() {
        if let Some(best_val) = best.as_ref().map(|b| b.0.clone()) {
            // wx − Φ•(w) bounds the value at w for every candidate x
            let conj = phi.conjugate(&w)?;
            let Fin(c) = conj else { continue };
            let mut ub: Option<i128> = None;
            for (_, x) in &cands {
                let t = csub(dot(&w, x)?, c)?;
                ub = Some(ub.map_or(t, |u: i128| u.min(t)));
            }
            if let Some(u) = ub {
                if rational::rat_int(u) <= best_val {
                    continue;
                }
            }
        }
        if let Some(val) = value_of(&w)? {
            if best.as_ref().is_none_or(|(b, _)| val > *b) {
                best = Some((val, w));
            }
        }
    }
    if let Some((val, w)) = best {
        rep.dual_value = match ExtRat::Fin(val.clone()).as_int() {
            Some(v) => Fin(v),
            None => {
                rep.notes.push(format!("maximum is fractional: {}", rational::rat_string(&val)));
                Fin(i128::try_from(val.floor().to_integer()).map_err(|_| Error::Overflow)?)
            }
        };
        rep.dual_witness = DualWitness::Cost(w);
    }
    if fractional {
        rep.notes.push("some μ_R(w) values in the window are fractional".into());
    }
    rep.set_equality();
    Ok(rep)
}

/// Sum of `ExtInt` entries over a subset.
fn subset_sum(v: &[ExtInt], set: &[usize]) -> Result<ExtInt> {
    ExtInt::sum(set.iter().map(|&s| v[s]))
}

/// A disjoint pair `(S⁻, S⁺)` of element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetPair {
    pub minus: Vec<usize>,
    pub plus: Vec<usize>,
}

/// Scans all disjoint pairs `(S⁻, S⁺)` with `z* + χ_{S⁺} − χ_{S⁻} ∈ R` and
/// reports the first with `ℓ̃(S⁻) > ũ(S⁺)`.
///
/// Pairs are visited in base-3 order with element 0 as the least
/// significant digit (0: neither, 1: in `S⁻`, 2: in `S⁺`).
pub fn feasibility_condition(
    sys: &LinearSystem,
    z_star: &[i128],
    ell: &[ExtInt],
    u: &[ExtInt],
) -> Result<(bool, Option<SetPair>)> {
    let n = sys.n();
    check_len(n, z_star.len())?;
    check_len(n, ell.len())?;
    check_len(n, u.len())?;
    if !sys.contains(z_star)? {
        return Err(Error::NotPrimalFeasible);
    }
    if n > 16 {
        return Err(Error::InvalidInput("pair scan limited to 16 elements".into()));
    }
    let total = 3u64.pow(n as u32);
    let mut zp = z_star.to_vec();
    for code in 0..total {
        let mut c = code;
        let mut minus = Vec::new();
        let mut plus = Vec::new();
        for s in 0..n {
            match c % 3 {
                1 => minus.push(s),
                2 => plus.push(s),
                _ => {}
            }
            c /= 3;
        }
        zp.copy_from_slice(z_star);
        for &s in &minus {
            zp[s] -= 1;
        }
        for &s in &plus {
            zp[s] += 1;
        }
        if !sys.contains(&zp)? {
            continue;
        }
        if subset_sum(ell, &minus)? > subset_sum(u, &plus)? {
            return Ok((false, Some(SetPair { minus, plus })));
        }
    }
    Ok((true, None))
}

/// First integral `w` (lexicographically) in `w_window ∩ [ℓ, u]` making
/// `z*` a `w`-minimizer over `R`.
pub fn find_weight_in_box(
    sys: &LinearSystem,
    z_star: &[i128],
    ell: &[ExtInt],
    u: &[ExtInt],
    w_window: &Window,
) -> Result<Option<Vec<i128>>> {
    check_len(sys.n(), z_star.len())?;
    if !sys.contains(z_star)? {
        return Err(Error::NotPrimalFeasible);
    }
    let vrep = VRep::new(sys)?;
    let Some(bx) = w_window.clip(ell, u) else { return Ok(None) };
    for w in bx.points() {
        if is_minimizer_with(&vrep, z_star, &w)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// `μ_R(w) = w·z0`.
pub fn is_minimizer_with(vrep: &VRep, z0: &[i128], w: &[i128]) -> Result<bool> {
    Ok(match vrep.min_value(w)? {
        MuValue::Value { num, den, .. } => cmul(dot(w, z0)?, den)? == num,
        _ => false,
    })
}

/// `{x : Qx ≥ kp}` (rhs of every row scaled by `k`).
pub fn dilation(sys: &LinearSystem, k: i128) -> Result<LinearSystem> {
    if k < 1 {
        return Err(Error::InvalidInput("dilation factor must be positive".into()));
    }
    let rows = sys
        .rows
        .iter()
        .map(|r| Ok(Row { coeffs: r.coeffs.clone(), rhs: cmul(r.rhs, k)?, kind: r.kind }))
        .collect::<Result<Vec<_>>>()?;
    Ok(LinearSystem { elements: sys.elements.clone(), rows })
}

/// A fractional vertex of `R ∩ [f, g]` for an integral box inside the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalWitness {
    pub f: Vec<i128>,
    pub g: Vec<i128>,
    pub vertex: Vec<Rat>,
}

/// Searches every integral box `[f, g] ⊆ win` for a fractional vertex of
/// `R ∩ [f, g]`.
///
/// A vertex of `R ∩ [f, g]` is the solution of a nonsingular choice of rows of
/// the system together with fixings `x_s = c_s` for some coordinate set `T`.
/// Conversely every such solution lying in `R` and in the hull of `win` is a
/// vertex of `R ∩ [f, g]` with `f = ⌊x⌋`, `g = ⌈x⌉` off `T`. Bases with
/// determinant ±1 always give integral solutions and are skipped.
pub fn probe_box_integer(sys: &LinearSystem, win: &Window) -> Result<(bool, Option<FractionalWitness>)> {
    let n = sys.n();
    check_len(n, win.len())?;
    let eq_mat: Vec<Vec<i128>> = sys.eq_indices().iter().map(|&i| sys.rows[i].coeffs.clone()).collect();
    let eq_idx: Vec<usize> =
        rational::independent_subset(&eq_mat, n)?.into_iter().map(|j| sys.eq_indices()[j]).collect();
    let r = eq_idx.len();
    let geq = sys.geq_indices();
    let mut visited: u128 = 0;
    for t in 0..(1usize << n) {
        let fixed: Vec<usize> = (0..n).filter(|s| t >> s & 1 == 1).collect();
        if fixed.len() + r > n {
            continue;
        }
        let k = n - r - fixed.len();
        visited = visited.saturating_add(binom(geq.len(), k));
        if visited > BASIS_CAP {
            return Err(Error::DegenerateSystem("box probe exceeds the basis cap".into()));
        }
        for g in geq.iter().copied().combinations(k) {
            let mut a: Vec<Vec<i128>> = eq_idx.iter().chain(&g).map(|&i| sys.rows[i].coeffs.clone()).collect();
            for &s in &fixed {
                let mut e = vec![0i128; n];
                e[s] = 1;
                a.push(e);
            }
            let Some(inv) = rational::inverse(&a)? else { continue };
            if inv.d == 1 {
                continue;
            }
            let base_rhs: Vec<i128> = eq_idx.iter().chain(&g).map(|&i| sys.rows[i].rhs).collect();
            let ranges: Vec<std::ops::RangeInclusive<i128>> = fixed.iter().map(|&s| win.lo[s]..=win.hi[s]).collect();
            let assignments: Box<dyn Iterator<Item = Vec<i128>>> =
                if ranges.is_empty() { Box::new(std::iter::once(Vec::new())) } else { Box::new(ranges.into_iter().multi_cartesian_product()) };
            for c in assignments {
                let mut rhs = base_rhs.clone();
                rhs.extend(&c);
                let num = inv.apply(&rhs)?;
                let d = inv.d;
                if num.iter().all(|x| x % d == 0) {
                    continue;
                }
                let inside = (0..n).all(|s| win.lo[s] * d <= num[s] && num[s] <= win.hi[s] * d);
                if !inside {
                    continue;
                }
                let mut feasible = true;
                for row in &sys.rows {
                    if !row.holds_rat(&num, d)? {
                        feasible = false;
                        break;
                    }
                }
                if !feasible {
                    continue;
                }
                let f: Vec<i128> = num.iter().map(|x| x.div_euclid(d)).collect();
                let gg: Vec<i128> = num.iter().map(|x| x.div_euclid(d) + i128::from(x.rem_euclid(d) != 0)).collect();
                let vertex = rational::to_rats(&num, d);
                return Ok((false, Some(FractionalWitness { f, g: gg, vertex })));
            }
        }
    }
    Ok((true, None))
}
