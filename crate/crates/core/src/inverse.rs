//! Inverse optimization: the least `Φ`-deviation cost `w` making a given
//! point a `w`-minimizer, and the cone dual `max{−Φ•(z) : z ∈ ⊙C₀}`.

use crate::conjugate::{check_len, SeparableConvex, UnivariateConvex};
use crate::error::{Error, Result};
use crate::extint::{dot, ExtInt, MinusInf, PlusInf};
use crate::polyhedron::{
    dilation, for_each_integer_point, is_minimizer_with, window_json, DualWitness, LinearSystem, MinMaxReport,
    Row, RowKind, SearchStatus, VRep, Window,
};

/// Half-width of the dual window on elements whose conjugate has unbounded domain.
pub const DEFAULT_Z_RADIUS: i128 = 6;

/// The tangent cone `{x : Q₀x ≥ 0, Q⁼x = 0}` at `base_point`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentCone {
    pub base_point: Vec<i128>,
    pub system: LinearSystem,
    /// Parent row index of each cone row.
    pub source_rows: Vec<usize>,
}

/// Rows tight at `z0` (all EQ rows included) with zero right-hand sides.
pub fn tangent_cone(sys: &LinearSystem, z0: &[i128]) -> Result<TangentCone> {
    check_len(sys.n(), z0.len())?;
    if !sys.contains(z0)? {
        return Err(Error::NotFeasible);
    }
    let mut rows = Vec::new();
    let mut source = Vec::new();
    for (i, r) in sys.rows.iter().enumerate() {
        if r.kind == RowKind::Eq || r.slack(z0)? == 0 {
            rows.push(Row { coeffs: r.coeffs.clone(), rhs: 0, kind: r.kind });
            source.push(i);
        }
    }
    Ok(TangentCone {
        base_point: z0.to_vec(),
        system: LinearSystem { elements: sys.elements.clone(), rows },
        source_rows: source,
    })
}

/// `μ_R(w) = w·z0`, by exact LP over the vertices and rays of `R`.
pub fn is_minimizer(sys: &LinearSystem, z0: &[i128], w: &[i128]) -> Result<bool> {
    check_len(sys.n(), z0.len())?;
    check_len(sys.n(), w.len())?;
    if !sys.contains(z0)? {
        return Err(Error::NotFeasible);
    }
    is_minimizer_with(&VRep::new(sys)?, z0, w)
}

/// `min{w·x : x ∈ ⊙R ∩ win} = w·z0`; the integer-only counterpart of
/// [`is_minimizer`] for systems that are not known to be box-TDI.
pub fn is_integer_minimizer(sys: &LinearSystem, z0: &[i128], w: &[i128], win: &Window) -> Result<bool> {
    let target = dot(w, z0)?;
    let mut ok = true;
    for_each_integer_point(sys, win, |x| {
        if dot(w, x)? < target {
            ok = false;
        }
        Ok(())
    })?;
    Ok(ok)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseInstance {
    pub parent: LinearSystem,
    pub targets: Vec<Vec<i128>>,
    pub deviation: SeparableConvex,
}

impl InverseInstance {
    /// Single-target form: the parent itself for one target, the dilation by
    /// the number of targets and their sum otherwise.
    pub fn reduced(&self) -> Result<(LinearSystem, Vec<i128>)> {
        dilate_targets(&self.parent, &self.targets)
    }
}

/// `(R_k, z₁ + ⋯ + z_k)` for `k` targets.
pub fn dilate_targets(sys: &LinearSystem, targets: &[Vec<i128>]) -> Result<(LinearSystem, Vec<i128>)> {
    if targets.is_empty() {
        return Err(Error::InvalidInput("at least one target is required".into()));
    }
    let mut sum = vec![0i128; sys.n()];
    for t in targets {
        check_len(sys.n(), t.len())?;
        if !sys.contains(t)? {
            return Err(Error::NotFeasible);
        }
        for (s, v) in sum.iter_mut().zip(t) {
            *s = crate::extint::cadd(*s, *v)?;
        }
    }
    Ok((dilation(sys, targets.len() as i128)?, sum))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseSolution {
    pub w: Vec<i128>,
    pub value: ExtInt,
}

/// Scans `w_window` for the cost of least deviation that makes the target a
/// minimizer; ties go to the lexicographically least `w`. Several targets
/// are reduced through [`dilate_targets`] first.
pub fn inverse_minimize(inst: &InverseInstance, w_window: &Window) -> Result<InverseSolution> {
    let (sys, z0) = inst.reduced()?;
    check_len(sys.n(), inst.deviation.len())?;
    check_len(sys.n(), w_window.len())?;
    let vrep = VRep::new(&sys)?;
    let mut best: Option<InverseSolution> = None;
    for w in w_window.points() {
        let v = inst.deviation.eval(&w)?;
        if v == PlusInf || best.as_ref().is_some_and(|b| v >= b.value) {
            continue;
        }
        if is_minimizer_with(&vrep, &z0, &w)? {
            best = Some(InverseSolution { w, value: v });
        }
    }
    best.ok_or(Error::NoFeasibleWeight)
}

/// Product of the domains of `φ•_s` where bounded, `±6` on unbounded sides.
pub fn default_z_window(deviation: &SeparableConvex) -> Result<Window> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for f in &deviation.parts {
        let (l, h) = conjugate_domain(f)?;
        lo.push(l.finite().unwrap_or(-DEFAULT_Z_RADIUS));
        hi.push(h.finite().unwrap_or(DEFAULT_Z_RADIUS));
    }
    Window::new(lo, hi)
}

/// Endpoints of `dom φ•`: the asymptotic slopes of `φ`, infinite where the
/// domain of `φ` is bounded on that side.
fn conjugate_domain(f: &UnivariateConvex) -> Result<(ExtInt, ExtInt)> {
    f.slope_limits()
}

/// Result of [`inverse_dual_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseReport {
    pub report: MinMaxReport,
    /// `w*·z* = 0`, when a primal `w*` was supplied.
    pub orthogonal: Option<bool>,
    /// `Φ'(w*−1) ≤ z* ≤ Φ'(w*)`, when a primal `w*` was supplied.
    pub fitting: Option<bool>,
}

/// `max{−Φ•(z) : z ∈ ⊙C₀ ∩ z_window}`, lexicographically least maximizer.
///
/// With `primal` supplied the report carries `Φ(w*)` and the orthogonality
/// and fitting checks against the maximizer.
pub fn inverse_dual_search(
    cone: &TangentCone,
    deviation: &SeparableConvex,
    z_window: &Window,
    primal: Option<&[i128]>,
) -> Result<InverseReport> {
    let n = cone.system.n();
    check_len(n, deviation.len())?;
    check_len(n, z_window.len())?;
    let mut best: Option<(ExtInt, Vec<i128>)> = None;
    for_each_integer_point(&cone.system, z_window, |z| {
        let v = deviation.conjugate(z)?.neg()?;
        if v != MinusInf && best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, z.to_vec()));
        }
        Ok(())
    })?;
    let mut rep = MinMaxReport { status: SearchStatus::Exact, ..Default::default() };
    rep.bound("z_window", window_json(z_window));
    let (mut orthogonal, mut fitting) = (None, None);
    if let Some((v, z)) = &best {
        rep.dual_value = *v;
        rep.dual_witness = DualWitness::Point(z.clone());
    }
    if let Some(w) = primal {
        check_len(n, w.len())?;
        rep.primal_value = deviation.eval(w)?;
        rep.primal_witness = Some(w.to_vec());
        if let Some((_, z)) = &best {
            orthogonal = Some(dot(w, z)? == 0);
            fitting = Some(deviation.first_unfit(w, z)?.is_none());
        }
    }
    rep.set_equality();
    Ok(InverseReport { report: rep, orthogonal, fitting })
}

/// `Σ |w(s) − w0(s)|`.
pub fn l1_deviation(w0: &[i128]) -> SeparableConvex {
    weighted_l1_deviation(w0, &vec![1; w0.len()], &vec![1; w0.len()])
}

/// `Σ c1(s)·(w0(s) − w(s))⁺ + c2(s)·(w(s) − w0(s))⁺`.
pub fn weighted_l1_deviation(w0: &[i128], c1: &[i128], c2: &[i128]) -> SeparableConvex {
    SeparableConvex::from_parts(
        w0.iter()
            .zip(c1.iter().zip(c2))
            .map(|(&k0, (&a, &b))| UnivariateConvex::VShape { k0, c_minus: -a, c_plus: b, lo: MinusInf, hi: PlusInf })
            .collect(),
    )
}

/// Zero on `[lo(s), hi(s)]`, slopes `-c1(s)` below and `c2(s)` above.
pub fn box_deviation(lo: &[i128], hi: &[i128], c1: &[i128], c2: &[i128]) -> Result<SeparableConvex> {
    let parts = (0..lo.len())
        .map(|s| UnivariateConvex::flat_bottom(lo[s], hi[s], -c1[s], c2[s], MinusInf, PlusInf))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeparableConvex::from_parts(parts))
}

/// `Σ a(s)·(w(s) − w0(s))²`.
pub fn weighted_square_deviation(w0: &[i128], a: &[i128]) -> Result<SeparableConvex> {
    let parts = w0
        .iter()
        .zip(a)
        .map(|(&k0, &a)| UnivariateConvex::shifted(k0, UnivariateConvex::quadratic(a)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeparableConvex::from_parts(parts))
}

/// Deviation that is `0` everywhere.
pub fn zero_deviation(n: usize) -> SeparableConvex {
    SeparableConvex::linear(&vec![0; n])
}
