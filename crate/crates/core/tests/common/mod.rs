//! Brute-force oracles shared by the integration tests.
//!
//! These use only function evaluation and plain loops, never the solvers
//! they are compared against.

#![allow(dead_code)]

use dctk::conjugate::{SeparableConvex, UnivariateConvex};
use dctk::extint::{ExtInt, Fin, MinusInf, PlusInf};
use dctk::mconvex::SupermodularFn;
use dctk::netflow::FlowInstance;
use dctk::polyhedron::{LinearSystem, RowKind};

/// `max_{k ∈ [lo, hi]} kℓ − φ(k)` by scanning.
pub fn conj_scan(f: &UnivariateConvex, ell: i128, lo: i128, hi: i128) -> ExtInt {
    let mut best = MinusInf;
    for k in lo..=hi {
        if let Fin(v) = f.eval(k).unwrap() {
            best = best.max(Fin(k * ell - v));
        }
    }
    best
}

/// `(min, max)` of `φ(k+1) − φ(k)` over pairs inside the domain.
pub fn slope_range(f: &UnivariateConvex, lo: i128, hi: i128) -> (i128, i128) {
    let mut out = (0, 0);
    let mut first = true;
    for k in lo..hi {
        if let (Fin(a), Fin(b)) = (f.eval(k).unwrap(), f.eval(k + 1).unwrap()) {
            let d = b - a;
            if first {
                out = (d, d);
                first = false;
            } else {
                out = (out.0.min(d), out.1.max(d));
            }
        }
    }
    out
}

fn mask_sum(z: &[i128], mask: usize) -> i128 {
    z.iter().enumerate().filter(|(s, _)| mask >> s & 1 == 1).map(|(_, v)| v).sum()
}

pub fn in_base(p: &SupermodularFn, z: &[i128]) -> bool {
    let full = (1usize << p.n()) - 1;
    for mask in 1..=full {
        if let Fin(v) = p.p(mask) {
            let s = mask_sum(z, mask);
            if s < v || (mask == full && s != v) {
                return false;
            }
        }
    }
    true
}

/// All integer points of `B'(p)`, lexicographically, for finite `p`.
pub fn base_points(p: &SupermodularFn) -> Vec<Vec<i128>> {
    let n = p.n();
    let full = (1usize << n) - 1;
    let total = p.p(full).finite().unwrap();
    let lo: Vec<i128> = (0..n).map(|s| p.p(1 << s).finite().unwrap()).collect();
    let hi: Vec<i128> = (0..n).map(|s| total - p.p(full & !(1 << s)).finite().unwrap()).collect();
    let mut out = Vec::new();
    let mut z = vec![0i128; n];
    fn rec(j: usize, z: &mut Vec<i128>, lo: &[i128], hi: &[i128], total: i128, p: &SupermodularFn, out: &mut Vec<Vec<i128>>) {
        let n = z.len();
        if j == n - 1 {
            let used: i128 = z[..n - 1].iter().sum();
            z[j] = total - used;
            if z[j] >= lo[j] && z[j] <= hi[j] && in_base(p, z) {
                out.push(z.clone());
            }
            return;
        }
        for v in lo[j]..=hi[j] {
            z[j] = v;
            rec(j + 1, z, lo, hi, total, p, out);
        }
    }
    rec(0, &mut z, &lo, &hi, total, p, &mut out);
    out
}

pub fn dotp(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least `Φ` over `points`, with the lexicographically least argmin.
pub fn min_over(points: &[Vec<i128>], phi: &SeparableConvex) -> Option<(ExtInt, Vec<i128>)> {
    let mut best: Option<(ExtInt, Vec<i128>)> = None;
    for x in points {
        let v = phi.eval(x).unwrap();
        if v != PlusInf && best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, x.clone()));
        }
    }
    best
}

pub fn min_linear(points: &[Vec<i128>], w: &[i128]) -> i128 {
    points.iter().map(|x| dotp(w, x)).min().unwrap()
}

/// `Σ ⌊k/2⌋⌈k/2⌉`.
pub fn half_products(w: &[i128]) -> i128 {
    w.iter().map(|&k| k.div_euclid(2) * (k.div_euclid(2) + k.rem_euclid(2))).sum()
}

/// Integer points of `sys` in the box `[lo, hi]` by full enumeration.
pub fn system_points(sys: &LinearSystem, lo: &[i128], hi: &[i128]) -> Vec<Vec<i128>> {
    let n = lo.len();
    let mut out = Vec::new();
    let mut x = lo.to_vec();
    loop {
        let ok = sys.rows.iter().all(|r| {
            let v = dotp(&r.coeffs, &x);
            match r.kind {
                RowKind::Geq => v >= r.rhs,
                RowKind::Eq => v == r.rhs,
            }
        });
        if ok {
            out.push(x.clone());
        }
        let mut j = n;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if x[j] < hi[j] {
                x[j] += 1;
                for t in j + 1..n {
                    x[t] = lo[t];
                }
                break;
            }
        }
    }
}

/// All feasible integral flows of `inst` with each arc clipped to `[.., cap]`.
pub fn flow_points(inst: &FlowInstance, cap: i128) -> Vec<Vec<i128>> {
    let na = inst.num_arcs();
    let lo: Vec<i128> = inst.lower.iter().map(|l| l.finite().unwrap_or(-cap)).collect();
    let hi: Vec<i128> = inst.upper.iter().map(|g| g.finite().unwrap_or(cap).min(cap)).collect();
    let mut out = Vec::new();
    let mut x = lo.clone();
    if (0..na).any(|a| lo[a] > hi[a]) {
        return out;
    }
    loop {
        let mut net = vec![0i128; inst.digraph.nodes.len()];
        for (a, &(u, v)) in inst.digraph.arcs.iter().enumerate() {
            net[v] += x[a];
            net[u] -= x[a];
        }
        if net == inst.m {
            out.push(x.clone());
        }
        let mut j = na;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if x[j] < hi[j] {
                x[j] += 1;
                for t in j + 1..na {
                    x[t] = lo[t];
                }
                break;
            }
        }
    }
}

/// `Σ_v max(m(v), 0)`: no optimal square-sum flow uses more than this on an arc.
pub fn total_supply(inst: &FlowInstance) -> i128 {
    inst.m.iter().map(|&v| v.max(0)).sum()
}

/// Whether `w` is a combination of the cone rows with multipliers in
/// `[0, k]` (GEQ) or `[−k, k]` (EQ).
pub fn in_dual_cone(cone: &LinearSystem, w: &[i128], k: i128) -> bool {
    let n = w.len();
    fn rec(cone: &LinearSystem, j: usize, acc: &mut Vec<i128>, w: &[i128], k: i128) -> bool {
        if j == cone.rows.len() {
            return acc.as_slice() == w;
        }
        let lo = if cone.rows[j].kind == RowKind::Geq { 0 } else { -k };
        for v in lo..=k {
            for (a, q) in acc.iter_mut().zip(&cone.rows[j].coeffs) {
                *a += v * q;
            }
            let found = rec(cone, j + 1, acc, w, k);
            for (a, q) in acc.iter_mut().zip(&cone.rows[j].coeffs) {
                *a -= v * q;
            }
            if found {
                return true;
            }
        }
        false
    }
    let mut acc = vec![0i128; n];
    rec(cone, 0, &mut acc, w, k)
}
