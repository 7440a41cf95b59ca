//! Named fixtures and seeded random instance generators.
//!
//! Every generator takes an explicit RNG so that a seed reproduces the
//! same corpus on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conjugate::{SeparableConvex, UnivariateConvex};
use crate::extint::{Fin, MinusInf, PlusInf};
use crate::mconvex::{to_system, SupermodularFn};
use crate::netflow::{net_inflow, Digraph, FlowInstance};
use crate::polyhedron::{LinearSystem, Row};

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p(∅)=0, p{1}=0, p{2}=0, p(S)=2`.
pub fn p2() -> SupermodularFn {
    SupermodularFn::from_finite(2, &[0, 0, 0, 2]).expect("valid fixture")
}

/// `p(∅)=0, p{1}=1, p{2}=0, p(S)=2`.
pub fn p2b() -> SupermodularFn {
    SupermodularFn::from_finite(2, &[0, 1, 0, 2]).expect("valid fixture")
}

/// `x1 ≥ 0, x2 ≥ 0, x1 + x2 = 2`.
pub fn p2sys() -> LinearSystem {
    to_system(&p2()).expect("valid fixture")
}

/// Two parallel arcs `s → t`, `m(s) = −2`, `m(t) = 2`, square-sum cost.
pub fn d2() -> FlowInstance {
    let d = Digraph::new(vec!["s".into(), "t".into()], vec![(0, 1), (0, 1)]).expect("valid fixture");
    FlowInstance::nonneg(d, vec![-2, 2], square_sum_named(2)).expect("valid fixture")
}

fn square_sum_named(m: usize) -> SeparableConvex {
    let mut f = SeparableConvex::square_sum(m);
    f.names = crate::io::arc_names(m);
    f
}

/// Facet system of the convex hull of `(1,1,1,0,0,0)`, `(1,0,0,1,0,0)`,
/// `(0,1,0,0,1,0)`, `(0,0,1,0,0,1)`: three equations for the affine hull
/// and one inequality per facet of the simplex.
pub fn s3_system() -> LinearSystem {
    let rows = vec![
        Row::eq(vec![1, 0, 0, 0, 1, 1], 1),
        Row::eq(vec![0, 1, 0, 1, 0, 1], 1),
        Row::eq(vec![0, 0, 1, 1, 1, 0], 1),
        Row::geq(vec![0, 0, 0, 1, 0, 0], 0),
        Row::geq(vec![0, 0, 0, 0, 1, 0], 0),
        Row::geq(vec![0, 0, 0, 0, 0, 1], 0),
        Row::geq(vec![0, 0, 0, -1, -1, -1], -1),
    ];
    LinearSystem::numbered(6, rows).expect("valid fixture")
}

pub fn s3_vertices() -> Vec<Vec<i128>> {
    vec![
        vec![1, 1, 1, 0, 0, 0],
        vec![1, 0, 0, 1, 0, 0],
        vec![0, 1, 0, 0, 1, 0],
        vec![0, 0, 1, 0, 0, 1],
    ]
}

/// A finite supermodular function with values in `[−vmax, vmax]`.
///
/// Built as a modular part plus nonnegative multiples of "contains `A`"
/// indicators (each supermodular), resampled until the value bound holds.
pub fn random_supermodular(rng: &mut FixtureRng, n: usize, vmax: i128) -> SupermodularFn {
    let full = (1usize << n) - 1;
    loop {
        let modular: Vec<i128> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        let terms: Vec<(usize, i128)> = (0..rng.gen_range(0..=3))
            .map(|_| {
                let mut a = rng.gen_range(1..=full);
                if a.count_ones() < 2 {
                    a |= 1 << rng.gen_range(0..n);
                }
                (a, rng.gen_range(1..=2))
            })
            .collect();
        let table: Vec<i128> = (0..=full)
            .map(|x| {
                let m: i128 = (0..n).filter(|s| x >> s & 1 == 1).map(|s| modular[s]).sum();
                let t: i128 = terms.iter().filter(|(a, _)| x & a == *a).map(|(_, c)| c).sum();
                m + t
            })
            .collect();
        if table.iter().all(|v| v.abs() <= vmax) {
            return SupermodularFn::from_finite(n, &table).expect("supermodular by construction");
        }
    }
}

/// Kinds of separable objectives used by the M-convex corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiKind {
    SquareSum,
    WeightedSquare,
    ShiftedSquares,
    L1Deviation,
}

pub const PHI_KINDS: [PhiKind; 4] = [PhiKind::SquareSum, PhiKind::WeightedSquare, PhiKind::ShiftedSquares, PhiKind::L1Deviation];

pub fn random_phi(rng: &mut FixtureRng, n: usize, kind: PhiKind) -> SeparableConvex {
    let q = |a: i128| UnivariateConvex::Quadratic { a };
    let parts = (0..n)
        .map(|_| match kind {
            PhiKind::SquareSum => q(1),
            PhiKind::WeightedSquare => q(rng.gen_range(1..=3)),
            PhiKind::ShiftedSquares => UnivariateConvex::Shifted { k0: rng.gen_range(-3..=3), inner: Box::new(q(1)) },
            PhiKind::L1Deviation => UnivariateConvex::VShape {
                k0: rng.gen_range(-3..=3),
                c_minus: -1,
                c_plus: 1,
                lo: MinusInf,
                hi: PlusInf,
            },
        })
        .collect();
    SeparableConvex::from_parts(parts)
}

/// A random univariate function with domain inside `[−8, 8]`.
pub fn random_univariate(rng: &mut FixtureRng) -> UnivariateConvex {
    let lo = rng.gen_range(-8..=8i128);
    let hi = rng.gen_range(lo..=8);
    let restrict = |f: UnivariateConvex| UnivariateConvex::Restricted { lo: Fin(lo), hi: Fin(hi), inner: Box::new(f) };
    match rng.gen_range(0..7) {
        0 => {
            let mut slopes: Vec<i128> = (lo..hi).map(|_| rng.gen_range(-6..=6)).collect();
            slopes.sort_unstable();
            let mut v = rng.gen_range(-5..=5);
            let mut values = vec![v];
            for s in slopes {
                v += s;
                values.push(v);
            }
            UnivariateConvex::table_fin(lo, &values).expect("convex by construction")
        }
        1 => restrict(UnivariateConvex::Quadratic { a: rng.gen_range(1..=3) }),
        2 => {
            let c_minus = rng.gen_range(-4..=2);
            restrict(UnivariateConvex::VShape {
                k0: rng.gen_range(-6..=6),
                c_minus,
                c_plus: rng.gen_range(c_minus..=4),
                lo: MinusInf,
                hi: PlusInf,
            })
        }
        3 => {
            let a = rng.gen_range(lo..=hi);
            UnivariateConvex::FlatBottom {
                a,
                b: rng.gen_range(a..=hi),
                c_minus: rng.gen_range(-4..=0),
                c_plus: rng.gen_range(0..=4),
                lo: Fin(lo),
                hi: Fin(hi),
            }
        }
        4 => restrict(UnivariateConvex::LinearPlus {
            c: rng.gen_range(-3..=3),
            inner: Box::new(UnivariateConvex::Quadratic { a: rng.gen_range(1..=2) }),
        }),
        5 => restrict(UnivariateConvex::Shifted {
            k0: rng.gen_range(-3..=3),
            inner: Box::new(UnivariateConvex::Quadratic { a: rng.gen_range(1..=2) }),
        }),
        _ => UnivariateConvex::SumOf {
            parts: vec![
                restrict(UnivariateConvex::Quadratic { a: 1 }),
                UnivariateConvex::VShape { k0: rng.gen_range(-4..=4), c_minus: -1, c_plus: 2, lo: MinusInf, hi: PlusInf },
            ],
            window: crate::conjugate::DEFAULT_WC,
        },
    }
}

/// A random capacitated digraph with a feasible demand vector: `m` is the
/// net inflow of a random flow inside the capacities.
pub fn random_flow(rng: &mut FixtureRng, max_nodes: usize, max_arcs: usize, max_cap: i128) -> FlowInstance {
    let nv = rng.gen_range(2..=max_nodes);
    let na = rng.gen_range(1..=max_arcs);
    let nodes: Vec<String> = (0..nv).map(|i| format!("v{}", i + 1)).collect();
    let arcs: Vec<(usize, usize)> = (0..na)
        .map(|_| {
            let u = rng.gen_range(0..nv);
            let mut others: Vec<usize> = (0..nv).filter(|&v| v != u).collect();
            others.shuffle(rng);
            (u, others[0])
        })
        .collect();
    let upper: Vec<i128> = (0..na).map(|_| rng.gen_range(0..=max_cap)).collect();
    let x: Vec<i128> = upper.iter().map(|&g| rng.gen_range(0..=g)).collect();
    let d = Digraph::new(nodes, arcs).expect("endpoints are declared");
    let m = net_inflow(&d, &x).expect("small values");
    FlowInstance::new(d, m, vec![Fin(0); na], upper.into_iter().map(Fin).collect(), square_sum_named(na))
        .expect("consistent instance")
}

/// A random uncapacitated digraph with a feasible demand vector.
pub fn random_uncapacitated_flow(rng: &mut FixtureRng, max_nodes: usize, max_arcs: usize, max_x: i128) -> FlowInstance {
    let mut inst = random_flow(rng, max_nodes, max_arcs, max_x);
    inst.upper = vec![PlusInf; inst.num_arcs()];
    inst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = random_supermodular(&mut rng(7), 4, 5);
        let b = random_supermodular(&mut rng(7), 4, 5);
        assert_eq!(a, b);
        assert_eq!(random_flow(&mut rng(3), 4, 6, 3), random_flow(&mut rng(3), 4, 6, 3));
    }

    #[test]
    fn s3_vertices_satisfy_the_facets() {
        let sys = s3_system();
        for v in s3_vertices() {
            assert!(sys.contains(&v).unwrap());
        }
    }

    #[test]
    fn random_univariates_are_valid() {
        let mut r = rng(11);
        for _ in 0..200 {
            let f = random_univariate(&mut r);
            f.validate().unwrap();
            let (lo, hi) = f.domain().unwrap();
            assert!(lo >= Fin(-8) && hi <= Fin(8));
        }
    }
}
