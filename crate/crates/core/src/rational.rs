//! Exact linear algebra on small integer matrices.
//!
//! Elimination is fraction-free (Bareiss) in checked i128, so every
//! intermediate value is a minor of the input and division is exact.
//! Results that leave the crate are [`BigRational`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::extint::{cmul, csub};

pub type Rat = BigRational;

pub fn rat(num: i128, den: i128) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i128) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

/// `"num/den"` for non-integers, the plain integer otherwise.
pub fn rat_string(r: &Rat) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_integral(r: &Rat) -> bool {
    r.is_integer()
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Result of fraction-free Gauss-Jordan elimination.
pub struct Echelon {
    /// Reduced matrix; each pivot row `i` has `d` at column `pivots[i]` and
    /// zeros in every other pivot column.
    pub m: Vec<Vec<i128>>,
    pub pivots: Vec<usize>,
    /// Common pivot value (a nonzero minor, sign not normalized).
    pub d: i128,
}

/// Fraction-free Gauss-Jordan on `m`, choosing pivots among the first `ncols` columns.
pub fn gauss_jordan(mut m: Vec<Vec<i128>>, ncols: usize) -> Result<Echelon> {
    let rows = m.len();
    let width = m.first().map_or(0, |r| r.len());
    let mut prev: i128 = 1;
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&p| m[p][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c];
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m[i][c];
            for j in 0..width {
                let v = csub(cmul(piv, m[i][j])?, cmul(f, m[r][j])?)?;
                m[i][j] = v / prev;
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    Ok(Echelon { m, pivots, d: prev })
}

pub fn rank(rows: &[Vec<i128>], ncols: usize) -> Result<usize> {
    if rows.is_empty() {
        return Ok(0);
    }
    Ok(gauss_jordan(rows.to_vec(), ncols)?.pivots.len())
}

/// Indices of a maximal linearly independent subset, chosen greedily in order.
pub fn independent_subset(rows: &[Vec<i128>], ncols: usize) -> Result<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut current: Vec<Vec<i128>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        current.push(row.clone());
        if rank(&current, ncols)? == current.len() {
            chosen.push(i);
        } else {
            current.pop();
        }
        if chosen.len() == ncols {
            break;
        }
    }
    Ok(chosen)
}

/// Integer basis of `{x : A x = 0}` with each vector reduced by its gcd.
pub fn nullspace(rows: &[Vec<i128>], ncols: usize) -> Result<Vec<Vec<i128>>> {
    if rows.is_empty() {
        return Ok((0..ncols)
            .map(|i| (0..ncols).map(|j| i128::from(i == j)).collect())
            .collect());
    }
    let e = gauss_jordan(rows.to_vec(), ncols)?;
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|c| !e.pivots.contains(c)) {
        let mut v = vec![0i128; ncols];
        v[f] = e.d;
        for (i, &pc) in e.pivots.iter().enumerate() {
            v[pc] = -e.m[i][f];
        }
        basis.push(normalize(v));
    }
    Ok(basis)
}

/// Divides out the gcd of the entries.
pub fn normalize(v: Vec<i128>) -> Vec<i128> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g <= 1 {
        v
    } else {
        v.into_iter().map(|x| x / g).collect()
    }
}

/// Scaled inverse of a square matrix: `A⁻¹ = inv / d` with `d > 0`.
pub struct ScaledInverse {
    pub inv: Vec<Vec<i128>>,
    pub d: i128,
}

impl ScaledInverse {
    /// Numerators of `A⁻¹ b` over the common denominator `d`.
    pub fn apply(&self, b: &[i128]) -> Result<Vec<i128>> {
        self.inv.iter().map(|row| crate::extint::dot(row, b)).collect()
    }
}

pub fn inverse(a: &[Vec<i128>]) -> Result<Option<ScaledInverse>> {
    let n = a.len();
    let m: Vec<Vec<i128>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| i128::from(i == j)));
            r
        })
        .collect();
    let e = gauss_jordan(m, n)?;
    if e.pivots.len() < n {
        return Ok(None);
    }
    let sign = if e.d < 0 { -1 } else { 1 };
    let inv = e.m.iter().map(|r| r[n..].iter().map(|&x| x * sign).collect()).collect();
    Ok(Some(ScaledInverse { inv, d: e.d * sign }))
}

/// Solves a square system; `x = num / den` with `den > 0` and the fraction reduced.
pub fn solve_square(a: &[Vec<i128>], b: &[i128]) -> Result<Option<(Vec<i128>, i128)>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("solve_square needs a square system".into()));
    }
    let m: Vec<Vec<i128>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let e = gauss_jordan(m, n)?;
    if e.pivots.len() < n {
        return Ok(None);
    }
    let sign = if e.d < 0 { -1 } else { 1 };
    let num: Vec<i128> = e.m.iter().map(|r| r[n] * sign).collect();
    Ok(Some(reduce(num, e.d * sign)))
}

/// Reduces `num / den` by the common gcd.
pub fn reduce(num: Vec<i128>, den: i128) -> (Vec<i128>, i128) {
    let g = num.iter().fold(den, |g, &x| gcd(g, x));
    if g <= 1 {
        (num, den)
    } else {
        (num.into_iter().map(|x| x / g).collect(), den / g)
    }
}

pub fn to_rats(num: &[i128], den: i128) -> Vec<Rat> {
    num.iter().map(|&x| rat(x, den)).collect()
}

pub fn rat_is_zero(r: &Rat) -> bool {
    r.is_zero()
}

pub fn rat_is_negative(r: &Rat) -> bool {
    r.is_negative()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

/// A rational or one of the two infinities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtRat {
    MinusInf,
    Fin(Rat),
    PlusInf,
}

impl ExtRat {
    /// The value as an integer, if it is a finite integer.
    pub fn as_int(&self) -> Option<i128> {
        match self {
            ExtRat::Fin(r) if r.is_integer() => i128::try_from(r.to_integer()).ok(),
            _ => None,
        }
    }
}

impl std::fmt::Display for ExtRat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtRat::MinusInf => write!(f, "-inf"),
            ExtRat::PlusInf => write!(f, "+inf"),
            ExtRat::Fin(r) => write!(f, "{}", rat_string(r)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_systems() {
        let a = vec![vec![1, 1], vec![1, -1]];
        let (x, d) = solve_square(&a, &[3, 0]).unwrap().unwrap();
        assert_eq!((x, d), (vec![3, 3], 2));
        assert!(solve_square(&[vec![1, 1], vec![2, 2]], &[1, 2]).unwrap().is_none());
    }

    #[test]
    fn inverse_matches_solve() {
        let a = vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]];
        let inv = inverse(&a).unwrap().unwrap();
        let b = [1, -2, 5];
        let num = inv.apply(&b).unwrap();
        let (x, d) = solve_square(&a, &b).unwrap().unwrap();
        for i in 0..3 {
            assert_eq!(num[i] * d, x[i] * inv.d);
        }
    }

    #[test]
    fn nullspace_and_rank() {
        let rows = vec![vec![1, 1, 0]];
        let ns = nullspace(&rows, 3).unwrap();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert_eq!(v[0] + v[1], 0);
        }
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]], 2).unwrap(), 1);
        assert_eq!(independent_subset(&[vec![1, 2], vec![2, 4], vec![0, 1]], 2).unwrap(), vec![0, 2]);
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rat_string(&rat(6, 4)), "3/2");
        assert_eq!(rat_string(&rat(-4, 2)), "-2");
    }
}
