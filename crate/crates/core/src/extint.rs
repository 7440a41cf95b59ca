//! Extended integers: i128 plus the two infinities.
//!
//! Arithmetic is checked. `+inf + -inf` and i128 overflow are errors.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// An integer or one of the two infinities.
///
/// The derived order is total: `MinusInf < Fin(_) < PlusInf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtInt {
    MinusInf,
    Fin(i128),
    PlusInf,
}

pub use ExtInt::{Fin, MinusInf, PlusInf};

impl ExtInt {
    pub const ZERO: ExtInt = Fin(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Fin(_))
    }

    pub fn finite(self) -> Option<i128> {
        match self {
            Fin(v) => Some(v),
            _ => None,
        }
    }

    pub fn neg(self) -> Result<ExtInt> {
        Ok(match self {
            MinusInf => PlusInf,
            PlusInf => MinusInf,
            Fin(v) => Fin(v.checked_neg().ok_or(Error::Overflow)?),
        })
    }

    pub fn add(self, other: ExtInt) -> Result<ExtInt> {
        match (self, other) {
            (Fin(a), Fin(b)) => a.checked_add(b).map(Fin).ok_or(Error::Overflow),
            (PlusInf, MinusInf) | (MinusInf, PlusInf) => Err(Error::IndeterminateSum),
            (PlusInf, _) | (_, PlusInf) => Ok(PlusInf),
            _ => Ok(MinusInf),
        }
    }

    /// `self - other`. Both `+inf - +inf` and `-inf - -inf` are errors.
    pub fn sub(self, other: ExtInt) -> Result<ExtInt> {
        match (self, other) {
            (PlusInf, PlusInf) | (MinusInf, MinusInf) => Err(Error::IndeterminateDifference),
            _ => self.add(other.neg()?),
        }
    }

    /// Product with an integer. An infinity times zero is zero.
    pub fn mul_int(self, c: i128) -> Result<ExtInt> {
        Ok(match (self, c.cmp(&0)) {
            (_, Ordering::Equal) => Fin(0),
            (Fin(v), _) => Fin(v.checked_mul(c).ok_or(Error::Overflow)?),
            (inf, Ordering::Greater) => inf,
            (inf, Ordering::Less) => inf.neg()?,
        })
    }

    pub fn add_int(self, c: i128) -> Result<ExtInt> {
        self.add(Fin(c))
    }

    /// Sum of an iterator; errors on `+inf + -inf` in any order.
    pub fn sum<I: IntoIterator<Item = ExtInt>>(items: I) -> Result<ExtInt> {
        let mut plus = false;
        let mut minus = false;
        let mut acc: i128 = 0;
        for x in items {
            match x {
                PlusInf => plus = true,
                MinusInf => minus = true,
                Fin(v) => acc = acc.checked_add(v).ok_or(Error::Overflow)?,
            }
        }
        match (plus, minus) {
            (true, true) => Err(Error::IndeterminateSum),
            (true, false) => Ok(PlusInf),
            (false, true) => Ok(MinusInf),
            (false, false) => Ok(Fin(acc)),
        }
    }
}

impl From<i128> for ExtInt {
    fn from(v: i128) -> Self {
        Fin(v)
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinusInf => write!(f, "-inf"),
            PlusInf => write!(f, "+inf"),
            Fin(v) => write!(f, "{v}"),
        }
    }
}

/// Checked i128 helpers used throughout the crate.
pub(crate) fn cadd(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub(crate) fn cmul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub(crate) fn csub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

/// Dot product with overflow checks.
pub(crate) fn dot(a: &[i128], b: &[i128]) -> Result<i128> {
    let mut acc = 0i128;
    for (x, y) in a.iter().zip(b) {
        acc = cadd(acc, cmul(*x, *y)?)?;
    }
    Ok(acc)
}
