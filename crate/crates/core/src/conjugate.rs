//! Univariate and separable discrete convex functions and their discrete
//! conjugates `φ•(ℓ) = sup_k (kℓ − φ(k))`.
//!
//! Two independent evaluation routes are provided. [`UnivariateConvex::conjugate_eval`]
//! searches the monotone right-derivative sequence for a fitting point.
//! [`UnivariateConvex::conjugate_closed`] uses the per-form closed formulas and
//! the conjugate calculus for sums, shifts, linear add-ons and restrictions.

use crate::error::{Error, Result};
use crate::extint::{cadd, cmul, csub, ExtInt, Fin, MinusInf, PlusInf};

/// Default half-width of the split search in infimal convolutions.
pub const DEFAULT_WC: i128 = 64;

/// A univariate integer-valued discrete convex function.
///
/// Values outside the effective domain are `+inf`. `-inf` values are not
/// representable. Build instances through the checked constructors or call
/// [`UnivariateConvex::validate`] after building a variant by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnivariateConvex {
    /// `φ(k0 + i) = values[i]`, `+inf` elsewhere.
    Table { k0: i128, values: Vec<ExtInt> },
    /// `φ(k) = a·k²` with `a ≥ 1`.
    Quadratic { a: i128 },
    /// Slope `c_minus` left of `k0`, `c_plus` right of it, finite on `[lo, hi]`.
    VShape { k0: i128, c_minus: i128, c_plus: i128, lo: ExtInt, hi: ExtInt },
    /// Zero on `[a, b]`, slope `c_minus` below `a`, `c_plus` above `b`, finite on `[lo, hi]`.
    FlatBottom { a: i128, b: i128, c_minus: i128, c_plus: i128, lo: ExtInt, hi: ExtInt },
    /// `inner(k) + c·k`.
    LinearPlus { c: i128, inner: Box<UnivariateConvex> },
    /// `inner(k − k0)`.
    Shifted { k0: i128, inner: Box<UnivariateConvex> },
    /// `inner(k)` on `[lo, hi]`, `+inf` elsewhere.
    Restricted { lo: ExtInt, hi: ExtInt, inner: Box<UnivariateConvex> },
    /// Pointwise sum. `window` bounds the split search of the closed route.
    SumOf { parts: Vec<UnivariateConvex>, window: i128 },
}

/// Certificate of a fitting test `φ'(k*−1) ≤ ℓ* ≤ φ'(k*)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FittingWitness {
    pub k_star: i128,
    pub ell_star: i128,
    pub lower: ExtInt,
    pub upper: ExtInt,
}

use UnivariateConvex as U;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidFunction(msg.into())
}

impl UnivariateConvex {
    pub fn table(k0: i128, values: Vec<ExtInt>) -> Result<Self> {
        let f = U::Table { k0, values };
        f.validate()?;
        Ok(f)
    }

    /// Table from finite values.
    pub fn table_fin(k0: i128, values: &[i128]) -> Result<Self> {
        U::table(k0, values.iter().map(|&v| Fin(v)).collect())
    }

    pub fn quadratic(a: i128) -> Result<Self> {
        let f = U::Quadratic { a };
        f.validate()?;
        Ok(f)
    }

    pub fn vshape(k0: i128, c_minus: i128, c_plus: i128, lo: ExtInt, hi: ExtInt) -> Result<Self> {
        let f = U::VShape { k0, c_minus, c_plus, lo, hi };
        f.validate()?;
        Ok(f)
    }

    pub fn flat_bottom(
        a: i128,
        b: i128,
        c_minus: i128,
        c_plus: i128,
        lo: ExtInt,
        hi: ExtInt,
    ) -> Result<Self> {
        let f = U::FlatBottom { a, b, c_minus, c_plus, lo, hi };
        f.validate()?;
        Ok(f)
    }

    pub fn linear_plus(c: i128, inner: UnivariateConvex) -> Result<Self> {
        let f = U::LinearPlus { c, inner: Box::new(inner) };
        f.validate()?;
        Ok(f)
    }

    pub fn shifted(k0: i128, inner: UnivariateConvex) -> Result<Self> {
        let f = U::Shifted { k0, inner: Box::new(inner) };
        f.validate()?;
        Ok(f)
    }

    pub fn restricted(lo: ExtInt, hi: ExtInt, inner: UnivariateConvex) -> Result<Self> {
        let f = U::Restricted { lo, hi, inner: Box::new(inner) };
        f.validate()?;
        Ok(f)
    }

    pub fn sum_of(parts: Vec<UnivariateConvex>) -> Result<Self> {
        let f = U::SumOf { parts, window: DEFAULT_WC };
        f.validate()?;
        Ok(f)
    }

    /// `c·k` on all of Z.
    pub fn linear(c: i128) -> Self {
        U::VShape { k0: 0, c_minus: c, c_plus: c, lo: MinusInf, hi: PlusInf }
    }

    /// Checks parameter constraints, convexity of tables and a nonempty domain.
    pub fn validate(&self) -> Result<()> {
        match self {
            U::Table { k0, values } => {
                if values.contains(&MinusInf) {
                    return Err(invalid("table values may not be -inf"));
                }
                let first = values.iter().position(|v| v.is_finite());
                let last = values.iter().rposition(|v| v.is_finite());
                let (Some(first), Some(last)) = (first, last) else {
                    return Err(invalid("table has no finite value"));
                };
                if values[first..=last].iter().any(|v| !v.is_finite()) {
                    return Err(invalid("table domain is not contiguous"));
                }
                cadd(*k0, values.len() as i128)?;
                for i in first + 1..last {
                    let l = values[i - 1].finite().unwrap();
                    let m = values[i].finite().unwrap();
                    let r = values[i + 1].finite().unwrap();
                    if cadd(l, r)? < cmul(2, m)? {
                        return Err(invalid(format!("table is not convex at k={}", k0 + i as i128)));
                    }
                }
            }
            U::Quadratic { a } => {
                if *a < 1 {
                    return Err(invalid("quadratic coefficient must be positive"));
                }
            }
            U::VShape { k0, c_minus, c_plus, lo, hi } => {
                if c_minus > c_plus {
                    return Err(invalid("vshape needs c_minus <= c_plus"));
                }
                if !(*lo <= Fin(*k0) && Fin(*k0) <= *hi) {
                    return Err(invalid("vshape needs lo <= k0 <= hi"));
                }
            }
            U::FlatBottom { a, b, c_minus, c_plus, lo, hi } => {
                if !(*c_minus <= 0 && 0 <= *c_plus) {
                    return Err(invalid("flat bottom needs c_minus <= 0 <= c_plus"));
                }
                if !(*lo <= Fin(*a) && a <= b && Fin(*b) <= *hi) {
                    return Err(invalid("flat bottom needs lo <= a <= b <= hi"));
                }
            }
            U::LinearPlus { inner, .. } | U::Shifted { inner, .. } => inner.validate()?,
            U::Restricted { lo, hi, inner } => {
                if lo > hi || *lo == PlusInf || *hi == MinusInf {
                    return Err(invalid("restriction needs lo <= hi"));
                }
                inner.validate()?;
            }
            U::SumOf { parts, window } => {
                if parts.is_empty() {
                    return Err(invalid("sum of no functions"));
                }
                if *window < 0 {
                    return Err(invalid("negative split window"));
                }
                for p in parts {
                    p.validate()?;
                }
            }
        }
        let (lo, hi) = self.domain()?;
        if lo > hi {
            return Err(invalid("empty domain"));
        }
        Ok(())
    }

    /// Effective domain `[lo, hi]` (may be empty when `lo > hi`).
    pub fn domain(&self) -> Result<(ExtInt, ExtInt)> {
        Ok(match self {
            U::Table { k0, values } => {
                let first = values.iter().position(|v| v.is_finite());
                let last = values.iter().rposition(|v| v.is_finite());
                match (first, last) {
                    (Some(f), Some(l)) => (Fin(cadd(*k0, f as i128)?), Fin(cadd(*k0, l as i128)?)),
                    _ => (PlusInf, MinusInf),
                }
            }
            U::Quadratic { .. } => (MinusInf, PlusInf),
            U::VShape { lo, hi, .. } | U::FlatBottom { lo, hi, .. } => (*lo, *hi),
            U::LinearPlus { inner, .. } => inner.domain()?,
            U::Shifted { k0, inner } => {
                let (lo, hi) = inner.domain()?;
                (lo.add_int(*k0)?, hi.add_int(*k0)?)
            }
            U::Restricted { lo, hi, inner } => {
                let (a, b) = inner.domain()?;
                ((*lo).max(a), (*hi).min(b))
            }
            U::SumOf { parts, .. } => {
                let mut lo = MinusInf;
                let mut hi = PlusInf;
                for p in parts {
                    let (a, b) = p.domain()?;
                    lo = lo.max(a);
                    hi = hi.min(b);
                }
                (lo, hi)
            }
        })
    }

    pub fn in_domain(&self, k: i128) -> Result<bool> {
        let (lo, hi) = self.domain()?;
        Ok(lo <= Fin(k) && Fin(k) <= hi)
    }

    /// `φ(k)`; `+inf` outside the domain.
    pub fn eval(&self, k: i128) -> Result<ExtInt> {
        Ok(match self {
            U::Table { k0, values } => {
                let i = csub(k, *k0)?;
                if i < 0 || i >= values.len() as i128 {
                    PlusInf
                } else {
                    values[i as usize]
                }
            }
            U::Quadratic { a } => Fin(cmul(*a, cmul(k, k)?)?),
            U::VShape { k0, c_minus, c_plus, lo, hi } => {
                if Fin(k) < *lo || Fin(k) > *hi {
                    PlusInf
                } else if k <= *k0 {
                    Fin(cmul(*c_minus, csub(k, *k0)?)?)
                } else {
                    Fin(cmul(*c_plus, csub(k, *k0)?)?)
                }
            }
            U::FlatBottom { a, b, c_minus, c_plus, lo, hi } => {
                if Fin(k) < *lo || Fin(k) > *hi {
                    PlusInf
                } else if k < *a {
                    Fin(cmul(*c_minus, csub(k, *a)?)?)
                } else if k > *b {
                    Fin(cmul(*c_plus, csub(k, *b)?)?)
                } else {
                    Fin(0)
                }
            }
            U::LinearPlus { c, inner } => inner.eval(k)?.add_int(cmul(*c, k)?)?,
            U::Shifted { k0, inner } => inner.eval(csub(k, *k0)?)?,
            U::Restricted { lo, hi, inner } => {
                if Fin(k) < *lo || Fin(k) > *hi {
                    PlusInf
                } else {
                    inner.eval(k)?
                }
            }
            U::SumOf { parts, .. } => {
                let mut acc = Fin(0);
                for p in parts {
                    acc = acc.add(p.eval(k)?)?;
                }
                acc
            }
        })
    }

    /// `φ'(k) = φ(k+1) − φ(k)`.
    ///
    /// `+inf` when only `φ(k+1)` is infinite, `-inf` when only `φ(k)` is.
    pub fn right_derivative(&self, k: i128) -> Result<ExtInt> {
        let next = self.eval(cadd(k, 1)?)?;
        let here = self.eval(k)?;
        match (next, here) {
            (PlusInf, PlusInf) => Err(Error::IndeterminateDifference),
            (PlusInf, _) => Ok(PlusInf),
            (_, PlusInf) => Ok(MinusInf),
            _ => next.sub(here),
        }
    }

    /// Asymptotic slopes `(lim_{k→−∞} φ'(k), lim_{k→+∞} φ'(k))`.
    ///
    /// A side where the domain is bounded reports `-inf` (left) or `+inf`
    /// (right), since such a side never makes the conjugate infinite.
    pub fn slope_limits(&self) -> Result<(ExtInt, ExtInt)> {
        let (lo, hi) = self.domain()?;
        let (l, r) = self.raw_limits()?;
        Ok((if lo == MinusInf { l } else { MinusInf }, if hi == PlusInf { r } else { PlusInf }))
    }

    fn raw_limits(&self) -> Result<(ExtInt, ExtInt)> {
        Ok(match self {
            U::Table { .. } => (MinusInf, PlusInf),
            U::Quadratic { .. } => (MinusInf, PlusInf),
            U::VShape { c_minus, c_plus, lo, hi, .. } | U::FlatBottom { c_minus, c_plus, lo, hi, .. } => (
                if *lo == MinusInf { Fin(*c_minus) } else { MinusInf },
                if *hi == PlusInf { Fin(*c_plus) } else { PlusInf },
            ),
            U::LinearPlus { c, inner } => {
                let (l, r) = inner.raw_limits()?;
                (l.add_int(*c)?, r.add_int(*c)?)
            }
            U::Shifted { inner, .. } => inner.raw_limits()?,
            U::Restricted { lo, hi, inner } => {
                let (l, r) = inner.raw_limits()?;
                (if *lo == MinusInf { l } else { MinusInf }, if *hi == PlusInf { r } else { PlusInf })
            }
            U::SumOf { parts, .. } => {
                let mut l = Fin(0);
                let mut r = Fin(0);
                for p in parts {
                    let (a, b) = p.raw_limits()?;
                    l = l.add(a)?;
                    r = r.add(b)?;
                }
                (l, r)
            }
        })
    }

    /// `φ•(ℓ)` by search on the monotone derivative sequence.
    pub fn conjugate_eval(&self, ell: i128) -> Result<ExtInt> {
        Ok(self.conjugate_argmax(ell)?.0)
    }

    /// `φ•(ℓ)` together with an attaining `k`, or `None` when the supremum
    /// is `+inf` (never attained).
    pub fn conjugate_argmax(&self, ell: i128) -> Result<(ExtInt, Option<i128>)> {
        let (lo, hi) = self.domain()?;
        if lo > hi {
            return Ok((MinusInf, None));
        }
        let (ll, rl) = self.slope_limits()?;
        let l = Fin(ell);
        if l < ll || l > rl {
            return Ok((PlusInf, None));
        }
        let anchor = match (lo, hi) {
            (Fin(a), _) if a > 0 => a,
            (_, Fin(b)) if b < 0 => b,
            _ => 0,
        };
        let k = if self.right_derivative(anchor)? < l {
            // smallest k > anchor with φ'(k) ≥ ℓ
            let mut good = anchor;
            let mut step: i128 = 1;
            let mut bad;
            loop {
                bad = match hi {
                    Fin(h) => cadd(anchor, step)?.min(h),
                    _ => cadd(anchor, step)?,
                };
                if self.right_derivative(bad)? >= l {
                    break;
                }
                good = bad;
                step = step.checked_mul(2).ok_or(Error::Overflow)?;
            }
            while bad - good > 1 {
                let mid = good + (bad - good) / 2;
                if self.right_derivative(mid)? >= l {
                    bad = mid;
                } else {
                    good = mid;
                }
            }
            bad
        } else if self.right_derivative(csub(anchor, 1)?)? > l {
            // largest k < anchor with φ'(k−1) ≤ ℓ
            let mut good = anchor;
            let mut step: i128 = 1;
            let mut bad;
            loop {
                bad = match lo {
                    Fin(a) => csub(anchor, step)?.max(a),
                    _ => csub(anchor, step)?,
                };
                if self.right_derivative(csub(bad, 1)?)? <= l {
                    break;
                }
                good = bad;
                step = step.checked_mul(2).ok_or(Error::Overflow)?;
            }
            while good - bad > 1 {
                let mid = bad + (good - bad) / 2;
                if self.right_derivative(csub(mid, 1)?)? <= l {
                    bad = mid;
                } else {
                    good = mid;
                }
            }
            bad
        } else {
            anchor
        };
        let v = Fin(cmul(k, ell)?).sub(self.eval(k)?)?;
        Ok((v, Some(k)))
    }

    /// `φ•(ℓ)` from closed formulas and conjugate calculus.
    ///
    /// `Table` has no closed form. `LinearPlus`, `Shifted`, `Restricted` and
    /// `SumOf` need closed forms for their inner functions. Restrictions and
    /// sums minimize over splits `ℓ = ℓ1 + ℓ2` within a window of half-width
    /// [`DEFAULT_WC`] (or the `SumOf` window).
    pub fn conjugate_closed(&self, ell: i128) -> Result<ExtInt> {
        match self {
            U::Table { .. } => Err(Error::UnsupportedForm),
            U::Quadratic { a } => {
                let q = cadd(ell, *a)?.div_euclid(cmul(2, *a)?);
                Ok(Fin(cmul(q, csub(ell, cmul(*a, q)?)?)?))
            }
            U::VShape { k0, c_minus, c_plus, lo, hi } => {
                if ell < *c_minus {
                    tail(*lo, ell, *c_minus, *k0)
                } else if ell <= *c_plus {
                    Ok(Fin(cmul(*k0, ell)?))
                } else {
                    tail(*hi, ell, *c_plus, *k0)
                }
            }
            U::FlatBottom { a, b, c_minus, c_plus, lo, hi } => {
                if ell < *c_minus {
                    tail(*lo, ell, *c_minus, *a)
                } else if ell < 0 {
                    Ok(Fin(cmul(*a, ell)?))
                } else if ell == 0 {
                    Ok(Fin(0))
                } else if ell <= *c_plus {
                    Ok(Fin(cmul(*b, ell)?))
                } else {
                    tail(*hi, ell, *c_plus, *b)
                }
            }
            U::LinearPlus { c, inner } => inner.conjugate_closed(csub(ell, *c)?),
            U::Shifted { k0, inner } => inner.conjugate_closed(ell)?.add_int(cmul(*k0, ell)?),
            U::Restricted { lo, hi, inner } => {
                let mut best = PlusInf;
                for l2 in -DEFAULT_WC..=DEFAULT_WC {
                    let h = lo.mul_int(l2)?.max(hi.mul_int(l2)?);
                    if h == PlusInf {
                        continue;
                    }
                    let v = inner.conjugate_closed(csub(ell, l2)?)?.add(h)?;
                    best = best.min(v);
                }
                Ok(best)
            }
            U::SumOf { parts, window } => sum_conjugate(parts, ell, *window),
        }
    }

    /// `(k*, ℓ*)` is fitting iff `φ'(k*−1) ≤ ℓ* ≤ φ'(k*)`.
    pub fn is_fitting(&self, k_star: i128, ell_star: i128) -> Result<(bool, FittingWitness)> {
        let (lower, upper) = self.subdifferential_interval(k_star)?;
        let ok = lower <= Fin(ell_star) && Fin(ell_star) <= upper;
        Ok((ok, FittingWitness { k_star, ell_star, lower, upper }))
    }

    /// `∂φ(k*) = [φ'(k*−1), φ'(k*)]`.
    pub fn subdifferential_interval(&self, k_star: i128) -> Result<(ExtInt, ExtInt)> {
        if !self.in_domain(k_star)? {
            return Err(Error::DomainError(k_star));
        }
        Ok((self.right_derivative(csub(k_star, 1)?)?, self.right_derivative(k_star)?))
    }

    /// `φ` tabulated on `[lo, hi]`, trimmed to its finite block.
    pub fn materialize(&self, lo: i128, hi: i128) -> Result<UnivariateConvex> {
        let vals = (lo..=hi).map(|k| self.eval(k)).collect::<Result<Vec<_>>>()?;
        U::table(lo, vals)
    }

    /// `φ•` tabulated on `[lo, hi]` via [`Self::conjugate_eval`].
    pub fn conjugate_table(&self, lo: i128, hi: i128) -> Result<UnivariateConvex> {
        let vals = (lo..=hi).map(|l| self.conjugate_eval(l)).collect::<Result<Vec<_>>>()?;
        U::table(lo, vals)
    }
}

/// `bound·ℓ − c·(bound − anchor)`, `+inf` when the bound is infinite.
fn tail(bound: ExtInt, ell: i128, c: i128, anchor: i128) -> Result<ExtInt> {
    match bound {
        Fin(b) => Ok(Fin(csub(cmul(b, ell)?, cmul(c, csub(b, anchor)?)?)?)),
        _ => Ok(PlusInf),
    }
}

fn sum_conjugate(parts: &[UnivariateConvex], ell: i128, window: i128) -> Result<ExtInt> {
    let (first, rest) = parts.split_first().expect("nonempty parts");
    if rest.is_empty() {
        return first.conjugate_closed(ell);
    }
    let mut best = PlusInf;
    for l1 in csub(ell, window)?..=cadd(ell, window)? {
        let a = first.conjugate_closed(l1)?;
        if a == PlusInf {
            continue;
        }
        let b = sum_conjugate(rest, csub(ell, l1)?, window)?;
        best = best.min(a.add(b)?);
    }
    Ok(best)
}

/// A separable function `Φ(z) = Σ_s φ_s(z(s))` over a named ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparableConvex {
    pub names: Vec<String>,
    pub parts: Vec<UnivariateConvex>,
}

impl SeparableConvex {
    pub fn new(names: Vec<String>, parts: Vec<UnivariateConvex>) -> Result<Self> {
        if names.len() != parts.len() {
            return Err(Error::InvalidInput("names and parts differ in length".into()));
        }
        for p in &parts {
            p.validate()?;
        }
        Ok(SeparableConvex { names, parts })
    }

    /// Elements named `"1"`, `"2"`, ... .
    pub fn from_parts(parts: Vec<UnivariateConvex>) -> Self {
        let names = (1..=parts.len()).map(|i| i.to_string()).collect();
        SeparableConvex { names, parts }
    }

    /// `Σ z(s)²` on `n` elements.
    pub fn square_sum(n: usize) -> Self {
        Self::from_parts(vec![U::Quadratic { a: 1 }; n])
    }

    /// `Σ c(s)·z(s)`.
    pub fn linear(c: &[i128]) -> Self {
        Self::from_parts(c.iter().map(|&c| U::linear(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn eval(&self, z: &[i128]) -> Result<ExtInt> {
        check_len(self.len(), z.len())?;
        let mut acc = Fin(0);
        for (p, &k) in self.parts.iter().zip(z) {
            acc = acc.add(p.eval(k)?)?;
        }
        Ok(acc)
    }

    /// `Φ•(w) = Σ_s φ•_s(w(s))`.
    pub fn conjugate(&self, w: &[i128]) -> Result<ExtInt> {
        check_len(self.len(), w.len())?;
        let mut acc = Fin(0);
        for (p, &l) in self.parts.iter().zip(w) {
            acc = acc.add(p.conjugate_eval(l)?)?;
        }
        Ok(acc)
    }

    /// `Φ'(z)` componentwise.
    pub fn upper_derivative(&self, z: &[i128]) -> Result<Vec<ExtInt>> {
        check_len(self.len(), z.len())?;
        self.parts.iter().zip(z).map(|(p, &k)| p.right_derivative(k)).collect()
    }

    /// `Φ'(z − 1)` componentwise.
    pub fn lower_derivative(&self, z: &[i128]) -> Result<Vec<ExtInt>> {
        check_len(self.len(), z.len())?;
        self.parts.iter().zip(z).map(|(p, &k)| p.right_derivative(csub(k, 1)?)).collect()
    }

    /// First element `s` where `(z(s), w(s))` is not fitting, if any.
    ///
    /// Elements with `z(s)` outside `dom φ_s` count as violations.
    pub fn first_unfit(&self, z: &[i128], w: &[i128]) -> Result<Option<usize>> {
        check_len(self.len(), z.len())?;
        check_len(self.len(), w.len())?;
        for (s, p) in self.parts.iter().enumerate() {
            if !p.in_domain(z[s])? || !p.is_fitting(z[s], w[s])?.0 {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::InvalidInput(format!("expected a vector of length {expected}, got {got}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i128) -> U {
        U::quadratic(a).unwrap()
    }

    fn vs() -> U {
        U::vshape(3, -1, 1, MinusInf, PlusInf).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(q(1).eval(3).unwrap(), Fin(9));
        assert_eq!(vs().eval(5).unwrap(), Fin(2));
        let r = U::restricted(Fin(0), Fin(2), q(1)).unwrap();
        assert_eq!(r.eval(-1).unwrap(), PlusInf);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(q(1).right_derivative(1).unwrap(), Fin(3));
        assert_eq!(q(2).right_derivative(1).unwrap(), Fin(6));
        let fb = U::flat_bottom(1, 2, -1, 1, MinusInf, PlusInf).unwrap();
        assert_eq!(fb.right_derivative(1).unwrap(), Fin(0));
        let t = U::table_fin(0, &[0, 0, 0]).unwrap();
        assert_eq!(t.right_derivative(2).unwrap(), PlusInf);
        assert_eq!(t.right_derivative(-1).unwrap(), MinusInf);
        assert_eq!(t.right_derivative(5), Err(Error::IndeterminateDifference));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(q(1).conjugate_eval(3).unwrap(), Fin(2));
        assert_eq!(q(2).conjugate_eval(5).unwrap(), Fin(3));
        assert_eq!(vs().conjugate_eval(2).unwrap(), PlusInf);
        assert_eq!(vs().conjugate_eval(0).unwrap(), Fin(0));
        assert_eq!(vs().conjugate_eval(1).unwrap(), Fin(3));
        assert_eq!(q(1).conjugate_closed(3).unwrap(), Fin(2));
        assert_eq!(q(2).conjugate_closed(5).unwrap(), Fin(3));
        let sh = U::shifted(1, q(1)).unwrap();
        assert_eq!(sh.conjugate_closed(2).unwrap(), Fin(3));
        assert_eq!(sh.conjugate_eval(2).unwrap(), Fin(3));
        let lp = U::linear_plus(1, q(1)).unwrap();
        assert_eq!(lp.conjugate_closed(3).unwrap(), Fin(1));
        assert_eq!(lp.conjugate_eval(3).unwrap(), Fin(1));
        let r = U::restricted(Fin(0), Fin(2), q(1)).unwrap();
        assert_eq!(r.conjugate_closed(3).unwrap(), Fin(2));
        assert_eq!(r.conjugate_eval(3).unwrap(), Fin(2));
        let t = U::table_fin(0, &[0, 0, 0]).unwrap();
        assert_eq!(t.conjugate_closed(1), Err(Error::UnsupportedForm));
    }

    #[test]
    fn linear_everywhere_is_finite_only_at_its_slope() {
        let f = U::linear(2);
        assert_eq!(f.conjugate_eval(2).unwrap(), Fin(0));
        assert_eq!(f.conjugate_eval(3).unwrap(), PlusInf);
        assert_eq!(f.conjugate_eval(1).unwrap(), PlusInf);
    }

    #[test]
    fn fitting_examples() {
        assert!(q(1).is_fitting(1, 2).unwrap().0);
        assert!(q(1).is_fitting(0, 0).unwrap().0);
        let (ok, w) = q(1).is_fitting(1, 4).unwrap();
        assert!(!ok);
        assert_eq!(w.upper, Fin(3));
        let r = U::restricted(Fin(0), Fin(2), q(1)).unwrap();
        assert_eq!(r.is_fitting(-1, 0), Err(Error::DomainError(-1)));
    }

    #[test]
    fn subdifferential_examples() {
        assert_eq!(q(1).subdifferential_interval(1).unwrap(), (Fin(1), Fin(3)));
        assert_eq!(vs().subdifferential_interval(3).unwrap(), (Fin(-1), Fin(1)));
        let t = U::table_fin(0, &[0, 0, 0]).unwrap();
        assert_eq!(t.subdifferential_interval(0).unwrap(), (MinusInf, Fin(0)));
    }

    #[test]
    fn separable_examples() {
        let sq = SeparableConvex::square_sum(2);
        assert_eq!(sq.conjugate(&[3, 3]).unwrap(), Fin(4));
        assert_eq!(sq.conjugate(&[0, 0]).unwrap(), Fin(0));
        let l1 = SeparableConvex::from_parts(vec![
            U::vshape(3, -1, 1, MinusInf, PlusInf).unwrap(),
            U::vshape(1, -1, 1, MinusInf, PlusInf).unwrap(),
        ]);
        assert_eq!(l1.conjugate(&[0, 2]).unwrap(), PlusInf);
    }

    #[test]
    fn table_validation() {
        assert!(U::table_fin(0, &[0, 2, 1]).is_err());
        assert!(U::table(0, vec![Fin(0), PlusInf, Fin(0)]).is_err());
        assert!(U::table(0, vec![PlusInf, PlusInf]).is_err());
        assert!(U::table(0, vec![PlusInf, Fin(1), Fin(0), PlusInf]).is_ok());
    }
}
