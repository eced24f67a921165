//! Sturm sequences in certified double precision, with an exact fallback.
//!
//! Every coefficient of the floating chain carries a rounding radius. When a
//! sign the count depends on cannot be certified (a leading coefficient or
//! divisor whose ball contains zero, or an ambiguous evaluation), the chain
//! is rebuilt over the integers from the exact dyadic values of the input.

use num_bigint::Sign;

use super::ball::Ball;
use super::exact::ExactChain;
use super::RootCountReport;
use crate::error::{Error, Result};
use crate::game_model::UnivariatePoly;

/// Double-precision Sturm chain with per-coefficient error radii.
#[derive(Debug, Clone)]
pub struct SturmChain {
    members: Vec<Vec<Ball>>,
}

/// Strip exact zero roots and zero leading entries.
fn normalize(p: &UnivariatePoly) -> Result<Vec<f64>> {
    let c = p.coeffs();
    let hi = p
        .degree()
        .ok_or_else(|| Error::Degenerate("zero polynomial".into()))?;
    let lo = c.iter().position(|&x| x != 0.0).unwrap();
    Ok(c[lo..=hi].to_vec())
}

fn max_mag(p: &[Ball]) -> f64 {
    p.iter().fold(0.0, |m, b| m.max(b.mid.abs()))
}

/// Remainder of `a / b` in ball arithmetic; `None` if a divisor sign is uncertain.
fn remainder(a: &[Ball], b: &[Ball]) -> Option<Vec<Ball>> {
    let db = b.len() - 1;
    let lb = b[db];
    lb.sign()?;
    let mut r = a.to_vec();
    while r.len() > db {
        let top = r.len() - 1;
        let q = r[top].div(lb)?;
        for j in 0..db {
            r[top - db + j] = r[top - db + j] - q * b[j];
        }
        r.pop();
    }
    Some(r)
}

impl SturmChain {
    /// Build the chain of `p, p', -rem(p, p'), ..`; `None` when a sign along
    /// the way cannot be certified. Zero roots and zero leading entries are
    /// stripped first.
    pub fn try_new(p: &UnivariatePoly) -> Result<Option<Self>> {
        let c = normalize(p)?;
        Ok(Self::build(&c))
    }

    fn build(c: &[f64]) -> Option<Self> {
        let p0: Vec<Ball> = c.iter().map(|&x| Ball::exact(x)).collect();
        let mut members = vec![p0.clone()];
        if p0.len() == 1 {
            return Some(Self { members });
        }
        let p1: Vec<Ball> = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &x)| Ball::exact(k as f64).scale(x))
            .collect();
        members.push(p1);
        loop {
            let n = members.len();
            let b = &members[n - 1];
            if b.len() == 1 {
                break;
            }
            let r = remainder(&members[n - 2], b)?;
            // trim: an uncertain leading coefficient means an uncertain degree
            r.last()?.sign()?;
            let scale = max_mag(&r);
            if scale == 0.0 {
                return None;
            }
            let r: Vec<Ball> = r.into_iter().map(|x| (-x).scale(1.0 / scale)).collect();
            members.push(r);
        }
        Some(Self { members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Variation count from certified signs. An uncertain interior entry is
    /// harmless when its neighbours have opposite certified signs.
    fn variations(signs: &[Option<i8>]) -> Option<usize> {
        let n = signs.len();
        for i in 0..n {
            if signs[i].is_none() {
                if i == 0 || i == n - 1 {
                    return None;
                }
                match (signs[i - 1], signs[i + 1]) {
                    (Some(a), Some(b)) if a != b => {}
                    _ => return None,
                }
            }
        }
        let mut v = 0;
        let mut last = 0i8;
        for s in signs.iter().flatten() {
            if last != 0 && *s != last {
                v += 1;
            }
            last = *s;
        }
        Some(v)
    }

    pub fn variations_at_infinity(&self) -> Option<usize> {
        let s: Vec<_> = self.members.iter().map(|m| m.last().unwrap().sign()).collect();
        Self::variations(&s)
    }

    pub fn variations_at_zero(&self) -> Option<usize> {
        let s: Vec<_> = self.members.iter().map(|m| m[0].sign()).collect();
        Self::variations(&s)
    }

    pub fn variations_at(&self, x: f64) -> Option<usize> {
        let xb = Ball::exact(x);
        let s: Vec<_> = self
            .members
            .iter()
            .map(|m| m.iter().rev().fold(Ball::ZERO, |acc, &c| acc * xb + c).sign())
            .collect();
        Self::variations(&s)
    }
}

/// Either flavour of chain, chosen at construction.
#[derive(Debug, Clone)]
enum Chain {
    Float(SturmChain),
    Exact(ExactChain),
}

impl Chain {
    fn new(c: &[f64]) -> Result<Self> {
        match SturmChain::build(c) {
            Some(ch) if ch.variations_at_zero().is_some() && ch.variations_at_infinity().is_some() => {
                Ok(Chain::Float(ch))
            }
            _ => Ok(Chain::Exact(ExactChain::from_f64(c)?)),
        }
    }

    fn is_exact(&self) -> bool {
        matches!(self, Chain::Exact(_))
    }

    fn count_positive(&self) -> usize {
        match self {
            Chain::Float(ch) => ch.variations_at_zero().unwrap() - ch.variations_at_infinity().unwrap(),
            Chain::Exact(ch) => ch.count_positive(),
        }
    }

    fn variations_at(&self, x: f64) -> Option<usize> {
        match self {
            Chain::Float(ch) => ch.variations_at(x),
            Chain::Exact(ch) => Some(ch.variations_at(x)),
        }
    }
}

/// Distinct roots of `p` in `(0, inf)`.
///
/// Fails only for the zero polynomial. The report carries no intervals; see
/// [`isolate_refine`] for those.
pub fn sturm_count_positive(p: &UnivariatePoly) -> Result<RootCountReport> {
    if p.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let c = normalize(p)?;
    let chain = Chain::new(&c)?;
    Ok(RootCountReport {
        count: chain.count_positive(),
        intervals: Vec::new(),
        roots: Vec::new(),
        solutions: Vec::new(),
        degenerate: false,
        exact_arithmetic: chain.is_exact(),
    })
}

/// Distinct negative roots, through `p(-y)`.
pub fn sturm_count_negative(p: &UnivariatePoly) -> Result<RootCountReport> {
    sturm_count_positive(&p.reflect())
}

const MAX_BISECTIONS: usize = 4000;

/// Isolating intervals for every positive root, refined to width below `tol`.
pub fn isolate_refine(p: &UnivariatePoly, tol: f64) -> Result<RootCountReport> {
    if !(tol > 0.0) {
        return Err(Error::Contract(format!("tolerance must be positive, got {tol}")));
    }
    if p.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let c = normalize(p)?;
    let mut chain = Chain::new(&c)?;
    let total = chain.count_positive();
    let q = UnivariatePoly::new(c.clone())?;
    if total == 0 {
        return Ok(RootCountReport {
            count: 0,
            intervals: vec![],
            roots: vec![],
            solutions: vec![],
            degenerate: false,
            exact_arithmetic: chain.is_exact(),
        });
    }
    // Cauchy bound on root magnitudes
    let lead = c.last().unwrap().abs();
    let bound = 1.0 + c.iter().map(|x| x.abs() / lead).fold(0.0, f64::max);

    // variations at a point, falling back to exact arithmetic when uncertain
    let var_at = |x: f64, chain: &mut Chain| -> Result<usize> {
        if let Some(v) = chain.variations_at(x) {
            return Ok(v);
        }
        *chain = Chain::Exact(ExactChain::from_f64(&c)?);
        Ok(chain.variations_at(x).unwrap())
    };

    let v0 = match &chain {
        Chain::Float(ch) => ch.variations_at_zero().unwrap(),
        Chain::Exact(ch) => ch.variations_at_zero_plus(),
    };
    let vb = var_at(bound, &mut chain)?;
    let mut stack = vec![(0.0, bound, v0, vb)];
    let mut isolated = Vec::new();
    let mut steps = 0;
    while let Some((a, b, va, vb)) = stack.pop() {
        let count = va - vb;
        if count == 0 {
            continue;
        }
        if count == 1 {
            isolated.push((a, b));
            continue;
        }
        steps += 1;
        if steps > MAX_BISECTIONS || b - a <= f64::EPSILON * b.abs() {
            return Err(Error::NoConvergence { lo: a, hi: b, iterations: steps });
        }
        let m = 0.5 * (a + b);
        let vm = var_at(m, &mut chain)?;
        stack.push((m, b, vm, vb));
        stack.push((a, m, va, vm));
    }
    isolated.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut intervals = Vec::with_capacity(isolated.len());
    let mut roots = Vec::with_capacity(isolated.len());
    for (a0, b0) in isolated {
        let (mut a, mut b) = (a0, b0);
        let mut va = var_at(a, &mut chain)?;
        let mut iters = 0;
        while b - a >= tol {
            iters += 1;
            if iters > MAX_BISECTIONS {
                return Err(Error::NoConvergence { lo: a, hi: b, iterations: iters });
            }
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let vm = var_at(m, &mut chain)?;
            if va - vm == 1 {
                b = m;
            } else {
                a = m;
                va = vm;
            }
        }
        intervals.push((a, b));
        roots.push(polish(&q, a, b));
    }
    Ok(RootCountReport {
        count: intervals.len(),
        intervals,
        roots,
        solutions: vec![],
        degenerate: false,
        exact_arithmetic: chain.is_exact(),
    })
}

/// Newton steps from the midpoint, kept inside `[a, b]`.
fn polish(p: &UnivariatePoly, a: f64, b: f64) -> f64 {
    let dp = p.derivative();
    let mut x = 0.5 * (a + b);
    for _ in 0..8 {
        let d = dp.eval(x);
        if d == 0.0 {
            break;
        }
        let nx = x - p.eval(x) / d;
        if !(nx >= a && nx <= b) {
            break;
        }
        if nx == x {
            break;
        }
        x = nx;
    }
    x
}

/// Sign of `p` at `x` from the exact dyadic value; used by tests and
/// callers that need a certified sign.
pub fn exact_sign(p: &UnivariatePoly, x: f64) -> Result<Sign> {
    let ip = super::exact::IntPoly::from_f64(p.coeffs())?;
    let (m, e) = super::exact::decompose(x);
    Ok(if x == 0.0 {
        ip.coeffs().first().map_or(Sign::NoSign, |c| c.sign())
    } else {
        ip.sign_at_dyadic(m, e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> UnivariatePoly {
        UnivariatePoly::new(c.to_vec()).unwrap()
    }

    #[test]
    fn count_examples() {
        assert_eq!(sturm_count_positive(&poly(&[2.0, -3.0, 1.0])).unwrap().count, 2);
        assert_eq!(sturm_count_positive(&poly(&[1.0, 0.0, 1.0])).unwrap().count, 0);
        assert_eq!(sturm_count_positive(&poly(&[-2.0, 1.0, 1.0])).unwrap().count, 1);
        assert!(matches!(
            sturm_count_positive(&poly(&[0.0, 0.0])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn repeated_roots_use_exact_chain() {
        // (y - 1)^2 (y - 3)
        let r = sturm_count_positive(&poly(&[-3.0, 7.0, -5.0, 1.0])).unwrap();
        assert_eq!(r.count, 2);
        assert!(r.exact_arithmetic);
    }

    #[test]
    fn zero_root_and_degenerate_leading_are_stripped() {
        // y (y - 1) with a zero leading slot
        assert_eq!(sturm_count_positive(&poly(&[0.0, -1.0, 1.0, 0.0])).unwrap().count, 1);
    }

    #[test]
    fn isolate_sqrt_two() {
        let r = isolate_refine(&poly(&[-2.0, 0.0, 1.0]), 1e-10).unwrap();
        assert_eq!(r.count, 1);
        let (a, b) = r.intervals[0];
        assert!(b - a < 1e-10);
        assert!((r.roots[0] - 2f64.sqrt()).abs() < 1e-10);
        assert!(a <= 2f64.sqrt() && 2f64.sqrt() <= b);
    }

    #[test]
    fn isolate_close_roots() {
        // roots 1 and 1.0001; construction gives exact coefficients up to rounding
        let p = poly(&[1.0001, -2.0001, 1.0]);
        let r = isolate_refine(&p, 1e-9).unwrap();
        assert_eq!(r.count, 2);
        let (i0, i1) = (r.intervals[0], r.intervals[1]);
        assert!(i0.1 <= i1.0, "intervals overlap: {i0:?} {i1:?}");
        assert!(i0.0 <= 1.0 && 1.0 <= i0.1 + 1e-12);
        assert!((r.roots[1] - 1.0001).abs() < 1e-8);
    }

    #[test]
    fn isolate_none() {
        assert_eq!(isolate_refine(&poly(&[1.0, 1.0]), 1e-6).unwrap().count, 0);
        assert!(isolate_refine(&poly(&[1.0, 1.0]), 0.0).is_err());
    }

    #[test]
    fn float_chain_certifies_generic_input() {
        let ch = SturmChain::try_new(&poly(&[0.3, -1.7, 0.2, 1.1])).unwrap().unwrap();
        assert_eq!(ch.len(), 4);
        assert!(ch.variations_at_zero().is_some());
    }
}
