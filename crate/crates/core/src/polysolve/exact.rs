//! Exact Sturm sequences over the integers.
//!
//! Every finite double is a dyadic rational, so a polynomial with `f64`
//! coefficients is an integer polynomial after a common power-of-two scale.
//! The chain is a primitive pseudo-remainder sequence whose members are
//! positive multiples of the classical Sturm remainders.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Integer polynomial, lowest degree first, no trailing zeros (except the
/// zero polynomial, stored empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Self(c)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.0.last()
    }

    /// Exact integer image of `f64` coefficients scaled by a common `2^s`.
    pub fn from_f64(coeffs: &[f64]) -> Result<Self> {
        let parts: Vec<Option<(i64, i32)>> = coeffs
            .iter()
            .map(|&c| {
                if !c.is_finite() {
                    None
                } else if c == 0.0 {
                    Some((0, 0))
                } else {
                    Some(decompose(c))
                }
            })
            .collect();
        if parts.iter().any(|p| p.is_none()) {
            return Err(Error::Contract("non-finite coefficient".into()));
        }
        let min_exp = parts
            .iter()
            .flatten()
            .filter(|(m, _)| *m != 0)
            .map(|&(_, e)| e)
            .min()
            .unwrap_or(0);
        let c = parts
            .into_iter()
            .flatten()
            .map(|(m, e)| {
                if m == 0 {
                    BigInt::zero()
                } else {
                    BigInt::from(m) << ((e - min_exp) as usize)
                }
            })
            .collect();
        Ok(Self::new(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn div_exact_scalar(&self, k: &BigInt) -> Self {
        Self(self.0.iter().map(|c| c / k).collect())
    }

    fn neg(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    /// `lc(b)^(deg a - deg b + 1) * a mod b`.
    fn pseudo_remainder(&self, b: &IntPoly) -> IntPoly {
        let db = b.degree().expect("nonzero divisor");
        let lb = b.leading().unwrap().clone();
        let mut r = self.0.clone();
        let mut steps = 0u32;
        let da = self.degree().unwrap_or(0);
        let total_steps = (da + 1).saturating_sub(db) as u32;
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (j, bj) in b.0.iter().enumerate() {
                r[dr - db + j] -= &lr * bj;
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
            steps += 1;
        }
        // complete the normalizing power when the remainder dropped early
        let missing = total_steps.saturating_sub(steps);
        if missing > 0 {
            let f = num_traits::pow(lb, missing as usize);
            for c in r.iter_mut() {
                *c *= &f;
            }
        }
        IntPoly::new(r)
    }

    /// Sign of the polynomial at `m * 2^e`, computed exactly.
    pub fn sign_at_dyadic(&self, m: i64, e: i32) -> Sign {
        let Some(deg) = self.degree() else {
            return Sign::NoSign;
        };
        let m = BigInt::from(m);
        // multiply through by 2^(-e * deg) when e < 0 to stay integral
        let mut acc = BigInt::zero();
        if e >= 0 {
            let x = m << (e as usize);
            for c in self.0.iter().rev() {
                acc = acc * &x + c;
            }
        } else {
            let shift = (-e) as usize;
            let mut pow_m = BigInt::one();
            for (k, c) in self.0.iter().enumerate() {
                acc += (c * &pow_m) << (shift * (deg - k));
                pow_m *= &m;
            }
        }
        acc.sign()
    }
}

/// `(mantissa, exponent)` with `x = mantissa * 2^exponent` exactly.
pub fn decompose(x: f64) -> (i64, i32) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & 0x000f_ffff_ffff_ffff;
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | 0x0010_0000_0000_0000, exp - 1075)
    };
    let tz = mant.trailing_zeros().min(63);
    ((mant >> tz) as i64 * sign, e + tz as i32)
}

/// Exact Sturm chain of a nonzero integer polynomial.
#[derive(Debug, Clone)]
pub struct ExactChain {
    members: Vec<IntPoly>,
}

impl ExactChain {
    pub fn new(p: IntPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::Degenerate("zero polynomial".into()));
        }
        let mut members = vec![p.clone()];
        let d = p.derivative();
        if d.is_zero() {
            return Ok(Self { members });
        }
        members.push(d);
        loop {
            let n = members.len();
            let (a, b) = (&members[n - 2], &members[n - 1]);
            if b.degree() == Some(0) {
                break;
            }
            let delta = a.degree().unwrap() - b.degree().unwrap();
            let prem = a.pseudo_remainder(b);
            if prem.is_zero() {
                break;
            }
            // prem = lc(b)^(delta+1) * rem; the Sturm member is -rem
            let lc_negative = b.leading().unwrap().is_negative();
            let flip = !(lc_negative && (delta + 1) % 2 == 1);
            let g = prem.content();
            let mut next = prem.div_exact_scalar(&g);
            if flip {
                next = next.neg();
            }
            members.push(next);
        }
        Ok(Self { members })
    }

    pub fn from_f64(coeffs: &[f64]) -> Result<Self> {
        Self::new(IntPoly::from_f64(coeffs)?)
    }

    pub fn members(&self) -> &[IntPoly] {
        &self.members
    }

    fn variations(signs: impl Iterator<Item = Sign>) -> usize {
        let mut last = Sign::NoSign;
        let mut v = 0;
        for s in signs {
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    /// Sign variations at `0+` (limit from the right).
    pub fn variations_at_zero_plus(&self) -> usize {
        Self::variations(self.members.iter().map(|m| {
            m.coeffs().iter().find(|c| !c.is_zero()).map_or(Sign::NoSign, |c| c.sign())
        }))
    }

    pub fn variations_at_infinity(&self) -> usize {
        Self::variations(self.members.iter().map(|m| m.leading().map_or(Sign::NoSign, |c| c.sign())))
    }

    pub fn variations_at(&self, x: f64) -> usize {
        if x == 0.0 {
            return Self::variations(self.members.iter().map(|m| {
                m.coeffs().first().map_or(Sign::NoSign, |c| c.sign())
            }));
        }
        let (m, e) = decompose(x);
        Self::variations(self.members.iter().map(|p| p.sign_at_dyadic(m, e)))
    }

    /// Distinct roots in `(0, inf)`.
    pub fn count_positive(&self) -> usize {
        self.variations_at_zero_plus() - self.variations_at_infinity()
    }
}
