//! Certified real-root counting on an angular grid.
//!
//! Writing `y = tan(theta)`, the positive roots of `p` correspond to angles
//! in `(0, pi/2)` and the negative roots to `(pi/2, pi)`. For Kostlan-type
//! coefficients the roots are spread uniformly in `theta`, so a uniform
//! grid of `O(n)` angles resolves them at a cost of `O(n^2)`.
//!
//! Each quarter of `[0, pi]` is handled in its own chart: `y = tan(theta)`
//! where `|y| <= 1` and the reversed polynomial in `u = cot(theta)`
//! elsewhere, so every evaluation point has magnitude at most one. Inside
//! a cell the third derivative is bounded by the absolute-coefficient
//! polynomial at the endpoint of larger magnitude, which keeps the bound
//! local even when the coefficient scale varies by many orders of
//! magnitude (binomial weights of symmetric games).
//!
//! A cell is accepted only when a Taylor lower bound proves it has no root
//! (same signs at both ends) or exactly one root (sign change with a
//! derivative bounded away from zero). Undecided cells are bisected.
//! Evaluation error is tracked with running absolute sums so no sign is
//! trusted below the rounding level.

use std::f64::consts::FRAC_PI_4;

use crate::game_model::UnivariatePoly;

const U: f64 = 1.2e-16;
const MAX_DEPTH: u32 = 48;

/// Grid cells per unit of degree over `[0, pi]`.
pub const CELLS_PER_DEGREE: usize = 3;

/// Positive and negative distinct real roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedCount {
    pub positive: usize,
    pub negative: usize,
}

impl SignedCount {
    pub fn total(&self) -> usize {
        self.positive + self.negative
    }
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    p: f64,
    p1: f64,
    p2: f64,
    e0: f64,
    e1: f64,
    e2: f64,
    /// Bound on |p'''| for every point no farther from zero than this one.
    m3: f64,
}

impl Eval {
    fn sign(&self) -> Option<f64> {
        (self.p.abs() > self.e0).then(|| self.p.signum())
    }
}

/// Horner for p, p', p'' and the absolute-value sums of p..p'''.
#[inline]
fn eval(c: &[f64], x: f64, err_scale: f64) -> Eval {
    let ax = x.abs();
    let (mut p, mut p1, mut p2) = (0.0, 0.0, 0.0);
    let (mut a, mut a1, mut a2, mut a3) = (0.0, 0.0, 0.0, 0.0);
    for &b in c.iter().rev() {
        p2 = p2 * x + p1;
        p1 = p1 * x + p;
        p = p * x + b;
        a3 = a3 * ax + a2;
        a2 = a2 * ax + a1;
        a1 = a1 * ax + a;
        a = a * ax + b.abs();
    }
    Eval {
        p,
        p1,
        p2: 2.0 * p2,
        e0: err_scale * a,
        e1: err_scale * a1,
        e2: 2.0 * err_scale * a2,
        m3: 6.0 * a3 * (1.0 + 1e-10),
    }
}

/// Lower bound of `o * p` on the half cell next to an endpoint; `dir` is
/// +1 at the left end and -1 at the right end.
#[inline]
fn value_floor(e: &Eval, o: f64, dir: f64, h: f64, m3: f64) -> f64 {
    let t = 0.5 * h;
    (o * e.p - e.e0)
        + (dir * o * e.p1 - e.e1).min(0.0) * t
        + (o * e.p2 - e.e2).min(0.0) * t * t * 0.5
        - m3 * t * t * t / 6.0
}

/// Lower bound of `o * p'` on the half cell next to an endpoint.
#[inline]
fn slope_floor(e: &Eval, o: f64, dir: f64, h: f64, m3: f64) -> f64 {
    let t = 0.5 * h;
    (o * e.p1 - e.e1) + (dir * o * e.p2 - e.e2).min(0.0) * t - m3 * t * t * 0.5
}

struct Chart<'a> {
    c: &'a [f64],
    err_scale: f64,
}

impl Chart<'_> {
    fn at(&self, x: f64) -> Eval {
        eval(self.c, x, self.err_scale)
    }

    /// Roots in the open interval `(a, b)`, `a < b`, or `None` if undecidable.
    fn cell(&self, a: f64, ea: &Eval, b: f64, eb: &Eval, depth: u32) -> Option<usize> {
        let sa = ea.sign()?;
        let sb = eb.sign()?;
        let h = b - a;
        let m3 = ea.m3.max(eb.m3);
        if sa == sb {
            if value_floor(ea, sa, 1.0, h, m3) > 0.0 && value_floor(eb, sa, -1.0, h, m3) > 0.0 {
                return Some(0);
            }
        } else if slope_floor(ea, sb, 1.0, h, m3) > 0.0 && slope_floor(eb, sb, -1.0, h, m3) > 0.0 {
            return Some(1);
        }
        if depth >= MAX_DEPTH {
            return None;
        }
        // split, nudging the point off an uncertain sign
        for frac in [0.5, 0.4375, 0.5625, 0.375, 0.625] {
            let m = a + frac * h;
            if m <= a || m >= b {
                return None;
            }
            let em = self.at(m);
            if em.sign().is_some() {
                let left = self.cell(a, ea, m, &em, depth + 1)?;
                let right = self.cell(m, &em, b, eb, depth + 1)?;
                return Some(left + right);
            }
        }
        None
    }

    /// Roots in the open interval between consecutive sorted grid points,
    /// including the interior grid points themselves (which must be nonzero).
    fn sweep(&self, xs: &[f64]) -> Option<usize> {
        let evals: Vec<Eval> = xs.iter().map(|&x| self.at(x)).collect();
        let mut total = 0;
        for j in 0..xs.len() - 1 {
            total += self.cell(xs[j], &evals[j], xs[j + 1], &evals[j + 1], 0)?;
        }
        Some(total)
    }
}

/// Count distinct positive and negative real roots, or `None` when the
/// certification fails (then an exact method must decide).
pub fn count_real_roots_angular(p: &UnivariatePoly) -> Option<SignedCount> {
    let c = p.coeffs();
    let hi = p.degree()?;
    let lo = c.iter().position(|&x| x != 0.0)?;
    let c = &c[lo..=hi];
    let n = c.len() - 1;
    if n == 0 {
        return Some(SignedCount { positive: 0, negative: 0 });
    }
    let err_scale = (4.0 * n as f64 + 24.0) * U;
    let fwd = Chart { c, err_scale };
    let rev_c: Vec<f64> = c.iter().rev().copied().collect();
    let rev = Chart { c: &rev_c, err_scale };

    // cells per quarter circle; grid points tan(j * pi / (4 q)) in [0, 1]
    let q = (CELLS_PER_DEGREE * n).div_ceil(4).max(1);
    let mut ts: Vec<f64> = (0..=q).map(|j| (j as f64 * FRAC_PI_4 / q as f64).tan()).collect();
    ts[0] = 0.0;
    ts[q] = 1.0;
    let neg: Vec<f64> = ts.iter().rev().map(|&t| -t).collect();

    // y in (0, 1] and u in (0, 1) cover the positive roots; the point
    // y = u = 1 is checked once by both charts, so it must be nonzero
    let positive = fwd.sweep(&ts)? + rev.sweep(&ts)?;
    let negative = fwd.sweep(&neg)? + rev.sweep(&neg)?;
    Some(SignedCount { positive, negative })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> UnivariatePoly {
        UnivariatePoly::new(c.to_vec()).unwrap()
    }

    fn from_roots(roots: &[f64]) -> UnivariatePoly {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (k, &v) in c.iter().enumerate() {
                next[k + 1] += v;
                next[k] -= r * v;
            }
            c = next;
        }
        poly(&c)
    }

    #[test]
    fn small_examples() {
        let sc = |c: &[f64]| count_real_roots_angular(&poly(c)).unwrap();
        assert_eq!(sc(&[1.0, -2.5, 1.0]), SignedCount { positive: 2, negative: 0 });
        assert_eq!(sc(&[1.0, 0.0, 1.0]), SignedCount { positive: 0, negative: 0 });
        assert_eq!(sc(&[-6.0, 1.0, 1.0]), SignedCount { positive: 1, negative: 1 });
        assert_eq!(sc(&[0.0, -4.0, 0.0, 1.0]), SignedCount { positive: 1, negative: 1 });
        assert_eq!(sc(&[5.0]), SignedCount { positive: 0, negative: 0 });
        assert!(count_real_roots_angular(&poly(&[0.0])).is_none());
    }

    #[test]
    fn known_roots() {
        let p = from_roots(&[-3.0, -0.5, 0.01, 0.7, 2.0, 40.0]);
        assert_eq!(
            count_real_roots_angular(&p).unwrap(),
            SignedCount { positive: 4, negative: 2 }
        );
    }

    #[test]
    fn root_on_chart_boundary_is_not_certified() {
        // y = 1 is shared by both charts
        assert!(count_real_roots_angular(&poly(&[-1.0, 1.0])).is_none());
    }

    #[test]
    fn double_root_is_not_certified() {
        assert!(count_real_roots_angular(&from_roots(&[1.5, 1.5, -2.0])).is_none());
    }

    #[test]
    fn binomial_weights_resolve() {
        // (1 + y)^40 - 2 y^20 has widely varying coefficients
        let n = 40;
        let mut c: Vec<f64> = (0..=n)
            .map(|k| crate::game_model::binomial_f64(n as u32, k as u32))
            .collect();
        c[20] -= 2.0 * c[20];
        let got = count_real_roots_angular(&poly(&c)).unwrap();
        let roots = crate::polysolve::companion_oracle(&poly(&c)).unwrap();
        let (pos, neg) = crate::polysolve::real_root_signs(&roots);
        assert_eq!((got.positive, got.negative), (pos, neg));
    }
}
