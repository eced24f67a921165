//! Adaptive integration over the unit hypercube: Gauss-Kronrod (7, 15) in
//! one dimension, the Genz-Malik degree 7/5 embedded rule in two or more,
//! and a stratified Monte Carlo estimator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// An integral estimate and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Integrand evaluations spent.
    pub evaluations: usize,
    /// Whether the error target was met within the budget.
    pub converged: bool,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights at the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone)]
struct Region {
    lo: Vec<f64>,
    hi: Vec<f64>,
    value: f64,
    error: f64,
    split: usize,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Region {}

impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Region {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// (7, 15) Gauss-Kronrod on `[a, b]`: (Kronrod value, |Kronrod - Gauss|).
pub fn gauss_kronrod15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct GenzMalik {
    n: usize,
    w: [f64; 5],
    e: [f64; 4],
}

const L2: f64 = 0.358_568_582_800_318_1; // sqrt(9/70)
const L4: f64 = 0.948_683_298_050_513_8; // sqrt(9/10)
const L5: f64 = 0.688_247_201_611_685_3; // sqrt(9/19)

impl GenzMalik {
    fn new(n: usize) -> Self {
        let nf = n as f64;
        Self {
            n,
            w: [
                (12824.0 - 9120.0 * nf + 400.0 * nf * nf) / 19683.0,
                980.0 / 6561.0,
                (1820.0 - 400.0 * nf) / 19683.0,
                200.0 / 19683.0,
                6859.0 / 19683.0 / 2f64.powi(n as i32),
            ],
            e: [
                (729.0 - 950.0 * nf + 50.0 * nf * nf) / 729.0,
                245.0 / 486.0,
                (265.0 - 100.0 * nf) / 1458.0,
                25.0 / 729.0,
            ],
        }
    }

    /// Degree-7 value, |degree 7 - degree 5|, and the axis with the largest
    /// fourth difference.
    fn apply(&self, f: &mut impl FnMut(&[f64]) -> f64, lo: &[f64], hi: &[f64]) -> (f64, f64, usize) {
        let n = self.n;
        let c: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        let vol: f64 = h.iter().map(|x| 2.0 * x).product();
        let mut x = c.clone();
        let f1 = f(&x);
        let (mut s2, mut s3, mut s4, mut s5) = (0.0, 0.0, 0.0, 0.0);
        let mut best = (0usize, -1.0f64);
        for i in 0..n {
            x[i] = c[i] - L2 * h[i];
            let a = f(&x);
            x[i] = c[i] + L2 * h[i];
            let b = f(&x);
            x[i] = c[i] - L4 * h[i];
            let p = f(&x);
            x[i] = c[i] + L4 * h[i];
            let q = f(&x);
            x[i] = c[i];
            s2 += a + b;
            s3 += p + q;
            let diff = ((a + b - 2.0 * f1) - (L2 * L2 / (L4 * L4)) * (p + q - 2.0 * f1)).abs();
            if diff > best.1 {
                best = (i, diff);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for (si, sj) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                    x[i] = c[i] + si * L4 * h[i];
                    x[j] = c[j] + sj * L4 * h[j];
                    s4 += f(&x);
                }
                x[i] = c[i];
                x[j] = c[j];
            }
        }
        for corner in 0..1usize << n {
            for i in 0..n {
                let s = if corner >> i & 1 == 1 { 1.0 } else { -1.0 };
                x[i] = c[i] + s * L5 * h[i];
            }
            s5 += f(&x);
        }
        let i7 = vol * (self.w[0] * f1 + self.w[1] * s2 + self.w[2] * s3 + self.w[3] * s4 + self.w[4] * s5);
        let i5 = vol * (self.e[0] * f1 + self.e[1] * s2 + self.e[2] * s3 + self.e[3] * s4);
        (i7, (i7 - i5).abs(), best.0)
    }

    fn points(&self) -> usize {
        1 + 4 * self.n + 2 * self.n * (self.n - 1) + (1 << self.n)
    }
}

/// Globally adaptive integration of `f` over `[0, 1]^dim`, bisecting the
/// region with the largest error estimate until the total error falls
/// below `tol` or `max_splits` bisections have been made.
pub fn adaptive(
    dim: usize,
    mut f: impl FnMut(&[f64]) -> f64,
    tol: f64,
    max_splits: usize,
) -> Estimate {
    assert!(dim >= 1, "integration dimension must be positive");
    let mut evaluations = 0usize;
    let gm = (dim >= 2).then(|| GenzMalik::new(dim));
    let mut rule = |lo: &[f64], hi: &[f64]| -> (f64, f64, usize) {
        match &gm {
            Some(gm) => {
                evaluations += gm.points();
                gm.apply(&mut f, lo, hi)
            }
            None => {
                evaluations += 15;
                let (v, e) = gauss_kronrod15(&mut |x| f(&[x]), lo[0], hi[0]);
                (v, e, 0)
            }
        }
    };

    let lo = vec![0.0; dim];
    let hi = vec![1.0; dim];
    let (value, error, split) = rule(&lo, &hi);
    let mut heap = BinaryHeap::new();
    heap.push(Region { lo, hi, value, error, split });
    let mut total_err = error;
    let mut splits = 0;
    while total_err > tol && splits < max_splits {
        let r = heap.pop().expect("heap never empties");
        let mid = 0.5 * (r.lo[r.split] + r.hi[r.split]);
        let mut hi_a = r.hi.clone();
        hi_a[r.split] = mid;
        let mut lo_b = r.lo.clone();
        lo_b[r.split] = mid;
        let (va, ea, sa) = rule(&r.lo, &hi_a);
        let (vb, eb, sb) = rule(&lo_b, &r.hi);
        total_err += ea + eb - r.error;
        heap.push(Region { lo: r.lo, hi: hi_a, value: va, error: ea, split: sa });
        heap.push(Region { lo: lo_b, hi: r.hi, value: vb, error: eb, split: sb });
        splits += 1;
        // resum occasionally so cancellation in the running total cannot drift
        if splits % 1024 == 0 {
            total_err = heap.iter().map(|r| r.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|r| r.value).sum();
    let error: f64 = heap.iter().map(|r| r.error).sum();
    Estimate { value, error, evaluations, converged: error <= tol }
}

/// Stratified Monte Carlo over `[0, 1]^dim`: a grid of `g^dim` cells with two
/// uniform points per cell, `g` the largest grid that fits `samples`. The
/// error estimate is one standard deviation from the within-cell pairs.
pub fn stratified_mc(dim: usize, mut f: impl FnMut(&[f64]) -> f64, samples: usize, seed: u64) -> Estimate {
    assert!(dim >= 1, "integration dimension must be positive");
    let cells_target = (samples / 2).max(1);
    let mut g = (cells_target as f64).powf(1.0 / dim as f64).floor() as usize;
    while (g + 1).checked_pow(dim as u32).is_some_and(|c| c <= cells_target) {
        g += 1;
    }
    while g > 1 && g.pow(dim as u32) > cells_target {
        g -= 1;
    }
    let g = g.max(1);
    let cells = g.pow(dim as u32);
    let vol = 1.0 / cells as f64;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    let (mut sum, mut var) = (0.0, 0.0);
    for _ in 0..cells {
        let mut pair = [0.0; 2];
        for v in pair.iter_mut() {
            for i in 0..dim {
                x[i] = (idx[i] as f64 + rng.gen::<f64>()) / g as f64;
            }
            *v = f(&x);
        }
        sum += vol * 0.5 * (pair[0] + pair[1]);
        let d = pair[0] - pair[1];
        var += vol * vol * d * d / 4.0;
        for i in 0..dim {
            idx[i] += 1;
            if idx[i] < g {
                break;
            }
            idx[i] = 0;
        }
    }
    Estimate { value: sum, error: var.sqrt(), evaluations: 2 * cells, converged: true }
}
