//! Positive solutions of two polynomial equations in `(y1, y2)` by
//! Sylvester-resultant elimination and back-substitution.

use serde::{Deserialize, Serialize};

use super::sturm::isolate_refine;
use super::RootCountReport;
use crate::error::{Error, Result};
use crate::game_model::{CoefficientSystem, ExponentSpace, UnivariatePoly};

/// Which variable a resultant removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variable {
    Y1,
    Y2,
}

impl Variable {
    fn other(self) -> Self {
        match self {
            Variable::Y1 => Variable::Y2,
            Variable::Y2 => Variable::Y1,
        }
    }
}

/// Two equations of total degree at most `d - 1` in `(y1, y2)`, dense over
/// the exponent ranks of a three-strategy game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateSystem {
    d: usize,
    eqs: [Vec<f64>; 2],
}

/// Polynomial in one variable whose coefficients are polynomials in the other.
type Nested = Vec<Vec<f64>>;

impl BivariateSystem {
    pub fn new(d: usize, q1: Vec<f64>, q2: Vec<f64>) -> Result<Self> {
        let len = ExponentSpace::new(3, d)?.len();
        if q1.len() != len || q2.len() != len {
            return Err(Error::Contract(format!("bivariate equations need {len} coefficients")));
        }
        if q1.iter().chain(&q2).any(|c| !c.is_finite()) {
            return Err(Error::Contract("non-finite bivariate coefficient".into()));
        }
        Ok(Self { d, eqs: [q1, q2] })
    }

    /// Build from `(k1, k2, coefficient)` terms.
    pub fn from_terms(d: usize, q1: &[(u32, u32, f64)], q2: &[(u32, u32, f64)]) -> Result<Self> {
        let space = ExponentSpace::new(3, d)?;
        let dense = |terms: &[(u32, u32, f64)]| -> Result<Vec<f64>> {
            let mut v = vec![0.0; space.len()];
            for &(a, b, c) in terms {
                v[space.rank(&[a, b])?] += c;
            }
            Ok(v)
        };
        Self::new(d, dense(q1)?, dense(q2)?)
    }

    pub fn from_system(system: &CoefficientSystem) -> Result<Self> {
        if system.n() != 3 {
            return Err(Error::Contract(format!(
                "bivariate solver needs n = 3, got n = {}",
                system.n()
            )));
        }
        Self::new(system.d(), system.equation(0).to_vec(), system.equation(1).to_vec())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The same system with `y1` and `y2` exchanged.
    pub fn swapped(&self) -> Self {
        let space = ExponentSpace::new(3, self.d).unwrap();
        let swap = |eq: &Vec<f64>| {
            let mut v = vec![0.0; eq.len()];
            for (r, idx) in space.indices().iter().enumerate() {
                let k = idx.free();
                v[space.rank(&[k[1], k[0]]).unwrap()] = eq[r];
            }
            v
        };
        Self { d: self.d, eqs: [swap(&self.eqs[0]), swap(&self.eqs[1])] }
    }

    fn nested(&self, eq: usize, outer: Variable) -> Nested {
        let space = ExponentSpace::new(3, self.d).unwrap();
        let deg = self.d - 1;
        let mut out = vec![vec![0.0; deg + 1]; deg + 1];
        for (r, idx) in space.indices().iter().enumerate() {
            let k = idx.free();
            let (o, i) = match outer {
                Variable::Y1 => (k[0], k[1]),
                Variable::Y2 => (k[1], k[0]),
            };
            out[o as usize][i as usize] = self.eqs[eq][r];
        }
        while out.len() > 1 && out.last().unwrap().iter().all(|&c| c == 0.0) {
            out.pop();
        }
        out
    }

    /// Values and gradient `(f, df/dy1, df/dy2)` of both equations, plus
    /// absolute-value sums for residual scaling.
    fn eval(&self, y1: f64, y2: f64) -> [[f64; 4]; 2] {
        let space = ExponentSpace::new(3, self.d).unwrap();
        let mut out = [[0.0; 4]; 2];
        for (e, eq) in self.eqs.iter().enumerate() {
            for (r, idx) in space.indices().iter().enumerate() {
                let c = eq[r];
                if c == 0.0 {
                    continue;
                }
                let (a, b) = (idx.free()[0] as i32, idx.free()[1] as i32);
                let m = y1.powi(a) * y2.powi(b);
                out[e][0] += c * m;
                if a > 0 {
                    out[e][1] += c * a as f64 * y1.powi(a - 1) * y2.powi(b);
                }
                if b > 0 {
                    out[e][2] += c * b as f64 * y1.powi(a) * y2.powi(b - 1);
                }
                out[e][3] += (c * m).abs();
            }
        }
        out
    }
}

fn padd(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        v[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        v[i] += x;
    }
    v
}

fn pmul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut v = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0.0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    v
}

fn peval(a: &[f64], x: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Determinant of a small matrix with polynomial entries by cofactor expansion.
fn poly_det(m: &[Vec<Vec<f64>>]) -> Vec<f64> {
    let n = m.len();
    if n == 0 {
        return vec![1.0];
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = vec![0.0];
    for col in 0..n {
        if m[0][col].iter().all(|&c| c == 0.0) {
            continue;
        }
        let minor: Vec<Vec<Vec<f64>>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != col)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let mut term = pmul(&m[0][col], &poly_det(&minor));
        if col % 2 == 1 {
            term.iter_mut().for_each(|c| *c = -*c);
        }
        acc = padd(&acc, &term);
    }
    acc
}

/// Sylvester matrix of `f` and `g` as polynomials in the eliminated variable.
fn sylvester(f: &Nested, g: &Nested) -> Vec<Vec<Vec<f64>>> {
    let m = f.len() - 1;
    let l = g.len() - 1;
    let size = m + l;
    let mut s = vec![vec![vec![]; size]; size];
    for r in 0..l {
        for i in 0..=m {
            s[r][r + i] = f[m - i].clone();
        }
    }
    for r in 0..m {
        for j in 0..=l {
            s[l + r][r + j] = g[l - j].clone();
        }
    }
    s
}

/// Resultant of the two equations with respect to `which`, as a polynomial
/// in the remaining variable.
pub fn resultant_eliminate(system: &BivariateSystem, which: Variable) -> Result<UnivariatePoly> {
    let f = system.nested(0, which);
    let g = system.nested(1, which);
    let zero = |p: &Nested| p.iter().all(|c| c.iter().all(|&x| x == 0.0));
    if zero(&f) || zero(&g) {
        return Err(Error::Degenerate("zero equation in bivariate system".into()));
    }
    if f.len() == 1 && g.len() == 1 {
        return Err(Error::Contract(
            "neither equation depends on the eliminated variable".into(),
        ));
    }
    let mut r = poly_det(&sylvester(&f, &g));
    if r.is_empty() {
        r.push(0.0);
    }
    UnivariatePoly::new(r)
}

/// All distinct real roots of a univariate polynomial.
pub(crate) fn real_roots(p: &UnivariatePoly, tol: f64) -> Result<Vec<f64>> {
    let p = p.trimmed();
    if p.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let mut out: Vec<f64> = isolate_refine(&p.reflect(), tol)?
        .roots
        .into_iter()
        .map(|r| -r)
        .collect();
    if p.coeffs()[0] == 0.0 && p.coeffs().len() > 1 {
        out.push(0.0);
    }
    out.extend(isolate_refine(&p, tol)?.roots);
    out.sort_by(f64::total_cmp);
    Ok(out)
}

const NEWTON_STEPS: usize = 30;
const RESIDUAL_TOL: f64 = 1e-10;

/// Newton iteration on the full 2x2 system; returns a point whose residuals
/// are at rounding level, or `None`.
fn newton(system: &BivariateSystem, mut y1: f64, mut y2: f64) -> Option<(f64, f64)> {
    for _ in 0..NEWTON_STEPS {
        let [f, g] = system.eval(y1, y2);
        if f[0].abs() <= 1e-14 * f[3].max(f64::MIN_POSITIVE)
            && g[0].abs() <= 1e-14 * g[3].max(f64::MIN_POSITIVE)
        {
            return Some((y1, y2));
        }
        let det = f[1] * g[2] - f[2] * g[1];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let d1 = (f[0] * g[2] - f[2] * g[0]) / det;
        let d2 = (f[1] * g[0] - f[0] * g[1]) / det;
        y1 -= d1;
        y2 -= d2;
        if !(y1.is_finite() && y2.is_finite()) {
            return None;
        }
        if d1.abs() <= 1e-15 * y1.abs().max(1.0) && d2.abs() <= 1e-15 * y2.abs().max(1.0) {
            break;
        }
    }
    let [f, g] = system.eval(y1, y2);
    (f[0].abs() <= RESIDUAL_TOL * f[3] && g[0].abs() <= RESIDUAL_TOL * g[3]).then_some((y1, y2))
}

/// Count solutions with `y1 > 0` and `y2 > 0`.
///
/// Eliminates `y2`, isolates the positive roots of the resultant, and for
/// each one intersects the real `y2`-roots of both equations (relative
/// tolerance `tol`), polishing matches with Newton's method on the full
/// system. Configurations the procedure cannot resolve (identically
/// vanishing resultant, a resultant root that neither matches nor comes
/// from a vanishing leading coefficient) set the
/// degeneracy flag instead of failing.
pub fn count_positive_bivariate(system: &BivariateSystem, tol: f64) -> Result<RootCountReport> {
    count_positive_eliminating(system, Variable::Y2, tol)
}

/// [`count_positive_bivariate`] with a choice of eliminated variable.
pub fn count_positive_eliminating(
    system: &BivariateSystem,
    which: Variable,
    tol: f64,
) -> Result<RootCountReport> {
    if !(tol > 0.0) {
        return Err(Error::Contract(format!("tolerance must be positive, got {tol}")));
    }
    if !(2..=3).contains(&system.d) {
        return Err(Error::Unsolvable { n: 3, d: system.d });
    }
    // work with y2 as the eliminated variable throughout
    let sys = match which {
        Variable::Y2 => system.clone(),
        Variable::Y1 => system.swapped(),
    };
    let degenerate = || Ok(RootCountReport { degenerate: true, ..RootCountReport::empty() });

    let res = match resultant_eliminate(&sys, Variable::Y2) {
        Ok(r) => r,
        Err(Error::Contract(_)) | Err(Error::Degenerate(_)) => return degenerate(),
        Err(e) => return Err(e),
    };
    let f = sys.nested(0, Variable::Y2);
    let g = sys.nested(1, Variable::Y2);
    let norm = |p: &Nested| p.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs()));
    let (nf, ng) = (norm(&f), norm(&g));
    let res_scale = nf.powi((g.len() - 1) as i32) * ng.powi((f.len() - 1) as i32);
    if res.max_abs_coeff() <= 1e-12 * res_scale {
        return degenerate();
    }

    let y1_roots = match isolate_refine(&res, 1e-14) {
        Ok(r) => r.roots,
        Err(_) => return degenerate(),
    };
    let mut solutions: Vec<Vec<f64>> = Vec::new();
    for r in y1_roots {
        let at = |p: &Nested| -> Vec<f64> { p.iter().map(|c| peval(c, r)).collect() };
        let (fr, gr) = (at(&f), at(&g));
        let abs_at = |p: &Nested| -> f64 {
            p.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs())) * (1.0 + r).powi(sys.d as i32 - 1)
        };
        let f_dead = fr.iter().all(|c| c.abs() <= 1e-12 * abs_at(&f));
        let g_dead = gr.iter().all(|c| c.abs() <= 1e-12 * abs_at(&g));
        if f_dead && g_dead {
            return degenerate();
        }
        let roots_of = |c: &[f64], dead: bool| -> Result<Vec<f64>> {
            if dead {
                return Ok(vec![]);
            }
            match UnivariatePoly::new(c.to_vec()).and_then(|p| real_roots(&p, 1e-14)) {
                Ok(v) => Ok(v),
                Err(Error::Degenerate(_)) => Ok(vec![]),
                Err(e) => Err(e),
            }
        };
        let a = roots_of(&fr, f_dead)?;
        let b = roots_of(&gr, g_dead)?;

        let mut cands: Vec<f64> = Vec::new();
        for &x in &a {
            if b.iter().any(|&z| (x - z).abs() <= tol * x.abs().max(z.abs()).max(1.0)) {
                cands.push(x);
            }
        }
        if f_dead {
            cands.extend(b.iter().copied());
        }
        if g_dead {
            cands.extend(a.iter().copied());
        }
        if cands.is_empty() {
            // no direct match: Newton from every candidate y2
            cands = a.iter().chain(&b).copied().collect();
        }
        let mut here: Vec<(f64, f64)> = Vec::new();
        for y2 in cands {
            if let Some((s1, s2)) = newton(&sys, r, y2) {
                if (s1 - r).abs() <= 1e-6 * r.abs().max(1.0)
                    && !here
                        .iter()
                        .any(|&(_, t)| (t - s2).abs() <= 1e-8 * t.abs().max(1.0))
                {
                    here.push((s1, s2));
                }
            }
        }
        match here.len() {
            0 => {
                // projection of a vanishing leading coefficient, not a solution
                let lead_small = |p: &Nested, v: &[f64]| {
                    v.last().is_none_or(|c| c.abs() <= 1e-8 * abs_at(p))
                };
                if !(lead_small(&f, &fr) || lead_small(&g, &gr)) {
                    return degenerate();
                }
            }
            _ => solutions.extend(here.iter().map(|&(a, b)| vec![a, b])),
        }
    }
    let positive: Vec<Vec<f64>> = solutions
        .into_iter()
        .filter(|s| s[0] > 0.0 && s[1] > 0.0)
        .map(|s| match which {
            Variable::Y2 => s,
            Variable::Y1 => vec![s[1], s[0]],
        })
        .collect();
    Ok(RootCountReport {
        count: positive.len(),
        solutions: positive,
        ..RootCountReport::empty()
    })
}

impl Variable {
    /// The variable kept by a resultant that eliminates `self`.
    pub fn kept(self) -> Self {
        self.other()
    }
}
