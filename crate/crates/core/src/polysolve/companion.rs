//! Brute-force oracle: all complex roots as companion-matrix eigenvalues.

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::game_model::UnivariatePoly;

/// Relative imaginary-part threshold below which a root counts as real.
pub const IMAG_THRESHOLD: f64 = 1e-8;

/// All roots of `p` (after trimming zero leading entries), including zero
/// roots with their multiplicity.
pub fn companion_oracle(p: &UnivariatePoly) -> Result<Vec<Complex64>> {
    let p = p.trimmed();
    if p.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let c = p.coeffs();
    let zeros = c.iter().position(|&x| x != 0.0).unwrap();
    let c = &c[zeros..];
    let n = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if n == 0 {
        return Ok(roots);
    }
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    balance_parlett_reinsch(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Degenerate("eigenvalue iteration did not converge".into()))?;
    roots.extend(schur.complex_eigenvalues().iter().copied());
    Ok(roots)
}

/// Positive and negative real-root counts from oracle roots. A root is real
/// when `|im| <= IMAG_THRESHOLD * max(1, |z|)`.
pub fn real_root_signs(roots: &[Complex64]) -> (usize, usize) {
    let mut pos = 0;
    let mut neg = 0;
    for z in roots {
        if z.im.abs() <= IMAG_THRESHOLD * z.norm().max(1.0) {
            if z.re > 0.0 {
                pos += 1;
            } else if z.re < 0.0 {
                neg += 1;
            }
        }
    }
    (pos, neg)
}
