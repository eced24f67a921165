//! Counting positive real roots: Sturm sequences for univariate
//! polynomials, a linear solve for two-player games, Sylvester-resultant
//! elimination for three-strategy systems, and a companion-matrix oracle.

mod angular;
mod ball;
mod bivariate;
mod companion;
mod exact;
mod linear;
mod sturm;

pub use angular::{count_real_roots_angular, SignedCount, CELLS_PER_DEGREE};
pub use ball::Ball;
pub use bivariate::{
    count_positive_bivariate, count_positive_eliminating, resultant_eliminate, BivariateSystem,
    Variable,
};
pub use companion::{companion_oracle, real_root_signs, IMAG_THRESHOLD};
pub use exact::{ExactChain, IntPoly};
pub use linear::solve_linear;
pub use sturm::{exact_sign, isolate_refine, sturm_count_negative, sturm_count_positive, SturmChain};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game_model::{to_univariate, CoefficientSystem, UnivariatePoly};

/// Default relative tolerance for matching back-substituted roots.
pub const DEFAULT_MATCH_TOL: f64 = 1e-8;

/// Result of counting the positive roots of one polynomial or system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootCountReport {
    /// Distinct roots in the open positive orthant.
    pub count: usize,
    /// Disjoint isolating intervals (univariate isolation only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intervals: Vec<(f64, f64)>,
    /// Refined root approximations (univariate isolation only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub roots: Vec<f64>,
    /// Positive solution points of multivariate systems.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub solutions: Vec<Vec<f64>>,
    /// The sample could not be resolved and should be redrawn.
    pub degenerate: bool,
    /// Whether the count needed exact integer arithmetic.
    #[serde(default)]
    pub exact_arithmetic: bool,
}

impl RootCountReport {
    pub fn empty() -> Self {
        Self {
            count: 0,
            intervals: vec![],
            roots: vec![],
            solutions: vec![],
            degenerate: false,
            exact_arithmetic: false,
        }
    }
}

/// Positive and negative real-root counts of a univariate polynomial.
///
/// Uses the certified angular counter and falls back to Sturm chains
/// (certified floating point, then exact) when it cannot decide.
pub fn count_signed_roots(p: &UnivariatePoly) -> Result<SignedCount> {
    if p.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    if let Some(c) = count_real_roots_angular(p) {
        return Ok(c);
    }
    Ok(SignedCount {
        positive: sturm_count_positive(p)?.count,
        negative: sturm_count_negative(p)?.count,
    })
}

/// Positive-root count of a univariate polynomial through the fastest
/// certified path.
pub fn count_positive_univariate(p: &UnivariatePoly) -> Result<RootCountReport> {
    if p.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    if let Some(c) = count_real_roots_angular(p) {
        return Ok(RootCountReport { count: c.positive, ..RootCountReport::empty() });
    }
    sturm_count_positive(p)
}

/// Number of internal equilibria of a game given by its coefficient system,
/// routed by regime: univariate for `n = 2`, linear for `d = 2`,
/// resultant elimination for `n = 3, d = 3`.
pub fn count_internal_equilibria(system: &CoefficientSystem, tol: f64) -> Result<RootCountReport> {
    match (system.n(), system.d()) {
        (2, _) => {
            let p = to_univariate(system)?;
            match count_positive_univariate(&p) {
                Err(Error::Degenerate(_)) => {
                    Ok(RootCountReport { degenerate: true, ..RootCountReport::empty() })
                }
                r => r,
            }
        }
        (_, 2) => solve_linear(system),
        (3, 3) => count_positive_bivariate(&BivariateSystem::from_system(system)?, tol),
        (n, d) => Err(Error::Unsolvable { n, d }),
    }
}

/// Whether `(n, d)` is in the regime [`count_internal_equilibria`] handles.
pub fn solvable(n: usize, d: usize) -> bool {
    n >= 2 && d >= 2 && (n == 2 || d == 2 || (n == 3 && d == 3))
}
