//! Payoff tensors and the deterministic pipeline
//! payoff → payoff differences → aggregated coefficients → polynomial system.
//!
//! Tensors are stored flat. The outer index is the focal strategy (or the
//! equation), the inner index enumerates ordered opponent tuples
//! `(i_1, .., i_{d-1})` lexicographically with `i_1` most significant.
//! Coefficient systems use the lexicographic exponent rank from
//! [`ExponentSpace`] as the inner index.

mod exponent;
mod univariate;

pub use exponent::{
    binomial, binomial_f64, multinomial_coefficient, rank_lex, tuple_count, tuple_digits,
    ExponentIndex, ExponentSpace, TupleClasses, MAX_TUPLES,
};
pub use univariate::UnivariatePoly;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum(x) = 1` for frequency vectors.
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;

/// Portable JSON form shared by all tensor-like types.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct FlatJson {
    n: usize,
    d: usize,
    entries: Vec<f64>,
}

fn check_dims(n: usize, d: usize) -> Result<()> {
    if n < 2 || d < 2 {
        return Err(Error::Contract(format!("need n >= 2 and d >= 2, got n={n}, d={d}")));
    }
    Ok(())
}

fn check_entries(entries: &[f64], expected: usize, what: &str) -> Result<()> {
    if entries.len() != expected {
        return Err(Error::Contract(format!(
            "{what} has {} entries, expected {expected}",
            entries.len()
        )));
    }
    if entries.iter().any(|e| !e.is_finite()) {
        return Err(Error::Contract(format!("{what} has a non-finite entry")));
    }
    Ok(())
}

/// Payoffs `alpha^{i_0}_{i_1..i_{d-1}}` of a focal player using strategy `i_0`
/// against every ordered group of `d - 1` opponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FlatJson", into = "FlatJson")]
pub struct PayoffTensor {
    n: usize,
    d: usize,
    entries: Vec<f64>,
}

impl PayoffTensor {
    pub fn new(n: usize, d: usize, entries: Vec<f64>) -> Result<Self> {
        check_dims(n, d)?;
        check_entries(&entries, n * tuple_count(n, d)?, "payoff tensor")?;
        Ok(Self { n, d, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Row of the focal strategy (0-based).
    pub fn row(&self, focal: usize) -> &[f64] {
        let t = self.entries.len() / self.n;
        &self.entries[focal * t..(focal + 1) * t]
    }

    /// Payoff differences against the last strategy.
    pub fn beta(&self) -> BetaTensor {
        let t = self.entries.len() / self.n;
        let last = self.row(self.n - 1);
        let entries = (0..self.n - 1)
            .flat_map(|i| self.row(i).iter().zip(last).map(|(a, b)| a - b))
            .collect::<Vec<_>>();
        debug_assert_eq!(entries.len(), (self.n - 1) * t);
        BetaTensor { n: self.n, d: self.d, entries }
    }
}

impl TryFrom<FlatJson> for PayoffTensor {
    type Error = Error;
    fn try_from(j: FlatJson) -> Result<Self> {
        Self::new(j.n, j.d, j.entries)
    }
}

impl From<PayoffTensor> for FlatJson {
    fn from(t: PayoffTensor) -> Self {
        FlatJson { n: t.n, d: t.d, entries: t.entries }
    }
}

/// Differences `beta^i = alpha^i - alpha^n` for `i = 1..n-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FlatJson", into = "FlatJson")]
pub struct BetaTensor {
    n: usize,
    d: usize,
    entries: Vec<f64>,
}

impl BetaTensor {
    pub fn new(n: usize, d: usize, entries: Vec<f64>) -> Result<Self> {
        check_dims(n, d)?;
        check_entries(&entries, (n - 1) * tuple_count(n, d)?, "beta tensor")?;
        Ok(Self { n, d, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, equation: usize) -> &[f64] {
        let t = self.entries.len() / (self.n - 1);
        &self.entries[equation * t..(equation + 1) * t]
    }
}

impl TryFrom<FlatJson> for BetaTensor {
    type Error = Error;
    fn try_from(j: FlatJson) -> Result<Self> {
        Self::new(j.n, j.d, j.entries)
    }
}

impl From<BetaTensor> for FlatJson {
    fn from(t: BetaTensor) -> Self {
        FlatJson { n: t.n, d: t.d, entries: t.entries }
    }
}

/// The `n - 1` polynomial equations in `y_1..y_{n-1}`; coefficient `b^i_k`
/// for every exponent index `k`, dense in rank order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FlatJson", into = "FlatJson")]
pub struct CoefficientSystem {
    n: usize,
    d: usize,
    coeffs: Vec<Vec<f64>>,
}

impl CoefficientSystem {
    pub fn new(n: usize, d: usize, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        check_dims(n, d)?;
        let len = ExponentSpace::new(n, d)?.len();
        if coeffs.len() != n - 1 {
            return Err(Error::Contract(format!(
                "system has {} equations, expected {}",
                coeffs.len(),
                n - 1
            )));
        }
        for eq in &coeffs {
            check_entries(eq, len, "coefficient system equation")?;
        }
        Ok(Self { n, d, coeffs })
    }

    /// Constructor for callers that already guarantee the shape.
    pub(crate) fn from_parts(n: usize, d: usize, coeffs: Vec<Vec<f64>>) -> Self {
        Self { n, d, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn equations(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn equation(&self, i: usize) -> &[f64] {
        &self.coeffs[i]
    }

    pub fn scale(&self, factor: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|eq| eq.iter().map(|c| c * factor).collect())
            .collect();
        Self { n: self.n, d: self.d, coeffs }
    }

    /// Evaluate every equation at an orthant point `y` (length n - 1).
    pub fn eval_orthant(&self, space: &ExponentSpace, y: &[f64]) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|eq| {
                space
                    .indices()
                    .iter()
                    .zip(eq)
                    .map(|(idx, b)| {
                        b * idx
                            .free()
                            .iter()
                            .zip(y)
                            .map(|(&k, &yi)| yi.powi(k as i32))
                            .product::<f64>()
                    })
                    .sum()
            })
            .collect()
    }

    /// Evaluate every equation in homogeneous simplex form at `x` (length n).
    pub fn eval_simplex(&self, space: &ExponentSpace, x: &[f64]) -> Vec<f64> {
        let last = x[self.n - 1];
        self.coeffs
            .iter()
            .map(|eq| {
                space
                    .indices()
                    .iter()
                    .zip(eq)
                    .map(|(idx, b)| {
                        let free: f64 = idx
                            .free()
                            .iter()
                            .zip(x)
                            .map(|(&k, &xi)| xi.powi(k as i32))
                            .product();
                        b * free * last.powi(idx.last() as i32)
                    })
                    .sum()
            })
            .collect()
    }
}

impl TryFrom<FlatJson> for CoefficientSystem {
    type Error = Error;
    fn try_from(j: FlatJson) -> Result<Self> {
        check_dims(j.n, j.d)?;
        let len = ExponentSpace::new(j.n, j.d)?.len();
        if j.entries.len() != (j.n - 1) * len {
            return Err(Error::Contract(format!(
                "coefficient system has {} entries, expected {}",
                j.entries.len(),
                (j.n - 1) * len
            )));
        }
        let coeffs = j.entries.chunks(len).map(|c| c.to_vec()).collect();
        Self::new(j.n, j.d, coeffs)
    }
}

impl From<CoefficientSystem> for FlatJson {
    fn from(s: CoefficientSystem) -> Self {
        FlatJson { n: s.n, d: s.d, entries: s.coeffs.concat() }
    }
}

/// Sum each row of a tuple-indexed table over its composition classes.
fn aggregate_rows(rows: impl Iterator<Item = impl AsRef<[f64]>>, classes: &TupleClasses, len: usize) -> Vec<Vec<f64>> {
    rows.map(|row| {
        let mut out = vec![0.0; len];
        for (t, &v) in row.as_ref().iter().enumerate() {
            out[classes.class_of(t)] += v;
        }
        out
    })
    .collect()
}

/// Coefficients `b^i_k = sum of beta^i over the composition class of k`.
pub fn aggregate_coefficients(beta: &BetaTensor) -> Result<CoefficientSystem> {
    let classes = TupleClasses::new(beta.n, beta.d)?;
    Ok(aggregate_with(beta, &classes))
}

/// [`aggregate_coefficients`] with a precomputed class table.
pub fn aggregate_with(beta: &BetaTensor, classes: &TupleClasses) -> CoefficientSystem {
    let len = binomial_f64((beta.d - 1 + beta.n - 1) as u32, (beta.n - 1) as u32) as usize;
    let coeffs = aggregate_rows((0..beta.n - 1).map(|i| beta.row(i)), classes, len);
    CoefficientSystem::from_parts(beta.n, beta.d, coeffs)
}

fn check_frequency(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::Contract(format!("frequency vector has length {}, expected {n}", x.len())));
    }
    if x.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::Contract("frequency vector has a negative entry".into()));
    }
    let s: f64 = x.iter().sum();
    if (s - 1.0).abs() > SIMPLEX_SUM_TOL {
        return Err(Error::Contract(format!("frequency vector sums to {s}, not 1")));
    }
    Ok(())
}

fn check_interior(x: &[f64], n: usize) -> Result<()> {
    check_frequency(x, n)?;
    if x.iter().any(|&v| v <= 0.0 || v >= 1.0) {
        return Err(Error::Domain(format!("{x:?} is not an interior simplex point")));
    }
    Ok(())
}

/// Fitness `pi_{i_0}` of every strategy at frequencies `x`, by direct
/// summation over all opponent tuples.
pub fn fitness(payoff: &PayoffTensor, x: &[f64]) -> Result<Vec<f64>> {
    check_frequency(x, payoff.n)?;
    let t = payoff.entries.len() / payoff.n;
    let weights: Vec<f64> = (0..t)
        .map(|tuple| {
            tuple_digits(payoff.n, payoff.d, tuple)
                .into_iter()
                .map(|s| x[s])
                .product()
        })
        .collect();
    Ok((0..payoff.n)
        .map(|i| payoff.row(i).iter().zip(&weights).map(|(a, w)| a * w).sum())
        .collect())
}

/// Fitness through the aggregated multinomial form: payoff rows are first
/// summed over composition classes, then evaluated as homogeneous polynomials.
pub fn fitness_aggregated(payoff: &PayoffTensor, x: &[f64]) -> Result<Vec<f64>> {
    check_frequency(x, payoff.n)?;
    let classes = TupleClasses::new(payoff.n, payoff.d)?;
    let space = ExponentSpace::new(payoff.n, payoff.d)?;
    let rows = aggregate_rows((0..payoff.n).map(|i| payoff.row(i)), &classes, space.len());
    // reuse the system evaluator with n rows instead of n - 1
    let sys = CoefficientSystem::from_parts(payoff.n, payoff.d, rows);
    Ok(sys.eval_simplex(&space, x))
}

/// `x_i = y_i / (1 + sum y)`, `x_n = 1 / (1 + sum y)`.
pub fn orthant_to_simplex(y: &[f64]) -> Result<Vec<f64>> {
    if y.is_empty() || y.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain(format!("{y:?} is not in the open positive orthant")));
    }
    let denom = 1.0 + y.iter().sum::<f64>();
    let mut x: Vec<f64> = y.iter().map(|v| v / denom).collect();
    x.push(1.0 / denom);
    Ok(x)
}

/// `y_i = x_i / x_n`.
pub fn simplex_to_orthant(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::Contract("simplex point needs at least two entries".into()));
    }
    check_interior(x, x.len())?;
    let last = x[x.len() - 1];
    Ok(x[..x.len() - 1].iter().map(|v| v / last).collect())
}

/// `(pi_1 - pi_n, .., pi_{n-1} - pi_n)` at an interior point, evaluated
/// through the aggregated polynomials of the game.
pub fn replicator_residual(beta: &BetaTensor, x: &[f64]) -> Result<Vec<f64>> {
    check_interior(x, beta.n)?;
    let system = aggregate_coefficients(beta)?;
    let space = ExponentSpace::new(beta.n, beta.d)?;
    Ok(system.eval_simplex(&space, x))
}

/// The single-equation system of a two-strategy game as a dense polynomial.
pub fn to_univariate(system: &CoefficientSystem) -> Result<UnivariatePoly> {
    if system.n != 2 {
        return Err(Error::Contract(format!(
            "univariate form needs n = 2, got n = {}",
            system.n
        )));
    }
    UnivariatePoly::new(system.coeffs[0].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Beta tensor for n = 2 from a closure over 0-based opponent tuples,
    /// where tuple entry 0 means strategy 1.
    fn beta2(d: usize, f: impl Fn(&[usize]) -> f64) -> BetaTensor {
        let t = tuple_count(2, d).unwrap();
        let e = (0..t).map(|i| f(&tuple_digits(2, d, i))).collect();
        BetaTensor::new(2, d, e).unwrap()
    }

    #[test]
    fn three_player_two_strategy_coefficients() {
        // beta_{i,j} encoded as distinct primes to expose every summand
        let val = |t: &[usize]| match (t[0], t[1]) {
            (1, 1) => 2.0,  // beta_{2,2}
            (0, 1) => 3.0,  // beta_{1,2}
            (1, 0) => 5.0,  // beta_{2,1}
            (0, 0) => 7.0,  // beta_{1,1}
            _ => unreachable!(),
        };
        let sys = aggregate_coefficients(&beta2(3, val)).unwrap();
        assert_eq!(to_univariate(&sys).unwrap().coeffs(), &[2.0, 8.0, 7.0]);
    }

    #[test]
    fn four_player_two_strategy_coefficients() {
        // value = 1 + 10 * (position bits) makes each tuple unique
        let val = |t: &[usize]| 1.0 + (t[0] * 4 + t[1] * 2 + t[2]) as f64 * 10.0;
        let sys = aggregate_coefficients(&beta2(4, val)).unwrap();
        let b = to_univariate(&sys).unwrap();
        let beta = |i: usize, j: usize, k: usize| val(&[i - 1, j - 1, k - 1]);
        assert_eq!(b.coeffs()[0], beta(2, 2, 2));
        assert_eq!(b.coeffs()[1], beta(1, 2, 2) + beta(2, 1, 2) + beta(2, 2, 1));
        assert_eq!(b.coeffs()[2], beta(1, 1, 2) + beta(1, 2, 1) + beta(2, 1, 1));
        assert_eq!(b.coeffs()[3], beta(1, 1, 1));
    }

    #[test]
    fn three_player_three_strategy_cross_term() {
        let t = tuple_count(3, 3).unwrap();
        let entries: Vec<f64> = (0..2 * t).map(|i| (i * i + 1) as f64).collect();
        let beta = BetaTensor::new(3, 3, entries).unwrap();
        let sys = aggregate_coefficients(&beta).unwrap();
        let space = ExponentSpace::new(3, 3).unwrap();
        let flat = |a: usize, b: usize| (a - 1) * 3 + (b - 1);
        for eq in 0..2 {
            let row = beta.row(eq);
            let y1y2 = space.rank(&[1, 1]).unwrap();
            assert_eq!(sys.equation(eq)[y1y2], row[flat(1, 2)] + row[flat(2, 1)]);
            let y1 = space.rank(&[1, 0]).unwrap();
            assert_eq!(sys.equation(eq)[y1], row[flat(1, 3)] + row[flat(3, 1)]);
            let y2sq = space.rank(&[0, 2]).unwrap();
            assert_eq!(sys.equation(eq)[y2sq], row[flat(2, 2)]);
            let c = space.rank(&[0, 0]).unwrap();
            assert_eq!(sys.equation(eq)[c], row[flat(3, 3)]);
        }
    }

    #[test]
    fn fitness_examples() {
        // pairwise game: pi_1 = a11 x1 + a12 x2
        let p = PayoffTensor::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let pi = fitness(&p, &[0.25, 0.75]).unwrap();
        assert!((pi[0] - (0.25 + 1.5)).abs() < 1e-15);
        assert!((pi[1] - (0.75 + 3.0)).abs() < 1e-15);

        // pure strategy 1 picks the all-ones tuple
        let t = tuple_count(3, 3).unwrap();
        let p = PayoffTensor::new(3, 3, (0..3 * t).map(|i| i as f64).collect()).unwrap();
        let pi = fitness(&p, &[1.0, 0.0, 0.0]).unwrap();
        for i in 0..3 {
            assert_eq!(pi[i], p.row(i)[0]);
        }

        let c = PayoffTensor::new(3, 4, vec![2.5; 3 * 27]).unwrap();
        for v in fitness(&c, &[0.2, 0.3, 0.5]).unwrap() {
            assert!((v - 2.5).abs() < 1e-12);
        }
        assert!(fitness(&c, &[0.2, 0.3, 0.6]).is_err());
        assert!(fitness(&c, &[-0.1, 0.6, 0.5]).is_err());
    }

    #[test]
    fn transform_examples() {
        let x = orthant_to_simplex(&[1.0, 1.0]).unwrap();
        for v in &x {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(simplex_to_orthant(&[0.5, 0.5]).unwrap(), vec![1.0]);
        let y = simplex_to_orthant(&orthant_to_simplex(&[0.3, 2.7]).unwrap()).unwrap();
        assert!((y[0] - 0.3).abs() < 1e-12 && (y[1] - 2.7).abs() < 1e-12);
        assert!(matches!(orthant_to_simplex(&[0.0, 1.0]), Err(Error::Domain(_))));
        assert!(matches!(simplex_to_orthant(&[1.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn residual_examples() {
        let zero = BetaTensor::new(3, 3, vec![0.0; 18]).unwrap();
        assert!(replicator_residual(&zero, &[0.2, 0.3, 0.5])
            .unwrap()
            .iter()
            .all(|&r| r == 0.0));

        // y^2 - 1 has the root y = 1, i.e. x = (1/2, 1/2)
        let beta = beta2(3, |t| match (t[0], t[1]) {
            (1, 1) => -1.0,
            (0, 0) => 1.0,
            _ => 0.0,
        });
        let r = replicator_residual(&beta, &[0.5, 0.5]).unwrap();
        assert!(r[0].abs() < 1e-15);
        assert!(replicator_residual(&beta, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn zero_beta_is_degenerate_univariate() {
        let sys = aggregate_coefficients(&BetaTensor::new(2, 4, vec![0.0; 8]).unwrap()).unwrap();
        let p = to_univariate(&sys).unwrap();
        assert!(p.is_degenerate() && p.is_zero());
        let three = aggregate_coefficients(&BetaTensor::new(3, 2, vec![0.0; 6]).unwrap()).unwrap();
        assert!(to_univariate(&three).is_err());
    }

    #[test]
    fn json_round_trip_keeps_canonical_order() {
        let p = PayoffTensor::new(2, 3, (0..8).map(|i| i as f64).collect()).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"n":2,"d":3,"entries":[0.0,1.0,2.0,3.0,4.0,5.0,6.0,7.0]}"#);
        let back: PayoffTensor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let sys = aggregate_coefficients(&p.beta()).unwrap();
        let back: CoefficientSystem =
            serde_json::from_str(&serde_json::to_string(&sys).unwrap()).unwrap();
        assert_eq!(back, sys);
        assert!(serde_json::from_str::<BetaTensor>(r#"{"n":2,"d":3,"entries":[1.0]}"#).is_err());
    }
}
