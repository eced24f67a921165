//! Multi-indices, combinatorial counts and the tuple → composition-class map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tuple table we are willing to materialize (n^(d-1) entries).
pub const MAX_TUPLES: usize = 1 << 24;

/// `total! / prod(parts_i!)` in exact integer arithmetic.
///
/// Computed as a product of binomials so intermediate values stay as small
/// as the result allows; overflow of `u64` is reported, never wrapped.
pub fn multinomial_coefficient(total: u32, parts: &[u32]) -> Result<u64> {
    let sum: u64 = parts.iter().map(|&p| p as u64).sum();
    if sum != total as u64 {
        return Err(Error::Contract(format!(
            "multinomial parts sum to {sum}, expected {total}"
        )));
    }
    let mut remaining = total;
    let mut acc: u64 = 1;
    for &p in parts {
        let b = binomial(remaining, p)?;
        acc = acc
            .checked_mul(b)
            .ok_or_else(|| Error::Overflow(format!("multinomial({total}; {parts:?})")))?;
        remaining -= p;
    }
    Ok(acc)
}

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is exact at every step
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::Overflow(format!("binomial({n}, {k})")));
        }
    }
    Ok(acc as u64)
}

/// Binomial coefficient in double precision, usable far past the `u64` range.
pub fn binomial_f64(n: u32, k: u32) -> f64 {
    if let Ok(exact) = binomial(n, k) {
        return exact as f64;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Exponent multi-index `(k_1, .., k_{n-1})` with `|k| <= d - 1`; the last
/// component `k_n = d - 1 - |k|` is implied.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentIndex {
    k: Vec<u32>,
    degree: u32,
}

impl ExponentIndex {
    pub fn new(k: Vec<u32>, degree: u32) -> Result<Self> {
        let s: u32 = k.iter().sum();
        if s > degree {
            return Err(Error::Contract(format!(
                "exponent {k:?} exceeds total degree {degree}"
            )));
        }
        Ok(Self { k, degree })
    }

    pub fn free(&self) -> &[u32] {
        &self.k
    }

    /// The implied exponent of the last strategy.
    pub fn last(&self) -> u32 {
        self.degree - self.k.iter().sum::<u32>()
    }

    /// All n components, summing to d - 1.
    pub fn full(&self) -> Vec<u32> {
        let mut v = self.k.clone();
        v.push(self.last());
        v
    }

    pub fn multinomial(&self) -> Result<u64> {
        multinomial_coefficient(self.degree, &self.full())
    }

    pub fn multinomial_f64(&self) -> f64 {
        let mut remaining = self.degree;
        let mut acc = 1.0;
        for &p in &self.k {
            acc *= binomial_f64(remaining, p);
            remaining -= p;
        }
        acc
    }
}

/// Number of vectors of `slots` nonnegative integers with sum at most `budget`.
fn bounded_compositions(slots: u32, budget: u32) -> usize {
    binomial_f64(budget + slots, slots) as usize
}

/// The dense space of exponent multi-indices for an `(n, d)` game, in
/// lexicographic order over `(k_1, .., k_{n-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSpace {
    n: usize,
    d: usize,
    indices: Vec<ExponentIndex>,
}

impl ExponentSpace {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n < 2 || d < 2 {
            return Err(Error::Contract(format!("need n >= 2 and d >= 2, got n={n}, d={d}")));
        }
        let degree = (d - 1) as u32;
        let slots = n - 1;
        let mut indices = Vec::with_capacity(bounded_compositions(slots as u32, degree));
        let mut cur = vec![0u32; slots];
        enumerate(&mut cur, 0, degree, &mut |k| {
            indices.push(ExponentIndex { k: k.to_vec(), degree })
        });
        Ok(Self { n, d, indices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[ExponentIndex] {
        &self.indices
    }

    /// Position of `k` in the lexicographic enumeration.
    pub fn rank(&self, k: &[u32]) -> Result<usize> {
        if k.len() != self.n - 1 {
            return Err(Error::Contract(format!(
                "exponent has {} components, expected {}",
                k.len(),
                self.n - 1
            )));
        }
        rank_lex(k, (self.d - 1) as u32)
    }
}

fn enumerate(cur: &mut [u32], pos: usize, budget: u32, out: &mut impl FnMut(&[u32])) {
    if pos == cur.len() {
        out(cur);
        return;
    }
    for v in 0..=budget {
        cur[pos] = v;
        enumerate(cur, pos + 1, budget - v, out);
    }
    cur[pos] = 0;
}

/// Combinatorial rank of `k` among vectors with sum `<= degree`, lexicographic.
pub fn rank_lex(k: &[u32], degree: u32) -> Result<usize> {
    let mut budget = degree;
    let mut rank = 0usize;
    for (j, &kj) in k.iter().enumerate() {
        if kj > budget {
            return Err(Error::Contract(format!("exponent {k:?} exceeds degree {degree}")));
        }
        let rest = (k.len() - j - 1) as u32;
        for v in 0..kj {
            rank += bounded_compositions(rest, budget - v);
        }
        budget -= kj;
    }
    Ok(rank)
}

/// Lookup from flat tuple index (lexicographic over `(i_1, .., i_{d-1})`) to
/// the rank of its composition class.
#[derive(Debug, Clone)]
pub struct TupleClasses {
    n: usize,
    d: usize,
    class_of: Vec<u32>,
}

impl TupleClasses {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        let count = tuple_count(n, d)?;
        let degree = (d - 1) as u32;
        let mut class_of = Vec::with_capacity(count);
        let mut digits = vec![0usize; d - 1];
        let mut k = vec![0u32; n - 1];
        for _ in 0..count {
            k.iter_mut().for_each(|c| *c = 0);
            for &s in &digits {
                if s < n - 1 {
                    k[s] += 1;
                }
            }
            class_of.push(rank_lex(&k, degree)? as u32);
            // increment the base-n counter, last digit fastest
            for pos in (0..d - 1).rev() {
                digits[pos] += 1;
                if digits[pos] < n {
                    break;
                }
                digits[pos] = 0;
            }
        }
        Ok(Self { n, d, class_of })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    #[inline]
    pub fn class_of(&self, tuple: usize) -> usize {
        self.class_of[tuple] as usize
    }
}

/// `n^(d-1)`, the number of ordered opponent tuples.
pub fn tuple_count(n: usize, d: usize) -> Result<usize> {
    let mut c: usize = 1;
    for _ in 0..d - 1 {
        c = c
            .checked_mul(n)
            .filter(|&c| c <= MAX_TUPLES)
            .ok_or_else(|| Error::Overflow(format!("tuple count {n}^{}", d - 1)))?;
    }
    Ok(c)
}

/// Decode a flat tuple index into 0-based strategies `(i_1, .., i_{d-1})`.
pub fn tuple_digits(n: usize, d: usize, mut tuple: usize) -> Vec<usize> {
    let mut out = vec![0; d - 1];
    for pos in (0..d - 1).rev() {
        out[pos] = tuple % n;
        tuple /= n;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial_coefficient(3, &[1, 1, 1]).unwrap(), 6);
        assert_eq!(multinomial_coefficient(2, &[2, 0]).unwrap(), 1);
        assert_eq!(multinomial_coefficient(3, &[2, 1]).unwrap(), 3);
    }

    #[test]
    fn multinomial_rejects_bad_sum_and_overflow() {
        assert!(matches!(
            multinomial_coefficient(3, &[1, 1]),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            multinomial_coefficient(200, &[100, 100]),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn binomial_f64_matches_exact() {
        for n in 0..60u32 {
            for k in 0..=n {
                assert_eq!(binomial_f64(n, k), binomial(n, k).unwrap() as f64);
            }
        }
        // C(199, 99) ~ 4.5e58 via the product form
        let big = binomial_f64(199, 99);
        let log_exact: f64 = (1..=199).map(|i| (i as f64).ln()).sum::<f64>()
            - (1..=99).map(|i| (i as f64).ln()).sum::<f64>()
            - (1..=100).map(|i| (i as f64).ln()).sum::<f64>();
        assert!((big.ln() - log_exact).abs() < 1e-10);
    }

    #[test]
    fn rank_matches_enumeration() {
        for n in 2..=4 {
            for d in 2..=6 {
                let space = ExponentSpace::new(n, d).unwrap();
                for (i, idx) in space.indices().iter().enumerate() {
                    assert_eq!(space.rank(idx.free()).unwrap(), i);
                }
                assert_eq!(
                    space.len(),
                    binomial((d - 1 + n - 1) as u32, (n - 1) as u32).unwrap() as usize
                );
            }
        }
    }

    #[test]
    fn class_sizes_are_multinomials() {
        for n in 2..=3 {
            for d in 2..=6 {
                let space = ExponentSpace::new(n, d).unwrap();
                let classes = TupleClasses::new(n, d).unwrap();
                let mut counts = vec![0u64; space.len()];
                for t in 0..classes.len() {
                    counts[classes.class_of(t)] += 1;
                }
                let mut total = 0;
                for (idx, &c) in space.indices().iter().zip(&counts) {
                    assert_eq!(c, idx.multinomial().unwrap());
                    total += c;
                }
                assert_eq!(total as usize, n.pow((d - 1) as u32));
            }
        }
    }

    #[test]
    fn univariate_rank_is_power() {
        let space = ExponentSpace::new(2, 7).unwrap();
        for k in 0..7u32 {
            assert_eq!(space.rank(&[k]).unwrap(), k as usize);
        }
    }
}
