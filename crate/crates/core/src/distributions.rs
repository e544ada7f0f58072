//! Tuple distributions over `{0,…,q}^k` and their coordinate-wise products.
//!
//! The workhorse family is the uniform distribution over tuples
//! `(a, b, a+b, a+2b, …, a+qb) mod (q+1)`, its noisy mixtures with the uniform
//! distribution, and the R-fold product `p(x¹,…,x^k) = ∏_i factor(x¹_i,…,x^k_i)`.
//! Products are never materialized; exact consumers stream the support through
//! [`ProductDistribution::iterate_support`] or the integer-weighted fold used
//! by the evaluators.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::limits::{check_cap, Caps};
use crate::point::{point_count, Point};
use crate::rational::Rational;

pub(crate) fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// A probability table over `{0,…,alphabet-1}^arity`, indexed by tuple code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleDistribution {
    arity: usize,
    alphabet: usize,
    table: Vec<Rational>,
}

impl TupleDistribution {
    pub fn new(arity: usize, alphabet: usize, table: Vec<Rational>) -> Result<Self> {
        if arity == 0 || alphabet < 2 {
            return invalid("arity must be positive and the alphabet at least 2");
        }
        let n = point_count(arity, alphabet)
            .ok_or_else(|| Error::InvalidParameter("tuple table too large".into()))?;
        if table.len() != n {
            return Err(Error::Dimension(format!(
                "table has {} entries, expected {alphabet}^{arity} = {n}",
                table.len()
            )));
        }
        if table.iter().any(Rational::is_negative) {
            return invalid("negative probability");
        }
        let total: Rational = table.iter().sum();
        if !total.is_one() {
            return invalid(format!("probabilities sum to {total}, not 1"));
        }
        Ok(TupleDistribution {
            arity,
            alphabet,
            table,
        })
    }

    /// Uniform over `(a, b, a+b, a+2b, …, a+qb) mod (q+1)`; arity `q+2`.
    pub fn eta(q: usize) -> Result<Self> {
        let base = q + 1;
        if q == 0 || !is_prime(base) {
            return invalid(format!("q+1 = {base} must be prime with q >= 1"));
        }
        let arity = q + 2;
        let n = point_count(arity, base)
            .ok_or_else(|| Error::InvalidParameter(format!("q = {q} too large")))?;
        let mut table = vec![Rational::zero(); n];
        let mass = Rational::new(1, (base * base) as i64);
        for a in 0..base {
            for b in 0..base {
                let mut tuple = vec![a, b];
                tuple.extend((1..=q).map(|m| (a + m * b) % base));
                table[tuple_code(&tuple, base)] = mass.clone();
            }
        }
        TupleDistribution::new(arity, base, table)
    }

    pub fn uniform(arity: usize, alphabet: usize) -> Result<Self> {
        let n = point_count(arity, alphabet)
            .ok_or_else(|| Error::InvalidParameter("tuple table too large".into()))?;
        TupleDistribution::new(arity, alphabet, vec![Rational::new(1, n as i64); n])
    }

    pub fn point_mass(tuple: &[u8], alphabet: usize) -> Result<Self> {
        let n = point_count(tuple.len(), alphabet)
            .ok_or_else(|| Error::InvalidParameter("tuple table too large".into()))?;
        if tuple.iter().any(|&t| t as usize >= alphabet) {
            return invalid("tuple entry outside alphabet");
        }
        let mut table = vec![Rational::zero(); n];
        let digits: Vec<usize> = tuple.iter().map(|&t| t as usize).collect();
        table[tuple_code(&digits, alphabet)] = Rational::one();
        TupleDistribution::new(tuple.len(), alphabet, table)
    }

    /// `(1-ε)·self + ε·uniform`, for rational `0 < ε < 1`.
    pub fn add_noise(&self, eps: &Rational) -> Result<Self> {
        if !eps.is_positive() || *eps >= Rational::one() {
            return invalid(format!("noise level {eps} must lie strictly between 0 and 1"));
        }
        let uniform = Rational::new(1, self.table.len() as i64);
        let keep = Rational::one() - eps;
        let noise = eps * &uniform;
        let table = self.table.iter().map(|p| &keep * p + &noise).collect();
        TupleDistribution::new(self.arity, self.alphabet, table)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn prob(&self, tuple: &[u8]) -> Result<&Rational> {
        if tuple.len() != self.arity {
            return Err(Error::Dimension(format!(
                "tuple of length {}, distribution arity {}",
                tuple.len(),
                self.arity
            )));
        }
        if tuple.iter().any(|&t| t as usize >= self.alphabet) {
            return invalid("tuple entry outside alphabet");
        }
        let digits: Vec<usize> = tuple.iter().map(|&t| t as usize).collect();
        Ok(&self.table[tuple_code(&digits, self.alphabet)])
    }

    pub fn tuple_of(&self, code: usize) -> Vec<u8> {
        Point::from_code(code, self.arity, self.alphabet)
            .entries()
            .to_vec()
    }

    /// Nonzero entries in code order.
    pub fn support(&self) -> Vec<(Vec<u8>, Rational)> {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(code, p)| (self.tuple_of(code), p.clone()))
            .collect()
    }

    pub fn analyze(&self) -> DistributionReport {
        let k = self.arity;
        let s = self.alphabet;
        let mut single = vec![Rational::zero(); k * s];
        let mut pairs = vec![Rational::zero(); k * k * s * s];
        let mut some_zero = Rational::zero();
        for (tuple, p) in self.support() {
            for i in 0..k {
                single[i * s + tuple[i] as usize] += &p;
                for j in (i + 1)..k {
                    pairs[((i * k + j) * s + tuple[i] as usize) * s + tuple[j] as usize] += &p;
                }
            }
            if tuple.contains(&0) {
                some_zero += &p;
            }
        }
        let one_over = Rational::new(1, s as i64);
        let one_over_sq = Rational::new(1, (s * s) as i64);
        let balanced = single.iter().all(|m| *m == one_over);
        let pairwise_independent = (0..k).all(|i| {
            ((i + 1)..k).all(|j| {
                (0..s * s).all(|vv| pairs[(i * k + j) * s * s + vv] == one_over_sq)
            })
        });
        DistributionReport {
            balanced,
            pairwise_independent,
            min_probability: self.table.iter().min().cloned().unwrap_or_default(),
            prob_some_zero: some_zero,
        }
    }

    pub fn to_document(&self) -> DistributionDocument {
        DistributionDocument {
            q: self.alphabet - 1,
            arity: self.arity,
            entries: self
                .support()
                .into_iter()
                .map(|(tuple, prob)| DistributionEntry { tuple, prob })
                .collect(),
        }
    }

    pub fn from_document(doc: &DistributionDocument) -> Result<Self> {
        let alphabet = doc.q + 1;
        let n = point_count(doc.arity, alphabet)
            .ok_or_else(|| Error::InvalidParameter("tuple table too large".into()))?;
        let mut table = vec![Rational::zero(); n];
        for e in &doc.entries {
            if e.tuple.len() != doc.arity || e.tuple.iter().any(|&t| t as usize >= alphabet) {
                return invalid(format!("bad tuple {:?}", e.tuple));
            }
            let digits: Vec<usize> = e.tuple.iter().map(|&t| t as usize).collect();
            table[tuple_code(&digits, alphabet)] = e.prob.clone();
        }
        TupleDistribution::new(doc.arity, alphabet, table)
    }
}

pub(crate) fn tuple_code(digits: &[usize], base: usize) -> usize {
    digits.iter().rev().fold(0, |acc, &d| acc * base + d)
}

/// Exact summary of a tuple distribution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionReport {
    /// Every single-slot marginal is uniform.
    pub balanced: bool,
    /// Every two-slot marginal is uniform.
    pub pairwise_independent: bool,
    pub min_probability: Rational,
    /// Mass of tuples with at least one zero entry.
    pub prob_some_zero: Rational,
}

/// JSON form: nonzero entries only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionDocument {
    pub q: usize,
    pub arity: usize,
    pub entries: Vec<DistributionEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionEntry {
    pub tuple: Vec<u8>,
    pub prob: Rational,
}

/// The R-fold coordinate-wise product of a tuple distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductDistribution {
    factor: TupleDistribution,
    r: usize,
}

impl ProductDistribution {
    pub fn new(factor: TupleDistribution, r: usize) -> Result<Self> {
        if r == 0 {
            return invalid("R must be positive");
        }
        if point_count(r, factor.alphabet).is_none() {
            return invalid("point space too large");
        }
        Ok(ProductDistribution { factor, r })
    }

    /// The dictator-test distribution `p_{(q,ε)}`; `ε = 0` gives the noiseless product.
    pub fn noisy_eta(q: usize, eps: &Rational, r: usize) -> Result<Self> {
        let eta = TupleDistribution::eta(q)?;
        let factor = if eps.is_zero() { eta } else { eta.add_noise(eps)? };
        ProductDistribution::new(factor, r)
    }

    pub fn factor(&self) -> &TupleDistribution {
        &self.factor
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of points `k` per draw.
    pub fn arity(&self) -> usize {
        self.factor.arity
    }

    pub fn alphabet(&self) -> usize {
        self.factor.alphabet
    }

    pub fn point_count(&self) -> usize {
        point_count(self.r, self.factor.alphabet).expect("checked on construction")
    }

    /// `(#nonzero factor entries)^R`, or `None` on overflow.
    pub fn support_size(&self) -> Option<u128> {
        let s = self.factor.support().len() as u128;
        s.checked_pow(self.r as u32)
    }

    pub(crate) fn check_enumeration(&self, caps: &Caps) -> Result<u128> {
        check_cap(
            "product-distribution support enumeration",
            self.support_size(),
            caps.enumeration_leaves,
            "use Monte Carlo mode for larger R",
        )
    }

    /// Streams every support element with its exact probability.
    pub fn iterate_support(&self, caps: &Caps) -> Result<SupportIter<'_>> {
        self.check_enumeration(caps)?;
        Ok(SupportIter {
            product: self,
            support: self.factor.support(),
            odometer: Some(vec![0; self.r]),
        })
    }

    /// One draw of `k` points; deterministic in `seed`.
    pub fn sample(&self, seed: u64) -> Result<Vec<Point>> {
        let sampler = ProductSampler::new(self)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(sampler.draw(&mut rng))
    }

    pub fn sampler(&self) -> Result<ProductSampler> {
        ProductSampler::new(self)
    }

    /// Integer weights over a common denominator for the exact fold.
    pub(crate) fn scaled(&self, caps: &Caps) -> Result<ScaledProduct> {
        self.check_enumeration(caps)?;
        ScaledProduct::new(self)
    }
}

/// Iterator returned by [`ProductDistribution::iterate_support`].
pub struct SupportIter<'a> {
    product: &'a ProductDistribution,
    support: Vec<(Vec<u8>, Rational)>,
    odometer: Option<Vec<usize>>,
}

impl Iterator for SupportIter<'_> {
    type Item = (Vec<Point>, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        let idx = self.odometer.as_mut()?;
        let k = self.product.arity();
        let alphabet = self.product.alphabet();
        let mut prob = Rational::one();
        let mut entries = vec![Vec::with_capacity(idx.len()); k];
        for &t in idx.iter() {
            let (tuple, p) = &self.support[t];
            prob *= p;
            for (j, e) in entries.iter_mut().enumerate() {
                e.push(tuple[j]);
            }
        }
        let points = entries
            .into_iter()
            .map(|e| Point::new(e, alphabet).expect("support tuples are in range"))
            .collect();

        let mut pos = 0;
        loop {
            if pos == idx.len() {
                self.odometer = None;
                break;
            }
            idx[pos] += 1;
            if idx[pos] < self.support.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        Some((points, prob))
    }
}

/// Draws `k` points coordinate by coordinate from a product distribution.
pub struct ProductSampler {
    tuples: Vec<Vec<u8>>,
    index: WeightedIndex<u128>,
    r: usize,
    alphabet: usize,
    arity: usize,
}

impl ProductSampler {
    fn new(p: &ProductDistribution) -> Result<Self> {
        let (tuples, weights, _) = scale_factor(&p.factor)?;
        let index = WeightedIndex::new(&weights)
            .map_err(|e| Error::InvalidParameter(format!("unusable factor weights: {e}")))?;
        Ok(ProductSampler {
            tuples,
            index,
            r: p.r,
            alphabet: p.alphabet(),
            arity: p.arity(),
        })
    }

    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<Point> {
        let mut entries = vec![Vec::with_capacity(self.r); self.arity];
        for _ in 0..self.r {
            let tuple = &self.tuples[self.index.sample(rng)];
            for (j, e) in entries.iter_mut().enumerate() {
                e.push(tuple[j]);
            }
        }
        entries
            .into_iter()
            .map(|e| Point::new(e, self.alphabet).expect("in range"))
            .collect()
    }

    /// Point codes instead of points.
    pub fn draw_codes<R: rand::Rng + ?Sized>(&self, rng: &mut R, out: &mut [usize]) {
        out.iter_mut().for_each(|c| *c = 0);
        let mut weight = 1;
        for _ in 0..self.r {
            let tuple = &self.tuples[self.index.sample(rng)];
            for (j, c) in out.iter_mut().enumerate() {
                *c += tuple[j] as usize * weight;
            }
            weight *= self.alphabet;
        }
    }
}

/// Nonzero tuples with integer weights over the common denominator.
fn scale_factor(factor: &TupleDistribution) -> Result<(Vec<Vec<u8>>, Vec<u128>, u128)> {
    let support = factor.support();
    let denom = support
        .iter()
        .fold(BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()));
    let too_fine = || Error::InvalidParameter("factor denominators exceed 128 bits".into());
    let weights = support
        .iter()
        .map(|(_, p)| (p.numer() * (&denom / p.denom())).to_u128().ok_or_else(too_fine))
        .collect::<Result<Vec<_>>>()?;
    let tuples = support.into_iter().map(|(t, _)| t).collect();
    Ok((tuples, weights, denom.to_u128().ok_or_else(too_fine)?))
}

/// Factor weights split as `m + (w - m)`, where `m` is the smallest weight
/// when every tuple has positive mass and 0 otherwise.
///
/// Returns `(m, tuples with w - m > 0 and that excess, denominator)`. The
/// `m` part of every coordinate is a uniform draw, which lets evaluators sum a
/// function over that coordinate instead of enumerating all `s^k` tuples.
pub(crate) fn uniform_floor_split(
    factor: &TupleDistribution,
) -> Result<(u128, Vec<(Vec<u8>, u128)>, u128)> {
    let (tuples, weights, denom) = scale_factor(factor)?;
    let floor = if tuples.len() == factor.table.len() {
        weights.iter().copied().min().unwrap_or(0)
    } else {
        0
    };
    let residual = tuples
        .into_iter()
        .zip(weights)
        .filter(|(_, w)| *w > floor)
        .map(|(t, w)| (t, w - floor))
        .collect();
    Ok((floor, residual, denom))
}

/// The support of a product distribution with `u128` leaf weights.
///
/// A leaf's probability is `weight / denominator()`. Construction fails when
/// `denominator() · headroom` would not fit in 128 bits.
pub(crate) struct ScaledProduct {
    tuples: Vec<Vec<u8>>,
    weights: Vec<u128>,
    denom: u128,
    pows: Vec<usize>,
    r: usize,
    arity: usize,
}

impl ScaledProduct {
    fn new(p: &ProductDistribution) -> Result<Self> {
        let (tuples, weights, denom) = scale_factor(&p.factor)?;
        denom
            .checked_pow(p.r as u32)
            .ok_or_else(|| Error::InvalidParameter("product denominator exceeds 128 bits".into()))?;
        let pows = (0..p.r).map(|i| p.alphabet().pow(i as u32)).collect();
        Ok(ScaledProduct {
            tuples,
            weights,
            denom,
            pows,
            r: p.r,
            arity: p.arity(),
        })
    }

    /// Total leaf weight, `denom^R`.
    pub fn denominator(&self) -> u128 {
        self.denom.pow(self.r as u32)
    }

    /// Fails unless `denominator() * headroom` fits in a `u128`.
    pub fn require_headroom(&self, headroom: u128) -> Result<()> {
        self.denominator()
            .checked_mul(headroom)
            .map(|_| ())
            .ok_or_else(|| Error::InvalidParameter("exact accumulation exceeds 128 bits".into()))
    }

    /// Parallel fold over every leaf `(codes of the k points, weight)`.
    ///
    /// Work fans out over the tuple drawn for the last coordinate.
    pub fn fold<A, I, V, M>(&self, init: I, visit: V, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        V: Fn(&mut A, &[usize], u128) + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        let top = self.r - 1;
        (0..self.tuples.len())
            .into_par_iter()
            .fold(&init, |mut acc, t| {
                let mut codes: Vec<usize> = self.tuples[t]
                    .iter()
                    .map(|&d| d as usize * self.pows[top])
                    .collect();
                self.descend(top, &mut codes, self.weights[t], &mut acc, &visit);
                acc
            })
            .reduce(&init, merge)
    }

    fn descend<A, V>(&self, level: usize, codes: &mut [usize], weight: u128, acc: &mut A, visit: &V)
    where
        V: Fn(&mut A, &[usize], u128),
    {
        if level == 0 {
            visit(acc, codes, weight);
            return;
        }
        let l = level - 1;
        let pow = self.pows[l];
        for (tuple, &w) in self.tuples.iter().zip(&self.weights) {
            for j in 0..self.arity {
                codes[j] += tuple[j] as usize * pow;
            }
            self.descend(l, codes, weight * w, acc, visit);
            for j in 0..self.arity {
                codes[j] -= tuple[j] as usize * pow;
            }
        }
    }
}
