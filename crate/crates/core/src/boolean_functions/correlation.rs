//! `E[∏_j f_j(x^j)]` for `(x^1,…,x^k)` drawn from a product distribution.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FunctionTable;
use crate::distributions::{uniform_floor_split, ProductDistribution};
use crate::error::{invalid, Error, Result};
use crate::limits::{check_cap, Caps};
use crate::rational::Rational;

/// Monte Carlo output. Never returned by the exact path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub estimate: f64,
    pub samples: u64,
    pub seed: u64,
}

fn check_shapes(fs: &[&FunctionTable], p: &ProductDistribution) -> Result<()> {
    if fs.len() != p.arity() {
        return Err(Error::Dimension(format!(
            "{} functions for a {}-ary distribution",
            fs.len(),
            p.arity()
        )));
    }
    if fs
        .iter()
        .any(|f| f.r() != p.r() || f.alphabet() != p.alphabet())
    {
        return Err(Error::Dimension(
            "functions and distribution disagree on R or q".into(),
        ));
    }
    Ok(())
}

/// Integer table `f·L` and the scale `L`.
fn integer_table(f: &FunctionTable) -> Result<(Vec<u128>, u128)> {
    let lcm = f
        .values()
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let wide = || Error::InvalidParameter("function denominators exceed 128 bits".into());
    let table = f
        .values()
        .iter()
        .map(|v| (v.numer() * (&lcm / v.denom())).to_u128().ok_or_else(wide))
        .collect::<Result<Vec<_>>>()?;
    Ok((table, lcm.to_u128().ok_or_else(wide)?))
}

/// Exact correlation.
///
/// Each factor weight is split into a uniform floor `m` plus an excess (see
/// the distributions module). A coordinate that takes the uniform part is
/// summed out of every function at once, so the work is
/// `(#excess tuples + 1)^R` instead of `(#support tuples)^R`.
pub fn correlation(fs: &[&FunctionTable], p: &ProductDistribution, caps: &Caps) -> Result<Rational> {
    check_shapes(fs, p)?;
    let (floor, residual, denom) = uniform_floor_split(p.factor())?;
    let r = p.r();
    let s = p.alphabet();
    let choices = residual.len() as u128 + u128::from(floor > 0);
    check_cap(
        "correlation enumeration",
        choices.checked_pow(r as u32),
        caps.enumeration_leaves,
        "use Monte Carlo mode for larger R",
    )?;
    let (tables, headroom) = integer_tables(fs)?;
    let total_weight = denom
        .checked_pow(r as u32)
        .and_then(|d| d.checked_mul(headroom))
        .ok_or_else(|| Error::InvalidParameter("exact accumulation exceeds 128 bits".into()))?;
    let sums: Vec<Vec<Vec<u128>>> = tables.iter().map(|t| subset_sums(t, r, s)).collect();
    let pows: Vec<usize> = (0..r).map(|i| s.pow(i as u32)).collect();
    let walk = Walk {
        sums: &sums,
        residual: &residual,
        floor,
        pows: &pows,
    };
    let top = r - 1;
    let mut first: Vec<Option<usize>> = (0..residual.len()).map(Some).collect();
    if floor > 0 {
        first.push(None);
    }
    let total: u128 = first
        .into_par_iter()
        .map(|choice| {
            let mut codes = vec![0usize; fs.len()];
            let (mask, weight) = walk.step(top, choice, &mut codes, 0, 1);
            walk.descend(top, &mut codes, mask, weight)
        })
        .sum();
    Ok(Rational::from_biguint_ratio(total.into(), total_weight.into()))
}

struct Walk<'a> {
    sums: &'a [Vec<Vec<u128>>],
    residual: &'a [(Vec<u8>, u128)],
    floor: u128,
    pows: &'a [usize],
}

impl Walk<'_> {
    /// Apply `choice` at coordinate `level`: a residual tuple or the uniform floor.
    fn step(&self, level: usize, choice: Option<usize>, codes: &mut [usize], mask: usize, weight: u128) -> (usize, u128) {
        match choice {
            Some(t) => {
                let (tuple, w) = &self.residual[t];
                for (c, &d) in codes.iter_mut().zip(tuple) {
                    *c += d as usize * self.pows[level];
                }
                (mask, weight * w)
            }
            None => (mask | (1 << level), weight * self.floor),
        }
    }

    fn undo(&self, level: usize, choice: Option<usize>, codes: &mut [usize]) {
        if let Some(t) = choice {
            for (c, &d) in codes.iter_mut().zip(&self.residual[t].0) {
                *c -= d as usize * self.pows[level];
            }
        }
    }

    /// Sum over the choices for coordinates below `level`.
    fn descend(&self, level: usize, codes: &mut [usize], mask: usize, weight: u128) -> u128 {
        if level == 0 {
            return self
                .sums
                .iter()
                .zip(codes.iter())
                .try_fold(weight, |acc, (table, &c)| {
                    let v = table[mask][c];
                    (v != 0).then(|| acc * v)
                })
                .unwrap_or(0);
        }
        let l = level - 1;
        let mut total = 0;
        let uniform = (self.floor > 0).then_some(None);
        for choice in (0..self.residual.len()).map(Some).chain(uniform) {
            let (m, w) = self.step(l, choice, codes, mask, weight);
            total += self.descend(l, codes, m, w);
            self.undo(l, choice, codes);
        }
        total
    }
}

/// `out[T][x] = Σ of table over the coordinates in T`, constant along them.
fn subset_sums(table: &[u128], r: usize, s: usize) -> Vec<Vec<u128>> {
    let n = table.len();
    let mut out: Vec<Vec<u128>> = Vec::with_capacity(1 << r);
    out.push(table.to_vec());
    for mask in 1usize..(1 << r) {
        let i = mask.trailing_zeros() as usize;
        let stride = s.pow(i as u32);
        let src = &out[mask ^ (1 << i)];
        let mut dst = vec![0u128; n];
        for code in (0..n).filter(|c| (c / stride).is_multiple_of(s)) {
            let total: u128 = (0..s).map(|v| src[code + v * stride]).sum();
            for v in 0..s {
                dst[code + v * stride] = total;
            }
        }
        out.push(dst);
    }
    out
}

fn integer_tables(fs: &[&FunctionTable]) -> Result<(Vec<Vec<u128>>, u128)> {
    let mut tables = Vec::with_capacity(fs.len());
    let mut headroom: u128 = 1;
    for f in fs {
        let (table, scale) = integer_table(f)?;
        headroom = headroom
            .checked_mul(scale)
            .ok_or_else(|| Error::InvalidParameter("exact accumulation exceeds 128 bits".into()))?;
        tables.push(table);
    }
    Ok((tables, headroom))
}

/// Exact correlation by visiting every support element of `p`.
///
/// Slower than [`correlation`]; kept as a cross-check.
pub fn correlation_by_enumeration(
    fs: &[&FunctionTable],
    p: &ProductDistribution,
    caps: &Caps,
) -> Result<Rational> {
    check_shapes(fs, p)?;
    let scaled = p.scaled(caps)?;
    let (tables, headroom) = integer_tables(fs)?;
    scaled.require_headroom(headroom)?;
    let total = scaled.fold(
        || 0u128,
        |acc, codes, weight| {
            let mut term = weight;
            for (table, &c) in tables.iter().zip(codes) {
                term *= table[c];
                if term == 0 {
                    return;
                }
            }
            *acc += term;
        },
        |a, b| a + b,
    );
    Ok(Rational::from_biguint_ratio(
        total.into(),
        (scaled.denominator() * headroom).into(),
    ))
}

/// Monte Carlo estimate from `samples` independent draws.
pub fn correlation_monte_carlo(
    fs: &[&FunctionTable],
    p: &ProductDistribution,
    samples: u64,
    seed: u64,
) -> Result<CorrelationEstimate> {
    check_shapes(fs, p)?;
    if samples == 0 {
        return invalid("Monte Carlo needs at least one sample");
    }
    let tables: Vec<Vec<f64>> = fs
        .iter()
        .map(|f| f.values().iter().map(Rational::to_f64).collect())
        .collect();
    let sampler = p.sampler()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut codes = vec![0usize; fs.len()];
    let mut total = 0.0;
    for _ in 0..samples {
        sampler.draw_codes(&mut rng, &mut codes);
        total += tables
            .iter()
            .zip(&codes)
            .map(|(t, &c)| t[c])
            .product::<f64>();
    }
    Ok(CorrelationEstimate {
        estimate: total / samples as f64,
        samples,
        seed,
    })
}
