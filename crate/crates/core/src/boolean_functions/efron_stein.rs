//! Efron-Stein decomposition under the uniform measure on `{0,…,q}^R`.
//!
//! Components come from inclusion-exclusion over conditional means,
//! `f_S = Σ_{T⊆S} (-1)^{|S∖T|} E[f | x_T]`, carried out in scaled integer
//! arithmetic: every table is multiplied by `L·(q+1)^R` where `L` is the lcm of
//! the value denominators, so all conditional means are integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FunctionTable;
use crate::error::{Error, Result};
use crate::limits::{check_cap, Caps};
use crate::rational::Rational;

/// A subset of coordinates as a bitmask (bit `i` is coordinate `i`, 0-based).
pub type Subset = usize;

#[derive(Clone, Debug)]
pub struct EfronSteinDecomposition {
    r: usize,
    alphabet: usize,
    /// `components[S][x] = scale · f_S(x)`.
    components: Vec<Vec<BigInt>>,
    scale: BigInt,
}

impl EfronSteinDecomposition {
    pub fn new(f: &FunctionTable, caps: &Caps) -> Result<Self> {
        let r = f.r();
        let s = f.alphabet();
        if r > caps.decomposition_max_r {
            check_cap(
                "Efron-Stein decomposition (R)",
                Some(r as u128),
                caps.decomposition_max_r as u128,
                "raise the decomposition cap or lower R",
            )?;
        }
        let n = f.values().len();
        let full: Subset = (1 << r) - 1;
        let pows: Vec<usize> = (0..r).map(|i| s.pow(i as u32)).collect();

        let lcm = f
            .values()
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let ints: Vec<BigInt> = f
            .values()
            .iter()
            .map(|v| v.numer() * (&lcm / v.denom()))
            .collect();

        // sums[T][x] = Σ over the coordinates outside T of L·f
        let mut sums: Vec<Vec<BigInt>> = vec![Vec::new(); full + 1];
        sums[full] = ints;
        for mask in (0..full).rev() {
            let i = (!mask).trailing_zeros() as usize;
            let src = &sums[mask | (1 << i)];
            let mut out = vec![BigInt::zero(); n];
            let stride = pows[i];
            for code in 0..n {
                if !(code / stride).is_multiple_of(s) {
                    continue;
                }
                let total: BigInt = (0..s).map(|v| &src[code + v * stride]).sum();
                for v in 0..s {
                    out[code + v * stride] = total.clone();
                }
            }
            sums[mask] = out;
        }

        // conditional means scaled by L·s^R: multiply sums[T] by s^{|T|}
        let mut comps: Vec<Vec<BigInt>> = sums
            .into_par_iter()
            .enumerate()
            .map(|(mask, table)| {
                let factor = BigInt::from(s).pow(mask.count_ones());
                table.into_iter().map(|v| v * &factor).collect()
            })
            .collect();

        // Möbius inversion over the subset lattice
        for i in 0..r {
            let bit = 1 << i;
            let (lows, highs): (Vec<_>, Vec<_>) = comps
                .iter_mut()
                .enumerate()
                .partition(|(mask, _)| mask & bit == 0);
            let lows: Vec<&Vec<BigInt>> = lows.into_iter().map(|(_, t)| &*t).collect();
            highs.into_par_iter().for_each(|(mask, table)| {
                let low = lows[mask_rank_without(mask, bit)];
                for (v, l) in table.iter_mut().zip(low) {
                    *v -= l;
                }
            });
        }

        let scale = lcm * BigInt::from(s).pow(r as u32);
        let decomposition = EfronSteinDecomposition {
            r,
            alphabet: s,
            components: comps,
            scale,
        };
        decomposition.verify(f)?;
        Ok(decomposition)
    }

    /// Locality, conditional-mean-zero and reconstruction, all exact.
    fn verify(&self, f: &FunctionTable) -> Result<()> {
        let s = self.alphabet;
        let n = f.values().len();
        let pows: Vec<usize> = (0..self.r).map(|i| s.pow(i as u32)).collect();
        let bad = self
            .components
            .par_iter()
            .enumerate()
            .find_any(|(mask, table)| {
                (0..self.r).any(|i| {
                    let stride = pows[i];
                    (0..n).filter(|c| (c / stride).is_multiple_of(s)).any(|c| {
                        if mask & (1 << i) == 0 {
                            (1..s).any(|v| table[c + v * stride] != table[c])
                        } else {
                            !(0..s).map(|v| &table[c + v * stride]).sum::<BigInt>().is_zero()
                        }
                    })
                })
            });
        if let Some((mask, _)) = bad {
            return Err(Error::Invariant(format!(
                "Efron-Stein component {mask:#b} fails locality or mean-zero"
            )));
        }
        let reconstructed = self.reconstruct();
        if reconstructed.as_slice() != f.values() {
            return Err(Error::Invariant("components do not sum to f".into()));
        }
        Ok(())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn value(&self, subset: Subset, code: usize) -> Rational {
        Rational::from_bigints(self.components[subset][code].clone(), self.scale.clone())
            .expect("scale is positive")
    }

    pub fn component(&self, subset: Subset) -> Vec<Rational> {
        (0..self.components[subset].len())
            .map(|c| self.value(subset, c))
            .collect()
    }

    pub fn is_zero_component(&self, subset: Subset) -> bool {
        self.components[subset].iter().all(Zero::is_zero)
    }

    /// Subsets whose component is not identically zero.
    pub fn support(&self) -> Vec<Subset> {
        (0..self.components.len())
            .filter(|&m| !self.is_zero_component(m))
            .collect()
    }

    /// `E_x[f_S(x) · f_T(x)]`.
    pub fn inner(&self, a: Subset, b: Subset) -> Rational {
        let dot: BigInt = self.components[a]
            .iter()
            .zip(&self.components[b])
            .map(|(x, y)| x * y)
            .sum();
        let n = BigInt::from(self.components[a].len());
        Rational::from_bigints(dot, &self.scale * &self.scale * n).expect("positive")
    }

    /// `E_x[f_S(x)^2]`.
    pub fn weight(&self, subset: Subset) -> Rational {
        self.inner(subset, subset)
    }

    pub fn weights(&self) -> Vec<Rational> {
        (0..self.components.len())
            .into_par_iter()
            .map(|m| self.weight(m))
            .collect()
    }

    /// `Σ_S f_S`, pointwise.
    pub fn reconstruct(&self) -> Vec<Rational> {
        let n = self.components[0].len();
        (0..n)
            .map(|c| {
                let total: BigInt = self.components.iter().map(|t| &t[c]).sum();
                Rational::from_bigints(total, self.scale.clone()).expect("positive")
            })
            .collect()
    }

    pub fn influence_profile(&self, d: usize) -> Result<InfluenceProfile> {
        if d == 0 {
            return Err(Error::InvalidParameter("degree d must be at least 1".into()));
        }
        let weights = self.weights();
        let mut total = vec![Rational::zero(); self.r];
        let mut low = vec![Rational::zero(); self.r];
        for (mask, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let size = mask.count_ones() as usize;
            for i in (0..self.r).filter(|i| mask & (1 << i) != 0) {
                total[i] += w;
                if size <= d {
                    low[i] += w;
                }
            }
        }
        Ok(InfluenceProfile {
            d,
            influence: total,
            low_degree_influence: low,
        })
    }
}

/// Index of `mask` with `bit` cleared among the subsets that do not contain `bit`.
fn mask_rank_without(mask: Subset, bit: Subset) -> usize {
    let cleared = mask & !bit;
    let low = cleared & (bit - 1);
    let high = cleared >> (bit.trailing_zeros() + 1);
    low | (high << bit.trailing_zeros())
}

/// Per-coordinate `Inf_i(f)` and `Inf_i^{≤d}(f)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfluenceProfile {
    pub d: usize,
    pub influence: Vec<Rational>,
    pub low_degree_influence: Vec<Rational>,
}

impl InfluenceProfile {
    /// Coordinates (0-based) with `Inf_i^{≤d} >= tau`.
    pub fn at_least(&self, tau: &Rational) -> Vec<usize> {
        (0..self.low_degree_influence.len())
            .filter(|&i| self.low_degree_influence[i] >= *tau)
            .collect()
    }

    /// Coordinates (0-based) with `Inf_i^{≤d} > tau`.
    pub fn above(&self, tau: &Rational) -> Vec<usize> {
        (0..self.low_degree_influence.len())
            .filter(|&i| self.low_degree_influence[i] > *tau)
            .collect()
    }

    pub fn max_low_degree(&self) -> Rational {
        self.low_degree_influence
            .iter()
            .max()
            .cloned()
            .unwrap_or_default()
    }
}

/// Decompose and return the influence profile at degree `d`.
pub fn influence_profile(f: &FunctionTable, d: usize, caps: &Caps) -> Result<InfluenceProfile> {
    EfronSteinDecomposition::new(f, caps)?.influence_profile(d)
}
