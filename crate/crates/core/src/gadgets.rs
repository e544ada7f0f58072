//! The dictator-test instance over `{0,…,q}^R` and its two directions.
//!
//! Agents are points `x`, with agent index equal to the point code. Small goods
//! are one per support tuple `(x^1,…,x^{q+2})` of the product distribution and
//! stay implicit except in [`DictatorTestInstance::materialize`].

use serde::{Deserialize, Serialize};

use crate::allocation::{Allocation, AllocationInstance, Good};
use crate::boolean_functions::{correlation, influence_profile, FunctionTable};
use crate::distributions::ProductDistribution;
use crate::error::{invalid, Error, Result};
use crate::limits::Caps;
use crate::point::point_count;
use crate::rational::Rational;

/// 1-based position of the first zero in `w`, or 0 when there is none.
pub fn chi(w: &[u8]) -> usize {
    w.iter().position(|&v| v == 0).map_or(0, |p| p + 1)
}

/// Slot receiving a small good under the χ rule: `χ(w)`, or 1 when `χ(w) = 0`.
pub fn chi_slot(w: &[u8]) -> usize {
    chi(w).max(1)
}

/// `1 - (q/(q+1))^{q+2}`.
pub fn soundness_constant(q: usize) -> Rational {
    let base = Rational::new(q as i64, q as i64 + 1);
    Rational::one() - base.pow(q as u32 + 2)
}

#[derive(Clone, Debug)]
pub struct DictatorTestInstance {
    r: usize,
    q: usize,
    eps: Rational,
    product: ProductDistribution,
}

impl DictatorTestInstance {
    /// `ε = 0` is accepted and gives the noiseless test without large-good value.
    pub fn new(r: usize, q: usize, eps: Rational) -> Result<Self> {
        if eps.is_negative() || eps >= Rational::one() {
            return invalid(format!("ε = {eps} must lie in [0, 1)"));
        }
        let product = ProductDistribution::noisy_eta(q, &eps, r)?;
        Ok(DictatorTestInstance { r, q, eps, product })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn distribution(&self) -> &ProductDistribution {
        &self.product
    }

    pub fn n_agents(&self) -> usize {
        self.product.point_count()
    }

    /// `q·(q+1)^{R-1}`.
    pub fn large_good_count(&self) -> usize {
        self.q * (self.q + 1).pow(self.r as u32 - 1)
    }

    /// `1/ε`; `None` for the noiseless test.
    pub fn large_value(&self) -> Option<Rational> {
        (!self.eps.is_zero()).then(|| self.eps.recip())
    }

    pub fn small_good_count(&self) -> Option<u128> {
        self.product.support_size()
    }

    /// Explicit instance with large goods first (ids `0..L`), then one small good
    /// per support tuple in enumeration order. Only for `R = 1`, `q <= 2`, `ε > 0`.
    pub fn materialize(&self, caps: &Caps) -> Result<AllocationInstance> {
        if self.r != 1 || self.q > 2 {
            return invalid("explicit dictator-test instances are limited to R = 1, q <= 2");
        }
        let big = self
            .large_value()
            .ok_or_else(|| Error::InvalidParameter("large goods need ε > 0".into()))?;
        let n = self.n_agents();
        let mut goods: Vec<Good> = (0..self.large_good_count())
            .map(|id| Good::new(id as u64, (0..n).map(|a| (a, big.clone())).collect()).large())
            .collect();
        let mut id = goods.len() as u64;
        for (points, prob) in self.product.iterate_support(caps)? {
            let mut holders: Vec<usize> = points.iter().map(|x| x.code()).collect();
            holders.sort_unstable();
            holders.dedup();
            goods.push(Good::new(id, holders.into_iter().map(|a| (a, prob.clone())).collect()));
            id += 1;
        }
        AllocationInstance::new(n, goods)?.with_groups(vec![(0..n).collect()])
    }

    /// Small-good utilities when each good goes to slot `χ(x^1_i,…,x^k_i)`
    /// (slot 1 if none is zero); `i` is 1-based.
    pub fn completeness_utilities(&self, i: usize, caps: &Caps) -> Result<CompletenessReport> {
        if i == 0 || i > self.r {
            return Err(Error::Dimension(format!("coordinate {i} outside 1..={}", self.r)));
        }
        let n = self.n_agents();
        let s = self.q + 1;
        let stride = s.pow(i as u32 - 1);
        let scaled = self.product.scaled(caps)?;
        let table = scaled.fold(
            || vec![0u128; n],
            |acc, codes, w| {
                let slot = codes
                    .iter()
                    .position(|c| (c / stride).is_multiple_of(s))
                    .unwrap_or(0);
                acc[codes[slot]] += w;
            },
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
        let denom = scaled.denominator();
        let utilities: Vec<Rational> = table
            .into_iter()
            .map(|w| Rational::from_biguint_ratio(w.into(), denom.into()))
            .collect();
        let non_large: Vec<usize> = (0..n).filter(|c| (c / stride).is_multiple_of(s)).collect();
        let min_non_large = non_large
            .iter()
            .map(|&a| utilities[a].clone())
            .min()
            .expect("some agent has x_i = 0");
        let bound = (Rational::one() - &self.eps)
            / Rational::from_integer(s.pow(self.r as u32 - 1) as i64);
        Ok(CompletenessReport {
            coordinate: i,
            holds: min_non_large >= bound,
            utilities,
            non_large,
            min_non_large,
            bound,
        })
    }

    fn check_function(&self, f: &FunctionTable) -> Result<()> {
        if f.r() != self.r || f.alphabet() != self.q + 1 {
            return Err(Error::Dimension("function does not live on the agent set".into()));
        }
        if !f.is_boolean() {
            return invalid("soundness needs a {0,1}-valued function");
        }
        let mean = Rational::new(self.q as i64, self.q as i64 + 1);
        if f.mean() != mean {
            return invalid(format!("function mean {} differs from {mean}", f.mean()));
        }
        Ok(())
    }

    /// `1 - E[∏_j f(x^j)]`, the ceiling on the small-good utility of agents
    /// outside the support of `f`.
    pub fn soundness_value(&self, f: &FunctionTable, caps: &Caps) -> Result<Rational> {
        self.check_function(f)?;
        let copies = vec![f; self.q + 2];
        Ok(Rational::one() - correlation(&copies, &self.product, caps)?)
    }

    /// Large goods to the agents with `f = 1`, in code order.
    pub fn allocation_for(&self, f: &FunctionTable) -> Result<Allocation> {
        if f.r() != self.r || f.alphabet() != self.q + 1 || !f.is_boolean() {
            return Err(Error::Dimension("function does not live on the agent set".into()));
        }
        if f.ones() != self.large_good_count() {
            return invalid(format!(
                "{} holders for {} large goods",
                f.ones(),
                self.large_good_count()
            ));
        }
        let assignment = (0..f.values().len())
            .filter(|&c| f.value(c).is_one())
            .map(Some)
            .collect();
        Ok(Allocation { assignment })
    }

    /// `f_X(x) = 1` iff agent `x` holds a large good. Reads the first
    /// `large_good_count()` entries of the assignment.
    pub fn function_from_allocation(&self, alloc: &Allocation) -> Result<FunctionTable> {
        let large = self.large_good_count();
        if alloc.assignment.len() < large {
            return Err(Error::InvalidAllocation(format!(
                "{} assignments, {large} large goods",
                alloc.assignment.len()
            )));
        }
        let n = self.n_agents();
        let mut holds = vec![false; n];
        for &agent in alloc.assignment[..large].iter().flatten() {
            if agent >= n {
                return Err(Error::InvalidAllocation(format!("agent {agent} out of range")));
            }
            if std::mem::replace(&mut holds[agent], true) {
                return Err(Error::InvalidAllocation(format!("agent {agent} holds two large goods")));
            }
        }
        let values = holds
            .into_iter()
            .map(|h| if h { Rational::one() } else { Rational::zero() })
            .collect();
        FunctionTable::new(self.r, self.q + 1, values)
    }

    /// Every `{0,1}` function with `large_good_count()` ones, scored.
    pub fn soundness_landscape(&self, d: usize, caps: &Caps) -> Result<Vec<LandscapeEntry>> {
        let n = self.n_agents();
        let k = self.large_good_count();
        let count = binomial(n as u128, k as u128);
        crate::limits::check_cap(
            "exhaustive soundness landscape",
            count,
            caps.solver_assignments,
            "sample functions instead",
        )?;
        let dictators: Vec<FunctionTable> = (1..=self.r)
            .map(|i| FunctionTable::dictator(self.r, i, self.q))
            .collect::<Result<_>>()?;
        let mut out = Vec::new();
        for ones in Combinations::new(n, k) {
            let mut values = vec![Rational::zero(); n];
            for &c in &ones {
                values[c] = Rational::one();
            }
            let f = FunctionTable::new(self.r, self.q + 1, values)?;
            let value = self.soundness_value(&f, caps)?;
            let profile = influence_profile(&f, d, caps)?;
            let dictator = dictators.iter().position(|g| *g == f).map(|i| i + 1);
            out.push(LandscapeEntry {
                ones,
                value,
                low_degree_influence: profile.low_degree_influence,
                dictator,
            });
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessReport {
    /// 1-based.
    pub coordinate: usize,
    /// Small-good utility of every agent, by point code.
    pub utilities: Vec<Rational>,
    /// Agents with `x_i = 0`.
    pub non_large: Vec<usize>,
    pub min_non_large: Rational,
    /// `(1-ε)/(q+1)^{R-1}`.
    pub bound: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LandscapeEntry {
    /// Point codes where the function is 1.
    pub ones: Vec<usize>,
    pub value: Rational,
    pub low_degree_influence: Vec<Rational>,
    /// `Some(i)` when the function is the dictator on coordinate `i` (1-based).
    pub dictator: Option<usize>,
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    (0..k).try_fold(1u128, |acc, i| acc.checked_mul(n - i).map(|v| v / (i + 1)))
}

/// `k`-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// `(q+1)^R`, or an error when it overflows.
pub fn agent_count(r: usize, q: usize) -> Result<usize> {
    point_count(r, q + 1).ok_or_else(|| Error::InvalidParameter("agent set too large".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::validate_family2;
    use crate::rational::ratio;

    #[test]
    fn chi_examples() {
        assert_eq!(chi(&[1, 0, 1, 2]), 2);
        assert_eq!(chi(&[0, 1, 2, 2]), 1);
        assert_eq!(chi(&[1, 1, 2, 2]), 0);
        assert_eq!(chi_slot(&[1, 1, 2, 2]), 1);
    }

    #[test]
    fn counts() {
        let inst = DictatorTestInstance::new(1, 2, ratio(1, 10)).unwrap();
        assert_eq!((inst.n_agents(), inst.large_good_count()), (3, 2));
        assert_eq!(inst.small_good_count(), Some(81));
        let inst = DictatorTestInstance::new(2, 2, ratio(1, 10)).unwrap();
        assert_eq!((inst.n_agents(), inst.large_good_count()), (9, 6));
        assert!(DictatorTestInstance::new(1, 3, ratio(1, 10)).is_err());
        assert!(DictatorTestInstance::new(1, 2, ratio(1, 1)).is_err());
    }

    #[test]
    fn materialized_mass_and_family() {
        let eps = ratio(1, 10);
        let inst = DictatorTestInstance::new(1, 2, eps.clone()).unwrap();
        let explicit = inst.materialize(&Caps::default()).unwrap();
        assert_eq!(explicit.n_goods(), 2 + 81);
        let mass: Rational = explicit
            .goods()
            .iter()
            .filter(|g| !g.is_large)
            .map(|g| g.valuations[0].1.clone())
            .sum();
        assert_eq!(mass, Rational::one());
        assert!(validate_family2(&explicit, &eps).valid);
        assert!(DictatorTestInstance::new(2, 2, eps).unwrap().materialize(&Caps::default()).is_err());
    }

    #[test]
    fn completeness_r1() {
        let inst = DictatorTestInstance::new(1, 2, ratio(1, 10)).unwrap();
        let rep = inst.completeness_utilities(1, &Caps::default()).unwrap();
        assert_eq!(rep.non_large, vec![0]);
        assert_eq!(rep.min_non_large, ratio(397, 405));
        assert!(rep.holds);
        assert_eq!(rep.utilities.iter().cloned().sum::<Rational>(), Rational::one());
    }

    #[test]
    fn completeness_r2() {
        let inst = DictatorTestInstance::new(2, 2, ratio(1, 10)).unwrap();
        for i in 1..=2 {
            let rep = inst.completeness_utilities(i, &Caps::default()).unwrap();
            assert_eq!(rep.non_large.len(), 3);
            assert_eq!(rep.bound, ratio(3, 10));
            assert!(rep.holds);
        }
        assert!(inst.completeness_utilities(3, &Caps::default()).is_err());
    }

    #[test]
    fn soundness_examples() {
        let caps = Caps::default();
        let inst = DictatorTestInstance::new(1, 2, Rational::zero()).unwrap();
        let dict = FunctionTable::dictator(1, 1, 2).unwrap();
        assert_eq!(inst.soundness_value(&dict, &caps).unwrap(), Rational::one());
        let f = FunctionTable::new(1, 3, vec![ratio(1, 1), ratio(1, 1), ratio(0, 1)]).unwrap();
        assert_eq!(inst.soundness_value(&f, &caps).unwrap(), ratio(7, 9));
        let half = FunctionTable::constant(1, 2, ratio(2, 3)).unwrap();
        assert!(inst.soundness_value(&half, &caps).is_err());
        let wrong_mean = FunctionTable::new(1, 3, vec![ratio(1, 1), ratio(0, 1), ratio(0, 1)]).unwrap();
        assert!(inst.soundness_value(&wrong_mean, &caps).is_err());
        assert_eq!(soundness_constant(2), ratio(65, 81));
        assert_eq!(soundness_constant(1), ratio(7, 8));
    }

    #[test]
    fn allocation_round_trip() {
        let inst = DictatorTestInstance::new(2, 2, ratio(1, 10)).unwrap();
        let dict = FunctionTable::dictator(2, 1, 2).unwrap();
        let alloc = inst.allocation_for(&dict).unwrap();
        assert_eq!(inst.function_from_allocation(&alloc).unwrap(), dict);
        let empty = Allocation::empty(inst.large_good_count());
        assert_eq!(inst.function_from_allocation(&empty).unwrap().ones(), 0);
        let doubled = Allocation {
            assignment: vec![Some(1), Some(1), None, None, None, None],
        };
        assert!(matches!(
            inst.function_from_allocation(&doubled),
            Err(Error::InvalidAllocation(_))
        ));

        let r1 = DictatorTestInstance::new(1, 2, ratio(1, 10)).unwrap();
        let first = Allocation {
            assignment: vec![Some(1), Some(2)],
        };
        assert_eq!(
            r1.function_from_allocation(&first).unwrap(),
            FunctionTable::dictator(1, 1, 2).unwrap()
        );
    }

    #[test]
    fn combinations_enumerate_all() {
        let all: Vec<_> = Combinations::new(9, 6).collect();
        assert_eq!(all.len(), 84);
        assert_eq!(all[0], vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(all[83], vec![3, 4, 5, 6, 7, 8]);
        assert_eq!(binomial(9, 6), Some(84));
    }

    #[test]
    fn landscape_r1() {
        let inst = DictatorTestInstance::new(1, 2, Rational::zero()).unwrap();
        let land = inst.soundness_landscape(1, &Caps::default()).unwrap();
        let mut values: Vec<Rational> = land.iter().map(|e| e.value.clone()).collect();
        values.sort();
        assert_eq!(values, vec![ratio(7, 9), ratio(7, 9), ratio(1, 1)]);
        let best: Vec<_> = land.iter().filter(|e| e.value.is_one()).collect();
        assert_eq!(best.len(), 1);
        assert_eq!(best[0].dictator, Some(1));
    }
}
