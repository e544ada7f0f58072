use serde::{Deserialize, Serialize};

use crate::allocation::{validate_family2_profile, AllocationInstance, Family2Report, Good};
use crate::boolean_functions::{correlation, FunctionTable};
use crate::distributions::ProductDistribution;
use crate::error::{invalid, Error, Result};
use crate::limits::{check_cap, Caps};
use crate::point::Permutation;
use crate::rational::Rational;
use crate::unique_games::{Labeling, UgInstance};

/// Alphabet of the reduction's points, `{0,1,2}`.
const ALPHABET: usize = 3;
/// Points per small good.
const SLOTS: usize = 4;

/// The allocation instance built from a unique-games instance.
///
/// Agent `(a, x)` has index `a·3^R + code(x)`. Small goods are indexed by
/// `(b, a^1..a^4 ∈ Nbd(b), x^1..x^4)` with mass `p_ε(x)/(|B|δ_B^4)` and are
/// valued by the agents `(a^j, x^j ∘ π_{a^j,b})`.
#[derive(Clone, Debug)]
pub struct MetaInstance {
    ug: UgInstance,
    eps: Rational,
    d: usize,
    tau: Rational,
    delta: Rational,
    product: ProductDistribution,
}

/// `ετ²/(8d)`.
pub fn delta_for(eps: &Rational, d: usize, tau: &Rational) -> Rational {
    eps * tau * tau / Rational::from_integer(8 * d as i64)
}

impl MetaInstance {
    pub fn new(ug: UgInstance, eps: Rational, d: usize, tau: Rational) -> Result<Self> {
        if !eps.is_positive() || eps >= Rational::one() {
            return invalid(format!("ε = {eps} must lie strictly between 0 and 1"));
        }
        if d == 0 || !tau.is_positive() {
            return invalid("d must be positive and τ positive");
        }
        let product = ProductDistribution::noisy_eta(2, &eps, ug.r())?;
        let delta = delta_for(&eps, d, &tau);
        Ok(MetaInstance {
            ug,
            eps,
            d,
            tau,
            delta,
            product,
        })
    }

    pub fn ug(&self) -> &UgInstance {
        &self.ug
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn tau(&self) -> &Rational {
        &self.tau
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn r(&self) -> usize {
        self.ug.r()
    }

    pub fn points(&self) -> usize {
        ALPHABET.pow(self.r() as u32)
    }

    pub fn n_agents(&self) -> usize {
        self.ug.a_count() * self.points()
    }

    pub fn agent(&self, a: usize, code: usize) -> usize {
        a * self.points() + code
    }

    /// `2·3^{R-1}` large goods per `a`.
    pub fn large_per_group(&self) -> usize {
        2 * self.points() / ALPHABET
    }

    pub fn large_value(&self) -> Rational {
        self.eps.recip()
    }

    /// `⌊δ|A|⌋·3^{R-1}`.
    pub fn dummy_count(&self) -> usize {
        let groups = (&self.delta * Rational::from_integer(self.ug.a_count() as i64)).floor();
        usize::try_from(groups).expect("δ|A| < |A|") * (self.points() / ALPHABET)
    }

    /// `(1-ε)/(|A|·3^{R-1})`.
    pub fn dummy_value(&self) -> Rational {
        (Rational::one() - &self.eps)
            / Rational::from_integer((self.ug.a_count() * self.points() / ALPHABET) as i64)
    }

    pub fn dummy_total(&self) -> Rational {
        self.dummy_value() * Rational::from_integer(self.dummy_count() as i64)
    }

    /// `|B|·δ_B^4`.
    pub fn neighbourhood_count(&self) -> u128 {
        self.ug.b_count() as u128 * (self.ug.degree_b() as u128).pow(SLOTS as u32)
    }

    pub fn small_good_count(&self) -> Option<u128> {
        self.product
            .support_size()
            .and_then(|s| s.checked_mul(self.neighbourhood_count()))
    }

    /// `π_{a,b}` on edges; otherwise the cyclic shift sending `Λ(a)` to `Λ(b)`.
    pub fn extended_perm(&self, a: usize, b: usize, labeling: &Labeling) -> Permutation {
        self.ug.perm(a, b).cloned().unwrap_or_else(|| {
            Permutation::cyclic_shift(self.r(), labeling.a_label(a), labeling.b_label(&self.ug, b))
        })
    }

    fn check_caps(&self, caps: &Caps) -> Result<()> {
        check_cap(
            "reduction evaluator (R)",
            Some(self.r() as u128),
            caps.reduction_max_r as u128,
            "lower R or raise the reduction R cap",
        )?;
        check_cap(
            "reduction evaluator (|B|·δ_B^4)",
            Some(self.neighbourhood_count()),
            caps.reduction_neighbourhoods,
            "use a smaller unique-games instance",
        )?;
        Ok(())
    }

    /// Visits every small good as `(b, a-tuple, raw codes x^j, agent-local codes
    /// x^j ∘ π_{a^j,b}, weight)`. A good's mass is
    /// `weight / (denominator · |B|δ_B^4)` where `denominator` is returned.
    fn fold_small_goods<A: Send>(
        &self,
        caps: &Caps,
        init: impl Fn() -> A + Sync + Send,
        visit: impl Fn(&mut A, usize, &[usize], &[usize], &[usize], u128) + Sync + Send,
        merge: impl Fn(A, A) -> A + Sync + Send,
    ) -> Result<(A, u128)> {
        self.check_caps(caps)?;
        let scaled = self.product.scaled(caps)?;
        scaled.require_headroom(self.neighbourhood_count())?;
        let delta_b = self.ug.degree_b();
        let mut acc = init();
        for b in 0..self.ug.b_count() {
            let nbd: Vec<(usize, Vec<usize>)> = self
                .ug
                .neighbours_of_b(b)
                .map(|(a, perm)| (a, perm.code_map(ALPHABET)))
                .collect();
            for tuple in 0..delta_b.pow(SLOTS as u32) {
                let mut t = tuple;
                let picks: Vec<usize> = (0..SLOTS)
                    .map(|_| {
                        let i = t % delta_b;
                        t /= delta_b;
                        i
                    })
                    .collect();
                let a_tuple: Vec<usize> = picks.iter().map(|&i| nbd[i].0).collect();
                let part = scaled.fold(
                    &init,
                    |acc, codes, w| {
                        let mut local = [0usize; SLOTS];
                        for j in 0..SLOTS {
                            local[j] = nbd[picks[j]].1[codes[j]];
                        }
                        visit(acc, b, &a_tuple, codes, &local, w);
                    },
                    &merge,
                );
                acc = merge(acc, part);
            }
        }
        Ok((acc, scaled.denominator()))
    }

    fn to_rationals(&self, table: Vec<u128>, denom: u128) -> Vec<Rational> {
        let total = denom * self.neighbourhood_count();
        table
            .into_iter()
            .map(|w| Rational::from_biguint_ratio(w.into(), total.into()))
            .collect()
    }

    /// Each agent's total value for all small goods.
    pub fn small_good_values(&self, caps: &Caps) -> Result<Vec<Rational>> {
        let n = self.n_agents();
        let (table, denom) = self.fold_small_goods(
            caps,
            || vec![0u128; n],
            |acc, _, a_tuple, _, local, w| {
                let mut agents: Vec<usize> =
                    (0..SLOTS).map(|j| self.agent(a_tuple[j], local[j])).collect();
                agents.sort_unstable();
                agents.dedup();
                for u in agents {
                    acc[u] += w;
                }
            },
            add_tables,
        )?;
        Ok(self.to_rationals(table, denom))
    }

    pub fn small_good_mass(&self, caps: &Caps) -> Result<Rational> {
        let (total, denom) =
            self.fold_small_goods(caps, || 0u128, |acc, _, _, _, _, w| *acc += w, |a, b| a + b)?;
        Ok(Rational::from_biguint_ratio(
            total.into(),
            (denom * self.neighbourhood_count()).into(),
        ))
    }

    pub fn groups(&self) -> Vec<Vec<usize>> {
        (0..self.ug.a_count())
            .map(|a| (0..self.points()).map(|c| self.agent(a, c)).collect())
            .collect()
    }

    fn large_valuations(&self) -> Vec<Vec<(usize, Rational)>> {
        let big = self.large_value();
        (0..self.ug.a_count())
            .flat_map(|a| {
                let vals: Vec<(usize, Rational)> =
                    (0..self.points()).map(|c| (self.agent(a, c), big.clone())).collect();
                std::iter::repeat_n(vals, self.large_per_group())
            })
            .collect()
    }

    /// Family check with exact small-good totals.
    pub fn validate(&self, caps: &Caps) -> Result<Family2Report> {
        let dummy = self.dummy_total();
        let totals: Vec<Rational> = self
            .small_good_values(caps)?
            .into_iter()
            .map(|v| v + &dummy)
            .collect();
        let large = self.large_valuations();
        let groups = self.groups();
        Ok(validate_family2_profile(
            Some(&groups),
            large.iter().map(Vec::as_slice),
            &totals,
            &self.eps,
        ))
    }

    /// Explicit instance (R = 1 only): large goods, then dummies, then small goods.
    pub fn materialize(&self, caps: &Caps) -> Result<AllocationInstance> {
        if self.r() != 1 {
            return invalid("explicit reduction instances are limited to R = 1");
        }
        let mut goods: Vec<Good> = self
            .large_valuations()
            .into_iter()
            .enumerate()
            .map(|(id, vals)| Good::new(id as u64, vals).large())
            .collect();
        let everyone: Vec<(usize, Rational)> =
            (0..self.n_agents()).map(|u| (u, self.dummy_value())).collect();
        for _ in 0..self.dummy_count() {
            goods.push(Good::new(goods.len() as u64, everyone.clone()));
        }
        let (small, denom) = self.fold_small_goods(
            caps,
            Vec::new,
            |acc: &mut Vec<(Vec<usize>, u128)>, _, a_tuple, _, local, w| {
                let mut agents: Vec<usize> =
                    (0..SLOTS).map(|j| self.agent(a_tuple[j], local[j])).collect();
                agents.sort_unstable();
                agents.dedup();
                acc.push((agents, w));
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        )?;
        let total = denom * self.neighbourhood_count();
        for (agents, w) in small {
            let value = Rational::from_biguint_ratio(w.into(), total.into());
            let id = goods.len() as u64;
            goods.push(Good::new(id, agents.into_iter().map(|u| (u, value.clone())).collect()));
        }
        AllocationInstance::new(self.n_agents(), goods)?.with_groups(self.groups())
    }

    /// Allocation of the YES case: for `a ∈ A′` large goods to `(a, x)` with
    /// `x_{Λ(a)} > 0`; for other `a` large goods in code order and one dummy to
    /// each remaining agent; every small good by the χ rule on coordinate `Λ(b)`.
    pub fn yes_allocation(&self, labeling: &Labeling, a_prime: &[bool], caps: &Caps) -> Result<YesReport> {
        labeling.check(&self.ug)?;
        let a_count = self.ug.a_count();
        if a_prime.len() != a_count {
            return Err(Error::Dimension(format!("A′ mask of length {} for |A| = {a_count}", a_prime.len())));
        }
        for e in self.ug.edges().iter().filter(|e| a_prime[e.a]) {
            if e.perm.apply(labeling.a_label(e.a)) != labeling.b_label(&self.ug, e.b) {
                return invalid(format!("labeling violates edge ({}, {}) with a in A′", e.a, e.b));
            }
        }
        let outside = a_prime.iter().filter(|&&x| !x).count();
        let needed = outside * (self.points() / ALPHABET);
        if needed > self.dummy_count() {
            return invalid(format!(
                "{outside} nodes outside A′ need {needed} dummy goods, only {} exist",
                self.dummy_count()
            ));
        }

        let n = self.n_agents();
        let pts = self.points();
        let mut large = vec![false; n];
        for a in 0..a_count {
            if a_prime[a] {
                let stride = ALPHABET.pow(labeling.a_label(a) as u32);
                for c in (0..pts).filter(|c| !(c / stride).is_multiple_of(ALPHABET)) {
                    large[self.agent(a, c)] = true;
                }
            } else {
                for c in 0..self.large_per_group() {
                    large[self.agent(a, c)] = true;
                }
            }
        }

        let b_strides: Vec<usize> = (0..self.ug.b_count())
            .map(|b| ALPHABET.pow(labeling.b_label(&self.ug, b) as u32))
            .collect();
        let (table, denom) = self.fold_small_goods(
            caps,
            || vec![0u128; n],
            |acc, b, a_tuple, raw, local, w| {
                let stride = b_strides[b];
                let t = raw.iter().position(|c| (c / stride).is_multiple_of(ALPHABET)).unwrap_or(0);
                acc[self.agent(a_tuple[t], local[t])] += w;
            },
            add_tables,
        )?;
        let small = self.to_rationals(table, denom);
        let small_total: Rational = small.iter().sum();

        let big = self.large_value();
        let dummy = self.dummy_value();
        let mut utilities = small.clone();
        for a in 0..a_count {
            for c in 0..pts {
                let u = self.agent(a, c);
                if large[u] {
                    utilities[u] += &big;
                } else if !a_prime[a] {
                    utilities[u] += &dummy;
                }
            }
        }
        let min_non_large = (0..n)
            .filter(|&u| !large[u])
            .map(|u| utilities[u].clone())
            .min()
            .expect("a third of each group holds no large good");
        let bound = self.dummy_value();
        Ok(YesReport {
            holds: min_non_large >= bound,
            utilities,
            small_utilities: small,
            large_holders: large,
            dummy_used: needed,
            small_total,
            min_non_large,
            bound,
        })
    }

    fn check_no_functions(&self, fs: &[FunctionTable]) -> Result<()> {
        if fs.len() != self.ug.a_count() {
            return Err(Error::Dimension(format!("{} functions for |A| = {}", fs.len(), self.ug.a_count())));
        }
        let mean = Rational::new(2, 3);
        for (a, f) in fs.iter().enumerate() {
            if f.r() != self.r() || f.alphabet() != ALPHABET {
                return Err(Error::Dimension(format!("f_{a} has the wrong domain")));
            }
            if !f.is_boolean() || f.mean() != mean {
                return invalid(format!("f_{a} must be {{0,1}}-valued with mean 2/3"));
            }
        }
        Ok(())
    }

    /// `dummy_total + 1 - E_{g}[∏_j f_{a^j}(x^j ∘ π_{a^j,b})]`, exactly.
    pub fn no_case_bound(&self, fs: &[FunctionTable], caps: &Caps) -> Result<Rational> {
        self.check_no_functions(fs)?;
        self.check_caps(caps)?;
        let delta_b = self.ug.degree_b();
        let mut total = Rational::zero();
        for b in 0..self.ug.b_count() {
            let composed = self
                .ug
                .neighbours_of_b(b)
                .map(|(a, perm)| fs[a].compose(perm))
                .collect::<Result<Vec<_>>>()?;
            for tuple in 0..delta_b.pow(SLOTS as u32) {
                let mut t = tuple;
                let gs: Vec<&FunctionTable> = (0..SLOTS)
                    .map(|_| {
                        let g = &composed[t % delta_b];
                        t /= delta_b;
                        g
                    })
                    .collect();
                total += correlation(&gs, &self.product, caps)?;
            }
        }
        let count = Rational::from_integer(self.neighbourhood_count() as i64);
        Ok(self.dummy_total() + Rational::one() - total / count)
    }
}

fn add_tables(mut a: Vec<u128>, b: Vec<u128>) -> Vec<u128> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

/// `(E_b E_x f_b, E_a E_x f_a)`; the two agree on biregular graphs.
pub fn mean_identity(ug: &UgInstance, fs: &[FunctionTable]) -> Result<(Rational, Rational)> {
    if fs.len() != ug.a_count() {
        return Err(Error::Dimension("one function per a is required".into()));
    }
    let b_side: Rational = (0..ug.b_count())
        .map(|b| crate::unique_games::neighbourhood_average(ug, fs, b).map(|f| f.mean()))
        .sum::<Result<Rational>>()?
        / Rational::from_integer(ug.b_count() as i64);
    let a_side: Rational =
        fs.iter().map(FunctionTable::mean).sum::<Rational>() / Rational::from_integer(fs.len() as i64);
    Ok((b_side, a_side))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YesReport {
    /// Total utility per agent (large, dummy and small goods).
    pub utilities: Vec<Rational>,
    pub small_utilities: Vec<Rational>,
    pub large_holders: Vec<bool>,
    pub dummy_used: usize,
    pub small_total: Rational,
    pub min_non_large: Rational,
    /// `(1-ε)/(|A|·3^{R-1})`.
    pub bound: Rational,
    pub holds: bool,
}
