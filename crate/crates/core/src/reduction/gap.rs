use serde::{Deserialize, Serialize};

use crate::allocation::{AllocationInstance, Good};
use crate::constants;
use crate::error::{invalid, Result};
use crate::limits::Caps;
use crate::rational::Rational;
use crate::unique_games::{Labeling, UgInstance};

use super::meta::MetaInstance;

/// The meta instance with large goods re-valued at `c/(|A|·3^R)`, large-good
/// size 1, every other good of size `1/(2m)` and agent capacity 1.
#[derive(Clone, Debug)]
pub struct GapInstance {
    meta: MetaInstance,
    c: Rational,
}

impl GapInstance {
    pub fn new(ug: UgInstance, eps: Rational, d: usize, tau: Rational) -> Result<Self> {
        Self::with_c(ug, eps, d, tau, constants::gap_c())
    }

    pub fn with_c(ug: UgInstance, eps: Rational, d: usize, tau: Rational, c: Rational) -> Result<Self> {
        if !c.is_positive() {
            return invalid(format!("c = {c} must be positive"));
        }
        Ok(GapInstance {
            meta: MetaInstance::new(ug, eps, d, tau)?,
            c,
        })
    }

    pub fn meta(&self) -> &MetaInstance {
        &self.meta
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn large_value(&self) -> Rational {
        &self.c / Rational::from_integer((self.meta.ug().a_count() * self.meta.points()) as i64)
    }

    pub fn large_count(&self) -> usize {
        self.meta.ug().a_count() * self.meta.large_per_group()
    }

    /// Total number of goods `m`, when it fits in a `u128`.
    pub fn good_count(&self) -> Option<u128> {
        self.meta
            .small_good_count()?
            .checked_add((self.large_count() + self.meta.dummy_count()) as u128)
    }

    /// Size of every small and dummy good, `1/(2m)`.
    pub fn small_size(&self) -> Option<Rational> {
        Some(Rational::from_integer(self.good_count()?.checked_mul(2)?).recip())
    }

    pub fn capacity(&self) -> Rational {
        Rational::one()
    }

    /// `(1-ε) + 2c/3`, which is `145/81 - ε` at the default `c`.
    pub fn yes_usw(&self) -> Rational {
        Rational::one() - self.meta.eps() + &self.c * Rational::new(2, 3)
    }

    /// Welfare of the YES allocation after dropping small goods from agents
    /// holding a large good, so that capacities hold.
    pub fn realized_yes_usw(&self, labeling: &Labeling, a_prime: &[bool], caps: &Caps) -> Result<Rational> {
        let yes = self.meta.yes_allocation(labeling, a_prime, caps)?;
        let holders = yes.large_holders.iter().filter(|&&h| h).count();
        let dummy = self.meta.dummy_value() * Rational::from_integer(yes.dummy_used as i64);
        let small: Rational = yes
            .small_utilities
            .iter()
            .zip(&yes.large_holders)
            .filter(|(_, &h)| !h)
            .map(|(u, _)| u)
            .sum();
        Ok(self.large_value() * Rational::from_integer(holders as i64) + dummy + small)
    }

    /// Explicit instance (R = 1 only) with sizes and capacities.
    pub fn materialize(&self, caps: &Caps) -> Result<AllocationInstance> {
        let base = self.meta.materialize(caps)?;
        let size = match self.small_size() {
            Some(s) => s,
            None => return invalid("too many goods for an explicit GAP instance"),
        };
        let big = self.large_value();
        let goods: Vec<Good> = base
            .goods()
            .iter()
            .map(|g| {
                if g.is_large {
                    let vals = g.valuations.iter().map(|(u, _)| (*u, big.clone())).collect();
                    Good::new(g.id, vals).large().with_size(Rational::one())
                } else {
                    g.clone().with_size(size.clone())
                }
            })
            .collect();
        let n = base.n_agents();
        AllocationInstance::new(n, goods)?
            .with_capacities(vec![self.capacity(); n])?
            .with_groups(self.meta.groups())
    }
}

/// Minimum of `x^4 - c·x` over `x = k/steps`, `k = 0..=steps`. Ties keep the
/// smallest `x`.
pub fn polynomial_grid_min(c: &Rational, steps: u32) -> (Rational, Rational) {
    let steps = steps.max(1);
    (0..=steps)
        .map(|k| {
            let x = Rational::new(k as i64, steps as i64);
            let v = x.pow(4) - c * &x;
            (x, v)
        })
        .fold(None, |best: Option<(Rational, Rational)>, (x, v)| match best {
            Some((bx, bv)) if bv <= v => Some((bx, bv)),
            _ => Some((x, v)),
        })
        .expect("the grid is non-empty")
}

/// Root of `4x^3 = c` and the polynomial's value there, when the root is rational.
pub fn stationary_point(c: &Rational) -> Option<(Rational, Rational)> {
    let x = (c / Rational::from_integer(4)).cbrt_exact()?;
    let v = x.pow(4) - c * &x;
    Some((x, v))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapNoCheck {
    /// `(1 + 4ε) + 48/81`.
    pub lhs: Rational,
    /// `129/81 + 5ε`.
    pub rhs: Rational,
    pub holds: bool,
}

pub fn gap_no_formula(eps: &Rational) -> GapNoCheck {
    let lhs = Rational::one() + Rational::from_integer(4) * eps + constants::gap_polynomial_min();
    let rhs = constants::gap_no_limit() + Rational::from_integer(5) * eps;
    GapNoCheck {
        holds: lhs <= rhs,
        lhs,
        rhs,
    }
}
