use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::point::{point_count, Permutation, Point};
use crate::rational::Rational;

/// A function `{0,…,q}^R → [0,1]` stored pointwise in point-code order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunctionTable {
    r: usize,
    alphabet: usize,
    values: Vec<Rational>,
}

impl FunctionTable {
    pub fn new(r: usize, alphabet: usize, values: Vec<Rational>) -> Result<Self> {
        if r == 0 || alphabet < 2 {
            return invalid("R must be positive and the alphabet at least 2");
        }
        let n = point_count(r, alphabet)
            .ok_or_else(|| Error::InvalidParameter("function table too large".into()))?;
        if values.len() != n {
            return Err(Error::Dimension(format!(
                "{} values for {alphabet}^{r} = {n} points",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_unit_interval()) {
            return invalid(format!("value {v} outside [0, 1]"));
        }
        Ok(FunctionTable {
            r,
            alphabet,
            values,
        })
    }

    pub fn from_fn(r: usize, q: usize, f: impl Fn(&Point) -> Rational) -> Result<Self> {
        let alphabet = q + 1;
        let n = point_count(r, alphabet)
            .ok_or_else(|| Error::InvalidParameter("function table too large".into()))?;
        let values = (0..n).map(|c| f(&Point::from_code(c, r, alphabet))).collect();
        FunctionTable::new(r, alphabet, values)
    }

    pub fn constant(r: usize, q: usize, value: Rational) -> Result<Self> {
        FunctionTable::from_fn(r, q, |_| value.clone())
    }

    /// `x ↦ 1{x_i > 0}` with `i` 1-based.
    pub fn dictator(r: usize, i: usize, q: usize) -> Result<Self> {
        if i == 0 || i > r {
            return Err(Error::Dimension(format!("coordinate {i} outside 1..={r}")));
        }
        FunctionTable::from_fn(r, q, |x| {
            if x.get(i - 1) > 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    /// {0,1}-valued with exactly `target_mean·(q+1)^R` ones at random positions.
    pub fn random_with_mean(r: usize, q: usize, target_mean: &Rational, seed: u64) -> Result<Self> {
        let n = point_count(r, q + 1)
            .ok_or_else(|| Error::InvalidParameter("function table too large".into()))?;
        let ones = target_mean * Rational::from_integer(n as i64);
        if !ones.is_integer() || !target_mean.is_unit_interval() {
            return invalid(format!(
                "mean {target_mean} on {n} points does not give an integral count of ones"
            ));
        }
        let ones = ones.floor().try_into().expect("bounded by n");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = vec![Rational::zero(); n];
        for idx in sample(&mut rng, n, ones).iter() {
            values[idx] = Rational::one();
        }
        FunctionTable::new(r, q + 1, values)
    }

    /// Values drawn uniformly from `{0, 1/resolution, …, 1}`.
    pub fn random_grid(r: usize, q: usize, resolution: u32, seed: u64) -> Result<Self> {
        if resolution == 0 {
            return invalid("resolution must be positive");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = point_count(r, q + 1)
            .ok_or_else(|| Error::InvalidParameter("function table too large".into()))?;
        let values = (0..n)
            .map(|_| Rational::new(rng.gen_range(0..=resolution) as i64, resolution as i64))
            .collect();
        FunctionTable::new(r, q + 1, values)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn q(&self) -> usize {
        self.alphabet - 1
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, code: usize) -> &Rational {
        &self.values[code]
    }

    pub fn at(&self, x: &Point) -> Result<&Rational> {
        if x.len() != self.r || x.alphabet() != self.alphabet {
            return Err(Error::Dimension("point does not match function domain".into()));
        }
        Ok(&self.values[x.code()])
    }

    pub fn mean(&self) -> Rational {
        let total: Rational = self.values.iter().sum();
        total / Rational::from_integer(self.values.len() as i64)
    }

    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(|v| v.is_zero() || v.is_one())
    }

    pub fn ones(&self) -> usize {
        self.values.iter().filter(|v| v.is_one()).count()
    }

    /// `x ↦ f(x ∘ π)`.
    pub fn compose(&self, perm: &Permutation) -> Result<Self> {
        if perm.len() != self.r {
            return Err(Error::Dimension(format!(
                "permutation on {} labels, function on R = {}",
                perm.len(),
                self.r
            )));
        }
        let map = perm.code_map(self.alphabet);
        let values = map.iter().map(|&c| self.values[c].clone()).collect();
        Ok(FunctionTable {
            r: self.r,
            alphabet: self.alphabet,
            values,
        })
    }

    /// Pointwise average of equally-shaped tables.
    pub fn average(tables: &[FunctionTable]) -> Result<Self> {
        let first = tables
            .first()
            .ok_or_else(|| Error::InvalidParameter("nothing to average".into()))?;
        if tables.iter().any(|t| t.r != first.r || t.alphabet != first.alphabet) {
            return Err(Error::Dimension("tables on different domains".into()));
        }
        let count = Rational::from_integer(tables.len() as i64);
        let values = (0..first.values.len())
            .map(|c| tables.iter().map(|t| &t.values[c]).sum::<Rational>() / &count)
            .collect();
        FunctionTable::new(first.r, first.alphabet, values)
    }

    pub fn to_document(&self) -> FunctionDocument {
        FunctionDocument {
            r: self.r,
            q: self.alphabet - 1,
            values: self.values.clone(),
        }
    }

    pub fn from_document(doc: FunctionDocument) -> Result<Self> {
        FunctionTable::new(doc.r, doc.q + 1, doc.values)
    }
}

/// JSON form: `{R, q, values: ["num/den", …]}` in point-code order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDocument {
    #[serde(rename = "R")]
    pub r: usize,
    pub q: usize,
    pub values: Vec<Rational>,
}
