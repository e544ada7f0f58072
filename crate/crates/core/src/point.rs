//! Points of `{0,…,q}^R` and coordinate permutations.
//!
//! A point `x` has the dense code `Σ_i x_i (q+1)^i` (coordinate 0 is the least
//! significant digit). Tables over points are indexed by this code.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Number of points in `{0,…,alphabet-1}^r`, or `None` on overflow.
pub fn point_count(r: usize, alphabet: usize) -> Option<usize> {
    alphabet.checked_pow(u32::try_from(r).ok()?)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    entries: Vec<u8>,
    alphabet: usize,
}

impl Point {
    pub fn new(entries: Vec<u8>, alphabet: usize) -> Result<Self> {
        if entries.is_empty() {
            return invalid("a point needs at least one coordinate");
        }
        if alphabet < 2 || alphabet > u8::MAX as usize + 1 {
            return invalid(format!("alphabet size {alphabet} out of range"));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e as usize >= alphabet) {
            return invalid(format!("entry {bad} outside alphabet of size {alphabet}"));
        }
        Ok(Point { entries, alphabet })
    }

    pub fn from_code(mut code: usize, r: usize, alphabet: usize) -> Self {
        let entries = (0..r)
            .map(|_| {
                let digit = (code % alphabet) as u8;
                code /= alphabet;
                digit
            })
            .collect();
        Point { entries, alphabet }
    }

    pub fn code(&self) -> usize {
        self.entries
            .iter()
            .rev()
            .fold(0, |acc, &e| acc * self.alphabet + e as usize)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    /// Coordinate `i`, 0-based.
    pub fn get(&self, i: usize) -> u8 {
        self.entries[i]
    }

    /// `x ∘ π = (x_{π(1)}, …, x_{π(R)})`.
    pub fn compose(&self, perm: &Permutation) -> Result<Point> {
        if perm.len() != self.len() {
            return Err(Error::Dimension(format!(
                "point of length {} composed with permutation on {} labels",
                self.len(),
                perm.len()
            )));
        }
        let entries = (0..self.len()).map(|i| self.entries[perm.apply(i)]).collect();
        Ok(Point {
            entries,
            alphabet: self.alphabet,
        })
    }
}

/// A bijection on `{0,…,R-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return invalid("empty permutation");
        }
        let mut seen = vec![false; n];
        for &img in &images {
            if img >= n || seen[img] {
                return invalid(format!("{images:?} is not a bijection on 0..{n}"));
            }
            seen[img] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(r: usize) -> Self {
        Permutation {
            images: (0..r).collect(),
        }
    }

    /// `i ↦ i + (to - from) mod r`, the rotation sending `from` to `to`.
    pub fn cyclic_shift(r: usize, from: usize, to: usize) -> Self {
        let shift = (to + r - from % r) % r;
        Permutation {
            images: (0..r).map(|i| (i + shift) % r).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..r).collect();
        images.shuffle(rng);
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &img)| i == img)
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.len()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img] = i;
        }
        Permutation { images }
    }

    /// `self ∘ other`: `i ↦ self(other(i))`.
    pub fn then_after(&self, other: &Permutation) -> Self {
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    /// Swap the images of two inputs.
    pub(crate) fn swap_images(&mut self, i: usize, j: usize) {
        self.images.swap(i, j);
    }

    /// `table[code(x)] = code(x ∘ self)` for every point of `{0,…,alphabet-1}^R`.
    pub fn code_map(&self, alphabet: usize) -> Vec<usize> {
        let r = self.len();
        let n = point_count(r, alphabet).expect("point table too large");
        let weights: Vec<usize> = (0..r).map(|i| alphabet.pow(i as u32)).collect();
        // coordinate j of x lands at position i where images[i] = j
        let inv = self.inverse();
        let mut out = Vec::with_capacity(n);
        for code in 0..n {
            let mut c = code;
            let mut mapped = 0;
            for j in 0..r {
                mapped += (c % alphabet) * weights[inv.images[j]];
                c /= alphabet;
            }
            out.push(mapped);
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}
