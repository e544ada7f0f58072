//! Bipartite unique-games instances, labelings, planted generators and the
//! influence-based labeling decoder.
//!
//! Nodes and labels are 0-based. An edge `(a, b, π)` stores `π = π_{a,b}` and is
//! satisfied when `π(Λ(a)) = Λ(b)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolean_functions::{influence_profile, FunctionTable};
use crate::error::{invalid, Error, Result};
use crate::limits::Caps;
use crate::point::Permutation;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// `π_{a,b}`; the reverse direction is its inverse.
    pub perm: Permutation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UgDocument", into = "UgDocument")]
pub struct UgInstance {
    r: usize,
    a_count: usize,
    b_count: usize,
    edges: Vec<Edge>,
    /// Edge indices incident to each `b`, in edge order.
    b_edges: Vec<Vec<usize>>,
    a_edges: Vec<Vec<usize>>,
}

impl UgInstance {
    /// Validates ranges, simple-graph structure and biregularity.
    pub fn new(r: usize, a_count: usize, b_count: usize, edges: Vec<Edge>) -> Result<Self> {
        if r == 0 || a_count == 0 || b_count == 0 {
            return invalid("R, |A| and |B| must be positive");
        }
        let mut a_edges = vec![Vec::new(); a_count];
        let mut b_edges = vec![Vec::new(); b_count];
        let mut seen = std::collections::HashSet::new();
        for (idx, e) in edges.iter().enumerate() {
            if e.a >= a_count || e.b >= b_count {
                return invalid(format!("edge ({}, {}) names a missing node", e.a, e.b));
            }
            if e.perm.len() != r {
                return Err(Error::Dimension(format!(
                    "edge ({}, {}) permutes {} labels, R = {r}",
                    e.a,
                    e.b,
                    e.perm.len()
                )));
            }
            if !seen.insert((e.a, e.b)) {
                return invalid(format!("duplicate edge ({}, {})", e.a, e.b));
            }
            a_edges[e.a].push(idx);
            b_edges[e.b].push(idx);
        }
        let regular = |lists: &[Vec<usize>]| lists.iter().all(|l| !l.is_empty() && l.len() == lists[0].len());
        if !regular(&a_edges) || !regular(&b_edges) {
            return invalid("graph is not biregular");
        }
        Ok(UgInstance {
            r,
            a_count,
            b_count,
            edges,
            b_edges,
            a_edges,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn a_count(&self) -> usize {
        self.a_count
    }

    pub fn b_count(&self) -> usize {
        self.b_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree_a(&self) -> usize {
        self.a_edges[0].len()
    }

    pub fn degree_b(&self) -> usize {
        self.b_edges[0].len()
    }

    /// `(a, π_{a,b})` for each neighbour of `b`.
    pub fn neighbours_of_b(&self, b: usize) -> impl Iterator<Item = (usize, &Permutation)> + '_ {
        self.b_edges[b].iter().map(|&i| (self.edges[i].a, &self.edges[i].perm))
    }

    pub fn neighbours_of_a(&self, a: usize) -> impl Iterator<Item = (usize, &Permutation)> + '_ {
        self.a_edges[a].iter().map(|&i| (self.edges[i].b, &self.edges[i].perm))
    }

    /// `π_{a,b}` when `(a, b)` is an edge.
    pub fn perm(&self, a: usize, b: usize) -> Option<&Permutation> {
        self.a_edges[a]
            .iter()
            .map(|&i| &self.edges[i])
            .find(|e| e.b == b)
            .map(|e| &e.perm)
    }

    /// Fraction of satisfied edges.
    pub fn satisfaction(&self, labeling: &Labeling) -> Result<Rational> {
        labeling.check(self)?;
        let hits = self
            .edges
            .iter()
            .filter(|e| e.perm.apply(labeling.a_label(e.a)) == labeling.b_label(self, e.b))
            .count();
        Ok(Rational::new(hits as i64, self.edges.len() as i64))
    }

    /// `|B|` nodes of degree `δ_B`, neighbours spread evenly over `A` after a
    /// random relabeling; every permutation random.
    pub fn random(a_count: usize, b_count: usize, delta_b: usize, r: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs = biregular_pairs(a_count, b_count, delta_b, r, &mut rng)?;
        let edges = pairs
            .into_iter()
            .map(|(a, b)| Edge {
                a,
                b,
                perm: Permutation::random(r, &mut rng),
            })
            .collect();
        UgInstance::new(r, a_count, b_count, edges)
    }

    /// Random biregular instance with a planted labeling satisfying every edge.
    pub fn planted(
        a_count: usize,
        b_count: usize,
        delta_b: usize,
        r: usize,
        seed: u64,
    ) -> Result<(Self, Labeling)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs = biregular_pairs(a_count, b_count, delta_b, r, &mut rng)?;
        let labels: Vec<usize> = (0..a_count + b_count).map(|_| rng.gen_range(0..r)).collect();
        let edges = pairs
            .into_iter()
            .map(|(a, b)| {
                let mut perm = Permutation::random(r, &mut rng);
                let (la, lb) = (labels[a], labels[a_count + b]);
                let j = perm.inverse().apply(lb);
                perm.swap_images(la, j);
                Edge { a, b, perm }
            })
            .collect();
        let inst = UgInstance::new(r, a_count, b_count, edges)?;
        Ok((inst, Labeling { labels }))
    }

    pub fn to_document(&self) -> UgDocument {
        self.clone().into()
    }
}

fn biregular_pairs<R: Rng>(
    a_count: usize,
    b_count: usize,
    delta_b: usize,
    r: usize,
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    if r == 0 || a_count == 0 || b_count == 0 || delta_b == 0 {
        return invalid("R, |A|, |B| and δ_B must be positive");
    }
    if delta_b > a_count || !(b_count * delta_b).is_multiple_of(a_count) {
        return invalid(format!(
            "no simple biregular graph with |A| = {a_count}, |B| = {b_count}, δ_B = {delta_b}"
        ));
    }
    let mut relabel: Vec<usize> = (0..a_count).collect();
    relabel.shuffle(rng);
    Ok((0..b_count)
        .flat_map(|b| (0..delta_b).map(move |t| (b, t)))
        .map(|(b, t)| (relabel[(b * delta_b + t) % a_count], b))
        .collect())
}

/// JSON form `{R, A, B, edges: [{a, b, perm}]}` with 0-based images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UgDocument {
    #[serde(rename = "R")]
    pub r: usize,
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "B")]
    pub b: usize,
    pub edges: Vec<Edge>,
}

impl TryFrom<UgDocument> for UgInstance {
    type Error = Error;
    fn try_from(doc: UgDocument) -> Result<Self> {
        UgInstance::new(doc.r, doc.a, doc.b, doc.edges)
    }
}

impl From<UgInstance> for UgDocument {
    fn from(inst: UgInstance) -> Self {
        UgDocument {
            r: inst.r,
            a: inst.a_count,
            b: inst.b_count,
            edges: inst.edges,
        }
    }
}

/// Labels for `A` followed by labels for `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    pub labels: Vec<usize>,
}

impl Labeling {
    pub fn new(a_labels: Vec<usize>, b_labels: Vec<usize>) -> Self {
        let mut labels = a_labels;
        labels.extend(b_labels);
        Labeling { labels }
    }

    pub fn a_label(&self, a: usize) -> usize {
        self.labels[a]
    }

    pub fn b_label(&self, inst: &UgInstance, b: usize) -> usize {
        self.labels[inst.a_count + b]
    }

    pub fn check(&self, inst: &UgInstance) -> Result<()> {
        if self.labels.len() != inst.a_count + inst.b_count {
            return Err(Error::Dimension(format!(
                "{} labels for {} nodes",
                self.labels.len(),
                inst.a_count + inst.b_count
            )));
        }
        if let Some(l) = self.labels.iter().find(|&&l| l >= inst.r) {
            return invalid(format!("label {l} outside 0..{}", inst.r));
        }
        Ok(())
    }
}

/// `f_b(x) = avg_{a ∈ Nbd(b)} f_a(x ∘ π_{a,b})`.
pub fn neighbourhood_average(inst: &UgInstance, fs: &[FunctionTable], b: usize) -> Result<FunctionTable> {
    let parts = inst
        .neighbours_of_b(b)
        .map(|(a, perm)| fs[a].compose(perm))
        .collect::<Result<Vec<_>>>()?;
    FunctionTable::average(&parts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub labeling: Labeling,
    /// `S(b) = {i : Inf_i^{≤d}(f_b) > τ}`.
    pub b_candidates: Vec<Vec<usize>>,
    /// `Cand(a) = {i : Inf_i^{≤d}(f_a) ≥ τ/2}`.
    pub a_candidates: Vec<Vec<usize>>,
    /// `2d/τ`.
    pub candidate_bound: Rational,
}

/// Label `b` by the smallest coordinate of `S(b)` and `a` uniformly from
/// `Cand(a)`; empty sets give label 0.
pub fn decode_labeling(
    inst: &UgInstance,
    fs: &[FunctionTable],
    d: usize,
    tau: &Rational,
    seed: u64,
    caps: &Caps,
) -> Result<DecodeReport> {
    if fs.len() != inst.a_count {
        return Err(Error::Dimension(format!(
            "{} functions for |A| = {}",
            fs.len(),
            inst.a_count
        )));
    }
    if fs.iter().any(|f| f.r() != inst.r) {
        return Err(Error::Dimension("function length differs from R".into()));
    }
    if !tau.is_positive() {
        return invalid("τ must be positive");
    }
    let b_candidates = (0..inst.b_count)
        .into_par_iter()
        .map(|b| {
            let fb = neighbourhood_average(inst, fs, b)?;
            Ok(influence_profile(&fb, d, caps)?.above(tau))
        })
        .collect::<Result<Vec<_>>>()?;
    let half = tau / Rational::from_integer(2);
    let a_candidates = fs
        .par_iter()
        .map(|f| Ok(influence_profile(f, d, caps)?.at_least(&half)))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_labels = a_candidates
        .iter()
        .map(|c| c.choose(&mut rng).copied().unwrap_or(0))
        .collect();
    let b_labels = b_candidates.iter().map(|s| s.first().copied().unwrap_or(0)).collect();
    Ok(DecodeReport {
        labeling: Labeling::new(a_labels, b_labels),
        b_candidates,
        a_candidates,
        candidate_bound: Rational::from_integer(2 * d as i64) / tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn planted_small() {
        let (inst, lab) = UgInstance::planted(2, 2, 2, 2, 1).unwrap();
        assert_eq!(inst.edges().len(), 4);
        assert_eq!(inst.degree_a(), 2);
        assert_eq!(inst.satisfaction(&lab).unwrap(), Rational::one());
    }

    #[test]
    fn seeds_differ_but_both_satisfied() {
        let (x, lx) = UgInstance::planted(3, 3, 2, 5, 1).unwrap();
        let (y, ly) = UgInstance::planted(3, 3, 2, 5, 2).unwrap();
        assert_ne!(x.edges(), y.edges());
        assert!(x.satisfaction(&lx).unwrap().is_one());
        assert!(y.satisfaction(&ly).unwrap().is_one());
    }

    #[test]
    fn single_edge_unsatisfied() {
        let edge = Edge {
            a: 0,
            b: 0,
            perm: Permutation::identity(2),
        };
        let inst = UgInstance::new(2, 1, 1, vec![edge]).unwrap();
        assert!(inst.satisfaction(&Labeling::new(vec![0], vec![1])).unwrap().is_zero());
    }

    #[test]
    fn random_labels_hit_one_over_r() {
        let mut total = 0.0;
        for seed in 0..100 {
            let inst = UgInstance::random(4, 4, 2, 4, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let labels = (0..8).map(|_| rng.gen_range(0..4)).collect();
            total += inst.satisfaction(&Labeling { labels }).unwrap().to_f64();
        }
        assert!((total / 100.0 - 0.25).abs() < 0.06);
    }

    #[test]
    fn infeasible_degrees() {
        assert!(UgInstance::planted(3, 2, 2, 2, 0).is_err());
        assert!(UgInstance::planted(2, 2, 3, 2, 0).is_err());
        let edges = vec![
            Edge { a: 0, b: 0, perm: Permutation::identity(2) },
            Edge { a: 1, b: 0, perm: Permutation::identity(2) },
            Edge { a: 1, b: 1, perm: Permutation::identity(2) },
        ];
        assert!(UgInstance::new(2, 2, 2, edges).is_err());
    }

    #[test]
    fn decoder_recovers_planted_dictators() {
        let tau = ratio(1, 10);
        for seed in 0..10 {
            let (inst, lab) = UgInstance::planted(2, 2, 2, 3, seed).unwrap();
            let fs: Vec<FunctionTable> = (0..2)
                .map(|a| FunctionTable::dictator(3, lab.a_label(a) + 1, 2).unwrap())
                .collect();
            let rep = decode_labeling(&inst, &fs, 2, &tau, seed, &Caps::default()).unwrap();
            assert!(inst.satisfaction(&rep.labeling).unwrap().is_one());
        }
    }

    #[test]
    fn decoder_on_constants_and_candidate_bound() {
        let inst = UgInstance::random(3, 3, 2, 3, 4).unwrap();
        let fs = vec![FunctionTable::constant(3, 2, ratio(2, 3)).unwrap(); 3];
        let rep = decode_labeling(&inst, &fs, 2, &ratio(1, 10), 0, &Caps::default()).unwrap();
        assert!(rep.a_candidates.iter().all(Vec::is_empty));
        assert!(inst.satisfaction(&rep.labeling).is_ok());

        let fs: Vec<FunctionTable> = (0..3)
            .map(|a| FunctionTable::random_with_mean(3, 2, &ratio(2, 3), a).unwrap())
            .collect();
        let rep = decode_labeling(&inst, &fs, 2, &ratio(1, 10), 0, &Caps::default()).unwrap();
        for c in &rep.a_candidates {
            assert!(Rational::from_integer(c.len() as i64) <= rep.candidate_bound);
        }
    }

    #[test]
    fn json_shape() {
        let (inst, lab) = UgInstance::planted(2, 2, 2, 2, 3).unwrap();
        let json = serde_json::to_string(&inst).unwrap();
        assert!(json.starts_with(r#"{"R":2,"A":2,"B":2,"edges":[{"a":"#));
        let back: UgInstance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inst);
        let lj = serde_json::to_string(&lab).unwrap();
        assert!(lj.starts_with(r#"{"labels":["#));
    }
}
