//! Indivisible goods with sparse additive valuations, allocations, and the
//! Nash / budgeted / GAP objectives.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Good {
    pub id: u64,
    /// `(agent, value)` pairs; agents not listed value the good at 0.
    pub valuations: Vec<(usize, Rational)>,
    pub size: Option<Rational>,
    pub is_large: bool,
}

impl Good {
    pub fn new(id: u64, valuations: Vec<(usize, Rational)>) -> Self {
        Good {
            id,
            valuations,
            size: None,
            is_large: false,
        }
    }

    pub fn large(mut self) -> Self {
        self.is_large = true;
        self
    }

    pub fn with_size(mut self, size: Rational) -> Self {
        self.size = Some(size);
        self
    }

    pub fn value_for(&self, agent: usize) -> Rational {
        self.valuations
            .iter()
            .find(|(a, _)| *a == agent)
            .map(|(_, v)| v.clone())
            .unwrap_or_default()
    }
}

/// Agents, goods (sorted by id), and the optional objective data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceDocument", into = "InstanceDocument")]
pub struct AllocationInstance {
    n_agents: usize,
    goods: Vec<Good>,
    budgets: Option<Vec<Rational>>,
    capacities: Option<Vec<Rational>>,
    groups: Option<Vec<Vec<usize>>>,
}

impl AllocationInstance {
    pub fn new(n_agents: usize, mut goods: Vec<Good>) -> Result<Self> {
        if n_agents == 0 {
            return invalid("an instance needs at least one agent");
        }
        goods.sort_by_key(|g| g.id);
        if goods.windows(2).any(|w| w[0].id == w[1].id) {
            return invalid("duplicate good id");
        }
        for g in &goods {
            let mut seen = vec![false; n_agents];
            for (a, v) in &g.valuations {
                if *a >= n_agents {
                    return invalid(format!("good {} names agent {a} of {n_agents}", g.id));
                }
                if std::mem::replace(&mut seen[*a], true) {
                    return invalid(format!("good {} lists agent {a} twice", g.id));
                }
                if v.is_negative() {
                    return invalid(format!("good {} has negative value {v}", g.id));
                }
            }
            if g.size.as_ref().is_some_and(Rational::is_negative) {
                return invalid(format!("good {} has a negative size", g.id));
            }
        }
        Ok(AllocationInstance {
            n_agents,
            goods,
            budgets: None,
            capacities: None,
            groups: None,
        })
    }

    pub fn with_budgets(mut self, budgets: Vec<Rational>) -> Result<Self> {
        self.check_per_agent("budgets", &budgets)?;
        self.budgets = Some(budgets);
        Ok(self)
    }

    pub fn with_capacities(mut self, capacities: Vec<Rational>) -> Result<Self> {
        self.check_per_agent("capacities", &capacities)?;
        self.capacities = Some(capacities);
        Ok(self)
    }

    pub fn with_groups(mut self, groups: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; self.n_agents];
        for &a in groups.iter().flatten() {
            if a >= self.n_agents || std::mem::replace(&mut seen[a], true) {
                return invalid(format!("groups are not a partition (agent {a})"));
            }
        }
        if seen.iter().any(|s| !s) {
            return invalid("groups do not cover every agent");
        }
        self.groups = Some(groups);
        Ok(self)
    }

    fn check_per_agent(&self, what: &str, values: &[Rational]) -> Result<()> {
        if values.len() != self.n_agents {
            return Err(Error::Dimension(format!(
                "{} {what} for {} agents",
                values.len(),
                self.n_agents
            )));
        }
        if values.iter().any(Rational::is_negative) {
            return invalid(format!("negative entry in {what}"));
        }
        Ok(())
    }

    fn check_consistency(&self) -> Result<()> {
        if self.goods.iter().any(|g| g.size.is_some()) && self.capacities.is_none() {
            return invalid("good sizes given without agent capacities");
        }
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn goods(&self) -> &[Good] {
        &self.goods
    }

    pub fn n_goods(&self) -> usize {
        self.goods.len()
    }

    pub fn budgets(&self) -> Option<&[Rational]> {
        self.budgets.as_deref()
    }

    pub fn capacities(&self) -> Option<&[Rational]> {
        self.capacities.as_deref()
    }

    pub fn groups(&self) -> Option<&[Vec<usize>]> {
        self.groups.as_deref()
    }

    /// Per-agent utility `v_i(X_i)`.
    pub fn utilities(&self, alloc: &Allocation) -> Result<Vec<Rational>> {
        self.check_allocation(alloc)?;
        let mut out = vec![Rational::zero(); self.n_agents];
        for (g, holder) in self.goods.iter().zip(&alloc.assignment) {
            if let Some(agent) = holder {
                out[*agent] += g.value_for(*agent);
            }
        }
        Ok(out)
    }

    pub fn check_allocation(&self, alloc: &Allocation) -> Result<()> {
        if alloc.assignment.len() != self.goods.len() {
            return Err(Error::InvalidAllocation(format!(
                "{} assignments for {} goods",
                alloc.assignment.len(),
                self.goods.len()
            )));
        }
        if let Some(a) = alloc.assignment.iter().flatten().find(|&&a| a >= self.n_agents) {
            return Err(Error::InvalidAllocation(format!("agent {a} out of range")));
        }
        Ok(())
    }

    /// Same goods and per-agent data with agents renamed by `rename[old] = new`.
    pub fn permute_agents(&self, rename: &[usize]) -> Result<Self> {
        let n = self.n_agents;
        let mut seen = vec![false; n];
        if rename.len() != n || rename.iter().any(|&a| a >= n || std::mem::replace(&mut seen[a], true)) {
            return invalid("agent renaming is not a permutation");
        }
        let move_vec = |v: &Vec<Rational>| {
            let mut out = vec![Rational::zero(); n];
            for (old, x) in v.iter().enumerate() {
                out[rename[old]] = x.clone();
            }
            out
        };
        let goods = self
            .goods
            .iter()
            .map(|g| Good {
                valuations: g.valuations.iter().map(|(a, v)| (rename[*a], v.clone())).collect(),
                ..g.clone()
            })
            .collect();
        Ok(AllocationInstance {
            n_agents: n,
            goods,
            budgets: self.budgets.as_ref().map(move_vec),
            capacities: self.capacities.as_ref().map(move_vec),
            groups: self
                .groups
                .as_ref()
                .map(|gs| gs.iter().map(|g| g.iter().map(|&a| rename[a]).collect()).collect()),
        })
    }

    pub fn to_document(&self) -> InstanceDocument {
        self.clone().into()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub n_agents: usize,
    pub goods: Vec<GoodDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacities: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodDocument {
    pub id: u64,
    pub vals: Vec<(usize, Rational)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<Rational>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub is_large: bool,
}

impl TryFrom<InstanceDocument> for AllocationInstance {
    type Error = Error;
    fn try_from(doc: InstanceDocument) -> Result<Self> {
        let goods = doc
            .goods
            .into_iter()
            .map(|g| Good {
                id: g.id,
                valuations: g.vals,
                size: g.size,
                is_large: g.is_large,
            })
            .collect();
        let mut inst = AllocationInstance::new(doc.n_agents, goods)?;
        if let Some(b) = doc.budgets {
            inst = inst.with_budgets(b)?;
        }
        if let Some(c) = doc.capacities {
            inst = inst.with_capacities(c)?;
        }
        if let Some(g) = doc.groups {
            inst = inst.with_groups(g)?;
        }
        inst.check_consistency()?;
        Ok(inst)
    }
}

impl From<AllocationInstance> for InstanceDocument {
    fn from(inst: AllocationInstance) -> Self {
        InstanceDocument {
            n_agents: inst.n_agents,
            goods: inst
                .goods
                .into_iter()
                .map(|g| GoodDocument {
                    id: g.id,
                    vals: g.valuations,
                    size: g.size,
                    is_large: g.is_large,
                })
                .collect(),
            budgets: inst.budgets,
            capacities: inst.capacities,
            groups: inst.groups,
        }
    }
}

/// Holder of each good in good-id order; `None` leaves the good unallocated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Allocation {
    pub assignment: Vec<Option<usize>>,
}

impl Allocation {
    pub fn empty(n_goods: usize) -> Self {
        Allocation {
            assignment: vec![None; n_goods],
        }
    }

    pub fn bundle(&self, agent: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&g| self.assignment[g] == Some(agent))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Nash,
    Budgeted,
    UswGap,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Nash => "nash",
            Objective::Budgeted => "budgeted",
            Objective::UswGap => "usw_gap",
        })
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nash" => Ok(Objective::Nash),
            "budgeted" => Ok(Objective::Budgeted),
            "usw_gap" | "gap" => Ok(Objective::UswGap),
            other => Err(Error::Parse(format!("unknown objective {other:?}"))),
        }
    }
}

/// Objective value; GAP allocations violating a capacity are `Infeasible`.
///
/// `Infeasible` orders below every value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Welfare {
    Infeasible,
    Value(Rational),
}

impl Welfare {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Welfare::Value(v) => Some(v),
            Welfare::Infeasible => None,
        }
    }
}

impl fmt::Display for Welfare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Welfare::Value(v) => write!(f, "{v}"),
            Welfare::Infeasible => f.write_str("infeasible"),
        }
    }
}

impl Serialize for Welfare {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Welfare {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "infeasible" {
            return Ok(Welfare::Infeasible);
        }
        s.parse().map(Welfare::Value).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn require_objective_data(inst: &AllocationInstance, obj: Objective) -> Result<()> {
    match obj {
        Objective::Nash => Ok(()),
        Objective::Budgeted if inst.budgets.is_none() => invalid("budgeted welfare needs budgets"),
        Objective::UswGap if inst.capacities.is_none() => invalid("GAP needs agent capacities"),
        Objective::UswGap if inst.goods.iter().any(|g| g.size.is_none()) => {
            invalid("GAP needs a size on every good")
        }
        _ => Ok(()),
    }
}

/// Nash returns the utility product (not its n-th root).
pub fn evaluate_welfare(inst: &AllocationInstance, alloc: &Allocation, obj: Objective) -> Result<Welfare> {
    require_objective_data(inst, obj)?;
    let utilities = inst.utilities(alloc)?;
    Ok(match obj {
        Objective::Nash => Welfare::Value(utilities.into_iter().product()),
        Objective::Budgeted => {
            let budgets = inst.budgets.as_ref().expect("checked");
            Welfare::Value(
                utilities
                    .into_iter()
                    .zip(budgets)
                    .map(|(u, b)| u.min(b.clone()))
                    .sum(),
            )
        }
        Objective::UswGap => {
            let caps = inst.capacities.as_ref().expect("checked");
            let mut load = vec![Rational::zero(); inst.n_agents];
            for (g, holder) in inst.goods.iter().zip(&alloc.assignment) {
                if let Some(a) = holder {
                    load[*a] += g.size.as_ref().expect("checked");
                }
            }
            if load.iter().zip(caps).any(|(l, c)| l > c) {
                Welfare::Infeasible
            } else {
                Welfare::Value(utilities.into_iter().sum())
            }
        }
    })
}

/// `(1/n) Σ ln v_i`, for display; `-inf` when some utility is 0.
pub fn nash_log_mean(utilities: &[Rational]) -> f64 {
    let n = utilities.len() as f64;
    utilities.iter().map(|u| u.to_f64().ln()).sum::<f64>() / n
}

/// First violated clause of the grouped-instance family check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family2Clause {
    GroupsMissing,
    UnequalGroups,
    LargeGoodValue,
    LargeGoodCount,
    NonLargeValue,
}

impl fmt::Display for Family2Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family2Clause::GroupsMissing => "groups missing",
            Family2Clause::UnequalGroups => "unequal groups",
            Family2Clause::LargeGoodValue => "large good value",
            Family2Clause::LargeGoodCount => "large good count",
            Family2Clause::NonLargeValue => "non-large value",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family2Report {
    pub valid: bool,
    pub clause: Option<Family2Clause>,
    pub detail: Option<String>,
}

impl Family2Report {
    fn pass() -> Self {
        Family2Report {
            valid: true,
            clause: None,
            detail: None,
        }
    }

    fn fail(clause: Family2Clause, detail: String) -> Self {
        Family2Report {
            valid: false,
            clause: Some(clause),
            detail: Some(detail),
        }
    }
}

/// Family check on a profile given without materialized small goods.
///
/// `large` lists each large good's positive valuations; `non_large_totals[u]`
/// is agent `u`'s value for all other goods together.
pub(crate) fn validate_family2_profile<'a>(
    groups: Option<&[Vec<usize>]>,
    large: impl IntoIterator<Item = &'a [(usize, Rational)]>,
    non_large_totals: &[Rational],
    eps: &Rational,
) -> Family2Report {
    use Family2Clause::*;
    let Some(groups) = groups else {
        return Family2Report::fail(GroupsMissing, "no agent groups given".into());
    };
    let size = groups.first().map_or(0, Vec::len);
    if groups.is_empty() || groups.iter().any(|g| g.len() != size) {
        return Family2Report::fail(UnequalGroups, "groups differ in size".into());
    }
    let mut group_of = vec![usize::MAX; non_large_totals.len()];
    for (k, g) in groups.iter().enumerate() {
        for &a in g {
            group_of[a] = k;
        }
    }
    let big = eps.recip();
    let mut counts = vec![0usize; groups.len()];
    for (idx, vals) in large.into_iter().enumerate() {
        let positive: Vec<&(usize, Rational)> = vals.iter().filter(|(_, v)| !v.is_zero()).collect();
        let Some(&&(first, _)) = positive.first() else {
            return Family2Report::fail(LargeGoodValue, format!("large good #{idx} is valued by nobody"));
        };
        let k = group_of[first];
        let members = &groups[k];
        let exact = positive.len() == members.len()
            && positive.iter().all(|(a, v)| group_of[*a] == k && *v == big);
        if !exact {
            return Family2Report::fail(
                LargeGoodValue,
                format!("large good #{idx} is not valued exactly {big} by one whole group"),
            );
        }
        counts[k] += 1;
    }
    if size % 3 != 0 || counts.iter().any(|&c| c != 2 * size / 3) {
        return Family2Report::fail(
            LargeGoodCount,
            format!("large goods per group {counts:?}, expected 2·{size}/3 each"),
        );
    }
    let ceiling = Rational::one() + eps;
    if let Some((u, v)) = non_large_totals.iter().enumerate().find(|(_, v)| **v > ceiling) {
        return Family2Report::fail(
            NonLargeValue,
            format!("agent {u} values non-large goods at {v} > {ceiling}"),
        );
    }
    Family2Report::pass()
}

/// Membership in the grouped family with large goods worth `1/ε`.
pub fn validate_family2(inst: &AllocationInstance, eps: &Rational) -> Family2Report {
    let mut totals = vec![Rational::zero(); inst.n_agents];
    for g in inst.goods.iter().filter(|g| !g.is_large) {
        for (a, v) in &g.valuations {
            totals[*a] += v;
        }
    }
    validate_family2_profile(
        inst.groups(),
        inst.goods
            .iter()
            .filter(|g| g.is_large)
            .map(|g| g.valuations.as_slice()),
        &totals,
        eps,
    )
}
