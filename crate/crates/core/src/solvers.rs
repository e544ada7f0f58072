//! Exhaustive optimal-allocation search for tiny explicit instances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::{
    require_objective_data, validate_family2, Allocation, AllocationInstance, Objective,
};
use crate::error::{invalid, Result};
use crate::limits::{check_cap, Caps};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub objective: Objective,
    pub best_allocation: Allocation,
    pub best_value: Rational,
    /// Assignments scanned, feasible or not.
    pub explored: u128,
}

/// Holders in scan order: nobody first, then agents by index.
fn choice(digit: usize) -> Option<usize> {
    digit.checked_sub(1)
}

struct Scan<'a> {
    inst: &'a AllocationInstance,
    obj: Objective,
    utilities: Vec<Rational>,
    loads: Vec<Rational>,
    assignment: Vec<Option<usize>>,
    explored: u128,
}

impl Scan<'_> {
    fn new(inst: &AllocationInstance, obj: Objective) -> Scan<'_> {
        Scan {
            inst,
            obj,
            utilities: vec![Rational::zero(); inst.n_agents()],
            loads: vec![Rational::zero(); inst.n_agents()],
            assignment: vec![None; inst.n_goods()],
            explored: 0,
        }
    }

    fn place(&mut self, g: usize, holder: Option<usize>, sign: bool) {
        let Some(a) = holder else { return };
        let good = &self.inst.goods()[g];
        let v = good.value_for(a);
        let size = good.size.clone().unwrap_or_else(Rational::zero);
        if sign {
            self.utilities[a] += &v;
            self.loads[a] += &size;
        } else {
            self.utilities[a] -= &v;
            self.loads[a] -= &size;
        }
    }

    fn leaf_value(&self) -> Option<Rational> {
        match self.obj {
            Objective::Nash => Some(self.utilities.iter().product()),
            Objective::Budgeted => {
                let budgets = self.inst.budgets().expect("checked");
                Some(
                    self.utilities
                        .iter()
                        .zip(budgets)
                        .map(|(u, b)| u.clone().min(b.clone()))
                        .sum(),
                )
            }
            Objective::UswGap => {
                let caps = self.inst.capacities().expect("checked");
                if self.loads.iter().zip(caps).any(|(l, c)| l > c) {
                    None
                } else {
                    Some(self.utilities.iter().sum())
                }
            }
        }
    }

    /// Depth-first scan from good `g`, calling `leaf` in lexicographic order.
    fn run(&mut self, g: usize, leaf: &mut dyn FnMut(&[Option<usize>], Rational)) {
        if g == self.assignment.len() {
            self.explored += 1;
            if let Some(v) = self.leaf_value() {
                leaf(&self.assignment, v);
            }
            return;
        }
        for digit in 0..=self.inst.n_agents() {
            let holder = choice(digit);
            self.place(g, holder, true);
            self.assignment[g] = holder;
            self.run(g + 1, leaf);
            self.place(g, holder, false);
        }
        self.assignment[g] = None;
    }
}

fn prepare(inst: &AllocationInstance, obj: Objective, caps: &Caps) -> Result<u128> {
    require_objective_data(inst, obj)?;
    let space = (inst.n_agents() as u128 + 1).checked_pow(inst.n_goods() as u32);
    check_cap(
        "solver assignments ((n+1)^m)",
        space,
        caps.solver_assignments,
        "use fewer goods or agents, or raise the solver cap",
    )
}

/// Scans each first-good choice on its own worker and returns the per-branch
/// results in scan order.
fn branches<T: Send>(
    inst: &AllocationInstance,
    obj: Objective,
    make: impl Fn() -> T + Sync,
    visit: impl Fn(&mut T, &[Option<usize>], Rational) + Sync,
) -> Vec<(T, u128)> {
    let run_from = |first: Option<usize>| {
        let mut scan = Scan::new(inst, obj);
        let mut state = make();
        let start = match first {
            Some(digit) => {
                scan.place(0, choice(digit), true);
                scan.assignment[0] = choice(digit);
                1
            }
            None => 0,
        };
        scan.run(start, &mut |a, v| visit(&mut state, a, v));
        (state, scan.explored)
    };
    if inst.n_goods() == 0 {
        return vec![run_from(None)];
    }
    (0..=inst.n_agents())
        .into_par_iter()
        .map(|d| run_from(Some(d)))
        .collect()
}

/// Best allocation over all `(n+1)^m` assignments; ties go to the first found
/// in lexicographic order (good 0 most significant, unallocated before agent 0).
pub fn solve_exact(inst: &AllocationInstance, obj: Objective, caps: &Caps) -> Result<SolveResult> {
    prepare(inst, obj, caps)?;
    let parts = branches(
        inst,
        obj,
        || None::<(Rational, Vec<Option<usize>>)>,
        |best, a, v| {
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                *best = Some((v, a.to_vec()));
            }
        },
    );
    let explored = parts.iter().map(|(_, e)| e).sum();
    let (best_value, assignment) = parts
        .into_iter()
        .filter_map(|(b, _)| b)
        .fold(None, |acc: Option<(Rational, Vec<Option<usize>>)>, (v, a)| match acc {
            Some((bv, ba)) if bv >= v => Some((bv, ba)),
            _ => Some((v, a)),
        })
        .expect("the empty allocation is always feasible");
    Ok(SolveResult {
        objective: obj,
        best_allocation: Allocation { assignment },
        best_value,
        explored,
    })
}

/// The optimum and every allocation attaining it, in scan order.
pub fn optimal_allocations(
    inst: &AllocationInstance,
    obj: Objective,
    caps: &Caps,
) -> Result<(Rational, Vec<Allocation>)> {
    prepare(inst, obj, caps)?;
    let parts = branches(
        inst,
        obj,
        || None::<(Rational, Vec<Allocation>)>,
        |best, a, v| match best {
            Some((b, all)) if v == *b => all.push(Allocation { assignment: a.to_vec() }),
            Some((b, _)) if v < *b => {}
            _ => *best = Some((v, vec![Allocation { assignment: a.to_vec() }])),
        },
    );
    let mut best: Option<(Rational, Vec<Allocation>)> = None;
    for (part, _) in parts {
        let Some((v, all)) = part else { continue };
        match &mut best {
            Some((b, acc)) if *b == v => acc.extend(all),
            Some((b, _)) if *b > v => {}
            _ => best = Some((v, all)),
        }
    }
    Ok(best.expect("the empty allocation is always feasible"))
}

/// Whether every optimal Nash allocation gives each agent at most one large
/// good. Instances outside the grouped family are rejected.
pub fn check_single_large_good_property(
    inst: &AllocationInstance,
    eps: &Rational,
    caps: &Caps,
) -> Result<bool> {
    let report = validate_family2(inst, eps);
    if !report.valid {
        return invalid(format!(
            "instance is outside the grouped family: {}",
            report.detail.unwrap_or_default()
        ));
    }
    let large: Vec<usize> = (0..inst.n_goods()).filter(|&g| inst.goods()[g].is_large).collect();
    let (_, optima) = optimal_allocations(inst, Objective::Nash, caps)?;
    Ok(optima.iter().all(|alloc| {
        let mut held = vec![0usize; inst.n_agents()];
        for &g in &large {
            if let Some(a) = alloc.assignment[g] {
                held[a] += 1;
            }
        }
        held.iter().all(|&h| h <= 1)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::{evaluate_welfare, Good, Welfare};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn nash_split() {
        let inst = AllocationInstance::new(
            2,
            vec![
                Good::new(0, vec![(0, r(1, 1))]),
                Good::new(1, vec![(1, r(1, 1))]),
            ],
        )
        .unwrap();
        let res = solve_exact(&inst, Objective::Nash, &Caps::default()).unwrap();
        assert_eq!(res.best_value, Rational::one());
        assert_eq!(res.best_allocation.assignment, vec![Some(0), Some(1)]);
        assert_eq!(res.explored, 9);
    }

    #[test]
    fn budget_caps_the_sum() {
        let inst = AllocationInstance::new(
            1,
            vec![Good::new(0, vec![(0, r(3, 4))]), Good::new(1, vec![(0, r(3, 4))])],
        )
        .unwrap()
        .with_budgets(vec![Rational::one()])
        .unwrap();
        let res = solve_exact(&inst, Objective::Budgeted, &Caps::default()).unwrap();
        assert_eq!(res.best_value, Rational::one());
        assert_eq!(res.explored, 4);
    }

    #[test]
    fn gap_skips_infeasible() {
        let inst = AllocationInstance::new(
            1,
            vec![
                Good::new(0, vec![(0, r(2, 1))]).with_size(Rational::one()),
                Good::new(1, vec![(0, r(1, 1))]).with_size(Rational::one()),
            ],
        )
        .unwrap()
        .with_capacities(vec![Rational::one()])
        .unwrap();
        let res = solve_exact(&inst, Objective::UswGap, &Caps::default()).unwrap();
        assert_eq!(res.best_value, r(2, 1));
        assert_eq!(
            evaluate_welfare(&inst, &res.best_allocation, Objective::UswGap).unwrap(),
            Welfare::Value(r(2, 1))
        );
    }

    #[test]
    fn ties_go_to_first_found() {
        let inst = AllocationInstance::new(2, vec![Good::new(0, vec![(0, r(1, 1)), (1, r(1, 1))])])
            .unwrap()
            .with_budgets(vec![r(5, 1), r(5, 1)])
            .unwrap();
        let res = solve_exact(&inst, Objective::Budgeted, &Caps::default()).unwrap();
        assert_eq!(res.best_allocation.assignment, vec![Some(0)]);
        let (_, all) = optimal_allocations(&inst, Objective::Budgeted, &Caps::default()).unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let goods = (0..8).map(|i| Good::new(i, vec![(0, r(1, 1))])).collect();
        let inst = AllocationInstance::new(3, goods).unwrap();
        let caps = Caps {
            solver_assignments: 1000,
            ..Caps::default()
        };
        assert!(matches!(
            solve_exact(&inst, Objective::Nash, &caps),
            Err(crate::error::Error::ResourceLimit { .. })
        ));
    }

    fn family(eps: Rational) -> AllocationInstance {
        let big = eps.recip();
        let everyone = |v: Rational| (0..3).map(|a| (a, v.clone())).collect::<Vec<_>>();
        AllocationInstance::new(
            3,
            vec![
                Good::new(0, everyone(big.clone())).large(),
                Good::new(1, everyone(big)).large(),
                Good::new(2, everyone(r(1, 2))),
                Good::new(3, everyone(r(1, 2))),
            ],
        )
        .unwrap()
        .with_groups(vec![vec![0, 1, 2]])
        .unwrap()
    }

    #[test]
    fn single_large_good_property() {
        let caps = Caps::default();
        assert!(check_single_large_good_property(&family(r(1, 10)), &r(1, 10), &caps).unwrap());
        // still in the family at ε = 1/2, where the answer is whatever the scan finds
        check_single_large_good_property(&family(r(1, 2)), &r(1, 2), &caps).unwrap();
    }

    #[test]
    fn rejects_non_family() {
        let inst = AllocationInstance::new(
            2,
            vec![Good::new(0, vec![(0, r(1, 1))]), Good::new(1, vec![(0, r(1, 1))])],
        )
        .unwrap();
        assert!(check_single_large_good_property(&inst, &r(1, 10), &Caps::default()).is_err());
    }
}
