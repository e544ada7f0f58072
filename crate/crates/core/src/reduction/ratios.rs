use serde::Serialize;

use crate::constants::{self, TAG_BUDGET, TAG_GAP, TAG_NASH};
use crate::error::{invalid, Result};
use crate::rational::Rational;

/// One named quantity: an exact value when it is rational, its decimal, and
/// the outcome of an inequality check when the entry is one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub exact: Option<Rational>,
    pub decimal: f64,
    pub check: Option<bool>,
    pub tag: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub eps: Rational,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn checks_pass(&self) -> bool {
        self.entries.iter().all(|e| e.check != Some(false))
    }

    pub fn nash_ratio(&self) -> f64 {
        self.get("nash ratio").map_or(f64::NAN, |e| e.decimal)
    }

    pub fn budget_ratio(&self) -> f64 {
        self.get("budget ratio").map_or(f64::NAN, |e| e.decimal)
    }

    pub fn gap_ratio(&self) -> f64 {
        self.get("gap ratio").map_or(f64::NAN, |e| e.decimal)
    }
}

fn value(name: &str, exact: Rational, tag: &'static str) -> BoundEntry {
    BoundEntry {
        name: name.into(),
        decimal: exact.to_f64(),
        exact: Some(exact),
        check: None,
        tag,
    }
}

fn check(name: &str, lhs: &Rational, rhs: &Rational, tag: &'static str) -> BoundEntry {
    BoundEntry {
        name: name.into(),
        decimal: (lhs - rhs).to_f64(),
        exact: Some(lhs - rhs),
        check: Some(lhs >= rhs),
        tag,
    }
}

/// YES/NO ratios of the three objectives and the inequality chains that
/// lower-bound them. Check entries hold `lhs - rhs`.
pub fn theorem_ratios(eps: &Rational) -> Result<BoundReport> {
    if !eps.is_positive() || *eps > Rational::new(1, 100) {
        return invalid(format!("ε = {eps} must lie in (0, 1/100]"));
    }
    let one = Rational::one();
    let int = |n: i64| Rational::from_integer(n);
    let mut entries = Vec::new();

    // Nash welfare: the ratio is (81/65)^{1/3}(1-ε)^{1/3}/(1+5ε), compared cubed.
    let k3 = constants::nash_ratio_cubed();
    let nash_cubed = &k3 * (&one - eps) / (&one + int(5) * eps).pow(3);
    let chain = &k3 * (&one - eps).pow(3) * (&one - int(10) * eps).pow(3);
    let k = k3.to_f64().cbrt();
    entries.push(value("nash ratio cubed", nash_cubed.clone(), TAG_NASH));
    entries.push(BoundEntry {
        name: "nash ratio".into(),
        exact: None,
        decimal: nash_cubed.to_f64().cbrt(),
        check: None,
        tag: TAG_NASH,
    });
    entries.push(check("nash cubed chain", &nash_cubed, &chain, TAG_NASH));
    entries.push(check(
        "nash cubed vs (81/65)(1-20ε)^3",
        &nash_cubed,
        &(&k3 * (&one - int(20) * eps).pow(3)),
        TAG_NASH,
    ));
    // k(1-ε)(1-10ε) ≥ k - 20ε  ⇔  81/65 ≤ 8000/(11-10ε)^3
    entries.push(check(
        "nash final step",
        &(int(8000) / (int(11) - int(10) * eps).pow(3)),
        &k3,
        TAG_NASH,
    ));
    entries.push(BoundEntry {
        name: "nash lower bound".into(),
        exact: None,
        decimal: k - 20.0 * eps.to_f64(),
        check: None,
        tag: TAG_NASH,
    });

    // Budgeted allocation.
    let budget_yes = int(3) * (&one - eps);
    let budget_no = constants::budget_no_limit() + eps;
    let budget = &budget_yes / &budget_no;
    entries.push(value("budget yes welfare", budget_yes, TAG_BUDGET));
    entries.push(value("budget no bound", budget_no, TAG_BUDGET));
    entries.push(value("budget ratio", budget.clone(), TAG_BUDGET));
    let squared = constants::budget_ratio() * (&one - eps).pow(2);
    entries.push(check("budget chain", &budget, &squared, TAG_BUDGET));
    let linear = constants::budget_ratio() - int(4) * eps;
    entries.push(check("budget final step", &squared, &linear, TAG_BUDGET));
    entries.push(value("budget lower bound", linear, TAG_BUDGET));

    // GAP.
    let gap_yes = constants::gap_yes_limit() - eps;
    let gap_no = constants::gap_no_limit() + int(5) * eps;
    let gap = &gap_yes / &gap_no;
    entries.push(value("gap yes welfare", gap_yes, TAG_GAP));
    entries.push(value("gap no bound", gap_no, TAG_GAP));
    entries.push(value("gap ratio", gap.clone(), TAG_GAP));
    let middle = constants::gap_ratio() * (&one - int(5) * eps) - eps;
    entries.push(check("gap chain", &gap, &middle, TAG_GAP));
    let linear = constants::gap_ratio() - int(11) * eps;
    entries.push(check("gap final step", &middle, &linear, TAG_GAP));
    entries.push(value("gap lower bound", linear, TAG_GAP));

    Ok(BoundReport {
        eps: eps.clone(),
        entries,
    })
}
