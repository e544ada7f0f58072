//! Exact thresholds checked by the experiments, each with a citation tag.

use serde::Serialize;

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constant {
    pub name: &'static str,
    pub value: Rational,
    pub tag: &'static str,
}

pub const TAG_ETA: &str = "eta-properties";
pub const TAG_ETA_PRIME: &str = "noisy-eta-properties";
pub const TAG_GENERAL_TEST: &str = "general-dictator-test";
pub const TAG_COMPLETENESS: &str = "dictator-test-completeness";
pub const TAG_SOUNDNESS: &str = "dictator-test-soundness";
pub const TAG_ORTHOGONAL: &str = "efron-stein-decomposition";
pub const TAG_LOW_DEGREE: &str = "low-degree-influence-count";
pub const TAG_FAMILY2: &str = "grouped-instance-family";
pub const TAG_META_YES: &str = "meta-theorem-yes-case";
pub const TAG_META_NO: &str = "meta-theorem-no-case";
pub const TAG_DECODER: &str = "labeling-decoder";
pub const TAG_MEAN_IDENTITY: &str = "gap-mean-identity";
pub const TAG_NASH: &str = "nash-welfare-hardness";
pub const TAG_BUDGET: &str = "budgeted-allocation-hardness";
pub const TAG_GAP: &str = "gap-hardness";
pub const TAG_SINGLE_LARGE: &str = "nash-single-large-good";
pub const TAG_SOLVER: &str = "exhaustive-optimum";
pub const TAG_INFORMATIONAL: &str = "informational";

/// `1 - (2/3)^4`.
pub fn soundness_q2() -> Rational {
    Rational::new(65, 81)
}

/// Weight `c` of a large good in the GAP instance.
pub fn gap_c() -> Rational {
    Rational::new(32, 27)
}

/// YES-case utilitarian welfare of the GAP instance at `ε = 0`.
pub fn gap_yes_limit() -> Rational {
    Rational::new(145, 81)
}

/// NO-case bound of the GAP instance at `ε = 0`.
pub fn gap_no_limit() -> Rational {
    Rational::new(129, 81)
}

/// `-min_x (x^4 - c·x)` on `[0, 1]`.
pub fn gap_polynomial_min() -> Rational {
    Rational::new(48, 81)
}

/// NO-case budgeted welfare at `ε = 0`.
pub fn budget_no_limit() -> Rational {
    Rational::new(227, 81)
}

pub fn budget_ratio() -> Rational {
    Rational::new(243, 227)
}

pub fn gap_ratio() -> Rational {
    Rational::new(145, 129)
}

/// Cube of the Nash-welfare ratio limit.
pub fn nash_ratio_cubed() -> Rational {
    Rational::new(81, 65)
}

/// Smallest entry of the noisy distribution, `ε/81`.
pub fn noise_floor(eps: &Rational) -> Rational {
    eps / Rational::from_integer(81)
}

/// Every fixed constant, for the report.
pub fn registry() -> Vec<Constant> {
    vec![
        Constant { name: "soundness constant q=2", value: soundness_q2(), tag: TAG_SOUNDNESS },
        Constant { name: "soundness constant q=1", value: Rational::new(7, 8), tag: TAG_GENERAL_TEST },
        Constant { name: "gap large-good weight c", value: gap_c(), tag: TAG_GAP },
        Constant { name: "gap yes welfare limit", value: gap_yes_limit(), tag: TAG_GAP },
        Constant { name: "gap no welfare limit", value: gap_no_limit(), tag: TAG_GAP },
        Constant { name: "gap polynomial minimum (negated)", value: gap_polynomial_min(), tag: TAG_GAP },
        Constant { name: "budget no welfare limit", value: budget_no_limit(), tag: TAG_BUDGET },
        Constant { name: "budget ratio", value: budget_ratio(), tag: TAG_BUDGET },
        Constant { name: "gap ratio", value: gap_ratio(), tag: TAG_GAP },
        Constant { name: "nash ratio cubed", value: nash_ratio_cubed(), tag: TAG_NASH },
    ]
}
