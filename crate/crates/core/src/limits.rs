//! Work caps for the exact (enumerative) code paths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Leaves of a product-distribution support enumeration (81^4 by default).
    pub enumeration_leaves: u128,
    /// Largest R accepted by the Efron-Stein decomposition.
    pub decomposition_max_r: usize,
    /// Assignments scanned by the brute-force solver, `(n+1)^m`.
    pub solver_assignments: u128,
    /// `|B|·δ_B^4` for exact reduction evaluators.
    pub reduction_neighbourhoods: u128,
    /// Largest R accepted by exact reduction evaluators.
    pub reduction_max_r: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration_leaves: 81u128.pow(4),
            decomposition_max_r: 8,
            solver_assignments: 10_000_000,
            reduction_neighbourhoods: 64,
            reduction_max_r: 3,
        }
    }
}

pub(crate) fn check_cap(
    what: &'static str,
    required: Option<u128>,
    cap: u128,
    hint: &'static str,
) -> Result<u128> {
    match required {
        Some(n) if n <= cap => Ok(n),
        other => Err(Error::ResourceLimit {
            what,
            required: other.unwrap_or(u128::MAX),
            cap,
            hint,
        }),
    }
}
