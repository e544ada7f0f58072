//! The allocation instance built from a unique-games instance, its GAP
//! variant and the resulting inapproximability ratios.

mod gap;
mod meta;
mod ratios;

pub use gap::{gap_no_formula, polynomial_grid_min, stationary_point, GapInstance, GapNoCheck};
pub use meta::{delta_for, mean_identity, MetaInstance, YesReport};
pub use ratios::{theorem_ratios, BoundEntry, BoundReport};
