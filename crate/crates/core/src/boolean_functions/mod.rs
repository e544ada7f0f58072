//! Functions `{0,…,q}^R → [0,1]`, their Efron-Stein decomposition and the
//! correlation functional over product distributions.

mod correlation;
mod efron_stein;
mod table;

pub use correlation::{correlation, correlation_by_enumeration, correlation_monte_carlo, CorrelationEstimate};
pub use efron_stein::{influence_profile, EfronSteinDecomposition, InfluenceProfile, Subset};
pub use table::{FunctionDocument, FunctionTable};
