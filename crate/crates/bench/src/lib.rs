//! Fixtures shared by the benchmarks.

use angelesco_core::{AngelescoSystem, WeightKind};

/// Touching pair `[-2, 0], [0, 1]`.
pub fn touching() -> AngelescoSystem {
    AngelescoSystem::from_endpoints(-2.0, 0.0, 0.0, 1.0, WeightKind::Chebyshev2)
        .expect("valid system")
}

/// Gapped pair `[-2, 0], [0.25, 1]`.
pub fn gapped() -> AngelescoSystem {
    AngelescoSystem::from_endpoints(-2.0, 0.0, 0.25, 1.0, WeightKind::Chebyshev2)
        .expect("valid system")
}
