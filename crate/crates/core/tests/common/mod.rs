#![allow(dead_code)]

pub mod oracle;

use angelesco_core::{AngelescoSystem, WeightKind};

/// `[-2, 0], [0, 1]`.
pub fn touching(w: WeightKind) -> AngelescoSystem {
    AngelescoSystem::from_endpoints(-2.0, 0.0, 0.0, 1.0, w).unwrap()
}

/// `[-2, 0], [0.25, 1]`.
pub fn gapped(w: WeightKind) -> AngelescoSystem {
    AngelescoSystem::from_endpoints(-2.0, 0.0, 0.25, 1.0, w).unwrap()
}

/// `[-1, 0], [0, 1]`.
pub fn symmetric(w: WeightKind) -> AngelescoSystem {
    AngelescoSystem::from_endpoints(-1.0, 0.0, 0.0, 1.0, w).unwrap()
}
