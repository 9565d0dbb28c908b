//! Weighted normal forms: the homological engine and the normalization flows.

pub mod conditions;
pub mod engine;

pub use conditions::{conditions_at, Condition, ConditionFamily, Part, Side, WeightConditions};
pub use engine::{solve_weight_equation, tubular_coupled_system, CoupledSystem, Engine, MapSpace, Unknown, WeightSolution};
pub mod flows;

pub use flows::{
    apply_map, condition_report, decompose_map, degenerate_chain, kolar_normalize, kolar_normalize_partial, normal_coordinates,
    special_normalize, straighten_chain, strong_normalize, tangent_model, ConditionReport, ConditionRole, GroupElement,
    NormalFormKind, NormalizationParams, NormalizationResult,
};

#[cfg(test)]
mod tests;
