//! Character groups of compact abelian Lie groups, closed-subgroup duality
//! and the finite-order points of `C_T`.

pub mod group;
pub mod intmat;
pub mod point;

pub use group::{DualGroup, GroupShape, Subgroup};
pub use point::{
    annihilator_of_point, component_representatives, in_subvariety, on_component, prec,
    same_component, TorsionPoint,
};
