//! Representations of a box, their morphisms, bricks and isomorphism tests.

mod hom;
mod iso;
mod representation;

pub use hom::{compose_morphisms, hom_space, is_morphism};
pub use iso::{are_isomorphic, enumerate_bricks, is_brick, IsoOptions};
pub use representation::{
    check_representation, evaluate_element, identity_morphism, path_matrix, zero_representation,
    MorphismData, RepError, Representation,
};
