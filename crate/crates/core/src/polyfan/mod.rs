//! Rational polyhedral fans in `ℤ^n`: validation, face lattices, stars, products,
//! refinements and isomorphism search.

pub mod cone;
mod fan;
mod iso;
mod ops;

pub use cone::{double_description, extreme_rays, hrep, HRep};
pub use fan::{Cone, ConeGeometry, Fan};
pub use iso::{
    find_isomorphism, find_isomorphism_with, minimal_chart, verify_isomorphism, FanIsomorphism, IsoSearch,
    DEFAULT_ISO_BUDGET,
};
pub use ops::{
    classify, common_refinement, is_complete, local_support, map_fan, product, random_interior_point, refines,
    restrict_to_minimal_lattice, same_support, star_fan, stellar_subdivision, subfan, unimodular_refinement,
    FanClass, ProductFan, StarFan,
};
