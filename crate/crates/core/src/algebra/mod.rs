//! Limits, colimits, mapping spaces and the two-variable constructions.

mod internal;
mod limits;
mod search;

pub use internal::{
    hom_into, internal_hom, map_space, map_space_over, pullback_exponential, pushout_product, sound_truncation, MappingObject,
    PullbackExponential,
};
pub use limits::{
    cocone_map, cone_map, coproduct, external, external_map, fiber, product, product_map, pullback, pushout, Cocone, Cone,
};
pub use search::{find_isomorphism, hom, HomSearch, DEFAULT_BUDGET};
