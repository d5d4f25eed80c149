//! Certificates for weak equivalence: components, homology and
//! trivial-fibration witnesses.

mod homology;
mod snf;
mod weq;

pub use homology::{component_labels, components, homology, pi0, pi0_map, sound_maxdim, HomologyGroup, HomologyTable};
pub use snf::invariant_factors;
pub use weq::{anodyne_expansion, diag_contractible, homotopy_pullback, is_contractible, weq, Effort, Square};
