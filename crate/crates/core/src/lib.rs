//! Finite truncated simplicial, bisimplicial and trisimplicial sets, with
//! decision procedures for lifting properties, fibrations and locality.

pub mod algebra;
pub mod category;
pub mod corpus;
pub mod error;
pub mod fibrations;
pub mod grothendieck;
pub mod json;
pub mod lifting;
pub mod oracles;
pub mod presheaf;
pub mod shapes;
pub mod suites;
pub mod verdict;

pub use error::{Error, Result};
pub use presheaf::{CellId, Multidegree, Presheaf, PresheafMap, Reindexing};
pub use verdict::{Certificate, Labeled, Status, Verdict, Witness};
