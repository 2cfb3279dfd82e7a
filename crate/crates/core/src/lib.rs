//! Finite coarse geometry: metric spaces and families, word-metric balls of
//! groups, norms and lengths on linear groups, the decomposition game with
//! checkable certificates, exactness witnesses and Rips complexes.

pub mod decomp;
pub mod error;
pub mod groups;
pub mod metric;
pub mod norms;
pub mod property_a;
pub mod rips;

pub use error::{Error, Result};
