//! Poisson zoos of lattice animals on transitive graphs: lazy sampling,
//! cluster statistics, random-walk capacity and the growth explorations
//! used to study percolation at small intensity.

pub mod animal;
pub mod cluster;
pub mod error;
pub mod explore;
pub mod graph;
mod parse;
pub mod rng;
pub mod stats;
pub mod walk;
pub mod zoo;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/animals.md")]
    mod animals {}
    #[doc = include_str!("../../../book/src/zoo.md")]
    mod zoo {}
    #[doc = include_str!("../../../book/src/walks.md")]
    mod walks {}
    #[doc = include_str!("../../../book/src/clusters.md")]
    mod clusters {}
    #[doc = include_str!("../../../book/src/exploration.md")]
    mod exploration {}
}
