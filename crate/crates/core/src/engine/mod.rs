//! Finite realizations of sketches and the constructions on them.

mod morphism;
mod pushout;
mod saturate;
mod search;
mod spec;

pub use morphism::SpecMorphism;
pub use pushout::{amalgamate, pushout, Provenance, PushoutResult, Side};
pub(crate) use pushout::{shortlex, UnionFind};
pub use saturate::{
    is_saturated, saturate, term_depth, Saturation, SaturationConfig, SaturationStatus,
};
pub use search::{
    count_homomorphisms, find_homomorphisms, find_homomorphisms_with, for_each_homomorphism,
    isomorphism_with, specs_isomorphic, SearchOptions,
};
pub use spec::{Elem, Specification};
