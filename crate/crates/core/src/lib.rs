//! Core of the molecumentary engine.
//!
//! Everything in this crate is a pure function over in-memory values: the
//! structural model, the story graph foraged from it, the narratory
//! traversal, camera and cutting-plane planning, template commentary and the
//! two timeline generators. It builds without `std` (only `alloc`), so IO,
//! networking and file formats live in the companion `molecumentary` crate.
//!
//! The pipeline is:
//!
//! 1. [`model::StructuralModel`] is validated from types and instances.
//! 2. [`foraging::build_skeleton`] turns it into a [`graph::StoryGraph`],
//!    [`foraging::forage_descriptions`] attaches texts from providers and
//!    [`foraging::forage_functional_edges`] adds keyword-derived edges.
//! 3. [`synthesis::generate_self_guided`] or [`synthesis::generate_from_text`]
//!    produce a [`synthesis::Timeline`] of scenes.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod camera;
pub mod commentary;
pub mod foraging;
pub mod geom;
pub mod graph;
pub mod model;
pub mod occlusion;
pub mod sample;
pub mod synthesis;
pub mod text;
pub mod traversal;

pub use geom::Vec3;

/// Deterministic generator shared by every stochastic step of a run.
pub type SceneRng = rand_chacha::ChaCha8Rng;

/// Builds the run generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SceneRng {
    use rand::SeedableRng;
    SceneRng::seed_from_u64(seed)
}
