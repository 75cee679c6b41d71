//! Convex-geometry kernel, resolution-parameterized P-derivative and game engine
//! for the no-β McMullen game.
//!
//! Bodies are compact convex sets with the origin in their interior. Homothets
//! `w + tP` of a body are the moves of the game and the copies tested by the
//! derivative. Everything numeric is relaxed by the single tolerance [`TAU`].

pub mod bodies;
pub mod cones;
pub mod derivative;
pub mod error;
pub mod faces;
pub mod game;
pub mod generators;
pub mod linalg;
pub mod lp;
pub mod rng;
pub mod serde_vec;
pub mod session;
pub mod svg;

pub use bodies::{BodyKind, BodySpec, ConvexBody, HalfSpace, Homothet, HyperplaneAt, Segment};
pub use derivative::{DerivativeTrace, GoodCopyCertificate, TargetSet};
pub use error::{Error, Result};
pub use game::{GameState, Move, Player, RunRecord, Strategy};

/// Column vector used for points and directions in every dimension.
pub type Vector = nalgebra::DVector<f64>;

/// Global tolerance for boundary and containment predicates.
pub const TAU: f64 = 1e-9;

/// Build a [`Vector`] from a slice.
pub fn vector(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}
