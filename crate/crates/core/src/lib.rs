//! Exact Grassmann-Berezin calculus on triangulated 4-manifolds.
//!
//! This crate builds, over an exact field (arbitrary-precision rationals or an
//! odd prime field), the algebraic data attached to a triangulated compact
//! 4-manifold with distinct scalar coordinates at the vertices:
//!
//! * two chain complexes whose matrices depend rationally on the vertex
//!   coordinates (the `f`-complex on simplex-vertex pairs and the `g`-complex
//!   on tetrahedra, 4-simplices, edges and vertices),
//! * a Grassmann algebra with two anticommuting generators per tetrahedron and
//!   a Berezin integral over any subset of them,
//! * a degree-3 Grassmann weight per 4-simplex, first-order deformations of it
//!   along the rows it is built from, and the face operators dual to inner
//!   triangles,
//! * machine checks of the Pachner 3-3 move relation between cluster
//!   integrals, undeformed and deformed, together with the invariance
//!   statements that make the deformations well defined.
//!
//! All arithmetic is exact; every verification is an identity test with zero
//! tolerance. The `pg` binary exposes the checks, homology reports and matrix
//! exports on the command line.

pub mod complex;
pub mod field;
pub mod grassmann;
pub mod pachner;
pub mod triangulation;
pub mod weights;

pub mod cli;

/// Compiles and runs every code block of the guide in `book/` as a doc-test,
/// so the book cannot drift away from the public API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-arithmetic.md")]
    mod exact_arithmetic {}
    #[doc = include_str!("../../../book/src/grassmann-berezin.md")]
    mod grassmann_berezin {}
    #[doc = include_str!("../../../book/src/triangulations.md")]
    mod triangulations {}
    #[doc = include_str!("../../../book/src/chain-complexes.md")]
    mod chain_complexes {}
    #[doc = include_str!("../../../book/src/simplex-weights.md")]
    mod simplex_weights {}
    #[doc = include_str!("../../../book/src/move-verification.md")]
    mod move_verification {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
