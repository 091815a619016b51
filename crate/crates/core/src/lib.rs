//! Computational potential theory for thin planar sets.
//!
//! The crate estimates how quickly Brownian paths leave compact planar
//! sets, computes first Dirichlet eigenvalues of raster domains, builds the
//! `f_n` functions whose Laplacian blows up on thin sets, and runs the
//! renormalized Brownian path cascade used to show that boundaries of
//! unbounded complementary components (Julia sets in particular) are thin.
//!
//! # Conventions
//!
//! Brownian motion here has generator `Δ` rather than `½Δ`: each coordinate
//! increment over a step `dt` has variance `2·dt`. With that normalization the
//! survival probability in a domain `D` decays like `exp(-t·λ₁(D))`, where
//! `λ₁(D)` is the first Dirichlet eigenvalue of the plain Laplacian, and
//! `E[exp(λ·T_D)]` is finite exactly when `λ < λ₁(D)`.
//!
//! Planar sets are [`RasterSet`]s with square cells. Sets use 4-connectivity
//! and their complements 8-connectivity.

pub mod brownian;
pub mod dirichlet;
pub mod error;
pub mod geometry;
pub mod julia;
pub mod renorm;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{Grid, PathSample, Point2, RasterSet};
pub use rng::RngSpec;
