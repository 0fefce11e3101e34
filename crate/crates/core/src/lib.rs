//! Structural optimization kernels for prismatic sandwich beams.
//!
//! Two pipelines share this crate:
//!
//! * density-based topology optimization of a plane-stress beam domain
//!   ([`fem2d`], [`topopt`], [`mma`]), minimizing an aggregated von Mises
//!   stress or maximizing a weighted set of eigenvalues under a volume
//!   constraint;
//! * parametric sizing of web, corrugated, X and Y cores on a 2D frame model
//!   ([`sandwich`]) driven by a multi-objective genetic algorithm ([`nsga2`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the companion `prismopt` crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod fem2d;
pub mod linalg;
pub(crate) mod math;
pub mod mma;
pub mod nsga2;
pub mod sandwich;
pub mod topopt;
