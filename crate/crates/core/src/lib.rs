//! One-cycle fidelity of the planar surface code under correlated bit-flip
//! noise.
//!
//! The amplitudes of the two logical outcomes of one error-correction cycle
//! are sums over star-constrained x-basis spin configurations. Rewriting those
//! spins as products of plaquette variables turns the sums into correlation
//! functions of a two-dimensional Ising model with boundary fields, which this
//! crate evaluates by exhaustive enumeration, transfer matrices, and Monte
//! Carlo.
//!
//! ```
//! use num_complex::Complex64;
//! use surface_fidelity::{exact_engine, geometry::{Lattice, SyndromeSet}, noise_model};
//!
//! let lattice = Lattice::new(3)?;
//! let config = noise_model::make_homogeneous(&lattice, Complex64::new(-0.2, 0.0), Complex64::new(0.0, 0.0));
//! let res = exact_engine::amplitudes_dual(&lattice, &config, &SyndromeSet::empty())?;
//! assert!(res.fidelity > 0.5 && res.fidelity <= 1.0);
//! # Ok::<(), surface_fidelity::Error>(())
//! ```

pub mod dual_map;
pub mod error;
pub mod exact_engine;
pub mod geometry;
pub mod mc_engine;
pub mod noise_model;
pub mod threshold_analysis;

mod flips;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/dual.md")]
    mod dual {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/monte_carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/thresholds.md")]
    mod thresholds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
