//! Ciesielski's isomorphism for Hilbert-space-valued Hölder paths, Schauder
//! series simulation of Q-Wiener processes, and numerical checks of their
//! small-noise large deviations on coefficient balls.
//!
//! Modules, bottom-up:
//!
//! * [`basis`]: Haar/Schauder functions and the weights `c_n(α)`.
//! * [`spectrum`]: eigenvalues of the covariance operator `Q`.
//! * [`transform`]: forward/inverse transform, sequence norms, grid Hölder seminorm.
//! * [`qwiener`]: seeded simulation of Q-Wiener paths and statistical checks.
//! * [`rate`]: the Cameron–Martin rate function in path and coefficient form.
//! * [`ldp`]: ball infima, exact ball probabilities, Monte Carlo, tightness sets.

pub mod basis;
pub mod error;
pub mod gauss;
pub mod ldp;
pub mod qwiener;
pub mod rate;
pub mod rng;
pub mod spectrum;
pub mod transform;

pub use basis::{haar_eval, schauder_eval, split_index, weight, BasisIndex, HolderExponent};
pub use error::{Error, Result};
pub use spectrum::{h0_energy, make_spectrum, project, DecayLaw, HVector, Side, Spectrum};
pub use transform::{
    dyadic_holder, forward, inverse, seq_norm_comp, seq_norm_h, CoeffMatrix, DyadicPath,
    HolderEstimate, HolderStrategy,
};
