//! Statics, stability and dynamics of self-bound Bose–Einstein condensates
//! with attractive `1/r` interaction, in scaled units where the extended
//! Gross–Pitaevskii equation reads
//!
//! ```text
//! i ∂ψ/∂t = [ −Δ + 8πa|ψ|² − 2∫ |ψ(r')|² / |r − r'| d³r' ] ψ
//! ```
//!
//! with `‖ψ‖ = 1` and the single parameter `a`.
//!
//! * [`variational`]: Gaussian dynamics, fixed points, analytic eigenvalues.
//! * [`radial`]: sine-transform grid, mean-field potentials, observables.
//! * [`stationary`]: numerically exact stationary states by shooting.
//! * [`stability`]: eigenmodes of the linearized equation around them.
//! * [`propagator`]: split-operator real-time propagation.

pub mod error;
pub mod ode;
pub mod propagator;
pub mod radial;
pub mod stability;
pub mod stationary;
pub mod units;
pub mod variational;

pub use error::{Error, Result};
pub use variational::Branch;
