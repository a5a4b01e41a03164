//! Fractional Kravchuk transform and its optical realization.
//!
//! This crate implements, end to end:
//!
//! * the discrete Kravchuk polynomial/function family and its integer
//!   transform matrices ([`kravchuk`]),
//! * the fractional Kravchuk transform (KT) together with reference DFT and
//!   fractional-DFT kernels ([`transforms`]),
//! * exact multiphoton beam-splitter interference — closed-form amplitudes,
//!   photon statistics, the quantum-KT-via-interference equivalence, Dicke
//!   Q-functions, and the XY spin-chain mapping ([`homsim`]),
//! * a Monte-Carlo simulator of a two-source photon-counting experiment with
//!   losses, detector efficiencies, and post-selection ([`experiment`]),
//! * a KT-vs-FFT image reconstruction benchmark under k-space noise
//!   ([`imaging`]).
//!
//! The numerical backbone is a single observation: the KT kernel, the
//! Kravchuk function table, and the beam-splitter amplitude matrix are all
//! matrix functions of one real symmetric tridiagonal generator, so one
//! eigendecomposition per size serves every fractional order, weight
//! parameter, and reflectivity at machine precision. Scalar closed forms are
//! also provided (see [`specfun`]) and cross-checked against the spectral
//! path in the test suite.

pub mod error;
pub mod experiment;
pub mod homsim;
pub mod imaging;
pub mod io;
pub mod kravchuk;
pub mod specfun;
mod spectral;
pub mod transforms;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

// The complex scalar and dense matrix types used throughout the public API.
pub use nalgebra::DMatrix;
pub use num::complex::Complex64;
