//! Entanglement entropy of shift-invariant quasi-free states on a spin chain,
//! computed from the spectral set `K ⊂ [0, 1)` that defines the state.
//!
//! The crate is `no_std` (it needs `alloc`). Everything is a pure function of
//! immutable inputs, so values can be shared freely across threads.
//!
//! Module map:
//!
//! * [`spectral_set`]: interval unions on the unit torus, Cantor-like
//!   truncations and Fermi seas.
//! * [`symbol`]: piecewise-constant symbols and their Fourier coefficients.
//! * [`toeplitz`]: Toeplitz restrictions `Q_N`, the exact entropy
//!   `S_N = Tr η̃(Q_N)` and the quadratic proxy `P_N = Tr Q_N(1 − Q_N)`.
//! * [`kernel`]: the Fejér-kernel integral representation of `P_N`.
//! * [`scaling`]: N-sweeps, growth fits and bound checks.
//! * [`oracle`]: brute-force Fock-space density matrices via Wick contraction.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod eigen;
pub mod error;
pub mod kernel;
pub mod oracle;
pub mod scaling;
pub mod spectral_set;
pub mod symbol;
pub mod toeplitz;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spectral_set::{CantorSpec, DispersionSamples, FermiSea, TorusIntervalSet};
pub use symbol::{SymbolCoefficients, SymbolFunction};
pub use toeplitz::{EntropyResult, ToeplitzRestriction};
