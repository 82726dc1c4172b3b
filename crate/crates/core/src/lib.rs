//! Numerical laboratory for convolution-type operators on Banach function spaces.
//!
//! The line is truncated to a symmetric window `[-T, T]` and sampled on a
//! power-of-two grid. On top of that discretization the crate provides:
//!
//! * [`grid`]: the grid, sampled functions and the Fourier pair with kernel
//!   `e^{+itx}` forward and `(2π)^{-1} e^{-itx}` inverse;
//! * [`spaces`]: Lebesgue, power-weighted Lebesgue and variable-exponent
//!   norms, associate spaces, Hölder pairing and p-norm estimation of
//!   linear operators;
//! * [`maximal`]: Hardy–Littlewood and local sharp maximal functions, kernel
//!   oscillation and the Condition (D) ratio;
//! * [`wavelets`]: Daubechies filters, dyadic refinement of `φ`, `ψ`, `ψ'`,
//!   dyadic systems and exponential majorants;
//! * [`randomized`]: sign-randomized wavelet kernels and operators, the square
//!   function and the empirical constants attached to them;
//! * [`multipliers`]: symbols of bounded variation, `W⁰(a) = F⁻¹aF`, Stechkin's
//!   inequality and two implementations of the Cauchy singular integral;
//! * [`algebra`]: rank-one factorization through a convolution, finite-rank
//!   approximation in a wavelet basis and compactness diagnostics.

pub mod algebra;
pub mod error;
pub mod grid;
pub mod linop;
pub mod maximal;
pub mod multipliers;
pub mod randomized;
pub mod rng;
pub mod spaces;
pub mod wavelets;

mod par;

pub use error::{LabError, Result};
pub use grid::{Grid, SampledFunction};
pub use linop::LinearOperator;
pub use num_complex::Complex64;
pub use spaces::SpaceSpec;
