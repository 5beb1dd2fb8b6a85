//! Discrete exterior calculus on a four-dimensional Minkowski lattice.
//!
//! The lattice is the tensor product of four one-dimensional complexes; a
//! cochain assigns a coefficient to every basis element `(direction set, site)`.
//! On top of the five core operators (coboundary, cup product, Hodge star,
//! indefinite inner product, codifferential) the crate builds the discrete
//! Dirac-Kähler equation, its Duffin decomposition, the massless limits with
//! their gauge transformations, a sparse operator assembler with dense
//! kernel/eigen solvers, and an explicit time-marching solver for Cauchy data.
//!
//! All operators are linear maps with integer stencil weights, so the whole
//! calculus is generic over the coefficient [`Scalar`]: exact identities run
//! over `i64` (or exact rationals), floating suites over `f64`, and spectral
//! work over `Complex64`.

pub mod assembly;
pub mod calculus;
pub mod chains;
pub mod dirac_kahler;
pub mod forms;
pub mod io;
pub mod lattice;
pub mod massless;
pub mod scalar;

mod error;

pub use error::{Error, Result};
pub use lattice::{BoundaryMode, DirectionSet, Domain, MultiIndex};
pub use scalar::Scalar;

pub use num_complex::Complex64;

/// Complex numbers with exact rational components.
///
/// Every `f64` embeds exactly, so identities that are algebraic (such as the
/// Duffin recomposition) can be verified without rounding on data that
/// originated from a floating-point eigensolver.
pub type ExactComplex = num_complex::Complex<num_rational::BigRational>;

/// Integer-coefficient form, used by the exact identity suites.
pub type FormI = forms::Form<i64>;
/// Real-coefficient form.
pub type FormF = forms::Form<f64>;
/// Complex-coefficient form, used by spectral constructions.
pub type FormC = forms::Form<Complex64>;
/// Exact-rational-complex form.
pub type FormQ = forms::Form<ExactComplex>;

/// Integer-coefficient inhomogeneous form.
pub type InhomI = forms::InhomogeneousForm<i64>;
/// Real-coefficient inhomogeneous form.
pub type InhomF = forms::InhomogeneousForm<f64>;
/// Complex-coefficient inhomogeneous form.
pub type InhomC = forms::InhomogeneousForm<Complex64>;
/// Exact-rational-complex inhomogeneous form.
pub type InhomQ = forms::InhomogeneousForm<ExactComplex>;
