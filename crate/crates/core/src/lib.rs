//! Frame, exact-frame and orthonormality analysis for families of integer-spaced
//! translates `(τ_{nb} φ)_{n ∈ Λ}` of a single generator in `L²(ℝ)`.
//!
//! The generator is described on the Fourier side by a [`FourierProfile`]
//! (piecewise constant, affine or sampled `φ̂`) or on the time side by a
//! [`TimeEnvelope`] decay majorant. Two independent routes decide frame
//! properties and are expected to agree:
//!
//! * the periodization `Φ_b(ξ) = Σ_n |φ̂((ξ+n)/b)|²` on the circle, whose
//!   essential range and zero set give the frame bounds of the full lattice
//!   ([`periodization`], [`classify`]);
//! * finite Gram matrices of the translates, whose extremal eigenvalues
//!   estimate the bounds on windows of `Λ` ([`gram`]).
//!
//! Density tests for arbitrary translation sets live in [`sets`], small-value
//! set coverings and trigonometric-polynomial inequalities in [`hausdorff`],
//! and the explicit example generators in [`constructions`].
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! command line front end live in the `frameseq` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;

pub mod classify;
pub mod constructions;
pub mod gram;
pub mod hausdorff;
pub mod periodization;
pub mod quad;
pub mod rng;
pub mod sets;
pub mod spectrum;

pub use classify::{classify, Budgets, Classification, Evidence, FrameReport};
pub use error::{Error, Result};
pub use gram::{build_gram, FrameBounds, GramOperator, GramOptions};
pub use num_complex::Complex64;
pub use periodization::{periodize, EssentialBounds, PeriodizedSpectrum};
pub use sets::{RealizedSet, TranslationSet};
pub use spectrum::{FourierProfile, Piece, RateFunction, Shape, TimeEnvelope};
