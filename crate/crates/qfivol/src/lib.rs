//! Monotone quantum Fisher information metrics and uncertainty volumes.
//!
//! The library works with faithful density matrices ρ on ℂⁿ and ordered lists
//! of self-adjoint observables A_1, …, A_N. For every normalized symmetric
//! operator monotone function f it provides:
//!
//! - the scalar Kubo–Ando mean m_f(x, y) and the superoperator m_f(L_ρ, R_ρ)
//!   acting entrywise in the eigenbasis of ρ,
//! - the quantum Fisher information inner product
//!   ⟨A, B⟩_{ρ,f} = Tr(A · m_f(L_ρ, R_ρ)⁻¹(B)) and the metric-adjusted skew
//!   information I_ρ^f(A) = (f(0)/2)⟨i[ρ,A], i[ρ,A]⟩_{ρ,f},
//! - Gram matrices of the symmetrized covariance and of the QFI side, their
//!   determinants and volumes, the gap F(f) = det Cov − det QFI, and the
//!   standard (Robertson) antisymmetric bound det{−(i/2)Tr(ρ[A_h, A_j])},
//! - an independent combinatorial brute-force evaluation of F(f) used as an
//!   oracle for the determinant route,
//! - seeded random verification campaigns over all of the above, exposed
//!   through the `qfivol` CLI.
//!
//! Everything is dense, double precision, and deliberately desk-scale
//! (n ≤ 8 observable dimension, N ≤ 8 observables).

#![forbid(unsafe_code)]

pub mod campaign;
mod error;
pub mod metric;
pub mod monotone;
pub mod oracle;
pub mod report;
pub mod spectral;
pub mod volume;

pub use error::{Error, Result};

/// Complex double-precision scalar.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix used throughout.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense real matrix used for Gram and report matrices.
pub type RMat = nalgebra::DMatrix<f64>;
