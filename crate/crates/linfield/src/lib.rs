//! Numerics for linearized fermionic field equations in Minkowski space.
//!
//! The library works with distributions supported on mass shells and light
//! cones in four-dimensional momentum space (signature `+---`). Its core
//! objects are:
//!
//! * shell kernels `T^[n]` (delta layers, their derivatives, and the regular
//!   powers of `p^2 - m^2` above the shell) together with the antisymmetric
//!   cone combination `K_0`,
//! * the regularized Dirac-sea projector built from one or three mass shells,
//! * first-order perturbations of the sea by nonlocal potentials ("jets"),
//!   in both their pole form and the equivalent line-integral form,
//! * line-integral expansions of products shell * smooth * cone into kernel
//!   series along the mass cone, with truncation-error bookkeeping,
//! * the position-space Green-family calculus on the light cone,
//! * direction-dependent phase compensation that cancels the leading
//!   singular behavior of a perturbation on deep frequency slices,
//! * an energy scalar product for harmonic slice fields and the induced
//!   positive semidefinite bilinear form, and
//! * construction of homogeneous solutions concentrated in a narrow momentum
//!   cone, with per-order corrections solved mode by mode.
//!
//! All quadrature is deterministic; random inputs appear only in tests and
//! are seeded there.

pub mod dirac_sea;
pub mod kernels;
pub mod minkowski;
pub mod quad;
pub mod ylm;

pub use minkowski::{C64, FourVector, SpinMatrix};
