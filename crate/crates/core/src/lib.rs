//! Numerical laboratory for homogeneous coordinate scaling of electron
//! densities, `n_{λm}(r) = λ^m n(λr)`.
//!
//! The crate evaluates a small family of density functionals (electron
//! count, external Coulomb energy, Hartree energy, Thomas–Fermi and
//! von Weizsäcker kinetic energies) on analytic densities, recovers their
//! homogeneity degree `p(m)` and invariance degree `m₀` by regression, and
//! checks the pointwise local-invariance equations their energy densities
//! satisfy.
//!
//! The crate is `no_std` and only needs `alloc`. Enable the `std` feature
//! to pull in `std` (nothing else changes).

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: NaN must fail positivity guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod density;
mod error;
pub mod functionals;
pub mod local;
pub mod quadrature;
pub mod sampling;
pub mod scaling;
pub mod vec3;

pub use density::{
    check_scaling_identities, evaluate, scale_density, Density, DensityModel, DensityPoint, GaussianTerm,
    ScaledDensity, ScalingIdentityResidual, ScalingParams,
};
pub use error::{Error, Result};
pub use functionals::{
    energy_density, evaluate_energy, fd_functional_derivative, functional_derivative, AffineDegree, EnergyDensity,
    EnergyPath, FunctionalKind, FunctionalSpec, OnePointDensity, TwoPointDensity, C_TF,
};
pub use local::{EquationId, ResidualReport};
pub use quadrature::{BoxSpec, GaussLegendre, Quadrature, QuadratureSpec, RadialSpec};
pub use scaling::{HomogeneityFit, InvarianceResult};
pub use vec3::Point;
