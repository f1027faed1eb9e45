//! Energy densities `f` with separated argument slots: density values,
//! density gradients, and explicit coordinates.
//!
//! Partial derivatives act on one slot with the others frozen. The
//! "coordinate divergence" `∇ₓ·[x f]` differentiates only the explicit
//! coordinate dependence, with the density slots held fixed.

use crate::density::Density;
use crate::vec3::{dot, norm, scale, sub, Point};

use super::{FunctionalKind, FunctionalSpec, C_TF};

/// Argument slots of a one-point energy density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnePointArgs {
    pub n: f64,
    pub grad: Point,
    pub x: Point,
}

impl OnePointArgs {
    pub fn at<D: Density + ?Sized>(density: &D, x: Point) -> Self {
        Self { n: density.value(x), grad: density.gradient(x), x }
    }
}

/// Which slots an energy density reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dependence {
    pub density: bool,
    pub gradient: bool,
    pub coordinates: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OnePointDensity {
    /// `n`
    Number,
    /// `−Z n / |x|`
    ExternalCoulomb { z: f64 },
    /// `c_TF n^{5/3}`
    ThomasFermi,
    /// `|∇n|² / (8n)`
    VonWeizsaecker,
    /// `C nᵉ`; synthetic density-only case.
    DensityPower { coefficient: f64, exponent: f64 },
    /// `|∇n|ᵉ`; synthetic gradient-only case.
    GradientPower { exponent: f64 },
}

impl OnePointDensity {
    pub fn dependence(&self) -> Dependence {
        let (density, gradient, coordinates) = match self {
            OnePointDensity::Number | OnePointDensity::ThomasFermi | OnePointDensity::DensityPower { .. } => {
                (true, false, false)
            }
            OnePointDensity::ExternalCoulomb { .. } => (true, false, true),
            OnePointDensity::VonWeizsaecker => (true, true, false),
            OnePointDensity::GradientPower { .. } => (false, true, false),
        };
        Dependence { density, gradient, coordinates }
    }

    pub fn value(&self, a: &OnePointArgs) -> f64 {
        match *self {
            OnePointDensity::Number => a.n,
            OnePointDensity::ExternalCoulomb { z } => -z * a.n / norm(a.x),
            OnePointDensity::ThomasFermi => C_TF * libm::pow(a.n, 5.0 / 3.0),
            OnePointDensity::VonWeizsaecker => dot(a.grad, a.grad) / (8.0 * a.n),
            OnePointDensity::DensityPower { coefficient, exponent } => coefficient * libm::pow(a.n, exponent),
            OnePointDensity::GradientPower { exponent } => libm::pow(norm(a.grad), exponent),
        }
    }

    /// `∂f/∂n`.
    pub fn d_density(&self, a: &OnePointArgs) -> f64 {
        match *self {
            OnePointDensity::Number => 1.0,
            OnePointDensity::ExternalCoulomb { z } => -z / norm(a.x),
            OnePointDensity::ThomasFermi => 5.0 / 3.0 * C_TF * libm::pow(a.n, 2.0 / 3.0),
            OnePointDensity::VonWeizsaecker => -dot(a.grad, a.grad) / (8.0 * a.n * a.n),
            OnePointDensity::DensityPower { coefficient, exponent } => {
                coefficient * exponent * libm::pow(a.n, exponent - 1.0)
            }
            OnePointDensity::GradientPower { .. } => 0.0,
        }
    }

    /// `∂f/∂(∂ᵢn)`.
    pub fn d_gradient(&self, a: &OnePointArgs) -> Point {
        match *self {
            OnePointDensity::VonWeizsaecker => scale(1.0 / (4.0 * a.n), a.grad),
            OnePointDensity::GradientPower { exponent } => {
                let g = norm(a.grad);
                scale(exponent * libm::pow(g, exponent - 2.0), a.grad)
            }
            _ => [0.0; 3],
        }
    }

    /// `∇ₓ·[x f]` at frozen density slots.
    pub fn coordinate_divergence(&self, a: &OnePointArgs) -> f64 {
        let f = self.value(a);
        match self {
            // x·∇(1/|x|) = −1/|x|
            OnePointDensity::ExternalCoulomb { .. } => 2.0 * f,
            _ => 3.0 * f,
        }
    }
}

/// Argument slots of a two-point energy density. Gradient slots are
/// omitted: the only two-point density here (Hartree) does not read them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointArgs {
    pub n1: f64,
    pub n2: f64,
    pub x1: Point,
    pub x2: Point,
}

impl TwoPointArgs {
    pub fn at<D: Density + ?Sized>(density: &D, x1: Point, x2: Point) -> Self {
        Self { n1: density.value(x1), n2: density.value(x2), x1, x2 }
    }

    pub fn swapped(&self) -> Self {
        Self { n1: self.n2, n2: self.n1, x1: self.x2, x2: self.x1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoPointDensity {
    /// `n(r) n(r') / (2|r − r'|)`
    Hartree,
}

impl TwoPointDensity {
    pub fn value(&self, a: &TwoPointArgs) -> f64 {
        0.5 * a.n1 * a.n2 / norm(sub(a.x1, a.x2))
    }

    /// `(∂f/∂n(r), ∂f/∂n(r'))`.
    pub fn d_densities(&self, a: &TwoPointArgs) -> (f64, f64) {
        let d = norm(sub(a.x1, a.x2));
        (0.5 * a.n2 / d, 0.5 * a.n1 / d)
    }

    /// `(∇_r·[r f], ∇_{r'}·[r' f])` at frozen density slots.
    pub fn coordinate_divergences(&self, a: &TwoPointArgs) -> (f64, f64) {
        let f = self.value(a);
        let sep = sub(a.x1, a.x2);
        let d2 = dot(sep, sep);
        (3.0 * f - f * dot(a.x1, sep) / d2, 3.0 * f + f * dot(a.x2, sep) / d2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyDensity {
    OnePoint(OnePointDensity),
    TwoPoint(TwoPointDensity),
}

impl EnergyDensity {
    pub fn is_two_point(&self) -> bool {
        matches!(self, EnergyDensity::TwoPoint(_))
    }
}

pub fn energy_density(spec: &FunctionalSpec) -> EnergyDensity {
    match spec.kind() {
        FunctionalKind::NumberOfElectrons => EnergyDensity::OnePoint(OnePointDensity::Number),
        FunctionalKind::ExternalCoulomb { z } => EnergyDensity::OnePoint(OnePointDensity::ExternalCoulomb { z }),
        FunctionalKind::Hartree => EnergyDensity::TwoPoint(TwoPointDensity::Hartree),
        FunctionalKind::ThomasFermi => EnergyDensity::OnePoint(OnePointDensity::ThomasFermi),
        FunctionalKind::VonWeizsaecker => EnergyDensity::OnePoint(OnePointDensity::VonWeizsaecker),
    }
}
