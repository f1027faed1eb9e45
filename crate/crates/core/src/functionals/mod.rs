//! The five density functionals, their functional derivatives, and their
//! declared homogeneity / invariance degrees.
//!
//! | functional | `p(m)`       | `m₀`  |
//! |------------|--------------|-------|
//! | `N_e`      | `m − 3`      | 3     |
//! | `E_ext`    | `m − 2`      | 2     |
//! | `E_H`      | `2m − 5`     | 5/2   |
//! | `T_vW`     | `m − 1`      | 1     |
//! | `T_TF`     | `(5/3)m − 3` | 9/5   |
//!
//! Everything is in hartree atomic units.

mod bump;
mod energy_density;

use alloc::string::String;
use core::f64::consts::PI;

pub use bump::{fd_functional_derivative, Perturbed, RadialBump};
pub use energy_density::{
    energy_density, Dependence, EnergyDensity, OnePointArgs, OnePointDensity, TwoPointArgs, TwoPointDensity,
};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::vec3::{self, norm, sub, Point};

/// Thomas–Fermi constant `(3/10)(3π²)^{2/3}`.
pub const C_TF: f64 = 2.871_234_000_188_191;

/// `p(m) = q·m + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineDegree {
    pub q: f64,
    pub k: f64,
}

impl AffineDegree {
    pub fn at(&self, m: f64) -> f64 {
        self.q * m + self.k
    }

    /// Root `−k/q`; `None` when `q = 0`.
    pub fn root(&self) -> Option<f64> {
        (self.q != 0.0).then(|| -self.k / self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalKind {
    NumberOfElectrons,
    /// Point nucleus of charge `z` at the origin.
    ExternalCoulomb {
        z: f64,
    },
    Hartree,
    ThomasFermi,
    VonWeizsaecker,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalSpec {
    kind: FunctionalKind,
    declared_p: AffineDegree,
}

impl FunctionalSpec {
    pub fn new(kind: FunctionalKind) -> Result<Self> {
        let (q, k) = match kind {
            FunctionalKind::NumberOfElectrons => (1.0, -3.0),
            FunctionalKind::ExternalCoulomb { z } => {
                if !(z.is_finite() && z > 0.0) {
                    return Err(Error::InvalidDensity(alloc::format!(
                        "nuclear charge must be finite and > 0, got {z}"
                    )));
                }
                (1.0, -2.0)
            }
            FunctionalKind::Hartree => (2.0, -5.0),
            FunctionalKind::ThomasFermi => (5.0 / 3.0, -3.0),
            FunctionalKind::VonWeizsaecker => (1.0, -1.0),
        };
        Ok(Self { kind, declared_p: AffineDegree { q, k } })
    }

    pub fn number() -> Self {
        Self::new(FunctionalKind::NumberOfElectrons).expect("valid")
    }

    pub fn external(z: f64) -> Result<Self> {
        Self::new(FunctionalKind::ExternalCoulomb { z })
    }

    pub fn hartree() -> Self {
        Self::new(FunctionalKind::Hartree).expect("valid")
    }

    pub fn thomas_fermi() -> Self {
        Self::new(FunctionalKind::ThomasFermi).expect("valid")
    }

    pub fn von_weizsaecker() -> Self {
        Self::new(FunctionalKind::VonWeizsaecker).expect("valid")
    }

    /// All five, with `E_ext` at charge `z`.
    pub fn all(z: f64) -> Result<[Self; 5]> {
        Ok([Self::number(), Self::external(z)?, Self::hartree(), Self::von_weizsaecker(), Self::thomas_fermi()])
    }

    pub fn kind(&self) -> FunctionalKind {
        self.kind
    }

    pub fn declared_p(&self) -> AffineDegree {
        self.declared_p
    }

    pub fn declared_m0(&self) -> f64 {
        self.declared_p.root().expect("every built-in functional has q != 0")
    }

    /// Name as used on the command line: `ne`, `ext(z=…)`, `hartree`, `tf`, `vw`.
    pub fn label(&self) -> String {
        match self.kind {
            FunctionalKind::NumberOfElectrons => "ne".into(),
            FunctionalKind::ExternalCoulomb { z } => alloc::format!("ext(z={z})"),
            FunctionalKind::Hartree => "hartree".into(),
            FunctionalKind::ThomasFermi => "tf".into(),
            FunctionalKind::VonWeizsaecker => "vw".into(),
        }
    }

    pub fn is_local(&self) -> bool {
        !matches!(self.kind, FunctionalKind::Hartree)
    }
}

/// How [`evaluate_energy`] integrates over space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyPath {
    /// Radial for spherically symmetric densities, box otherwise.
    #[default]
    Auto,
    Radial,
    /// Tensor box quadrature; six-dimensional pair quadrature for Hartree.
    Box,
}

fn resolve_path<D: Density + ?Sized>(density: &D, path: EnergyPath) -> Result<EnergyPath> {
    match path {
        EnergyPath::Auto if density.is_spherical() => Ok(EnergyPath::Radial),
        EnergyPath::Auto => Ok(EnergyPath::Box),
        EnergyPath::Radial if !density.is_spherical() => Err(Error::UnsupportedPath(
            "radial quadrature requires a density spherically symmetric about the origin".into(),
        )),
        p => Ok(p),
    }
}

pub(crate) fn radial_extent<D: Density + ?Sized>(density: &D, quad: &Quadrature) -> f64 {
    quad.spec().radial.r_max.unwrap_or_else(|| density.tail_radius(quad.tail_tolerance()))
}

pub(crate) fn box_extent<D: Density + ?Sized>(density: &D, quad: &Quadrature) -> (Point, Point) {
    quad.spec().cube.bounds.unwrap_or_else(|| density.bounding_box(quad.tail_tolerance()))
}

/// Integrates a pointwise quantity over all space, radially (along +x)
/// for spherical densities or on the box otherwise.
pub(crate) fn integrate_space<D: Density + ?Sized>(
    density: &D,
    quad: &Quadrature,
    path: EnergyPath,
    mut g: impl FnMut(Point) -> Result<f64>,
) -> Result<f64> {
    let mut failure = None;
    let mut wrap = |p: Point| match g(p) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let out = match resolve_path(density, path)? {
        EnergyPath::Radial => {
            let r_max = radial_extent(density, quad);
            quad.radial(r_max, &density.radial_breakpoints(), |r| wrap([r, 0.0, 0.0]))
        }
        _ => {
            let (lo, hi) = box_extent(density, quad);
            quad.cube(lo, hi, wrap)
        }
    };
    match failure {
        Some(e) => Err(e),
        None => out,
    }
}

pub fn evaluate_energy<D: Density + ?Sized>(
    spec: &FunctionalSpec,
    density: &D,
    quad: &Quadrature,
    path: EnergyPath,
) -> Result<f64> {
    match energy_density(spec) {
        EnergyDensity::OnePoint(ed) => {
            integrate_space(density, quad, path, |x| Ok(ed.value(&OnePointArgs::at(density, x))))
        }
        EnergyDensity::TwoPoint(_) => match resolve_path(density, path)? {
            EnergyPath::Radial => hartree_energy_radial(density, quad),
            _ => hartree_energy_pairs(density, quad),
        },
    }
}

/// `v_H(|r|) = 4π[(1/r)∫₀^r n s² ds + ∫_r^R n s ds]` for a spherical density.
pub fn hartree_potential<D: Density + ?Sized>(density: &D, r: f64, quad: &Quadrature) -> Result<f64> {
    if !density.is_spherical() {
        return Err(Error::UnsupportedPath(
            "the radial Hartree potential requires a spherically symmetric density".into(),
        ));
    }
    let r_max = radial_extent(density, quad);
    let breaks = density.radial_breakpoints();
    hartree_potential_on(density, r.abs(), r_max, &breaks, quad)
}

fn hartree_potential_on<D: Density + ?Sized>(
    density: &D,
    r: f64,
    r_max: f64,
    breaks: &[f64],
    quad: &Quadrature,
) -> Result<f64> {
    let n = |s: f64| density.value([s, 0.0, 0.0]);
    let inner = if r > 0.0 { quad.radial_range(0.0, r.min(r_max), r_max, breaks, |s| n(s) * s * s)? / r } else { 0.0 };
    let outer = quad.radial_range(r, r_max, r_max, breaks, |s| n(s) * s)?;
    Ok(4.0 * PI * (inner + outer))
}

fn hartree_energy_radial<D: Density + ?Sized>(density: &D, quad: &Quadrature) -> Result<f64> {
    let r_max = radial_extent(density, quad);
    let breaks = density.radial_breakpoints();
    let mut failure = None;
    let total = quad.radial(r_max, &breaks, |r| match hartree_potential_on(density, r, r_max, &breaks, quad) {
        Ok(v) => density.value([r, 0.0, 0.0]) * v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(0.5 * total),
    }
}

/// `½ ∫∫ n(r) n(r') / |r − r'|` by direct six-dimensional quadrature on
/// two interleaved tensor grids. Low accuracy (~1e-3); only meant as an
/// independent check of the radial route.
fn hartree_energy_pairs<D: Density + ?Sized>(density: &D, quad: &Quadrature) -> Result<f64> {
    let (lo, hi) =
        quad.spec().cube.bounds.unwrap_or_else(|| density.bounding_box(quad.spec().cube.pair_tail_tolerance));
    let (first, second) = quad.pair_grids(lo, hi);
    let weighted = |grid: alloc::vec::Vec<(Point, f64)>| -> alloc::vec::Vec<(Point, f64)> {
        grid.into_iter().map(|(p, w)| (p, w * density.value(p))).collect()
    };
    let first = weighted(first);
    let second = weighted(second);
    let mut total = 0.0;
    for &(p, a) in &first {
        let mut row = 0.0;
        for &(q, b) in &second {
            let d = norm(sub(p, q));
            if d == 0.0 {
                return Err(Error::CoincidentPair(p));
            }
            row += b / d;
        }
        total += a * row;
    }
    Ok(0.5 * total)
}

/// `δF/δn` at `r`.
pub fn functional_derivative<D: Density + ?Sized>(
    spec: &FunctionalSpec,
    density: &D,
    r: Point,
    quad: &Quadrature,
) -> Result<f64> {
    if !vec3::is_finite(r) {
        return Err(Error::NonFinitePoint(r));
    }
    let n = density.value(r);
    let needs_positive = matches!(spec.kind, FunctionalKind::ThomasFermi | FunctionalKind::VonWeizsaecker);
    if needs_positive && n <= 0.0 {
        return Err(Error::InvalidSample { point: r, reason: "density must be > 0" });
    }
    match spec.kind {
        FunctionalKind::NumberOfElectrons => Ok(1.0),
        FunctionalKind::ExternalCoulomb { z } => {
            let s = norm(r);
            if s == 0.0 {
                return Err(Error::SingularPoint(r));
            }
            Ok(-z / s)
        }
        FunctionalKind::Hartree => hartree_potential(density, norm(r), quad),
        FunctionalKind::ThomasFermi => Ok(5.0 / 3.0 * C_TF * libm::cbrt(n * n)),
        FunctionalKind::VonWeizsaecker => {
            let g = density.gradient(r);
            Ok(vec3::dot(g, g) / (8.0 * n * n) - density.laplacian(r) / (4.0 * n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{scale_density, DensityModel};
    use crate::quadrature::QuadratureSpec;

    fn quad() -> Quadrature {
        QuadratureSpec::default().build().unwrap()
    }

    fn gauss(n: f64, alpha: f64) -> DensityModel {
        DensityModel::gaussian(n, alpha).unwrap()
    }

    #[test]
    fn c_tf_matches_formula() {
        let c = 0.3 * libm::pow(3.0 * PI * PI, 2.0 / 3.0);
        assert!((C_TF - c).abs() < 1e-15);
        assert!((C_TF - 2.871234).abs() < 1e-6);
    }

    #[test]
    fn declared_degrees() {
        let cases = [
            (FunctionalSpec::number(), 1.0, -3.0, 3.0),
            (FunctionalSpec::external(1.0).unwrap(), 1.0, -2.0, 2.0),
            (FunctionalSpec::hartree(), 2.0, -5.0, 2.5),
            (FunctionalSpec::von_weizsaecker(), 1.0, -1.0, 1.0),
            (FunctionalSpec::thomas_fermi(), 5.0 / 3.0, -3.0, 1.8),
        ];
        for (spec, q, k, m0) in cases {
            assert_eq!(spec.declared_p(), AffineDegree { q, k });
            assert!((spec.declared_m0() - m0).abs() < 1e-15);
            assert!(spec.declared_p().at(spec.declared_m0()).abs() < 1e-15);
        }
    }

    #[test]
    fn external_charge_validated() {
        assert!(FunctionalSpec::external(0.0).is_err());
        assert!(FunctionalSpec::external(f64::INFINITY).is_err());
    }

    #[test]
    fn energies_on_unit_gaussian() {
        let q = quad();
        let d = gauss(1.0, 1.0);
        let e = |s: FunctionalSpec| evaluate_energy(&s, &d, &q, EnergyPath::Auto).unwrap();
        assert!((e(FunctionalSpec::von_weizsaecker()) - 0.75).abs() < 1e-10);
        let tf = C_TF / PI * libm::pow(0.6, 1.5);
        assert!((e(FunctionalSpec::thomas_fermi()) - tf).abs() < 1e-10);
        assert!((tf - 0.42476).abs() < 1e-5);
        let eh = libm::sqrt(1.0 / (2.0 * PI));
        assert!((e(FunctionalSpec::hartree()) - eh).abs() < 1e-10);
        assert!((eh - 0.398942).abs() < 1e-6);
        let ext = -2.0 * libm::sqrt(1.0 / PI);
        assert!((e(FunctionalSpec::external(1.0).unwrap()) - ext).abs() < 1e-10);
    }

    #[test]
    fn electron_count() {
        let q = quad();
        let d = gauss(2.5, 0.7);
        let n = evaluate_energy(&FunctionalSpec::number(), &d, &q, EnergyPath::Auto).unwrap();
        assert!((n - 2.5).abs() < 1e-12);
    }

    #[test]
    fn radial_path_rejected_for_anisotropic_density() {
        let q = quad();
        let d = DensityModel::anisotropic(1.0, [1.0, 2.0, 0.5]).unwrap();
        let err = evaluate_energy(&FunctionalSpec::hartree(), &d, &q, EnergyPath::Radial).unwrap_err();
        assert!(matches!(err, Error::UnsupportedPath(_)));
    }

    #[test]
    fn slater_closed_forms() {
        // T_vW = ζ²N/2, E_ext = −ZζN, E_H = (5/16)ζN² for the 1s density.
        let q = quad();
        let d = DensityModel::slater(1.0, 1.3).unwrap();
        let e = |s: FunctionalSpec| evaluate_energy(&s, &d, &q, EnergyPath::Auto).unwrap();
        assert!((e(FunctionalSpec::von_weizsaecker()) - 0.5 * 1.69).abs() < 1e-10);
        assert!((e(FunctionalSpec::external(2.0).unwrap()) + 2.0 * 1.3).abs() < 1e-10);
        assert!((e(FunctionalSpec::hartree()) - 5.0 / 16.0 * 1.3).abs() < 1e-10);
    }

    #[test]
    fn box_path_agrees_with_radial_for_local_functionals() {
        let q = quad();
        let d = gauss(1.0, 1.0);
        for spec in [FunctionalSpec::number(), FunctionalSpec::thomas_fermi(), FunctionalSpec::von_weizsaecker()] {
            let r = evaluate_energy(&spec, &d, &q, EnergyPath::Radial).unwrap();
            let b = evaluate_energy(&spec, &d, &q, EnergyPath::Box).unwrap();
            assert!((r - b).abs() < 1e-8 * r.abs(), "{}: {r} vs {b}", spec.label());
        }
    }

    #[test]
    fn hartree_pair_quadrature_sanity() {
        let q = quad();
        let d = gauss(1.0, 1.0);
        let radial = evaluate_energy(&FunctionalSpec::hartree(), &d, &q, EnergyPath::Radial).unwrap();
        let pairs = evaluate_energy(&FunctionalSpec::hartree(), &d, &q, EnergyPath::Box).unwrap();
        assert!((radial - pairs).abs() < 1e-2 * radial, "{radial} vs {pairs}");
    }

    #[test]
    fn hartree_potential_of_gaussian_is_erf_over_r() {
        let q = quad();
        let alpha = 1.3;
        let d = gauss(1.0, alpha);
        for r in [0.05, 0.5, 1.0, 2.7] {
            let v = hartree_potential(&d, r, &q).unwrap();
            let want = libm::erf(libm::sqrt(alpha) * r) / r;
            assert!((v - want).abs() < 1e-11, "r={r}: {v} vs {want}");
        }
        let v0 = hartree_potential(&d, 0.0, &q).unwrap();
        assert!((v0 - 2.0 * libm::sqrt(alpha / PI)).abs() < 1e-11);
    }

    #[test]
    fn functional_derivatives() {
        let q = quad();
        let d = gauss(1.0, 1.0);
        let r = [0.2, -0.4, 0.5];
        assert_eq!(functional_derivative(&FunctionalSpec::number(), &d, r, &q).unwrap(), 1.0);
        let ext = functional_derivative(&FunctionalSpec::external(1.0).unwrap(), &d, r, &q).unwrap();
        assert!((ext + 1.0 / norm(r)).abs() < 1e-15);
        let tf0 = functional_derivative(&FunctionalSpec::thomas_fermi(), &d, [0.0; 3], &q).unwrap();
        assert!((tf0 - 5.0 / 3.0 * C_TF / PI).abs() < 1e-12);
        assert!((tf0 - 1.523).abs() < 1e-3);
        // vW on a Gaussian: 3α/2 − α²r²/2.
        let vw = functional_derivative(&FunctionalSpec::von_weizsaecker(), &d, r, &q).unwrap();
        assert!((vw - (1.5 - 0.5 * vec3::dot(r, r))).abs() < 1e-12);
    }

    #[test]
    fn external_derivative_singular_at_origin() {
        let q = quad();
        let d = gauss(1.0, 1.0);
        let err = functional_derivative(&FunctionalSpec::external(1.0).unwrap(), &d, [0.0; 3], &q).unwrap_err();
        assert!(matches!(err, Error::SingularPoint(_)));
    }

    #[test]
    fn hartree_scaled_density_uses_scaled_extent() {
        let q = quad();
        let d = gauss(1.0, 1.0);
        let s = scale_density(&d, 2.0, 1.0).unwrap();
        let base = evaluate_energy(&FunctionalSpec::hartree(), &d, &q, EnergyPath::Auto).unwrap();
        let scaled = evaluate_energy(&FunctionalSpec::hartree(), &s, &q, EnergyPath::Auto).unwrap();
        assert!((scaled - libm::pow(2.0, -3.0) * base).abs() < 1e-12 * base);
    }
}
