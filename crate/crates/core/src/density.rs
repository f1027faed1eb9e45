//! Analytic electron densities and the homogeneous scaling operator
//! `n_{λm}(r) = λ^m n(λr)`.
//!
//! Every density exposes exact value, gradient and Hessian, so the
//! residuals computed downstream are limited by arithmetic rather than by
//! sampling. Lengths are in bohr and densities in electrons/bohr³.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vec3::{self, dot, norm, scale, sub, trace, Matrix3, Point};

/// A strictly positive, decaying electron density with exact derivatives.
pub trait Density {
    fn value(&self, r: Point) -> f64;
    fn gradient(&self, r: Point) -> Point;
    fn hessian(&self, r: Point) -> Matrix3;

    fn laplacian(&self, r: Point) -> f64 {
        trace(&self.hessian(r))
    }

    /// Spherically symmetric about the origin.
    fn is_spherical(&self) -> bool;

    /// Electron count `∫ n d³r`, known in closed form.
    fn analytic_norm(&self) -> f64;

    /// Radius past which radial integrals are truncated; `n(R)·R²` is
    /// below `tol` there (for scaled densities the radius of the base is
    /// divided by `λ`, so quadrature nodes map exactly under scaling).
    fn tail_radius(&self, tol: f64) -> f64;

    /// Box outside which the density is negligible, same convention as
    /// [`Density::tail_radius`].
    fn bounding_box(&self, tol: f64) -> (Point, Point);

    /// Radii at which radial quadrature panels should be split.
    fn radial_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<D: Density + ?Sized> Density for &D {
    fn value(&self, r: Point) -> f64 {
        (**self).value(r)
    }
    fn gradient(&self, r: Point) -> Point {
        (**self).gradient(r)
    }
    fn hessian(&self, r: Point) -> Matrix3 {
        (**self).hessian(r)
    }
    fn laplacian(&self, r: Point) -> f64 {
        (**self).laplacian(r)
    }
    fn is_spherical(&self) -> bool {
        (**self).is_spherical()
    }
    fn analytic_norm(&self) -> f64 {
        (**self).analytic_norm()
    }
    fn tail_radius(&self, tol: f64) -> f64 {
        (**self).tail_radius(tol)
    }
    fn bounding_box(&self, tol: f64) -> (Point, Point) {
        (**self).bounding_box(tol)
    }
    fn radial_breakpoints(&self) -> Vec<f64> {
        (**self).radial_breakpoints()
    }
}

/// Value, gradient and Laplacian of a density at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPoint {
    pub value: f64,
    pub gradient: Point,
    pub laplacian: f64,
}

pub fn evaluate<D: Density + ?Sized>(density: &D, r: Point) -> Result<DensityPoint> {
    if !vec3::is_finite(r) {
        return Err(Error::NonFinitePoint(r));
    }
    Ok(DensityPoint { value: density.value(r), gradient: density.gradient(r), laplacian: density.laplacian(r) })
}

/// One normalized Gaussian, `weight · (α/π)^{3/2} exp(−α|r − c|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm {
    pub weight: f64,
    pub alpha: f64,
    pub center: Point,
}

impl GaussianTerm {
    fn prefactor(&self) -> f64 {
        self.weight * libm::pow(self.alpha / PI, 1.5)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityModel {
    GaussianMix(Vec<GaussianTerm>),
    /// `N·(ζ³/π)·exp(−2ζ|r|)`.
    Slater {
        electrons: f64,
        zeta: f64,
    },
    /// `w·∏ᵢ (aᵢ/π)^{1/2} exp(−aᵢ xᵢ²)`.
    AnisotropicGaussian {
        weight: f64,
        exponents: [f64; 3],
    },
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDensity(alloc::format!("{name} must be finite and > 0, got {x}")))
    }
}

impl DensityModel {
    /// Single Gaussian centered at the origin holding `electrons`.
    pub fn gaussian(electrons: f64, alpha: f64) -> Result<Self> {
        Self::gaussian_mix(alloc::vec![GaussianTerm { weight: electrons, alpha, center: [0.0; 3] }])
    }

    pub fn gaussian_mix(terms: Vec<GaussianTerm>) -> Result<Self> {
        let m = DensityModel::GaussianMix(terms);
        m.validate()?;
        Ok(m)
    }

    pub fn slater(electrons: f64, zeta: f64) -> Result<Self> {
        let m = DensityModel::Slater { electrons, zeta };
        m.validate()?;
        Ok(m)
    }

    pub fn anisotropic(weight: f64, exponents: [f64; 3]) -> Result<Self> {
        let m = DensityModel::AnisotropicGaussian { weight, exponents };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DensityModel::GaussianMix(terms) => {
                if terms.is_empty() {
                    return Err(Error::InvalidDensity("gaussian mixture needs at least one term".to_string()));
                }
                for t in terms {
                    positive("weight", t.weight)?;
                    positive("alpha", t.alpha)?;
                    if !vec3::is_finite(t.center) {
                        return Err(Error::InvalidDensity("center must be finite".to_string()));
                    }
                }
                Ok(())
            }
            DensityModel::Slater { electrons, zeta } => {
                positive("electron count", *electrons)?;
                positive("zeta", *zeta)
            }
            DensityModel::AnisotropicGaussian { weight, exponents } => {
                positive("weight", *weight)?;
                exponents.iter().try_for_each(|&a| positive("exponent", a))
            }
        }
    }
}

/// Largest `R ≥ peak` with `bound(R) ≥ tol`, to bisection precision;
/// `bound` must decrease past `peak`.
fn tail_solve(peak: f64, tol: f64, bound: impl Fn(f64) -> f64) -> f64 {
    let mut hi = peak.max(1e-3);
    let mut n = 0;
    while bound(hi) >= tol && n < 200 {
        hi *= 2.0;
        n += 1;
    }
    let mut lo = (hi * 0.5).max(peak);
    if bound(lo) < tol {
        return lo;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) >= tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

impl Density for DensityModel {
    fn value(&self, r: Point) -> f64 {
        match self {
            DensityModel::GaussianMix(terms) => terms
                .iter()
                .map(|t| {
                    let d = sub(r, t.center);
                    t.prefactor() * libm::exp(-t.alpha * dot(d, d))
                })
                .sum(),
            DensityModel::Slater { electrons, zeta } => {
                electrons * zeta * zeta * zeta / PI * libm::exp(-2.0 * zeta * norm(r))
            }
            DensityModel::AnisotropicGaussian { weight, exponents } => {
                let mut v = *weight;
                for i in 0..3 {
                    let a = exponents[i];
                    v *= libm::sqrt(a / PI) * libm::exp(-a * r[i] * r[i]);
                }
                v
            }
        }
    }

    fn gradient(&self, r: Point) -> Point {
        match self {
            DensityModel::GaussianMix(terms) => {
                let mut g = [0.0; 3];
                for t in terms {
                    let d = sub(r, t.center);
                    let v = t.prefactor() * libm::exp(-t.alpha * dot(d, d));
                    for i in 0..3 {
                        g[i] -= 2.0 * t.alpha * d[i] * v;
                    }
                }
                g
            }
            DensityModel::Slater { zeta, .. } => {
                let s = norm(r);
                if s == 0.0 {
                    // cusp: symmetric subgradient
                    return [0.0; 3];
                }
                scale(-2.0 * zeta * self.value(r) / s, r)
            }
            DensityModel::AnisotropicGaussian { exponents, .. } => {
                let v = self.value(r);
                core::array::from_fn(|i| -2.0 * exponents[i] * r[i] * v)
            }
        }
    }

    fn hessian(&self, r: Point) -> Matrix3 {
        let mut h = [[0.0; 3]; 3];
        match self {
            DensityModel::GaussianMix(terms) => {
                for t in terms {
                    let d = sub(r, t.center);
                    let v = t.prefactor() * libm::exp(-t.alpha * dot(d, d));
                    let a = t.alpha;
                    for i in 0..3 {
                        for j in 0..3 {
                            let delta = if i == j { 1.0 } else { 0.0 };
                            h[i][j] += v * (4.0 * a * a * d[i] * d[j] - 2.0 * a * delta);
                        }
                    }
                }
            }
            DensityModel::Slater { zeta, .. } => {
                let s = norm(r);
                if s == 0.0 {
                    for (i, row) in h.iter_mut().enumerate() {
                        row[i] = f64::NEG_INFINITY;
                    }
                    return h;
                }
                let v = self.value(r);
                let u = scale(1.0 / s, r);
                for i in 0..3 {
                    for j in 0..3 {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        h[i][j] = v * (4.0 * zeta * zeta * u[i] * u[j] - 2.0 * zeta / s * (delta - u[i] * u[j]));
                    }
                }
            }
            DensityModel::AnisotropicGaussian { exponents, .. } => {
                let v = self.value(r);
                let a = exponents;
                for i in 0..3 {
                    for j in 0..3 {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        h[i][j] = v * (4.0 * a[i] * a[j] * r[i] * r[j] - 2.0 * a[i] * delta);
                    }
                }
            }
        }
        h
    }

    fn laplacian(&self, r: Point) -> f64 {
        match self {
            DensityModel::Slater { zeta, .. } => {
                let s = norm(r);
                if s == 0.0 {
                    return f64::NEG_INFINITY;
                }
                self.value(r) * (4.0 * zeta * zeta - 4.0 * zeta / s)
            }
            _ => trace(&self.hessian(r)),
        }
    }

    fn is_spherical(&self) -> bool {
        match self {
            DensityModel::GaussianMix(terms) => terms.iter().all(|t| t.center == [0.0; 3]),
            DensityModel::Slater { .. } => true,
            DensityModel::AnisotropicGaussian { exponents, .. } => {
                exponents[0] == exponents[1] && exponents[1] == exponents[2]
            }
        }
    }

    fn analytic_norm(&self) -> f64 {
        match self {
            DensityModel::GaussianMix(terms) => terms.iter().map(|t| t.weight).sum(),
            DensityModel::Slater { electrons, .. } => *electrons,
            DensityModel::AnisotropicGaussian { weight, .. } => *weight,
        }
    }

    fn tail_radius(&self, tol: f64) -> f64 {
        match self {
            DensityModel::GaussianMix(terms) => {
                let peak = terms.iter().map(|t| norm(t.center) + 1.0 / libm::sqrt(t.alpha)).fold(0.0, f64::max);
                tail_solve(peak, tol, |big_r| {
                    terms
                        .iter()
                        .map(|t| {
                            let gap = (big_r - norm(t.center)).max(0.0);
                            t.prefactor() * libm::exp(-t.alpha * gap * gap) * big_r * big_r
                        })
                        .sum()
                })
            }
            DensityModel::Slater { electrons, zeta } => {
                let pre = electrons * zeta * zeta * zeta / PI;
                tail_solve(1.0 / zeta, tol, |big_r| pre * libm::exp(-2.0 * zeta * big_r) * big_r * big_r)
            }
            DensityModel::AnisotropicGaussian { weight, exponents } => {
                let a_min = exponents.iter().copied().fold(f64::INFINITY, f64::min);
                let pre = weight * exponents.iter().map(|a| libm::sqrt(a / PI)).product::<f64>();
                tail_solve(1.0 / libm::sqrt(a_min), tol, |big_r| {
                    pre * libm::exp(-a_min * big_r * big_r) * big_r * big_r
                })
            }
        }
    }

    fn bounding_box(&self, tol: f64) -> (Point, Point) {
        match self {
            DensityModel::GaussianMix(terms) => {
                let mut lo = [f64::INFINITY; 3];
                let mut hi = [f64::NEG_INFINITY; 3];
                for t in terms {
                    let pre = t.prefactor();
                    let reach =
                        tail_solve(1.0 / libm::sqrt(t.alpha), tol, |x| pre * libm::exp(-t.alpha * x * x) * x * x);
                    for i in 0..3 {
                        lo[i] = lo[i].min(t.center[i] - reach);
                        hi[i] = hi[i].max(t.center[i] + reach);
                    }
                }
                (lo, hi)
            }
            DensityModel::Slater { .. } => {
                let r = self.tail_radius(tol);
                ([-r; 3], [r; 3])
            }
            DensityModel::AnisotropicGaussian { weight, exponents } => {
                let pre = weight * exponents.iter().map(|a| libm::sqrt(a / PI)).product::<f64>();
                let reach: [f64; 3] = core::array::from_fn(|i| {
                    let a = exponents[i];
                    tail_solve(1.0 / libm::sqrt(a), tol, |x| pre * libm::exp(-a * x * x) * x * x)
                });
                (core::array::from_fn(|i| -reach[i]), reach)
            }
        }
    }
}

/// Strength `λ > 0` and degree `m` of a homogeneous coordinate scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams {
    lambda: f64,
    m: f64,
}

impl ScalingParams {
    pub fn new(lambda: f64, m: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidScaling(lambda));
        }
        if !m.is_finite() {
            return Err(Error::InvalidDensity(alloc::format!("scaling degree must be finite, got {m}")));
        }
        Ok(Self { lambda, m })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m(&self) -> f64 {
        self.m
    }
}

/// `λ^m · base(λr)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledDensity<D = DensityModel> {
    base: D,
    scaling: ScalingParams,
}

pub fn scale_density<D: Density>(base: D, lambda: f64, m: f64) -> Result<ScaledDensity<D>> {
    Ok(ScaledDensity { base, scaling: ScalingParams::new(lambda, m)? })
}

impl<D: Density> ScaledDensity<D> {
    pub fn new(base: D, scaling: ScalingParams) -> Self {
        Self { base, scaling }
    }

    pub fn base(&self) -> &D {
        &self.base
    }

    pub fn scaling(&self) -> ScalingParams {
        self.scaling
    }

    /// Scales again by `lambda` at the same degree; composes to `λ₁λ₂`.
    pub fn rescale(self, lambda: f64) -> Result<Self> {
        let scaling = ScalingParams::new(self.scaling.lambda * lambda, self.scaling.m)?;
        Ok(Self { base: self.base, scaling })
    }

    /// Same base, different `λ` (degree kept).
    pub fn with_lambda(&self, lambda: f64) -> Result<ScaledDensity<&D>> {
        scale_density(&self.base, lambda, self.scaling.m)
    }

    fn factor(&self, extra: i32) -> f64 {
        libm::pow(self.scaling.lambda, self.scaling.m + extra as f64)
    }

    fn inner(&self, r: Point) -> Point {
        scale(self.scaling.lambda, r)
    }
}

impl<D: Density> Density for ScaledDensity<D> {
    fn value(&self, r: Point) -> f64 {
        self.factor(0) * self.base.value(self.inner(r))
    }

    fn gradient(&self, r: Point) -> Point {
        scale(self.factor(1), self.base.gradient(self.inner(r)))
    }

    fn hessian(&self, r: Point) -> Matrix3 {
        vec3::scale_mat(self.factor(2), &self.base.hessian(self.inner(r)))
    }

    fn laplacian(&self, r: Point) -> f64 {
        self.factor(2) * self.base.laplacian(self.inner(r))
    }

    fn is_spherical(&self) -> bool {
        self.base.is_spherical()
    }

    fn analytic_norm(&self) -> f64 {
        self.factor(-3) * self.base.analytic_norm()
    }

    fn tail_radius(&self, tol: f64) -> f64 {
        self.base.tail_radius(tol) / self.scaling.lambda
    }

    fn bounding_box(&self, tol: f64) -> (Point, Point) {
        let (lo, hi) = self.base.bounding_box(tol);
        let inv = 1.0 / self.scaling.lambda;
        (scale(inv, lo), scale(inv, hi))
    }

    fn radial_breakpoints(&self) -> Vec<f64> {
        let inv = 1.0 / self.scaling.lambda;
        self.base.radial_breakpoints().into_iter().map(|b| b * inv).collect()
    }
}

/// Residuals of the two λ-derivative identities
/// `λ dn_{λm}/dλ = m n_{λm} + r·∇n_{λm}` and
/// `λ d(∂ᵢn_{λm})/dλ = (m+1) ∂ᵢn_{λm} + Σⱼ xⱼ ∂ⱼ∂ᵢ n_{λm}`,
/// with the λ-derivative taken by central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingIdentityResidual {
    pub value: f64,
    /// Largest component residual of the gradient identity.
    pub gradient: f64,
    /// Richardson estimate (`|D(2h) − D(h)|/3`) of the O(h²) differencing
    /// error in the value identity.
    pub value_bound: f64,
    pub gradient_bound: f64,
}

pub fn check_scaling_identities<D: Density>(
    density: &ScaledDensity<D>,
    r: Point,
    h: f64,
) -> Result<ScalingIdentityResidual> {
    if !vec3::is_finite(r) {
        return Err(Error::NonFinitePoint(r));
    }
    let lambda = density.scaling.lambda;
    if !(h.is_finite() && h > 0.0 && h < 0.5 * lambda) {
        return Err(Error::InvalidScaling(lambda - h));
    }
    let m = density.scaling.m;

    // λ·d/dλ of value and gradient by central differences with step `step`.
    let fd = |step: f64| -> Result<(f64, Point)> {
        let plus = density.with_lambda(lambda + step)?;
        let minus = density.with_lambda(lambda - step)?;
        let dv = lambda * (plus.value(r) - minus.value(r)) / (2.0 * step);
        let gp = plus.gradient(r);
        let gm = minus.gradient(r);
        let dg = core::array::from_fn(|i| lambda * (gp[i] - gm[i]) / (2.0 * step));
        Ok((dv, dg))
    };
    let (dv, dg) = fd(h)?;
    let (dv2, dg2) = fd(2.0 * h)?;

    let n = density.value(r);
    let grad = density.gradient(r);
    let hess = density.hessian(r);
    let rhs_value = m * n + dot(r, grad);
    let hr = vec3::mat_vec(&hess, r);
    let rhs_grad: Point = core::array::from_fn(|i| (m + 1.0) * grad[i] + hr[i]);

    let max_abs = |a: Point, b: Point| (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
    Ok(ScalingIdentityResidual {
        value: (dv - rhs_value).abs(),
        gradient: max_abs(dg, rhs_grad),
        value_bound: (dv2 - dv).abs() / 3.0,
        gradient_bound: max_abs(dg2, dg) / 3.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureSpec;

    fn gauss() -> DensityModel {
        DensityModel::gaussian(1.0, 1.0).unwrap()
    }

    fn models() -> Vec<DensityModel> {
        alloc::vec![
            gauss(),
            DensityModel::slater(1.0, 1.0).unwrap(),
            DensityModel::anisotropic(1.3, [1.0, 2.0, 0.5]).unwrap(),
            DensityModel::gaussian_mix(alloc::vec![
                GaussianTerm { weight: 0.7, alpha: 1.2, center: [0.3, 0.0, -0.2] },
                GaussianTerm { weight: 0.5, alpha: 0.6, center: [-0.4, 0.5, 0.1] },
            ])
            .unwrap(),
        ]
    }

    #[test]
    fn gaussian_center_value() {
        let p = evaluate(&gauss(), [0.0; 3]).unwrap();
        assert!((p.value - libm::pow(1.0 / PI, 1.5)).abs() < 1e-15);
        assert!((p.value - 0.179587).abs() < 1e-6);
        assert_eq!(p.gradient, [0.0; 3]);
    }

    #[test]
    fn slater_value_at_unit_radius() {
        let s = DensityModel::slater(1.0, 1.0).unwrap();
        let v = s.value([0.0, 0.6, 0.8]);
        assert!((v - libm::exp(-2.0) / PI).abs() < 1e-16);
        assert!((v - 0.0430784).abs() < 1e-6);
    }

    #[test]
    fn non_finite_point_rejected() {
        assert!(matches!(evaluate(&gauss(), [f64::NAN, 0.0, 0.0]), Err(Error::NonFinitePoint(_))));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(DensityModel::gaussian(-1.0, 1.0).is_err());
        assert!(DensityModel::gaussian(1.0, 0.0).is_err());
        assert!(DensityModel::slater(1.0, f64::NAN).is_err());
        assert!(DensityModel::anisotropic(1.0, [1.0, -2.0, 1.0]).is_err());
        assert!(DensityModel::gaussian_mix(Vec::new()).is_err());
    }

    #[test]
    fn identity_scaling_reproduces_base() {
        let r = [0.3, -0.7, 1.1];
        let s = scale_density(gauss(), 1.0, 7.0).unwrap();
        assert_eq!(s.value(r), gauss().value(r));
        let s0 = scale_density(gauss(), 1.0, 0.0).unwrap();
        assert_eq!(s0.gradient(r), gauss().gradient(r));
    }

    #[test]
    fn scaled_center_value() {
        let s = scale_density(gauss(), 2.0, 3.0).unwrap();
        assert!((s.value([0.0; 3]) - 8.0 * libm::pow(1.0 / PI, 1.5)).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_lambda_rejected() {
        assert!(matches!(scale_density(gauss(), 0.0, 3.0), Err(Error::InvalidScaling(_))));
        assert!(matches!(scale_density(gauss(), -1.0, 3.0), Err(Error::InvalidScaling(_))));
    }

    #[test]
    fn degree_three_scaling_preserves_norm_by_quadrature() {
        let q = QuadratureSpec::default().build().unwrap();
        let s = scale_density(gauss(), 2.0, 3.0).unwrap();
        let r_max = s.tail_radius(q.tail_tolerance());
        let total = q.radial(r_max, &[], |r| s.value([r, 0.0, 0.0])).unwrap();
        assert!((total - gauss().analytic_norm()).abs() < 1e-12);
        assert!((s.analytic_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalization_by_quadrature() {
        let q = QuadratureSpec::default().build().unwrap();
        for d in models().iter().filter(|d| d.is_spherical()) {
            let r_max = d.tail_radius(q.tail_tolerance());
            let total = q.radial(r_max, &[], |r| d.value([r, 0.0, 0.0])).unwrap();
            assert!((total - d.analytic_norm()).abs() < 1e-10, "{d:?}: {total}");
        }
        for d in models().iter().filter(|d| !d.is_spherical()) {
            let (lo, hi) = d.bounding_box(q.tail_tolerance());
            let total = q.cube(lo, hi, |p| d.value(p)).unwrap();
            assert!((total - d.analytic_norm()).abs() < 1e-8, "{d:?}: {total}");
        }
    }

    #[test]
    fn normalization_error_shrinks_with_node_count() {
        let d = DensityModel::gaussian(1.0, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for nodes in [2, 3, 4, 6] {
            let mut spec = QuadratureSpec::default();
            spec.radial.panels = 4;
            spec.radial.nodes_per_panel = nodes;
            let q = spec.build().unwrap();
            let r_max = d.tail_radius(q.tail_tolerance());
            let err = (q.radial(r_max, &[], |r| d.value([r, 0.0, 0.0])).unwrap() - 1.0).abs();
            assert!(err < last, "nodes={nodes} err={err} last={last}");
            last = err;
        }
    }

    #[test]
    fn coulomb_moment_of_gaussian() {
        let q = QuadratureSpec::default().build().unwrap();
        let d = gauss();
        let r_max = d.tail_radius(q.tail_tolerance());
        let v = q.radial(r_max, &[], |r| d.value([r, 0.0, 0.0]) / r).unwrap();
        assert!((v - 2.0 / libm::sqrt(PI)).abs() < 1e-12);
    }

    #[test]
    fn scaling_identity_example() {
        let s = scale_density(gauss(), 1.5, 2.0).unwrap();
        let res = check_scaling_identities(&s, [0.3, -0.2, 0.7], 1e-4).unwrap();
        assert!(res.value < 1e-6 && res.gradient < 1e-6, "{res:?}");
        assert!(res.value_bound < 1e-6);
    }

    #[test]
    fn scaling_identity_at_center_reduces_to_m_n() {
        let s = scale_density(gauss(), 1.2, 3.0).unwrap();
        let res = check_scaling_identities(&s, [0.0; 3], 1e-4).unwrap();
        let n = s.value([0.0; 3]);
        assert!(res.value < 1e-8 * n.max(1.0));
    }

    #[test]
    fn scaling_identity_grid() {
        let r = [0.4, 0.25, -0.6];
        for d in models() {
            for lambda in [0.5, 1.0, 2.0] {
                for m in [0.0, 1.0, 3.0] {
                    let s = scale_density(d.clone(), lambda, m).unwrap();
                    let res = check_scaling_identities(&s, r, 1e-4).unwrap();
                    assert!(res.value < 1e-6 && res.gradient < 1e-6, "{d:?} λ={lambda} m={m}: {res:?}");
                }
            }
        }
    }

    #[test]
    fn slater_laplacian_matches_hessian_trace() {
        let s = DensityModel::slater(2.0, 1.3).unwrap();
        let r = [0.2, -0.5, 0.9];
        assert!((s.laplacian(r) - trace(&s.hessian(r))).abs() < 1e-12);
    }

    #[test]
    fn tail_radius_meets_tolerance() {
        for d in models() {
            let r = d.tail_radius(1e-16);
            for dir in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.577, 0.577, 0.577]] {
                let p = scale(r * 1.01, dir);
                assert!(d.value(p) * r * r < 1e-16, "{d:?}");
            }
        }
    }
}
