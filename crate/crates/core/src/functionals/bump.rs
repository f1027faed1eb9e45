//! Finite-difference oracle for `δF/δn`: perturb the density by a smooth
//! compactly supported bump and difference the functional.

use alloc::vec::Vec;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::vec3::{self, norm, scale, sub, Matrix3, Point};

use super::{energy_density, evaluate_energy, EnergyDensity, EnergyPath, FunctionalSpec, OnePointArgs};

/// `φ(s) = g(s)·ψ((s − r₀)/w)` with `ψ(t) = exp(1 − 1/(1 − t²))` on
/// `|t| < 1`, where `s = |x − center|` and `g = (r₀/s)²` for shells
/// (so the radial measure `s²φ` is symmetric about `r₀`) or `1` for point
/// bumps. Peak value is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBump {
    center: Point,
    peak_radius: f64,
    width: f64,
    inverse_square: bool,
}

impl RadialBump {
    /// Ball-shaped bump of radius `width` around `center`.
    pub fn point(center: Point, width: f64) -> Self {
        Self { center, peak_radius: 0.0, width, inverse_square: false }
    }

    /// Spherical shell about the origin peaking at `radius`.
    pub fn shell(radius: f64, width: f64) -> Self {
        Self { center: [0.0; 3], peak_radius: radius, width, inverse_square: true }
    }

    pub fn support(&self) -> (f64, f64) {
        ((self.peak_radius - self.width).max(0.0), self.peak_radius + self.width)
    }

    /// `(φ, φ', φ'')` at distance `s` from the center.
    fn profile(&self, s: f64) -> (f64, f64, f64) {
        let w = self.width;
        let t = (s - self.peak_radius) / w;
        if t.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let u = 1.0 - t * t;
        let psi = libm::exp(1.0 - 1.0 / u);
        let d1 = psi * (-2.0 * t / (u * u)) / w;
        let d2 = psi * (4.0 * t * t - (2.0 + 6.0 * t * t) * u) / (u * u * u * u) / (w * w);
        if !self.inverse_square {
            return (psi, d1, d2);
        }
        let r0 = self.peak_radius;
        let g = r0 * r0 / (s * s);
        let g1 = -2.0 * g / s;
        let g2 = 6.0 * g / (s * s);
        (g * psi, g1 * psi + g * d1, g2 * psi + 2.0 * g1 * d1 + g * d2)
    }

    pub fn value(&self, x: Point) -> f64 {
        self.profile(norm(sub(x, self.center))).0
    }

    pub fn gradient(&self, x: Point) -> Point {
        let d = sub(x, self.center);
        let s = norm(d);
        if s == 0.0 {
            return [0.0; 3];
        }
        scale(self.profile(s).1 / s, d)
    }

    pub fn hessian(&self, x: Point) -> Matrix3 {
        let d = sub(x, self.center);
        let s = norm(d);
        let mut h = [[0.0; 3]; 3];
        if s == 0.0 {
            let (_, _, d2) = self.profile(0.0);
            for (i, row) in h.iter_mut().enumerate() {
                row[i] = d2;
            }
            return h;
        }
        let (_, d1, d2) = self.profile(s);
        let u = scale(1.0 / s, d);
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                h[i][j] = d2 * u[i] * u[j] + d1 / s * (delta - u[i] * u[j]);
            }
        }
        h
    }
}

/// `base + eps·bump`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbed<D> {
    base: D,
    bump: RadialBump,
    eps: f64,
    bump_integral: f64,
}

impl<D: Density> Perturbed<D> {
    /// `bump_integral` is `∫ bump`, used only for the analytic norm.
    pub fn new(base: D, bump: RadialBump, eps: f64, bump_integral: f64) -> Self {
        Self { base, bump, eps, bump_integral }
    }
}

impl<D: Density> Density for Perturbed<D> {
    fn value(&self, r: Point) -> f64 {
        self.base.value(r) + self.eps * self.bump.value(r)
    }

    fn gradient(&self, r: Point) -> Point {
        vec3::add(self.base.gradient(r), scale(self.eps, self.bump.gradient(r)))
    }

    fn hessian(&self, r: Point) -> Matrix3 {
        let mut h = self.base.hessian(r);
        let b = self.bump.hessian(r);
        for i in 0..3 {
            for j in 0..3 {
                h[i][j] += self.eps * b[i][j];
            }
        }
        h
    }

    fn is_spherical(&self) -> bool {
        self.base.is_spherical() && self.bump.center == [0.0; 3]
    }

    fn analytic_norm(&self) -> f64 {
        self.base.analytic_norm() + self.eps * self.bump_integral
    }

    fn tail_radius(&self, tol: f64) -> f64 {
        let reach = norm(self.bump.center) + self.bump.support().1;
        self.base.tail_radius(tol).max(reach)
    }

    fn bounding_box(&self, tol: f64) -> (Point, Point) {
        let (mut lo, mut hi) = self.base.bounding_box(tol);
        let reach = self.bump.support().1;
        for i in 0..3 {
            lo[i] = lo[i].min(self.bump.center[i] - reach);
            hi[i] = hi[i].max(self.bump.center[i] + reach);
        }
        (lo, hi)
    }

    fn radial_breakpoints(&self) -> Vec<f64> {
        let mut b = self.base.radial_breakpoints();
        if self.bump.center == [0.0; 3] {
            let r0 = self.bump.peak_radius;
            let w = self.bump.width;
            b.extend((-4..=4).map(|k| r0 + w * k as f64 / 4.0).filter(|&x| x > 0.0));
        }
        b
    }
}

/// `(F[n + εb] − F[n − εb]) / (2ε ∫b)` with `b` a bump of peak 1 and the
/// given width centered at `r`.
///
/// Local functionals use a ball bump, and the difference is integrated over
/// the bump's support only (outside it the two integrands coincide).
/// Hartree needs a density it can integrate radially, so it uses a shell
/// bump at radius `|r|` and differences two full radial energies.
pub fn fd_functional_derivative<D: Density + ?Sized>(
    spec: &FunctionalSpec,
    density: &D,
    r: Point,
    eps: f64,
    width: f64,
    quad: &Quadrature,
) -> Result<f64> {
    if !vec3::is_finite(r) {
        return Err(Error::NonFinitePoint(r));
    }
    if !(eps.is_finite() && eps > 0.0 && width.is_finite() && width > 0.0) {
        return Err(Error::InvalidPerturbation(alloc::format!(
            "eps and width must be finite and > 0 (eps = {eps}, width = {width})"
        )));
    }
    match energy_density(spec) {
        EnergyDensity::OnePoint(ed) => {
            let deps = ed.dependence();
            if deps.coordinates && norm(r) <= width {
                return Err(Error::InvalidPerturbation("bump support covers the nucleus".into()));
            }
            let bump = RadialBump::point(r, width);
            let mut bad = None;
            let diff = quad.ball(r, width, |x| {
                let n = density.value(x);
                let g = density.gradient(x);
                let b = bump.value(x);
                let gb = bump.gradient(x);
                if n - eps * b <= 0.0 {
                    bad.get_or_insert(x);
                    return 0.0;
                }
                let plus = OnePointArgs { n: n + eps * b, grad: vec3::add(g, scale(eps, gb)), x };
                let minus = OnePointArgs { n: n - eps * b, grad: sub(g, scale(eps, gb)), x };
                ed.value(&plus) - ed.value(&minus)
            })?;
            if let Some(x) = bad {
                return Err(Error::InvalidPerturbation(alloc::format!("perturbed density is not positive at {x:?}")));
            }
            let mass = quad.ball(r, width, |x| bump.value(x))?;
            Ok(diff / (2.0 * eps * mass))
        }
        EnergyDensity::TwoPoint(_) => {
            if !density.is_spherical() {
                return Err(Error::UnsupportedPath("Hartree bump oracle needs a spherically symmetric density".into()));
            }
            let r0 = norm(r);
            if r0 <= width {
                return Err(Error::InvalidPerturbation("shell bump would cross the origin".into()));
            }
            let bump = RadialBump::shell(r0, width);
            let probe = 64;
            for k in 1..probe {
                let s = r0 - width + 2.0 * width * k as f64 / probe as f64;
                let x = [s, 0.0, 0.0];
                if density.value(x) - eps * bump.value(x) <= 0.0 {
                    return Err(Error::InvalidPerturbation(alloc::format!(
                        "perturbed density is not positive at radius {s}"
                    )));
                }
            }
            let plus = Perturbed::new(density, bump, eps, 0.0);
            let r_max = super::radial_extent(&plus, quad);
            let breaks = plus.radial_breakpoints();
            let mass = quad.radial(r_max, &breaks, |s| bump.value([s, 0.0, 0.0]))?;
            let plus = Perturbed::new(density, bump, eps, mass);
            let minus = Perturbed::new(density, bump, -eps, mass);
            let e_plus = evaluate_energy(spec, &plus, quad, EnergyPath::Radial)?;
            let e_minus = evaluate_energy(spec, &minus, quad, EnergyPath::Radial)?;
            Ok((e_plus - e_minus) / (2.0 * eps * mass))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityModel;
    use crate::functionals::functional_derivative;
    use crate::quadrature::QuadratureSpec;

    fn quad() -> Quadrature {
        QuadratureSpec::default().build().unwrap()
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let h = 1e-6;
        for bump in [RadialBump::point([0.1, 0.2, -0.3], 0.4), RadialBump::shell(1.0, 0.3)] {
            let x = match bump.inverse_square {
                false => [0.25, 0.3, -0.2],
                true => [0.8, 0.5, 0.1],
            };
            let g = bump.gradient(x);
            let hs = bump.hessian(x);
            for i in 0..3 {
                let mut e = [0.0; 3];
                e[i] = h;
                let fd = (bump.value(vec3::add(x, e)) - bump.value(sub(x, e))) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-7, "grad {i}: {fd} vs {}", g[i]);
                let gu = bump.gradient(vec3::add(x, e));
                let gd = bump.gradient(sub(x, e));
                for j in 0..3 {
                    let fd = (gu[j] - gd[j]) / (2.0 * h);
                    assert!((fd - hs[i][j]).abs() < 1e-6, "hess {i}{j}: {fd} vs {}", hs[i][j]);
                }
            }
        }
    }

    #[test]
    fn bump_peak_and_support() {
        let b = RadialBump::point([0.0; 3], 0.1);
        assert_eq!(b.value([0.0; 3]), 1.0);
        assert_eq!(b.value([0.1, 0.0, 0.0]), 0.0);
        let s = RadialBump::shell(1.0, 0.1);
        assert_eq!(s.value([0.0, 1.0, 0.0]), 1.0);
        assert_eq!(s.value([0.0, 0.89, 0.0]), 0.0);
    }

    #[test]
    fn number_oracle_is_one() {
        let q = quad();
        let d = DensityModel::gaussian(1.0, 1.0).unwrap();
        let v = fd_functional_derivative(&FunctionalSpec::number(), &d, [0.3, 0.1, -0.5], 1e-4, 0.1, &q).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hartree_oracle_matches_erf_potential() {
        let q = quad();
        let d = DensityModel::gaussian(1.0, 1.0).unwrap();
        let v = fd_functional_derivative(&FunctionalSpec::hartree(), &d, [0.0, 0.0, 1.0], 1e-3, 0.05, &q).unwrap();
        assert!((v - libm::erf(1.0)).abs() < 1e-3, "{v}");
    }

    #[test]
    fn tf_oracle_matches_analytic() {
        let q = quad();
        let d = DensityModel::gaussian(1.0, 1.0).unwrap();
        let r = [0.4, -0.3, 0.6];
        let spec = FunctionalSpec::thomas_fermi();
        let fd = fd_functional_derivative(&spec, &d, r, 1e-5, 0.05, &q).unwrap();
        let an = functional_derivative(&spec, &d, r, &q).unwrap();
        assert!((fd - an).abs() < 1e-3 * an.abs(), "{fd} vs {an}");
    }

    #[test]
    fn oversized_perturbation_rejected() {
        let q = quad();
        let d = DensityModel::gaussian(1.0, 1.0).unwrap();
        let err =
            fd_functional_derivative(&FunctionalSpec::thomas_fermi(), &d, [1.5, 0.0, 0.0], 1.0, 0.05, &q).unwrap_err();
        assert!(matches!(err, Error::InvalidPerturbation(_)));
    }

    #[test]
    fn hartree_oracle_needs_spherical_density() {
        let q = quad();
        let d = DensityModel::anisotropic(1.0, [1.0, 2.0, 3.0]).unwrap();
        let err =
            fd_functional_derivative(&FunctionalSpec::hartree(), &d, [1.0, 0.0, 0.0], 1e-3, 0.05, &q).unwrap_err();
        assert!(matches!(err, Error::UnsupportedPath(_)));
    }
}
