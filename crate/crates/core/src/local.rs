//! Pointwise local-invariance checks on energy densities.
//!
//! For an energy density `f(n, ∇n, r)` of a functional with invariance
//! degree `m₀`, local invariance reduces to
//!
//! ```text
//! m₀ (∂f/∂n) n + (m₀+1) Σᵢ (∂f/∂(∂ᵢn)) ∂ᵢn = ∇·[r f]   (density slots frozen)
//! ```
//!
//! whose right side is `3f` when `f` has no explicit coordinate dependence.
//! The two-point (Hartree) version sums the density terms and the
//! coordinate divergences over both points.
//!
//! Every per-point residual is `|LHS − RHS| / (|f| + f64::MIN_POSITIVE)`.

use alloc::vec::Vec;

use crate::density::{scale_density, Density};
use crate::error::{Error, Result};
use crate::functionals::{EnergyDensity, OnePointArgs, OnePointDensity, TwoPointArgs};
use crate::quadrature::Quadrature;
use crate::vec3::{dot, norm, scale, Point};

/// Keeps the residual denominator positive where `f` vanishes.
pub const RESIDUAL_FLOOR: f64 = f64::MIN_POSITIVE;
/// Box integrals smaller than this cannot serve as a reference.
pub const REFERENCE_FLOOR: f64 = 1e-12;

const NORMALIZATION: &str = "|f| + f64::MIN_POSITIVE at each point";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquationId {
    TwoPointPde,
    OnePointPde,
    DensityOnlyPde,
    GradientOnlyPde,
    DensityGradientPde,
    BoxInvariance,
    SolutionFormDensity,
    SolutionFormGradient,
    SolutionFormTs,
    SolutionFormCoordinate,
    SolutionFormRatio,
}

impl EquationId {
    pub fn as_str(&self) -> &'static str {
        match self {
            EquationId::TwoPointPde => "two_point_pde",
            EquationId::OnePointPde => "one_point_pde",
            EquationId::DensityOnlyPde => "density_only_pde",
            EquationId::GradientOnlyPde => "gradient_only_pde",
            EquationId::DensityGradientPde => "density_gradient_pde",
            EquationId::BoxInvariance => "box_invariance",
            EquationId::SolutionFormDensity => "solution_form_density",
            EquationId::SolutionFormGradient => "solution_form_gradient",
            EquationId::SolutionFormTs => "solution_form_ts",
            EquationId::SolutionFormCoordinate => "solution_form_coordinate",
            EquationId::SolutionFormRatio => "solution_form_ratio",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub equation_id: EquationId,
    pub sample_points: usize,
    pub max_rel_residual: f64,
    pub mean_rel_residual: f64,
    pub normalization: &'static str,
}

struct Accumulator {
    id: EquationId,
    max: f64,
    sum: f64,
    count: usize,
}

impl Accumulator {
    fn new(id: EquationId) -> Self {
        Self { id, max: 0.0, sum: 0.0, count: 0 }
    }

    fn push(&mut self, lhs: f64, rhs: f64, f: f64) {
        let r = (lhs - rhs).abs() / (f.abs() + RESIDUAL_FLOOR);
        self.max = self.max.max(r);
        self.sum += r;
        self.count += 1;
    }

    fn finish(self) -> ResidualReport {
        ResidualReport {
            equation_id: self.id,
            sample_points: self.count,
            max_rel_residual: self.max,
            mean_rel_residual: if self.count > 0 { self.sum / self.count as f64 } else { 0.0 },
            normalization: NORMALIZATION,
        }
    }
}

fn one_point(ed: &EnergyDensity) -> Result<&OnePointDensity> {
    match ed {
        EnergyDensity::OnePoint(op) => Ok(op),
        EnergyDensity::TwoPoint(_) => Err(Error::WrongEnergyDensity("expected a one-point energy density")),
    }
}

fn positive_args<D: Density + ?Sized>(density: &D, x: Point) -> Result<OnePointArgs> {
    let a = OnePointArgs::at(density, x);
    if !(a.n > 0.0) {
        return Err(Error::InvalidSample { point: x, reason: "density must be > 0" });
    }
    Ok(a)
}

fn pde_id(ed: &OnePointDensity) -> EquationId {
    let d = ed.dependence();
    match (d.density, d.gradient, d.coordinates) {
        (_, _, true) => EquationId::OnePointPde,
        (true, false, false) => EquationId::DensityOnlyPde,
        (false, true, false) => EquationId::GradientOnlyPde,
        _ => EquationId::DensityGradientPde,
    }
}

/// Residual of the reduced one-point equation at each point.
pub fn residual_one_point_pde<D: Density + ?Sized>(
    ed: &EnergyDensity,
    density: &D,
    m0: f64,
    points: &[Point],
) -> Result<ResidualReport> {
    let ed = one_point(ed)?;
    let mut acc = Accumulator::new(pde_id(ed));
    for &x in points {
        let a = positive_args(density, x)?;
        let lhs = m0 * ed.d_density(&a) * a.n + (m0 + 1.0) * dot(ed.d_gradient(&a), a.grad);
        acc.push(lhs, ed.coordinate_divergence(&a), ed.value(&a));
    }
    Ok(acc.finish())
}

/// Residual of the two-point equation at each pair `(r, r')`.
pub fn residual_two_point_pde<D: Density + ?Sized>(
    ed: &EnergyDensity,
    density: &D,
    m0: f64,
    pairs: &[(Point, Point)],
) -> Result<ResidualReport> {
    let kernel = match ed {
        EnergyDensity::TwoPoint(k) => k,
        EnergyDensity::OnePoint(_) => return Err(Error::WrongEnergyDensity("expected a two-point energy density")),
    };
    let mut acc = Accumulator::new(EquationId::TwoPointPde);
    for &(x1, x2) in pairs {
        if x1 == x2 {
            return Err(Error::CoincidentPair(x1));
        }
        let a = TwoPointArgs::at(density, x1, x2);
        if !(a.n1 > 0.0 && a.n2 > 0.0) {
            return Err(Error::InvalidSample { point: x1, reason: "density must be > 0" });
        }
        let (d1, d2) = kernel.d_densities(&a);
        // Hartree has no gradient slots, so the (m₀+1) term vanishes.
        let lhs = m0 * (d1 * a.n1 + d2 * a.n2);
        let (div1, div2) = kernel.coordinate_divergences(&a);
        acc.push(lhs, div1 + div2, kernel.value(&a));
    }
    Ok(acc.finish())
}

/// `|∫_box f[n] − ∫_{box/λ} f[n_{λm₀}]| / |∫_box f[n]|`.
pub fn check_box_invariance<D: Density + ?Sized>(
    ed: &EnergyDensity,
    density: &D,
    m0: f64,
    bounds: (Point, Point),
    lambda: f64,
    quad: &Quadrature,
) -> Result<f64> {
    let ed = one_point(ed)?;
    let (lo, hi) = bounds;
    if (0..3).any(|i| !(lo[i].is_finite() && hi[i].is_finite() && lo[i] < hi[i])) {
        return Err(Error::InvalidQuadrature("box corners must satisfy lower < upper".into()));
    }
    let scaled = scale_density(density, lambda, m0)?;
    let reference = quad.cube(lo, hi, |x| ed.value(&OnePointArgs::at(density, x)))?;
    if !(reference.abs() > REFERENCE_FLOOR) {
        return Err(Error::DegenerateReference(reference));
    }
    let inv = 1.0 / lambda;
    let moved = quad.cube(scale(inv, lo), scale(inv, hi), |x| ed.value(&OnePointArgs::at(&scaled, x)))?;
    Ok((reference - moved).abs() / reference.abs())
}

/// Fit of `f = C n^{3/m₀}` for a density-only energy density.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFormFit {
    /// Mean of `f / n^{3/m₀}` over the points.
    pub c_hat: f64,
    /// `max |f/n^{3/m₀} − Ĉ| / |Ĉ|`.
    pub spread: f64,
    pub sample_points: usize,
}

pub fn check_solution_form_density<D: Density + ?Sized>(
    ed: &EnergyDensity,
    m0: f64,
    density: &D,
    points: &[Point],
) -> Result<DensityFormFit> {
    let ed = one_point(ed)?;
    let dep = ed.dependence();
    if dep.gradient || dep.coordinates {
        return Err(Error::WrongEnergyDensity("solution form C n^(3/m0) applies to density-only f"));
    }
    let ratios = points
        .iter()
        .map(|&x| {
            let a = positive_args(density, x)?;
            Ok(ed.value(&a) / libm::pow(a.n, 3.0 / m0))
        })
        .collect::<Result<Vec<f64>>>()?;
    if ratios.is_empty() {
        return Err(Error::DegenerateFit("no sample points".into()));
    }
    let c_hat = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|c| (c - c_hat).abs()).fold(0.0, f64::max) / c_hat.abs();
    Ok(DensityFormFit { c_hat, spread, sample_points: ratios.len() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientFormCheck {
    /// Residual of `(m₀+1) Σ (∂f/∂(∂ᵢn)) ∂ᵢn = 3f`.
    pub pde: ResidualReport,
    /// `|f − |∂₁n|^{3/(m₀+1)} (1 + u₂² + u₃²)^{3/(2(m₀+1))}|` with
    /// `uⱼ = ∂ⱼn/∂₁n`: the ratio-variable solution that `|∇n|^{3/(m₀+1)}`
    /// takes.
    pub ratio_form: ResidualReport,
}

pub fn check_solution_form_gradient<D: Density + ?Sized>(
    ed: &EnergyDensity,
    m0: f64,
    density: &D,
    points: &[Point],
) -> Result<GradientFormCheck> {
    let ed = one_point(ed)?;
    let dep = ed.dependence();
    if dep.density || dep.coordinates || !dep.gradient {
        return Err(Error::WrongEnergyDensity("expected a gradient-only energy density"));
    }
    let power = 3.0 / (m0 + 1.0);
    let mut pde = Accumulator::new(EquationId::GradientOnlyPde);
    let mut form = Accumulator::new(EquationId::SolutionFormGradient);
    for &x in points {
        let a = OnePointArgs::at(density, x);
        let g = a.grad;
        if g[0] == 0.0 {
            return Err(Error::RatioUndefined(x));
        }
        let f = ed.value(&a);
        pde.push((m0 + 1.0) * dot(ed.d_gradient(&a), g), 3.0 * f, f);
        let (u2, u3) = (g[1] / g[0], g[2] / g[0]);
        let ratio = libm::pow(g[0].abs(), power) * libm::pow(1.0 + u2 * u2 + u3 * u3, 0.5 * power);
        form.push(f, ratio, f);
    }
    Ok(GradientFormCheck { pde: pde.finish(), ratio_form: form.finish() })
}

/// `|t_vW − n³ g(∇n/n²)|` with `g(u) = |u|²/8`.
pub fn check_ts_form<D: Density + ?Sized>(density: &D, points: &[Point]) -> Result<ResidualReport> {
    let vw = OnePointDensity::VonWeizsaecker;
    let mut acc = Accumulator::new(EquationId::SolutionFormTs);
    for &x in points {
        let a = positive_args(density, x)?;
        let u = scale(1.0 / (a.n * a.n), a.grad);
        let form = a.n * a.n * a.n * dot(u, u) / 8.0;
        let f = vw.value(&a);
        acc.push(f, form, f);
    }
    Ok(acc.finish())
}

/// Tests whether `f` depends on its slots only through the invariant
/// combinations `n^{3/m₀}`, `∂ᵢn / n^{(m₀+1)/m₀}` and `xᵢ n^{1/m₀}`: maps
/// `(n, ∇n, x) → (t n, t^{(m₀+1)/m₀} ∇n, t^{−1/m₀} x)` and compares
/// `f` against `t^{3/m₀} f`.
pub fn check_ratio_form<D: Density + ?Sized>(
    ed: &EnergyDensity,
    m0: f64,
    density: &D,
    points: &[Point],
    t: f64,
) -> Result<ResidualReport> {
    let ed = one_point(ed)?;
    if !(t.is_finite() && t > 0.0 && t != 1.0) {
        return Err(Error::InvalidScaling(t));
    }
    let mut acc = Accumulator::new(EquationId::SolutionFormRatio);
    for &x in points {
        let a = positive_args(density, x)?;
        let moved = OnePointArgs {
            n: t * a.n,
            grad: scale(libm::pow(t, (m0 + 1.0) / m0), a.grad),
            x: scale(libm::pow(t, -1.0 / m0), a.x),
        };
        let expected = libm::pow(t, 3.0 / m0) * ed.value(&a);
        acc.push(ed.value(&moved), expected, expected);
    }
    Ok(acc.finish())
}

/// `|f_ext − n^{3/m₀} g₁(w)|` with `wᵢ = xᵢ n^{1/m₀}` and `g₁(w) = −Z/|w|`.
pub fn check_solution_form_coordinate<D: Density + ?Sized>(
    density: &D,
    z: f64,
    m0: f64,
    points: &[Point],
) -> Result<ResidualReport> {
    let ext = OnePointDensity::ExternalCoulomb { z };
    let mut acc = Accumulator::new(EquationId::SolutionFormCoordinate);
    for &x in points {
        if norm(x) == 0.0 {
            return Err(Error::SingularPoint(x));
        }
        let a = positive_args(density, x)?;
        let w = scale(libm::pow(a.n, 1.0 / m0), x);
        let form = libm::pow(a.n, 3.0 / m0) * (-z / norm(w));
        let f = ext.value(&a);
        acc.push(f, form, f);
    }
    Ok(acc.finish())
}
