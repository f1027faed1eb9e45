//! Numerical recovery of the homogeneity degree `p(m)` and invariance
//! degree `m₀`, and the three integral identities built on `δF/δn`:
//!
//! * Euler relation: `F = (1/p(m)) ∫ δF/δn (m n + r·∇n)`
//! * invariance condition: `∫ δF/δn (m₀ n + r·∇n) = 0`
//! * representation: `F = ((m − m₀)/p(m)) ∫ δF/δn n`

use alloc::vec::Vec;

use crate::density::{scale_density, Density};
use crate::error::{Error, Result};
use crate::functionals::{evaluate_energy, functional_derivative, integrate_space, EnergyPath, FunctionalSpec};
use crate::quadrature::Quadrature;
use crate::vec3::dot;

/// Smallest `|F|` accepted in a log fit.
pub const LOG_FLOOR: f64 = 1e-12;
/// `|q̂|` below this means no finite invariance degree.
pub const Q_TOLERANCE: f64 = 1e-8;
/// `|p(m)|` below this is treated as `m = m₀`.
pub const P_ZERO_TOLERANCE: f64 = 1e-12;

/// `{1/2, 1/√2, √2, 2}`: symmetric about 1 in log space.
pub fn default_lambdas() -> Vec<f64> {
    let s = core::f64::consts::SQRT_2;
    alloc::vec![0.5, 1.0 / s, s, 2.0]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub lambda: f64,
    pub value: f64,
    pub ln_lambda: f64,
    pub ln_abs_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityFit {
    pub m: f64,
    pub samples: Vec<SweepPoint>,
    /// Slope of `ln|F|` against `ln λ`.
    pub p_hat: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    /// Common sign of `F` over the sweep.
    pub sign: f64,
}

impl HomogeneityFit {
    pub fn lambda_set(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.lambda).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceResult {
    pub fits: Vec<HomogeneityFit>,
    pub q_hat: f64,
    pub k_hat: f64,
    pub m0_hat: f64,
    pub fit_residual: f64,
}

impl InvarianceResult {
    pub fn m_set(&self) -> Vec<f64> {
        self.fits.iter().map(|f| f.m).collect()
    }

    pub fn p_hats(&self) -> Vec<f64> {
        self.fits.iter().map(|f| f.p_hat).collect()
    }
}

/// Ordinary least squares `y ≈ slope·x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::DegenerateFit("need at least two (x, y) pairs".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit("abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok((slope, intercept, libm::sqrt(ss / n)))
}

fn distinct(values: &[f64]) -> usize {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Evaluates `F[n_{λm}]` over `lambdas` and fits `ln|F|` against `ln λ`.
pub fn fit_homogeneity_degree<D: Density + ?Sized>(
    spec: &FunctionalSpec,
    density: &D,
    m: f64,
    lambdas: &[f64],
    quad: &Quadrature,
) -> Result<HomogeneityFit> {
    if let Some(&bad) = lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(Error::InvalidScaling(bad));
    }
    if distinct(lambdas) < 3 {
        return Err(Error::DegenerateFit(alloc::format!(
            "need at least 3 distinct lambda values, got {}",
            distinct(lambdas)
        )));
    }
    let mut samples = Vec::with_capacity(lambdas.len());
    let mut sign = 0.0;
    for &lambda in lambdas {
        let scaled = scale_density(density, lambda, m)?;
        let value = evaluate_energy(spec, &scaled, quad, EnergyPath::Auto)?;
        if !(value.abs() > LOG_FLOOR) {
            return Err(Error::NearZeroFunctional { lambda, value });
        }
        let s = value.signum();
        if sign == 0.0 {
            sign = s;
        } else if s != sign {
            return Err(Error::SignChange { lambda });
        }
        samples.push(SweepPoint { lambda, value, ln_lambda: libm::log(lambda), ln_abs_value: libm::log(value.abs()) });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.ln_lambda).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.ln_abs_value).collect();
    let (p_hat, intercept, residual_rms) = linear_fit(&xs, &ys)?;
    Ok(HomogeneityFit { m, samples, p_hat, intercept, residual_rms, sign })
}

/// Fits `p(m)` at every `m`, then the affine law `p(m) = q m + k`, and
/// reports `m₀ = −k/q`.
pub fn fit_invariance_degree<D: Density + ?Sized>(
    spec: &FunctionalSpec,
    density: &D,
    m_set: &[f64],
    lambdas: &[f64],
    quad: &Quadrature,
) -> Result<InvarianceResult> {
    if m_set.iter().any(|m| !m.is_finite()) || distinct(m_set) < 2 {
        return Err(Error::DegenerateFit("need at least 2 distinct finite m values".into()));
    }
    let fits =
        m_set.iter().map(|&m| fit_homogeneity_degree(spec, density, m, lambdas, quad)).collect::<Result<Vec<_>>>()?;
    let p_hats: Vec<f64> = fits.iter().map(|f| f.p_hat).collect();
    let (q_hat, k_hat, fit_residual) = linear_fit(m_set, &p_hats)?;
    if q_hat.abs() < Q_TOLERANCE {
        return Err(Error::DegenerateInvariance { q_hat });
    }
    Ok(InvarianceResult { fits, q_hat, k_hat, m0_hat: -k_hat / q_hat, fit_residual })
}

fn declared_p_nonzero(spec: &FunctionalSpec, m: f64) -> Result<f64> {
    let p = spec.declared_p().at(m);
    if p.abs() < P_ZERO_TOLERANCE {
        return Err(Error::AtInvarianceDegree { m });
    }
    Ok(p)
}

/// `∫ δF/δn · weight(n, r·∇n)` over all space.
fn derivative_moment<D: Density + ?Sized>(
    spec: &FunctionalSpec,
    density: &D,
    quad: &Quadrature,
    weight: impl Fn(f64, f64) -> f64,
) -> Result<f64> {
    integrate_space(density, quad, EnergyPath::Auto, |x| {
        let n = density.value(x);
        let r_dot_grad = dot(x, density.gradient(x));
        Ok(functional_derivative(spec, density, x, quad)? * weight(n, r_dot_grad))
    })
}

/// `|F − (1/p(m)) ∫ δF/δn (m n + r·∇n)| / |F|`.
pub fn check_euler_relation<D: Density + ?Sized>(
    spec: &FunctionalSpec,
    density: &D,
    m: f64,
    quad: &Quadrature,
) -> Result<f64> {
    let p = declared_p_nonzero(spec, m)?;
    let f = evaluate_energy(spec, density, quad, EnergyPath::Auto)?;
    let moment = derivative_moment(spec, density, quad, |n, rg| m * n + rg)?;
    Ok((f - moment / p).abs() / f.abs())
}

/// `|∫ δF/δn (m₀ n + r·∇n)| / ∫ |δF/δn| n`.
pub fn check_invariance_condition<D: Density + ?Sized>(
    spec: &FunctionalSpec,
    density: &D,
    quad: &Quadrature,
) -> Result<f64> {
    let m0 = spec.declared_m0();
    let num = derivative_moment(spec, density, quad, |n, rg| m0 * n + rg)?;
    let den = integrate_space(density, quad, EnergyPath::Auto, |x| {
        Ok(functional_derivative(spec, density, x, quad)?.abs() * density.value(x))
    })?;
    if !(den > 0.0) {
        return Err(Error::DegenerateReference(den));
    }
    Ok(num.abs() / den)
}

/// `|F − ((m − m₀)/p(m)) ∫ δF/δn n| / |F|`.
pub fn check_integral_representation<D: Density + ?Sized>(
    spec: &FunctionalSpec,
    density: &D,
    m: f64,
    quad: &Quadrature,
) -> Result<f64> {
    let p = declared_p_nonzero(spec, m)?;
    let m0 = spec.declared_m0();
    let f = evaluate_energy(spec, density, quad, EnergyPath::Auto)?;
    let moment = derivative_moment(spec, density, quad, |n, _| n)?;
    Ok((f - (m - m0) / p * moment).abs() / f.abs())
}
