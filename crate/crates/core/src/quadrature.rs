//! Composite Gauss–Legendre quadrature on radial lines, tensor-product
//! boxes, and small balls around a point.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vec3::{add, Point};

/// Gauss–Legendre rule on `[-1, 1]`, nodes in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQuadrature("Gauss-Legendre order must be > 0".into()));
        }
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let prev = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * p - prev) / (x * x - 1.0);
    (p, d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSpec {
    /// Outer radius in bohr; `None` picks it from the density's tail.
    pub r_max: Option<f64>,
    pub panels: usize,
    pub nodes_per_panel: usize,
}

impl Default for RadialSpec {
    fn default() -> Self {
        Self { r_max: None, panels: 60, nodes_per_panel: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    /// Box corners; `None` means derive them from the density's extent.
    pub bounds: Option<(Point, Point)>,
    pub panels_per_axis: usize,
    pub nodes_per_panel: usize,
    /// Panels per axis for the six-dimensional pair quadrature.
    pub pair_panels: usize,
    /// Nodes per panel for the first coordinate of the pair quadrature.
    /// The second coordinate uses one more, so the two grids never share
    /// a point and the Coulomb kernel stays finite.
    pub pair_nodes: usize,
    /// Tail tolerance for the automatic pair-quadrature box. Looser than
    /// the main one: with only a few panels a wide box costs more
    /// resolution near the kernel singularity than it gains in the tail.
    pub pair_tail_tolerance: f64,
}

impl Default for BoxSpec {
    fn default() -> Self {
        Self {
            bounds: None,
            panels_per_axis: 8,
            nodes_per_panel: 8,
            pair_panels: 2,
            pair_nodes: 8,
            pair_tail_tolerance: 1e-10,
        }
    }
}

/// Quadrature nodes with their weights.
pub type WeightedNodes = Vec<(Point, f64)>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub radial: RadialSpec,
    pub cube: BoxSpec,
    /// Automatic outer radii satisfy `n(R)·R² < tail_tolerance`.
    pub tail_tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { radial: RadialSpec::default(), cube: BoxSpec::default(), tail_tolerance: 1e-16 }
    }
}

impl QuadratureSpec {
    pub fn build(&self) -> Result<Quadrature> {
        Quadrature::new(*self)
    }
}

const BALL_RADIAL_NODES: usize = 12;
const BALL_RADIAL_PANELS: usize = 4;
const BALL_POLAR_NODES: usize = 16;
const BALL_AZIMUTH_NODES: usize = 24;

/// A [`QuadratureSpec`] with its rules precomputed.
#[derive(Debug, Clone)]
pub struct Quadrature {
    spec: QuadratureSpec,
    radial_rule: GaussLegendre,
    box_rule: GaussLegendre,
    pair_rules: (GaussLegendre, GaussLegendre),
    ball_radial: GaussLegendre,
    ball_polar: GaussLegendre,
}

impl Quadrature {
    pub fn new(spec: QuadratureSpec) -> Result<Self> {
        let r = &spec.radial;
        let b = &spec.cube;
        if r.panels == 0 || b.panels_per_axis == 0 || b.pair_panels == 0 {
            return Err(Error::InvalidQuadrature("panel counts must be > 0".into()));
        }
        if let Some(r_max) = r.r_max {
            if !(r_max.is_finite() && r_max > 0.0) {
                return Err(Error::InvalidQuadrature("r_max must be finite and > 0".into()));
            }
        }
        if let Some((lo, hi)) = b.bounds {
            if (0..3).any(|i| !(lo[i].is_finite() && hi[i].is_finite() && lo[i] < hi[i])) {
                return Err(Error::InvalidQuadrature("box corners must satisfy lower < upper".into()));
            }
        }
        if !(spec.tail_tolerance.is_finite() && spec.tail_tolerance > 0.0)
            || !(b.pair_tail_tolerance.is_finite() && b.pair_tail_tolerance > 0.0)
        {
            return Err(Error::InvalidQuadrature("tail tolerance must be finite and > 0".into()));
        }
        Ok(Self {
            spec,
            radial_rule: GaussLegendre::new(r.nodes_per_panel)?,
            box_rule: GaussLegendre::new(b.nodes_per_panel)?,
            pair_rules: (GaussLegendre::new(b.pair_nodes)?, GaussLegendre::new(b.pair_nodes + 1)?),
            ball_radial: GaussLegendre::new(BALL_RADIAL_NODES)?,
            ball_polar: GaussLegendre::new(BALL_POLAR_NODES)?,
        })
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.spec.tail_tolerance
    }

    /// `4π ∫₀^R r² f(r) dr` with `R` from the radial settings.
    pub fn integrate_radial(&self, f: impl FnMut(f64) -> f64) -> Result<f64> {
        let r_max = self
            .spec
            .radial
            .r_max
            .ok_or_else(|| Error::InvalidQuadrature("integrate_radial needs an explicit r_max".into()))?;
        self.radial(r_max, &[], f)
    }

    /// `4π ∫₀^R r² f(r) dr` on `panels` uniform panels, further split at
    /// any `breaks` inside `(0, R)`.
    pub fn radial(&self, r_max: f64, breaks: &[f64], mut f: impl FnMut(f64) -> f64) -> Result<f64> {
        let edges = self.radial_edges(0.0, r_max, r_max, breaks);
        let s = self.composite(&edges, &self.radial_rule, |r| r * r * f(r))?;
        Ok(4.0 * PI * s)
    }

    /// `∫_a^b g(s) ds` on the same panel lattice the radial integrals of a
    /// ball of radius `r_max` use, so sub-range integrals line up with
    /// full ones.
    pub fn radial_range(&self, a: f64, b: f64, r_max: f64, breaks: &[f64], g: impl FnMut(f64) -> f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let edges = self.radial_edges(a, b, r_max, breaks);
        self.composite(&edges, &self.radial_rule, g)
    }

    fn radial_edges(&self, a: f64, b: f64, r_max: f64, breaks: &[f64]) -> Vec<f64> {
        let panels = self.spec.radial.panels;
        let h = r_max / panels as f64;
        let mut edges = Vec::with_capacity(panels + breaks.len() + 2);
        edges.push(a);
        for k in 1..panels {
            let e = k as f64 * h;
            if e > a && e < b {
                edges.push(e);
            }
        }
        edges.extend(breaks.iter().copied().filter(|&e| e > a && e < b));
        edges.push(b);
        edges.sort_by(f64::total_cmp);
        let tiny = 1e-13 * r_max;
        edges.dedup_by(|x, y| (*x - *y).abs() <= tiny);
        edges
    }

    fn composite(&self, edges: &[f64], rule: &GaussLegendre, mut g: impl FnMut(f64) -> f64) -> Result<f64> {
        let mut total = 0.0;
        for w in edges.windows(2) {
            for (x, wt) in rule.mapped(w[0], w[1]) {
                let v = g(x);
                if !v.is_finite() {
                    return Err(Error::QuadratureFailure { node: [x, 0.0, 0.0], value: v });
                }
                total += wt * v;
            }
        }
        Ok(total)
    }

    /// Integral over the configured box.
    pub fn integrate_box(&self, f: impl FnMut(Point) -> f64) -> Result<f64> {
        let (lo, hi) = self
            .spec
            .cube
            .bounds
            .ok_or_else(|| Error::InvalidQuadrature("integrate_box needs explicit box corners".into()))?;
        self.cube(lo, hi, f)
    }

    /// Tensor-product composite Gauss–Legendre over `[lo, hi]`.
    pub fn cube(&self, lo: Point, hi: Point, mut f: impl FnMut(Point) -> f64) -> Result<f64> {
        let b = &self.spec.cube;
        let axes: [Vec<(f64, f64)>; 3] =
            core::array::from_fn(|i| axis_nodes(&self.box_rule, lo[i], hi[i], b.panels_per_axis));
        let mut total = 0.0;
        for &(x, wx) in &axes[0] {
            let mut sy = 0.0;
            for &(y, wy) in &axes[1] {
                let mut sz = 0.0;
                for &(z, wz) in &axes[2] {
                    let p = [x, y, z];
                    let v = f(p);
                    if !v.is_finite() {
                        return Err(Error::QuadratureFailure { node: p, value: v });
                    }
                    sz += wz * v;
                }
                sy += wy * sz;
            }
            total += wx * sy;
        }
        Ok(total)
    }

    /// The two node sets (with weights) used by the six-dimensional pair
    /// quadrature over `[lo, hi]²`.
    pub fn pair_grids(&self, lo: Point, hi: Point) -> (WeightedNodes, WeightedNodes) {
        let panels = self.spec.cube.pair_panels;
        (tensor_nodes(&self.pair_rules.0, lo, hi, panels), tensor_nodes(&self.pair_rules.1, lo, hi, panels))
    }

    /// Integral over the ball of `radius` around `center`, in spherical
    /// coordinates about the center.
    pub fn ball(&self, center: Point, radius: f64, mut f: impl FnMut(Point) -> f64) -> Result<f64> {
        let h = radius / BALL_RADIAL_PANELS as f64;
        let dphi = 2.0 * PI / BALL_AZIMUTH_NODES as f64;
        let mut total = 0.0;
        for panel in 0..BALL_RADIAL_PANELS {
            let a = panel as f64 * h;
            for (rho, wr) in self.ball_radial.mapped(a, a + h) {
                for (mu, wm) in self.ball_polar.mapped(-1.0, 1.0) {
                    let st = libm::sqrt(1.0 - mu * mu);
                    for k in 0..BALL_AZIMUTH_NODES {
                        let phi = (k as f64 + 0.5) * dphi;
                        let off = [rho * st * libm::cos(phi), rho * st * libm::sin(phi), rho * mu];
                        let p = add(center, off);
                        let v = f(p);
                        if !v.is_finite() {
                            return Err(Error::QuadratureFailure { node: p, value: v });
                        }
                        total += wr * wm * dphi * rho * rho * v;
                    }
                }
            }
        }
        Ok(total)
    }
}

fn axis_nodes(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|k| {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == panels { b } else { lo + h };
            rule.mapped(lo, hi)
        })
        .collect()
}

fn tensor_nodes(rule: &GaussLegendre, lo: Point, hi: Point, panels: usize) -> Vec<(Point, f64)> {
    let axes: [Vec<(f64, f64)>; 3] = core::array::from_fn(|i| axis_nodes(rule, lo[i], hi[i], panels));
    let mut out = Vec::with_capacity(axes[0].len() * axes[1].len() * axes[2].len());
    for &(x, wx) in &axes[0] {
        for &(y, wy) in &axes[1] {
            for &(z, wz) in &axes[2] {
                out.push(([x, y, z], wx * wy * wz));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> Quadrature {
        QuadratureSpec::default().build().unwrap()
    }

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        for n in 1..=12 {
            let rule = GaussLegendre::new(n).unwrap();
            for deg in 0..(2 * n) {
                let got: f64 = rule.mapped(-1.0, 1.0).map(|(x, w)| w * libm::pow(x, deg as f64)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg} got={got}");
            }
        }
    }

    #[test]
    fn legendre_nodes_sorted_and_symmetric() {
        let rule = GaussLegendre::new(9).unwrap();
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(rule.nodes()[4], 0.0);
        let wsum: f64 = rule.weights().iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_order_rejected() {
        assert!(GaussLegendre::new(0).is_err());
    }

    #[test]
    fn unit_box_volume() {
        let q = quad();
        let v = q.cube([0.0; 3], [1.0; 3], |_| 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integrate_box_uses_spec_corners() {
        let mut spec = QuadratureSpec::default();
        assert!(spec.build().unwrap().integrate_box(|_| 1.0).is_err());
        spec.cube.bounds = Some(([0.0; 3], [1.0, 2.0, 3.0]));
        let v = spec.build().unwrap().integrate_box(|p| p[0]).unwrap();
        assert!((v - 3.0).abs() < 1e-13);
    }

    #[test]
    fn radial_ball_volume_and_breakpoints() {
        let q = quad();
        let v = q.radial(2.0, &[0.33, 1.7], |_| 1.0).unwrap();
        assert!((v - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);
    }

    #[test]
    fn radial_range_matches_full_split() {
        let q = quad();
        let g = |s: f64| libm::exp(-s) * s;
        let a = q.radial_range(0.0, 1.234, 5.0, &[], g).unwrap();
        let b = q.radial_range(1.234, 5.0, 5.0, &[], g).unwrap();
        let full = q.radial_range(0.0, 5.0, 5.0, &[], g).unwrap();
        assert!((a + b - full).abs() < 1e-14);
        assert_eq!(q.radial_range(2.0, 1.0, 5.0, &[], g).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_integrand_names_node() {
        let q = quad();
        let err = q.cube([0.0; 3], [1.0; 3], |p| if p[0] > 0.5 { f64::NAN } else { 1.0 }).unwrap_err();
        match err {
            Error::QuadratureFailure { node, value } => {
                assert!(node[0] > 0.5);
                assert!(value.is_nan());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ball_volume_and_moment() {
        let q = quad();
        let c = [0.3, -0.1, 0.2];
        let vol = q.ball(c, 0.5, |_| 1.0).unwrap();
        assert!((vol - 4.0 / 3.0 * PI * 0.125).abs() < 1e-13);
        let m = q.ball(c, 0.5, |p| p[2]).unwrap();
        assert!((m - 0.2 * vol).abs() < 1e-13);
    }

    #[test]
    fn pair_grids_never_share_a_point() {
        let q = quad();
        let (a, b) = q.pair_grids([-1.0; 3], [1.0; 3]);
        assert_eq!(a.len(), 16usize.pow(3));
        assert_eq!(b.len(), 18usize.pow(3));
        assert!(a.iter().all(|(p, _)| b.iter().all(|(r, _)| p != r)));
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = QuadratureSpec::default();
        spec.radial.panels = 0;
        assert!(spec.build().is_err());
        let spec = QuadratureSpec { tail_tolerance: -1.0, ..Default::default() };
        assert!(spec.build().is_err());
        let mut spec = QuadratureSpec::default();
        spec.cube.bounds = Some(([1.0; 3], [0.0; 3]));
        assert!(spec.build().is_err());
    }
}
