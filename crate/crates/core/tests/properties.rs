use proptest::prelude::*;

use scalelab_core::functionals::{energy_density, OnePointArgs, OnePointDensity, TwoPointArgs, TwoPointDensity};
use scalelab_core::local::{check_box_invariance, residual_one_point_pde};
use scalelab_core::{
    check_scaling_identities, scale_density, Density, DensityModel, EnergyDensity, FunctionalSpec, GaussianTerm, Point,
    QuadratureSpec,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn point() -> impl Strategy<Value = Point> {
    prop::array::uniform3(-2.0..2.0f64)
}

fn lambda() -> impl Strategy<Value = f64> {
    0.3..3.0f64
}

fn density() -> impl Strategy<Value = DensityModel> {
    let term = (0.2..2.0f64, 0.3..3.0f64, prop::array::uniform3(-0.5..0.5f64))
        .prop_map(|(weight, alpha, center)| GaussianTerm { weight, alpha, center });
    prop_oneof![
        prop::collection::vec(term, 1..4).prop_map(|t| DensityModel::gaussian_mix(t).unwrap()),
        (0.5..3.0f64, 0.4..2.0f64).prop_map(|(n, z)| DensityModel::slater(n, z).unwrap()),
        (0.5..2.0f64, prop::array::uniform3(0.3..3.0f64)).prop_map(|(w, a)| DensityModel::anisotropic(w, a).unwrap()),
    ]
}

fn local_integrands() -> [(OnePointDensity, f64); 3] {
    [(OnePointDensity::Number, 3.0), (OnePointDensity::ThomasFermi, 1.8), (OnePointDensity::VonWeizsaecker, 1.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_composes(d in density(), l1 in lambda(), l2 in lambda(), m in -1.0..4.0f64, r in point()) {
        let nested = scale_density(scale_density(d.clone(), l1, m).unwrap(), l2, m).unwrap();
        let direct = scale_density(d.clone(), l1 * l2, m).unwrap();
        let composed = scale_density(d, l1, m).unwrap().rescale(l2).unwrap();
        let v = direct.value(r);
        prop_assume!(v > 1e-250);
        prop_assert!(rel(nested.value(r), v) < 1e-13);
        prop_assert_eq!(composed.value(r), v);
    }

    #[test]
    fn gradient_matches_central_differences(d in density(), r in point()) {
        prop_assume!(d.value(r) > 1e-12);
        // Keep the stencil away from the Slater cusp.
        prop_assume!(!matches!(d, DensityModel::Slater { .. }) || r.iter().map(|x| x * x).sum::<f64>() > 1e-4);
        let h = 1e-4;
        let g = d.gradient(r);
        let scale = g.iter().map(|x| x.abs()).fold(d.value(r), f64::max);
        for i in 0..3 {
            let (mut a, mut b) = (r, r);
            a[i] += h;
            b[i] -= h;
            let fd = (d.value(a) - d.value(b)) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() / scale < 1e-6, "axis {}: {} vs {}", i, fd, g[i]);
        }
    }

    #[test]
    fn scaling_identities_hold(d in density(), l in prop::sample::select(vec![0.5, 1.0, 2.0]),
                               m in prop::sample::select(vec![0.0, 1.0, 3.0]), r in point()) {
        prop_assume!(!matches!(d, DensityModel::Slater { .. }) || r.iter().map(|x| x * x).sum::<f64>() > 1e-2);
        let s = scale_density(d, l, m).unwrap();
        prop_assume!(s.value(r) > 1e-12);
        let res = check_scaling_identities(&s, r, 1e-4).unwrap();
        prop_assert!(res.value < 1e-6 && res.gradient < 1e-6, "{:?}", res);
    }

    #[test]
    fn one_point_integrands_scale_with_lambda_cubed(d in density(), l in lambda(), r in point()) {
        for (ed, m0) in local_integrands() {
            let scaled = scale_density(&d, l, m0).unwrap();
            let base = ed.value(&OnePointArgs::at(&d, r.map(|x| l * x)));
            prop_assume!(base.abs() > 1e-280);
            let lhs = ed.value(&OnePointArgs::at(&scaled, r));
            prop_assert!(rel(lhs, l.powi(3) * base) < 1e-10, "{:?}: {} vs {}", ed, lhs, l.powi(3) * base);
        }
    }

    #[test]
    fn external_integrand_scales_with_lambda_cubed(d in density(), l in lambda(), r in point(), z in 0.5..4.0f64) {
        let ed = OnePointDensity::ExternalCoulomb { z };
        let scaled = scale_density(&d, l, 2.0).unwrap();
        let base = ed.value(&OnePointArgs::at(&d, r.map(|x| l * x)));
        prop_assume!(base.abs() > 1e-280);
        prop_assert!(rel(ed.value(&OnePointArgs::at(&scaled, r)), l.powi(3) * base) < 1e-10);
    }

    #[test]
    fn hartree_integrand_scales_with_lambda_sixth(d in density(), l in lambda(), r1 in point(), r2 in point()) {
        prop_assume!(r1 != r2);
        let k = TwoPointDensity::Hartree;
        let scaled = scale_density(&d, l, 2.5).unwrap();
        let base = k.value(&TwoPointArgs::at(&d, r1.map(|x| l * x), r2.map(|x| l * x)));
        prop_assume!(base > 1e-280);
        let lhs = k.value(&TwoPointArgs::at(&scaled, r1, r2));
        prop_assert!(rel(lhs, l.powi(6) * base) < 1e-10);
    }

    #[test]
    fn local_pde_holds_at_declared_degree(d in density(), r in point()) {
        prop_assume!(d.value(r) > 1e-8);
        prop_assume!(!matches!(d, DensityModel::Slater { .. }) || r.iter().map(|x| x * x).sum::<f64>() > 1e-4);
        for spec in FunctionalSpec::all(1.0).unwrap().into_iter().filter(|s| s.is_local()) {
            let ed = energy_density(&spec);
            let good = residual_one_point_pde(&ed, &d, spec.declared_m0(), &[r]).unwrap();
            prop_assert!(good.max_rel_residual < 1e-10, "{}: {:?}", spec.label(), good);
            let bad = residual_one_point_pde(&ed, &d, spec.declared_m0() + 0.5, &[r]).unwrap();
            prop_assert!(bad.max_rel_residual > 1e-2);
        }
    }
}

#[test]
fn box_invariance_across_lambda_set() {
    // Scaled box nodes are exact images of the base nodes, so the check
    // does not depend on resolution.
    let mut spec = QuadratureSpec::default();
    spec.cube.panels_per_axis = 3;
    let q = spec.build().unwrap();
    let densities = [
        DensityModel::gaussian(1.0, 1.0).unwrap(),
        DensityModel::slater(1.0, 1.0).unwrap(),
        DensityModel::anisotropic(1.0, [1.0, 2.0, 0.5]).unwrap(),
    ];
    let boxes = scalelab_core::sampling::sample_boxes(3, 99);
    for d in &densities {
        for (ed, m0) in local_integrands() {
            let ed = EnergyDensity::OnePoint(ed);
            for &b in &boxes {
                for lambda in [0.5, 0.8, 1.25, 2.0] {
                    let e = check_box_invariance(&ed, d, m0, b, lambda, &q).unwrap();
                    assert!(e < 1e-10, "{ed:?} {b:?} λ={lambda}: {e}");
                }
            }
        }
    }
}
