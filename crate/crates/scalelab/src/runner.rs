use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use scalelab_core::functionals::energy_density;
use scalelab_core::local::{
    check_box_invariance, check_solution_form_coordinate, check_solution_form_density, check_ts_form,
    residual_one_point_pde, residual_two_point_pde, EquationId,
};
use scalelab_core::sampling::{sample_boxes, sample_pairs, sample_points};
use scalelab_core::scaling::{
    check_euler_relation, check_integral_representation, check_invariance_condition, fit_homogeneity_degree,
    fit_invariance_degree, HomogeneityFit,
};
use scalelab_core::{DensityModel, Error, FunctionalKind, FunctionalSpec, Quadrature, ResidualReport, C_TF};

use crate::config::{Check, ConfigError, Plan, RunConfig, Thresholds};
use crate::report::{
    BoxEntry, FormEntry, HomogeneityEntry, IdentityEntry, InvarianceEntry, PdeEntry, Report, Status, SweepRow, VERSION,
};

struct Ctx<'a> {
    config: &'a RunConfig,
    plan: &'a Plan,
    quad: Quadrature,
}

impl Ctx<'_> {
    fn thresholds(&self) -> &Thresholds {
        &self.config.thresholds
    }

    /// Every (functional, density) pair in declaration order.
    fn cases(&self) -> impl Iterator<Item = (&FunctionalSpec, &str, &DensityModel)> + '_ {
        self.plan
            .functionals
            .iter()
            .flat_map(move |f| self.plan.densities.iter().map(move |(name, d)| (f, name.as_str(), d)))
    }
}

fn status_of<T>(r: &Result<T, Error>, gate: impl FnOnce(&T) -> bool) -> Status {
    match r {
        Ok(v) => Status::gate(gate(v)),
        Err(_) => Status::Errored,
    }
}

fn error_text<T>(r: &Result<T, Error>) -> Option<String> {
    r.as_ref().err().map(ToString::to_string)
}

fn sweep_rows(fit: &HomogeneityFit) -> Vec<SweepRow> {
    fit.samples
        .iter()
        .map(|s| SweepRow { lambda: s.lambda, value: s.value, ln_lambda: s.ln_lambda, ln_abs_value: s.ln_abs_value })
        .collect()
}

fn homogeneity(ctx: &Ctx, out: &mut Report) {
    let t = ctx.thresholds();
    for (spec, name, d) in ctx.cases() {
        for &m in &ctx.config.m_set {
            let declared = spec.declared_p().at(m);
            let fit = fit_homogeneity_degree(spec, d, m, &ctx.config.lambda_set, &ctx.quad);
            out.homogeneity.push(HomogeneityEntry {
                functional: spec.label(),
                density: name.to_string(),
                m,
                lambdas: ctx.config.lambda_set.clone(),
                sweep: fit.as_ref().map(sweep_rows).unwrap_or_default(),
                p_hat: fit.as_ref().ok().map(|f| f.p_hat),
                p_declared: declared,
                residual_rms: fit.as_ref().ok().map(|f| f.residual_rms),
                threshold: t.p_hat,
                status: status_of(&fit, |f| (f.p_hat - declared).abs() < t.p_hat && f.residual_rms < t.residual_rms),
                error: error_text(&fit),
            });
        }
    }
}

fn invariance(ctx: &Ctx, out: &mut Report) {
    let t = ctx.thresholds();
    for (spec, name, d) in ctx.cases() {
        let (q, m0) = (spec.declared_p().q, spec.declared_m0());
        let r = fit_invariance_degree(spec, d, &ctx.config.m_set, &ctx.config.lambda_set, &ctx.quad);
        let ok = r.as_ref().ok();
        out.invariance.push(InvarianceEntry {
            functional: spec.label(),
            density: name.to_string(),
            m_set: ctx.config.m_set.clone(),
            p_hats: ok.map(|r| r.p_hats()).unwrap_or_default(),
            sweeps: ok.map(|r| r.fits.iter().map(sweep_rows).collect()).unwrap_or_default(),
            q_hat: ok.map(|r| r.q_hat),
            k_hat: ok.map(|r| r.k_hat),
            m0_hat: ok.map(|r| r.m0_hat),
            q_declared: q,
            m0_declared: m0,
            fit_residual: ok.map(|r| r.fit_residual),
            threshold: t.m0,
            status: status_of(&r, |r| (r.m0_hat - m0).abs() < t.m0 && (r.q_hat - q).abs() < t.m0),
            error: error_text(&r),
        });
    }
}

fn identity(
    spec: &FunctionalSpec,
    density: &str,
    identity: &'static str,
    m: Option<f64>,
    r: Result<f64, Error>,
    threshold: f64,
) -> IdentityEntry {
    IdentityEntry {
        functional: spec.label(),
        density: density.to_string(),
        identity,
        m,
        value: r.as_ref().ok().copied(),
        threshold,
        status: status_of(&r, |v| *v < threshold),
        error: error_text(&r),
    }
}

fn euler(ctx: &Ctx, out: &mut Report) {
    let t = ctx.thresholds();
    for (spec, name, d) in ctx.cases() {
        for &m in &ctx.config.identity_m_set {
            let r = check_euler_relation(spec, d, m, &ctx.quad);
            out.euler.push(identity(spec, name, "euler_relation", Some(m), r, t.euler));
        }
        let r = check_invariance_condition(spec, d, &ctx.quad);
        out.euler.push(identity(spec, name, "invariance_condition", None, r, t.invariance_condition));
    }
}

fn representation(ctx: &Ctx, out: &mut Report) {
    let t = ctx.thresholds();
    for (spec, name, d) in ctx.cases() {
        for &m in &ctx.config.identity_m_set {
            let r = check_integral_representation(spec, d, m, &ctx.quad);
            out.representation.push(identity(spec, name, "integral_representation", Some(m), r, t.representation));
        }
    }
}

fn pde(ctx: &Ctx, out: &mut Report) {
    let t = ctx.thresholds();
    let (count, seed) = (ctx.config.points, ctx.config.seed);
    for (spec, name, d) in ctx.cases() {
        let ed = energy_density(spec);
        let m0 = spec.declared_m0();
        let wrong = m0 + 1.0;
        let residual = |m: f64| -> Result<ResidualReport, Error> {
            if spec.is_local() {
                residual_one_point_pde(&ed, d, m, &sample_points(d, count, seed))
            } else {
                residual_two_point_pde(&ed, d, m, &sample_pairs(d, count, seed))
            }
        };
        let both = residual(m0).and_then(|good| Ok((good, residual(wrong)?)));
        let ok = both.as_ref().ok();
        out.pde_residuals.push(PdeEntry {
            functional: spec.label(),
            density: name.to_string(),
            m0,
            residuals: ok.map(|(g, _)| g.clone().into()),
            threshold: t.pde,
            wrong_m0: wrong,
            wrong_m0_residuals: ok.map(|(_, w)| w.clone().into()),
            wrong_m0_floor: t.pde_wrong_m0_floor,
            status: status_of(&both, |(g, w)| {
                g.sample_points > 0 && g.max_rel_residual < t.pde && w.max_rel_residual > t.pde_wrong_m0_floor
            }),
            error: error_text(&both),
        });
    }
}

fn box_invariance(ctx: &Ctx, out: &mut Report) {
    let t = ctx.thresholds();
    let boxes = sample_boxes(ctx.config.boxes, ctx.config.seed);
    for (spec, name, d) in ctx.cases().filter(|(s, _, _)| s.is_local()) {
        let ed = energy_density(spec);
        let m0 = spec.declared_m0();
        for &(lower, upper) in &boxes {
            for &lambda in &ctx.config.box_lambdas {
                let r = check_box_invariance(&ed, d, m0, (lower, upper), lambda, &ctx.quad);
                out.box_invariance.push(BoxEntry {
                    functional: spec.label(),
                    density: name.to_string(),
                    m0,
                    lower,
                    upper,
                    lambda,
                    rel_error: r.as_ref().ok().copied(),
                    threshold: t.box_invariance,
                    status: status_of(&r, |e| *e < t.box_invariance),
                    error: error_text(&r),
                });
            }
        }
    }
}

fn forms(ctx: &Ctx, out: &mut Report) {
    let t = ctx.thresholds();
    for (spec, name, d) in ctx.cases() {
        let pts = sample_points(d, ctx.config.points, ctx.config.seed);
        let m0 = spec.declared_m0();
        let entry = |form: EquationId, threshold: f64| FormEntry {
            functional: spec.label(),
            density: name.to_string(),
            form: form.as_str(),
            m0,
            sample_points: pts.len(),
            c_hat: None,
            c_expected: None,
            residual: None,
            threshold,
            status: Status::Errored,
            error: None,
        };
        let identity = |form: EquationId, r: Result<ResidualReport, Error>| FormEntry {
            residual: r.as_ref().ok().map(|r| r.max_rel_residual),
            status: status_of(&r, |r| r.sample_points > 0 && r.max_rel_residual < t.form_identity),
            error: error_text(&r),
            ..entry(form, t.form_identity)
        };
        let e = match spec.kind() {
            FunctionalKind::NumberOfElectrons | FunctionalKind::ThomasFermi => {
                let c = if spec.kind() == FunctionalKind::ThomasFermi { C_TF } else { 1.0 };
                let r = check_solution_form_density(&energy_density(spec), m0, d, &pts);
                FormEntry {
                    c_hat: r.as_ref().ok().map(|f| f.c_hat),
                    c_expected: Some(c),
                    residual: r.as_ref().ok().map(|f| f.spread),
                    status: status_of(&r, |f| f.spread < t.form_spread && ((f.c_hat - c) / c).abs() < t.form_spread),
                    error: error_text(&r),
                    ..entry(EquationId::SolutionFormDensity, t.form_spread)
                }
            }
            FunctionalKind::VonWeizsaecker => identity(EquationId::SolutionFormTs, check_ts_form(d, &pts)),
            FunctionalKind::ExternalCoulomb { z } => {
                identity(EquationId::SolutionFormCoordinate, check_solution_form_coordinate(d, z, m0, &pts))
            }
            // The two-point integrand has no one-point solution form.
            FunctionalKind::Hartree => continue,
        };
        out.forms.push(e);
    }
}

/// Validates `config` and executes its checks in declaration order.
/// Engine failures are recorded per entry; only configuration problems
/// abort the run.
pub fn run(config: &RunConfig) -> Result<Report, ConfigError> {
    let plan = config.validate()?;
    let quad = config.quadrature.to_spec().build().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let ctx = Ctx { config, plan: &plan, quad };
    let mut report = Report {
        version: VERSION,
        config: config.clone(),
        homogeneity: Vec::new(),
        invariance: Vec::new(),
        euler: Vec::new(),
        representation: Vec::new(),
        pde_residuals: Vec::new(),
        box_invariance: Vec::new(),
        forms: Vec::new(),
        timings: None,
        timestamp: 0,
    };
    let mut timings = BTreeMap::new();
    let mut done = Vec::new();
    for &check in &config.checks {
        if done.contains(&check) {
            continue;
        }
        done.push(check);
        let start = Instant::now();
        match check {
            Check::Homogeneity => homogeneity(&ctx, &mut report),
            Check::Invariance => invariance(&ctx, &mut report),
            Check::Euler => euler(&ctx, &mut report),
            Check::Representation => representation(&ctx, &mut report),
            Check::Pde => pde(&ctx, &mut report),
            Check::Box => box_invariance(&ctx, &mut report),
            Check::Forms => forms(&ctx, &mut report),
        }
        timings.insert(check.name(), start.elapsed().as_secs_f64());
    }
    if config.output.timings {
        report.timings = Some(timings);
    }
    report.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(report)
}
