use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Check, ConfigError, RunConfig, SEED_ENV};
use crate::parse::{parse_reals, split_list};

#[derive(Debug, Parser)]
#[command(name = "scalelab", version, about = "Scaling-degree and local-invariance checks for density functionals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Fit p(m) from λ sweeps
    Homogeneity,
    /// Fit the affine law p(m) = q·m + k and m0 = −k/q
    Invariance,
    /// Euler relation, invariance condition and integral representation
    Representation,
    /// Pointwise local-invariance equation residuals
    PdeResiduals,
    /// Integrals over finite boxes under simultaneous scaling
    BoxInvariance,
    /// General solution forms of the local equation
    Forms,
    /// Every check
    All,
    /// Checks listed in the config file
    Run,
}

impl Command {
    fn checks(self) -> Option<Vec<Check>> {
        Some(match self {
            Command::Homogeneity => vec![Check::Homogeneity],
            Command::Invariance => vec![Check::Invariance],
            Command::Representation => vec![Check::Euler, Check::Representation],
            Command::PdeResiduals => vec![Check::Pde],
            Command::BoxInvariance => vec![Check::Box],
            Command::Forms => vec![Check::Forms],
            Command::All => Check::ALL.to_vec(),
            Command::Run => return None,
        })
    }
}

#[derive(Debug, Default, Args)]
pub struct Opts {
    /// TOML config file; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Functionals, comma separated: ne, ext(z=..), hartree, tf, vw
    #[arg(long = "functional", global = true)]
    pub functionals: Vec<String>,
    /// Density, e.g. gaussian:alpha=1,n=1 (repeatable)
    #[arg(long = "density", global = true)]
    pub densities: Vec<String>,
    /// Scaling degrees for the fits, comma separated
    #[arg(long, global = true)]
    pub m: Option<String>,
    /// Scaling degrees for the integral identities, comma separated
    #[arg(long, global = true)]
    pub identity_m: Option<String>,
    /// Scaling strengths, comma separated
    #[arg(long, global = true)]
    pub lambdas: Option<String>,
    /// Box scaling strengths, comma separated
    #[arg(long, global = true)]
    pub box_lambdas: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sample points for pointwise checks
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Random boxes for box invariance
    #[arg(long, global = true)]
    pub boxes: Option<usize>,
    #[arg(long, global = true)]
    pub r_max: Option<f64>,
    #[arg(long, global = true)]
    pub radial_panels: Option<usize>,
    #[arg(long, global = true)]
    pub radial_nodes: Option<usize>,
    #[arg(long, global = true)]
    pub box_panels: Option<usize>,
    #[arg(long, global = true)]
    pub box_nodes: Option<usize>,
    #[arg(long, global = true)]
    pub tail_tolerance: Option<f64>,
    /// JSON report path
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for per-sweep CSV files
    #[arg(long, global = true)]
    pub csv_dir: Option<PathBuf>,
    /// Record wall-clock seconds per check
    #[arg(long, global = true)]
    pub timings: bool,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl Cli {
    /// Defaults, then the config file, then `SCALELAB_SEED`, then flags.
    pub fn resolve(&self, seed_env: Option<String>) -> Result<RunConfig, ConfigError> {
        let o = &self.opts;
        let mut c = match &o.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        c.apply_env(seed_env)?;
        if let Some(checks) = self.command.checks() {
            c.checks = checks;
        }
        if !o.functionals.is_empty() {
            c.functionals = o.functionals.iter().flat_map(|s| split_list(s)).map(String::from).collect();
        }
        if !o.densities.is_empty() {
            c.densities = o.densities.clone();
        }
        set(&mut c.m_set, o.m.as_deref().map(parse_reals).transpose()?);
        set(&mut c.identity_m_set, o.identity_m.as_deref().map(parse_reals).transpose()?);
        set(&mut c.lambda_set, o.lambdas.as_deref().map(parse_reals).transpose()?);
        set(&mut c.box_lambdas, o.box_lambdas.as_deref().map(parse_reals).transpose()?);
        set(&mut c.seed, o.seed);
        set(&mut c.points, o.points);
        set(&mut c.boxes, o.boxes);
        let q = &mut c.quadrature;
        if o.r_max.is_some() {
            q.r_max = o.r_max;
        }
        set(&mut q.radial_panels, o.radial_panels);
        set(&mut q.radial_nodes, o.radial_nodes);
        set(&mut q.box_panels, o.box_panels);
        set(&mut q.box_nodes, o.box_nodes);
        set(&mut q.tail_tolerance, o.tail_tolerance);
        if o.out.is_some() {
            c.output.json = o.out.clone();
        }
        if o.csv_dir.is_some() {
            c.output.csv_dir = o.csv_dir.clone();
        }
        c.output.timings |= o.timings;
        Ok(c)
    }

    pub fn resolve_from_env(&self) -> Result<RunConfig, ConfigError> {
        self.resolve(std::env::var(SEED_ENV).ok())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("scalelab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn documented_invocation() {
        let c = cli(&[
            "invariance",
            "--functional",
            "hartree",
            "--density",
            "gaussian:alpha=1,n=1",
            "--m",
            "0,1,2,3",
            "--lambdas",
            "0.5,0.7071,1.4142,2",
            "--out",
            "report.json",
        ])
        .resolve(None)
        .unwrap();
        assert_eq!(c.checks, vec![Check::Invariance]);
        assert_eq!(c.functionals, vec!["hartree"]);
        assert_eq!(c.densities, vec!["gaussian:alpha=1,n=1"]);
        assert_eq!(c.lambda_set, vec![0.5, 0.7071, 1.4142, 2.0]);
        assert_eq!(c.output.json, Some(PathBuf::from("report.json")));
    }

    #[test]
    fn functional_lists_split_and_accumulate() {
        let c = cli(&["all", "--functional", "ne,ext(z=2)", "--functional", "vw"]).resolve(None).unwrap();
        assert_eq!(c.functionals, vec!["ne", "ext(z=2)", "vw"]);
        assert_eq!(c.checks.len(), 7);
    }

    #[test]
    fn seed_precedence() {
        assert_eq!(cli(&["forms"]).resolve(Some("5".into())).unwrap().seed, 5);
        assert_eq!(cli(&["forms", "--seed", "9"]).resolve(Some("5".into())).unwrap().seed, 9);
    }

    #[test]
    fn representation_runs_both_identities() {
        let c = cli(&["representation"]).resolve(None).unwrap();
        assert_eq!(c.checks, vec![Check::Euler, Check::Representation]);
    }

    #[test]
    fn bad_number_list_is_config_error() {
        assert!(cli(&["homogeneity", "--m", "0,x"]).resolve(None).is_err());
    }
}
