//! `diamond`: ε sweep of the causal-diamond entropy.

use std::cell::RefCell;

use fermionic_entropy::dirac::{
    area_law_sweep, default_half_width, geometric_ladder, DiracConfig, Resolution, SweepOptions, SweepPoint,
    MIN_LADDER,
};
use fermionic_entropy::Error;
use serde::Serialize;
use serde_json::{json, Map, Value};

use super::{positive, Globals};
use crate::cli::DiamondArgs;
use crate::error::{CliError, CliResult};
use crate::output::{json_num, num, RowWriter, RunContext};

/// Slope of the enhanced area law in two dimensions.
pub const AREA_LAW_SLOPE: f64 = 1.0 / 6.0;

pub const COLUMNS: [&str; 15] = [
    "index",
    "epsilon",
    "h",
    "n_grid",
    "s_term1",
    "s_term2",
    "s",
    "clamp_max",
    "clamp_count",
    "spectrum_min",
    "spectrum_max",
    "domain_change",
    "step_change",
    "converged",
    "mass_lambda",
];

#[derive(Clone, Debug, Serialize)]
pub struct DiamondParams {
    pub mass: f64,
    pub lambda: f64,
    pub epsilons: Vec<f64>,
    pub half_width: f64,
    pub resolution: Resolution,
    pub convergence: bool,
    pub convergence_tol: f64,
    pub max_concurrent: usize,
}

impl DiamondParams {
    pub fn from_args(args: DiamondArgs) -> CliResult<Self> {
        let mass = args.mass.unwrap_or(5.0);
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(CliError::Config(format!("mass must be non-negative, got {mass}")));
        }
        let lambda = positive("lambda", args.lambda.unwrap_or(1.0))?;
        let epsilons = match args.epsilons {
            Some(e) => e,
            None => {
                let hi = positive("eps_max", args.eps_max.unwrap_or(lambda / 8.0))?;
                let lo = positive("eps_min", args.eps_min.unwrap_or(lambda / 256.0))?;
                let ratio = args.ratio.unwrap_or(std::f64::consts::FRAC_1_SQRT_2);
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(CliError::Config(format!("ratio must lie in (0, 1), got {ratio}")));
                }
                geometric_ladder(hi, lo, ratio)
            }
        };
        let defaults = Resolution::default();
        let p = Self {
            mass,
            lambda,
            half_width: args.half_width.unwrap_or_else(|| default_half_width(mass, lambda)),
            resolution: Resolution {
                points_per_epsilon: args.points_per_epsilon.unwrap_or(defaults.points_per_epsilon),
                cutoff_factor: args.cutoff_factor.unwrap_or(defaults.cutoff_factor),
                k_points: args.k_points.unwrap_or(defaults.k_points),
            },
            epsilons,
            convergence: args.convergence.unwrap_or(true),
            convergence_tol: args.convergence_tol.unwrap_or(0.01),
            max_concurrent: args.max_concurrent.unwrap_or(1).max(1),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn base(&self) -> DiracConfig {
        DiracConfig::resolved(
            self.mass,
            self.epsilons[0],
            self.lambda,
            Some(self.half_width),
            &self.resolution,
        )
    }

    pub fn options(&self) -> SweepOptions {
        SweepOptions {
            resolution: self.resolution,
            domain_half_width: Some(self.half_width),
            check_convergence: self.convergence,
            convergence_tol: self.convergence_tol,
            max_concurrent: self.max_concurrent,
        }
    }

    /// Every rung and every convergence variant must pass the grid
    /// invariants before anything is allocated.
    fn validate(&self) -> CliResult<()> {
        if self.epsilons.len() < MIN_LADDER {
            return Err(CliError::at_validation(Error::LadderTooShort {
                len: self.epsilons.len(),
                min: MIN_LADDER,
            }));
        }
        if self.epsilons.windows(2).any(|w| !(w[1] < w[0])) || !(self.epsilons[self.epsilons.len() - 1] > 0.0) {
            return Err(CliError::Config("ε ladder must be positive and strictly descending".into()));
        }
        let fine = Resolution {
            points_per_epsilon: 2.0 * self.resolution.points_per_epsilon,
            ..self.resolution
        };
        for &eps in &self.epsilons {
            let cfg = DiracConfig::resolved(self.mass, eps, self.lambda, Some(self.half_width), &self.resolution);
            cfg.validate().map_err(CliError::at_validation)?;
            if self.convergence {
                let hw = Some(cfg.domain_half_width);
                DiracConfig::resolved(self.mass, eps, self.lambda, Some(2.0 * cfg.domain_half_width), &self.resolution)
                    .validate()
                    .map_err(CliError::at_validation)?;
                DiracConfig::resolved(self.mass, eps, self.lambda, hw, &fine)
                    .validate()
                    .map_err(CliError::at_validation)?;
            }
        }
        Ok(())
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn point_row(i: usize, p: &SweepPoint, mass_lambda: f64) -> Vec<String> {
    let r = &p.result;
    vec![
        i.to_string(),
        num(p.epsilon),
        num(r.h),
        r.n_grid.to_string(),
        num(r.interior_term),
        num(r.bulk_term),
        num(r.entropy),
        num(r.clamp.max_magnitude),
        r.clamp.count.to_string(),
        num(r.spectrum_min),
        num(r.spectrum_max),
        opt(p.doubled_domain_change),
        opt(p.halved_step_change),
        p.converged.map(|c| c.to_string()).unwrap_or_default(),
        num(mass_lambda),
    ]
}

pub fn run(args: DiamondArgs, g: &Globals) -> CliResult<()> {
    let p = DiamondParams::from_args(args)?;
    let base = p.base();
    let ctx = RunContext::start("diamond", &p, g.seed, &g.out, g.format)?;
    let rows = RefCell::new(ctx.rows(&COLUMNS)?);
    let write_error: RefCell<Option<CliError>> = RefCell::new(None);
    let done = RefCell::new(0usize);
    let outcome = area_law_sweep(&base, &p.epsilons, &p.options(), |i, point| {
        let mut rows: std::cell::RefMut<'_, RowWriter> = rows.borrow_mut();
        if let Err(e) = rows.write(&point_row(i, point, base.mass_lambda())) {
            write_error.borrow_mut().get_or_insert(e);
        }
        *done.borrow_mut() += 1;
    });
    if let Some(e) = write_error.into_inner() {
        return Err(e);
    }
    match outcome {
        Ok(sweep) => {
            let f = &sweep.fit;
            let mut summary = Map::new();
            summary.insert("slope".into(), json_num(f.fit.slope));
            summary.insert("intercept".into(), json_num(f.fit.intercept));
            summary.insert("slope_stderr".into(), json_num(f.fit.slope_stderr));
            summary.insert("intercept_stderr".into(), json_num(f.fit.intercept_stderr));
            summary.insert("window".into(), json!([f.window.0, f.window.1]));
            summary.insert("residuals".into(), json!(f.fit.residuals));
            summary.insert("non_scaling".into(), json!(f.non_scaling));
            summary.insert("monotone".into(), json!(f.monotone));
            summary.insert("all_converged".into(), json!(sweep.all_converged()));
            summary.insert("converged".into(), json!(sweep.points.iter().map(|p| p.converged).collect::<Vec<_>>()));
            summary.insert("mass_lambda".into(), json_num(sweep.mass_lambda));
            summary.insert("massless".into(), json!(sweep.massless));
            summary.insert("reference_slope".into(), json_num(AREA_LAW_SLOPE));
            summary.insert(
                "relative_deviation".into(),
                json_num((f.fit.slope - AREA_LAW_SLOPE).abs() / AREA_LAW_SLOPE),
            );
            let diagnostics = json!({
                "clamp_max": sweep.points.iter().map(|p| p.result.clamp.max_magnitude).fold(0.0, f64::max),
                "points": sweep.points.len(),
            });
            ctx.finish(summary, diagnostics, false, None)
        }
        Err(e) => {
            let mut summary = Map::new();
            summary.insert("points_completed".into(), json!(done.into_inner()));
            ctx.finish(summary, Value::Null, true, Some(e.to_string()))?;
            Err(e.into())
        }
    }
}
