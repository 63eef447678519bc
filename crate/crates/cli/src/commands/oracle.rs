//! `oracle-check`: one-particle formulas against exact Fock-space results.

use fermionic_entropy::fock::{
    fock_entropy, fock_relative_entropy, fock_renyi, partial_trace, statistical_operator_from_density, MAX_MODES,
};
use fermionic_entropy::random::{random_density, random_subset};
use fermionic_entropy::spectral::{relative_entropy, renyi_entropy, von_neumann_entropy};
use fermionic_entropy::Error;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map};

use super::{stream_rng, Globals};
use crate::cli::OracleArgs;
use crate::error::{CliError, CliResult};
use crate::output::{json_num, num, RunContext};

pub const RENYI_ORDERS: [f64; 3] = [0.5, 2.0, 3.0];
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct OracleParams {
    pub modes: usize,
    pub trials: usize,
    pub tolerance: f64,
}

/// Names of the checks, in output order.
pub fn check_names() -> Vec<String> {
    let mut names = vec!["von_neumann".to_string()];
    names.extend(RENYI_ORDERS.iter().map(|k| format!("renyi_{k}")));
    names.push("entanglement".into());
    names.push("relative".into());
    names
}

/// Deviations of one trial, in the order of [`check_names`], and the
/// relative entropy value.
fn trial(n: usize, seed: u64, index: usize) -> Result<(Vec<f64>, f64), Error> {
    let mut rng = stream_rng(seed, index as u64);
    let d = random_density(n, 0.0, 1.0, &mut rng);
    let w = statistical_operator_from_density(&d)?;
    let mut dev = vec![(fock_entropy(&w)? - von_neumann_entropy(&d)?).abs()];
    for k in RENYI_ORDERS {
        dev.push((fock_renyi(&w, k)? - renyi_entropy(&d, k)?).abs());
    }
    let size = rng.random_range(1..=n);
    let keep = random_subset(n, size, &mut rng);
    let local = von_neumann_entropy(&d.compress(&keep)?)?;
    dev.push((fock_entropy(&partial_trace(&w, &keep)?)? - local).abs());
    // full support so both sides are finite
    let a = random_density(n, 0.02, 0.98, &mut rng);
    let b = random_density(n, 0.02, 0.98, &mut rng);
    let fock = fock_relative_entropy(
        &statistical_operator_from_density(&a)?,
        &statistical_operator_from_density(&b)?,
    )?
    .as_f64();
    let one = relative_entropy(&a, &b)?.as_f64();
    dev.push((fock - one).abs());
    Ok((dev, one))
}

pub struct OracleReport {
    pub max_deviation: Vec<f64>,
    pub min_relative: f64,
}

pub fn oracle_check(p: &OracleParams, seed: u64) -> Result<OracleReport, Error> {
    let results: Vec<(Vec<f64>, f64)> = (0..p.trials)
        .into_par_iter()
        .map(|i| trial(p.modes, seed, i))
        .collect::<Result<_, _>>()?;
    let mut max_deviation = vec![0.0_f64; check_names().len()];
    let mut min_relative = f64::INFINITY;
    for (dev, rel) in results {
        for (m, d) in max_deviation.iter_mut().zip(dev) {
            *m = m.max(d);
        }
        min_relative = min_relative.min(rel);
    }
    Ok(OracleReport {
        max_deviation,
        min_relative,
    })
}

pub fn run(args: OracleArgs, g: &Globals) -> CliResult<()> {
    let p = OracleParams {
        modes: args.modes.unwrap_or(6),
        trials: args.trials.unwrap_or(100),
        tolerance: args.tolerance.unwrap_or(DEFAULT_TOLERANCE),
    };
    if p.modes > MAX_MODES {
        return Err(CliError::at_validation(Error::TooManyModes {
            n: p.modes,
            max: MAX_MODES,
        }));
    }
    if p.modes == 0 || p.trials == 0 || !(p.tolerance > 0.0) {
        return Err(CliError::Config("need modes ≥ 1, trials ≥ 1 and a positive tolerance".into()));
    }
    let ctx = RunContext::start("oracle-check", &p, g.seed, &g.out, g.format)?;
    let report = oracle_check(&p, g.seed)?;
    let mut rows = ctx.rows(&["check", "n_modes", "trials", "max_deviation", "tolerance", "passed"])?;
    let mut summary = Map::new();
    let mut failed = Vec::new();
    for (name, &dev) in check_names().iter().zip(&report.max_deviation) {
        let passed = dev < p.tolerance;
        if !passed {
            failed.push(name.clone());
        }
        rows.write(&[
            name.clone(),
            p.modes.to_string(),
            p.trials.to_string(),
            num(dev),
            num(p.tolerance),
            passed.to_string(),
        ])?;
        summary.insert(format!("max_deviation_{name}"), json_num(dev));
    }
    let klein = report.min_relative >= -1e-10;
    summary.insert("min_relative_entropy".into(), json_num(report.min_relative));
    summary.insert("klein_positivity".into(), json!(klein));
    summary.insert("passed".into(), json!(failed.is_empty() && klein));
    ctx.finish(summary, serde_json::Value::Null, false, None)?;
    if !klein {
        failed.push("klein_positivity".into());
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Gate(format!("checks above tolerance: {}", failed.join(", "))))
    }
}
