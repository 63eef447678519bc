//! `entropy`, `renyi`, `relative` and `random-density`.

use std::path::PathBuf;

use fermionic_entropy::random::random_density;
use fermionic_entropy::spectral::{
    check_kappa, density_eigenvalues, eta, eta_kappa, modular_from_density, relative_entropy,
    subsystem_entropy_terms, CLAMP_TOL,
};
use fermionic_entropy::{ProjectorSpec, RelativeEntropy};
use serde::Serialize;
use serde_json::{json, Map, Value};

use super::{file_digest, stream_rng, Globals};
use crate::cli::{EntropyArgs, RandomDensityArgs, RelativeArgs, RenyiArgs};
use crate::error::{CliError, CliResult};
use crate::matrix::{read_hermitian, write_matrix};
use crate::output::{json_num, num, RunContext};
use crate::params::{format_sites, require, SubsetSpec};

const HEADER: [&str; 3] = ["quantity", "parameter", "value"];

#[derive(Serialize)]
struct EntropyParams {
    matrix: PathBuf,
    matrix_sha256: String,
    renyi: Vec<f64>,
    subsystem: Option<SubsetSpec>,
    modular: bool,
}

pub fn run_entropy(args: EntropyArgs, g: &Globals) -> CliResult<()> {
    let matrix = require(args.matrix, "matrix")?;
    let renyi = args.renyi.unwrap_or_default();
    for &k in &renyi {
        check_kappa(k).map_err(CliError::at_validation)?;
    }
    let params = EntropyParams {
        matrix_sha256: file_digest(&matrix)?,
        matrix,
        renyi,
        subsystem: args.subsystem,
        modular: args.modular.unwrap_or(false),
    };
    let d = read_hermitian(&params.matrix)?;
    let subsets = match &params.subsystem {
        Some(s) => s.expand(d.dim())?,
        None => Vec::new(),
    };

    let ctx = RunContext::start("entropy", &params, g.seed, &g.out, g.format)?;
    let mut rows = ctx.rows(&HEADER)?;
    let (values, clamp) = density_eigenvalues(&d, CLAMP_TOL)?;
    let s: f64 = values.iter().map(|&x| eta(x)).sum();
    rows.write(&["von_neumann".into(), String::new(), num(s)])?;
    let mut summary = Map::new();
    summary.insert("dim".into(), json!(d.dim()));
    summary.insert("von_neumann".into(), json_num(s));
    let mut renyi_out = Map::new();
    for &k in &params.renyi {
        let r: f64 = values.iter().map(|&x| eta_kappa(x, k)).sum::<Result<f64, _>>()?;
        rows.write(&["renyi".into(), num(k), num(r)])?;
        renyi_out.insert(num(k), json_num(r));
    }
    summary.insert("renyi".into(), Value::Object(renyi_out));
    let mut subsystem_out = Vec::new();
    for set in subsets {
        let t = subsystem_entropy_terms(&d, &ProjectorSpec::Indices(set.clone()))?;
        let label = format_sites(&set);
        rows.write(&["subsystem_localized".into(), label.clone(), num(t.localized)])?;
        rows.write(&["subsystem_bulk".into(), label.clone(), num(t.bulk)])?;
        rows.write(&["subsystem".into(), label.clone(), num(t.entropy())])?;
        subsystem_out.push(json!({"sites": set, "entropy": json_num(t.entropy())}));
    }
    summary.insert("subsystems".into(), Value::Array(subsystem_out));
    if params.modular {
        let m = modular_from_density(&d)?;
        for (i, h) in m.hamiltonian.iter().enumerate() {
            rows.write(&["modular_hamiltonian".into(), i.to_string(), num(*h)])?;
        }
    }
    summary.insert("clamp_count".into(), json!(clamp.count));
    summary.insert("clamp_max".into(), json_num(clamp.max_magnitude));
    ctx.finish(summary, json!({"clamp": clamp}), false, None)
}

#[derive(Serialize)]
struct RenyiParams {
    matrix: PathBuf,
    matrix_sha256: String,
    kappa: Vec<f64>,
}

pub fn run_renyi(args: RenyiArgs, g: &Globals) -> CliResult<()> {
    let matrix = require(args.matrix, "matrix")?;
    let kappa = require(args.kappa, "kappa")?;
    if kappa.is_empty() {
        return Err(CliError::Usage("at least one Rényi order is required".into()));
    }
    for &k in &kappa {
        check_kappa(k).map_err(CliError::at_validation)?;
    }
    let params = RenyiParams {
        matrix_sha256: file_digest(&matrix)?,
        matrix,
        kappa,
    };
    let d = read_hermitian(&params.matrix)?;
    let ctx = RunContext::start("renyi", &params, g.seed, &g.out, g.format)?;
    let mut rows = ctx.rows(&HEADER)?;
    let (values, clamp) = density_eigenvalues(&d, CLAMP_TOL)?;
    let mut out = Map::new();
    for &k in &params.kappa {
        let r: f64 = values.iter().map(|&x| eta_kappa(x, k)).sum::<Result<f64, _>>()?;
        rows.write(&["renyi".into(), num(k), num(r)])?;
        out.insert(num(k), json_num(r));
    }
    let mut summary = Map::new();
    summary.insert("dim".into(), json!(d.dim()));
    summary.insert("renyi".into(), Value::Object(out));
    ctx.finish(summary, json!({"clamp": clamp}), false, None)
}

#[derive(Serialize)]
struct RelativeParams {
    matrix: PathBuf,
    matrix_sha256: String,
    reference: PathBuf,
    reference_sha256: String,
}

pub fn run_relative(args: RelativeArgs, g: &Globals) -> CliResult<()> {
    let matrix = require(args.matrix, "matrix")?;
    let reference = require(args.reference, "reference")?;
    let params = RelativeParams {
        matrix_sha256: file_digest(&matrix)?,
        reference_sha256: file_digest(&reference)?,
        matrix,
        reference,
    };
    let dt = read_hermitian(&params.matrix)?;
    let d = read_hermitian(&params.reference)?;
    if dt.dim() != d.dim() {
        return Err(CliError::Config(format!(
            "state has dimension {}, reference has {}",
            dt.dim(),
            d.dim()
        )));
    }
    let ctx = RunContext::start("relative", &params, g.seed, &g.out, g.format)?;
    let mut rows = ctx.rows(&HEADER)?;
    let r = relative_entropy(&dt, &d)?;
    rows.write(&["relative_entropy".into(), String::new(), num(r.as_f64())])?;
    let mut summary = Map::new();
    summary.insert("dim".into(), json!(d.dim()));
    summary.insert("relative_entropy".into(), json_num(r.as_f64()));
    summary.insert("infinite".into(), json!(matches!(r, RelativeEntropy::Infinite)));
    ctx.finish(summary, Value::Null, false, None)
}

#[derive(Serialize)]
struct RandomDensityParams {
    dim: usize,
    lo: f64,
    hi: f64,
    output: PathBuf,
}

pub fn run_random_density(args: RandomDensityArgs, g: &Globals) -> CliResult<()> {
    let params = RandomDensityParams {
        dim: require(args.dim, "dim")?,
        lo: args.lo.unwrap_or(0.0),
        hi: args.hi.unwrap_or(1.0),
        output: require(args.output, "output")?,
    };
    if params.dim == 0 || !(0.0 <= params.lo && params.lo <= params.hi && params.hi <= 1.0) {
        return Err(CliError::Config("need dim ≥ 1 and 0 ≤ lo ≤ hi ≤ 1".into()));
    }
    let d = random_density(params.dim, params.lo, params.hi, &mut stream_rng(g.seed, 0));
    write_matrix(&params.output, &d.into_mat())
}
