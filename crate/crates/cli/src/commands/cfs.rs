//! `cfs`: lattice causal fermion system of a particle-number preserving state.

use std::path::PathBuf;

use fermionic_entropy::cfs::{build_lattice_cfs, cfs_subsystem_entropy};
use fermionic_entropy::random::{random_density, random_projector};
use fermionic_entropy::spectral::{subsystem_entropy_terms, von_neumann_entropy};
use fermionic_entropy::{HermitianOperator, ProjectorSpec};
use serde::Serialize;
use serde_json::{json, Map};

use super::{file_digest, stream_rng, Globals};
use crate::cli::{CfsArgs, StateKind};
use crate::error::{CliError, CliResult};
use crate::matrix::read_hermitian;
use crate::output::{json_num, num, RunContext};
use crate::params::{format_sites, SubsetSpec};

#[derive(Serialize)]
struct CfsParams {
    matrix: Option<PathBuf>,
    matrix_sha256: Option<String>,
    sites: Option<usize>,
    state: Option<StateKind>,
    filling: Option<usize>,
    subsets: SubsetSpec,
}

pub fn run(args: CfsArgs, g: &Globals) -> CliResult<()> {
    let subsets = args.subsets.unwrap_or(SubsetSpec::All);
    let (p, d): (CfsParams, HermitianOperator) = match args.matrix {
        Some(path) => {
            if args.sites.is_some() || args.state.is_some() || args.filling.is_some() {
                return Err(CliError::Usage("--matrix excludes --sites, --state and --filling".into()));
            }
            let d = read_hermitian(&path)?;
            let p = CfsParams {
                matrix_sha256: Some(file_digest(&path)?),
                matrix: Some(path),
                sites: None,
                state: None,
                filling: None,
                subsets,
            };
            (p, d)
        }
        None => {
            let n = args.sites.unwrap_or(6);
            let state = args.state.unwrap_or(StateKind::Pure);
            if n == 0 {
                return Err(CliError::Config("sites must be positive".into()));
            }
            let mut rng = stream_rng(g.seed, 0);
            let (filling, d) = match state {
                StateKind::Pure => {
                    let f = args.filling.unwrap_or(n / 2);
                    if f > n {
                        return Err(CliError::Config(format!("filling {f} exceeds {n} sites")));
                    }
                    (Some(f), random_projector(n, f, &mut rng))
                }
                StateKind::Mixed => {
                    if args.filling.is_some() {
                        return Err(CliError::Usage("--filling applies to pure states only".into()));
                    }
                    (None, random_density(n, 0.0, 1.0, &mut rng))
                }
            };
            let p = CfsParams {
                matrix: None,
                matrix_sha256: None,
                sites: Some(n),
                state: Some(state),
                filling,
                subsets,
            };
            (p, d)
        }
    };
    let sets = p.subsets.expand(d.dim())?;

    let ctx = RunContext::start("cfs", &p, g.seed, &g.out, g.format)?;
    let cfs = build_lattice_cfs(&d)?;
    let mut rows = ctx.rows(&["subset", "size", "s_cfs", "s_localized", "s_subsystem"])?;
    let mut by_mask = std::collections::HashMap::new();
    for set in &sets {
        let s_cfs = cfs_subsystem_entropy(&cfs, set)?;
        let t = subsystem_entropy_terms(&d, &ProjectorSpec::Indices(set.clone()))?;
        rows.write(&[
            format_sites(set),
            set.len().to_string(),
            num(s_cfs),
            num(t.localized),
            num(t.entropy()),
        ])?;
        by_mask.insert(set.iter().fold(0u64, |m, &i| m | 1 << i), (s_cfs, t.localized));
    }
    // V ↔ complement and cfs ↔ one-particle agreement over the evaluated sets
    let full = if d.dim() >= 64 { u64::MAX } else { (1u64 << d.dim()) - 1 };
    let mut complement_asymmetry = 0.0_f64;
    let mut formalism_gap = 0.0_f64;
    for (&mask, &(s, local)) in &by_mask {
        formalism_gap = formalism_gap.max((s - local).abs());
        if let Some(&(sc, _)) = by_mask.get(&(full & !mask)) {
            complement_asymmetry = complement_asymmetry.max((s - sc).abs());
        }
    }
    let mut summary = Map::new();
    summary.insert("sites".into(), json!(d.dim()));
    summary.insert("hilbert_dim".into(), json!(cfs.hilbert_dim()));
    summary.insert("entropy".into(), json_num(von_neumann_entropy(&d)?));
    summary.insert("subsets".into(), json!(sets.len()));
    summary.insert("max_complement_asymmetry".into(), json_num(complement_asymmetry));
    summary.insert("max_formalism_gap".into(), json_num(formalism_gap));
    ctx.finish(summary, serde_json::Value::Null, false, None)
}
