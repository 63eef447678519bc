//! `kitaev`: Gaussian states of the Kitaev chain.

use fermionic_entropy::gaussian::{
    entropy_from_j, ground_state, kitaev_chain, restrict_subsystem, thermal_state, Boundary,
};
use serde::Serialize;
use serde_json::{json, Map};

use super::{finite, Globals};
use crate::cli::{BoundaryArg, KitaevArgs};
use crate::error::{CliError, CliResult};
use crate::output::{json_num, num, RunContext};
use crate::params::{format_sites, require, Beta, SubsetSpec};

#[derive(Serialize)]
struct KitaevParams {
    sites: usize,
    mu: f64,
    hopping: f64,
    delta: f64,
    beta: Beta,
    boundary: BoundaryArg,
    subsets: SubsetSpec,
}

pub fn run(args: KitaevArgs, g: &Globals) -> CliResult<()> {
    let p = KitaevParams {
        sites: require(args.sites, "sites")?,
        mu: finite("mu", args.mu.unwrap_or(0.0))?,
        hopping: finite("hopping", args.hopping.unwrap_or(1.0))?,
        delta: finite("delta", args.delta.unwrap_or(0.0))?,
        beta: args.beta.unwrap_or(Beta(f64::INFINITY)),
        boundary: args.boundary.unwrap_or(BoundaryArg::Open),
        subsets: args.subsets.unwrap_or(SubsetSpec::Contiguous),
    };
    if p.beta.0.is_nan() || p.beta.0 < 0.0 {
        return Err(CliError::Config(format!("inverse temperature must be non-negative, got {}", p.beta)));
    }
    let boundary = match p.boundary {
        BoundaryArg::Open => Boundary::Open,
        BoundaryArg::Periodic => Boundary::Periodic,
    };
    let h = kitaev_chain(p.sites, p.mu, p.hopping, p.delta, boundary).map_err(CliError::at_validation)?;
    let subsets = p.subsets.expand(p.sites)?;

    let ctx = RunContext::start("kitaev", &p, g.seed, &g.out, g.format)?;
    let state = if p.beta.0.is_infinite() {
        ground_state(&h)?
    } else {
        thermal_state(&h, p.beta.0)?
    };
    let mut rows = ctx.rows(&["subset", "size", "entropy"])?;
    for set in &subsets {
        let s = if set.is_empty() {
            0.0
        } else {
            entropy_from_j(&restrict_subsystem(&state.kahler, set)?)?
        };
        rows.write(&[format_sites(set), set.len().to_string(), num(s)])?;
    }
    let j2 = state.kahler.j_squared_spectrum()?;
    let (bogo_a, bogo_b) = state.modes.transform.defects();
    let mut summary = Map::new();
    summary.insert("ground_energy".into(), json_num(h.ground_energy()?));
    summary.insert("entropy".into(), json_num(entropy_from_j(&state.kahler)?));
    summary.insert("quasiparticle_energies".into(), json!(state.modes.energies));
    summary.insert("particle_number_preserving".into(), json!(h.is_particle_number_preserving()));
    summary.insert("degenerate_zero_mode".into(), json!(state.has_degenerate_zero_mode()));
    summary.insert("j_squared_min".into(), json_num(j2.first().copied().unwrap_or(0.0)));
    summary.insert("j_squared_max".into(), json_num(j2.last().copied().unwrap_or(0.0)));
    let diagnostics = json!({
        "j_defect": state.kahler.j_defect(),
        "purity_defect": state.kahler.purity_defect(),
        "bogoliubov_defects": [bogo_a, bogo_b],
        "zero_modes": state.zero_modes,
    });
    ctx.finish(summary, diagnostics, false, None)
}
