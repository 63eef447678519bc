//! Regularized Dirac sea in two dimensions, sampled on a spatial grid.
//!
//! The negative-frequency projector for `H(k) = kσ_z + mσ_x` is
//! `Π(k) = (ω - kσ_z - mσ_x) / 2ω`. Damped by `e^{-εω}` and Fourier
//! transformed, its 2×2 kernel is
//!
//! ```text
//! K(d) = A(d) - (i/2) S(d) σ_z - (m/2) C(d) σ_x
//! A(d) = (1/2π) ∫₀^K e^{-εω} cos(kd) dk
//! S(d) = (1/π)  ∫₀^K (k/ω) e^{-εω} sin(kd) dk
//! C(d) = (1/π)  ∫₀^K e^{-εω} cos(kd) / ω dk
//! ```
//!
//! and the one-particle density on the grid is `D = h·K(x_a - x_b)`.
//! Rotating the spinor basis with `R = (1 - iσ_x)/√2` makes `D` real
//! symmetric; entropies are computed in that basis.
//!
//! In the real basis the parity `(j, s) ↦ (N-1-j, 1-s)` commutes with `D`, so a
//! region symmetric about the grid centre splits into two sectors of half
//! the size.

use std::f64::consts::PI;

use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::linalg::{eigh_real, eigvalsh_real, HermitianOperator, C64};
use crate::spectral::{eta, relative_entropy, ClampReport, RelativeEntropy};

/// Half-width of the band outside `[0, 1]` tolerated in the spectrum of `D`.
pub const KERNEL_CLAMP_TOL: f64 = 1e-6;

/// Largest admissible tail `e^{-ε√(K² + m²)}` of the momentum integrand.
pub const TAIL_TOL: f64 = 1e-10;

/// Grid size guard, applied before anything is allocated.
pub const MAX_GRID_POINTS: usize = 16_384;

/// Minimum ladder length accepted by [`area_law_sweep`].
pub const MIN_LADDER: usize = 5;

const GL_ORDER: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Resolution {
    /// Grid points per regularization length, `ε/h ≥ 4`.
    pub points_per_epsilon: f64,
    /// `K·ε`.
    pub cutoff_factor: f64,
    /// Lower bound on the number of momentum nodes.
    pub k_points: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            points_per_epsilon: 4.0,
            cutoff_factor: 25.0,
            k_points: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiracConfig {
    pub mass: f64,
    pub epsilon: f64,
    pub lambda: f64,
    /// The grid covers `[-L, λ + L]`.
    pub domain_half_width: f64,
    pub grid_step: f64,
    pub k_cutoff: f64,
    pub k_points: usize,
}

/// `5/m`, or `5λ` when massless.
pub fn default_half_width(mass: f64, lambda: f64) -> f64 {
    if mass > 0.0 {
        5.0 / mass
    } else {
        5.0 * lambda
    }
}

fn aligned_count(length: f64, h: f64) -> usize {
    (length / h - 1e-9).ceil().max(0.0) as usize
}

impl DiracConfig {
    /// Grid step `λ / ceil(ppe·λ/ε)`, half-width rounded up to a multiple of
    /// it, cutoff `cutoff_factor/ε`.
    pub fn resolved(mass: f64, epsilon: f64, lambda: f64, half_width: Option<f64>, res: &Resolution) -> Self {
        let cells = (res.points_per_epsilon * lambda / epsilon - 1e-9).ceil().max(1.0);
        let h = lambda / cells;
        let l = half_width.unwrap_or_else(|| default_half_width(mass, lambda));
        Self {
            mass,
            epsilon,
            lambda,
            domain_half_width: aligned_count(l, h) as f64 * h,
            grid_step: h,
            k_cutoff: res.cutoff_factor / epsilon,
            k_points: res.k_points,
        }
    }

    pub fn grid(&self) -> Grid {
        let h = self.grid_step;
        Grid {
            h,
            n_left: (self.domain_half_width / h).round() as usize,
            n_inside: (self.lambda / h).round() as usize,
            origin: -self.domain_half_width,
        }
    }

    pub fn mass_lambda(&self) -> f64 {
        self.mass * self.lambda
    }

    /// Massless runs are outside the regime where the construction is
    /// justified; they are computed but tagged.
    pub fn is_massless(&self) -> bool {
        self.mass == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return bad(format!("mass must be non-negative, got {}", self.mass));
        }
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("lambda", self.lambda),
            ("grid_step", self.grid_step),
            ("k_cutoff", self.k_cutoff),
        ] {
            if !positive(v) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.domain_half_width >= 0.0) {
            return bad(format!("domain half-width must be non-negative, got {}", self.domain_half_width));
        }
        let rel = 1e-9;
        if self.grid_step > self.epsilon / 4.0 * (1.0 + rel) {
            return bad(format!(
                "grid under-resolved: h = {} exceeds ε/4 = {}",
                self.grid_step,
                self.epsilon / 4.0
            ));
        }
        if self.mass > 0.0 && self.domain_half_width < 5.0 / self.mass * (1.0 - rel) {
            return bad(format!(
                "domain half-width {} is below the decay margin 5/m = {}",
                self.domain_half_width,
                5.0 / self.mass
            ));
        }
        if self.k_cutoff < 20.0 / self.epsilon * (1.0 - rel) {
            return bad(format!("momentum cutoff {} is below 20/ε", self.k_cutoff));
        }
        for (name, len) in [("lambda", self.lambda), ("domain half-width", self.domain_half_width)] {
            let cells = len / self.grid_step;
            if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
                return bad(format!("{name} is not a multiple of the grid step"));
            }
        }
        if self.k_points < GL_ORDER {
            return bad(format!("k_points must be at least {GL_ORDER}"));
        }
        let n = self.grid().n_points();
        if n > MAX_GRID_POINTS {
            return bad(format!("grid has {n} points, limit is {MAX_GRID_POINTS}"));
        }
        Ok(())
    }
}

/// Cell midpoints `x_j = -L + (j + ½)h`; sites `n_left .. n_left + n_inside`
/// lie in `(0, λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub h: f64,
    pub n_left: usize,
    pub n_inside: usize,
    pub origin: f64,
}

impl Grid {
    pub fn n_points(&self) -> usize {
        self.n_inside + 2 * self.n_left
    }

    pub fn x(&self, j: usize) -> f64 {
        self.origin + (j as f64 + 0.5) * self.h
    }

    pub fn diamond(&self) -> Interval {
        Interval {
            start: self.n_left,
            len: self.n_inside,
        }
    }
}

/// A contiguous run of grid sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub start: usize,
    pub len: usize,
}

impl Interval {
    pub fn contains(&self, j: usize) -> bool {
        j >= self.start && j < self.start + self.len
    }

    fn is_centred(&self, n: usize) -> bool {
        self.start + self.len <= n && self.start == n - (self.start + self.len)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    (0..order)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=order {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss–Legendre nodes on `[0, K]`. Panels are at most half an
/// oscillation of `cos(k d_max)` wide, and at most `m/4` wide on `[0, 8m]`
/// where `1/ω` varies on the scale `m`.
fn momentum_nodes(cfg: &DiracConfig, d_max: f64) -> Vec<(f64, f64)> {
    let k_max = cfg.k_cutoff;
    let panels_min = (cfg.k_points / GL_ORDER).max(1) as f64;
    let base = (PI / d_max.max(cfg.grid_step)).min(k_max / panels_min);
    let mut edges = vec![0.0];
    let mut k = 0.0;
    while k < k_max {
        let width = if cfg.mass > 0.0 && k < 8.0 * cfg.mass {
            base.min(cfg.mass / 4.0)
        } else {
            base
        };
        k = (k + width).min(k_max);
        edges.push(k);
    }
    let gl = gauss_legendre(GL_ORDER);
    let mut nodes = Vec::with_capacity((edges.len() - 1) * GL_ORDER);
    for w in edges.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        nodes.extend(gl.iter().map(|&(x, wt)| (mid + half * x, half * wt)));
    }
    nodes
}

/// `A(jh)`, `S(jh)` and `m·C(jh)` for `j = 0..n`.
#[derive(Clone, Debug)]
pub struct KernelProfile {
    pub a: Vec<f64>,
    pub s: Vec<f64>,
    pub mc: Vec<f64>,
}

const OFFSET_BLOCK: usize = 64;

fn kernel_profile(cfg: &DiracConfig, n: usize) -> KernelProfile {
    let h = cfg.grid_step;
    let m = cfg.mass;
    let nodes = momentum_nodes(cfg, (n.max(2) - 1) as f64 * h);
    // per-node weights of the three integrands
    let weights: Vec<(f64, f64, f64, f64)> = nodes
        .iter()
        .map(|&(k, w)| {
            let omega = (k * k + m * m).sqrt();
            let damp = w * (-cfg.epsilon * omega).exp();
            let (wk, wm) = if omega > 0.0 {
                (damp * k / omega / PI, damp * m / omega / PI)
            } else {
                (0.0, 0.0)
            };
            (k, damp / (2.0 * PI), wk, wm)
        })
        .collect();

    // Offsets are processed in blocks: exact phases at the block start, then
    // a rotation recurrence. Sums over nodes run in a fixed order, so the
    // result does not depend on the thread count.
    let blocks: Vec<[Vec<f64>; 3]> = (0..n.div_ceil(OFFSET_BLOCK))
        .into_par_iter()
        .map(|b| {
            let j0 = b * OFFSET_BLOCK;
            let len = OFFSET_BLOCK.min(n - j0);
            let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
            for &(k, wa, ws, wc) in &weights {
                let (sin0, cos0) = (k * j0 as f64 * h).sin_cos();
                let (sin1, cos1) = (k * h).sin_cos();
                let (mut sn, mut cs) = (sin0, cos0);
                for j in 0..len {
                    out[0][j] += wa * cs;
                    out[1][j] += ws * sn;
                    out[2][j] += wc * cs;
                    let next_cs = cs * cos1 - sn * sin1;
                    sn = sn * cos1 + cs * sin1;
                    cs = next_cs;
                }
            }
            out
        })
        .collect();
    let mut profile = KernelProfile {
        a: Vec::with_capacity(n),
        s: Vec::with_capacity(n),
        mc: Vec::with_capacity(n),
    };
    for [a, s, c] in blocks {
        profile.a.extend(a);
        profile.s.extend(s);
        profile.mc.extend(c);
    }
    profile
}

/// The block-Toeplitz one-particle density `D = h·K(x_a - x_b)`.
#[derive(Clone, Debug)]
pub struct RegularizedKernel {
    pub config: DiracConfig,
    pub grid: Grid,
    pub profile: KernelProfile,
}

pub fn projector_kernel(cfg: &DiracConfig) -> Result<RegularizedKernel> {
    cfg.validate()?;
    let tail = (-cfg.epsilon * (cfg.k_cutoff.powi(2) + cfg.mass.powi(2)).sqrt()).exp();
    if tail > TAIL_TOL {
        return Err(Error::QuadratureUnderResolved { tail });
    }
    let grid = cfg.grid();
    Ok(RegularizedKernel {
        config: cfg.clone(),
        grid,
        profile: kernel_profile(cfg, grid.n_points()),
    })
}

impl RegularizedKernel {
    pub fn n_points(&self) -> usize {
        self.grid.n_points()
    }

    /// Entry `(s, s')` of the real-basis block at site offset `j = a - b`.
    pub fn real_entry(&self, offset: isize, s: usize, s2: usize) -> f64 {
        let j = offset.unsigned_abs();
        let p = &self.profile;
        let odd = if offset < 0 { -p.s[j] } else { p.s[j] };
        let v = match (s, s2) {
            (0, 0) | (1, 1) => p.a[j],
            (0, 1) => -0.5 * (p.mc[j] - odd),
            _ => -0.5 * (p.mc[j] + odd),
        };
        self.grid.h * v
    }

    /// Entry `(s, s')` of the chiral-basis block at site offset `a - b`.
    pub fn chiral_entry(&self, offset: isize, s: usize, s2: usize) -> C64 {
        let j = offset.unsigned_abs();
        let p = &self.profile;
        let odd = if offset < 0 { -p.s[j] } else { p.s[j] };
        let v = match (s, s2) {
            (0, 0) => C64::new(p.a[j], -0.5 * odd),
            (1, 1) => C64::new(p.a[j], 0.5 * odd),
            _ => C64::new(-0.5 * p.mc[j], 0.0),
        };
        v * self.grid.h
    }

    /// Index `2j + s`.
    pub fn real_dense(&self) -> Mat<f64> {
        let n = 2 * self.n_points();
        Mat::from_fn(n, n, |a, b| {
            self.real_entry((a / 2) as isize - (b / 2) as isize, a % 2, b % 2)
        })
    }

    pub fn chiral_dense(&self) -> Mat<C64> {
        let n = 2 * self.n_points();
        Mat::from_fn(n, n, |a, b| {
            self.chiral_entry((a / 2) as isize - (b / 2) as isize, a % 2, b % 2)
        })
    }

    /// Parity-sector block `D±[a][b] = D[a][b] ± D[a][Πb]` over the sector
    /// representatives.
    fn sector(&self, reps: &[(usize, usize)], sign: f64) -> Mat<f64> {
        let n = self.n_points();
        Mat::from_fn(reps.len(), reps.len(), |a, b| {
            let (j, s) = reps[a];
            let (j2, s2) = reps[b];
            let direct = self.real_entry(j as isize - j2 as isize, s, s2);
            let mirrored = self.real_entry(j as isize - (n - 1 - j2) as isize, s, 1 - s2);
            direct + sign * mirrored
        })
    }
}

/// One representative `(site, spinor)` per parity orbit.
fn sector_representatives(n: usize) -> Vec<(usize, usize)> {
    let mut reps: Vec<(usize, usize)> = (0..n / 2).flat_map(|j| [(j, 0), (j, 1)]).collect();
    if n % 2 == 1 {
        reps.push((n / 2, 0));
    }
    reps
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiamondEntropy {
    /// `tr η(χ D χ)`.
    pub interior_term: f64,
    /// `tr(χ η(D) χ)`.
    pub bulk_term: f64,
    pub entropy: f64,
    pub clamp: ClampReport,
    pub spectrum_min: f64,
    pub spectrum_max: f64,
    pub n_grid: usize,
    pub h: f64,
    pub region_sites: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Parity sectors when the region is centred, dense otherwise.
    Auto,
    Dense,
}

struct Partial {
    interior: f64,
    bulk: f64,
    clamp: ClampReport,
    min: f64,
    max: f64,
}

/// `(tr η(χMχ), tr(χ η(M) χ))` for a real symmetric `M` and a coordinate
/// projector `χ` given by `inside`.
fn localized_terms(m: &Mat<f64>, inside: &[usize]) -> Result<Partial> {
    let (mut values, vecs) = eigh_real(m.as_ref())?;
    let min = values.first().copied().unwrap_or(0.0);
    let max = values.last().copied().unwrap_or(0.0);
    let mut clamp = ClampReport::clamp(&mut values, KERNEL_CLAMP_TOL)?;
    let bulk: f64 = values
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let e = eta(d);
            if e == 0.0 {
                return 0.0;
            }
            e * inside.iter().map(|&i| vecs[(i, k)].powi(2)).sum::<f64>()
        })
        .sum();
    let interior = if inside.is_empty() {
        0.0
    } else {
        let sub = Mat::from_fn(inside.len(), inside.len(), |a, b| m[(inside[a], inside[b])]);
        let mut local = eigvalsh_real(sub.as_ref())?;
        clamp = clamp.merge(ClampReport::clamp(&mut local, KERNEL_CLAMP_TOL)?);
        local.iter().map(|&x| eta(x)).sum()
    };
    Ok(Partial {
        interior,
        bulk,
        clamp,
        min,
        max,
    })
}

/// `tr η(χDχ) - tr(χ η(D) χ)` for the sites of `region`.
pub fn region_entropy(kernel: &RegularizedKernel, region: Interval, method: Method) -> Result<DiamondEntropy> {
    let n = kernel.n_points();
    if region.start + region.len > n {
        return Err(Error::BadIndexSet {
            reason: format!("region {region:?} exceeds the {n}-point grid"),
        });
    }
    let parts: Vec<Partial> = if method == Method::Auto && region.is_centred(n) {
        let reps = sector_representatives(n);
        let inside: Vec<usize> = (0..reps.len()).filter(|&a| region.contains(reps[a].0)).collect();
        [1.0, -1.0]
            .into_par_iter()
            .map(|sign| localized_terms(&kernel.sector(&reps, sign), &inside))
            .collect::<Result<_>>()?
    } else {
        let inside: Vec<usize> = (0..2 * n).filter(|&a| region.contains(a / 2)).collect();
        vec![localized_terms(&kernel.real_dense(), &inside)?]
    };
    let interior_term = parts.iter().map(|p| p.interior).sum::<f64>();
    let bulk_term = parts.iter().map(|p| p.bulk).sum::<f64>();
    Ok(DiamondEntropy {
        interior_term,
        bulk_term,
        entropy: interior_term - bulk_term,
        clamp: parts.iter().fold(ClampReport::default(), |c, p| c.merge(p.clamp)),
        spectrum_min: parts.iter().map(|p| p.min).fold(f64::INFINITY, f64::min),
        spectrum_max: parts.iter().map(|p| p.max).fold(f64::NEG_INFINITY, f64::max),
        n_grid: n,
        h: kernel.grid.h,
        region_sites: region.len,
    })
}

/// Entanglement entropy of the interval `(0, λ)`.
pub fn diamond_entropy(cfg: &DiracConfig) -> Result<DiamondEntropy> {
    let kernel = projector_kernel(cfg)?;
    region_entropy(&kernel, kernel.grid.diamond(), Method::Auto)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOptions {
    pub resolution: Resolution,
    pub domain_half_width: Option<f64>,
    /// Recompute every point with `2L` and with `h/2`.
    pub check_convergence: bool,
    /// Relative change allowed by the convergence checks.
    pub convergence_tol: f64,
    /// Points evaluated concurrently; bounds peak memory.
    pub max_concurrent: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            resolution: Resolution::default(),
            domain_half_width: None,
            check_convergence: true,
            convergence_tol: 0.01,
            max_concurrent: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub result: DiamondEntropy,
    /// `|S(2L) - S| / |S|`.
    pub doubled_domain_change: Option<f64>,
    /// `|S(h/2) - S| / |S|`.
    pub halved_step_change: Option<f64>,
    pub converged: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AreaLawFit {
    /// Fit of `S` against `log(1/ε)` over the window.
    pub fit: LinearFit,
    /// Index range `[start, end)` of the ladder used.
    pub window: (usize, usize),
    /// Slope indistinguishable from zero.
    pub non_scaling: bool,
    /// `S` strictly increases along the ladder.
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub fit: AreaLawFit,
    pub mass_lambda: f64,
    pub massless: bool,
}

impl SweepResult {
    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|p| p.converged == Some(true))
    }
}

fn check_ladder(epsilons: &[f64]) -> Result<()> {
    if epsilons.len() < MIN_LADDER {
        return Err(Error::LadderTooShort {
            len: epsilons.len(),
            min: MIN_LADDER,
        });
    }
    if epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig("ε ladder must be positive and strictly descending".into()));
    }
    Ok(())
}

/// Least squares of `S` against `log(1/ε)` over the smallest-ε half of the
/// ladder.
pub fn fit_area_law(epsilons: &[f64], entropies: &[f64]) -> Result<AreaLawFit> {
    if epsilons.len() != entropies.len() {
        return Err(Error::DimensionMismatch {
            expected: epsilons.len(),
            found: entropies.len(),
        });
    }
    check_ladder(epsilons)?;
    let n = epsilons.len();
    let start = n - n.div_ceil(2);
    let x: Vec<f64> = epsilons[start..].iter().map(|e| -e.ln()).collect();
    let fit = linear_fit(&x, &entropies[start..]).ok_or(Error::Decomposition)?;
    let scale = entropies.iter().fold(1.0_f64, |m, s| m.max(s.abs()));
    Ok(AreaLawFit {
        non_scaling: fit.slope.abs() <= 1e-9 * scale,
        monotone: entropies.windows(2).all(|w| w[1] > w[0]),
        fit,
        window: (start, n),
    })
}

fn evaluate_point(base: &DiracConfig, eps: f64, opts: &SweepOptions) -> Result<SweepPoint> {
    let half_width = Some(opts.domain_half_width.unwrap_or(base.domain_half_width));
    let cfg = DiracConfig::resolved(base.mass, eps, base.lambda, half_width, &opts.resolution);
    if !opts.check_convergence {
        return Ok(SweepPoint {
            epsilon: eps,
            result: diamond_entropy(&cfg)?,
            doubled_domain_change: None,
            halved_step_change: None,
            converged: None,
        });
    }
    let wide = DiracConfig::resolved(
        base.mass,
        eps,
        base.lambda,
        Some(2.0 * cfg.domain_half_width),
        &opts.resolution,
    );
    let fine_res = Resolution {
        points_per_epsilon: 2.0 * opts.resolution.points_per_epsilon,
        ..opts.resolution
    };
    let fine = DiracConfig::resolved(base.mass, eps, base.lambda, Some(cfg.domain_half_width), &fine_res);
    let (result, (s_wide, s_fine)) = rayon::join(
        || diamond_entropy(&cfg),
        || rayon::join(|| diamond_entropy(&wide), || diamond_entropy(&fine)),
    );
    let result = result?;
    let rel = |s: f64| (s - result.entropy).abs() / result.entropy.abs().max(f64::MIN_POSITIVE);
    let dl = rel(s_wide?.entropy);
    let dh = rel(s_fine?.entropy);
    let point = SweepPoint {
        epsilon: eps,
        result,
        doubled_domain_change: Some(dl),
        halved_step_change: Some(dh),
        converged: Some(dl < opts.convergence_tol && dh < opts.convergence_tol),
    };
    Ok(point)
}

/// Evaluates the ladder in order and fits the enhanced area law. `on_point`
/// sees each finished point in ladder order, so callers can persist partial
/// sweeps.
pub fn area_law_sweep(
    base: &DiracConfig,
    epsilons: &[f64],
    opts: &SweepOptions,
    mut on_point: impl FnMut(usize, &SweepPoint),
) -> Result<SweepResult> {
    check_ladder(epsilons)?;
    // validate every rescaled configuration before any heavy work
    for &eps in epsilons {
        let half_width = Some(opts.domain_half_width.unwrap_or(base.domain_half_width));
        DiracConfig::resolved(base.mass, eps, base.lambda, half_width, &opts.resolution).validate()?;
    }
    let mut points = Vec::with_capacity(epsilons.len());
    for chunk in epsilons.chunks(opts.max_concurrent.max(1)) {
        let done: Vec<SweepPoint> = chunk
            .par_iter()
            .map(|&eps| evaluate_point(base, eps, opts))
            .collect::<Result<_>>()?;
        for p in done {
            on_point(points.len(), &p);
            points.push(p);
        }
    }
    let entropies: Vec<f64> = points.iter().map(|p| p.result.entropy).collect();
    let fit = fit_area_law(epsilons, &entropies)?;
    Ok(SweepResult {
        points,
        fit,
        mass_lambda: base.mass_lambda(),
        massless: base.is_massless(),
    })
}

/// Geometric ladder `ε_max·r^i` down to `ε_min` (inclusive within 1e-9).
pub fn geometric_ladder(eps_max: f64, eps_min: f64, ratio: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let e = eps_max * ratio.powi(i);
        if e < eps_min * (1.0 - 1e-9) {
            break;
        }
        out.push(e);
        i += 1;
    }
    out
}

/// A Gaussian wave packet `exp(-((x - x_c)·k_w)²/2) e^{i k_c x} u(k_c)`
/// with `u` an eigenspinor of `H(k_c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct WavePacket {
    pub k_center: f64,
    pub k_width: f64,
    pub x_center: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelativeScope {
    /// Both densities compressed to `(0, λ)`.
    Diamond,
    FullSpace,
}

/// Normalized eigenvector of `kσ_z + mσ_x` for eigenvalue `sign·ω`.
fn eigenspinor(k: f64, m: f64, sign: f64) -> [f64; 2] {
    let lam = sign * (k * k + m * m).sqrt();
    let a = [m, lam - k];
    let b = [lam + k, m];
    let na = a[0].hypot(a[1]);
    let nb = b[0].hypot(b[1]);
    let (v, n) = if na >= nb { (a, na) } else { (b, nb) };
    if n == 0.0 {
        return [1.0, 0.0];
    }
    [v[0] / n, v[1] / n]
}

fn packet_vector(kernel: &RegularizedKernel, p: &WavePacket, sign: f64) -> Vec<C64> {
    let u = eigenspinor(p.k_center, kernel.config.mass, sign);
    let n = kernel.n_points();
    let mut v = vec![C64::new(0.0, 0.0); 2 * n];
    for j in 0..n {
        let x = kernel.grid.x(j);
        let env = (-0.5 * ((x - p.x_center) * p.k_width).powi(2)).exp();
        let phase = C64::from_polar(env, p.k_center * x);
        v[2 * j] = phase * u[0];
        v[2 * j + 1] = phase * u[1];
    }
    v
}

/// Relative entropy of the state with the given positive-frequency packets
/// added and negative-frequency packets removed, with respect to the
/// regularized vacuum: `σ̃ = (1 - P_E) σ (1 - P_E) + P_exc`.
pub fn finite_particle_relative_entropy(
    cfg: &DiracConfig,
    excitations: &[WavePacket],
    removals: &[WavePacket],
    scope: RelativeScope,
) -> Result<RelativeEntropy> {
    for p in excitations.iter().chain(removals) {
        if !(p.k_width > 0.0) || !p.k_center.is_finite() || !p.x_center.is_finite() {
            return Err(Error::InvalidConfig(format!("invalid wave packet {p:?}")));
        }
    }
    let kernel = projector_kernel(cfg)?;
    let sigma = kernel.chiral_dense();
    let dim = sigma.nrows();

    // removals first, so excitations are orthogonalized against them
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut n_removed = 0;
    for (packets, sign) in [(removals, -1.0), (excitations, 1.0)] {
        for p in packets {
            let mut v = packet_vector(&kernel, p, sign);
            for _ in 0..2 {
                for b in &basis {
                    let dot: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= dot * bi);
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                return Err(Error::InvalidConfig(format!(
                    "wave packet {p:?} is linearly dependent on the others or vanishes on the grid"
                )));
            }
            v.iter_mut().for_each(|z| *z /= norm);
            basis.push(v);
        }
        if sign < 0.0 {
            n_removed = basis.len();
        }
    }

    let r = basis.len();
    let q = Mat::from_fn(dim, r, |i, k| basis[k][i]);
    // (1-P)σ(1-P) = σ - QB† - BQ† + Q(Q†B)Q†  with B = σQ
    let b = &sigma * &q;
    let qb = q.adjoint() * &b;
    let mut tilde = &sigma - &q * b.adjoint() - &b * q.adjoint() + &q * &qb * q.adjoint();
    for k in n_removed..r {
        for i in 0..dim {
            for j in 0..dim {
                tilde[(i, j)] += basis[k][i] * basis[k][j].conj();
            }
        }
    }

    let keep: Vec<usize> = match scope {
        RelativeScope::FullSpace => (0..dim).collect(),
        RelativeScope::Diamond => {
            let region = kernel.grid.diamond();
            (0..dim).filter(|&a| region.contains(a / 2)).collect()
        }
    };
    let restrict = |m: &Mat<C64>| -> Result<HermitianOperator> {
        HermitianOperator::with_tolerance(
            Mat::from_fn(keep.len(), keep.len(), |a, b| m[(keep[a], keep[b])]),
            1e-10,
        )
    };
    relative_entropy(&restrict(&tilde)?, &restrict(&sigma)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let gl = gauss_legendre(GL_ORDER);
        let w: f64 = gl.iter().map(|p| p.1).sum();
        assert!((w - 2.0).abs() < 1e-14);
        // ∫ x^30 = 2/31 is exact at order 16
        let i: f64 = gl.iter().map(|&(x, w)| w * x.powi(30)).sum();
        assert!((i - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn resolved_config_is_aligned() {
        let cfg = DiracConfig::resolved(5.0, 1.0 / 8.0, 1.0, None, &Resolution::default());
        assert_eq!(cfg.grid_step, 1.0 / 32.0);
        assert_eq!(cfg.domain_half_width, 1.0);
        assert_eq!(cfg.grid().n_points(), 96);
        assert!(cfg.validate().is_ok());
        let g = cfg.grid();
        assert!((g.x(g.n_left) - 0.5 * g.h).abs() < 1e-15);
    }

    #[test]
    fn under_resolved_grid_fails_loudly() {
        let mut cfg = DiracConfig::resolved(5.0, 1.0 / 8.0, 1.0, None, &Resolution::default());
        cfg.epsilon /= 2.0;
        cfg.k_cutoff *= 2.0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn truncated_cutoff_is_rejected() {
        let res = Resolution {
            cutoff_factor: 21.0,
            ..Resolution::default()
        };
        let cfg = DiracConfig::resolved(5.0, 1.0 / 8.0, 1.0, None, &res);
        assert!(matches!(
            projector_kernel(&cfg),
            Err(Error::QuadratureUnderResolved { .. })
        ));
    }

    #[test]
    fn sector_representatives_cover_orbits() {
        for n in [1, 2, 5, 8] {
            let reps = sector_representatives(n);
            assert_eq!(reps.len(), n);
            let mut seen = vec![false; 2 * n];
            for &(j, s) in &reps {
                for (a, b) in [(j, s), (n - 1 - j, 1 - s)] {
                    assert!(!seen[2 * a + b]);
                    seen[2 * a + b] = true;
                }
            }
            assert!(seen.iter().all(|&x| x));
        }
    }

    #[test]
    fn ladder_generation() {
        let l = geometric_ladder(1.0 / 8.0, 1.0 / 256.0, std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(l.len(), 11);
        assert!((l[10] - 1.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn eigenspinors() {
        for (k, m) in [(1.3, 0.7), (-2.0, 5.0), (3.0, 0.0), (-3.0, 0.0)] {
            for sign in [1.0, -1.0] {
                let u = eigenspinor(k, m, sign);
                let w = sign * (k * k + m * m).sqrt();
                assert!((k * u[0] + m * u[1] - w * u[0]).abs() < 1e-14);
                assert!((m * u[0] - k * u[1] - w * u[1]).abs() < 1e-14);
            }
        }
    }
}
