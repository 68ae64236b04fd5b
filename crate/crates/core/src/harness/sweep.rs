use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    chain_volume_lower_bound, chain_volume_upper_bound, normalize_eigenvalue, sphere_volume, volume_m,
    GeometryReport, VolumeConstants, DEFAULT_POLE_MARGIN,
};
use crate::harness::config::SweepConfig;
use crate::profile::{build_chain_with, ChainProfile, DumbbellSpec, SmoothCutoff};
use crate::spectral::{build_cutoffs, discretize, eigenvalue_bound, reduce_to_sl, solve_lowest, Spectrum};

/// Relative slack granted to quadrature-based volume comparisons.
const VOLUME_SLACK: f64 = 1e-9;
/// Kernel exactness: `λ_0 ≤ KERNEL_RATIO·λ_{k̄+1}`.
const KERNEL_RATIO: f64 = 1e-10;
/// Points with `ε` at or below this are held to the decay bound.
const DECAY_EPS: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub eps: f64,
    pub k: usize,
    pub m: usize,
    pub p: usize,
}

/// Spectrum of one parameter point together with the test-form quotients
/// evaluated on the same grid.
#[derive(Debug, Clone)]
pub struct PointSolution {
    pub spec: DumbbellSpec<f64>,
    pub chain: ChainProfile<f64>,
    pub spectrum: Spectrum<f64>,
    /// `R(χ_i)` for `i = 1..=k̄`.
    pub rayleigh: Vec<f64>,
    pub volume_m: f64,
    /// `vol(M)^{2/m} λ_j`.
    pub normalized: Vec<f64>,
    pub bound: f64,
}

/// Builds the chain for `spec` (with `spec.k = k̄` necks) and solves for
/// `modes` eigenvalues on a grid of about `grid` cells.
pub fn solve_point(
    spec: &DumbbellSpec<f64>,
    cutoff: SmoothCutoff<f64>,
    grid: usize,
    modes: usize,
) -> Result<PointSolution> {
    let chain = build_chain_with(spec, cutoff)?;
    let problem = reduce_to_sl(&chain, spec)?;
    let disc = discretize(&problem, grid)?;
    let spectrum = solve_lowest(&disc.stiffness, &disc.mass, modes)?;
    let family = build_cutoffs(spec, &chain)?;
    let rayleigh = family
        .cutoffs
        .iter()
        .map(|c| disc.rayleigh_quotient(c))
        .collect::<Result<Vec<_>>>()?;
    let volume_m = volume_m(spec, &chain)?;
    let normalized = spectrum
        .eigenvalues
        .iter()
        .map(|&l| normalize_eigenvalue(l, volume_m, spec.m))
        .collect::<Result<Vec<_>>>()?;
    Ok(PointSolution {
        bound: eigenvalue_bound(spec)?,
        spec: *spec,
        chain,
        spectrum,
        rayleigh,
        volume_m,
        normalized,
    })
}

/// Per-row invariant checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RowFlags {
    /// `λ_0 ≤ 1e-10·λ_{k̄+1}`.
    pub kernel_exact: bool,
    /// `λ_j ≤ max_{i≤j} R(χ_i)` for `j = 1..=k̄`.
    pub min_max: bool,
    /// Normalized `λ̄_j ≤` closed-form bound for `j ≤ k̄`; vacuous above
    /// `ε = 1e-2`.
    pub decay_bound: bool,
    /// `vol(S^n) ≤ vol(chain) ≤ V₂(n, k̄)` and `vol(M) ≤ A k̄ + B`.
    pub volume_sandwich: bool,
}

impl RowFlags {
    pub fn all(&self) -> bool {
        self.kernel_exact && self.min_max && self.decay_bound && self.volume_sandwich
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub k_bar: usize,
    pub geometry: GeometryReport<f64>,
    pub eigenvalues: Vec<f64>,
    pub normalized: Vec<f64>,
    pub rayleigh: Vec<f64>,
    pub bound: f64,
    pub volume_upper_chain: f64,
    pub volume_upper_m: f64,
    pub flags: RowFlags,
}

impl SweepRow {
    /// `λ_{k̄} / λ_{k̄+1}`.
    pub fn gap_ratio(&self) -> f64 {
        self.eigenvalues[self.k_bar] / self.eigenvalues[self.k_bar + 1]
    }

    pub fn n(&self) -> usize {
        self.point.m - self.point.p
    }
}

#[derive(Debug, Clone)]
pub struct PointFailure {
    pub point: SweepPoint,
    pub error: Error,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    /// Ordered by `(m, p, k, eps)` in configuration order.
    pub rows: Vec<SweepRow>,
    pub failures: Vec<PointFailure>,
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    run_sweep_with(config, SmoothCutoff::connector())
}

/// Runs every point, in parallel; failures are collected, not fatal.
pub fn run_sweep_with(config: &SweepConfig, cutoff: SmoothCutoff<f64>) -> Result<SweepOutcome> {
    config.validate()?;
    let points: Vec<SweepPoint> = config
        .mp_list
        .iter()
        .flat_map(|&(m, p)| {
            config.k_list.iter().flat_map(move |&k| {
                config.eps_list.iter().map(move |&eps| SweepPoint { eps, k, m, p })
            })
        })
        .collect();
    let results: Vec<Result<SweepRow>> = points
        .par_iter()
        .map(|pt| sweep_row(config, cutoff, *pt))
        .collect();
    let mut outcome = SweepOutcome::default();
    for (point, res) in points.into_iter().zip(results) {
        match res {
            Ok(row) => outcome.rows.push(row),
            Err(error) => outcome.failures.push(PointFailure { point, error }),
        }
    }
    Ok(outcome)
}

fn sweep_row(config: &SweepConfig, cutoff: SmoothCutoff<f64>, pt: SweepPoint) -> Result<SweepRow> {
    let k_bar = config.k_bar(pt.k);
    let vol_h2 = config.vol_h2.unwrap_or_else(|| sphere_volume(pt.m));
    let spec = DumbbellSpec::new(pt.eps, k_bar, pt.m, pt.p, vol_h2)?;
    let sol = solve_point(&spec, cutoff, config.grid, config.modes_for(k_bar))?;
    let geometry = GeometryReport::compute_with(&spec, &sol.chain, config.samples, DEFAULT_POLE_MARGIN)?;

    let n = spec.n();
    let ev = &sol.spectrum.eigenvalues;
    let upper_chain = chain_volume_upper_bound::<f64>(n, k_bar);
    let upper_m = VolumeConstants::for_spec(&spec).upper(k_bar);
    let slack = 1.0 + VOLUME_SLACK;
    let flags = RowFlags {
        kernel_exact: ev[0] <= KERNEL_RATIO * ev[k_bar + 1],
        min_max: (1..=k_bar).all(|j| {
            let bound = sol.rayleigh[..j].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            ev[j] <= bound
        }),
        decay_bound: pt.eps > DECAY_EPS || (1..=k_bar).all(|j| sol.normalized[j] <= sol.bound),
        volume_sandwich: chain_volume_lower_bound::<f64>(n) <= geometry.volume_chain * slack
            && geometry.volume_chain <= upper_chain * slack
            && geometry.volume_m <= upper_m * slack,
    };
    Ok(SweepRow {
        point: pt,
        k_bar,
        eigenvalues: ev.clone(),
        normalized: sol.normalized,
        rayleigh: sol.rayleigh,
        bound: sol.bound,
        volume_upper_chain: upper_chain,
        volume_upper_m: upper_m,
        geometry,
        flags,
    })
}
