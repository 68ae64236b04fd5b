use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use crate::error::Result;
use crate::geometry::{
    chain_volume_lower_bound, chain_volume_upper_bound, curvature_extrema, curvature_extrema_on,
    sphere_volume, volume_chain, VolumeConstants, DEFAULT_POLE_MARGIN,
};
use crate::harness::config::SweepConfig;
use crate::harness::sweep::{run_sweep_with, solve_point, SweepOutcome, SweepRow};
use crate::profile::{build_chain_with, connector_length, eval_connector, DumbbellSpec, SmoothCutoff};
use crate::spectral::{richardson_order, solve_problem, SturmLiouvilleProblem};

const CONNECTOR_EPS: [f64; 4] = [0.05, 0.01, 1e-3, 1e-4];
const CONNECTOR_SAMPLES: usize = 10_000;
const KAPPA_RATIO_MAX: f64 = 1.25;
const NECK_MIN_TOL: f64 = 1e-6;
const NECK_SAMPLES: usize = 10_000;
const VOLUME_REL_TOL: f64 = 1e-9;
const ORACLE_GRID: usize = 4096;
const ORACLE_SPHERE_TOL: f64 = 1e-3;
const ORACLE_INTERVAL_TOL: f64 = 1e-5;
const DECAY_EPS: f64 = 1e-2;
const DECAY_FACTOR: f64 = 0.5;
const GAP_EPS: f64 = 1e-4;
const GAP_RATIO_MAX: f64 = 0.2;
const SCALE: f64 = 4.0;
const SCALING_TOL: f64 = 1e-10;
const RICHARDSON_GRIDS: [usize; 3] = [1024, 2048, 4096];
const ORDER_RANGE: (f64, f64) = (1.7, 2.3);

/// Outcome of one numbered criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AcceptanceReport {
    pub criteria: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn pass_count(&self) -> usize {
        self.criteria.iter().filter(|c| c.passed).count()
    }

    pub fn summary(&self) -> String {
        let total = self.criteria.len();
        let pass = self.pass_count();
        if pass == total {
            format!("acceptance: {pass}/{total} PASS")
        } else {
            format!("acceptance: {pass}/{total} PASS, {} FAIL", total - pass)
        }
    }

    pub fn get(&self, id: usize) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.id == id)
    }
}

impl fmt::Display for AcceptanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.criteria {
            writeln!(f, "{c}")?;
        }
        write!(f, "{}", self.summary())
    }
}

#[derive(Debug, Clone)]
pub struct AcceptanceOptions {
    pub config: SweepConfig,
    /// Connector cutoff used for every chain; replace it to run a negative
    /// control.
    pub cutoff: SmoothCutoff<f64>,
    /// Only the oracle criteria (4 and 9).
    pub oracle_only: bool,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        Self {
            config: SweepConfig::default(),
            cutoff: SmoothCutoff::connector(),
            oracle_only: false,
        }
    }
}

fn timed(
    id: usize,
    name: &'static str,
    limit: Option<f64>,
    f: impl FnOnce() -> (bool, String),
) -> CriterionResult {
    let start = Instant::now();
    let (mut passed, mut detail) = f();
    let seconds = start.elapsed().as_secs_f64();
    if let Some(limit) = limit {
        if seconds >= limit {
            passed = false;
            detail = format!("{detail}; runtime {seconds:.2} s exceeds {limit} s");
        }
    }
    CriterionResult {
        id,
        name,
        passed,
        detail,
        seconds,
    }
}

/// Runs every criterion and returns the report; never aborts early.
pub fn run_acceptance(opts: &AcceptanceOptions) -> Result<AcceptanceReport> {
    opts.config.validate()?;
    let cfg = &opts.config;
    let cutoff = opts.cutoff;
    let mut criteria = Vec::new();
    if !opts.oracle_only {
        criteria.push(timed(1, "connector bound", Some(1.0), || connector_bound(cutoff)));
        criteria.push(timed(2, "uniform curvature lower bound", Some(10.0), || {
            curvature_bound(cfg, cutoff)
        }));
        criteria.push(timed(3, "volume sandwich", Some(5.0), || volume_sandwich(cfg, cutoff)));
    }
    criteria.push(timed(4, "spectral oracle", Some(30.0), spectral_oracle));
    if !opts.oracle_only {
        let start = Instant::now();
        let outcome = run_sweep_with(cfg, cutoff)?;
        let sweep_seconds = start.elapsed().as_secs_f64();
        let mut rest = check_acceptance(&outcome);
        for c in &mut rest {
            c.seconds += sweep_seconds / 3.0;
        }
        let gap = rest.pop().expect("gap criterion");
        criteria.extend(rest);
        criteria.push(timed(7, gap.name, None, || gap_at_fixed_eps(cfg, cutoff, &gap)));
        criteria.push(timed(8, "scaling law", None, || scaling_law(cfg, cutoff)));
    }
    criteria.push(timed(9, "convergence order", None, convergence_order));
    Ok(AcceptanceReport { criteria })
}

/// Row-based criteria 5, 6 and the monotone part of 7.
pub fn check_acceptance(outcome: &SweepOutcome) -> Vec<CriterionResult> {
    let failures = outcome.failures.len();
    let failure_note = || match outcome.failures.first() {
        Some(f) => format!("; {failures} point(s) failed, first: {}", f.error),
        None => String::new(),
    };
    let rows = &outcome.rows;
    let complete = failures == 0 && !rows.is_empty();

    let c5 = timed(5, "min-max dominance", None, || {
        let bad = rows.iter().filter(|r| !r.flags.min_max).count();
        let kernel_bad = rows.iter().filter(|r| !r.flags.kernel_exact).count();
        let worst = rows
            .iter()
            .flat_map(|r| {
                (1..=r.k_bar).map(move |j| {
                    r.eigenvalues[j] / r.rayleigh[..j].iter().copied().fold(f64::NEG_INFINITY, f64::max)
                })
            })
            .fold(0.0, f64::max);
        (
            complete && bad == 0 && kernel_bad == 0,
            format!(
                "{} rows, {bad} violate λ_j ≤ max R(χ_i), {kernel_bad} with inexact kernel, worst λ_j/bound = {worst:.3e}{}",
                rows.len(),
                failure_note()
            ),
        )
    });

    let c6 = timed(6, "decay law", None, || {
        let bound_bad = rows.iter().filter(|r| !r.flags.decay_bound).count();
        let worst = rows
            .iter()
            .filter(|r| r.point.eps <= DECAY_EPS)
            .flat_map(|r| (1..=r.k_bar).map(move |j| r.normalized[j] / r.bound))
            .fold(0.0, f64::max);
        let mut decay_bad = 0;
        let mut worst_decay: f64 = 0.0;
        let mut groups = 0;
        for group in groups_by_point(rows).values() {
            let (Some(small), Some(large)) = (group.first(), group.last()) else { continue };
            if group.len() < 2 {
                continue;
            }
            groups += 1;
            for j in 1..=small.k_bar {
                let r = small.normalized[j] / large.normalized[j];
                worst_decay = worst_decay.max(r);
                if !(r < DECAY_FACTOR) {
                    decay_bad += 1;
                }
            }
        }
        (
            complete && bound_bad == 0 && decay_bad == 0 && groups > 0,
            format!(
                "max λ̄_j/bound (ε ≤ 1e-2) = {worst:.3e}, {bound_bad} rows above bound; \
smallest/largest ε ratio ≤ {worst_decay:.3e} over {groups} groups, {decay_bad} not below {DECAY_FACTOR}{}",
                failure_note()
            ),
        )
    });

    let c7 = timed(7, "gap and counting", None, || {
        let mut bad = 0;
        let mut groups = 0;
        for group in groups_by_point(rows).values() {
            if group.len() < 3 {
                continue;
            }
            groups += 1;
            let ratios: Vec<f64> = group[..3].iter().map(|r| r.gap_ratio()).collect();
            if !(ratios[0] < ratios[1] && ratios[1] < ratios[2]) {
                bad += 1;
            }
        }
        (
            complete && bad == 0 && groups > 0,
            format!("ratio decreasing over the three smallest ε in {}/{groups} groups{}", groups - bad, failure_note()),
        )
    });
    vec![c5, c6, c7]
}

/// Rows grouped by `(m, p, k)`, each group sorted by increasing `ε`.
fn groups_by_point(rows: &[SweepRow]) -> BTreeMap<(usize, usize, usize), Vec<&SweepRow>> {
    let mut groups: BTreeMap<_, Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.point.m, r.point.p, r.point.k)).or_default().push(r);
    }
    for g in groups.values_mut() {
        g.sort_by(|a, b| a.point.eps.total_cmp(&b.point.eps));
    }
    groups
}

fn connector_bound(cutoff: SmoothCutoff<f64>) -> (bool, String) {
    let len: f64 = connector_length();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for eps in CONNECTOR_EPS {
        for i in 0..CONNECTOR_SAMPLES {
            let s = len * i as f64 / (CONNECTOR_SAMPLES - 1) as f64;
            match eval_connector(eps, s, &cutoff) {
                Ok(j) if j.is_finite() => {
                    lo = lo.min(j.value);
                    hi = hi.max(j.value);
                }
                _ => return (false, format!("connector not finite at ε = {eps}, s = {s}")),
            }
        }
        // The construction-time check probes smoothness as well.
        let spec = DumbbellSpec::new(eps, 1, 3, 0, 0.0).expect("valid spec");
        if let Err(e) = build_chain_with(&spec, cutoff) {
            return (false, format!("min F = {lo:.6}, max F = {hi:.6}; chain rejected at ε = {eps}: {e}"));
        }
    }
    (lo >= 0.5 && hi < 0.8, format!("min F = {lo:.6}, max F = {hi:.6}"))
}

fn fiber_dims(cfg: &SweepConfig) -> Vec<usize> {
    let mut ns: Vec<usize> = cfg.mp_list.iter().map(|&(m, p)| m - p).chain([2, 3, 4]).collect();
    ns.sort_unstable();
    ns.dedup();
    ns
}

fn curvature_bound(cfg: &SweepConfig, cutoff: SmoothCutoff<f64>) -> (bool, String) {
    let mut worst_ratio: f64 = 1.0;
    let mut worst_neck: f64 = 0.0;
    let mut ok = true;
    let mut notes = Vec::new();
    for n in fiber_dims(cfg) {
        for &k in &cfg.k_list {
            let k_bar = cfg.k_bar(k);
            let mut kappas = Vec::new();
            for &eps in &cfg.eps_list {
                let spec = DumbbellSpec::new(eps, k_bar, n, 0, 0.0).expect("valid spec");
                let chain = match build_chain_with(&spec, cutoff) {
                    Ok(c) => c,
                    Err(e) => return (false, format!("n={n} k={k_bar} ε={eps}: {e}")),
                };
                match curvature_extrema(&chain, cfg.samples, DEFAULT_POLE_MARGIN) {
                    Ok(ext) => kappas.push(-ext.min()),
                    Err(e) => return (false, format!("n={n} k={k_bar} ε={eps}: {e}")),
                }
                for i in chain.neck_indices() {
                    let (a, b) = chain.segment_range(i);
                    match curvature_extrema_on(&chain, a, b, NECK_SAMPLES) {
                        Ok(ext) => worst_neck = worst_neck.max((ext.min() + 1.0).abs()),
                        Err(e) => return (false, format!("neck of n={n} k={k_bar} ε={eps}: {e}")),
                    }
                }
            }
            if kappas.is_empty() {
                continue;
            }
            let hi = kappas.iter().copied().fold(f64::MIN, f64::max);
            let lo = kappas.iter().copied().fold(f64::MAX, f64::min);
            let ratio = hi / lo;
            worst_ratio = worst_ratio.max(ratio);
            if !(lo > 0.0 && ratio <= KAPPA_RATIO_MAX) {
                ok = false;
                notes.push(format!("n={n} k={k_bar}: κ ∈ [{lo:.4}, {hi:.4}]"));
            }
        }
    }
    ok &= worst_neck <= NECK_MIN_TOL;
    let mut detail = format!("max κ ratio = {worst_ratio:.4}, neck |min K + 1| ≤ {worst_neck:.2e}");
    if !notes.is_empty() {
        detail = format!("{detail}; {}", notes.join(", "));
    }
    (ok, detail)
}

fn volume_sandwich(cfg: &SweepConfig, cutoff: SmoothCutoff<f64>) -> (bool, String) {
    let slack = 1.0 + VOLUME_REL_TOL;
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut max_fill: f64 = 0.0;
    for &(m, p) in &cfg.mp_list {
        for &k in &cfg.k_list {
            let k_bar = cfg.k_bar(k);
            for &eps in &cfg.eps_list {
                let vol_h2 = cfg.vol_h2.unwrap_or_else(|| sphere_volume(m));
                let spec = DumbbellSpec::new(eps, k_bar, m, p, vol_h2).expect("valid spec");
                let n = spec.n();
                let vc = match build_chain_with(&spec, cutoff).and_then(|c| volume_chain(&c)) {
                    Ok(v) => v,
                    Err(e) => return (false, format!("m={m} p={p} k={k_bar} ε={eps}: {e}")),
                };
                let vm = sphere_volume::<f64>(p) * vc + vol_h2;
                let lower = chain_volume_lower_bound::<f64>(n);
                let upper = chain_volume_upper_bound::<f64>(n, k_bar);
                let upper_m = VolumeConstants::for_spec(&spec).upper(k_bar);
                max_fill = max_fill.max(vm / upper_m);
                checked += 1;
                if !(lower <= vc * slack && vc <= upper * slack && vm <= upper_m * slack) {
                    bad.push(format!("m={m} p={p} k={k_bar} ε={eps}"));
                }
            }
        }
    }
    (
        bad.is_empty() && checked > 0,
        format!(
            "{checked} points, {} outside bounds, max vol(M)/(A k̄ + B) = {max_fill:.4}{}",
            bad.len(),
            bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
        ),
    )
}

fn spectral_oracle() -> (bool, String) {
    let mut worst_sphere: f64 = 0.0;
    let mut worst_interval: f64 = 0.0;
    for n in [2usize, 3, 5] {
        let spectrum = SturmLiouvilleProblem::<f64>::sphere_sector(n)
            .and_then(|p| solve_problem(&p, ORACLE_GRID, 4));
        match spectrum {
            Ok(s) => {
                for l in 1..4 {
                    let exact = (l * (l + n - 1)) as f64;
                    worst_sphere = worst_sphere.max((s.eigenvalues[l] - exact).abs() / exact);
                }
                if s.eigenvalues[0] != 0.0 {
                    worst_sphere = f64::INFINITY;
                }
            }
            Err(e) => return (false, format!("sphere n={n}: {e}")),
        }
    }
    match SturmLiouvilleProblem::<f64>::interval(std::f64::consts::PI)
        .and_then(|p| solve_problem(&p, ORACLE_GRID, 4))
    {
        Ok(s) => {
            for l in 1..4 {
                let exact = (l * l) as f64;
                worst_interval = worst_interval.max((s.eigenvalues[l] - exact).abs() / exact);
            }
        }
        Err(e) => return (false, format!("interval: {e}")),
    }
    (
        worst_sphere <= ORACLE_SPHERE_TOL && worst_interval <= ORACLE_INTERVAL_TOL,
        format!("sphere max rel err = {worst_sphere:.2e}, interval max rel err = {worst_interval:.2e}"),
    )
}

fn gap_at_fixed_eps(
    cfg: &SweepConfig,
    cutoff: SmoothCutoff<f64>,
    monotone: &CriterionResult,
) -> (bool, String) {
    let mut worst: f64 = 0.0;
    for &(m, p) in &cfg.mp_list {
        for k in 1..=3 {
            let spec = DumbbellSpec::new(GAP_EPS, k, m, p, sphere_volume(m)).expect("valid spec");
            match solve_point(&spec, cutoff, cfg.grid, k + 2) {
                Ok(sol) => {
                    let ev = &sol.spectrum.eigenvalues;
                    worst = worst.max(ev[k] / ev[k + 1]);
                }
                Err(e) => return (false, format!("m={m} p={p} k={k} at ε = {GAP_EPS}: {e}")),
            }
        }
    }
    (
        worst <= GAP_RATIO_MAX && monotone.passed,
        format!("max λ_k̄/λ_k̄+1 at ε = 1e-4: {worst:.3e}; {}", monotone.detail),
    )
}

fn scaling_law(cfg: &SweepConfig, cutoff: SmoothCutoff<f64>) -> (bool, String) {
    let mut worst: f64 = 0.0;
    for n in fiber_dims(cfg) {
        let spec = DumbbellSpec::new(1e-3, 2, n, 0, 0.0).expect("valid spec");
        let chain = match build_chain_with(&spec, cutoff) {
            Ok(c) => c,
            Err(e) => return (false, format!("n={n}: {e}")),
        };
        let scaled = chain.scaled(SCALE).expect("positive scale");
        let solve = |c| solve_problem(&SturmLiouvilleProblem::from_chain(c), cfg.grid, 5);
        match (solve(&chain), solve(&scaled)) {
            (Ok(a), Ok(b)) => {
                for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues).skip(1) {
                    worst = worst.max((x / SCALE - y).abs() / y);
                }
                if a.eigenvalues[0] != b.eigenvalues[0] {
                    worst = f64::INFINITY;
                }
            }
            (Err(e), _) | (_, Err(e)) => return (false, format!("n={n}: {e}")),
        }
    }
    (worst <= SCALING_TOL, format!("max |λ/4 − λ_scaled|/λ_scaled = {worst:.2e}"))
}

fn convergence_order() -> (bool, String) {
    let mut problems = vec![(
        "interval".to_string(),
        SturmLiouvilleProblem::<f64>::interval(std::f64::consts::PI),
    )];
    for n in [2usize, 3, 5] {
        problems.push((format!("sphere n={n}"), SturmLiouvilleProblem::sphere_sector(n)));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (name, problem) in problems {
        let problem = match problem {
            Ok(p) => p,
            Err(e) => return (false, format!("{name}: {e}")),
        };
        let mut spectra = Vec::new();
        for g in RICHARDSON_GRIDS {
            match solve_problem(&problem, g, 4) {
                Ok(s) => spectra.push(s.eigenvalues),
                Err(e) => return (false, format!("{name} at N={g}: {e}")),
            }
        }
        #[allow(clippy::needless_range_loop)]
        for j in 1..4 {
            match richardson_order(spectra[0][j], spectra[1][j], spectra[2][j]) {
                Some(q) => {
                    lo = lo.min(q);
                    hi = hi.max(q);
                }
                None => return (false, format!("{name} mode {j}: no change between grids")),
            }
        }
    }
    (
        lo >= ORDER_RANGE.0 && hi <= ORDER_RANGE.1,
        format!("observed orders in [{lo:.4}, {hi:.4}]"),
    )
}
