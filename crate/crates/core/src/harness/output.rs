use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::GeometryReport;
use crate::harness::sweep::{PointSolution, SweepOutcome};
use crate::profile::ChainProfile;

/// First line of every CSV this crate writes.
pub const CSV_SCHEMA_LINE: &str = "# schema=1";

/// 17 significant digits: enough to round-trip an `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

fn csv_start(header: &str) -> String {
    format!("{CSV_SCHEMA_LINE}\n{header}\n")
}

/// `samples` equally spaced evaluations of `(F, F′, F″)` over `[0, T]`.
pub fn profile_csv(chain: &ChainProfile<f64>, samples: usize) -> Result<String> {
    if samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {samples}")));
    }
    let total = chain.total_length();
    let mut out = csv_start("t,F,F1,F2");
    for i in 0..samples {
        let t = if i + 1 == samples {
            total
        } else {
            total * i as f64 / (samples - 1) as f64
        };
        let j = chain.eval(t)?;
        writeln!(out, "{},{},{},{}", num(t), num(j.value), num(j.d1), num(j.d2)).unwrap();
    }
    Ok(out)
}

pub fn geometry_key_values(r: &GeometryReport<f64>) -> String {
    let mut out = String::new();
    let spherical = r.min_k_spherical.map(num).unwrap_or_else(|| "none".into());
    for (k, v) in [
        ("eps", num(r.eps)),
        ("k", r.k.to_string()),
        ("n", r.n.to_string()),
        ("min_K_radial", num(r.min_k_radial)),
        ("min_K_spherical", spherical),
        ("max_K", num(r.max_k)),
        ("kappa", num(r.kappa)),
        ("volume_chain", num(r.volume_chain)),
        ("volume_M", num(r.volume_m)),
        ("normalization_factor", num(r.normalization_factor)),
    ] {
        writeln!(out, "{k}={v}").unwrap();
    }
    out
}

pub fn geometry_csv(r: &GeometryReport<f64>) -> String {
    let mut out = csv_start("eps,k,n,min_K,max_K,vol_chain,vol_M,norm_factor");
    writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        num(r.eps),
        r.k,
        r.n,
        num(r.min_k()),
        num(r.max_k),
        num(r.volume_chain),
        num(r.volume_m),
        num(r.normalization_factor)
    )
    .unwrap();
    out
}

/// One line per eigenvalue `j = 0..modes`. `lambda` is the eigenvalue of
/// the unnormalized metric; `ratio` is the normalized eigenvalue divided by
/// the closed-form bound.
pub fn spectrum_csv(sol: &PointSolution, modes: usize) -> String {
    let mut out = csv_start("eps,k,m,p,j,lambda,paper_bound,ratio");
    for (j, (&l, &nl)) in sol
        .spectrum
        .eigenvalues
        .iter()
        .zip(&sol.normalized)
        .take(modes)
        .enumerate()
    {
        writeln!(
            out,
            "{},{},{},{},{j},{},{},{}",
            num(sol.spec.eps),
            sol.spec.k,
            sol.spec.m,
            sol.spec.p,
            num(l),
            num(sol.bound),
            num(nl / sol.bound)
        )
        .unwrap();
    }
    out
}

/// One line per sweep point. List-valued fields are `;`-separated; failed
/// points follow as `#` comment lines.
pub fn sweep_csv(outcome: &SweepOutcome) -> String {
    let mut out = csv_start(
        "eps,k,k_bar,m,p,n,min_K_radial,min_K_spherical,max_K,kappa,vol_chain,vol_M,norm_factor,\
bound,gap_ratio,lambda,lambda_normalized,rayleigh,kernel_exact,min_max,decay_bound,volume_sandwich",
    );
    for r in &outcome.rows {
        let g = &r.geometry;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            num(r.point.eps),
            r.point.k,
            r.k_bar,
            r.point.m,
            r.point.p,
            r.n(),
            num(g.min_k_radial),
            g.min_k_spherical.map(num).unwrap_or_default(),
            num(g.max_k),
            num(g.kappa),
            num(g.volume_chain),
            num(g.volume_m),
            num(g.normalization_factor),
            num(r.bound),
            num(r.gap_ratio()),
            list(&r.eigenvalues),
            list(&r.normalized),
            list(&r.rayleigh),
            r.flags.kernel_exact,
            r.flags.min_max,
            r.flags.decay_bound,
            r.flags.volume_sandwich,
        )
        .unwrap();
    }
    for f in &outcome.failures {
        writeln!(
            out,
            "# failed eps={} k={} m={} p={}: {}",
            num(f.point.eps),
            f.point.k,
            f.point.m,
            f.point.p,
            f.error
        )
        .unwrap();
    }
    out
}
