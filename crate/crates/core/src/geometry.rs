//! Sectional curvature, volume and volume normalization of the warped
//! product `dt² + F(t)² g_{S^{n-1}}` and of the assembled manifold
//! `M = (S^p × chain) ∪ H₂`.

use crate::error::{Error, Result};
use crate::profile::{ChainProfile, DumbbellSpec, Jet, SegmentKind};
use crate::quadrature::{integrate_to_tolerance, GaussLegendre};
use crate::scalar::Real;

/// Warp values below this are treated as a pole.
pub const POLE_THRESHOLD: f64 = 1e-9;
pub const DEFAULT_POLE_MARGIN: f64 = 1e-3;
/// Relative tolerance of the per-segment volume quadrature.
pub const VOLUME_REL_TOL: f64 = 1e-10;

/// `vol(S^d) = 2π^{(d+1)/2} / Γ((d+1)/2)`, via `vol(S^d) = 2π/(d−1)·vol(S^{d−2})`.
pub fn sphere_volume<T: Real>(d: usize) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let mut v = if d.is_multiple_of(2) { T::lit(2.0) } else { two_pi };
    let mut k = if d.is_multiple_of(2) { 2 } else { 3 };
    while k <= d {
        v = v * two_pi / T::from_count(k - 1);
        k += 2;
    }
    v
}

/// `K(∂_t, X̃) = −F″/F` from a warp jet.
pub fn radial_curvature<T: Real>(jet: &Jet<T>) -> T {
    -jet.d2 / jet.value
}

/// `K(X̃, Ỹ) = (1 − F′²)/F²` from a warp jet (round unit fiber).
pub fn spherical_curvature<T: Real>(jet: &Jet<T>) -> T {
    (T::one() - jet.d1 * jet.d1) / (jet.value * jet.value)
}

fn jet_off_pole<T: Real>(chain: &ChainProfile<T>, t: T) -> Result<Jet<T>> {
    let jet = chain.eval(t)?;
    if jet.value < T::lit(POLE_THRESHOLD) {
        return Err(Error::Pole {
            t: t.as_f64(),
            value: jet.value.as_f64(),
        });
    }
    Ok(jet)
}

/// Curvature of planes containing the profile direction.
pub fn sectional_radial<T: Real>(chain: &ChainProfile<T>, t: T) -> Result<T> {
    jet_off_pole(chain, t).map(|j| radial_curvature(&j))
}

/// Curvature of planes tangent to the fiber sphere.
pub fn sectional_spherical<T: Real>(chain: &ChainProfile<T>, t: T) -> Result<T> {
    jet_off_pole(chain, t).map(|j| spherical_curvature(&j))
}

/// Extremes of the sectional curvature over a sampled range.
///
/// Fiber-tangent planes only exist for `n ≥ 3`; for surfaces
/// `min_spherical` is `None` and only the Gauss curvature enters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureExtrema<T> {
    pub min_radial: T,
    pub min_spherical: Option<T>,
    pub max: T,
}

impl<T: Real> CurvatureExtrema<T> {
    pub fn min(&self) -> T {
        match self.min_spherical {
            Some(s) => self.min_radial.min(s),
            None => self.min_radial,
        }
    }
}

/// Samples both curvature expressions on a uniform grid over
/// `[pole_margin, T − pole_margin]`.
pub fn curvature_extrema<T: Real>(
    chain: &ChainProfile<T>,
    samples: usize,
    pole_margin: T,
) -> Result<CurvatureExtrema<T>> {
    if samples < 1000 {
        return Err(Error::Domain(format!("need at least 1000 samples, got {samples}")));
    }
    if !(pole_margin >= T::lit(DEFAULT_POLE_MARGIN)) {
        return Err(Error::Domain(format!("pole margin {pole_margin} below 1e-3")));
    }
    let total = chain.total_length();
    curvature_extrema_on(chain, pole_margin, total - pole_margin, samples)
}

/// Same as [`curvature_extrema`] on an arbitrary closed range `[lo, hi]`.
pub fn curvature_extrema_on<T: Real>(
    chain: &ChainProfile<T>,
    lo: T,
    hi: T,
    samples: usize,
) -> Result<CurvatureExtrema<T>> {
    if samples < 2 || !(lo < hi) {
        return Err(Error::Domain(format!("bad sampling range [{lo}, {hi}] x {samples}")));
    }
    let with_fiber_planes = chain.fiber_dim() >= 3;
    let step = (hi - lo) / T::from_count(samples - 1);
    let mut ext = CurvatureExtrema {
        min_radial: T::infinity(),
        min_spherical: with_fiber_planes.then(T::infinity),
        max: T::neg_infinity(),
    };
    for i in 0..samples {
        let t = if i + 1 == samples { hi } else { lo + step * T::from_count(i) };
        let jet = jet_off_pole(chain, t)?;
        let kr = radial_curvature(&jet);
        ext.min_radial = ext.min_radial.min(kr);
        ext.max = ext.max.max(kr);
        if let Some(ms) = ext.min_spherical.as_mut() {
            let ks = spherical_curvature(&jet);
            *ms = ms.min(ks);
            ext.max = ext.max.max(ks);
        }
    }
    Ok(ext)
}

/// `∫ F^{n−1}` over segment `i` (metric units), without the sphere factor.
pub fn segment_weight_integral<T: Real>(chain: &ChainProfile<T>, i: usize) -> Result<T> {
    let rule = GaussLegendre::new(5);
    let (a, b) = chain.segment_range(i);
    let power = chain.fiber_dim() as i32 - 1;
    integrate_to_tolerance(
        &rule,
        |x| chain.eval_segment(i, x).value.powi(power),
        T::zero(),
        b - a,
        T::tol(VOLUME_REL_TOL),
    )
}

/// n-volume of the region of the chain covered by segment `i`.
pub fn volume_segment<T: Real>(chain: &ChainProfile<T>, i: usize) -> Result<T> {
    Ok(sphere_volume::<T>(chain.fiber_dim() - 1) * segment_weight_integral(chain, i)?)
}

/// `vol(S^{n−1}) ∫₀ᵀ F^{n−1} dt`, segment by segment.
pub fn volume_chain<T: Real>(chain: &ChainProfile<T>) -> Result<T> {
    let mut total = T::zero();
    for i in 0..chain.segments().len() {
        total += segment_weight_integral(chain, i)?;
    }
    Ok(sphere_volume::<T>(chain.fiber_dim() - 1) * total)
}

/// Volume of the necks alone.
pub fn volume_necks<T: Real>(chain: &ChainProfile<T>) -> Result<T> {
    let mut total = T::zero();
    for (i, seg) in chain.segments().iter().enumerate() {
        if seg.kind() == SegmentKind::Neck {
            total += volume_segment(chain, i)?;
        }
    }
    Ok(total)
}

/// `vol(S^p)·vol(chain) + vol(H₂)`.
pub fn volume_m<T: Real>(spec: &DumbbellSpec<T>, chain: &ChainProfile<T>) -> Result<T> {
    Ok(sphere_volume::<T>(spec.p) * volume_chain(chain)? + spec.vol_h2)
}

/// Eigenvalue of the unit-volume rescaling `vol^{−2/m} g` of a metric with
/// volume `volume_m`: `vol^{2/m} λ`.
pub fn normalize_eigenvalue<T: Real>(lambda: T, volume_m: T, m: usize) -> Result<T> {
    if !(volume_m > T::zero()) {
        return Err(Error::Domain(format!("volume {volume_m} must be positive")));
    }
    Ok(volume_m.powf(T::lit(2.0) / T::from_count(m)) * lambda)
}

/// Volume of the chain's single-dumbbell building block, bounded above
/// piece by piece: neck by `2/(n−1)·vol(S^{n−1})`, its bump by `vol(S^n)`,
/// its two connectors by `(π/6)·0.8^{n−1}·vol(S^{n−1})`.
pub fn dumbbell_volume_bound<T: Real>(n: usize) -> T {
    let fiber = sphere_volume::<T>(n - 1);
    let nm1 = T::from_count(n - 1);
    T::lit(2.0) / nm1 * fiber
        + sphere_volume::<T>(n)
        + T::PI() / T::lit(6.0) * T::lit(0.8).powi(n as i32 - 1) * fiber
}

/// Upper volume bound `V₂(n, k)` for a chain with `k` necks: `k` building
/// blocks plus one extra sphere for the second end cap.
pub fn chain_volume_upper_bound<T: Real>(n: usize, k: usize) -> T {
    T::from_count(k) * dumbbell_volume_bound::<T>(n) + sphere_volume::<T>(n)
}

/// Lower volume bound `V₁ = vol(S^n)`: the two end caps each cover more
/// than a hemisphere.
pub fn chain_volume_lower_bound<T: Real>(n: usize) -> T {
    sphere_volume(n)
}

/// Constants of the affine bound `vol(M) ≤ A·k + B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeConstants<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> VolumeConstants<T> {
    pub fn for_spec(spec: &DumbbellSpec<T>) -> Self {
        let sp = sphere_volume::<T>(spec.p);
        let n = spec.n();
        Self {
            a: sp * dumbbell_volume_bound::<T>(n),
            b: spec.vol_h2 + sp * sphere_volume::<T>(n),
        }
    }

    pub fn upper(&self, k: usize) -> T {
        self.a * T::from_count(k) + self.b
    }
}

/// Curvature and volume summary for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryReport<T> {
    pub eps: T,
    pub k: usize,
    pub n: usize,
    pub min_k_radial: T,
    pub min_k_spherical: Option<T>,
    pub max_k: T,
    pub volume_chain: T,
    pub volume_m: T,
    pub normalization_factor: T,
    pub kappa: T,
}

pub const DEFAULT_CURVATURE_SAMPLES: usize = 100_000;

impl<T: Real> GeometryReport<T> {
    pub fn compute(spec: &DumbbellSpec<T>, chain: &ChainProfile<T>) -> Result<Self> {
        Self::compute_with(spec, chain, DEFAULT_CURVATURE_SAMPLES, T::lit(DEFAULT_POLE_MARGIN))
    }

    pub fn compute_with(
        spec: &DumbbellSpec<T>,
        chain: &ChainProfile<T>,
        samples: usize,
        pole_margin: T,
    ) -> Result<Self> {
        let ext = curvature_extrema(chain, samples, pole_margin)?;
        let volume_chain = volume_chain(chain)?;
        let volume_m = sphere_volume::<T>(spec.p) * volume_chain + spec.vol_h2;
        Ok(Self {
            eps: spec.eps,
            k: spec.k,
            n: spec.n(),
            min_k_radial: ext.min_radial,
            min_k_spherical: ext.min_spherical,
            max_k: ext.max,
            volume_chain,
            volume_m,
            normalization_factor: volume_m.powf(-T::lit(2.0) / T::from_count(spec.m)),
            kappa: -ext.min(),
        })
    }

    pub fn min_k(&self) -> T {
        match self.min_k_spherical {
            Some(s) => self.min_k_radial.min(s),
            None => self.min_k_radial,
        }
    }
}
