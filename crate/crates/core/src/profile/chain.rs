use crate::error::{Error, Result};
use crate::profile::warp::{connector_jet, connector_length};
use crate::profile::{DumbbellSpec, Jet, ProfileSegment, SegmentKind, SmoothCutoff};
use crate::scalar::Real;

/// Warp function of `k` hyperbolic dumbbells glued in series.
///
/// Layout, left to right: cap, `k` blocks of `connector · neck · connector`
/// separated by `k − 1` bumps, cap. The profile is immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainProfile<T> {
    segments: Vec<ProfileSegment<T>>,
    /// Cumulative offsets in metric units, `segments.len() + 1` entries.
    breakpoints: Vec<T>,
    fiber_dim: usize,
    eps: T,
    /// `√a` for the metric `a·g`; 1 for the unscaled chain.
    stretch: T,
}

pub fn build_chain<T: Real>(spec: &DumbbellSpec<T>) -> Result<ChainProfile<T>> {
    build_chain_with(spec, SmoothCutoff::connector())
}

/// Builds the chain with an explicit connector cutoff and verifies the
/// gluing: `C²` continuity at every breakpoint, a smooth connector, and the
/// connector bound `0.5 ≤ F < 0.8`.
pub fn build_chain_with<T: Real>(
    spec: &DumbbellSpec<T>,
    cutoff: SmoothCutoff<T>,
) -> Result<ChainProfile<T>> {
    let eps = spec.eps;
    let half = spec.half_neck();
    let mut segments = Vec::with_capacity(4 * spec.k + 1);
    segments.push(ProfileSegment::left_cap());
    for i in 0..spec.k {
        if i > 0 {
            segments.push(ProfileSegment::bump());
        }
        segments.push(ProfileSegment::connector_in(eps, cutoff));
        segments.push(ProfileSegment::neck(eps, half));
        segments.push(ProfileSegment::connector_out(eps, cutoff));
    }
    segments.push(ProfileSegment::right_cap());

    let mut breakpoints = Vec::with_capacity(segments.len() + 1);
    let mut acc = T::zero();
    breakpoints.push(acc);
    for seg in &segments {
        acc += seg.length();
        breakpoints.push(acc);
    }

    let chain = ChainProfile {
        segments,
        breakpoints,
        fiber_dim: spec.n(),
        eps,
        stretch: T::one(),
    };
    check_connector(eps, &cutoff)?;
    chain.check_breakpoints()?;
    Ok(chain)
}

/// Probes the connector on a fine grid: the jet must be finite, its
/// derivatives must integrate to its increments, and the values must stay in
/// `[0.5, 0.8)`.
fn check_connector<T: Real>(eps: T, cutoff: &SmoothCutoff<T>) -> Result<()> {
    const STEPS: usize = 4096;
    let len = connector_length::<T>();
    let ds = len / T::from_count(STEPS);
    let tol = T::tol(1e-6);
    // F⁗ peaks near 5e9 inside the transition, so the trapezoid residual of
    // F′ legitimately reaches ~1e-4 at this step.
    let tol_d1 = T::lit(1e-2);
    let (lo, hi) = (T::lit(0.5), T::lit(0.8));
    let mut prev = connector_jet(eps, T::zero(), cutoff);
    for i in 0..=STEPS {
        let s = if i == STEPS { len } else { ds * T::from_count(i) };
        let cur = connector_jet(eps, s, cutoff);
        if !cur.is_finite() {
            return Err(Error::Construction(format!("connector jet not finite at s = {s}")));
        }
        if !(cur.value >= lo && cur.value < hi) {
            return Err(Error::Construction(format!(
                "connector value {} at s = {s} outside [0.5, 0.8)",
                cur.value
            )));
        }
        if i > 0 {
            let half = T::lit(0.5);
            let step = s - ds * T::from_count(i - 1);
            let f_err = cur.value - prev.value - step * half * (cur.d1 + prev.d1);
            let d_err = cur.d1 - prev.d1 - step * half * (cur.d2 + prev.d2);
            if f_err.abs() > tol || d_err.abs() > tol_d1 {
                return Err(Error::Construction(format!(
                    "connector is not smooth near s = {s} (increment mismatch {f_err:e}, {d_err:e}); bad cutoff?"
                )));
            }
        }
        prev = cur;
    }
    Ok(())
}

impl<T: Real> ChainProfile<T> {
    pub fn segments(&self) -> &[ProfileSegment<T>] {
        &self.segments
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn total_length(&self) -> T {
        *self.breakpoints.last().expect("chain has segments")
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    /// `√a` of the metric scale this profile represents.
    pub fn stretch(&self) -> T {
        self.stretch
    }

    pub fn necks(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| s.kind() == SegmentKind::Neck)
            .count()
    }

    /// Global `[start, end]` of segment `i`.
    pub fn segment_range(&self, i: usize) -> (T, T) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    /// Indices of the neck segments in layout order.
    pub fn neck_indices(&self) -> Vec<usize> {
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind() == SegmentKind::Neck)
            .map(|(i, _)| i)
            .collect()
    }

    /// Same fiber dimension, different profile: the warp of the metric
    /// `a·g`, i.e. `(t, F) ↦ (√a·t, √a·F)`.
    pub fn scaled(&self, a: T) -> Result<Self> {
        if !(a > T::zero()) || !a.is_finite() {
            return Err(Error::Domain(format!("metric scale a = {a} must be positive")));
        }
        let factor = a.sqrt();
        Ok(Self {
            segments: self.segments.clone(),
            breakpoints: self.breakpoints.iter().map(|&b| b * factor).collect(),
            fiber_dim: self.fiber_dim,
            eps: self.eps,
            stretch: self.stretch * factor,
        })
    }

    /// Same profile with a different fiber dimension `n`.
    pub fn with_fiber_dim(&self, n: usize) -> Self {
        Self {
            fiber_dim: n,
            ..self.clone()
        }
    }

    /// Index of the segment owning `t`; breakpoints belong to the left segment.
    pub fn segment_at(&self, t: T) -> usize {
        let interior = &self.breakpoints[1..];
        interior
            .partition_point(|&b| b < t)
            .min(self.segments.len() - 1)
    }

    /// `(F, F′, F″)` at global arc length `t ∈ [0, T]`.
    pub fn eval(&self, t: T) -> Result<Jet<T>> {
        let total = self.total_length();
        if !(t >= T::zero() && t <= total) {
            return Err(Error::Domain(format!("t = {t} outside [0, {total}]")));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: T) -> Jet<T> {
        let i = self.segment_at(t);
        let seg = &self.segments[i];
        let jet = if i + 1 == self.segments.len() && t >= self.total_length() {
            seg.eval_end()
        } else {
            seg.eval((t - self.breakpoints[i]) / self.stretch)
        };
        self.rescale(jet)
    }

    /// Evaluates segment `i` at its own local coordinate (metric units).
    pub fn eval_segment(&self, i: usize, x: T) -> Jet<T> {
        self.rescale(self.segments[i].eval(x / self.stretch))
    }

    /// One-sided limits at the right end of segment `i`.
    pub(crate) fn eval_segment_end(&self, i: usize) -> Jet<T> {
        self.rescale(self.segments[i].eval_end())
    }

    fn rescale(&self, jet: Jet<T>) -> Jet<T> {
        if self.stretch == T::one() {
            return jet;
        }
        Jet::new(jet.value * self.stretch, jet.d1, jet.d2 / self.stretch)
    }

    /// Largest one-sided jumps `(ΔF relative, ΔF′, ΔF″)` over all interior
    /// breakpoints.
    pub fn max_breakpoint_jumps(&self) -> (T, T, T) {
        let mut worst = (T::zero(), T::zero(), T::zero());
        for i in 0..self.segments.len() - 1 {
            let left = self.eval_segment_end(i);
            let right = self.eval_segment(i + 1, T::zero());
            let scale = left.value.abs().max(right.value.abs()).max(T::min_positive_value());
            worst.0 = worst.0.max((left.value - right.value).abs() / scale);
            worst.1 = worst.1.max((left.d1 - right.d1).abs());
            worst.2 = worst.2.max((left.d2 - right.d2).abs());
        }
        worst
    }

    fn check_breakpoints(&self) -> Result<()> {
        let (jf, j1, j2) = self.max_breakpoint_jumps();
        let (tf, td) = (T::tol(1e-12), T::tol(1e-8));
        if !(jf <= tf && j1 <= td && j2 <= td) {
            return Err(Error::Construction(format!(
                "profile not C² at a breakpoint: jumps F {jf:e} (rel), F′ {j1:e}, F″ {j2:e}"
            )));
        }
        let first = self.eval_unchecked(T::zero());
        let last = self.eval_unchecked(self.total_length());
        if first.value != T::zero() || last.value != T::zero() {
            return Err(Error::Construction("profile does not close at both poles".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec(eps: f64, k: usize) -> DumbbellSpec<f64> {
        DumbbellSpec::new(eps, k, 3, 0, 1.0).unwrap()
    }

    #[test]
    fn total_length_single_dumbbell() {
        let chain = build_chain(&spec(0.01, 1)).unwrap();
        // 3π/2 + 2 log 100 + π/6, from 30-digit arithmetic.
        assert_relative_eq!(chain.total_length(), 14.446_328_127_959_171_466_84, max_relative = 1e-14);
    }

    #[test]
    fn segment_count_formula() {
        for k in 1..=5 {
            let chain = build_chain(&spec(0.01, k)).unwrap();
            assert_eq!(chain.segments().len(), 2 + k + (k - 1) + 2 * k);
            assert_eq!(chain.necks(), k);
        }
        assert_eq!(build_chain(&spec(0.01, 3)).unwrap().segments().len(), 13);
    }

    #[test]
    fn layout_lengths() {
        let chain = build_chain(&spec(0.01, 3)).unwrap();
        let l = 100f64.ln();
        let t = 1.5 * PI + 3.0 * (2.0 * l + PI / 6.0) + 2.0 * PI / 2.0;
        assert_relative_eq!(chain.total_length(), t, max_relative = 1e-14);
        assert_relative_eq!(chain.total_length(), 37.055_799_076_697_927_923_6, max_relative = 1e-14);
        let kinds: Vec<_> = chain.segments().iter().map(|s| s.kind()).collect();
        use SegmentKind::*;
        assert_eq!(
            kinds,
            vec![Cap, Connector, Neck, Connector, Bump, Connector, Neck, Connector, Bump, Connector, Neck, Connector, Cap]
        );
    }

    #[test]
    fn poles_and_neck_minimum() {
        let eps = 0.01;
        let chain = build_chain(&spec(eps, 1)).unwrap();
        let start = chain.eval(0.0).unwrap();
        assert_eq!(start.value, 0.0);
        assert_eq!(start.d1, 1.0);
        let end = chain.eval(chain.total_length()).unwrap();
        assert_eq!(end.value, 0.0);
        assert_relative_eq!(end.d1, -1.0, epsilon = 1e-15);

        let (a, b) = chain.segment_range(2);
        let mid = chain.eval(0.5 * (a + b)).unwrap();
        assert_relative_eq!(mid.value, eps, max_relative = 1e-15);
        assert_relative_eq!(chain.eval(chain.total_length() / 2.0).unwrap().value, eps, max_relative = 1e-14);
    }

    #[test]
    fn half_length_hits_neck_center_by_independent_offsets() {
        let eps: f64 = 0.01;
        let chain = build_chain(&spec(eps, 1)).unwrap();
        // cap + connector + L, recomputed from the layout.
        let offset = 0.75 * PI + PI / 12.0;
        let t = chain.total_length() / 2.0;
        let r = t - offset - (-eps.ln());
        assert_relative_eq!(chain.eval(t).unwrap().value, eps * r.cosh(), max_relative = 1e-13);
    }

    #[test]
    fn out_of_range_is_a_domain_error() {
        let chain = build_chain(&spec(0.01, 1)).unwrap();
        assert!(chain.eval(-1e-9).is_err());
        assert!(chain.eval(chain.total_length() + 1e-9).is_err());
    }

    #[test]
    fn breakpoints_belong_to_the_left_segment() {
        let chain = build_chain(&spec(0.01, 2)).unwrap();
        for i in 1..chain.segments().len() {
            assert_eq!(chain.segment_at(chain.breakpoints()[i]), i - 1);
        }
    }

    #[test]
    fn gluing_is_c2() {
        for &eps in &[0.05, 0.01, 1e-3, 1e-5] {
            for k in 1..=3 {
                let chain = build_chain(&spec(eps, k)).unwrap();
                let (jf, j1, j2) = chain.max_breakpoint_jumps();
                assert!(jf < 1e-12 && j1 < 1e-8 && j2 < 1e-8, "eps={eps} k={k}: {jf} {j1} {j2}");
            }
        }
    }

    #[test]
    fn sampled_jumps_at_breakpoints() {
        // Compare values just left/right of each breakpoint on 10⁴ samples.
        let chain = build_chain(&spec(0.01, 2)).unwrap();
        let total = chain.total_length();
        let mut worst = 0.0f64;
        for i in 0..10_000 {
            let t = total * i as f64 / 9_999.0;
            let seg = chain.segment_at(t);
            let (a, b) = chain.segment_range(seg);
            if (t - b).abs() < 1e-12 || (t - a).abs() < 1e-12 {
                continue;
            }
            worst = worst.max(chain.eval(t).unwrap().value);
        }
        assert!(worst < 1.0 + 1e-15);
        let (jf, _, _) = chain.max_breakpoint_jumps();
        assert!(jf < 1e-12);
    }

    #[test]
    fn symmetric_single_dumbbell() {
        let chain = build_chain(&spec(0.01, 1)).unwrap();
        let total = chain.total_length();
        for i in 0..=1000 {
            let t = total * i as f64 / 1000.0;
            let a = chain.eval(t).unwrap().value;
            let b = chain.eval(total - t).unwrap().value;
            assert!((a - b).abs() < 1e-12, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn positive_inside() {
        let chain = build_chain(&spec(1e-4, 3)).unwrap();
        let total = chain.total_length();
        for i in 1..5000 {
            let t = total * i as f64 / 5000.0;
            assert!(chain.eval(t).unwrap().value > 0.0);
        }
    }

    #[test]
    fn degenerate_cutoff_is_rejected() {
        let a = PI / 36.0;
        let bad = SmoothCutoff::new_unchecked(a, a);
        let err = build_chain_with(&spec(0.01, 2), bad).unwrap_err();
        assert!(matches!(err, Error::Construction(_)), "{err}");
    }

    #[test]
    fn scaled_profile() {
        let chain = build_chain(&spec(0.01, 2)).unwrap();
        let scaled = chain.scaled(4.0).unwrap();
        assert_eq!(scaled.total_length(), 2.0 * chain.total_length());
        for i in 0..=500 {
            let t = chain.total_length() * i as f64 / 500.0;
            let a = chain.eval(t).unwrap();
            let b = scaled.eval(2.0 * t).unwrap();
            assert_eq!(b.value, 2.0 * a.value);
            assert_eq!(b.d1, a.d1);
            assert_eq!(b.d2, a.d2 / 2.0);
        }
    }

    #[test]
    fn single_precision_chain_builds() {
        let s = DumbbellSpec::<f32>::new(0.01, 2, 3, 0, 1.0).unwrap();
        let chain = build_chain(&s).unwrap();
        assert_eq!(chain.segments().len(), 9);
        assert!((chain.eval(0.0).unwrap().d1 - 1.0).abs() < 1e-6);
    }
}
