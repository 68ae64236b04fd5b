use crate::error::{Error, Result};
use crate::profile::{ChainProfile, DumbbellSpec};
use crate::scalar::Real;

/// A profile function `u(t)` with its derivative.
pub trait TestFunction<T> {
    fn value(&self, t: T) -> T;
    fn derivative(&self, t: T) -> T;
}

impl<T: Real, F: Fn(T) -> (T, T)> TestFunction<T> for F {
    fn value(&self, t: T) -> T {
        self(t).0
    }

    fn derivative(&self, t: T) -> T {
        self(t).1
    }
}

/// Continuous piecewise-linear function through `knots`, constant beyond
/// the first and last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear<T> {
    knots: Vec<(T, T)>,
}

impl<T: Real> PiecewiseLinear<T> {
    /// Knots must have strictly increasing abscissae.
    pub fn new(knots: Vec<(T, T)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Domain("piecewise-linear function needs a knot".into()));
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Domain("knot abscissae must increase strictly".into()));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(T, T)] {
        &self.knots
    }

    /// Index `i` of the piece `[t_i, t_{i+1}]` holding `t`, if inside.
    fn piece(&self, t: T) -> Option<usize> {
        let k = &self.knots;
        if k.len() < 2 || t < k[0].0 || t > k[k.len() - 1].0 {
            return None;
        }
        Some(k.partition_point(|&(x, _)| x <= t).saturating_sub(1).min(k.len() - 2))
    }

    /// Closure of `{u ≠ 0}` as a list of intervals.
    pub fn support(&self) -> Vec<(T, T)> {
        let mut out: Vec<(T, T)> = Vec::new();
        for w in self.knots.windows(2) {
            let ((a, ua), (b, ub)) = (w[0], w[1]);
            if ua == T::zero() && ub == T::zero() {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => out.push((a, b)),
            }
        }
        out
    }

    /// Slopes of the linear pieces.
    pub fn slopes(&self) -> Vec<T> {
        self.knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }
}

impl<T: Real> TestFunction<T> for PiecewiseLinear<T> {
    fn value(&self, t: T) -> T {
        match self.piece(t) {
            Some(i) => {
                let ((a, ua), (b, ub)) = (self.knots[i], self.knots[i + 1]);
                let s = (t - a) / (b - a);
                ua + (ub - ua) * s
            }
            None if t < self.knots[0].0 => self.knots[0].1,
            None => self.knots[self.knots.len() - 1].1,
        }
    }

    fn derivative(&self, t: T) -> T {
        match self.piece(t) {
            Some(i) => {
                let ((a, ua), (b, ub)) = (self.knots[i], self.knots[i + 1]);
                (ub - ua) / (b - a)
            }
            None => T::zero(),
        }
    }
}

/// Linear cutoffs `χ_1, …, χ_k̄`, one per bulb left of each neck.
///
/// `χ_1` is 1 on the left cap and falls to 0 across the left half of the
/// first neck. For `i ≥ 2`, `χ_i` rises across the right half of neck `i − 1`, is 1
/// up to neck `i`, and falls across its left half. Ramps have slope
/// `±1/L` in metric units.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFormFamily<T> {
    pub cutoffs: Vec<PiecewiseLinear<T>>,
    /// Ramp length `L` in metric units.
    pub ramp: T,
    /// The bulb right of the last neck: 1 on the right cap, rising across
    /// the right half of neck `k̄`. Not part of the family proper; with it
    /// the supports tile the chain.
    pub closing: PiecewiseLinear<T>,
}

impl<T: Real> TestFormFamily<T> {
    pub fn count(&self) -> usize {
        self.cutoffs.len()
    }
}

/// The family for `k̄ = spec.k` on a chain with exactly `k̄` necks.
pub fn build_cutoffs<T: Real>(
    spec: &DumbbellSpec<T>,
    chain: &ChainProfile<T>,
) -> Result<TestFormFamily<T>> {
    let necks = chain.neck_indices();
    if necks.len() != spec.k || spec.k == 0 {
        return Err(Error::Domain(format!(
            "{} cutoffs need as many necks, chain has {}",
            spec.k,
            necks.len()
        )));
    }
    let (zero, one) = (T::zero(), T::one());
    let total = chain.total_length();
    let ranges: Vec<(T, T, T)> = necks
        .iter()
        .map(|&i| {
            let (a, b) = chain.segment_range(i);
            (a, T::lit(0.5) * (a + b), b)
        })
        .collect();
    let mut cutoffs = Vec::with_capacity(spec.k);
    let (s1, m1, _) = ranges[0];
    cutoffs.push(PiecewiseLinear::new(vec![(zero, one), (s1, one), (m1, zero), (total, zero)])?);
    for w in ranges.windows(2) {
        let ((_, mp, ep), (sn, mn, _)) = (w[0], w[1]);
        cutoffs.push(PiecewiseLinear::new(vec![
            (zero, zero),
            (mp, zero),
            (ep, one),
            (sn, one),
            (mn, zero),
            (total, zero),
        ])?);
    }
    let (_, ml, el) = ranges[ranges.len() - 1];
    let closing = PiecewiseLinear::new(vec![(zero, zero), (ml, zero), (el, one), (total, one)])?;
    Ok(TestFormFamily {
        cutoffs,
        ramp: spec.half_neck() * chain.stretch(),
        closing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::build_chain;
    use crate::spectral::{discretize, SturmLiouvilleProblem};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn setup(eps: f64, k: usize, n: usize) -> (DumbbellSpec<f64>, ChainProfile<f64>) {
        let spec = DumbbellSpec::new(eps, k, n, 0, 0.0).unwrap();
        let chain = build_chain(&spec).unwrap();
        (spec, chain)
    }

    #[test]
    fn piecewise_linear_basics() {
        let u = PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 2.0)]).unwrap();
        assert_eq!(u.value(0.5), 1.0);
        assert_eq!(u.derivative(0.5), 2.0);
        assert_eq!(u.value(2.0), 2.0);
        assert_eq!(u.derivative(2.0), 0.0);
        assert_eq!(u.value(5.0), 2.0);
        assert_eq!(u.value(-1.0), 0.0);
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
    }

    /// The cutoffs written in the neck coordinate `r` of the first neck
    /// (origin at its midpoint), bulbs spaced `2π/3` apart.
    fn cutoff_in_neck_coordinate(i: usize, r: f64, l: f64) -> f64 {
        let g = 2.0 * PI / 3.0;
        if i == 1 {
            return if r <= -l {
                1.0
            } else if r <= 0.0 {
                -r / l
            } else {
                0.0
            };
        }
        let (i, fi) = (i as f64, i as f64);
        let rise0 = (2.0 * i - 4.0) * l + (fi - 2.0) * g;
        let rise1 = (2.0 * i - 3.0) * l + (fi - 2.0) * g;
        let fall0 = (2.0 * i - 3.0) * l + (fi - 1.0) * g;
        let fall1 = (2.0 * i - 2.0) * l + (fi - 1.0) * g;
        if r <= rise0 {
            0.0
        } else if r <= rise1 {
            (r - rise0) / l
        } else if r <= fall0 {
            1.0
        } else if r <= fall1 {
            -(r - fall1) / l
        } else {
            0.0
        }
    }

    #[test]
    fn matches_neck_coordinate_formulas() {
        for k in 1..=3 {
            let (spec, chain) = setup(0.01, k, 3);
            let fam = build_cutoffs(&spec, &chain).unwrap();
            let l = spec.half_neck();
            let (a, b) = chain.segment_range(chain.neck_indices()[0]);
            let origin = 0.5 * (a + b);
            for (idx, chi) in fam.cutoffs.iter().enumerate() {
                for s in 0..2000 {
                    let t = chain.total_length() * s as f64 / 1999.0;
                    let want = cutoff_in_neck_coordinate(idx + 1, t - origin, l);
                    assert!((chi.value(t) - want).abs() < 1e-12, "k={k} i={} t={t}", idx + 1);
                }
            }
        }
    }

    #[test]
    fn slopes_and_range() {
        let (spec, chain) = setup(1e-3, 3, 3);
        let fam = build_cutoffs(&spec, &chain).unwrap();
        let l = spec.half_neck();
        for chi in fam.cutoffs.iter().chain(std::iter::once(&fam.closing)) {
            for s in chi.slopes() {
                assert!(s == 0.0 || (s.abs() - 1.0 / l).abs() < 1e-12 / l, "{s}");
            }
            assert!(chi.knots().iter().all(|&(_, v)| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn supports_are_disjoint() {
        let (spec, chain) = setup(1e-3, 3, 2);
        let fam = build_cutoffs(&spec, &chain).unwrap();
        let mut all: Vec<(f64, f64)> = fam
            .cutoffs
            .iter()
            .chain(std::iter::once(&fam.closing))
            .flat_map(|c| c.support())
            .collect();
        assert_eq!(all.len(), 4);
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in all.windows(2) {
            assert!(w[0].1 <= w[1].0);
        }
        // Together they cover the chain.
        assert_eq!(all[0].0, 0.0);
        assert_eq!(all[3].1, chain.total_length());
    }

    #[test]
    fn needs_matching_neck_count() {
        let (_, chain) = setup(0.01, 2, 3);
        let other = DumbbellSpec::new(0.01, 3, 3, 0, 0.0).unwrap();
        assert!(build_cutoffs(&other, &chain).is_err());
    }

    #[test]
    fn quadrature_quotient_equals_nodal_quotient() {
        let (spec, chain) = setup(1e-3, 2, 3);
        let fam = build_cutoffs(&spec, &chain).unwrap();
        let d = discretize(&SturmLiouvilleProblem::from_chain(&chain), 4096).unwrap();
        for chi in &fam.cutoffs {
            let rq = d.rayleigh_quotient(chi).unwrap();
            let nodal = d.rayleigh_quotient_nodal(&d.interpolate(chi)).unwrap();
            assert_relative_eq!(rq, nodal, max_relative = 1e-9);
        }
    }

    #[test]
    fn first_cutoff_surface_quotient_is_below_bound() {
        // n = 2, eps = 0.01: bounded by C/L² with C = √2·2/π.
        let (spec, chain) = setup(0.01, 1, 2);
        let fam = build_cutoffs(&spec, &chain).unwrap();
        let d = discretize(&SturmLiouvilleProblem::from_chain(&chain), 4096).unwrap();
        let l = spec.half_neck();
        let rq = d.rayleigh_quotient(&fam.cutoffs[0]).unwrap();
        assert!(rq <= 2f64.sqrt() * 2.0 / PI / (l * l), "{rq}");
        let const_one = |_t: f64| (1.0, 0.0);
        assert_eq!(d.rayleigh_quotient(&const_one).unwrap(), 0.0);
    }
}
