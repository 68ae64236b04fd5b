use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smooth monotone step from 1 (at `s <= a`) to 0 (at `s >= b`).
///
/// Realized as `ψ(b−s) / (ψ(b−s) + ψ(s−a))` with `ψ(t) = exp(−1/t)` for
/// `t > 0` and 0 otherwise, so every derivative vanishes at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothCutoff<T> {
    a: T,
    b: T,
}

impl<T: Real> SmoothCutoff<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!(
                "cutoff transition needs a < b, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// Skips the `a < b` check. Only useful for negative controls: a
    /// degenerate cutoff is a step function and breaks the profile.
    pub fn new_unchecked(a: T, b: T) -> Self {
        Self { a, b }
    }

    /// Transition on `[π/36, π/18]`, the window used by the connector.
    pub fn connector() -> Self {
        Self {
            a: T::PI() / T::lit(36.0),
            b: T::PI() / T::lit(18.0),
        }
    }

    pub fn start(&self) -> T {
        self.a
    }

    pub fn end(&self) -> T {
        self.b
    }

    pub fn value(&self, s: T) -> T {
        self.jet(s).0
    }

    /// `(χ, χ′, χ″)` at `s`.
    pub fn jet(&self, s: T) -> (T, T, T) {
        if s <= self.a && s < self.b {
            return (T::one(), T::zero(), T::zero());
        }
        if s >= self.b && s > self.a {
            return (T::zero(), T::zero(), T::zero());
        }
        let (u, du, ddu) = psi(self.b - s);
        let (v, dv, ddv) = psi(s - self.a);
        // d/ds of ψ(b − s) flips the sign of the first derivative.
        let du = -du;
        let sum = u + v;
        let chi = u / sum;
        let num1 = du * v - u * dv;
        let d1 = num1 / (sum * sum);
        let d2 = (ddu * v - u * ddv) / (sum * sum)
            - T::lit(2.0) * num1 * (du + dv) / (sum * sum * sum);
        (chi, d1, d2)
    }
}

/// `ψ(t) = exp(−1/t)` with its first two derivatives; zero for `t <= 0` and
/// wherever the exponential underflows.
fn psi<T: Real>(t: T) -> (T, T, T) {
    if t <= T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    let p = (-t.recip()).exp();
    if p == T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    let t2 = t * t;
    let d1 = p / t2;
    let d2 = p * (T::one() - T::lit(2.0) * t) / (t2 * t2);
    (p, d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_empty_transition() {
        assert!(SmoothCutoff::new(0.1, 0.1).is_err());
        assert!(SmoothCutoff::new(0.2, 0.1).is_err());
    }

    #[test]
    fn exact_plateaus() {
        let c = SmoothCutoff::<f64>::connector();
        assert_eq!(c.jet(0.0), (1.0, 0.0, 0.0));
        assert_eq!(c.jet(PI / 36.0), (1.0, 0.0, 0.0));
        assert_eq!(c.jet(PI / 18.0), (0.0, 0.0, 0.0));
        assert_eq!(c.jet(PI / 12.0), (0.0, 0.0, 0.0));
    }

    #[test]
    fn derivatives_vanish_at_transition_ends() {
        let c = SmoothCutoff::<f64>::connector();
        for s in [c.start() + 1e-4, c.end() - 1e-4] {
            let (_, d1, d2) = c.jet(s);
            assert!(d1.abs() < 1e-10 && d2.abs() < 1e-10, "s={s}: {d1} {d2}");
        }
    }

    #[test]
    fn derivatives_agree_with_central_differences() {
        let c = SmoothCutoff::<f64>::connector();
        let h = 1e-6;
        for i in 1..50 {
            let s = c.start() + (c.end() - c.start()) * i as f64 / 50.0;
            let (_, d1, d2) = c.jet(s);
            let fd1 = (c.value(s + h) - c.value(s - h)) / (2.0 * h);
            let fd2 = (c.jet(s + h).1 - c.jet(s - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()), "s={s}");
            assert!((d2 - fd2).abs() < 1e-5 * (1.0 + d2.abs()), "s={s}");
        }
    }

    proptest! {
        #[test]
        fn monotone_and_bounded(s1 in 0.0..PI / 12.0, s2 in 0.0..PI / 12.0) {
            let c = SmoothCutoff::<f64>::connector();
            let (lo, hi) = if s1 < s2 { (s1, s2) } else { (s2, s1) };
            let (v_lo, v_hi) = (c.value(lo), c.value(hi));
            prop_assert!(v_hi <= v_lo);
            prop_assert!((0.0..=1.0).contains(&v_lo));
            prop_assert_eq!(v_lo + (1.0 - v_lo), 1.0);
        }
    }
}
