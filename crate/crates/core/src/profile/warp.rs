//! The three building-block warp functions around a neck end.

use crate::error::{Error, Result};
use crate::profile::SmoothCutoff;

use crate::scalar::Real;

/// Value of a function together with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> Jet<T> {
    pub fn new(value: T, d1: T, d2: T) -> Self {
        Self { value, d1, d2 }
    }

    /// Jet of `x ↦ f(c − x)` given the jet of `f` at `c − x`.
    pub fn reflected(self) -> Self {
        Self::new(self.value, -self.d1, self.d2)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

/// Length of the connector window, `π/12`.
pub fn connector_length<T: Real>() -> T {
    T::PI() / T::lit(12.0)
}

pub const CONNECTOR_LENGTH: f64 = std::f64::consts::PI / 12.0;

/// `f_ε(s) = ε cosh(s + L) = ½eˢ + ½ε²e⁻ˢ`, the neck warp in the coordinate
/// `s = r − L` measured from the right neck end.
pub fn eval_f_eps<T: Real>(eps: T, s: T) -> Result<Jet<T>> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(f_eps_jet(eps, s))
}

pub(crate) fn f_eps_jet<T: Real>(eps: T, s: T) -> Jet<T> {
    let half = T::lit(0.5);
    let grow = half * s.exp();
    let decay = half * eps * eps * (-s).exp();
    let value = grow + decay;
    Jet::new(value, grow - decay, value)
}

/// `h(s) = sin(s + π/6)`, the round-sphere side of the connector.
pub fn eval_h<T: Real>(s: T) -> Jet<T> {
    if s < T::zero() || s > connector_length() {
        log::warn!("eval_h called outside [0, π/12] at s = {s}");
    }
    let (sin, cos) = (s + T::FRAC_PI_6()).sin_cos();
    Jet::new(sin, cos, -sin)
}

/// `F_ε(s) = χ(s) f_ε(s) + (1 − χ(s)) h(s)` on `[0, π/12]`.
pub fn eval_connector<T: Real>(eps: T, s: T, cutoff: &SmoothCutoff<T>) -> Result<Jet<T>> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(s >= T::zero() && s <= connector_length()) {
        return Err(Error::Domain(format!("connector coordinate {s} outside [0, π/12]")));
    }
    Ok(connector_jet(eps, s, cutoff))
}

pub(crate) fn connector_jet<T: Real>(eps: T, s: T, cutoff: &SmoothCutoff<T>) -> Jet<T> {
    let (chi, dchi, ddchi) = cutoff.jet(s);
    if chi == T::one() && dchi == T::zero() && ddchi == T::zero() {
        return f_eps_jet(eps, s);
    }
    let (sin, cos) = (s + T::FRAC_PI_6()).sin_cos();
    let h = Jet::new(sin, cos, -sin);
    if chi == T::zero() && dchi == T::zero() && ddchi == T::zero() {
        return h;
    }
    let f = f_eps_jet(eps, s);
    let gap = f.value - h.value;
    let dgap = f.d1 - h.d1;
    let ddgap = f.d2 - h.d2;
    Jet::new(
        h.value + chi * gap,
        h.d1 + dchi * gap + chi * dgap,
        h.d2 + ddchi * gap + T::lit(2.0) * dchi * dgap + chi * ddgap,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn f_eps_at_origin() {
        let j = eval_f_eps(0.01, 0.0).unwrap();
        assert_relative_eq!(j.value, 0.50005, epsilon = 1e-15);
        assert_eq!(j.d2, j.value);
    }

    #[test]
    fn f_eps_matches_high_precision_value() {
        // ½e^{π/12} + ½(0.0025)e^{−π/12}, evaluated with 30-digit arithmetic.
        let j = eval_f_eps(0.05, PI / 12.0).unwrap();
        assert_relative_eq!(j.value, 0.650_595_015_614_507_211_244_4, max_relative = 1e-15);
    }

    #[test]
    fn f_eps_domain() {
        assert!(eval_f_eps(0.0, 0.0).is_err());
        assert!(eval_f_eps(1.0, 0.0).is_err());
        assert!(eval_f_eps(-0.5, 0.0).is_err());
    }

    #[test]
    fn f_eps_is_the_shifted_neck_warp() {
        let eps: f64 = 0.01;
        let l = -eps.ln();
        for r in [-l, -1.0, 0.0, 2.5, l] {
            let j = eval_f_eps(eps, r - l).unwrap();
            assert_relative_eq!(j.value, eps * r.cosh(), max_relative = 1e-13);
            assert_relative_eq!(j.d1, eps * r.sinh(), max_relative = 1e-12, epsilon = 1e-15);
        }
    }

    #[test]
    fn h_values() {
        assert_relative_eq!(eval_h(0.0).value, 0.5, epsilon = 1e-15);
        assert_relative_eq!(eval_h(PI / 12.0).value, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(eval_h(0.0).d2, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn connector_plateaus() {
        let c = SmoothCutoff::connector();
        let s = PI / 40.0;
        assert_eq!(eval_connector(0.01, s, &c).unwrap(), eval_f_eps(0.01, s).unwrap());
        let end = eval_connector(0.01, PI / 12.0, &c).unwrap();
        assert_relative_eq!(end.value, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert!(eval_connector(0.01, -1e-3, &c).is_err());
        assert!(eval_connector(0.01, PI / 12.0 + 1e-3, &c).is_err());
    }

    #[test]
    fn connector_bounds_on_uniform_samples() {
        let c = SmoothCutoff::connector();
        for i in 0..200 {
            let s = PI / 12.0 * i as f64 / 199.0;
            let v = eval_connector(0.01, s, &c).unwrap().value;
            assert!((0.5..0.8).contains(&v), "s={s} F={v}");
        }
    }

    #[test]
    fn connector_derivatives_agree_with_central_differences() {
        let c = SmoothCutoff::connector();
        let h = 1e-6;
        for i in 1..100 {
            let s = PI / 12.0 * i as f64 / 100.0;
            let j = connector_jet(0.02, s, &c);
            let fd1 = (connector_jet(0.02, s + h, &c).value - connector_jet(0.02, s - h, &c).value) / (2.0 * h);
            let fd2 = (connector_jet(0.02, s + h, &c).d1 - connector_jet(0.02, s - h, &c).d1) / (2.0 * h);
            assert!((j.d1 - fd1).abs() < 1e-6 * (1.0 + j.d1.abs()));
            assert!((j.d2 - fd2).abs() < 1e-5 * (1.0 + j.d2.abs()));
        }
    }
}
