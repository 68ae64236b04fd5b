use crate::error::{Error, Result};
use crate::geometry::sphere_volume;
use crate::scalar::Real;

/// Largest neck parameter accepted by the construction. Above it the
/// connector is no longer guaranteed to stay inside `[0.5, 0.8)`.
pub const EPS0: f64 = 0.05;

/// Parameters of one metric in the family: the neck parameter, the number of
/// necks, the ambient dimension `m`, the form degree `p`, and the volume of
/// the part of the manifold left untouched by the construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DumbbellSpec<T> {
    pub eps: T,
    pub k: usize,
    pub m: usize,
    pub p: usize,
    pub vol_h2: T,
    log_inv_eps: T,
}

impl<T: Real> DumbbellSpec<T> {
    pub fn new(eps: T, k: usize, m: usize, p: usize, vol_h2: T) -> Result<Self> {
        if !(eps > T::zero()) || eps > T::lit(EPS0) {
            return Err(Error::Domain(format!("eps = {eps} must lie in (0, {EPS0}]")));
        }
        if k == 0 {
            return Err(Error::Domain("the chain needs at least one neck".into()));
        }
        if m < 2 {
            return Err(Error::Domain(format!("ambient dimension m = {m} must be >= 2")));
        }
        if p + 2 > m {
            return Err(Error::Degree { m, p });
        }
        if !(vol_h2 >= T::zero()) || !vol_h2.is_finite() {
            return Err(Error::Domain(format!("vol_h2 = {vol_h2} must be finite and >= 0")));
        }
        Ok(Self {
            eps,
            k,
            m,
            p,
            vol_h2,
            log_inv_eps: -eps.ln(),
        })
    }

    /// Same as [`DumbbellSpec::new`] with the untouched part modeled by a
    /// round `S^m`.
    pub fn with_round_remainder(eps: T, k: usize, m: usize, p: usize) -> Result<Self> {
        Self::new(eps, k, m, p, sphere_volume(m))
    }

    /// Fiber dimension `n = m − p` of the dumbbell chain.
    pub fn n(&self) -> usize {
        self.m - self.p
    }

    /// Half-length of each neck, `L = |log ε|`.
    pub fn half_neck(&self) -> T {
        self.log_inv_eps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(DumbbellSpec::new(0.01, 1, 3, 0, 1.0).is_ok());
        assert!(DumbbellSpec::new(0.06, 1, 3, 0, 1.0).is_err());
        assert!(DumbbellSpec::new(0.0, 1, 3, 0, 1.0).is_err());
        assert!(DumbbellSpec::new(0.01, 0, 3, 0, 1.0).is_err());
        assert_eq!(
            DumbbellSpec::new(0.01, 1, 3, 2, 1.0).unwrap_err(),
            Error::Degree { m: 3, p: 2 }
        );
        assert!(DumbbellSpec::new(0.01, 1, 3, 1, -1.0).is_err());
    }

    #[test]
    fn derived_fields() {
        let s = DumbbellSpec::new(0.01f64, 2, 4, 1, 0.0).unwrap();
        assert_eq!(s.n(), 3);
        assert!((s.half_neck() - 100f64.ln()).abs() < 1e-14);
    }
}
