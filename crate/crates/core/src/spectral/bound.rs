use crate::error::{Error, Result};
use crate::geometry::VolumeConstants;
use crate::profile::DumbbellSpec;
use crate::scalar::Real;

/// `C(m, p) = 2^{(n−1)/2} · 2/(π(n−1))` with `n = m − p`: the quotient of
/// the numerator estimate `vol/((n−1)L²)` by the denominator estimate
/// `2^{−(n−1)/2}·(π/2)·vol`.
pub fn bound_constant<T: Real>(m: usize, p: usize) -> Result<T> {
    if p + 2 > m {
        return Err(Error::Degree { m, p });
    }
    let nm1 = T::from_count(m - p - 1);
    Ok(T::lit(2.0).powf(nm1 / T::lit(2.0)) * T::lit(2.0) / (T::PI() * nm1))
}

/// `(A k̄ + B)^{2/m} · C(m, p) / L²` with `k̄ = spec.k`: upper bound for the
/// first `k̄` positive eigenvalues of the unit-volume metric.
pub fn eigenvalue_bound<T: Real>(spec: &DumbbellSpec<T>) -> Result<T> {
    let c = bound_constant::<T>(spec.m, spec.p)?;
    let vol = VolumeConstants::for_spec(spec).upper(spec.k);
    let l = spec.half_neck();
    Ok(vol.powf(T::lit(2.0) / T::from_count(spec.m)) * c / (l * l))
}

/// Observed convergence order `log₂(|λ_N − λ_2N| / |λ_2N − λ_4N|)`.
pub fn richardson_order<T: Real>(coarse: T, mid: T, fine: T) -> Option<T> {
    let (a, b) = ((coarse - mid).abs(), (mid - fine).abs());
    if a > T::zero() && b > T::zero() {
        Some((a / b).log2())
    } else {
        None
    }
}

/// Extrapolated limit from two grids at ratio 2 with known order.
pub fn richardson_extrapolate<T: Real>(coarse: T, fine: T, order: T) -> T {
    let f = T::lit(2.0).powf(order);
    (f * fine - coarse) / (f - T::one())
}
