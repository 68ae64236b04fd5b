//! Gauss–Legendre rules and composite integration with interval doubling.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// An n-point Gauss–Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds the rule by Newton iteration on the Legendre three-term recurrence.
    pub fn new(points: usize) -> Self {
        assert!(points >= 1, "a quadrature rule needs at least one point");
        let n = points;
        let nf = T::from_count(n);
        let one = T::one();
        let two = T::lit(2.0);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th largest root.
            let k = T::from_count(i) + T::lit(0.75);
            let mut x = (T::PI() * k / (nf + T::lit(0.5))).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::epsilon() * T::lit(4.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != T::zero() {
                dp = d;
            }
            let w = two / ((one - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Iterates over `(x, w)` pairs mapped onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }

    pub fn integrate<F: Fn(T) -> T>(&self, f: F, a: T, b: T) -> T {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Applies the rule on `pieces` equal subintervals of `[a, b]`.
    pub fn integrate_composite<F: Fn(T) -> T>(&self, f: &F, a: T, b: T, pieces: usize) -> T {
        let h = (b - a) / T::from_count(pieces);
        (0..pieces)
            .map(|i| {
                let lo = a + h * T::from_count(i);
                let hi = if i + 1 == pieces { b } else { lo + h };
                self.integrate(f, lo, hi)
            })
            .sum()
    }
}

/// P_n(x) and P_n'(x).
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = T::from_count(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_count(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Doubles the number of subintervals until two successive composite
/// estimates agree to `rel_tol`.
pub fn integrate_to_tolerance<T: Real, F: Fn(T) -> T>(
    rule: &GaussLegendre<T>,
    f: F,
    a: T,
    b: T,
    rel_tol: T,
) -> Result<T> {
    const MAX_LEVELS: usize = 20;
    let mut pieces = 1usize;
    let mut prev = rule.integrate_composite(&f, a, b, pieces);
    let mut change = T::infinity();
    for _ in 0..MAX_LEVELS {
        pieces *= 2;
        let next = rule.integrate_composite(&f, a, b, pieces);
        change = (next - prev).abs();
        let scale = next.abs().max(T::min_positive_value());
        if change <= rel_tol * scale {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature {
        a: a.as_f64(),
        b: b.as_f64(),
        tol: rel_tol.as_f64(),
        change: change.as_f64(),
    })
}
