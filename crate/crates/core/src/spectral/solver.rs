use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::matrices::{discretize, PathLaplacian, SymTridiagonal};
use crate::spectral::problem::SturmLiouvilleProblem;

/// Relative bracket width at which bisection stops.
pub const BISECTION_REL_TOL: f64 = 1e-12;
const MAX_BISECTION_STEPS: usize = 4000;
const INVERSE_ITERATIONS: usize = 6;
const MAX_BRACKET_DOUBLINGS: usize = 200;

/// Lowest generalized eigenvalues of a discretized problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    /// Ascending; entry 0 is the constant mode.
    pub eigenvalues: Vec<T>,
    /// Number of cells.
    pub grid_size: usize,
    /// Largest relative change of a positive eigenvalue under one grid
    /// doubling, divided by 3 (second-order Richardson error estimate).
    pub refinement_estimate: Option<T>,
}

impl<T: Real> Spectrum<T> {
    /// Positive mode `j ≥ 1`; `λ_0 = 0` is the constant.
    pub fn lambda(&self, j: usize) -> Option<T> {
        self.eigenvalues.get(j).copied()
    }
}

/// `K − λM` with `K` a path Laplacian, factored in a form that keeps full
/// relative accuracy for `λ` far below the scale of `K`.
struct Pencil<'a, T> {
    c: &'a [T],
    m: &'a [T],
    nu: &'a [T],
    pivmin: T,
}

impl<'a, T: Real> Pencil<'a, T> {
    fn new(k: &'a PathLaplacian<T>, mass: &'a SymTridiagonal<T>) -> Result<Self> {
        if k.dim() != mass.dim() || mass.off.len() + 1 != mass.dim() {
            return Err(Error::Domain(format!(
                "stiffness dimension {} does not match mass dimension {}",
                k.dim(),
                mass.dim()
            )));
        }
        Ok(Self {
            c: &k.conductance,
            m: &mass.diag,
            nu: &mass.off,
            pivmin: T::min_positive_value().sqrt(),
        })
    }

    fn dim(&self) -> usize {
        self.m.len()
    }

    /// Pivots `d_i` of `K − λM = L D Lᵀ`.
    ///
    /// With `d_i = q_i + c_i` the recurrence for `q_i` has no cancellation
    /// between the `O(c)` entries of `K`: the zero row sums are built in.
    fn for_each_pivot(&self, lambda: T, mut visit: impl FnMut(usize, T)) {
        let n = self.dim();
        let c_at = |i: usize| if i + 1 < n { self.c[i] } else { T::zero() };
        let mut q = -lambda * self.m[0];
        let mut d = self.guard(q + c_at(0));
        visit(0, d);
        for i in 1..n {
            let (cp, nu, mi) = (self.c[i - 1], self.nu[i - 1], self.m[i]);
            q = (cp * q - lambda * (mi * q + cp * (mi + nu + nu)) - lambda * lambda * nu * nu) / d;
            d = self.guard(q + c_at(i));
            visit(i, d);
        }
    }

    fn guard(&self, d: T) -> T {
        if d.abs() < self.pivmin {
            -self.pivmin
        } else {
            d
        }
    }

    /// Number of eigenvalues strictly below `lambda`.
    fn count_below(&self, lambda: T) -> usize {
        let mut count = 0;
        self.for_each_pivot(lambda, |_, d| {
            if d < T::zero() {
                count += 1;
            }
        });
        count
    }

    /// Initial guess for a bracket top: the largest diagonal quotient.
    fn diagonal_scale(&self) -> T {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.c[i - 1] } else { T::zero() };
                let right = if i + 1 < n { self.c[i] } else { T::zero() };
                (left + right) / self.m[i]
            })
            .fold(T::zero(), T::max)
    }

    /// Solves `(K − σM) x = r` with the pivots of [`Self::for_each_pivot`].
    fn solve_shifted(&self, sigma: T, r: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut d = vec![T::zero(); n];
        self.for_each_pivot(sigma, |i, di| d[i] = di);
        // l_i = b_i / d_i with b_i = −c_i − σν_i.
        let l: Vec<T> = (0..n - 1).map(|i| (-self.c[i] - sigma * self.nu[i]) / d[i]).collect();
        let mut y = r.to_vec();
        for i in 1..n {
            let prev = y[i - 1];
            y[i] -= l[i - 1] * prev;
        }
        for (yi, &di) in y.iter_mut().zip(&d) {
            *yi /= di;
        }
        for i in (0..n - 1).rev() {
            let next = y[i + 1];
            y[i] -= l[i] * next;
        }
        y
    }
}

/// The `count` smallest eigenvalues of `K u = λ M u`, by bisection on the
/// inertia of `K − λM`.
pub fn solve_lowest<T: Real>(
    stiffness: &PathLaplacian<T>,
    mass: &SymTridiagonal<T>,
    count: usize,
) -> Result<Spectrum<T>> {
    let pencil = Pencil::new(stiffness, mass)?;
    let n = pencil.dim();
    if count == 0 || count > n {
        return Err(Error::Domain(format!("cannot compute {count} eigenvalues of a {n}×{n} pencil")));
    }
    let mut upper = pencil.diagonal_scale().max(T::one());
    let mut doublings = 0;
    while pencil.count_below(upper) < count {
        upper = upper + upper;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !upper.is_finite() {
            return Err(Error::Bracket(format!(
                "fewer than {count} eigenvalues below {upper}; mass is not positive definite"
            )));
        }
    }
    let tol = T::tol(BISECTION_REL_TOL);
    let floor = T::lit(1e-200).max(T::min_positive_value() / T::epsilon());
    let mut eigenvalues = Vec::with_capacity(count);
    let mut lo = T::zero();
    for j in 0..count {
        let value = bisect(&pencil, j, lo, upper, tol, floor)?;
        eigenvalues.push(value);
        lo = value * (T::one() - tol);
    }
    Ok(Spectrum {
        eigenvalues,
        grid_size: n - 1,
        refinement_estimate: None,
    })
}

/// Eigenvalue `j` (0-based) in `[lo, hi)`, knowing fewer than `j + 1`
/// eigenvalues lie below `lo`.
fn bisect<T: Real>(pencil: &Pencil<'_, T>, j: usize, mut lo: T, mut hi: T, tol: T, floor: T) -> Result<T> {
    if lo > T::zero() && pencil.count_below(lo) > j {
        lo = T::zero();
    }
    for _ in 0..MAX_BISECTION_STEPS {
        if lo == T::zero() && hi < floor {
            return Ok(T::zero());
        }
        if lo > T::zero() && hi - lo <= tol * hi {
            return Ok(T::lit(0.5) * (lo + hi));
        }
        let mid = if lo == T::zero() {
            hi / T::lit(256.0)
        } else if hi > T::lit(4.0) * lo {
            (lo * hi).sqrt()
        } else {
            T::lit(0.5) * (lo + hi)
        };
        if pencil.count_below(mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Bracket(format!("bisection for eigenvalue {j} did not converge")))
}

/// M-normalized eigenvector for `lambda` by inverse iteration, kept
/// M-orthogonal to the constants and to `deflate`.
pub fn eigenvector<T: Real>(
    stiffness: &PathLaplacian<T>,
    mass: &SymTridiagonal<T>,
    lambda: T,
    deflate: &[Vec<T>],
) -> Result<Vec<T>> {
    let pencil = Pencil::new(stiffness, mass)?;
    let n = pencil.dim();
    let ones = vec![T::one(); n];
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(deflate.len() + 1);
    if lambda > T::zero() {
        basis.push(normalize(mass, ones.clone())?);
    }
    for v in deflate {
        basis.push(normalize(mass, v.clone())?);
    }
    // Start from a vector with a component in every direction.
    let mut x: Vec<T> = (0..n)
        .map(|i| {
            let s = T::from_count(i) / T::from_count(n - 1);
            (T::lit(3.1) * s).sin() + T::lit(0.7) * s - T::lit(0.3)
        })
        .collect();
    for _ in 0..INVERSE_ITERATIONS {
        orthogonalize(mass, &basis, &mut x);
        x = normalize(mass, x)?;
        let rhs = mass.mul_vec(&x);
        x = pencil.solve_shifted(lambda, &rhs);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Bracket(format!("inverse iteration diverged at {lambda}")));
        }
    }
    orthogonalize(mass, &basis, &mut x);
    normalize(mass, x)
}

fn orthogonalize<T: Real>(mass: &SymTridiagonal<T>, basis: &[Vec<T>], x: &mut [T]) {
    for _ in 0..2 {
        for b in basis {
            let proj = mass.inner(b, x);
            for (xi, &bi) in x.iter_mut().zip(b) {
                *xi -= proj * bi;
            }
        }
    }
}

fn normalize<T: Real>(mass: &SymTridiagonal<T>, mut x: Vec<T>) -> Result<Vec<T>> {
    let norm = mass.inner(&x, &x).sqrt();
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(Error::ZeroDenominator);
    }
    for v in &mut x {
        *v /= norm;
    }
    Ok(x)
}

/// Discretizes with `grid` cells and returns the lowest `count` eigenvalues.
pub fn solve_problem<T: Real>(
    problem: &SturmLiouvilleProblem<T>,
    grid: usize,
    count: usize,
) -> Result<Spectrum<T>> {
    let d = discretize(problem, grid)?;
    solve_lowest(&d.stiffness, &d.mass, count)
}

/// Like [`solve_problem`], with a second solve on `2·grid` cells to fill
/// in [`Spectrum::refinement_estimate`]. Eigenvalues are those of the
/// finer grid.
pub fn solve_with_refinement<T: Real>(
    problem: &SturmLiouvilleProblem<T>,
    grid: usize,
    count: usize,
) -> Result<Spectrum<T>> {
    let coarse = solve_problem(problem, grid, count)?;
    let mut fine = solve_problem(problem, 2 * grid, count)?;
    let estimate = coarse
        .eigenvalues
        .iter()
        .zip(&fine.eigenvalues)
        .skip(1)
        .filter(|(_, &f)| f > T::zero())
        .map(|(&c, &f)| (c - f).abs() / (T::lit(3.0) * f))
        .fold(T::zero(), T::max);
    fine.refinement_estimate = Some(estimate);
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{build_chain, DumbbellSpec};
    use crate::spectral::matrices::discretize;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn interval_neumann_spectrum() {
        let p = SturmLiouvilleProblem::<f64>::interval(PI).unwrap();
        let s = solve_problem(&p, 4096, 4).unwrap();
        assert_eq!(s.eigenvalues[0], 0.0);
        for l in 1..4 {
            let exact = (l * l) as f64;
            assert_relative_eq!(s.eigenvalues[l], exact, max_relative = 1e-5);
        }
    }

    #[test]
    fn sphere_sector_spectra() {
        for n in [2usize, 3, 5] {
            let p = SturmLiouvilleProblem::<f64>::sphere_sector(n).unwrap();
            let s = solve_problem(&p, 4096, 4).unwrap();
            for l in 1..4 {
                let exact = (l * (l + n - 1)) as f64;
                assert_relative_eq!(s.eigenvalues[l], exact, max_relative = 1e-3);
            }
        }
    }

    #[test]
    fn kernel_is_exact_on_chains() {
        let spec = DumbbellSpec::new(1e-4, 3, 3, 0, 0.0).unwrap();
        let p = SturmLiouvilleProblem::from_chain(&build_chain(&spec).unwrap());
        let s = solve_problem(&p, 4096, 5).unwrap();
        assert!(s.eigenvalues[0] <= 1e-10 * s.eigenvalues[4]);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] < w[1]), "{:?}", s.eigenvalues);
    }

    #[test]
    fn counts_match_dense_reference() {
        // Small pencil against an independent characteristic-polynomial
        // sign count (Sturm sequence of the assembled matrix).
        let p = SturmLiouvilleProblem::<f64>::sphere_sector(3).unwrap();
        let d = discretize(&p, 64).unwrap();
        let s = solve_lowest(&d.stiffness, &d.mass, 6).unwrap();
        let k = d.stiffness.to_tridiagonal();
        let sturm = |lambda: f64| {
            let n = k.dim();
            let mut count = 0;
            let mut piv = k.diag[0] - lambda * d.mass.diag[0];
            if piv < 0.0 {
                count += 1;
            }
            for i in 1..n {
                let b = k.off[i - 1] - lambda * d.mass.off[i - 1];
                piv = k.diag[i] - lambda * d.mass.diag[i] - b * b / piv;
                if piv < 0.0 {
                    count += 1;
                }
            }
            count
        };
        for (j, &lam) in s.eigenvalues.iter().enumerate().skip(1) {
            assert_eq!(sturm(lam * (1.0 - 1e-9)), j);
            assert_eq!(sturm(lam * (1.0 + 1e-9)), j + 1);
        }
    }

    #[test]
    fn eigenvector_quotient_matches_eigenvalue() {
        let spec = DumbbellSpec::<f64>::new(0.01, 1, 2, 0, 0.0).unwrap();
        let p = SturmLiouvilleProblem::from_chain(&build_chain(&spec).unwrap());
        let d = discretize(&p, 4096).unwrap();
        let s = solve_lowest(&d.stiffness, &d.mass, 3).unwrap();
        let u1 = eigenvector(&d.stiffness, &d.mass, s.eigenvalues[1], &[]).unwrap();
        let rq = d.rayleigh_quotient_nodal(&u1).unwrap();
        assert_relative_eq!(rq, s.eigenvalues[1], max_relative = 1e-9);
        let u2 = eigenvector(&d.stiffness, &d.mass, s.eigenvalues[2], std::slice::from_ref(&u1)).unwrap();
        assert_relative_eq!(d.rayleigh_quotient_nodal(&u2).unwrap(), s.eigenvalues[2], max_relative = 1e-9);
        assert!(d.mass.inner(&u1, &u2).abs() < 1e-9);
    }

    #[test]
    fn tiny_eigenvalues_keep_relative_accuracy() {
        // Two grids that differ only by a factor 4 in the metric.
        let spec = DumbbellSpec::new(1e-5, 2, 4, 0, 0.0).unwrap();
        let chain = build_chain(&spec).unwrap();
        let a = solve_problem(&SturmLiouvilleProblem::from_chain(&chain), 2048, 4).unwrap();
        let b = solve_problem(&SturmLiouvilleProblem::from_chain(&chain.scaled(4.0).unwrap()), 2048, 4).unwrap();
        assert!(a.eigenvalues[1] < 1e-12, "{:?}", a.eigenvalues);
        for j in 1..4 {
            assert_relative_eq!(a.eigenvalues[j], 4.0 * b.eigenvalues[j], max_relative = 1e-10);
        }
    }

    #[test]
    fn rejects_bad_counts() {
        let p = SturmLiouvilleProblem::<f64>::interval(1.0).unwrap();
        let d = discretize(&p, 64).unwrap();
        assert!(solve_lowest(&d.stiffness, &d.mass, 0).is_err());
        assert!(solve_lowest(&d.stiffness, &d.mass, 66).is_err());
        assert_eq!(solve_lowest(&d.stiffness, &d.mass, 65).unwrap().eigenvalues.len(), 65);
    }

    #[test]
    fn refinement_estimate_is_small_and_second_order() {
        let p = SturmLiouvilleProblem::<f64>::sphere_sector(2).unwrap();
        let s = solve_with_refinement(&p, 512, 4).unwrap();
        let est = s.refinement_estimate.unwrap();
        assert_eq!(s.grid_size, 1024);
        let true_err = (s.eigenvalues[3] - 12.0).abs() / 12.0;
        assert!(est > 0.0 && est < 1e-4);
        assert!(true_err < 3.0 * est);
    }

    #[test]
    fn single_precision_solve() {
        let p = SturmLiouvilleProblem::<f32>::interval(std::f32::consts::PI).unwrap();
        let s = solve_problem(&p, 256, 3).unwrap();
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-3);
        assert!((s.eigenvalues[2] - 4.0).abs() < 4e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn random_weights_give_sorted_nonnegative_spectra(a in 0.1f64..3.0, b in 0.0f64..2.0) {
            let p = SturmLiouvilleProblem::custom(2.0, move |t: f64| a + b * (3.0 * t).sin().powi(2)).unwrap();
            let s = solve_problem(&p, 128, 5).unwrap();
            prop_assert_eq!(s.eigenvalues[0], 0.0);
            prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] < w[1]));
            // Scaling the weight leaves the spectrum unchanged.
            let q = SturmLiouvilleProblem::custom(2.0, move |t: f64| 3.0 * (a + b * (3.0 * t).sin().powi(2))).unwrap();
            let r = solve_problem(&q, 128, 5).unwrap();
            for j in 1..5 {
                prop_assert!((s.eigenvalues[j] - r.eigenvalues[j]).abs() <= 1e-10 * s.eigenvalues[j]);
            }
        }
    }
}
