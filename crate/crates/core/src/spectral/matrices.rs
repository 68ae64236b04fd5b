use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;
use crate::spectral::problem::{Mesh, SturmLiouvilleProblem};
use crate::spectral::testform::TestFunction;

/// Smallest admissible diagonal mass entry.
const MASS_FLOOR: f64 = 1e-300;

/// Symmetric tridiagonal matrix: `diag` of length `N + 1`, `off` of length `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> SymTridiagonal<T> {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// `xᵀ A y`.
    pub fn inner(&self, x: &[T], y: &[T]) -> T {
        self.mul_vec(y).iter().zip(x).map(|(&a, &b)| a * b).sum()
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.mul_vec(&vec![T::one(); self.dim()])
    }

    /// Sum of all entries.
    pub fn total(&self) -> T {
        self.diag.iter().copied().sum::<T>() + T::lit(2.0) * self.off.iter().copied().sum::<T>()
    }
}

/// Weighted Laplacian of a path graph: `uᵀ K u = Σ_e c_e (u_{e+1} − u_e)²`.
///
/// Constants are in the kernel by construction, so the stiffness matrix is
/// kept in this form and only expanded on request.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLaplacian<T> {
    pub conductance: Vec<T>,
}

impl<T: Real> PathLaplacian<T> {
    pub fn dim(&self) -> usize {
        self.conductance.len() + 1
    }

    pub fn to_tridiagonal(&self) -> SymTridiagonal<T> {
        let c = &self.conductance;
        let n = c.len();
        let diag = (0..=n)
            .map(|i| {
                let left = if i > 0 { c[i - 1] } else { T::zero() };
                let right = if i < n { c[i] } else { T::zero() };
                left + right
            })
            .collect();
        SymTridiagonal {
            diag,
            off: c.iter().map(|&x| -x).collect(),
        }
    }

    pub fn energy(&self, u: &[T]) -> T {
        self.conductance
            .iter()
            .enumerate()
            .map(|(e, &c)| {
                let d = u[e + 1] - u[e];
                c * d * d
            })
            .sum()
    }
}

/// P1 finite elements on a [`Mesh`]: stiffness, consistent mass, and the
/// weight at the three Gauss points of every cell.
#[derive(Debug, Clone)]
pub struct Discretization<T> {
    pub mesh: Mesh<T>,
    pub stiffness: PathLaplacian<T>,
    pub mass: SymTridiagonal<T>,
    /// `h·ω_q·w(x_q)` per cell.
    weighted_points: Vec<[(T, T); 3]>,
}

/// Assembles `∫ w φ′_i φ′_j` and `∫ w φ_i φ_j` for hat functions `φ_i`
/// with 3-point Gauss–Legendre per cell.
pub fn discretize<T: Real>(
    problem: &SturmLiouvilleProblem<T>,
    grid: usize,
) -> Result<Discretization<T>> {
    assemble(problem, problem.mesh(grid)?)
}

/// Same as [`discretize`] on a caller-supplied mesh of `problem`.
pub fn assemble<T: Real>(problem: &SturmLiouvilleProblem<T>, mesh: Mesh<T>) -> Result<Discretization<T>> {
    let rule = GaussLegendre::<T>::new(3);
    let n = mesh.cell_count();
    let mut conductance = Vec::with_capacity(n);
    let mut diag = vec![T::zero(); n + 1];
    let mut off = Vec::with_capacity(n);
    let mut weighted_points = Vec::with_capacity(n);
    for (e, cell) in mesh.cells().iter().enumerate() {
        let mut pts = [(T::zero(), T::zero()); 3];
        let (mut total, mut m00, mut m01, mut m11) = (T::zero(), T::zero(), T::zero(), T::zero());
        for (q, (&xi, &wq)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
            // Reference cell [0, 1].
            let s = T::lit(0.5) * (xi + T::one());
            let w = problem.weight_in_piece(cell.piece, cell.x0 + cell.h * s) * wq * T::lit(0.5) * cell.h;
            let (p0, p1) = (T::one() - s, s);
            total += w;
            m00 += w * p0 * p0;
            m01 += w * p0 * p1;
            m11 += w * p1 * p1;
            pts[q] = (s, w);
        }
        conductance.push(total / (cell.h * cell.h));
        diag[e] += m00;
        diag[e + 1] += m11;
        off.push(m01);
        weighted_points.push(pts);
    }
    let floor = T::lit(MASS_FLOOR).max(T::min_positive_value());
    if let Some((index, &value)) = diag.iter().enumerate().find(|(_, &d)| !(d >= floor)) {
        return Err(Error::SingularMass {
            index,
            value: value.as_f64(),
        });
    }
    Ok(Discretization {
        mesh,
        stiffness: PathLaplacian { conductance },
        mass: SymTridiagonal { diag, off },
        weighted_points,
    })
}

impl<T: Real> Discretization<T> {
    pub fn dim(&self) -> usize {
        self.mass.dim()
    }

    /// `uᵀKu / uᵀMu` for nodal values `u`.
    pub fn rayleigh_quotient_nodal(&self, u: &[T]) -> Result<T> {
        let den = self.mass.inner(u, u);
        if !(den > T::zero()) {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.stiffness.energy(u) / den)
    }

    /// `∫u′²w / ∫u²w` by the same cellwise quadrature that built the
    /// matrices, so for `u` linear on every cell this equals the nodal
    /// quotient of its interpolant.
    pub fn rayleigh_quotient<U: TestFunction<T> + ?Sized>(&self, u: &U) -> Result<T> {
        let (mut num, mut den) = (T::zero(), T::zero());
        for (e, pts) in self.weighted_points.iter().enumerate() {
            let t0 = self.mesh.nodes()[e];
            let h = self.mesh.nodes()[e + 1] - t0;
            for &(s, w) in pts {
                let t = t0 + h * s;
                let d = u.derivative(t);
                let v = u.value(t);
                num += w * d * d;
                den += w * v * v;
            }
        }
        if !(den > T::zero()) {
            return Err(Error::ZeroDenominator);
        }
        Ok(num / den)
    }

    /// Nodal values of `u`.
    pub fn interpolate<U: TestFunction<T> + ?Sized>(&self, u: &U) -> Vec<T> {
        self.mesh.nodes().iter().map(|&t| u.value(t)).collect()
    }

    /// `∫ w` over the domain.
    pub fn weight_integral(&self) -> T {
        self.weighted_points
            .iter()
            .flat_map(|pts| pts.iter().map(|&(_, w)| w))
            .sum()
    }
}
