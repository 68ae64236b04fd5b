use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::profile::{ChainProfile, DumbbellSpec, SegmentKind};
use crate::scalar::Real;

/// Smallest admissible total cell budget.
pub const MIN_GRID: usize = 64;
const MIN_CELLS_PER_PIECE: usize = 8;
const NECK_MULTIPLIER: usize = 2;

/// End conditions. Only the natural one is modeled: the weight vanishes at
/// both ends, so no boundary rows are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    NaturalSingular,
}

type WeightFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
enum Weight<T> {
    Chain { chain: ChainProfile<T>, power: i32 },
    Custom(WeightFn<T>),
}

/// A smooth stretch of the domain; meshes never straddle piece boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece<T> {
    pub start: T,
    pub length: T,
    /// Length used for cell allocation. Independent of metric scaling, so a
    /// scaled chain gets the same cell counts.
    pub share: T,
    pub neck: bool,
}

/// `−(w u′)′ = λ w u` on `[0, domain_length]`.
#[derive(Clone)]
pub struct SturmLiouvilleProblem<T> {
    weight: Weight<T>,
    domain_length: T,
    pieces: Vec<Piece<T>>,
    boundary: Boundary,
}

impl<T: Real> fmt::Debug for SturmLiouvilleProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let weight = match &self.weight {
            Weight::Chain { chain, power } => format!("chain(k={}, F^{power})", chain.necks()),
            Weight::Custom(_) => "custom".to_string(),
        };
        f.debug_struct("SturmLiouvilleProblem")
            .field("weight", &weight)
            .field("domain_length", &self.domain_length)
            .field("pieces", &self.pieces.len())
            .finish()
    }
}

/// The problem of the chain for forms of the degree encoded in `spec`.
/// Only `n = m − p` matters; specs with the same fiber dimension give the
/// same problem.
pub fn reduce_to_sl<T: Real>(
    chain: &ChainProfile<T>,
    spec: &DumbbellSpec<T>,
) -> Result<SturmLiouvilleProblem<T>> {
    if chain.fiber_dim() != spec.n() {
        return Err(Error::Domain(format!(
            "chain has fiber dimension {} but spec needs {}",
            chain.fiber_dim(),
            spec.n()
        )));
    }
    Ok(SturmLiouvilleProblem::from_chain(chain))
}

impl<T: Real> SturmLiouvilleProblem<T> {
    /// `w = F^{n−1}` with `n` the chain's fiber dimension.
    pub fn from_chain(chain: &ChainProfile<T>) -> Self {
        let stretch = chain.stretch();
        let pieces = chain
            .segments()
            .iter()
            .enumerate()
            .map(|(i, seg)| {
                let (a, b) = chain.segment_range(i);
                Piece {
                    start: a,
                    length: b - a,
                    share: seg.length(),
                    neck: seg.kind() == SegmentKind::Neck,
                }
            })
            .collect::<Vec<_>>();
        debug_assert!(stretch > T::zero());
        Self {
            weight: Weight::Chain {
                chain: chain.clone(),
                power: chain.fiber_dim() as i32 - 1,
            },
            domain_length: chain.total_length(),
            pieces,
            boundary: Boundary::NaturalSingular,
        }
    }

    /// Arbitrary nonnegative weight on `[0, length]`, meshed as one piece.
    pub fn custom<F>(length: T, weight: F) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::Domain(format!("domain length {length} must be positive")));
        }
        Ok(Self {
            weight: Weight::Custom(Arc::new(weight)),
            domain_length: length,
            pieces: vec![Piece {
                start: T::zero(),
                length,
                share: length,
                neck: false,
            }],
            boundary: Boundary::NaturalSingular,
        })
    }

    /// `w ≡ 1`: Neumann spectrum `(πl/length)²`.
    pub fn interval(length: T) -> Result<Self> {
        Self::custom(length, |_| T::one())
    }

    /// `w = sin^{n−1}` on `[0, π]`: zonal spectrum `l(l+n−1)` of `S^n`.
    pub fn sphere_sector(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("sphere sector needs n ≥ 2, got {n}")));
        }
        let power = n as i32 - 1;
        Self::custom(T::PI(), move |t: T| t.sin().max(T::zero()).powi(power))
    }

    pub fn domain_length(&self) -> T {
        self.domain_length
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn chain(&self) -> Option<&ChainProfile<T>> {
        match &self.weight {
            Weight::Chain { chain, .. } => Some(chain),
            Weight::Custom(_) => None,
        }
    }

    /// Weight at local coordinate `x` of piece `i`.
    pub(crate) fn weight_in_piece(&self, i: usize, x: T) -> T {
        match &self.weight {
            Weight::Chain { chain, power } => chain.eval_segment(i, x).value.powi(*power),
            Weight::Custom(f) => f(self.pieces[i].start + x),
        }
    }

    /// Weight at global coordinate `t`.
    pub fn weight(&self, t: T) -> Result<T> {
        if !(t >= T::zero() && t <= self.domain_length) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.domain_length)));
        }
        let i = self
            .pieces
            .partition_point(|p| p.start + p.length < t)
            .min(self.pieces.len() - 1);
        Ok(self.weight_in_piece(i, t - self.pieces[i].start))
    }

    /// Mesh with about `budget` cells; see [`allocate_cells`].
    pub fn mesh(&self, budget: usize) -> Result<Mesh<T>> {
        let counts = allocate_cells(
            &self.pieces.iter().map(|p| (p.share, p.neck)).collect::<Vec<_>>(),
            budget,
        )?;
        Ok(self.mesh_with_counts(&counts))
    }

    /// Uniform mesh with exactly `cells` cells, for single-piece problems.
    /// Not subject to the grid minimum.
    pub fn uniform_mesh(&self, cells: usize) -> Result<Mesh<T>> {
        if self.pieces.len() != 1 || cells == 0 {
            return Err(Error::Domain(format!(
                "uniform mesh needs one piece and at least one cell ({} pieces, {cells} cells)",
                self.pieces.len()
            )));
        }
        Ok(self.mesh_with_counts(&[cells]))
    }

    fn mesh_with_counts(&self, counts: &[usize]) -> Mesh<T> {
        let total: usize = counts.iter().sum();
        let mut nodes = Vec::with_capacity(total + 1);
        let mut cells = Vec::with_capacity(total);
        nodes.push(T::zero());
        for (i, (piece, &count)) in self.pieces.iter().zip(counts).enumerate() {
            let h = piece.length / T::from_count(count);
            for j in 0..count {
                let x0 = h * T::from_count(j);
                cells.push(Cell { piece: i, x0, h });
                let end = if j + 1 == count {
                    piece.start + piece.length
                } else {
                    piece.start + h * T::from_count(j + 1)
                };
                nodes.push(end);
            }
        }
        Mesh { nodes, cells }
    }
}

/// Splits `budget` cells over pieces `(length, is_neck)` in proportion to
/// length, necks counting double; at least 8 cells per piece and an even
/// count on necks so their midpoints are nodes. A single piece gets exactly
/// `budget` cells.
pub fn allocate_cells<T: Real>(pieces: &[(T, bool)], budget: usize) -> Result<Vec<usize>> {
    if budget < MIN_GRID {
        return Err(Error::Domain(format!("grid size {budget} below minimum {MIN_GRID}")));
    }
    if pieces.is_empty() {
        return Err(Error::Domain("no pieces to mesh".into()));
    }
    if pieces.len() == 1 {
        return Ok(vec![budget]);
    }
    let scaled: Vec<f64> = pieces
        .iter()
        .map(|&(len, neck)| len.as_f64() * if neck { NECK_MULTIPLIER as f64 } else { 1.0 })
        .collect();
    let sum: f64 = scaled.iter().sum();
    Ok(pieces
        .iter()
        .zip(&scaled)
        .map(|(&(_, neck), &s)| {
            let mut count = ((budget as f64 * s / sum).round() as usize).max(MIN_CELLS_PER_PIECE);
            if neck && count % 2 == 1 {
                count += 1;
            }
            count
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cell<T> {
    pub piece: usize,
    /// Left end in the piece's local coordinate.
    pub x0: T,
    pub h: T,
}

/// Nodes `t_0 < … < t_N` and the cells between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<T> {
    nodes: Vec<T>,
    cells: Vec<Cell<T>>,
}

impl<T: Real> Mesh<T> {
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub(crate) fn cells(&self) -> &[Cell<T>] {
        &self.cells
    }
}
