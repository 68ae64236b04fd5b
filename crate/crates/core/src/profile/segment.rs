use crate::profile::warp::{connector_jet, connector_length};
use crate::profile::{Jet, SmoothCutoff};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    Cap,
    Connector,
    Neck,
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Shape<T> {
    /// `sin x` on `[0, 3π/4]`: closes at the pole `x = 0`.
    LeftCap,
    /// `sin(π/4 + x)` on `[0, 3π/4]`, evaluated as `sin(3π/4 − x)` so the
    /// pole at the far end is exact.
    RightCap,
    /// `sin(π/4 + x)` on `[0, π/2]`.
    Bump,
    /// `ε cosh(x − L)` on `[0, 2L]`.
    Neck { eps: T, half: T },
    /// Connector traversed away from the neck (`s = x`).
    ConnectorOut { eps: T, cutoff: SmoothCutoff<T> },
    /// Connector traversed toward the neck (`s = π/12 − x`).
    ConnectorIn { eps: T, cutoff: SmoothCutoff<T> },
}

/// One smooth piece of the chain profile, parametrized by local arc length
/// `x ∈ [0, length]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSegment<T> {
    kind: SegmentKind,
    length: T,
    shape: Shape<T>,
}

impl<T: Real> ProfileSegment<T> {
    pub(crate) fn left_cap() -> Self {
        Self {
            kind: SegmentKind::Cap,
            length: T::lit(3.0) * T::FRAC_PI_4(),
            shape: Shape::LeftCap,
        }
    }

    pub(crate) fn right_cap() -> Self {
        Self {
            kind: SegmentKind::Cap,
            length: T::lit(3.0) * T::FRAC_PI_4(),
            shape: Shape::RightCap,
        }
    }

    pub(crate) fn bump() -> Self {
        Self {
            kind: SegmentKind::Bump,
            length: T::FRAC_PI_2(),
            shape: Shape::Bump,
        }
    }

    pub(crate) fn neck(eps: T, half: T) -> Self {
        Self {
            kind: SegmentKind::Neck,
            length: half + half,
            shape: Shape::Neck { eps, half },
        }
    }

    pub(crate) fn connector_out(eps: T, cutoff: SmoothCutoff<T>) -> Self {
        Self {
            kind: SegmentKind::Connector,
            length: connector_length(),
            shape: Shape::ConnectorOut { eps, cutoff },
        }
    }

    pub(crate) fn connector_in(eps: T, cutoff: SmoothCutoff<T>) -> Self {
        Self {
            kind: SegmentKind::Connector,
            length: connector_length(),
            shape: Shape::ConnectorIn { eps, cutoff },
        }
    }

    pub fn kind(&self) -> SegmentKind {
        self.kind
    }

    pub fn length(&self) -> T {
        self.length
    }

    /// `(F, F′, F″)` at local coordinate `x`, clamped to `[0, length]`.
    pub fn eval(&self, x: T) -> Jet<T> {
        let x = x.max(T::zero()).min(self.length);
        match self.shape {
            Shape::LeftCap => {
                let (s, c) = x.sin_cos();
                Jet::new(s, c, -s)
            }
            Shape::RightCap => {
                let (s, c) = (self.length - x).sin_cos();
                Jet::new(s, -c, -s)
            }
            Shape::Bump => {
                let (s, c) = (T::FRAC_PI_4() + x).sin_cos();
                Jet::new(s, c, -s)
            }
            Shape::Neck { eps, half } => {
                let r = x - half;
                let ch = eps * r.cosh();
                Jet::new(ch, eps * r.sinh(), ch)
            }
            Shape::ConnectorOut { eps, cutoff } => connector_jet(eps, x, &cutoff),
            Shape::ConnectorIn { eps, cutoff } => {
                connector_jet(eps, self.length - x, &cutoff).reflected()
            }
        }
    }

    /// Evaluates at the far end without recomputing the local coordinate.
    pub(crate) fn eval_end(&self) -> Jet<T> {
        self.eval(self.length)
    }
}
