//! Warp profile of a chain of hyperbolic dumbbells.
//!
//! The chain is a rotationally symmetric n-manifold `dt² + F(t)² g_{S^{n-1}}`
//! described entirely by its warp function `F` on `[0, T]`. Every piece of `F`
//! is available together with its first two derivatives so that curvatures and
//! continuity can be checked without finite differencing.

mod chain;
mod cutoff;
mod segment;
mod spec;
mod warp;

pub use chain::{build_chain, build_chain_with, ChainProfile};
pub use cutoff::SmoothCutoff;
pub use segment::{ProfileSegment, SegmentKind};
pub use spec::{DumbbellSpec, EPS0};
pub use warp::{connector_length, eval_connector, eval_f_eps, eval_h, Jet, CONNECTOR_LENGTH};
