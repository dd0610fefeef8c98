//! Numerics for the sharp Gagliardo–Nirenberg family
//! `‖u‖_{2t} ≤ A ‖∇u‖_2^μ ‖u‖_{t+1}^{1-μ}` on radial profiles, and for its lift to
//! the Sobolev inequality on `R^n × R^m` with non-integer `m`.

// `!(x > 0.0)` is the idiom used throughout to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod fit;
pub mod functionals;
pub mod manifold;
pub mod optimize;
pub mod params;
pub mod profile;
pub mod quad;
pub mod special;
pub mod verify;

pub use corpus::{BumpShape, CorpusMember, Normalization};
pub use error::{Error, Result};
pub use functionals::{DeficitReport, SharpConstants};
pub use manifold::ManifoldFit;
pub use params::{derive_params, ParamSet};
pub use profile::{CylField, RadialProfile};
pub use quad::{build_grid, QuadratureGrid, DEFAULT_RESOLUTION};
pub use verify::{LemmaCheckRecord, ProbeResult, SharpnessResult};
