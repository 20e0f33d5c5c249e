//! Dimension theory of frame spectral measures: entropy, Beurling, Fourier
//! and Lev dimensions, exponential frame bounds, and the restricted-digit
//! measures `ν_I` whose spectra separate entropy from Hausdorff dimension.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod decimal;
pub mod error;
pub mod estimate;
pub mod frame;
pub mod json;
pub mod limits;
pub mod measure;
pub mod spectrum;

pub use constructions::{Certificate, CounterexampleReport, OscillatingLevels};
pub use error::{Error, Result};
pub use estimate::{CurvePoint, DimensionEstimate, Method};
pub use frame::{FrameReport, LemmaCheckRecord, TrialFunction};
pub use limits::Limits;
pub use measure::{Atom, Cell, DyadicTree, LevelSet, MeasureDocument, MeasureSpec, Region, C64};
pub use spectrum::{SpectrumDocument, SpectrumSet};
