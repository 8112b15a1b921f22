// Negated comparisons below deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod regulation;

pub use error::{Error, Result};

pub use analysis::{BoundContext, FemtoOutageBreakdown};
pub use experiments::{ExperimentSpec, Preset, RunReport, Sweep, SweepVar};
pub use model::NetworkParams;
pub use montecarlo::{AseResult, OpPoint, SimResult, Simulator};
pub use regulation::{PowerPolicy, RegulationDecision, RegulationMode, Regulator};
