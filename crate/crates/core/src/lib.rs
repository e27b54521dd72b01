//! Geometric and entropic measures of Bell nonlocality.
//!
//! A measure is the smallest distance (or relative entropy) from a state to
//! the set of local states. Werner and isotropic families have closed forms;
//! general Bell-diagonal two-qubit states are handled by a case analysis for
//! the Hilbert–Schmidt distance and by a constrained numeric minimiser for
//! the others.

pub mod error;
pub mod linalg;
pub mod locality;
pub mod measures;
pub mod metrics;
pub mod state;

pub use error::{Error, Result};
pub use locality::{
    bd_is_chsh_local, bd_local_boundary_surfaces, cglmp_qk, cglmp_threshold, chsh_verdict,
    max_pair_sum, CglmpThreshold, ChshVerdict, SurfaceDescriptor, SurfaceId,
};
pub use measures::{
    bd_grid, bd_measure, bd_measure_hs, bd_measure_hs_with, bd_measure_numeric,
    bd_measure_numeric_all, bd_sweep, isotropic_measure, isotropic_printed, werner_closed_form,
    werner_maximum, werner_measure, werner_measure_at, BdObjective, ClosestLocal, GridPoint,
    IsotropicMeasure, MeasureResult, Method, OptimizerConfig, SweepFamily, SweepPoint,
    WERNER_THRESHOLD,
};
pub use metrics::DistanceKind;
pub use state::{BellCorner, BellDiagonal, DensityMatrix, IsotropicParam, PauliRep, WernerParam};
