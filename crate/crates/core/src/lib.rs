//! Finite-resolution laboratory for historic behavior: points whose ergodic
//! averages fail to converge.
//!
//! The crate evaluates Birkhoff, Følner, spherical and double averages on
//! concrete systems (shift spaces, expanding circle maps, the Kan skew
//! product, a commuting pair of toral automorphisms), estimates their
//! oscillation over declared tail windows, builds explicit irregular points
//! and runs empirical sensitivity tests.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod avg;
pub mod error;
pub mod fmt;
pub mod group_avg;
pub mod sensitivity;
pub mod summation;
pub mod symbolic;
pub mod systems;

pub use avg::{
    birkhoff_partial_averages, classify_level_set, empirical_measure, lambda_probe,
    oscillation_report, transitive_bounds_estimate, vt_cluster_report, Binning, Cluster,
    EmpiricalMeasure, LambdaProbe, LambdaScanner, LevelSetClassification, Membership,
    ObservableSeq, OscillationReport, TransitiveBoundsEstimate,
};
pub use error::{Error, Result};
pub use group_avg::{
    cesaro_spherical, double_average_psi, folner_average, preorbit_construct, psi_bound_sweep,
    psi_error_bound_check, spherical_average, tempered_check, FolnerBox, PreOrbitWitness,
    PsiBoundRow, SphericalWeights, TemperedCheck, TrigPolynomial,
};
pub use sensitivity::{
    dichotomy_report, orbit_density, sensitivity_test, stable_set_net, DichotomyConfig,
    DichotomyReport, OrbitDensityDiagnostic, Pairing, Provenance, SampleNet, SensitivityVerdict,
};
pub use summation::{CenteredMean, KahanSum, WeightedMean};
pub use symbolic::{Alphabet, BlockSchedule, SymbolicPoint, TransitionMatrix, WindowObservable};
pub use systems::{CirclePointRational, KanState, ToralMatrix, TorusPointExact};
