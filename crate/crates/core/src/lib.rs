//! First- and second-order spatial photon correlations of N two-level
//! emitters prepared in a generalized W state `|W_{n_e,N}>`.
//!
//! * [`grating`]: optical phase of a far-field detector and the N-slit
//!   grating function `chi`.
//! * [`analytic`]: closed forms for `G1` (any `n_e`) and `g2` (`n_e = 2`).
//! * [`oracle`]: exact state-vector evaluation for any `(N, n_e)`.
//! * [`analysis`]: phase scans, zero and peak detection, visibility and the
//!   closed-form feature catalog.

pub mod analysis;
pub mod analytic;
pub mod error;
pub mod grating;
pub mod oracle;

pub use analysis::{
    predicted_features, run_scan, verify_features, visibility, Engine, Evaluator, Extremum,
    FeatureCatalog, FeatureKind, PhaseRange, PredictedFeature, ScanMode, ScanResult, ScanSpec,
    VerificationReport,
};
pub use analytic::{
    classify, g1, g2_counter, g2_fixed_zero, g2_pair, g2_same, special_value, CorrelationSample,
    EnsembleSpec, PhotonStatClass, SpecialValue,
};
pub use error::{Error, Result};
pub use grating::{chi, phase_from_geometry, DetectorGeometry, Phase};
pub use oracle::{
    apply_field, build_w_state, g1_oracle, g2_normalized_oracle, g2_oracle, QuantumState,
    WStateOracle,
};
