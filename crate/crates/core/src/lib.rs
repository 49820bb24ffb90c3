//! Redundancy of pointer-state records in a good/bad spin environment.
//!
//! Exact fragment averages of the Holevo quantity, the two redundancy
//! definitions, quantum Chernoff bound estimates, and a dense-state oracle
//! that checks them on small instances.

pub mod crosscheck;
pub mod error;
pub mod fragments;
pub mod info;
pub mod model;
pub mod oracle;
pub mod qcb;
pub mod report;

pub use error::{Error, Result, SpecViolation};
pub use fragments::{
    avg_holevo_exact, find_fragment_size, mc_avg_holevo, p_all_bad, redundancy_avg, redundancy_max,
    stirling_fragment_size, AvgRedundancy, CurvePoint, FragmentSize, InfoCurve, InfoMethod, MaxRedundancy,
    McEstimate,
};
pub use info::{binary_entropy, holevo_from_overlap, Bits};
pub use model::{
    fragment_overlap, hypergeometric_pmf, hypergeometric_terms, validate_spec, Deficit, EnvironmentSpec,
    FragmentComposition,
};
pub use oracle::{DenseState, DensityMatrix, Oracle, OracleLimits, Quantity};
pub use qcb::{
    definition_ratio, error_probability, holevo_asymptotic, min_definition_ratio, redundancy_goodbad_expanded,
    redundancy_max_qcb, redundancy_qcb, typical_chernoff, ChernoffExponent, DefinitionRatio, QcbRedundancy,
};
pub use report::{RedundancyReport, ValidityFlag};
