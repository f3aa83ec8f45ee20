//! Beilinson-type resolutions of the diagonal on weighted projective stacks, their
//! pushforwards, and the K-theoretic identities they induce on hypersurfaces.

pub mod beilinson;
pub mod complexes;
pub mod error;
pub mod field;
pub mod graded;
pub mod ktheory;
pub mod linalg;
pub mod report;
pub mod series;
pub mod sheaf_cohomology;

pub use error::{Error, Result};
pub use field::FieldConfig;
pub use graded::WeightVector;
pub use report::VerificationReport;
