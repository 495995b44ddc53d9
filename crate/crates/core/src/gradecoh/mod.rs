//! Finite-field graded linear algebra: Betti tables of point ideals,
//! Hilbert–Burch ideals, cohomology of line-bundle complexes and the
//! interpolation checks built on them.

pub mod cohomology;
pub mod field;
pub mod ideals;
pub mod interp;
pub mod linalg;
pub mod matrix;
pub mod points;
pub mod poly;
pub mod strata;

pub use cohomology::{
    cohomology_of_length2, cohomology_of_middle, cohomology_of_presentation, induced_h0, induced_h2, line_cohomology,
    CohomologyReport, PresentationKind,
};
pub use field::{FieldElement, Fp, DEFAULT_PRIME};
pub use linalg::Mat;
pub use matrix::GradedMatrix;
pub use poly::HPoly;
pub use ideals::{betti_of_generators, hilbert_burch, ideal_betti, maximal_minors, IdealData};
pub use points::{sample_points, Point, PointConfig, Stratum};
pub use strata::{betti_trials, table_strata, BettiTrials};
pub use interp::{
    qk_section_count, tangent_section_zero_locus, verify_interpolation_tangential, verify_interpolation_triangular,
    InterpolationReport, QkReport, Route, ZeroLocusReport,
};
