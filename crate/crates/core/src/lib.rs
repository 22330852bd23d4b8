//! Maximal functions, Poincaré-type inequalities and pointwise
//! characterizations of bounded variation on finite metric measure spaces.
//!
//! A space is a finite set with a metric and positive point masses, loaded
//! from a JSON document ([`space::load_document`]) or built directly. Balls
//! are open, `B(x, r) = {y : d(x, y) < r}`.
//!
//! ```
//! use bvcert::prelude::*;
//!
//! let space = bvcert::fixtures::two_point();
//! let u = ScalarField::new(vec![0.0, 2.0]).unwrap();
//! let nu = PointMeasure::new(vec![1.0, 1.0]).unwrap();
//! let report = check_pointwise(&space, &u, &nu, 1.0, Some(1.0)).unwrap();
//! assert!(report.passed);
//! assert_eq!(report.c0_minimal, 1.0);
//! ```
// `!(x > 0.0)` style guards are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod characterization;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod maximal;
pub mod report;
pub mod space;
pub mod variation;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::audit::{audit_certificate, AuditReport};
    pub use crate::characterization::{
        build_proof_trace, check_pointwise, check_sobolev_pointwise, poincare_from_pointwise,
        AuditSelection, CharacterizationCertificate, PointwiseReport, ProofTrace,
    };
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{
        check_geodesic_lemma, dimension_audit, doubling_constant, doubling_dimension,
        geometry_report, length_metric, quasiconvexity_constant, small_ball_bound,
    };
    pub use crate::maximal::{
        ball_average, maximal_function, maximal_function_measure, restricted_maximal,
        restricted_maximal_measure, weak_type_constant, MaximalTable,
    };
    pub use crate::report::to_json;
    pub use crate::space::{
        ball, candidate_radii, load_document, load_space, Ball, Edge, MetricMeasureSpace,
        PointMeasure, ScalarField, SpaceDocument,
    };
    pub use crate::variation::{
        check_ball_poincare, poincare_ball_constant, total_variation, upper_gradient_check,
        variation_measure, PoincareReport, VariationMode,
    };
}
