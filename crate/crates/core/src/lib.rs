//! Personalized influence estimation: per-observation key-driver attribution.
//!
//! Given a feature table and a global importance vector, every observation is
//! assigned the features that drive it. Importances and feature columns are
//! z-scored and clipped at zero, multiplied cell by cell, and each row is
//! normalized to sum to one. The heaviest entries of a row are its drivers.
//!
//! ```
//! use pie::{load_importance, load_table, pie_standardized};
//!
//! let table = load_table("a,b\n1,9\n2,5\n9,1\n".as_bytes(), false).unwrap();
//! let imp = load_importance("feature,importance\na,3\nb,1\n".as_bytes()).unwrap();
//! let out = pie_standardized(&imp, &table, 1).unwrap();
//! assert_eq!(out.report.entries[2].top_driver.as_deref(), Some("a"));
//! ```
//!
//! The [`lime`] and [`pick`] modules provide a sampling-based local surrogate
//! baseline and its greedy instance pick, and [`compare`] measures agreement
//! between the two approaches.

pub mod compare;
pub mod error;
pub mod importance;
pub mod influence;
pub mod lime;
pub mod linalg;
pub mod par;
pub mod pick;
pub mod standardize;
pub mod table;

pub use compare::{compare_with_pie, Agreement};
pub use error::{ErrorClass, PieError, Result};
pub use importance::{correlation_importance, ols_importance, LabeledTable};
pub use influence::{
    influence_matrix, pie_argmax, pie_raw, pie_standardized, top_k_drivers, InfluenceMatrix,
    PieReport, StandardizedPie,
};
pub use lime::{
    explain_instance, explanation_matrix, BlackBox, ExplanationMatrix, LimeParams, LinearModel,
    LocalExplanation, LookupModel,
};
pub use par::Execution;
pub use pick::{submodular_pick, PickResult};
pub use standardize::{
    apply_stats, standardize_columns, standardize_importance, StandardizationStats,
};
pub use table::{
    align, load_importance, load_table, write_importance, write_table, FeatureImportance,
    ObservationTable,
};
