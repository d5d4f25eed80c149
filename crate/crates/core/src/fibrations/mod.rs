//! Decision procedures for the fibration classes.

mod classes;
mod crosscheck;
mod local;
mod reedy;

pub use classes::{
    check_class, default_bound, is_reedy_left_fib, is_reedy_right_fib, is_reedy_variant_fib, FibrationClass, FibrationReport,
    Variance,
};
pub use crosscheck::{
    characterization_crosscheck, condition_check, condition_p_sample, equivalence_criteria, exponentiation_check, level_boundary, localized_equivalence2,
    localized_equivalence_direct, matching_crosscheck, matching_object, simplex_map, AgreementReport, Condition, MatchingObject,
};
pub use local::{is_local, is_local2, local_over, Localizer, LocalityOptions, LocalizerSet};

pub use reedy::{
    is_bireedy_fib, is_kan_fib, is_left_fib, is_reedy_fib, is_right_fib, left_square, lemb, lemb_base, lemb_map, lemb_normalize,
    matching_comparison, ReedyMode,
};
