//! Preserver maps, black-box checkers for the product hypotheses, and the
//! consequences those hypotheses force.

mod checks;
mod maps;
mod report;
mod scalar;

pub use checks::{
    central_defect, check_additivity, check_aluthge_commutation, check_basic_properties, check_hermitian_consequences,
    check_hypothesis, detect_linear_blocks, Hypothesis,
};
pub use maps::{central_mask, AlgebraMap, PreserverMap, TraceNormalization};
pub use report::{residual, Expectation, TrialReport, Verdict};
pub use scalar::{
    check_compression_identity, check_m2_lemma, check_orthogonal_scalar_additivity, default_grid, extract_scalar_map,
    m2_instance, pure_state_value, scalar_image, ScalarClass, ScalarMap,
};

pub(crate) use report::{payload, Tally};
