//! Constructions on factorizations: local/interaction splitting of a
//! Hamiltonian, additive spectrum decomposition, Nirvana and Samsara frames,
//! and numerical search for good factorizations.

mod local;
mod nirvana;
mod optimize;
mod report;
mod sumset;

pub use local::{interaction_action, nearest_local_decomposition, LocalDecomposition};
pub use nirvana::{
    dynamic_nirvana_factorization, factorization_from_labeling, static_nirvana_factorization,
    static_story,
};
pub use optimize::{optimize_factorization, Objective, OptimizerOptions, OptimizerSummary};
pub use report::{Check, FactorizationData, FactorizationReport, ReportJson, ReportKind};
pub use sumset::{
    for_each_sumset, multiset_distance, sumset_decompose, sumset_decompose_multi,
    SpectrumDecomposition,
};
