//! Experiment drivers and Monte-Carlo checks of the embeddings' statistical properties.

mod data;
mod oracles;
mod retrieval;
mod sweep;
mod verify;

pub use data::gen_sphere_dataset;
pub use oracles::{
    independence_oracle, independence_oracle_rows, jl_distortion_oracle, tessellation_oracle, IndependenceTable,
    JlReport, JointCounts,
};
pub use retrieval::{
    exact_neighbors, geodesic_oracle_recall, retrieval_benchmark, retrieval_eval, retrieval_eval_with,
    split_queries, write_retrieval_csv, RetrievalRecord, RetrievalResult,
};
pub use sweep::{
    aggregate, cell_embedder_seed, config_for, distortion_sweep, linear_fit, m_for_target_delta, metric_for,
    read_sweep_csv, run_cell, write_sweep_csv, DeltaSlice, LinearFit, SweepRecord, SweepSpec, SweepSummary,
};
pub use verify::{angle_pair, tessellation_tolerance, verify_suite, Check};
