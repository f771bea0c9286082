//! Concurrence-topology analysis of binary presence/absence data.
//!
//! A binary matrix (rows = samples, columns = variables) induces a descending
//! filtration of simplicial complexes: a set of columns is a simplex at
//! frequency level `f` when at least `f` rows carry a 1 in every one of those
//! columns. This crate builds that filtration up to dimension 2, computes
//! dimension-1 persistent homology over Z/2, localizes long-lived classes as
//! three-vertex "short cycles" (mutual exclusivity patterns), and tests their
//! significance against a second-order null model: random binary matrices
//! whose Gram matrix approximates that of the data, sampled by an SVD
//! construction followed by thresholding and greedy entry flips, calibrated
//! with a nonparametric bootstrap.

pub mod diagram_json;
pub mod error;
pub mod experiments;
pub mod gf2;
pub mod homology;
pub mod matrix;
pub mod null_model;
pub mod seeds;
pub mod sunflower;

pub use error::CtError;
pub use homology::{
    build_filtration, localize_short_cycles, max_lifespan_classes, persistent_homology,
    ConcurrenceFiltration, LifespanConvention, PersistenceDiagram, PersistentClass, ShortCycle,
};
pub use matrix::{
    concurrence_matrix, dichotomize, mutation_counts, resample_rows, BinaryMatrix,
    ConcurrenceCounts, ScoredMatrix,
};
pub use null_model::{
    bootstrap_cutoff, delta_distance, factorize, generate_synthetic, optimal_threshold,
    refine_flips, sample_centered_frame, shrunk_weights, synthesize_gaussian, NullModelFactors,
    ShrunkWeights, SynthesisRecord,
};
