//! Bounded lecture hall tableaux: exact finite-model combinatorics and
//! sampling, together with the asymptotic analysis of their limit shapes
//! and fluctuations.
//!
//! The finite side (`partition`, `tableau`, `paths`, `enumerate`, `mcmc`,
//! `schur`, `poly`, `stats`) is exact wherever it can be. The asymptotic
//! side (`measure`, `limit`, `burgers`, `gff`) evaluates every quantity by
//! two independent routes so the results check each other. `config`,
//! `experiment`, `manifest` and `svg` turn both into reproducible runs.

pub mod error;
pub mod numeric;

pub mod partition;
pub mod paths;
pub mod tableau;

pub mod enumerate;
pub mod mcmc;
pub mod poly;
pub mod schur;
pub mod stats;

pub mod burgers;
pub mod gff;
pub mod limit;
pub mod measure;

pub mod config;
pub mod experiment;
pub mod manifest;
pub mod svg;

pub use error::{Error, Result};
pub use partition::{counting_measure, CountingMeasure, Partition, SkewShape};
pub use paths::{
    height_function, level_partitions, paths_to_tableau, tableau_to_paths, HeightField, LhGraph,
    PathConfig, Vertex,
};
pub use tableau::LectureHallTableau;
