//! Label-noise injection, ranking and scoring for binary building-segmentation masks.
//!
//! The crate covers the whole loop from clean masks to a curated subset:
//!
//! * [`mask`]: dense binary masks, connected components, boundary tracing,
//!   polygon rasterization, affine footprint transforms and overlap metrics
//!   (IoU, F1).
//! * [`noise`]: the seven annotation-noise operators and the seeded
//!   per-sample injection pipeline with replayable [`noise::NoiseSpec`]s.
//! * [`metrics`]: Kendall's tau-b and Spearman's rho.
//! * [`ranking`]: ground-truth noise ranking, ranking comparison, rank
//!   averaging, per-noise-type stratification and top-fraction selection.
//! * [`scoring`]: ensemble noise scorers (majority-vote IoU and
//!   variance-regularized best-member IoU) plus the random baseline.
//! * [`sim`]: synthetic clean scenes and simulated ensemble predictions for
//!   desk-scale runs without trained networks.
//! * [`dataset`]: JSONL manifests, ranking/score CSVs and the prediction
//!   directory layout.
//! * [`cli`]: the `segnoise` command-line front end.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod dataset;
mod error;
pub mod mask;
pub mod metrics;
pub mod noise;
pub mod ranking;
pub mod scoring;
pub mod seed;
pub mod sim;

pub use error::{Error, ErrorKind, Result};
pub use mask::{BinaryMask, Component, PolygonRing};
pub use noise::{NoiseConfig, NoiseSpec, NoiseType, ShapeBank};
pub use ranking::{Orientation, RankPositions, Ranking};
pub use scoring::{EnsembleStack, Method, ScoreRecord};
