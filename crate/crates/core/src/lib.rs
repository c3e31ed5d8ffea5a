//! Simulator for two-phase millimeter-wave beam training with low-resolution
//! ADCs.
//!
//! The crate synthesizes on-grid L-path channels for uniform planar arrays,
//! runs the two training phases (an all-directions broadcast recovered with
//! orthogonal matching pursuit, then per-path directional matching) through a
//! 1- or 2-bit quantizer, and measures beam-pair identification rates over
//! Monte Carlo sweeps.
//!
//! All numerical code is generic over the real scalar type (see [`Real`]);
//! `*64` and `*32` aliases name the concrete instantiations.

pub mod array;
pub mod channel;
pub mod error;
pub mod protocol;
pub mod quantizer;
pub mod recovery;
pub mod scalar;
pub mod seed;
pub mod simulate;

pub use array::{
    axis_steering, flat_index_to_angles, make_dictionary, make_grid, upa_steering, ArrayConfig, Dictionary, GridPoint,
    SteeringVector,
};
pub use channel::{sample_channel, sample_channel_with, ChannelInstance, GainModel, PathSpec};
pub use error::{Error, Result};
pub use protocol::{
    baseline_slots, phase1, phase2, proposed_slots, run_training, BeamPair, LinkDirection, NoiseSpec, Trainer,
    TrainingOutcome,
};
pub use quantizer::{quantize, QuantizerSpec, Resolution};
pub use recovery::{omp, onecol_matched, SparseEstimate};
pub use scalar::{Cx, Real};
pub use simulate::{emit_csv, emit_timing_table, run_sweep, score_trial, ScoreMode, SweepConfig, SweepResult};

pub type SteeringVector64 = SteeringVector<f64>;
pub type SteeringVector32 = SteeringVector<f32>;
pub type Dictionary64 = Dictionary<f64>;
pub type Dictionary32 = Dictionary<f32>;
pub type ChannelInstance64 = ChannelInstance<f64>;
pub type ChannelInstance32 = ChannelInstance<f32>;
pub type PathSpec64 = PathSpec<f64>;
pub type PathSpec32 = PathSpec<f32>;
pub type SparseEstimate64 = SparseEstimate<f64>;
pub type SparseEstimate32 = SparseEstimate<f32>;
pub type Trainer64 = Trainer<f64>;
pub type Trainer32 = Trainer<f32>;
