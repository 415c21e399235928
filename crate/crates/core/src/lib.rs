//! Detection of North Atlantic right whale contact calls ("up-calls") in
//! short mono audio clips.
//!
//! The pipeline: spectrogram analysis, weakest-80% thresholding, iterative
//! weakest-neighborhood island cleaning, stochastic particle path tracing
//! over the nonzero time-frequency cells, an 11-feature description of each
//! traced contour, Gaussian per-feature scoring, and a Gini decision tree
//! over the scores. A synthetic corpus generator and an evaluation harness
//! make the whole thing trainable and testable without field recordings.

pub mod audio_io;
pub mod classifier;
pub mod cli;
pub mod error;
pub mod eval;
pub mod features;
pub mod path_tracer;
pub mod preprocess;
pub mod spectrogram;
pub mod synth;

pub use audio_io::{read_wav, write_wav, AudioClip, Label};
pub use classifier::{
    classify, detect_clip, fit_gaussians, gaussian_score, train_tree, ClipDecision, DecisionTree,
    DetectorModel, GaussianScorer, PipelineConfig,
};
pub use error::Error;
pub use eval::EvalReport;
pub use features::{extract_features, FeatureVector};
pub use path_tracer::{CandidateCall, Path, Particle, TracerConfig};
pub use preprocess::PreprocessParams;
pub use spectrogram::{compute_spectrogram, Spectrogram, SpectrogramParams, WindowKind};
pub use synth::{make_corpus, synth_negative, synth_upcall, CorpusManifest, NegativeKind, UpcallSpec};
