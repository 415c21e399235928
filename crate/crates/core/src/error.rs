use std::path::PathBuf;

/// Errors surfaced by the detection pipeline and its tooling.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: not a RIFF/WAVE file")]
    NotWav { path: PathBuf },
    #[error("{path}: unsupported encoding ({detail}); only PCM16 mono is supported")]
    UnsupportedEncoding { path: PathBuf, detail: String },
    #[error("{path}: data chunk truncated (expected {expected} bytes, found {found})")]
    Truncated {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error("clip too short: {samples} samples, window needs {window_len}")]
    ClipTooShort { samples: usize, window_len: usize },
    #[error("roulette selection requires at least one candidate")]
    EmptyCandidates,
    #[error("spectrogram band does not cover {low_hz}-{high_hz} Hz (max {max_hz} Hz)")]
    BandOutOfRange {
        low_hz: f64,
        high_hz: f64,
        max_hz: f64,
    },
    #[error("insufficient training data: {0}")]
    InsufficientData(String),
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("upcall parameters outside the allowed band: {0}")]
    BandViolation(String),
    #[error("bad model file: {0}")]
    BadModel(String),
    #[error("I/O failure: {0}")]
    IoFailure(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
