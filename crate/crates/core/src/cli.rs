//! Command implementations behind the `upcall` binary: corpus synthesis,
//! training, detection, evaluation, and stage inspection.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::audio_io::{read_wav, Label};
use crate::classifier::{
    detect_clip, per_clip_seed, train_detector, DetectorModel, PipelineConfig,
};
use crate::error::{Error, Result};
use crate::eval::{ClipOutcome, EvalReport};
use crate::path_tracer::iterate_until_stable;
use crate::preprocess::{threshold_weakest, weakest_neighborhood};
use crate::spectrogram::{compute_spectrogram, Spectrogram};
use crate::synth::{make_corpus, CorpusManifest, CorpusParams};

#[derive(Parser, Debug)]
#[command(name = "upcall", about = "North Atlantic right whale up-call detector", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a labeled synthetic corpus of up-calls and noise clips
    Synth(SynthArgs),
    /// Train a detector model from a corpus manifest
    Train(TrainArgs),
    /// Run detection over WAV files, one CSV row per clip
    Detect(DetectArgs),
    /// Evaluate a model against a labeled manifest
    Eval(EvalArgs),
    /// Dump a pipeline stage for one clip
    Inspect(InspectArgs),
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Number of positive (up-call) clips
    #[arg(long)]
    pub pos: usize,
    /// Number of negative (noise) clips
    #[arg(long)]
    pub neg: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for WAVs and manifest.csv
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5.0)]
    pub snr_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub snr_max: f64,
    #[arg(long, default_value_t = 2000)]
    pub sample_rate: u32,
    #[arg(long, default_value_t = 2.0)]
    pub clip_len: f64,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Corpus manifest CSV
    #[arg(long)]
    pub manifest: PathBuf,
    /// Where to write the model JSON
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// Model JSON produced by `train`
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also emit the 11 feature values per traced candidate
    #[arg(long)]
    pub features: bool,
    /// WAV files to scan
    #[arg(required = true)]
    pub wavs: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Labeled manifest; clip paths resolve relative to it
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the full report as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Raw,
    Thresholded,
    Cleaned,
    Traced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpFormat {
    Pgm,
    Csv,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    #[arg(long, value_enum)]
    pub stage: Stage,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: DumpFormat,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    pub wav: PathBuf,
}

pub fn run_synth(args: &SynthArgs) -> Result<CorpusManifest> {
    let params = CorpusParams {
        sample_rate: args.sample_rate,
        clip_len_s: args.clip_len,
        snr_db_range: (args.snr_min, args.snr_max),
    };
    make_corpus(args.pos, args.neg, args.seed, &args.out, &params)
}

/// Load the clips a manifest names, resolving paths against the manifest's
/// own directory.
pub fn load_manifest_clips(
    manifest_path: &Path,
) -> Result<(CorpusManifest, Vec<(crate::audio_io::AudioClip, bool)>)> {
    let manifest = CorpusManifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut clips = Vec::with_capacity(manifest.rows.len());
    for row in &manifest.rows {
        let clip = read_wav(dir.join(&row.filename))?;
        clips.push((clip, row.label == Label::Positive));
    }
    Ok((manifest, clips))
}

/// Train a model from a manifest; returns the model and its training-set
/// accuracy.
pub fn train_from_manifest(
    manifest_path: &Path,
    seed: u64,
    config: &PipelineConfig,
) -> Result<(DetectorModel, f64)> {
    let (manifest, clips) = load_manifest_clips(manifest_path)?;
    let has_pos = manifest.rows.iter().any(|r| r.label == Label::Positive);
    let has_neg = manifest.rows.iter().any(|r| r.label == Label::Negative);
    if !has_pos || !has_neg {
        return Err(Error::InsufficientData(
            "manifest must contain both labels".into(),
        ));
    }
    let model = train_detector(&clips, config, seed)?;
    let mut correct = 0usize;
    for (i, (clip, truth)) in clips.iter().enumerate() {
        let decision = detect_clip(clip, &model, per_clip_seed(seed, i))?;
        if decision.is_call == *truth {
            correct += 1;
        }
    }
    Ok((model, correct as f64 / clips.len() as f64))
}

pub fn run_train(args: &TrainArgs) -> Result<f64> {
    let (model, train_acc) = train_from_manifest(&args.manifest, args.seed, &PipelineConfig::default())?;
    model.save(&args.out)?;
    Ok(train_acc)
}

/// Detection output: one CSV row per clip, `filename,label,confidence`;
/// with `features` set, one row per candidate with f1..f11 appended.
pub fn detect_to_csv(
    model: &DetectorModel,
    wavs: &[PathBuf],
    seed: u64,
    features: bool,
) -> Result<String> {
    let mut out = String::new();
    if features {
        out.push_str("filename,label,confidence,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,f11\n");
    } else {
        out.push_str("filename,label,confidence\n");
    }
    for (i, path) in wavs.iter().enumerate() {
        let clip = read_wav(path)?;
        let decision = detect_clip(&clip, model, per_clip_seed(seed, i))?;
        let name = path.display();
        let label = if decision.is_call { "call" } else { "no_call" };
        if !features {
            out.push_str(&format!("{name},{label},{:?}\n", decision.confidence));
        } else if decision.candidates.is_empty() {
            out.push_str(&format!("{name},{label},{:?},,,,,,,,,,,\n", decision.confidence));
        } else {
            for cand in &decision.candidates {
                let cand_label = if cand.is_call { "call" } else { "no_call" };
                let fv: Vec<String> = cand.features.0.iter().map(|v| format!("{v:?}")).collect();
                out.push_str(&format!(
                    "{name},{cand_label},{:?},{}\n",
                    cand.confidence,
                    fv.join(",")
                ));
            }
        }
    }
    Ok(out)
}

pub fn run_detect(args: &DetectArgs) -> Result<String> {
    let model = DetectorModel::load(&args.model)?;
    detect_to_csv(&model, &args.wavs, args.seed, args.features)
}

pub fn eval_manifest(
    model: &DetectorModel,
    manifest_path: &Path,
    seed: u64,
) -> Result<EvalReport> {
    let (manifest, clips) = load_manifest_clips(manifest_path)?;
    let mut rows = Vec::with_capacity(clips.len());
    for (i, ((clip, truth), meta)) in clips.iter().zip(&manifest.rows).enumerate() {
        let decision = detect_clip(clip, model, per_clip_seed(seed, i))?;
        rows.push(ClipOutcome {
            filename: meta.filename.clone(),
            truth_positive: *truth,
            predicted_positive: decision.is_call,
            confidence: decision.confidence,
        });
    }
    Ok(EvalReport::from_outcomes(rows))
}

pub fn run_eval(args: &EvalArgs) -> Result<EvalReport> {
    let model = DetectorModel::load(&args.model)?;
    let report = eval_manifest(&model, &args.manifest, args.seed)?;
    if let Some(json_path) = &args.json {
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::IoFailure(std::io::Error::new(std::io::ErrorKind::Other, e)))?;
        std::fs::write(json_path, json)?;
    }
    Ok(report)
}

fn matrix_to_csv(spec: &Spectrogram) -> String {
    let mut out = String::new();
    for bin in 0..spec.n_bins {
        let row: Vec<String> = (0..spec.n_frames)
            .map(|t| format!("{:?}", spec.at(bin, t)))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn matrix_to_pgm(spec: &Spectrogram) -> String {
    let peak = spec.mag.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut out = format!("P2\n{} {}\n255\n", spec.n_frames, spec.n_bins);
    // top row = highest frequency, so the dump reads like a spectrogram
    for bin in (0..spec.n_bins).rev() {
        let row: Vec<String> = (0..spec.n_frames)
            .map(|t| {
                let v = if peak > 0.0 {
                    (spec.at(bin, t) / peak * 255.0).round() as u32
                } else {
                    0
                };
                v.to_string()
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn run_inspect(args: &InspectArgs) -> Result<String> {
    let config = PipelineConfig::default();
    let clip = read_wav(&args.wav)?;
    let raw = compute_spectrogram(&clip, &config.spectrogram)?;
    let stage_matrix = |stage: Stage| -> Spectrogram {
        match stage {
            Stage::Raw => raw.clone(),
            Stage::Thresholded => threshold_weakest(&raw, config.preprocess.discard_fraction),
            Stage::Cleaned => {
                let t = threshold_weakest(&raw, config.preprocess.discard_fraction);
                weakest_neighborhood(&t, &config.preprocess)
            }
            Stage::Traced => unreachable!(),
        }
    };
    match args.stage {
        Stage::Traced => {
            let cleaned = stage_matrix(Stage::Cleaned);
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let paths = iterate_until_stable(&cleaned, &config.tracer, &mut rng);
            let mut out = String::from("frame,bin,magnitude,path_id\n");
            for (id, path) in paths.iter().enumerate() {
                for (&(frame, bin), &mag) in path.points.iter().zip(&path.magnitudes) {
                    out.push_str(&format!("{frame},{bin},{mag:?},{id}\n"));
                }
            }
            Ok(out)
        }
        stage => {
            let spec = stage_matrix(stage);
            Ok(match args.format {
                DumpFormat::Csv => matrix_to_csv(&spec),
                DumpFormat::Pgm => matrix_to_pgm(&spec),
            })
        }
    }
}

/// Exit code mapping: 0 success, 2 usage (clap's default), 3 model or
/// format error, 4 I/O error.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::BadModel(_) => 3,
        Error::IoFailure(_)
        | Error::NotWav { .. }
        | Error::Truncated { .. }
        | Error::UnsupportedEncoding { .. } => 4,
        _ => 1,
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome: Result<()> = match &cli.command {
        Command::Synth(args) => run_synth(args).map(|manifest| {
            println!("wrote {} clips to {}", manifest.rows.len(), args.out.display());
        }),
        Command::Train(args) => run_train(args).map(|train_acc| {
            println!("model written to {}", args.out.display());
            println!("training accuracy: {train_acc:.4}");
        }),
        Command::Detect(args) => run_detect(args).map(|csv| print!("{csv}")),
        Command::Eval(args) => run_eval(args).map(|report| print!("{}", report.to_text())),
        Command::Inspect(args) => run_inspect(args).map(|dump| print!("{dump}")),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
