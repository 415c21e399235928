//! Gaussian per-feature scoring and a Gini decision tree over the scores,
//! plus model persistence and the end-to-end per-clip detector.

use std::path::Path as FsPath;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audio_io::AudioClip;
use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureVector, N_FEATURES};
use crate::path_tracer::{trace_candidates, TracerConfig};
use crate::preprocess::{threshold_weakest, weakest_neighborhood, weakest_value, PreprocessParams};
use crate::spectrogram::{compute_spectrogram, SpectrogramParams};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// `exp(-(x - mu)^2 / (2 sigma^2))`: 1 at the mean, falling off with
/// distance in units of sigma.
pub fn gaussian_score(x: f64, mu: f64, sigma: f64) -> f64 {
    assert!(sigma > 0.0);
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp()
}

/// Per-feature Gaussian bells fit on positive examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianScorer {
    pub mu: [f64; N_FEATURES],
    pub sigma: [f64; N_FEATURES],
}

impl GaussianScorer {
    pub fn score(&self, fv: &FeatureVector) -> [f64; N_FEATURES] {
        let mut out = [0.0; N_FEATURES];
        for k in 0..N_FEATURES {
            out[k] = gaussian_score(fv.0[k], self.mu[k], self.sigma[k]);
        }
        out
    }
}

/// Fit per-feature mean and unbiased standard deviation over positive
/// feature vectors. Sigma is floored at 1e-6 of the feature's observed
/// range (1e-6 absolute when the feature is constant) so a degenerate
/// feature cannot turn into a spike that vetoes everything.
pub fn fit_gaussians(positives: &[FeatureVector]) -> Result<GaussianScorer> {
    if positives.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 positive examples, got {}",
            positives.len()
        )));
    }
    let n = positives.len() as f64;
    let mut mu = [0.0; N_FEATURES];
    let mut sigma = [0.0; N_FEATURES];
    for k in 0..N_FEATURES {
        let values: Vec<f64> = positives.iter().map(|fv| fv.0[k]).collect();
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let range = values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let floor = if range > 0.0 { 1e-6 * range } else { 1e-6 };
        mu[k] = mean;
        sigma[k] = var.sqrt().max(floor);
    }
    Ok(GaussianScorer { mu, sigma })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        is_call: bool,
        /// Positive fraction of the training rows that reached this leaf.
        confidence: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
}

impl DecisionTree {
    /// Route a score vector to its leaf: `score <= threshold` goes left.
    pub fn predict(&self, scores: &[f64; N_FEATURES]) -> (bool, f64) {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf {
                    is_call,
                    confidence,
                } => return (*is_call, *confidence),
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if scores[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 8,
            min_leaf: 5,
        }
    }
}

/// One training row: a score vector in (0,1]^11 with its clip label.
pub type TrainRow = ([f64; N_FEATURES], bool);

fn gini(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

fn make_leaf(rows: &[&TrainRow]) -> TreeNode {
    let pos = rows.iter().filter(|r| r.1).count();
    let frac = pos as f64 / rows.len() as f64;
    TreeNode::Leaf {
        is_call: pos * 2 > rows.len(),
        confidence: frac,
    }
}

fn grow(rows: &[&TrainRow], depth: usize, params: &TreeParams) -> TreeNode {
    let pos = rows.iter().filter(|r| r.1).count();
    if depth >= params.max_depth || pos == 0 || pos == rows.len() || rows.len() < 2 * params.min_leaf
    {
        return make_leaf(rows);
    }

    // best split = lowest weighted child impurity; ties broken by lowest
    // feature index, then lowest threshold, so training is deterministic
    let mut best: Option<(f64, usize, f64)> = None;
    for feature in 0..N_FEATURES {
        let mut values: Vec<f64> = rows.iter().map(|r| r.0[feature]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let threshold = 0.5 * (pair[0] + pair[1]);
            let (mut left_pos, mut left_n) = (0usize, 0usize);
            for row in rows {
                if row.0[feature] <= threshold {
                    left_n += 1;
                    if row.1 {
                        left_pos += 1;
                    }
                }
            }
            let right_n = rows.len() - left_n;
            if left_n < params.min_leaf || right_n < params.min_leaf {
                continue;
            }
            let right_pos = pos - left_pos;
            let cost = (left_n as f64 * gini(left_pos, left_n)
                + right_n as f64 * gini(right_pos, right_n))
                / rows.len() as f64;
            let better = match best {
                None => true,
                Some((best_cost, _, _)) => cost < best_cost - 1e-15,
            };
            if better {
                best = Some((cost, feature, threshold));
            }
        }
    }

    let Some((cost, feature, threshold)) = best else {
        return make_leaf(rows);
    };
    if cost >= gini(pos, rows.len()) - 1e-15 {
        return make_leaf(rows); // no impurity reduction
    }
    let (left_rows, right_rows): (Vec<&TrainRow>, Vec<&TrainRow>) =
        rows.iter().partition(|r| r.0[feature] <= threshold);
    TreeNode::Split {
        feature,
        threshold,
        left: Box::new(grow(&left_rows, depth + 1, params)),
        right: Box::new(grow(&right_rows, depth + 1, params)),
    }
}

/// Greedy binary Gini tree over score vectors.
pub fn train_tree(rows: &[TrainRow], params: &TreeParams) -> Result<DecisionTree> {
    if rows.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let refs: Vec<&TrainRow> = rows.iter().collect();
    Ok(DecisionTree {
        root: grow(&refs, 0, params),
    })
}

/// Everything needed to rerun detection exactly as it ran at training
/// time, embedded in the model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub spectrogram: SpectrogramParams,
    pub preprocess: PreprocessParams,
    pub tracer: TracerConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            spectrogram: SpectrogramParams::default(),
            preprocess: PreprocessParams::default(),
            tracer: TracerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub format_version: u32,
    pub scorers: GaussianScorer,
    pub tree: DecisionTree,
    pub pipeline_config: PipelineConfig,
}

impl DetectorModel {
    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::BadModel(e.to_string()))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<DetectorModel> {
        let json = std::fs::read_to_string(path)?;
        let model: DetectorModel =
            serde_json::from_str(&json).map_err(|e| Error::BadModel(e.to_string()))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::BadModel(format!(
                "unsupported format_version {}",
                model.format_version
            )));
        }
        Ok(model)
    }
}

/// Score a feature vector and route it through the tree.
pub fn classify(fv: &FeatureVector, model: &DetectorModel) -> (bool, f64) {
    model.tree.predict(&model.scorers.score(fv))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateDecision {
    pub features: FeatureVector,
    pub is_call: bool,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClipDecision {
    pub is_call: bool,
    pub confidence: f64,
    pub candidates: Vec<CandidateDecision>,
}

/// Run preprocessing and tracing on one clip and return the candidate
/// feature vectors.
pub fn extract_clip_features(
    clip: &AudioClip,
    config: &PipelineConfig,
    rng_seed: u64,
) -> Result<Vec<FeatureVector>> {
    let raw = compute_spectrogram(clip, &config.spectrogram)?;
    let seg_threshold = weakest_value(&raw, config.preprocess.discard_fraction);
    let thresholded = threshold_weakest(&raw, config.preprocess.discard_fraction);
    let cleaned = weakest_neighborhood(&thresholded, &config.preprocess);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let candidates = trace_candidates(&cleaned, &config.tracer, &mut rng);
    candidates
        .iter()
        .map(|cand| extract_features(cand, &raw, &cleaned, seg_threshold))
        .collect()
}

/// Full pipeline on one clip: a clip is a call iff at least one candidate
/// classifies as a call; clip confidence is the best candidate confidence
/// (0 with no candidates).
pub fn detect_clip(clip: &AudioClip, model: &DetectorModel, rng_seed: u64) -> Result<ClipDecision> {
    let fvs = extract_clip_features(clip, &model.pipeline_config, rng_seed)?;
    let candidates: Vec<CandidateDecision> = fvs
        .into_iter()
        .map(|features| {
            let (is_call, confidence) = classify(&features, model);
            CandidateDecision {
                features,
                is_call,
                confidence,
            }
        })
        .collect();
    let is_call = candidates.iter().any(|c| c.is_call);
    let confidence = candidates
        .iter()
        .map(|c| c.confidence)
        .fold(0.0, f64::max);
    Ok(ClipDecision {
        is_call,
        confidence,
        candidates,
    })
}

/// Train a detector from labeled clips: Gaussians on the positive clips'
/// candidate features, the tree on every clip's scored candidates.
pub fn train_detector(
    clips: &[(AudioClip, bool)],
    config: &PipelineConfig,
    seed: u64,
) -> Result<DetectorModel> {
    let mut positives = Vec::new();
    let mut labeled_fvs = Vec::new();
    for (i, (clip, is_call)) in clips.iter().enumerate() {
        let fvs = extract_clip_features(clip, config, per_clip_seed(seed, i))?;
        for fv in fvs {
            if *is_call {
                positives.push(fv);
            }
            labeled_fvs.push((fv, *is_call));
        }
    }
    let scorers = fit_gaussians(&positives)?;
    let rows: Vec<TrainRow> = labeled_fvs
        .iter()
        .map(|(fv, label)| (scorers.score(fv), *label))
        .collect();
    let tree = train_tree(&rows, &TreeParams::default())?;
    Ok(DetectorModel {
        format_version: MODEL_FORMAT_VERSION,
        scorers,
        tree,
        pipeline_config: config.clone(),
    })
}

/// Stable per-clip seed derivation so batch runs are reproducible while
/// clips stay independent.
pub fn per_clip_seed(base: u64, index: usize) -> u64 {
    // splitmix64 step
    let mut z = base
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(index as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
