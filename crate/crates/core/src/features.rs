//! The 11-feature description of a traced candidate call.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path_tracer::CandidateCall;
use crate::spectrogram::Spectrogram;

/// Band the up-call lives in; also the band used for the noise estimate.
pub const CALL_BAND_LOW_HZ: f64 = 50.0;
pub const CALL_BAND_HIGH_HZ: f64 = 440.0;

pub const N_FEATURES: usize = 11;

/// f1 duration (s), f2 min frequency (Hz), f3 max instantaneous bandwidth
/// (Hz), f4 start-end bandwidth (Hz), f5 upsweep duration (s), f6 local
/// noise level, f7 segmentation threshold, f8 mean instantaneous bandwidth
/// (Hz), f9 hole fraction, f10 downsweep fraction, f11 harmonic fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; N_FEATURES]);

impl FeatureVector {
    pub fn duration_s(&self) -> f64 {
        self.0[0]
    }
    pub fn min_freq_hz(&self) -> f64 {
        self.0[1]
    }
    pub fn max_bandwidth_hz(&self) -> f64 {
        self.0[2]
    }
    pub fn start_end_bandwidth_hz(&self) -> f64 {
        self.0[3]
    }
    pub fn upsweep_duration_s(&self) -> f64 {
        self.0[4]
    }
    pub fn noise_level(&self) -> f64 {
        self.0[5]
    }
    pub fn segmentation_threshold(&self) -> f64 {
        self.0[6]
    }
    pub fn mean_bandwidth_hz(&self) -> f64 {
        self.0[7]
    }
    pub fn hole_fraction(&self) -> f64 {
        self.0[8]
    }
    pub fn downsweep_fraction(&self) -> f64 {
        self.0[9]
    }
    pub fn harmonic_fraction(&self) -> f64 {
        self.0[10]
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Compute the feature vector of one candidate.
///
/// `spec_raw` is the pre-threshold spectrogram of the same clip (the noise
/// estimate needs the values that thresholding zeroes out); `spec_clean`
/// the cleaned one the candidate was traced on; `seg_threshold` the
/// magnitude cut applied during thresholding.
pub fn extract_features(
    cand: &CandidateCall,
    spec_raw: &Spectrogram,
    spec_clean: &Spectrogram,
    seg_threshold: f64,
) -> Result<FeatureVector> {
    if spec_raw.max_hz() < CALL_BAND_HIGH_HZ {
        return Err(Error::BandOutOfRange {
            low_hz: CALL_BAND_LOW_HZ,
            high_hz: CALL_BAND_HIGH_HZ,
            max_hz: spec_raw.max_hz(),
        });
    }
    let path = &cand.path;
    let time_res = spec_clean.time_res_s;
    let freq_res = spec_clean.freq_res_hz;
    let first_frame = path.first_frame();
    let last_frame = path.last_frame();

    let f1 = (last_frame - first_frame) as f64 * time_res;
    let f2 = path.points.iter().map(|&(_, b)| b).min().unwrap_or(0) as f64 * freq_res;

    let extents = cand.freq_extent_per_frame();
    let f3 = extents
        .iter()
        .map(|e| (e.high_bin - e.low_bin) as f64 * freq_res)
        .fold(0.0, f64::max);
    let f8 = if extents.is_empty() {
        0.0
    } else {
        extents
            .iter()
            .map(|e| (e.high_bin - e.low_bin) as f64 * freq_res)
            .sum::<f64>()
            / extents.len() as f64
    };

    let f4 = (path.points.last().unwrap().1 as f64 - path.points.first().unwrap().1 as f64).abs()
        * freq_res;

    // sweep direction from time-advancing pairs that actually change bin;
    // at 16 ms / 7.8 Hz resolution a realistic sweep moves only every few
    // frames, so flat transitions are apportioned to the trend rather than
    // counted against it
    let mut up = 0usize;
    let mut down = 0usize;
    for pair in path.points.windows(2) {
        let ((t0, b0), (t1, b1)) = (pair[0], pair[1]);
        if t1 > t0 {
            if b1 > b0 {
                up += 1;
            } else if b1 < b0 {
                down += 1;
            }
        }
    }
    let changing = up + down;
    let (f5, f10) = if changing == 0 {
        (0.0, 0.0)
    } else {
        (
            f1 * up as f64 / changing as f64,
            down as f64 / changing as f64,
        )
    };

    // noise: median raw magnitude over the call band, excluding the cells
    // the candidate occupies
    let low_bin = (CALL_BAND_LOW_HZ / freq_res).ceil() as usize;
    let high_bin = ((CALL_BAND_HIGH_HZ / freq_res).floor() as usize).min(spec_raw.n_bins - 1);
    let mut band_values = Vec::new();
    for bin in low_bin..=high_bin {
        for frame in 0..spec_raw.n_frames {
            let occupied = extents
                .iter()
                .any(|e| e.frame == frame && (e.low_bin..=e.high_bin).contains(&bin));
            if !occupied {
                band_values.push(spec_raw.at(bin, frame));
            }
        }
    }
    let f6 = median(&mut band_values);
    let f7 = seg_threshold;

    let span_frames = last_frame - first_frame + 1;
    let holes = (first_frame..=last_frame)
        .filter(|&f| !path.points.iter().any(|&(t, _)| t == f))
        .count();
    let f9 = holes as f64 / span_frames as f64;

    // second harmonic: a nonzero cleaned cell within one bin of twice the
    // path bin, checked per frame
    let mut path_frames: Vec<usize> = path.points.iter().map(|&(t, _)| t).collect();
    path_frames.dedup();
    let harmonic_frames = path_frames
        .iter()
        .filter(|&&frame| {
            path.points
                .iter()
                .filter(|&&(t, _)| t == frame)
                .any(|&(_, bin)| {
                    let target = 2 * bin;
                    (target.saturating_sub(1)..=target + 1)
                        .any(|b| b < spec_clean.n_bins && spec_clean.at(b, frame) > 0.0)
                })
        })
        .count();
    let f11 = if path_frames.is_empty() {
        0.0
    } else {
        harmonic_frames as f64 / path_frames.len() as f64
    };

    Ok(FeatureVector([f1, f2, f3, f4, f5, f6, f7, f8, f9, f10, f11]))
}
