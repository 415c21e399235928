//! Short-time Fourier analysis: clip in, magnitude matrix out.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::audio_io::AudioClip;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Hann,
    Rectangular,
}

/// Analysis parameters for [`compute_spectrogram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrogramParams {
    pub window_len: usize,
    pub hop: usize,
    pub window: WindowKind,
    pub fft_len: usize,
}

impl Default for SpectrogramParams {
    /// Defaults sized for 2 kHz hydrophone clips: 128 ms windows hopped
    /// every 16 ms give ~7.81 Hz and 16 ms resolution, enough to resolve
    /// a 0.3 s up-call sweep for the particle tracer.
    fn default() -> Self {
        SpectrogramParams {
            window_len: 256,
            hop: 32,
            window: WindowKind::Hann,
            fft_len: 256,
        }
    }
}

impl SpectrogramParams {
    pub fn validate(&self) {
        assert!(self.hop > 0 && self.hop <= self.window_len);
        assert!(self.window_len <= self.fft_len);
        assert!(self.fft_len.is_power_of_two());
    }
}

/// Nonnegative magnitude matrix over (frequency bin x time frame).
///
/// Row-major storage: `mag[bin * n_frames + frame]`, bin 0 = DC.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub mag: Vec<f64>,
    pub n_bins: usize,
    pub n_frames: usize,
    pub freq_res_hz: f64,
    pub time_res_s: f64,
    pub origin_time_s: f64,
}

impl Spectrogram {
    pub fn zeros(n_bins: usize, n_frames: usize, freq_res_hz: f64, time_res_s: f64) -> Spectrogram {
        Spectrogram {
            mag: vec![0.0; n_bins * n_frames],
            n_bins,
            n_frames,
            freq_res_hz,
            time_res_s,
            origin_time_s: 0.0,
        }
    }

    #[inline]
    pub fn at(&self, bin: usize, frame: usize) -> f64 {
        self.mag[bin * self.n_frames + frame]
    }

    #[inline]
    pub fn set(&mut self, bin: usize, frame: usize, value: f64) {
        self.mag[bin * self.n_frames + frame] = value;
    }

    /// Frequency in Hz at the center of a bin.
    pub fn bin_hz(&self, bin: usize) -> f64 {
        bin as f64 * self.freq_res_hz
    }

    pub fn max_hz(&self) -> f64 {
        self.bin_hz(self.n_bins - 1)
    }

    pub fn nonzero_count(&self) -> usize {
        self.mag.iter().filter(|&&v| v != 0.0).count()
    }
}

fn window_coefficients(kind: WindowKind, len: usize) -> Vec<f64> {
    match kind {
        WindowKind::Rectangular => vec![1.0; len],
        WindowKind::Hann => (0..len)
            .map(|i| {
                let phase = 2.0 * std::f64::consts::PI * i as f64 / len as f64;
                0.5 * (1.0 - phase.cos())
            })
            .collect(),
    }
}

/// Compute the magnitude spectrogram of a clip.
///
/// Frame `t` covers samples `[t*hop, t*hop + window_len)`; frames that
/// would run past the end of the clip are dropped.
pub fn compute_spectrogram(clip: &AudioClip, params: &SpectrogramParams) -> Result<Spectrogram> {
    params.validate();
    let n = clip.samples.len();
    if n < params.window_len {
        return Err(Error::ClipTooShort {
            samples: n,
            window_len: params.window_len,
        });
    }

    let n_frames = 1 + (n - params.window_len) / params.hop;
    let n_bins = params.fft_len / 2 + 1;
    let rate = clip.sample_rate_hz as f64;
    let mut spec = Spectrogram::zeros(
        n_bins,
        n_frames,
        rate / params.fft_len as f64,
        params.hop as f64 / rate,
    );

    let window = window_coefficients(params.window, params.window_len);
    let fft = FftPlanner::new().plan_fft_forward(params.fft_len);
    let mut buf = vec![Complex::new(0.0, 0.0); params.fft_len];
    for t in 0..n_frames {
        let start = t * params.hop;
        for (i, slot) in buf.iter_mut().enumerate() {
            let x = if i < params.window_len {
                clip.samples[start + i] * window[i]
            } else {
                0.0
            };
            *slot = Complex::new(x, 0.0);
        }
        fft.process(&mut buf);
        for (b, value) in buf[..n_bins].iter().enumerate() {
            spec.set(b, t, value.norm());
        }
    }
    Ok(spec)
}
