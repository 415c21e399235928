//! Mono PCM16 WAV reading and writing.
//!
//! Clips are normalized to floating amplitudes in [-1, 1] on read and
//! quantized back to int16 on write. Only the one format the hydrophone
//! clips come in is supported; anything else is rejected up front.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground-truth label attached to a clip, when known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Positive,
    Negative,
    Unknown,
}

impl Label {
    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "positive" => Some(Label::Positive),
            "negative" => Some(Label::Negative),
            "unknown" => Some(Label::Unknown),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
            Label::Unknown => "unknown",
        }
    }
}

/// A mono audio clip with amplitudes in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub samples: Vec<f64>,
    pub sample_rate_hz: u32,
    pub label: Option<Label>,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> AudioClip {
        assert!(sample_rate_hz > 0, "sample rate must be positive");
        AudioClip {
            samples,
            sample_rate_hz,
            label: None,
        }
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }
}

fn u16_at(bytes: &[u8], off: usize) -> u16 {
    u16::from_le_bytes([bytes[off], bytes[off + 1]])
}

fn u32_at(bytes: &[u8], off: usize) -> u32 {
    u32::from_le_bytes([bytes[off], bytes[off + 1], bytes[off + 2], bytes[off + 3]])
}

/// Read a PCM16 mono WAV file into an [`AudioClip`].
///
/// Sample values are `raw / 32768.0`, preserving file order. The sample
/// rate always comes from the fmt chunk, never from an assumption.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let not_wav = || Error::NotWav {
        path: path.to_path_buf(),
    };
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(not_wav());
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // (format, channels, rate, bits)
    let mut data: Option<(usize, usize)> = None; // (offset, declared len)
    let mut off = 12;
    while off + 8 <= bytes.len() {
        let id = &bytes[off..off + 4];
        let size = u32_at(&bytes, off + 4) as usize;
        let body = off + 8;
        match id {
            b"fmt " => {
                if body + 16 > bytes.len() {
                    return Err(not_wav());
                }
                fmt = Some((
                    u16_at(&bytes, body),
                    u16_at(&bytes, body + 2),
                    u32_at(&bytes, body + 4),
                    u16_at(&bytes, body + 14),
                ));
            }
            b"data" => {
                data = Some((body, size));
            }
            _ => {}
        }
        // chunks are word-aligned
        off = body + size + (size & 1);
    }

    let (format, channels, rate, bits) = fmt.ok_or_else(not_wav)?;
    if format != 1 || bits != 16 || channels != 1 {
        return Err(Error::UnsupportedEncoding {
            path: path.to_path_buf(),
            detail: format!("format={format}, channels={channels}, bits={bits}"),
        });
    }
    if rate == 0 {
        return Err(Error::UnsupportedEncoding {
            path: path.to_path_buf(),
            detail: "zero sample rate".into(),
        });
    }

    let (data_off, declared) = data.ok_or_else(not_wav)?;
    let available = bytes.len().saturating_sub(data_off);
    if available < declared {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected: declared,
            found: available,
        });
    }

    let samples = bytes[data_off..data_off + declared]
        .chunks_exact(2)
        .map(|b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0)
        .collect();
    Ok(AudioClip {
        samples,
        sample_rate_hz: rate,
        label: None,
    })
}

/// Write a clip as PCM16 mono WAV, quantizing by `round(x * 32768)`
/// clamped to the int16 range. The symmetric scale keeps the read/write
/// round-trip error within one int16 quantum across the full range.
pub fn write_wav(clip: &AudioClip, path: impl AsRef<Path>) -> Result<()> {
    let n = clip.samples.len();
    let data_len = (n * 2) as u32;
    let mut out = Vec::with_capacity(44 + n * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&clip.sample_rate_hz.to_le_bytes());
    let byte_rate = clip.sample_rate_hz * 2;
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &x in &clip.samples {
        let q = (x * 32768.0).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_clip_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("z.wav");
        let clip = AudioClip::new(vec![0.0; 2000], 2000);
        write_wav(&clip, &p).unwrap();
        let back = read_wav(&p).unwrap();
        assert_eq!(back.samples.len(), 2000);
        assert!(back.samples.iter().all(|&s| s == 0.0));
        assert_eq!(back.duration_s(), 1.0);
    }

    #[test]
    fn full_scale_sample_is_32767() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.wav");
        write_wav(&AudioClip::new(vec![1.0], 2000), &p).unwrap();
        let back = read_wav(&p).unwrap();
        assert_eq!(back.samples, vec![32767.0 / 32768.0]);
    }

    #[test]
    fn round_trip_within_one_quantum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dir = tempfile::tempdir().unwrap();
        for i in 0..100 {
            let n = rng.gen_range(1..500);
            let samples: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let clip = AudioClip::new(samples, 2000);
            let p = dir.path().join(format!("c{i}.wav"));
            write_wav(&clip, &p).unwrap();
            let back = read_wav(&p).unwrap();
            assert_eq!(back.sample_rate_hz, 2000);
            for (a, b) in clip.samples.iter().zip(&back.samples) {
                assert!((a - b).abs() <= 1.0 / 32768.0, "{a} vs {b}");
                assert!(b.is_finite() && (-1.0..=1.0).contains(b));
            }
        }
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.wav");
        fs::write(&p, b"not a wave file at all......").unwrap();
        assert!(matches!(read_wav(&p), Err(Error::NotWav { .. })));
    }

    #[test]
    fn rejects_stereo() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("st.wav");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&36u32.to_le_bytes());
        bytes.extend_from_slice(b"WAVE");
        bytes.extend_from_slice(b"fmt ");
        bytes.extend_from_slice(&16u32.to_le_bytes());
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&2u16.to_le_bytes()); // stereo
        bytes.extend_from_slice(&2000u32.to_le_bytes());
        bytes.extend_from_slice(&8000u32.to_le_bytes());
        bytes.extend_from_slice(&4u16.to_le_bytes());
        bytes.extend_from_slice(&16u16.to_le_bytes());
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&0u32.to_le_bytes());
        fs::write(&p, bytes).unwrap();
        assert!(matches!(
            read_wav(&p),
            Err(Error::UnsupportedEncoding { .. })
        ));
    }

    #[test]
    fn detects_truncated_data() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.wav");
        write_wav(&AudioClip::new(vec![0.5; 100], 2000), &p).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        bytes.truncate(bytes.len() - 50);
        fs::write(&p, bytes).unwrap();
        assert!(matches!(read_wav(&p), Err(Error::Truncated { .. })));
    }
}
