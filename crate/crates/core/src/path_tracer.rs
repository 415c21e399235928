//! Stochastic particle tracing of nonzero ridges in a cleaned spectrogram.
//!
//! Particles are seeded equally spaced on the time axis, dropped onto the
//! first nonzero bin of their column, and walked from one particle to the
//! next over nonzero cells using roulette-wheel selection. Short paths are
//! discarded, tracing repeats on the surviving time support, and the final
//! paths are widened in frequency and pruned into candidate calls.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrogram::Spectrogram;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracerConfig {
    pub n_particles: usize,
    /// Weight of the deterministic (ridge-following) term; `alpha + beta = 1`.
    pub alpha: f64,
    /// Weight of the stochastic term.
    pub beta: f64,
    pub min_path_duration_s: f64,
    /// Step budget per leg; `None` allows 4x the frame gap.
    pub max_steps_per_leg: Option<usize>,
    pub max_rounds: usize,
    pub rng_seed: u64,
}

impl Default for TracerConfig {
    fn default() -> Self {
        TracerConfig {
            n_particles: 10,
            alpha: 0.8,
            beta: 0.2,
            min_path_duration_s: 0.3,
            max_steps_per_leg: None,
            max_rounds: 10,
            rng_seed: 0,
        }
    }
}

impl TracerConfig {
    pub fn validate(&self) {
        assert!(
            (self.alpha + self.beta - 1.0).abs() < 1e-12,
            "alpha + beta must equal 1"
        );
        assert!((0.0..=1.0).contains(&self.alpha));
        assert!(self.min_path_duration_s > 0.0);
        assert!(self.n_particles >= 2);
    }
}

/// A cursor on the time-frequency grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Particle {
    pub time_frame: usize,
    pub freq_bin: usize,
    pub active: bool,
}

/// A traced contour: time-sorted, 8-adjacent points on nonzero cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    /// (time_frame, freq_bin) pairs.
    pub points: Vec<(usize, usize)>,
    pub magnitudes: Vec<f64>,
    pub time_res_s: f64,
}

impl Path {
    pub fn duration_s(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => (b.0 - a.0) as f64 * self.time_res_s,
            _ => 0.0,
        }
    }

    pub fn first_frame(&self) -> usize {
        self.points.first().map(|p| p.0).unwrap_or(0)
    }

    pub fn last_frame(&self) -> usize {
        self.points.last().map(|p| p.0).unwrap_or(0)
    }
}

/// Per-frame low/high frequency extent of a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameExtent {
    pub frame: usize,
    pub low_bin: usize,
    pub high_bin: usize,
}

/// A path widened in frequency; the unit of classification.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateCall {
    pub path: Path,
    /// Extent per path point; `None` marks a point whose up and down walks
    /// both ran off the matrix without seeing a zero.
    pub point_extents: Vec<Option<(usize, usize)>>,
}

impl CandidateCall {
    /// Merged (low, high) extent per frame over non-failed points.
    pub fn freq_extent_per_frame(&self) -> Vec<FrameExtent> {
        let mut extents: Vec<FrameExtent> = Vec::new();
        for (&(frame, _), ext) in self.path.points.iter().zip(&self.point_extents) {
            let Some((low, high)) = *ext else { continue };
            match extents.iter_mut().find(|e| e.frame == frame) {
                Some(e) => {
                    e.low_bin = e.low_bin.min(low);
                    e.high_bin = e.high_bin.max(high);
                }
                None => extents.push(FrameExtent {
                    frame,
                    low_bin: low,
                    high_bin: high,
                }),
            }
        }
        extents.sort_by_key(|e| e.frame);
        extents
    }

    pub fn duration_s(&self) -> f64 {
        self.path.duration_s()
    }
}

/// Lowest nonzero bin of a column, scanning from low frequency upward.
fn first_nonzero_bin(spec: &Spectrogram, frame: usize) -> Option<usize> {
    (0..spec.n_bins).find(|&b| spec.at(b, frame) > 0.0)
}

/// A particle seeded on an all-zero column explores to the nearest column
/// holding signal (earlier frame on a tie).
fn explore_to_nonzero(spec: &Spectrogram, frame: usize) -> Option<(usize, usize)> {
    for dist in 0..spec.n_frames {
        if frame >= dist {
            if let Some(bin) = first_nonzero_bin(spec, frame - dist) {
                return Some((frame - dist, bin));
            }
        }
        if dist > 0 && frame + dist < spec.n_frames {
            if let Some(bin) = first_nonzero_bin(spec, frame + dist) {
                return Some((frame + dist, bin));
            }
        }
    }
    None
}

/// Seed `n` particles equally spaced over the whole time axis; each drops
/// to the first nonzero bin of its column, exploring to the nearest
/// nonzero column when its own is empty. Particles go inactive only when
/// the matrix holds no signal at all.
pub fn seed_particles(spec: &Spectrogram, n: usize) -> Vec<Particle> {
    let frames: Vec<usize> = (0..spec.n_frames).collect();
    seed_particles_on(spec, &frames, n)
}

/// Seed over an explicit (sorted) frame support — the "new time axis"
/// after a filtering round.
pub fn seed_particles_on(spec: &Spectrogram, frames: &[usize], n: usize) -> Vec<Particle> {
    assert!(n >= 2);
    let mut particles = Vec::with_capacity(n);
    if frames.is_empty() {
        return (0..n)
            .map(|_| Particle {
                time_frame: 0,
                freq_bin: 0,
                active: false,
            })
            .collect();
    }
    for k in 0..n {
        let idx = ((k as f64) * (frames.len() - 1) as f64 / (n - 1) as f64).round() as usize;
        let frame = frames[idx];
        match explore_to_nonzero(spec, frame) {
            Some((found_frame, bin)) => particles.push(Particle {
                time_frame: found_frame,
                freq_bin: bin,
                active: true,
            }),
            None => particles.push(Particle {
                time_frame: frame,
                freq_bin: 0,
                active: false,
            }),
        }
    }
    particles
}

/// Mean magnitude of the nonzero cells in the rectangle spanned by two
/// grid positions. Zero when the rectangle holds no signal.
pub fn region_mean(spec: &Spectrogram, a: (usize, usize), b: (usize, usize)) -> f64 {
    let (t0, t1) = (a.0.min(b.0), a.0.max(b.0));
    let (f0, f1) = (a.1.min(b.1), a.1.max(b.1));
    let mut sum = 0.0;
    let mut count = 0usize;
    for bin in f0..=f1 {
        for frame in t0..=t1 {
            let v = spec.at(bin, frame);
            if v > 0.0 {
                sum += v;
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Pick the next cell by roulette-wheel selection.
///
/// Candidate `j` gets weight `alpha / (1 + (mag_j - mu)^2) + beta * x_j`
/// with `x_j` a fresh uniform draw, then one more draw spins the wheel.
pub fn roulette_step(
    spec: &Spectrogram,
    candidates: &[(usize, usize)],
    mu: f64,
    cfg: &TracerConfig,
    rng: &mut impl Rng,
) -> Result<(usize, usize)> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let weights: Vec<f64> = candidates
        .iter()
        .map(|&(frame, bin)| {
            let mag = spec.at(bin, frame);
            let deviation = mag - mu;
            cfg.alpha / (1.0 + deviation * deviation) + cfg.beta * rng.gen::<f64>()
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Ok(candidates[0]);
    }
    let spin = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (&cand, &w) in candidates.iter().zip(&weights) {
        acc += w;
        if spin < acc {
            return Ok(cand);
        }
    }
    Ok(*candidates.last().unwrap())
}

/// A leg that found no route between its particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LegFailure;

fn movement_candidates(
    spec: &Spectrogram,
    pos: (usize, usize),
    visited: &HashSet<(usize, usize)>,
) -> Vec<(usize, usize)> {
    let (t, f) = (pos.0 as i64, pos.1 as i64);
    // forward or sideways only, never back in time
    let moves = [(t + 1, f - 1), (t + 1, f), (t + 1, f + 1), (t, f - 1), (t, f + 1)];
    moves
        .into_iter()
        .filter(|&(mt, mf)| {
            mt >= 0
                && mf >= 0
                && (mt as usize) < spec.n_frames
                && (mf as usize) < spec.n_bins
        })
        .map(|(mt, mf)| (mt as usize, mf as usize))
        .filter(|cand| spec.at(cand.1, cand.0) > 0.0 && !visited.contains(cand))
        .collect()
}

fn trace_leg_from(
    spec: &Spectrogram,
    start: (usize, usize),
    target_frame: usize,
    mu: f64,
    cfg: &TracerConfig,
    rng: &mut impl Rng,
) -> std::result::Result<Path, LegFailure> {
    let gap = target_frame.saturating_sub(start.0);
    let max_steps = cfg.max_steps_per_leg.unwrap_or(4 * gap.max(1));
    let mut visited = HashSet::new();
    visited.insert(start);
    let mut points = vec![start];
    let mut magnitudes = vec![spec.at(start.1, start.0)];
    let mut pos = start;
    for _ in 0..max_steps {
        if pos.0 >= target_frame {
            return Ok(Path {
                points,
                magnitudes,
                time_res_s: spec.time_res_s,
            });
        }
        let candidates = movement_candidates(spec, pos, &visited);
        if candidates.is_empty() {
            return Err(LegFailure);
        }
        pos = roulette_step(spec, &candidates, mu, cfg, rng).expect("candidates nonempty");
        visited.insert(pos);
        points.push(pos);
        magnitudes.push(spec.at(pos.1, pos.0));
    }
    if pos.0 >= target_frame {
        Ok(Path {
            points,
            magnitudes,
            time_res_s: spec.time_res_s,
        })
    } else {
        Err(LegFailure)
    }
}

/// Walk one particle to the next over nonzero cells.
pub fn trace_leg(
    spec: &Spectrogram,
    from: &Particle,
    to: &Particle,
    cfg: &TracerConfig,
    rng: &mut impl Rng,
) -> std::result::Result<Path, LegFailure> {
    assert!(from.active && to.active && from.time_frame < to.time_frame);
    let start = (from.time_frame, from.freq_bin);
    let goal = (to.time_frame, to.freq_bin);
    let mu = region_mean(spec, start, goal);
    trace_leg_from(spec, start, to.time_frame, mu, cfg, rng)
}

/// Run consecutive legs, chaining successful ones into maximal paths.
/// Returns raw paths; no duration filter applied.
fn run_round(
    spec: &Spectrogram,
    particles: &[Particle],
    cfg: &TracerConfig,
    rng: &mut impl Rng,
) -> Vec<Path> {
    let active: Vec<&Particle> = particles.iter().filter(|p| p.active).collect();
    let mut paths = Vec::new();
    let mut chain: Option<Path> = None;
    for pair in active.windows(2) {
        let (from, to) = (pair[0], pair[1]);
        if from.time_frame >= to.time_frame {
            continue;
        }
        // continue from where the previous leg ended so joined paths stay
        // 8-adjacent; fall back to the particle's own seed otherwise
        let start = match &chain {
            Some(path) => *path.points.last().unwrap(),
            None => (from.time_frame, from.freq_bin),
        };
        let mu = region_mean(spec, start, (to.time_frame, to.freq_bin));
        match trace_leg_from(spec, start, to.time_frame, mu, cfg, rng) {
            Ok(leg) => match chain.as_mut() {
                Some(path) => {
                    path.points.extend_from_slice(&leg.points[1..]);
                    path.magnitudes.extend_from_slice(&leg.magnitudes[1..]);
                }
                None => chain = Some(leg),
            },
            Err(LegFailure) => {
                if let Some(path) = chain.take() {
                    paths.push(path);
                }
            }
        }
    }
    if let Some(path) = chain.take() {
        paths.push(path);
    }
    paths
}

/// One seeding + tracing round with the short-path filter applied.
pub fn trace_round(spec: &Spectrogram, cfg: &TracerConfig, rng: &mut impl Rng) -> Vec<Path> {
    cfg.validate();
    let particles = seed_particles(spec, cfg.n_particles);
    let raw = run_round(spec, &particles, cfg, rng);
    raw.into_iter()
        .filter(|p| p.duration_s() >= cfg.min_path_duration_s)
        .collect()
}

fn support_frames(paths: &[Path]) -> Vec<usize> {
    let mut frames: Vec<usize> = paths
        .iter()
        .flat_map(|p| p.first_frame()..=p.last_frame())
        .collect();
    frames.sort_unstable();
    frames.dedup();
    frames
}

/// Trace, filter, and re-seed over the surviving time support until a
/// round produces no short path (or `max_rounds` is exhausted).
pub fn iterate_until_stable(
    spec: &Spectrogram,
    cfg: &TracerConfig,
    rng: &mut impl Rng,
) -> Vec<Path> {
    cfg.validate();
    let mut particles = seed_particles(spec, cfg.n_particles);
    let mut surviving = Vec::new();
    for _ in 0..cfg.max_rounds.max(1) {
        let raw = run_round(spec, &particles, cfg, rng);
        let had_short = raw
            .iter()
            .any(|p| p.duration_s() < cfg.min_path_duration_s);
        surviving = raw
            .into_iter()
            .filter(|p| p.duration_s() >= cfg.min_path_duration_s)
            .collect();
        if !had_short || surviving.is_empty() {
            break;
        }
        particles = seed_particles_on(spec, &support_frames(&surviving), cfg.n_particles);
    }
    surviving
}

/// Widen each path point in frequency until a zero cell (or the matrix
/// edge) is seen in each direction.
pub fn propagate_frequency(spec: &Spectrogram, paths: Vec<Path>) -> Vec<CandidateCall> {
    paths
        .into_iter()
        .map(|path| {
            let point_extents = path
                .points
                .iter()
                .map(|&(frame, bin)| {
                    let mut high = bin;
                    let mut saw_zero_up = false;
                    while high + 1 < spec.n_bins {
                        if spec.at(high + 1, frame) == 0.0 {
                            saw_zero_up = true;
                            break;
                        }
                        high += 1;
                    }
                    let mut low = bin;
                    let mut saw_zero_down = false;
                    while low > 0 {
                        if spec.at(low - 1, frame) == 0.0 {
                            saw_zero_down = true;
                            break;
                        }
                        low -= 1;
                    }
                    if saw_zero_up || saw_zero_down {
                        Some((low, high))
                    } else {
                        None
                    }
                })
                .collect();
            CandidateCall {
                path,
                point_extents,
            }
        })
        .collect()
}

/// Drop failed and isolated points, then drop candidates whose remaining
/// span is shorter than the minimum call duration.
pub fn prune(candidates: Vec<CandidateCall>, cfg: &TracerConfig) -> Vec<CandidateCall> {
    candidates
        .into_iter()
        .filter_map(|cand| {
            let kept: Vec<((usize, usize), f64, (usize, usize))> = cand
                .path
                .points
                .iter()
                .zip(&cand.path.magnitudes)
                .zip(&cand.point_extents)
                .filter_map(|((&pt, &mag), ext)| ext.map(|e| (pt, mag, e)))
                .collect();
            // isolated: no other surviving point within Chebyshev distance 2
            let survivors: Vec<_> = kept
                .iter()
                .filter(|(pt, _, _)| {
                    kept.iter().any(|(other, _, _)| {
                        other != pt
                            && pt.0.abs_diff(other.0).max(pt.1.abs_diff(other.1)) <= 2
                    })
                })
                .cloned()
                .collect();
            if survivors.is_empty() {
                return None;
            }
            let path = Path {
                points: survivors.iter().map(|(pt, _, _)| *pt).collect(),
                magnitudes: survivors.iter().map(|(_, mag, _)| *mag).collect(),
                time_res_s: cand.path.time_res_s,
            };
            if path.duration_s() < cfg.min_path_duration_s {
                return None;
            }
            let point_extents = survivors.iter().map(|(_, _, e)| Some(*e)).collect();
            Some(CandidateCall {
                path,
                point_extents,
            })
        })
        .collect()
}

/// The full tracing stage on a cleaned spectrogram.
pub fn trace_candidates(
    spec: &Spectrogram,
    cfg: &TracerConfig,
    rng: &mut impl Rng,
) -> Vec<CandidateCall> {
    let paths = iterate_until_stable(spec, cfg, rng);
    prune(propagate_frequency(spec, paths), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ridge_spec(n_bins: usize, n_frames: usize, row: usize, lo: usize, hi: usize) -> Spectrogram {
        let mut s = Spectrogram::zeros(n_bins, n_frames, 7.8125, 0.016);
        for t in lo..=hi {
            s.set(row, t, 1.0);
        }
        s
    }

    #[test]
    fn all_zero_matrix_seeds_inactive_particles() {
        let s = Spectrogram::zeros(20, 100, 7.8125, 0.016);
        let particles = seed_particles(&s, 10);
        assert_eq!(particles.len(), 10);
        assert!(particles.iter().all(|p| !p.active));
    }

    #[test]
    fn single_nonzero_row_seeds_on_that_row() {
        let s = ridge_spec(20, 100, 7, 0, 99);
        for p in seed_particles(&s, 10) {
            assert!(p.active);
            assert_eq!(p.freq_bin, 7);
        }
    }

    #[test]
    fn seed_frames_are_equally_spaced() {
        let s = ridge_spec(20, 118, 5, 0, 117);
        let frames: Vec<usize> = seed_particles(&s, 10).iter().map(|p| p.time_frame).collect();
        assert_eq!(frames, vec![0, 13, 26, 39, 52, 65, 78, 91, 104, 117]);
    }

    #[test]
    fn single_candidate_is_always_picked() {
        let s = ridge_spec(5, 5, 2, 0, 4);
        let cfg = TracerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let pick = roulette_step(&s, &[(3, 2)], 0.5, &cfg, &mut rng).unwrap();
            assert_eq!(pick, (3, 2));
        }
    }

    #[test]
    fn empty_candidates_is_an_error() {
        let s = ridge_spec(5, 5, 2, 0, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            roulette_step(&s, &[], 0.0, &TracerConfig::default(), &mut rng),
            Err(Error::EmptyCandidates)
        ));
    }

    #[test]
    fn deterministic_weights_match_monte_carlo() {
        // beta = 0, mags {mu, mu + 3}: weights {1, 0.1}, so the first
        // candidate should win ~10/11 of the time
        let mut s = Spectrogram::zeros(4, 4, 1.0, 1.0);
        s.set(0, 1, 5.0);
        s.set(1, 1, 8.0);
        let cfg = TracerConfig {
            alpha: 1.0,
            beta: 0.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let candidates = [(1, 0), (1, 1)];
        let mut first = 0usize;
        let n = 100_000;
        for _ in 0..n {
            if roulette_step(&s, &candidates, 5.0, &cfg, &mut rng).unwrap() == (1, 0) {
                first += 1;
            }
        }
        let freq = first as f64 / n as f64;
        assert!((freq - 10.0 / 11.0).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn unique_route_is_traced_exactly() {
        let s = ridge_spec(20, 100, 7, 0, 99);
        let cfg = TracerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let from = Particle { time_frame: 10, freq_bin: 7, active: true };
        let to = Particle { time_frame: 40, freq_bin: 7, active: true };
        let path = trace_leg(&s, &from, &to, &cfg, &mut rng).unwrap();
        let expected: Vec<(usize, usize)> = (10..=40).map(|t| (t, 7)).collect();
        assert_eq!(path.points, expected);
    }

    #[test]
    fn zero_gap_fails_the_leg() {
        let mut s = ridge_spec(20, 100, 7, 0, 20);
        for t in 40..100 {
            s.set(7, t, 1.0);
        }
        let cfg = TracerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let from = Particle { time_frame: 10, freq_bin: 7, active: true };
        let to = Particle { time_frame: 50, freq_bin: 7, active: true };
        assert_eq!(trace_leg(&s, &from, &to, &cfg, &mut rng), Err(LegFailure));
    }

    #[test]
    fn same_seed_gives_same_path() {
        let mut s = ridge_spec(30, 100, 10, 0, 99);
        for t in 0..100 {
            s.set(11, t, 0.5);
            s.set(9, t, 0.5);
        }
        let cfg = TracerConfig::default();
        let from = Particle { time_frame: 0, freq_bin: 10, active: true };
        let to = Particle { time_frame: 80, freq_bin: 10, active: true };
        let a = trace_leg(&s, &from, &to, &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = trace_leg(&s, &from, &to, &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn short_ridge_survives_as_one_path() {
        // 0.5 s ridge (frames 30..=62 at 16 ms) inside a 2 s clip
        let s = ridge_spec(30, 118, 12, 30, 62);
        let cfg = TracerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let paths = trace_round(&s, &cfg, &mut rng);
        assert_eq!(paths.len(), 1);
        assert!(paths[0].duration_s() >= 0.3);
        assert!(paths[0].points.iter().all(|&(_, b)| b == 12));
    }

    #[test]
    fn surviving_paths_respect_min_duration() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for seed in 0..50 {
            let mut spec_rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = Spectrogram::zeros(24, 80, 7.8125, 0.016);
            for cell in &mut s.mag {
                if rand::Rng::gen_bool(&mut spec_rng, 0.3) {
                    *cell = rand::Rng::gen_range(&mut spec_rng, 0.1..2.0);
                }
            }
            for p in trace_round(&s, &TracerConfig::default(), &mut rng) {
                assert!(p.duration_s() >= 0.3);
            }
        }
    }

    #[test]
    fn empty_first_round_terminates() {
        let s = Spectrogram::zeros(20, 100, 7.8125, 0.016);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(iterate_until_stable(&s, &TracerConfig::default(), &mut rng).is_empty());
    }

    #[test]
    fn thin_ridge_extent_is_one_bin() {
        let s = ridge_spec(30, 118, 12, 20, 70);
        let path = Path {
            points: (20..=70).map(|t| (t, 12)).collect(),
            magnitudes: vec![1.0; 51],
            time_res_s: 0.016,
        };
        let cands = propagate_frequency(&s, vec![path]);
        for ext in cands[0].freq_extent_per_frame() {
            assert_eq!((ext.low_bin, ext.high_bin), (12, 12));
        }
    }

    #[test]
    fn fully_nonzero_column_marks_point_failed() {
        let mut s = ridge_spec(10, 50, 4, 0, 49);
        for b in 0..10 {
            s.set(b, 25, 1.0);
        }
        let path = Path {
            points: vec![(24, 4), (25, 4), (26, 4)],
            magnitudes: vec![1.0; 3],
            time_res_s: 0.016,
        };
        let cands = propagate_frequency(&s, vec![path]);
        assert_eq!(cands[0].point_extents[0], Some((4, 4)));
        assert_eq!(cands[0].point_extents[1], None);
        assert_eq!(cands[0].point_extents[2], Some((4, 4)));
    }

    #[test]
    fn prune_drops_stray_points_and_keeps_the_ridge() {
        let time_res = 0.016;
        let mut points: Vec<(usize, usize)> = (10..=40).map(|t| (t, 5)).collect();
        points.push((50, 5)); // stray, 10 frames past the ridge
        let n = points.len();
        let cand = CandidateCall {
            path: Path {
                points,
                magnitudes: vec![1.0; n],
                time_res_s: time_res,
            },
            point_extents: vec![Some((5, 5)); n],
        };
        let pruned = prune(vec![cand], &TracerConfig::default());
        assert_eq!(pruned.len(), 1);
        assert_eq!(pruned[0].path.points.len(), 31);
        assert!(pruned[0].path.points.iter().all(|&(t, _)| t <= 40));
    }

    #[test]
    fn prune_of_all_failed_points_is_empty() {
        let cand = CandidateCall {
            path: Path {
                points: vec![(0, 1), (1, 1), (2, 1)],
                magnitudes: vec![1.0; 3],
                time_res_s: 0.016,
            },
            point_extents: vec![None; 3],
        };
        assert!(prune(vec![cand], &TracerConfig::default()).is_empty());
    }
}
