//! Spectrogram cleanup: drop the weakest 80% of cells, then iteratively
//! clear data islands with the weakest-neighborhood rule.

use serde::{Deserialize, Serialize};

use crate::spectrogram::Spectrogram;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessParams {
    /// Fraction of cells (by ascending magnitude) zeroed before cleaning.
    pub discard_fraction: f64,
    /// Cap on cleaning passes; `None` runs to the fixpoint.
    pub max_passes: Option<usize>,
}

impl Default for PreprocessParams {
    fn default() -> Self {
        PreprocessParams {
            discard_fraction: 0.8,
            max_passes: None,
        }
    }
}

/// The magnitude at ascending-sorted index `floor(fraction * N)`.
///
/// This is the segmentation threshold actually applied by
/// [`threshold_weakest`]; it is also exported as feature f7.
pub fn weakest_value(spec: &Spectrogram, fraction: f64) -> f64 {
    assert!((0.0..1.0).contains(&fraction));
    if spec.mag.is_empty() {
        return 0.0;
    }
    let mut sorted = spec.mag.clone();
    sorted.sort_by(f64::total_cmp);
    sorted[(fraction * sorted.len() as f64).floor() as usize]
}

/// Zero every cell strictly below the `fraction` percentile value.
///
/// Cells that tie with the threshold survive, so a constant matrix passes
/// through unchanged.
pub fn threshold_weakest(spec: &Spectrogram, fraction: f64) -> Spectrogram {
    let v = weakest_value(spec, fraction);
    let mut out = spec.clone();
    for cell in &mut out.mag {
        if *cell < v {
            *cell = 0.0;
        }
    }
    out
}

/// One synchronous cleaning pass: every non-edge nonzero cell with fewer
/// than 4 nonzero 8-neighbors (counted in the input matrix) becomes zero.
/// Edge rows and columns are never modified.
pub fn clear_data_islands(spec: &Spectrogram) -> Spectrogram {
    let mut out = spec.clone();
    if spec.n_bins < 3 || spec.n_frames < 3 {
        return out;
    }
    for bin in 1..spec.n_bins - 1 {
        for frame in 1..spec.n_frames - 1 {
            if spec.at(bin, frame) == 0.0 {
                continue;
            }
            let mut live_neighbors = 0;
            for db in -1i64..=1 {
                for df in -1i64..=1 {
                    if db == 0 && df == 0 {
                        continue;
                    }
                    let b = (bin as i64 + db) as usize;
                    let f = (frame as i64 + df) as usize;
                    if spec.at(b, f) > 0.0 {
                        live_neighbors += 1;
                    }
                }
            }
            if live_neighbors < 4 {
                out.set(bin, frame, 0.0);
            }
        }
    }
    out
}

/// Repeat [`clear_data_islands`] until a pass changes nothing, or until
/// `max_passes` is hit.
pub fn weakest_neighborhood(spec: &Spectrogram, params: &PreprocessParams) -> Spectrogram {
    let mut current = spec.clone();
    let mut pass = 0;
    loop {
        if let Some(limit) = params.max_passes {
            if pass >= limit {
                return current;
            }
        }
        let next = clear_data_islands(&current);
        pass += 1;
        if next == current {
            return next;
        }
        current = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n_bins: usize, n_frames: usize, values: &[f64]) -> Spectrogram {
        let mut s = Spectrogram::zeros(n_bins, n_frames, 1.0, 1.0);
        s.mag.copy_from_slice(values);
        s
    }

    fn random_spec(rng: &mut ChaCha8Rng, n: usize, sparsity: f64) -> Spectrogram {
        let mut s = Spectrogram::zeros(n, n, 1.0, 1.0);
        for cell in &mut s.mag {
            if rng.gen_bool(sparsity) {
                *cell = rng.gen_range(0.01..10.0);
            }
        }
        s
    }

    #[test]
    fn fraction_zero_is_identity() {
        let s = grid(2, 3, &[3.0, 0.0, 1.0, 5.0, 2.0, 4.0]);
        assert_eq!(threshold_weakest(&s, 0.0), s);
    }

    #[test]
    fn ten_values_at_eighty_percent() {
        let s = grid(2, 5, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]);
        let out = threshold_weakest(&s, 0.8);
        // sorted index floor(0.8 * 10) = 8 -> threshold 9; 1..8 zeroed
        assert_eq!(out.mag, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 9.0, 10.0]);
    }

    #[test]
    fn constant_matrix_survives_thresholding() {
        let s = grid(3, 3, &[2.0; 9]);
        assert_eq!(threshold_weakest(&s, 0.8), s);
    }

    #[test]
    fn sort_oracle_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let s = random_spec(&mut rng, 16, 0.7);
            let out = threshold_weakest(&s, 0.8);
            let v = weakest_value(&s, 0.8);
            for (i, (&a, &b)) in s.mag.iter().zip(&out.mag).enumerate() {
                if a < v {
                    assert_eq!(b, 0.0, "cell {i} below threshold must be zeroed");
                } else {
                    assert_eq!(b, a, "cell {i} at/above threshold must survive");
                }
            }
        }
    }

    #[test]
    fn lone_interior_cell_is_cleared() {
        let mut s = Spectrogram::zeros(5, 5, 1.0, 1.0);
        s.set(2, 2, 7.0);
        let out = clear_data_islands(&s);
        assert_eq!(out.at(2, 2), 0.0);
    }

    #[test]
    fn saturated_matrix_is_stable() {
        let s = grid(4, 4, &[1.0; 16]);
        assert_eq!(clear_data_islands(&s), s);
        assert_eq!(weakest_neighborhood(&s, &Default::default()), s);
    }

    #[test]
    fn zero_matrix_converges_immediately() {
        let s = Spectrogram::zeros(8, 8, 1.0, 1.0);
        assert_eq!(weakest_neighborhood(&s, &Default::default()), s);
    }

    #[test]
    fn diagonal_pair_dies_within_two_passes() {
        let mut s = Spectrogram::zeros(6, 6, 1.0, 1.0);
        s.set(2, 2, 1.0);
        s.set(3, 3, 1.0);
        let out = weakest_neighborhood(
            &s,
            &PreprocessParams {
                discard_fraction: 0.8,
                max_passes: Some(2),
            },
        );
        assert_eq!(out.nonzero_count(), 0);
    }

    #[test]
    fn fixpoint_is_idempotent_and_shrinking() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let s = random_spec(&mut rng, 12, 0.4);
            let cleaned = weakest_neighborhood(&s, &Default::default());
            assert_eq!(clear_data_islands(&cleaned), cleaned, "not a fixpoint");
            for (a, b) in s.mag.iter().zip(&cleaned.mag) {
                assert!(*a != 0.0 || *b == 0.0, "support grew");
            }
        }
    }

    #[test]
    fn edges_are_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_spec(&mut rng, 10, 0.3);
        let cleaned = weakest_neighborhood(&s, &Default::default());
        for i in 0..10 {
            assert_eq!(cleaned.at(0, i), s.at(0, i));
            assert_eq!(cleaned.at(9, i), s.at(9, i));
            assert_eq!(cleaned.at(i, 0), s.at(i, 0));
            assert_eq!(cleaned.at(i, 9), s.at(i, 9));
        }
    }
}
