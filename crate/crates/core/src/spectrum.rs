//! Non-increasing non-negative sequences of singular values.

use crate::error::{Error, Result};

/// `s_1 ≥ s_2 ≥ … ≥ 0`. Indices past the stored length read as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    /// Validates that `values` is already non-increasing and non-negative.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spectrum entry {} = {} is not a finite non-negative number",
                k + 1,
                values[k]
            )));
        }
        if let Some(k) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!(
                "spectrum is not non-increasing at position {}",
                k + 1
            )));
        }
        Ok(Self { values })
    }

    /// Decreasing rearrangement `ξ*` of `|ξ|`.
    ///
    /// Non-finite entries sort last by `total_cmp`; callers feeding raw
    /// data should reject them first.
    pub fn from_unsorted(seq: &[f64]) -> Self {
        let mut values: Vec<f64> = seq.iter().map(|x| x.abs()).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `s_j` with 1-based `j`, zero beyond the stored length.
    pub fn get(&self, j: usize) -> f64 {
        assert!(j >= 1, "singular values are 1-indexed");
        self.values.get(j - 1).copied().unwrap_or(0.0)
    }

    /// `s_1`, or zero for an empty spectrum.
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Running sums `σ_n = Σ_{j≤n} s_j`, accumulated left to right.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.values
            .iter()
            .scan(0.0, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::from_unsorted(&self.values.iter().map(|v| v * alpha).collect::<Vec<_>>())
    }

    /// Copy zero-padded (or truncated) to `len` entries.
    pub fn padded(&self, len: usize) -> Self {
        let mut values = self.values.clone();
        values.resize(len, 0.0);
        Self { values }
    }
}

/// Absolute values sorted non-increasingly.
pub fn decreasing_rearrangement(seq: &[f64]) -> SingularSpectrum {
    SingularSpectrum::from_unsorted(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rearrangement_examples() {
        assert_eq!(
            decreasing_rearrangement(&[-2.0, 1.0, 3.0]).values(),
            &[3.0, 2.0, 1.0]
        );
        let sorted = [5.0, 4.0, 4.0, 0.5, 0.0];
        assert_eq!(decreasing_rearrangement(&sorted).values(), &sorted);
    }

    #[test]
    fn rearrangement_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let seq: Vec<f64> = (0..10).map(|_| rng.random_range(-5.0..5.0)).collect();
        // Selection sort on absolute values.
        let mut pool: Vec<f64> = seq.iter().map(|x| x.abs()).collect();
        let mut expected = Vec::new();
        while !pool.is_empty() {
            let (k, _) =
                pool.iter().enumerate().fold(
                    (0, f64::MIN),
                    |best, (i, &v)| if v > best.1 { (i, v) } else { best },
                );
            expected.push(pool.remove(k));
        }
        assert_eq!(decreasing_rearrangement(&seq).values(), expected.as_slice());
    }

    #[test]
    fn validating_constructor() {
        assert!(SingularSpectrum::new(vec![3.0, 2.0, 2.0, 0.0]).is_ok());
        assert!(SingularSpectrum::new(vec![1.0, 2.0]).is_err());
        assert!(SingularSpectrum::new(vec![1.0, -0.1]).is_err());
        assert!(SingularSpectrum::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn zero_padding() {
        let s = SingularSpectrum::new(vec![2.0, 1.0]).unwrap();
        assert_eq!(s.get(1), 2.0);
        assert_eq!(s.get(5), 0.0);
        assert_eq!(s.padded(4).values(), &[2.0, 1.0, 0.0, 0.0]);
        assert_eq!(s.partial_sums(), vec![2.0, 3.0]);
    }
}
