//! Sample mean and standard error.

/// Mean of a sample with the standard error of that mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanSe {
    /// Uses the unbiased sample variance. A single observation has zero
    /// standard error; an empty sample has NaN mean.
    pub fn of<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let xs: Vec<f64> = values.into_iter().collect();
        let n = xs.len();
        if n == 0 {
            return MeanSe {
                mean: f64::NAN,
                se: f64::NAN,
                n,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return MeanSe { mean, se: 0.0, n };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        MeanSe {
            mean,
            se: (var / n as f64).sqrt(),
            n,
        }
    }
}
