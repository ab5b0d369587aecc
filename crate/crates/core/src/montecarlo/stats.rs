/// Streaming mean and variance (Welford), mergeable with Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let d = other.mean - self.mean;
        self.mean += d * nb / n;
        self.m2 += other.m2 + d * d * na * nb / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; NaN below two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Standard error of the grand mean from per-batch means, weighting each
/// batch by its size. Valid when batches are independent, as with one
/// Markov chain per batch.
pub fn batch_means_std_error(batches: &[RunningStats]) -> f64 {
    let b = batches.len();
    if b < 2 {
        return f64::NAN;
    }
    let total: f64 = batches.iter().map(|s| s.count() as f64).sum();
    let grand: f64 = batches.iter().map(|s| s.count() as f64 * s.mean()).sum::<f64>() / total;
    let ss: f64 = batches
        .iter()
        .map(|s| {
            let w = s.count() as f64 / total;
            w * w * (s.mean() - grand).powi(2)
        })
        .sum();
    (ss * b as f64 / (b - 1) as f64).sqrt()
}

/// Two-sided 95% normal-approximation interval for a binomial proportion,
/// widened by the continuity correction and clipped to `[0, 1]`.
pub fn binomial_interval(successes: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let n = total as f64;
    let p = successes as f64 / n;
    let half = 1.959_963_984_540_054 * (p * (1.0 - p) / n).sqrt() + 0.5 / n;
    ((p - half).max(0.0), (p + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1 + 1e6).collect();
        let mut s = RunningStats::new();
        xs.iter().for_each(|&x| s.push(x));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((s.mean() - mean).abs() < 1e-9);
        assert!((s.variance() - var).abs() < 1e-8 * var);
    }

    #[test]
    fn merge_equals_single_pass() {
        let xs: Vec<f64> = (0..500).map(|i| (i as f64).sin()).collect();
        let mut all = RunningStats::new();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = RunningStats::new();
        let mut b = RunningStats::new();
        xs[..123].iter().for_each(|&x| a.push(x));
        xs[123..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.count(), all.count());
        assert!((a.mean() - all.mean()).abs() < 1e-15);
        assert!((a.variance() - all.variance()).abs() < 1e-14);
    }

    #[test]
    fn batch_means_of_iid_batches() {
        let mut batches = Vec::new();
        for b in 0..4 {
            let mut s = RunningStats::new();
            s.push(b as f64);
            s.push(b as f64);
            batches.push(s);
        }
        // means 0,1,2,3 with equal weights: var of means 5/3, SE = sqrt(5/3 / 4)
        let se = batch_means_std_error(&batches);
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn interval_contains_fraction() {
        for (k, n) in [(0, 10), (10, 10), (914, 1000), (1, 3)] {
            let (lo, hi) = binomial_interval(k, n);
            let p = k as f64 / n as f64;
            assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
        }
    }
}
