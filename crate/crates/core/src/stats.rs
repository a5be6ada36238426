//! Small numeric helpers shared by the predictor, ensembles and reports.

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Divisor used for standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StdDevKind {
    /// Divide by `N`.
    #[default]
    Population,
    /// Divide by `N - 1`; falls back to 0 for a single value.
    Sample,
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(values.iter().copied().collect::<NeumaierSum>().total() / values.len() as f64)
}

/// Median; for an even count the mean of the middle two values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    })
}

pub fn std_dev(values: &[f64], kind: StdDevKind) -> Option<f64> {
    let m = mean(values)?;
    let ss = values.iter().map(|x| (x - m) * (x - m)).collect::<NeumaierSum>().total();
    let divisor = match kind {
        StdDevKind::Population => values.len(),
        StdDevKind::Sample if values.len() > 1 => values.len() - 1,
        StdDevKind::Sample => return Some(0.0),
    };
    Some((ss / divisor as f64).sqrt())
}

/// Mean, median and standard deviation of one column of values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
}

impl Summary {
    pub fn of(values: &[f64], kind: StdDevKind) -> Option<Self> {
        Some(Summary {
            mean: mean(values)?,
            median: median(values)?,
            std_dev: std_dev(values, kind)?,
        })
    }
}

/// Running mean and sum of squared deviations (Welford), mergeable across
/// independently sampled streams.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Count-weighted pooling of two accumulators.
    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 += other.m2 + delta * delta * (self.count as f64 * other.count as f64) / total as f64;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance (`N - 1` divisor).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}
