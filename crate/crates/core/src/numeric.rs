//! Small floating-point helpers shared across modules.

/// `log Σ exp(x_i)`, shifted by the maximum. Returns `-inf` for empty input.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut acc = NeumaierSum::default();
    for &x in xs {
        acc.add((x - max).exp());
    }
    max + acc.total().ln()
}

/// Compensated (Kahan–Babuška–Neumaier) summation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    #[inline]
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

/// `ln C(n, k)` via `ln Γ`, accurate to a few ulps for the sizes used here.
pub(crate) struct LogFactorials(Vec<f64>);

impl LogFactorials {
    pub fn new(n: usize) -> Self {
        let mut v = Vec::with_capacity(n + 1);
        let mut acc = NeumaierSum::default();
        v.push(0.0);
        for k in 1..=n {
            acc.add((k as f64).ln());
            v.push(acc.total());
        }
        Self(v)
    }

    #[inline]
    pub fn ln_choose(&self, n: usize, k: usize) -> f64 {
        self.0[n] - self.0[k] - self.0[n - k]
    }
}
