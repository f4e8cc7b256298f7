//! Compensated summation used wherever floating-point means must be
//! insensitive to accumulation order.

/// Running sum with Neumaier compensation.
///
/// Reordering inputs changes the total by at most a couple of ulps, which is
/// what lets parallel and sequential reductions agree.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum in, keeping its compensation term.
    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
