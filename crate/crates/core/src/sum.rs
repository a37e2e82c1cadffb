//! Compensated floating-point accumulation.

use std::iter::Sum;

/// Neumaier's variant of Kahan summation.
///
/// The result depends only on the order in which terms are added, so a
/// fixed iteration order gives bit-identical totals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, carry: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.carry += (self.sum - t) + term;
        } else {
            self.carry += (term - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl Sum<f64> for CompensatedSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for t in iter {
            acc.add(t);
        }
        acc
    }
}

/// Compensated sum of an iterator of terms, in iteration order.
pub fn compensated<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().sum::<CompensatedSum>().value()
}
