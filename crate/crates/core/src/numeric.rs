//! Log-space arithmetic shared by the analytic bounds.

/// `ln(e^a + e^b)` without overflow; either argument may be `-inf`.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(1 - e^x)` for `x <= 0`, accurate on both ends.
pub fn ln_one_minus_exp(x: f64) -> f64 {
    debug_assert!(x <= 0.0);
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `count * ln_x`, with `0 * -inf` taken as zero (`x^0 = 1` even for `x = 0`).
#[inline]
pub fn ln_pow(ln_x: f64, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * ln_x
    }
}

/// Table of `ln C(n, j)` for `j = 0..=n`.
pub fn ln_binomial_row(n: usize) -> Vec<f64> {
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, m| {
            *acc += (m as f64).ln();
            Some(*acc)
        }))
        .collect();
    (0..=n)
        .map(|j| ln_fact[n] - ln_fact[j] - ln_fact[n - j])
        .collect()
}

/// Streaming `ln Σ e^{x_i}` with a rescaled, Neumaier-compensated linear sum.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
    comp: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
            comp: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, ln_x: f64) {
        if ln_x == f64::NEG_INFINITY {
            return;
        }
        if ln_x > self.max {
            let scale = (self.max - ln_x).exp();
            self.sum *= scale;
            self.comp *= scale;
            self.max = ln_x;
        }
        let v = (ln_x - self.max).exp();
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn ln_value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + (self.sum + self.comp).ln()
        }
    }

    pub fn value(&self) -> f64 {
        self.ln_value().exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_exp_handles_infinities() {
        assert_eq!(
            ln_add_exp(f64::NEG_INFINITY, f64::NEG_INFINITY),
            f64::NEG_INFINITY
        );
        assert_eq!(ln_add_exp(f64::NEG_INFINITY, 1.5), 1.5);
        assert!((ln_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn one_minus_exp_small_and_large() {
        assert!((ln_one_minus_exp(-1e-20) - (1e-20f64).ln()).abs() < 1e-12);
        assert!((ln_one_minus_exp(-50.0) - (-(-50f64).exp())).abs() < 1e-30);
        assert_eq!(ln_one_minus_exp(0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn binomial_row_matches_pascal() {
        let row = ln_binomial_row(10);
        let exact = [
            1.0, 10.0, 45.0, 120.0, 210.0, 252.0, 210.0, 120.0, 45.0, 10.0, 1.0,
        ];
        for (l, e) in row.iter().zip(exact) {
            assert!((l.exp() - e).abs() < 1e-9 * e);
        }
    }

    #[test]
    fn logsumexp_wide_dynamic_range() {
        let mut acc = LogSumExp::new();
        for x in [-800.0, -700.0, -700.0, f64::NEG_INFINITY] {
            acc.push(x);
        }
        let expected = -700.0 + (2.0 + (-100f64).exp()).ln();
        assert!((acc.ln_value() - expected).abs() < 1e-13);
        assert_eq!(LogSumExp::new().value(), 0.0);
    }
}
