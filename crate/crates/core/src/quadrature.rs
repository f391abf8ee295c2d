//! Composite quadrature on sampled data.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// True when only one interval was available and the trapezoid rule
    /// was used.
    pub trapezoid_panel: bool,
}

fn simpson_sum(y: &[f64], h: f64) -> f64 {
    let m = y.len() - 1;
    debug_assert!(m.is_multiple_of(2));
    if m == 0 {
        return 0.0;
    }
    let mut odd_sum = 0.0;
    let mut even_sum = 0.0;
    for (i, v) in y.iter().enumerate().take(m).skip(1) {
        if i % 2 == 1 {
            odd_sum += v;
        } else {
            even_sum += v;
        }
    }
    h / 3.0 * (y[0] + 4.0 * odd_sum + 2.0 * even_sum + y[m])
}

/// Composite Simpson rule over equally spaced samples `y[0..=m]`.
///
/// For an odd interval count `m >= 3` the first `m - 3` intervals use
/// Simpson's rule and the last three use Simpson's 3/8 rule, so the result
/// is fourth-order for every `m >= 2`. A single interval falls back to the
/// trapezoid rule and is flagged; zero intervals integrate to exactly zero.
pub fn simpson_uniform(y: &[f64], h: f64) -> Quadrature {
    let m = y.len().saturating_sub(1);
    match m {
        0 => Quadrature {
            value: 0.0,
            trapezoid_panel: false,
        },
        1 => Quadrature {
            value: 0.5 * h * (y[0] + y[1]),
            trapezoid_panel: true,
        },
        _ if m.is_multiple_of(2) => Quadrature {
            value: simpson_sum(y, h),
            trapezoid_panel: false,
        },
        _ => {
            let tail = &y[m - 3..];
            let three_eighths = 3.0 * h / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3]);
            Quadrature {
                value: simpson_sum(&y[..=m - 3], h) + three_eighths,
                trapezoid_panel: false,
            }
        }
    }
}

/// Trapezoid rule over arbitrary (sorted) abscissae.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> (Vec<f64>, f64) {
        let h = (b - a) / m as f64;
        ((0..=m).map(|i| f(a + i as f64 * h)).collect(), h)
    }

    #[test]
    fn exact_for_cubics() {
        let (y, h) = samples(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 10);
        let q = simpson_uniform(&y, h);
        assert!(!q.trapezoid_panel);
        assert!((q.value - (4.0 - 4.0 + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn odd_interval_count_uses_three_eighths_tail() {
        for m in [3, 5, 11] {
            let (y, h) = samples(|x| x * x * x - x, 0.0, 2.0, m);
            let q = simpson_uniform(&y, h);
            assert!(!q.trapezoid_panel);
            assert!((q.value - 2.0).abs() < 1e-13, "m={m}: {}", q.value);
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(simpson_uniform(&[3.0], 0.1).value, 0.0);
        assert_eq!(simpson_uniform(&[], 0.1).value, 0.0);
        let q = simpson_uniform(&[1.0, 3.0], 0.5);
        assert!(q.trapezoid_panel);
        assert_eq!(q.value, 1.0);
    }

    #[test]
    fn fourth_order_convergence() {
        let exact = 1.0 - 1.0f64.cos();
        let err = |m| {
            let (y, h) = samples(f64::sin, 0.0, 1.0, m);
            (simpson_uniform(&y, h).value - exact).abs()
        };
        let ratio = err(16) / err(32);
        assert!(ratio > 15.0 && ratio < 17.0, "{ratio}");
        // odd counts stay fourth order: same error scale as the even neighbours
        for m in [17, 33] {
            assert!(err(m) < 2.0 * err(m - 1), "m={m}");
        }
    }

    #[test]
    fn trapezoid_nonuniform() {
        let x = [0.0, 0.1, 0.5, 1.0];
        let y = [1.0, 1.0, 1.0, 1.0];
        assert!((trapezoid(&x, &y) - 1.0).abs() < 1e-15);
        let y2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!((trapezoid(&x, &y2) - 1.0).abs() < 1e-15);
    }
}
