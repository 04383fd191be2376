//! Second-order differences matching the solver: central inside, one-sided at both ends.

/// First derivative; `f` needs at least three samples.
pub(crate) fn first_derivative(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let h = 0.5 / dx;
    let mut out = Vec::with_capacity(n);
    out.push((4.0 * (f[1] - f[0]) - (f[2] - f[0])) * h);
    out.extend(f.windows(3).map(|w| (w[2] - w[0]) * h));
    out.push((4.0 * (f[n - 1] - f[n - 2]) - (f[n - 1] - f[n - 3])) * h);
    out
}

/// First derivative at the left end only.
pub(crate) fn first_derivative_at_start(f: &[f64], dx: f64) -> f64 {
    (4.0 * (f[1] - f[0]) - (f[2] - f[0])) * (0.5 / dx)
}

/// Second derivative; four-point one-sided rows keep the ends second order. Needs four samples.
pub(crate) fn second_derivative(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let k = 1.0 / (dx * dx);
    let mut out = Vec::with_capacity(n);
    out.push((2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * k);
    out.extend(f.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]) * k));
    out.push((2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * k);
    out
}

/// Trapezoid rule on a uniform grid.
pub(crate) fn trapezoid(f: impl ExactSizeIterator<Item = f64>, dx: f64) -> f64 {
    let n = f.len();
    let mut sum = 0.0;
    for (i, x) in f.enumerate() {
        sum += if i == 0 || i + 1 == n { 0.5 * x } else { x };
    }
    sum * dx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(n: usize, dx: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|i| f(i as f64 * dx)).collect()
    }

    #[test]
    fn test_quadratics_are_differentiated_exactly() {
        let dx = 0.1;
        let f = samples(12, dx, |x| 3.0 * x * x - x + 2.0);
        for (i, d) in first_derivative(&f, dx).iter().enumerate() {
            assert!((d - (6.0 * i as f64 * dx - 1.0)).abs() < 1e-11);
        }
        assert!(second_derivative(&f, dx)
            .iter()
            .all(|d| (d - 6.0).abs() < 1e-9));
    }

    #[test]
    fn test_cubic_second_derivative_is_exact() {
        let dx = 0.2;
        let f = samples(10, dx, |x| x * x * x);
        for (i, d) in second_derivative(&f, dx).iter().enumerate() {
            assert!((d - 6.0 * i as f64 * dx).abs() < 1e-9, "{i}");
        }
    }

    #[test]
    fn test_ends_converge_at_second_order() {
        let err = |n: usize| {
            let dx = 1.0 / (n - 1) as f64;
            let f = samples(n, dx, f64::sin);
            let d1 = first_derivative(&f, dx);
            let d2 = second_derivative(&f, dx);
            (
                (d1[0] - 1.0).abs().max((d1[n - 1] - 1f64.cos()).abs()),
                (d2[n - 1] + 1f64.sin()).abs(),
            )
        };
        let (a, b) = (err(21), err(41));
        assert!((a.0 / b.0).log2() > 1.9 && (a.1 / b.1).log2() > 1.9);
        assert_eq!(
            first_derivative_at_start(&samples(5, 0.3, f64::exp), 0.3),
            first_derivative(&samples(5, 0.3, f64::exp), 0.3)[0]
        );
    }

    #[test]
    fn test_trapezoid_is_exact_for_linear() {
        let f = samples(11, 0.1, |x| 2.0 * x + 1.0);
        assert!((trapezoid(f.into_iter(), 0.1) - 2.0).abs() < 1e-14);
    }
}
