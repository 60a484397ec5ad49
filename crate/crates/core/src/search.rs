//! One-dimensional maximization: uniform coarse grid, then golden-section
//! refinement on the bracket around the best grid point.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` over `[lo, hi]`, returning `(x, f(x))`.
///
/// The objective need not be unimodal; the grid picks the basin and the
/// refinement assumes unimodality only inside one grid bracket. Endpoints are
/// always evaluated. Non-finite values are treated as infeasible.
pub(crate) fn maximize(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> Option<(f64, f64)> {
    if !(lo <= hi) {
        return None;
    }
    let score = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    if hi - lo <= tol {
        let v = score(lo);
        return v.is_finite().then_some((lo, v));
    }

    let n = points.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    let mut best_idx = 0;
    for i in 0..n {
        let x = if i == n - 1 { hi } else { lo + step * i as f64 };
        let v = score(x);
        if v > best.1 {
            best = (x, v);
            best_idx = i;
        }
    }
    if !best.1.is_finite() {
        return None;
    }

    let mut a = if best_idx == 0 {
        lo
    } else {
        lo + step * (best_idx - 1) as f64
    };
    let mut b = if best_idx + 1 >= n {
        hi
    } else {
        lo + step * (best_idx + 1) as f64
    };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = score(x1);
    let mut f2 = score(x2);
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = score(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = score(x2);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_peak() {
        let (x, v) = maximize(|x| -(x - 1.234_567).powi(2) + 3.0, 0.0, 10.0, 64, 1e-10).unwrap();
        assert!((x - 1.234_567).abs() < 1e-6);
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn finds_endpoint_peak() {
        let (x, _) = maximize(|x| x, 0.0, 2.0, 16, 1e-10).unwrap();
        assert_eq!(x, 2.0);
        let (x, _) = maximize(|x| -x, 0.0, 2.0, 16, 1e-10).unwrap();
        assert_eq!(x, 0.0);
    }

    #[test]
    fn picks_global_basin() {
        let f = |x: f64| (-(x - 1.0).powi(2)).exp() + 2.0 * (-(x - 8.0).powi(2) * 4.0).exp();
        let (x, _) = maximize(f, 0.0, 10.0, 128, 1e-10).unwrap();
        assert!((x - 8.0).abs() < 1e-4);
    }

    #[test]
    fn degenerate_and_infeasible() {
        assert_eq!(maximize(|x| x, 1.0, 1.0, 16, 1e-10), Some((1.0, 1.0)));
        assert_eq!(maximize(|x| x, 2.0, 1.0, 16, 1e-10), None);
        assert_eq!(maximize(|_| f64::NEG_INFINITY, 0.0, 1.0, 16, 1e-10), None);
    }
}
