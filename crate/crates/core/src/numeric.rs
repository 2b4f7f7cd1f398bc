//! Small numerical helpers: grids, least-squares slopes, monotone bisection.

/// `m` points geometrically spaced from `a` to `b` inclusive.
pub fn logspace(a: f64, b: f64, m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..m)
        .map(|i| {
            if i + 1 == m {
                b
            } else if i == 0 {
                a
            } else {
                (la + (lb - la) * i as f64 / (m - 1) as f64).exp()
            }
        })
        .collect()
}

/// Least-squares line `y = slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Largest `t ≥ 0` with `pred(t)` true, for a predicate that holds on an
/// initial segment `[0, t*]` or `[0, t*)`. Returns `f64::INFINITY` when the
/// predicate never fails below `1e300`, and `0` when it fails above `1e-300`.
pub fn sup_of_segment<P: Fn(f64) -> bool>(pred: P) -> f64 {
    let (mut lo, mut hi);
    if pred(1.0) {
        lo = 1.0;
        hi = 2.0;
        while pred(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
    } else {
        hi = 1.0;
        lo = 0.5;
        while !pred(lo) {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return 0.0;
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logspace_endpoints_exact() {
        let g = logspace(1e-3, 1e3, 7);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[6], 1e3);
        assert!((g[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn slope_of_power() {
        let x = logspace(1e-2, 1e2, 9);
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t.powf(1.7)).collect();
        assert!((loglog_slope(&x, &y) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn segment_sup() {
        let t = sup_of_segment(|t| t * t <= 2.0);
        assert!((t - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(sup_of_segment(|_| true), f64::INFINITY);
        assert_eq!(sup_of_segment(|t| t <= 0.0), 0.0);
    }
}
