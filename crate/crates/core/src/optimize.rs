//! One-dimensional golden-section search and grid-then-refine helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Best point found by a search; `value` is always an actual evaluation at `arg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchPoint {
    pub arg: f64,
    pub value: f64,
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`, stopping when
/// the bracket is narrower than `tol`. Returns the best evaluated point, so
/// the result never exceeds the true supremum of `f`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> SearchPoint {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut best = SearchPoint {
        arg: a,
        value: f(a),
    };
    let track = |x: f64, v: f64, best: &mut SearchPoint| {
        if v > best.value {
            *best = SearchPoint { arg: x, value: v };
        }
    };
    let fb = f(b);
    track(b, fb, &mut best);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    track(x1, f1, &mut best);
    track(x2, f2, &mut best);
    let tol = tol.max(f64::EPSILON * (a.abs() + b.abs()));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            track(x2, f2, &mut best);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            track(x1, f1, &mut best);
        }
    }
    best
}

/// Golden-section search for the minimum of `f` on `[lo, hi]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> SearchPoint {
    let p = golden_max(|x| -f(x), lo, hi, tol);
    SearchPoint {
        arg: p.arg,
        value: -p.value,
    }
}

/// Minimum of a convex function on `[0, 1]`: uniform grid of `grid_points`
/// followed by golden-section refinement on the cells around the best node.
pub fn convex_min_unit_interval<F: FnMut(f64) -> f64>(
    mut f: F,
    grid_points: usize,
    tol: f64,
) -> SearchPoint {
    let m = grid_points.max(3) - 1;
    let mut best = SearchPoint {
        arg: 0.0,
        value: f64::INFINITY,
    };
    let mut best_idx = 0;
    for k in 0..=m {
        let t = k as f64 / m as f64;
        let v = f(t);
        if v < best.value {
            best = SearchPoint { arg: t, value: v };
            best_idx = k;
        }
    }
    let lo = best_idx.saturating_sub(1) as f64 / m as f64;
    let hi = (best_idx + 1).min(m) as f64 / m as f64;
    let refined = golden_min(&mut f, lo, hi, tol);
    if refined.value < best.value {
        refined
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        let p = golden_max(|x| -(x - 0.3).powi(2) + 2.0, -1.0, 1.0, 1e-12);
        assert!((p.arg - 0.3).abs() < 1e-6);
        assert!((p.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_maximum_is_tracked() {
        let p = golden_max(|x| x, 0.0, 1.0, 1e-10);
        assert_eq!(p.value, 1.0);
    }

    #[test]
    fn convex_kink_minimum() {
        // max(1 - t, 4 - 3t, 4t): minimum 16/7 at t = 4/7.
        let f = |t: f64| (1.0 - t).max(4.0 - 3.0 * t).max(4.0 * t);
        let p = convex_min_unit_interval(f, 65, 1e-10);
        assert!((p.arg - 4.0 / 7.0).abs() < 1e-9);
        assert!((p.value - 16.0 / 7.0).abs() < 1e-9);
    }
}
