//! Bracketed bisection.

/// Width below which bisection stops.
pub const BISECTION_WIDTH: f64 = 1e-13;

/// Bisection on `[lo, hi]` given the sign of `f` just inside `lo`.
///
/// `sign_lo` is passed explicitly so brackets may start at a point where
/// `f` vanishes for a known reason (the trivial root at `a = 0`); `f(hi)`
/// must have the opposite sign. Returns `None` when it does not.
pub fn bisect_with_sign<F>(mut f: F, mut lo: f64, mut hi: f64, sign_lo: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return Some(hi);
    }
    if sign_lo == 0.0 || sign_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECTION_WIDTH * lo.abs().max(1.0) || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == sign_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Bisection on `[lo, hi]` when `f(lo)` and `f(hi)` have opposite signs.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return Some(lo);
    }
    bisect_with_sign(f, lo, hi, f_lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn rejects_same_sign() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0).is_none());
    }

    #[test]
    fn explicit_left_sign() {
        // sin has a trivial zero at 0; the sign just inside is positive
        let r = bisect_with_sign(f64::sin, 0.0, 4.0, 1.0).unwrap();
        assert!((r - std::f64::consts::PI).abs() < 1e-13);
    }
}
