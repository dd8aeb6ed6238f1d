//! Golden-section search for convex functions of one variable.

use crate::error::{Result, TroError};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimize `f` on `[a, b]` until the bracket is narrower than `tol`; returns
/// the final midpoint and its value. Ties keep the left sub-interval, so flat
/// minima resolve to their leftmost part.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Like [`golden_section`] but also evaluates the bracket ends and fails when
/// an interior value rises above the chord of the current bracket, which a
/// convex function cannot do.
pub fn golden_section_checked(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
    slack: f64,
) -> Result<(f64, f64, usize)> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iters = 0;
    let mut trace: Vec<String> = Vec::new();
    let chord_ok = |a: f64, fa: f64, b: f64, fb: f64, x: f64, fx: f64| {
        let w = if b > a { (x - a) / (b - a) } else { 0.5 };
        fx <= (1.0 - w) * fa + w * fb + slack
    };
    while b - a > tol {
        iters += 1;
        if trace.len() >= 8 {
            trace.remove(0);
        }
        trace.push(format!("[{a}, {b}] f=({fa}, {fc}, {fd}, {fb})"));
        if !chord_ok(a, fa, b, fb, c, fc) || !chord_ok(a, fa, b, fb, d, fd) {
            return Err(TroError::BracketingFailure { trace: trace.join("; ") });
        }
        if fc <= fd {
            b = d;
            fb = fd;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            fa = fc;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        if c >= d {
            break;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?, iters))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        // a smooth minimum is only resolvable to about √ε in x
        let (x, v) = golden_section(|x| (x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn flat_bottom_resolves_left() {
        let (x, _) = golden_section(|x: f64| (x.abs() - 1.0).max(0.0), -4.0, 4.0, 1e-9);
        assert!((x + 1.0).abs() < 1e-6, "{x}");
    }

    #[test]
    fn detects_non_convexity() {
        let f = |x: f64| Ok((3.0 * x).sin());
        assert!(matches!(
            golden_section_checked(f, 0.0, 10.0, 1e-8, 1e-12),
            Err(TroError::BracketingFailure { .. })
        ));
    }
}
