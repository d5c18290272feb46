//! Principal branch of the Lambert W function on `[0, inf)`.

use crate::error::{Error, Result};

const MAX_ITER: usize = 50;

/// `W(x)` for `x >= 0`: the unique `w >= 0` with `w e^w = x`.
///
/// Starts from `log x - log log x` above `e` and from Winitzki's
/// `log(1+x)`-based approximation below, then runs Halley steps.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!(
            "lambert_w0 is only defined here for x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = if x > std::f64::consts::E {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    } else {
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    };
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        w = next;
    }
    // Halley may stall one ulp away from the fixed point; accept if the
    // defining identity already holds to working precision.
    let residual = (w * w.exp() - x).abs();
    if residual <= 1e-12 * x.max(1.0) {
        Ok(w)
    } else {
        Err(Error::Numeric {
            method: "lambert_w0",
            detail: format!("no convergence at x = {x}: w = {w}, residual = {residual:e}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn newton_oracle(x: f64) -> f64 {
        let mut w = 0.5;
        for _ in 0..200 {
            let ew = f64::exp(w);
            w -= (w * ew - x) / (ew * (w + 1.0));
        }
        w
    }

    #[test]
    fn known_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        let w1 = lambert_w0(1.0).unwrap();
        assert!((w1 - 0.567_143_290_409_784).abs() < 1e-14);
        assert!((w1 - newton_oracle(1.0)).abs() < 1e-14);
    }

    #[test]
    fn negative_argument_rejected() {
        assert!(lambert_w0(-0.1).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn identity_on_log_grid() {
        for i in 0..=200 {
            let x = 10f64.powf(-8.0 + 20.0 * i as f64 / 200.0);
            let w = lambert_w0(x).unwrap();
            assert!(w >= 0.0);
            let r = (w * w.exp() - x).abs();
            assert!(r <= 1e-12 * x.max(1.0), "x = {x}, residual {r:e}");
        }
    }
}
