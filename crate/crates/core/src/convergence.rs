//! Richardson extrapolation over grids refined by a factor of two.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Theoretical order of the second-order discretizations.
pub const NOMINAL_ORDER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    /// Observed order `log2((q1 - q2) / (q2 - q3))` from the last three
    /// grids, when at least three are available and the differences are
    /// resolvable.
    pub order: Option<f64>,
}

/// Extrapolates a sequence computed on grids `h, h/2, h/4, ...`.
///
/// The limit is taken with the nominal order `p = 2`:
/// `q* = q_f + (q_f - q_c) / (2^p - 1)` from the two finest grids. A single
/// grid is returned unchanged.
pub fn richardson(values: &[f64]) -> Result<Extrapolation> {
    match values {
        [] => Err(Error::TooFewGrids(1)),
        [v] => Ok(Extrapolation {
            value: *v,
            order: None,
        }),
        _ => {
            let k = values.len();
            let (coarse, fine) = (values[k - 2], values[k - 1]);
            let factor = 2f64.powf(NOMINAL_ORDER) - 1.0;
            Ok(Extrapolation {
                value: fine + (fine - coarse) / factor,
                order: if k >= 3 {
                    observed_order(values[k - 3], coarse, fine)
                } else {
                    None
                },
            })
        }
    }
}

/// Observed order from three successive refinements, or `None` when the
/// differences are at roundoff or not monotone.
pub fn observed_order(q1: f64, q2: f64, q3: f64) -> Option<f64> {
    let d1 = q1 - q2;
    let d2 = q2 - q3;
    let floor = 64.0 * f64::EPSILON * q1.abs().max(q2.abs()).max(q3.abs()).max(1.0);
    if d1.abs() <= floor || d2.abs() <= floor || d1.signum() != d2.signum() {
        return None;
    }
    Some((d1 / d2).log2())
}

/// Observed order from error magnitudes on successively halved grids.
pub fn order_from_errors(e1: f64, e2: f64) -> Option<f64> {
    (e1 > 0.0 && e2 > 0.0).then(|| (e1 / e2).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_for_quadratic_error() {
        let f = |h: f64| 3.0 + 0.7 * h * h;
        let r = richardson(&[f(0.4), f(0.2), f(0.1)]).unwrap();
        assert_abs_diff_eq!(r.value, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.order.unwrap(), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(richardson(&[]).is_err());
        assert_eq!(richardson(&[1.5]).unwrap().order, None);
        assert_eq!(observed_order(1.0, 1.0, 1.0), None);
        assert_eq!(observed_order(1.0, 2.0, 1.5), None);
    }
}
