//! Ordinary least squares for a straight line.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    /// `y_i - (slope·x_i + intercept)` in input order.
    pub residuals: Vec<f64>,
}

/// Fits `y = slope·x + intercept`. Needs at least two distinct `x`; standard
/// errors are NaN with fewer than three points.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - slope * a - intercept).collect();
    let (slope_stderr, intercept_stderr) = if n > 2 {
        let s2 = residuals.iter().map(|r| r * r).sum::<f64>() / (nf - 2.0);
        let sumx2: f64 = x.iter().map(|a| a * a).sum();
        ((s2 / sxx).sqrt(), (s2 * sumx2 / (nf * sxx)).sqrt())
    } else {
        (f64::NAN, f64::NAN)
    };
    Some(LinearFit {
        slope,
        intercept,
        slope_stderr,
        intercept_stderr,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 0.25 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 0.25).abs() < 1e-15);
        assert!((f.intercept + 1.0).abs() < 1e-15);
        assert!(f.slope_stderr < 1e-15);
    }

    #[test]
    fn stderr_matches_hand_computation() {
        // residuals ±0.1 alternate around y = x
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [0.1, 0.9, 2.1, 2.9];
        let f = linear_fit(&x, &y).unwrap();
        let sxx = 5.0;
        let s2 = f.residuals.iter().map(|r| r * r).sum::<f64>() / 2.0;
        assert!((f.slope_stderr - (s2 / sxx).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_fit(&[1.0], &[1.0]).is_none());
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 2.0]).is_none());
    }
}
