//! Ordinary least-squares line fits.

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 for exact fits or two points).
    pub slope_stderr: f64,
    pub points: usize,
}

/// Fits `y = slope·x + intercept`. Returns `None` for fewer than two points or
/// a degenerate abscissa.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let sse: f64 = xs[..n]
            .iter()
            .zip(&ys[..n])
            .map(|(x, y)| {
                let r = y - (slope * x + intercept);
                r * r
            })
            .sum();
        math::sqrt(sse / (nf - 2.0) / sxx)
    } else {
        0.0
    };
    Some(LineFit { slope, intercept, slope_stderr, points: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let f = line_fit(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15);
        assert!((f.intercept - 1.0).abs() < 1e-15);
        assert!(f.slope_stderr < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(line_fit(&[1.0], &[2.0]).is_none());
        assert!(line_fit(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }
}
