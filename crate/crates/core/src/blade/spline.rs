/// Monotonicity-preserving piecewise cubic Hermite interpolant.
///
/// Interior slopes are weighted harmonic means of the neighbouring secants
/// (zero at local extrema); end slopes use the shape-preserving three-point
/// formula. Two knots give the straight line.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SplineError {
    #[error("need at least two knots with matching values (got {knots} knots, {values} values)")]
    TooFew { knots: usize, values: usize },
    #[error("knots must be finite and strictly increasing (violated at index {0})")]
    NotIncreasing(usize),
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

impl MonotoneCubic {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self, SplineError> {
        if x.len() < 2 || x.len() != y.len() {
            return Err(SplineError::TooFew {
                knots: x.len(),
                values: y.len(),
            });
        }
        for i in 0..x.len() {
            if !x[i].is_finite() || !y[i].is_finite() || (i > 0 && !(x[i] > x[i - 1])) {
                return Err(SplineError::NotIncreasing(i));
            }
        }
        let m = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..m - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut slopes = vec![0.0; m];
        if m == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
        } else {
            for k in 1..m - 1 {
                let (a, b) = (delta[k - 1], delta[k]);
                if a * b > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    slopes[k] = (w1 + w2) / (w1 / a + w2 / b);
                }
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[m - 1] = end_slope(h[m - 2], h[m - 3], delta[m - 2], delta[m - 3]);
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            slopes,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    /// Evaluates inside the knot range; outside it the end cubic is
    /// continued.
    pub fn eval(&self, t: f64) -> f64 {
        let m = self.x.len();
        let k = match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => return self.y[i],
            Err(i) => i.clamp(1, m - 1) - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        // h00 = 1 - h01; this form keeps flat segments exactly flat
        self.y[k] + h01 * (self.y[k + 1] - self.y[k]) + h * (h10 * self.slopes[k] + h11 * self.slopes[k + 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_exactly() {
        let x = [0.0, 0.2, 0.45, 0.7, 1.0];
        let y = [3.0, 2.1, 2.0, 1.2, 0.4];
        let s = MonotoneCubic::new(&x, &y).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert_eq!(s.eval(*a), *b);
        }
    }

    #[test]
    fn constant_stays_constant() {
        let s = MonotoneCubic::new(&[0.0, 0.3, 0.5, 1.0], &[2.5; 4]).unwrap();
        for i in 0..=50 {
            assert_eq!(s.eval(i as f64 / 50.0), 2.5);
        }
    }

    #[test]
    fn linear_data_reproduced() {
        let x = [0.0, 0.1, 0.35, 0.6, 1.0];
        let f = |t: f64| 1.5 - 0.8 * t;
        let y: Vec<f64> = x.iter().map(|t| f(*t)).collect();
        let s = MonotoneCubic::new(&x, &y).unwrap();
        for w in x.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            assert!((s.eval(mid) - f(mid)).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_data_has_no_overshoot() {
        let x = [0.0, 0.1, 0.2, 0.8, 1.0];
        let y = [0.0, 0.0, 1.0, 1.0, 5.0];
        let s = MonotoneCubic::new(&x, &y).unwrap();
        let mut prev = f64::MIN;
        for i in 0..=1000 {
            let v = s.eval(i as f64 / 1000.0);
            assert!(v >= prev - 1e-14);
            prev = v;
        }
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(MonotoneCubic::new(&[0.0, 0.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(MonotoneCubic::new(&[0.0], &[1.0]).is_err());
        assert!(MonotoneCubic::new(&[1.0, 0.5], &[1.0, 2.0]).is_err());
    }
}
