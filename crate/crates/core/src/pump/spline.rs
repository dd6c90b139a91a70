/// Natural cubic spline through equally spaced knots. Outside the knot range
/// the boundary values are held.
#[derive(Clone, Debug, PartialEq)]
pub struct NaturalSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl NaturalSpline {
    /// Panics if fewer than two knots or a non-positive spacing are given.
    pub fn new(x0: f64, h: f64, y: &[f64]) -> Self {
        assert!(y.len() >= 2, "spline needs at least two knots");
        assert!(h > 0.0, "knot spacing must be positive");
        let n = y.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on M[i-1] + 4 M[i] + M[i+1] = 6 (second difference) / h^2.
            let inner = n - 2;
            let mut c_prime = vec![0.0; inner];
            let mut d_prime = vec![0.0; inner];
            for k in 0..inner {
                let i = k + 1;
                let rhs = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
                if k == 0 {
                    c_prime[k] = 1.0 / 4.0;
                    d_prime[k] = rhs / 4.0;
                } else {
                    let denom = 4.0 - c_prime[k - 1];
                    c_prime[k] = 1.0 / denom;
                    d_prime[k] = (rhs - d_prime[k - 1]) / denom;
                }
            }
            m[inner] = d_prime[inner - 1];
            for k in (0..inner - 1).rev() {
                m[k + 1] = d_prime[k] - c_prime[k] * m[k + 2];
            }
        }
        Self {
            x0,
            h,
            y: y.to_vec(),
            m,
        }
    }

    pub fn knots(&self) -> Vec<f64> {
        (0..self.y.len()).map(|i| self.x0 + i as f64 * self.h).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let s = (x - self.x0) / self.h;
        if s <= 0.0 {
            return self.y[0];
        }
        if s >= (n - 1) as f64 {
            return self.y[n - 1];
        }
        let nearest = s.round();
        if (s - nearest).abs() < 1e-9 {
            return self.y[nearest as usize];
        }
        let i = (s.floor() as usize).min(n - 2);
        let t = (s - i as f64) * self.h;
        let h = self.h;
        let (yi, yj, mi, mj) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let slope = (yj - yi) / h - h * (2.0 * mi + mj) / 6.0;
        yi + t * (slope + t * (mi / 2.0 + t * (mj - mi) / (6.0 * h)))
    }
}
