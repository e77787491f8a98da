//! Dense univariate polynomials, lowest degree first.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    /// The monomial `x - x0`.
    pub fn shifted_x(x0: f64) -> Self {
        Poly(vec![-x0, 1.0])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn integral(&self) -> Self {
        let mut out = vec![0.0];
        out.extend(self.0.iter().enumerate().map(|(k, c)| c / (k as f64 + 1.0)));
        Poly(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Poly::constant(1.0), |acc, _| &acc * self)
    }

    /// Coefficients of `p(x0 + y)` as a polynomial in `y`.
    pub fn taylor_shift(&self, x0: f64) -> Self {
        let mut c = self.0.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                c[j] += x0 * c[j + 1];
            }
        }
        Poly(c)
    }

    /// Coefficients of `p(y / s)` as a polynomial in `y`.
    pub fn scale_argument(&self, s: f64) -> Self {
        let mut f = 1.0;
        Poly(
            self.0
                .iter()
                .map(|c| {
                    let v = c * f;
                    f /= s;
                    v
                })
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        Poly(self.0.iter().map(|c| c * k).collect())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&0.0) + rhs.0.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}
