//! A C² decreasing bridge on `[0, 1]` with prescribed boundary data.
//!
//! `f = 1 + ∫g - A Φ`, where `g` is the C¹ glue `P | 0 | Q`, `Φ' = φ` with
//! `φ(s) = 30 s² (1-s)²`, and `A = 1 + ∫g` fixes `f(1) = 0`.

use crate::error::{domain, Result};
use crate::poly::Poly;

const MAX_HALVINGS: usize = 64;

/// Boundary data `f'(0) = a`, `f'(1) = b`, `f''(0) = alpha`, `f''(1) = beta`,
/// with the junction width and the constructed cubics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReattachmentSpec {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// `P(x) = (λ₁ + μ₁ (x-ε)) (x-ε)²` in powers of `x`.
    pub p_coeffs: Poly,
    /// `Q(x) = (λ₂ + μ₂ (1-ε-x)) (1-ε-x)²` in powers of `x - (1 - ε)`.
    pub q_coeffs: Poly,
    /// `1 + (a+b) ε/2 + (α-β) ε²/12`.
    pub bump_mass: f64,
}

/// `min(1/2, 3|a|/|α|, 3|b|/|β|)`, dropping the terms with a zero curvature.
pub fn admissible_epsilon_bound(a: f64, b: f64, alpha: f64, beta: f64) -> f64 {
    let mut m: f64 = 0.5;
    if alpha != 0.0 {
        m = m.min(3.0 * a.abs() / alpha.abs());
    }
    if beta != 0.0 {
        m = m.min(3.0 * b.abs() / beta.abs());
    }
    m
}

fn bump_mass(a: f64, b: f64, alpha: f64, beta: f64, eps: f64) -> f64 {
    1.0 + (a + b) * eps / 2.0 + (alpha - beta) * eps * eps / 12.0
}

impl ReattachmentSpec {
    /// Builds the spec; without `epsilon`, takes half the admissible bound and
    /// halves it until the bump mass is positive.
    pub fn new(a: f64, b: f64, alpha: f64, beta: f64, epsilon: Option<f64>) -> Result<Self> {
        if !(a < 0.0 && b < 0.0) {
            return Err(domain(format!("end slopes must be negative, got a = {a}, b = {b}")));
        }
        if ![a, b, alpha, beta].iter().all(|x| x.is_finite()) {
            return Err(domain("reattachment data must be finite"));
        }
        let bound = admissible_epsilon_bound(a, b, alpha, beta);
        let eps = match epsilon {
            Some(e) => {
                if !(e > 0.0 && e < bound) {
                    return Err(domain(format!("junction width {e} outside (0, {bound})")));
                }
                if bump_mass(a, b, alpha, beta, e) <= 0.0 {
                    return Err(domain(format!(
                        "bump mass {} is not positive for width {e}",
                        bump_mass(a, b, alpha, beta, e)
                    )));
                }
                e
            }
            None => {
                let mut e = 0.5 * bound;
                let mut halvings = 0;
                while bump_mass(a, b, alpha, beta, e) <= 0.0 {
                    if halvings == MAX_HALVINGS || e == 0.0 {
                        return Err(domain(format!(
                            "no junction width with positive bump mass (a = {a}, b = {b}, alpha = {alpha}, beta = {beta}, last width {e})"
                        )));
                    }
                    e *= 0.5;
                    halvings += 1;
                }
                e
            }
        };
        let e2 = eps * eps;
        let e3 = e2 * eps;
        let (l1, m1) = (3.0 * a / e2 + alpha / eps, 2.0 * a / e3 + alpha / e2);
        let (l2, m2) = (3.0 * b / e2 - beta / eps, 2.0 * b / e3 - beta / e2);
        let y = Poly::shifted_x(eps);
        let p = &(&Poly::constant(l1) + &y.scale(m1)) * &y.pow(2);
        // In the local coordinate w = x - (1 - ε), 1 - ε - x = -w.
        let w = Poly(vec![0.0, -1.0]);
        let q = &(&Poly::constant(l2) + &w.scale(m2)) * &w.pow(2);
        Ok(ReattachmentSpec {
            a,
            b,
            alpha,
            beta,
            epsilon: eps,
            p_coeffs: p,
            q_coeffs: q,
            bump_mass: bump_mass(a, b, alpha, beta, eps),
        })
    }
}

/// One polynomial piece on `[lo, hi]`, in powers of `x - lo`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPiece {
    pub lo: f64,
    pub hi: f64,
    pub poly: Poly,
}

/// The bridge `f` on `[0, 1]` as three polynomial pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct Reattachment {
    pub spec: ReattachmentSpec,
    pub pieces: Vec<PolyPiece>,
}

impl Reattachment {
    fn piece(&self, x: f64) -> &PolyPiece {
        let i = self.pieces.partition_point(|p| p.hi <= x).min(self.pieces.len() - 1);
        &self.pieces[i]
    }

    /// `f^{(order)}(x)` for `order <= 2`, evaluated on the piece containing `x`.
    pub fn derivative(&self, x: f64, order: usize) -> f64 {
        let p = self.piece(x);
        let mut poly = p.poly.clone();
        for _ in 0..order {
            poly = poly.derivative();
        }
        poly.eval(x - p.lo)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }
}

/// `Φ(s) = 10 s³ - 15 s⁴ + 6 s⁵`, the primitive of the bump `φ` with `Φ(0) = 0`.
fn bump_primitive() -> Poly {
    Poly(vec![0.0, 0.0, 0.0, 10.0, -15.0, 6.0])
}

pub fn reattach(spec: &ReattachmentSpec) -> Reattachment {
    let eps = spec.epsilon;
    let big_phi = bump_primitive();
    let a_mass = spec.bump_mass;
    // Local antiderivatives of P and Q, each vanishing at its piece start.
    let p_local = spec.p_coeffs.integral();
    let head_total = p_local.eval(eps);
    let q_local = spec.q_coeffs.integral();
    let mid_value = 1.0 + head_total;
    let bounds = [(0.0, eps), (eps, 1.0 - eps), (1.0 - eps, 1.0)];
    let f0 = [
        &Poly::constant(1.0) + &p_local,
        Poly::constant(mid_value),
        &Poly::constant(mid_value) + &q_local,
    ];
    let pieces = bounds
        .iter()
        .zip(f0.iter())
        .map(|(&(lo, hi), base)| PolyPiece {
            lo,
            hi,
            poly: base - &big_phi.taylor_shift(lo).scale(a_mass),
        })
        .collect();
    Reattachment {
        spec: spec.clone(),
        pieces,
    }
}

/// A decreasing C² bridge on `[t1, t2]` from `(y1, s1, k1)` to `(y2, s2, k2)`,
/// given as polynomial pieces in powers of `t - lo`.
pub(crate) fn glue(t1: f64, t2: f64, left: [f64; 3], right: [f64; 3]) -> Result<Vec<PolyPiece>> {
    let len = t2 - t1;
    let drop = left[0] - right[0];
    if !(len > 0.0 && drop > 0.0) {
        return Err(domain(format!(
            "glue needs t1 < t2 and a decreasing jump, got [{t1}, {t2}] from {} to {}",
            left[0], right[0]
        )));
    }
    let spec = ReattachmentSpec::new(
        left[1] * len / drop,
        right[1] * len / drop,
        left[2] * len * len / drop,
        right[2] * len * len / drop,
        None,
    )?;
    let f = reattach(&spec);
    Ok(f.pieces
        .iter()
        .map(|p| {
            let mut poly = p.poly.scale_argument(len).scale(drop);
            poly.0[0] += right[0];
            PolyPiece {
                lo: t1 + len * p.lo,
                hi: if p.hi == 1.0 { t2 } else { t1 + len * p.hi },
                poly,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boundary_errors(f: &Reattachment) -> [f64; 6] {
        let s = &f.spec;
        [
            f.eval(0.0) - 1.0,
            f.eval(1.0),
            f.derivative(0.0, 1) - s.a,
            f.derivative(1.0, 1) - s.b,
            f.derivative(0.0, 2) - s.alpha,
            f.derivative(1.0, 2) - s.beta,
        ]
    }

    #[test]
    fn symmetric_flat_spec() {
        let spec = ReattachmentSpec::new(-1.0, -1.0, 0.0, 0.0, None).unwrap();
        assert_eq!(spec.epsilon, 0.25);
        assert!((spec.bump_mass - (1.0 - spec.epsilon)).abs() < 1e-15);
        let f = reattach(&spec);
        assert!(boundary_errors(&f).iter().all(|e| e.abs() < 1e-9));
    }

    #[test]
    fn curved_spec_is_decreasing_and_c2() {
        let spec = ReattachmentSpec::new(-2.0, -0.5, 3.0, -1.0, None).unwrap();
        let f = reattach(&spec);
        assert!(boundary_errors(&f).iter().all(|e| e.abs() < 1e-9));
        for k in 1..1000 {
            assert!(f.derivative(k as f64 / 1000.0, 1) < 0.0);
        }
        for w in f.pieces.windows(2) {
            let x = w[0].hi;
            for order in 0..3 {
                let mut l = w[0].poly.clone();
                let mut r = w[1].poly.clone();
                for _ in 0..order {
                    l = l.derivative();
                    r = r.derivative();
                }
                assert!((l.eval(x - w[0].lo) - r.eval(0.0)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ReattachmentSpec::new(1.0, -1.0, 0.0, 0.0, None).is_err());
        assert!(ReattachmentSpec::new(-1.0, -1.0, 0.0, 0.0, Some(0.6)).is_err());
        assert!(ReattachmentSpec::new(-1.0, -1.0, 3.0, 0.0, Some(0.9)).is_err());
    }

    #[test]
    fn glue_maps_the_boundary_data() {
        let pieces = glue(1.0, 1.5, [3.0, -1.0, 4.0], [2.0, -0.5, -2.0]).unwrap();
        let first = &pieces[0];
        let last = &pieces[2];
        let d = |p: &Poly, k: usize| (0..k).fold(p.clone(), |acc, _| acc.derivative());
        assert!((first.poly.eval(0.0) - 3.0).abs() < 1e-12);
        assert!((d(&first.poly, 1).eval(0.0) + 1.0).abs() < 1e-10);
        assert!((d(&first.poly, 2).eval(0.0) - 4.0).abs() < 1e-8);
        let y = last.hi - last.lo;
        assert!((last.poly.eval(y) - 2.0).abs() < 1e-12);
        assert!((d(&last.poly, 1).eval(y) + 0.5).abs() < 1e-10);
        assert!((d(&last.poly, 2).eval(y) + 2.0).abs() < 1e-8);
        assert_eq!(last.hi, 1.5);
    }
}
