use crate::error::{domain, Result};

/// Closed-form or tabulated shape of a radius profile on one interval.
#[derive(Debug, Clone, PartialEq)]
pub enum PieceKind {
    Constant(f64),
    /// `scale * (apex - t)^exponent`
    PowerOfLinear { scale: f64, apex: f64, exponent: f64 },
    /// `offset - coeff * (t - origin)^exponent`
    OffsetMinusPower {
        offset: f64,
        coeff: f64,
        origin: f64,
        exponent: f64,
    },
    /// `sum_k c_k (t - lo)^k`, in the local coordinate of the piece.
    Polynomial(Vec<f64>),
    /// Linear interpolation of `values` at nodes `lo + k * step`.
    Sampled { step: f64, values: Vec<f64> },
}

/// A piece of a radius profile covering `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub kind: PieceKind,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, kind: PieceKind) -> Self {
        Piece { lo, hi, kind }
    }

    pub fn constant(lo: f64, hi: f64, v: f64) -> Self {
        Piece::new(lo, hi, PieceKind::Constant(v))
    }

    /// Uniformly sampled piece whose first and last values sit at `lo` and `hi`.
    pub fn sampled(lo: f64, hi: f64, values: Vec<f64>) -> Self {
        let step = if values.len() > 1 {
            (hi - lo) / (values.len() - 1) as f64
        } else {
            hi - lo
        };
        Piece::new(lo, hi, PieceKind::Sampled { step, values })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub(crate) fn check_parameters(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(domain(format!("empty or non-finite piece [{}, {})", self.lo, self.hi)));
        }
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match &self.kind {
            PieceKind::Constant(v) => {
                if !v.is_finite() {
                    return Err(domain("non-finite constant"));
                }
            }
            PieceKind::PowerOfLinear { scale, apex, exponent } => {
                if !finite(&[*scale, *apex, *exponent]) || *scale < 0.0 || *exponent < 0.0 {
                    return Err(domain("powlin needs finite scale >= 0 and exponent >= 0"));
                }
                if *apex < self.hi - 1e-12 * self.hi.abs().max(1.0) {
                    return Err(domain(format!("powlin apex {apex} below piece end {}", self.hi)));
                }
            }
            PieceKind::OffsetMinusPower {
                offset,
                coeff,
                origin,
                exponent,
            } => {
                if !finite(&[*offset, *coeff, *origin, *exponent]) || *coeff < 0.0 || *exponent <= 0.0 {
                    return Err(domain("offpow needs finite coeff >= 0 and exponent > 0"));
                }
                if *origin > self.lo {
                    return Err(domain(format!("offpow origin {origin} after piece start {}", self.lo)));
                }
            }
            PieceKind::Polynomial(c) => {
                if c.is_empty() || !finite(c) {
                    return Err(domain("polynomial needs finite coefficients"));
                }
            }
            PieceKind::Sampled { step, values } => {
                if values.len() < 2 || !finite(values) || !(*step > 0.0) {
                    return Err(domain("sampled piece needs at least two finite values"));
                }
                let reach = self.lo + step * (values.len() - 1) as f64;
                if reach < self.hi * (1.0 - 1e-12) - 1e-300 {
                    return Err(domain("sampled grid does not cover its piece"));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the piece formula at `t`, continuously extended to `[lo, hi]`.
    #[inline]
    pub fn value_at(&self, t: f64) -> f64 {
        match &self.kind {
            PieceKind::Constant(v) => *v,
            PieceKind::PowerOfLinear { scale, apex, exponent } => {
                let base = (apex - t).max(0.0);
                if *exponent == 0.0 {
                    *scale
                } else if *exponent == 1.0 {
                    scale * base
                } else {
                    scale * base.powf(*exponent)
                }
            }
            PieceKind::OffsetMinusPower {
                offset,
                coeff,
                origin,
                exponent,
            } => offset - coeff * (t - origin).max(0.0).powf(*exponent),
            PieceKind::Polynomial(c) => {
                let y = t - self.lo;
                c.iter().rev().fold(0.0, |acc, ck| acc * y + ck)
            }
            PieceKind::Sampled { step, values } => {
                let x = ((t - self.lo) / step).max(0.0);
                let last = values.len() - 1;
                let k = (x.floor() as usize).min(last - 1);
                let w = (x - k as f64).min(1.0);
                values[k] + w * (values[k + 1] - values[k])
            }
        }
    }

    /// Left limit of the piece at its right end.
    pub fn end_value(&self) -> f64 {
        self.value_at(self.hi)
    }

    pub fn start_value(&self) -> f64 {
        self.value_at(self.lo)
    }

    /// Nodes strictly inside the piece where the formula is not smooth.
    pub(crate) fn interior_nodes(&self) -> Vec<f64> {
        match &self.kind {
            PieceKind::Sampled { step, values } => (1..values.len())
                .map(|k| self.lo + k as f64 * step)
                .take_while(|&x| x < self.hi)
                .collect(),
            _ => Vec::new(),
        }
    }

    pub(crate) fn scaled(&self, c: f64) -> Piece {
        let kind = match &self.kind {
            PieceKind::Constant(v) => PieceKind::Constant(c * v),
            PieceKind::PowerOfLinear { scale, apex, exponent } => PieceKind::PowerOfLinear {
                scale: c * scale,
                apex: *apex,
                exponent: *exponent,
            },
            PieceKind::OffsetMinusPower {
                offset,
                coeff,
                origin,
                exponent,
            } => PieceKind::OffsetMinusPower {
                offset: c * offset,
                coeff: c * coeff,
                origin: *origin,
                exponent: *exponent,
            },
            PieceKind::Polynomial(cs) => PieceKind::Polynomial(cs.iter().map(|x| c * x).collect()),
            PieceKind::Sampled { step, values } => PieceKind::Sampled {
                step: *step,
                values: values.iter().map(|x| c * x).collect(),
            },
        };
        Piece::new(self.lo, self.hi, kind)
    }

    /// Same formula restricted to `[lo, hi)` with `hi < self.hi`.
    pub(crate) fn cut_at(&self, hi: f64) -> Piece {
        let kind = match &self.kind {
            PieceKind::Sampled { step, values } => {
                let keep = (((hi - self.lo) / step).ceil() as usize + 1).clamp(2, values.len());
                PieceKind::Sampled {
                    step: *step,
                    values: values[..keep].to_vec(),
                }
            }
            k => k.clone(),
        };
        Piece::new(self.lo, hi, kind)
    }

    /// Exact integral of `value^e` over `[x0, x1] ⊂ [lo, hi]` when a closed form exists.
    /// `Some(f64::INFINITY)` marks a non-integrable singularity.
    pub(crate) fn power_integral_closed(&self, e: f64, x0: f64, x1: f64) -> Option<f64> {
        if x1 <= x0 {
            return Some(0.0);
        }
        if e == 0.0 {
            return Some(x1 - x0);
        }
        match &self.kind {
            PieceKind::Constant(v) => Some(v.powf(e) * (x1 - x0)),
            PieceKind::PowerOfLinear { scale, apex, exponent } => {
                let k = exponent * e;
                let (u0, u1) = ((apex - x0).max(0.0), (apex - x1).max(0.0));
                let c = scale.powf(e);
                if k == 0.0 {
                    return Some(c * (x1 - x0));
                }
                if u1 == 0.0 && k <= -1.0 {
                    return Some(f64::INFINITY);
                }
                if k == -1.0 {
                    return Some(c * (u0 / u1).ln());
                }
                Some(c * (u0.powf(k + 1.0) - u1.powf(k + 1.0)) / (k + 1.0))
            }
            PieceKind::Sampled { step, values } => {
                let first = (((x0 - self.lo) / step).floor() as usize).min(values.len() - 2);
                let mut total = 0.0;
                let mut k = first;
                loop {
                    let n0 = self.lo + k as f64 * step;
                    let n1 = self.lo + (k + 1) as f64 * step;
                    let a = x0.max(n0);
                    let b = if k + 2 >= values.len() { x1 } else { x1.min(n1) };
                    if b > a {
                        let ya = self.value_at(a);
                        let yb = self.value_at(b);
                        total += linear_power_integral(ya, yb, b - a, e);
                        if total.is_infinite() {
                            return Some(f64::INFINITY);
                        }
                    }
                    if b >= x1 || k + 2 >= values.len() {
                        break;
                    }
                    k += 1;
                }
                Some(total)
            }
            _ => None,
        }
    }
}

/// Integral of `y(s)^e` over a segment of length `h` on which `y` is affine
/// from `ya` to `yb`.
fn linear_power_integral(ya: f64, yb: f64, h: f64, e: f64) -> f64 {
    let (ya, yb) = (ya.max(0.0), yb.max(0.0));
    if e < 0.0 && (ya == 0.0 || yb == 0.0) {
        if e <= -1.0 {
            return f64::INFINITY;
        }
    }
    let dy = yb - ya;
    let m = ya.max(yb);
    if dy.abs() <= 1e-7 * m {
        // Taylor expansion about the midpoint: accurate to O(dy^4).
        let ym = 0.5 * (ya + yb);
        let r = dy / ym;
        return h * ym.powf(e) * (1.0 + e * (e - 1.0) * r * r / 24.0);
    }
    if e == -1.0 {
        return h * (yb / ya).ln() / dy;
    }
    h * (yb.powf(e + 1.0) - ya.powf(e + 1.0)) / ((e + 1.0) * dy)
}
