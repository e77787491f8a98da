//! Adaptive Simpson and fixed Gauss-Legendre quadrature.

/// Tolerances for [`adaptive_simpson`].
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-15,
            max_depth: 40,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the local error estimates over all leaves.
    pub error: f64,
    /// False when the summed leaf error estimates exceed the requested tolerance.
    pub converged: bool,
}

struct Acc {
    error: f64,
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
    acc: &mut Acc,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let eps = left + right - whole;
    if eps.abs() <= 15.0 * tol || depth >= max_depth || lm <= a || rm >= b {
        acc.error += eps.abs() / 15.0;
        return left + right + eps / 15.0;
    }
    recurse(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1, max_depth, acc)
        + recurse(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1, max_depth, acc)
}

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// The absolute target is `max(rel_tol * |I|, abs_tol)` where `I` is a
/// 16-panel composite estimate of the integral of `|f|`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Quadrature {
    if b <= a {
        return Quadrature {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    const PANELS: usize = 16;
    let h = (b - a) / PANELS as f64;
    let mut xs = [0.0; PANELS + 1];
    let mut fs = [0.0; PANELS + 1];
    for i in 0..=PANELS {
        xs[i] = if i == PANELS { b } else { a + i as f64 * h };
        fs[i] = f(xs[i]);
    }
    let mut scale = 0.0;
    for i in 0..PANELS {
        let mid = f(0.5 * (xs[i] + xs[i + 1]));
        scale += h / 6.0 * (fs[i].abs() + 4.0 * mid.abs() + fs[i + 1].abs());
    }
    let target = (cfg.rel_tol * scale).max(cfg.abs_tol);
    let tol = target / PANELS as f64;
    let mut acc = Acc { error: 0.0 };
    let mut value = 0.0;
    for i in 0..PANELS {
        let (x0, x1) = (xs[i], xs[i + 1]);
        let m = 0.5 * (x0 + x1);
        let fm = f(m);
        let whole = (x1 - x0) / 6.0 * (fs[i] + 4.0 * fm + fs[i + 1]);
        value += recurse(&f, x0, fs[i], m, fm, x1, fs[i + 1], whole, tol, 1, cfg.max_depth, &mut acc);
    }
    Quadrature {
        value,
        error: acc.error,
        converged: acc.error <= target && value.is_finite(),
    }
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss-Legendre rule with `panels` equal panels.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            s += w * (f(c - half * x) + f(c + half * x));
        }
        total += s * half;
    }
    total
}
