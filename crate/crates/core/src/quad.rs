//! Adaptive Gauss–Kronrod quadrature, Gauss–Legendre rules, and improper
//! integrals closed by fitted power-law tails.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Absolute/relative tolerance pair plus a cap on adaptive subdivisions.
#[derive(Clone, Copy, Debug)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { abs: 1e-300, rel: 1e-10, max_segments: 4000 }
    }
}

impl Tol {
    pub fn rel(rel: f64) -> Self {
        Tol { rel, ..Tol::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

impl std::ops::Add for Quad {
    type Output = Quad;
    fn add(self, o: Quad) -> Quad {
        Quad { value: self.value + o.value, error: self.error + o.error }
    }
}

/// One 15-point Kronrod panel with the embedded 7-point Gauss error estimate.
pub fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> Quad {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Quad { value: k * h, error: ((k - g) * h).abs() }
}

/// Globally adaptive quadrature on `[a, b]`: the panel with the largest
/// error estimate is bisected until the tolerance is met.
pub fn integrate<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, tol: Tol) -> Quad {
    if a == b {
        return Quad::default();
    }
    let mut panels = vec![(a, b, gk15(f, a, b))];
    loop {
        let total: f64 = panels.iter().map(|p| p.2.value).sum();
        let err: f64 = panels.iter().map(|p| p.2.error).sum();
        if !total.is_finite() || err.is_nan() {
            return Quad { value: total, error: f64::INFINITY };
        }
        if err <= tol.abs.max(tol.rel * total.abs()) || panels.len() >= tol.max_segments {
            return Quad { value: total, error: err };
        }
        let (worst, _) =
            panels
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (i, p)| if p.2.error > acc.1 { (i, p.2.error) } else { acc });
        let (lo, hi, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Panel cannot be split further in floating point.
            panels.push((lo, hi, Quad { value: gk15(f, lo, hi).value, error: 0.0 }));
            continue;
        }
        panels.push((lo, mid, gk15(f, lo, mid)));
        panels.push((mid, hi, gk15(f, mid, hi)));
        panels.sort_by(|x, y| x.0.total_cmp(&y.0));
    }
}

/// Adaptive quadrature split at the given interior points (outside points are ignored).
pub fn integrate_with_breaks<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, breaks: &[f64], tol: Tol) -> Quad {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut out = Quad::default();
    for w in pts.windows(2) {
        out = out + integrate(f, w[0], w[1], tol);
    }
    out
}

/// Integral over `[a, b]` with `0 < a < b` in the logarithmic variable,
/// one panel group per decade. Suited to integrands spread over many scales.
pub fn integrate_log<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, tol: Tol) -> Quad {
    debug_assert!(a > 0.0 && b >= a);
    let (la, lb) = (a.ln(), b.ln());
    let g = |u: f64| {
        let t = u.exp();
        f(t) * t
    };
    let decades = ((lb - la) / std::f64::consts::LN_10).ceil().max(1.0) as usize;
    let step = (lb - la) / decades as f64;
    let mut out = Quad::default();
    for i in 0..decades {
        let lo = la + step * i as f64;
        let hi = if i + 1 == decades { lb } else { lo + step };
        out = out + integrate(&g, lo, hi, tol);
    }
    out
}

/// Decades with a non-integrable local exponent after which an improper
/// integral is declared divergent.
pub const STALL_DECADES: usize = 12;

/// Result of an improper integral together with the analytically closed tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Improper {
    pub value: f64,
    pub error: f64,
    /// Contribution of the fitted power-law tail.
    pub tail: f64,
    /// Local exponent fitted at the truncation point.
    pub tail_exponent: f64,
    /// False when the fitted exponent does not allow a finite tail.
    pub converged: bool,
}

fn local_exponent<F: Fn(f64) -> f64 + ?Sized>(f: &F, t1: f64, t2: f64) -> Option<f64> {
    let (v1, v2) = (f(t1), f(t2));
    if v1 > 0.0 && v2 > 0.0 && v1.is_finite() && v2.is_finite() {
        Some((v2 / v1).ln() / (t2 / t1).ln())
    } else {
        None
    }
}

/// `∫_a^∞ f` for `a > 0`, integrating decade by decade and closing with the
/// fitted tail `C t^γ` once it contributes less than `tail_frac` of the total.
pub fn integrate_to_infinity<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, tol: Tol, tail_frac: f64) -> Improper {
    let mut acc = Quad::default();
    let mut lo = a;
    let mut gamma = f64::NAN;
    let mut stalled = 0;
    for decade in 0..120 {
        let hi = lo * 10.0;
        let piece = integrate_log(f, lo, hi, tol);
        acc = acc + piece;
        lo = hi;
        if decade < 2 {
            continue;
        }
        let fh = f(hi);
        if fh == 0.0 && piece.value == 0.0 {
            return Improper {
                value: acc.value,
                error: acc.error,
                tail: 0.0,
                tail_exponent: f64::NEG_INFINITY,
                converged: true,
            };
        }
        match local_exponent(f, hi / 10.0, hi) {
            Some(g) if g < -1.0 => {
                // A settled exponent makes the fitted tail accurate even when it is large.
                let settled = (g - gamma).abs() <= tail_frac * (g + 1.0).abs();
                gamma = g;
                stalled = 0;
                let tail = -hi * fh / (g + 1.0);
                if settled || tail.abs() <= tail_frac * (acc.value + tail).abs() {
                    return Improper {
                        value: acc.value + tail,
                        error: acc.error,
                        tail,
                        tail_exponent: g,
                        converged: true,
                    };
                }
            }
            Some(g) => {
                gamma = g;
                stalled += 1;
            }
            None => {}
        }
        if stalled >= STALL_DECADES || hi > 1e290 {
            break;
        }
    }
    Improper { value: f64::INFINITY, error: f64::INFINITY, tail: f64::INFINITY, tail_exponent: gamma, converged: false }
}

/// `∫_0^b f` for `b > 0`, integrating decades downward and closing the
/// singular end with the fitted behaviour `C t^γ`, `γ > −1`.
pub fn integrate_from_zero<F: Fn(f64) -> f64 + ?Sized>(f: &F, b: f64, tol: Tol, tail_frac: f64) -> Improper {
    let mut acc = Quad::default();
    let mut hi = b;
    let mut gamma = f64::NAN;
    let mut stalled = 0;
    for decade in 0..120 {
        let lo = hi / 10.0;
        let piece = integrate_log(f, lo, hi, tol);
        acc = acc + piece;
        hi = lo;
        if decade < 2 {
            continue;
        }
        let fl = f(lo);
        if fl == 0.0 && piece.value == 0.0 {
            return Improper {
                value: acc.value,
                error: acc.error,
                tail: 0.0,
                tail_exponent: f64::INFINITY,
                converged: true,
            };
        }
        match local_exponent(f, lo, lo * 10.0) {
            Some(g) if g > -1.0 => {
                let settled = (g - gamma).abs() <= tail_frac * (g + 1.0).abs();
                gamma = g;
                stalled = 0;
                let tail = lo * fl / (g + 1.0);
                if settled || tail.abs() <= tail_frac * (acc.value + tail).abs() {
                    return Improper {
                        value: acc.value + tail,
                        error: acc.error,
                        tail,
                        tail_exponent: g,
                        converged: true,
                    };
                }
            }
            Some(g) => {
                gamma = g;
                stalled += 1;
            }
            None => {}
        }
        if stalled >= STALL_DECADES || lo < 1e-290 {
            break;
        }
    }
    Improper { value: f64::INFINITY, error: f64::INFINITY, tail: f64::INFINITY, tail_exponent: gamma, converged: false }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=m {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (z * pm - pm1) / (z * z - 1.0);
            let dz = pm / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[m - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(&|x: f64| x.powi(5) - 3.0 * x * x, -1.0, 2.0, Tol::default());
        assert!((q.value - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn sqrt_singularity_converges() {
        let q = integrate(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, Tol::rel(1e-10));
        assert!((q.value - 2.0).abs() < 1e-8, "{q:?}");
    }

    #[test]
    fn breaks_handle_jumps() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 0.0 };
        let q = integrate_with_breaks(&f, 0.0, 1.0, &[0.3], Tol::default());
        assert!((q.value - 0.3).abs() < 1e-14);
    }

    #[test]
    fn power_tail_at_infinity() {
        let r = integrate_to_infinity(&|t: f64| t.powf(-10.0 / 9.0), 1.0, Tol::default(), 1e-4);
        assert!(r.converged);
        assert!((r.value - 9.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn divergent_tail_is_flagged() {
        let r = integrate_to_infinity(&|t: f64| 1.0 / t, 1.0, Tol::default(), 1e-4);
        assert!(!r.converged);
    }

    #[test]
    fn power_head_at_zero() {
        let r = integrate_from_zero(&|t: f64| t.powf(-0.9), 1.0, Tol::default(), 1e-4);
        assert!(r.converged);
        assert!((r.value - 10.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn legendre_rule_integrates_degree_2m_minus_1() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }
}
