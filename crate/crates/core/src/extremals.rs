//! Extremal test families: `u_f`, `v_f`, `w_f` built from non-increasing step
//! profiles `f`, and the scaled bumps `u_j`.

use serde::{Deserialize, Serialize};

use crate::analysis::{char_norm, luxemburg_norm, StepFunction};
use crate::error::{Error, Result};
use crate::gauges::EmbeddingParams;
use crate::poly::{unit_ball_volume, Polynomial};
use crate::seminorms::TestFunction;
use crate::young::YoungFunction;

/// Tolerance on the Luxemburg norm of normalized profiles.
pub const NORMALIZATION_TOL: f64 = 1e-6;

fn binomial(m: usize, j: usize) -> f64 {
    (0..j).map(|i| (m - i) as f64 / (i + 1) as f64).product()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `∫_lo^hi r^e dr`.
fn power_integral(lo: f64, hi: f64, e: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if (e + 1.0).abs() < 1e-14 {
        (hi / lo).ln()
    } else {
        (hi.powf(e + 1.0) - lo.powf(e + 1.0)) / (e + 1.0)
    }
}

/// `Q(ρ) = scale · ∫_ρ^∞ f(r) r^a (r − ρ)^m dr` for a step function `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub f: StepFunction,
    pub a: f64,
    pub m: usize,
    pub scale: f64,
}

impl RadialProfile {
    /// `∫_ρ^∞ f(r) r^a (r − ρ)^q dr` without the scale.
    fn moment(&self, rho: f64, q: usize) -> f64 {
        let mut acc = 0.0;
        let mut lo = 0.0_f64;
        for (&hi, &c) in self.f.breakpoints.iter().zip(&self.f.levels) {
            if hi > rho && c != 0.0 {
                let from = lo.max(rho);
                let mut cell = 0.0;
                for j in 0..=q {
                    let coef = binomial(q, j) * (-rho).powi((q - j) as i32);
                    if coef != 0.0 {
                        cell += coef * power_integral(from, hi, self.a + j as f64);
                    }
                }
                acc += c * cell;
            }
            lo = hi;
        }
        acc
    }

    pub fn value(&self, rho: f64) -> f64 {
        self.scale * self.moment(rho, self.m)
    }

    /// `Q^{(i)}(ρ)` for `i = 0..=d`.
    pub fn derivatives(&self, rho: f64, d: usize) -> Vec<f64> {
        let m = self.m;
        (0..=d)
            .map(|i| {
                if i <= m {
                    let c = (-1f64).powi(i as i32) * factorial(m) / factorial(m - i);
                    c * self.scale * self.moment(rho, m - i)
                } else {
                    let k = i - m - 1;
                    let falling: f64 = (0..k).map(|t| self.a - t as f64).product();
                    (-1f64).powi(m as i32 + 1)
                        * factorial(m)
                        * self.scale
                        * self.f.eval(rho)
                        * falling
                        * rho.powf(self.a - k as f64)
                }
            })
            .collect()
    }

    /// Points `ρ` where `f` jumps.
    pub fn breaks(&self) -> &[f64] {
        &self.f.breakpoints
    }

    pub fn support(&self) -> f64 {
        self.f.support()
    }
}

/// Which extremal family an `ExtremalSpec` builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Uf,
    Vf,
    Wf,
    Uj,
}

/// Serializable description of an extremal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSpec {
    pub family: Family,
    pub params: EmbeddingParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<StepFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Polynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
}

impl ExtremalSpec {
    pub fn build(&self) -> Result<TestFunction> {
        let need_f = || self.f.as_ref().ok_or_else(|| Error::InvalidInput("this family needs a profile f".into()));
        match self.family {
            Family::Uf => make_uf(need_f()?, &self.params),
            Family::Vf => make_vf(need_f()?, &self.params),
            Family::Wf => {
                let h = match &self.h {
                    Some(h) => h.clone(),
                    None => Polynomial::harmonic(self.params.n, self.params.k + 1)?,
                };
                make_wf(need_f()?, &h, &self.params, self.params.k)
            }
            Family::Uj => {
                let shape = match &self.h {
                    Some(h) => BumpShape::new(h.clone())?,
                    None => BumpShape::for_order(self.params.n, self.params.k)?,
                };
                make_uj(&shape, &self.params, self.j.unwrap_or(1.0))
            }
        }
    }
}

/// `u_f(x) = ∫_{ω_n|x|^n}^∞ f(r) r^{−1+s/n} dr`.
pub fn make_uf(f: &StepFunction, params: &EmbeddingParams) -> Result<TestFunction> {
    params.require_first_order()?;
    let profile = RadialProfile { f: f.clone(), a: -1.0 + params.s / params.n as f64, m: 0, scale: 1.0 };
    Ok(TestFunction::radial(params.n, None, profile))
}

/// Closed-form rearrangement `u_f*(r) = ∫_r^∞ f(ρ) ρ^{−1+s/n} dρ`.
pub fn uf_rearrangement(f: &StepFunction, params: &EmbeddingParams, r: f64) -> f64 {
    RadialProfile { f: f.clone(), a: -1.0 + params.s / params.n as f64, m: 0, scale: 1.0 }.value(r)
}

/// `∫_0^{|B|/2} f(r) r^{s/n} dr`, the median-based lower bound for the
/// oscillation of `u_f` over an origin-centred ball.
pub fn median_lower_bound(f: &StepFunction, params: &EmbeddingParams, measure: f64) -> f64 {
    let e = params.s / params.n as f64;
    let half = measure / 2.0;
    let mut lo = 0.0;
    let mut acc = 0.0;
    for (&hi, &c) in f.breakpoints.iter().zip(&f.levels) {
        acc += c * power_integral(lo, hi.min(half), e);
        lo = hi;
        if lo >= half {
            break;
        }
    }
    acc
}

/// `f = A^{-1}(2/|B|) χ_{(0,|B|/2)}`, of unit Luxemburg norm.
pub fn make_normalized_f(a: &YoungFunction, ball_measure: f64) -> Result<StepFunction> {
    if !(ball_measure > 0.0 && ball_measure.is_finite()) {
        return Err(Error::Domain(format!("ball measure must be positive and finite, got {ball_measure}")));
    }
    let level = a.inv(2.0 / ball_measure);
    let f = StepFunction::new(vec![ball_measure / 2.0], vec![level])?;
    let norm = luxemburg_norm(&f.to_sampled()?, a);
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Numerical(format!("normalized profile has norm {norm}")));
    }
    Ok(f)
}

/// `‖χ_{(0,m)}‖_{L^A}`-normalized indicator `χ_{(0,m)}/‖χ_{(0,m)}‖`.
pub fn unit_indicator(a: &YoungFunction, m: f64) -> Result<StepFunction> {
    let c = char_norm(a, m)?;
    StepFunction::new(vec![m], vec![1.0 / c])
}

fn check_higher(params: &EmbeddingParams, k: usize) -> Result<()> {
    if params.int_part() > 3 {
        return Err(Error::Domain(format!("[s] = {} exceeds the supported order 3", params.int_part())));
    }
    if params.int_part() == 0 || k + 1 > params.int_part() {
        return Err(Error::Domain(format!("need k <= [s] - 1, got k = {k}, s = {}", params.s)));
    }
    params.require_order_k(k)
}

/// `v_f(x) = x₁ ∫_{ω_n|x|^n}^∞ f(r) r^{−[s]−1+(s−1)/n} (r − ω_n|x|^n)^{[s]} dr`.
pub fn make_vf(f: &StepFunction, params: &EmbeddingParams) -> Result<TestFunction> {
    params.require_higher_order()?;
    check_higher(params, 0)?;
    let n = params.n as f64;
    let m = params.int_part();
    let profile = RadialProfile { f: f.clone(), a: -(m as f64) - 1.0 + (params.s - 1.0) / n, m, scale: 1.0 };
    Ok(TestFunction::radial(params.n, Some(Polynomial::coordinate(params.n, 0)), profile))
}

/// `w_f(x) = (1/[s]!) H(x) ∫ f(r) r^{−[s]−1+(s−(k+1))/n} (r − ω_n|x|^n)^{[s]} dr`.
pub fn make_wf(f: &StepFunction, h: &Polynomial, params: &EmbeddingParams, k: usize) -> Result<TestFunction> {
    check_higher(params, k)?;
    if h.n != params.n || !h.is_homogeneous() || h.degree() != k + 1 || !h.is_harmonic() {
        return Err(Error::Domain(format!(
            "H must be harmonic and homogeneous of degree {} in {} variables",
            k + 1,
            params.n
        )));
    }
    let n = params.n as f64;
    let m = params.int_part();
    let profile = RadialProfile {
        f: f.clone(),
        a: -(m as f64) - 1.0 + (params.s - (k as f64 + 1.0)) / n,
        m,
        scale: 1.0 / factorial(m),
    };
    Ok(TestFunction::radial(params.n, Some(h.clone()), profile))
}

/// `|B|^{1+1/n} ∫_{|B|}^∞ f(r) r^{−1+(s−1)/n} dr` (the `k = 0` case of
/// [`wf_lower_bound`] multiplied by `|B|`).
pub fn vf_lower_bound(f: &StepFunction, params: &EmbeddingParams, measure: f64) -> f64 {
    measure * wf_lower_bound(f, params, 0, measure)
}

/// `|B|^{(k+1)/n} ∫_{|B|}^∞ f(r) r^{−1+(s−(k+1))/n} dr`.
pub fn wf_lower_bound(f: &StepFunction, params: &EmbeddingParams, k: usize, measure: f64) -> f64 {
    let n = params.n as f64;
    let e = -1.0 + (params.s - (k as f64 + 1.0)) / n;
    let mut lo = 0.0_f64;
    let mut acc = 0.0;
    for (&hi, &c) in f.breakpoints.iter().zip(&f.levels) {
        acc += c * power_integral(lo.max(measure), hi, e);
        lo = hi;
    }
    measure.powf((k as f64 + 1.0) / n) * acc
}

/// `ξ = H · η(|y|²)` with `η = 1` on `|y| ≤ 1/2` and `η = 0` on `|y| ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpShape {
    pub h: Polynomial,
}

impl BumpShape {
    pub fn new(h: Polynomial) -> Result<Self> {
        if h.is_zero() {
            return Err(Error::Domain("bump polynomial must not vanish".into()));
        }
        Ok(BumpShape { h })
    }

    /// `H` of degree `k+1` from the harmonic catalogue.
    pub fn for_order(n: usize, k: usize) -> Result<Self> {
        BumpShape::new(Polynomial::harmonic(n, k + 1)?)
    }
}

/// `u_j(x) = j^{s−n} ξ(x/j)`.
pub fn make_uj(shape: &BumpShape, params: &EmbeddingParams, j: f64) -> Result<TestFunction> {
    if !(j > 0.0 && j.is_finite()) {
        return Err(Error::Domain(format!("scale j must be positive, got {j}")));
    }
    if shape.h.n != params.n {
        return Err(Error::Domain("bump polynomial dimension differs from n".into()));
    }
    let amp = j.powf(params.s - params.n as f64);
    Ok(TestFunction::bump(params.n, shape.h.clone(), j).scaled(amp))
}

/// Radius of the ball of measure `m` in `ℝ^n`.
pub fn radius_of_measure(n: usize, m: f64) -> f64 {
    (m / unit_ball_volume(n)).powf(1.0 / n as f64)
}

/// `(r, u(r e₁))` samples along the first axis, as CSV.
pub fn profile_csv(u: &TestFunction, radii: &[f64]) -> String {
    let mut out = String::from("r,value\n");
    for &r in radii {
        let mut x = vec![0.0; u.dim()];
        x[0] = r;
        out.push_str(&format!("{r:e},{:e}\n", u.eval(&x)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{decreasing_rearrangement, SampledFunction};
    use crate::numeric::logspace;

    fn p(n: usize, s: f64, k: usize) -> EmbeddingParams {
        EmbeddingParams::new(n, s, k).unwrap()
    }

    #[test]
    fn uf_examples() {
        let chi = StepFunction::indicator(1.0).unwrap();
        let pr = p(1, 0.5, 0);
        for r in [0.01, 0.25, 0.9] {
            assert!((uf_rearrangement(&chi, &pr, r) - 2.0 * (1.0 - r.sqrt())).abs() < 1e-14);
        }
        assert_eq!(uf_rearrangement(&chi, &pr, 1.5), 0.0);
        let u = make_uf(&chi, &pr).unwrap();
        // ω_1 = 2: u_f(x) = 2(1 − √(2|x|)).
        assert!((u.eval(&[0.125]) - 1.0).abs() < 1e-14);
        let zero = StepFunction::new(vec![1.0], vec![0.0]).unwrap();
        assert_eq!(make_uf(&zero, &pr).unwrap().eval(&[0.1]), 0.0);
        let m = 3.0;
        let want = (m / 2.0f64).powf(1.5) / 1.5;
        let f = StepFunction::indicator(m).unwrap();
        assert!((median_lower_bound(&f, &pr, m) - want).abs() < 1e-14);
    }

    #[test]
    fn uf_is_equimeasurable_with_closed_form() {
        let f = StepFunction::new(vec![0.5, 2.0], vec![2.0, 1.0]).unwrap();
        let pr = p(2, 0.5, 0);
        let u = make_uf(&f, &pr).unwrap();
        // Sample on rings of equal measure in the measure variable ρ = π|x|².
        let m = 4000;
        let width = 2.0 / m as f64;
        let vals: Vec<f64> = (0..m)
            .map(|i| {
                let rho = (i as f64 + 0.5) * width;
                u.eval(&[(rho / std::f64::consts::PI).sqrt(), 0.0])
            })
            .collect();
        let star = decreasing_rearrangement(&vals, &vec![width; m]).unwrap();
        for r in [0.1, 0.7, 1.5] {
            let want = uf_rearrangement(&f, &pr, r);
            assert!((star.eval(r) - want).abs() < 2e-2 * want.max(1e-3), "r={r}");
        }
        let _ = SampledFunction::zero();
    }

    #[test]
    fn normalized_profiles() {
        let a2 = YoungFunction::power(2.0);
        let f = make_normalized_f(&a2, 2.0).unwrap();
        assert_eq!((f.breakpoints.clone(), f.levels.clone()), (vec![1.0], vec![1.0]));
        let g = make_normalized_f(&a2, 4.0).unwrap();
        assert!(g.levels[0] < f.levels[0]);
        for (_, a) in YoungFunction::catalogue() {
            for m in [0.01, 1.0, 50.0] {
                make_normalized_f(&a, m).unwrap();
            }
        }
    }

    #[test]
    fn wf_reduces_to_vf() {
        let f = StepFunction::new(vec![0.3, 1.0], vec![1.5, 0.5]).unwrap();
        let pr = p(1, 1.5, 0);
        let v = make_vf(&f, &pr).unwrap();
        let w = make_wf(&f, &Polynomial::coordinate(1, 0), &pr, 0).unwrap();
        for x in [-0.4, -0.01, 0.2, 0.45] {
            assert!((v.eval(&[x]) - w.eval(&[x])).abs() < 1e-10);
        }
        let pr3 = p(2, 2.5, 0);
        let v = make_vf(&f, &pr3).unwrap();
        let w = make_wf(&f, &Polynomial::coordinate(2, 0), &pr3, 0).unwrap();
        for x in [[0.1, 0.2], [-0.3, 0.05]] {
            assert!((v.eval(&x) - 2.0 * w.eval(&x)).abs() < 1e-10);
        }
        assert!(make_wf(&f, &Polynomial::coordinate(1, 0), &p(1, 1.5, 1), 1).is_err());
    }

    #[test]
    fn profile_derivatives_match_differences() {
        let f = StepFunction::new(vec![0.4, 1.0], vec![2.0, 1.0]).unwrap();
        let q = RadialProfile { f, a: -1.7, m: 2, scale: 0.5 };
        let rho = 0.6;
        let d = q.derivatives(rho, 3);
        let h = 1e-4;
        for i in 0..3 {
            let fd = (q.derivatives(rho + h, i)[i] - q.derivatives(rho - h, i)[i]) / (2.0 * h);
            assert!((fd - d[i + 1]).abs() < 1e-6 * (1.0 + d[i + 1].abs()), "order {}", i + 1);
        }
    }

    #[test]
    fn bump_scaling() {
        let pr = p(2, 1.5, 0);
        let shape = BumpShape::for_order(2, 0).unwrap();
        let u1 = make_uj(&shape, &pr, 1.0).unwrap();
        let x = [0.3, 0.1];
        assert!((u1.eval(&x) - 0.3).abs() < 1e-15);
        let u4 = make_uj(&shape, &pr, 4.0).unwrap();
        // Same sample points in y = x/j, so the sup ratio is exactly j^{s−n}.
        let s1 = logspace(0.1, 0.99, 40).iter().map(|&t| u1.eval(&[t, 0.0])).fold(0.0, f64::max);
        let s4 = logspace(0.4, 3.96, 40).iter().map(|&t| u4.eval(&[t, 0.0])).fold(0.0, f64::max);
        assert!((s4 / s1 - 4f64.powf(pr.s - 2.0)).abs() < 1e-9 * s4 / s1);
        let sp = crate::jet::JetSpace::new(2, 1);
        let g4 = sp.gradient_norm(&u4.jet(&sp, &[1.0, 0.5]), 1);
        let g1 = sp.gradient_norm(&u1.jet(&sp, &[0.25, 0.125]), 1);
        assert!((g4 - 4f64.powf(pr.s - 3.0) * g1).abs() < 1e-12);
    }

    #[test]
    fn lower_bounds_closed_form() {
        let pr = p(1, 1.5, 0);
        let f = StepFunction::indicator(4.0).unwrap();
        // ∫_1^4 r^{−1/2} dr = 2.
        assert!((vf_lower_bound(&f, &pr, 1.0) - 2.0).abs() < 1e-14);
        assert!((radius_of_measure(2, std::f64::consts::PI) - 1.0).abs() < 1e-15);
    }
}
