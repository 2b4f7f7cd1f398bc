//! Campanato oscillation seminorms, the fractional Orlicz–Gagliardo seminorm,
//! moment-matched polynomial projections, and the ratio experiments built on
//! them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{luxemburg_from_modular, StepFunction};
use crate::error::{Error, Result};
use crate::extremals::{make_uf, make_uj, radius_of_measure, BumpShape, RadialProfile};
use crate::gauges::{phi_gauge, EmbeddingParams, Gauge};
use crate::jet::{multi_factorial, Jet, JetSpace};
use crate::numeric::{linear_fit, logspace};
use crate::poly::{ball_monomial_mean, unit_ball_volume, Polynomial};
use crate::quad::{gauss_legendre, integrate, Tol};
use crate::young::{Kind, YoungFunction};

// ------------------------------------------------------------------ test functions

/// Concrete shape of a test function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Repr {
    /// `H(x) Q(ω_n |x|^n)`, with `H ≡ 1` when absent.
    Radial { h: Option<Polynomial>, profile: RadialProfile },
    /// `H(x/j) η(|x/j|²)` with a smooth cutoff `η` equal to one on `|y| ≤ 1/2`
    /// and vanishing on `|y| ≥ 1`.
    Bump { h: Polynomial, j: f64 },
    /// A polynomial in `x − center`.
    Polynomial { poly: Polynomial, center: Vec<f64> },
    /// `(1 − |x|/w)_+` in one dimension.
    Tent { half_width: f64 },
}

/// A scalar function on `ℝ^n` with derivatives of every order away from its
/// kinks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub n: usize,
    pub repr: Repr,
    pub amplitude: f64,
}

fn smooth_step(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else if z >= 1.0 {
        1.0
    } else {
        let g = (-1.0 / z).exp();
        let h = (-1.0 / (1.0 - z)).exp();
        g / (g + h)
    }
}

/// Cutoff as a function of `t = |y|²`.
fn cutoff(t: f64) -> f64 {
    smooth_step((1.0 - t) / 0.75)
}

fn cutoff_jet(space: &JetSpace, t: &Jet) -> Jet {
    let z = space.scale(&space.add(&space.constant(1.0), &space.scale(t, -1.0)), 1.0 / 0.75);
    if z[0] >= 1.0 {
        return space.constant(1.0);
    }
    if z[0] <= 0.0 {
        return space.constant(0.0);
    }
    let one_minus = space.add(&space.constant(1.0), &space.scale(&z, -1.0));
    let g = space.exp(&space.scale(&space.recip(&z), -1.0));
    let h = space.exp(&space.scale(&space.recip(&one_minus), -1.0));
    space.mul(&g, &space.recip(&space.add(&g, &h)))
}

impl TestFunction {
    pub fn radial(n: usize, h: Option<Polynomial>, profile: RadialProfile) -> Self {
        TestFunction { n, repr: Repr::Radial { h, profile }, amplitude: 1.0 }
    }

    pub fn bump(n: usize, h: Polynomial, j: f64) -> Self {
        TestFunction { n, repr: Repr::Bump { h, j }, amplitude: 1.0 }
    }

    pub fn polynomial(poly: Polynomial, center: Vec<f64>) -> Self {
        TestFunction { n: poly.n, repr: Repr::Polynomial { poly, center }, amplitude: 1.0 }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let poly = Polynomial::new(n, vec![(vec![0; n], 1.0)]).expect("valid");
        TestFunction { n, repr: Repr::Polynomial { poly, center: vec![0.0; n] }, amplitude: c }
    }

    pub fn tent(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Domain(format!("tent half-width must be positive, got {half_width}")));
        }
        Ok(TestFunction { n: 1, repr: Repr::Tent { half_width }, amplitude: 1.0 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scaled(&self, c: f64) -> TestFunction {
        TestFunction { amplitude: self.amplitude * c, ..self.clone() }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let v = match &self.repr {
            Repr::Radial { h, profile } => {
                let rho = unit_ball_volume(self.n) * r2.powf(self.n as f64 / 2.0);
                if rho >= profile.support() {
                    0.0
                } else {
                    profile.value(rho) * h.as_ref().map_or(1.0, |h| h.eval(x))
                }
            }
            Repr::Bump { h, j } => {
                let t = r2 / (j * j);
                if t >= 1.0 {
                    0.0
                } else {
                    let y: Vec<f64> = x.iter().map(|v| v / j).collect();
                    h.eval(&y) * cutoff(t)
                }
            }
            Repr::Polynomial { poly, center } => {
                let y: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                poly.eval(&y)
            }
            Repr::Tent { half_width } => (1.0 - x[0].abs() / half_width).max(0.0),
        };
        self.amplitude * v
    }

    /// Jet of the function at `x` (exact away from kinks; at the origin of a
    /// radial profile only the value is meaningful).
    pub fn jet(&self, space: &JetSpace, x: &[f64]) -> Jet {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let j = match &self.repr {
            Repr::Radial { h, profile } => {
                let omega = unit_ball_volume(self.n);
                let rho = omega * r2.powf(self.n as f64 / 2.0);
                if rho >= profile.support() {
                    space.constant(0.0)
                } else if r2 == 0.0 {
                    space.constant(profile.value(0.0) * h.as_ref().map_or(1.0, |h| h.eval(x)))
                } else {
                    let vars: Vec<Jet> = (0..self.n).map(|i| space.variable(i, x[i])).collect();
                    let mut s2 = space.constant(0.0);
                    for v in &vars {
                        s2 = space.add(&s2, &space.mul(v, v));
                    }
                    let rho_j = space.scale(&space.powf(&s2, self.n as f64 / 2.0), omega);
                    let q = space.compose(&rho_j, &profile.derivatives(rho, space.d));
                    match h {
                        Some(h) => space.mul(&q, &h.jet_of(space, &vars)),
                        None => q,
                    }
                }
            }
            Repr::Bump { h, j } => {
                if r2 >= j * j {
                    space.constant(0.0)
                } else {
                    let vars: Vec<Jet> = (0..self.n).map(|i| space.scale(&space.variable(i, x[i]), 1.0 / j)).collect();
                    let mut t = space.constant(0.0);
                    for v in &vars {
                        t = space.add(&t, &space.mul(v, v));
                    }
                    space.mul(&h.jet_of(space, &vars), &cutoff_jet(space, &t))
                }
            }
            Repr::Polynomial { poly, center } => {
                let vars: Vec<Jet> = (0..self.n).map(|i| space.variable(i, x[i] - center[i])).collect();
                poly.jet_of(space, &vars)
            }
            Repr::Tent { half_width } => {
                let mut jet = space.constant(0.0);
                let ax = x[0].abs();
                if ax < *half_width {
                    jet[0] = 1.0 - ax / half_width;
                    if space.d >= 1 {
                        jet[1] = -x[0].signum() / half_width;
                    }
                }
                jet
            }
        };
        space.scale(&j, self.amplitude)
    }

    /// Components of `∇^h u(x)` (the value itself for `h = 0`).
    pub fn gradient(&self, space: &JetSpace, x: &[f64], order: usize) -> Vec<f64> {
        if order == 0 {
            return vec![self.eval(x)];
        }
        space.gradient_components(&self.jet(space, x), order)
    }

    /// Radius of a ball centred at the origin containing the support.
    pub fn support_radius(&self) -> f64 {
        match &self.repr {
            Repr::Radial { profile, .. } => radius_of_measure(self.n, profile.support()),
            Repr::Bump { j, .. } => *j,
            Repr::Polynomial { poly, .. } => {
                if poly.is_zero() || self.amplitude == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Repr::Tent { half_width } => *half_width,
        }
    }

    /// Distances from the origin at which the function or its derivatives
    /// may fail to be smooth.
    pub fn kink_radii(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Radial { profile, .. } => {
                let mut v = vec![0.0];
                v.extend(profile.breaks().iter().map(|&b| radius_of_measure(self.n, b)));
                v
            }
            Repr::Bump { j, .. } => vec![0.5 * j, *j],
            Repr::Polynomial { .. } => Vec::new(),
            Repr::Tent { half_width } => vec![0.0, *half_width],
        }
    }

    /// Whether `u(−x₁, x') = −u(x₁, x')`.
    pub fn is_odd_in_x1(&self) -> bool {
        let odd = |p: &Polynomial| p.terms.iter().all(|(b, _)| b[0] % 2 == 1);
        match &self.repr {
            Repr::Radial { h: Some(h), .. } | Repr::Bump { h, .. } => odd(h),
            Repr::Polynomial { poly, center } => center[0] == 0.0 && odd(poly),
            _ => false,
        }
    }

    /// Whether every derivative of order `order` vanishes identically.
    fn gradient_vanishes(&self, order: usize) -> bool {
        match &self.repr {
            Repr::Polynomial { poly, .. } => poly.is_zero() || poly.degree() <= order || self.amplitude == 0.0,
            _ => self.amplitude == 0.0,
        }
    }
}

// ------------------------------------------------------------------ quadrature on balls

/// Composite Gauss–Legendre rule on `[a, b]` with panels refined
/// geometrically toward both ends.
fn graded_rule(a: f64, b: f64, depth: usize, order: usize, out: &mut Vec<(f64, f64)>) {
    if b <= a {
        return;
    }
    let (gx, gw) = gauss_legendre(order);
    let mut panel = |lo: f64, hi: f64| {
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, w) in gx.iter().zip(&gw) {
            out.push((c + h * x, h * w));
        }
    };
    let mid = 0.5 * (a + b);
    let half = mid - a;
    let mut edges: Vec<f64> = (0..=depth).map(|i| half * 0.5f64.powi(i as i32)).collect();
    edges.reverse();
    // Left half: a, a + half·2^{-depth}, ..., mid.
    let mut lo = a;
    for &e in &edges {
        panel(lo, a + e);
        lo = a + e;
    }
    let mut hi = b;
    for &e in &edges {
        panel(b - e, hi);
        hi = b - e;
    }
}

fn rule_with_breaks(a: f64, b: f64, breaks: &[f64], depth: usize, order: usize) -> Vec<(f64, f64)> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
    let mut out = Vec::new();
    for w in pts.windows(2) {
        graded_rule(w[0], w[1], depth, order, &mut out);
    }
    out
}

/// Quadrature nodes and weights on the ball `B(center, r)`. Radii in `kinks`
/// (distances from the origin) become panel breaks for origin-centred balls.
pub fn ball_rule(n: usize, center: &[f64], r: f64, kinks: &[f64], level: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let depth = 4 + 2 * level;
    let order = 8;
    let at_origin = center.iter().all(|&c| c == 0.0);
    match n {
        1 => {
            let c = center[0];
            let mut br: Vec<f64> = Vec::new();
            for &k in kinks {
                br.push(k);
                br.push(-k);
            }
            Ok(rule_with_breaks(c - r, c + r, &br, depth, order).into_iter().map(|(x, w)| (vec![x], w)).collect())
        }
        2 | 3 => {
            let radial = rule_with_breaks(0.0, r, if at_origin { kinks } else { &[] }, depth, order);
            let mut out = Vec::new();
            if n == 2 {
                let m = 32 * level.max(1);
                for i in 0..m {
                    let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / m as f64;
                    let wt = 2.0 * std::f64::consts::PI / m as f64;
                    for &(rho, w) in &radial {
                        out.push((vec![center[0] + rho * th.cos(), center[1] + rho * th.sin()], w * rho * wt));
                    }
                }
            } else {
                let (cx, cw) = gauss_legendre(8 * level.max(1));
                let m = 16 * level.max(1);
                for (ct, wct) in cx.iter().zip(&cw) {
                    let st = (1.0 - ct * ct).sqrt();
                    for i in 0..m {
                        let ph = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / m as f64;
                        let wph = 2.0 * std::f64::consts::PI / m as f64;
                        for &(rho, w) in &radial {
                            out.push((
                                vec![
                                    center[0] + rho * st * ph.cos(),
                                    center[1] + rho * st * ph.sin(),
                                    center[2] + rho * ct,
                                ],
                                w * rho * rho * wct * wph,
                            ));
                        }
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::Domain(format!("ball quadrature supports n <= 3, got {n}"))),
    }
}

// ------------------------------------------------------------------ projections

/// `P^k_B[u]`, stored as a polynomial in `x − center`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Projection {
    pub center: Vec<f64>,
    pub radius: f64,
    pub k: usize,
    pub poly: Polynomial,
}

impl Projection {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        self.poly.eval(&y)
    }

    pub fn to_test_function(&self) -> TestFunction {
        TestFunction::polynomial(self.poly.clone(), self.center.clone())
    }
}

fn project_from_rule(
    u: &TestFunction,
    center: &[f64],
    r: f64,
    k: usize,
    rule: &[(Vec<f64>, f64)],
) -> Result<Projection> {
    let n = u.n;
    let space = JetSpace::new(n, k);
    let measure = unit_ball_volume(n) * r.powi(n as i32);
    let mut means = vec![0.0; space.len()];
    for (x, w) in rule {
        let j = if k == 0 { vec![u.eval(x)] } else { u.jet(&space, x) };
        for (i, m) in means.iter_mut().enumerate() {
            *m += w * j[i] * multi_factorial(space.monomial(i));
        }
    }
    for m in means.iter_mut() {
        *m /= measure;
    }
    let mut coef = vec![0.0; space.len()];
    for h in (0..=k).rev() {
        for &bi in space.of_degree(h) {
            let beta = space.monomial(bi).to_vec();
            let mut rhs = means[bi];
            for hh in h + 1..=k {
                for &ai in space.of_degree(hh) {
                    let alpha = space.monomial(ai);
                    if alpha.iter().zip(&beta).all(|(a, b)| a >= b) {
                        let gamma: Vec<u8> = alpha.iter().zip(&beta).map(|(a, b)| a - b).collect();
                        let falling = multi_factorial(alpha) / multi_factorial(&gamma);
                        rhs -= coef[ai] * falling * ball_monomial_mean(&gamma, r);
                    }
                }
            }
            coef[bi] = rhs / multi_factorial(&beta);
        }
    }
    let terms = (0..space.len()).map(|i| (space.monomial(i).to_vec(), coef[i])).collect();
    Ok(Projection { center: center.to_vec(), radius: r, k, poly: Polynomial::new(n, terms)? })
}

/// The polynomial of degree at most `k` whose derivatives of order `0..=k`
/// have the same ball averages as those of `u`.
pub fn polynomial_projection(u: &TestFunction, center: &[f64], r: f64, k: usize, level: usize) -> Result<Projection> {
    if k > 3 {
        return Err(Error::Domain(format!("projection order must be at most 3, got {k}")));
    }
    if center.len() != u.n || !(r > 0.0) {
        return Err(Error::Domain("ball must have a centre in R^n and a positive radius".into()));
    }
    let rule = ball_rule(u.n, center, r, &u.kink_radii(), level)?;
    project_from_rule(u, center, r, k, &rule)
}

// ------------------------------------------------------------------ balls and reports

/// Balls of common centre and geometric radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
}

impl BallFamily {
    pub fn new(center: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::Domain("radii must be positive and finite".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("radii must be strictly increasing".into()));
        }
        Ok(BallFamily { center, radii })
    }

    /// Origin-centred balls with `count` geometric radii in `[r_min, r_max]`.
    pub fn geometric(n: usize, r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) || count < 2 {
            return Err(Error::Domain(format!(
                "need 0 < r_min < r_max and at least 2 radii, got {r_min}, {r_max}, {count}"
            )));
        }
        BallFamily::new(vec![0.0; n], logspace(r_min, r_max, count))
    }

    pub fn measure(&self, r: f64) -> f64 {
        unit_ball_volume(self.center.len()) * r.powi(self.center.len() as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallRow {
    pub radius: f64,
    pub measure: f64,
    /// `⨍_B |u − P^k_B[u]|`.
    pub oscillation: f64,
    /// `φ(|B|^{1/n})`.
    pub gauge: f64,
    /// `oscillation / (φ(|B|^{1/n}) |B|^{k/n})`.
    pub normalized: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<f64>,
}

/// Outcome of a seminorm computation or experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub n: usize,
    pub s: f64,
    pub k: usize,
    pub level: usize,
    pub seed: u64,
    pub rows: Vec<BallRow>,
    /// Supremum of the normalized oscillations over the family.
    pub campanato_seminorm: f64,
    pub fractional_seminorm: Option<f64>,
    pub fractional_error: Option<f64>,
    /// `campanato_seminorm / fractional_seminorm`.
    pub sup_ratio: Option<f64>,
    /// `(x, y)` pairs of a scaling sweep.
    pub series: Vec<[f64; 2]>,
    pub slope: Option<f64>,
    pub divergent: bool,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    fn empty(experiment: &str, params: &EmbeddingParams, level: usize, seed: u64) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            n: params.n,
            s: params.s,
            k: params.k,
            level,
            seed,
            rows: Vec::new(),
            campanato_seminorm: 0.0,
            fractional_seminorm: None,
            fractional_error: None,
            sup_ratio: None,
            series: Vec::new(),
            slope: None,
            divergent: false,
            notes: Vec::new(),
        }
    }

    pub fn rows_csv(&self) -> String {
        let mut out = String::from("radius,measure,oscillation,gauge,normalized,quotient\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{}\n",
                r.radius,
                r.measure,
                r.oscillation,
                r.gauge,
                r.normalized,
                r.quotient.map_or(String::new(), |q| format!("{q:e}"))
            ));
        }
        out
    }
}

/// `⨍_B |u − P^k_B[u]|`.
pub fn ball_oscillation(u: &TestFunction, center: &[f64], r: f64, k: usize, level: usize) -> Result<f64> {
    let rule = ball_rule(u.n, center, r, &u.kink_radii(), level)?;
    let p = project_from_rule(u, center, r, k, &rule)?;
    let measure = unit_ball_volume(u.n) * r.powi(u.n as i32);
    Ok(rule.iter().map(|(x, w)| w * (u.eval(x) - p.eval(x)).abs()).sum::<f64>() / measure)
}

/// Per-ball normalized oscillations and their supremum over the family (the
/// supremum over all balls is approximated by the family).
pub fn campanato_seminorm(
    u: &TestFunction,
    gauge: &Gauge,
    k: usize,
    balls: &BallFamily,
    level: usize,
) -> Result<ExperimentReport> {
    if balls.center.len() != u.n {
        return Err(Error::Domain("ball centres must lie in R^n".into()));
    }
    let n = u.n as f64;
    let params = EmbeddingParams { n: u.n, s: f64::NAN, k };
    let mut rep = ExperimentReport::empty("campanato", &params, level, 0);
    for &r in &balls.radii {
        let measure = balls.measure(r);
        let osc = ball_oscillation(u, &balls.center, r, k, level)?;
        let g = gauge.eval(measure.powf(1.0 / n));
        let normalized = osc / (g * measure.powf(k as f64 / n));
        rep.rows.push(BallRow { radius: r, measure, oscillation: osc, gauge: g, normalized, quotient: None });
    }
    rep.campanato_seminorm = rep.rows.iter().map(|r| r.normalized).fold(0.0, f64::max);
    Ok(rep)
}

/// Empirical constants `C` in `⨍_B |u − P^{k−1}_B[u]| ≤ C |B|^{k/n} ⨍_B |∇^k u|`.
pub fn poincare_constants(u: &TestFunction, k: usize, balls: &BallFamily, level: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::Domain("the Poincaré check needs k >= 1".into()));
    }
    let space = JetSpace::new(u.n, k);
    balls
        .radii
        .iter()
        .map(|&r| {
            let rule = ball_rule(u.n, &balls.center, r, &u.kink_radii(), level)?;
            let p = project_from_rule(u, &balls.center, r, k - 1, &rule)?;
            let measure = balls.measure(r);
            let osc: f64 = rule.iter().map(|(x, w)| w * (u.eval(x) - p.eval(x)).abs()).sum::<f64>() / measure;
            let grad: f64 =
                rule.iter().map(|(x, w)| w * space.gradient_norm(&u.jet(&space, x), k)).sum::<f64>() / measure;
            Ok(osc / (measure.powf(k as f64 / u.n as f64) * grad))
        })
        .collect()
}

// ------------------------------------------------------------------ Gagliardo modular

/// Discretization controls for the fractional seminorm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GagliardoOptions {
    /// Refinement level (≥ 1); higher levels use more panels.
    pub level: usize,
    /// Seed of the Monte Carlo estimator used for `n ≥ 3`.
    pub seed: u64,
    /// Monte Carlo sample count.
    pub samples: usize,
}

impl Default for GagliardoOptions {
    fn default() -> Self {
        GagliardoOptions { level: 2, seed: 0x5eed, samples: 200_000 }
    }
}

/// Value of the modular with its error indicators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Modular {
    pub value: f64,
    /// Standard error (Monte Carlo) or analytically closed small-scale share.
    pub error: f64,
    pub divergent: bool,
}

/// Precomputed difference quotients `D` with weights, so that the modular at
/// any `λ` is `Σ w A(D/λ)` plus closed far-field and small-scale parts.
#[derive(Clone, Debug)]
pub struct GagliardoCloud {
    sigma: f64,
    /// `(D, w)` grouped by `h` node.
    entries: Vec<(f64, f64)>,
    /// `(h, weight of dh/h, start, end)` into `entries`.
    groups: Vec<(f64, f64, usize, usize)>,
    h_min: f64,
    /// `(|g(x)|, w)` over the support, for `h ≥ 2L`.
    far: Vec<(f64, f64)>,
    far_factor: f64,
    far_scale: f64,
    monte_carlo: bool,
    samples: usize,
    unbounded: bool,
    vanishing: bool,
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn vec_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `∫_0^y A(t)/t dt`.
fn log_primitive(a: &YoungFunction, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if let Kind::Power { p } = a.kind {
        return y.powf(p) / p;
    }
    if !a.value(y).is_finite() {
        return f64::INFINITY;
    }
    let mut pts = vec![0.0];
    pts.extend(a.kinks().into_iter().filter(|&k| k > 0.0 && k < y));
    pts.push(y);
    pts.windows(2).map(|w| integrate(&|t: f64| a.value(t) / t, w[0], w[1], Tol::rel(1e-10)).value).sum()
}

impl GagliardoCloud {
    /// Discretizes `J(λ) = ∫∫ A(|∇^{[s]}u(x) − ∇^{[s]}u(y)| / (λ|x−y|^{{s}})) dx dy / |x−y|^n`.
    pub fn build(u: &TestFunction, params: &EmbeddingParams, opts: &GagliardoOptions) -> Result<Self> {
        if u.n != params.n {
            return Err(Error::Domain("test function dimension differs from n".into()));
        }
        let order = params.int_part();
        let sigma = params.frac_part();
        let level = opts.level.max(1);
        let mut cloud = GagliardoCloud {
            sigma,
            entries: Vec::new(),
            groups: Vec::new(),
            h_min: 0.0,
            far: Vec::new(),
            far_factor: 0.0,
            far_scale: 1.0,
            monte_carlo: false,
            samples: 0,
            unbounded: false,
            vanishing: false,
        };
        if u.gradient_vanishes(order) {
            cloud.vanishing = true;
            return Ok(cloud);
        }
        let big_l = u.support_radius();
        if !big_l.is_finite() {
            cloud.unbounded = true;
            return Ok(cloud);
        }
        let space = JetSpace::new(u.n, order);
        let grad = |x: &[f64]| u.gradient(&space, x, order);
        let kinks = u.kink_radii();
        match u.n {
            1 => cloud.build_line(&grad, big_l, &kinks, level),
            2 => cloud.build_plane(&grad, big_l, &kinks, level)?,
            _ => cloud.build_monte_carlo(&grad, u.n, big_l, opts),
        }
        Ok(cloud)
    }

    fn h_nodes(&self, big_l: f64, h_min: f64, per_decade: usize, order: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = (h_min.ln(), (2.0 * big_l).ln());
        let panels = (((hi - lo) / std::f64::consts::LN_10) * per_decade as f64).ceil() as usize;
        let (gx, gw) = gauss_legendre(order);
        let width = (hi - lo) / panels as f64;
        let mut out = Vec::new();
        for p in 0..panels {
            let c = lo + (p as f64 + 0.5) * width;
            for (x, w) in gx.iter().zip(&gw) {
                out.push(((c + 0.5 * width * x).exp(), 0.5 * width * w));
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    fn build_line(&mut self, grad: &dyn Fn(&[f64]) -> Vec<f64>, big_l: f64, kinks: &[f64], level: usize) {
        let depth = 6 + 2 * level;
        let order = 6;
        let mut k: Vec<f64> = vec![-big_l, big_l];
        for &r in kinks {
            if r < big_l {
                k.push(r);
                k.push(-r);
            }
        }
        k.sort_by(f64::total_cmp);
        k.dedup();
        self.h_min = 1e-6 * 2.0 * big_l;
        let hs = self.h_nodes(big_l, self.h_min, 2 * level + 1, order);
        for (h, wh) in hs {
            let start = self.entries.len();
            // Pairs (x, x + h) with x in the support; the reflected pairs double it.
            let mut br = k.clone();
            br.extend(k.iter().map(|v| v - h));
            for (x, w) in rule_with_breaks(-big_l, big_l, &br, depth, order) {
                let d = diff_norm(&grad(&[x + h]), &grad(&[x])) / h.powf(self.sigma);
                if d > 0.0 {
                    self.entries.push((d, 2.0 * w));
                }
            }
            // Pairs with x outside the support and x + h inside.
            let top = (h - big_l).min(big_l);
            for (z, w) in rule_with_breaks(-big_l, top, &k, depth, order) {
                let d = vec_norm(&grad(&[z])) / h.powf(self.sigma);
                if d > 0.0 {
                    self.entries.push((d, 2.0 * w));
                }
            }
            self.groups.push((h, wh, start, self.entries.len()));
        }
        for (x, w) in rule_with_breaks(-big_l, big_l, &k, depth, order) {
            self.far.push((vec_norm(&grad(&[x])), w));
        }
        self.far_factor = 4.0;
        self.far_scale = (2.0 * big_l).powf(-self.sigma);
    }

    fn build_plane(
        &mut self,
        grad: &dyn Fn(&[f64]) -> Vec<f64>,
        big_l: f64,
        kinks: &[f64],
        level: usize,
    ) -> Result<()> {
        let nodes = ball_rule(2, &[0.0, 0.0], big_l, kinks, level.saturating_sub(1).max(1))?;
        let gx: Vec<Vec<f64>> = nodes.iter().map(|(x, _)| grad(x)).collect();
        self.h_min = 1e-4 * 2.0 * big_l;
        let hs = self.h_nodes(big_l, self.h_min, level + 1, 4);
        let m = 8 * level;
        for (h, wh) in hs {
            let start = self.entries.len();
            for i in 0..m {
                let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / m as f64;
                let wom = 2.0 * std::f64::consts::PI / m as f64;
                let (c, s) = (th.cos() * h, th.sin() * h);
                for ((x, w), g) in nodes.iter().zip(&gx) {
                    let y = [x[0] + c, x[1] + s];
                    let d = diff_norm(&grad(&y), g) / h.powf(self.sigma);
                    if d > 0.0 {
                        self.entries.push((d, w * wom));
                    }
                    let back = ((x[0] - c).powi(2) + (x[1] - s).powi(2)).sqrt();
                    if back > big_l {
                        let d2 = vec_norm(g) / h.powf(self.sigma);
                        if d2 > 0.0 {
                            self.entries.push((d2, w * wom));
                        }
                    }
                }
            }
            self.groups.push((h, wh, start, self.entries.len()));
        }
        self.far = nodes.iter().zip(&gx).map(|((_, w), g)| (vec_norm(g), *w)).collect();
        self.far_factor = 2.0 * 2.0 * std::f64::consts::PI;
        self.far_scale = (2.0 * big_l).powf(-self.sigma);
        Ok(())
    }

    fn build_monte_carlo(&mut self, grad: &dyn Fn(&[f64]) -> Vec<f64>, n: usize, big_l: f64, opts: &GagliardoOptions) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let samples = opts.samples.max(1000);
        self.h_min = 1e-4 * 2.0 * big_l;
        let log_span = (2.0 * big_l / self.h_min).ln();
        let ball = unit_ball_volume(n) * big_l.powi(n as i32);
        let sphere = n as f64 * unit_ball_volume(n);
        let in_ball = |rng: &mut ChaCha8Rng| loop {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let r2: f64 = x.iter().map(|v| v * v).sum();
            if r2 <= 1.0 && r2 > 0.0 {
                return x;
            }
        };
        let w = ball * sphere * log_span / samples as f64;
        let start = self.entries.len();
        for _ in 0..samples {
            let x: Vec<f64> = in_ball(&mut rng).into_iter().map(|v| v * big_l).collect();
            let dir = in_ball(&mut rng);
            let norm = vec_norm(&dir);
            let h = self.h_min * (rng.random::<f64>() * log_span).exp();
            let y: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + h * d / norm).collect();
            let gx = grad(&x);
            let d = diff_norm(&grad(&y), &gx) / h.powf(self.sigma);
            let back: f64 = x.iter().zip(&dir).map(|(a, d)| (a - h * d / norm).powi(2)).sum::<f64>().sqrt();
            let d2 = if back > big_l { vec_norm(&gx) / h.powf(self.sigma) } else { 0.0 };
            // One entry per sample keeps the variance estimate per sample.
            self.entries.push((d, w));
            self.entries.push((d2, w));
            self.far.push((vec_norm(&gx), ball / samples as f64));
        }
        self.groups.push((1.0, 1.0, start, self.entries.len()));
        self.far_factor = 2.0 * sphere;
        self.far_scale = (2.0 * big_l).powf(-self.sigma);
        self.monte_carlo = true;
        self.samples = samples;
    }

    fn inner(&self, a: &YoungFunction, lam: f64, g: usize) -> f64 {
        let (_, _, s, e) = self.groups[g];
        self.entries[s..e].iter().map(|&(d, w)| if d > 0.0 { w * a.value(d / lam) } else { 0.0 }).sum()
    }

    /// `J(u/λ)` with error indicator and divergence flag.
    pub fn modular(&self, a: &YoungFunction, lam: f64) -> Modular {
        if self.vanishing {
            return Modular { value: 0.0, error: 0.0, divergent: false };
        }
        if self.unbounded {
            return Modular { value: f64::INFINITY, error: 0.0, divergent: true };
        }
        let mut total = 0.0;
        for (g, &(_, wh, _, _)) in self.groups.iter().enumerate() {
            total += wh * self.inner(a, lam, g);
        }
        let far: f64 = self.far.iter().map(|&(v, w)| w * log_primitive(a, v * self.far_scale / lam)).sum::<f64>()
            * self.far_factor
            / self.sigma;
        total += far;
        if self.monte_carlo {
            let n = self.samples as f64;
            let per: Vec<f64> = self
                .entries
                .chunks(2)
                .map(|c| c.iter().map(|&(d, w)| if d > 0.0 { w * a.value(d / lam) } else { 0.0 }).sum::<f64>() * n)
                .collect();
            let mean = per.iter().sum::<f64>() / n;
            let var = per.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            return Modular { value: total, error: (var / n).sqrt(), divergent: !total.is_finite() };
        }
        // Small-scale part ∫_0^{h_min} C h^{γ−1} dh from the two smallest h nodes.
        let (h1, h2) = (self.groups[0].0, self.groups[1].0);
        let (i1, i2) = (self.inner(a, lam, 0), self.inner(a, lam, 1));
        let tail = if i1 == 0.0 && i2 == 0.0 {
            0.0
        } else {
            let gamma = (i2 / i1).ln() / (h2 / h1).ln();
            if !(gamma > 1e-3) {
                return Modular { value: f64::INFINITY, error: f64::INFINITY, divergent: true };
            }
            i1 * (self.h_min / h1).powf(gamma) / gamma
        };
        total += tail;
        Modular { value: total, error: tail.abs(), divergent: !total.is_finite() }
    }
}

/// `J_{{s},A}(∇^{[s]}u/λ)`.
pub fn gagliardo_modular(
    u: &TestFunction,
    params: &EmbeddingParams,
    a: &YoungFunction,
    lambda: f64,
    opts: &GagliardoOptions,
) -> Result<Modular> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok(GagliardoCloud::build(u, params, opts)?.modular(a, lambda))
}

/// Seminorm with the error indicator of the modular at the solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeminormValue {
    pub value: f64,
    /// Relative uncertainty implied by the modular error.
    pub rel_error: f64,
    pub divergent: bool,
}

/// `|∇^{[s]}u|_{{s},A} = inf{λ : J(∇^{[s]}u/λ) ≤ 1}`.
pub fn fractional_seminorm(
    u: &TestFunction,
    params: &EmbeddingParams,
    a: &YoungFunction,
    opts: &GagliardoOptions,
) -> Result<SeminormValue> {
    let cloud = GagliardoCloud::build(u, params, opts)?;
    if cloud.vanishing {
        return Ok(SeminormValue { value: 0.0, rel_error: 0.0, divergent: false });
    }
    if cloud.unbounded {
        return Ok(SeminormValue { value: f64::INFINITY, rel_error: 0.0, divergent: true });
    }
    let value = luxemburg_from_modular(|lam| cloud.modular(a, lam).value, 1.0);
    if !value.is_finite() {
        return Ok(SeminormValue { value, rel_error: 0.0, divergent: true });
    }
    if value == 0.0 {
        return Ok(SeminormValue { value, rel_error: 0.0, divergent: false });
    }
    // λ·(slope of log J in log λ) converts a modular error to a norm error.
    let m = cloud.modular(a, value);
    let m2 = cloud.modular(a, value * 1.01);
    let dlog = ((m.value / m2.value).ln() / 1.01f64.ln()).abs().max(1.0);
    Ok(SeminormValue { value, rel_error: m.error / m.value.max(1e-300) / dlog, divergent: false })
}

// ------------------------------------------------------------------ experiments

/// `R(u) = campanato / fractional` over a ball family.
pub fn embedding_ratio_experiment(
    u: &TestFunction,
    params: &EmbeddingParams,
    a: &YoungFunction,
    gauge: &Gauge,
    balls: &BallFamily,
    opts: &GagliardoOptions,
) -> Result<ExperimentReport> {
    let mut rep = campanato_seminorm(u, gauge, params.k, balls, opts.level)?;
    rep.experiment = "ratio".into();
    rep.s = params.s;
    rep.seed = opts.seed;
    let frac = fractional_seminorm(u, params, a, opts)?;
    rep.fractional_seminorm = Some(frac.value);
    rep.fractional_error = Some(frac.rel_error);
    rep.divergent = frac.divergent;
    if frac.value > 0.0 && frac.value.is_finite() {
        rep.sup_ratio = Some(rep.campanato_seminorm / frac.value);
    }
    rep.notes.push("supremum over balls approximated by the given family".into());
    Ok(rep)
}

/// Per-ball optimality quotient for a candidate gauge `φ` on the first-order
/// path. Each ball `B` gets its own extremal `u_f`, `f = χ_{(0,|B|)}`, and the
/// lower bound `R_φ(B) = ⨍_B|u_f − (u_f)_B| / (φ(|B|^{1/n}) |u_f|_{s,A})` for
/// the embedding constant. The quotient is `R_φ(B) / max_B' R_{φ_{s,A}}(B')`.
pub fn optimality_experiment(
    params: &EmbeddingParams,
    a: &YoungFunction,
    gauge: &Gauge,
    balls: &BallFamily,
    opts: &GagliardoOptions,
) -> Result<ExperimentReport> {
    params.require_first_order()?;
    let phi_opt = phi_gauge(params, a)?;
    let n = params.n as f64;
    let mut rep = ExperimentReport::empty("optimality", params, opts.level, opts.seed);
    let mut optimal = Vec::new();
    for &r in &balls.radii {
        let measure = balls.measure(r);
        let f = StepFunction::indicator(measure)?;
        let u = make_uf(&f, params)?;
        let osc = ball_oscillation(&u, &balls.center, r, 0, opts.level)?;
        let frac = fractional_seminorm(&u, params, a, opts)?;
        if frac.divergent {
            rep.divergent = true;
        }
        let arg = measure.powf(1.0 / n);
        let g = gauge.eval(arg);
        optimal.push(osc / (phi_opt.eval(arg) * frac.value));
        rep.rows.push(BallRow {
            radius: r,
            measure,
            oscillation: osc,
            gauge: g,
            normalized: osc / (g * frac.value),
            quotient: None,
        });
    }
    let best = optimal.iter().copied().fold(0.0, f64::max);
    for row in rep.rows.iter_mut() {
        row.quotient = Some(row.normalized / best);
    }
    rep.campanato_seminorm = rep.rows.iter().map(|r| r.normalized).fold(0.0, f64::max);
    rep.notes.push("quotient = R_phi(B) / max R_phi_sA; tends to 0 when phi is not optimal".into());
    Ok(rep)
}

/// Unit-ball quotient `⨍_{B_1} |u_j − P^k[u_j]|` over a sweep of scales `j`
/// and its fitted log–log slope.
pub fn necessity_scaling_experiment(
    params: &EmbeddingParams,
    shape: &BumpShape,
    j_grid: &[f64],
    level: usize,
) -> Result<ExperimentReport> {
    if j_grid.len() < 2 {
        return Err(Error::Domain("the scale sweep needs at least two values of j".into()));
    }
    let mut rep = ExperimentReport::empty("necessity", params, level, 0);
    let center = vec![0.0; params.n];
    for &j in j_grid {
        let u = make_uj(shape, params, j)?;
        let q = ball_oscillation(&u, &center, 1.0, params.k, level)?;
        rep.series.push([j, q]);
    }
    let (x, y): (Vec<f64>, Vec<f64>) = rep.series.iter().map(|p| (p[0].ln(), p[1].ln())).unzip();
    rep.slope = Some(linear_fit(&x, &y).0);
    rep.campanato_seminorm = rep.series.iter().map(|p| p[1]).fold(0.0, f64::max);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauges::GaugeLabel;

    fn p(n: usize, s: f64, k: usize) -> EmbeddingParams {
        EmbeddingParams::new(n, s, k).unwrap()
    }

    fn one() -> Gauge {
        Gauge::new(GaugeLabel::User, |_| 1.0)
    }

    #[test]
    fn projection_examples() {
        let poly =
            Polynomial::new(2, vec![(vec![0, 0], 1.5), (vec![1, 0], -2.0), (vec![1, 1], 0.7), (vec![0, 2], 3.0)])
                .unwrap();
        let u = TestFunction::polynomial(poly.clone(), vec![0.0, 0.0]);
        let pr = polynomial_projection(&u, &[0.0, 0.0], 0.8, 2, 1).unwrap();
        for (b, c) in &poly.terms {
            let got = pr.poly.terms.iter().find(|(bb, _)| bb == b).map_or(0.0, |t| t.1);
            assert!((got - c).abs() < 1e-10, "{b:?}");
        }
        let again = polynomial_projection(&pr.to_test_function(), &[0.0, 0.0], 0.8, 2, 1).unwrap();
        for ((_, c1), (_, c2)) in pr.poly.terms.iter().zip(&again.poly.terms) {
            assert!((c1 - c2).abs() < 1e-12);
        }
        // k = 0 gives the ball mean; x₁ on the unit interval has mean 0.
        let x1 = TestFunction::polynomial(Polynomial::coordinate(1, 0), vec![0.0]);
        let m = polynomial_projection(&x1, &[0.0], 1.0, 0, 1).unwrap();
        assert!(m.poly.terms.iter().all(|(_, c)| c.abs() < 1e-14));
        let sq = TestFunction::polynomial(Polynomial::new(1, vec![(vec![2], 1.0)]).unwrap(), vec![0.0]);
        let m = polynomial_projection(&sq, &[0.0], 3.0, 0, 1).unwrap();
        assert!((m.eval(&[0.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn campanato_examples() {
        let x1 = TestFunction::polynomial(Polynomial::coordinate(1, 0), vec![0.0]);
        let balls = BallFamily::new(vec![0.0], vec![0.5, 2.0]).unwrap();
        let rep = campanato_seminorm(&x1, &one(), 0, &balls, 1).unwrap();
        for row in &rep.rows {
            assert!((row.oscillation - row.radius / 2.0).abs() < 1e-12);
        }
        let c = TestFunction::constant(1, 4.0);
        assert!(campanato_seminorm(&c, &one(), 0, &balls, 1).unwrap().campanato_seminorm < 1e-12);
        let rep = campanato_seminorm(&x1, &one(), 1, &balls, 1).unwrap();
        assert!(rep.campanato_seminorm < 1e-12);
        let doubled = campanato_seminorm(&x1, &one().scaled(2.0), 0, &balls, 1).unwrap();
        let plain = campanato_seminorm(&x1, &one(), 0, &balls, 1).unwrap();
        assert!((doubled.campanato_seminorm * 2.0 - plain.campanato_seminorm).abs() < 1e-14);
    }

    #[test]
    fn odd_functions_have_zero_mean() {
        let f = StepFunction::new(vec![0.5, 1.0], vec![2.0, 1.0]).unwrap();
        let v = crate::extremals::make_vf(&f, &p(2, 1.5, 0)).unwrap();
        assert!(v.is_odd_in_x1());
        let pr = polynomial_projection(&v, &[0.0, 0.0], 0.4, 0, 1).unwrap();
        assert!(pr.eval(&[0.0, 0.0]).abs() < 1e-12);
    }

    /// Brute-force midpoint double integral for the tent on `[−R, R]²` plus the
    /// exact contribution of pairs with one point outside.
    fn tent_brute_force(s: f64, m: usize) -> f64 {
        let big_r = 3.0;
        let h = 2.0 * big_r / m as f64;
        let u = |x: f64| (1.0 - x.abs()).max(0.0);
        let mut acc = 0.0;
        for i in 0..m {
            let x = -big_r + (i as f64 + 0.5) * h;
            for j in 0..m {
                if i == j {
                    continue;
                }
                let y = -big_r + (j as f64 + 0.5) * h;
                let d = u(x) - u(y);
                acc += d * d / (x - y).abs().powf(1.0 + 2.0 * s) * h * h;
            }
        }
        // Outside: 2 ∫_{-1}^{1} u(x)² ∫_{|y|>R} |x−y|^{-1-2s} dy dx.
        let outer = |x: f64| {
            let e = 2.0 * s;
            ((big_r - x).powf(-e) + (big_r + x).powf(-e)) / e
        };
        acc + 2.0 * integrate(&|x: f64| u(x) * u(x) * outer(x), -1.0, 1.0, Tol::rel(1e-12)).value
    }

    #[test]
    fn tent_modular_matches_brute_force() {
        let s = 0.25;
        let pr = p(1, s, 0);
        let u = TestFunction::tent(1.0).unwrap();
        let a2 = YoungFunction::power(2.0);
        let j = gagliardo_modular(&u, &pr, &a2, 1.0, &GagliardoOptions::default()).unwrap();
        for m in [300, 600, 1200] {
            let bf = tent_brute_force(s, m);
            assert!((bf - j.value).abs() < 0.02 * j.value, "m={m}: {bf} vs {}", j.value);
        }
        // The seminorm is the square root of the unit modular for A = t².
        let sn = fractional_seminorm(&u, &pr, &a2, &GagliardoOptions::default()).unwrap();
        assert!((sn.value - j.value.sqrt()).abs() < 1e-6 * sn.value);
    }

    #[test]
    fn seminorm_basic_properties() {
        let pr = p(1, 0.5, 0);
        let a = YoungFunction::power(3.0);
        let u = TestFunction::tent(0.7).unwrap();
        let opts = GagliardoOptions { level: 1, ..Default::default() };
        let one_ = fractional_seminorm(&u, &pr, &a, &opts).unwrap().value;
        let two = fractional_seminorm(&u.scaled(2.0), &pr, &a, &opts).unwrap().value;
        assert!((two - 2.0 * one_).abs() < 1e-3 * two);
        assert_eq!(fractional_seminorm(&TestFunction::constant(1, 3.0), &pr, &a, &opts).unwrap().value, 0.0);
        let cloud = GagliardoCloud::build(&u, &pr, &opts).unwrap();
        let mut prev = f64::INFINITY;
        for lam in logspace(0.1, 10.0, 9) {
            let m = cloud.modular(&a, lam).value;
            assert!(m <= prev);
            prev = m;
        }
        let lin = TestFunction::polynomial(Polynomial::coordinate(1, 0), vec![0.0]);
        assert!(fractional_seminorm(&lin, &pr, &a, &opts).unwrap().divergent);
    }

    #[test]
    fn higher_order_seminorm_uses_the_derivative() {
        // For s = 1.5 the seminorm acts on u', here the derivative of the tent's
        // antiderivative is the tent itself.
        let a = YoungFunction::power(2.0);
        let opts = GagliardoOptions { level: 1, ..Default::default() };
        let f = StepFunction::new(vec![0.6, 1.0], vec![1.5, 0.5]).unwrap();
        let v = crate::extremals::make_vf(&f, &p(1, 1.5, 0)).unwrap();
        let sv = fractional_seminorm(&v, &p(1, 1.5, 0), &a, &opts).unwrap();
        assert!(sv.value.is_finite() && sv.value > 0.0);
        let sv2 = fractional_seminorm(&v.scaled(3.0), &p(1, 1.5, 0), &a, &opts).unwrap();
        assert!((sv2.value - 3.0 * sv.value).abs() < 1e-3 * sv2.value);
    }

    #[test]
    fn plane_and_monte_carlo_paths_run() {
        let a = YoungFunction::power(2.0);
        let shape = BumpShape::for_order(2, 0).unwrap();
        let u = make_uj(&shape, &p(2, 0.5, 0), 1.0).unwrap();
        let opts = GagliardoOptions { level: 1, ..Default::default() };
        let s2 = fractional_seminorm(&u, &p(2, 0.5, 0), &a, &opts).unwrap();
        let s2b = fractional_seminorm(&u.scaled(2.0), &p(2, 0.5, 0), &a, &opts).unwrap();
        assert!((s2b.value - 2.0 * s2.value).abs() < 1e-3 * s2b.value);
        let u3 = make_uj(&BumpShape::for_order(3, 0).unwrap(), &p(3, 0.5, 0), 1.0).unwrap();
        let opts3 = GagliardoOptions { level: 1, seed: 7, samples: 20_000 };
        let m = gagliardo_modular(&u3, &p(3, 0.5, 0), &a, 1.0, &opts3).unwrap();
        assert!(m.value.is_finite() && m.error > 0.0 && m.error < m.value);
        let again = gagliardo_modular(&u3, &p(3, 0.5, 0), &a, 1.0, &opts3).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn ratio_halves_with_doubled_gauge() {
        let pr = p(1, 0.5, 0);
        let a = YoungFunction::power(2.0);
        let u = make_uf(&StepFunction::indicator(1.0).unwrap(), &pr).unwrap();
        let balls = BallFamily::geometric(1, 0.05, 1.0, 4).unwrap();
        let opts = GagliardoOptions { level: 1, ..Default::default() };
        let g = phi_gauge(&pr, &a).unwrap();
        let r1 = embedding_ratio_experiment(&u, &pr, &a, &g, &balls, &opts).unwrap();
        let r2 = embedding_ratio_experiment(&u, &pr, &a, &g.scaled(2.0), &balls, &opts).unwrap();
        assert!((r1.sup_ratio.unwrap() - 2.0 * r2.sup_ratio.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn necessity_examples() {
        let js: Vec<f64> = [2.0, 4.0, 8.0, 16.0].to_vec();
        let pr = p(2, 1.5, 0);
        let shape = BumpShape::for_order(2, 0).unwrap();
        let rep = necessity_scaling_experiment(&pr, &shape, &js, 1).unwrap();
        assert!((rep.slope.unwrap() - (1.5 - 3.0)).abs() < 0.1);
        let doubled = BumpShape::new(Polynomial::new(2, vec![(vec![1, 0], 2.0)]).unwrap()).unwrap();
        let rep2 = necessity_scaling_experiment(&pr, &doubled, &js, 1).unwrap();
        for (a, b) in rep.series.iter().zip(&rep2.series) {
            assert!((b[1] - 2.0 * a[1]).abs() < 1e-10 * b[1]);
        }
        let rep = necessity_scaling_experiment(&p(1, 2.5, 0), &BumpShape::for_order(1, 0).unwrap(), &js, 1).unwrap();
        assert!((rep.slope.unwrap() - 0.5).abs() < 0.1);
    }

    #[test]
    fn poincare_constant_is_stable() {
        let u = make_uj(&BumpShape::for_order(2, 1).unwrap(), &p(2, 2.5, 1), 1.0).unwrap();
        let balls = BallFamily::geometric(2, 0.05, 0.4, 5).unwrap();
        for k in [1, 2] {
            let cs = poincare_constants(&u, k, &balls, 1).unwrap();
            let (lo, hi) = cs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &c| (a.min(c), b.max(c)));
            assert!(lo > 0.0 && hi / lo < 3.0, "k={k}: {cs:?}");
        }
    }
}
