//! Optimal Campanato gauges `φ_{s,A}`, `ψ_{s,A}`, `ψ^k_{s,A}`, the integral
//! conditions that make them available, BMO/VMO criteria and Spanne moduli.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::{linear_fit, loglog_slope, logspace};
use crate::quad::{integrate, integrate_from_zero, integrate_log, integrate_to_infinity, Tol};
use crate::young::{conjugate_asym, Asym, End, Ext, Interp, Kind, YoungFunction};

/// Half-width of the zone around the critical exponent `−1` in which a
/// numerically estimated slope yields no verdict.
pub const INDETERMINATE_HALF_WIDTH: f64 = 0.05;

/// Grid on which `F` and `F_k` are tabulated.
pub const F_GRID: (f64, f64, usize) = (1e-9, 1e9, 512);

/// Names of the hypotheses checked by this module.
pub mod condition {
    pub const FIRST_ORDER_RANGE: &str = "s in (0, 1)";
    pub const HIGHER_ORDER_RANGE: &str = "s in (1, n+1) minus the integers";
    pub const ORDER_K_RANGE: &str = "s in (1, n+k+1) minus the integers";
    pub const CAMPANATO_ORDER: &str = "k in {0, ..., [s]}";
    pub const SMALL_SCALE_INTEGRABILITY: &str = "integral near 0 of (t/A(t))^((s-1)/(n+1-s)) is finite";
    pub const SMALL_SCALE_INTEGRABILITY_K: &str = "integral near 0 of (t/A(t))^((s-k-1)/(n-s+k+1)) is finite";
}

/// Dimension `n`, smoothness `s` and Campanato order `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    pub n: usize,
    pub s: f64,
    #[serde(default)]
    pub k: usize,
}

fn is_integer(s: f64) -> bool {
    (s - s.round()).abs() < 1e-12
}

impl EmbeddingParams {
    /// Validated parameters: `n ≥ 1`, `s > 0` not an integer, `k ≤ [s]`.
    pub fn new(n: usize, s: f64, k: usize) -> Result<Self> {
        let p = EmbeddingParams { n, s, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("dimension n must be positive".into()));
        }
        if !(self.s.is_finite() && self.s > 0.0) {
            return Err(Error::Domain(format!("smoothness s must be positive, got {}", self.s)));
        }
        if is_integer(self.s) {
            return Err(Error::Domain(format!("smoothness s must not be an integer, got {}", self.s)));
        }
        if self.k > self.int_part() {
            return Err(Error::precondition(
                condition::CAMPANATO_ORDER,
                format!("k = {} exceeds [s] = {}", self.k, self.int_part()),
            ));
        }
        Ok(())
    }

    /// `[s]`.
    pub fn int_part(&self) -> usize {
        self.s.floor() as usize
    }

    /// `{s} = s − [s]`.
    pub fn frac_part(&self) -> f64 {
        self.s - self.s.floor()
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn require_first_order(&self) -> Result<()> {
        if self.s > 0.0 && self.s < 1.0 {
            Ok(())
        } else {
            Err(Error::precondition(condition::FIRST_ORDER_RANGE, format!("s = {}", self.s)))
        }
    }

    pub fn require_higher_order(&self) -> Result<()> {
        if self.s > 1.0 && self.s < self.nf() + 1.0 && !is_integer(self.s) {
            Ok(())
        } else {
            Err(Error::precondition(condition::HIGHER_ORDER_RANGE, format!("s = {}, n = {}", self.s, self.n)))
        }
    }

    /// Range condition for the order-`k` gauge built from `F_k` (`k < [s]`).
    pub fn require_order_k(&self, k: usize) -> Result<()> {
        if k >= self.int_part().max(1) && !(k == 0 && self.s > 1.0) {
            return Err(Error::Domain(format!("k = {k} must be below [s] = {}", self.int_part())));
        }
        let kf = k as f64;
        if self.s > 1.0 && self.s < self.nf() + kf + 1.0 && !is_integer(self.s) {
            Ok(())
        } else {
            Err(Error::precondition(condition::ORDER_K_RANGE, format!("s = {}, n = {}, k = {k}", self.s, self.n)))
        }
    }

    /// `s/(n−s)`, the exponent of the first-order integrability condition.
    pub fn exponent_first_order(&self) -> f64 {
        self.s / (self.nf() - self.s)
    }

    /// `(s−k−1)/(n−s+k+1)`; `k = 0` gives the condition behind `F`.
    pub fn exponent_order_k(&self, k: usize) -> f64 {
        let sk = self.s - (k as f64 + 1.0);
        sk / (self.nf() - sk)
    }
}

// ------------------------------------------------------------------ verdicts

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Convergent,
    Divergent,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Convergent => "convergent",
            Verdict::Divergent => "divergent",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExponentAnalysis,
    QuadratureExtrapolation,
}

/// Which of the two equivalent integrals is tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralForm {
    /// `∫ (t/A(t))^e dt`.
    PowerOfTOverA,
    /// `∫ Ã(t)/t^{2+e} dt`.
    DualTail,
}

/// Verdict on the convergence of an integral at one end, with evidence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub verdict: Verdict,
    pub method: Method,
    /// Power `γ` of the integrand `≈ t^γ (log)^β` (estimated when numeric).
    pub exponent: Option<f64>,
    pub log_power: Option<f64>,
    /// Cumulative integrals over successive decades (numeric method only).
    pub partial_sums: Vec<f64>,
}

impl ConvergenceVerdict {
    fn symbolic(verdict: Verdict, exponent: Option<f64>, log_power: Option<f64>) -> Self {
        ConvergenceVerdict { verdict, method: Method::ExponentAnalysis, exponent, log_power, partial_sums: Vec::new() }
    }
}

/// Behaviour of an integrand at one end of `(0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq)]
enum IntegrandClass {
    Zero,
    Infinite,
    /// `t^γ (log t)^β`, with `log(1/t)` near zero.
    Regular(f64, f64),
}

fn decide(class: IntegrandClass, end: End) -> ConvergenceVerdict {
    match class {
        IntegrandClass::Zero => ConvergenceVerdict::symbolic(Verdict::Convergent, None, None),
        IntegrandClass::Infinite => ConvergenceVerdict::symbolic(Verdict::Divergent, None, None),
        IntegrandClass::Regular(g, b) => {
            let critical_ok = g == -1.0 && b < -1.0;
            let ok = match end {
                End::Zero => g > -1.0 || critical_ok,
                End::Infinity => g < -1.0 || critical_ok,
            };
            let v = if ok { Verdict::Convergent } else { Verdict::Divergent };
            ConvergenceVerdict::symbolic(v, Some(g), Some(b))
        }
    }
}

/// Decides convergence of `∫ f` near `end` from decade increments over
/// `decades` decades starting at `t = 1`.
pub fn classify_numeric(f: &dyn Fn(f64) -> f64, end: End, decades: usize) -> ConvergenceVerdict {
    let tol = Tol::rel(1e-8);
    let mut increments = Vec::with_capacity(decades);
    let mut partial = Vec::with_capacity(decades);
    let mut total = 0.0;
    for j in 0..decades {
        let (lo, hi) = match end {
            End::Infinity => (10f64.powi(j as i32), 10f64.powi(j as i32 + 1)),
            End::Zero => (10f64.powi(-(j as i32) - 1), 10f64.powi(-(j as i32))),
        };
        let q = integrate_log(f, lo, hi, tol).value;
        total += q;
        increments.push(q);
        partial.push(total);
    }
    let numeric = |verdict, exponent| ConvergenceVerdict {
        verdict,
        method: Method::QuadratureExtrapolation,
        exponent,
        log_power: None,
        partial_sums: partial.clone(),
    };
    if increments.iter().any(|v| !v.is_finite()) {
        return numeric(Verdict::Divergent, None);
    }
    let tail = &increments[decades / 2..];
    if tail.iter().all(|&v| v == 0.0) {
        return numeric(Verdict::Convergent, None);
    }
    let pts: Vec<(f64, f64)> =
        tail.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(i, v)| (i as f64, v.log10())).collect();
    if pts.len() < 3 {
        return numeric(Verdict::Indeterminate, None);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    // Increments scale like 10^{±j(γ+1)}; `sigma` < 0 means geometric decay.
    let (sigma, _) = linear_fit(&xs, &ys);
    let gamma = match end {
        End::Infinity => sigma - 1.0,
        End::Zero => -sigma - 1.0,
    };
    let verdict = if sigma < -INDETERMINATE_HALF_WIDTH {
        Verdict::Convergent
    } else if sigma > INDETERMINATE_HALF_WIDTH || tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-6)) {
        // Growing or non-shrinking increments.
        Verdict::Divergent
    } else {
        Verdict::Indeterminate
    };
    numeric(verdict, Some(gamma))
}

fn integrand_class(a: &YoungFunction, exponent: f64, end: End, form: IntegralForm) -> Option<IntegrandClass> {
    let class = a.asymptotic(end)?;
    match form {
        IntegralForm::PowerOfTOverA => Some(match class {
            Asym::Vanishing => IntegrandClass::Infinite,
            Asym::Infinite => IntegrandClass::Zero,
            Asym::Regular { power, log_power } => {
                IntegrandClass::Regular((1.0 - power) * exponent, -log_power * exponent)
            }
        }),
        IntegralForm::DualTail => Some(match conjugate_asym(class, end)? {
            Asym::Vanishing => IntegrandClass::Zero,
            Asym::Infinite => IntegrandClass::Infinite,
            Asym::Regular { power, log_power } => IntegrandClass::Regular(power - 2.0 - exponent, log_power),
        }),
    }
}

/// Classifies `∫ (t/A)^e` or `∫ Ã/t^{2+e}` near `end`: exponent analysis of
/// the asymptotic class first, decade-increment extrapolation otherwise.
pub fn check_integral_condition(
    a: &YoungFunction,
    exponent: f64,
    end: End,
    form: IntegralForm,
) -> Result<ConvergenceVerdict> {
    if !exponent.is_finite() {
        return Err(Error::Domain(format!("integrability exponent must be finite, got {exponent}")));
    }
    if let Some(class) = integrand_class(a, exponent, end, form) {
        return Ok(decide(class, end));
    }
    check_integral_condition_numeric(a, exponent, end, form)
}

/// The quadrature-extrapolation tier alone, for cross-checking.
pub fn check_integral_condition_numeric(
    a: &YoungFunction,
    exponent: f64,
    end: End,
    form: IntegralForm,
) -> Result<ConvergenceVerdict> {
    const DECADES: usize = 24;
    Ok(match form {
        IntegralForm::PowerOfTOverA => {
            let f = |t: f64| {
                let v = a.value(t);
                if v == 0.0 {
                    f64::INFINITY
                } else {
                    (t / v).powf(exponent)
                }
            };
            classify_numeric(&f, end, DECADES)
        }
        IntegralForm::DualTail => {
            let f = |t: f64| a.conjugate_at(t) / t.powf(2.0 + exponent);
            classify_numeric(&f, end, DECADES)
        }
    })
}

// ------------------------------------------------------------------ gauges

/// Provenance of a gauge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeLabel {
    #[serde(rename = "phi_sA")]
    PhiSA,
    #[serde(rename = "psi_sA")]
    PsiSA,
    PsiK,
    Spanne,
    User,
}

/// Result of the admissibility grid check `inf_{[a,∞)} φ > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// Smallest value on the grid.
    pub min: f64,
    /// Log–log slope over the last two grid decades (informational).
    pub tail_slope: f64,
}

/// A positive function of `r > 0` used as a Campanato normalizer.
#[derive(Clone)]
pub struct Gauge {
    pub label: GaugeLabel,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    exact_range: (f64, f64),
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gauge").field("label", &self.label).field("exact_range", &self.exact_range).finish()
    }
}

impl Gauge {
    pub fn new(label: GaugeLabel, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Gauge { label, eval: Arc::new(f), exact_range: (0.0, f64::INFINITY) }
    }

    fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.exact_range = (lo, hi);
        self
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }

    /// Value and whether `r` lies outside the tabulated range (edge-exponent
    /// extrapolation).
    pub fn eval_flagged(&self, r: f64) -> (f64, bool) {
        (self.eval(r), r < self.exact_range.0 || r > self.exact_range.1)
    }

    pub fn exact_range(&self) -> (f64, f64) {
        self.exact_range
    }

    /// `c·φ`.
    pub fn scaled(&self, c: f64) -> Gauge {
        let g = self.eval.clone();
        Gauge { label: self.label, eval: Arc::new(move |r| c * g(r)), exact_range: self.exact_range }
    }

    /// `φ·w` for a positive weight `w`, labelled as a user gauge.
    pub fn weighted(&self, w: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Gauge {
        let g = self.eval.clone();
        Gauge { label: GaugeLabel::User, eval: Arc::new(move |r| g(r) * w(r)), exact_range: self.exact_range }
    }

    pub fn table(&self, radii: &[f64]) -> Vec<(f64, f64)> {
        radii.iter().map(|&r| (r, self.eval(r))).collect()
    }

    /// Grid check of `inf_{r ∈ [a,∞)} φ(r) > 0` for every grid point `a`.
    pub fn admissibility(&self, radii: &[f64]) -> Admissibility {
        let vals: Vec<f64> = radii.iter().map(|&r| self.eval(r)).collect();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let admissible = vals.iter().all(|v| v.is_finite() && *v > 0.0);
        let m = radii.len();
        let tail_slope = if m >= 3 {
            let top = radii[m - 1];
            let (x, y): (Vec<f64>, Vec<f64>) =
                radii.iter().zip(&vals).filter(|(r, v)| **r >= top / 100.0 && **v > 0.0).map(|(r, v)| (*r, *v)).unzip();
            if x.len() >= 2 {
                loglog_slope(&x, &y)
            } else {
                f64::NAN
            }
        } else {
            f64::NAN
        };
        Admissibility { admissible, min, tail_slope }
    }
}

/// `φ_{s,A}(r) = r^s A^{-1}(r^{-n})`.
pub fn phi_sa(params: &EmbeddingParams, a: &YoungFunction, r: f64) -> Result<f64> {
    params.require_first_order()?;
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    Ok(r.powf(params.s) * a.inv(r.powf(-params.nf())))
}

pub fn phi_gauge(params: &EmbeddingParams, a: &YoungFunction) -> Result<Gauge> {
    params.require_first_order()?;
    let (n, s, a) = (params.nf(), params.s, a.clone());
    Ok(Gauge::new(GaugeLabel::PhiSA, move |r| r.powf(s) * a.inv(r.powf(-n))))
}

/// `F_k(t) = t^q ∫_0^t Ã(τ) τ^{-1-q} dτ`, `q = n/(n−s+k+1)`, tabulated on a
/// log grid with power-law edge extension.
pub fn build_fk(params: &EmbeddingParams, a: &YoungFunction, k: usize) -> Result<YoungFunction> {
    params.require_order_k(k)?;
    let e = params.exponent_order_k(k);
    let name = if k == 0 { condition::SMALL_SCALE_INTEGRABILITY } else { condition::SMALL_SCALE_INTEGRABILITY_K };
    let v = check_integral_condition(a, e, End::Zero, IntegralForm::PowerOfTOverA)?;
    match v.verdict {
        Verdict::Convergent => {}
        Verdict::Divergent => {
            return Err(Error::precondition(
                name,
                format!("the integral diverges (integrand exponent {:?})", v.exponent),
            ))
        }
        Verdict::Indeterminate => return Err(Error::Indeterminate(format!("cannot decide `{name}`"))),
    }
    let at = a.conjugate()?;
    let q = params.nf() / (params.nf() - params.s + k as f64 + 1.0);
    tabulate_f(&at, q)
}

/// `F = F_0`, the Young function behind `ψ_{s,A}`.
pub fn build_f(params: &EmbeddingParams, a: &YoungFunction) -> Result<YoungFunction> {
    build_fk(params, a, 0)
}

fn tabulate_f(at: &YoungFunction, q: f64) -> Result<YoungFunction> {
    let (lo, hi, m) = F_GRID;
    let grid = logspace(lo, hi, m);
    let cap = at.finite_limit();
    if cap <= grid[1] {
        return Err(Error::Numerical(format!("conjugate is infinite beyond {cap}, below the F grid")));
    }
    let integrand = |tau: f64| at.value(tau) * tau.powf(-1.0 - q);
    let tol = Tol::rel(1e-11);
    let head = integrate_from_zero(&integrand, grid[0], tol, 1e-9);
    if !head.converged {
        return Err(Error::Numerical("the integral defining F does not converge at 0".into()));
    }
    let mut g = head.value;
    let mut knots = vec![grid[0]];
    let mut values = vec![Ext::Finite(g * grid[0].powf(q))];
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 >= cap {
            g += integrate(&integrand, t0, cap, tol).value;
            if cap > t0 {
                knots.push(cap);
                values.push(Ext::Finite(g * cap.powf(q)));
            }
            knots.push(cap * 2.0);
            values.push(Ext::Infinite);
            break;
        }
        g += integrate(&integrand, t0, t1, tol).value;
        knots.push(t1);
        values.push(Ext::Finite(g * t1.powf(q)));
    }
    let f = YoungFunction::new(Kind::Tabulated { knots, values, interp: Interp::LogLog });
    f.validate().map_err(|e| Error::Numerical(format!("tabulated F failed validation: {e}")))?;
    Ok(f)
}

/// `ψ^k_{s,A}` with `k = params.k`: through `F_k` for `k < [s]`, the closed
/// form `r^{{s}} A^{-1}(r^{-n})` for `k = [s]`. `k = 0` is `ψ_{s,A}`.
pub fn psi_k_gauge(params: &EmbeddingParams, a: &YoungFunction) -> Result<Gauge> {
    params.validate()?;
    let (n, s, k) = (params.nf(), params.s, params.k);
    if k == params.int_part() {
        if s < 1.0 {
            return Err(Error::precondition(condition::HIGHER_ORDER_RANGE, format!("s = {s}")));
        }
        let (fs, a) = (params.frac_part(), a.clone());
        return Ok(Gauge::new(GaugeLabel::PsiK, move |r| r.powf(fs) * a.inv(r.powf(-n))));
    }
    let f = build_fk(params, a, k)?;
    let label = if k == 0 { GaugeLabel::PsiSA } else { GaugeLabel::PsiK };
    let (y_lo, y_hi) = (f.value(F_GRID.0), f.value(F_GRID.1));
    // r^{-n} ∈ [y_lo, y_hi]  ⟺  r ∈ [y_hi^{-1/n}, y_lo^{-1/n}].
    let range = (y_hi.powf(-1.0 / n), if y_lo > 0.0 { y_lo.powf(-1.0 / n) } else { f64::INFINITY });
    let expo = n - s + k as f64;
    Ok(Gauge::new(label, move |r| 1.0 / (r.powf(expo) * f.inv(r.powf(-n)))).with_range(range.0, range.1))
}

/// `ψ_{s,A}(r) = 1/(r^{n−s} F^{-1}(r^{-n}))`.
pub fn psi_gauge(params: &EmbeddingParams, a: &YoungFunction) -> Result<Gauge> {
    params.require_higher_order()?;
    psi_k_gauge(&EmbeddingParams { k: 0, ..*params }, a)
}

pub fn psi_sa(params: &EmbeddingParams, a: &YoungFunction, r: f64) -> Result<f64> {
    Ok(psi_gauge(params, a)?.eval(r))
}

/// The conjugate-side expression of `ψ^k_{s,A}`, equivalent up to a factor 2:
/// `r^{s−k} F̃_k^{-1}(r^{-n})` for `k < [s]`, `r^{{s}−n}/Ã^{-1}(r^{-n})` for `k = [s]`.
pub fn psi_k_alternative(params: &EmbeddingParams, a: &YoungFunction) -> Result<Gauge> {
    params.validate()?;
    let (n, s, k) = (params.nf(), params.s, params.k);
    if k == params.int_part() {
        let fs = params.frac_part();
        let at = a.conjugate()?;
        return Ok(Gauge::new(GaugeLabel::User, move |r| r.powf(fs - n) / at.inv(r.powf(-n))));
    }
    let ft = build_fk(params, a, k)?.conjugate()?;
    let expo = s - k as f64;
    Ok(Gauge::new(GaugeLabel::User, move |r| r.powf(expo) * ft.inv(r.powf(-n))))
}

// ------------------------------------------------------------------ BMO / VMO

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    Indeterminate,
}

impl Decision {
    fn from_bool(b: bool) -> Self {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }
}

/// Embedding into BMO and uniform embedding into VMO.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BmoVmo {
    pub bmo: Decision,
    pub vmo: Decision,
    /// Grid constant: `inf A(t)/t^{n/s}` for `s < 1`, `sup G(t)/t^m` for `1 < s < n`.
    pub constant: Option<f64>,
    /// Which criterion was applied.
    pub criterion: String,
}

/// `t^a (log)^b` comparison against `t^e`: sign of the growth of the ratio
/// `t^{a−e} (log)^b` at `end` (`+1` → ∞, `0` → bounded away from 0 and ∞, `−1` → 0).
fn ratio_trend(power: f64, log_power: f64, e: f64, end: End) -> i32 {
    let d = power - e;
    let tol = 1e-12;
    let sign = |x: f64| {
        if x > 0.0 {
            1
        } else if x < 0.0 {
            -1
        } else {
            0
        }
    };
    if d.abs() > tol {
        match end {
            End::Infinity => sign(d),
            End::Zero => -sign(d),
        }
    } else {
        sign(log_power)
    }
}

/// BMO/VMO criteria: `A(t) ≳ t^{n/s}` (and `→ ∞` relative to it) for
/// `s < 1`; the growth bound on `∫_0^t Ã/τ^{1+n/(n−s+1)}` for `1 < s < n`;
/// `A(t) ≳ t` near zero for `s = n`; no embedding for `n < s < n+1`.
pub fn bmo_vmo_verdict(params: &EmbeddingParams, a: &YoungFunction) -> Result<BmoVmo> {
    let (n, s) = (params.nf(), params.s);
    if params.n == 0 || !(s > 0.0) {
        return Err(Error::Domain("n must be positive and s > 0".into()));
    }
    if s < 1.0 {
        let e = n / s;
        let grid = logspace(1e-12, 1e12, 241);
        let ratios: Vec<f64> = grid.iter().map(|&t| a.value(t) / t.powf(e)).collect();
        let c = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let (z, i) = (a.asymptotic(End::Zero), a.asymptotic(End::Infinity));
        let (bmo, vmo) = match (z, i) {
            (Some(z), Some(i)) => {
                let zero_ok = match z {
                    Asym::Vanishing => false,
                    Asym::Infinite => true,
                    Asym::Regular { power, log_power } => ratio_trend(power, log_power, e, End::Zero) >= 0,
                };
                let (inf_ok, inf_grows) = match i {
                    Asym::Infinite => (true, true),
                    Asym::Vanishing => (false, false),
                    Asym::Regular { power, log_power } => {
                        let t = ratio_trend(power, log_power, e, End::Infinity);
                        (t >= 0, t > 0)
                    }
                };
                let bmo = zero_ok && inf_ok && c > 0.0;
                (Decision::from_bool(bmo), Decision::from_bool(bmo && inf_grows))
            }
            _ => numeric_ratio_decision(&grid, &ratios),
        };
        return Ok(BmoVmo {
            bmo,
            vmo,
            constant: (c > 0.0 && c.is_finite()).then_some(c),
            criterion: "A(t)/t^(n/s) bounded below; VMO needs it to diverge at infinity".into(),
        });
    }
    if s > n && s < n + 1.0 {
        return Ok(BmoVmo {
            bmo: Decision::No,
            vmo: Decision::No,
            constant: None,
            criterion: "n < s < n+1 admits no BMO embedding".into(),
        });
    }
    if is_integer(s) && (s - n).abs() < 1e-12 && s > 1.0 {
        let ok = match a.asymptotic(End::Zero) {
            Some(Asym::Regular { power, log_power }) => power == 1.0 && log_power >= 0.0,
            Some(Asym::Infinite) => true,
            Some(Asym::Vanishing) => false,
            None => {
                let ts = logspace(1e-12, 1e-6, 7);
                let r: Vec<f64> = ts.iter().map(|&t| a.value(t) / t).collect();
                r.iter().all(|&v| v > 0.0) && loglog_slope(&ts, &r).abs() < INDETERMINATE_HALF_WIDTH
            }
        };
        let d = Decision::from_bool(ok);
        return Ok(BmoVmo { bmo: d, vmo: d, constant: None, criterion: "A(t) >= c t near 0 (s = n)".into() });
    }
    params.require_higher_order()?;
    // 1 < s < n: compare Ã with t^{n/(n−s)} at both ends.
    let e = n / (n - s);
    let hp = EmbeddingParams { k: 0, ..*params };
    let f = match build_f(&hp, a) {
        Ok(f) => f,
        Err(Error::Precondition { .. }) => {
            return Ok(BmoVmo {
                bmo: Decision::No,
                vmo: Decision::No,
                constant: None,
                criterion: condition::SMALL_SCALE_INTEGRABILITY.into(),
            })
        }
        Err(e) => return Err(e),
    };
    let q = n / (n - s + 1.0);
    let m = n / ((n - s) * (n - s + 1.0));
    let grid = logspace(F_GRID.0, F_GRID.1, 181);
    let ratios: Vec<f64> = grid.iter().map(|&t| f.value(t) / t.powf(q) / t.powf(m)).collect();
    let sup = ratios.iter().copied().fold(0.0, f64::max);
    let conj = |end| a.asymptotic(end).and_then(|c| conjugate_asym(c, end));
    let (bmo, vmo) = match (conj(End::Zero), conj(End::Infinity)) {
        (Some(z), Some(i)) => {
            let zero_ok = match z {
                Asym::Vanishing => true,
                Asym::Infinite => false,
                Asym::Regular { power, log_power } => ratio_trend(power, log_power, e, End::Zero) <= 0,
            };
            let (inf_ok, inf_vanish) = match i {
                Asym::Infinite => (false, false),
                Asym::Vanishing => (true, true),
                Asym::Regular { power, log_power } => {
                    let t = ratio_trend(power, log_power, e, End::Infinity);
                    (t <= 0, t < 0)
                }
            };
            (Decision::from_bool(zero_ok && inf_ok), Decision::from_bool(zero_ok && inf_ok && inf_vanish))
        }
        _ => {
            let inv: Vec<f64> = ratios.iter().map(|r| 1.0 / r).collect();
            numeric_ratio_decision(&grid, &inv)
        }
    };
    Ok(BmoVmo {
        bmo,
        vmo,
        constant: (bmo == Decision::Yes).then_some(sup),
        criterion: "integral of conj(A)/t^(1+n/(n-s+1)) on (0,t) is O(t^(n/((n-s)(n-s+1))))".into(),
    })
}

/// Decision from sampled ratios that must stay bounded below (BMO) and
/// diverge at the right end (VMO).
fn numeric_ratio_decision(grid: &[f64], ratios: &[f64]) -> (Decision, Decision) {
    let m = grid.len();
    let w = m / 12;
    let slope_at = |lo: usize, hi: usize| {
        let (x, y): (Vec<f64>, Vec<f64>) = grid[lo..hi]
            .iter()
            .zip(&ratios[lo..hi])
            .filter(|(_, r)| **r > 0.0 && r.is_finite())
            .map(|(t, r)| (*t, *r))
            .unzip();
        if x.len() < 2 {
            f64::NAN
        } else {
            loglog_slope(&x, &y)
        }
    };
    let (s0, s1) = (slope_at(0, w), slope_at(m - w, m));
    if ratios.iter().any(|&r| r <= 0.0) || s0 > INDETERMINATE_HALF_WIDTH || s1 < -INDETERMINATE_HALF_WIDTH {
        return (Decision::No, Decision::No);
    }
    if s0.is_nan() || s1.is_nan() || s0.abs() <= INDETERMINATE_HALF_WIDTH && s0 != 0.0 {
        return (Decision::Indeterminate, Decision::Indeterminate);
    }
    let vmo = if s1 > INDETERMINATE_HALF_WIDTH {
        Decision::Yes
    } else if s1.abs() < 1e-9 {
        Decision::No
    } else {
        Decision::Indeterminate
    };
    (Decision::Yes, vmo)
}

// ------------------------------------------------------------------ Spanne

/// `∫_0^r φ(ρ)/ρ dρ` for a general gauge, computed in `u = log(1/ρ)`.
pub fn dini_integral(g: &Gauge, r: f64) -> crate::quad::Improper {
    let f = |u: f64| g.eval((-u).exp().max(f64::MIN_POSITIVE));
    let tol = Tol::rel(1e-10);
    let mut head = 0.0;
    let mut u0 = -r.ln();
    if r > 1.0 {
        head += integrate_log(&|rho: f64| g.eval(rho) / rho, 1.0, r, tol).value;
        u0 = 0.0;
    }
    head += integrate(&f, u0, u0 + 1.0, tol).value;
    let mut tail = integrate_to_infinity(&f, u0 + 1.0, tol, 1e-6);
    tail.value += head;
    tail
}

/// Feasibility of the Spanne route and the modulus `∫_0^r φ_{s,A}(ρ)/ρ dρ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpanneReport {
    /// `∫_0 φ_{s,A}(r)/r dr < ∞`.
    pub dini_near_zero: ConvergenceVerdict,
    /// `∫^∞ A^{-1}(t)/t^{1+s/n} dt < ∞`.
    pub inverse_tail: ConvergenceVerdict,
    pub feasible: Decision,
    pub value: Option<f64>,
}

/// Classes of the two equivalent Spanne integrands derived from the class of
/// `A` at infinity: `A^{-1}(t) ≈ t^{1/p} (log t)^{−α/p}`.
fn spanne_classes(params: &EmbeddingParams, a: &YoungFunction) -> Option<(IntegrandClass, IntegrandClass)> {
    let (n, s) = (params.nf(), params.s);
    match a.asymptotic(End::Infinity)? {
        Asym::Infinite => Some((IntegrandClass::Regular(s - 1.0, 0.0), IntegrandClass::Regular(-1.0 - s / n, 0.0))),
        Asym::Vanishing => None,
        Asym::Regular { power, log_power } => Some((
            IntegrandClass::Regular(s - 1.0 - n / power, -log_power / power),
            IntegrandClass::Regular(1.0 / power - 1.0 - s / n, -log_power / power),
        )),
    }
}

pub fn spanne_modulus(params: &EmbeddingParams, a: &YoungFunction, r: f64) -> Result<SpanneReport> {
    params.require_first_order()?;
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let (n, s) = (params.nf(), params.s);
    let (v20, v21) = match spanne_classes(params, a) {
        Some((c20, c21)) => (decide(c20, End::Zero), decide(c21, End::Infinity)),
        None => {
            let g20 = |rho: f64| rho.powf(s - 1.0) * a.inv(rho.powf(-n));
            let g21 = |t: f64| a.inv(t) / t.powf(1.0 + s / n);
            (classify_numeric(&g20, End::Zero, 24), classify_numeric(&g21, End::Infinity, 24))
        }
    };
    let feasible = match (v20.verdict, v21.verdict) {
        (Verdict::Convergent, Verdict::Convergent) => Decision::Yes,
        (Verdict::Divergent, Verdict::Divergent) => Decision::No,
        _ => Decision::Indeterminate,
    };
    let value = if feasible == Decision::Yes {
        // ∫_0^r ρ^{s−1} A^{-1}(ρ^{-n}) dρ = (1/n) ∫_{−n log r}^∞ e^{−us/n} A^{-1}(e^u) du.
        let h = |u: f64| (a.ln_inv(u) - u * s / n).exp() / n;
        let u0 = -n * r.ln();
        let tol = Tol::rel(1e-10);
        let start = u0.max(0.0) + 1.0;
        let head = integrate(&h, u0, start, tol).value;
        let tail = integrate_to_infinity(&h, start, tol, 1e-3);
        tail.converged.then_some(head + tail.value)
    } else {
        None
    };
    Ok(SpanneReport { dini_near_zero: v20, inverse_tail: v21, feasible, value })
}

// ------------------------------------------------------------------ continuity gap

/// One row of the comparison between the Spanne route and the sharp
/// continuity criterion for `A(t) = t^{n/s} (log t)^α`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub alpha: f64,
    /// `∫^∞ A^{-1}(t)/t^{1+s/n} dt < ∞` (equivalent to `α > n/s`).
    pub inverse_tail: Verdict,
    /// `∫^∞ (t/A(t))^{s/(n−s)} dt < ∞` (equivalent to `α > n/s − 1`).
    pub sharp_condition: Verdict,
    /// Modulus exponent `1 − sα/n` obtained through Campanato spaces.
    pub spanne_exponent: Option<f64>,
    /// Sharp modulus exponent `1 − s(α+1)/n`.
    pub sharp_exponent: Option<f64>,
}

pub fn continuity_gap_report(params: &EmbeddingParams, alpha_grid: &[f64]) -> Result<Vec<GapRow>> {
    params.require_first_order()?;
    let (n, s) = (params.nf(), params.s);
    let p = n / s;
    alpha_grid
        .iter()
        .map(|&alpha| {
            let a = YoungFunction::power_log(p, alpha);
            let v21 = spanne_modulus_verdicts(params, &a)?.1;
            let weaker = check_integral_condition(
                &a,
                params.exponent_first_order(),
                End::Infinity,
                IntegralForm::PowerOfTOverA,
            )?;
            let common = alpha > p;
            Ok(GapRow {
                alpha,
                inverse_tail: v21.verdict,
                sharp_condition: weaker.verdict,
                spanne_exponent: common.then_some(1.0 - s * alpha / n),
                sharp_exponent: common.then_some(1.0 - s * (alpha + 1.0) / n),
            })
        })
        .collect()
}

/// The Dini condition near zero and the inverse-tail condition at infinity.
pub fn spanne_modulus_verdicts(
    params: &EmbeddingParams,
    a: &YoungFunction,
) -> Result<(ConvergenceVerdict, ConvergenceVerdict)> {
    let rep = spanne_modulus(params, a, 1.0)?;
    Ok((rep.dini_near_zero, rep.inverse_tail))
}
