//! Functions on `(0, ∞)`: decreasing rearrangements, maximal averages `u**`,
//! Luxemburg norms, monotone dual pairings and the norm equivalence for
//! `ρ^α (ρ^β χ_{(0,r)})**`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_from_zero, integrate_log, integrate_to_infinity, Tol};
use crate::young::YoungFunction;

/// Relative accuracy of Luxemburg norms returned by bisection.
pub const NORM_REL_TOL: f64 = 1e-11;

/// Ratio between the initial guess and the largest (or smallest) `λ` tried
/// before a norm is reported as infinite (or zero). Keeps modulars away from
/// scales where the integrand underflows.
pub const BRACKET_SPAN: f64 = 1e40;

/// Largest share of a modular allowed to come from a fitted tail.
pub const TAIL_FRACTION: f64 = 1e-4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotone {
    #[default]
    None,
    NonIncreasing,
}

/// Piecewise-constant nonnegative function with bounded support: `values[i]`
/// on `(grid[i-1], grid[i]]` (with `grid[-1] = 0`) and zero beyond the last
/// grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(default)]
    pub monotone: Monotone,
}

impl SampledFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, monotone: Monotone) -> Result<Self> {
        let f = SampledFunction { grid, values, monotone };
        f.validate()?;
        Ok(f)
    }

    pub fn zero() -> Self {
        SampledFunction { grid: Vec::new(), values: Vec::new(), monotone: Monotone::NonIncreasing }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() != self.values.len() {
            return Err(Error::InvalidInput(format!(
                "{} grid points but {} values",
                self.grid.len(),
                self.values.len()
            )));
        }
        let mut prev = 0.0;
        for (i, (&x, &v)) in self.grid.iter().zip(&self.values).enumerate() {
            if !(x > prev && x.is_finite()) {
                return Err(Error::InvalidInput(format!("grid not strictly increasing at index {i}")));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("value at index {i} is not finite and nonnegative")));
            }
            prev = x;
        }
        if self.monotone == Monotone::NonIncreasing {
            if let Some(i) = self.values.windows(2).position(|w| w[1] > w[0]) {
                return Err(Error::InvalidInput(format!("values increase at index {}", i + 1)));
            }
        }
        Ok(())
    }

    /// Samples `f` at the geometric (or, for the first cell, arithmetic)
    /// midpoint of each cell.
    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|i| {
                let lo = if i == 0 { 0.0 } else { grid[i - 1] };
                let mid = if lo > 0.0 { (lo * grid[i]).sqrt() } else { 0.5 * grid[i] };
                f(mid).max(0.0)
            })
            .collect();
        let mut s = SampledFunction { grid, values, monotone: Monotone::None };
        s.validate()?;
        if s.values.windows(2).all(|w| w[1] <= w[0]) {
            s.monotone = Monotone::NonIncreasing;
        }
        Ok(s)
    }

    pub fn support_bound(&self) -> f64 {
        self.grid.last().copied().unwrap_or(0.0)
    }

    /// `(left, right, value)` for every cell.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.grid.iter().enumerate().map(move |(i, &hi)| {
            let lo = if i == 0 { 0.0 } else { self.grid[i - 1] };
            (lo, hi, self.values[i])
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return self.values.first().copied().unwrap_or(0.0);
        }
        let i = self.grid.partition_point(|&x| x < r);
        self.values.get(i).copied().unwrap_or(0.0)
    }

    /// `∫_0^r f`.
    pub fn integral_to(&self, r: f64) -> f64 {
        let mut acc = 0.0;
        for (lo, hi, v) in self.cells() {
            if lo >= r {
                break;
            }
            acc += v * (hi.min(r) - lo);
        }
        acc
    }

    pub fn integral(&self) -> f64 {
        self.integral_to(f64::INFINITY)
    }

    /// `∫ f g` against another sampled function, exact for step data.
    pub fn pairing(&self, g: &SampledFunction) -> f64 {
        let mut pts: Vec<f64> = self.grid.iter().chain(&g.grid).copied().collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut acc = 0.0;
        let mut lo = 0.0;
        for &hi in &pts {
            let mid = 0.5 * (lo + hi);
            acc += self.eval(mid) * g.eval(mid) * (hi - lo);
            lo = hi;
        }
        acc
    }

    pub fn scaled(&self, c: f64) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            monotone: self.monotone,
        }
    }

    /// Measure of `{f > t}`.
    pub fn distribution(&self, t: f64) -> f64 {
        self.cells().filter(|c| c.2 > t).map(|(lo, hi, _)| hi - lo).sum()
    }

    /// Decreasing rearrangement using the cell lengths as weights.
    pub fn rearranged(&self) -> SampledFunction {
        let weights: Vec<f64> = self.cells().map(|(lo, hi, _)| hi - lo).collect();
        decreasing_rearrangement(&self.values, &weights).expect("cell lengths are valid weights")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (x, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{x:e},{v:e}\n"));
        }
        out
    }
}

/// Non-increasing step function with bounded support: `levels[i]` on
/// `(breakpoints[i-1], breakpoints[i]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        let f = StepFunction { breakpoints, levels };
        f.to_sampled()?;
        if f.levels.is_empty() {
            return Err(Error::InvalidInput("a step function needs at least one piece".into()));
        }
        Ok(f)
    }

    /// `χ_{(0,m)}`.
    pub fn indicator(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Domain(format!("support length must be positive and finite, got {m}")));
        }
        Ok(StepFunction { breakpoints: vec![m], levels: vec![1.0] })
    }

    pub fn to_sampled(&self) -> Result<SampledFunction> {
        SampledFunction::new(self.breakpoints.clone(), self.levels.clone(), Monotone::NonIncreasing)
    }

    pub fn support(&self) -> f64 {
        *self.breakpoints.last().expect("validated non-empty")
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.levels[0];
        }
        let i = self.breakpoints.partition_point(|&x| x < r);
        self.levels.get(i).copied().unwrap_or(0.0)
    }

    pub fn sup(&self) -> f64 {
        self.levels[0]
    }

    pub fn integral(&self) -> f64 {
        let mut lo = 0.0;
        let mut acc = 0.0;
        for (&hi, &v) in self.breakpoints.iter().zip(&self.levels) {
            acc += v * (hi - lo);
            lo = hi;
        }
        acc
    }
}

/// Non-increasing rearrangement of values carried by sets of the given
/// measures. Cells of equal value are merged and zero levels dropped.
pub fn decreasing_rearrangement(values: &[f64], weights: &[f64]) -> Result<SampledFunction> {
    if values.len() != weights.len() {
        return Err(Error::InvalidInput("values and weights differ in length".into()));
    }
    if let Some(i) = weights.iter().position(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidInput(format!("weight at index {i} is not finite and nonnegative")));
    }
    let mut idx: Vec<usize> = (0..values.len()).filter(|&i| weights[i] > 0.0 && values[i] != 0.0).collect();
    if let Some(&i) = idx.iter().find(|&&i| !values[i].is_finite()) {
        return Err(Error::InvalidInput(format!("value at index {i} is not finite")));
    }
    idx.sort_by(|&i, &j| values[j].abs().total_cmp(&values[i].abs()));
    let mut grid: Vec<f64> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    let mut pos = 0.0;
    for i in idx {
        pos += weights[i];
        let v = values[i].abs();
        if vals.last() == Some(&v) {
            *grid.last_mut().expect("paired with vals") = pos;
        } else {
            grid.push(pos);
            vals.push(v);
        }
    }
    Ok(SampledFunction { grid, values: vals, monotone: Monotone::NonIncreasing })
}

/// `f**(r) = (1/r) ∫_0^r f*`, exact for step data.
pub fn double_star_at(f: &SampledFunction, r: f64) -> f64 {
    let g = if f.monotone == Monotone::NonIncreasing { f.clone() } else { f.rearranged() };
    if r <= 0.0 {
        return g.values.first().copied().unwrap_or(0.0);
    }
    g.integral_to(r) / r
}

/// `f**` sampled at the right end of every cell of `f*`, together with one
/// extra point at twice the support where `f**` has started its `1/r` decay.
pub fn double_star(f: &SampledFunction) -> SampledFunction {
    let g = if f.monotone == Monotone::NonIncreasing { f.clone() } else { f.rearranged() };
    let mut grid = g.grid.clone();
    if let Some(&b) = grid.last() {
        grid.push(2.0 * b);
    }
    let values = grid.iter().map(|&r| g.integral_to(r) / r).collect();
    SampledFunction { grid, values, monotone: Monotone::NonIncreasing }
}

/// `inf{λ > 0 : Λ(λ) ≤ 1}` for a non-increasing modular `Λ`, by geometric
/// bisection from `guess`. Returns `+∞` when no `λ` is feasible.
pub fn luxemburg_from_modular(modular: impl Fn(f64) -> f64, guess: f64) -> f64 {
    let ok = |lam: f64| {
        let m = modular(lam);
        m <= 1.0
    };
    let start = if guess.is_finite() && guess > 0.0 { guess } else { 1.0 };
    let (mut lo, mut hi);
    if ok(start) {
        hi = start;
        lo = start / 2.0;
        while ok(lo) {
            hi = lo;
            lo /= 16.0;
            if lo < start / BRACKET_SPAN {
                return 0.0;
            }
        }
    } else {
        lo = start;
        hi = start * 2.0;
        while !ok(hi) {
            lo = hi;
            hi *= 16.0;
            if hi > start * BRACKET_SPAN {
                return f64::INFINITY;
            }
        }
    }
    while hi / lo > 1.0 + NORM_REL_TOL {
        let mid = (lo * hi).sqrt();
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `‖χ_E‖_{L^A} = 1/A^{-1}(1/|E|)`.
pub fn char_norm(a: &YoungFunction, measure: f64) -> Result<f64> {
    if !(measure > 0.0) {
        return Err(Error::Domain(format!("measure must be positive, got {measure}")));
    }
    Ok(1.0 / a.inv(1.0 / measure))
}

/// Luxemburg norm of step data: the modular is the exact sum over cells.
pub fn luxemburg_norm(f: &SampledFunction, a: &YoungFunction) -> f64 {
    let sup = f.values.iter().copied().fold(0.0, f64::max);
    if sup == 0.0 {
        return 0.0;
    }
    let modular =
        |lam: f64| f.cells().map(|(lo, hi, v)| if v > 0.0 { (hi - lo) * a.value(v / lam) } else { 0.0 }).sum();
    let guess = sup / a.inv(1.0 / f.support_bound());
    luxemburg_from_modular(modular, guess)
}

/// Luxemburg norm of `f` on the union of `pieces`, each `(lo, hi)` with
/// `0 ≤ lo < hi ≤ ∞`. Unbounded ends are closed by fitted power tails.
pub fn luxemburg_norm_fn(f: &dyn Fn(f64) -> f64, a: &YoungFunction, pieces: &[(f64, f64)]) -> Result<f64> {
    for &(lo, hi) in pieces {
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::Domain(format!("invalid interval ({lo}, {hi})")));
        }
    }
    let tol = Tol::rel(1e-12);
    let modular = |lam: f64| {
        let g = |t: f64| a.value(f(t) / lam);
        let mut acc = 0.0;
        for &(lo, hi) in pieces {
            let (a0, b0) = (lo, hi);
            let mid = if a0 == 0.0 && b0.is_infinite() {
                1.0
            } else if a0 == 0.0 {
                b0
            } else {
                a0
            };
            if a0 == 0.0 {
                let q = integrate_from_zero(&g, mid, tol, TAIL_FRACTION);
                if !q.converged {
                    return f64::INFINITY;
                }
                acc += q.value;
            }
            if b0.is_infinite() {
                let q = integrate_to_infinity(&g, mid, tol, TAIL_FRACTION);
                if !q.converged {
                    return f64::INFINITY;
                }
                acc += q.value;
            } else if a0 > 0.0 {
                acc += integrate_log(&g, a0, b0, tol).value;
            }
            if !acc.is_finite() {
                return f64::INFINITY;
            }
        }
        acc
    };
    // Scale guess from a representative value and the total measure.
    let (lo, hi) = pieces[0];
    let probe = if hi.is_finite() {
        if lo > 0.0 {
            (lo * hi).sqrt()
        } else {
            hi / 2.0
        }
    } else {
        lo.max(1.0) * 2.0
    };
    Ok(luxemburg_from_modular(modular, f(probe).max(1e-300)))
}

/// Outcome of the dual pairing test for a non-increasing `f`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingReport {
    /// Largest `∫ f g / ‖g‖_{L^A}` over the trial family: a certified lower
    /// estimate of the supremum over all non-increasing `g`.
    pub lower: f64,
    /// `2 ‖f‖_{L^Ã}`.
    pub upper: f64,
    pub conjugate_norm: f64,
    /// `lower / ‖f‖_{L^Ã}`.
    pub fraction: f64,
    pub trials: usize,
}

/// Evaluates `sup_g ∫ f g / ‖g‖_{L^A}` over non-increasing trial functions:
/// indicators on a geometric grid of lengths, the Young-equality partner
/// `g = Ã'(f/‖f‖_{L^Ã})`, and truncated powers.
pub fn monotone_dual_pairing(
    f: &SampledFunction,
    a: &YoungFunction,
    trial_family_size: usize,
) -> Result<PairingReport> {
    let f = if f.monotone == Monotone::NonIncreasing {
        f.clone()
    } else {
        return Err(Error::InvalidInput("the dual pairing requires a non-increasing function".into()));
    };
    if f.integral() == 0.0 {
        return Ok(PairingReport { lower: 0.0, upper: 0.0, conjugate_norm: 0.0, fraction: 1.0, trials: 0 });
    }
    let at = a.conjugate()?;
    let norm = luxemburg_norm(&f, &at);
    let b = f.support_bound();
    let first = f.grid[0];
    let mut best = 0.0f64;
    let mut trials = 0;
    let mut consider = |num: f64, den: f64| {
        trials += 1;
        if den > 0.0 && den.is_finite() && num.is_finite() {
            best = best.max(num / den);
        }
    };
    let m = trial_family_size.max(2);
    for i in 0..m {
        let len = first * (b / first).powf(i as f64 / (m - 1) as f64);
        consider(f.integral_to(len), char_norm(a, len)?);
    }
    if norm.is_finite() && norm > 0.0 {
        let partner = SampledFunction {
            grid: f.grid.clone(),
            values: f.values.iter().map(|&v| at.slope(v / norm)).collect(),
            monotone: Monotone::NonIncreasing,
        };
        if partner.values.iter().all(|v| v.is_finite()) {
            consider(f.pairing(&partner), luxemburg_norm(&partner, a));
        }
    }
    for gamma in [0.25, 0.5, 0.75] {
        let power = SampledFunction::from_fn(f.grid.clone(), |r| r.powf(-gamma))?;
        consider(f.pairing(&power), luxemburg_norm(&power, a));
    }
    let upper = 2.0 * norm;
    Ok(PairingReport { lower: best, upper, conjugate_norm: norm, fraction: best / norm, trials })
}

/// Both sides of `‖ρ^α (t^β χ_{(0,r)})**(ρ)‖ ≈ r^{β+1} ‖ρ^{α−1} χ_{(r,∞)}‖`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiNormEquivalence {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Constants of the proof: `ratio ∈ [band.0, band.1]`.
    pub band: (f64, f64),
}

impl RiNormEquivalence {
    pub fn within_band(&self) -> bool {
        let slack = 1e-6;
        self.ratio >= self.band.0 * (1.0 - slack) && self.ratio <= self.band.1 * (1.0 + slack)
    }
}

/// `(t^β χ_{(0,r)})**(ρ)` in closed form.
pub fn power_indicator_double_star(beta: f64, r: f64, rho: f64) -> f64 {
    let b1 = beta + 1.0;
    if rho >= r {
        return r.powf(b1) / (b1 * rho);
    }
    if beta >= 0.0 {
        // Rearrangement (r − ρ)^β; small ρ uses the expansion to avoid cancellation.
        let x = rho / r;
        let diff = if x < 1e-6 { b1 * x * (1.0 - beta * x / 2.0) } else { 1.0 - (1.0 - x).powf(b1) };
        r.powf(b1) * diff / (b1 * rho)
    } else {
        rho.powf(beta) / b1
    }
}

/// Evaluates both sides of the equivalence in `X = L^Ã`. With `window =
/// Some(R)`, `R ≥ 2r`, norms are taken in `X(0, R)`.
pub fn lemma_rinorm_equivalence(
    alpha: f64,
    beta: f64,
    r: f64,
    a: &YoungFunction,
    window: Option<f64>,
) -> Result<RiNormEquivalence> {
    if !(alpha > 0.0 && beta > -1.0 && alpha + beta >= 0.0) {
        return Err(Error::Domain(format!(
            "need alpha > 0, beta > -1 and alpha + beta >= 0, got alpha = {alpha}, beta = {beta}"
        )));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let end = window.unwrap_or(f64::INFINITY);
    if end < 2.0 * r {
        return Err(Error::Domain(format!("window {end} must be at least 2r = {}", 2.0 * r)));
    }
    let at = a.conjugate()?;
    let lhs_fn = |rho: f64| rho.powf(alpha) * power_indicator_double_star(beta, r, rho);
    let lhs = luxemburg_norm_fn(&lhs_fn, &at, &[(0.0, r), (r, end)])?;
    let rhs_fn = |rho: f64| rho.powf(alpha - 1.0);
    let rhs = r.powf(beta + 1.0) * luxemburg_norm_fn(&rhs_fn, &at, &[(r, end)])?;
    let b1 = beta + 1.0;
    let band = if beta >= 0.0 { (1.0 / b1, 2.0 + 1.0 / b1) } else { (1.0 / b1, (2f64.powf(b1) + 1.0) / b1) };
    Ok(RiNormEquivalence { lhs, rhs, ratio: lhs / rhs, band })
}
