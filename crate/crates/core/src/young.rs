//! Young functions: representation, evaluation, validation, Legendre
//! conjugation, right-continuous generalized inverses, Matuszewska–Orlicz
//! indices and domination tests.
//!
//! Values live in `[0, ∞]`; the infinite value is carried by [`Ext::Infinite`]
//! at the API boundary. Internally `f64::INFINITY` is used, which is exact
//! under the operations performed here (sums, maxima, comparisons).

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{linear_fit, logspace, sup_of_segment};

/// Relative slack allowed when checking monotonicity of secant slopes.
pub const CONVEXITY_SLACK: f64 = 1e-9;

/// An extended nonnegative real.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Ext {
    Finite(f64),
    Infinite,
}

impl Ext {
    pub fn from_f64(v: f64) -> Ext {
        if v == f64::INFINITY {
            Ext::Infinite
        } else {
            Ext::Finite(v)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Ext::Finite(v) => v,
            Ext::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::Infinite => None,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(v) => write!(f, "{v}"),
            Ext::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ext::Finite(v) => s.serialize_f64(*v),
            Ext::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Ext, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Ext;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a nonnegative number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Ext, E> {
                Ok(Ext::from_f64(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Ext, E> {
                Ok(Ext::Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Ext, E> {
                Ok(Ext::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Ext, E> {
                match v {
                    "inf" | "infinity" | "Infinity" | "+inf" => Ok(Ext::Infinite),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Interpolation rule between the knots of a tabulated function.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interp {
    /// Piecewise linear; the first knot must be `(0, 0)`; extended beyond the
    /// last knot with the last slope.
    #[default]
    Linear,
    /// Piecewise power law (linear in log–log); extended at both ends by the
    /// edge exponents. Segments touching a zero value are linear.
    LogLog,
}

/// The families of Young functions understood by the crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Kind {
    /// `t^p`, `p ≥ 1` (`p = 1` is the linear function).
    Power {
        p: f64,
    },
    /// `t^p (log t)^α` for `t ≥ t_splice`, continued linearly below.
    /// When `t_splice` is omitted the smallest admissible splice is used.
    PowerLog {
        p: f64,
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_splice: Option<f64>,
    },
    /// `0` on `[0, t0]`, `∞` afterwards.
    LinearCap {
        t0: f64,
    },
    /// `base(c·t)`.
    Scaled {
        base: Box<YoungFunction>,
        c: f64,
    },
    Sum {
        terms: Vec<YoungFunction>,
    },
    Max {
        terms: Vec<YoungFunction>,
    },
    Tabulated {
        knots: Vec<f64>,
        values: Vec<Ext>,
        #[serde(default)]
        interp: Interp,
    },
}

/// Optional asymptotic exponents `A(t) ≈ t^e` used by convergence tests.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DomainHint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_zero: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_infinity: Option<f64>,
}

/// A Young function, serialized as `{"kind": ..., params...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungFunction {
    #[serde(flatten)]
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_hint: Option<DomainHint>,
}

/// Which end of `(0, ∞)` an asymptotic statement refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Zero,
    Infinity,
}

/// Asymptotic class of a function at one end of `(0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Asym {
    /// Identically zero near `0`.
    Vanishing,
    /// Identically `+∞` near `∞`.
    Infinite,
    /// `≈ t^power · (log t)^log_power` (with `log(1/t)` near zero).
    Regular { power: f64, log_power: f64 },
}

impl Asym {
    pub fn power(p: f64) -> Asym {
        Asym::Regular { power: p, log_power: 0.0 }
    }
}

/// Class of the conjugate function at the same end.
pub fn conjugate_asym(a: Asym, end: End) -> Option<Asym> {
    match (a, end) {
        (Asym::Vanishing, End::Zero) | (Asym::Infinite, End::Infinity) => Some(Asym::power(1.0)),
        (Asym::Regular { power, log_power }, _) if power > 1.0 => {
            Some(Asym::Regular { power: power / (power - 1.0), log_power: -log_power / (power - 1.0) })
        }
        (Asym::Regular { power, log_power }, End::Zero) if power == 1.0 && log_power == 0.0 => Some(Asym::Vanishing),
        (Asym::Regular { power, log_power }, End::Infinity) if power == 1.0 && log_power == 0.0 => Some(Asym::Infinite),
        _ => None,
    }
}

/// Outcome of a grid-based domination test `B(t) ≤ A(c t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Domination {
    Holds { c: f64 },
    Fails { t: f64, c_max: f64 },
}

/// Range of `t` over which domination is tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominationRange {
    Global,
    NearZero,
    NearInfinity,
}

/// Estimate of one Matuszewska–Orlicz index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IndexEstimate {
    pub value: f64,
    /// Spread of the last three extrapolants.
    pub uncertainty: f64,
    pub determinate: bool,
}

fn secant_violation(s_prev: f64, s_next: f64) -> bool {
    s_next < s_prev - CONVEXITY_SLACK * s_prev.abs().max(s_next.abs()) - 1e-300
}

impl YoungFunction {
    pub fn new(kind: Kind) -> Self {
        YoungFunction { kind, domain_hint: None }
    }

    pub fn power(p: f64) -> Self {
        Self::new(Kind::Power { p })
    }

    /// The linear function `A(t) = t`.
    pub fn linear() -> Self {
        Self::power(1.0)
    }

    pub fn power_log(p: f64, alpha: f64) -> Self {
        Self::new(Kind::PowerLog { p, alpha, t_splice: None })
    }

    pub fn power_log_spliced(p: f64, alpha: f64, t_splice: f64) -> Self {
        Self::new(Kind::PowerLog { p, alpha, t_splice: Some(t_splice) })
    }

    pub fn linear_cap(t0: f64) -> Self {
        Self::new(Kind::LinearCap { t0 })
    }

    /// `base(c·t)`, with nested scalings and trivial factors folded.
    pub fn scaled(base: YoungFunction, c: f64) -> Self {
        match base.kind {
            _ if c == 1.0 => base,
            Kind::Scaled { base: inner, c: c2 } => Self::scaled(*inner, c * c2),
            Kind::LinearCap { t0 } => Self::linear_cap(t0 / c),
            _ => Self::new(Kind::Scaled { base: Box::new(base), c }),
        }
    }

    pub fn sum(terms: Vec<YoungFunction>) -> Self {
        Self::new(Kind::Sum { terms })
    }

    pub fn max(terms: Vec<YoungFunction>) -> Self {
        Self::new(Kind::Max { terms })
    }

    /// A validated tabulated function.
    pub fn tabulated(knots: Vec<f64>, values: Vec<Ext>, interp: Interp) -> Result<Self> {
        let a = Self::new(Kind::Tabulated { knots, values, interp });
        a.validate()?;
        Ok(a)
    }

    pub fn with_hint(mut self, hint: DomainHint) -> Self {
        self.domain_hint = Some(hint);
        self
    }

    /// Parse and validate a JSON specification.
    pub fn from_json(s: &str) -> Result<Self> {
        let a: YoungFunction = serde_json::from_str(s)?;
        a.validate()?;
        Ok(a)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("Young function serializes")
    }

    /// A representative of every built-in family, used for sweeps.
    pub fn catalogue() -> Vec<(String, YoungFunction)> {
        let t2: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let v2: Vec<Ext> = t2.iter().map(|t| Ext::Finite(t * t)).collect();
        vec![
            ("power_1.5".into(), Self::power(1.5)),
            ("power_2".into(), Self::power(2.0)),
            ("power_3".into(), Self::power(3.0)),
            ("power_4".into(), Self::power(4.0)),
            ("linear".into(), Self::linear()),
            ("power_log_4_1".into(), Self::power_log(4.0, 1.0)),
            ("power_log_2_-0.5".into(), Self::power_log(2.0, -0.5)),
            ("linear_cap_1".into(), Self::linear_cap(1.0)),
            ("scaled_power_2".into(), Self::scaled(Self::power(2.0), 3.0)),
            ("sum_power_2_3".into(), Self::sum(vec![Self::power(2.0), Self::power(3.0)])),
            ("max_linear_power_3".into(), Self::max(vec![Self::linear(), Self::scaled(Self::power(3.0), 0.5)])),
            ("sum_power_2_cap_5".into(), Self::sum(vec![Self::power(2.0), Self::linear_cap(5.0)])),
            ("tabulated_square".into(), Self::new(Kind::Tabulated { knots: t2, values: v2, interp: Interp::Linear })),
        ]
    }

    // ----------------------------------------------------------------- evaluation

    /// `A(t)`; negative arguments are a domain error.
    pub fn eval(&self, t: f64) -> Result<Ext> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::Domain(format!("Young function evaluated at negative argument {t}")));
        }
        Ok(Ext::from_f64(self.value(t)))
    }

    /// `A(t)` as `f64` (`+∞` allowed) for `t ≥ 0`; the unchecked fast path.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p } => {
                if *p == 1.0 {
                    t
                } else if *p == 2.0 {
                    t * t
                } else {
                    t.powf(*p)
                }
            }
            Kind::PowerLog { p, alpha, .. } => {
                let ts = self.splice();
                if t >= ts {
                    t.powf(*p) * t.ln().powf(*alpha)
                } else {
                    t * ts.powf(*p - 1.0) * ts.ln().powf(*alpha)
                }
            }
            Kind::LinearCap { t0 } => {
                if t <= *t0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Kind::Scaled { base, c } => base.value(c * t),
            Kind::Sum { terms } => terms.iter().map(|a| a.value(t)).sum(),
            Kind::Max { terms } => terms.iter().map(|a| a.value(t)).fold(0.0, f64::max),
            Kind::Tabulated { knots, values, interp } => table_value(knots, values, *interp, t),
        }
    }

    /// Right derivative `A'_+(t)`.
    pub fn slope(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Power { p } => {
                if *p == 1.0 {
                    1.0
                } else {
                    p * t.powf(p - 1.0)
                }
            }
            Kind::PowerLog { p, alpha, .. } => {
                let ts = self.splice();
                let tt = t.max(ts);
                if t >= ts {
                    let l = tt.ln();
                    tt.powf(p - 1.0) * l.powf(alpha - 1.0) * (p * l + alpha)
                } else {
                    ts.powf(*p - 1.0) * ts.ln().powf(*alpha)
                }
            }
            Kind::LinearCap { t0 } => {
                if t < *t0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Kind::Scaled { base, c } => c * base.slope(c * t),
            Kind::Sum { terms } => terms.iter().map(|a| a.slope(t)).sum(),
            Kind::Max { terms } => {
                let vals: Vec<f64> = terms.iter().map(|a| a.value(t)).collect();
                let top = vals.iter().copied().fold(0.0, f64::max);
                terms.iter().zip(&vals).filter(|(_, v)| **v >= top).map(|(a, _)| a.slope(t)).fold(0.0, f64::max)
            }
            Kind::Tabulated { knots, values, interp } => table_slope(knots, values, *interp, t),
        }
    }

    /// Splice point of a `PowerLog`; the smallest admissible one when unset.
    pub fn splice(&self) -> f64 {
        match &self.kind {
            Kind::PowerLog { p, alpha, t_splice } => t_splice.unwrap_or_else(|| auto_splice(*p, *alpha)),
            _ => 0.0,
        }
    }

    /// `sup {t : A(t) < ∞}`.
    pub fn finite_limit(&self) -> f64 {
        match &self.kind {
            Kind::Power { .. } | Kind::PowerLog { .. } => f64::INFINITY,
            Kind::LinearCap { t0 } => *t0,
            Kind::Scaled { base, c } => base.finite_limit() / c,
            Kind::Sum { terms } | Kind::Max { terms } => {
                terms.iter().map(|a| a.finite_limit()).fold(f64::INFINITY, f64::min)
            }
            Kind::Tabulated { knots, values, .. } => match values.iter().position(|v| !v.is_finite()) {
                Some(i) => knots[i - 1],
                None => f64::INFINITY,
            },
        }
    }

    // ----------------------------------------------------------------- validation

    /// Checks parameters and the Young-function invariants: `A(0) = 0`,
    /// monotone, convex (secant slopes non-decreasing up to a relative slack),
    /// `A(t)/t` non-decreasing, and `A` not identically zero.
    pub fn validate(&self) -> Result<()> {
        self.validate_params()?;
        let mut grid = vec![0.0];
        grid.extend(logspace(1e-6, 1e6, 241));
        if let Kind::Tabulated { knots, .. } = &self.kind {
            grid.extend(knots.iter().copied());
            grid.sort_by(f64::total_cmp);
            grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-6 * b.abs());
        }
        let vals: Vec<f64> = grid.iter().map(|&t| self.value(t)).collect();
        if vals[0] != 0.0 {
            return Err(Error::InvalidInput("A(0) must be 0".into()));
        }
        if vals.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidInput("A vanishes identically on the validation grid".into()));
        }
        let mut prev_slope = 0.0;
        let mut prev_ratio = 0.0;
        for i in 1..grid.len() {
            let (a0, a1) = (vals[i - 1], vals[i]);
            if a1.is_nan() || a1 < 0.0 {
                return Err(Error::InvalidInput(format!("A({}) is not a nonnegative value", grid[i])));
            }
            if a1 < a0 {
                return Err(Error::InvalidInput(format!("A decreases near t = {}", grid[i])));
            }
            if !a1.is_finite() {
                continue;
            }
            let slope = (a1 - a0) / (grid[i] - grid[i - 1]);
            if secant_violation(prev_slope, slope) {
                return Err(Error::InvalidInput(format!("A is not convex near t = {}", grid[i])));
            }
            let ratio = a1 / grid[i];
            if secant_violation(prev_ratio, ratio) {
                return Err(Error::InvalidInput(format!("A(t)/t decreases near t = {}", grid[i])));
            }
            prev_slope = slope;
            prev_ratio = ratio;
        }
        Ok(())
    }

    fn validate_params(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        match &self.kind {
            Kind::Power { p } => {
                if !(p.is_finite() && *p >= 1.0) {
                    return bad(format!("Power exponent must be ≥ 1, got {p}"));
                }
            }
            Kind::PowerLog { p, alpha, t_splice } => {
                if !(p.is_finite() && *p > 1.0 && alpha.is_finite()) {
                    return bad(format!("PowerLog needs p > 1 and finite alpha, got p={p}, alpha={alpha}"));
                }
                if let Some(ts) = t_splice {
                    if !(*ts > 1.0) {
                        return bad(format!("PowerLog splice must exceed 1, got {ts}"));
                    }
                    if *ts < auto_splice(*p, *alpha) * (1.0 - 1e-12) {
                        return bad(format!(
                            "PowerLog splice {ts} is below the convexity threshold {}",
                            auto_splice(*p, *alpha)
                        ));
                    }
                }
            }
            Kind::LinearCap { t0 } => {
                if !(t0.is_finite() && *t0 > 0.0) {
                    return bad(format!("LinearCap threshold must be positive, got {t0}"));
                }
            }
            Kind::Scaled { base, c } => {
                if !(c.is_finite() && *c > 0.0) {
                    return bad(format!("scaling factor must be positive, got {c}"));
                }
                base.validate_params()?;
            }
            Kind::Sum { terms } | Kind::Max { terms } => {
                if terms.is_empty() {
                    return bad("Sum/Max needs at least one term".into());
                }
                for a in terms {
                    a.validate_params()?;
                }
            }
            Kind::Tabulated { knots, values, interp } => validate_table(knots, values, *interp)?,
        }
        Ok(())
    }

    // ----------------------------------------------------------------- inverse

    /// Right-continuous generalized inverse `A^{-1}(y) = sup {t ≥ 0 : A(t) ≤ y}`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y.is_nan() || y < 0.0 {
            return Err(Error::Domain(format!("inverse evaluated at negative argument {y}")));
        }
        Ok(self.inv(y))
    }

    /// Unchecked inverse for `y ≥ 0`.
    pub fn inv(&self, y: f64) -> f64 {
        if y == f64::INFINITY {
            return f64::INFINITY;
        }
        match &self.kind {
            Kind::Power { p } => {
                if *p == 1.0 {
                    y
                } else if *p == 2.0 {
                    y.sqrt()
                } else {
                    y.powf(1.0 / p)
                }
            }
            Kind::LinearCap { t0 } => *t0,
            Kind::Scaled { base, c } => base.inv(y) / c,
            Kind::Tabulated { knots, values, interp } => table_inverse(knots, values, *interp, y),
            Kind::PowerLog { p, alpha, .. } => {
                let ts = self.splice();
                let at = self.value(ts);
                if y <= at {
                    return y * ts / at;
                }
                // Newton on log A(t) = log y from the pure-power guess, then polish by bisection.
                let ly = y.ln();
                let mut t = (ly / p).exp().max(ts);
                for _ in 0..60 {
                    let l = t.ln();
                    let g = p * l + alpha * l.ln() - ly;
                    let dg = p + alpha / l;
                    let next = (l - g / dg).exp().max(ts);
                    if (next - t).abs() <= 1e-15 * t {
                        t = next;
                        break;
                    }
                    t = next;
                }
                let (mut lo, mut hi) = (t * (1.0 - 1e-10), t * (1.0 + 1e-10));
                if self.value(lo) > y || self.value(hi) <= y {
                    return sup_of_segment(|s| self.value(s) <= y);
                }
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.value(mid) <= y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
            Kind::Sum { .. } | Kind::Max { .. } => sup_of_segment(|t| self.value(t) <= y),
        }
    }

    /// `log A^{-1}(e^{ln_y})`, usable far beyond the range of `f64` arguments.
    pub fn ln_inv(&self, ln_y: f64) -> f64 {
        match &self.kind {
            Kind::Power { p } => ln_y / p,
            Kind::LinearCap { t0 } => t0.ln(),
            Kind::Scaled { base, c } => base.ln_inv(ln_y) - c.ln(),
            Kind::PowerLog { p, alpha, .. } if ln_y > 600.0 => {
                // Solve p L + α log L = ln_y for L = log t.
                let mut l = ln_y / p;
                for _ in 0..100 {
                    let next = l - (p * l + alpha * l.ln() - ln_y) / (p + alpha / l);
                    if (next - l).abs() <= 1e-15 * l {
                        return next;
                    }
                    l = next.max(1.0);
                }
                l
            }
            _ if ln_y < 700.0 => self.inv(ln_y.exp()).ln(),
            _ => {
                let (a, b) = (self.inv(650f64.exp()).ln(), self.inv(700f64.exp()).ln());
                b + (b - a) / 50.0 * (ln_y - 700.0)
            }
        }
    }

    // ----------------------------------------------------------------- conjugate

    /// Legendre conjugate `Ã(t) = sup_{τ ≥ 0} (τ t − A(τ))`.
    ///
    /// Powers, the linear function, caps and scalings map to closed forms.
    /// Piecewise-linear tables are conjugated exactly through their upper hull.
    /// Everything else is sampled at tangent points `τ_i`, where the supremum is
    /// attained exactly: `Ã(A'(τ_i)) = τ_i A'(τ_i) − A(τ_i)`.
    pub fn conjugate(&self) -> Result<YoungFunction> {
        self.validate()?;
        let out = self.conjugate_unchecked()?;
        if matches!(out.kind, Kind::Tabulated { .. }) {
            out.validate().map_err(|e| Error::Numerical(format!("conjugate table failed validation: {e}")))?;
        }
        Ok(out)
    }

    /// Pointwise `Ã(t)`, locating the maximizer `τ*` with `A'(τ*−) ≤ t ≤ A'(τ*+)`
    /// by bisection. Accurate at any `t`, unlike a sampled table; an error `δ`
    /// in `τ*` perturbs `Ã` only at second order.
    pub fn conjugate_at(&self, t: f64) -> f64 {
        if !(t > 0.0) || self.slope(0.0) >= t {
            return 0.0;
        }
        let cap = self.finite_limit();
        let start = if cap.is_finite() { 0.5 * cap } else { 1.0 };
        // Bracket τ* by repeated squaring of the step, then bisect geometrically.
        let (mut lo, mut hi);
        let mut f = 2.0f64;
        if self.slope(start) <= t {
            lo = start;
            loop {
                let next = (lo * f).min(cap);
                if next == cap || self.slope(next) > t {
                    hi = next;
                    break;
                }
                if next > 1e300 {
                    return f64::INFINITY;
                }
                lo = next;
                f *= f;
            }
        } else {
            hi = start;
            loop {
                let next = hi / f;
                if next < 1e-300 {
                    return 0.0;
                }
                if self.slope(next) <= t {
                    lo = next;
                    break;
                }
                hi = next;
                f *= f;
            }
        }
        for _ in 0..200 {
            if hi <= lo * (1.0 + 1e-9) {
                break;
            }
            let mid = (lo * hi).sqrt();
            if self.slope(mid) <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let gain = |tau: f64| {
            let (tt, a) = (tau * t, self.value(tau));
            if tt - a <= 16.0 * f64::EPSILON * tt {
                0.0
            } else {
                tt - a
            }
        };
        let at_hi = gain(hi);
        gain(lo).max(if at_hi.is_nan() { 0.0 } else { at_hi })
    }

    fn conjugate_unchecked(&self) -> Result<YoungFunction> {
        match &self.kind {
            Kind::Power { p } if *p == 1.0 => Ok(Self::linear_cap(1.0)),
            Kind::Power { p } => {
                let q = p / (p - 1.0);
                let coef = (p - 1.0) * p.powf(-q);
                Ok(Self::scaled(Self::power(q), coef.powf(1.0 / q)))
            }
            Kind::LinearCap { t0 } => Ok(Self::scaled(Self::linear(), *t0)),
            Kind::Scaled { base, c } => Ok(Self::scaled(base.conjugate_unchecked()?, 1.0 / c)),
            Kind::Tabulated { knots, values, interp: Interp::Linear } => Ok(upper_hull_conjugate(knots, values)),
            _ => self.tangent_conjugate(),
        }
    }

    fn tangent_conjugate(&self) -> Result<YoungFunction> {
        const SAMPLES: usize = 4096;
        let cap = self.finite_limit();
        let scale = self.inv(1.0);
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Numerical("cannot locate the scale of A".into()));
        }
        // The zero set of A matters only if it reaches the sampling floor.
        let zero_end = if self.value(scale * 1e-10) > 0.0 { 0.0 } else { self.inv(0.0) };
        let lo = (scale * 1e-10).max(zero_end);
        let hi = if cap.is_finite() { cap * (1.0 - 1e-9) } else { scale * 1e10 };
        let mut taus = Vec::with_capacity(SAMPLES + 1);
        if zero_end > 0.0 {
            taus.push(zero_end);
        }
        taus.extend(logspace(lo.max(f64::MIN_POSITIVE), hi, SAMPLES).into_iter().filter(|&t| t > zero_end));
        taus.extend(self.kinks().into_iter().filter(|&k| k > lo && k < hi));
        taus.sort_by(f64::total_cmp);
        taus.dedup();
        let mut ys: Vec<f64> = Vec::with_capacity(taus.len() + 2);
        let mut vs: Vec<f64> = Vec::with_capacity(taus.len() + 2);
        let mut prev_tau: Option<f64> = None;
        for &tau in &taus {
            let y = self.slope(tau);
            if !y.is_finite() {
                break;
            }
            let a_tau = self.value(tau);
            let ty = tau * y;
            // Differences at rounding level are an exact zero of Ã.
            let v = if ty - a_tau <= 16.0 * f64::EPSILON * ty { 0.0 } else { ty - a_tau };
            if let Some(&last) = ys.last() {
                if y <= last {
                    // Flat stretch of A': keep the largest value.
                    let n = vs.len();
                    vs[n - 1] = f64::max(vs[n - 1], v);
                    prev_tau = Some(tau);
                    continue;
                }
                // A jump of A' (a kink of A) leaves a linear piece of Ã; fill
                // it with the larger of the two adjacent tangent lines.
                const STEP: f64 = 1.02;
                let ratio = if last > 0.0 { y / last } else { f64::INFINITY };
                if ratio > STEP {
                    let tp = prev_tau.unwrap_or(0.0);
                    let ap = self.value(tp);
                    let start = if last > 0.0 { last } else { y * 1e-6 };
                    let m = ((y / start).ln() / STEP.ln()).ceil().min(2000.0) as usize;
                    for j in 1..m {
                        let yj = start * (y / start).powf(j as f64 / m as f64);
                        ys.push(yj);
                        vs.push(f64::max(tp * yj - ap, tau * yj - a_tau).max(0.0));
                    }
                }
            }
            ys.push(y);
            vs.push(v);
            prev_tau = Some(tau);
        }
        if cap.is_finite() {
            // Beyond the last tangent the supremum sits at the cap.
            let y_end = ys.last().copied().unwrap_or(1.0) * 2.0 + 1.0;
            ys.push(y_end);
            vs.push(y_end * cap - self.value(cap));
        }
        let mut knots = vec![0.0];
        let mut values = vec![Ext::Finite(0.0)];
        for (y, v) in ys.into_iter().zip(vs) {
            if y > 0.0 {
                knots.push(y);
                values.push(Ext::Finite(v));
            }
        }
        Ok(Self::new(Kind::Tabulated { knots, values, interp: Interp::Linear }))
    }

    /// Known points where `A'` may jump.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            Kind::PowerLog { .. } => vec![self.splice()],
            Kind::LinearCap { t0 } => vec![*t0],
            Kind::Scaled { base, c } => base.kinks().into_iter().map(|k| k / c).collect(),
            Kind::Sum { terms } | Kind::Max { terms } => terms.iter().flat_map(|a| a.kinks()).collect(),
            Kind::Tabulated { knots, .. } => knots.clone(),
            Kind::Power { .. } => Vec::new(),
        }
    }

    // ----------------------------------------------------------------- asymptotics

    /// Asymptotic class at one end, from the family (or the domain hint).
    pub fn asymptotic(&self, end: End) -> Option<Asym> {
        if let Some(h) = self.domain_hint {
            let e = match end {
                End::Zero => h.e_zero,
                End::Infinity => h.e_infinity,
            };
            if let Some(e) = e {
                return Some(Asym::power(e));
            }
        }
        match &self.kind {
            Kind::Power { p } => Some(Asym::power(*p)),
            Kind::PowerLog { p, alpha, .. } => Some(match end {
                End::Zero => Asym::power(1.0),
                End::Infinity => Asym::Regular { power: *p, log_power: *alpha },
            }),
            Kind::LinearCap { .. } => Some(match end {
                End::Zero => Asym::Vanishing,
                End::Infinity => Asym::Infinite,
            }),
            Kind::Scaled { base, .. } => base.asymptotic(end),
            Kind::Sum { terms } | Kind::Max { terms } => {
                let classes: Option<Vec<Asym>> = terms.iter().map(|a| a.asymptotic(end)).collect();
                dominant_class(&classes?, end)
            }
            Kind::Tabulated { knots, values, interp } => table_asym(knots, values, *interp, end),
        }
    }

    // ----------------------------------------------------------------- indices

    /// Matuszewska–Orlicz indices `(i_0, i_∞)` from
    /// `log λ / log (A^{-1}(λt)/A^{-1}(t))`, `λ = 2^{-1}, …, 2^{-8}`, with
    /// `t` spanning `[1e20, 1e100]` (or its reciprocal). For each `λ` the `t`-limit is
    /// extrapolated linearly in `1/|log t|`; the reported value is the mean and
    /// the uncertainty the spread of the last three `λ`-extrapolants.
    pub fn indices(&self) -> (IndexEstimate, IndexEstimate) {
        (self.index_at(End::Zero), self.index_at(End::Infinity))
    }

    fn index_at(&self, end: End) -> IndexEstimate {
        let ts: Vec<f64> = match end {
            End::Zero => logspace(1e-100, 1e-20, 17),
            End::Infinity => logspace(1e20, 1e100, 17),
        };
        let mut extrapolants = Vec::new();
        for j in 1..=8 {
            let lam = 0.5f64.powi(j);
            let mut xs = Vec::new();
            let mut vals = Vec::new();
            for &t in &ts {
                let (a, b) = (self.inv(lam * t), self.inv(t));
                let r = (a / b).ln();
                if r.is_finite() && r < 0.0 && b > 0.0 {
                    xs.push(1.0 / t.ln().abs());
                    vals.push(lam.ln() / r);
                }
            }
            if xs.len() < 3 {
                return IndexEstimate { value: f64::NAN, uncertainty: f64::INFINITY, determinate: false };
            }
            let (_, intercept) = linear_fit(&xs, &vals);
            extrapolants.push(intercept);
        }
        let last = &extrapolants[extrapolants.len() - 3..];
        let hi = last.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = last.iter().copied().fold(f64::INFINITY, f64::min);
        let value = last.iter().sum::<f64>() / 3.0;
        let uncertainty = hi - lo;
        IndexEstimate { value, uncertainty, determinate: value.is_finite() && uncertainty < 0.1 }
    }

    // ----------------------------------------------------------------- domination

    /// Grid semi-decision of `B(t) ≤ A(c t)` (with `self = A`), searching `c`
    /// over `2^{i/4} ∈ [1, 1e3]` and `t` over ten decades of the range. A
    /// `Holds` verdict certifies the grid only.
    pub fn dominates(&self, b: &YoungFunction, range: DominationRange, t0: f64) -> Result<Domination> {
        if !(t0 > 0.0) && range != DominationRange::Global {
            return Err(Error::Domain(format!("threshold t0 must be positive, got {t0}")));
        }
        let ts = match range {
            DominationRange::Global => logspace(1e-10, 1e10, 801),
            DominationRange::NearZero => logspace(t0 * 1e-10, t0, 401),
            DominationRange::NearInfinity => logspace(t0, t0 * 1e10, 401),
        };
        let bv: Vec<f64> = ts.iter().map(|&t| b.value(t)).collect();
        let c_max = 1e3;
        let mut worst_t = ts[0];
        let mut i = 0;
        loop {
            let c = 2f64.powf(i as f64 / 4.0);
            if c > c_max * (1.0 + 1e-12) {
                break;
            }
            let failure = ts.iter().zip(&bv).find(|(&t, &bt)| {
                let at = self.value(c * t);
                bt > at * (1.0 + 1e-9) + 1e-300
            });
            match failure {
                None => return Ok(Domination::Holds { c }),
                Some((&t, _)) => worst_t = t,
            }
            i += 1;
        }
        Ok(Domination::Fails { t: worst_t, c_max })
    }
}

// --------------------------------------------------------------------- helpers

/// Smallest splice `t_s ≥ e` for which `t^p (log t)^α` is convex with
/// non-decreasing `A(t)/t` on `[t_s, ∞)`.
fn auto_splice(p: f64, alpha: f64) -> f64 {
    // With L = log t: (A/t)' ≥ 0 ⟺ (p−1)L + α ≥ 0, and
    // A'' ≥ 0 ⟺ p(p−1)L² + (2p−1)αL + α(α−1) ≥ 0.
    let mut l = 1.0f64.max(-alpha / (p - 1.0));
    let (qa, qb, qc) = (p * (p - 1.0), (2.0 * p - 1.0) * alpha, alpha * (alpha - 1.0));
    let disc = qb * qb - 4.0 * qa * qc;
    if disc >= 0.0 {
        l = l.max((-qb + disc.sqrt()) / (2.0 * qa));
    }
    (l * (1.0 + 1e-12)).exp()
}

fn dominant_class(classes: &[Asym], end: End) -> Option<Asym> {
    match end {
        End::Zero => {
            let regular: Vec<(f64, f64)> = classes
                .iter()
                .filter_map(|c| match c {
                    Asym::Regular { power, log_power } => Some((*power, *log_power)),
                    _ => None,
                })
                .collect();
            if regular.is_empty() {
                return Some(Asym::Vanishing);
            }
            let best = regular.iter().copied().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, c| {
                if c.0 < acc.0 || (c.0 == acc.0 && c.1 > acc.1) {
                    c
                } else {
                    acc
                }
            });
            Some(Asym::Regular { power: best.0, log_power: best.1 })
        }
        End::Infinity => {
            if classes.iter().any(|c| matches!(c, Asym::Infinite)) {
                return Some(Asym::Infinite);
            }
            let best = classes
                .iter()
                .filter_map(|c| match c {
                    Asym::Regular { power, log_power } => Some((*power, *log_power)),
                    _ => None,
                })
                .fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |acc, c| {
                    if c.0 > acc.0 || (c.0 == acc.0 && c.1 > acc.1) {
                        c
                    } else {
                        acc
                    }
                });
            best.0.is_finite().then_some(Asym::Regular { power: best.0, log_power: best.1 })
        }
    }
}

fn validate_table(knots: &[f64], values: &[Ext], interp: Interp) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidInput(m));
    if knots.len() != values.len() {
        return bad(format!("{} knots but {} values", knots.len(), values.len()));
    }
    if knots.len() < 2 {
        return bad("a table needs at least two knots".into());
    }
    for i in 0..knots.len() {
        if !(knots[i].is_finite() && knots[i] >= 0.0) {
            return bad(format!("knot {i} is not a finite nonnegative abscissa"));
        }
        if i > 0 && knots[i] <= knots[i - 1] {
            return bad(format!("knot {i} is not strictly increasing"));
        }
        if let Ext::Finite(v) = values[i] {
            if !(v >= 0.0) {
                return bad(format!("value at knot {i} is negative or NaN"));
            }
        }
        if i > 0 && values[i] < values[i - 1] {
            return bad(format!("values decrease at knot {i}"));
        }
    }
    if !values[0].is_finite() || !values[1].is_finite() {
        return bad("the first two table values must be finite".into());
    }
    match interp {
        Interp::Linear => {
            if knots[0] != 0.0 || values[0] != Ext::Finite(0.0) {
                return bad("a linear table must start at (0, 0)".into());
            }
        }
        Interp::LogLog => {
            if knots[0] <= 0.0 {
                return bad("a log-log table needs a positive first knot".into());
            }
        }
    }
    let mut prev: Option<f64> = match interp {
        Interp::Linear => None,
        // Below the first knot a log-log table behaves like 0 or a power ≥ 1.
        Interp::LogLog => Some(0.0),
    };
    for i in 1..knots.len() {
        let (Some(v0), Some(v1)) = (values[i - 1].finite(), values[i].finite()) else {
            continue;
        };
        let s = (v1 - v0) / (knots[i] - knots[i - 1]);
        if let Some(p) = prev {
            if secant_violation(p, s) {
                return bad(format!("table is not convex at knot {}", i - 1));
            }
        }
        if interp == Interp::LogLog && v0 > 0.0 {
            let e = (v1 / v0).ln() / (knots[i] / knots[i - 1]).ln();
            if e < 1.0 - CONVEXITY_SLACK {
                return bad(format!("log-log segment ending at knot {i} has exponent {e} < 1"));
            }
        }
        prev = Some(s);
    }
    Ok(())
}

fn seg_exponent(t0: f64, v0: f64, t1: f64, v1: f64) -> f64 {
    (v1 / v0).ln() / (t1 / t0).ln()
}

/// Index `i` of the segment `[t_i, t_{i+1}]` containing `t` (clamped).
fn locate(knots: &[f64], t: f64) -> usize {
    let k = knots.partition_point(|&x| x <= t);
    k.saturating_sub(1).min(knots.len() - 2)
}

fn last_finite(values: &[Ext]) -> usize {
    values.iter().rposition(|v| v.is_finite()).unwrap_or(0)
}

fn table_value(knots: &[f64], values: &[Ext], interp: Interp, t: f64) -> f64 {
    let m = knots.len();
    let lf = last_finite(values);
    if lf < m - 1 && t > knots[lf] {
        return f64::INFINITY;
    }
    let v = |i: usize| values[i].to_f64();
    if t < knots[0] {
        // Only reachable for log-log tables.
        let v0 = v(0);
        if v0 == 0.0 {
            return 0.0;
        }
        let e = seg_exponent(knots[0], v0, knots[1], v(1));
        return v0 * (t / knots[0]).powf(e);
    }
    let i = if t >= knots[lf] { lf.max(1) - 1 } else { locate(knots, t) };
    let (t0, t1, v0, v1) = (knots[i], knots[i + 1], v(i), v(i + 1));
    match interp {
        Interp::Linear => v0 + (v1 - v0) / (t1 - t0) * (t - t0),
        Interp::LogLog => {
            if v0 == 0.0 {
                v0 + (v1 - v0) / (t1 - t0) * (t - t0)
            } else {
                v0 * (t / t0).powf(seg_exponent(t0, v0, t1, v1))
            }
        }
    }
}

fn table_slope(knots: &[f64], values: &[Ext], interp: Interp, t: f64) -> f64 {
    let lf = last_finite(values);
    if lf < knots.len() - 1 && t >= knots[lf] {
        return f64::INFINITY;
    }
    let v = |i: usize| values[i].to_f64();
    if t < knots[0] {
        let v0 = v(0);
        if v0 == 0.0 {
            return 0.0;
        }
        let e = seg_exponent(knots[0], v0, knots[1], v(1));
        return e * v0 * (t / knots[0]).powf(e) / t;
    }
    let i = if t >= knots[lf] { lf.max(1) - 1 } else { locate(knots, t) };
    let (t0, t1, v0, v1) = (knots[i], knots[i + 1], v(i), v(i + 1));
    match interp {
        Interp::LogLog if v0 > 0.0 => {
            let e = seg_exponent(t0, v0, t1, v1);
            e * v0 * (t / t0).powf(e) / t
        }
        _ => (v1 - v0) / (t1 - t0),
    }
}

fn table_inverse(knots: &[f64], values: &[Ext], interp: Interp, y: f64) -> f64 {
    let v = |i: usize| values[i].to_f64();
    let solve = |i: usize| -> f64 {
        let (t0, t1, v0, v1) = (knots[i], knots[i + 1], v(i), v(i + 1));
        match interp {
            Interp::LogLog if v0 > 0.0 => t0 * (y / v0).powf(1.0 / seg_exponent(t0, v0, t1, v1)),
            _ => {
                if v1 == v0 {
                    t1
                } else {
                    t0 + (y - v0) * (t1 - t0) / (v1 - v0)
                }
            }
        }
    };
    if interp == Interp::LogLog && y < v(0) {
        let e = seg_exponent(knots[0], v(0), knots[1], v(1));
        return knots[0] * (y / v(0)).powf(1.0 / e);
    }
    for i in 0..knots.len() - 1 {
        if values[i + 1].to_f64() > y {
            if !values[i + 1].is_finite() {
                return knots[i];
            }
            return solve(i).clamp(knots[i], knots[i + 1]);
        }
    }
    // Beyond the last knot: continue the last segment.
    let m = knots.len();
    let (v0, v1) = (v(m - 2), v(m - 1));
    if v1 == v0 {
        return f64::INFINITY;
    }
    solve(m - 2).max(knots[m - 1])
}

fn table_asym(knots: &[f64], values: &[Ext], interp: Interp, end: End) -> Option<Asym> {
    let m = knots.len();
    let v = |i: usize| values[i].to_f64();
    match (interp, end) {
        (_, End::Infinity) if !values[m - 1].is_finite() => Some(Asym::Infinite),
        (Interp::Linear, End::Zero) => Some(if v(1) == 0.0 { Asym::Vanishing } else { Asym::power(1.0) }),
        (Interp::Linear, End::Infinity) => Some(Asym::power(1.0)),
        (Interp::LogLog, End::Zero) => {
            if v(0) == 0.0 {
                Some(Asym::Vanishing)
            } else {
                Some(Asym::power(seg_exponent(knots[0], v(0), knots[1], v(1))))
            }
        }
        (Interp::LogLog, End::Infinity) => {
            let (a, b) = (v(m - 2), v(m - 1));
            (a > 0.0).then(|| Asym::power(seg_exponent(knots[m - 2], a, knots[m - 1], b)))
        }
    }
}

/// Exact conjugate of a piecewise-linear table via its upper hull: the
/// conjugate is piecewise linear with knots at the segment slopes.
fn upper_hull_conjugate(knots: &[f64], values: &[Ext]) -> YoungFunction {
    let lf = last_finite(values);
    let capped = lf < knots.len() - 1;
    let t = &knots[..=lf];
    let v: Vec<f64> = values[..=lf].iter().map(|x| x.to_f64()).collect();
    let mut ys = vec![0.0];
    let mut ws = vec![0.0f64];
    for i in 0..t.len() - 1 {
        let sigma = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
        let w = sigma * t[i] - v[i];
        if sigma <= *ys.last().unwrap() * (1.0 + CONVEXITY_SLACK) {
            let n = ws.len();
            ws[n - 1] = ws[n - 1].max(w);
            continue;
        }
        ys.push(sigma);
        ws.push(w);
    }
    let mut vals: Vec<Ext> = ws.into_iter().map(Ext::Finite).collect();
    let y_last = *ys.last().unwrap();
    let y_next = 2.0 * y_last + 1.0;
    if capped {
        // Beyond the last slope the supremum sits at the cap: slope t_lf.
        ys.push(y_next);
        vals.push(Ext::Finite(y_next * t[lf] - v[lf]));
    } else {
        ys.push(y_next);
        vals.push(Ext::Infinite);
    }
    YoungFunction::new(Kind::Tabulated { knots: ys, values: vals, interp: Interp::Linear })
}
