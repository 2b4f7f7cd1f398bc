//! One function per subcommand. Each returns the result block, an optional
//! table for CSV output, and the exit status it implies.

use campanato::analysis::{decreasing_rearrangement, double_star, lemma_rinorm_equivalence, luxemburg_norm, Monotone};
use campanato::extremals::{BumpShape, ExtremalSpec, Family};
use campanato::gauges::{
    bmo_vmo_verdict, check_integral_condition, continuity_gap_report, phi_gauge, psi_k_alternative, psi_k_gauge,
    spanne_modulus, Decision, IntegralForm,
};
use campanato::numeric::{loglog_slope, logspace};
use campanato::seminorms::{embedding_ratio_experiment, necessity_scaling_experiment, GagliardoOptions};
use campanato::young::End;
use campanato::{BallFamily, EmbeddingParams, SampledFunction, StepFunction, Verdict, YoungFunction};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{Command, Experiment, Grid, RunConfig};
use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Indeterminate,
    Divergent,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Indeterminate => 3,
            Status::Divergent => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
    pub status: Status,
}

impl Outcome {
    fn ok(result: Value, table: Option<Table>) -> Self {
        Outcome { result, table, status: Status::Ok }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Conjugate => conjugate(cfg),
        Command::Inverse => inverse(cfg),
        Command::Indices => indices(cfg),
        Command::Gauge => gauge(cfg),
        Command::Check => check(cfg),
        Command::Verify => verify(cfg),
        Command::Rearrange => rearrange(cfg),
        Command::Norm => norm(cfg),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Core(e.into()))
}

fn grid_points(cfg: &RunConfig) -> Vec<f64> {
    let g = cfg.grids.unwrap_or(Grid { r_min: 1.0, r_max: 10.0, points: 2 });
    logspace(g.r_min, g.r_max, g.points)
}

fn params(cfg: &RunConfig) -> Result<EmbeddingParams> {
    Ok(EmbeddingParams::new(cfg.params.n, cfg.params.s, cfg.params.k)?)
}

fn conjugate(cfg: &RunConfig) -> Result<Outcome> {
    let a = cfg.young()?;
    let at = a.conjugate()?;
    let ts = grid_points(cfg);
    let mut rows = Vec::with_capacity(ts.len());
    let mut result = json!({ "conjugate": to_value(&at)? });
    if cfg.check_duality {
        let mut worst = (f64::INFINITY, 0.0f64);
        let mut violations = Vec::new();
        for &t in &ts {
            let ratio = a.inv(t) * at.inv(t) / t;
            worst = (worst.0.min(ratio), worst.1.max(ratio));
            if !(ratio >= 1.0 - cfg.tol && ratio <= 2.0 * (1.0 + cfg.tol)) {
                violations.push(t);
            }
            rows.push(vec![t, at.value(t), ratio]);
        }
        result["duality"] = json!({
            "band": [1.0, 2.0],
            "min_ratio": worst.0,
            "max_ratio": worst.1,
            "within_band": violations.is_empty(),
            "violations": violations,
        });
        return Ok(Outcome::ok(result, Some(Table { header: vec!["t", "conjugate", "duality_ratio"], rows })));
    }
    rows.extend(ts.iter().map(|&t| vec![t, at.value(t)]));
    Ok(Outcome::ok(result, Some(Table { header: vec!["t", "conjugate"], rows })))
}

fn inverse(cfg: &RunConfig) -> Result<Outcome> {
    let a = cfg.young()?;
    let mut rows = Vec::new();
    for t in grid_points(cfg) {
        rows.push(vec![t, a.inverse(t)?]);
    }
    let values: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    Ok(Outcome::ok(json!({ "inverse": values }), Some(Table { header: vec!["t", "inverse"], rows })))
}

fn indices(cfg: &RunConfig) -> Result<Outcome> {
    let (zero, infinity) = cfg.young()?.indices();
    let status = if zero.determinate && infinity.determinate { Status::Ok } else { Status::Indeterminate };
    let result = json!({ "index_at_zero": to_value(&zero)?, "index_at_infinity": to_value(&infinity)? });
    Ok(Outcome { result, table: None, status })
}

/// Log–log slope over the first and the last two grid points.
fn edge_exponents(rs: &[f64], vs: &[f64]) -> (f64, f64) {
    let m = rs.len();
    (loglog_slope(&rs[..2], &vs[..2]), loglog_slope(&rs[m - 2..], &vs[m - 2..]))
}

fn gauge(cfg: &RunConfig) -> Result<Outcome> {
    let a = cfg.young()?;
    let pr = params(cfg)?;
    let rs = grid_points(cfg);
    let (g, branch, alt) = if pr.s < 1.0 {
        (phi_gauge(&pr, a)?, "phi_sA", None)
    } else if pr.k < pr.int_part() {
        let alt = if pr.k == 0 { Some(psi_k_alternative(&pr, a)?) } else { None };
        (psi_k_gauge(&pr, a)?, if pr.k == 0 { "psi_sA" } else { "psi_k" }, alt)
    } else {
        (psi_k_gauge(&pr, a)?, "psi_k_closed_form", None)
    };
    let values: Vec<f64> = rs.iter().map(|&r| g.eval(r)).collect();
    let (edge_lo, edge_hi) = edge_exponents(&rs, &values);
    let mut result = json!({
        "branch": branch,
        "label": g.label,
        "admissibility": g.admissibility(&rs),
        "edge_exponents": { "small_r": edge_lo, "large_r": edge_hi },
        "exact_range": [g.exact_range().0, g.exact_range().1],
    });
    let mut header = vec!["r", "gauge", "extrapolated"];
    let mut rows: Vec<Vec<f64>> =
        rs.iter().zip(&values).map(|(&r, &v)| vec![r, v, f64::from(u8::from(g.eval_flagged(r).1))]).collect();
    if let Some(alt) = alt {
        let ratios: Vec<f64> = rs.iter().zip(&values).map(|(&r, &v)| v / alt.eval(r)).collect();
        let within = ratios.iter().all(|&q| q >= 0.5 * (1.0 - cfg.tol) && q <= 1.0 + cfg.tol);
        result["consistency"] = json!({ "band": [0.5, 1.0], "within_band": within });
        header.push("ratio_to_alternative");
        for (row, q) in rows.iter_mut().zip(ratios) {
            row.push(q);
        }
    }
    result["table"] = to_value(&rows)?;
    Ok(Outcome::ok(result, Some(Table { header, rows })))
}

fn check(cfg: &RunConfig) -> Result<Outcome> {
    let a = cfg.young()?;
    let p = cfg.params;
    // The BMO criterion also covers integer s = n, which the parameter validation excludes.
    let raw = EmbeddingParams { n: p.n, s: p.s, k: p.k };
    let bmo = bmo_vmo_verdict(&raw, a)?;
    let mut undecided = bmo.bmo == Decision::Indeterminate || bmo.vmo == Decision::Indeterminate;
    let mut result = json!({ "bmo_vmo": to_value(&bmo)? });
    let (n, s) = (p.n as f64, p.s);
    let mut conditions = serde_json::Map::new();
    if s < 1.0 {
        let pr = params(cfg)?;
        let spanne = spanne_modulus(&pr, a, 1.0)?;
        undecided |= spanne.feasible == Decision::Indeterminate;
        result["spanne"] = to_value(&spanne)?;
        let e = pr.exponent_first_order();
        for (name, form) in
            [("t_over_a_at_infinity", IntegralForm::PowerOfTOverA), ("dual_tail_at_infinity", IntegralForm::DualTail)]
        {
            let v = check_integral_condition(a, e, End::Infinity, form)?;
            undecided |= v.verdict == Verdict::Indeterminate;
            conditions.insert(name.into(), to_value(&v)?);
        }
        if let Some(alphas) = &cfg.alphas {
            result["continuity_gap"] = to_value(&continuity_gap_report(&pr, alphas)?)?;
        }
    } else if s.fract() != 0.0 {
        let pr = params(cfg)?;
        for k in (0..pr.int_part()).filter(|&k| s < n + k as f64 + 1.0) {
            let v = check_integral_condition(a, pr.exponent_order_k(k), End::Zero, IntegralForm::PowerOfTOverA)?;
            undecided |= v.verdict == Verdict::Indeterminate;
            conditions.insert(format!("small_scale_order_{k}"), to_value(&v)?);
        }
    }
    result["integral_conditions"] = Value::Object(conditions);
    let status = if undecided { Status::Indeterminate } else { Status::Ok };
    Ok(Outcome { result, table: None, status })
}

fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let exp = cfg.experiment.as_ref().ok_or_else(|| CliError::Usage("verify needs --experiment".into()))?;
    match exp.kind {
        Experiment::Ratio => verify_ratio(cfg, exp.level, exp.family.as_deref().unwrap_or("uf")),
        Experiment::Necessity => {
            let pr = params(cfg)?;
            let (j0, j1) = exp.scales.unwrap_or((2, 64));
            let js: Vec<f64> = (j0..=j1).map(f64::from).collect();
            let shape = BumpShape::for_order(pr.n, pr.k)?;
            let rep = necessity_scaling_experiment(&pr, &shape, &js, exp.level)?;
            let rows = rep.series.iter().map(|p| p.to_vec()).collect();
            let mut result = to_value(&rep)?;
            result["expected_slope"] = json!(pr.s - pr.n as f64 - pr.k as f64 - 1.0);
            Ok(Outcome::ok(result, Some(Table { header: vec!["j", "quotient"], rows })))
        }
        Experiment::Lemma45 => {
            let a = cfg.young()?;
            let beta = exp.beta.unwrap_or(0.0);
            let alpha = exp.alpha.unwrap_or(0.25);
            let mut rows = Vec::new();
            let mut all_within = true;
            let mut band = (f64::NAN, f64::NAN);
            for r in grid_points(cfg) {
                // Negative β needs a finite window for the right-hand norm.
                let window = (beta < 0.0).then_some(100.0 * r);
                let eq = lemma_rinorm_equivalence(alpha, beta, r, a, window)?;
                let ok = eq.ratio >= eq.band.0 * (1.0 - cfg.tol) && eq.ratio <= eq.band.1 * (1.0 + cfg.tol);
                all_within &= ok;
                band = eq.band;
                rows.push(vec![r, eq.lhs, eq.rhs, eq.ratio]);
            }
            let result = json!({
                "experiment": "lemma45",
                "alpha": alpha,
                "beta": beta,
                "band": [band.0, band.1],
                "all_within_band": all_within,
                "rows": rows,
            });
            Ok(Outcome::ok(result, Some(Table { header: vec!["r", "lhs", "rhs", "ratio"], rows })))
        }
    }
}

fn verify_ratio(cfg: &RunConfig, level: usize, family: &str) -> Result<Outcome> {
    let a = cfg.young()?;
    let pr = params(cfg)?;
    let family = match family {
        "uf" => Family::Uf,
        "vf" => Family::Vf,
        "wf" => Family::Wf,
        other => return Err(CliError::Usage(format!("unknown family `{other}` (expected uf, vf or wf)"))),
    };
    let spec = ExtremalSpec { family, params: pr, f: Some(StepFunction::indicator(1.0)?), h: None, j: None };
    let u = spec.build()?;
    let g = if pr.s < 1.0 { phi_gauge(&pr, a)? } else { psi_k_gauge(&pr, a)? };
    let grid = cfg.grids.ok_or_else(|| CliError::Usage("ratio experiment needs a ball grid".into()))?;
    let balls = BallFamily::geometric(pr.n, grid.r_min, grid.r_max, grid.points)?;
    let opts = GagliardoOptions { level, seed: cfg.seed, ..Default::default() };
    let rep = embedding_ratio_experiment(&u, &pr, a, &g, &balls, &opts)?;
    let rows = rep.rows.iter().map(|r| vec![r.radius, r.measure, r.oscillation, r.gauge, r.normalized]).collect();
    let status = if rep.divergent { Status::Divergent } else { Status::Ok };
    Ok(Outcome {
        result: to_value(&rep)?,
        table: Some(Table { header: vec!["radius", "measure", "oscillation", "gauge", "normalized"], rows }),
        status,
    })
}

/// Step data as values on cells of the given lengths.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepData {
    values: Vec<f64>,
    weights: Vec<f64>,
}

fn sampled_input(v: &Value) -> Result<SampledFunction> {
    if v.get("grid").is_some() {
        let f: SampledFunction =
            serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("--input: {e}")))?;
        f.validate()?;
        return Ok(f);
    }
    let d: StepData = serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("--input: {e}")))?;
    if d.values.len() != d.weights.len() {
        return Err(CliError::Usage(format!("--input: {} values but {} weights", d.values.len(), d.weights.len())));
    }
    let mut pos = 0.0;
    let grid = d
        .weights
        .iter()
        .map(|w| {
            pos += w;
            pos
        })
        .collect();
    Ok(SampledFunction::new(grid, d.values, Monotone::None)?)
}

fn rearrange(cfg: &RunConfig) -> Result<Outcome> {
    let input = cfg.input.as_ref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let f = match serde_json::from_value::<StepData>(input.clone()) {
        Ok(d) => decreasing_rearrangement(&d.values, &d.weights)?,
        Err(_) => sampled_input(input)?.rearranged(),
    };
    let out = if cfg.double_star { double_star(&f) } else { f };
    let rows = out.grid.iter().zip(&out.values).map(|(&r, &v)| vec![r, v]).collect();
    let header = vec!["r", if cfg.double_star { "double_star" } else { "rearrangement" }];
    Ok(Outcome::ok(to_value(&out)?, Some(Table { header, rows })))
}

fn norm(cfg: &RunConfig) -> Result<Outcome> {
    let a: &YoungFunction = cfg.young()?;
    let input = cfg.input.as_ref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let f = sampled_input(input)?;
    let value = luxemburg_norm(&f, a);
    Ok(Outcome::ok(json!({ "luxemburg_norm": value, "integral": f.integral() }), None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_follow_the_contract() {
        assert_eq!(Status::Ok.exit_code(), 0);
        assert_eq!(Status::Indeterminate.exit_code(), 3);
        assert_eq!(Status::Divergent.exit_code(), 4);
    }

    #[test]
    fn edge_exponents_of_a_power() {
        let rs = logspace(1e-3, 1.0, 7);
        let vs: Vec<f64> = rs.iter().map(|r| r.powf(0.75)).collect();
        let (lo, hi) = edge_exponents(&rs, &vs);
        assert!((lo - 0.75).abs() < 1e-12 && (hi - 0.75).abs() < 1e-12);
    }
}
