//! End-to-end acceptance checks. Each criterion runs against an independent
//! oracle, is timed, and prints one PASS/FAIL line.

use std::io::Write;
use std::time::{Duration, Instant};

use campanato::analysis::{char_norm, lemma_rinorm_equivalence, luxemburg_norm};
use campanato::extremals::{make_normalized_f, make_uf, BumpShape};
use campanato::gauges::{
    build_f, check_integral_condition, check_integral_condition_numeric, phi_gauge, psi_gauge, spanne_modulus_verdicts,
    IntegralForm,
};
use campanato::numeric::{loglog_slope, logspace};
use campanato::quad::{integrate_to_infinity, Tol};
use campanato::seminorms::{
    embedding_ratio_experiment, necessity_scaling_experiment, optimality_experiment, GagliardoOptions,
};
use campanato::young::End;
use campanato::{BallFamily, EmbeddingParams, Gauge, GaugeLabel, StepFunction, Verdict, YoungFunction};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check, u64);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn params(n: usize, s: f64, k: usize) -> EmbeddingParams {
    EmbeddingParams::new(n, s, k).expect("valid parameters")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn conjugation_suite() -> Check {
    let ts = logspace(1e-6, 1e6, 50);
    let mut worst_bi = 0.0f64;
    for p in [1.5, 2.0, 3.0, 4.0] {
        let a = YoungFunction::power(p);
        let at = a.conjugate().map_err(|e| e.to_string())?;
        let att = at.conjugate().map_err(|e| e.to_string())?;
        for &t in &ts {
            let prod = a.inv(t) * at.inv(t);
            ensure(prod >= t * (1.0 - 1e-12) && prod <= 2.0 * t * (1.0 + 1e-12), || {
                format!("p={p} t={t}: A^-1 Ã^-1 = {prod}")
            })?;
            let bi = rel(att.value(t), a.value(t));
            worst_bi = worst_bi.max(bi);
            ensure(bi < 1e-6, || format!("p={p} t={t}: biconjugate off by {bi:e}"))?;
        }
    }
    Ok(format!("worst biconjugation error {worst_bi:.1e}"))
}

fn char_norm_oracle() -> Check {
    let mut worst = 0.0f64;
    for (name, a) in YoungFunction::catalogue() {
        for m in [1e-3, 1.0, 1e3] {
            let chi = StepFunction::indicator(m).and_then(|f| f.to_sampled()).map_err(|e| e.to_string())?;
            let lux = luxemburg_norm(&chi, &a);
            // Independent oracle: the modular of χ/λ equals 1 at λ = 1/A^{-1}(1/m).
            let want = 1.0 / a.inv(1.0 / m);
            let got = char_norm(&a, m).map_err(|e| e.to_string())?;
            let e = rel(lux, want).max(rel(got, want));
            worst = worst.max(e);
            ensure(e < 1e-8, || format!("{name} m={m}: luxemburg {lux}, char_norm {got}, oracle {want}"))?;
        }
    }
    Ok(format!("worst relative error {worst:.1e}"))
}

fn f_identity() -> Check {
    let (n, s) = (3.0, 1.5);
    let a = YoungFunction::power(4.0);
    let at = a.conjugate().map_err(|e| e.to_string())?;
    let f = build_f(&params(3, s, 0), &a).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for r in [0.1f64, 1.0, 10.0] {
        for lambda in [0.1, 1.0, 10.0] {
            let h = |rho: f64| at.value(rho.powf(-1.0 + (s - 1.0) / n) / lambda);
            let lhs = integrate_to_infinity(&h, r.powf(n), Tol::rel(1e-10), 1e-8);
            let rhs = n / (n + 1.0 - s) * r.powf(n) * f.value(r.powf(s - n - 1.0) / lambda);
            let e = rel(lhs.value, rhs);
            worst = worst.max(e);
            ensure(lhs.converged && e < 1e-3, || format!("r={r} λ={lambda}: {} vs {rhs}", lhs.value))?;
        }
    }
    Ok(format!("9 pairs, worst relative error {worst:.1e}"))
}

fn gauge_slopes() -> Check {
    let rs = logspace(1e-3, 1.0, 31);
    let mut slopes = Vec::new();
    for (n, s, p) in [(3usize, 1.5, 4.0), (2, 1.5, 2.0), (3, 2.5, 1.5)] {
        let g = psi_gauge(&params(n, s, 0), &YoungFunction::power(p)).map_err(|e| e.to_string())?;
        let v: Vec<f64> = rs.iter().map(|&r| g.eval(r)).collect();
        let slope = loglog_slope(&rs, &v);
        let want = s - n as f64 / p;
        ensure((slope - want).abs() <= 0.02, || format!("(n,s,p)=({n},{s},{p}): slope {slope}, expected {want}"))?;
        slopes.push(format!("{slope:.4}"));
    }
    for (n, s) in [(1usize, 0.25), (2, 0.5), (3, 0.75)] {
        let g = phi_gauge(&params(n, s, 0), &YoungFunction::power(n as f64 / s)).map_err(|e| e.to_string())?;
        for r in logspace(1e-6, 1e6, 25) {
            let v = g.eval(r);
            ensure((v - 1.0).abs() < 1e-12, || format!("phi at r={r} for n={n}, s={s}: {v}"))?;
        }
    }
    Ok(format!("psi slopes [{}], phi ≡ 1", slopes.join(", ")))
}

fn lemma_bands() -> Check {
    let n = 3.0;
    let mut ratios = Vec::new();
    for p in [2.0, 3.0] {
        let a = YoungFunction::power(p);
        for beta in [0.0, 0.5, 1.0 / n, -0.5] {
            for r in [0.1, 1.0, 10.0] {
                let (alpha, window) = if beta < 0.0 { (0.5, Some(100.0 * r)) } else { (0.25, None) };
                let eq = lemma_rinorm_equivalence(alpha, beta, r, &a, window).map_err(|e| e.to_string())?;
                let b1 = beta + 1.0;
                let band =
                    if beta >= 0.0 { (1.0 / b1, 2.0 + 1.0 / b1) } else { (1.0 / b1, (2f64.powf(b1) + 1.0) / b1) };
                let ok = eq.ratio >= band.0 * (1.0 - 1e-6) && eq.ratio <= band.1 * (1.0 + 1e-6);
                ensure(ok, || format!("p={p} β={beta} r={r}: ratio {} outside [{}, {}]", eq.ratio, band.0, band.1))?;
                ratios.push(eq.ratio);
            }
        }
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    Ok(format!("{} cases, ratios in [{lo:.3}, {hi:.3}]", ratios.len()))
}

fn ratio_stability() -> Check {
    let pr = params(1, 0.5, 0);
    let a = YoungFunction::power(2.0);
    let u = make_uf(&StepFunction::indicator(1.0).map_err(|e| e.to_string())?, &pr).map_err(|e| e.to_string())?;
    let g = phi_gauge(&pr, &a).map_err(|e| e.to_string())?;
    let run = |rmin: f64, level: usize| -> Result<f64, String> {
        let balls = BallFamily::geometric(1, rmin, 1.0, 12).map_err(|e| e.to_string())?;
        let opts = GagliardoOptions { level, ..Default::default() };
        let rep = embedding_ratio_experiment(&u, &pr, &a, &g, &balls, &opts).map_err(|e| e.to_string())?;
        rep.sup_ratio.ok_or_else(|| "no sup-ratio (divergent seminorm)".to_string())
    };
    let r1 = run(1e-2, 1)?;
    let r2 = run(1e-2, 2)?;
    let change = rel(r2, r1);
    ensure(change < 0.1, || format!("R changes by {:.1}% between levels 1 and 2", 100.0 * change))?;
    let r_deep = run(1e-4, 2)?;
    let growth = r_deep / r2;
    ensure(r_deep.is_finite() && growth < 1.5, || format!("R grows by a factor {growth} when r_min drops to 1e-4"))?;
    Ok(format!("R = {r1:.4} / {r2:.4} (levels 1/2), {r_deep:.4} at r_min 1e-4"))
}

fn optimality_ratio() -> Check {
    let pr = params(1, 0.5, 0);
    let a = YoungFunction::power(2.0);
    let phi = phi_gauge(&pr, &a).map_err(|e| e.to_string())?;
    let weaker = {
        let phi = phi.clone();
        Gauge::new(GaugeLabel::User, move |r| phi.eval(r) * (std::f64::consts::E + 1.0 / r).ln())
    };
    let balls = BallFamily::geometric(1, 1e-3, 1.0, 8).map_err(|e| e.to_string())?;
    let opts = GagliardoOptions { level: 1, ..Default::default() };
    let rep = optimality_experiment(&pr, &a, &weaker, &balls, &opts).map_err(|e| e.to_string())?;
    let q: Vec<f64> = rep.rows.iter().map(|row| row.quotient.unwrap_or(f64::NAN)).collect();
    // Radii ascend, so the quotient must increase with r.
    ensure(q.windows(2).all(|w| w[0] < w[1]), || format!("quotient not monotone: {q:?}"))?;
    ensure(q[0] < 0.2, || format!("quotient {} at the smallest ball", q[0]))?;
    Ok(format!("quotient {:.3} at the smallest ball, {:.3} at the largest", q[0], q[q.len() - 1]))
}

fn necessity_scaling() -> Check {
    let js: Vec<f64> = (2..=64).map(|j| j as f64).collect();
    let mut out = Vec::new();
    for (n, s, k, want) in [(2usize, 1.5, 0usize, Some(-1.5)), (2, 2.5, 1, Some(-1.5)), (1, 2.5, 0, None)] {
        let pr = params(n, s, k);
        let shape = BumpShape::for_order(n, k).map_err(|e| e.to_string())?;
        let rep = necessity_scaling_experiment(&pr, &shape, &js, 1).map_err(|e| e.to_string())?;
        let slope = rep.slope.ok_or("no slope")?;
        match want {
            Some(w) => ensure((slope - w).abs() <= 0.1, || format!("({n},{s},{k}): slope {slope}, expected {w}"))?,
            None => ensure(slope > 0.0, || format!("({n},{s},{k}): slope {slope} is not positive"))?,
        }
        out.push(format!("{slope:.3}"));
    }
    Ok(format!("slopes [{}]", out.join(", ")))
}

fn normalization() -> Check {
    let mut worst = 0.0f64;
    for a in [
        YoungFunction::power(2.0),
        YoungFunction::power_log(4.0, 1.0),
        YoungFunction::sum(vec![YoungFunction::power(2.0), YoungFunction::power(3.0)]),
    ] {
        for m in [1e-3, 1.0, 1e3] {
            let f = make_normalized_f(&a, m).map_err(|e| e.to_string())?;
            let norm = luxemburg_norm(&f.to_sampled().map_err(|e| e.to_string())?, &a);
            worst = worst.max((norm - 1.0).abs());
            ensure((norm - 1.0).abs() <= 1e-6, || format!("|B|={m}: norm {norm}"))?;
        }
    }
    Ok(format!("9 profiles, worst deviation {worst:.1e}"))
}

fn coherence() -> Check {
    let mut family: Vec<(String, YoungFunction)> = YoungFunction::catalogue();
    let cases = [(1usize, 0.5), (2, 0.5), (3, 0.75)];
    for &(n, s) in &cases {
        let q = n as f64 / s;
        for d in [-1.5, -1.0, -0.5, 0.0, 0.5] {
            family.push((format!("power_log_{q}_{}", q + d), YoungFunction::power_log(q, q + d)));
        }
    }
    let mut checked = 0;
    for (name, a) in &family {
        for &(n, s) in &cases {
            let pr = params(n, s, 0);
            let e = s / (n as f64 - s);
            for end in [End::Zero, End::Infinity] {
                let u = check_integral_condition(a, e, end, IntegralForm::PowerOfTOverA).map_err(|e| e.to_string())?;
                let v = check_integral_condition(a, e, end, IntegralForm::DualTail).map_err(|e| e.to_string())?;
                ensure(u.verdict == v.verdict, || {
                    format!("{name} (n,s)=({n},{s}) {end:?}: {:?} vs {:?}", u.verdict, v.verdict)
                })?;
                for form in [IntegralForm::PowerOfTOverA, IntegralForm::DualTail] {
                    let num = check_integral_condition_numeric(a, e, end, form).map_err(|e| e.to_string())?;
                    ensure(num.verdict == Verdict::Indeterminate || num.verdict == u.verdict, || {
                        format!(
                            "{name} (n,s)=({n},{s}) {end:?} {form:?}: numeric {:?}, symbolic {:?}",
                            num.verdict, u.verdict
                        )
                    })?;
                }
                checked += 1;
            }
            let (v20, v21) = spanne_modulus_verdicts(&pr, a).map_err(|e| e.to_string())?;
            ensure(v20.verdict == v21.verdict, || {
                format!("{name} (n,s)=({n},{s}): (20) {:?} vs (21) {:?}", v20.verdict, v21.verdict)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} verdict pairs over {} functions", family.len()))
}

/// Written to the raw stderr handle so the lines survive output capture.
fn report(line: &str) {
    let _ = writeln!(std::io::stderr().lock(), "{line}");
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("conjugation suite", conjugation_suite, 1),
        ("characteristic-function norm", char_norm_oracle, 1),
        ("closed-form F identity", f_identity, 5),
        ("gauge slopes", gauge_slopes, 5),
        ("rearrangement-norm bands", lemma_bands, 10),
        ("embedding-ratio stability", ratio_stability, 60),
        ("optimality quotient", optimality_ratio, 60),
        ("necessity scaling", necessity_scaling, 120),
        ("extremal normalization", normalization, 1),
        ("verdict coherence", coherence, 10),
    ];
    let mut failures = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed > Duration::from_secs(*limit) {
                Err(format!("{msg}; took {elapsed:.2?}, limit {limit} s"))
            } else {
                Ok(msg)
            }
        });
        match outcome {
            Ok(msg) => report(&format!("PASS {:>2} {name}: {msg} ({elapsed:.2?})", i + 1)),
            Err(msg) => {
                report(&format!("FAIL {:>2} {name}: {msg} ({elapsed:.2?})", i + 1));
                failures.push(i + 1);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
