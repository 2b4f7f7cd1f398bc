//! Fixtures shared by the benchmarks.

use campanato::extremals::make_uf;
use campanato::{EmbeddingParams, SampledFunction, StepFunction, TestFunction, YoungFunction};

/// Young functions of increasing evaluation cost.
pub fn young_family() -> Vec<(&'static str, YoungFunction)> {
    vec![
        ("power_3", YoungFunction::power(3.0)),
        ("power_log_4_1", YoungFunction::power_log(4.0, 1.0)),
        ("sum_2_3", YoungFunction::sum(vec![YoungFunction::power(2.0), YoungFunction::power(3.0)])),
    ]
}

/// Step data with `cells` cells of pseudo-random heights.
pub fn step_data(cells: usize) -> SampledFunction {
    let grid: Vec<f64> = (1..=cells).map(|i| i as f64 / cells as f64).collect();
    let values = (0..cells).map(|i| 1.0 + ((i * 7919) % 97) as f64 / 10.0).collect();
    SampledFunction { grid, values, monotone: Default::default() }
}

/// First-order parameters `n = 1, s = 1/2` with the extremal of `χ_{(0,1)}`.
pub fn first_order_extremal() -> (EmbeddingParams, TestFunction) {
    let params = EmbeddingParams::new(1, 0.5, 0).expect("valid parameters");
    let f = StepFunction::indicator(1.0).expect("positive measure");
    let u = make_uf(&f, &params).expect("extremal builds");
    (params, u)
}
