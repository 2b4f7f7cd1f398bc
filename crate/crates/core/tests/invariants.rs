use campanato::analysis::{decreasing_rearrangement, luxemburg_norm, Monotone};
use campanato::{SampledFunction, YoungFunction};
use proptest::prelude::*;

fn step_data() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec((0.0f64..10.0, 0.01f64..2.0), 1..12).prop_map(|cells| cells.into_iter().unzip())
}

fn sampled(values: &[f64], widths: &[f64]) -> SampledFunction {
    let mut grid = Vec::with_capacity(widths.len());
    let mut pos = 0.0;
    for w in widths {
        pos += w;
        grid.push(pos);
    }
    SampledFunction::new(grid, values.to_vec(), Monotone::None).unwrap()
}

fn young() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.2f64..6.0).prop_map(YoungFunction::power),
        (1.5f64..5.0, -1.0f64..3.0).prop_map(|(p, a)| YoungFunction::power_log(p, a)),
        (1.2f64..3.0, 3.0f64..6.0)
            .prop_map(|(p, q)| YoungFunction::sum(vec![YoungFunction::power(p), YoungFunction::power(q)])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rearrangement_is_idempotent_and_equimeasurable((values, widths) in step_data(), level in 0.0f64..10.0) {
        let f = decreasing_rearrangement(&values, &widths).unwrap();
        let g = f.rearranged();
        prop_assert_eq!(&f.grid, &g.grid);
        prop_assert_eq!(&f.values, &g.values);
        prop_assert!(f.values.windows(2).all(|w| w[0] >= w[1]));
        let direct: f64 = values.iter().zip(&widths).filter(|(v, _)| **v > level).map(|(_, w)| w).sum();
        prop_assert!((f.distribution(level) - direct).abs() <= 1e-12 * (1.0 + direct));
    }

    #[test]
    fn luxemburg_norm_is_homogeneous((values, widths) in step_data(), c in 0.01f64..100.0, a in young()) {
        prop_assume!(values.iter().any(|v| *v > 0.0));
        let f = sampled(&values, &widths);
        let base = luxemburg_norm(&f, &a);
        let scaled = luxemburg_norm(&f.scaled(c), &a);
        prop_assert!((scaled / (c * base) - 1.0).abs() < 1e-7, "{} vs {}", scaled, c * base);
    }

    #[test]
    fn holder_inequality_holds(
        (values, widths) in step_data(),
        (others, _) in step_data(),
        a in young(),
    ) {
        prop_assume!(values.iter().any(|v| *v > 0.0));
        let others: Vec<f64> = (0..values.len()).map(|i| others.get(i).copied().unwrap_or(1.0)).collect();
        prop_assume!(others.iter().any(|v| *v > 0.0));
        let ac = a.conjugate().unwrap();
        let f = sampled(&values, &widths);
        let g = sampled(&others, &widths);
        let bound = 2.0 * luxemburg_norm(&f, &a) * luxemburg_norm(&g, &ac);
        prop_assert!(f.pairing(&g) <= bound * (1.0 + 1e-7));
    }

    #[test]
    fn inverse_product_band(a in young(), log_t in -6.0f64..6.0) {
        let t = 10f64.powf(log_t);
        let ac = a.conjugate().unwrap();
        let prod = a.inv(t) * ac.inv(t);
        prop_assert!(prod >= t * (1.0 - 1e-6) && prod <= 2.0 * t * (1.0 + 1e-6), "t={} product={}", t, prod);
    }
}
