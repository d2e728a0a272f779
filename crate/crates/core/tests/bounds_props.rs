use proptest::prelude::*;
use qtr_bounds::bounds::{
    advantage_condition, classical_cpf_lower_bound, classical_ctr_lower_bound, classical_qtr_lower_bound_per_bin,
    cn_error_probability, qtr_cn_asymptotic, qtr_quantum_ub_asymptotic, CNParams, ScenarioParams,
};

fn scenario(m: u32, big_m: u64, n_s: f64, eta: f64, n_b: f64) -> ScenarioParams {
    ScenarioParams::new(m, big_m, n_s, eta, n_b).unwrap()
}

type Bound = fn(&ScenarioParams) -> f64;

fn exponential_bounds() -> [(&'static str, Bound); 4] {
    [
        ("quantum_ub_asym", qtr_quantum_ub_asymptotic),
        ("cn_qtr_asym", |s| qtr_cn_asymptotic(s).unwrap()),
        ("classical_per_bin", classical_qtr_lower_bound_per_bin),
        ("classical_ctr", classical_ctr_lower_bound),
    ]
}

// Direct evaluation of the closed form, kept separate from the stable
// summation used by the library.
fn cn_closed_form(z1: f64, z2: f64, n: u32) -> f64 {
    let nf = n as f64;
    (z2 / z1) * (nf * z1 + (1.0 - z1).powi(n as i32) - 1.0) / nf
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn bounds_are_monotone(
        m in 2u32..64,
        big_m in 1u64..10_000,
        n_s in 1e-4..1.0f64,
        eta in 1e-3..1.0f64,
        n_b in 0.05..50.0f64,
        bump in 1.01..3.0f64,
    ) {
        let base = scenario(m, big_m, n_s, eta, n_b);
        for (name, bound) in exponential_bounds() {
            let v = bound(&base);
            let more_modes = bound(&scenario(m, big_m * 2, n_s, eta, n_b));
            let more_signal = bound(&scenario(m, big_m, n_s * bump, eta, n_b));
            let more_reflect = bound(&scenario(m, big_m, n_s, (eta * bump).min(1.0), n_b));
            let more_noise = bound(&scenario(m, big_m, n_s, eta, n_b * bump));
            prop_assert!(more_modes <= v, "{name} rose with M");
            prop_assert!(more_signal <= v, "{name} rose with N_S");
            prop_assert!(more_reflect <= v, "{name} rose with eta");
            prop_assert!(more_noise >= v, "{name} fell with N_B");
        }
    }

    #[test]
    fn cn_never_beats_single_pulse_in_bright_background(
        m in 3u32..64,
        big_m in 1u64..1000,
        n_s in 1e-4..0.1f64,
        eta in 1e-3..1.0f64,
        n_b in 1.0001..100.0f64,
    ) {
        let s = scenario(m, big_m, n_s, eta, n_b);
        let cn = qtr_cn_asymptotic(&s).unwrap();
        let ctr = classical_ctr_lower_bound(&s);
        // compare in log space; both may underflow
        let log_cn = ((m as f64 - 1.0) / 2.0).ln() - 2.0 * big_m as f64 * eta * n_s / n_b;
        let log_ctr = ((m as f64 - 1.0) / (2.0 * m as f64)).ln()
            - 2.0 * (m as u64 * big_m) as f64 * eta * n_s / (2.0 * n_b + 1.0);
        prop_assert!(log_cn > log_ctr);
        if ctr > 0.0 {
            prop_assert!(cn > ctr);
        }
        prop_assert!(!advantage_condition(m, big_m, eta * n_s / n_b, n_b).unwrap());
    }

    #[test]
    fn single_pulse_is_per_bin_with_pooled_modes(
        m in 2u32..64,
        big_m in 1u64..10_000,
        n_s in 1e-4..1.0f64,
        eta in 0.0..=1.0f64,
        n_b in 0.0..50.0f64,
    ) {
        let s = scenario(m, big_m, n_s, eta, n_b);
        let pooled = scenario(m, m as u64 * big_m, n_s, eta, n_b);
        let a = classical_ctr_lower_bound(&s);
        let b = classical_qtr_lower_bound_per_bin(&pooled);
        let exponent = 2.0 * (m as u64 * big_m) as f64 * eta * n_s / (2.0 * n_b + 1.0);
        prop_assert!((a - b).abs() <= 8.0 * f64::EPSILON * (1.0 + exponent) * a.max(b), "{a} vs {b}");
    }

    #[test]
    fn per_bin_is_cpf_with_matched_background(
        m in 2u32..64,
        big_m in 1u64..1000,
        n_s in 1e-4..1.0f64,
        eta in 0.0..=1.0f64,
        n_b in 0.0..50.0f64,
    ) {
        let s = scenario(m, big_m, n_s, eta, n_b);
        let a = classical_qtr_lower_bound_per_bin(&s);
        let b = classical_cpf_lower_bound(m, big_m, n_s, 0.0, eta, n_b, n_b).unwrap();
        let exponent = 2.0 * big_m as f64 * eta * n_s / (2.0 * n_b + 1.0);
        prop_assert!((a - b).abs() <= 8.0 * f64::EPSILON * (1.0 + exponent) * a.max(b), "{a} vs {b}");
    }

    #[test]
    fn cn_error_matches_closed_form(z1 in 1e-3..=1.0f64, z2 in 0.0..=1.0f64, n in 2u32..64) {
        let v = cn_error_probability(&CNParams::new(z1, z2, n).unwrap());
        let reference = cn_closed_form(z1, z2, n);
        prop_assert!((v - reference).abs() <= 1e-12 * reference.max(1e-300) + 1e-15, "{v} vs {reference}");
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn cn_error_small_false_alarm_expansion(z1 in 1e-9..=1e-3f64, z2 in 1e-6..=1.0f64, n in 2u32..=64) {
        let v = cn_error_probability(&CNParams::new(z1, z2, n).unwrap());
        let expansion = (n as f64 - 1.0) / 2.0 * z1 * z2;
        prop_assert!(((v - expansion) / expansion).abs() <= 0.05, "{v} vs {expansion}");
    }

    #[test]
    fn cn_error_is_continuous_at_zero(z2 in 0.0..=1.0f64, n in 2u32..=64) {
        let v = cn_error_probability(&CNParams::new(1e-8, z2, n).unwrap());
        prop_assert!(v <= 1e-6, "{v}");
        prop_assert_eq!(cn_error_probability(&CNParams::new(0.0, z2, n).unwrap()), 0.0);
    }
}
