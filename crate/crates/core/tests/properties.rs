use proptest::prelude::*;

use evocert::control::{exp_factor, log_factor, r_closed, tn_closed};
use evocert::ext::ExtReal;
use evocert::kaplan::{kaplan_time, kaplan_time_by_quadrature, KaplanInput};
use evocert::wave::{wave_growth_bound, wave_theta, wave_tn, WaveDatum};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kaplan_forms_agree(q0 in 1.05f64..200.0, p in 2usize..6) {
        let i = KaplanInput::new(q0, p).unwrap();
        let (a, b) = (kaplan_time(&i).unwrap(), kaplan_time_by_quadrature(&i).unwrap());
        prop_assert!((a - b).abs() <= 1e-8 * a.max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn kaplan_time_decreases_in_q0(q0 in 1.01f64..100.0, p in 2usize..6) {
        let t1 = kaplan_time(&KaplanInput::new(q0, p).unwrap()).unwrap();
        let t2 = kaplan_time(&KaplanInput::new(q0 * 1.01, p).unwrap()).unwrap();
        prop_assert!(t2 < t1);
    }

    #[test]
    fn log_and_exp_factors_are_inverse(b in -3.0f64..3.0, x in 0.01f64..2.0) {
        // e^{B L_B(u)} = u/(u − B)
        let u = b.abs() + x;
        let l = log_factor(b, u);
        prop_assert!(((b * l).exp() - u / (u - b)).abs() <= 1e-12 * u / (u - b));
        prop_assert!((exp_factor(b, l) * (u - b) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn closed_curve_is_increasing_when_supercritical(
        u in 1.0f64..3.0, b in -1.0f64..1.0, scale in 0.5f64..2.0, p in 2usize..5, n in 0.5f64..2.0,
    ) {
        let tn = tn_closed(u, b, scale, p, n);
        if let ExtReal::Finite(t) = tn {
            if scale * u.powi(p as i32) * n.powi(p as i32 - 1) > b {
                let r1 = r_closed(u, b, scale, p, n, 0.4 * t).unwrap();
                let r2 = r_closed(u, b, scale, p, n, 0.8 * t).unwrap();
                prop_assert!(u * n <= r1 && r1 < r2);
            }
        }
    }

    #[test]
    fn wave_theta_dominates_tn(frac in 0.0f64..=1.0, abs in 0.0f64..5.0, p in 2usize..8) {
        let d = WaveDatum::new(frac * abs, abs, p).unwrap();
        prop_assert!(wave_theta(&d) >= wave_tn(&d));
        if let ExtReal::Finite(t) = wave_tn(&d) {
            prop_assert!(wave_growth_bound(&d, 0.5 * t).unwrap() >= abs);
        }
    }

    #[test]
    fn ext_real_json_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::ZERO) {
        let x = ExtReal::Finite(v);
        let back: ExtReal = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
        let token = x.to_csv_token();
        prop_assert_eq!(token.parse::<f64>().unwrap(), v);
    }
}
