use evocert::ext::ExtReal;
use evocert::heat::{self, HeatScenario, ScenarioOutcome};

#[test]
fn second_mode_stays_zero() {
    for &a in &[0.5, 1.0, 2.0, 4.0, 10.0] {
        let r = heat::run_scenario(&HeatScenario::new(2, a, &[1, 2, 3])).unwrap();
        let m = r.trajectory.iter().map(|p| p.a[1].abs()).fold(0.0, f64::max);
        assert!(m <= 1e-8, "A={a}: {m}");
    }
}

#[test]
fn adding_mode_two_changes_nothing() {
    for &a in &[1.6, 4.0] {
        let two = heat::run_scenario(&HeatScenario::two_mode(a)).unwrap();
        let three = heat::run_scenario(&HeatScenario::new(2, a, &[1, 2, 3])).unwrap();
        let (g2, g3) = (two.t_g.finite().unwrap(), three.t_g.finite().unwrap());
        assert!((g2 - g3).abs() <= 1e-6 * g2, "A={a}: {g2} vs {g3}");
    }
}

#[test]
fn table_sweep_orders_the_bounds() {
    let amps = [1.6, 2.0, 3.0, 4.0, 6.0, 10.0, 20.0, 50.0];
    let mut prev = f64::INFINITY;
    for &a in &amps {
        let r = heat::run_scenario(&HeatScenario::two_mode(a)).unwrap();
        assert_eq!(r.outcome, ScenarioOutcome::BlowUp);
        let g = r.t_g.finite().unwrap();
        let k = r.t_k.unwrap().finite().unwrap();
        let n = r.t_n.finite().unwrap();
        assert!(n < g && g < k, "A={a}: {n} {g} {k}");
        assert!(g < prev);
        prev = g;
        let eta = r.eta.unwrap();
        assert!(eta > 0.0 && eta < 1.0);
    }
}

#[test]
fn empirical_lower_curve_holds_on_the_table() {
    let critical = heat::critical_amplitude(2, &[1, 3], 50.0, heat::c_n(), 4.0, 1e-6).unwrap();
    let c_g = heat::rescaled_limit(2, &[1, 3]).unwrap().c_g;
    for &a in &[1.6, 2.0, 4.0, 10.0, 20.0] {
        let g = heat::run_scenario(&HeatScenario::two_mode(a)).unwrap().t_g.finite().unwrap();
        let lower = heat::empirical_lower_curve(a, critical, c_g).unwrap();
        assert!(g >= lower && g <= 1.1 * lower, "A={a}: {g} vs {lower}");
    }
}

#[test]
fn large_amplitudes_approach_the_limit() {
    let c_g = heat::rescaled_limit(2, &[1, 3]).unwrap().c_g;
    let mut last = 0.0;
    for &a in &[50.0, 200.0, 1000.0] {
        let g = heat::run_scenario(&HeatScenario::two_mode(a)).unwrap().t_g.finite().unwrap();
        last = (a * g - c_g).abs() / c_g;
    }
    assert!(last < 2e-3, "{last}");
}

#[test]
fn below_the_critical_amplitude_the_radius_decays() {
    let critical = heat::critical_amplitude(2, &[1, 3], 50.0, heat::c_n(), 4.0, 1e-4).unwrap();
    let r = heat::run_scenario(&HeatScenario::two_mode(critical - 0.01)).unwrap();
    assert_eq!(r.t_g, ExtReal::PosInf);
    let tail = r.trajectory.iter().filter(|p| p.t >= 45.0).map(|p| p.r).fold(0.0, f64::max);
    assert!(tail < 1e-6, "{tail}");
    let above = heat::run_scenario(&HeatScenario::two_mode(critical + 0.01)).unwrap();
    assert!(above.t_g.is_finite());
}

#[test]
fn larger_galerkin_spaces_give_comparable_bounds() {
    let base = heat::run_scenario(&HeatScenario::two_mode(4.0)).unwrap().t_g.finite().unwrap();
    let more = heat::run_scenario(&HeatScenario::new(2, 4.0, &[1, 3, 5])).unwrap().t_g.finite().unwrap();
    assert!(more >= 0.9 * base && more <= 1.5 * base, "{base} vs {more}");
}
