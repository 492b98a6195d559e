use coldamp_core::network::{build_sensor_network, SensorTransfer};
use coldamp_core::sensor::estimator_coefficients;
use coldamp_core::servo::{
    cold_damped_velocity_coefficients, finite_gain_velocity, gain_for_impedance, loop_transduction,
};
use coldamp_core::{CoefficientSet, InstrumentParams, C64};

const W: f64 = InstrumentParams::MICROSCOPE_OMEGA;

/// Gain giving a purely dissipative loop impedance of `ratio·H_m`.
fn gain(p: &InstrumentParams, ratio: f64) -> C64 {
    gain_for_impedance(p, C64::new(ratio * p.damping, 0.0), W).unwrap()
}

/// Network velocity row rescaled by −ρ, which tends to the λ/G_s table.
fn normalized_velocity(p: &InstrumentParams, g: C64) -> CoefficientSet {
    let res = build_sensor_network(p, Some(g), W).unwrap().solve().unwrap();
    let t = SensorTransfer::from_result(&res);
    t.velocity * (-loop_transduction(p, W).unwrap())
}

#[test]
fn closed_loop_estimator_is_gain_independent() {
    let p = InstrumentParams::microscope();
    let mu = estimator_coefficients(&p, W).unwrap();
    for ratio in [1e2, 1e4, 1e6] {
        let res = build_sensor_network(&p, Some(gain(&p, ratio)), W).unwrap().solve().unwrap();
        let t = SensorTransfer::from_result(&res);
        assert!(t.estimator().max_rel_deviation(&mu) < 1e-11, "ratio {ratio}");
        // the force no longer moves the mass but is read through the loop
        assert!(t.velocity_drive.norm() * p.damping * ratio < 1.0 + 1e-9);
    }
}

#[test]
fn finite_gain_network_matches_closed_form_loop() {
    let p = InstrumentParams::microscope();
    for ratio in [10.0, 1e3, 1e5] {
        let g = gain(&p, ratio);
        let res = build_sensor_network(&p, Some(g), W).unwrap().solve().unwrap();
        let t = SensorTransfer::from_result(&res);
        let (drive, vel) = finite_gain_velocity(&p, g, W).unwrap();
        assert!(t.velocity.max_rel_deviation(&vel) < 1e-11);
        assert!((t.velocity_drive - drive).norm() < 1e-11 * drive.norm());
    }
}

#[test]
fn convergence_is_first_order_in_inverse_gain() {
    let p = InstrumentParams::microscope();
    let table = cold_damped_velocity_coefficients(&p, W).unwrap();
    let ratios = [1e2, 1e3, 1e4, 1e5, 1e6];
    let pts: Vec<(f64, f64)> = ratios
        .iter()
        .map(|&r| {
            let g = gain(&p, r);
            (g.norm().ln(), normalized_velocity(&p, g).max_rel_deviation(&table).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 1.0).abs() < 0.05, "slope {slope}");

    let g = gain(&p, 1e6);
    let extrapolated = normalized_velocity(&p, g * 2.0) * C64::new(2.0, 0.0) - normalized_velocity(&p, g);
    assert!(extrapolated.max_rel_deviation(&table) < 1e-6);
}
