use coldamp_core::budget::{
    budget_point, optimal_matching, simplified_budget, sweep, MatchingProblem, Param, SweepAxis,
};
use coldamp_core::noise::effective_temperature;
use coldamp_core::InstrumentParams;
use proptest::prelude::*;

const W: f64 = InstrumentParams::MICROSCOPE_OMEGA;

fn sigma(p: &InstrumentParams, w: f64) -> f64 {
    budget_point(p, w).unwrap().sigma_ff
}

fn lossless() -> InstrumentParams {
    let mut p = InstrumentParams::microscope();
    p.r_loss = 1e6 * p.r_amp;
    p.r_detect = 1e-6;
    p.set_zf_mag(1e6 * p.r_amp);
    p.set_zt_mag(1e30, W);
    p
}

#[test]
fn lossless_limit_reaches_simplified_form() {
    let p = lossless();
    for w in [W / 10.0, W, 5.0 * W] {
        let full = sigma(&p, w);
        let simple = simplified_budget(&p, w).unwrap();
        assert!((full / simple - 1.0).abs() < 1e-9, "{full} {simple}");
    }
}

#[test]
fn vacuum_floor_in_lossless_limit() {
    let mut p = lossless();
    p.temp_amp = 0.0;
    let zp = effective_temperature(0.0, p.omega_t).unwrap().energy();
    let m = MatchingProblem::new(&p, W).unwrap();
    assert_eq!(m.energy_amp, zp);
    let langevin = 2.0 * p.damping * effective_temperature(p.temp_mech, W).unwrap().energy();
    let x = p.r_amp / p.r_mech(W);
    assert!((sigma(&p, W) - langevin - m.detection(x)).abs() < 1e-9 * m.detection(x) + 1e-15 * langevin);
}

#[test]
fn amplifier_temperature_scales_detection_only() {
    let p = InstrumentParams::microscope();
    let mut hot = p.clone();
    hot.temp_amp *= 10.0;
    let (a, b) = (MatchingProblem::new(&p, W).unwrap(), MatchingProblem::new(&hot, W).unwrap());
    let x = 3e-7;
    assert_eq!(a.langevin(), b.langevin());
    assert!((b.detection(x) / a.detection(x) - 10.0).abs() < 1e-9);
}

#[test]
fn ratio_sweep_is_unimodal_at_the_optimum() {
    let p = lossless();
    let rm = p.r_mech(W);
    let opt = optimal_matching(&p, W).unwrap();
    assert!(opt.ratio_residual < 1e-6 && opt.value_residual < 1e-6);
    let grid: Vec<f64> = (0..41).map(|k| opt.ratio_opt * rm * 10f64.powf(-2.0 + 0.1 * k as f64)).collect();
    let pts = sweep(&p, SweepAxis::Parameter { param: Param::RAmp, omega: W }, &grid).unwrap();
    let vals: Vec<f64> = pts.iter().map(|b| b.sigma_ff).collect();
    let imin = (0..vals.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    assert_eq!(imin, 20);
    assert!(vals[..=imin].windows(2).all(|w| w[1] <= w[0]));
    assert!(vals[imin..].windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn losses_only_add_noise_below_resonance() {
    // Δ > 0 at the reference frequency, just below resonance: every loss knob acts monotonically
    let p = InstrumentParams::microscope();
    let check = |param: Param, values: &[f64], decreasing: bool| {
        let pts = sweep(&p, SweepAxis::Parameter { param, omega: W }, values).unwrap();
        for w in pts.windows(2) {
            let ok = if decreasing { w[1].sigma_ff <= w[0].sigma_ff } else { w[1].sigma_ff >= w[0].sigma_ff };
            assert!(ok, "{param:?}");
        }
    };
    let grid = |v: f64| (0..9).map(|k| v * 10f64.powf(-2.0 + 0.5 * k as f64)).collect::<Vec<_>>();
    check(Param::RLoss, &grid(p.r_loss), true);
    check(Param::RDetect, &grid(p.r_detect), false);
    // larger capacitance means smaller impedance
    check(Param::CFeedback, &grid(p.c_feedback), false);
    check(Param::CTransducer, &grid(p.c_transducer), false);
}

#[test]
fn negative_delta_makes_feedback_impedance_non_monotone() {
    // Above resonance the interference term is negative and shrinks as |Z_f| grows,
    // so with enough detection noise a larger |Z_f| can raise the total.
    let mut p = InstrumentParams::microscope();
    p.temp_mech = 0.0;
    p.damping = 1e-9;
    let w = 100.0 * W;
    assert!(budget_point(&p, w).unwrap().delta < 0.0);
    let zf: Vec<f64> = (0..60).map(|k| 1e3 * 10f64.powf(0.1 * k as f64)).collect();
    let vals: Vec<f64> = zf
        .iter()
        .map(|&z| {
            let mut q = p.clone();
            q.set_zf_mag(z);
            sigma(&q, w)
        })
        .collect();
    assert!(vals.windows(2).any(|w| w[1] > w[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn langevin_floor(e in prop::array::uniform14(-2.0..2.0f64), lw in -1.5..1.5f64) {
        let p = Param::scale_all(&InstrumentParams::microscope(), &e);
        let w = W * 10f64.powf(lw);
        let floor = 2.0 * p.damping * effective_temperature(p.temp_mech, w).unwrap().energy();
        prop_assert!(sigma(&p, w) >= floor * (1.0 - 1e-12));
    }
}

#[test]
fn overflow_is_reported_not_printed() {
    let mut p = InstrumentParams::microscope();
    p.coupling = 1e-300;
    let err = budget_point(&p, InstrumentParams::MICROSCOPE_OMEGA).unwrap_err();
    assert!(err.is_numerical(), "{err}");
}
