use coldamp_core::linalg::Matrix;
use coldamp_core::network::check_commutators;
use coldamp_core::network::toy::{matched_junction, open_line, pi_network, PassiveCircuit};
use coldamp_core::{Error, C64};

const OMEGA: f64 = 2.0e6;

#[test]
fn matched_junction_swaps_ports() {
    let res = matched_junction(50.0).build(OMEGA).unwrap().solve().unwrap();
    let s = &res.s_matrix;
    assert!(s[(0, 0)].norm() < 1e-15 && s[(1, 1)].norm() < 1e-15);
    assert!((s[(0, 1)] - C64::new(1.0, 0.0)).norm() < 1e-15);
    assert!((s[(1, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
    assert!(res.commutators().absolute < 1e-15);
}

#[test]
fn open_line_reflects_totally() {
    let res = open_line(75.0).build(OMEGA).unwrap().solve().unwrap();
    assert!((res.s_matrix[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn mismatched_junction_reflection_coefficient() {
    // lines of 50 and 150 ohm: Γ = (R2 − R1)/(R1 + R2) = 0.5 seen from line 0
    let c = PassiveCircuit::new(1).line(0, 50.0).line(0, 150.0);
    let res = c.build(OMEGA).unwrap().solve().unwrap();
    assert!((res.s_matrix[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-14);
    assert!(res.commutators().absolute < 1e-14);
}

#[test]
fn reactive_networks_are_unitary() {
    let c = pi_network(50.0, 300.0, 1e-9, 2e-5, 3e-10, OMEGA);
    let res = c.build(OMEGA).unwrap().solve().unwrap();
    let dev = res.commutators();
    assert!(dev.absolute < 1e-13, "{dev:?}");
    let ladder = PassiveCircuit::new(3)
        .line(0, 10.0)
        .line(2, 1e3)
        .line(1, 377.0)
        .branch(0, Some(1), C64::new(0.0, 33.0))
        .branch(1, Some(2), C64::new(0.0, -120.0))
        .branch(1, None, C64::new(0.0, 7.0))
        .branch(2, None, C64::new(0.0, -5e3));
    let dev = ladder.build(OMEGA).unwrap().solve().unwrap().commutators();
    assert!(dev.absolute < 1e-13, "{dev:?}");
}

#[test]
fn hidden_loss_breaks_unitarity() {
    let c = PassiveCircuit::new(1).line(0, 50.0).line(0, 50.0).branch(0, None, C64::new(100.0, 0.0));
    let dev = c.build(OMEGA).unwrap().solve().unwrap().commutators();
    assert!(dev.absolute > 0.1);
}

#[test]
fn permutation_matrix_is_exact() {
    let p = Matrix::from_fn(3, 3, |i, j| if (i + 1) % 3 == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let dev = check_commutators(&p, &[1.0; 3], &[1.0; 3]);
    assert_eq!(dev.absolute, 0.0);
}

#[test]
fn shorted_node_is_singular() {
    // two ideal shorts in parallel leave the branch currents undetermined
    let c = PassiveCircuit::new(1)
        .line(0, 50.0)
        .branch(0, None, C64::new(0.0, 0.0))
        .branch(0, None, C64::new(0.0, 0.0));
    match c.build(OMEGA).unwrap().solve() {
        Err(Error::Singular { omega, .. }) => assert_eq!(omega, OMEGA),
        other => panic!("{other:?}"),
    }
}
