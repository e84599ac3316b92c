mod common;

use common::*;
use labs_pce::sim::{run_ansatz, AnsatzSpec, Axis, GateOp};
use labs_pce::{PauliString, Statevector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Statevector {
    let amps: Vec<Complex64> = (0..1 << n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    Statevector::from_amplitudes(amps).unwrap()
}

#[test]
fn gates_match_dense_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for n in 1..=3 {
        for _ in 0..100 {
            let psi = random_state(n, &mut rng);
            let theta = rng.gen_range(-7.0..7.0);
            for (axis, ch) in [(Axis::X, 'X'), (Axis::Y, 'Y'), (Axis::Z, 'Z')] {
                for q in 0..n {
                    let mut s = psi.clone();
                    s.apply_rotation(axis, q, theta).unwrap();
                    let expected = apply(&exp_generator(&single_site(n, q, ch), theta), psi.amplitudes());
                    assert!(max_diff(s.amplitudes(), &expected) < 1e-9);
                }
            }
            for q1 in 0..n {
                for q2 in 0..n {
                    if q1 == q2 {
                        continue;
                    }
                    let mut s = psi.clone();
                    s.apply_ms(q1, q2, theta).unwrap();
                    let xx = matmul(&single_site(n, q1, 'X'), &single_site(n, q2, 'X'));
                    let expected = apply(&exp_generator(&xx, theta), psi.amplitudes());
                    assert!(max_diff(s.amplitudes(), &expected) < 1e-9);
                }
            }
        }
    }
}

#[test]
fn expectations_match_dense_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for n in 1..=3 {
        let texts = all_pauli_texts(n);
        for _ in 0..100 {
            let psi = random_state(n, &mut rng);
            for text in &texts {
                let p: PauliString = text.parse().unwrap();
                let oracle = expectation(&pauli_operator(text), psi.amplitudes());
                assert!(oracle.im.abs() < 1e-12);
                assert!((psi.expectation(&p).unwrap() - oracle.re).abs() < 1e-9, "{text}");
            }
        }
    }
}

#[test]
fn ansatz_matches_product_of_dense_gates() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in 2..=3 {
        let spec = AnsatzSpec::brickwork(n, 3).unwrap();
        let theta: Vec<f64> = (0..spec.num_params()).map(|_| rng.gen_range(-3.2..3.2)).collect();
        let mut v = vec![c(0.0, 0.0); 1 << n];
        v[0] = c(1.0, 0.0);
        for gate in spec.gates() {
            let g = match gate.op {
                GateOp::Rotation { axis, qubit } => {
                    let ch = match axis {
                        Axis::X => 'X',
                        Axis::Y => 'Y',
                        Axis::Z => 'Z',
                    };
                    single_site(n, qubit, ch)
                }
                GateOp::Ms { q1, q2 } => matmul(&single_site(n, q1, 'X'), &single_site(n, q2, 'X')),
            };
            v = apply(&exp_generator(&g, theta[gate.param]), &v);
        }
        let out = run_ansatz(&spec, &theta).unwrap();
        assert!(max_diff(out.amplitudes(), &v) < 1e-9);
    }
}

#[test]
fn sampled_expectations_converge() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let psi = random_state(3, &mut rng);
    for text in ["XII", "YZI", "ZZZ", "IXY"] {
        let p: PauliString = text.parse().unwrap();
        let exact = psi.expectation(&p).unwrap();
        let sampled = psi.sampled_expectation(&p, 1_000_000, &mut rng).unwrap();
        assert!((sampled - exact).abs() < 5e-3, "{text}: {sampled} vs {exact}");
    }
}
