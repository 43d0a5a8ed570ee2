use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use spinbench::angle::parse_angle;
use spinbench::channel::{
    apply_program_channel, entanglement_fidelity, random_state, random_unitary, sample_rng, DensityMatrix,
    ProgramChannel,
};
use spinbench::closed_forms::{mo_benchmark, optimal_fidelity};
use spinbench::linalg::{hermiticity_residual, max_abs_diff_identity, trace, CMatrix};
use spinbench::protocols::{
    heisenberg_gate, optimal_qubit_channel, simulate_mo_strategy, simulate_optimal_qubit_strategy_with, target_rotation,
};
use spinbench::recycling::{complementary_step_with, KernelWeight, ProgramDistribution};
use spinbench::report::{read_csv, write_csv, FidelityReport, Method};
use spinbench::spin::{make_spin_operators, rotation_unitary, spin_coherent_state, Direction, HalfInteger};

fn spin(max_doubled: i64) -> impl Strategy<Value = HalfInteger> {
    (1..=max_doubled).prop_map(HalfInteger::from_doubled)
}

fn direction() -> impl Strategy<Value = Direction> {
    (-1.0f64..=1.0, 0.0..2.0 * PI).prop_map(|(cz, az)| Direction::from_spherical(cz.acos(), az))
}

fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn angular_momentum_algebra(j in spin(40)) {
        let ops = make_spin_operators(j).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let d = j.dim() as f64;
        for (a, b, c) in [(&ops.jx, &ops.jy, &ops.jz), (&ops.jy, &ops.jz, &ops.jx), (&ops.jz, &ops.jx, &ops.jy)] {
            let r = commutator(a, b) - c * i;
            prop_assert!(r.norm() <= 1e-12 * d);
            prop_assert!(hermiticity_residual(a) <= 1e-14);
        }
        let cas = &ops.jx * &ops.jx + &ops.jy * &ops.jy + &ops.jz * &ops.jz;
        let r = cas - CMatrix::identity(j.dim(), j.dim()) * Complex64::new(j.casimir(), 0.0);
        prop_assert!(r.norm() <= 1e-12 * d);
    }

    #[test]
    fn coherent_overlap_law(j in spin(60), a in direction(), b in direction()) {
        let sa = spin_coherent_state(j, &a).unwrap();
        let sb = spin_coherent_state(j, &b).unwrap();
        let expected = ((1.0 + a.dot(&b)) / 2.0).powi(j.doubled() as i32);
        prop_assert!((sa.fidelity(&sb) - expected).abs() <= 1e-10);
    }

    #[test]
    fn coherent_state_is_top_eigenvector(j in spin(30), n in direction()) {
        let ops = make_spin_operators(j).unwrap();
        let s = spin_coherent_state(j, &n).unwrap();
        let e = s.expectation(&ops.along(&n));
        prop_assert!((e.re - j.value()).abs() <= 1e-10 && e.im.abs() <= 1e-10);
    }

    #[test]
    fn half_integer_text_round_trip(d in 0i64..500) {
        let h = HalfInteger::from_doubled(d);
        prop_assert_eq!(h.to_string().parse::<HalfInteger>().unwrap(), h);
    }

    #[test]
    fn program_channels_are_cptp(dj in 1i64..=5, dk in 1i64..=3, seed in any::<u64>()) {
        let (j, k) = (HalfInteger::from_doubled(dj), HalfInteger::from_doubled(dk));
        let mut rng = sample_rng(seed, 0);
        let u = random_unitary(&mut rng, j.dim() * k.dim());
        let program = random_state(&mut rng, j.dim());
        let ch = ProgramChannel::new(u, program, j, k).unwrap();
        let completeness = ch
            .kraus_operators()
            .iter()
            .fold(CMatrix::zeros(k.dim(), k.dim()), |acc, kr| acc + kr.adjoint() * kr);
        prop_assert!(max_abs_diff_identity(&completeness) <= 1e-12);
        let input = DensityMatrix::from_pure(&random_state(&mut rng, k.dim()));
        let out = apply_program_channel(&ch, &input).unwrap();
        let m = out.matrix();
        prop_assert!((trace(m).re - 1.0).abs() <= 1e-12);
        prop_assert!(hermiticity_residual(m) <= 1e-12);
        let eig = m.clone().symmetric_eigenvalues();
        prop_assert!(eig.iter().all(|&e| e >= -1e-10));
    }

    #[test]
    fn entanglement_fidelity_is_covariant(dj in 2i64..=12, theta in 0.0..PI, n in direction()) {
        let j = HalfInteger::from_doubled(dj);
        let half = HalfInteger::HALF;
        let fz = {
            let ch = optimal_qubit_channel(j, theta, &Direction::z()).unwrap();
            entanglement_fidelity(&ch, &target_rotation(half, theta, &Direction::z()).unwrap()).unwrap()
        };
        let ch = optimal_qubit_channel(j, theta, &n).unwrap();
        let fnn = entanglement_fidelity(&ch, &target_rotation(half, theta, &n).unwrap()).unwrap();
        prop_assert!((fz - fnn).abs() <= 1e-10);
    }

    #[test]
    fn heisenberg_gate_commutes_with_joint_rotations(dj in 1i64..=8, dk in 1i64..=4, f in -7.0f64..7.0, g in direction(), w in 0.0..2.0 * PI) {
        let (j, k) = (HalfInteger::from_doubled(dj), HalfInteger::from_doubled(dk));
        let u = heisenberg_gate(j, k, f).unwrap();
        let rj = rotation_unitary(&make_spin_operators(j).unwrap(), &g, w);
        let rk = rotation_unitary(&make_spin_operators(k).unwrap(), &g, w);
        let joint = rj.kronecker(&rk);
        prop_assert!(commutator(&u, &joint).norm() <= 1e-10);
    }

    #[test]
    fn markov_kernel_is_stochastic(dj in 1i64..=80, theta in 0.0..PI, weights in prop::collection::vec(0.0f64..1.0, 81), exact in any::<bool>()) {
        let j = HalfInteger::from_doubled(dj);
        let raw: Vec<f64> = weights[..j.dim()].iter().map(|w| w + 1e-3).collect();
        let s: f64 = raw.iter().sum();
        let mut dist = ProgramDistribution::new(j, raw.iter().map(|w| w / s).collect()).unwrap();
        // the expanded rate is only a rate for j >= 1
        let weight = if exact || dj == 1 { KernelWeight::Exact } else { KernelWeight::Expanded };
        for _ in 0..20 {
            dist = complementary_step_with(j, theta, &dist, weight).unwrap();
            prop_assert!((dist.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(dist.probs().iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn mo_quadrature_matches_closed_form(dj in 1i64..=40, theta in 0.0..2.0 * PI) {
        let j = HalfInteger::from_doubled(dj);
        let sim = simulate_mo_strategy(j, theta, 64, None).unwrap();
        prop_assert!((sim - mo_benchmark(j, theta).unwrap().value).abs() <= 1e-9);
    }

    #[test]
    fn heisenberg_simulation_matches_closed_form(dj in 3i64..=16, theta in -2.0 * PI..2.0 * PI) {
        let j = HalfInteger::from_doubled(dj);
        let sim = simulate_optimal_qubit_strategy_with(j, theta, &Direction::z(), None).unwrap().average;
        prop_assert!((sim - optimal_fidelity(j, theta).unwrap().value).abs() <= 1e-9);
    }

    #[test]
    fn quantum_bound_dominates_benchmark(dj in 1i64..=400, theta in 0.0..2.0 * PI) {
        let j = HalfInteger::from_doubled(dj);
        let opt = optimal_fidelity(j, theta).unwrap().value;
        let mo = mo_benchmark(j, theta).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-15).contains(&opt) && (0.0..=1.0 + 1e-15).contains(&mo));
        prop_assert!(opt >= mo - 1e-12);
    }

    #[test]
    fn angle_literals_round_trip(x in -1e6f64..1e6, a in 1u32..50, b in 1u32..50) {
        prop_assert_eq!(parse_angle(&x.to_string()).unwrap(), x);
        let v = parse_angle(&format!("{a}*pi/{b}")).unwrap();
        prop_assert_eq!(v, a as f64 * PI / b as f64);
    }
}

fn report() -> impl Strategy<Value = FidelityReport> {
    (
        1i64..2001,
        1i64..20,
        prop_oneof![Just(0.0), Just(PI), -10.0f64..10.0],
        prop::sample::select(Method::ALL.to_vec()),
        0u64..100_000,
        prop_oneof![-1.0f64..2.0, Just(1.0), Just(0.0), 1e-300f64..1e-200],
        prop_oneof![Just(0.0), 0.0f64..1.0, 1e-30f64..1e-10],
        "[a-z0-9 ,;=\"\n]{0,16}",
    )
        .prop_map(|(two_j, two_k, theta, method, step, value, u, notes)| {
            FidelityReport::new(two_j, two_k, theta, method, value)
                .with_step(step)
                .with_uncertainty(u)
                .with_notes(notes)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(report(), 0..12)) {
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, rows);
    }
}
