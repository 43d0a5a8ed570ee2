//! End-to-end strategies: the Heisenberg-coupling protocol and the
//! measure-and-operate (MO) protocol, for qubit and spin-`k` targets.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{average_fidelity_from_entanglement, entanglement_fidelity, worst_case_fidelity, ProgramChannel};
use crate::closed_forms::coupling_angle;
use crate::error::{Error, Result};
use crate::linalg::{trace, CMatrix};
use crate::quadrature::GaussLegendre;
use crate::spin::{
    make_spin_operators, rotation_unitary, spin_coherent_state, CoupledBasis, Direction, HalfInteger, SpinOperators,
    StateVector,
};

/// Grid used by the strategy simulations for the worst-case search.
pub const DEFAULT_WORST_CASE_GRID: usize = 16;

fn require_positive(j: HalfInteger, what: &str) -> Result<()> {
    if j.doubled() < 1 {
        return Err(Error::InvalidSpin(format!("{what} = {j}")));
    }
    Ok(())
}

/// `exp(−i f · 2 J·K / (2j+1))`, assembled as `Σ_l e^{−i f λ_l} P_l` with
/// `λ_l = [l(l+1) − j(j+1) − k(k+1)] / (2j+1)`.
pub fn heisenberg_gate(j: HalfInteger, k: HalfInteger, f: f64) -> Result<CMatrix> {
    require_positive(j, "j")?;
    require_positive(k, "k")?;
    let basis = CoupledBasis::new(j, k)?;
    let d = j.value() * 2.0 + 1.0;
    let (cj, ck) = (j.casimir(), k.casimir());
    Ok(basis.block_sum(|l| Complex64::from_polar(1.0, -f * (l.casimir() - cj - ck) / d)))
}

/// `V_{θ,n} = exp(−iθ n·K)` on a spin-`k` target.
pub fn target_rotation(k: HalfInteger, theta: f64, n: &Direction) -> Result<CMatrix> {
    let ops = make_spin_operators(k)?;
    Ok(rotation_unitary(&ops, n, theta))
}

#[derive(Debug, Clone, Serialize)]
pub struct StrategyFidelities {
    pub entanglement: f64,
    pub average: f64,
    pub worst_case: f64,
}

/// The Heisenberg protocol for a qubit rotation by θ about `n`: coherent
/// program along `n` and coupling angle `f(θ)`.
pub fn optimal_qubit_channel(j: HalfInteger, theta: f64, n: &Direction) -> Result<ProgramChannel> {
    let f = coupling_angle(j, theta)?;
    let u = heisenberg_gate(j, HalfInteger::HALF, f)?;
    ProgramChannel::from_trusted(u, spin_coherent_state(j, n)?, j, HalfInteger::HALF)
}

fn fidelities(ch: &ProgramChannel, v: &CMatrix, worst_grid: Option<usize>) -> Result<StrategyFidelities> {
    let fe = entanglement_fidelity(ch, v)?;
    let average = average_fidelity_from_entanglement(fe, ch.target_dim());
    let worst_case = match worst_grid {
        Some(g) => worst_case_fidelity(ch, v, g)?.0,
        None => f64::NAN,
    };
    Ok(StrategyFidelities { entanglement: fe, average, worst_case })
}

pub fn simulate_optimal_qubit_strategy(j: HalfInteger, theta: f64, n: &Direction) -> Result<StrategyFidelities> {
    simulate_optimal_qubit_strategy_with(j, theta, n, Some(DEFAULT_WORST_CASE_GRID))
}

/// As [`simulate_optimal_qubit_strategy`]; `worst_grid = None` skips the
/// worst-case search and reports NaN for it.
pub fn simulate_optimal_qubit_strategy_with(
    j: HalfInteger,
    theta: f64,
    n: &Direction,
    worst_grid: Option<usize>,
) -> Result<StrategyFidelities> {
    require_positive(j, "j")?;
    let ch = optimal_qubit_channel(j, theta, n)?;
    let v = target_rotation(HalfInteger::HALF, theta, n)?;
    fidelities(&ch, &v, worst_grid)
}

/// Points `(x, azimuth, weight)` of the product rule on the sphere used by
/// the MO simulations: Gauss-Legendre in `x = cos φ′`, trapezoid in azimuth.
fn sphere_rule(order: usize) -> Vec<(f64, f64, f64)> {
    let gl = GaussLegendre::new(order);
    let n_az = 2 * order;
    let w_az = 2.0 * PI / n_az as f64;
    let mut pts = Vec::with_capacity(order * n_az);
    for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
        for a in 0..n_az {
            pts.push((x, w_az * a as f64, w * w_az));
        }
    }
    pts
}

/// `Tr[V_{θ,ẑ}† V_{τ,n′}] / 2` on a qubit, real for SU(2).
fn half_trace_composite(half: &SpinOperators, theta: f64, tau: f64, x: f64, az: f64) -> f64 {
    let v = rotation_unitary(half, &Direction::z(), theta);
    let n_prime = Direction::from_spherical(x.clamp(-1.0, 1.0).acos(), az);
    let w = rotation_unitary(half, &n_prime, tau);
    0.5 * trace(&(v.adjoint() * w)).re
}

fn require_order(order: usize) -> Result<()> {
    if order < 16 {
        return Err(Error::InvalidArgument(format!("quadrature order {order} < 16")));
    }
    Ok(())
}

/// Average fidelity of measuring the program with the coherent-state POVM
/// and rotating the target by `tau` (default: the optimal MO angle) about
/// the measured direction.
///
/// `F_e = ∫dn′ (2j+1)/(4π) cos^{4j}(φ′/2) |Tr[V_{θ,ẑ}† V_{τ,n′}]|² / 4`.
pub fn simulate_mo_strategy(j: HalfInteger, theta: f64, quadrature_order: usize, tau: Option<f64>) -> Result<f64> {
    require_positive(j, "j")?;
    require_order(quadrature_order)?;
    let tau = match tau {
        Some(t) => t,
        None => crate::closed_forms::mo_optimal_angle(j, theta)?,
    };
    let two_j = j.doubled() as i32;
    let half = make_spin_operators(HalfInteger::HALF)?;
    let terms: Vec<f64> = sphere_rule(quadrature_order)
        .par_iter()
        .map(|&(x, az, w)| {
            let overlap = (0.5 * (1.0 + x)).powi(two_j);
            let t = half_trace_composite(&half, theta, tau, x, az);
            w * overlap * t * t
        })
        .collect();
    let fe = (two_j as f64 + 1.0) / (4.0 * PI) * terms.iter().sum::<f64>();
    Ok(average_fidelity_from_entanglement(fe, 2))
}

/// Heisenberg protocol on a spin-`k` target with program `|j, j⟩` and
/// target rotation about ẑ. The interaction angle defaults to `f = θ`.
pub fn simulate_spin_k(
    j: HalfInteger,
    k: HalfInteger,
    theta: f64,
    f: Option<f64>,
) -> Result<StrategyFidelities> {
    simulate_spin_k_with(j, k, theta, f, Some(DEFAULT_WORST_CASE_GRID))
}

pub fn simulate_spin_k_with(
    j: HalfInteger,
    k: HalfInteger,
    theta: f64,
    f: Option<f64>,
    worst_grid: Option<usize>,
) -> Result<StrategyFidelities> {
    require_positive(j, "j")?;
    require_positive(k, "k")?;
    let u = heisenberg_gate(j, k, f.unwrap_or(theta))?;
    let ch = ProgramChannel::from_trusted(u, StateVector::basis(j, j)?, j, k)?;
    let v = target_rotation(k, theta, &Direction::z())?;
    fidelities(&ch, &v, worst_grid)
}

/// Character of the spin-`k` representation at rotation angle ω, as the
/// Chebyshev polynomial `U_{2k}(cos(ω/2)) = sin((2k+1)ω/2) / sin(ω/2)`.
pub fn spin_character(k: HalfInteger, half_cos: f64) -> f64 {
    let n = k.doubled();
    let (mut u0, mut u1) = (1.0, 2.0 * half_cos);
    if n == 0 {
        return 1.0;
    }
    for _ in 1..n {
        let u2 = 2.0 * half_cos * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}

/// MO protocol on a spin-`k` target: coherent-state POVM on the program,
/// then a rotation by `tau` (default θ) about the outcome.
///
/// `F_e = ∫dn′ (2j+1)/(4π) cos^{4j}(φ′/2) χ_k(ω)² / (2k+1)²`, where ω is
/// the angle of the composite rotation `V_{θ,ẑ}† V_{τ,n′}`.
pub fn simulate_spin_k_mo(
    j: HalfInteger,
    k: HalfInteger,
    theta: f64,
    quadrature_order: usize,
    tau: Option<f64>,
) -> Result<f64> {
    require_positive(j, "j")?;
    require_positive(k, "k")?;
    require_order(quadrature_order)?;
    let tau = tau.unwrap_or(theta);
    let two_j = j.doubled() as i32;
    let dk = k.dim() as f64;
    let half = make_spin_operators(HalfInteger::HALF)?;
    let terms: Vec<f64> = sphere_rule(quadrature_order)
        .par_iter()
        .map(|&(x, az, w)| {
            let overlap = (0.5 * (1.0 + x)).powi(two_j);
            let chi = spin_character(k, half_trace_composite(&half, theta, tau, x, az));
            w * overlap * chi * chi
        })
        .collect();
    let fe = (two_j as f64 + 1.0) / (4.0 * PI) * terms.iter().sum::<f64>() / (dk * dk);
    Ok(average_fidelity_from_entanglement(fe, k.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{mo_benchmark, optimal_fidelity};
    use crate::linalg::{hermitian_exp, kron, max_abs_diff, max_abs_diff_identity, unitarity_residual};

    fn h(d: i64) -> HalfInteger {
        HalfInteger::from_doubled(d)
    }

    #[test]
    fn zero_angle_gate_is_identity() {
        let u = heisenberg_gate(h(5), h(1), 0.0).unwrap();
        assert!(max_abs_diff_identity(&u) < 1e-14);
    }

    #[test]
    fn gate_matches_dense_exponential() {
        for d in 1..=10 {
            let (j, k) = (h(d), h(1));
            let oj = make_spin_operators(j).unwrap();
            let ok = make_spin_operators(k).unwrap();
            let jk = kron(&oj.jx, &ok.jx) + kron(&oj.jy, &ok.jy) + kron(&oj.jz, &ok.jz);
            let gen = jk * Complex64::new(2.0 / (d as f64 + 1.0), 0.0);
            let f = 1.234;
            let dense = hermitian_exp(&gen, f);
            let blocks = heisenberg_gate(j, k, f).unwrap();
            assert!(max_abs_diff(&dense, &blocks) < 1e-12, "2j={d}");
            assert!(unitarity_residual(&blocks) < 1e-12);
        }
    }

    #[test]
    fn qubit_block_phases() {
        let j = h(3);
        let f = 0.8;
        let u = heisenberg_gate(j, h(1), f).unwrap();
        let basis = CoupledBasis::new(j, h(1)).unwrap();
        let jv = 1.5;
        let expect = basis.block_sum(|l| {
            if l == h(4) {
                Complex64::from_polar(1.0, -f * jv / (2.0 * jv + 1.0))
            } else {
                Complex64::from_polar(1.0, f * (jv + 1.0) / (2.0 * jv + 1.0))
            }
        });
        assert!(max_abs_diff(&u, &expect) < 1e-14);
    }

    #[test]
    fn gate_commutes_with_joint_rotations() {
        let (j, k) = (h(4), h(2));
        let u = heisenberg_gate(j, k, 2.1).unwrap();
        let oj = make_spin_operators(j).unwrap();
        let ok = make_spin_operators(k).unwrap();
        for i in 0..20 {
            let n = Direction::from_spherical(0.3 + 0.13 * i as f64, 0.7 * i as f64);
            let g = kron(&rotation_unitary(&oj, &n, 0.4 + 0.2 * i as f64), &rotation_unitary(&ok, &n, 0.4 + 0.2 * i as f64));
            let comm = &u * &g - &g * &u;
            assert!(comm.norm() <= 1e-10);
        }
    }

    #[test]
    fn headline_heisenberg_value() {
        let r = simulate_optimal_qubit_strategy(h(3), PI, &Direction::z()).unwrap();
        assert!((r.average - 17.0 / 24.0).abs() < 1e-9);
        assert!(r.worst_case <= r.average);
        let zero = simulate_optimal_qubit_strategy(h(3), 0.0, &Direction::x()).unwrap();
        assert!((zero.average - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entanglement_fidelity_is_direction_independent() {
        let j = h(5);
        let base = simulate_optimal_qubit_strategy_with(j, 2.2, &Direction::z(), None).unwrap().entanglement;
        for i in 0..20 {
            let n = Direction::from_spherical(0.1 + 0.15 * i as f64, 1.7 * i as f64);
            let fe = simulate_optimal_qubit_strategy_with(j, 2.2, &n, None).unwrap().entanglement;
            assert!((fe - base).abs() < 1e-10);
        }
    }

    #[test]
    fn coupling_angle_is_the_best_interaction_angle() {
        let j = h(4);
        let theta = PI;
        let v = target_rotation(h(1), theta, &Direction::z()).unwrap();
        let phi = spin_coherent_state(j, &Direction::z()).unwrap();
        let mut best = (f64::NEG_INFINITY, 0.0);
        for s in 0..721 {
            let f = 2.0 * PI * s as f64 / 721.0;
            let ch = ProgramChannel::from_trusted(heisenberg_gate(j, h(1), f).unwrap(), phi.clone(), j, h(1)).unwrap();
            let fe = entanglement_fidelity(&ch, &v).unwrap();
            if fe > best.0 {
                best = (fe, f);
            }
        }
        let f_opt = coupling_angle(j, theta).unwrap();
        assert!((best.1 - f_opt).abs() <= 2.0 * PI / 721.0);
    }

    #[test]
    fn mo_headline_and_identity() {
        let v = simulate_mo_strategy(h(3), PI, 64, None).unwrap();
        assert!((v - 29.0 / 45.0).abs() < 1e-6);
        let one = simulate_mo_strategy(h(3), 0.0, 16, None).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        assert!(simulate_mo_strategy(h(3), 1.0, 8, None).is_err());
    }

    #[test]
    fn mo_matches_benchmark_and_trails_heisenberg() {
        for d in 3..=12 {
            for t in [PI / 2.0, 2.0, PI] {
                let sim = simulate_mo_strategy(h(d), t, 32, None).unwrap();
                let cf = mo_benchmark(h(d), t).unwrap().value;
                assert!((sim - cf).abs() < 1e-6, "2j={d} θ={t}");
                let q = optimal_fidelity(h(d), t).unwrap().value;
                assert!(q - sim >= 1e-4);
            }
        }
    }

    #[test]
    fn mo_quadrature_converged() {
        let a = simulate_mo_strategy(h(20), 2.0, 64, None).unwrap();
        let b = simulate_mo_strategy(h(20), 2.0, 128, None).unwrap();
        assert!((a - b).abs() <= 1e-8);
    }

    #[test]
    fn character_matches_trace() {
        for d in 1..=6 {
            let k = h(d);
            let ops = make_spin_operators(k).unwrap();
            let half = make_spin_operators(h(1)).unwrap();
            for (x, az) in [(0.3, 1.0), (-0.8, 4.0), (0.99, 0.2)] {
                let (theta, tau) = (2.2, 1.7);
                let n = Direction::from_spherical(f64::acos(x), az);
                let full = rotation_unitary(&ops, &Direction::z(), theta).adjoint() * rotation_unitary(&ops, &n, tau);
                let direct = trace(&full);
                let chi = spin_character(k, half_trace_composite(&half, theta, tau, x, az));
                assert!((direct.re - chi).abs() < 1e-12 && direct.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spin_k_reductions() {
        let j = h(6);
        let theta = 2.0;
        let f = coupling_angle(j, theta).unwrap();
        let a = simulate_spin_k(j, h(1), theta, Some(f)).unwrap();
        let b = simulate_optimal_qubit_strategy(j, theta, &Direction::z()).unwrap();
        assert!((a.average - b.average).abs() < 1e-12);
        let mo_k = simulate_spin_k_mo(j, h(1), theta, 32, None).unwrap();
        let mo = simulate_mo_strategy(j, theta, 32, Some(theta)).unwrap();
        assert!((mo_k - mo).abs() < 1e-12);
        let z = simulate_spin_k(j, h(2), 0.0, None).unwrap();
        assert!((z.average - 1.0).abs() < 1e-12);
        assert!((simulate_spin_k_mo(j, h(2), 0.0, 16, None).unwrap() - 1.0).abs() < 1e-12);
    }
}
