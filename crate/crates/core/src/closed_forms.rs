//! Closed-form fidelities for programmable rotations and the
//! measure-and-operate (MO) benchmark.
//!
//! Angles are in radians. Every function depends on θ only through
//! `cos θ` and `sin θ`, so any real θ is accepted.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::HalfInteger;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Exact,
    /// Leading-order large-`j` expansion; not clamped to [0, 1].
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityValue {
    pub value: f64,
    pub kind: ValueKind,
}

impl FidelityValue {
    pub fn exact(value: f64) -> Self {
        FidelityValue { value, kind: ValueKind::Exact }
    }
    pub fn asymptotic(value: f64) -> Self {
        FidelityValue { value, kind: ValueKind::Asymptotic }
    }
    pub fn is_exact(&self) -> bool {
        self.kind == ValueKind::Exact
    }
}

fn require_spin(j: HalfInteger) -> Result<f64> {
    if j.doubled() < 1 {
        return Err(Error::InvalidSpin(j.to_string()));
    }
    Ok(j.value())
}

fn require_finite(theta: f64) -> Result<()> {
    if !theta.is_finite() {
        return Err(Error::InvalidArgument(format!("angle {theta} is not finite")));
    }
    Ok(())
}

/// θ folded onto [0, π] using the symmetry θ ↦ 2π − θ.
pub fn fold_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t > PI {
        TAU - t
    } else {
        t
    }
}

/// Optimal average fidelity for the family of `j ≥ 3/2` (coherent program,
/// optimal covariant channel).
fn optimal_general(j: f64, cos_t: f64) -> f64 {
    let d = 2.0 * j + 1.0;
    let root = (1.0 + 2.0 * d * cos_t + d * d).max(0.0).sqrt();
    1.0 / 3.0 + 2.0 / (3.0 * d * d) * (2.0 * j * j + 0.5 * d * (1.0 + cos_t) + j * root)
}

/// θ at which the two spin-1/2 branches meet, `2·arctan √(4 + √7)`.
pub fn spin_half_transition_theta() -> f64 {
    2.0 * (4.0 + 7f64.sqrt()).sqrt().atan()
}

fn optimal_spin_half(theta: f64) -> f64 {
    let t = fold_angle(theta);
    let c = t.cos();
    if t >= spin_half_transition_theta() {
        1.0 / 3.0 + ((2.0 + 7.0 * c) / (6.0 + 12.0 * c) - 0.5 * c) / 6.0
    } else {
        1.0 / 3.0 + (3.0 + 2.0 * c + (5.0 + 4.0 * c).max(0.0).sqrt()) / 12.0
    }
}

/// Spin-1 value achieved by the `|1, 0⟩` ("p-orbital") program.
pub fn spin_one_orbital_branch(theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    1.0 / 3.0 + 2.0 * s * s / 5.0
}

/// Spin-1 value achieved by the coherent `|1, 1⟩` program.
pub fn spin_one_coherent_branch(theta: f64) -> f64 {
    let c = theta.cos();
    1.0 / 3.0 + (7.0 + 3.0 * c + 2.0 * (10.0 + 6.0 * c).max(0.0).sqrt()) / 27.0
}

/// Optimal average fidelity `F_opt(j, θ)` of a programmable qubit rotation
/// by θ with a spin-`j` program.
///
/// `j = 1/2` and `j = 1` have two solution branches each; the returned value
/// is the larger one.
pub fn optimal_fidelity(j: HalfInteger, theta: f64) -> Result<FidelityValue> {
    let jv = require_spin(j)?;
    require_finite(theta)?;
    let value = match j.doubled() {
        1 => optimal_spin_half(theta),
        2 => spin_one_orbital_branch(theta).max(spin_one_coherent_branch(theta)),
        _ => optimal_general(jv, theta.cos()),
    };
    Ok(FidelityValue::exact(value))
}

/// `1 − (1 − cos θ)/(3j)`.
pub fn optimal_fidelity_asymptotic(j: HalfInteger, theta: f64) -> Result<FidelityValue> {
    let jv = require_spin(j)?;
    require_finite(theta)?;
    Ok(FidelityValue::asymptotic(1.0 - (1.0 - theta.cos()) / (3.0 * jv)))
}

/// Rotation angle τ applied by the optimal MO strategy after measuring the
/// program,
/// `τ = atan2((2j² + 3j) sin θ, (2j² + 3j + 2) cos θ + 2j + 1)` for θ in
/// [0, π], mirrored to `2π − τ` for θ in (π, 2π).
pub fn mo_optimal_angle(j: HalfInteger, theta: f64) -> Result<f64> {
    let jv = require_spin(j)?;
    require_finite(theta)?;
    let tau = mo_optimal_angle_folded(jv, fold_angle(theta));
    // θ and 2π − θ are mirror images; so are their optimal angles
    Ok(if theta.rem_euclid(TAU) > PI { TAU - tau } else { tau })
}

fn mo_optimal_angle_folded(jv: f64, t: f64) -> f64 {
    let a = 2.0 * jv * jv + 3.0 * jv;
    let y = a * t.sin();
    let x = (a + 2.0) * t.cos() + 2.0 * jv + 1.0;
    if t == PI || (y.abs() < 1e-300 && x < 0.0) {
        return PI;
    }
    y.atan2(x)
}

/// MO fidelity for an arbitrary conditional rotation angle τ.
pub fn mo_fidelity_at(j: f64, theta: f64, tau: f64) -> f64 {
    (4.0 * j + 4.0 + (2.0 * j + 1.0) * (theta - tau).cos()) / (6.0 * j + 9.0)
        + ((2.0 * j + 1.0) * (theta.cos() + tau.cos()) + (theta + tau).cos() + 1.0)
            / (3.0 * (j + 1.0) * (2.0 * j + 3.0))
}

/// Best average fidelity reachable by measuring the program and then
/// rotating the target (the classical benchmark).
pub fn mo_benchmark(j: HalfInteger, theta: f64) -> Result<FidelityValue> {
    let jv = require_spin(j)?;
    require_finite(theta)?;
    let t = fold_angle(theta);
    Ok(FidelityValue::exact(mo_fidelity_at(jv, t, mo_optimal_angle_folded(jv, t))))
}

/// `1 − 2(1 − cos θ)/(3j)`.
pub fn mo_benchmark_asymptotic(j: HalfInteger, theta: f64) -> Result<FidelityValue> {
    let jv = require_spin(j)?;
    require_finite(theta)?;
    Ok(FidelityValue::asymptotic(1.0 - 2.0 * (1.0 - theta.cos()) / (3.0 * jv)))
}

/// `1 − (1 − cos θ)/j`.
pub fn worst_case_asymptotic(j: HalfInteger, theta: f64) -> Result<FidelityValue> {
    let jv = require_spin(j)?;
    require_finite(theta)?;
    Ok(FidelityValue::asymptotic(1.0 - (1.0 - theta.cos()) / jv))
}

fn require_target(k: HalfInteger) -> Result<f64> {
    if k.doubled() < 1 {
        return Err(Error::InvalidSpin(k.to_string()));
    }
    Ok(k.value())
}

/// Average fidelity of the Heisenberg strategy on a spin-`k` target,
/// `1 − k(2k+1)(1 − cos θ)/(3j)`.
pub fn spin_k_fidelity_asymptotic(j: HalfInteger, k: HalfInteger, theta: f64) -> Result<FidelityValue> {
    let jv = require_spin(j)?;
    let kv = require_target(k)?;
    require_finite(theta)?;
    Ok(FidelityValue::asymptotic(1.0 - kv * (2.0 * kv + 1.0) * (1.0 - theta.cos()) / (3.0 * jv)))
}

/// Entanglement-fidelity companion, `1 − 2k(k+1)(1 − cos θ)/(3j)`.
pub fn spin_k_entanglement_fidelity_asymptotic(
    j: HalfInteger,
    k: HalfInteger,
    theta: f64,
) -> Result<FidelityValue> {
    let jv = require_spin(j)?;
    let kv = require_target(k)?;
    require_finite(theta)?;
    Ok(FidelityValue::asymptotic(1.0 - 2.0 * kv * (kv + 1.0) * (1.0 - theta.cos()) / (3.0 * jv)))
}

/// Offset `c(k)` in the spin-`k` worst-case slope `k(k+1) + c(k)`: 0 for
/// even integer `k`, 1/4 for odd integer `k`. Half-integer `k` uses 1/4,
/// which reproduces the qubit slope `k(k+1) + c = 1`.
pub fn worst_case_offset(k: HalfInteger) -> f64 {
    let d = k.doubled();
    if d % 2 == 0 && (d / 2) % 2 == 0 {
        0.0
    } else {
        0.25
    }
}

/// `1 − [k(k+1) + c(k)](1 − cos θ)/j`.
pub fn spin_k_worst_case_asymptotic(j: HalfInteger, k: HalfInteger, theta: f64) -> Result<FidelityValue> {
    let jv = require_spin(j)?;
    let kv = require_target(k)?;
    require_finite(theta)?;
    let slope = kv * (kv + 1.0) + worst_case_offset(k);
    Ok(FidelityValue::asymptotic(1.0 - slope * (1.0 - theta.cos()) / jv))
}

/// `1 − 2k(2k+1)(1 − cos θ)/(3j)`.
pub fn spin_k_mo_asymptotic(j: HalfInteger, k: HalfInteger, theta: f64) -> Result<FidelityValue> {
    let jv = require_spin(j)?;
    let kv = require_target(k)?;
    require_finite(theta)?;
    Ok(FidelityValue::asymptotic(1.0 - 2.0 * kv * (2.0 * kv + 1.0) * (1.0 - theta.cos()) / (3.0 * jv)))
}

/// Heisenberg interaction angle that emulates a rotation by θ,
/// `f = atan2((2j+1) sin θ, 1 + (2j+1) cos θ)` in [0, 2π).
pub fn coupling_angle(j: HalfInteger, theta: f64) -> Result<f64> {
    require_spin(j)?;
    require_finite(theta)?;
    let d = j.value() * 2.0 + 1.0;
    let t = theta.rem_euclid(TAU);
    if t == PI {
        return Ok(PI);
    }
    Ok((d * t.sin()).atan2(1.0 + d * t.cos()).rem_euclid(TAU))
}

/// Interaction time `f(θ) / ((2j+1) α ħ)` for coupling constant α.
pub fn interaction_time(j: HalfInteger, theta: f64, coupling: f64, hbar: f64) -> Result<f64> {
    if !(coupling > 0.0) || !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "coupling constant and hbar must be positive (got {coupling}, {hbar})"
        )));
    }
    let f = coupling_angle(j, theta)?;
    Ok(f / ((j.value() * 2.0 + 1.0) * coupling * hbar))
}
