//! Reusing one program for many targets: after each use the program spin
//! drifts away from `|j, j⟩` along a birth-death chain in `m`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::average_fidelity_from_entanglement;
use crate::closed_forms::{coupling_angle, mo_benchmark};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::protocols::{heisenberg_gate, target_rotation};
use crate::spin::{Direction, HalfInteger};

/// Largest `j` for which curves default to exact per-`m` fidelities.
pub const EXACT_MODE_MAX_TWO_J: i64 = 120;

pub const CROSSING_TOL: f64 = 1e-12;

/// Probability distribution over `|j, m⟩`, indexed `m = j, ..., −j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProgramDistribution {
    j: HalfInteger,
    probs: Vec<f64>,
}

impl ProgramDistribution {
    pub const SUM_TOL: f64 = 1e-12;
    pub const NEG_TOL: f64 = 1e-14;

    /// Validates; entries in `[−1e-14, 0)` are clamped to zero.
    pub fn new(j: HalfInteger, mut probs: Vec<f64>) -> Result<Self> {
        if j.doubled() < 1 {
            return Err(Error::InvalidSpin(j.to_string()));
        }
        if probs.len() != j.dim() {
            return Err(Error::Shape { expected: j.dim(), got: probs.len() });
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -Self::NEG_TOL {
                return Err(Error::InvalidDistribution(format!("entry {p} is negative")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {s}")));
        }
        Ok(ProgramDistribution { j, probs })
    }

    /// All weight on `m = j`.
    pub fn coherent(j: HalfInteger) -> Result<Self> {
        let mut p = vec![0.0; j.dim()];
        p[0] = 1.0;
        Self::new(j, p)
    }

    pub fn j(&self) -> HalfInteger {
        self.j
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `Σ p(m) (j − m)`.
    pub fn mean_deficit(&self) -> f64 {
        self.probs.iter().enumerate().map(|(i, p)| p * i as f64).sum()
    }

    pub fn total_variation(&self, other: &ProgramDistribution) -> f64 {
        0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.probs.iter().zip(values).map(|(p, v)| p * v).sum()
    }
}

/// Angular factor multiplying the hopping rates of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelWeight {
    /// `1 − cos f(θ)`, the rate produced by the gate with coupling angle `f(θ)`.
    Exact,
    /// `1 − cos θ − sin²θ/(2j)`, its large-`j` expansion. Equal to the exact
    /// factor at θ = 0 and θ = π; negative (rejected) for `j = 1/2`, θ < π/2.
    Expanded,
}

impl KernelWeight {
    pub fn factor(self, j: HalfInteger, theta: f64) -> Result<f64> {
        match self {
            KernelWeight::Exact => Ok(1.0 - coupling_angle(j, theta)?.cos()),
            KernelWeight::Expanded => {
                let s = theta.sin();
                let w = 1.0 - theta.cos() - s * s / (2.0 * j.value());
                // (1 − cos θ)(1 − (1 + cos θ)/(2j)): negative only for j = 1/2
                if w < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "expanded kernel rate {w} is negative at j = {j}, theta = {theta}; use the exact rate"
                    )));
                }
                Ok(w)
            }
        }
    }
}

fn step_with_factor(dist: &ProgramDistribution, w: f64) -> Result<ProgramDistribution> {
    let j = dist.j;
    let jv = j.value();
    let d2 = (2.0 * jv + 1.0).powi(2);
    let n = j.dim();
    let mut out = vec![0.0; n];
    for (i, &p) in dist.probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let m = jv - i as f64;
        let down = (jv + m) * (1.0 + jv - m) / d2 * w;
        let up = (jv - m) * (1.0 + jv + m) / d2 * w;
        out[i] += p * (1.0 - down - up);
        if i + 1 < n {
            out[i + 1] += p * down;
        }
        if i > 0 {
            out[i - 1] += p * up;
        }
    }
    ProgramDistribution::new(j, out)
}

/// One use of the program: `p'(m') = Σ_m c_{m',m} p(m)` with
/// `c_{m−1,m} = (j+m)(1+j−m)/(2j+1)² · w`, `c_{m+1,m} = (j−m)(1+j+m)/(2j+1)² · w`
/// and `w = 1 − cos θ − sin²θ/(2j)`.
pub fn complementary_step(j: HalfInteger, theta: f64, dist: &ProgramDistribution) -> Result<ProgramDistribution> {
    complementary_step_with(j, theta, dist, KernelWeight::Expanded)
}

pub fn complementary_step_with(
    j: HalfInteger,
    theta: f64,
    dist: &ProgramDistribution,
    weight: KernelWeight,
) -> Result<ProgramDistribution> {
    if dist.j != j {
        return Err(Error::Shape { expected: j.dim(), got: dist.j.dim() });
    }
    step_with_factor(dist, weight.factor(j, theta)?)
}

/// Average fidelity with program `|j, m⟩` for every `m` (index `j − m`),
/// for the gate with interaction angle `f`, read directly off the joint
/// unitary: `F_e(m) = Σ_a |Σ_{t,t'} V*_{t t'} U_{(a,t),(m,t')}|² / 4`.
pub fn per_m_fidelities_for_angle(j: HalfInteger, theta: f64, f: f64) -> Result<Vec<f64>> {
    let u = heisenberg_gate(j, HalfInteger::HALF, f)?;
    let v = target_rotation(HalfInteger::HALF, theta, &Direction::z())?;
    Ok(per_m_from_unitary(&u, &v, j.dim()))
}

fn per_m_from_unitary(u: &CMatrix, v: &CMatrix, dc: usize) -> Vec<f64> {
    (0..dc)
        .into_par_iter()
        .map(|m| {
            let s: f64 = (0..dc)
                .map(|a| {
                    let mut tr = Complex64::new(0.0, 0.0);
                    for t in 0..2 {
                        for tp in 0..2 {
                            tr += v[(t, tp)].conj() * u[(a * 2 + t, m * 2 + tp)];
                        }
                    }
                    tr.norm_sqr()
                })
                .sum();
            average_fidelity_from_entanglement(s / 4.0, 2)
        })
        .collect()
}

/// Exact per-`m` fidelities of the Heisenberg protocol with `f = f(θ)`.
pub fn per_m_fidelities(j: HalfInteger, theta: f64) -> Result<Vec<f64>> {
    per_m_fidelities_for_angle(j, theta, coupling_angle(j, theta)?)
}

/// Average fidelity when the program is `|j, m⟩` instead of `|j, j⟩`,
/// simulated through the channel machinery.
pub fn per_m_fidelity(j: HalfInteger, theta: f64, m: HalfInteger) -> Result<f64> {
    let u = heisenberg_gate(j, HalfInteger::HALF, coupling_angle(j, theta)?)?;
    let program = crate::spin::StateVector::basis(j, m)?;
    let ch = crate::channel::ProgramChannel::from_trusted(u, program, j, HalfInteger::HALF)?;
    let v = target_rotation(HalfInteger::HALF, theta, &Direction::z())?;
    Ok(average_fidelity_from_entanglement(crate::channel::entanglement_fidelity(&ch, &v)?, 2))
}

/// `1 − (1 + 2j − 2m)(1 − cos θ)/(3j)`.
pub fn per_m_fidelity_asymptotic(j: HalfInteger, theta: f64, m: HalfInteger) -> f64 {
    let (jv, mv) = (j.value(), m.value());
    1.0 - (1.0 + 2.0 * jv - 2.0 * mv) * (1.0 - theta.cos()) / (3.0 * jv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PerMMode {
    Exact,
    Asymptotic,
}

impl PerMMode {
    pub fn default_for(j: HalfInteger) -> Self {
        if j.doubled() <= EXACT_MODE_MAX_TWO_J {
            PerMMode::Exact
        } else {
            PerMMode::Asymptotic
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PerMMode::Exact => "exact",
            PerMMode::Asymptotic => "asymptotic",
        }
    }
}

fn per_m_values(j: HalfInteger, theta: f64, mode: PerMMode) -> Result<Vec<f64>> {
    match mode {
        PerMMode::Exact => per_m_fidelities(j, theta),
        PerMMode::Asymptotic => Ok(j.magnetic_numbers().map(|m| per_m_fidelity_asymptotic(j, theta, m)).collect()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RecyclingCurve {
    pub mode: PerMMode,
    pub weight: KernelWeight,
    /// `(n, F(j, θ, n))` for `n = 1, ..., n_max`.
    pub points: Vec<(usize, f64)>,
}

/// `F(j, θ, n) = Σ_m p(n−1, m) F(j, θ, m)` starting from `p(0) = δ_{m,j}`.
/// Exact per-`m` values for `j ≤ 60`, asymptotic beyond; exact kernel rate.
pub fn recycling_curve(j: HalfInteger, theta: f64, n_max: usize) -> Result<RecyclingCurve> {
    recycling_curve_with(j, theta, n_max, PerMMode::default_for(j), KernelWeight::Exact)
}

pub fn recycling_curve_with(
    j: HalfInteger,
    theta: f64,
    n_max: usize,
    mode: PerMMode,
    weight: KernelWeight,
) -> Result<RecyclingCurve> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let per_m = per_m_values(j, theta, mode)?;
    let w = weight.factor(j, theta)?;
    let mut dist = ProgramDistribution::coherent(j)?;
    let mut points = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        points.push((n, dist.expectation(&per_m)));
        if n < n_max {
            dist = step_with_factor(&dist, w)?;
        }
    }
    Ok(RecyclingCurve { mode, weight, points })
}

/// Variant that re-chooses the interaction angle before every use to
/// maximize that step's fidelity, searching `f(θ) ± 0.6` on a grid of
/// `grid` points. Exact per-`m` values.
pub fn recycling_curve_stepwise_optimized(
    j: HalfInteger,
    theta: f64,
    n_max: usize,
    grid: usize,
) -> Result<RecyclingCurve> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let f0 = coupling_angle(j, theta)?;
    let grid = grid.max(2);
    let angles: Vec<f64> = (0..grid).map(|i| f0 - 0.6 + 1.2 * i as f64 / (grid - 1) as f64).collect();
    let table: Result<Vec<Vec<f64>>> = angles.iter().map(|&f| per_m_fidelities_for_angle(j, theta, f)).collect();
    let table = table?;
    let mut dist = ProgramDistribution::coherent(j)?;
    let mut points = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (best_i, best_v) = table
            .iter()
            .enumerate()
            .map(|(i, row)| (i, dist.expectation(row)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        points.push((n, best_v));
        if n < n_max {
            dist = step_with_factor(&dist, 1.0 - angles[best_i].cos())?;
        }
    }
    Ok(RecyclingCurve { mode: PerMMode::Exact, weight: KernelWeight::Exact, points })
}

#[derive(Debug, Clone, Serialize)]
pub struct Longevity {
    /// First use whose fidelity is below the MO benchmark.
    pub crossing: Option<usize>,
    /// `j / (1 − cos θ)`; infinite at θ = 0.
    pub asymptotic: f64,
    pub mode: PerMMode,
    pub n_max: usize,
}

/// First step `n` at which `curve` drops below the MO benchmark.
/// Differences below `CROSSING_TOL` count as ties, not losses.
pub fn crossing_step(curve: &RecyclingCurve, benchmark: f64) -> Option<usize> {
    curve.points.iter().find(|(_, f)| *f < benchmark - CROSSING_TOL).map(|(n, _)| *n)
}

pub fn advantage_longevity(j: HalfInteger, theta: f64) -> Result<Longevity> {
    let asymptotic = j.value() / (1.0 - theta.cos());
    let n_max = if asymptotic.is_finite() { (4.0 * asymptotic).ceil() as usize + 16 } else { 16 };
    advantage_longevity_with(j, theta, n_max.min(1_000_000), PerMMode::default_for(j), KernelWeight::Exact)
}

pub fn advantage_longevity_with(
    j: HalfInteger,
    theta: f64,
    n_max: usize,
    mode: PerMMode,
    weight: KernelWeight,
) -> Result<Longevity> {
    let curve = recycling_curve_with(j, theta, n_max, mode, weight)?;
    let bench = mo_benchmark(j, theta)?.value;
    Ok(Longevity {
        crossing: crossing_step(&curve, bench),
        asymptotic: j.value() / (1.0 - theta.cos()),
        mode,
        n_max,
    })
}

/// Geometric approximation after `n` uses,
/// `p(n, m) ∝ (1 − q) q^{j−m}` with `q = n(1 − cos θ) / (n(1 − cos θ) + 2j)`.
pub fn asymptotic_distribution(j: HalfInteger, theta: f64, n: usize) -> Result<ProgramDistribution> {
    if j.doubled() < 1 {
        return Err(Error::InvalidSpin(j.to_string()));
    }
    let a = n as f64 * (1.0 - theta.cos());
    let q = a / (a + 2.0 * j.value());
    let raw: Vec<f64> = (0..j.dim()).map(|i| (1.0 - q) * q.powi(i as i32)).collect();
    let s: f64 = raw.iter().sum();
    ProgramDistribution::new(j, raw.into_iter().map(|p| p / s).collect())
}

/// Leading-order fidelity after `n` uses,
/// `1 − (1 − cos θ)(n(1 − cos θ) + j)/(3j²)`.
pub fn recycled_fidelity_asymptotic(j: HalfInteger, theta: f64, n: usize) -> f64 {
    let jv = j.value();
    let c = 1.0 - theta.cos();
    1.0 - c * (n as f64 * c + jv) / (3.0 * jv * jv)
}
