//! Entanglement fidelity of rotation-covariant programmable qubit channels
//! in their Schur-block parametrization, and its numerical maximization.
//!
//! The (conjugated) Choi operator of a covariant channel on
//! `control(j) ⊗ target(1/2) ⊗ reference(1/2)` decomposes as
//! `α P_{j+1} ⊕ β P_{j−1} ⊕ P_j ⊗ M`, with `M = [[γA, γB], [γB*, γD]] ≥ 0`.
//! The fidelity depends on the program only through `⟨J_z⟩` and `⟨J_z²⟩`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::{nelder_mead_max, NelderMeadOptions};
use crate::spin::HalfInteger;

const FEAS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovariantChannelParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_a: f64,
    pub gamma_d: f64,
    /// Off-diagonal block entry; the lower one is its conjugate.
    pub gamma_b: Complex64,
}

fn spin_value(j: HalfInteger) -> Result<f64> {
    if j.doubled() < 1 {
        return Err(Error::InvalidSpin(j.to_string()));
    }
    Ok(j.value())
}

/// Upper end of the `γA` range keeping `α ≥ 0`.
pub fn gamma_a_max(j: f64) -> f64 {
    (2.0 * j + 2.0) / (2.0 * j + 1.0)
}

/// Upper end of the `γD` range keeping `β ≥ 0` (`γD = 1/2` is forced at
/// `j = 1/2`).
pub fn gamma_d_max(j: f64) -> f64 {
    2.0 * j / (2.0 * j + 1.0)
}

impl CovariantChannelParams {
    /// Solves the two trace-preservation constraints for `α` and `β`.
    pub fn from_blocks(j: HalfInteger, gamma_a: f64, gamma_d: f64, gamma_b: Complex64) -> Result<Self> {
        let jv = spin_value(j)?;
        let alpha = (1.0 - (2.0 * jv + 1.0) / (2.0 * jv + 2.0) * gamma_a) * (2.0 * jv + 2.0) / (2.0 * jv + 3.0);
        let (beta, gamma_d) = if j.doubled() == 1 {
            (0.0, 0.5)
        } else {
            ((1.0 - (2.0 * jv + 1.0) / (2.0 * jv) * gamma_d) * (2.0 * jv) / (2.0 * jv - 1.0), gamma_d)
        };
        let p = CovariantChannelParams { alpha, beta, gamma_a, gamma_d, gamma_b };
        p.validate(j)?;
        Ok(p)
    }

    /// Parameters of the identity channel on the target.
    pub fn identity(j: HalfInteger) -> Result<Self> {
        let jv = spin_value(j)?;
        let (ga, gd) = (gamma_a_max(jv), gamma_d_max(jv));
        let gamma_b = Complex64::new(-(ga * gd).sqrt(), 0.0);
        Self::from_blocks(j, ga, gd, gamma_b)
    }

    pub fn gamma_c(&self) -> Complex64 {
        self.gamma_b.conj()
    }

    pub fn validate(&self, j: HalfInteger) -> Result<()> {
        let jv = spin_value(j)?;
        let fail = |msg: String| Err(Error::InfeasibleParams(msg));
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma_a", self.gamma_a), ("gamma_d", self.gamma_d)] {
            if !v.is_finite() || v < -FEAS_TOL {
                return fail(format!("{name} = {v} is negative"));
            }
        }
        if self.gamma_b.norm_sqr() > self.gamma_a * self.gamma_d + FEAS_TOL {
            return fail(format!(
                "|gamma_b|² = {} exceeds gamma_a·gamma_d = {}",
                self.gamma_b.norm_sqr(),
                self.gamma_a * self.gamma_d
            ));
        }
        let t1 = (2.0 * jv + 3.0) / (2.0 * jv + 2.0) * self.alpha + (2.0 * jv + 1.0) / (2.0 * jv + 2.0) * self.gamma_a;
        let t2 = (2.0 * jv - 1.0) / (2.0 * jv) * self.beta + (2.0 * jv + 1.0) / (2.0 * jv) * self.gamma_d;
        if (t1 - 1.0).abs() > FEAS_TOL || (t2 - 1.0).abs() > FEAS_TOL {
            return fail(format!("trace constraints violated ({t1}, {t2})"));
        }
        if j.doubled() == 1 && self.beta.abs() > FEAS_TOL {
            return fail("beta must vanish for j = 1/2".into());
        }
        Ok(())
    }
}

/// First and second moments of `J_z` in the program state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProgramMoments {
    pub jz_mean: f64,
    pub jz2_mean: f64,
}

impl ProgramMoments {
    /// Accepts the pair iff it lies in the convex hull of `{(m, m²)}`,
    /// i.e. iff some distribution over `|j, m⟩` realizes it.
    pub fn new(j: HalfInteger, jz_mean: f64, jz2_mean: f64) -> Result<Self> {
        let jv = spin_value(j)?;
        let tol = 1e-12 * (1.0 + jv * jv);
        let bad = || Error::InfeasibleParams(format!("moments ({jz_mean}, {jz2_mean}) not realizable at j = {j}"));
        if !(jz_mean.is_finite() && jz2_mean.is_finite()) || jz_mean.abs() > jv + tol || jz2_mean > jv * jv + tol {
            return Err(bad());
        }
        // lower hull: chords between consecutive (m, m²)
        let x = jz_mean.clamp(-jv, jv);
        let k = ((x + jv).floor() as i64).clamp(0, (2.0 * jv) as i64 - 1).max(0);
        let m0 = -jv + k as f64;
        let m1 = m0 + 1.0;
        let lower = m0 * m0 + (m0 + m1) * (x - m0);
        if jz2_mean < lower - tol || jz2_mean < jz_mean * jz_mean - tol {
            return Err(bad());
        }
        Ok(ProgramMoments { jz_mean, jz2_mean })
    }

    /// Moments of the basis state `|j, m⟩`.
    pub fn basis(j: HalfInteger, m: HalfInteger) -> Result<Self> {
        j.index_of(m)?;
        let mv = m.value();
        Self::new(j, mv, mv * mv)
    }

    /// Moments of the coherent state `|j, j⟩`.
    pub fn coherent(j: HalfInteger) -> Result<Self> {
        Self::basis(j, j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Abcd {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// The four coefficients without feasibility checks.
pub fn abcd_raw(j: f64, p: &CovariantChannelParams) -> Abcd {
    let sq = (j * (j + 1.0)).sqrt();
    let norm = 1.0 / (2.0 * (1.0 + 2.0 * j));
    let b_plus_c = p.gamma_b + p.gamma_c();
    let a = norm * ((j + 1.0) * p.alpha + j * p.beta);
    let b = norm * ((j + 1.0) * p.gamma_a + j * p.gamma_d - sq * b_plus_c.re);
    let c = (Complex64::new(0.0, 1.0) * (p.gamma_b - p.gamma_c())).re / (2.0 * sq);
    let d = norm * (-p.alpha / (j + 1.0) - p.beta / j + p.gamma_a / (j + 1.0) + p.gamma_d / j + b_plus_c.re / sq);
    Abcd { a, b, c, d }
}

pub fn abcd_coefficients(j: HalfInteger, p: &CovariantChannelParams) -> Result<Abcd> {
    p.validate(j)?;
    Ok(abcd_raw(j.value(), p))
}

fn fe_from(abcd: &Abcd, theta: f64, m: &ProgramMoments) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    abcd.a * s * s + abcd.b * c * c + abcd.c * m.jz_mean * s * c + abcd.d * m.jz2_mean * s * s
}

/// `F_e = A sin²(θ/2) + B cos²(θ/2) + C ⟨J_z⟩ sin(θ/2)cos(θ/2) + D ⟨J_z²⟩ sin²(θ/2)`.
pub fn covariant_entanglement_fidelity(
    j: HalfInteger,
    theta: f64,
    params: &CovariantChannelParams,
    moments: &ProgramMoments,
) -> Result<f64> {
    let abcd = abcd_coefficients(j, params)?;
    ProgramMoments::new(j, moments.jz_mean, moments.jz2_mean)?;
    let fe = fe_from(&abcd, theta, moments);
    if !(-1e-10..=1.0 + 1e-10).contains(&fe) {
        return Err(Error::InfeasibleParams(format!("entanglement fidelity {fe} outside [0, 1]")));
    }
    Ok(fe.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy)]
pub struct CovariantSearch {
    /// Grid points per free axis.
    pub grid: usize,
    /// Random simplex restarts in addition to the best grid cell.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CovariantSearch {
    fn default() -> Self {
        CovariantSearch { grid: 40, restarts: 5, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CovariantOptimum {
    pub fe: f64,
    pub params: CovariantChannelParams,
    pub moments: ProgramMoments,
}

impl CovariantOptimum {
    /// Average fidelity on the qubit target.
    pub fn average_fidelity(&self) -> f64 {
        (2.0 * self.fe + 1.0) / 3.0
    }
}

/// Free coordinates `(γA, γD, s, φ)` with `γB = s √(γA γD) e^{iφ}`.
fn params_from(j: HalfInteger, x: &[f64]) -> CovariantChannelParams {
    let jv = j.value();
    let ga = x[0].clamp(0.0, gamma_a_max(jv));
    let gd = if j.doubled() == 1 { 0.5 } else { x[1].clamp(0.0, gamma_d_max(jv)) };
    let r = x[2].clamp(0.0, 1.0) * (ga * gd).sqrt();
    let gamma_b = Complex64::from_polar(r, x[3]);
    let alpha = ((1.0 - (2.0 * jv + 1.0) / (2.0 * jv + 2.0) * ga) * (2.0 * jv + 2.0) / (2.0 * jv + 3.0)).max(0.0);
    let beta = if j.doubled() == 1 {
        0.0
    } else {
        ((1.0 - (2.0 * jv + 1.0) / (2.0 * jv) * gd) * (2.0 * jv) / (2.0 * jv - 1.0)).max(0.0)
    };
    CovariantChannelParams { alpha, beta, gamma_a: ga, gamma_d: gd, gamma_b }
}

/// Maximum over channel parameters for fixed moments. `gamma_a_fixed`
/// pins `γA` (e.g. to its upper end, which forces `α = 0`).
pub fn maximize_for_moments(
    j: HalfInteger,
    theta: f64,
    moments: &ProgramMoments,
    gamma_a_fixed: Option<f64>,
    search: CovariantSearch,
) -> Result<(f64, CovariantChannelParams)> {
    let jv = spin_value(j)?;
    let (ga_lo, ga_hi) = match gamma_a_fixed {
        Some(g) => (g, g),
        None => (0.0, gamma_a_max(jv)),
    };
    let gd_hi = if j.doubled() == 1 { 0.5 } else { gamma_d_max(jv) };
    let gd_lo = if j.doubled() == 1 { 0.5 } else { 0.0 };
    let lo = [ga_lo, gd_lo, 0.0, -PI];
    let hi = [ga_hi, gd_hi, 1.0, PI];
    let f = |x: &[f64]| fe_from(&abcd_raw(jv, &params_from(j, x)), theta, moments);

    let g = search.grid.max(2);
    let axis = |i: usize, k: usize| -> f64 {
        if hi[i] > lo[i] {
            lo[i] + (hi[i] - lo[i]) * k as f64 / (g - 1) as f64
        } else {
            lo[i]
        }
    };
    let counts: Vec<usize> = (0..4).map(|i| if hi[i] > lo[i] { g } else { 1 }).collect();
    let total: usize = counts.iter().product();
    let (best_val, best_idx) = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut x = [0.0; 4];
            for i in 0..4 {
                x[i] = axis(i, idx % counts[i]);
                idx /= counts[i];
            }
            (f(&x), x)
        })
        .reduce(
            || (f64::NEG_INFINITY, [0.0; 4]),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );

    let opts = NelderMeadOptions { max_evals: 4000, xtol: 1e-13, ftol: 1e-16, initial_step: 0.02 };
    let mut best = (best_val, best_idx.to_vec());
    let mut starts = vec![best_idx.to_vec()];
    let mut rng = ChaCha20Rng::seed_from_u64(search.seed);
    for _ in 0..search.restarts {
        starts.push((0..4).map(|i| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>()).collect());
    }
    for s in starts {
        let r = nelder_mead_max(&f, &s, &lo, &hi, opts);
        if r.value > best.0 {
            best = (r.value, r.x);
        }
    }
    Ok((best.0, params_from(j, &best.1)))
}

/// Maximizes the entanglement fidelity over all covariant channels and all
/// programs.
///
/// The objective is affine in the moments, so its maximum over the convex
/// hull of `{(m, m²)}` sits on a vertex; each vertex `m = j, ..., −j` is
/// searched separately and ties keep the larger `m`.
pub fn maximize_covariant_fidelity(j: HalfInteger, theta: f64) -> Result<CovariantOptimum> {
    maximize_covariant_fidelity_with(j, theta, CovariantSearch::default())
}

pub fn maximize_covariant_fidelity_with(
    j: HalfInteger,
    theta: f64,
    search: CovariantSearch,
) -> Result<CovariantOptimum> {
    spin_value(j)?;
    let results: Result<Vec<CovariantOptimum>> = j
        .magnetic_numbers()
        .map(|m| {
            let moments = ProgramMoments::basis(j, m)?;
            let (fe, params) = maximize_for_moments(j, theta, &moments, None, search)?;
            Ok(CovariantOptimum { fe, params, moments })
        })
        .collect();
    let results = results?;
    let mut best = results[0];
    for r in &results[1..] {
        if r.fe > best.fe + 1e-12 {
            best = *r;
        }
    }
    Ok(best)
}

/// Location of a change of optimal solution branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    /// Transition angle in (0, π).
    pub theta: f64,
    /// `π − θ`.
    pub offset_from_pi: f64,
}

/// Signed branch gap at θ; positive where the second branch is optimal.
///
/// For `j = 1/2` the branches differ in whether the optimal channel has
/// `α = 0`; for `j ≥ 1` in whether the best program is coherent (`|m| = j`).
fn branch_gap(j: HalfInteger, theta: f64, search: CovariantSearch) -> Result<f64> {
    if j.doubled() == 1 {
        let mom = ProgramMoments::coherent(j)?;
        let (free, _) = maximize_for_moments(j, theta, &mom, None, search)?;
        let (pinned, _) = maximize_for_moments(j, theta, &mom, Some(gamma_a_max(0.5)), search)?;
        // tangential crossing: the gap grows quadratically, so use a floor
        return Ok(free - pinned - 1e-11);
    }
    let coherent = maximize_for_moments(j, theta, &ProgramMoments::coherent(j)?, None, search)?.0;
    let mut other = f64::NEG_INFINITY;
    for m in j.magnetic_numbers() {
        if m.doubled().abs() == j.doubled() || m.doubled() < 0 {
            continue;
        }
        let v = maximize_for_moments(j, theta, &ProgramMoments::basis(j, m)?, None, search)?.0;
        other = other.max(v);
    }
    Ok(other - coherent)
}

/// Bisects the branch crossing on (0, π) to `tol` in θ. Returns `None`
/// when the coherent branch is optimal across a `scan`-point grid.
pub fn locate_transition_with(
    j: HalfInteger,
    search: CovariantSearch,
    scan: usize,
    tol: f64,
) -> Result<Option<Transition>> {
    spin_value(j)?;
    let scan = scan.max(2);
    let thetas: Vec<f64> = (1..=scan).map(|i| PI * i as f64 / scan as f64).collect();
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    for &t in &thetas {
        let g = branch_gap(j, t, search)?;
        if let Some((pt, pg)) = prev {
            if (pg > 0.0) != (g > 0.0) {
                bracket = Some((pt, t, pg > 0.0));
                break;
            }
        }
        prev = Some((t, g));
    }
    let Some((mut a, mut b, a_positive)) = bracket else {
        return Ok(None);
    };
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let g = branch_gap(j, mid, search)?;
        if (g > 0.0) == a_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    let theta = 0.5 * (a + b);
    Ok(Some(Transition { theta, offset_from_pi: PI - theta }))
}

/// Branch transition for `j ∈ {1/2, 1}` with the default search, to 1e-5.
pub fn locate_transition(j: HalfInteger) -> Result<Option<Transition>> {
    locate_transition_with(j, CovariantSearch { grid: 40, restarts: 2, seed: 0 }, 24, 1e-5)
}
