//! Angular-momentum algebra: half-integer quantum numbers, spin matrices,
//! rotations, spin coherent states and total-spin decompositions of
//! two-spin product spaces.
//!
//! Basis ordering is fixed throughout the crate: index `i` of a spin-`j`
//! space holds the state with magnetic number `m = j - i` (descending).

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_exp, CMatrix, CVector, I};

/// Largest single-spin dimension `2j+1` the toolkit will build.
pub const MAX_DIM: usize = 2001;

/// A half-integer quantum number stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInteger {
    doubled: i64,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { doubled: 0 };
    pub const HALF: HalfInteger = HalfInteger { doubled: 1 };
    pub const ONE: HalfInteger = HalfInteger { doubled: 2 };

    pub const fn from_doubled(doubled: i64) -> Self {
        HalfInteger { doubled }
    }

    /// A spin quantum number; rejects negative values.
    pub fn spin(doubled: i64) -> Result<Self> {
        if doubled < 0 {
            return Err(Error::InvalidSpin(format!("{}", HalfInteger { doubled })));
        }
        Ok(HalfInteger { doubled })
    }

    pub fn from_f64(value: f64) -> Result<Self> {
        let doubled = (2.0 * value).round();
        if (2.0 * value - doubled).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("{value} is not a half-integer")));
        }
        Ok(HalfInteger { doubled: doubled as i64 })
    }

    pub const fn doubled(self) -> i64 {
        self.doubled
    }

    pub fn value(self) -> f64 {
        self.doubled as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.doubled % 2 == 0
    }

    /// `2j + 1` for a spin `j`.
    pub fn dim(self) -> usize {
        debug_assert!(self.doubled >= 0);
        (self.doubled + 1) as usize
    }

    /// `j(j+1)`.
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }

    /// Magnetic numbers `j, j-1, ..., -j` in basis order.
    pub fn magnetic_numbers(self) -> impl Iterator<Item = HalfInteger> {
        let d = self.doubled;
        (0..=d).map(move |i| HalfInteger { doubled: d - 2 * i })
    }

    /// Basis index of magnetic number `m` in a spin-`self` space.
    pub fn index_of(self, m: HalfInteger) -> Result<usize> {
        let diff = self.doubled - m.doubled;
        if m.doubled.abs() > self.doubled || diff % 2 != 0 {
            return Err(Error::InvalidMagnetic { j: self.to_string(), m: m.to_string() });
        }
        Ok((diff / 2) as usize)
    }

    /// Magnetic number stored at basis index `i`.
    pub fn magnetic_at(self, i: usize) -> HalfInteger {
        HalfInteger { doubled: self.doubled - 2 * i as i64 }
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.doubled % 2 == 0 {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

impl FromStr for HalfInteger {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(num) = s.strip_suffix("/2") {
            let doubled: i64 = num
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse half-integer '{s}'")))?;
            return Ok(HalfInteger { doubled });
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(HalfInteger { doubled: 2 * n });
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("cannot parse half-integer '{s}'")))?;
        HalfInteger::from_f64(v)
    }
}

impl Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: Self) -> Self {
        HalfInteger { doubled: self.doubled + rhs.doubled }
    }
}

impl Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: Self) -> Self {
        HalfInteger { doubled: self.doubled - rhs.doubled }
    }
}

impl Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> Self {
        HalfInteger { doubled: -self.doubled }
    }
}

fn check_dim(j: HalfInteger) -> Result<usize> {
    if j.doubled() < 0 {
        return Err(Error::InvalidSpin(j.to_string()));
    }
    let dim = j.dim();
    if dim > MAX_DIM {
        return Err(Error::DimensionCap { dim, cap: MAX_DIM });
    }
    Ok(dim)
}

/// A unit vector in three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    nx: f64,
    ny: f64,
    nz: f64,
}

impl Direction {
    pub const UNIT_TOL: f64 = 1e-14;

    pub fn new(nx: f64, ny: f64, nz: f64) -> Result<Self> {
        let norm = (nx * nx + ny * ny + nz * nz).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > Self::UNIT_TOL {
            return Err(Error::InvalidDirection(nx, ny, nz));
        }
        Ok(Direction { nx, ny, nz })
    }

    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidDirection(x, y, z));
        }
        Ok(Direction { nx: x / norm, ny: y / norm, nz: z / norm })
    }

    /// Unit vector with polar angle `polar` from +z and azimuth `azimuth`.
    pub fn from_spherical(polar: f64, azimuth: f64) -> Self {
        let (sp, cp) = polar.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        Direction { nx: sp * ca, ny: sp * sa, nz: cp }
    }

    pub const fn x() -> Self {
        Direction { nx: 1.0, ny: 0.0, nz: 0.0 }
    }
    pub const fn y() -> Self {
        Direction { nx: 0.0, ny: 1.0, nz: 0.0 }
    }
    pub const fn z() -> Self {
        Direction { nx: 0.0, ny: 0.0, nz: 1.0 }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.nx * other.nx + self.ny * other.ny + self.nz * other.nz
    }

    pub fn polar(&self) -> f64 {
        self.nz.clamp(-1.0, 1.0).acos()
    }

    pub fn azimuth(&self) -> f64 {
        self.ny.atan2(self.nx)
    }

    /// Apply the rotation of angle `angle` about `axis` (right-hand rule).
    pub fn rotated(&self, axis: &Direction, angle: f64) -> Direction {
        let (s, co) = angle.sin_cos();
        let k = axis.components();
        let v = self.components();
        let kv = axis.dot(self);
        let cross = [k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2], k[0] * v[1] - k[1] * v[0]];
        let r: Vec<f64> = (0..3).map(|i| v[i] * co + cross[i] * s + k[i] * kv * (1.0 - co)).collect();
        // re-normalize to absorb rounding
        Direction::normalized(r[0], r[1], r[2]).expect("rotation preserves the norm")
    }

    /// The rotation `g(n)` carrying +z onto this direction, as (axis, angle).
    ///
    /// The axis is `ẑ × n` normalized and the angle is the polar angle. For
    /// `n = +ẑ` the rotation is the identity, for `n = -ẑ` it is a rotation
    /// by π about x̂.
    pub fn section_rotation(&self) -> (Direction, f64) {
        let polar = self.polar();
        let azimuth = self.section_azimuth();
        let axis = Direction { nx: -azimuth.sin(), ny: azimuth.cos(), nz: 0.0 };
        (axis, polar)
    }

    // Azimuth used by the section g(n); -π/2 on the south pole so the axis is x̂.
    fn section_azimuth(&self) -> f64 {
        if self.nx == 0.0 && self.ny == 0.0 && self.nz < 0.0 {
            -std::f64::consts::FRAC_PI_2
        } else {
            self.azimuth()
        }
    }
}

/// A normalized pure state in a spin-`j` space, basis `m = j, ..., -j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {norm} differs from 1")));
        }
        Ok(StateVector { amplitudes })
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(StateVector { amplitudes: amplitudes / c(norm) })
    }

    /// The basis state `|j, m⟩`.
    pub fn basis(j: HalfInteger, m: HalfInteger) -> Result<Self> {
        let dim = check_dim(j)?;
        let idx = j.index_of(m)?;
        let mut v = CVector::zeros(dim);
        v[idx] = c(1.0);
        Ok(StateVector { amplitudes: v })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.overlap(other).norm_sqr()
    }

    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        let v = op * &self.amplitudes;
        self.amplitudes.dotc(&v)
    }

    pub fn apply(&self, op: &CMatrix) -> Result<StateVector> {
        if op.ncols() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), got: op.ncols() });
        }
        StateVector::new(op * &self.amplitudes)
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// `(J_x, J_y, J_z)` for a spin `j`, in units of ħ.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub j: HalfInteger,
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
}

impl SpinOperators {
    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    /// `n · J`.
    pub fn along(&self, n: &Direction) -> CMatrix {
        let [nx, ny, nz] = n.components();
        &self.jx * c(nx) + &self.jy * c(ny) + &self.jz * c(nz)
    }

    /// `J_+ = J_x + i J_y`.
    pub fn raising(&self) -> CMatrix {
        &self.jx + &self.jy * I
    }

    pub fn lowering(&self) -> CMatrix {
        &self.jx - &self.jy * I
    }

    /// `J_x² + J_y² + J_z²`.
    pub fn casimir(&self) -> CMatrix {
        &self.jx * &self.jx + &self.jy * &self.jy + &self.jz * &self.jz
    }
}

/// Builds the spin matrices from the ladder elements
/// `⟨m+1|J_+|m⟩ = √(j(j+1) − m(m+1))`.
pub fn make_spin_operators(j: HalfInteger) -> Result<SpinOperators> {
    let dim = check_dim(j)?;
    let jj = j.casimir();
    let mut jx = CMatrix::zeros(dim, dim);
    let mut jy = CMatrix::zeros(dim, dim);
    let mut jz = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let m = j.magnetic_at(i).value();
        jz[(i, i)] = c(m);
        if i + 1 < dim {
            // J_+ maps index i+1 (m-1) to index i (m)
            let lower = m - 1.0;
            let amp = (jj - lower * (lower + 1.0)).sqrt();
            jx[(i, i + 1)] = c(0.5 * amp);
            jx[(i + 1, i)] = c(0.5 * amp);
            jy[(i, i + 1)] = Complex64::new(0.0, -0.5 * amp);
            jy[(i + 1, i)] = Complex64::new(0.0, 0.5 * amp);
        }
    }
    Ok(SpinOperators { j, jx, jy, jz })
}

/// `exp(−i · angle · n·J)`.
///
/// Non-unit axes cannot reach this function: [`Direction`] validates on
/// construction.
pub fn rotation_unitary(ops: &SpinOperators, n: &Direction, angle: f64) -> CMatrix {
    hermitian_exp(&ops.along(n), angle)
}

/// The spin coherent state `U_{g(n)} |j, j⟩` for the section `g(n)` of
/// [`Direction::section_rotation`].
///
/// Amplitudes come from the `m' = j` column of the Wigner small-d matrix,
/// `⟨m|U|j⟩ = e^{iφ(j−m)} √C(2j, j−m) cos^{j+m}(β/2) sin^{j−m}(β/2)`,
/// evaluated in log space so large spins do not overflow.
pub fn spin_coherent_state(j: HalfInteger, n: &Direction) -> Result<StateVector> {
    if j.doubled() < 1 {
        return Err(Error::InvalidSpin(j.to_string()));
    }
    let dim = check_dim(j)?;
    let two_j = j.doubled() as usize;
    let beta = n.polar();
    let phi = n.section_azimuth();
    let (half_sin, half_cos) = (0.5 * beta).sin_cos();
    let (ln_c, ln_s) = (half_cos.abs().ln(), half_sin.abs().ln());

    let mut amps = CVector::zeros(dim);
    let mut ln_binom = 0.0; // ln C(2j, i)
    for i in 0..dim {
        // i = j − m; exponents j+m = 2j − i and j−m = i
        let p_cos = (two_j - i) as i32;
        let p_sin = i as i32;
        let mut ln_mag = 0.5 * ln_binom;
        let mut zero = false;
        for (p, l) in [(p_cos, ln_c), (p_sin, ln_s)] {
            if p > 0 {
                if l == f64::NEG_INFINITY {
                    zero = true;
                } else {
                    ln_mag += p as f64 * l;
                }
            }
        }
        if !zero {
            let mut mag = ln_mag.exp();
            // sign of cos(β/2), sin(β/2) is non-negative for β ∈ [0, π]
            if half_cos < 0.0 && p_cos % 2 == 1 {
                mag = -mag;
            }
            amps[i] = Complex64::from_polar(mag, phi * i as f64);
        }
        if i < two_j {
            ln_binom += ((two_j - i) as f64).ln() - ((i + 1) as f64).ln();
        }
    }
    StateVector::normalized(amps)
}

/// One vector of the coupled basis `|l, M⟩` of `j1 ⊗ j2`, stored on its
/// fixed-`M` sector of product states `|m1⟩|m2⟩` with `m1 + m2 = M`.
#[derive(Debug, Clone)]
pub struct CoupledState {
    pub l: HalfInteger,
    pub m: HalfInteger,
    i1_start: usize,
    coefs: Vec<f64>,
    d2: usize,
    sector: usize,
}

impl CoupledState {
    /// Non-zero-support entries as `(product_index, coefficient)`, where the
    /// product index is `i1 * (2 j2 + 1) + i2` (first factor slow).
    pub fn components(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coefs.iter().enumerate().map(move |(k, &v)| {
            let i1 = self.i1_start + k;
            let i2 = self.sector - i1;
            (i1 * self.d2 + i2, v)
        })
    }

    fn coefficient_at_i1(&self, i1: usize) -> f64 {
        if i1 < self.i1_start {
            return 0.0;
        }
        self.coefs.get(i1 - self.i1_start).copied().unwrap_or(0.0)
    }
}

/// The decomposition of `j1 ⊗ j2` into total-spin blocks, with real
/// Clebsch-Gordan coefficients in the Condon-Shortley convention.
#[derive(Debug, Clone)]
pub struct CoupledBasis {
    pub j1: HalfInteger,
    pub j2: HalfInteger,
    /// `(l, [|l, l⟩, |l, l−1⟩, ..., |l, −l⟩])`, `l` descending.
    blocks: Vec<(HalfInteger, Vec<CoupledState>)>,
}

impl CoupledBasis {
    /// Highest-weight construction: `|l, l⟩` is the unit vector of the
    /// `M = l` sector orthogonal to every `|l', l⟩` with `l' > l` (sign fixed
    /// by a positive `m1 = j1` component), and the rest of the multiplet
    /// follows by repeated lowering.
    pub fn new(j1: HalfInteger, j2: HalfInteger) -> Result<Self> {
        let d1 = check_dim(j1)?;
        let d2 = check_dim(j2)?;
        let l_max = j1 + j2;
        let l_min = HalfInteger::from_doubled((j1.doubled() - j2.doubled()).abs());
        let jj1 = j1.casimir();
        let jj2 = j2.casimir();

        let sector_range = |s: usize| -> (usize, usize) {
            let lo = s.saturating_sub(d2 - 1);
            let hi = s.min(d1 - 1);
            (lo, hi)
        };

        let mut blocks: Vec<(HalfInteger, Vec<CoupledState>)> = Vec::new();
        let mut l = l_max;
        while l >= l_min {
            let s0 = ((l_max.doubled() - l.doubled()) / 2) as usize;
            let (lo, hi) = sector_range(s0);
            let len = hi - lo + 1;

            // m1 = j1 always lies in the highest-weight sector, so lo == 0
            let mut v = vec![0.0; len];
            v[0] = 1.0;
            for _pass in 0..2 {
                for (lp, states) in &blocks {
                    let idx = ((lp.doubled() - l.doubled()) / 2) as usize;
                    let prev = &states[idx];
                    let dot: f64 = (0..len).map(|k| v[k] * prev.coefficient_at_i1(lo + k)).sum();
                    for (k, vk) in v.iter_mut().enumerate() {
                        *vk -= dot * prev.coefficient_at_i1(lo + k);
                    }
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "degenerate highest-weight sector for l={l} in {j1}⊗{j2}"
                )));
            }
            v.iter_mut().for_each(|x| *x /= norm);

            let mut states = Vec::with_capacity(l.dim());
            let mut current = CoupledState { l, m: l, i1_start: lo, coefs: v, d2, sector: s0 };
            loop {
                let m = current.m;
                if m.doubled() == -l.doubled() {
                    states.push(current);
                    break;
                }
                let s = current.sector + 1;
                let (nlo, nhi) = sector_range(s);
                let mut next = vec![0.0; nhi - nlo + 1];
                for (k, &coef) in current.coefs.iter().enumerate() {
                    let i1 = current.i1_start + k;
                    let i2 = current.sector - i1;
                    if i1 + 1 < d1 {
                        let m1 = j1.magnetic_at(i1).value();
                        next[i1 + 1 - nlo] += coef * (jj1 - m1 * (m1 - 1.0)).sqrt();
                    }
                    if i2 + 1 < d2 {
                        let m2 = j2.magnetic_at(i2).value();
                        next[i1 - nlo] += coef * (jj2 - m2 * (m2 - 1.0)).sqrt();
                    }
                }
                let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
                next.iter_mut().for_each(|x| *x /= norm);
                let lowered = CoupledState {
                    l,
                    m: m - HalfInteger::ONE,
                    i1_start: nlo,
                    coefs: next,
                    d2,
                    sector: s,
                };
                states.push(std::mem::replace(&mut current, lowered));
            }
            blocks.push((l, states));
            l = l - HalfInteger::ONE;
        }
        Ok(CoupledBasis { j1, j2, blocks })
    }

    pub fn dim(&self) -> usize {
        self.j1.dim() * self.j2.dim()
    }

    /// Total spins present, descending.
    pub fn total_spins(&self) -> impl Iterator<Item = HalfInteger> + '_ {
        self.blocks.iter().map(|(l, _)| *l)
    }

    pub fn states(&self, l: HalfInteger) -> Option<&[CoupledState]> {
        self.blocks.iter().find(|(lb, _)| *lb == l).map(|(_, s)| s.as_slice())
    }

    /// `⟨j1 m1; j2 m2 | l m⟩`.
    pub fn clebsch_gordan(&self, m1: HalfInteger, m2: HalfInteger, l: HalfInteger, m: HalfInteger) -> f64 {
        if m1 + m2 != m {
            return 0.0;
        }
        let (Ok(i1), Ok(_)) = (self.j1.index_of(m1), self.j2.index_of(m2)) else {
            return 0.0;
        };
        let Some(states) = self.states(l) else { return 0.0 };
        let Ok(idx) = l.index_of(m) else { return 0.0 };
        states[idx].coefficient_at_i1(i1)
    }

    /// `Σ_l w(l) P_l` as a dense matrix.
    pub fn block_sum(&self, weight: impl Fn(HalfInteger) -> Complex64) -> CMatrix {
        let dim = self.dim();
        let mut out = CMatrix::zeros(dim, dim);
        for (l, states) in &self.blocks {
            let w = weight(*l);
            for st in states {
                let comps: Vec<(usize, f64)> = st.components().collect();
                for &(a, va) in &comps {
                    for &(b, vb) in &comps {
                        out[(a, b)] += w * (va * vb);
                    }
                }
            }
        }
        out
    }

    /// Projector onto total spin `l` (zero matrix if `l` does not occur).
    pub fn projector(&self, l: HalfInteger) -> CMatrix {
        self.block_sum(|lb| if lb == l { c(1.0) } else { c(0.0) })
    }
}

/// Projectors `P_l` onto the irreducible blocks of `j1 ⊗ j2`, `l` from
/// `j1 + j2` down to `|j1 − j2|`.
pub fn total_spin_projectors(j1: HalfInteger, j2: HalfInteger) -> Result<Vec<(HalfInteger, CMatrix)>> {
    let basis = CoupledBasis::new(j1, j2)?;
    Ok(basis.total_spins().map(|l| (l, basis.projector(l))).collect())
}
