//! Exact algebra of Gaussian wavepackets and their superpositions.
//!
//! A packet is stored as centre, complex width parameter, momentum and phase,
//!
//! ```text
//!   psi(x) = n * exp(-(x - centre)^2 / (2 w) + i k x + i phi),
//! ```
//!
//! with `Re(w) > 0` and the real normalization constant
//! `n = (Re(1/w)/pi)^(1/4)` implied. Keeping the width complex makes free
//! evolution closed under the representation: `w -> w + i t/m`.
//!
//! Superpositions never assume branch orthogonality; norms, traces and
//! purities all go through the Gram matrix of pairwise branch overlaps.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Particle masses, one per body, all strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassConfig {
    masses: Vec<f64>,
}

impl MassConfig {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::Contract("at least one mass required"));
        }
        if masses.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::Contract("all masses must be strictly positive and finite"));
        }
        Ok(MassConfig { masses })
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Total mass `M = sum_i m_i`.
    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Reduced mass `m_i m_j / (m_i + m_j)`.
    pub fn reduced(&self, i: usize, j: usize) -> f64 {
        let (mi, mj) = (self.masses[i], self.masses[j]);
        mi * mj / (mi + mj)
    }
}

/// A single normalized complex Gaussian wavepacket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub centre: f64,
    pub width_param: Complex64,
    pub momentum: f64,
    pub phase: f64,
}

impl GaussianPacket {
    pub fn new(centre: f64, width_param: Complex64, momentum: f64, phase: f64) -> Result<Self> {
        if !(width_param.re > 0.0) {
            return Err(Error::NonNormalizable { re_width: width_param.re });
        }
        Ok(GaussianPacket { centre, width_param, momentum, phase })
    }

    /// Real-width packet `exp(-(x-c)^2/(2 Delta^2))` at rest.
    pub fn real_width(centre: f64, delta: f64) -> Result<Self> {
        GaussianPacket::new(centre, Complex64::new(delta * delta, 0.0), 0.0, 0.0)
    }

    /// Minimum-uncertainty packet with position standard deviation `sigma_x`.
    pub fn from_sigma(centre: f64, sigma_x: f64, momentum: f64) -> Result<Self> {
        GaussianPacket::new(centre, Complex64::new(2.0 * sigma_x * sigma_x, 0.0), momentum, 0.0)
    }

    /// The implied L2 normalization constant `(Re(1/w)/pi)^(1/4)`.
    pub fn norm_constant(&self) -> f64 {
        let re_inv_w = (1.0 / self.width_param).re;
        libm::sqrt(libm::sqrt(re_inv_w / core::f64::consts::PI))
    }

    /// Position standard deviation of `|psi|^2`.
    pub fn sigma(&self) -> f64 {
        let re_inv_w = (1.0 / self.width_param).re;
        libm::sqrt(1.0 / (2.0 * re_inv_w))
    }

    /// Pointwise wavefunction value.
    pub fn eval(&self, x: f64) -> Complex64 {
        let d = Complex64::new(x - self.centre, 0.0);
        let exponent = -d * d / (2.0 * self.width_param) + I * (self.momentum * x + self.phase);
        self.norm_constant() * exponent.exp()
    }

    /// Closed-form overlap `<self|other>` (self is the bra).
    pub fn overlap(&self, other: &GaussianPacket) -> Complex64 {
        let w1c = self.width_param.conj();
        let w2 = other.width_param;
        let (c1, c2) = (self.centre, other.centre);
        let a = 0.5 / w1c + 0.5 / w2;
        let b = c1 / w1c + c2 / w2 + I * (other.momentum - self.momentum);
        let c0 = -c1 * c1 / (2.0 * w1c) - c2 * c2 / (2.0 * w2);
        let pi = Complex64::new(core::f64::consts::PI, 0.0);
        let pref = self.norm_constant() * other.norm_constant();
        pref * (pi / a).sqrt()
            * (b * b / (4.0 * a) + c0 + I * (other.phase - self.phase)).exp()
    }

    /// Evolve under the free Hamiltonian `p^2/2m` for time `t`.
    ///
    /// The representation is closed: width gains `i t/m`, the centre drifts
    /// ballistically, and the exact propagator phase is folded into `phase`.
    pub fn evolved(&self, t: f64, mass: f64) -> GaussianPacket {
        let w = self.width_param;
        let wt = w + I * (t / mass);
        let k = self.momentum;
        // Amplitude ratio between the exact propagated Gaussian and the
        // canonically re-normalized one is a pure phase: arg(sqrt(w/wt)).
        let phase = self.phase - k * k * t / (2.0 * mass) + 0.5 * (w / wt).arg();
        GaussianPacket {
            centre: self.centre + k * t / mass,
            width_param: wt,
            momentum: k,
            phase,
        }
    }

    /// Apply the single-coordinate displacement `exp(i(dk x - dx p))`
    /// (symmetric Weyl ordering).
    pub fn shifted(&self, dx: f64, dk: f64) -> GaussianPacket {
        GaussianPacket {
            centre: self.centre + dx,
            width_param: self.width_param,
            momentum: self.momentum + dk,
            phase: self.phase - self.momentum * dx - 0.5 * dk * dx,
        }
    }
}

/// Overlap `<g1|g2>` of two normalized packets.
pub fn packet_overlap(g1: &GaussianPacket, g2: &GaussianPacket) -> Result<Complex64> {
    if !(g1.width_param.re > 0.0) {
        return Err(Error::NonNormalizable { re_width: g1.width_param.re });
    }
    if !(g2.width_param.re > 0.0) {
        return Err(Error::NonNormalizable { re_width: g2.width_param.re });
    }
    Ok(g1.overlap(g2))
}

/// Which coordinate system the packets of a state live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordinateTag {
    /// Per-particle laboratory positions.
    Lab,
    /// Centre of mass plus relative positions `x_{r_k} = x_k - x_1`.
    CmRelativeX,
    /// Centre of mass plus the positions conjugate to the relative momenta.
    CmRelativeQ,
}

/// One branch of a superposition: an amplitude times a product of packets,
/// one per particle (or per coordinate after a transform).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub amplitude: Complex64,
    pub packets: Vec<GaussianPacket>,
}

/// Finite superposition of products of Gaussian packets over N particles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperposedState {
    masses: MassConfig,
    branches: Vec<Branch>,
    coordinate_tag: CoordinateTag,
}

impl SuperposedState {
    pub fn new(
        masses: MassConfig,
        branches: Vec<Branch>,
        coordinate_tag: CoordinateTag,
    ) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::Contract("state needs at least one branch"));
        }
        let n = masses.len();
        for b in &branches {
            if b.packets.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: b.packets.len() });
            }
        }
        Ok(SuperposedState { masses, branches, coordinate_tag })
    }

    /// Construct from `(amplitude, packets)` pairs in lab coordinates.
    pub fn lab(masses: MassConfig, branches: Vec<Branch>) -> Result<Self> {
        SuperposedState::new(masses, branches, CoordinateTag::Lab)
    }

    pub fn masses(&self) -> &MassConfig {
        &self.masses
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn coordinate_tag(&self) -> CoordinateTag {
        self.coordinate_tag
    }

    pub fn n_coords(&self) -> usize {
        self.masses.len()
    }

    pub(crate) fn with_branches(&self, branches: Vec<Branch>, tag: CoordinateTag) -> Self {
        SuperposedState { masses: self.masses.clone(), branches, coordinate_tag: tag }
    }

    /// Squared norm computed through the Gram matrix.
    pub fn norm_sq(&self) -> f64 {
        let g = self.gram();
        let mut s = Complex64::new(0.0, 0.0);
        for (i, bi) in self.branches.iter().enumerate() {
            for (j, bj) in self.branches.iter().enumerate() {
                s += bi.amplitude.conj() * bj.amplitude * g[i][j];
            }
        }
        s.re
    }

    /// Gram matrix of branch overlaps, `g[i][j] = <branch_i|branch_j>`.
    pub fn gram(&self) -> Vec<Vec<Complex64>> {
        let n = self.branches.len();
        let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut ov = Complex64::new(1.0, 0.0);
                for (pi, pj) in self.branches[i].packets.iter().zip(&self.branches[j].packets) {
                    ov *= pi.overlap(pj);
                }
                g[i][j] = ov;
                g[j][i] = ov.conj();
            }
        }
        g
    }

    /// Translate every coordinate by `d` (Galilean translation in the lab).
    pub fn translated(&self, d: f64) -> SuperposedState {
        let branches = self
            .branches
            .iter()
            .map(|b| Branch {
                amplitude: b.amplitude,
                packets: b
                    .packets
                    .iter()
                    .map(|p| GaussianPacket { centre: p.centre + d, ..*p })
                    .collect(),
            })
            .collect();
        self.with_branches(branches, self.coordinate_tag)
    }

    /// Boost every particle by velocity `v` (lab coordinates only).
    pub fn boosted(&self, v: f64) -> Result<SuperposedState> {
        if self.coordinate_tag != CoordinateTag::Lab {
            return Err(Error::Contract("boost is defined on lab-coordinate states"));
        }
        let branches = self
            .branches
            .iter()
            .map(|b| Branch {
                amplitude: b.amplitude,
                packets: b
                    .packets
                    .iter()
                    .enumerate()
                    .map(|(j, p)| GaussianPacket {
                        momentum: p.momentum + self.masses.mass(j) * v,
                        ..*p
                    })
                    .collect(),
            })
            .collect();
        Ok(self.with_branches(branches, self.coordinate_tag))
    }
}

/// Inner product `<bra|ket>` of two states over the same coordinates.
pub fn state_inner(bra: &SuperposedState, ket: &SuperposedState) -> Result<Complex64> {
    if bra.n_coords() != ket.n_coords() {
        return Err(Error::DimensionMismatch { expected: bra.n_coords(), found: ket.n_coords() });
    }
    let mut s = Complex64::new(0.0, 0.0);
    for bi in bra.branches() {
        for kj in ket.branches() {
            let mut ov = Complex64::new(1.0, 0.0);
            for (p, q) in bi.packets.iter().zip(&kj.packets) {
                ov *= p.overlap(q);
            }
            s += bi.amplitude.conj() * kj.amplitude * ov;
        }
    }
    Ok(s)
}

/// Normalize a state through its Gram matrix; returns the rescaled state and
/// the Gram matrix itself.
pub fn gram_and_normalize(
    state: &SuperposedState,
) -> Result<(SuperposedState, Vec<Vec<Complex64>>)> {
    let g = state.gram();
    let mut norm_sq = Complex64::new(0.0, 0.0);
    for (i, bi) in state.branches.iter().enumerate() {
        for (j, bj) in state.branches.iter().enumerate() {
            norm_sq += bi.amplitude.conj() * bj.amplitude * g[i][j];
        }
    }
    let norm_sq = norm_sq.re;
    if !(norm_sq > 1e-300) {
        return Err(Error::DegenerateState);
    }
    let scale = 1.0 / libm::sqrt(norm_sq);
    let branches = state
        .branches
        .iter()
        .map(|b| Branch { amplitude: b.amplitude * scale, packets: b.packets.clone() })
        .collect();
    Ok((state.with_branches(branches, state.coordinate_tag), g))
}

/// Evolve a lab-coordinate state under `H = sum_i p_i^2 / 2 m_i`.
pub fn evolve_free(state: &SuperposedState, t: f64) -> Result<SuperposedState> {
    if state.coordinate_tag != CoordinateTag::Lab {
        return Err(Error::Contract("free evolution is defined on lab-coordinate states"));
    }
    if t < 0.0 {
        return Err(Error::Contract("evolution time must be non-negative"));
    }
    let branches = state
        .branches
        .iter()
        .map(|b| Branch {
            amplitude: b.amplitude,
            packets: b
                .packets
                .iter()
                .enumerate()
                .map(|(j, p)| p.evolved(t, state.masses.mass(j)))
                .collect(),
        })
        .collect();
    Ok(state.with_branches(branches, state.coordinate_tag))
}

/// Multi-coordinate Weyl displacement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylShift {
    pub position_shifts: Vec<f64>,
    pub momentum_boosts: Vec<f64>,
    pub global_phase: f64,
}

impl WeylShift {
    pub fn new(position_shifts: Vec<f64>, momentum_boosts: Vec<f64>, global_phase: f64) -> Result<Self> {
        if position_shifts.len() != momentum_boosts.len() {
            return Err(Error::DimensionMismatch {
                expected: position_shifts.len(),
                found: momentum_boosts.len(),
            });
        }
        Ok(WeylShift { position_shifts, momentum_boosts, global_phase })
    }

    /// Pure position shifts, `prod_j exp(-i d_j p_j)`.
    pub fn translation(shifts: Vec<f64>) -> Self {
        let n = shifts.len();
        WeylShift { position_shifts: shifts, momentum_boosts: vec![0.0; n], global_phase: 0.0 }
    }

    pub fn inverse(&self) -> WeylShift {
        WeylShift {
            position_shifts: self.position_shifts.iter().map(|d| -d).collect(),
            momentum_boosts: self.momentum_boosts.iter().map(|b| -b).collect(),
            global_phase: -self.global_phase,
        }
    }

    pub fn len(&self) -> usize {
        self.position_shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position_shifts.is_empty()
    }
}

/// Apply a Weyl shift coordinate by coordinate; unitary by construction.
pub fn apply_weyl(state: &SuperposedState, shift: &WeylShift) -> Result<SuperposedState> {
    if shift.len() != state.n_coords() {
        return Err(Error::DimensionMismatch { expected: state.n_coords(), found: shift.len() });
    }
    let phase = Complex64::from_polar(1.0, shift.global_phase);
    let branches = state
        .branches
        .iter()
        .map(|b| Branch {
            amplitude: b.amplitude * phase,
            packets: b
                .packets
                .iter()
                .enumerate()
                .map(|(j, p)| p.shifted(shift.position_shifts[j], shift.momentum_boosts[j]))
                .collect(),
        })
        .collect();
    Ok(state.with_branches(branches, state.coordinate_tag))
}
