//! Partial traces, reduced-density diagnostics and Weyl shift expectations.
//!
//! Everything here stays in closed form: a reduced density operator is a
//! finite sum of ket-bra pairs of Gaussian packets, so traces, purities and
//! coherences are sums of pairwise overlaps. Position grids appear only when
//! rendering a fringe profile.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::canon::LinearPhaseSpaceForm;
use crate::packets::{
    apply_weyl, gram_and_normalize, state_inner, GaussianPacket, SuperposedState, WeylShift,
};

/// One ket-bra contribution `coeff * |ket><bra|` over a single coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureTerm {
    pub coeff: Complex64,
    pub ket: GaussianPacket,
    pub bra: GaussianPacket,
}

/// Reduced density operator over one retained coordinate, as a finite sum of
/// Gaussian ket-bra pairs. Hermitian by construction: terms come in
/// conjugate pairs (or are self-paired).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixtureOperator {
    terms: Vec<MixtureTerm>,
    trace_value: Complex64,
}

impl GaussianMixtureOperator {
    /// Build from raw terms, rescaling so the trace is exactly one.
    pub fn new(terms: Vec<MixtureTerm>) -> Result<Self> {
        let terms: Vec<MixtureTerm> = terms
            .into_iter()
            .filter(|t| t.coeff != Complex64::new(0.0, 0.0))
            .collect();
        if terms.is_empty() {
            return Err(Error::DegenerateState);
        }
        let trace: Complex64 = terms.iter().map(|t| t.coeff * t.bra.overlap(&t.ket)).sum();
        if !(trace.re > 1e-300) {
            return Err(Error::DegenerateState);
        }
        let scale = 1.0 / trace.re;
        let terms = terms
            .into_iter()
            .map(|t| MixtureTerm { coeff: t.coeff * scale, ..t })
            .collect::<Vec<_>>();
        let trace_value: Complex64 = terms.iter().map(|t| t.coeff * t.bra.overlap(&t.ket)).sum();
        Ok(GaussianMixtureOperator { terms, trace_value })
    }

    pub fn terms(&self) -> &[MixtureTerm] {
        &self.terms
    }

    pub fn trace(&self) -> Complex64 {
        self.trace_value
    }

    /// Kernel value `rho(x, x')`.
    pub fn eval(&self, x: f64, x_prime: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * t.ket.eval(x) * t.bra.eval(x_prime).conj())
            .sum()
    }

    /// Diagonal `rho(x, x)`; the physical position density.
    pub fn density(&self, x: f64) -> f64 {
        self.eval(x, x).re
    }
}

/// Trace out all coordinates except those in `keep` (currently exactly one).
pub fn partial_trace(state: &SuperposedState, keep: &[usize]) -> Result<GaussianMixtureOperator> {
    let n = state.n_coords();
    if keep.is_empty() || keep.len() == n {
        return Err(Error::Contract("keep set must be a proper non-empty subset of coordinates"));
    }
    if keep.len() != 1 {
        return Err(Error::Unsupported("multi-coordinate retention reserved"));
    }
    let kept = keep[0];
    if kept >= n {
        return Err(Error::DimensionMismatch { expected: n, found: kept });
    }
    let (state, _) = gram_and_normalize(state)?;
    let mut terms = Vec::new();
    for bi in state.branches() {
        for bj in state.branches() {
            let mut coeff = bi.amplitude * bj.amplitude.conj();
            for coord in 0..n {
                if coord == kept {
                    continue;
                }
                // <packet_j | packet_i> over each traced coordinate.
                coeff *= bj.packets[coord].overlap(&bi.packets[coord]);
            }
            terms.push(MixtureTerm { coeff, ket: bi.packets[kept], bra: bj.packets[kept] });
        }
    }
    GaussianMixtureOperator::new(terms)
}

/// `Tr(rho^2)` via closed-form overlaps.
pub fn purity(rho: &GaussianMixtureOperator) -> f64 {
    let mut s = Complex64::new(0.0, 0.0);
    for t in rho.terms() {
        for u in rho.terms() {
            // Tr(|k_t><b_t| |k_u><b_u|) = <b_t|k_u> <b_u|k_t>.
            s += t.coeff * u.coeff * t.bra.overlap(&u.ket) * u.bra.overlap(&t.ket);
        }
    }
    s.re
}

/// `<state| exp(-i * displacement * form) |state>` for a momentum-only or
/// position-only linear form, computed exactly through per-coordinate Weyl
/// shifts.
pub fn expectation_weyl(
    state: &SuperposedState,
    form: &LinearPhaseSpaceForm,
    displacement: f64,
) -> Result<Complex64> {
    if form.len() != state.n_coords() {
        return Err(Error::DimensionMismatch { expected: state.n_coords(), found: form.len() });
    }
    let shift = if form.is_momentum_only() {
        // exp(-i d sum_j f_j p_j) factorizes into per-coordinate translations.
        WeylShift::translation(form.p_coeffs.iter().map(|f| displacement * f).collect())
    } else if form.is_position_only() {
        let boosts: Vec<f64> = form.x_coeffs.iter().map(|f| -displacement * f).collect();
        let n = boosts.len();
        WeylShift::new(alloc::vec![0.0; n], boosts, 0.0)?
    } else {
        return Err(Error::Unsupported("mixed position/momentum forms are not factorized"));
    };
    let shifted = apply_weyl(state, &shift)?;
    state_inner(state, &shifted)
}

/// Sampling grid request for [`fringe_profile`]. Unset fields are derived
/// from the operator: centre at the intensity mean, extent covering eight
/// envelope sigmas and every packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: usize,
    pub extent: Option<f64>,
    pub centre: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { points: 2048, extent: None, centre: None }
    }
}

/// Sampled position density with its grid metadata and intensity moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeProfile {
    pub positions: Vec<f64>,
    pub intensity: Vec<f64>,
    pub centre: f64,
    pub extent: f64,
    pub points: usize,
    /// Mean of the intensity distribution.
    pub mean: f64,
    /// Standard deviation of the intensity distribution (envelope scale).
    pub envelope_sigma: f64,
}

/// First three moments of `integral ket(x) conj(bra(x)) x^n dx`, n = 0, 1, 2.
fn pair_moments(ket: &GaussianPacket, bra: &GaussianPacket) -> (Complex64, Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let wk = ket.width_param;
    let wb = bra.width_param.conj();
    let a = 0.5 / wk + 0.5 / wb;
    let b = ket.centre / wk + bra.centre / wb + i * (ket.momentum - bra.momentum);
    let c0 = -ket.centre * ket.centre / (2.0 * wk) - bra.centre * bra.centre / (2.0 * wb)
        + i * (ket.phase - bra.phase);
    let pi = Complex64::new(core::f64::consts::PI, 0.0);
    let i0 = ket.norm_constant() * bra.norm_constant() * (pi / a).sqrt() * (b * b / (4.0 * a) + c0).exp();
    let m1 = b / (2.0 * a);
    (i0, i0 * m1, i0 * (m1 * m1 + 0.5 / a))
}

/// Sample `rho(x, x)` on a grid and record the intensity moments.
pub fn fringe_profile(rho: &GaussianMixtureOperator, grid: &GridSpec) -> Result<FringeProfile> {
    if grid.points < 16 {
        return Err(Error::Contract("fringe grid needs at least 16 points"));
    }
    let mut m0 = Complex64::new(0.0, 0.0);
    let mut m1 = Complex64::new(0.0, 0.0);
    let mut m2 = Complex64::new(0.0, 0.0);
    for t in rho.terms() {
        let (i0, i1, i2) = pair_moments(&t.ket, &t.bra);
        m0 += t.coeff * i0;
        m1 += t.coeff * i1;
        m2 += t.coeff * i2;
    }
    let mass = m0.re;
    if !(mass > 1e-300) {
        return Err(Error::DegenerateState);
    }
    let mean = m1.re / mass;
    let var = (m2.re / mass - mean * mean).max(0.0);
    let sigma = libm::sqrt(var);
    let centre = grid.centre.unwrap_or(mean);
    let extent = match grid.extent {
        Some(e) => e,
        None => {
            let mut e = 8.0 * sigma;
            for t in rho.terms() {
                for p in [&t.ket, &t.bra] {
                    e = e.max(libm::fabs(p.centre - centre) + 8.0 * p.sigma());
                }
            }
            if e == 0.0 {
                e = 1.0;
            }
            e
        }
    };
    let dx = 2.0 * extent / (grid.points as f64 - 1.0);
    // Highest fringe wavenumber present in the diagonal kernel.
    let mut k_max = 0.0f64;
    for t in rho.terms() {
        k_max = k_max.max(libm::fabs(t.ket.momentum - t.bra.momentum));
    }
    if k_max > 0.0 {
        let period = 2.0 * core::f64::consts::PI / k_max;
        if dx > period / 8.0 {
            return Err(Error::Resolution(format!(
                "grid step {dx:.3e} exceeds an eighth of the fringe period {period:.3e}"
            )));
        }
    }
    let mut positions = Vec::with_capacity(grid.points);
    let mut intensity = Vec::with_capacity(grid.points);
    for idx in 0..grid.points {
        let x = centre - extent + dx * idx as f64;
        let v = rho.density(x);
        if v < -1e-12 {
            return Err(Error::Contract("negative intensity beyond tolerance"));
        }
        positions.push(x);
        intensity.push(v.max(0.0));
    }
    Ok(FringeProfile {
        positions,
        intensity,
        centre,
        extent,
        points: grid.points,
        mean,
        envelope_sigma: sigma,
    })
}

/// Interior local maxima and minima of a sampled curve, tolerating plateaus
/// (a symmetric profile sampled on an even grid has two equal apex samples;
/// the plateau midpoint counts as the extremum).
fn local_extrema(ys: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let mut prev_dir: i8 = 0;
    let mut plateau_start = 0usize;
    for i in 1..ys.len() {
        if ys[i] == ys[i - 1] {
            continue;
        }
        let dir: i8 = if ys[i] > ys[i - 1] { 1 } else { -1 };
        if prev_dir == 1 && dir == -1 {
            maxima.push((plateau_start + i - 1) / 2);
        } else if prev_dir == -1 && dir == 1 {
            minima.push((plateau_start + i - 1) / 2);
        }
        prev_dir = dir;
        plateau_start = i;
    }
    (maxima, minima)
}

/// Fringe visibility `(I_max - I_min) / (I_max + I_min)` over the central
/// half-envelope (within one envelope sigma of the intensity mean), using
/// adjacent local extrema so a varying envelope does not inflate the value.
pub fn visibility(profile: &FringeProfile) -> Result<f64> {
    let n = profile.intensity.len();
    if n < 5 {
        return Err(Error::Contract("profile too short for visibility analysis"));
    }
    let peak = profile.intensity.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Contract("degenerate (identically zero) profile"));
    }
    let ys = &profile.intensity;
    let (maxima, minima) = local_extrema(ys);
    let lo = profile.mean - profile.envelope_sigma;
    let hi = profile.mean + profile.envelope_sigma;
    let mut best = 0.0f64;
    for &im in &minima {
        let x = profile.positions[im];
        if x < lo || x > hi {
            continue;
        }
        let left = maxima.iter().rev().find(|&&j| j < im);
        let right = maxima.iter().find(|&&j| j > im);
        if let (Some(&l), Some(&r)) = (left, right) {
            let i_max = 0.5 * (ys[l] + ys[r]);
            let i_min = ys[im];
            if i_max + i_min > 0.0 {
                best = best.max((i_max - i_min) / (i_max + i_min));
            }
        }
    }
    Ok(best.min(1.0))
}

/// Coherence coefficient of the reduced state: the summed weight of terms
/// pairing a ket near the first branch centre with a bra near the second.
pub fn coherence_coefficient(
    rho: &GaussianMixtureOperator,
    branch_centres: (f64, f64),
) -> Result<Complex64> {
    let (minus, plus) = branch_centres;
    if !(plus > minus) {
        return Err(Error::Contract("branch centres must be ordered (-L, L)"));
    }
    let mut c = Complex64::new(0.0, 0.0);
    for t in rho.terms() {
        let ket_side = classify(t.ket.centre, minus, plus)?;
        let bra_side = classify(t.bra.centre, minus, plus)?;
        if ket_side == Side::Minus && bra_side == Side::Plus {
            c += t.coeff;
        }
    }
    Ok(c)
}

/// Interferometer click probabilities from the coherence of the reduced
/// relative-coordinate state: `p_left = 1/2 + Re(e^{i phi} C)` with `C` the
/// coefficient pairing the `-L` ket with the `+L` bra.
pub fn detector_probabilities(
    rho: &GaussianMixtureOperator,
    branch_centres: (f64, f64),
    phase_convention: f64,
) -> Result<(f64, f64)> {
    let c = coherence_coefficient(rho, branch_centres)?;
    let p_left = (0.5 + (Complex64::from_polar(1.0, phase_convention) * c).re).clamp(0.0, 1.0);
    Ok((p_left, 1.0 - p_left))
}

/// Detectors placed at the mirrors: populations only, coherence ignored.
pub fn mirror_probabilities(
    rho: &GaussianMixtureOperator,
    branch_centres: (f64, f64),
) -> Result<(f64, f64)> {
    let (minus, plus) = branch_centres;
    if !(plus > minus) {
        return Err(Error::Contract("branch centres must be ordered (-L, L)"));
    }
    let mut p_minus = 0.0;
    let mut p_plus = 0.0;
    for t in rho.terms() {
        let ket_side = classify(t.ket.centre, minus, plus)?;
        let bra_side = classify(t.bra.centre, minus, plus)?;
        if ket_side != bra_side {
            continue;
        }
        let w = (t.coeff * t.bra.overlap(&t.ket)).re;
        match ket_side {
            Side::Minus => p_minus += w,
            Side::Plus => p_plus += w,
        }
    }
    let total = p_minus + p_plus;
    if !(total > 1e-12) {
        return Err(Error::Contract("no population at the branch centres"));
    }
    Ok((p_minus / total, p_plus / total))
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Side {
    Minus,
    Plus,
}

fn classify(centre: f64, minus: f64, plus: f64) -> Result<Side> {
    let dm = libm::fabs(centre - minus);
    let dp = libm::fabs(centre - plus);
    if dm == dp {
        return Err(Error::Contract("branches not resolvable: packet equidistant from centres"));
    }
    Ok(if dm < dp { Side::Minus } else { Side::Plus })
}
