//! Linear canonical coordinate machinery.
//!
//! Coordinate changes are linear maps `y = A x` on positions together with a
//! companion momentum map. For a canonical pair the momentum rows are
//! `B = (A^-1)^T`, so that `[y_alpha, pi_beta] = i delta_ab`. The physically
//! measurable relative momenta (`p_r = mu (p_2/m_2 - p_1/m_1)` and friends)
//! are generally *not* the conjugate set when the observer mass is finite;
//! both families are first-class here and distinguished by the `canonical`
//! flag.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::packets::{Branch, CoordinateTag, GaussianPacket, MassConfig, SuperposedState};

/// A real linear combination of position and momentum operators,
/// `sum_j x_coeffs[j] x_j + sum_j p_coeffs[j] p_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearPhaseSpaceForm {
    pub x_coeffs: Vec<f64>,
    pub p_coeffs: Vec<f64>,
    pub label: String,
}

impl LinearPhaseSpaceForm {
    pub fn new(x_coeffs: Vec<f64>, p_coeffs: Vec<f64>, label: &str) -> Result<Self> {
        if x_coeffs.len() != p_coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: x_coeffs.len(),
                found: p_coeffs.len(),
            });
        }
        Ok(LinearPhaseSpaceForm { x_coeffs, p_coeffs, label: String::from(label) })
    }

    pub fn position(coeffs: Vec<f64>, label: &str) -> Self {
        let n = coeffs.len();
        LinearPhaseSpaceForm { x_coeffs: coeffs, p_coeffs: vec![0.0; n], label: String::from(label) }
    }

    pub fn momentum(coeffs: Vec<f64>, label: &str) -> Self {
        let n = coeffs.len();
        LinearPhaseSpaceForm { x_coeffs: vec![0.0; n], p_coeffs: coeffs, label: String::from(label) }
    }

    pub fn len(&self) -> usize {
        self.x_coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_coeffs.is_empty()
    }

    pub fn is_momentum_only(&self) -> bool {
        self.x_coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn is_position_only(&self) -> bool {
        self.p_coeffs.iter().all(|&c| c == 0.0)
    }
}

/// Commutator `[f, g]` of two linear phase-space forms; exact,
/// `i (f_x . g_p - g_x . f_p)` with hbar = 1.
pub fn commutator(f: &LinearPhaseSpaceForm, g: &LinearPhaseSpaceForm) -> Result<Complex64> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), found: g.len() });
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let val = dot(&f.x_coeffs, &g.p_coeffs) - dot(&g.x_coeffs, &f.p_coeffs);
    Ok(Complex64::new(0.0, val))
}

/// Invertible linear map on positions plus its companion momentum map.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCoordinateMap {
    position: Mat,
    momentum: Option<Mat>,
    canonical: bool,
    target_tag: CoordinateTag,
}

impl LinearCoordinateMap {
    pub fn new(position: Mat, momentum: Option<Mat>, target_tag: CoordinateTag) -> Result<Self> {
        // Insist on invertibility up front.
        position.inverse()?;
        let canonical = match &momentum {
            Some(b) => position.matmul(&b.transpose()).max_abs_diff(&Mat::identity(position.n)) < 1e-12,
            None => false,
        };
        Ok(LinearCoordinateMap { position, momentum, canonical, target_tag })
    }

    pub fn dim(&self) -> usize {
        self.position.n
    }

    pub fn position_matrix(&self) -> &Mat {
        &self.position
    }

    pub fn momentum_matrix(&self) -> Option<&Mat> {
        self.momentum.as_ref()
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn target_tag(&self) -> CoordinateTag {
        self.target_tag
    }

    /// Position row `alpha` as a phase-space form.
    pub fn position_form(&self, alpha: usize, label: &str) -> LinearPhaseSpaceForm {
        LinearPhaseSpaceForm::position(self.position.row(alpha).to_vec(), label)
    }

    /// Momentum row `alpha` as a phase-space form.
    pub fn momentum_form(&self, alpha: usize, label: &str) -> Option<LinearPhaseSpaceForm> {
        self.momentum
            .as_ref()
            .map(|b| LinearPhaseSpaceForm::momentum(b.row(alpha).to_vec(), label))
    }

    /// Re-express a lab-frame momentum form `sum_j f_j p_j` in the map's
    /// momentum coordinates: `p = A^T pi`, so the new coefficients are `A f`.
    pub fn momentum_coeffs_to_new(&self, lab_coeffs: &[f64]) -> Result<Vec<f64>> {
        if lab_coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: lab_coeffs.len() });
        }
        if !self.canonical {
            return Err(Error::Contract("momentum re-expression requires a canonical map"));
        }
        Ok(self.position.mul_vec(lab_coeffs))
    }
}

/// Centre-of-mass plus relative-position map: row 0 is `(m_1/M ... m_N/M)`,
/// row k is `e_{k+1} - e_1`. Unit Jacobian; companion momenta unset until
/// [`conjugate_momenta`] attaches them.
pub fn cm_relative_map(masses: &MassConfig) -> Result<LinearCoordinateMap> {
    let n = masses.len();
    if n < 2 {
        return Err(Error::Contract("centre-of-mass map needs at least two particles"));
    }
    let total = masses.total();
    let mut rows = vec![vec![0.0; n]; n];
    for j in 0..n {
        rows[0][j] = masses.mass(j) / total;
    }
    for k in 1..n {
        rows[k][0] = -1.0;
        rows[k][k] = 1.0;
    }
    let position = Mat::from_rows(&rows)?;
    Ok(LinearCoordinateMap {
        position,
        momentum: None,
        canonical: false,
        target_tag: CoordinateTag::CmRelativeX,
    })
}

/// The physical momentum set: total momentum plus the relative momenta
/// `p_{r_k} = mu_{1k} (p_k/m_k - p_1/m_1)` of each body versus the observer.
pub fn relative_momentum_forms(masses: &MassConfig) -> Result<Vec<LinearPhaseSpaceForm>> {
    let n = masses.len();
    if n != 2 && n != 3 {
        return Err(Error::Contract("relative momentum forms are defined for 2 or 3 particles"));
    }
    let mut forms = vec![LinearPhaseSpaceForm::momentum(vec![1.0; n], "p_cm")];
    for k in 1..n {
        let mu = masses.reduced(0, k);
        let mut coeffs = vec![0.0; n];
        coeffs[0] = -mu / masses.mass(0);
        coeffs[k] = mu / masses.mass(k);
        let label = if k == 1 { "p_r2" } else { "p_r3" };
        forms.push(LinearPhaseSpaceForm::momentum(coeffs, label));
    }
    Ok(forms)
}

/// Matrix whose rows are the physical momentum forms of
/// [`relative_momentum_forms`].
pub fn relative_momentum_matrix(masses: &MassConfig) -> Result<Mat> {
    let forms = relative_momentum_forms(masses)?;
    let rows: Vec<Vec<f64>> = forms.into_iter().map(|f| f.p_coeffs).collect();
    Mat::from_rows(&rows)
}

/// Attach the conjugate momentum rows `B = (A^-1)^T` to a position map.
pub fn conjugate_momenta(map: &LinearCoordinateMap) -> Result<LinearCoordinateMap> {
    let b = map.position.inverse()?.transpose();
    Ok(LinearCoordinateMap {
        position: map.position.clone(),
        momentum: Some(b),
        canonical: true,
        target_tag: map.target_tag,
    })
}

/// Given a momentum map (rows = momentum forms), construct the conjugate
/// position rows `Q = (B^-1)^T`, so `[q_alpha, p_beta] = i delta_ab`.
pub fn conjugate_positions(momentum_matrix: &Mat) -> Result<LinearCoordinateMap> {
    let q = momentum_matrix.inverse()?.transpose();
    Ok(LinearCoordinateMap {
        position: q,
        momentum: Some(momentum_matrix.clone()),
        canonical: true,
        target_tag: CoordinateTag::CmRelativeQ,
    })
}

/// Per-branch parameters of the exact two-body transform of a real-width
/// Gaussian product into centre-of-mass and relative coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactTransformReport {
    pub delta_c_sq: f64,
    pub delta_r_sq: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Cross-correlation coefficient between centre-of-mass and relative
    /// fluctuations; zero exactly when `m_1 Delta_1^2 = m_2 Delta_2^2`.
    pub gamma_corr: f64,
}

impl ExactTransformReport {
    /// The transformed state factorizes iff the cross term vanishes.
    pub fn is_product(&self) -> bool {
        self.gamma_corr == 0.0
    }

    /// Exponent of the transformed (unnormalized) wavefunction at
    /// `(x_cm, x_r)`.
    pub fn log_amplitude(&self, x_cm: f64, x_r: f64) -> f64 {
        let dc = x_cm - self.alpha;
        let dr = x_r - self.beta;
        -dc * dc / (2.0 * self.delta_c_sq) - dr * dr / (2.0 * self.delta_r_sq)
            + self.gamma_corr * dc * dr
    }
}

/// Mode selector for [`transform_state`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMode {
    /// Map centres and momenta linearly and assign each new coordinate the
    /// factorized width of the exact quadratic form, dropping the
    /// fluctuation cross-correlations.
    Approximate,
    /// Two-body real-width Gaussians only: return the exact correlated
    /// Gaussian parameters per branch instead of a product state.
    Exact,
}

/// Result of [`transform_state`].
#[derive(Debug, Clone, PartialEq)]
pub enum TransformOutcome {
    State(SuperposedState),
    Exact(Vec<ExactTransformReport>),
}

impl TransformOutcome {
    pub fn into_state(self) -> Result<SuperposedState> {
        match self {
            TransformOutcome::State(s) => Ok(s),
            TransformOutcome::Exact(_) => Err(Error::Unsupported("expected a transformed state")),
        }
    }

    pub fn into_reports(self) -> Result<Vec<ExactTransformReport>> {
        match self {
            TransformOutcome::Exact(r) => Ok(r),
            TransformOutcome::State(_) => Err(Error::Unsupported("expected exact reports")),
        }
    }
}

fn exact_two_body_reports(state: &SuperposedState) -> Result<Vec<ExactTransformReport>> {
    if state.n_coords() != 2 {
        return Err(Error::Unsupported("exact transform is implemented for two particles"));
    }
    let m1 = state.masses().mass(0);
    let m2 = state.masses().mass(1);
    let total = m1 + m2;
    let mut reports = Vec::with_capacity(state.branches().len());
    for branch in state.branches() {
        let p1 = &branch.packets[0];
        let p2 = &branch.packets[1];
        for p in [p1, p2] {
            if p.width_param.im != 0.0 || p.momentum != 0.0 {
                return Err(Error::Unsupported(
                    "exact transform requires real-width packets at rest",
                ));
            }
        }
        let d1 = p1.width_param.re;
        let d2 = p2.width_param.re;
        reports.push(ExactTransformReport {
            delta_c_sq: d1 * d2 / (d1 + d2),
            delta_r_sq: total * total * d1 * d2 / (m1 * m1 * d1 + m2 * m2 * d2),
            alpha: (m1 * p1.centre + m2 * p2.centre) / total,
            beta: p2.centre - p1.centre,
            gamma_corr: (m2 * d2 - m1 * d1) / (total * d1 * d2),
        });
    }
    Ok(reports)
}

/// Transform a lab-coordinate state by a linear coordinate map.
pub fn transform_state(
    state: &SuperposedState,
    map: &LinearCoordinateMap,
    mode: TransformMode,
) -> Result<TransformOutcome> {
    if state.coordinate_tag() != CoordinateTag::Lab {
        return Err(Error::Contract("transform_state expects a lab-coordinate state"));
    }
    if map.dim() != state.n_coords() {
        return Err(Error::DimensionMismatch { expected: state.n_coords(), found: map.dim() });
    }
    if let TransformMode::Exact = mode {
        return Ok(TransformOutcome::Exact(exact_two_body_reports(state)?));
    }
    if map.momentum.is_some() && !map.canonical {
        return Err(Error::Unsupported(
            "state transform needs the canonical companion momenta; attach conjugate_momenta",
        ));
    }
    let a = &map.position;
    let a_inv = a.inverse()?;
    let b = match &map.momentum {
        Some(b) => b.clone(),
        None => a_inv.transpose(),
    };
    let n = map.dim();
    let mut branches = Vec::with_capacity(state.branches().len());
    for branch in state.branches() {
        let centres: Vec<f64> = branch.packets.iter().map(|p| p.centre).collect();
        let momenta: Vec<f64> = branch.packets.iter().map(|p| p.momentum).collect();
        let new_centres = a.mul_vec(&centres);
        let new_momenta = b.mul_vec(&momenta);
        let total_phase: f64 = branch.packets.iter().map(|p| p.phase).sum();
        let mut packets = Vec::with_capacity(n);
        for alpha in 0..n {
            // Factorized width of the transformed quadratic form:
            // 1/w'_a = sum_j (A^-1)_{j a}^2 / w_j. For two particles this is
            // exactly the Delta_c, Delta_r pair of the exact transform.
            let mut inv_w = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let c = a_inv[(j, alpha)];
                inv_w += c * c / branch.packets[j].width_param;
            }
            let phase = if alpha == 0 { total_phase } else { 0.0 };
            packets.push(GaussianPacket::new(
                new_centres[alpha],
                1.0 / inv_w,
                new_momenta[alpha],
                phase,
            )?);
        }
        branches.push(Branch { amplitude: branch.amplitude, packets });
    }
    Ok(TransformOutcome::State(state.with_branches(branches, map.target_tag)))
}
