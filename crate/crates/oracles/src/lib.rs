//! Independent numerical oracles for the test suites.
//!
//! Everything in `qref-core` is closed-form Gaussian algebra; these oracles
//! deliberately take the slow road instead — adaptive quadrature, FFT grid
//! propagation, and discretized density matrices — so the two
//! implementations share no code paths.

use nalgebra::DMatrix;
use num_complex::Complex64;
use qref_core::packets::{GaussianPacket, SuperposedState};
use qref_core::reduce::GaussianMixtureOperator;
use rustfft::FftPlanner;

/// Adaptive Simpson quadrature of a complex integrand.
pub fn quad_complex<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Complex64 {
    fn simpson(
        a: f64,
        fa: Complex64,
        b: f64,
        fb: Complex64,
        fm: Complex64,
    ) -> Complex64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        fa: Complex64,
        b: f64,
        fb: Complex64,
        fm: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 48)
}

fn support(packets: &[&GaussianPacket]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in packets {
        lo = lo.min(p.centre - 14.0 * p.sigma());
        hi = hi.max(p.centre + 14.0 * p.sigma());
    }
    (lo, hi)
}

/// `<g1|g2>` by adaptive quadrature of the pointwise product. The domain is
/// pre-split into panels so a bump far narrower than the joint support
/// cannot slip between the initial sample points.
pub fn overlap_quadrature(g1: &GaussianPacket, g2: &GaussianPacket, tol: f64) -> Complex64 {
    let (lo, hi) = support(&[g1, g2]);
    let panels = 64;
    let step = (hi - lo) / panels as f64;
    let f = |x: f64| g1.eval(x).conj() * g2.eval(x);
    (0..panels)
        .map(|i| {
            let a = lo + step * i as f64;
            quad_complex(&f, a, a + step, tol / panels as f64)
        })
        .sum()
}

/// Sample a packet on a uniform grid.
pub fn sample_packet(p: &GaussianPacket, xs: &[f64]) -> Vec<Complex64> {
    xs.iter().map(|&x| p.eval(x)).collect()
}

/// Uniform grid of `n` points centred on `centre` with half-width `extent`.
pub fn linspace(centre: f64, extent: f64, n: usize) -> Vec<f64> {
    let dx = 2.0 * extent / (n as f64 - 1.0);
    (0..n).map(|i| centre - extent + dx * i as f64).collect()
}

/// One free-particle step on a periodic grid via FFT: multiplies each
/// momentum component by `exp(-i k^2 t / (2 m))`. The grid spacing is `dx`.
pub fn grid_free_propagate(values: &mut [Complex64], dx: f64, t: f64, mass: f64) {
    let n = values.len();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    fft.process(values);
    let dk = 2.0 * core::f64::consts::PI / (n as f64 * dx);
    for (j, v) in values.iter_mut().enumerate() {
        let j_signed = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        let k = j_signed * dk;
        *v *= Complex64::from_polar(1.0, -k * k * t / (2.0 * mass));
    }
    ifft.process(values);
    let scale = 1.0 / n as f64;
    for v in values.iter_mut() {
        *v *= scale;
    }
}

/// Discretize `rho(x, x')` on an `n x n` grid.
pub fn discretize(rho: &GaussianMixtureOperator, centre: f64, extent: f64, n: usize) -> DMatrix<Complex64> {
    let xs = linspace(centre, extent, n);
    DMatrix::from_fn(n, n, |i, j| rho.eval(xs[i], xs[j]))
}

/// `Tr(rho^2) = integral |rho(x, x')|^2 dx dx'` on a grid.
pub fn grid_purity(rho: &GaussianMixtureOperator, centre: f64, extent: f64, n: usize) -> f64 {
    let m = discretize(rho, centre, extent, n);
    let dx = 2.0 * extent / (n as f64 - 1.0);
    m.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx * dx
}

/// Smallest eigenvalue of the discretized kernel (times `dx`, so the values
/// approximate the operator's spectrum and sum to ~1).
pub fn grid_min_eigenvalue(rho: &GaussianMixtureOperator, centre: f64, extent: f64, n: usize) -> f64 {
    let dx = 2.0 * extent / (n as f64 - 1.0);
    let m = discretize(rho, centre, extent, n) * Complex64::new(dx, 0.0);
    // Symmetrize to scrub float-level Hermiticity error before eigensolving.
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Two-coordinate wavefunction sampled on a rectangular grid.
pub fn sample_state_2d(
    state: &SuperposedState,
    xs0: &[f64],
    xs1: &[f64],
) -> DMatrix<Complex64> {
    assert_eq!(state.n_coords(), 2, "2-D sampling needs a two-coordinate state");
    let mut grid = DMatrix::from_element(xs0.len(), xs1.len(), Complex64::new(0.0, 0.0));
    for branch in state.branches() {
        let col0: Vec<Complex64> = xs0.iter().map(|&x| branch.packets[0].eval(x)).collect();
        let col1: Vec<Complex64> = xs1.iter().map(|&x| branch.packets[1].eval(x)).collect();
        for (i, &a) in col0.iter().enumerate() {
            for (j, &b) in col1.iter().enumerate() {
                grid[(i, j)] += branch.amplitude * a * b;
            }
        }
    }
    grid
}

/// Purity of the second coordinate after tracing the first, straight from
/// the discretized two-coordinate wavefunction.
pub fn reduced_purity_2d(
    state: &SuperposedState,
    centre0: f64,
    extent0: f64,
    n0: usize,
    centre1: f64,
    extent1: f64,
    n1: usize,
) -> f64 {
    let xs0 = linspace(centre0, extent0, n0);
    let xs1 = linspace(centre1, extent1, n1);
    let dx0 = xs0[1] - xs0[0];
    let dx1 = xs1[1] - xs1[0];
    let psi = sample_state_2d(state, &xs0, &xs1);
    // rho[j][j'] = sum_i psi(i, j) conj(psi(i, j')) dx0
    let rho = psi.adjoint() * &psi * Complex64::new(dx0, 0.0);
    let norm: f64 = rho.diagonal().iter().map(|v| v.re).sum::<f64>() * dx1;
    let purity: f64 = rho.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx1 * dx1;
    purity / (norm * norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_integrates_gaussian() {
        let v = quad_complex(&|x: f64| Complex64::new((-x * x).exp(), 0.0), -10.0, 10.0, 1e-12);
        assert!((v.re - core::f64::consts::PI.sqrt()).abs() < 1e-10);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn quadrature_matches_closed_form_overlap() {
        let g1 = GaussianPacket::new(0.1, Complex64::new(1.0, 0.3), 2.0, 0.5).unwrap();
        let g2 = GaussianPacket::new(-0.4, Complex64::new(0.7, -0.2), -1.0, 0.0).unwrap();
        let q = overlap_quadrature(&g1, &g2, 1e-12);
        let c = g1.overlap(&g2);
        assert!((q - c).norm() < 1e-9, "quadrature {q} vs closed form {c}");
    }

    #[test]
    fn fft_propagation_matches_closed_form() {
        let g = GaussianPacket::from_sigma(0.0, 1.0, 3.0).unwrap();
        let n = 4096;
        let xs = linspace(0.0, 60.0, n);
        let dx = xs[1] - xs[0];
        let mut values = sample_packet(&g, &xs);
        let (t, mass) = (2.0, 1.5);
        grid_free_propagate(&mut values, dx, t, mass);
        let evolved = g.evolved(t, mass);
        let mut err: f64 = 0.0;
        for (v, &x) in values.iter().zip(&xs) {
            err = err.max((v - evolved.eval(x)).norm());
        }
        assert!(err < 1e-8, "max pointwise propagation error {err}");
    }
}
