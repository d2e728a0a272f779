//! Zero-mean bosonic Gaussian states, thermal-loss channels and the
//! closed-form Uhlmann fidelity between Gaussian states.
//!
//! Covariance matrices use interleaved quadrature ordering
//! `(x1, p1, x2, p2, ...)` and the vacuum-variance-one convention, so the
//! vacuum is the identity and a thermal mode with `n` mean photons has
//! covariance `(2n + 1) I`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{check_non_negative, check_probability, domain, Error, Result};

/// Element-wise symmetry tolerance for covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Slack allowed below 1 for symplectic eigenvalues.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Covariances closer than this (max-abs) are treated as the same state.
pub const IDENTICAL_TOL: f64 = 1e-9;

// Negative eigenvalues down to -CLIP_TOL (relative) are rounding noise and
// get clipped to zero; anything below is a hard error.
const CLIP_TOL: f64 = 1e-6;
// 4w^2 - 1 below this is treated as exactly zero (pure auxiliary mode).
const PURE_AUX_TOL: f64 = 1e-12;

/// Symplectic form `Ω = ⊕ [[0, 1], [-1, 0]]` for `num_modes` modes.
pub fn symplectic_form(num_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * num_modes, 2 * num_modes);
    for k in 0..num_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// A Gaussian state described by its first and second quadrature moments.
///
/// Construction validates symmetry and the uncertainty principle, so every
/// value of this type is a physical state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    num_modes: usize,
    cov: DMatrix<f64>,
    mean: DVector<f64>,
}

impl GaussianState {
    pub fn new(cov: DMatrix<f64>, mean: DVector<f64>) -> Result<Self> {
        let dim = cov.nrows();
        if dim == 0 || dim % 2 != 0 || cov.ncols() != dim {
            return domain(format!(
                "covariance matrix must be square with even dimension, got {}x{}",
                cov.nrows(),
                cov.ncols()
            ));
        }
        if mean.len() != dim {
            return domain(format!("mean has length {}, expected {dim}", mean.len()));
        }
        if cov.iter().chain(mean.iter()).any(|x| !x.is_finite()) {
            return domain("covariance matrix and mean must be finite");
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return domain(format!("covariance matrix is not symmetric (max |V - Vᵀ| = {asym:e})"));
        }
        let state = GaussianState {
            num_modes: dim / 2,
            cov,
            mean,
        };
        let nu = state.symplectic_eigenvalues()?;
        if let Some(&min) = nu.first() {
            if min < 1.0 - PHYSICAL_TOL {
                return domain(format!(
                    "state violates the uncertainty principle (smallest symplectic eigenvalue {min})"
                ));
            }
        }
        Ok(state)
    }

    pub fn zero_mean(cov: DMatrix<f64>) -> Result<Self> {
        let dim = cov.nrows();
        Self::new(cov, DVector::zeros(dim))
    }

    pub fn vacuum(num_modes: usize) -> Self {
        let dim = 2 * num_modes;
        GaussianState {
            num_modes,
            cov: DMatrix::identity(dim, dim),
            mean: DVector::zeros(dim),
        }
    }

    /// Single-mode thermal state with `n_bar` mean photons.
    pub fn thermal(n_bar: f64) -> Result<Self> {
        check_non_negative("n_bar", n_bar)?;
        Ok(GaussianState {
            num_modes: 1,
            cov: DMatrix::identity(2, 2) * (2.0 * n_bar + 1.0),
            mean: DVector::zeros(2),
        })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Mean photon number of one mode.
    pub fn mean_photons(&self, mode: usize) -> f64 {
        let (i, j) = (2 * mode, 2 * mode + 1);
        let displacement = self.mean[i].powi(2) + self.mean[j].powi(2);
        (self.cov[(i, i)] + self.cov[(j, j)] + displacement) / 4.0 - 0.5
    }

    /// Symplectic eigenvalues in ascending order (one per mode).
    ///
    /// Computed as the square roots of the doubly-degenerate spectrum of the
    /// symmetric matrix `-(√V Ω √V)²`.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let root = sym_sqrt(&self.cov)?;
        let k = &root * symplectic_form(self.num_modes) * &root;
        let gram = k.transpose() * &k;
        let mut nu_sq: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().copied().collect();
        nu_sq.sort_by(|a, b| a.total_cmp(b));
        Ok(nu_sq
            .chunks(2)
            .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
            .collect())
    }

    /// `det(cov) = 1` within `tol` (relative).
    pub fn is_pure(&self, tol: f64) -> bool {
        (self.cov.determinant() - 1.0).abs() <= tol
    }

    fn is_zero_mean(&self) -> bool {
        self.mean.iter().all(|m| m.abs() <= SYMMETRY_TOL)
    }
}

/// Thermal-loss channel: transmissivity `mu` mixing the input with a thermal
/// environment of `n_thermal` mean photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalLossChannel {
    mu: f64,
    n_thermal: f64,
}

impl ThermalLossChannel {
    pub fn new(mu: f64, n_thermal: f64) -> Result<Self> {
        check_probability("loss parameter mu", mu)?;
        check_non_negative("thermal photon number", n_thermal)?;
        Ok(ThermalLossChannel { mu, n_thermal })
    }

    pub fn pure_loss(mu: f64) -> Result<Self> {
        Self::new(mu, 0.0)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n_thermal(&self) -> f64 {
        self.n_thermal
    }

    /// Output noise `E = (1 - mu) N` added by the channel, in photons.
    pub fn output_noise(&self) -> f64 {
        (1.0 - self.mu) * self.n_thermal
    }
}

/// Two-mode squeezed vacuum with `n_s` mean photons in each arm.
pub fn tmsv_state(n_s: f64) -> Result<GaussianState> {
    check_non_negative("signal photon number", n_s)?;
    let a = 2.0 * n_s + 1.0;
    let c = 2.0 * (n_s * (n_s + 1.0)).sqrt();
    #[rustfmt::skip]
    let cov = DMatrix::from_row_slice(4, 4, &[
        a,   0.0, c,   0.0,
        0.0, a,   0.0, -c,
        c,   0.0, a,   0.0,
        0.0, -c,  0.0, a,
    ]);
    Ok(GaussianState {
        num_modes: 2,
        cov,
        mean: DVector::zeros(4),
    })
}

/// Sends mode `mode_index` of `state` through `ch`, leaving the others alone.
pub fn apply_thermal_loss(
    state: &GaussianState,
    ch: &ThermalLossChannel,
    mode_index: usize,
) -> Result<GaussianState> {
    if mode_index >= state.num_modes {
        return domain(format!(
            "mode index {mode_index} out of range for a {}-mode state",
            state.num_modes
        ));
    }
    let mu = ch.mu;
    let root_mu = mu.sqrt();
    let noise = (1.0 - mu) * (2.0 * ch.n_thermal + 1.0);
    let dim = 2 * state.num_modes;
    let target = [2 * mode_index, 2 * mode_index + 1];

    let mut cov = state.cov.clone();
    for &i in &target {
        for j in 0..dim {
            if target.contains(&j) {
                continue;
            }
            cov[(i, j)] *= root_mu;
            cov[(j, i)] *= root_mu;
        }
    }
    for &i in &target {
        for &j in &target {
            cov[(i, j)] = mu * state.cov[(i, j)] + if i == j { noise } else { 0.0 };
        }
    }
    let mut mean = state.mean.clone();
    for &i in &target {
        mean[i] *= root_mu;
    }
    Ok(GaussianState {
        num_modes: state.num_modes,
        cov,
        mean,
    })
}

/// Signal-idler state after the signal is reflected by a target: loss `eta`
/// with an environment of `n_b / (1 - eta)` photons, so exactly `n_b` noise
/// photons reach the receiver.
pub fn target_output_state(eta: f64, n_b: f64, n_s: f64) -> Result<GaussianState> {
    check_probability("eta", eta)?;
    check_non_negative("background photon number", n_b)?;
    if eta == 1.0 && n_b > 0.0 {
        return domain("eta = 1 with a non-zero background needs an infinitely bright environment");
    }
    let n_thermal = if n_b == 0.0 { 0.0 } else { n_b / (1.0 - eta) };
    let ch = ThermalLossChannel::new(eta, n_thermal)?;
    apply_thermal_loss(&tmsv_state(n_s)?, &ch, 0)
}

/// Signal-idler state when the signal is lost entirely and replaced by
/// `n_b` background photons.
pub fn background_output_state(n_b: f64, n_s: f64) -> Result<GaussianState> {
    let ch = ThermalLossChannel::new(0.0, n_b)?;
    apply_thermal_loss(&tmsv_state(n_s)?, &ch, 0)
}

/// Uhlmann fidelity `Tr √(√ρ σ √ρ)` between two zero-mean Gaussian states.
///
/// Uses the auxiliary-matrix formula of Banchi, Braunstein and Pirandola:
/// with `Vᵢ = covᵢ / 2`,
///
/// ```text
/// V_aux = Ωᵀ (V₁ + V₂)⁻¹ (Ω/4 + V₂ Ω V₁)
/// F     = Π_k (2w_k + √(4w_k² − 1))^½ / det(V₁ + V₂)^¼
/// ```
///
/// where `±i w_k` are the eigenvalues of `V_aux Ω`.
pub fn gaussian_fidelity(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    if a.num_modes != b.num_modes {
        return domain(format!(
            "fidelity needs equal mode counts, got {} and {}",
            a.num_modes, b.num_modes
        ));
    }
    if !a.is_zero_mean() || !b.is_zero_mean() {
        return domain("gaussian_fidelity is defined for zero-mean states only");
    }
    if (&a.cov - &b.cov).amax() <= IDENTICAL_TOL {
        return Ok(1.0);
    }
    // Fixed argument order makes F(a, b) and F(b, a) bit-identical.
    let (a, b) = match cmp_cov(&a.cov, &b.cov) {
        Ordering::Greater => (b, a),
        _ => (a, b),
    };

    let n = a.num_modes;
    let omega = symplectic_form(n);
    let v1 = &a.cov * 0.5;
    let v2 = &b.cov * 0.5;
    let sum = &v1 + &v2;
    let det_sum = sum.determinant();
    if !(det_sum > 0.0) {
        return Err(Error::Numerical(format!("det(V1 + V2) = {det_sum} is not positive")));
    }
    let sum_inv = sum
        .try_inverse()
        .ok_or_else(|| Error::Numerical("V1 + V2 is singular".into()))?;
    let v_aux = omega.transpose() * sum_inv * (&omega * 0.25 + &v2 * &omega * &v1);
    let spectrum = (v_aux * &omega).complex_eigenvalues();

    let mut moduli: Vec<f64> = spectrum.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|x, y| x.total_cmp(y));
    let mut log_f_tot = 0.0;
    for pair in moduli.chunks(2) {
        let w = 0.5 * (pair[0] + pair[1]);
        let mut excess = 4.0 * w * w - 1.0;
        if excess < -CLIP_TOL {
            return Err(Error::Numerical(format!(
                "auxiliary symplectic eigenvalue {w} below 1/2"
            )));
        }
        if excess < PURE_AUX_TOL {
            excess = 0.0;
        }
        log_f_tot += 0.5 * (2.0 * w + excess.sqrt()).ln();
    }
    let fidelity = (log_f_tot - 0.25 * det_sum.ln()).exp();
    Ok(fidelity.clamp(0.0, 1.0))
}

fn cmp_cov(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Ordering {
    x.iter()
        .zip(y.iter())
        .map(|(p, q)| p.total_cmp(q))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Principal square root of a real symmetric positive semi-definite matrix.
pub(crate) fn sym_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m.clone());
    let scale = eig.eigenvalues.amax().max(1.0);
    let mut roots = eig.eigenvalues.clone();
    for lambda in roots.iter_mut() {
        if *lambda < -CLIP_TOL * scale {
            return Err(Error::Numerical(format!(
                "matrix is not positive semi-definite (eigenvalue {lambda})"
            )));
        }
        *lambda = lambda.max(0.0).sqrt();
    }
    let u = &eig.eigenvectors;
    Ok(u * DMatrix::from_diagonal(&roots) * u.transpose())
}
