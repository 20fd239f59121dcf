//! Gaussian channels `V -> T V T^T + N` and their complete-positivity check.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::cm::{symplectic_form, CovarianceMatrix, ModeKind, ModeLabel};

type CMatrix = DMatrix<Complex64>;

/// Minimum eigenvalue of a Hermitian complex matrix.
pub(crate) fn hermitian_min_eig(h: &CMatrix) -> f64 {
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eigs = herm.symmetric_eigen().eigenvalues;
    eigs.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// A Gaussian channel acting as `V -> T V T^T + N`.
#[derive(Debug, Clone)]
pub struct GaussianChannel {
    pub t: DMatrix<f64>,
    pub n: DMatrix<f64>,
    pub in_modes: Vec<ModeLabel>,
    pub out_modes: Vec<ModeLabel>,
}

impl GaussianChannel {
    pub fn new(
        t: DMatrix<f64>,
        n: DMatrix<f64>,
        in_modes: Vec<ModeLabel>,
        out_modes: Vec<ModeLabel>,
    ) -> Result<Self> {
        let din = 2 * in_modes.len();
        let dout = 2 * out_modes.len();
        if t.nrows() != dout || t.ncols() != din {
            return Err(Error::InvalidDimension(format!(
                "T must be {dout}x{din}, got {}x{}",
                t.nrows(),
                t.ncols()
            )));
        }
        if n.nrows() != dout || n.ncols() != dout {
            return Err(Error::InvalidDimension(format!(
                "N must be {dout}x{dout}, got {}x{}",
                n.nrows(),
                n.ncols()
            )));
        }
        let asym = (&n - n.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::InvalidMatrix(format!(
                "N asymmetry {asym:.3e} exceeds 1e-12"
            )));
        }
        let n = (&n + n.transpose()) * 0.5;
        Ok(Self {
            t,
            n,
            in_modes,
            out_modes,
        })
    }

    /// Identity channel on `n` modes.
    pub fn identity(n: usize, kind: ModeKind) -> Self {
        let modes: Vec<_> = (0..n).map(|i| ModeLabel::new(i, kind)).collect();
        Self {
            t: DMatrix::identity(2 * n, 2 * n),
            n: DMatrix::zeros(2 * n, 2 * n),
            in_modes: modes.clone(),
            out_modes: modes,
        }
    }

    /// Independent pure-loss beamsplitters, transmissivity `taus[k]` on mode k.
    pub fn loss(taus: &[f64], kind: ModeKind) -> Result<Self> {
        let n = taus.len();
        let mut t = DMatrix::zeros(2 * n, 2 * n);
        let mut nn = DMatrix::zeros(2 * n, 2 * n);
        for (k, &tau) in taus.iter().enumerate() {
            if !(0.0..=1.0).contains(&tau) {
                return Err(Error::InvalidParams(format!(
                    "loss transmissivity {tau} out of [0, 1]"
                )));
            }
            for q in 0..2 {
                t[(2 * k + q, 2 * k + q)] = tau.sqrt();
                nn[(2 * k + q, 2 * k + q)] = (1.0 - tau) * 0.5;
            }
        }
        let modes: Vec<_> = (0..n).map(|i| ModeLabel::new(i, kind)).collect();
        Self::new(t, nn, modes.clone(), modes)
    }
}

/// Applies the channel: `T V T^T + N`, relabeled with the output modes.
pub fn apply_channel(ch: &GaussianChannel, v: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if ch.t.ncols() != v.dim() {
        return Err(Error::InvalidDimension(format!(
            "channel expects dimension {}, state has {}",
            ch.t.ncols(),
            v.dim()
        )));
    }
    let out = &ch.t * &v.data * ch.t.transpose() + &ch.n;
    // symmetrize: T V T^T accumulates roundoff asymmetry
    let out = (&out + out.transpose()) * 0.5;
    CovarianceMatrix::new(ch.out_modes.clone(), out)
}

/// Composition `second . first` (first acts on the state first).
pub fn compose(second: &GaussianChannel, first: &GaussianChannel) -> Result<GaussianChannel> {
    if second.t.ncols() != first.t.nrows() {
        return Err(Error::InvalidDimension(format!(
            "composition mismatch: {} vs {}",
            second.t.ncols(),
            first.t.nrows()
        )));
    }
    let t = &second.t * &first.t;
    let n = &second.t * &first.n * second.t.transpose() + &second.n;
    let n = (&n + n.transpose()) * 0.5;
    GaussianChannel::new(t, n, first.in_modes.clone(), second.out_modes.clone())
}

/// Complete positivity: `N + (i/2)(Omega_out - T Omega_in T^T) >= 0`.
pub fn channel_is_cp(ch: &GaussianChannel, tol: f64) -> bool {
    match cp_defect(ch) {
        Ok(min_eig) => min_eig >= -tol,
        Err(_) => false,
    }
}

/// Minimum eigenvalue of the CP matrix (negative means CP violation).
pub fn cp_defect(ch: &GaussianChannel) -> Result<f64> {
    let n_in = ch.in_modes.len();
    let n_out = ch.out_modes.len();
    let omega_in = symplectic_form(n_in)?.data;
    let omega_out = symplectic_form(n_out)?.data;
    let comm = omega_out - &ch.t * omega_in * ch.t.transpose();
    let dim = 2 * n_out;
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            h[(i, j)] = Complex64::new(ch.n[(i, j)], 0.5 * comm[(i, j)]);
        }
    }
    Ok(hermitian_min_eig(&h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::cm::{is_physical_cm, vacuum_cm, ModeKind};
    use approx::assert_relative_eq;

    #[test]
    fn identity_channel_is_cp_and_fixes_states() {
        let id = GaussianChannel::identity(2, ModeKind::Ancilla);
        assert!(channel_is_cp(&id, 1e-12));
        let v = vacuum_cm(2);
        let out = apply_channel(&id, &v).unwrap();
        assert_relative_eq!(out.data, v.data, epsilon = 1e-15);
    }

    #[test]
    fn negative_noise_is_not_cp() {
        let mut ch = GaussianChannel::identity(1, ModeKind::Ancilla);
        ch.n = DMatrix::identity(2, 2) * -0.1;
        assert!(!channel_is_cp(&ch, 1e-12));
    }

    #[test]
    fn pure_loss_fixes_vacuum() {
        let ch = GaussianChannel::loss(&[0.37], ModeKind::Optical).unwrap();
        assert!(channel_is_cp(&ch, 1e-12));
        let out = apply_channel(&ch, &vacuum_cm(1)).unwrap();
        assert_relative_eq!(out.data, vacuum_cm(1).data, epsilon = 1e-14);
        assert!(is_physical_cm(&out, 1e-9).unwrap());
    }

    #[test]
    fn composition_matches_sequential_application() {
        let a = GaussianChannel::loss(&[0.5, 0.8], ModeKind::Optical).unwrap();
        let b = GaussianChannel::loss(&[0.9, 0.6], ModeKind::Optical).unwrap();
        let both = compose(&b, &a).unwrap();
        let v = crate::gaussian::cm::tmsv_cm(0.7);
        let seq = apply_channel(&b, &apply_channel(&a, &v).unwrap()).unwrap();
        let one = apply_channel(&both, &v).unwrap();
        assert_relative_eq!(seq.data, one.data, epsilon = 1e-13);
    }
}
