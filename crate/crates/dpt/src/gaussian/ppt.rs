//! Partial transposition, the PPT criterion, and logarithmic negativity.

use nalgebra::DMatrix;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gaussian::cm::{
    is_physical_cm, symplectic_eigenvalues_raw, CovarianceMatrix,
};

/// A bipartition of the modes of a covariance matrix.
#[derive(Debug, Clone)]
pub struct Partition {
    pub side_a: BTreeSet<usize>,
    pub side_b: BTreeSet<usize>,
}

impl Partition {
    /// Builds a partition, checking disjointness and coverage of `0..n_modes`.
    pub fn new(side_a: &[usize], side_b: &[usize], n_modes: usize) -> Result<Self> {
        let a: BTreeSet<usize> = side_a.iter().copied().collect();
        let b: BTreeSet<usize> = side_b.iter().copied().collect();
        if a.len() != side_a.len() || b.len() != side_b.len() {
            return Err(Error::InvalidPartition("repeated mode index".into()));
        }
        if !a.is_disjoint(&b) {
            return Err(Error::InvalidPartition("sides overlap".into()));
        }
        if a.len() + b.len() != n_modes || a.union(&b).any(|&i| i >= n_modes) {
            return Err(Error::InvalidPartition(format!(
                "sides must cover exactly modes 0..{n_modes}"
            )));
        }
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidPartition("empty side".into()));
        }
        Ok(Self { side_a: a, side_b: b })
    }
}

/// Partial transpose: flips the p quadrature of every side-A mode,
/// `P V P^T` with `P = diag(Z2 on side A, I2 elsewhere)`.
pub fn partial_transpose(v: &CovarianceMatrix, part: &Partition) -> Result<CovarianceMatrix> {
    if part.side_a.len() + part.side_b.len() != v.n_modes() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} modes, state has {}",
            part.side_a.len() + part.side_b.len(),
            v.n_modes()
        )));
    }
    let mut p = DMatrix::identity(v.dim(), v.dim());
    for &k in &part.side_a {
        p[(2 * k + 1, 2 * k + 1)] = -1.0;
    }
    let data = &p * &v.data * p.transpose();
    CovarianceMatrix::new(v.modes.clone(), data)
}

/// PPT test: all symplectic eigenvalues of the partial transpose >= 1/2 - tol.
pub fn is_ppt(v: &CovarianceMatrix, part: &Partition, tol: f64) -> Result<bool> {
    if !is_physical_cm(v, tol.max(1e-9))? {
        return Err(Error::InvalidState("PPT test requires a physical state".into()));
    }
    let pt = partial_transpose(v, part)?;
    let nus = symplectic_eigenvalues_raw(&pt.data)?;
    Ok(nus[0] >= 0.5 - tol)
}

/// Logarithmic negativity across the partition:
/// sum of `-ln(2 nu)` over partial-transpose symplectic eigenvalues below 1/2.
pub fn log_negativity(v: &CovarianceMatrix, part: &Partition) -> Result<f64> {
    if !is_physical_cm(v, 1e-9)? {
        return Err(Error::InvalidState(
            "log negativity requires a physical state".into(),
        ));
    }
    let pt = partial_transpose(v, part)?;
    let nus = symplectic_eigenvalues_raw(&pt.data)?;
    Ok(nus
        .iter()
        .filter(|&&nu| nu < 0.5)
        .map(|&nu| -(2.0 * nu).ln())
        .sum())
}

/// Entanglement-breaking test for a phase-insensitive attenuation channel
/// `x -> sqrt(tau) x` with added noise variance `noise_eff` per quadrature:
/// EB iff `noise_eff >= (1 + tau)/2 - tol`.
pub fn one_mode_eb_check(tau_eff: f64, noise_eff: f64, tol: f64) -> Result<bool> {
    if !(0.0 < tau_eff && tau_eff <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "tau_eff {tau_eff} out of (0, 1]"
        )));
    }
    if noise_eff < (1.0 - tau_eff) * 0.5 - tol {
        return Err(Error::InvalidChannel(format!(
            "noise {noise_eff} below CP bound {}",
            (1.0 - tau_eff) * 0.5
        )));
    }
    Ok(noise_eff >= (1.0 + tau_eff) * 0.5 - tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::cm::{tensor_cm, thermal_cm, tmsv_cm, vacuum_cm};
    use approx::assert_relative_eq;

    fn split_1x1() -> Partition {
        Partition::new(&[0], &[1], 2).unwrap()
    }

    #[test]
    fn product_state_stays_ppt() {
        let v = tensor_cm(&thermal_cm(0.3), &vacuum_cm(1));
        assert!(is_ppt(&v, &split_1x1(), 1e-10).unwrap());
        assert_relative_eq!(
            log_negativity(&v, &split_1x1()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn tmsv_pt_min_eigenvalue_is_closed_form() {
        // oracle: direct diagonalization gives e^{-2r}/2
        let r = 1.0;
        let pt = partial_transpose(&tmsv_cm(r), &split_1x1()).unwrap();
        let nus = symplectic_eigenvalues_raw(&pt.data).unwrap();
        assert_relative_eq!(nus[0], (-2.0 * r).exp() * 0.5, epsilon = 1e-9);
        assert!(!is_ppt(&tmsv_cm(r), &split_1x1(), 1e-10).unwrap());
    }

    #[test]
    fn tmsv_log_negativity_is_2r() {
        for &r in &[0.3, 1.0, 2.0] {
            assert_relative_eq!(
                log_negativity(&tmsv_cm(r), &split_1x1()).unwrap(),
                2.0 * r,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn partial_transpose_is_involution() {
        let v = tmsv_cm(0.9);
        let part = split_1x1();
        let twice = partial_transpose(&partial_transpose(&v, &part).unwrap(), &part).unwrap();
        assert_relative_eq!(twice.data, v.data, epsilon = 1e-14);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(&[0], &[0], 2).is_err());
        assert!(Partition::new(&[0], &[2], 2).is_err());
        assert!(Partition::new(&[0, 1], &[], 2).is_err());
        assert!(Partition::new(&[0], &[1, 2], 3).is_ok());
    }

    #[test]
    fn eb_check_limits() {
        // pure loss is never EB
        for &tau in &[0.1, 0.5, 1.0] {
            assert!(!one_mode_eb_check(tau, (1.0 - tau) * 0.5, 1e-12).unwrap());
        }
        // spec spot values: the tau = 4/9 device
        assert!(one_mode_eb_check(4.0 / 9.0, 13.0 / 18.0, 1e-12).unwrap());
        assert!(!one_mode_eb_check(4.0 / 9.0, 5.0 / 18.0, 1e-12).unwrap());
        // CP violation is rejected
        assert!(one_mode_eb_check(0.5, 0.1, 1e-12).is_err());
    }
}
