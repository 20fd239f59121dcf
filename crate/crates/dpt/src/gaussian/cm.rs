//! Covariance matrices over labeled bosonic modes.
//!
//! Conventions pinned once and used everywhere:
//! * quadrature ordering is interleaved per mode, `(x0, p0, x1, p1, ...)`;
//! * vacuum variance is 1/2 per quadrature;
//! * the symplectic form `Omega` is unit-normalized (no folded 1/2), so
//!   physicality reads `V + (i/2) Omega >= 0`, equivalently all symplectic
//!   eigenvalues >= 1/2.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default absolute tolerance on eigenvalue-based positivity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Symmetry tolerance enforced on construction.
const SYMMETRY_TOL: f64 = 1e-12;

/// Role of a mode within a larger circuit. Only used for bookkeeping and
/// report labeling; the algebra never branches on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeKind {
    Optical,
    Microwave,
    Mediator,
    Ancilla,
    Environment,
}

/// A mode slot in a covariance matrix: contiguous index plus physical role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeLabel {
    pub index: usize,
    pub kind: ModeKind,
}

impl ModeLabel {
    pub fn new(index: usize, kind: ModeKind) -> Self {
        Self { index, kind }
    }
}

/// The symplectic form: block direct sum of `[[0, 1], [-1, 0]]`.
#[derive(Debug, Clone)]
pub struct SymplecticForm {
    pub n: usize,
    pub data: DMatrix<f64>,
}

/// Returns the 2n x 2n symplectic form for `n` modes.
pub fn symplectic_form(n: usize) -> Result<SymplecticForm> {
    if n == 0 {
        return Err(Error::InvalidDimension("mode count must be >= 1".into()));
    }
    let mut data = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        data[(2 * k, 2 * k + 1)] = 1.0;
        data[(2 * k + 1, 2 * k)] = -1.0;
    }
    Ok(SymplecticForm { n, data })
}

/// Real symmetric 2n x 2n second-moment matrix over an ordered mode list.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    pub modes: Vec<ModeLabel>,
    pub data: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Builds a covariance matrix, symmetrizing the input. Rejects matrices
    /// whose asymmetry exceeds 1e-12 or whose entries are non-finite.
    pub fn new(modes: Vec<ModeLabel>, data: DMatrix<f64>) -> Result<Self> {
        let dim = 2 * modes.len();
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::InvalidDimension(format!(
                "expected {dim}x{dim} data for {} modes, got {}x{}",
                modes.len(),
                data.nrows(),
                data.ncols()
            )));
        }
        for (i, m) in modes.iter().enumerate() {
            if m.index != i {
                return Err(Error::InvalidPartition(format!(
                    "mode indices must be contiguous from 0, got {} at slot {i}",
                    m.index
                )));
            }
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        let asym = (&data - data.transpose()).abs().max();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidMatrix(format!(
                "asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:.0e}"
            )));
        }
        let sym = (&data + data.transpose()) * 0.5;
        Ok(Self { modes, data: sym })
    }

    /// Number of modes.
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// Full quadrature dimension 2n.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }
}

fn anonymous_modes(n: usize, kind: ModeKind) -> Vec<ModeLabel> {
    (0..n).map(|i| ModeLabel::new(i, kind)).collect()
}

/// Vacuum state on `n` modes: V = I/2.
pub fn vacuum_cm(n: usize) -> CovarianceMatrix {
    CovarianceMatrix::new(
        anonymous_modes(n, ModeKind::Ancilla),
        DMatrix::identity(2 * n, 2 * n) * 0.5,
    )
    .expect("vacuum is well formed")
}

/// Single-mode thermal state with occupancy `n_occ`: V = (n_occ + 1/2) I.
pub fn thermal_cm(n_occ: f64) -> CovarianceMatrix {
    CovarianceMatrix::new(
        anonymous_modes(1, ModeKind::Ancilla),
        DMatrix::identity(2, 2) * (n_occ + 0.5),
    )
    .expect("thermal is well formed")
}

/// Two-mode squeezed vacuum with squeezing parameter `r`:
/// diagonal blocks `cosh(2r)/2 * I`, off-diagonal `sinh(2r)/2 * Z`.
pub fn tmsv_cm(r: f64) -> CovarianceMatrix {
    let ch = (2.0 * r).cosh() * 0.5;
    let sh = (2.0 * r).sinh() * 0.5;
    let data = DMatrix::from_row_slice(
        4,
        4,
        &[
            ch, 0.0, sh, 0.0, //
            0.0, ch, 0.0, -sh, //
            sh, 0.0, ch, 0.0, //
            0.0, -sh, 0.0, ch,
        ],
    );
    CovarianceMatrix::new(anonymous_modes(2, ModeKind::Ancilla), data)
        .expect("tmsv is well formed")
}

/// Symplectic eigenvalues of `V`: the nonnegative moduli of the eigenvalues
/// of `i Omega V`, sorted ascending (one per mode).
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<Vec<f64>> {
    symplectic_eigenvalues_raw(&v.data)
}

/// Same as [`symplectic_eigenvalues`] but on a bare matrix (used internally
/// on partial transposes, which are not physical states).
pub fn symplectic_eigenvalues_raw(data: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = data.nrows();
    if dim % 2 != 0 || dim == 0 || data.ncols() != dim {
        return Err(Error::InvalidDimension(format!(
            "need even square dimension, got {}x{}",
            data.nrows(),
            data.ncols()
        )));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    let n = dim / 2;
    let omega = symplectic_form(n)?.data;
    // eig(Omega V) comes in +- i*nu pairs; the moduli pair up exactly.
    let eigs = (omega * data).complex_eigenvalues();
    let mut moduli: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nus = (0..n)
        .map(|k| 0.5 * (moduli[2 * k] + moduli[2 * k + 1]))
        .collect();
    Ok(nus)
}

/// True iff the minimum symplectic eigenvalue is >= 1/2 - tol.
pub fn is_physical_cm(v: &CovarianceMatrix, tol: f64) -> Result<bool> {
    let nus = symplectic_eigenvalues(v)?;
    Ok(nus[0] >= 0.5 - tol)
}

/// Block direct sum of two states, relabeling modes contiguously.
pub fn tensor_cm(v1: &CovarianceMatrix, v2: &CovarianceMatrix) -> CovarianceMatrix {
    let n1 = v1.n_modes();
    let n2 = v2.n_modes();
    let mut data = DMatrix::zeros(2 * (n1 + n2), 2 * (n1 + n2));
    data.view_mut((0, 0), (2 * n1, 2 * n1)).copy_from(&v1.data);
    data.view_mut((2 * n1, 2 * n1), (2 * n2, 2 * n2))
        .copy_from(&v2.data);
    let mut modes = Vec::with_capacity(n1 + n2);
    for (i, m) in v1.modes.iter().chain(v2.modes.iter()).enumerate() {
        modes.push(ModeLabel::new(i, m.kind));
    }
    CovarianceMatrix::new(modes, data).expect("direct sum preserves symmetry")
}

/// Principal submatrix on the kept modes (reduced state).
pub fn partial_trace(v: &CovarianceMatrix, keep: &[usize]) -> Result<CovarianceMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidPartition("keep set is empty".into()));
    }
    let n = v.n_modes();
    let mut seen = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(Error::InvalidPartition(format!(
                "mode {k} out of range for {n} modes"
            )));
        }
        if seen[k] {
            return Err(Error::InvalidPartition(format!("mode {k} repeated")));
        }
        seen[k] = true;
    }
    let dim = 2 * keep.len();
    let mut data = DMatrix::zeros(dim, dim);
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            for qi in 0..2 {
                for qj in 0..2 {
                    data[(2 * a + qi, 2 * b + qj)] = v.data[(2 * i + qi, 2 * j + qj)];
                }
            }
        }
    }
    let modes = keep
        .iter()
        .enumerate()
        .map(|(a, &i)| ModeLabel::new(a, v.modes[i].kind))
        .collect();
    CovarianceMatrix::new(modes, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn symplectic_form_small() {
        let o1 = symplectic_form(1).unwrap().data;
        assert_eq!(o1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let o2 = symplectic_form(2).unwrap().data;
        assert_eq!(o2[(0, 1)], 1.0);
        assert_eq!(o2[(2, 3)], 1.0);
        assert_eq!(o2[(3, 2)], -1.0);
        assert_eq!(o2[(0, 2)], 0.0);
        // Omega * Omega^T = I
        let prod = &o2 * o2.transpose();
        assert_relative_eq!(prod, DMatrix::identity(4, 4), epsilon = 1e-15);
        assert!(symplectic_form(0).is_err());
    }

    #[test]
    fn vacuum_and_thermal_are_physical() {
        assert!(is_physical_cm(&vacuum_cm(1), 1e-12).unwrap());
        assert!(is_physical_cm(&vacuum_cm(3), 1e-12).unwrap());
        assert!(is_physical_cm(&thermal_cm(2.0), 1e-12).unwrap());
        let below = CovarianceMatrix::new(
            vec![ModeLabel::new(0, ModeKind::Ancilla)],
            DMatrix::identity(2, 2) * 0.4,
        )
        .unwrap();
        assert!(!is_physical_cm(&below, 1e-12).unwrap());
    }

    #[test]
    fn symplectic_eigenvalues_known() {
        assert_relative_eq!(
            symplectic_eigenvalues(&vacuum_cm(1)).unwrap()[0],
            0.5,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            symplectic_eigenvalues(&thermal_cm(1.0)).unwrap()[0],
            1.5,
            epsilon = 1e-12
        );
        // TMSV is pure: both symplectic eigenvalues 1/2; oracle det(2V) = 1.
        let v = tmsv_cm(1.0);
        let det = (v.data.clone() * 2.0).determinant();
        assert_relative_eq!(det, 1.0, epsilon = 1e-9);
        let nus = symplectic_eigenvalues(&v).unwrap();
        assert_relative_eq!(nus[0], 0.5, epsilon = 1e-9);
        assert_relative_eq!(nus[1], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn tensor_and_partial_trace_roundtrip() {
        let v1 = thermal_cm(0.7);
        let v2 = vacuum_cm(1);
        let joint = tensor_cm(&v1, &v2);
        assert_eq!(joint.dim(), 4);
        let back = partial_trace(&joint, &[0]).unwrap();
        assert_relative_eq!(back.data, v1.data, epsilon = 1e-14);
        // vacuum (x) vacuum = I4/2
        let vv = tensor_cm(&vacuum_cm(1), &vacuum_cm(1));
        assert_relative_eq!(vv.data, DMatrix::identity(4, 4) * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn tmsv_reduced_state_is_thermal() {
        // oracle: direct construction, reduced variance cosh(2r)/2
        let r = 0.8;
        let reduced = partial_trace(&tmsv_cm(r), &[1]).unwrap();
        let expect = (2.0 * r).cosh() * 0.5;
        assert_relative_eq!(reduced.data[(0, 0)], expect, epsilon = 1e-12);
        assert_relative_eq!(reduced.data[(1, 1)], expect, epsilon = 1e-12);
        assert_relative_eq!(reduced.data[(0, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_keep() {
        let v = vacuum_cm(2);
        assert!(partial_trace(&v, &[]).is_err());
        assert!(partial_trace(&v, &[5]).is_err());
        assert!(partial_trace(&v, &[0, 0]).is_err());
    }

    #[test]
    fn construction_rejects_asymmetric_and_nonfinite() {
        let mut bad = DMatrix::identity(2, 2) * 0.5;
        bad[(0, 1)] = 1e-6;
        assert!(CovarianceMatrix::new(vec![ModeLabel::new(0, ModeKind::Ancilla)], bad).is_err());
        let mut nan = DMatrix::identity(2, 2) * 0.5;
        nan[(0, 0)] = f64::NAN;
        assert!(CovarianceMatrix::new(vec![ModeLabel::new(0, ModeKind::Ancilla)], nan).is_err());
    }
}
