//! Bipartite Gaussian separability via the nonlinear Schur-complement
//! iteration of Giedke, Kraus, Lewenstein, and Cirac.
//!
//! A Gaussian state with covariance matrix `V` is separable across a
//! bipartition iff there exist physical `gamma_A`, `gamma_B` with
//! `V >= gamma_A (+) gamma_B`. In the vacuum-variance-1 convention
//! (`gamma = 2V`, physicality `gamma >= iJ`), the iteration
//!
//! ```text
//! X_N = C_N (B_N - iJ_B)^{-1} C_N^T
//! A_{N+1} = B_{N+1} = A_N - Re(X_N),   C_{N+1} = -Im(X_N)
//! ```
//!
//! preserves the answer and converges; at each step
//! * `A_N - iJ_A` not PSD        => entangled,
//! * `A_N - ||C_N|| I - iJ_A` PSD => separable.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::channel::hermitian_min_eig;
use crate::gaussian::cm::{is_physical_cm, symplectic_form, CovarianceMatrix};
use crate::gaussian::ppt::Partition;

type CMatrix = DMatrix<Complex64>;

/// Outcome of the separability decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Separability {
    Separable,
    Entangled,
    /// Iteration budget exhausted with the state within `tol` of the boundary.
    Undecided,
}

fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Hermitian `M - iJ` for real symmetric `M` and real antisymmetric `J`.
fn minus_i_j(m: &DMatrix<f64>, j: &DMatrix<f64>) -> CMatrix {
    let dim = m.nrows();
    let mut h = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            h[(r, c)] = Complex64::new(m[(r, c)], -j[(r, c)]);
        }
    }
    h
}

fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.amax() == 0.0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Reorders quadratures so the side-A modes come first, returning the
/// permuted matrix in the vacuum-variance-1 convention (`2V`).
fn reordered_gamma(v: &CovarianceMatrix, part: &Partition) -> DMatrix<f64> {
    let order: Vec<usize> = part
        .side_a
        .iter()
        .chain(part.side_b.iter())
        .copied()
        .collect();
    let dim = v.dim();
    let mut g = DMatrix::zeros(dim, dim);
    for (a, &i) in order.iter().enumerate() {
        for (b, &j) in order.iter().enumerate() {
            for qi in 0..2 {
                for qj in 0..2 {
                    g[(2 * a + qi, 2 * b + qj)] = 2.0 * v.data[(2 * i + qi, 2 * j + qj)];
                }
            }
        }
    }
    g
}

/// Decides Gaussian separability of `V` across `part`.
///
/// Sound in both directions: `Separable` and `Entangled` are certificates;
/// `Undecided` is returned only when `max_iter` runs out with the state
/// within roughly `tol` of the separable boundary.
pub fn is_separable_gklc(
    v: &CovarianceMatrix,
    part: &Partition,
    tol: f64,
    max_iter: usize,
) -> Result<Separability> {
    if !is_physical_cm(v, 1e-9)? {
        return Err(Error::InvalidState(
            "separability test requires a physical state".into(),
        ));
    }
    if part.side_a.len() + part.side_b.len() != v.n_modes() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} modes, state has {}",
            part.side_a.len() + part.side_b.len(),
            v.n_modes()
        )));
    }
    let na = part.side_a.len();
    let nb = part.side_b.len();
    let gamma = reordered_gamma(v, part);

    let j_a = symplectic_form(na)?.data;
    let mut j_b = symplectic_form(nb)?.data;

    let mut a = gamma.view((0, 0), (2 * na, 2 * na)).into_owned();
    let mut b = gamma.view((2 * na, 2 * na), (2 * nb, 2 * nb)).into_owned();
    let mut c = gamma.view((0, 2 * na), (2 * na, 2 * nb)).into_owned();

    for _ in 0..max_iter {
        // Entanglement certificate: the A block itself must stay physical.
        let a_min = hermitian_min_eig(&minus_i_j(&a, &j_a));
        if a_min < -tol {
            return Ok(Separability::Entangled);
        }
        // Separability certificate: enough slack to absorb the coupling.
        let c_norm = operator_norm(&c);
        if c_norm < tol {
            return Ok(Separability::Separable);
        }
        let shifted = &a - DMatrix::identity(2 * na, 2 * na) * c_norm;
        if hermitian_min_eig(&minus_i_j(&shifted, &j_a)) >= -tol {
            return Ok(Separability::Separable);
        }

        // Schur-complement step against the physicality cone of the B side.
        let b_minus = minus_i_j(&b, &j_b);
        let inv = match b_minus.try_inverse() {
            Some(inv) => inv,
            None => {
                // B - iJ singular (locally pure B side); nudge off the cone.
                let jitter = CMatrix::identity(2 * nb, 2 * nb)
                    * Complex64::new(1e-13, 0.0);
                (minus_i_j(&b, &j_b) + jitter).try_inverse().ok_or_else(|| {
                    Error::InvalidMatrix("B - iJ not invertible".into())
                })?
            }
        };
        let x = to_complex(&c) * inv * to_complex(&c).transpose();
        let re_x = x.map(|z| z.re);
        let im_x = x.map(|z| z.im);
        a -= (&re_x + re_x.transpose()) * 0.5;
        b = a.clone();
        c = (im_x.transpose() - &im_x) * 0.5;
        if j_b.nrows() != 2 * na {
            j_b = j_a.clone();
        }
    }
    Ok(Separability::Undecided)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::channel::{apply_channel, GaussianChannel};
    use crate::gaussian::cm::{tensor_cm, thermal_cm, tmsv_cm, vacuum_cm, ModeKind};
    use crate::gaussian::ppt::is_ppt;

    fn split_1x1() -> Partition {
        Partition::new(&[0], &[1], 2).unwrap()
    }

    #[test]
    fn product_states_are_separable() {
        let v = tensor_cm(&vacuum_cm(1), &vacuum_cm(1));
        assert_eq!(
            is_separable_gklc(&v, &split_1x1(), 1e-10, 500).unwrap(),
            Separability::Separable
        );
        let v = tensor_cm(&thermal_cm(1.3), &thermal_cm(0.2));
        assert_eq!(
            is_separable_gklc(&v, &split_1x1(), 1e-10, 500).unwrap(),
            Separability::Separable
        );
    }

    #[test]
    fn tmsv_is_entangled() {
        for &r in &[0.2, 1.0, 2.0] {
            assert_eq!(
                is_separable_gklc(&tmsv_cm(r), &split_1x1(), 1e-10, 500).unwrap(),
                Separability::Entangled
            );
        }
    }

    #[test]
    fn agrees_with_ppt_for_two_mode_states() {
        // For 1x1-mode Gaussian states separability is exactly PPT, so the
        // iteration must agree with the PPT test on lossy TMSV states.
        let part = split_1x1();
        for &r in &[0.4, 1.0] {
            for &tau in &[0.3, 0.7, 0.95] {
                for &extra in &[0.0, 0.3, 1.0, 2.5] {
                    let mut loss = GaussianChannel::loss(&[tau, 1.0], ModeKind::Optical).unwrap();
                    loss.n[(0, 0)] += extra;
                    loss.n[(1, 1)] += extra;
                    let v = apply_channel(&loss, &tmsv_cm(r)).unwrap();
                    let ppt = is_ppt(&v, &part, 1e-10).unwrap();
                    let sep = is_separable_gklc(&v, &part, 1e-10, 500).unwrap();
                    match sep {
                        Separability::Separable => assert!(ppt, "r={r} tau={tau} extra={extra}"),
                        Separability::Entangled => assert!(!ppt, "r={r} tau={tau} extra={extra}"),
                        Separability::Undecided => {
                            panic!("undecided away from boundary: r={r} tau={tau} extra={extra}")
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_unphysical_input() {
        let v = CovarianceMatrix::new(
            vacuum_cm(2).modes.clone(),
            nalgebra::DMatrix::identity(4, 4) * 0.3,
        )
        .unwrap();
        assert!(is_separable_gklc(&v, &split_1x1(), 1e-10, 100).is_err());
    }
}
