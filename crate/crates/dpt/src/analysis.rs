//! Entanglement analysis of the transducer channel: squeezer output state
//! and its logarithmic negativity, effective two-mode squeezed lossy state
//! (TMSLS) parameters, Choi-state construction, separability/PPT region
//! classification, and one-mode converter entanglement-breaking thresholds.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::channel::{apply_channel, GaussianChannel};
use crate::gaussian::cm::{tensor_cm, tmsv_cm, vacuum_cm, CovarianceMatrix, ModeKind, ModeLabel};
use crate::gaussian::ppt::{is_ppt, one_mode_eb_check, Partition};
use crate::gaussian::separability::{is_separable_gklc, Separability};
use crate::model::{closed_form_channel, DetuningSign, DptParams, PumpConfig};

/// Finite squeezing used to stand in for the maximally entangled Choi
/// resource; every classification is independent of its value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChoiSqueezing {
    pub r: f64,
}

impl ChoiSqueezing {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidParams(format!(
                "Choi squeezing must be > 0, got {r}"
            )));
        }
        Ok(Self { r })
    }
}

impl Default for ChoiSqueezing {
    fn default() -> Self {
        Self { r: 2.0 }
    }
}

/// Effective two-mode squeezed lossy state parameters of the squeezer output.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TmslsParams {
    pub r_prime: f64,
    /// Effective transmissivity on the blue-detuned (i) side.
    pub tau_prime_i: f64,
    /// Effective transmissivity on the red-detuned (j) side.
    pub tau_prime_j: f64,
}

/// Threshold occupancies of the beamsplitter-type channel.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdReport {
    pub nu_a: f64,
    pub nu_b: f64,
    /// Separability boundary `nu_a + nu_b`.
    pub sep_threshold: f64,
    /// PPT-preservation boundary `max(nu_a, nu_b)`.
    pub ppt_threshold: f64,
}

/// Entanglement capability region of the beamsplitter-type channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    Separable,
    InseparablePptPreserving,
    NonPptPreserving,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub region: Region,
    pub thresholds: ThresholdReport,
    /// `n_th - sep_threshold` (nonnegative iff separable).
    pub margin_sep: f64,
    /// `n_th - ppt_threshold` (negative iff non-PPT-preserving).
    pub margin_ppt: f64,
}

/// Direction of one-mode conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// Microwave in, optical out.
    Upconvert,
    /// Optical in, microwave out.
    Downconvert,
}

/// Effective attenuation parameters of a one-mode converter.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OneModeChannelParams {
    pub direction: Direction,
    pub tau_eff: f64,
    /// Added noise variance per quadrature at the output (vacuum = 1/2).
    pub noise_eff: f64,
}

/// Maps the (i, j) role assignment of the squeezing-type closed forms:
/// i is the blue-detuned side. Returns ((C_i, tau_i, eps_i), (C_j, tau_j,
/// eps_j), blue_is_optical).
fn squeezer_roles(d: &DptParams, pump: PumpConfig) -> Result<((f64, f64, f64), (f64, f64, f64), bool)> {
    if !pump.is_squeezer() {
        return Err(Error::InvalidParams(
            "squeezing-type operation requires opposite pump detunings".into(),
        ));
    }
    let a = (d.c_a, d.tau_a, d.eps_a);
    let b = (d.c_b, d.tau_b, d.eps_b);
    if pump.sigma_a == DetuningSign::Blue {
        Ok((a, b, true))
    } else {
        Ok((b, a, false))
    }
}

/// Output state of the squeezing-type interaction with vacuum inputs:
/// `V = T (I_4/2) T^T + N`.
pub fn squeezer_output(d: &DptParams, pump: PumpConfig) -> Result<CovarianceMatrix> {
    squeezer_roles(d, pump)?;
    let ch = closed_form_channel(d, pump)?;
    apply_channel(&ch, &vacuum_cm(2))
}

/// Closed-form logarithmic negativity of the squeezer output across the
/// optical-microwave split.
pub fn squeezer_log_negativity(d: &DptParams, pump: PumpConfig) -> Result<f64> {
    let ((ci, ti, ei), (cj, tj, ej), _) = squeezer_roles(d, pump)?;
    let nth = d.n_th;
    let x = |k: i32| {
        ci * ei * ti * (cj + nth + 1.0).powi(k) + cj * ej * tj * (ci + nth).powi(k)
    };
    let denom = (1.0 - ci + cj).powi(2);
    if denom == 0.0 {
        return Err(Error::PoleProximity {
            margin: 0.0,
            guard: crate::model::DEFAULT_POLE_GUARD,
        });
    }
    let arg = 1.0 + 4.0 * (x(1) - (x(0) * x(2)).sqrt()) / denom;
    if arg <= 0.0 {
        return Err(Error::ModelInconsistency(format!(
            "nonpositive log-negativity argument {arg}"
        )));
    }
    Ok(-arg.ln())
}

/// Effective TMSLS parameters of the squeezer output.
pub fn tmsls_params(d: &DptParams, pump: PumpConfig) -> Result<TmslsParams> {
    let ((ci, ti, ei), (cj, tj, ej), _) = squeezer_roles(d, pump)?;
    if ci <= 0.0 || cj <= 0.0 {
        return Err(Error::DegenerateState(
            "TMSLS parameters require nonzero cooperativities".into(),
        ));
    }
    let nth = d.n_th;
    let pole = (ci - cj - 1.0).powi(2);
    if pole == 0.0 {
        return Err(Error::PoleProximity {
            margin: 0.0,
            guard: crate::model::DEFAULT_POLE_GUARD,
        });
    }
    let cosh_r = 8.0 * (ci + nth) * (cj + nth + 1.0) / pole + 1.0;
    Ok(TmslsParams {
        r_prime: cosh_r.acosh(),
        tau_prime_i: ci * ti * ei / (ci + nth),
        tau_prime_j: cj * tj * ej / (cj + nth + 1.0),
    })
}

/// Rebuilds the squeezer output from its TMSLS parameters: a two-mode
/// squeezed vacuum with `cosh(r') `-variance followed by independent pure
/// losses. `cross_sign` selects the (local-phase) sign of the x-x
/// correlation; `blue_is_optical` fixes which output mode carries `tau_i`.
pub fn tmsls_reconstruct(
    t: &TmslsParams,
    cross_sign: f64,
    blue_is_optical: bool,
) -> Result<CovarianceMatrix> {
    // tmsv_cm(s) has diagonal cosh(2s)/2, so s = r'/2 reproduces cosh(r')/2
    let seed = tmsv_cm(cross_sign.signum() * t.r_prime / 2.0);
    let (tau_opt, tau_mw) = if blue_is_optical {
        (t.tau_prime_i, t.tau_prime_j)
    } else {
        (t.tau_prime_j, t.tau_prime_i)
    };
    let loss = GaussianChannel::loss(&[tau_opt, tau_mw], ModeKind::Optical)?;
    apply_channel(&loss, &seed)
}

/// Choi covariance matrix of a two-mode channel: four modes ordered
/// `A2 A1 B1 B2`, the channel acting on `(A1, B1)`, each pair seeded with a
/// two-mode squeezed vacuum of parameter `r`.
pub fn choi_cm(ch: &GaussianChannel, r: ChoiSqueezing) -> Result<CovarianceMatrix> {
    if ch.in_modes.len() != 2 || ch.out_modes.len() != 2 {
        return Err(Error::InvalidChannel(
            "Choi construction expects a two-mode channel".into(),
        ));
    }
    // V_in blocks carry cosh(r) on the diagonal: tmsv_cm(r/2) in this
    // crate's squeezing convention. First pair (A2, A1), second (B1, B2).
    let pair = tmsv_cm(r.r / 2.0);
    let v_in = tensor_cm(&pair, &pair);

    let mut t_big = DMatrix::identity(8, 8);
    t_big.view_mut((2, 2), (4, 4)).copy_from(&ch.t);
    let mut n_big = DMatrix::zeros(8, 8);
    n_big.view_mut((2, 2), (4, 4)).copy_from(&ch.n);

    let data = &t_big * &v_in.data * t_big.transpose() + &n_big;
    let data = (&data + data.transpose()) * 0.5;
    let modes = vec![
        ModeLabel::new(0, ModeKind::Ancilla),
        ModeLabel::new(1, ModeKind::Optical),
        ModeLabel::new(2, ModeKind::Microwave),
        ModeLabel::new(3, ModeKind::Ancilla),
    ];
    CovarianceMatrix::new(modes, data)
}

/// The A-B bipartition of a Choi state built by [`choi_cm`].
pub fn choi_partition() -> Partition {
    Partition::new(&[0, 1], &[2, 3], 4).expect("static partition is valid")
}

/// Threshold occupancies `nu_i = delta_i tau_i C_i / (1 - delta_i eps_i
/// (1 - 2 tau_i)^2)`; an exactly vanishing denominator gives an infinite
/// threshold.
pub fn thresholds(d: &DptParams) -> Result<ThresholdReport> {
    d.validate()?;
    let nu = |delta: f64, eps: f64, tau: f64, c: f64| -> f64 {
        let num = delta * tau * c;
        if num == 0.0 {
            return 0.0;
        }
        let den = 1.0 - delta * eps * (1.0 - 2.0 * tau).powi(2);
        if den <= 0.0 {
            f64::INFINITY
        } else {
            num / den
        }
    };
    let nu_a = nu(d.delta_a, d.eps_a, d.tau_a, d.c_a);
    let nu_b = nu(d.delta_b, d.eps_b, d.tau_b, d.c_b);
    Ok(ThresholdReport {
        nu_a,
        nu_b,
        sep_threshold: nu_a + nu_b,
        ppt_threshold: nu_a.max(nu_b),
    })
}

/// Classifies the beamsplitter-type channel at the device's `n_th`.
pub fn classify(d: &DptParams) -> Result<RegionReport> {
    let th = thresholds(d)?;
    let region = if d.n_th >= th.sep_threshold {
        Region::Separable
    } else if d.n_th >= th.ppt_threshold {
        Region::InseparablePptPreserving
    } else {
        Region::NonPptPreserving
    };
    Ok(RegionReport {
        region,
        thresholds: th,
        margin_sep: d.n_th - th.sep_threshold,
        margin_ppt: d.n_th - th.ppt_threshold,
    })
}

/// Which boundary [`locate_threshold`] bisects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Ppt,
    Separability,
}

/// A numerically located boundary crossing in `n_th`.
#[derive(Debug, Clone, Copy)]
pub struct LocatedThreshold {
    pub crossing: f64,
    /// Half-width of the final bracket (widened if the separability engine
    /// returned Undecided inside it).
    pub achieved_tol: f64,
}

/// Locates the PPT or separability boundary of the beamsplitter-type Choi
/// state by bisection in `n_th`, independently of the closed forms.
pub fn verify_threshold_numerically(
    d: &DptParams,
    r: ChoiSqueezing,
    which: BoundaryKind,
) -> Result<LocatedThreshold> {
    let pump = PumpConfig::beamsplitter();
    let probe = |n_th: f64| -> Result<Option<bool>> {
        let mut dd = d.clone();
        dd.n_th = n_th;
        let choi = choi_cm(&closed_form_channel(&dd, pump)?, r)?;
        let part = choi_partition();
        match which {
            BoundaryKind::Ppt => Ok(Some(is_ppt(&choi, &part, 1e-10)?)),
            BoundaryKind::Separability => match is_separable_gklc(&choi, &part, 1e-10, 500)? {
                Separability::Separable => Ok(Some(true)),
                Separability::Entangled => Ok(Some(false)),
                Separability::Undecided => Ok(None),
            },
        }
    };

    // bracket: below at n_th = 0, above by doubling
    if probe(0.0)? != Some(false) {
        return Err(Error::InvalidParams(
            "no crossing: channel already above the boundary at n_th = 0".into(),
        ));
    }
    let mut hi = 1.0;
    let mut tries = 0;
    while probe(hi)? != Some(true) {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::InvalidParams("boundary bracket not found".into()));
        }
    }
    let mut lo = 0.0;
    let rel_target = match which {
        BoundaryKind::Ppt => 1e-9,
        BoundaryKind::Separability => 1e-5,
    };
    while (hi - lo) > rel_target * hi.max(1e-3) {
        let mid = 0.5 * (lo + hi);
        match probe(mid)? {
            Some(true) => hi = mid,
            Some(false) => lo = mid,
            None => {
                // undecided band straddles the boundary: report the bracket
                return Ok(LocatedThreshold {
                    crossing: mid,
                    achieved_tol: 0.5 * (hi - lo),
                });
            }
        }
    }
    Ok(LocatedThreshold {
        crossing: 0.5 * (lo + hi),
        achieved_tol: 0.5 * (hi - lo),
    })
}

/// One-mode channel blocks of a two-mode channel: `(t_io, noise_matrix)`
/// where the unused input is in vacuum and the unused output is traced out.
pub(crate) fn one_mode_blocks(
    ch: &GaussianChannel,
    direction: Direction,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let (out_row, in_col) = match direction {
        Direction::Upconvert => (0, 2),   // microwave in, optical out
        Direction::Downconvert => (2, 0), // optical in, microwave out
    };
    let unused_col = 2 - in_col;
    let t_io = ch.t.view((out_row, in_col), (2, 2)).into_owned();
    let t_unused = ch.t.view((out_row, unused_col), (2, 2)).into_owned();
    let n_out = ch.n.view((out_row, out_row), (2, 2)).into_owned();
    let noise = &t_unused * t_unused.transpose() * 0.5 + n_out;
    (t_io, (&noise + noise.transpose()) * 0.5)
}

/// Reduces a two-mode channel to its one-mode converter, deriving the
/// effective transmissivity and added noise directly from the `(T, N)`
/// blocks.
pub fn reduce_one_mode(
    ch: &GaussianChannel,
    direction: Direction,
) -> Result<OneModeChannelParams> {
    let (t_io, noise) = one_mode_blocks(ch, direction);
    let scale = 1.0 + t_io.amax() + noise.amax();
    let tol = 1e-9 * scale;
    let phase_defect = (t_io[(0, 0)] - t_io[(1, 1)])
        .abs()
        .max(t_io[(0, 1)].abs())
        .max(t_io[(1, 0)].abs())
        .max((noise[(0, 0)] - noise[(1, 1)]).abs())
        .max(noise[(0, 1)].abs());
    if phase_defect > tol {
        return Err(Error::NotPhaseInsensitive(phase_defect));
    }
    let amp = 0.5 * (t_io[(0, 0)] + t_io[(1, 1)]);
    Ok(OneModeChannelParams {
        direction,
        tau_eff: amp * amp,
        noise_eff: 0.5 * (noise[(0, 0)] + noise[(1, 1)]),
    })
}

/// Entanglement-breaking test of a one-mode Gaussian channel `(t, n)` via
/// the PPT criterion on its two-mode Choi state (exact for 1x1 modes).
pub fn one_mode_channel_is_eb_choi(
    t_io: &DMatrix<f64>,
    noise: &DMatrix<f64>,
    r: ChoiSqueezing,
) -> Result<bool> {
    let seed = tmsv_cm(r.r / 2.0);
    let mut t_big = DMatrix::identity(4, 4);
    t_big.view_mut((2, 2), (2, 2)).copy_from(t_io);
    let mut n_big = DMatrix::zeros(4, 4);
    n_big.view_mut((2, 2), (2, 2)).copy_from(noise);
    let data = &t_big * &seed.data * t_big.transpose() + &n_big;
    let data = (&data + data.transpose()) * 0.5;
    let v = CovarianceMatrix::new(seed.modes.clone(), data)?;
    is_ppt(&v, &Partition::new(&[0], &[1], 2)?, 1e-10)
}

/// Whether the one-mode converter in the given direction is entanglement
/// breaking.
///
/// Beamsplitter-type: decided by the attenuation-channel criterion on the
/// reduced `(tau_eff, noise_eff)`. Squeezing-type: decided by the Choi-PPT
/// test on the reduced (phase-conjugating) channel.
pub fn converter_is_eb(d: &DptParams, pump: PumpConfig, direction: Direction) -> Result<bool> {
    let ch = closed_form_channel(d, pump)?;
    if pump.is_beamsplitter() {
        let params = reduce_one_mode(&ch, direction)?;
        one_mode_eb_check(params.tau_eff.max(f64::MIN_POSITIVE), params.noise_eff, 1e-10)
    } else {
        let (t_io, noise) = one_mode_blocks(&ch, direction);
        one_mode_channel_is_eb_choi(&t_io, &noise, ChoiSqueezing::default())
    }
}

/// Closed-form entanglement-breaking boundary in `n_th` for a
/// beamsplitter-type converter: `tau_b delta_b C_b` (up) or
/// `tau_a delta_a C_a` (down).
pub fn eb_threshold(d: &DptParams, direction: Direction) -> f64 {
    match direction {
        Direction::Upconvert => d.tau_b * d.delta_b * d.c_b,
        Direction::Downconvert => d.tau_a * d.delta_a * d.c_a,
    }
}
