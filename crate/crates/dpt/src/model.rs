//! The doubly-parametric transducer model: physical-parameter state space,
//! frequency-domain transfer function, and the two-mode Gaussian channel
//! obtained both numerically and from the closed forms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::channel::{channel_is_cp, compose, GaussianChannel};
use crate::gaussian::cm::{ModeKind, ModeLabel};

type CMatrix = DMatrix<Complex64>;

/// Default guard on `|1 - sigma_a C_a - sigma_b C_b|`; closer approaches to
/// the linearization pole are rejected.
pub const DEFAULT_POLE_GUARD: f64 = 1e-6;

/// Sign of a pump detuning relative to its cavity resonance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetuningSign {
    /// Pump below cavity resonance (`Delta = -omega_m`), anti-Stokes.
    Red,
    /// Pump above cavity resonance (`Delta = +omega_m`), Stokes.
    Blue,
}

impl DetuningSign {
    pub fn sign(self) -> f64 {
        match self {
            DetuningSign::Red => -1.0,
            DetuningSign::Blue => 1.0,
        }
    }
}

/// The two pump-detuning signs selecting the interaction type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PumpConfig {
    pub sigma_a: DetuningSign,
    pub sigma_b: DetuningSign,
}

impl PumpConfig {
    /// Both-blue is outside the model and rejected.
    pub fn new(sigma_a: DetuningSign, sigma_b: DetuningSign) -> Result<Self> {
        if sigma_a == DetuningSign::Blue && sigma_b == DetuningSign::Blue {
            return Err(Error::InvalidParams(
                "both pumps blue detuned is not supported".into(),
            ));
        }
        Ok(Self { sigma_a, sigma_b })
    }

    /// Beamsplitter-type interaction: both pumps red detuned.
    pub fn beamsplitter() -> Self {
        Self {
            sigma_a: DetuningSign::Red,
            sigma_b: DetuningSign::Red,
        }
    }

    /// Squeezing-type interaction with the optical pump blue detuned.
    pub fn squeezer_optical_blue() -> Self {
        Self {
            sigma_a: DetuningSign::Blue,
            sigma_b: DetuningSign::Red,
        }
    }

    /// Squeezing-type interaction with the microwave pump blue detuned.
    pub fn squeezer_microwave_blue() -> Self {
        Self {
            sigma_a: DetuningSign::Red,
            sigma_b: DetuningSign::Blue,
        }
    }

    pub fn is_beamsplitter(self) -> bool {
        self.sigma_a == DetuningSign::Red && self.sigma_b == DetuningSign::Red
    }

    pub fn is_squeezer(self) -> bool {
        self.sigma_a != self.sigma_b
    }
}

/// Physical device parameters in rad/s (plus the dimensionless bath
/// occupancy of the mediating mode).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub kappa_a_c: f64,
    pub kappa_a_e: f64,
    pub kappa_b_c: f64,
    pub kappa_b_e: f64,
    pub gamma_m: f64,
    pub g_a: f64,
    pub g_b: f64,
    pub omega_m: f64,
    pub detuning_a: f64,
    pub detuning_b: f64,
    pub n_th: f64,
}

impl PhysicalParams {
    pub fn kappa_a(&self) -> f64 {
        self.kappa_a_c + self.kappa_a_e
    }

    pub fn kappa_b(&self) -> f64 {
        self.kappa_b_c + self.kappa_b_e
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("kappa_a", self.kappa_a()),
            ("kappa_b", self.kappa_b()),
            ("gamma_m", self.gamma_m),
            ("omega_m", self.omega_m),
        ];
        for (name, r) in rates {
            if !(r > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be > 0, got {r}")));
            }
        }
        for (name, r) in [
            ("kappa_a_c", self.kappa_a_c),
            ("kappa_a_e", self.kappa_a_e),
            ("kappa_b_c", self.kappa_b_c),
            ("kappa_b_e", self.kappa_b_e),
        ] {
            if r < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be >= 0, got {r}")));
            }
        }
        if self.n_th < 0.0 {
            return Err(Error::InvalidParams(format!(
                "n_th must be >= 0, got {}",
                self.n_th
            )));
        }
        Ok(())
    }

    /// Margin of the resolved-sideband usage: `4 omega_m / max(kappa, gamma)`.
    pub fn sideband_margin(&self) -> f64 {
        let fastest = self.kappa_a().max(self.kappa_b()).max(self.gamma_m);
        4.0 * self.omega_m / fastest
    }
}

/// The five dimensionless device parameters plus external pre/post losses.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DptParams {
    pub c_a: f64,
    pub c_b: f64,
    pub tau_a: f64,
    pub tau_b: f64,
    pub n_th: f64,
    #[serde(default = "one")]
    pub delta_a: f64,
    #[serde(default = "one")]
    pub delta_b: f64,
    #[serde(default = "one")]
    pub eps_a: f64,
    #[serde(default = "one")]
    pub eps_b: f64,
}

fn one() -> f64 {
    1.0
}

impl DptParams {
    /// Lossless device: `delta = eps = 1`.
    pub fn lossless(c_a: f64, c_b: f64, tau_a: f64, tau_b: f64, n_th: f64) -> Self {
        Self {
            c_a,
            c_b,
            tau_a,
            tau_b,
            n_th,
            delta_a: 1.0,
            delta_b: 1.0,
            eps_a: 1.0,
            eps_b: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c_a", self.c_a), ("c_b", self.c_b)] {
            if !(v >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be >= 0, got {v}")));
            }
        }
        for (name, v) in [("tau_a", self.tau_a), ("tau_b", self.tau_b)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be in [0, 1], got {v}"
                )));
            }
        }
        for (name, v) in [
            ("delta_a", self.delta_a),
            ("delta_b", self.delta_b),
            ("eps_a", self.eps_a),
            ("eps_b", self.eps_b),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be in (0, 1], got {v}"
                )));
            }
        }
        if !(self.n_th >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "n_th must be >= 0, got {}",
                self.n_th
            )));
        }
        Ok(())
    }
}

/// The state-space matrices of the linearized Heisenberg-Langevin dynamics.
///
/// Operator orderings: internal `(a, b, c, a+, b+, c+)`, inputs
/// `(a_c, a_e, b_c, b_e, c_e, daggers)`, outputs `(a_c, b_c, a_c+, b_c+)`.
#[derive(Debug, Clone)]
pub struct StateSpaceModel {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn im(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

/// Builds the 6/10/4-dimensional state-space model of the device.
pub fn build_state_space(p: &PhysicalParams) -> Result<StateSpaceModel> {
    p.validate()?;
    let (ka, kb) = (p.kappa_a(), p.kappa_b());
    let (ga, gb) = (p.g_a, p.g_b);

    let mut a = CMatrix::zeros(6, 6);
    a[(0, 0)] = im(p.detuning_a) - re(ka / 2.0);
    a[(0, 2)] = im(ga);
    a[(0, 5)] = im(ga);
    a[(1, 1)] = im(p.detuning_b) - re(kb / 2.0);
    a[(1, 2)] = im(gb);
    a[(1, 5)] = im(gb);
    a[(2, 0)] = im(ga);
    a[(2, 1)] = im(gb);
    a[(2, 2)] = -re(p.gamma_m / 2.0) - im(p.omega_m);
    a[(2, 3)] = im(ga);
    a[(2, 4)] = im(gb);
    a[(3, 2)] = im(-ga);
    a[(3, 3)] = im(-p.detuning_a) - re(ka / 2.0);
    a[(3, 5)] = im(-ga);
    a[(4, 2)] = im(-gb);
    a[(4, 4)] = im(-p.detuning_b) - re(kb / 2.0);
    a[(4, 5)] = im(-gb);
    a[(5, 0)] = im(-ga);
    a[(5, 1)] = im(-gb);
    a[(5, 3)] = im(-ga);
    a[(5, 4)] = im(-gb);
    a[(5, 5)] = -re(p.gamma_m / 2.0) + im(p.omega_m);

    let mut b = CMatrix::zeros(6, 10);
    b[(0, 0)] = re(p.kappa_a_c.sqrt());
    b[(0, 1)] = re(p.kappa_a_e.sqrt());
    b[(1, 2)] = re(p.kappa_b_c.sqrt());
    b[(1, 3)] = re(p.kappa_b_e.sqrt());
    b[(2, 4)] = re(p.gamma_m.sqrt());
    b[(3, 5)] = re(p.kappa_a_c.sqrt());
    b[(3, 6)] = re(p.kappa_a_e.sqrt());
    b[(4, 7)] = re(p.kappa_b_c.sqrt());
    b[(4, 8)] = re(p.kappa_b_e.sqrt());
    b[(5, 9)] = re(p.gamma_m.sqrt());

    let mut c = CMatrix::zeros(4, 6);
    c[(0, 0)] = re(p.kappa_a_c.sqrt());
    c[(1, 1)] = re(p.kappa_b_c.sqrt());
    c[(2, 3)] = re(p.kappa_a_c.sqrt());
    c[(3, 4)] = re(p.kappa_b_c.sqrt());

    let mut d = CMatrix::zeros(4, 10);
    d[(0, 0)] = re(-1.0);
    d[(1, 2)] = re(-1.0);
    d[(2, 5)] = re(-1.0);
    d[(3, 7)] = re(-1.0);

    Ok(StateSpaceModel { a, b, c, d })
}

/// Frequency-domain transfer function `Xi(omega) = C (-i w I - A)^{-1} B + D`.
pub fn transfer_function(ss: &StateSpaceModel, omega: f64) -> Result<CMatrix> {
    let resolvent_arg = CMatrix::identity(6, 6) * im(-omega) - &ss.a;
    let inv = resolvent_arg
        .try_inverse()
        .ok_or(Error::SingularResolvent { omega })?;
    Ok(&ss.c * inv * &ss.b + &ss.d)
}

/// Unitary mapping `(a_1..a_m, a_1+..a_m+)` to interleaved quadratures
/// `(x_1, p_1, ..., x_m, p_m)`.
fn quadrature_transform(m: usize) -> CMatrix {
    let s = 1.0 / 2.0_f64.sqrt();
    let mut u = CMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        u[(2 * k, k)] = re(s);
        u[(2 * k, m + k)] = re(s);
        u[(2 * k + 1, k)] = im(-s);
        u[(2 * k + 1, m + k)] = im(s);
    }
    u
}

fn oe_mode_labels() -> Vec<ModeLabel> {
    vec![
        ModeLabel::new(0, ModeKind::Optical),
        ModeLabel::new(1, ModeKind::Microwave),
    ]
}

/// Evaluates the on-resonance transfer matrix in the quadrature basis,
/// column order `(a_c, b_c | a_e, b_e, c_e)` interleaved `x, p`.
///
/// Each itinerant output mode sits at its own sideband: the annihilation row
/// of mode `i` is taken at `omega = -sigma_i * omega_m` (the cavity
/// resonance), the dagger row at the opposite sign.
pub fn on_resonance_xp(p: &PhysicalParams, pump: PumpConfig) -> Result<DMatrix<f64>> {
    let ss = build_state_space(p)?;
    let xi_plus = transfer_function(&ss, p.omega_m)?;
    let xi_minus = transfer_function(&ss, -p.omega_m)?;
    let pick = |sign: f64| if sign > 0.0 { &xi_plus } else { &xi_minus };

    let (sa, sb) = (pump.sigma_a.sign(), pump.sigma_b.sign());
    let mut xi_eff = CMatrix::zeros(4, 10);
    xi_eff.row_mut(0).copy_from(&pick(-sa).row(0));
    xi_eff.row_mut(1).copy_from(&pick(-sb).row(1));
    xi_eff.row_mut(2).copy_from(&pick(sa).row(2));
    xi_eff.row_mut(3).copy_from(&pick(sb).row(3));

    let u_out = quadrature_transform(2);
    let u_in = quadrature_transform(5);
    let xp = u_out * xi_eff * u_in.adjoint();

    // reality of the quadrature-basis matrix is exact by the op/dagger
    // conjugation symmetry of the state space; residue is pure roundoff
    let max_im = xp.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_im > 1e-9 {
        return Err(Error::ModelInconsistency(format!(
            "imaginary residue {max_im:.3e} in quadrature transfer matrix"
        )));
    }
    let real = xp.map(|z| z.re);

    // permute input columns from mode order (a_c, a_e, b_c, b_e, c_e)
    // to (a_c, b_c, a_e, b_e, c_e)
    let col_order = [0usize, 1, 4, 5, 2, 3, 6, 7, 8, 9];
    let mut out = DMatrix::zeros(4, 10);
    for (dst, &src) in col_order.iter().enumerate() {
        out.column_mut(dst).copy_from(&real.column(src));
    }
    Ok(out)
}

/// Two-mode channel from the frequency-domain model: splits the on-resonance
/// quadrature transfer matrix into system columns (`T`) and environment
/// columns (`M`), and sets `N = M Sigma M^T` with the mediator bath at
/// occupancy `n_th`.
pub fn numeric_channel(p: &PhysicalParams, pump: PumpConfig) -> Result<GaussianChannel> {
    let xp = on_resonance_xp(p, pump)?;
    let t = xp.view((0, 0), (4, 4)).into_owned();
    let m = xp.view((0, 4), (4, 6)).into_owned();
    let mut sigma = DMatrix::identity(6, 6) * 0.5;
    sigma[(4, 4)] += p.n_th;
    sigma[(5, 5)] += p.n_th;
    let n = &m * sigma * m.transpose();
    let n = (&n + n.transpose()) * 0.5;
    let ch = GaussianChannel::new(t, n, oe_mode_labels(), oe_mode_labels())?;
    // The mixed-sideband evaluation is exact only in the resolved-sideband
    // limit; a defect far above that scale signals a construction bug.
    if !channel_is_cp(&ch, 1e-6) {
        return Err(Error::ModelInconsistency(
            "numeric channel fails the complete-positivity check".into(),
        ));
    }
    Ok(ch)
}

/// External loss beamsplitters on the itinerant optical and microwave modes.
pub fn loss_pair_channel(tau_opt: f64, tau_mw: f64) -> Result<GaussianChannel> {
    let ch = GaussianChannel::loss(&[tau_opt, tau_mw], ModeKind::Optical)?;
    GaussianChannel::new(ch.t, ch.n, oe_mode_labels(), oe_mode_labels())
}

/// Numeric channel with the external pre-loss (`delta`) and post-loss
/// (`eps`) beamsplitters composed explicitly.
pub fn numeric_channel_with_losses(
    p: &PhysicalParams,
    pump: PumpConfig,
    delta_a: f64,
    delta_b: f64,
    eps_a: f64,
    eps_b: f64,
) -> Result<GaussianChannel> {
    let core = numeric_channel(p, pump)?;
    let pre = loss_pair_channel(delta_a, delta_b)?;
    let post = loss_pair_channel(eps_a, eps_b)?;
    compose(&post, &compose(&core, &pre)?)
}

/// The printed closed forms for `T` and `N` in terms of the dimensionless
/// parameters, with the external losses already folded in.
pub fn closed_form_channel(d: &DptParams, pump: PumpConfig) -> Result<GaussianChannel> {
    closed_form_channel_guarded(d, pump, DEFAULT_POLE_GUARD)
}

/// Same as [`closed_form_channel`] with a configurable pole guard.
pub fn closed_form_channel_guarded(
    d: &DptParams,
    pump: PumpConfig,
    pole_guard: f64,
) -> Result<GaussianChannel> {
    d.validate()?;
    let (sa, sb) = (pump.sigma_a.sign(), pump.sigma_b.sign());
    let (ca, cb) = (d.c_a, d.c_b);
    let (ta, tb) = (d.tau_a, d.tau_b);
    let (da, db) = (d.delta_a, d.delta_b);
    let (ea, eb) = (d.eps_a, d.eps_b);
    let nth = d.n_th;

    let denom = 1.0 - sa * ca - sb * cb;
    if denom.abs() <= pole_guard {
        return Err(Error::PoleProximity {
            margin: denom.abs(),
            guard: pole_guard,
        });
    }

    let taa = (da * ea).sqrt() * (-1.0 + sa * ca + sb * cb + 2.0 * ta * (1.0 - sb * cb)) / denom;
    let tbb = (db * eb).sqrt() * (-1.0 + sa * ca + sb * cb + 2.0 * tb * (1.0 - sa * ca)) / denom;
    let xab = 2.0 * (ea * db * ta * tb * ca * cb).sqrt() / denom;
    let xba = 2.0 * (da * eb * ta * tb * ca * cb).sqrt() / denom;

    let mut t = DMatrix::zeros(4, 4);
    t[(0, 0)] = taa;
    t[(1, 1)] = taa;
    t[(2, 2)] = tbb;
    t[(3, 3)] = tbb;
    t[(0, 2)] = xab * sa;
    t[(1, 3)] = xab * sb;
    t[(2, 0)] = xba * sb;
    t[(3, 1)] = xba * sa;

    let d2 = denom * denom;
    let mu = 1.0
        - ea * (da * (1.0 - sa * ca - sb * cb - 2.0 * ta * (1.0 - sb * cb)).powi(2)
            - 4.0 * ta * ca * (1.0 + sa + 2.0 * nth + cb * (2.0 + sa + sb - db * tb)))
            / d2;
    let nu = 1.0
        - eb * (db * (1.0 - sa * ca - sb * cb - 2.0 * tb * (1.0 - sa * ca)).powi(2)
            - 4.0 * tb * cb * (1.0 + sb + 2.0 * nth + ca * (2.0 + sa + sb - da * ta)))
            / d2;
    let gam = 2.0 * (ea * eb * ta * tb * ca * cb).sqrt() / d2
        * (4.0 * nth
            + (sa * da + sb * db) * denom
            + (1.0 - sa * sb) * (1.0 + ca + cb)
            - 2.0 * sa * da * ta * (1.0 - sb * cb)
            - 2.0 * sb * db * tb * (1.0 - sa * ca));

    let mut n = DMatrix::zeros(4, 4);
    n[(0, 0)] = 0.5 * mu;
    n[(1, 1)] = 0.5 * mu;
    n[(2, 2)] = 0.5 * nu;
    n[(3, 3)] = 0.5 * nu;
    n[(0, 2)] = 0.5 * gam * sa * sb;
    n[(2, 0)] = 0.5 * gam * sa * sb;
    n[(1, 3)] = 0.5 * gam;
    n[(3, 1)] = 0.5 * gam;

    let ch = GaussianChannel::new(t, n, oe_mode_labels(), oe_mode_labels())?;
    if !channel_is_cp(&ch, 1e-9) {
        return Err(Error::ModelInconsistency(
            "closed-form channel fails the complete-positivity check".into(),
        ));
    }
    Ok(ch)
}

/// The five dimensionless parameters of a physical device
/// (`delta = eps = 1`: external losses are not part of [`PhysicalParams`]).
pub fn to_dimensionless(p: &PhysicalParams) -> Result<DptParams> {
    p.validate()?;
    Ok(DptParams::lossless(
        4.0 * p.g_a * p.g_a / (p.kappa_a() * p.gamma_m),
        4.0 * p.g_b * p.g_b / (p.kappa_b() * p.gamma_m),
        p.kappa_a_c / p.kappa_a(),
        p.kappa_b_c / p.kappa_b(),
        p.n_th,
    ))
}

/// Embeds dimensionless parameters into a deep-resolved-sideband physical
/// device for cross-validating the closed forms against the full model.
///
/// `omega_m = 1`, `gamma_m = 1e-3`, `kappa = 1e-2 omega_m`; couplings are
/// solved from the cooperativities and the detunings set to
/// `sigma * omega_m`. The residual sideband error of this embedding is at
/// the 1e-4 level and bounds the numeric-vs-closed-form agreement.
pub fn embed_physical(d: &DptParams, pump: PumpConfig) -> Result<PhysicalParams> {
    d.validate()?;
    let omega_m = 1.0;
    let gamma_m = 1e-3;
    let kappa = 1e-2 * omega_m;
    Ok(PhysicalParams {
        kappa_a_c: d.tau_a * kappa,
        kappa_a_e: (1.0 - d.tau_a) * kappa,
        kappa_b_c: d.tau_b * kappa,
        kappa_b_e: (1.0 - d.tau_b) * kappa,
        gamma_m,
        g_a: (d.c_a * kappa * gamma_m / 4.0).sqrt(),
        g_b: (d.c_b * kappa * gamma_m / 4.0).sqrt(),
        omega_m,
        detuning_a: pump.sigma_a.sign() * omega_m,
        detuning_b: pump.sigma_b.sign() * omega_m,
        n_th: d.n_th,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn sample_physical() -> PhysicalParams {
        embed_physical(
            &DptParams::lossless(1.0, 0.8, 0.7, 0.6, 0.5),
            PumpConfig::beamsplitter(),
        )
        .unwrap()
    }

    #[test]
    fn state_space_sparsity() {
        let p = sample_physical();
        let ss = build_state_space(&p).unwrap();
        // D has exactly four -1 entries
        let minus_ones = ss
            .d
            .iter()
            .filter(|z| (*z - Complex64::new(-1.0, 0.0)).norm() < 1e-15)
            .count();
        let nonzero = ss.d.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(minus_ones, 4);
        assert_eq!(nonzero, 4);
        // B has one nonzero entry per input column, value sqrt(rate)
        for col in 0..10 {
            assert_eq!(ss.b.column(col).iter().filter(|z| z.norm() > 0.0).count(), 1);
        }
        // C picks the c-coupled cavity operators only
        assert_eq!(ss.c.iter().filter(|z| z.norm() > 0.0).count(), 4);
        assert_relative_eq!(ss.c[(0, 0)].re, p.kappa_a_c.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn zero_coupling_decouples_blocks() {
        let mut p = sample_physical();
        p.g_a = 0.0;
        p.g_b = 0.0;
        let ss = build_state_space(&p).unwrap();
        for &(r, c) in &[(0, 2), (1, 2), (2, 0), (2, 1), (0, 5), (1, 5)] {
            assert_eq!(ss.a[(r, c)], Complex64::new(0.0, 0.0));
        }
        // the transfer matrix has no optical-microwave cross coupling
        let ch = numeric_channel(&p, PumpConfig::beamsplitter()).unwrap();
        let cross = ch.t.view((0, 2), (2, 2)).amax().max(ch.t.view((2, 0), (2, 2)).amax());
        assert!(cross < 1e-14, "cross block {cross:.3e}");
    }

    #[test]
    fn uncoupled_overcoupled_cavity_is_all_pass() {
        // oracle: scalar one-cavity input-output algebra. With G = 0 and
        // tau_a = 1 the on-resonance optical reflection has magnitude 1.
        let mut p = embed_physical(
            &DptParams::lossless(0.0, 0.0, 1.0, 0.5, 0.0),
            PumpConfig::beamsplitter(),
        )
        .unwrap();
        p.g_a = 0.0;
        p.g_b = 0.0;
        let ss = build_state_space(&p).unwrap();
        let omega = -p.detuning_a; // cavity resonance
        let xi = transfer_function(&ss, omega).unwrap();
        assert_relative_eq!(xi[(0, 0)].norm(), 1.0, epsilon = 1e-12);
        // scalar formula: kappa_c/(i(Delta + omega) + kappa/2)... on resonance
        let scalar = p.kappa_a_c / (p.kappa_a() / 2.0) - 1.0;
        assert_relative_eq!(xi[(0, 0)].re, scalar, epsilon = 1e-12);
    }

    #[test]
    fn transfer_function_reality_pairing() {
        let p = sample_physical();
        let ss = build_state_space(&p).unwrap();
        let xi_p = transfer_function(&ss, 0.3).unwrap();
        let xi_m = transfer_function(&ss, -0.3).unwrap();
        // dagger rows at -w are conjugate column-swaps of the rows at +w
        let col_swap = [5usize, 6, 7, 8, 9, 0, 1, 2, 3, 4];
        for col in 0..10 {
            let lhs = xi_m[(2, col)];
            let rhs = xi_p[(0, col_swap[col])].conj();
            assert_relative_eq!(lhs.re, rhs.re, epsilon = 1e-12);
            assert_relative_eq!(lhs.im, rhs.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn extended_transfer_matrix_is_complex_symplectic() {
        // commutator preservation Xi K Xi^dag = K on the square extension
        // with all outputs appended
        let p = sample_physical();
        let ss = build_state_space(&p).unwrap();
        // extend C and D to return every output (system + environment)
        let mut c_ext = CMatrix::zeros(10, 6);
        let mut d_ext = CMatrix::identity(10, 10) * re(-1.0);
        let rates = [
            p.kappa_a_c,
            p.kappa_a_e,
            p.kappa_b_c,
            p.kappa_b_e,
            p.gamma_m,
        ];
        for (i, &rate) in rates.iter().enumerate() {
            let internal = match i {
                0 | 1 => 0, // optical
                2 | 3 => 1, // microwave
                _ => 2,     // mediator
            };
            c_ext[(i, internal)] = re(rate.sqrt());
            c_ext[(5 + i, 3 + internal)] = re(rate.sqrt());
        }
        let ext = StateSpaceModel {
            a: ss.a.clone(),
            b: ss.b.clone(),
            c: c_ext,
            d: d_ext.clone(),
        };
        let xi = {
            let resolvent = (CMatrix::identity(6, 6) * im(-0.4) - &ext.a)
                .try_inverse()
                .unwrap();
            &ext.c * resolvent * &ext.b + &ext.d
        };
        let mut k = CMatrix::zeros(10, 10);
        for i in 0..5 {
            k[(i, i)] = re(1.0);
            k[(5 + i, 5 + i)] = re(-1.0);
        }
        let resid = (&xi * &k * xi.adjoint() - &k).map(|z| z.norm()).max();
        assert!(resid < 1e-10, "commutator residual {resid:.3e}");
        let _ = d_ext;
    }

    #[test]
    fn closed_form_spot_values() {
        // sigma = (-1,-1), C = 1, lossless: diagonal T coefficient 1/3,
        // off-diagonal -2/3
        let d = DptParams::lossless(1.0, 1.0, 1.0, 1.0, 0.0);
        let ch = closed_form_channel(&d, PumpConfig::beamsplitter()).unwrap();
        assert_relative_eq!(ch.t[(0, 0)], 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(ch.t[(0, 2)], -2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(ch.t[(2, 0)], -2.0 / 3.0, epsilon = 1e-14);
        assert!(channel_is_cp(&ch, 1e-12));
    }

    #[test]
    fn closed_form_decoupled_device() {
        let d = DptParams {
            c_a: 0.0,
            c_b: 0.0,
            tau_a: 0.6,
            tau_b: 0.4,
            n_th: 1.0,
            delta_a: 0.9,
            delta_b: 0.8,
            eps_a: 0.7,
            eps_b: 0.6,
        };
        let ch = closed_form_channel(&d, PumpConfig::beamsplitter()).unwrap();
        assert_relative_eq!(ch.t[(0, 2)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(ch.n[(0, 2)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(ch.n[(1, 3)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn squeezer_pole_is_guarded() {
        let d = DptParams::lossless(2.0 - 1e-9, 1.0, 1.0, 1.0, 0.0);
        let err = closed_form_channel(&d, PumpConfig::squeezer_optical_blue()).unwrap_err();
        assert!(matches!(err, Error::PoleProximity { .. }));
    }

    #[test]
    fn dimensionless_roundtrip() {
        let d = DptParams::lossless(1.3, 0.4, 0.25, 0.75, 2.0);
        let p = embed_physical(&d, PumpConfig::beamsplitter()).unwrap();
        let back = to_dimensionless(&p).unwrap();
        assert_relative_eq!(back.c_a, d.c_a, epsilon = 1e-12);
        assert_relative_eq!(back.c_b, d.c_b, epsilon = 1e-12);
        assert_relative_eq!(back.tau_a, d.tau_a, epsilon = 1e-12);
        assert_relative_eq!(back.tau_b, d.tau_b, epsilon = 1e-12);
        assert!(p.sideband_margin() >= 400.0);
    }

    #[test]
    fn numeric_matches_closed_form_at_sideband_level() {
        let d = DptParams::lossless(1.0, 0.8, 0.7, 0.6, 0.5);
        for pump in [
            PumpConfig::beamsplitter(),
            PumpConfig::squeezer_optical_blue(),
            PumpConfig::squeezer_microwave_blue(),
        ] {
            let p = embed_physical(&d, pump).unwrap();
            let num = numeric_channel(&p, pump).unwrap();
            let cf = closed_form_channel(&d, pump).unwrap();
            let dt = (&num.t - &cf.t).abs().max();
            let dn = (&num.n - &cf.n).abs().max();
            assert!(dt < 1e-4, "T deviation {dt:.3e} for {pump:?}");
            assert!(dn < 1e-4, "N deviation {dn:.3e} for {pump:?}");
        }
    }

    #[test]
    fn n_th_zero_noise_is_half_mmt() {
        let d = DptParams::lossless(0.9, 0.7, 0.8, 0.5, 0.0);
        let p = embed_physical(&d, PumpConfig::beamsplitter()).unwrap();
        let xp = on_resonance_xp(&p, PumpConfig::beamsplitter()).unwrap();
        let m = xp.view((0, 4), (4, 6)).into_owned();
        let ch = numeric_channel(&p, PumpConfig::beamsplitter()).unwrap();
        let half_mmt = &m * m.transpose() * 0.5;
        assert_relative_eq!(ch.n, half_mmt, epsilon = 1e-13);
    }
}
