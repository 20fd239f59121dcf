//! Convention-pinned Gaussian-state and Gaussian-channel algebra.

pub mod channel;
pub mod cm;
pub mod ppt;
pub mod separability;

pub use channel::{apply_channel, channel_is_cp, compose, cp_defect, GaussianChannel};
pub use cm::{
    is_physical_cm, partial_trace, symplectic_eigenvalues, symplectic_form, tensor_cm,
    thermal_cm, tmsv_cm, vacuum_cm, CovarianceMatrix, ModeKind, ModeLabel, SymplecticForm,
    DEFAULT_TOL,
};
pub use ppt::{is_ppt, log_negativity, one_mode_eb_check, partial_transpose, Partition};
pub use separability::{is_separable_gklc, Separability};
