//! Dense complex-matrix kernels every other module builds on.

mod decomp;
mod operator;
mod pencil;

pub use decomp::{
    herm_eig, herm_eig_with, is_psd, numerical_rank, penrose_residuals, pinv, range_inclusion, svd, HermEig,
    PenroseResiduals, PsdVerdict, Svd, Tolerance,
};
pub use operator::{axpy, inner, norm, norm_sq, normalized, unit_vector, Operator};
pub use pencil::{pencil_lower, pencil_upper, quad_form, rayleigh, PencilBound};
