//! Fractional integral operators on the Heisenberg group.
//!
//! The crate is organised bottom-up:
//!
//! - [`group`]: the twisted product, inverse, group difference and the
//!   parabolic / Zygmund dilations.
//! - [`kernel`]: pointwise kernels `Ω^a`, `Ω^{ab}`, `V` and the separable
//!   majorant, plus the sampled inequalities between them.
//! - [`grid`], [`testfn`], [`quad`]: truncated uniform grids, closed-form
//!   inputs and the quadrature application of every operator.
//! - [`verifier`]: exponent arithmetic, dilation-exponent fits, norm probes
//!   and the reduction chain from `I_{αβ}` to iterated one-block integrals.

pub mod error;
pub mod grid;
pub mod group;
pub mod kernel;
pub mod parallel;
pub mod quad;
pub mod rng;
pub mod testfn;
pub mod verifier;
mod zeta;

pub use error::{HlsError, Result};
pub use grid::{lp_norm, pairwise_sum, GridFunction, GridSpec};
pub use group::{dilate, group_difference, inverse, multiply, DilationMode, DilationSpec, GroupContext, GroupPoint};
pub use kernel::{
    check_lambda_bracket_bound, check_pointwise_dominance, dominance_pairs, eval_omega_a, eval_omega_ab,
    eval_separable_majorant, eval_v, DominanceReport, DominanceWitness, KernelSpec, OmegaABParams, OmegaAParams,
    VParams,
};
pub use quad::{
    apply_classical_hls, apply_fractional, apply_fractional_grid, classical_hls_at, sample, twisted_profile,
    ExponentPair, SingularRule,
};
pub use rng::CounterRng;
pub use testfn::{Profile, TestFunction};

pub use zeta::hurwitz as hurwitz_zeta;
