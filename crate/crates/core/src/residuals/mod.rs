//! Runtime checks of the hypotheses behind the error estimates, applied to
//! any [`SolutionHistory`](crate::SolutionHistory): the L¹ Lipschitz-in-time
//! bound, the weak and entropy residuals, the sign test function, the two
//! smoothing estimates, and the frozen-coefficient comparison.

mod diagnostic;
mod sign;
mod smoothing_checks;
mod test_function;
mod weak;

pub use diagnostic::{linear_comparison_diagnostic, LinearComparison};
pub use sign::{build_sign_test_function, verify_sign_lemma, PiecewiseConstant, SignLemmaCheck};
pub use smoothing_checks::{
    check_averaging, check_mollification, AveragingCheck, KernelCdf, MollificationCheck, TrigPolynomial,
};
pub use test_function::{unit_bump, unit_bump_derivative, SpaceProfile, TestFunction, TimeProfile};
pub use weak::{
    check_lipschitz_al, entropy_residual_q2, weak_residual_q1, write_residual_csv, ResidualReport,
};
