//! Exact scalar and polynomial kernels: cyclotomic fields, the Laurent group
//! ring of `T̂`, polynomial jets and the divisibility tests built on them.

pub mod cyclo;
pub mod field;
pub mod germ;
pub mod laurent;
pub mod linalg;
pub mod poly;

pub use cyclo::CycloScalar;
pub use field::Field;
pub use germ::Germ;
pub use laurent::{divide_by_euler, eval_at_point, LaurentElement};
pub use poly::{divide_by_linear, exp_jet, translate_jet, Division, GradedJet, Poly};
