//! Small-noise large deviations of `√ε W` on component-sup coefficient balls.
//!
//! A ball `{G : sup_{k,n} |G_{k,n} − F_{k,n}| < δ}` in the scaled coefficient
//! space factorizes into independent one-dimensional Gaussian events, so its
//! probability, its rate infimum and its Monte Carlo frequency can all be
//! evaluated coordinatewise.

mod ball;
mod curve;
mod exact;
mod mc;
mod tight;

pub use ball::{ball_infimum, classify, BallInfimum, BallSpec, LambdaClass, LambdaPartition};
pub use curve::{ldp_curve, CurvePoint, LDPCurve, McPlan};
pub use exact::{exact_log_prob, ExactLogProb};
pub use mc::{mc_prob, McEstimate, MIN_EXPECTED_HITS};
pub use tight::{tight_build, tight_check, GrowthLaw, TightPoint, TightReport, TightSet};
