//! Values frozen from independent evaluations (closed forms and quadrature).

use approx::assert_relative_eq;
use qwiener_ldp::ldp::{ball_infimum, exact_log_prob, BallSpec};
use qwiener_ldp::transform::inverse_norm_bound;
use qwiener_ldp::{
    forward, make_spectrum, weight, CoeffMatrix, DecayLaw, DyadicPath, HolderExponent, Spectrum,
};

fn alpha(a: f64) -> HolderExponent {
    HolderExponent::new(a).unwrap()
}

#[test]
fn weights_match_closed_form() {
    // 2^{3(0.3 - 0.5) + 0.3 - 1}
    assert_relative_eq!(
        weight(9, alpha(0.3)),
        0.40612619817811774,
        max_relative = 1e-15
    );
    assert_relative_eq!(weight(0, alpha(0.3)), 1.0);
}

#[test]
fn inverse_constant_at_one_third() {
    assert_relative_eq!(
        inverse_norm_bound(alpha(1.0 / 3.0)),
        13.099472971564776,
        max_relative = 1e-13
    );
}

#[test]
fn unit_interval_log_probability() {
    // log P(|Z| < 1)
    let b = BallSpec::new(
        CoeffMatrix::zeros(1, 1, alpha(0.4)).unwrap(),
        1.0,
        Spectrum::scalar(1.0).unwrap(),
    )
    .unwrap();
    let r = exact_log_prob(&b, 1.0).unwrap();
    assert_relative_eq!(r.logp, -0.381715146302126, max_relative = 1e-12);
}

#[test]
fn two_channel_ball_infimum() {
    let spec = make_spectrum(
        DecayLaw::Geometric {
            lambda0: 0.5,
            ratio: 0.5,
        },
        4,
    )
    .unwrap();
    let p = DyadicPath::from_fn(6, 4, |t| vec![t, t * t, 0.0, 0.0]).unwrap();
    let b = BallSpec::new(forward(&p, alpha(0.4)), 0.1, spec).unwrap();
    assert_relative_eq!(
        ball_infimum(&b).value,
        2.673_625_582_760_226,
        max_relative = 1e-13
    );
}
