use serde::{Deserialize, Serialize};

use crate::basis::{weight, HolderExponent};
use crate::error::{config, Error, Result};
use crate::spectrum::{ratio_conv, Spectrum};
use crate::transform::CoeffMatrix;

/// Center (scaled coefficients), radius and noise covariance of a ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSpec {
    center: CoeffMatrix,
    delta: f64,
    spec: Spectrum,
}

impl BallSpec {
    pub fn new(center: CoeffMatrix, delta: f64, spec: Spectrum) -> Result<Self> {
        HolderExponent::for_ldp(center.alpha().value())?;
        if !(delta.is_finite() && delta > 0.0) {
            return Err(config(format!(
                "ball radius delta must be positive, got {delta}"
            )));
        }
        if center.channels() != spec.channels() {
            return Err(Error::Shape(format!(
                "ball center has {} channels, spectrum has {}",
                center.channels(),
                spec.channels()
            )));
        }
        Ok(Self {
            center,
            delta,
            spec,
        })
    }

    pub fn center(&self) -> &CoeffMatrix {
        &self.center
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> HolderExponent {
        self.center.alpha()
    }

    pub fn spec(&self) -> &Spectrum {
        &self.spec
    }

    pub fn count(&self) -> usize {
        self.center.count()
    }

    pub fn channels(&self) -> usize {
        self.center.channels()
    }

    /// Whether a scaled coefficient matrix of the same shape lies in the open ball.
    pub fn contains(&self, scaled: &[f64]) -> bool {
        scaled.len() == self.center.scaled().len()
            && scaled
                .iter()
                .zip(self.center.scaled())
                .all(|(g, f)| (g - f).abs() < self.delta)
    }
}

/// Coordinate classes of a ball center; see [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LambdaClass {
    /// `|F| > δ`: the ball excludes 0 in this coordinate.
    Lambda1,
    /// `|F| = δ`.
    Lambda2,
    /// `|F| <= δ/2`.
    Lambda3,
    /// `δ/2 < |F| < δ`.
    Lambda4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaPartition {
    pub count: usize,
    pub channels: usize,
    /// Row-major `count × channels`.
    pub classes: Vec<LambdaClass>,
    /// Sizes of Λ1..Λ4.
    pub sizes: [usize; 4],
    /// Number of coordinates outside Λ3.
    pub outside_lambda3: usize,
}

impl LambdaPartition {
    pub fn class(&self, n: usize, k: usize) -> LambdaClass {
        self.classes[n * self.channels + k]
    }
}

fn class_of(f: f64, delta: f64) -> LambdaClass {
    let a = f.abs();
    if a > delta {
        LambdaClass::Lambda1
    } else if a == delta {
        LambdaClass::Lambda2
    } else if a <= 0.5 * delta {
        LambdaClass::Lambda3
    } else {
        LambdaClass::Lambda4
    }
}

pub fn classify(ball: &BallSpec) -> LambdaPartition {
    let classes: Vec<LambdaClass> = ball
        .center
        .scaled()
        .iter()
        .map(|&f| class_of(f, ball.delta))
        .collect();
    let mut sizes = [0usize; 4];
    for c in &classes {
        sizes[*c as usize] += 1;
    }
    LambdaPartition {
        count: ball.count(),
        channels: ball.channels(),
        outside_lambda3: classes.len() - sizes[LambdaClass::Lambda3 as usize],
        classes,
        sizes,
    }
}

/// `inf I` over a ball and the minimizer's scaled coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BallInfimum {
    pub value: f64,
    /// Soft-thresholded center `sign(F)(|F| − δ)⁺`.
    pub shrunk: CoeffMatrix,
}

/// `Σ_{(k,n) ∈ Λ1} F̄²_{k,n} / (2 c_n² λ_k)`, infinite when a shrunk entry sits on a
/// zero-eigenvalue channel.
pub fn ball_infimum(ball: &BallSpec) -> BallInfimum {
    let delta = ball.delta;
    let kk = ball.channels();
    let shrunk: Vec<f64> = ball
        .center
        .scaled()
        .iter()
        .map(|&f| {
            if f.abs() > delta {
                f.signum() * (f.abs() - delta)
            } else {
                0.0
            }
        })
        .collect();
    let mut value = 0.0;
    for (i, &s) in shrunk.iter().enumerate() {
        if s != 0.0 {
            let c = weight(i / kk, ball.alpha());
            value += ratio_conv(s * s / (2.0 * c * c), ball.spec.lambda(i % kk));
        }
    }
    let shrunk = CoeffMatrix::from_scaled(ball.count(), kk, ball.alpha(), shrunk)
        .expect("shape of the center");
    BallInfimum { value, shrunk }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{forward, DyadicPath};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn alpha() -> HolderExponent {
        HolderExponent::new(0.4).unwrap()
    }

    fn scalar_ball(values: Vec<f64>, delta: f64, lambda: f64) -> BallSpec {
        let n = values.len();
        let c = CoeffMatrix::from_scaled(n, 1, alpha(), values).unwrap();
        BallSpec::new(c, delta, Spectrum::scalar(lambda).unwrap()).unwrap()
    }

    #[test]
    fn construction_guards() {
        let c = CoeffMatrix::zeros(4, 2, HolderExponent::new(0.6).unwrap()).unwrap();
        let err = BallSpec::new(c, 0.1, Spectrum::explicit(vec![1.0, 1.0]).unwrap()).unwrap_err();
        assert!(err
            .to_string()
            .contains("alpha must be < 1/2 for LDP commands"));
        let c = CoeffMatrix::zeros(4, 2, alpha()).unwrap();
        assert!(
            BallSpec::new(c.clone(), 0.0, Spectrum::explicit(vec![1.0, 1.0]).unwrap()).is_err()
        );
        assert!(matches!(
            BallSpec::new(c, 0.1, Spectrum::scalar(1.0).unwrap()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn partition_examples() {
        let b = scalar_ball(vec![0.5, 0.2, 0.05, -0.15], 0.2, 1.0);
        let p = classify(&b);
        assert_eq!(p.class(0, 0), LambdaClass::Lambda1);
        assert_eq!(p.class(1, 0), LambdaClass::Lambda2);
        assert_eq!(p.class(2, 0), LambdaClass::Lambda3);
        assert_eq!(p.class(3, 0), LambdaClass::Lambda4);
        assert_eq!(p.sizes, [1, 1, 1, 1]);
        assert_eq!(p.outside_lambda3, 3);
        assert_eq!(class_of(-0.1, 0.2), LambdaClass::Lambda3);
    }

    #[test]
    fn infimum_examples() {
        let zero = scalar_ball(vec![0.0; 8], 0.3, 1.0);
        assert_eq!(ball_infimum(&zero).value, 0.0);

        let line = DyadicPath::from_fn(6, 1, |t| vec![t]).unwrap();
        let b =
            BallSpec::new(forward(&line, alpha()), 0.2, Spectrum::scalar(1.0).unwrap()).unwrap();
        let inf = ball_infimum(&b);
        assert_relative_eq!(inf.value, 0.32, max_relative = 1e-14);
        assert_relative_eq!(inf.shrunk.scaled_at(0, 0), 0.8, max_relative = 1e-15);

        let small = scalar_ball(vec![0.3, -0.1, 0.25, 0.0], 0.3, 1.0);
        assert_eq!(ball_infimum(&small).value, 0.0);

        // mass left on a silent channel cannot be reached
        let c = CoeffMatrix::from_scaled(2, 2, alpha(), vec![0.0, 0.5, 0.0, 0.0]).unwrap();
        let b = BallSpec::new(c, 0.1, Spectrum::explicit(vec![1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(ball_infimum(&b).value, f64::INFINITY);
    }

    #[test]
    fn infimum_uses_level_weights() {
        // F̄ = 0.5 at n = 3 (level 1): value = 0.25 / (2 c² λ)
        let b = scalar_ball(vec![0.0, 0.0, 0.0, 0.7], 0.2, 0.5);
        let c = weight(3, alpha());
        assert_relative_eq!(
            ball_infimum(&b).value,
            0.25 / (2.0 * c * c * 0.5),
            max_relative = 1e-15
        );
    }

    proptest! {
        #[test]
        fn partition_is_exhaustive(values in prop::collection::vec(-2.0f64..2.0, 16), delta in 0.01f64..1.5) {
            let p = classify(&scalar_ball(values, delta, 1.0));
            prop_assert_eq!(p.sizes.iter().sum::<usize>(), 16);
        }

        #[test]
        fn infimum_nonincreasing_in_delta(values in prop::collection::vec(-2.0f64..2.0, 8), d in 0.01f64..1.0, extra in 0.0f64..1.0) {
            let a = ball_infimum(&scalar_ball(values.clone(), d, 0.8)).value;
            let b = ball_infimum(&scalar_ball(values, d + extra, 0.8)).value;
            prop_assert!(b <= a);
        }

        #[test]
        fn infimum_zero_iff_center_within_delta(values in prop::collection::vec(-2.0f64..2.0, 8), d in 0.01f64..2.5) {
            let inf = ball_infimum(&scalar_ball(values.clone(), d, 1.0)).value;
            let inside = values.iter().all(|v| v.abs() <= d);
            prop_assert_eq!(inf == 0.0, inside);
        }

        #[test]
        fn shrunk_center_is_on_the_closed_ball(values in prop::collection::vec(-2.0f64..2.0, 8), d in 0.01f64..1.0) {
            let b = scalar_ball(values, d, 1.0);
            let inf = ball_infimum(&b);
            for (s, f) in inf.shrunk.scaled().iter().zip(b.center().scaled()) {
                prop_assert!((s - f).abs() <= d * (1.0 + 1e-12));
                prop_assert!(s.abs() <= f.abs());
            }
        }
    }
}
