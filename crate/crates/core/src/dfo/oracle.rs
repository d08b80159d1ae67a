//! Noisy black-box objective with an evaluation counter.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Additive noise applied to each objective evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    Gaussian {
        sigma: f64,
    },
    /// Gaussian with standard deviation `sigma`, rejected outside `3 sigma`.
    TruncatedGaussian {
        sigma: f64,
    },
    UniformBounded {
        delta: f64,
    },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            NoiseModel::None => true,
            NoiseModel::Gaussian { sigma } | NoiseModel::TruncatedGaussian { sigma } => {
                sigma.is_finite() && sigma >= 0.0
            }
            NoiseModel::UniformBounded { delta } => delta.is_finite() && delta >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "invalid noise model {self:?}"
            )))
        }
    }

    /// Largest possible noise magnitude, if bounded.
    pub fn bound(&self) -> Option<f64> {
        match *self {
            NoiseModel::None => Some(0.0),
            NoiseModel::Gaussian { sigma } => (sigma == 0.0).then_some(0.0),
            NoiseModel::TruncatedGaussian { sigma } => Some(3.0 * sigma),
            NoiseModel::UniformBounded { delta } => Some(delta),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::Gaussian { sigma } | NoiseModel::TruncatedGaussian { sigma }
                if sigma == 0.0 =>
            {
                0.0
            }
            NoiseModel::Gaussian { sigma } => {
                Normal::new(0.0, sigma).expect("valid sigma").sample(rng)
            }
            NoiseModel::TruncatedGaussian { sigma } => {
                let normal = Normal::new(0.0, sigma).expect("valid sigma");
                loop {
                    let v = normal.sample(rng);
                    if v.abs() <= 3.0 * sigma {
                        return v;
                    }
                }
            }
            NoiseModel::UniformBounded { delta: 0.0 } => 0.0,
            NoiseModel::UniformBounded { delta } => Uniform::new_inclusive(-delta, delta)
                .expect("valid range")
                .sample(rng),
        }
    }
}

pub type Objective<T> = Arc<dyn Fn(&DVector<T>) -> T + Send + Sync>;

/// `f~(u) = f(u) + v` with seeded noise `v`.
#[derive(Clone)]
pub struct NoisyOracle<T: Scalar> {
    objective: Objective<T>,
    noise_model: NoiseModel,
    delta: T,
    rng_seed: u64,
    rng: ChaCha8Rng,
    eval_count: usize,
}

impl<T: Scalar> fmt::Debug for NoisyOracle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NoisyOracle")
            .field("noise_model", &self.noise_model)
            .field("delta", &self.delta.to_f64_lossy())
            .field("rng_seed", &self.rng_seed)
            .field("eval_count", &self.eval_count)
            .finish()
    }
}

impl<T: Scalar> NoisyOracle<T> {
    /// `delta` is the declared noise bound used by the optimizer; it is not
    /// checked against the noise model.
    pub fn new(
        objective: impl Fn(&DVector<T>) -> T + Send + Sync + 'static,
        noise_model: NoiseModel,
        delta: T,
        rng_seed: u64,
    ) -> Result<Self> {
        noise_model.validate()?;
        Ok(Self {
            objective: Arc::new(objective),
            noise_model,
            delta,
            rng_seed,
            rng: ChaCha8Rng::seed_from_u64(rng_seed),
            eval_count: 0,
        })
    }

    pub fn noiseless(objective: impl Fn(&DVector<T>) -> T + Send + Sync + 'static) -> Self {
        Self::new(objective, NoiseModel::None, T::zero(), 0).expect("noiseless model is valid")
    }

    /// Noisy evaluation; increments the counter.
    pub fn eval(&mut self, u: &DVector<T>) -> T {
        self.eval_count += 1;
        let v = self.noise_model.sample(&mut self.rng);
        (self.objective)(u) + T::lit(v)
    }

    /// Noise-free value; does not count as an evaluation.
    pub fn exact(&self, u: &DVector<T>) -> T {
        (self.objective)(u)
    }

    pub fn eval_count(&self) -> usize {
        self.eval_count
    }

    pub fn noise_model(&self) -> NoiseModel {
        self.noise_model
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(u: &DVector<f64>) -> f64 {
        u.norm_squared()
    }

    #[test]
    fn counter_and_determinism() {
        let u = DVector::from_row_slice(&[1.0, 2.0]);
        let mut a = NoisyOracle::new(sphere, NoiseModel::Gaussian { sigma: 0.1 }, 0.3, 7).unwrap();
        let mut b = NoisyOracle::new(sphere, NoiseModel::Gaussian { sigma: 0.1 }, 0.3, 7).unwrap();
        for k in 1..=5 {
            assert_eq!(a.eval(&u), b.eval(&u));
            assert_eq!(a.eval_count(), k);
        }
        assert_eq!(a.exact(&u), 5.0);
        assert_eq!(a.eval_count(), 5);
    }

    #[test]
    fn noiseless_repeats() {
        let u = DVector::from_row_slice(&[0.5]);
        let mut o = NoisyOracle::noiseless(sphere);
        assert_eq!(o.eval(&u), o.eval(&u));
    }

    #[test]
    fn bounded_models_respect_bound() {
        let u = DVector::from_row_slice(&[0.0]);
        for model in [
            NoiseModel::TruncatedGaussian { sigma: 0.2 },
            NoiseModel::UniformBounded { delta: 0.6 },
        ] {
            let mut o = NoisyOracle::new(sphere, model, 0.6, 3).unwrap();
            for _ in 0..5000 {
                assert!(o.eval(&u).abs() <= 0.6);
            }
        }
    }

    #[test]
    fn rejects_negative_sigma() {
        assert!(NoisyOracle::new(sphere, NoiseModel::Gaussian { sigma: -1.0 }, 0.0, 0).is_err());
    }

    #[test]
    fn serde_tags() {
        let m: NoiseModel = serde_json::from_str(r#"{"kind":"gaussian","sigma":0.1}"#).unwrap();
        assert_eq!(m, NoiseModel::Gaussian { sigma: 0.1 });
        let m: NoiseModel = serde_json::from_str(r#"{"kind":"none"}"#).unwrap();
        assert_eq!(m, NoiseModel::None);
    }
}
