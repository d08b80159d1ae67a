//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable by the bounds and the optimizer.
///
/// Implemented for `f32` and `f64`. Literal constants go through
/// [`Scalar::lit`] so that tolerances written as `f64` are rounded once
/// into the working precision.
pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    /// Converts an `f64` literal into the working precision.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Lossy conversion used for diagnostics and file output.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative singular-value threshold below which a displacement matrix
    /// is treated as singular.
    fn poised_tol() -> Self {
        let eps = Self::default_epsilon() * Self::lit(100.0);
        let floor = Self::lit(1e-12);
        if eps > floor {
            eps
        } else {
            floor
        }
    }

    /// Relative rank tolerance for nullspace extraction.
    fn rank_tol() -> Self {
        let eps = Self::default_epsilon() * Self::lit(100.0);
        let floor = Self::lit(1e-10);
        if eps > floor {
            eps
        } else {
            floor
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_follow_precision() {
        assert_eq!(<f64 as Scalar>::poised_tol(), 1e-12);
        assert_eq!(<f64 as Scalar>::rank_tol(), 1e-10);
        assert!(<f32 as Scalar>::poised_tol() > 1e-6);
        assert_eq!(f32::lit(0.5), 0.5f32);
    }
}
