//! The global deformation parameters (q, t).

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{display_scalar, int, powi, Scalar};

/// The fixed parameter pair, validated to `0 < q < 1` and `0 ≤ t < 1`.
///
/// `t = 0` is a first-class value (the q-Whittaker degeneration); every
/// operation that needs `t⁻¹` calls [`Params::require_positive_t`] first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub q: Scalar,
    pub t: Scalar,
}

impl Params {
    pub fn new(q: Scalar, t: Scalar) -> Result<Self> {
        use alloc::format;
        let zero = Scalar::zero();
        let one = int(1);
        if q <= zero || q >= one {
            return Err(Error::InvalidInput(format!(
                "q must satisfy 0 < q < 1, got {}",
                display_scalar(&q)
            )));
        }
        if t < zero || t >= one {
            return Err(Error::InvalidInput(format!(
                "t must satisfy 0 <= t < 1, got {}",
                display_scalar(&t)
            )));
        }
        Ok(Params { q, t })
    }

    /// `q^e` for signed `e`.
    pub fn q_pow(&self, e: i32) -> Scalar {
        powi(&self.q, e)
    }

    /// `t^e` for signed `e`; panics if `t = 0` and `e < 0` (guard with
    /// [`Params::require_positive_t`]).
    pub fn t_pow(&self, e: i32) -> Scalar {
        powi(&self.t, e)
    }

    pub fn t_is_zero(&self) -> bool {
        self.t.is_zero()
    }

    /// Reject `t = 0` for operations that divide by powers of t
    /// (hatted operators, the tails of `O_r`, `Ô₁`).
    pub fn require_positive_t(&self, what: &str) -> Result<()> {
        use alloc::format;
        if self.t_is_zero() {
            Err(Error::InvalidInput(format!("{what} requires t > 0")))
        } else {
            Ok(())
        }
    }
}
