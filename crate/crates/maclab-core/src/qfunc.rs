//! q-Pochhammer primitives and the power-sum norm ⟨p_λ, p_λ⟩.

use num_traits::One;

use crate::params::Params;
use crate::partition::Partition;
use crate::scalar::{int, powi, Scalar};

/// Finite q-Pochhammer symbol `(a; base)_n = ∏_{k=0}^{n-1} (1 − a·base^k)`.
pub fn q_pochhammer(a: &Scalar, base: &Scalar, n: u32) -> Scalar {
    let mut acc = Scalar::one();
    let mut term = a.clone();
    for _ in 0..n {
        acc *= Scalar::one() - &term;
        term *= base;
    }
    acc
}

/// `z_λ(q,t) = ⟨p_λ, p_λ⟩ = ∏_i (1−q^{λ_i})/(1−t^{λ_i}) · ∏_i i^{m_i} m_i!`.
pub fn z_factor(lambda: &Partition, params: &Params) -> Scalar {
    let mut acc = Scalar::one();
    for &p in lambda.parts() {
        let num = Scalar::one() - params.q_pow(p as i32);
        let den = Scalar::one() - params.t_pow(p as i32);
        acc *= num / den;
    }
    acc * z_combinatorial(lambda)
}

/// The classical `z_λ = ∏ i^{m_i} m_i!` (the q = t case of `z_factor`).
pub fn z_combinatorial(lambda: &Partition) -> Scalar {
    let mut acc = Scalar::one();
    let mut i = 0u32;
    for &p in lambda.parts() {
        // parts are sorted, so multiplicities come in runs
        if p != i {
            i = p;
            let m = lambda.multiplicity(i);
            let mut fact = Scalar::one();
            for k in 1..=m {
                fact *= int(k as i64);
            }
            acc *= powi(&int(i as i64), m as i32) * fact;
        }
    }
    acc
}

/// `z_λ` for an arbitrary rational pair, without the (0,1) range check.
/// Internal: used to exercise the parameter inversion (q,t) ↦ (1/q, 1/t).
pub fn z_factor_raw(lambda: &Partition, q: &Scalar, t: &Scalar) -> Scalar {
    let mut acc = Scalar::one();
    for &p in lambda.parts() {
        let num = Scalar::one() - powi(q, p as i32);
        let den = Scalar::one() - powi(t, p as i32);
        acc *= num / den;
    }
    acc * z_combinatorial(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn params(qn: i64, qd: i64, tn: i64, td: i64) -> Params {
        Params::new(rat(qn, qd), rat(tn, td)).unwrap()
    }

    #[test]
    fn pochhammer_examples() {
        let q = rat(1, 3);
        assert_eq!(q_pochhammer(&rat(2, 5), &q, 0), int(1));
        // (1/2; 1/2)_2 = (1 - 1/2)(1 - 1/4) = 3/8
        assert_eq!(q_pochhammer(&rat(1, 2), &rat(1, 2), 2), rat(3, 8));
        assert_eq!(q_pochhammer(&rat(0, 1), &q, 5), int(1));
    }

    #[test]
    fn z_factor_examples() {
        let p = params(1, 3, 1, 5);
        assert_eq!(z_factor(&Partition::empty(), &p), int(1));
        // λ=(1): (1−q)/(1−t)
        let base = (int(1) - rat(1, 3)) / (int(1) - rat(1, 5));
        assert_eq!(z_factor(&Partition::new(&[1]), &p), base.clone());
        // λ=(1,1): 2 ((1−q)/(1−t))²
        assert_eq!(
            z_factor(&Partition::new(&[1, 1]), &p),
            int(2) * &base * &base
        );
    }

    #[test]
    fn z_factor_multiplicative_over_part_groups() {
        // z factors over distinct part values: z((3,3,1,1,1)) =
        // z((3,3)) * z((1,1,1))
        let p = params(2, 7, 1, 2);
        let whole = z_factor(&Partition::new(&[3, 3, 1, 1, 1]), &p);
        let a = z_factor(&Partition::new(&[3, 3]), &p);
        let b = z_factor(&Partition::new(&[1, 1, 1]), &p);
        assert_eq!(whole, a * b);
    }

    #[test]
    fn z_combinatorial_example() {
        // z_(2,1,1) = 2 * 1^2 * 2! = 4
        assert_eq!(z_combinatorial(&Partition::new(&[2, 1, 1])), int(4));
    }
}
