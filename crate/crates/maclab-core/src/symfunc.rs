//! Symmetric functions in the power-sum basis, truncated at a fixed
//! total degree.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::params::Params;
use crate::partition::Partition;
use crate::poly::MultiPoly;
use crate::qfunc::z_factor;
use crate::scalar::{display_scalar, powi, Scalar};

/// Finite linear combination Σ c_λ p_λ with |λ| ≤ trunc.
///
/// Multiplication drops all terms of degree > trunc; within degrees ≤ trunc
/// everything is exact. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymFunc {
    pub trunc: u32,
    pub terms: BTreeMap<Partition, Scalar>,
}

impl SymFunc {
    pub fn zero(trunc: u32) -> Self {
        SymFunc {
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(trunc: u32) -> Self {
        let mut f = SymFunc::zero(trunc);
        f.terms.insert(Partition::empty(), Scalar::one());
        f
    }

    /// The basis element p_λ.
    pub fn p(lambda: Partition, trunc: u32) -> Self {
        assert!(lambda.size() <= trunc, "p_{lambda} exceeds truncation");
        let mut f = SymFunc::zero(trunc);
        f.terms.insert(lambda, Scalar::one());
        f
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, lambda: &Partition) -> Scalar {
        self.terms.get(lambda).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, lambda: Partition, c: Scalar) {
        if c.is_zero() || lambda.size() > self.trunc {
            return;
        }
        let entry = self.terms.entry(lambda.clone()).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&lambda);
        }
    }

    pub fn add(&self, other: &SymFunc) -> SymFunc {
        debug_assert_eq!(self.trunc, other.trunc);
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SymFunc) -> SymFunc {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> SymFunc {
        if c.is_zero() {
            return SymFunc::zero(self.trunc);
        }
        SymFunc {
            trunc: self.trunc,
            terms: self.terms.iter().map(|(l, v)| (l.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &SymFunc) -> SymFunc {
        debug_assert_eq!(self.trunc, other.trunc);
        let mut out = SymFunc::zero(self.trunc);
        for (la, ca) in &self.terms {
            for (lb, cb) in &other.terms {
                if la.size() + lb.size() > self.trunc {
                    continue;
                }
                let mut parts: Vec<u32> = la.parts().to_vec();
                parts.extend_from_slice(lb.parts());
                out.add_term(Partition::from_unsorted(&parts), ca * cb);
            }
        }
        out
    }

    /// Degree-d homogeneous component.
    pub fn homogeneous(&self, d: u32) -> SymFunc {
        SymFunc {
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|(l, _)| l.size() == d)
                .map(|(l, c)| (l.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|l| l.size()).max().unwrap_or(0)
    }

    /// Re-truncate (only downward).
    pub fn truncate(&self, trunc: u32) -> SymFunc {
        SymFunc {
            trunc,
            terms: self
                .terms
                .iter()
                .filter(|(l, _)| l.size() <= trunc)
                .map(|(l, c)| (l.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitute p_k ↦ Σ_{i≤n} x_i^k, producing an explicit polynomial.
    pub fn restrict_to_vars(&self, n: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(n);
        for (lam, c) in &self.terms {
            let mut term = MultiPoly::constant(n, c.clone());
            for &k in lam.parts() {
                term = term.mul(&MultiPoly::power_sum(n, k));
            }
            out = out.add(&term);
        }
        out
    }

    /// Apply a specialization: p_k ↦ values[k-1] (must cover max degree).
    pub fn specialize(&self, p_values: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (lam, c) in &self.terms {
            let mut term = c.clone();
            for &k in lam.parts() {
                term *= &p_values[(k - 1) as usize];
            }
            acc += term;
        }
        acc
    }

    /// Substitute p_k ↦ c^k p_k (the alphabet scaling f(X) ↦ f(cX)).
    pub fn scale_alphabet(&self, c: &Scalar) -> SymFunc {
        SymFunc {
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .map(|(l, v)| (l.clone(), v * powi(c, l.size() as i32)))
                .collect(),
        }
    }

    pub fn display(&self) -> String {
        use alloc::format;
        if self.terms.is_empty() {
            return String::from("0");
        }
        let mut keys: Vec<&Partition> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            a.size()
                .cmp(&b.size())
                .then_with(|| a.cmp(b))
        });
        let mut out = String::new();
        for (i, l) in keys.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let c = &self.terms[*l];
            if l.is_empty() {
                out.push_str(&display_scalar(c));
            } else {
                out.push_str(&format!("({})*p{}", display_scalar(c), l));
            }
        }
        out
    }
}

/// Macdonald scalar product: bilinear extension of
/// ⟨p_λ, p_μ⟩ = δ_{λμ} z_λ(q,t).
pub fn macdonald_pair(f: &SymFunc, g: &SymFunc, params: &Params) -> Scalar {
    debug_assert_eq!(f.trunc, g.trunc);
    let mut acc = Scalar::zero();
    for (lam, cf) in &f.terms {
        if let Some(cg) = g.terms.get(lam) {
            acc += cf * cg * z_factor(lam, params);
        }
    }
    acc
}

/// The scalar product with z_λ built from an arbitrary rational pair
/// (used by the (q,t) ↦ (q⁻¹,t⁻¹) inversion check).
pub fn macdonald_pair_raw(f: &SymFunc, g: &SymFunc, q: &Scalar, t: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for (lam, cf) in &f.terms {
        if let Some(cg) = g.terms.get(lam) {
            acc += cf * cg * crate::qfunc::z_factor_raw(lam, q, t);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn params() -> Params {
        Params::new(rat(1, 3), rat(1, 5)).unwrap()
    }

    #[test]
    fn product_respects_grading() {
        let f = SymFunc::p(Partition::new(&[2]), 3);
        let g = SymFunc::p(Partition::new(&[2]), 3);
        // degree 4 > trunc 3: dropped
        assert!(f.mul(&g).is_zero());

        let f = SymFunc::p(Partition::new(&[1]), 4);
        let h = f.mul(&f);
        assert_eq!(h.coeff(&Partition::new(&[1, 1])), int(1));
    }

    #[test]
    fn pairing_examples() {
        let p = params();
        let p1 = SymFunc::p(Partition::new(&[1]), 4);
        let p2 = SymFunc::p(Partition::new(&[2]), 4);
        let p11 = SymFunc::p(Partition::new(&[1, 1]), 4);
        let base = (int(1) - rat(1, 3)) / (int(1) - rat(1, 5));
        assert_eq!(macdonald_pair(&p1, &p1, &p), base.clone());
        assert_eq!(macdonald_pair(&p2, &p11, &p), int(0));
        assert_eq!(macdonald_pair(&p11, &p11, &p), int(2) * &base * &base);
    }

    #[test]
    fn restriction_examples() {
        let p1 = SymFunc::p(Partition::new(&[1]), 2);
        let poly = p1.restrict_to_vars(2);
        assert_eq!(poly.coeff(&[1, 0]), int(1));
        assert_eq!(poly.coeff(&[0, 1]), int(1));
    }

    #[test]
    fn alphabet_scaling() {
        let f = SymFunc::p(Partition::new(&[2, 1]), 4);
        let g = f.scale_alphabet(&rat(1, 2));
        assert_eq!(g.coeff(&Partition::new(&[2, 1])), rat(1, 8));
    }
}
