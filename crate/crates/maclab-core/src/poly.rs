//! Dense exact multivariate polynomials in x₁..x_n.
//!
//! Used for restricting symmetric functions to finitely many variables
//! (operator eigenrelation checks, the `compute` CLI) and as the
//! independent expansion oracle behind the monomial/power-sum matrices.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::partition::Partition;
use crate::scalar::{display_scalar, powi, Scalar};

/// Polynomial in a fixed number of variables, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Scalar>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        MultiPoly::constant(nvars, Scalar::one())
    }

    /// The power sum p_k = Σ_i x_i^k.
    pub fn power_sum(nvars: usize, k: u32) -> Self {
        let mut p = MultiPoly::zero(nvars);
        for i in 0..nvars {
            let mut e = vec![0; nvars];
            e[i] = k;
            p.terms.insert(e, Scalar::one());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign_term(&mut self, expo: Vec<u32>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(expo).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            let key: Vec<Vec<u32>> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_assign_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let expo: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_assign_term(expo, ca * cb);
            }
        }
        out
    }

    /// Evaluate at a rational point.
    pub fn eval(&self, xs: &[Scalar]) -> Scalar {
        assert_eq!(xs.len(), self.nvars);
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in xs.iter().zip(e) {
                if k > 0 {
                    term *= powi(x, k as i32);
                }
            }
            acc += term;
        }
        acc
    }

    /// Coefficient of the monomial with exponent vector `expo`.
    pub fn coeff(&self, expo: &[u32]) -> Scalar {
        self.terms.get(expo).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Extract the coefficient of the monomial symmetric function m_ν:
    /// the coefficient of x^ν with ν sorted descending and padded.
    pub fn monomial_sym_coeff(&self, nu: &Partition) -> Scalar {
        let mut e: Vec<u32> = nu.parts().to_vec();
        assert!(e.len() <= self.nvars, "not enough variables for m_{nu}");
        e.resize(self.nvars, 0);
        self.coeff(&e)
    }

    /// Canonical display, graded then lexicographic-descending monomials.
    pub fn display(&self, var_names: &[String]) -> String {
        use alloc::format;
        if self.terms.is_empty() {
            return String::from("0");
        }
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let mut out = String::new();
        for (i, e) in keys.iter().enumerate() {
            let c = &self.terms[*e];
            if i > 0 {
                out.push_str(" + ");
            }
            let mut mono = String::new();
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !mono.is_empty() {
                    mono.push('*');
                }
                if k == 1 {
                    mono.push_str(&var_names[j]);
                } else {
                    mono.push_str(&format!("{}^{}", var_names[j], k));
                }
            }
            if mono.is_empty() {
                out.push_str(&display_scalar(c));
            } else if c.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("({})*{}", display_scalar(c), mono));
            }
        }
        out
    }
}
