//! Truncated formal power series in the power sums of several named
//! alphabets: the value space of formal Macdonald measures and processes.
//!
//! A term is a finite product ∏_A p_{λ_A}(A) over distinct alphabets A
//! with a rational coefficient; the total degree Σ_A |λ_A| of every stored
//! term is ≤ the truncation order. All operations are exact in degrees up
//! to the truncation and drop everything above it.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::params::Params;
use crate::partition::Partition;
use crate::qfunc::z_factor;
use crate::scalar::{display_scalar, powi, Scalar};
use crate::symfunc::SymFunc;

/// A named alphabet, e.g. A¹ = `Alphabet::new('A', 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alphabet {
    pub tag: char,
    pub index: u8,
}

impl Alphabet {
    pub const fn new(tag: char, index: u8) -> Self {
        Alphabet { tag, index }
    }

    pub const fn a(i: u8) -> Self {
        Alphabet::new('A', i)
    }

    pub const fn b(i: u8) -> Self {
        Alphabet::new('B', i)
    }

    pub const fn x() -> Self {
        Alphabet::new('X', 0)
    }

    pub const fn y() -> Self {
        Alphabet::new('Y', 0)
    }
}

impl core::fmt::Display for Alphabet {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}{}", self.tag, self.index)
    }
}

/// ∏_A p_{λ_A}(A); alphabets with empty partitions are never stored.
pub type TermKey = BTreeMap<Alphabet, Partition>;

pub fn key_degree(key: &TermKey) -> u32 {
    key.values().map(|p| p.size()).sum()
}

fn key_mul(a: &TermKey, b: &TermKey) -> TermKey {
    let mut out = a.clone();
    for (alph, part) in b {
        match out.get_mut(alph) {
            Some(existing) => {
                let mut parts: Vec<u32> = existing.parts().to_vec();
                parts.extend_from_slice(part.parts());
                *existing = Partition::from_unsorted(&parts);
            }
            None => {
                out.insert(*alph, part.clone());
            }
        }
    }
    out
}

/// Multi-alphabet truncated series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetSeries {
    pub trunc: u32,
    pub terms: BTreeMap<TermKey, Scalar>,
}

impl AlphabetSeries {
    pub fn zero(trunc: u32) -> Self {
        AlphabetSeries {
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(trunc: u32) -> Self {
        Self::constant(trunc, Scalar::one())
    }

    pub fn constant(trunc: u32, c: Scalar) -> Self {
        let mut s = AlphabetSeries::zero(trunc);
        if !c.is_zero() {
            s.terms.insert(TermKey::new(), c);
        }
        s
    }

    /// Embed a symmetric function as a series in one alphabet.
    pub fn from_symfunc(alphabet: Alphabet, f: &SymFunc, trunc: u32) -> Self {
        let mut s = AlphabetSeries::zero(trunc);
        for (lam, c) in &f.terms {
            let mut key = TermKey::new();
            if !lam.is_empty() {
                key.insert(alphabet, lam.clone());
            }
            s.add_term(key, c.clone());
        }
        s
    }

    /// p_k(A) as a series.
    pub fn p_k(alphabet: Alphabet, k: u32, trunc: u32) -> Self {
        let mut key = TermKey::new();
        key.insert(alphabet, Partition::new(&[k]));
        let mut s = AlphabetSeries::zero(trunc);
        s.add_term(key, Scalar::one());
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &TermKey) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&TermKey::new())
    }

    pub fn alphabets(&self) -> Vec<Alphabet> {
        let mut out: Vec<Alphabet> = Vec::new();
        for key in self.terms.keys() {
            for a in key.keys() {
                if !out.contains(a) {
                    out.push(*a);
                }
            }
        }
        out.sort();
        out
    }

    pub fn add_term(&mut self, key: TermKey, c: Scalar) {
        if c.is_zero() || key_degree(&key) > self.trunc {
            return;
        }
        let entry = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &AlphabetSeries) -> AlphabetSeries {
        debug_assert_eq!(self.trunc, other.trunc);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &AlphabetSeries) -> AlphabetSeries {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> AlphabetSeries {
        if c.is_zero() {
            return AlphabetSeries::zero(self.trunc);
        }
        AlphabetSeries {
            trunc: self.trunc,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &AlphabetSeries) -> AlphabetSeries {
        debug_assert_eq!(self.trunc, other.trunc);
        let mut out = AlphabetSeries::zero(self.trunc);
        for (ka, ca) in &self.terms {
            let da = key_degree(ka);
            for (kb, cb) in &other.terms {
                if da + key_degree(kb) > self.trunc {
                    continue;
                }
                out.add_term(key_mul(ka, kb), ca * cb);
            }
        }
        out
    }

    /// Homogeneous component of total degree d.
    pub fn homogeneous(&self, d: u32) -> AlphabetSeries {
        AlphabetSeries {
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| key_degree(k) == d)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(key_degree).max().unwrap_or(0)
    }

    /// Lowest degree of a nonzero term (0 for the zero series).
    pub fn min_degree(&self) -> u32 {
        self.terms.keys().map(key_degree).min().unwrap_or(0)
    }

    pub fn truncate(&self, trunc: u32) -> AlphabetSeries {
        AlphabetSeries {
            trunc,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| key_degree(k) <= trunc)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// f(…, cA, …): p_k(A) ↦ c^k p_k(A).
    pub fn scale_alphabet(&self, alphabet: Alphabet, c: &Scalar) -> AlphabetSeries {
        let mut out = AlphabetSeries::zero(self.trunc);
        for (k, v) in &self.terms {
            let deg = k.get(&alphabet).map(|p| p.size()).unwrap_or(0);
            out.add_term(k.clone(), v * powi(c, deg as i32));
        }
        out
    }

    /// Substitute p_k(alphabet) ↦ rho(p_k) and drop the alphabet.
    /// `rho` is indexed by k ≥ 1.
    pub fn specialize(&self, alphabet: Alphabet, rho: &dyn Fn(u32) -> Scalar) -> AlphabetSeries {
        let mut out = AlphabetSeries::zero(self.trunc);
        for (key, c) in &self.terms {
            let mut coeff = c.clone();
            let mut new_key = key.clone();
            if let Some(part) = new_key.remove(&alphabet) {
                for &k in part.parts() {
                    coeff *= rho(k);
                    if coeff.is_zero() {
                        break;
                    }
                }
            }
            out.add_term(new_key, coeff);
        }
        out
    }

    /// Rename an alphabet; if the target already occurs the two merge,
    /// realizing p_k(old ∪ existing) = p_k(old) + p_k(existing) termwise.
    pub fn rename_alphabet(&self, old: Alphabet, new: Alphabet) -> AlphabetSeries {
        let mut out = AlphabetSeries::zero(self.trunc);
        for (key, c) in &self.terms {
            let mut k2 = key.clone();
            if let Some(part) = k2.remove(&old) {
                let mut single = TermKey::new();
                single.insert(new, part);
                k2 = key_mul(&k2, &single);
            }
            out.add_term(k2, c.clone());
        }
        out
    }

    /// Substitute p_k(src) ↦ p_k(dst1) + p_k(dst2): split one alphabet
    /// into a disjoint union of two (the inverse direction of
    /// [`AlphabetSeries::rename_alphabet`] merging).
    pub fn split_alphabet(&self, src: Alphabet, dst1: Alphabet, dst2: Alphabet) -> AlphabetSeries {
        let mut out = AlphabetSeries::zero(self.trunc);
        for (key, c) in &self.terms {
            let mut base = key.clone();
            match base.remove(&src) {
                None => out.add_term(base, c.clone()),
                Some(part) => {
                    for (alpha, beta, mult) in crate::macdonald::coproduct_splits(&part) {
                        let mut k2 = base.clone();
                        if !alpha.is_empty() {
                            let mut single = TermKey::new();
                            single.insert(dst1, alpha);
                            k2 = key_mul(&k2, &single);
                        }
                        if !beta.is_empty() {
                            let mut single = TermKey::new();
                            single.insert(dst2, beta);
                            k2 = key_mul(&k2, &single);
                        }
                        out.add_term(k2, c * mult);
                    }
                }
            }
        }
        out
    }

    /// Multiplicative inverse of a series with nonzero constant term,
    /// degree by degree.
    pub fn reciprocal(&self) -> AlphabetSeries {
        let a0 = self.constant_term();
        assert!(!a0.is_zero(), "reciprocal of a series with zero constant term");
        let inv0 = a0.recip();
        let mut out = AlphabetSeries::constant(self.trunc, inv0.clone());
        for d in 1..=self.trunc {
            // b_d = -(Σ_{e=1..d} a_e b_{d-e}) / a_0
            let mut acc = AlphabetSeries::zero(self.trunc);
            for e in 1..=d {
                let ae = self.homogeneous(e);
                if ae.is_zero() {
                    continue;
                }
                acc = acc.add(&ae.mul(&out.homogeneous(d - e)));
            }
            let bd = acc.scale(&-inv0.clone());
            out = out.add(&bd.homogeneous(d));
        }
        out
    }

    /// exp(f) for a series with zero constant term.
    pub fn exp(&self) -> AlphabetSeries {
        assert!(
            self.constant_term().is_zero(),
            "exp needs vanishing constant term"
        );
        let mut out = AlphabetSeries::one(self.trunc);
        let mut pow = AlphabetSeries::one(self.trunc);
        let mut factorial = Scalar::one();
        for n in 1..=self.trunc {
            pow = pow.mul(self);
            if pow.is_zero() {
                break;
            }
            factorial *= crate::scalar::int(n as i64);
            out = out.add(&pow.scale(&factorial.recip()));
        }
        out
    }

    pub fn display(&self) -> String {
        use alloc::format;
        if self.terms.is_empty() {
            return String::from("0");
        }
        let mut keys: Vec<&TermKey> = self.terms.keys().collect();
        keys.sort_by_key(|k| (key_degree(k), (*k).clone()));
        let mut out = String::new();
        for (i, key) in keys.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let c = &self.terms[*key];
            out.push_str(&format!("({})", display_scalar(c)));
            for (a, p) in key.iter() {
                out.push_str(&format!("*p{p}({a})"));
            }
        }
        out
    }
}

/// The Macdonald pairing over one shared alphabet:
/// ⟨a ⊗ c₁, c₂ ⊗ b⟩_C = ⟨c₁, c₂⟩ a ⊗ b, with ⟨p_λ, p_μ⟩ = δ_{λμ} z_λ.
///
/// Exact up to the output truncation provided the inputs carry every term
/// whose C-degree pairs into the requested range (kernel-type inputs are
/// degree-balanced, so their truncation at the same order suffices).
pub fn alphabet_pair(
    f: &AlphabetSeries,
    g: &AlphabetSeries,
    over: Alphabet,
    params: &Params,
) -> AlphabetSeries {
    debug_assert_eq!(f.trunc, g.trunc);
    let mut out = AlphabetSeries::zero(f.trunc);
    for (kf, cf) in &f.terms {
        let lam = kf.get(&over).cloned().unwrap_or_else(Partition::empty);
        let mut kf_rest = kf.clone();
        kf_rest.remove(&over);
        let df = key_degree(&kf_rest);
        for (kg, cg) in &g.terms {
            let mu = kg.get(&over).cloned().unwrap_or_else(Partition::empty);
            if mu != lam {
                continue;
            }
            let mut kg_rest = kg.clone();
            kg_rest.remove(&over);
            if df + key_degree(&kg_rest) > out.trunc {
                continue;
            }
            let z = z_factor(&lam, params);
            out.add_term(key_mul(&kf_rest, &kg_rest), cf * cg * z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn multiplication_merges_partitions() {
        let a = Alphabet::a(1);
        let f = AlphabetSeries::p_k(a, 1, 4);
        let g = f.mul(&f);
        let mut key = TermKey::new();
        key.insert(a, Partition::new(&[1, 1]));
        assert_eq!(g.coeff(&key), int(1));
    }

    #[test]
    fn truncation_drops_high_degree() {
        let a = Alphabet::a(1);
        let b = Alphabet::b(1);
        let f = AlphabetSeries::p_k(a, 2, 3).mul(&AlphabetSeries::p_k(b, 2, 3));
        assert!(f.is_zero());
    }

    #[test]
    fn reciprocal_roundtrip() {
        let a = Alphabet::x();
        // f = 1 + 2 p_1 + (1/3) p_2
        let mut f = AlphabetSeries::one(5);
        f = f.add(&AlphabetSeries::p_k(a, 1, 5).scale(&int(2)));
        f = f.add(&AlphabetSeries::p_k(a, 2, 5).scale(&rat(1, 3)));
        let inv = f.reciprocal();
        assert_eq!(f.mul(&inv), AlphabetSeries::one(5));
    }

    #[test]
    fn exp_of_sum_is_product_of_exps() {
        let x = Alphabet::x();
        let y = Alphabet::y();
        let f = AlphabetSeries::p_k(x, 1, 4);
        let g = AlphabetSeries::p_k(y, 2, 4).scale(&rat(1, 2));
        let lhs = f.add(&g).exp();
        let rhs = f.exp().mul(&g.exp());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn specialize_single_variable() {
        // p_1(X) p_1(Y) with X ↦ single variable a yields a·p_1(Y)
        let x = Alphabet::x();
        let y = Alphabet::y();
        let f = AlphabetSeries::p_k(x, 1, 4).mul(&AlphabetSeries::p_k(y, 1, 4));
        let a = rat(2, 3);
        let spec = f.specialize(x, &|k| powi(&a, k as i32));
        let mut key = TermKey::new();
        key.insert(y, Partition::new(&[1]));
        assert_eq!(spec.coeff(&key), rat(2, 3));
        assert_eq!(spec.alphabets(), alloc::vec![y]);
    }

    #[test]
    fn zero_specialization_keeps_constant_part() {
        let x = Alphabet::x();
        let y = Alphabet::y();
        let f = AlphabetSeries::one(3)
            .add(&AlphabetSeries::p_k(x, 1, 3).mul(&AlphabetSeries::p_k(y, 1, 3)))
            .add(&AlphabetSeries::p_k(y, 2, 3));
        let g = f.specialize(x, &|_| Scalar::zero());
        let mut key = TermKey::new();
        key.insert(y, Partition::new(&[2]));
        assert_eq!(g.coeff(&key), int(1));
        assert_eq!(g.constant_term(), int(1));
        assert_eq!(g.terms.len(), 2);
    }

    #[test]
    fn rename_merges_alphabets() {
        let a = Alphabet::a(1);
        let b = Alphabet::a(2);
        let f = AlphabetSeries::p_k(a, 1, 4).mul(&AlphabetSeries::p_k(b, 1, 4));
        let g = f.rename_alphabet(b, a);
        let mut key = TermKey::new();
        key.insert(a, Partition::new(&[1, 1]));
        assert_eq!(g.coeff(&key), int(1));
    }

    #[test]
    fn pairing_examples() {
        let params = Params::new(rat(1, 3), rat(1, 5)).unwrap();
        let y = Alphabet::y();
        // ⟨p_1(Y), p_1(Y)⟩_Y = (1−q)/(1−t)
        let f = AlphabetSeries::p_k(y, 1, 4);
        let v = alphabet_pair(&f, &f, y, &params);
        let expect = (int(1) - rat(1, 3)) / (int(1) - rat(1, 5));
        assert_eq!(v.constant_term(), expect);
        // ⟨1, g⟩_Y = degree-0-in-Y part of g
        let x = Alphabet::x();
        let g = AlphabetSeries::p_k(x, 1, 4).add(&AlphabetSeries::p_k(y, 1, 4));
        let one = AlphabetSeries::one(4);
        let proj = alphabet_pair(&one, &g, y, &params);
        assert_eq!(proj, AlphabetSeries::p_k(x, 1, 4));
    }
}
