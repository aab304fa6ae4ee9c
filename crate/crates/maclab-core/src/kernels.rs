//! The bilinear exponential kernels Π, H, W, the comultiplication, and
//! the closed-form pairing of truncated exponentials.
//!
//! Π(X;Y) = exp(Σ (1−t^k)/(1−q^k) · p_k(X)p_k(Y)/k)
//! H(X;Y) = exp(Σ (1−t^k) · p_k(X)p_k(Y)/k)
//! W(X;Y) = exp(Σ (1−t^k)(1−q^k) · p_k(X)p_k(Y)/k)

use num_traits::{One, Zero};

use crate::alphabet::{Alphabet, AlphabetSeries};
use crate::macdonald::coproduct_splits;
use crate::params::Params;
use crate::scalar::{int, Scalar};
use crate::symfunc::SymFunc;

/// Which exponential kernel to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Pi,
    PiInverse,
    H,
    HInverse,
    W,
    WInverse,
}

/// The k-th exponent coefficient c_k of the kernel (sign included).
pub fn kernel_coefficient(kind: KernelKind, k: u32, params: &Params) -> Scalar {
    let one = Scalar::one();
    let tk = params.t_pow(k as i32);
    let qk = params.q_pow(k as i32);
    let base = match kind {
        KernelKind::Pi | KernelKind::PiInverse => (&one - &tk) / (&one - &qk),
        KernelKind::H | KernelKind::HInverse => &one - &tk,
        KernelKind::W | KernelKind::WInverse => (&one - &tk) * (&one - &qk),
    };
    match kind {
        KernelKind::PiInverse | KernelKind::HInverse | KernelKind::WInverse => -base,
        _ => base,
    }
}

/// Truncated kernel exp(Σ_k c_k p_k(X) p_k(Y)/k).
pub fn kernel_series(
    kind: KernelKind,
    x: Alphabet,
    y: Alphabet,
    params: &Params,
    trunc: u32,
) -> AlphabetSeries {
    let mut exponent = AlphabetSeries::zero(trunc);
    for k in 1..=trunc / 2 {
        let c = kernel_coefficient(kind, k, params) / int(k as i64);
        if c.is_zero() {
            continue;
        }
        let term = AlphabetSeries::p_k(x, k, trunc).mul(&AlphabetSeries::p_k(y, k, trunc));
        exponent = exponent.add(&term.scale(&c));
    }
    exponent.exp()
}

/// Image of f under p_k ↦ p_k(X) + p_k(Y).
pub fn coproduct(f: &SymFunc, x: Alphabet, y: Alphabet, trunc: u32) -> AlphabetSeries {
    let mut out = AlphabetSeries::zero(trunc);
    for (lam, c) in &f.terms {
        for (alpha, beta, mult) in coproduct_splits(lam) {
            let mut key = crate::alphabet::TermKey::new();
            if !alpha.is_empty() {
                key.insert(x, alpha);
            }
            if !beta.is_empty() {
                key.insert(y, beta);
            }
            out.add_term(key, c * mult);
        }
    }
    out
}

/// exp(Σ_{k≥1} a_k · p_k(C)/k) truncated; `a[k-1]` supplies a_k.
pub fn exponential_in_alphabet(
    c_alphabet: Alphabet,
    a: &[AlphabetSeries],
    trunc: u32,
) -> AlphabetSeries {
    let mut exponent = AlphabetSeries::zero(trunc);
    for (i, ak) in a.iter().enumerate() {
        let k = (i + 1) as u32;
        let pk = AlphabetSeries::p_k(c_alphabet, k, trunc);
        exponent = exponent.add(&ak.mul(&pk).scale(&int(k as i64).recip()));
    }
    exponent.exp()
}

/// Closed-form pairing of two truncated exponentials over the shared
/// alphabet (the fast path):
/// ⟨exp(Σ a_k p_k/k), exp(Σ p_k b_k/k)⟩ = exp(Σ (1−q^k)/(1−t^k) a_k b_k/k).
///
/// Must agree with [`crate::alphabet::alphabet_pair`] applied to
/// [`exponential_in_alphabet`] of the same data.
pub fn pair_exponentials(
    a: &[AlphabetSeries],
    b: &[AlphabetSeries],
    params: &Params,
    trunc: u32,
) -> AlphabetSeries {
    let one = Scalar::one();
    let mut exponent = AlphabetSeries::zero(trunc);
    for k in 1..=a.len().min(b.len()) {
        let qk = params.q_pow(k as i32);
        let tk = params.t_pow(k as i32);
        let c = (&one - &qk) / (&one - &tk) / int(k as i64);
        exponent = exponent.add(&a[k - 1].mul(&b[k - 1]).scale(&c));
    }
    exponent.exp()
}

/// Σ_{|λ| ≤ max_size} P_λ(X) Q_λ(Y) — the explicit side of the Cauchy
/// identity, for comparison against `kernel_series(Pi, …)`.
pub fn cauchy_sum(
    ctx: &mut crate::macdonald::MacCtx,
    x: Alphabet,
    y: Alphabet,
    max_size: u32,
    trunc: u32,
) -> crate::error::Result<AlphabetSeries> {
    let mut out = AlphabetSeries::zero(trunc);
    for lam in crate::partition::enumerate_partitions(max_size) {
        let p = ctx.p(&lam)?;
        let q = ctx.q(&lam)?;
        let px = AlphabetSeries::from_symfunc(x, &p, trunc);
        let qy = AlphabetSeries::from_symfunc(y, &q, trunc);
        out = out.add(&px.mul(&qy));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::alphabet_pair;
    use crate::macdonald::MacCtx;
    use crate::partition::Partition;
    use crate::scalar::{rat, GenericPoints};
    use alloc::vec::Vec;

    fn params() -> Params {
        Params::new(rat(1, 3), rat(1, 5)).unwrap()
    }

    #[test]
    fn kernel_trivial_truncation() {
        let p = params();
        let k = kernel_series(KernelKind::Pi, Alphabet::x(), Alphabet::y(), &p, 0);
        assert_eq!(k, AlphabetSeries::one(0));
    }

    #[test]
    fn pi_kernel_low_order_coefficients() {
        let q = rat(1, 3);
        let t = rat(1, 5);
        let p = Params::new(q.clone(), t.clone()).unwrap();
        let x = Alphabet::x();
        let y = Alphabet::y();
        let k = kernel_series(KernelKind::Pi, x, y, &p, 4);
        let c1 = (int(1) - &t) / (int(1) - &q);
        let c2 = (int(1) - &t * &t) / (int(1) - &q * &q);

        let key = |lx: &[u32], ly: &[u32]| {
            let mut key = crate::alphabet::TermKey::new();
            if !lx.is_empty() {
                key.insert(x, Partition::new(lx));
            }
            if !ly.is_empty() {
                key.insert(y, Partition::new(ly));
            }
            key
        };
        assert_eq!(k.coeff(&key(&[], &[])), int(1));
        assert_eq!(k.coeff(&key(&[1], &[1])), c1.clone());
        // degree-4 terms: p_2p_2 from the exponent, p_1²p_1² from its square
        assert_eq!(k.coeff(&key(&[2], &[2])), c2 / int(2));
        assert_eq!(k.coeff(&key(&[1, 1], &[1, 1])), &c1 * &c1 / int(2));
        // unbalanced monomials never appear
        assert_eq!(k.coeff(&key(&[2], &[1, 1])), int(0));
    }

    #[test]
    fn inverse_kernels_invert() {
        let p = params();
        let x = Alphabet::x();
        let y = Alphabet::y();
        for (kind, inv) in [
            (KernelKind::Pi, KernelKind::PiInverse),
            (KernelKind::H, KernelKind::HInverse),
            (KernelKind::W, KernelKind::WInverse),
        ] {
            let a = kernel_series(kind, x, y, &p, 6);
            let b = kernel_series(inv, x, y, &p, 6);
            assert_eq!(a.mul(&b), AlphabetSeries::one(6));
            // and the generic degreewise reciprocal agrees
            assert_eq!(a.reciprocal(), b);
        }
    }

    #[test]
    fn cauchy_identity() {
        // Σ_{|λ|≤M} P_λ(X) Q_λ(Y) = Π(X;Y) truncated at 2M, for M ≤ 3
        let p = params();
        let mut ctx = MacCtx::new(p.clone());
        for m in 0..=3u32 {
            let t = 2 * m;
            let lhs = cauchy_sum(&mut ctx, Alphabet::x(), Alphabet::y(), m, t).unwrap();
            let rhs = kernel_series(KernelKind::Pi, Alphabet::x(), Alphabet::y(), &p, t);
            assert_eq!(lhs, rhs, "M = {m}");
        }
    }

    #[test]
    fn pairing_of_pi_kernels_reproduces_pi() {
        // ⟨Π(X;Y), Π(Y;Z)⟩_Y = Π(X;Z)
        let p = params();
        let x = Alphabet::x();
        let y = Alphabet::y();
        let z = Alphabet::new('Z', 0);
        let t = 6;
        let a = kernel_series(KernelKind::Pi, x, y, &p, t);
        let b = kernel_series(KernelKind::Pi, y, z, &p, t);
        let paired = alphabet_pair(&a, &b, y, &p);
        let expect = kernel_series(KernelKind::Pi, x, z, &p, t);
        assert_eq!(paired, expect);
    }

    #[test]
    fn coproduct_examples() {
        let x = Alphabet::x();
        let y = Alphabet::y();
        let p1 = SymFunc::p(Partition::new(&[1]), 2);
        let d = coproduct(&p1, x, y, 2);
        assert_eq!(
            d,
            AlphabetSeries::p_k(x, 1, 2).add(&AlphabetSeries::p_k(y, 1, 2))
        );
        // p_1² → p_1(X)² + 2 p_1(X)p_1(Y) + p_1(Y)²
        let sq = p1.mul(&p1);
        let d2 = coproduct(&sq, x, y, 2);
        let px = AlphabetSeries::p_k(x, 1, 2);
        let py = AlphabetSeries::p_k(y, 1, 2);
        assert_eq!(d2, px.add(&py).mul(&px.add(&py)));
    }

    #[test]
    fn skew_multiplication_law() {
        // Σ_μ P_μ(X)·P_{λ/μ}(Y) = Δ(P_λ), |λ| ≤ 5
        let p = params();
        let mut ctx = MacCtx::new(p);
        let x = Alphabet::x();
        let y = Alphabet::y();
        for lam in crate::partition::enumerate_partitions(5) {
            let d = lam.size();
            let target = coproduct(&ctx.p(&lam).unwrap(), x, y, d);
            let mut sum = AlphabetSeries::zero(d);
            for mu in crate::partition::enumerate_partitions(d) {
                if !lam.contains(&mu) {
                    continue;
                }
                let pmu = ctx.p(&mu).unwrap();
                let skew = ctx.skew_p(&lam, &mu).unwrap();
                let a = AlphabetSeries::from_symfunc(x, &pmu, d);
                let b = AlphabetSeries::from_symfunc(y, &skew, d);
                sum = sum.add(&a.mul(&b));
            }
            assert_eq!(sum, target, "λ = {lam}");
        }
    }

    #[test]
    fn fast_path_matches_generic_pairing() {
        // randomized truncated exponentials with homogeneous a_k of
        // degree k: fast path ≡ build + generic pairing
        let p = params();
        let x = Alphabet::x();
        let y = Alphabet::y();
        let c = Alphabet::new('C', 0);
        let trunc = 5u32;
        let mut gen = GenericPoints::new(42);
        for _ in 0..10 {
            let mut a: Vec<AlphabetSeries> = Vec::new();
            let mut b: Vec<AlphabetSeries> = Vec::new();
            for k in 1..=trunc {
                a.push(AlphabetSeries::p_k(x, k, trunc).scale(&gen.next_rational()));
                b.push(AlphabetSeries::p_k(y, k, trunc).scale(&gen.next_rational()));
            }
            let ea = exponential_in_alphabet(c, &a, trunc);
            let eb = exponential_in_alphabet(c, &b, trunc);
            let generic = alphabet_pair(&ea, &eb, c, &p);
            let fast = pair_exponentials(&a, &b, &p, trunc);
            assert_eq!(generic, fast);
        }
    }
}
