//! Formal Macdonald measures and processes: 𝕐^N-indexed weights valued in
//! truncated multi-alphabet series, the observables O_r and Ô₁, and the
//! expectation sums that form the left-hand sides of the contour-integral
//! identities.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::alphabet::{Alphabet, AlphabetSeries};
use crate::error::{Error, Result};
use crate::kernels::{kernel_series, KernelKind};
use crate::macdonald::MacCtx;
use crate::params::Params;
use crate::partition::{enumerate_partitions, Partition};
use crate::scalar::{powi, Scalar};

/// Shape of an N-level formal process: one A- and one B-alphabet per
/// level and a global truncation order.
#[derive(Clone, Debug)]
pub struct ProcessSpec {
    pub a_alphabets: Vec<Alphabet>,
    pub b_alphabets: Vec<Alphabet>,
    pub trunc: u32,
}

impl ProcessSpec {
    /// Standard naming A¹..Aᴺ, B¹..Bᴺ.
    pub fn standard(n: usize, trunc: u32) -> Self {
        assert!(n >= 1 && n <= u8::MAX as usize);
        ProcessSpec {
            a_alphabets: (1..=n).map(|i| Alphabet::a(i as u8)).collect(),
            b_alphabets: (1..=n).map(|i| Alphabet::b(i as u8)).collect(),
            trunc,
        }
    }

    pub fn levels(&self) -> usize {
        self.a_alphabets.len()
    }

    /// Partition-size bound that exhausts every sequence contributing in
    /// degrees ≤ trunc: the weight of (λ¹..λᴺ) has minimal total degree
    /// ≥ 2·max_k |λᵏ|.
    pub fn size_bound(&self) -> u32 {
        self.trunc / 2
    }
}

/// Ψ_{λ,μ}(A;B) = Σ_ν P_{λ/ν}(A) Q_{μ/ν}(B), a finite sum over ν ⊆ λ ∧ μ.
pub fn psi(
    ctx: &mut MacCtx,
    lambda: &Partition,
    mu: &Partition,
    a: Alphabet,
    b: Alphabet,
    trunc: u32,
) -> Result<AlphabetSeries> {
    let mut out = AlphabetSeries::zero(trunc);
    let meet = lambda.meet(mu);
    for nu in enumerate_partitions(meet.size()) {
        if !meet.contains(&nu) {
            continue;
        }
        let sp = ctx.skew_p(lambda, &nu)?;
        if sp.is_zero() {
            continue;
        }
        let sq = ctx.skew_q(mu, &nu)?;
        if sq.is_zero() {
            continue;
        }
        let fa = AlphabetSeries::from_symfunc(a, &sp, trunc);
        let fb = AlphabetSeries::from_symfunc(b, &sq, trunc);
        out = out.add(&fa.mul(&fb));
    }
    Ok(out)
}

/// ∏_{1 ≤ α ≤ β ≤ N} Π(A^α; B^β)⁻¹ — the normalizing factor of every
/// process weight, computed once per spec.
pub fn normalization(spec: &ProcessSpec, params: &Params) -> AlphabetSeries {
    let n = spec.levels();
    let mut out = AlphabetSeries::one(spec.trunc);
    for alpha in 0..n {
        for beta in alpha..n {
            let k = kernel_series(
                KernelKind::PiInverse,
                spec.a_alphabets[alpha],
                spec.b_alphabets[beta],
                params,
                spec.trunc,
            );
            out = out.mul(&k);
        }
    }
    out
}

/// Unnormalized weight P_{λ¹}(A¹) ∏_k Ψ_{λᵏ,λᵏ⁻¹}(Aᵏ;Bᵏ⁻¹) Q_{λᴺ}(Bᴺ).
pub fn mp_weight_numerator(
    ctx: &mut MacCtx,
    lambdas: &[Partition],
    spec: &ProcessSpec,
) -> Result<AlphabetSeries> {
    let n = spec.levels();
    assert_eq!(lambdas.len(), n);
    let p1 = ctx.p(&lambdas[0])?;
    let mut acc = AlphabetSeries::from_symfunc(spec.a_alphabets[0], &p1, spec.trunc);
    for k in 1..n {
        let f = psi(
            ctx,
            &lambdas[k],
            &lambdas[k - 1],
            spec.a_alphabets[k],
            spec.b_alphabets[k - 1],
            spec.trunc,
        )?;
        acc = acc.mul(&f);
        if acc.is_zero() {
            return Ok(acc);
        }
    }
    let qn = ctx.q(&lambdas[n - 1])?;
    Ok(acc.mul(&AlphabetSeries::from_symfunc(
        spec.b_alphabets[n - 1],
        &qn,
        spec.trunc,
    )))
}

/// Full formal-process weight of (λ¹..λᴺ), including the Π-normalization.
pub fn mp_weight(
    ctx: &mut MacCtx,
    lambdas: &[Partition],
    spec: &ProcessSpec,
) -> Result<AlphabetSeries> {
    let num = mp_weight_numerator(ctx, lambdas, spec)?;
    let params = ctx.params.clone();
    Ok(num.mul(&normalization(spec, &params)))
}

/// The weight numerator by the iterated-pairing route: pair
/// P_{λᵏ}(Aᵏ,Yᵏ⁻¹) against Q_{λᵏ⁻¹}(Yᵏ⁻¹,Bᵏ⁻¹) over auxiliary alphabets.
/// Must agree with the Ψ-product form coefficientwise.
pub fn mp_weight_numerator_pairing_form(
    ctx: &mut MacCtx,
    lambdas: &[Partition],
    spec: &ProcessSpec,
) -> Result<AlphabetSeries> {
    let n = spec.levels();
    assert_eq!(lambdas.len(), n);
    let trunc = spec.trunc;
    let params = ctx.params.clone();
    let p1 = ctx.p(&lambdas[0])?;
    let mut acc = AlphabetSeries::from_symfunc(spec.a_alphabets[0], &p1, trunc);
    for k in 1..n {
        let yk = Alphabet::new('Y', k as u8);
        // Q_{λᵏ⁻¹}(Yᵏ⁻¹, Bᵏ⁻¹)
        let q_prev = ctx.q(&lambdas[k - 1])?;
        let q_split = crate::kernels::coproduct(&q_prev, yk, spec.b_alphabets[k - 1], trunc);
        // P_{λᵏ}(Aᵏ, Yᵏ⁻¹)
        let p_cur = ctx.p(&lambdas[k])?;
        let p_split = crate::kernels::coproduct(&p_cur, spec.a_alphabets[k], yk, trunc);
        let paired = crate::alphabet::alphabet_pair(&p_split, &q_split, yk, &params);
        acc = acc.mul(&paired);
        if acc.is_zero() {
            return Ok(acc);
        }
    }
    let qn = ctx.q(&lambdas[n - 1])?;
    Ok(acc.mul(&AlphabetSeries::from_symfunc(
        spec.b_alphabets[n - 1],
        &qn,
        trunc,
    )))
}

/// e_r(values) by DP over the list.
pub fn elementary_symmetric(values: &[Scalar], r: usize) -> Scalar {
    let mut e: Vec<Scalar> = Vec::with_capacity(r + 1);
    e.push(Scalar::one());
    for _ in 0..r {
        e.push(Scalar::zero());
    }
    for v in values {
        for j in (1..=r).rev() {
            let add = &e[j - 1] * v;
            e[j] += add;
        }
    }
    e[r].clone()
}

/// τ_j(ℓ) = e_j(t^ℓ, t^{ℓ+1}, …) = t^{jℓ + j(j−1)/2} / ∏_{i=1}^{j}(1−t^i):
/// the geometric-tail part of O_r. Derived closed form; the stabilization
/// oracle in the tests validates it before anything else relies on it.
pub fn tail_elementary(j: u32, ell: u32, params: &Params) -> Result<Scalar> {
    if j == 0 {
        return Ok(Scalar::one());
    }
    params.require_positive_t("observable tail")?;
    let mut num = params.t_pow((j * ell + j * (j - 1) / 2) as i32);
    for i in 1..=j {
        num /= Scalar::one() - params.t_pow(i as i32);
    }
    Ok(num)
}

/// O_r(λ) = lim_M e_r(q^{−λ_1}, q^{−λ_2}t, …, q^{−λ_M}t^{M−1})
///        = Σ_{j=0}^{r} e_{r−j}({q^{−λ_i}t^{i−1}}_{i≤ℓ}) · τ_j(ℓ).
pub fn observable_o(r: u32, lambda: &Partition, params: &Params) -> Result<Scalar> {
    if r == 0 {
        return Ok(Scalar::one());
    }
    params.require_positive_t("O_r with r ≥ 1")?;
    let ell = lambda.len() as u32;
    let head: Vec<Scalar> = (1..=ell)
        .map(|i| params.q_pow(-(lambda.part(i as usize) as i32)) * params.t_pow(i as i32 - 1))
        .collect();
    let mut acc = Scalar::zero();
    for j in 0..=r {
        let e_head = elementary_symmetric(&head, (r - j) as usize);
        if e_head.is_zero() {
            continue;
        }
        acc += e_head * tail_elementary(j, ell, params)?;
    }
    Ok(acc)
}

/// Finite-M oracle for O_r: e_r over the explicit list
/// (q^{−λ_1}t⁰, …, q^{−λ_M}t^{M−1}) with λ padded by zeros.
pub fn observable_o_finite(r: u32, lambda: &Partition, m: u32, params: &Params) -> Scalar {
    let values: Vec<Scalar> = (1..=m)
        .map(|i| params.q_pow(-(lambda.part(i as usize) as i32)) * params.t_pow(i as i32 - 1))
        .collect();
    elementary_symmetric(&values, r as usize)
}

/// Ô₁(λ) = 1 + (1−t) Σ_{j=1}^{ℓ(λ)} (1 − q^{λ_j}) t^{−j}.
pub fn observable_ohat1(lambda: &Partition, params: &Params) -> Result<Scalar> {
    params.require_positive_t("Ô₁")?;
    let mut sum = Scalar::zero();
    for j in 1..=lambda.len() {
        let factor = Scalar::one() - params.q_pow(lambda.part(j) as i32);
        sum += factor * params.t_pow(-(j as i32));
    }
    Ok(Scalar::one() + (Scalar::one() - params.t.clone()) * sum)
}

/// Which observable attaches to a level of the plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObservableKind {
    /// O_r; r = 0 is the trivial observable.
    O(u32),
    /// The variant Ô₁.
    OHat1,
}

/// A product of observables over levels, with optional per-level scale
/// constants c_i entering as c_i^{|λⁱ|}.
#[derive(Clone, Debug)]
pub struct ObservablePlan {
    /// (level 1..N, kind, multiplicity ≥ 1).
    pub entries: Vec<(usize, ObservableKind, u32)>,
    /// Optional c_1..c_N.
    pub scales: Option<Vec<Scalar>>,
}

impl ObservablePlan {
    pub fn trivial() -> Self {
        ObservablePlan {
            entries: Vec::new(),
            scales: None,
        }
    }

    /// O_{rs[0]} on level 1, O_{rs[1]} on level 2, … (zeros omitted).
    pub fn single_per_level(rs: &[u32]) -> Self {
        ObservablePlan {
            entries: rs
                .iter()
                .enumerate()
                .filter(|(_, &r)| r > 0)
                .map(|(i, &r)| (i + 1, ObservableKind::O(r), 1))
                .collect(),
            scales: None,
        }
    }

    pub fn validate(&self, levels: usize) -> Result<()> {
        for &(level, _, mult) in &self.entries {
            if level < 1 || level > levels {
                return Err(Error::InvalidInput(alloc::format!(
                    "plan level {level} outside 1..={levels}"
                )));
            }
            if mult < 1 {
                return Err(Error::InvalidInput(alloc::string::String::from(
                    "plan multiplicity must be >= 1",
                )));
            }
        }
        if let Some(cs) = &self.scales {
            if cs.len() != levels {
                return Err(Error::InvalidInput(alloc::string::String::from(
                    "scale constants must cover every level",
                )));
            }
        }
        Ok(())
    }

    /// The scalar this plan attaches to λ at the given level.
    pub fn factor(&self, level: usize, lambda: &Partition, params: &Params) -> Result<Scalar> {
        let mut acc = Scalar::one();
        for &(lv, kind, mult) in &self.entries {
            if lv != level {
                continue;
            }
            let base = match kind {
                ObservableKind::O(r) => observable_o(r, lambda, params)?,
                ObservableKind::OHat1 => observable_ohat1(lambda, params)?,
            };
            acc *= powi(&base, mult as i32);
        }
        if let Some(cs) = &self.scales {
            acc *= powi(&cs[level - 1], lambda.size() as i32);
        }
        Ok(acc)
    }
}

/// Σ over all contributing sequences of (∏ observables)·mp_weight,
/// computed by a level sweep; exact in all degrees ≤ spec.trunc.
pub fn expectation_lhs(
    ctx: &mut MacCtx,
    plan: &ObservablePlan,
    spec: &ProcessSpec,
) -> Result<AlphabetSeries> {
    let n = spec.levels();
    plan.validate(n)?;
    let params = ctx.params.clone();
    let bound = spec.size_bound();
    let support = enumerate_partitions(bound);

    // f(λᵏ) accumulates the numerator summed over λ¹..λᵏ⁻¹
    let mut f: BTreeMap<Partition, AlphabetSeries> = BTreeMap::new();
    for lam in &support {
        let p1 = ctx.p(lam)?;
        let w = AlphabetSeries::from_symfunc(spec.a_alphabets[0], &p1, spec.trunc);
        let obs = plan.factor(1, lam, &params)?;
        f.insert(lam.clone(), w.scale(&obs));
    }
    for k in 1..n {
        let mut next: BTreeMap<Partition, AlphabetSeries> = BTreeMap::new();
        for cur in &support {
            let mut acc = AlphabetSeries::zero(spec.trunc);
            for (prev, fp) in &f {
                if fp.is_zero() {
                    continue;
                }
                let link = psi(
                    ctx,
                    cur,
                    prev,
                    spec.a_alphabets[k],
                    spec.b_alphabets[k - 1],
                    spec.trunc,
                )?;
                acc = acc.add(&fp.mul(&link));
            }
            let obs = plan.factor(k + 1, cur, &params)?;
            next.insert(cur.clone(), acc.scale(&obs));
        }
        f = next;
    }
    let mut total = AlphabetSeries::zero(spec.trunc);
    for (lam, fv) in &f {
        let q = ctx.q(lam)?;
        total = total.add(&fv.mul(&AlphabetSeries::from_symfunc(
            spec.b_alphabets[n - 1],
            &q,
            spec.trunc,
        )));
    }
    Ok(total.mul(&normalization(spec, &params)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use num_traits::Signed;

    fn ctx() -> MacCtx {
        MacCtx::new(Params::new(rat(1, 3), rat(1, 5)).unwrap())
    }

    #[test]
    fn psi_examples() {
        let mut c = ctx();
        let a = Alphabet::a(1);
        let b = Alphabet::b(1);
        // ψ_{∅,∅} = 1
        let f = psi(&mut c, &Partition::empty(), &Partition::empty(), a, b, 4).unwrap();
        assert_eq!(f, AlphabetSeries::one(4));
        // ψ_{(1),∅} = P_(1)(A) = p₁(A)
        let f = psi(&mut c, &Partition::new(&[1]), &Partition::empty(), a, b, 4).unwrap();
        assert_eq!(f, AlphabetSeries::p_k(a, 1, 4));
        // ψ_{λ,λ} has constant term 1 (the ν = λ term)
        for lam in crate::partition::enumerate_partitions(3) {
            let f = psi(&mut c, &lam, &lam, a, b, 6).unwrap();
            assert_eq!(f.constant_term(), int(1), "λ = {lam}");
        }
    }

    #[test]
    fn empty_weight_is_normalization() {
        // all λᵏ = ∅, N = 1, D = 2: Π(A;B)⁻¹ = 1 − (1−t)/(1−q)p₁(A)p₁(B) + …
        let mut c = ctx();
        let spec = ProcessSpec::standard(1, 2);
        let w = mp_weight(&mut c, &[Partition::empty()], &spec).unwrap();
        let c1 = (int(1) - rat(1, 5)) / (int(1) - rat(1, 3));
        let mut key = crate::alphabet::TermKey::new();
        key.insert(Alphabet::a(1), Partition::new(&[1]));
        key.insert(Alphabet::b(1), Partition::new(&[1]));
        assert_eq!(w.constant_term(), int(1));
        assert_eq!(w.coeff(&key), -c1);
    }

    #[test]
    fn weight_matches_pairing_form() {
        let mut c = ctx();
        let spec = ProcessSpec::standard(2, 4);
        for l1 in crate::partition::enumerate_partitions(2) {
            for l2 in crate::partition::enumerate_partitions(2) {
                let seq = [l1.clone(), l2.clone()];
                let a = mp_weight_numerator(&mut c, &seq, &spec).unwrap();
                let b = mp_weight_numerator_pairing_form(&mut c, &seq, &spec).unwrap();
                assert_eq!(a, b, "sequence ({l1}, {l2})");
            }
        }
    }

    #[test]
    fn mass_one_two_levels() {
        let mut c = ctx();
        let spec = ProcessSpec::standard(2, 4);
        let total = expectation_lhs(&mut c, &ObservablePlan::trivial(), &spec).unwrap();
        assert_eq!(total, AlphabetSeries::one(4));
    }

    #[test]
    fn observable_o_examples() {
        let q = rat(1, 3);
        let t = rat(1, 5);
        let p = Params::new(q.clone(), t.clone()).unwrap();
        // O_0 = 1 on anything
        assert_eq!(
            observable_o(0, &Partition::new(&[3, 1]), &p).unwrap(),
            int(1)
        );
        // O_1((1)) = q⁻¹ + t/(1−t)
        let got = observable_o(1, &Partition::new(&[1]), &p).unwrap();
        assert_eq!(got, q.recip() + &t / (int(1) - &t));
        // O_2(∅) = t/((1−t)(1−t²)) — the τ₂(0) tail
        let got = observable_o(2, &Partition::empty(), &p).unwrap();
        let expect = &t / ((int(1) - &t) * (int(1) - &t * &t));
        assert_eq!(got, expect);
    }

    #[test]
    fn observable_o_stabilization_oracle() {
        // e_r over the explicit geometric list stabilizes to the closed
        // form: approach is monotone in M and already within t^35 at M=40.
        let p = Params::new(rat(1, 3), rat(1, 5)).unwrap();
        for r in 1..=3u32 {
            for lam in [
                Partition::empty(),
                Partition::new(&[1]),
                Partition::new(&[2, 1]),
                Partition::new(&[3, 1, 1]),
            ] {
                let closed = observable_o(r, &lam, &p).unwrap();
                let m40 = observable_o_finite(r, &lam, 40, &p);
                let m60 = observable_o_finite(r, &lam, 60, &p);
                let d40 = (&closed - &m40).abs();
                let d60 = (&closed - &m60).abs();
                assert!(
                    d60 < d40 || (d40.is_zero() && d60.is_zero()),
                    "r={r} λ={lam}"
                );
                let tol = crate::scalar::powi(&rat(1, 5), 35);
                assert!(d40 < tol, "r={r} λ={lam}: defect {d40}");
            }
        }
    }

    #[test]
    fn observable_ohat1_examples() {
        let q = rat(1, 3);
        let t = rat(1, 5);
        let p = Params::new(q.clone(), t.clone()).unwrap();
        assert_eq!(observable_ohat1(&Partition::empty(), &p).unwrap(), int(1));
        // Ô₁((1)) = 1 + (1−t)(1−q)/t
        let got = observable_ohat1(&Partition::new(&[1]), &p).unwrap();
        assert_eq!(got, int(1) + (int(1) - &t) * (int(1) - &q) / &t);
        // Ô₁((2,1)) = 1 + (1−t)[(1−q²)/t + (1−q)/t²]
        let got = observable_ohat1(&Partition::new(&[2, 1]), &p).unwrap();
        let expect =
            int(1) + (int(1) - &t) * ((int(1) - &q * &q) / &t + (int(1) - &q) / (&t * &t));
        assert_eq!(got, expect);
        // t = 0 is rejected
        let p0 = Params::new(rat(1, 3), rat(0, 1)).unwrap();
        assert!(observable_ohat1(&Partition::new(&[1]), &p0).is_err());
        assert!(observable_o(1, &Partition::new(&[1]), &p0).is_err());
    }

    #[test]
    fn enumeration_bound_soundness() {
        // widening the partition-size bound leaves the expectation
        // unchanged: larger sequences only contribute above the truncation
        let mut c = ctx();
        let spec = ProcessSpec::standard(1, 2);
        let narrow = expectation_lhs(&mut c, &ObservablePlan::trivial(), &spec).unwrap();
        let mut wide = AlphabetSeries::zero(2);
        for lam in crate::partition::enumerate_partitions(3) {
            wide = wide.add(&mp_weight(&mut c, &[lam], &spec).unwrap());
        }
        assert_eq!(narrow, wide);
    }
}
