//! Macdonald symmetric functions P_λ, Q_λ and their skew variants,
//! constructed by Gram–Schmidt over the dominance order within each
//! degree, entirely in exact rational arithmetic.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::monomial::MonomialTable;
use crate::params::Params;
use crate::partition::{partitions_of, Partition};
use crate::qfunc::{z_combinatorial, z_factor_raw};
use crate::scalar::{int, Scalar};
use crate::symfunc::SymFunc;

/// All multiset splittings λ = α ⊎ β with multinomial multiplicities:
/// Δ(p_λ) = Σ C(λ;α) p_α ⊗ p_β. Coefficient C = ∏_i binom(m_i(λ), m_i(α)).
pub fn coproduct_splits(lambda: &Partition) -> Vec<(Partition, Partition, Scalar)> {
    // distinct part values with multiplicities
    let mut groups: Vec<(u32, u32)> = Vec::new();
    for &p in lambda.parts() {
        match groups.last_mut() {
            Some((v, m)) if *v == p => *m += 1,
            _ => groups.push((p, 1)),
        }
    }
    let mut out: Vec<(Vec<u32>, Vec<u32>, Scalar)> = alloc::vec![(Vec::new(), Vec::new(), Scalar::one())];
    for &(v, m) in &groups {
        let mut next = Vec::new();
        for (a, b, c) in &out {
            for k in 0..=m {
                let mut a2 = a.clone();
                let mut b2 = b.clone();
                for _ in 0..k {
                    a2.push(v);
                }
                for _ in 0..(m - k) {
                    b2.push(v);
                }
                next.push((a2, b2, c * binom(m, k)));
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|(a, b, c)| (Partition::from_unsorted(&a), Partition::from_unsorted(&b), c))
        .collect()
}

fn binom(n: u32, k: u32) -> Scalar {
    let mut acc = Scalar::one();
    for i in 0..k {
        acc *= int((n - i) as i64);
        acc /= int((i + 1) as i64);
    }
    acc
}

/// Cache of Gram–Schmidt output per degree, shared by everything that
/// consumes Macdonald functions. Build once, then read-only.
pub struct MacCtx {
    pub params: Params,
    tables: BTreeMap<u32, MonomialTable>,
    /// P_λ in the p-basis, homogeneous with trunc = |λ|.
    p_funcs: BTreeMap<Partition, SymFunc>,
    /// ⟨P_λ, P_λ⟩.
    norms: BTreeMap<Partition, Scalar>,
    skew_p: BTreeMap<(Partition, Partition), SymFunc>,
}

impl MacCtx {
    pub fn new(params: Params) -> Self {
        MacCtx {
            params,
            tables: BTreeMap::new(),
            p_funcs: BTreeMap::new(),
            norms: BTreeMap::new(),
            skew_p: BTreeMap::new(),
        }
    }

    pub fn table(&mut self, degree: u32) -> Result<&MonomialTable> {
        if !self.tables.contains_key(&degree) {
            let t = MonomialTable::build(degree)?;
            self.tables.insert(degree, t);
        }
        Ok(&self.tables[&degree])
    }

    fn ensure_degree(&mut self, degree: u32) -> Result<()> {
        if degree == 0 || self.p_funcs.contains_key(&Partition::new(&[degree])) {
            return Ok(());
        }
        let q = self.params.q.clone();
        let t = self.params.t.clone();
        let table = self.table(degree)?.clone();
        let built = gram_schmidt_degree(&table, &|f, g| {
            crate::symfunc::macdonald_pair_raw(f, g, &q, &t)
        })?;
        for (lam, f, n) in built {
            self.p_funcs.insert(lam.clone(), f);
            self.norms.insert(lam, n);
        }
        Ok(())
    }

    /// P_λ in the p-basis (homogeneous of degree |λ|, trunc = |λ|).
    pub fn p(&mut self, lambda: &Partition) -> Result<SymFunc> {
        if lambda.is_empty() {
            return Ok(SymFunc::one(0));
        }
        self.ensure_degree(lambda.size())?;
        Ok(self.p_funcs[lambda].clone())
    }

    /// ⟨P_λ, P_λ⟩.
    pub fn norm(&mut self, lambda: &Partition) -> Result<Scalar> {
        if lambda.is_empty() {
            return Ok(Scalar::one());
        }
        self.ensure_degree(lambda.size())?;
        Ok(self.norms[lambda].clone())
    }

    /// Q_λ = ⟨P_λ, P_λ⟩⁻¹ P_λ.
    pub fn q(&mut self, lambda: &Partition) -> Result<SymFunc> {
        let f = self.p(lambda)?;
        let n = self.norm(lambda)?;
        Ok(f.scale(&n.recip()))
    }

    /// Skew function P_{λ/μ} = ⟨P_λ(X,Y), Q_μ(Y)⟩_Y (homogeneous of
    /// degree |λ|−|μ|; the zero function unless μ ⊆ λ).
    pub fn skew_p(&mut self, lambda: &Partition, mu: &Partition) -> Result<SymFunc> {
        let key = (lambda.clone(), mu.clone());
        if let Some(f) = self.skew_p.get(&key) {
            return Ok(f.clone());
        }
        let d = lambda.size().saturating_sub(mu.size());
        let p_lam = self.p(lambda)?;
        let q_mu = self.q(mu)?;
        let mut out = SymFunc::zero(d);
        for (nu, c) in &p_lam.terms {
            for (alpha, beta, mult) in coproduct_splits(nu) {
                if beta.size() != mu.size() {
                    continue;
                }
                let inner = q_mu.coeff(&beta) * z_factor_raw(&beta, &self.params.q, &self.params.t);
                if inner.is_zero() {
                    continue;
                }
                out.add_term(alpha, c * mult * inner);
            }
        }
        self.skew_p.insert(key, out.clone());
        Ok(out)
    }

    /// Skew function Q_{λ/μ} = (⟨P_λ,P_λ⟩/⟨P_μ,P_μ⟩)⁻¹ ·… computed as
    /// ⟨Q_λ(X,Y), P_μ(Y)⟩_Y = (b_λ/b_μ) P_{λ/μ} with b_κ = ⟨P_κ,P_κ⟩⁻¹.
    pub fn skew_q(&mut self, lambda: &Partition, mu: &Partition) -> Result<SymFunc> {
        let f = self.skew_p(lambda, mu)?;
        let nl = self.norm(lambda)?;
        let nm = self.norm(mu)?;
        Ok(f.scale(&(nm / nl)))
    }

    /// Evaluate P_{λ/μ} at the single-variable specialization x = a
    /// (zero unless λ/μ is a horizontal strip).
    pub fn skew_p_single(&mut self, lambda: &Partition, mu: &Partition, a: &Scalar) -> Result<Scalar> {
        if !lambda.horizontal_strip_over(mu) {
            return Ok(Scalar::zero());
        }
        let f = self.skew_p(lambda, mu)?;
        let d = lambda.size() - mu.size();
        let powers: Vec<Scalar> = (1..=d.max(1))
            .map(|k| crate::scalar::powi(a, k as i32))
            .collect();
        Ok(f.specialize(&powers))
    }
}

/// Gram–Schmidt at one degree with respect to an arbitrary bilinear
/// pairing on the p-basis. Partitions are processed upward in the
/// reverse-lex order (which refines dominance), so each P_λ is
/// `m_λ + (strictly dominance-lower monomials)`.
///
/// Returns `(λ, P_λ in p-basis, ⟨P_λ,P_λ⟩)` triples.
pub fn gram_schmidt_degree(
    table: &MonomialTable,
    pair: &dyn Fn(&SymFunc, &SymFunc) -> Scalar,
) -> Result<Vec<(Partition, SymFunc, Scalar)>> {
    let d = table.degree;
    let n = table.parts.len();
    let mut built: Vec<(Partition, SymFunc, Scalar)> = Vec::with_capacity(n);
    // ascending dominance: reverse of the stored descending order
    for i in (0..n).rev() {
        let lam = table.parts[i].clone();
        let mut f = SymFunc::zero(d);
        for (j, c) in table.m2p[i].iter().enumerate() {
            f.add_term(table.parts[j].clone(), c.clone());
        }
        for (_, g, norm) in &built {
            let c = pair(&f, g) / norm;
            if !c.is_zero() {
                f = f.sub(&g.scale(&c));
            }
        }
        let norm = pair(&f, &f);
        if norm.is_zero() {
            return Err(Error::DegenerateParams(alloc::format!(
                "Gram-Schmidt pivot vanished at {lam}; re-run with different (q,t)"
            )));
        }
        built.push((lam, f, norm));
    }
    Ok(built)
}

/// Macdonald P_λ at truncation order `trunc` (free-function form).
pub fn macdonald_p(lambda: &Partition, params: &Params, trunc: u32) -> Result<SymFunc> {
    assert!(lambda.size() <= trunc);
    let mut ctx = MacCtx::new(params.clone());
    Ok(ctx.p(lambda)?.truncate(lambda.size()).with_trunc(trunc))
}

/// Macdonald Q_λ at truncation order `trunc` (free-function form).
pub fn macdonald_q(lambda: &Partition, params: &Params, trunc: u32) -> Result<SymFunc> {
    assert!(lambda.size() <= trunc);
    let mut ctx = MacCtx::new(params.clone());
    Ok(ctx.q(lambda)?.with_trunc(trunc))
}

impl SymFunc {
    /// Same terms, different truncation bound (must not lose terms).
    pub fn with_trunc(&self, trunc: u32) -> SymFunc {
        assert!(self.max_degree() <= trunc);
        SymFunc {
            trunc,
            terms: self.terms.clone(),
        }
    }
}

/// P_λ built with the scalar product at raw rational (q,t) — no range
/// restriction. Exercises the parameter inversion P(·;q,t) = P(·;q⁻¹,t⁻¹).
pub fn macdonald_p_raw(lambda: &Partition, q: &Scalar, t: &Scalar) -> Result<SymFunc> {
    if lambda.is_empty() {
        return Ok(SymFunc::one(0));
    }
    let table = MonomialTable::build(lambda.size())?;
    let built = gram_schmidt_degree(&table, &|f, g| {
        crate::symfunc::macdonald_pair_raw(f, g, q, t)
    })?;
    built
        .into_iter()
        .find(|(l, _, _)| l == lambda)
        .map(|(_, f, _)| f)
        .ok_or_else(|| Error::InvalidInput(alloc::string::String::from("partition not found")))
}

/// The complete homogeneous function h_k in the p-basis:
/// h_k = Σ_{|μ|=k} p_μ / z_μ.
pub fn complete_homogeneous(k: u32, trunc: u32) -> SymFunc {
    let mut f = SymFunc::zero(trunc);
    for mu in partitions_of(k) {
        let z = z_combinatorial(&mu);
        f.add_term(mu, z.recip());
    }
    f
}

/// Schur function via the Jacobi–Trudi determinant
/// s_λ = det[h_{λ_i − i + j}], expanded over permutations.
/// Independent of the Gram–Schmidt path; the q = t degeneration oracle.
pub fn schur_jacobi_trudi(lambda: &Partition, trunc: u32) -> SymFunc {
    if lambda.is_empty() {
        return SymFunc::one(trunc);
    }
    let l = lambda.len();
    let mut result = SymFunc::zero(trunc);
    let mut perm: Vec<usize> = (0..l).collect();
    loop {
        let mut sign = Scalar::one();
        {
            // permutation sign by counting inversions
            let mut inv = 0;
            for i in 0..l {
                for j in (i + 1)..l {
                    if perm[i] > perm[j] {
                        inv += 1;
                    }
                }
            }
            if inv % 2 == 1 {
                sign = -sign;
            }
        }
        let mut term = SymFunc::one(trunc);
        let mut ok = true;
        for (i, &pj) in perm.iter().enumerate() {
            let e = lambda.part(i + 1) as i64 - (i as i64 + 1) + (pj as i64 + 1);
            if e < 0 {
                ok = false;
                break;
            }
            if e > 0 {
                term = term.mul(&complete_homogeneous(e as u32, trunc));
            }
        }
        if ok {
            result = result.add(&term.scale(&sign));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    result
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}
