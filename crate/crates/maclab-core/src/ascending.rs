//! Ascending Macdonald processes at exact rational parameters: Macdonald
//! difference operators and their chains, the Noumi q-integral operator,
//! both Fredholm determinant expansions per u-coefficient, and certified
//! tail bounds for the truncated partition sums.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::contour::iterated_residue_integral;
use crate::error::{Error, Result};
use crate::macdonald::MacCtx;
use crate::params::Params;
use crate::partition::{enumerate_bounded, Partition};
use crate::poly::MultiPoly;
use crate::process::elementary_symmetric;
use crate::scalar::{int, powi, RatInterval, Scalar};

/// A specialization ρ with a certified radius: |p_k(ρ)| ≤ R^k for all k.
#[derive(Clone, Debug)]
pub enum RhoKind {
    /// Finite alphabet b₁..b_M; the only kind the exact engine accepts.
    FiniteAlphabet(Vec<Scalar>),
    /// p₁ = γ, p_k = 0 for k ≥ 2.
    Plancherel(Scalar),
    /// p_k = 0 for all k.
    Zero,
}

#[derive(Clone, Debug)]
pub struct SpecializationRho {
    pub kind: RhoKind,
    pub radius: Scalar,
}

impl SpecializationRho {
    pub fn finite(parts: Vec<Scalar>) -> Self {
        let radius = parts.iter().fold(Scalar::zero(), |acc, b| acc + b.abs());
        SpecializationRho {
            kind: RhoKind::FiniteAlphabet(parts),
            radius,
        }
    }

    pub fn plancherel(gamma: Scalar) -> Self {
        let radius = gamma.abs();
        SpecializationRho {
            kind: RhoKind::Plancherel(gamma),
            radius,
        }
    }

    pub fn zero() -> Self {
        SpecializationRho {
            kind: RhoKind::Zero,
            radius: Scalar::zero(),
        }
    }

    /// p_k(ρ), k ≥ 1 (rational for every supported kind).
    pub fn p_value(&self, k: u32) -> Scalar {
        match &self.kind {
            RhoKind::FiniteAlphabet(bs) => {
                bs.iter().fold(Scalar::zero(), |acc, b| acc + powi(b, k as i32))
            }
            RhoKind::Plancherel(g) => {
                if k == 1 {
                    g.clone()
                } else {
                    Scalar::zero()
                }
            }
            RhoKind::Zero => Scalar::zero(),
        }
    }

    /// The alphabet parts, for operations that need Π-ratios in rational
    /// closed form.
    pub fn finite_parts(&self) -> Result<&[Scalar]> {
        match &self.kind {
            RhoKind::FiniteAlphabet(bs) => Ok(bs),
            RhoKind::Zero => Ok(&[]),
            RhoKind::Plancherel(_) => Err(Error::InvalidInput(String::from(
                "exact mode requires a finite-alphabet specialization",
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radius >= Scalar::one() || self.radius.is_negative() {
            return Err(Error::InvalidInput(String::from(
                "certified radius must satisfy 0 <= R < 1",
            )));
        }
        match &self.kind {
            RhoKind::FiniteAlphabet(bs) => {
                let sum_abs = bs.iter().fold(Scalar::zero(), |acc, b| acc + b.abs());
                if sum_abs > self.radius {
                    return Err(Error::InvalidInput(String::from(
                        "radius does not certify |p_k| <= R^k (need R >= sum of |b|)",
                    )));
                }
            }
            RhoKind::Plancherel(g) => {
                if g.abs() > self.radius {
                    return Err(Error::InvalidInput(String::from(
                        "radius does not certify the Plancherel weight (need R >= |gamma|)",
                    )));
                }
            }
            RhoKind::Zero => {}
        }
        Ok(())
    }
}

/// Parameters of an ascending process: N, the evaluation points a_i, ρ.
#[derive(Clone, Debug)]
pub struct AscendingConfig {
    pub n: usize,
    pub a: Vec<Scalar>,
    pub rho: SpecializationRho,
    pub params: Params,
}

impl AscendingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.n || self.n == 0 {
            return Err(Error::InvalidInput(String::from(
                "need exactly N nonzero points a_1..a_N",
            )));
        }
        self.rho.validate()?;
        for (i, ai) in self.a.iter().enumerate() {
            if ai.is_zero() {
                return Err(Error::InvalidInput(String::from("the a_i must be nonzero")));
            }
            if self.a[..i].contains(ai) {
                return Err(Error::DegenerateParams(String::from(
                    "coincident a_i; perturb to distinct rationals",
                )));
            }
            if ai.abs() * &self.rho.radius >= Scalar::one() {
                return Err(Error::InvalidInput(String::from(
                    "radius condition violated: need |a_i| * R < 1",
                )));
            }
        }
        Ok(())
    }

    /// The strengthened condition |a_i| R < q^m needed by the hatted
    /// observables.
    pub fn validate_strengthened(&self, m: u32) -> Result<()> {
        self.validate()?;
        let qm = self.params.q_pow(m as i32);
        for ai in &self.a {
            if ai.abs() * &self.rho.radius >= qm {
                return Err(Error::InvalidInput(String::from(
                    "strengthened radius condition violated: need |a_i| * R < q^m",
                )));
            }
        }
        Ok(())
    }

    pub fn require_positive_data(&self) -> Result<()> {
        let ok_a = self.a.iter().all(|x| x.is_positive());
        let ok_b = match &self.rho.kind {
            RhoKind::FiniteAlphabet(bs) => bs.iter().all(|b| !b.is_negative()),
            RhoKind::Plancherel(g) => !g.is_negative(),
            RhoKind::Zero => true,
        };
        if ok_a && ok_b {
            Ok(())
        } else {
            Err(Error::InvalidInput(String::from(
                "certified bounds need nonnegative a's and specialization values",
            )))
        }
    }
}

/// Π(q·x; ρ)/Π(x; ρ) = ∏_s (1 − x b_s)/(1 − t x b_s).
pub fn pi_ratio_up(x: &Scalar, config: &AscendingConfig) -> Result<Scalar> {
    let mut acc = Scalar::one();
    for b in config.rho.finite_parts()? {
        let den = Scalar::one() - &config.params.t * x * b;
        if den.is_zero() {
            return Err(Error::DegenerateParams(String::from(
                "pole collision in a specialization ratio",
            )));
        }
        acc *= (Scalar::one() - x * b) / den;
    }
    Ok(acc)
}

/// Π(q⁻¹x; ρ)/Π(x; ρ) = ∏_s (1 − t x b_s/q)/(1 − x b_s/q).
pub fn pi_ratio_down(x: &Scalar, config: &AscendingConfig) -> Result<Scalar> {
    let q = &config.params.q;
    let mut acc = Scalar::one();
    for b in config.rho.finite_parts()? {
        let den = Scalar::one() - x * b / q;
        if den.is_zero() {
            return Err(Error::DegenerateParams(String::from(
                "pole collision in a specialization ratio",
            )));
        }
        acc *= (Scalar::one() - &config.params.t * x * b / q) / den;
    }
    Ok(acc)
}

/// Subsets of {0..n−1} of size r.
fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// A_I(x;t)·t^{r(r−1)/2} = t^{r(r−1)/2} ∏_{i∈I, j∉I} (t x_i − x_j)/(x_i − x_j),
/// the coefficient of ∏_{i∈I} T_{q,i} in the r-th difference operator
/// (hatted variant replaces t by t⁻¹).
fn operator_coefficient(
    subset: &[usize],
    xs: &[Scalar],
    n: usize,
    tt: &Scalar,
) -> Result<Scalar> {
    let r = subset.len() as i32;
    let mut acc = powi(tt, r * (r - 1) / 2);
    for &i in subset {
        for j in 0..n {
            if subset.contains(&j) {
                continue;
            }
            let den = &xs[i] - &xs[j];
            if den.is_zero() {
                return Err(Error::DegenerateParams(String::from(
                    "coincident evaluation points in an operator coefficient",
                )));
            }
            acc *= (tt * &xs[i] - &xs[j]) / den;
        }
    }
    Ok(acc)
}

/// Apply the r-th Macdonald difference operator in n variables to an
/// explicit polynomial and evaluate at a point:
///   t^{r(r−1)/2} Σ_{|I|=r} A_I(x) · f(q^{e_I} ∘ x).
pub fn difference_operator_value(
    f: &MultiPoly,
    r: usize,
    n: usize,
    hatted: bool,
    params: &Params,
    xs: &[Scalar],
) -> Result<Scalar> {
    assert!(n <= xs.len() && n == f.nvars);
    let (tt, qq) = if hatted {
        params.require_positive_t("hatted operators")?;
        (params.t.clone().recip(), params.q.clone().recip())
    } else {
        (params.t.clone(), params.q.clone())
    };
    let mut acc = Scalar::zero();
    for subset in subsets(n, r) {
        let coeff = operator_coefficient(&subset, xs, n, &tt)?;
        let mut shifted: Vec<Scalar> = xs.to_vec();
        for &i in &subset {
            shifted[i] = &shifted[i] * &qq;
        }
        acc += coeff * f.eval(&shifted[..f.nvars]);
    }
    Ok(acc)
}

/// e_r of the spectrum: plain e_r(q^{λ₁}t^{n−1},…,q^{λ_n}t⁰), hatted
/// e_r(q^{−λ₁}t^{1−n},…,q^{−λ_n}).
pub fn spectrum_e(r: u32, lambda: &Partition, n: usize, hatted: bool, params: &Params) -> Result<Scalar> {
    if hatted {
        params.require_positive_t("hatted spectrum")?;
    }
    let values: Vec<Scalar> = (1..=n)
        .map(|i| {
            let l = lambda.part(i) as i32;
            if hatted {
                params.q_pow(-l) * params.t_pow(i as i32 - n as i32)
            } else {
                params.q_pow(l) * params.t_pow(n as i32 - i as i32)
            }
        })
        .collect();
    Ok(elementary_symmetric(&values, r as usize))
}

/// A rational multiple of Π(x;ρ) that stays in its class under the
/// difference operators: concretely, the chain of operators applied so
/// far. `ops[0]` acts first.
#[derive(Clone, Debug, Default)]
pub struct ShiftedProduct {
    pub ops: Vec<(u32, usize, bool)>,
}

impl ShiftedProduct {
    /// The reference product Π(x₁..x_N; ρ) itself.
    pub fn base() -> Self {
        ShiftedProduct { ops: Vec::new() }
    }

    /// f(q^ζ ∘ a) / Π(q^ζ ∘ a; ρ), evaluated exactly with memoization.
    pub fn ratio_at_shift(&self, config: &AscendingConfig, shift: &[i32]) -> Result<Scalar> {
        let mut memo: BTreeMap<(usize, Vec<i32>), Scalar> = BTreeMap::new();
        self.ratio_rec(self.ops.len(), shift, config, &mut memo)
    }

    fn ratio_rec(
        &self,
        k: usize,
        shift: &[i32],
        config: &AscendingConfig,
        memo: &mut BTreeMap<(usize, Vec<i32>), Scalar>,
    ) -> Result<Scalar> {
        if k == 0 {
            return Ok(Scalar::one());
        }
        let key = (k, shift.to_vec());
        if let Some(v) = memo.get(&key) {
            return Ok(v.clone());
        }
        let (r, n, hatted) = self.ops[k - 1];
        let params = &config.params;
        let (tt, step) = if hatted {
            (params.t.clone().recip(), -1i32)
        } else {
            (params.t.clone(), 1i32)
        };
        let points: Vec<Scalar> = config
            .a
            .iter()
            .zip(shift)
            .map(|(a, &s)| a * params.q_pow(s))
            .collect();
        let mut acc = Scalar::zero();
        for subset in subsets(n, r as usize) {
            let coeff = operator_coefficient(&subset, &points, n, &tt)?;
            let mut ratio = Scalar::one();
            let mut next_shift = shift.to_vec();
            for &i in &subset {
                ratio *= if hatted {
                    pi_ratio_down(&points[i], config)?
                } else {
                    pi_ratio_up(&points[i], config)?
                };
                next_shift[i] += step;
            }
            acc += coeff * ratio * self.ratio_rec(k - 1, &next_shift, config, memo)?;
        }
        memo.insert(key, acc.clone());
        Ok(acc)
    }
}

/// Append one difference operator to the chain.
pub fn apply_difference_operator(
    r: u32,
    n: usize,
    f: &ShiftedProduct,
    hatted: bool,
) -> ShiftedProduct {
    let mut ops = f.ops.clone();
    ops.push((r, n, hatted));
    ShiftedProduct { ops }
}

/// (M^{r_m}_{n_m} ⋯ M^{r_1}_{n_1} Π)/Π at x = a — the expectation of
/// ∏ e_{r_i}(spectrum of λ^{n_i}) under the ascending process.
pub fn operator_chain_expectation(
    ns: &[usize],
    rs: &[u32],
    config: &AscendingConfig,
    hatted: bool,
) -> Result<Scalar> {
    let m = ns.len();
    assert_eq!(rs.len(), m);
    config.validate()?;
    if hatted {
        config.validate_strengthened(m as u32)?;
    }
    if !(1..m).all(|i| ns[i] <= ns[i - 1]) {
        return Err(Error::InvalidInput(String::from(
            "operator levels must be weakly decreasing (outermost last)",
        )));
    }
    if ns
        .iter()
        .zip(rs)
        .any(|(&n, &r)| n < 1 || n > config.n || r as usize > n)
    {
        return Err(Error::InvalidInput(String::from(
            "need 1 <= n_i <= N and 0 <= r_i <= n_i",
        )));
    }
    let mut chain = ShiftedProduct::base();
    for (&n, &r) in ns.iter().zip(rs).rev() {
        chain = apply_difference_operator(r, n, &chain, hatted);
    }
    chain.ratio_at_shift(config, &vec![0; config.n])
}

// ---------------------------------------------------------------------
// Noumi operator and the Fredholm expansions
// ---------------------------------------------------------------------

/// ν ∈ (ℤ≥0)^n with |ν| = r.
pub fn nonneg_vectors(n: usize, r: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if r == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=r {
        for mut rest in nonneg_vectors(n - 1, r - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Ordered compositions of r into k strictly positive parts.
pub fn positive_compositions(r: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return if r == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    if r < k as u32 {
        return out;
    }
    for first in 1..=(r - (k as u32 - 1)) {
        for mut rest in positive_compositions(r - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The ν-term of the Noumi operator applied to an explicit polynomial,
/// evaluated at x (the u^{|ν|} prefactor is stripped):
///   ∏_{i<j} (q^{ν_j}x_j − q^{ν_i}x_i)/(x_j − x_i)
///   · ∏_{i,j} (t x_i/x_j; q)_{ν_i}/(q x_i/x_j; q)_{ν_i} · f(q^ν ∘ x).
pub fn noumi_nu_term_value(
    f: &MultiPoly,
    nu: &[u32],
    params: &Params,
    xs: &[Scalar],
) -> Result<Scalar> {
    let n = nu.len();
    assert_eq!(f.nvars, n);
    assert_eq!(xs.len(), n);
    let mut acc = Scalar::one();
    for i in 0..n {
        for j in (i + 1)..n {
            let den = &xs[j] - &xs[i];
            if den.is_zero() {
                return Err(Error::DegenerateParams(String::from(
                    "coincident points in a Noumi coefficient",
                )));
            }
            acc *= (params.q_pow(nu[j] as i32) * &xs[j] - params.q_pow(nu[i] as i32) * &xs[i]) / den;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let ratio = &xs[i] / &xs[j];
            let num = crate::qfunc::q_pochhammer(&(&params.t * &ratio), &params.q, nu[i]);
            let den = crate::qfunc::q_pochhammer(&(&params.q * &ratio), &params.q, nu[i]);
            if den.is_zero() {
                return Err(Error::DegenerateParams(String::from(
                    "vanishing Pochhammer denominator in a Noumi coefficient",
                )));
            }
            acc *= num / den;
        }
    }
    let shifted: Vec<Scalar> = xs
        .iter()
        .zip(nu)
        .map(|(x, &v)| x * params.q_pow(v as i32))
        .collect();
    Ok(acc * f.eval(&shifted))
}

/// u^r coefficient of the Noumi eigenvalue
/// ∏_i (q^{λ_i} t^{n+1−i} u; q)_∞ / (q^{λ_i} t^{n−i} u; q)_∞, via the
/// q-binomial theorem: Σ_{|ν|=r} ∏_i (t;q)_{ν_i}/(q;q)_{ν_i} s_i^{ν_i}
/// with s_i = q^{λ_i} t^{n−i}.
pub fn noumi_eigenvalue_coeff(r: u32, lambda: &Partition, n: usize, params: &Params) -> Scalar {
    let mut acc = Scalar::zero();
    for nu in nonneg_vectors(n, r) {
        let mut term = Scalar::one();
        for (i, &v) in nu.iter().enumerate() {
            if v == 0 {
                continue;
            }
            let num = crate::qfunc::q_pochhammer(&params.t, &params.q, v);
            let den = crate::qfunc::q_pochhammer(&params.q, &params.q, v);
            let s = params.q_pow(lambda.part(i + 1) as i32) * params.t_pow((n - 1 - i) as i32);
            term *= num / den * powi(&s, v as i32);
        }
        acc += term;
    }
    acc
}

/// The u^r coefficient of (𝒩_u Π)/Π at x = a: the finite exact sum over
/// ν with |ν| = r of the Noumi ν-term applied to Π, divided by Π.
pub fn noumi_coefficient(r: u32, config: &AscendingConfig) -> Result<Scalar> {
    config.validate()?;
    let n = config.n;
    let params = &config.params;
    let mut acc = Scalar::zero();
    for nu in nonneg_vectors(n, r) {
        let mut term = Scalar::one();
        for i in 0..n {
            for j in (i + 1)..n {
                let den = &config.a[j] - &config.a[i];
                term *= (params.q_pow(nu[j] as i32) * &config.a[j]
                    - params.q_pow(nu[i] as i32) * &config.a[i])
                    / den;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ratio = &config.a[i] / &config.a[j];
                let num = crate::qfunc::q_pochhammer(&(&params.t * &ratio), &params.q, nu[i]);
                let den = crate::qfunc::q_pochhammer(&(&params.q * &ratio), &params.q, nu[i]);
                if den.is_zero() {
                    return Err(Error::DegenerateParams(String::from(
                        "vanishing Pochhammer denominator; perturb the a's",
                    )));
                }
                term *= num / den;
            }
        }
        // Π(q^{ν_i} a_i; ρ)/Π(a_i; ρ) = ∏_s (a_i b_s; q)_{ν_i}/(t a_i b_s; q)_{ν_i}
        for (ai, &v) in config.a.iter().zip(&nu) {
            for b in config.rho.finite_parts()? {
                let num = crate::qfunc::q_pochhammer(&(ai * b), &params.q, v);
                let den = crate::qfunc::q_pochhammer(&(&params.t * ai * b), &params.q, v);
                if den.is_zero() {
                    return Err(Error::DegenerateParams(String::from(
                        "vanishing Pochhammer denominator in a specialization ratio",
                    )));
                }
                term *= num / den;
            }
        }
        acc += term;
    }
    Ok(acc)
}

/// u^r coefficient of the qt-Fredholm determinant det(I + K):
/// Σ_{k≥1} (1/k!) Σ_{ν₁..ν_k ≥ 1, Σν = r} ∮…∮ det[K'(ν_i, w_i, w_j)],
/// each integral evaluated by residues at the a's. Terms with k > N
/// vanish identically (coincident determinant rows) and are still
/// evaluated, so termination is verified rather than assumed.
pub fn fredholm_qt_coefficient(r: u32, config: &AscendingConfig) -> Result<Scalar> {
    if r == 0 {
        return Ok(Scalar::one());
    }
    config.validate()?;
    let mut acc = Scalar::zero();
    for k in 1..=(r as usize) {
        let mut level = Scalar::zero();
        for nu in positive_compositions(r, k) {
            level += fredholm_qt_term_value(&nu, config)?;
        }
        let mut fact = Scalar::one();
        for i in 1..=k {
            fact *= int(i as i64);
        }
        acc += level / fact;
    }
    Ok(acc)
}

/// One k-fold integral of the qt-Fredholm expansion, exact.
pub fn fredholm_qt_term_value(nu: &[u32], config: &AscendingConfig) -> Result<Scalar> {
    let built = crate::integrands::fredholm_qt_term(nu, config)?;
    let (value, _) = iterated_residue_integral(built.expr, &built.scheme, &Scalar::one())?;
    Ok(value)
}

/// u^r coefficient of det(I − uJ): (−1)^r/r! times the r-fold
/// residue-evaluated integral of det[J]. Zero for r > N (the residue
/// evaluation produces it; nothing is special-cased).
pub fn fredholm_ek_coefficient(r: u32, config: &AscendingConfig) -> Result<Scalar> {
    if r == 0 {
        return Ok(Scalar::one());
    }
    config.validate()?;
    let built = crate::integrands::fredholm_ek_term(r, config)?;
    let (value, _) = iterated_residue_integral(built.expr, &built.scheme, &Scalar::one())?;
    let mut fact = Scalar::one();
    for i in 1..=r {
        fact *= int(i as i64);
    }
    let sign = if r % 2 == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    };
    Ok(sign * value / fact)
}

// ---------------------------------------------------------------------
// truncated partition sums with certified tails
// ---------------------------------------------------------------------

/// Observables ∏ e_{r_i}(spectrum of λ^{n_i}) for the truncated sums.
#[derive(Clone, Debug)]
pub struct AscObservablePlan {
    pub ns: Vec<usize>,
    pub rs: Vec<u32>,
    pub hatted: bool,
}

impl AscObservablePlan {
    pub fn trivial() -> Self {
        AscObservablePlan {
            ns: Vec::new(),
            rs: Vec::new(),
            hatted: false,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.ns.len() != self.rs.len() {
            return Err(Error::InvalidInput(String::from("plan length mismatch")));
        }
        if !(1..self.ns.len()).all(|i| self.ns[i] <= self.ns[i - 1]) {
            return Err(Error::InvalidInput(String::from(
                "plan levels must be weakly decreasing",
            )));
        }
        if self
            .ns
            .iter()
            .zip(&self.rs)
            .any(|(&ni, &ri)| ni < 1 || ni > n || ri as usize > ni)
        {
            return Err(Error::InvalidInput(String::from(
                "need 1 <= n_i <= N and 0 <= r_i <= n_i",
            )));
        }
        Ok(())
    }

    fn factor(&self, level: usize, lambda: &Partition, params: &Params) -> Result<Scalar> {
        let mut acc = Scalar::one();
        for (&ni, &ri) in self.ns.iter().zip(&self.rs) {
            if ni == level {
                acc *= spectrum_e(ri, lambda, ni, self.hatted, params)?;
            }
        }
        Ok(acc)
    }
}

/// Certified bound on the absolute value of the discarded tail
/// Σ_{|λᴺ| > L} |observables · weight numerator|.
#[derive(Clone, Debug)]
pub struct TailBound {
    pub truncation: u32,
    pub bound: Scalar,
}

fn binom_scalar(n: usize, r: u32) -> Scalar {
    let mut acc = Scalar::one();
    for i in 0..r as usize {
        acc *= int((n - i) as i64);
        acc /= int((i + 1) as i64);
    }
    acc
}

/// Rational upper bound on ∏_{k≥0}(1 − t·u·q^k)/(1 − u·q^k) for
/// 0 ≤ u < 1: drop the numerator (≤ 1 per factor… the numerator factors
/// are ≤ 1, so the product is ≤ ∏ 1/(1−u q^k)), expand K factors exactly
/// and bound the rest by (1 − u q^K/(1−q))⁻¹.
fn pochhammer_ratio_upper(u: &Scalar, params: &Params, k_terms: u32) -> Result<Scalar> {
    if u.is_negative() || *u >= Scalar::one() {
        return Err(Error::InvalidInput(String::from(
            "majorant needs 0 <= u < 1",
        )));
    }
    let mut acc = Scalar::one();
    let mut uq = u.clone();
    for _ in 0..k_terms {
        acc /= Scalar::one() - &uq;
        uq *= &params.q;
    }
    let rest = &uq / (Scalar::one() - &params.q);
    if rest >= Scalar::one() {
        return Err(Error::BoundBudgetExceeded(String::from(
            "tail control needs more expanded factors",
        )));
    }
    Ok(acc / (Scalar::one() - rest))
}

/// Rigorous enclosure of Π(a₁..a_N; ρ) = ∏_{i,s} (t a_i b_s; q)_∞ /
/// (a_i b_s; q)_∞ for positive data, with K factors exact and geometric
/// remainder control.
pub fn pi_normalization_interval(config: &AscendingConfig, k_terms: u32) -> Result<RatInterval> {
    config.require_positive_data()?;
    let params = &config.params;
    let mut acc = RatInterval::point(Scalar::one());
    for ai in &config.a {
        for b in config.rho.finite_parts()? {
            if b.is_zero() {
                continue;
            }
            let u = ai * b;
            if u >= Scalar::one() {
                return Err(Error::InvalidInput(String::from(
                    "normalization product needs a_i b_s < 1",
                )));
            }
            let mut exact = Scalar::one();
            let mut uq = u.clone();
            for _ in 0..k_terms {
                exact *= (Scalar::one() - &params.t * &uq) / (Scalar::one() - &uq);
                uq *= &params.q;
            }
            let rest = &uq / (Scalar::one() - &params.q);
            if rest >= Scalar::one() {
                return Err(Error::BoundBudgetExceeded(String::from(
                    "normalization enclosure needs more expanded factors",
                )));
            }
            let lo = Scalar::one() - &params.t * &rest;
            let hi = (Scalar::one() - rest).recip();
            let tail = RatInterval::new(lo.min(Scalar::one()), hi.max(Scalar::one()));
            acc = acc.mul(&RatInterval::point(exact)).mul(&tail);
        }
    }
    Ok(acc)
}

/// Exact numerator P_{λ¹}(a₁)·∏ P_{λᵏ/λᵏ⁻¹}(a_k)·Q_{λᴺ}(ρ) (zero off the
/// interlacing support).
pub fn ascending_weight_numerator(
    ctx: &mut MacCtx,
    lambdas: &[Partition],
    config: &AscendingConfig,
) -> Result<Scalar> {
    assert_eq!(lambdas.len(), config.n);
    let mut acc = ctx.skew_p_single(&lambdas[0], &Partition::empty(), &config.a[0])?;
    for k in 1..config.n {
        if acc.is_zero() {
            return Ok(acc);
        }
        acc *= ctx.skew_p_single(&lambdas[k], &lambdas[k - 1], &config.a[k])?;
    }
    Ok(acc * q_at_rho(ctx, &lambdas[config.n - 1], &config.rho)?)
}

/// The full weight (numerator over the Π-normalization) as a certified
/// interval; the normalization is an infinite q-product, so the weight
/// itself is not rational.
pub fn ascending_weight(
    ctx: &mut MacCtx,
    lambdas: &[Partition],
    config: &AscendingConfig,
    k_terms: u32,
) -> Result<RatInterval> {
    config.validate()?;
    let num = ascending_weight_numerator(ctx, lambdas, config)?;
    let pi = pi_normalization_interval(config, k_terms)?;
    Ok(RatInterval::point(num).div(&pi))
}

/// Q_λ(ρ): the specialization of Q_λ (exact, since every supported ρ has
/// rational p_k values).
pub fn q_at_rho(ctx: &mut MacCtx, lambda: &Partition, rho: &SpecializationRho) -> Result<Scalar> {
    let q = ctx.q(lambda)?;
    let d = lambda.size().max(1);
    let values: Vec<Scalar> = (1..=d).map(|k| rho.p_value(k)).collect();
    Ok(q.specialize(&values))
}

/// Partial sum of Σ ∏ e_{r_i}(spectrum) · (weight numerator) over all
/// interlacing sequences with |λᴺ| ≤ L, plus a certified tail bound.
///
/// The caller divides by the Π-normalization enclosure to get an interval
/// that must contain the exact expectation.
pub fn truncated_expectation_lhs(
    ctx: &mut MacCtx,
    plan: &AscObservablePlan,
    config: &AscendingConfig,
    truncation: u32,
) -> Result<(Scalar, TailBound)> {
    config.validate()?;
    config.require_positive_data()?;
    plan.validate(config.n)?;
    let m = plan.ns.len() as u32;
    if plan.hatted {
        config.validate_strengthened(m)?;
    }
    let params = ctx.params.clone();

    // exact transfer over interlacing sequences
    let mut f: BTreeMap<Partition, Scalar> = BTreeMap::new();
    for lam in enumerate_bounded(truncation, 1) {
        let w = ctx.skew_p_single(&lam, &Partition::empty(), &config.a[0])?;
        let obs = plan.factor(1, &lam, &params)?;
        f.insert(lam, w * obs);
    }
    for k in 2..=config.n {
        let mut next: BTreeMap<Partition, Scalar> = BTreeMap::new();
        for lam in enumerate_bounded(truncation, k) {
            let mut acc = Scalar::zero();
            for (mu, val) in &f {
                if val.is_zero() || !lam.horizontal_strip_over(mu) {
                    continue;
                }
                acc += val * ctx.skew_p_single(&lam, mu, &config.a[k - 1])?;
            }
            let obs = plan.factor(k, &lam, &params)?;
            next.insert(lam, acc * obs);
        }
        f = next;
    }
    let mut partial = Scalar::zero();
    for (lam, val) in &f {
        if val.is_zero() {
            continue;
        }
        partial += val * q_at_rho(ctx, lam, &config.rho)?;
    }

    let bound = tail_bound(plan, config, truncation)?;
    Ok((
        partial,
        TailBound {
            truncation,
            bound,
        },
    ))
}

/// Certified majorant of the discarded tail: observables are bounded by
/// binomial counts (times t- and q-growth factors in the hatted case),
/// the weight numerators by the Cauchy kernel at |a|, ρ-majorant, and the
/// degree-d mass of Π(z·|a|;ρ) by F(z₀)/z₀^d for any admissible z₀ > 1.
fn tail_bound(
    plan: &AscObservablePlan,
    config: &AscendingConfig,
    truncation: u32,
) -> Result<Scalar> {
    let params = &config.params;
    let m = plan.ns.len() as u32;
    let mut c_obs = Scalar::one();
    for (&ni, &ri) in plan.ns.iter().zip(&plan.rs) {
        c_obs *= binom_scalar(ni, ri);
        if plan.hatted {
            // each spectrum variable is at most q^{-|λ|} t^{1−n}
            c_obs *= params.t_pow(ri as i32 * (1 - ni as i32));
        }
    }
    // scaled evaluation points: hatted absorbs ∏ q^{-|λ^{n_i}|} ≤ q^{-m|λᴺ|}
    let scale = if plan.hatted {
        params.q_pow(-(m as i32))
    } else {
        Scalar::one()
    };
    let b_parts = config.rho.finite_parts()?;
    // u_max = max_i,s (scaled a_i)·b_s must stay below 1
    let mut u_max = Scalar::zero();
    for ai in &config.a {
        for b in b_parts {
            let u = ai.abs() * &scale * b.abs();
            if u > u_max {
                u_max = u;
            }
        }
    }
    if u_max >= Scalar::one() {
        return Err(Error::InvalidInput(String::from(
            "tail majorant needs (scaled) |a_i| |b_s| < 1",
        )));
    }
    // z0 with z0·u_max < 1 and z0 > 1: midpoint in the log scale is
    // overkill; (1 + 1/u_max)/2 works for u_max > 0
    let z0 = if u_max.is_zero() {
        int(2)
    } else {
        (Scalar::one() + u_max.clone().recip()) / int(2)
    };
    // F(z0) = Π(z0·scaled|a|; |ρ|) upper bound
    let mut f_upper = Scalar::one();
    for ai in &config.a {
        for b in b_parts {
            let u = ai.abs() * &scale * b.abs() * &z0;
            f_upper *= pochhammer_ratio_upper(&u, params, 40)?;
        }
    }
    // Σ_{d>L} F(z0) z0^{-d} = F(z0)·z0^{-(L+1)}/(1 − z0⁻¹)
    let geom = powi(&z0, -(truncation as i32 + 1)) / (Scalar::one() - z0.recip());
    Ok(c_obs * f_upper * geom)
}

/// Interval that must contain the exact expectation: combine the partial
/// sum, the tail bound and the normalization enclosure (all positive).
pub fn expectation_interval(
    partial: &Scalar,
    tail: &TailBound,
    pi: &RatInterval,
) -> RatInterval {
    let lo_num = (partial - &tail.bound).max(Scalar::zero());
    let hi_num = partial + &tail.bound;
    RatInterval::new(&lo_num / &pi.hi, &hi_num / &pi.lo)
}

/// Σ over every interlacing chain below λᴺ of the weight numerator:
/// equals P_{λᴺ}(a₁..a_N)·Q_{λᴺ}(ρ) (the Macdonald-measure marginal).
pub fn marginal_numerator(
    ctx: &mut MacCtx,
    lambda_top: &Partition,
    config: &AscendingConfig,
) -> Result<Scalar> {
    let mut f: BTreeMap<Partition, Scalar> = BTreeMap::new();
    for lam in enumerate_bounded(lambda_top.size(), 1) {
        f.insert(
            lam.clone(),
            ctx.skew_p_single(&lam, &Partition::empty(), &config.a[0])?,
        );
    }
    for k in 2..=config.n {
        let mut next: BTreeMap<Partition, Scalar> = BTreeMap::new();
        let tops: Vec<Partition> = if k == config.n {
            vec![lambda_top.clone()]
        } else {
            enumerate_bounded(lambda_top.size(), k)
        };
        for lam in tops {
            let mut acc = Scalar::zero();
            for (mu, val) in &f {
                if val.is_zero() || !lam.horizontal_strip_over(mu) {
                    continue;
                }
                acc += val * ctx.skew_p_single(&lam, mu, &config.a[k - 1])?;
            }
            next.insert(lam, acc);
        }
        f = next;
    }
    let top_val = f.get(lambda_top).cloned().unwrap_or_else(Scalar::zero);
    Ok(top_val * q_at_rho(ctx, lambda_top, &config.rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn config() -> AscendingConfig {
        AscendingConfig {
            n: 2,
            a: vec![rat(1, 2), rat(9, 20)],
            rho: SpecializationRho::finite(vec![rat(1, 7)]),
            params: Params::new(rat(1, 3), rat(1, 5)).unwrap(),
        }
    }

    #[test]
    fn validation_errors() {
        let mut c = config();
        c.a[1] = c.a[0].clone();
        assert!(matches!(c.validate(), Err(Error::DegenerateParams(_))));
        let mut c = config();
        c.a[0] = int(8); // 8 * (1/7) > 1
        assert!(c.validate().is_err());
        let c = config();
        assert!(c.validate().is_ok());
    }

    #[test]
    fn trivial_chain_is_one() {
        let c = config();
        assert_eq!(
            operator_chain_expectation(&[], &[], &c, false).unwrap(),
            int(1)
        );
        assert_eq!(
            operator_chain_expectation(&[2, 1], &[0, 0], &c, false).unwrap(),
            int(1)
        );
    }

    #[test]
    fn single_operator_matches_direct_expansion() {
        // (M¹₂ Π)/Π at a = Σ_i A_i(a) Π(q a_i;ρ)/Π(a_i;ρ)
        let c = config();
        let t = c.params.t.clone();
        let got = operator_chain_expectation(&[2], &[1], &c, false).unwrap();
        let mut expect = Scalar::zero();
        for i in 0..2 {
            let j = 1 - i;
            let coef = (&t * &c.a[i] - &c.a[j]) / (&c.a[i] - &c.a[j]);
            expect += coef * pi_ratio_up(&c.a[i], &c).unwrap();
        }
        assert_eq!(got, expect);
    }

    #[test]
    fn operator_order_matters() {
        // swapping operators with different n changes a generic value
        let c = AscendingConfig {
            n: 2,
            a: vec![rat(1, 2), rat(9, 20)],
            rho: SpecializationRho::finite(vec![rat(1, 7)]),
            params: Params::new(rat(1, 3), rat(1, 5)).unwrap(),
        };
        let ab = operator_chain_expectation(&[2, 1], &[1, 1], &c, false).unwrap();
        // illegal order (increasing levels) is rejected outright
        assert!(operator_chain_expectation(&[1, 2], &[1, 1], &c, false).is_err());
        // compare against the product with both on the same level
        let aa = operator_chain_expectation(&[2, 2], &[1, 1], &c, false).unwrap();
        assert_ne!(ab, aa);
    }

    #[test]
    fn eigenrelation_one_instance() {
        // M¹₂ P_λ = e₁(q^{λ₁}t, q^{λ₂}) P_λ at a generic point
        let params = Params::new(rat(1, 3), rat(1, 5)).unwrap();
        let mut ctx = MacCtx::new(params.clone());
        let lam = Partition::new(&[2, 1]);
        let poly = ctx.p(&lam).unwrap().restrict_to_vars(2);
        let xs = [rat(2, 7), rat(3, 11)];
        let lhs = difference_operator_value(&poly, 1, 2, false, &params, &xs).unwrap();
        let eig = spectrum_e(1, &lam, 2, false, &params).unwrap();
        assert_eq!(lhs, eig * poly.eval(&xs));
    }

    #[test]
    fn hatted_eigenrelation_one_instance() {
        let params = Params::new(rat(1, 3), rat(1, 5)).unwrap();
        let mut ctx = MacCtx::new(params.clone());
        let lam = Partition::new(&[1, 1]);
        let poly = ctx.p(&lam).unwrap().restrict_to_vars(2);
        let xs = [rat(2, 7), rat(3, 11)];
        let lhs = difference_operator_value(&poly, 2, 2, true, &params, &xs).unwrap();
        let eig = spectrum_e(2, &lam, 2, true, &params).unwrap();
        assert_eq!(lhs, eig * poly.eval(&xs));
    }

    #[test]
    fn noumi_trivial_and_eigen_small() {
        let c = config();
        assert_eq!(noumi_coefficient(0, &c).unwrap(), int(1));
        // eigenvalue coefficient r=1 на λ=∅, n=1: (t;q)_1/(q;q)_1 · t⁰
        let params = &c.params;
        let v = noumi_eigenvalue_coeff(1, &Partition::empty(), 1, params);
        let expect = (Scalar::one() - &params.t) / (Scalar::one() - &params.q);
        assert_eq!(v, expect);
    }

    #[test]
    fn noumi_eigenrelation_small() {
        // Σ_{|ν|=r} N_ν P_λ = eig_r(λ) P_λ for n = 2, |λ| ≤ 2, r ≤ 2
        let params = Params::new(rat(1, 3), rat(1, 5)).unwrap();
        let mut ctx = MacCtx::new(params.clone());
        let mut gen = crate::scalar::GenericPoints::new(5);
        for lam in crate::partition::enumerate_bounded(2, 2) {
            let poly = ctx.p(&lam).unwrap().restrict_to_vars(2);
            for r in 0..=2u32 {
                for _ in 0..2 {
                    let xs = gen.distinct_rationals(2);
                    let mut lhs = Scalar::zero();
                    for nu in nonneg_vectors(2, r) {
                        lhs += noumi_nu_term_value(&poly, &nu, &params, &xs).unwrap();
                    }
                    let rhs = noumi_eigenvalue_coeff(r, &lam, 2, &params) * poly.eval(&xs);
                    assert_eq!(lhs, rhs, "λ = {lam}, r = {r}");
                }
            }
        }
    }

    #[test]
    fn fredholm_qt_matches_noumi_n1() {
        let c = AscendingConfig {
            n: 1,
            a: vec![rat(1, 2)],
            rho: SpecializationRho::finite(vec![rat(1, 7)]),
            params: Params::new(rat(1, 3), rat(1, 5)).unwrap(),
        };
        for r in 0..=2u32 {
            let lhs = noumi_coefficient(r, &c).unwrap();
            let rhs = fredholm_qt_coefficient(r, &c).unwrap();
            assert_eq!(lhs, rhs, "r = {r}");
        }
    }

    #[test]
    fn fredholm_ek_single_residue() {
        // r = 1, N = 1, ρ = {b}: residue at w = a of det[J] is
        // (1−ab)/(1−tab); the coefficient is its negative, matching
        // −(M¹₁Π)/Π at a.
        let c = AscendingConfig {
            n: 1,
            a: vec![rat(1, 2)],
            rho: SpecializationRho::finite(vec![rat(1, 7)]),
            params: Params::new(rat(1, 3), rat(1, 5)).unwrap(),
        };
        let ab = rat(1, 2) * rat(1, 7);
        let hand = (Scalar::one() - &ab) / (Scalar::one() - rat(1, 5) * &ab);
        let got = fredholm_ek_coefficient(1, &c).unwrap();
        assert_eq!(got, -hand.clone());
        let op = operator_chain_expectation(&[1], &[1], &c, false).unwrap();
        assert_eq!(got, -op);
    }

    #[test]
    fn fredholm_ek_vanishes_beyond_n() {
        let c = config();
        assert_eq!(fredholm_ek_coefficient(3, &c).unwrap(), int(0));
    }

    #[test]
    fn mass_one_interval() {
        // trivial observable: partial sums with tail bounds must bracket 1
        let mut ctx = MacCtx::new(Params::new(rat(1, 3), rat(1, 5)).unwrap());
        let c = config();
        let (partial, tail) =
            truncated_expectation_lhs(&mut ctx, &AscObservablePlan::trivial(), &c, 8).unwrap();
        let pi = pi_normalization_interval(&c, 40).unwrap();
        let interval = expectation_interval(&partial, &tail, &pi);
        assert!(interval.contains(&int(1)), "interval {:?}", interval);
        // tighter truncation gives a wider-but-still-correct interval
        let (p2, t2) =
            truncated_expectation_lhs(&mut ctx, &AscObservablePlan::trivial(), &c, 4).unwrap();
        let i2 = expectation_interval(&p2, &t2, &pi);
        assert!(i2.contains(&int(1)));
        assert!(i2.width() >= interval.width());
    }

    #[test]
    fn tail_bound_dominates_extension() {
        // the certified tail at L dominates the mass added between L and L+3
        let mut ctx = MacCtx::new(Params::new(rat(1, 3), rat(1, 5)).unwrap());
        let c = config();
        let plan = AscObservablePlan {
            ns: vec![2],
            rs: vec![1],
            hatted: false,
        };
        let (p1, t1) = truncated_expectation_lhs(&mut ctx, &plan, &c, 4).unwrap();
        let (p2, _) = truncated_expectation_lhs(&mut ctx, &plan, &c, 7).unwrap();
        assert!(&p2 - &p1 <= t1.bound);
        assert!(p2 >= p1);
    }

    #[test]
    fn marginal_is_macdonald_measure() {
        // Σ over inner chains = P_λ(a₁,a₂)·Q_λ(ρ)
        let mut ctx = MacCtx::new(Params::new(rat(1, 3), rat(1, 5)).unwrap());
        let c = config();
        for lam in crate::partition::enumerate_bounded(3, 2) {
            let via_chain = marginal_numerator(&mut ctx, &lam, &c).unwrap();
            let p = ctx.p(&lam).unwrap().restrict_to_vars(2).eval(&c.a);
            let qv = q_at_rho(&mut ctx, &lam, &c.rho).unwrap();
            assert_eq!(via_chain, p * qv, "λ = {lam}");
        }
    }

    #[test]
    fn weight_examples() {
        let mut ctx = MacCtx::new(Params::new(rat(1, 3), rat(1, 5)).unwrap());
        let c = config();
        // non-interlacing sequence has zero numerator
        let w = ascending_weight_numerator(
            &mut ctx,
            &[Partition::new(&[1, 1]), Partition::new(&[1, 1])],
            &c,
        )
        .unwrap();
        assert_eq!(w, int(0)); // ℓ(λ¹) > 1 forces P-vanishing
        // empty sequence: weight interval around Π⁻¹
        let wi = ascending_weight(&mut ctx, &[Partition::empty(), Partition::empty()], &c, 30)
            .unwrap();
        let pi = pi_normalization_interval(&c, 30).unwrap();
        assert!(wi.contains(&pi.hi.clone().recip()) || wi.contains(&pi.lo.clone().recip()));
        // N=1, λ=(1): a·b·(1−t)/(1−q) / Π
        let c1 = AscendingConfig {
            n: 1,
            a: vec![rat(1, 2)],
            rho: SpecializationRho::finite(vec![rat(1, 7)]),
            params: Params::new(rat(1, 3), rat(1, 5)).unwrap(),
        };
        let num =
            ascending_weight_numerator(&mut ctx, &[Partition::new(&[1])], &c1).unwrap();
        let expect = rat(1, 2) * rat(1, 7) * (int(1) - rat(1, 5)) / (int(1) - rat(1, 3));
        assert_eq!(num, expect);
    }
}
