//! Assembly of the contour integrands, identity by identity: determinant
//! blocks in Cauchy product form, H/W factors (formal truncated series or
//! specialized rational factors), and the matching contour schemes.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::alphabet::{Alphabet, AlphabetSeries};
use crate::ascending::AscendingConfig;
use crate::contour::{
    Atom, CoeffRing, ContourScheme, Laurent, RTerm, RationalExpr, VarContour, VarId,
};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::scalar::{int, powi, rat, Scalar};

/// A ready-to-integrate identity right-hand side.
pub struct BuiltIntegrand<C: CoeffRing> {
    pub expr: RationalExpr<C>,
    pub scheme: ContourScheme,
    /// Multiplies the integral value (the scale-constant identity carries
    /// a kernel-ratio prefactor; elsewhere it is absent).
    pub prefactor: Option<AlphabetSeries>,
    /// Variables per level.
    pub levels: Vec<Vec<VarId>>,
}

/// Allocate contiguous variable ids per level.
fn allocate_vars(sizes: &[u32]) -> Vec<Vec<VarId>> {
    let mut next = 0u16;
    sizes
        .iter()
        .map(|&r| {
            (0..r)
                .map(|_| {
                    let v = VarId(next);
                    next += 1;
                    v
                })
                .collect()
        })
        .collect()
}

/// Multiply the term by det[1/(x·v_i − y·v_j)]_{i,j} in Cauchy product
/// form:
///   ∏_{i<j} (−xy)(v_i − v_j)² / [(x−y)^r ∏_i v_i · ∏_{i≠j}(x v_i − y v_j)].
pub fn push_cauchy_det<C: CoeffRing>(
    term: &mut RTerm<C>,
    vars: &[VarId],
    x: &Scalar,
    y: &Scalar,
) -> Result<()> {
    let r = vars.len();
    if r == 0 {
        return Ok(());
    }
    let diff = x - y;
    if diff.is_zero() {
        return Err(Error::DegenerateParams(alloc::string::String::from(
            "cauchy determinant with x = y",
        )));
    }
    term.push_scalar(&powi(&diff, -(r as i32)));
    let minus_xy = -(x * y);
    for i in 0..r {
        term.push_mono(vars[i], -1);
        for j in (i + 1)..r {
            term.push_scalar(&minus_xy);
            term.push_linear_numer(Atom::var(vars[i]), Atom::var(vars[j]));
            term.push_linear_numer(Atom::var(vars[i]), Atom::var(vars[j]));
        }
    }
    for i in 0..r {
        for j in 0..r {
            if i != j {
                term.push_linear_denom(
                    Atom::scaled_var(x.clone(), vars[i]),
                    Atom::scaled_var(y.clone(), vars[j]),
                )?;
            }
        }
    }
    Ok(())
}

/// exp of a Laurent polynomial whose coefficients are series of positive
/// minimal degree; truncation comes from the coefficient ring.
fn exp_laurent(exponent: &Laurent<AlphabetSeries>, trunc: u32) -> Laurent<AlphabetSeries> {
    let mut out = Laurent::constant(AlphabetSeries::one(trunc));
    let mut pow = Laurent::constant(AlphabetSeries::one(trunc));
    let mut factorial = Scalar::one();
    for n in 1..=trunc {
        pow = pow.mul(exponent);
        if pow.is_empty() {
            break;
        }
        factorial *= int(n as i64);
        out = out.add(&pow.scale(&factorial.recip()));
    }
    out
}

/// The H-kernel with one contour-variable argument, as a Laurent factor:
/// H((c·v)^{±1}; alphabet)^{∓} =
///   exp(σ Σ_k (1−t^k)/k · c^{±k} p_k(alphabet) · v^{±k}),  σ = ±1.
///
/// The v-exponent magnitude of every retained term is bounded by the
/// truncation order, forced by the alphabet grading.
pub fn h_factor(
    var_direction: i32,
    prescale: &Scalar,
    alphabet: Alphabet,
    params: &Params,
    trunc: u32,
    inverse: bool,
) -> Laurent<AlphabetSeries> {
    debug_assert!(var_direction == 1 || var_direction == -1);
    let mut exponent = Laurent {
        coeffs: alloc::collections::BTreeMap::new(),
    };
    for k in 1..=trunc {
        let mut c = (Scalar::one() - params.t_pow(k as i32)) / int(k as i64);
        c *= powi(prescale, var_direction * k as i32);
        if inverse {
            c = -c;
        }
        let series = AlphabetSeries::p_k(alphabet, k, trunc).scale(&c);
        exponent.add_term(var_direction * k as i32, series);
    }
    let out = exp_laurent(&exponent, trunc);
    debug_assert!(out
        .coeffs
        .keys()
        .all(|e| e.unsigned_abs() <= trunc));
    out
}

/// Cross-level W factor W((s·v_a)^{-1}; v_b), from the product form
/// ∏ (1−t·uv)(1−q·uv)/[(1−uv)(1−qt·uv)] with uv = v_b/(s·v_a):
///   (s v_a − t v_b)(s v_a − q v_b) / [(s v_a − v_b)(s v_a − qt v_b)].
fn push_w_factor<C: CoeffRing>(
    term: &mut RTerm<C>,
    s: &Scalar,
    va: VarId,
    vb: VarId,
    params: &Params,
) -> Result<()> {
    let t = params.t.clone();
    let q = params.q.clone();
    term.push_linear_numer(
        Atom::scaled_var(s.clone(), va),
        Atom::scaled_var(t.clone(), vb),
    );
    term.push_linear_numer(
        Atom::scaled_var(s.clone(), va),
        Atom::scaled_var(q.clone(), vb),
    );
    term.push_linear_denom(Atom::scaled_var(s.clone(), va), Atom::var(vb))?;
    term.push_linear_denom(
        Atom::scaled_var(s.clone(), va),
        Atom::scaled_var(&q * &t, vb),
    )?;
    Ok(())
}

fn circle_scheme(levels: &[Vec<VarId>], radii: &[Scalar]) -> ContourScheme {
    let mut contours = alloc::collections::BTreeMap::new();
    for (level, vars) in levels.iter().enumerate() {
        for &v in vars {
            contours.insert(
                v,
                VarContour::Circle {
                    radius: radii[level].clone(),
                },
            );
        }
    }
    // innermost (smallest radius, highest level index) first
    let order: Vec<VarId> = levels.iter().rev().flatten().copied().collect();
    ContourScheme { contours, order }
}

fn factorial_inv(r: u32) -> Scalar {
    let mut f = Scalar::one();
    for i in 1..=r {
        f *= int(i as i64);
    }
    f.recip()
}

/// Single-level observable integrand:
///   (1/r!) ∮…∮ det[1/(w_i − t w_j)] ∏_j H(w_j; X) H((q w_j)^{-1}; Y),
/// all contours on one common circle radius.
pub fn prop_3_4(
    r: u32,
    x_alph: Alphabet,
    y_alph: Alphabet,
    params: &Params,
    trunc: u32,
    radius: &Scalar,
) -> Result<BuiltIntegrand<AlphabetSeries>> {
    let levels = allocate_vars(&[r]);
    let vars = levels[0].clone();
    let mut term = RTerm::new(AlphabetSeries::one(trunc));
    term.push_scalar(&factorial_inv(r));
    push_cauchy_det(&mut term, &vars, &Scalar::one(), &params.t)?;
    for &w in &vars {
        term.push_series(w, h_factor(1, &Scalar::one(), x_alph, params, trunc, false));
        term.push_series(w, h_factor(-1, &params.q, y_alph, params, trunc, false));
    }
    let mut expr = RationalExpr::new();
    expr.push(term);
    let scheme = circle_scheme(&levels, &[radius.clone()]);
    Ok(BuiltIntegrand {
        expr,
        scheme,
        prefactor: None,
        levels,
    })
}

/// Decreasing radii with R_β < q·R_α for α < β (R_{α+1} = (q/2)·R_α).
fn nested_radii(n: usize, q: &Scalar) -> Vec<Scalar> {
    let step = q * rat(1, 2);
    let mut out = Vec::with_capacity(n);
    let mut cur = Scalar::one();
    for _ in 0..n {
        out.push(cur.clone());
        cur *= &step;
    }
    out
}

/// Multilevel observable integrand over N levels with group sizes rs:
///   ∮ ∏_α DV^α ∏_{α≤β} H((qV^α)^{-1}; B^β) H(A^α; V^β)
///              ∏_{α<β} W((qV^α)^{-1}; V^β).
pub fn thm_3_3(
    rs: &[u32],
    a_alphabets: &[Alphabet],
    b_alphabets: &[Alphabet],
    params: &Params,
    trunc: u32,
) -> Result<BuiltIntegrand<AlphabetSeries>> {
    let n = rs.len();
    assert_eq!(a_alphabets.len(), n);
    assert_eq!(b_alphabets.len(), n);
    let levels = allocate_vars(rs);
    let mut term = RTerm::new(AlphabetSeries::one(trunc));
    let q = params.q.clone();
    for (alpha, vars) in levels.iter().enumerate() {
        term.push_scalar(&factorial_inv(rs[alpha]));
        push_cauchy_det(&mut term, vars, &Scalar::one(), &params.t)?;
        for beta in alpha..n {
            for &v in vars {
                term.push_series(v, h_factor(-1, &q, b_alphabets[beta], params, trunc, false));
            }
            for &v in &levels[beta] {
                term.push_series(
                    v,
                    h_factor(1, &Scalar::one(), a_alphabets[alpha], params, trunc, false),
                );
            }
            if beta > alpha {
                for &va in vars {
                    for &vb in &levels[beta] {
                        push_w_factor(&mut term, &q, va, vb, params)?;
                    }
                }
            }
        }
    }
    let mut expr = RationalExpr::new();
    expr.push(term);
    let scheme = circle_scheme(&levels, &nested_radii(n, &params.q));
    Ok(BuiltIntegrand {
        expr,
        scheme,
        prefactor: None,
        levels,
    })
}

/// Repeated-level variant: M contour groups attached to process levels
/// ks[m] (weakly increasing) of an N-level process.
pub fn cor_3_6(
    n: usize,
    ks: &[usize],
    rs: &[u32],
    a_alphabets: &[Alphabet],
    b_alphabets: &[Alphabet],
    params: &Params,
    trunc: u32,
) -> Result<BuiltIntegrand<AlphabetSeries>> {
    let m = ks.len();
    assert_eq!(rs.len(), m);
    assert!(ks.windows(2).all(|w| w[0] <= w[1]), "levels must be sorted");
    assert!(ks.iter().all(|&k| k >= 1 && k <= n));
    let levels = allocate_vars(rs);
    let mut term = RTerm::new(AlphabetSeries::one(trunc));
    let q = params.q.clone();
    for (alpha, vars) in levels.iter().enumerate() {
        term.push_scalar(&factorial_inv(rs[alpha]));
        push_cauchy_det(&mut term, vars, &Scalar::one(), &params.t)?;
        // H((qV^α)^{-1}; B^β) for process levels β ≥ k_α
        for beta in ks[alpha]..=n {
            for &v in vars {
                term.push_series(
                    v,
                    h_factor(-1, &q, b_alphabets[beta - 1], params, trunc, false),
                );
            }
        }
        // H(A^γ; V^α) for process levels γ ≤ k_α
        for gamma in 1..=ks[alpha] {
            for &v in vars {
                term.push_series(
                    v,
                    h_factor(
                        1,
                        &Scalar::one(),
                        a_alphabets[gamma - 1],
                        params,
                        trunc,
                        false,
                    ),
                );
            }
        }
        for beta in (alpha + 1)..m {
            for &va in vars {
                for &vb in &levels[beta] {
                    push_w_factor(&mut term, &q, va, vb, params)?;
                }
            }
        }
    }
    let mut expr = RationalExpr::new();
    expr.push(term);
    let scheme = circle_scheme(&levels, &nested_radii(m, &params.q));
    Ok(BuiltIntegrand {
        expr,
        scheme,
        prefactor: None,
        levels,
    })
}

/// Π(X;Y)^{±1} with both alphabets rescaled: p_k(X) ↦ sx^k p_k(X), etc.
fn pi_kernel_scaled(
    x: Alphabet,
    y: Alphabet,
    sx: &Scalar,
    sy: &Scalar,
    params: &Params,
    trunc: u32,
    inverse: bool,
) -> AlphabetSeries {
    let kind = if inverse {
        crate::kernels::KernelKind::PiInverse
    } else {
        crate::kernels::KernelKind::Pi
    };
    let mut exponent = AlphabetSeries::zero(trunc);
    for k in 1..=trunc / 2 {
        let mut c = crate::kernels::kernel_coefficient(kind, k, params) / int(k as i64);
        c *= powi(sx, k as i32) * powi(sy, k as i32);
        if c.is_zero() {
            continue;
        }
        let term = AlphabetSeries::p_k(x, k, trunc).mul(&AlphabetSeries::p_k(y, k, trunc));
        exponent = exponent.add(&term.scale(&c));
    }
    exponent.exp()
}

/// p_k(A) ↦ s^k p_k(A) inside every Laurent coefficient.
fn scale_laurent_alphabet(
    l: &Laurent<AlphabetSeries>,
    alphabet: Alphabet,
    s: &Scalar,
) -> Laurent<AlphabetSeries> {
    Laurent {
        coeffs: l
            .coeffs
            .iter()
            .map(|(e, c)| (*e, c.scale_alphabet(alphabet, s)))
            .collect(),
    }
}

/// Scale-constant variant: observables c_i^{|λⁱ|} O_{r_i}(λⁱ). The RHS is
/// the multilevel integrand with A^α ↦ d_α A^α, B^β ↦ d_{β+1}^{-1} B^β
/// (d_i = c_i ⋯ c_N) times the prefactor
/// ∏_{α≤β} Π(d_α A^α; d_{β+1}^{-1} B^β) / Π(A^α; B^β).
pub fn cor_3_7(
    rs: &[u32],
    cs: &[Scalar],
    a_alphabets: &[Alphabet],
    b_alphabets: &[Alphabet],
    params: &Params,
    trunc: u32,
) -> Result<BuiltIntegrand<AlphabetSeries>> {
    let n = rs.len();
    assert_eq!(cs.len(), n);
    let mut d = vec![Scalar::one(); n + 2];
    for i in (1..=n).rev() {
        d[i] = &d[i + 1] * &cs[i - 1];
    }
    let levels = allocate_vars(rs);
    let mut term = RTerm::new(AlphabetSeries::one(trunc));
    let q = params.q.clone();
    for (alpha0, vars) in levels.iter().enumerate() {
        let alpha = alpha0 + 1;
        term.push_scalar(&factorial_inv(rs[alpha0]));
        push_cauchy_det(&mut term, vars, &Scalar::one(), &params.t)?;
        for beta in alpha..=n {
            let sb = d[beta + 1].clone().recip();
            for &v in vars {
                let lf = h_factor(-1, &q, b_alphabets[beta - 1], params, trunc, false);
                term.push_series(v, scale_laurent_alphabet(&lf, b_alphabets[beta - 1], &sb));
            }
            for &v in &levels[beta - 1] {
                let lf = h_factor(
                    1,
                    &Scalar::one(),
                    a_alphabets[alpha - 1],
                    params,
                    trunc,
                    false,
                );
                term.push_series(
                    v,
                    scale_laurent_alphabet(&lf, a_alphabets[alpha - 1], &d[alpha]),
                );
            }
            if beta > alpha {
                for &va in vars {
                    for &vb in &levels[beta - 1] {
                        push_w_factor(&mut term, &q, va, vb, params)?;
                    }
                }
            }
        }
    }
    let mut pre = AlphabetSeries::one(trunc);
    for alpha in 1..=n {
        for beta in alpha..=n {
            let scaled = pi_kernel_scaled(
                a_alphabets[alpha - 1],
                b_alphabets[beta - 1],
                &d[alpha],
                &d[beta + 1].clone().recip(),
                params,
                trunc,
                false,
            );
            let plain_inv = pi_kernel_scaled(
                a_alphabets[alpha - 1],
                b_alphabets[beta - 1],
                &Scalar::one(),
                &Scalar::one(),
                params,
                trunc,
                true,
            );
            pre = pre.mul(&scaled).mul(&plain_inv);
        }
    }
    let mut expr = RationalExpr::new();
    expr.push(term);
    let scheme = circle_scheme(&levels, &nested_radii(n, &params.q));
    Ok(BuiltIntegrand {
        expr,
        scheme,
        prefactor: Some(pre),
        levels,
    })
}

/// The Ô₁ multilevel integrand:
///   (2πi)^{-N} ∮…∮ ∏ dv_α/v_α ∏_{α≤β} H⁻¹((t v_α)^{-1}; B^β)
///              H⁻¹(A^α; v_β) ∏_{α<β} W((t v_α)^{-1}; v_β),
/// radii R_β < t·R_α for α < β.
pub fn thm_b1(
    n: usize,
    a_alphabets: &[Alphabet],
    b_alphabets: &[Alphabet],
    params: &Params,
    trunc: u32,
) -> Result<BuiltIntegrand<AlphabetSeries>> {
    params.require_positive_t("the hatted observable identity")?;
    let sizes = vec![1u32; n];
    let levels = allocate_vars(&sizes);
    let mut term = RTerm::new(AlphabetSeries::one(trunc));
    let t = params.t.clone();
    for alpha in 0..n {
        term.push_mono(levels[alpha][0], -1);
        for beta in alpha..n {
            term.push_series(
                levels[alpha][0],
                h_factor(-1, &t, b_alphabets[beta], params, trunc, true),
            );
            term.push_series(
                levels[beta][0],
                h_factor(1, &Scalar::one(), a_alphabets[alpha], params, trunc, true),
            );
            if beta > alpha {
                push_w_factor(&mut term, &t, levels[alpha][0], levels[beta][0], params)?;
            }
        }
    }
    let step = &t * rat(1, 2);
    let mut radii = Vec::with_capacity(n);
    let mut cur = Scalar::one();
    for _ in 0..n {
        radii.push(cur.clone());
        cur *= &step;
    }
    let mut expr = RationalExpr::new();
    expr.push(term);
    let scheme = circle_scheme(&levels, &radii);
    Ok(BuiltIntegrand {
        expr,
        scheme,
        prefactor: None,
        levels,
    })
}

// ---------------------------------------------------------------------
// specialized (ascending) integrands: rational factors, cluster contours
// ---------------------------------------------------------------------

/// Reject configurations where a point the contour must exclude collides
/// exactly with an enclosed point.
fn ensure_excluded(point: &Scalar, anchors: &[Scalar], what: &str) -> Result<()> {
    if anchors.contains(point) {
        return Err(Error::UndecidableContour(alloc::format!(
            "required contour cannot exist: {what} coincides with an enclosed point"
        )));
    }
    Ok(())
}

/// Anchors {shift^k · a_j : 0 ≤ k ≤ max_shift}.
fn shifted_anchors(a: &[Scalar], shift: &Scalar, max_shift: u32) -> Vec<Scalar> {
    let mut out = Vec::new();
    for k in 0..=max_shift {
        for aj in a {
            let p = powi(shift, k as i32) * aj;
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Multilevel moment integrand for the ascending process, plain or with
/// (q,t) ↦ (q⁻¹,t⁻¹) inverted throughout (hatted).
///
/// Plain:  per level det[1/(t z_i − z_j)]/r_α!, cross factors
///         (t z^α − q z^β)(z^α − z^β)/[(z^α − q z^β)(t z^α − z^β)],
///         per variable ∏_{j≤n_α}(t z − a_j)/(z − a_j) · Π(qz;ρ)/Π(z;ρ).
pub fn ascending_multilevel(
    ns: &[usize],
    rs: &[u32],
    config: &AscendingConfig,
    hatted: bool,
) -> Result<BuiltIntegrand<Scalar>> {
    let m = ns.len();
    assert_eq!(rs.len(), m);
    if !(1..m).all(|i| ns[i] <= ns[i - 1]) {
        return Err(Error::InvalidInput(alloc::string::String::from(
            "levels must be weakly decreasing",
        )));
    }
    if ns
        .iter()
        .zip(rs)
        .any(|(&n, &r)| n < 1 || n > config.n || r as usize > n)
    {
        return Err(Error::InvalidInput(alloc::string::String::from(
            "need 1 <= n_i <= N and 0 <= r_i <= n_i",
        )));
    }
    config.validate()?;
    let params = &config.params;
    if hatted {
        params.require_positive_t("hatted operators")?;
        config.validate_strengthened(m as u32)?;
    }
    let b_parts = config.rho.finite_parts()?.to_vec();

    let (tt, qq) = if hatted {
        (params.t.clone().recip(), params.q.clone().recip())
    } else {
        (params.t.clone(), params.q.clone())
    };

    let levels = allocate_vars(rs);
    let mut term = RTerm::new(Scalar::one());
    for (alpha, vars) in levels.iter().enumerate() {
        term.push_scalar(&factorial_inv(rs[alpha]));
        push_cauchy_det(&mut term, vars, &tt, &Scalar::one())?;
        for &z in vars {
            for aj in config.a.iter().take(ns[alpha]) {
                term.push_linear_numer(
                    Atom::scaled_var(tt.clone(), z),
                    Atom::constant(aj.clone()),
                );
                term.push_linear_denom(Atom::var(z), Atom::constant(aj.clone()))?;
            }
            // Π(q^{±1}z;ρ)/Π(z;ρ), rational for finite alphabets
            for b in &b_parts {
                if b.is_zero() {
                    continue;
                }
                if hatted {
                    term.push_linear_numer(
                        Atom::constant(Scalar::one()),
                        Atom::scaled_var(&params.t * &qq * b, z),
                    );
                    term.push_linear_denom(
                        Atom::constant(Scalar::one()),
                        Atom::scaled_var(&qq * b, z),
                    )?;
                } else {
                    term.push_linear_numer(
                        Atom::constant(Scalar::one()),
                        Atom::scaled_var(b.clone(), z),
                    );
                    term.push_linear_denom(
                        Atom::constant(Scalar::one()),
                        Atom::scaled_var(&params.t * b, z),
                    )?;
                }
            }
        }
        for beta in (alpha + 1)..m {
            for &za in vars {
                for &zb in &levels[beta] {
                    term.push_linear_numer(
                        Atom::scaled_var(tt.clone(), za),
                        Atom::scaled_var(qq.clone(), zb),
                    );
                    term.push_linear_numer(Atom::var(za), Atom::var(zb));
                    term.push_linear_denom(Atom::var(za), Atom::scaled_var(qq.clone(), zb))?;
                    term.push_linear_denom(Atom::scaled_var(tt.clone(), za), Atom::var(zb))?;
                }
            }
        }
    }

    // cluster contours: level α encloses the q^{±k}-shifted a's, k ≤ m−1−α
    let mut contours = alloc::collections::BTreeMap::new();
    for (alpha, vars) in levels.iter().enumerate() {
        let anchors = shifted_anchors(&config.a, &qq, (m - 1 - alpha) as u32);
        if anchors.len() != config.a.len() * (m - alpha) {
            return Err(Error::DegenerateParams(alloc::string::String::from(
                "q-shifted evaluation points collide; perturb the a's",
            )));
        }
        for k in 0..=(m - alpha) as u32 {
            for aj in &config.a {
                let base = powi(&qq, k as i32) * aj;
                if !params.t_is_zero() {
                    ensure_excluded(&(&tt * &base), &anchors, "a t-shifted point")?;
                    ensure_excluded(&(&base / &tt), &anchors, "a t-shifted point")?;
                }
            }
        }
        for b in &b_parts {
            if b.is_zero() {
                continue;
            }
            let pole = if hatted {
                (&qq * b).recip()
            } else {
                if params.t_is_zero() {
                    continue;
                }
                (&params.t * b).recip()
            };
            ensure_excluded(&pole, &anchors, "a specialization pole")?;
        }
        for &v in vars {
            contours.insert(
                v,
                VarContour::Cluster {
                    anchors: anchors.clone(),
                    eps_rank: alpha as u32,
                },
            );
        }
    }
    let order: Vec<VarId> = levels.iter().rev().flatten().copied().collect();
    let scheme = ContourScheme { contours, order };
    let mut expr = RationalExpr::new();
    expr.push(term);
    Ok(BuiltIntegrand {
        expr,
        scheme,
        prefactor: None,
        levels,
    })
}

/// One k-fold term of the qt-Fredholm expansion: the Leibniz expansion of
/// det[K'(ν_i, w_i, w_j)] with
///   K'(v,w,w') = 1/(q^v w − w') · ∏_s (w b_s;q)_v/(t w b_s;q)_v
///              · ∏_j (t w/a_j;q)_v/(w/a_j;q)_v
/// (u^{|ν|} prefactors are tracked by the caller).
pub fn fredholm_qt_term(nu: &[u32], config: &AscendingConfig) -> Result<BuiltIntegrand<Scalar>> {
    config.validate()?;
    let params = &config.params;
    let b_parts = config.rho.finite_parts()?.to_vec();
    let k = nu.len();
    assert!(k >= 1 && nu.iter().all(|&v| v >= 1));

    let levels = allocate_vars(&[k as u32]);
    let vars = levels[0].clone();
    let anchors = config.a.clone();
    let max_nu = *nu.iter().max().unwrap();
    for s in 1..=max_nu {
        for aj in &config.a {
            ensure_excluded(&(aj / params.q_pow(s as i32)), &anchors, "a q-lowered point")?;
            ensure_excluded(&(aj * params.q_pow(s as i32)), &anchors, "a q-raised point")?;
        }
    }
    if !params.t_is_zero() {
        for s in 0..max_nu {
            for b in &b_parts {
                if b.is_zero() {
                    continue;
                }
                ensure_excluded(
                    &(params.q_pow(s as i32) * &params.t * b).recip(),
                    &anchors,
                    "a specialization pole",
                )?;
            }
        }
    }

    let mut expr = RationalExpr::new();
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let mut inversions = 0;
        for i in 0..k {
            for j in (i + 1)..k {
                if perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        let mut term = RTerm::new(Scalar::one());
        if inversions % 2 == 1 {
            term.push_scalar(&-Scalar::one());
        }
        for i in 0..k {
            let w = vars[i];
            let wp = vars[perm[i]];
            let v = nu[i];
            let qv = params.q_pow(v as i32);
            term.push_linear_denom(Atom::scaled_var(qv, w), Atom::var(wp))?;
            for s in 0..v {
                let qs = params.q_pow(s as i32);
                for b in &b_parts {
                    if b.is_zero() {
                        continue;
                    }
                    term.push_linear_numer(
                        Atom::constant(Scalar::one()),
                        Atom::scaled_var(&qs * b, w),
                    );
                    term.push_linear_denom(
                        Atom::constant(Scalar::one()),
                        Atom::scaled_var(&qs * &params.t * b, w),
                    )?;
                }
                for aj in &config.a {
                    term.push_linear_numer(
                        Atom::constant(Scalar::one()),
                        Atom::scaled_var(&qs * &params.t / aj, w),
                    );
                    term.push_linear_denom(
                        Atom::constant(Scalar::one()),
                        Atom::scaled_var(&qs / aj, w),
                    )?;
                }
            }
        }
        expr.push(term);
        if !next_perm(&mut perm) {
            break;
        }
    }

    let contours = vars
        .iter()
        .map(|&v| {
            (
                v,
                VarContour::Cluster {
                    anchors: anchors.clone(),
                    eps_rank: 0,
                },
            )
        })
        .collect();
    let scheme = ContourScheme {
        contours,
        order: vars,
    };
    Ok(BuiltIntegrand {
        expr,
        scheme,
        prefactor: None,
        levels,
    })
}

/// det[J(w_k, w_ℓ)]_{r×r} with J(w,w') = 1/(t w' − w)
/// · ∏_m (t w − a_m)/(w − a_m) · Π(qw;ρ)/Π(w;ρ), over a contour
/// enclosing the a's but not the t-shifted a's.
pub fn fredholm_ek_term(r: u32, config: &AscendingConfig) -> Result<BuiltIntegrand<Scalar>> {
    config.validate()?;
    let params = &config.params;
    let b_parts = config.rho.finite_parts()?.to_vec();
    let levels = allocate_vars(&[r]);
    let vars = levels[0].clone();
    let anchors = config.a.clone();
    if !params.t_is_zero() {
        for aj in &config.a {
            ensure_excluded(&(&params.t * aj), &anchors, "a t-shifted point")?;
            ensure_excluded(&(aj / &params.t), &anchors, "a t-shifted point")?;
        }
        for b in &b_parts {
            if b.is_zero() {
                continue;
            }
            ensure_excluded(&(&params.t * b).recip(), &anchors, "a specialization pole")?;
        }
    }

    let mut term = RTerm::new(Scalar::one());
    // det[1/(t w_ℓ − w_k)]_{k,ℓ} = det[1/(t w_k − w_ℓ)] (transpose)
    push_cauchy_det(&mut term, &vars, &params.t, &Scalar::one())?;
    for &w in &vars {
        for aj in &config.a {
            term.push_linear_numer(
                Atom::scaled_var(params.t.clone(), w),
                Atom::constant(aj.clone()),
            );
            term.push_linear_denom(Atom::var(w), Atom::constant(aj.clone()))?;
        }
        for b in &b_parts {
            if b.is_zero() {
                continue;
            }
            term.push_linear_numer(
                Atom::constant(Scalar::one()),
                Atom::scaled_var(b.clone(), w),
            );
            term.push_linear_denom(
                Atom::constant(Scalar::one()),
                Atom::scaled_var(&params.t * b, w),
            )?;
        }
    }
    let mut expr = RationalExpr::new();
    expr.push(term);
    let contours = vars
        .iter()
        .map(|&v| {
            (
                v,
                VarContour::Cluster {
                    anchors: anchors.clone(),
                    eps_rank: 0,
                },
            )
        })
        .collect();
    let scheme = ContourScheme {
        contours,
        order: vars,
    };
    Ok(BuiltIntegrand {
        expr,
        scheme,
        prefactor: None,
        levels,
    })
}

pub(crate) fn next_perm(perm: &mut [usize]) -> bool {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::iterated_residue_integral;

    #[test]
    fn cauchy_det_product_form_matches_leibniz() {
        // det[1/(x z_i − y z_j)] expanded over permutations equals the
        // product form at random points, r ≤ 3
        let mut gen = crate::scalar::GenericPoints::new(11);
        for r in 1..=3usize {
            for _ in 0..4 {
                let x = gen.next_rational();
                let y = gen.next_rational();
                if x == y || x.is_zero() || y.is_zero() {
                    continue;
                }
                let zs = gen.distinct_rationals(r);
                let mut perm: Vec<usize> = (0..r).collect();
                let mut det = Scalar::zero();
                loop {
                    let mut inv = 0;
                    for i in 0..r {
                        for j in (i + 1)..r {
                            if perm[i] > perm[j] {
                                inv += 1;
                            }
                        }
                    }
                    let mut prod = if inv % 2 == 0 {
                        Scalar::one()
                    } else {
                        -Scalar::one()
                    };
                    for i in 0..r {
                        prod /= &x * &zs[i] - &y * &zs[perm[i]];
                    }
                    det += prod;
                    if !next_perm(&mut perm) {
                        break;
                    }
                }
                let vars: Vec<VarId> = (0..r as u16).map(VarId).collect();
                let mut t = RTerm::new(Scalar::one());
                push_cauchy_det(&mut t, &vars, &x, &y).unwrap();
                let mut cur = t;
                for (i, z) in zs.iter().enumerate() {
                    cur = cur
                        .subst(VarId(i as u16), &Atom::constant(z.clone()))
                        .unwrap();
                }
                assert!(cur.numer.is_empty() && cur.denom.is_empty());
                assert_eq!(cur.scalar, det, "r = {r}");
            }
        }
    }

    #[test]
    fn prop_3_4_degree_zero_is_o1_mean() {
        // r = 1, truncation 0: integrand 1/((1−t)w), value 1/(1−t)
        let params = Params::new(rat(1, 3), rat(1, 5)).unwrap();
        let built = prop_3_4(1, Alphabet::x(), Alphabet::y(), &params, 0, &Scalar::one()).unwrap();
        let unit = AlphabetSeries::one(0);
        let (v, _) = iterated_residue_integral(built.expr, &built.scheme, &unit).unwrap();
        let expect = (Scalar::one() - rat(1, 5)).recip();
        assert_eq!(v, AlphabetSeries::constant(0, expect));
    }

    #[test]
    fn trivial_multilevel_integrand_is_one() {
        // all r = 0: no variables at all, value 1
        let params = Params::new(rat(1, 3), rat(1, 5)).unwrap();
        let built = thm_3_3(
            &[0, 0],
            &[Alphabet::a(1), Alphabet::a(2)],
            &[Alphabet::b(1), Alphabet::b(2)],
            &params,
            3,
        )
        .unwrap();
        let unit = AlphabetSeries::one(3);
        let (v, _) = iterated_residue_integral(built.expr, &built.scheme, &unit).unwrap();
        assert_eq!(v, AlphabetSeries::one(3));
    }
}
