//! Exact evaluation of iterated contour integrals by residue calculus.
//!
//! Integrands are products of linear-difference factors, monomials and
//! one-variable Laurent polynomials whose coefficients live in a
//! coefficient ring (scalars, or multi-alphabet series in formal mode).
//! One variable is integrated at a time: the integral picks up the
//! residues at the poles classified as inside the variable's contour,
//! each residue substitutes the pole location and yields a smaller
//! integrand of the same shape. Everything is exact.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::alphabet::AlphabetSeries;
use crate::error::{Error, Result};
use crate::scalar::{powi, Scalar};

/// Contour variable handle; display name is `v<id>` unless the scheme
/// carries labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u16);

impl core::fmt::Display for VarId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Coefficient ring of the integrand: exact scalars or truncated series.
pub trait CoeffRing: Clone + PartialEq + core::fmt::Debug {
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
    fn ring_mul_scalar(&self, c: &Scalar) -> Self;
    fn ring_is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
}

impl CoeffRing for Scalar {
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_mul_scalar(&self, c: &Scalar) -> Self {
        self * c
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn zero_like(&self) -> Self {
        Scalar::zero()
    }
}

impl CoeffRing for AlphabetSeries {
    fn ring_add(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn ring_mul_scalar(&self, c: &Scalar) -> Self {
        self.scale(c)
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn zero_like(&self) -> Self {
        AlphabetSeries::zero(self.trunc)
    }
}

/// `coeff · v` or a constant `coeff`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub coeff: Scalar,
    pub var: Option<VarId>,
}

impl Atom {
    pub fn constant(c: Scalar) -> Self {
        Atom { coeff: c, var: None }
    }

    pub fn var(v: VarId) -> Self {
        Atom {
            coeff: Scalar::one(),
            var: Some(v),
        }
    }

    pub fn scaled_var(c: Scalar, v: VarId) -> Self {
        Atom {
            coeff: c,
            var: Some(v),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    fn display(&self) -> String {
        use alloc::format;
        match self.var {
            Some(v) => format!("({})*{v}", crate::scalar::display_scalar(&self.coeff)),
            None => crate::scalar::display_scalar(&self.coeff),
        }
    }
}

/// Canonical linear factor `(lead − rhs)` with unit leading coefficient;
/// `rhs.var`, when present, differs from `lead`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lin {
    pub lead: VarId,
    pub rhs: Atom,
}

/// One-variable Laurent polynomial with ring coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent<C> {
    pub coeffs: BTreeMap<i32, C>,
}

impl<C: CoeffRing> Laurent<C> {
    pub fn constant(c: C) -> Self {
        let mut m = BTreeMap::new();
        if !c.ring_is_zero() {
            m.insert(0, c);
        }
        Laurent { coeffs: m }
    }

    pub fn add_term(&mut self, e: i32, c: C) {
        if c.ring_is_zero() {
            return;
        }
        match self.coeffs.get_mut(&e) {
            Some(slot) => {
                *slot = slot.ring_add(&c);
                if slot.ring_is_zero() {
                    self.coeffs.remove(&e);
                }
            }
            None => {
                self.coeffs.insert(e, c);
            }
        }
    }

    pub fn mul(&self, other: &Laurent<C>) -> Laurent<C> {
        let mut out = Laurent {
            coeffs: BTreeMap::new(),
        };
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                out.add_term(ea + eb, ca.ring_mul(cb));
            }
        }
        out
    }

    pub fn add(&self, other: &Laurent<C>) -> Laurent<C> {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Laurent<C> {
        let mut out = Laurent {
            coeffs: BTreeMap::new(),
        };
        for (e, v) in &self.coeffs {
            out.add_term(*e, v.ring_mul_scalar(c));
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> i32 {
        self.coeffs.keys().next().copied().unwrap_or(0)
    }
}

/// A single product term of the integrand.
#[derive(Clone, Debug)]
pub struct RTerm<C> {
    pub scalar: Scalar,
    pub cval: C,
    /// ∏ v^e (negative exponents are poles at the origin).
    pub mono: BTreeMap<VarId, i32>,
    pub numer: Vec<Lin>,
    pub denom: Vec<Lin>,
    /// One merged Laurent factor per variable.
    pub series: BTreeMap<VarId, Laurent<C>>,
}

/// A sum of product terms; the value an integration step maps to itself.
#[derive(Clone, Debug)]
pub struct RationalExpr<C> {
    pub terms: Vec<RTerm<C>>,
}

impl<C: CoeffRing> RTerm<C> {
    pub fn new(unit: C) -> Self {
        RTerm {
            scalar: Scalar::one(),
            cval: unit,
            mono: BTreeMap::new(),
            numer: Vec::new(),
            denom: Vec::new(),
            series: BTreeMap::new(),
        }
    }

    pub fn is_dead(&self) -> bool {
        self.scalar.is_zero() || self.cval.ring_is_zero()
    }

    pub fn push_scalar(&mut self, c: &Scalar) {
        self.scalar *= c;
    }

    pub fn push_cval(&mut self, c: &C) {
        self.cval = self.cval.ring_mul(c);
    }

    pub fn push_mono(&mut self, v: VarId, e: i32) {
        if e == 0 {
            return;
        }
        let slot = self.mono.entry(v).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.mono.remove(&v);
        }
    }

    pub fn push_series(&mut self, v: VarId, s: Laurent<C>) {
        match self.series.remove(&v) {
            Some(existing) => {
                self.series.insert(v, existing.mul(&s));
            }
            None => {
                self.series.insert(v, s);
            }
        }
    }

    /// Multiply by the linear factor (a − b). Degenerate shapes fold into
    /// the scalar or monomial part; a vanishing factor kills the term.
    pub fn push_linear_numer(&mut self, a: Atom, b: Atom) {
        match canonicalize(a, b) {
            Canon::Const(c) => self.scalar *= c,
            Canon::Mono(c, v) => {
                self.scalar *= c;
                if !self.scalar.is_zero() {
                    self.push_mono(v, 1);
                }
            }
            Canon::Linear(scale, lin) => {
                self.scalar *= scale;
                self.numer.push(lin);
            }
        }
    }

    /// Divide by the linear factor (a − b). A factor that is identically
    /// zero is a pole collision.
    pub fn push_linear_denom(&mut self, a: Atom, b: Atom) -> Result<()> {
        match canonicalize(a, b) {
            Canon::Const(c) => {
                if c.is_zero() {
                    return Err(Error::DegenerateParams(String::from(
                        "vanishing constant denominator factor",
                    )));
                }
                self.scalar /= c;
                Ok(())
            }
            Canon::Mono(c, v) => {
                if c.is_zero() {
                    return Err(Error::DegenerateParams(String::from(
                        "vanishing monomial denominator factor",
                    )));
                }
                self.scalar /= c;
                self.push_mono(v, -1);
                Ok(())
            }
            Canon::Linear(scale, lin) => {
                self.scalar /= scale;
                self.denom.push(lin);
                Ok(())
            }
        }
    }

    /// Remove numerator/denominator factor pairs that agree exactly.
    pub fn cancel(&mut self) {
        let mut i = 0;
        while i < self.numer.len() {
            if let Some(j) = self.denom.iter().position(|d| *d == self.numer[i]) {
                self.denom.swap_remove(j);
                self.numer.swap_remove(i);
            } else {
                i += 1;
            }
        }
    }

    /// Substitute v ← target (a constant or c·u with u ≠ v).
    pub fn subst(&self, v: VarId, target: &Atom) -> Result<RTerm<C>> {
        debug_assert!(target.var != Some(v));
        let mut out = RTerm::new(self.cval.clone());
        out.scalar = self.scalar.clone();
        // monomial part
        for (&u, &e) in &self.mono {
            if u != v {
                out.push_mono(u, e);
                continue;
            }
            match &target.var {
                Some(w) => {
                    out.scalar *= powi(&target.coeff, e);
                    out.push_mono(*w, e);
                }
                None => {
                    if target.coeff.is_zero() {
                        if e < 0 {
                            return Err(Error::DegenerateParams(String::from(
                                "substituting a zero into a pole at the origin",
                            )));
                        }
                        // v^e with e > 0 at v = 0: the term vanishes
                        out.scalar = Scalar::zero();
                        return Ok(out);
                    }
                    out.scalar *= powi(&target.coeff, e);
                }
            }
        }
        // linear factors
        for lin in &self.numer {
            let (a, b) = lin_atoms(lin, v, target);
            out.push_linear_numer(a, b);
            if out.scalar.is_zero() {
                return Ok(out);
            }
        }
        for lin in &self.denom {
            let (a, b) = lin_atoms(lin, v, target);
            out.push_linear_denom(a, b)?;
        }
        // series factors
        for (&u, s) in &self.series {
            if u != v {
                out.push_series(u, s.clone());
                continue;
            }
            match &target.var {
                Some(w) => {
                    let mut moved = Laurent {
                        coeffs: BTreeMap::new(),
                    };
                    for (&e, c) in &s.coeffs {
                        moved.add_term(e, c.ring_mul_scalar(&powi(&target.coeff, e)));
                    }
                    out.push_series(*w, moved);
                }
                None => {
                    let mut acc = self.cval.zero_like();
                    for (&e, c) in &s.coeffs {
                        if target.coeff.is_zero() {
                            if e < 0 {
                                return Err(Error::DegenerateParams(String::from(
                                    "evaluating a Laurent pole at zero",
                                )));
                            }
                            if e == 0 {
                                acc = acc.ring_add(c);
                            }
                        } else {
                            acc = acc.ring_add(&c.ring_mul_scalar(&powi(&target.coeff, e)));
                        }
                    }
                    out.push_cval(&acc);
                }
            }
        }
        Ok(out)
    }

    fn involves(&self, v: VarId) -> bool {
        self.mono.contains_key(&v)
            || self.series.contains_key(&v)
            || self
                .numer
                .iter()
                .chain(self.denom.iter())
                .any(|l| l.lead == v || l.rhs.var == Some(v))
    }
}

/// Result of canonicalizing a difference of atoms.
enum Canon {
    Const(Scalar),
    Mono(Scalar, VarId),
    Linear(Scalar, Lin),
}

/// (a − b) → scale · (lead − rhs), lead var chosen smallest for stable
/// cancellation.
fn canonicalize(a: Atom, b: Atom) -> Canon {
    match (a.var, b.var) {
        (None, None) => Canon::Const(a.coeff - b.coeff),
        (Some(i), Some(j)) if i == j => Canon::Mono(a.coeff - b.coeff, i),
        (Some(i), Some(j)) => {
            if i < j {
                let scale = a.coeff.clone();
                Canon::Linear(
                    scale.clone(),
                    Lin {
                        lead: i,
                        rhs: Atom::scaled_var(b.coeff / scale, j),
                    },
                )
            } else {
                // a − b = −b.coeff (v_j − (a.coeff/b.coeff) v_i)
                let scale = -b.coeff.clone();
                Canon::Linear(
                    scale.clone(),
                    Lin {
                        lead: j,
                        rhs: Atom::scaled_var(a.coeff / -scale, i),
                    },
                )
            }
        }
        (Some(i), None) => {
            if b.coeff.is_zero() {
                Canon::Mono(a.coeff, i)
            } else {
                let scale = a.coeff.clone();
                Canon::Linear(
                    scale.clone(),
                    Lin {
                        lead: i,
                        rhs: Atom::constant(b.coeff / scale),
                    },
                )
            }
        }
        (None, Some(j)) => {
            if a.coeff.is_zero() {
                Canon::Mono(-b.coeff, j)
            } else {
                let scale = -b.coeff.clone();
                Canon::Linear(
                    scale.clone(),
                    Lin {
                        lead: j,
                        rhs: Atom::constant(a.coeff / -scale),
                    },
                )
            }
        }
    }
}

/// Atoms of a stored lin with `v` substituted by `target`.
fn lin_atoms(lin: &Lin, v: VarId, target: &Atom) -> (Atom, Atom) {
    let lead_atom = if lin.lead == v {
        target.clone()
    } else {
        Atom::var(lin.lead)
    };
    let rhs_atom = if lin.rhs.var == Some(v) {
        match &target.var {
            Some(w) => Atom::scaled_var(&lin.rhs.coeff * &target.coeff, *w),
            None => Atom::constant(&lin.rhs.coeff * &target.coeff),
        }
    } else {
        lin.rhs.clone()
    };
    (lead_atom, rhs_atom)
}

/// Contour attached to one variable.
#[derive(Clone, Debug)]
pub enum VarContour {
    /// Positively oriented circle of the given radius around the origin.
    Circle { radius: Scalar },
    /// Union of arbitrarily tight positively oriented loops around the
    /// anchor points; the origin and everything off the anchor set is
    /// outside. Loop sizes shrink strictly as `eps_rank` grows.
    Cluster { anchors: Vec<Scalar>, eps_rank: u32 },
}

/// Full scheme: per-variable contours plus the integration order
/// (innermost first).
#[derive(Clone, Debug)]
pub struct ContourScheme {
    pub contours: BTreeMap<VarId, VarContour>,
    pub order: Vec<VarId>,
}

/// Pole classification outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleSide {
    Inside,
    Outside,
}

impl ContourScheme {
    pub fn validate(&self) -> Result<()> {
        for v in &self.order {
            if !self.contours.contains_key(v) {
                return Err(Error::UndecidableContour(alloc::format!(
                    "no contour declared for {v}"
                )));
            }
        }
        for (v, c) in &self.contours {
            match c {
                VarContour::Circle { radius } => {
                    if !radius.is_positive() {
                        return Err(Error::UndecidableContour(alloc::format!(
                            "radius of {v} must be positive"
                        )));
                    }
                }
                VarContour::Cluster { anchors, .. } => {
                    for (i, a) in anchors.iter().enumerate() {
                        if a.is_zero() {
                            return Err(Error::UndecidableContour(alloc::format!(
                                "cluster contour of {v} anchored at the origin"
                            )));
                        }
                        if anchors[..i].contains(a) {
                            return Err(Error::DegenerateParams(alloc::format!(
                                "coincident anchor points on the contour of {v}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Does the contour of `v` enclose the origin?
    pub fn origin_inside(&self, v: VarId) -> bool {
        matches!(self.contours.get(&v), Some(VarContour::Circle { .. }))
    }

    /// Classify a candidate pole location of the variable `v`.
    ///
    /// A location is either a constant or `c·u` for a still-free variable
    /// `u`; in the latter case the decision must be uniform over all
    /// admissible positions of `u` on its own contour, otherwise the
    /// scheme is rejected.
    pub fn classify_pole(&self, v: VarId, pole: &Atom) -> Result<PoleSide> {
        use core::cmp::Ordering;
        let target = self.contours.get(&v).ok_or_else(|| {
            Error::UndecidableContour(alloc::format!("no contour declared for {v}"))
        })?;
        match (target, &pole.var) {
            (VarContour::Circle { radius }, None) => {
                match pole.coeff.abs().cmp(radius) {
                    Ordering::Less => Ok(PoleSide::Inside),
                    Ordering::Greater => Ok(PoleSide::Outside),
                    Ordering::Equal => Err(Error::UndecidableContour(alloc::format!(
                        "pole of {v} at {} sits on the contour",
                        pole.display()
                    ))),
                }
            }
            (VarContour::Circle { radius }, Some(u)) => {
                let other = self.contours.get(u).ok_or_else(|| {
                    Error::UndecidableContour(alloc::format!("no contour declared for {u}"))
                })?;
                let VarContour::Circle { radius: ru } = other else {
                    return Err(Error::UndecidableContour(alloc::format!(
                        "mixed contour kinds between {v} and {u}"
                    )));
                };
                let mag = pole.coeff.abs() * ru;
                match mag.cmp(radius) {
                    Ordering::Less => Ok(PoleSide::Inside),
                    Ordering::Greater => Ok(PoleSide::Outside),
                    Ordering::Equal => Err(Error::UndecidableContour(alloc::format!(
                        "pole of {v} at {} has on-contour magnitude",
                        pole.display()
                    ))),
                }
            }
            (VarContour::Cluster { anchors, .. }, None) => {
                if anchors.contains(&pole.coeff) {
                    Ok(PoleSide::Inside)
                } else {
                    Ok(PoleSide::Outside)
                }
            }
            (
                VarContour::Cluster {
                    anchors,
                    eps_rank: rank_v,
                },
                Some(u),
            ) => {
                let other = self.contours.get(u).ok_or_else(|| {
                    Error::UndecidableContour(alloc::format!("no contour declared for {u}"))
                })?;
                let VarContour::Cluster {
                    anchors: anchors_u,
                    eps_rank: rank_u,
                } = other
                else {
                    return Err(Error::UndecidableContour(alloc::format!(
                        "mixed contour kinds between {v} and {u}"
                    )));
                };
                let mut verdict: Option<PoleSide> = None;
                for s in anchors_u {
                    let point = &pole.coeff * s;
                    let side = if !anchors.contains(&point) {
                        PoleSide::Outside
                    } else {
                        // the pole traces a loop of size |c|·ε_u around a
                        // target anchor: inside iff that loop is tighter
                        // than the target's own loop
                        match rank_u.cmp(rank_v) {
                            Ordering::Greater => PoleSide::Inside,
                            Ordering::Less => PoleSide::Outside,
                            Ordering::Equal => {
                                let c = pole.coeff.abs();
                                if c < Scalar::one() {
                                    PoleSide::Inside
                                } else if c > Scalar::one() {
                                    PoleSide::Outside
                                } else {
                                    return Err(Error::UndecidableContour(alloc::format!(
                                        "pole of {v} at {} rides its own contour",
                                        pole.display()
                                    )));
                                }
                            }
                        }
                    };
                    match verdict {
                        None => verdict = Some(side),
                        Some(prev) if prev == side => {}
                        Some(_) => {
                            return Err(Error::UndecidableContour(alloc::format!(
                                "pole of {v} at {} is inside for some positions of {u} and outside for others",
                                pole.display()
                            )))
                        }
                    }
                }
                Ok(verdict.unwrap_or(PoleSide::Outside))
            }
        }
    }
}

/// Trace of the residue evaluation: one line per residue taken.
#[derive(Clone, Debug, Default)]
pub struct ResiduePlan {
    pub steps: Vec<String>,
}

impl ResiduePlan {
    pub fn digest(&self) -> u64 {
        // FNV-1a over the step strings
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for s in &self.steps {
            for b in s.as_bytes() {
                h ^= u64::from(*b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
            h ^= 0x0a;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

impl<C: CoeffRing> RationalExpr<C> {
    pub fn new() -> Self {
        RationalExpr { terms: Vec::new() }
    }

    pub fn push(&mut self, t: RTerm<C>) {
        if !t.is_dead() {
            self.terms.push(t);
        }
    }

    /// Map the coefficient ring (e.g. specialize alphabet series to
    /// scalars before handing the integrand to a numeric oracle).
    pub fn map_coeffs<C2: CoeffRing>(&self, f: &dyn Fn(&C) -> C2) -> RationalExpr<C2> {
        RationalExpr {
            terms: self
                .terms
                .iter()
                .map(|t| RTerm {
                    scalar: t.scalar.clone(),
                    cval: f(&t.cval),
                    mono: t.mono.clone(),
                    numer: t.numer.clone(),
                    denom: t.denom.clone(),
                    series: t
                        .series
                        .iter()
                        .map(|(v, s)| {
                            (
                                *v,
                                Laurent {
                                    coeffs: s.coeffs.iter().map(|(e, c)| (*e, f(c))).collect(),
                                },
                            )
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl<C: CoeffRing> Default for RationalExpr<C> {
    fn default() -> Self {
        Self::new()
    }
}

/// ∮ dv/(2πi) of one term: the sum of residues at inside poles.
fn residues_in_var<C: CoeffRing>(
    term: &RTerm<C>,
    v: VarId,
    scheme: &ContourScheme,
    plan: &mut ResiduePlan,
) -> Result<Vec<RTerm<C>>> {
    use alloc::format;
    let mut term = term.clone();
    term.cancel();
    if !term.involves(v) {
        // ∮ dv/(2πi) of something v-free is zero over a closed contour
        return Ok(Vec::new());
    }

    // candidate poles from linear denominators: solve each factor for v
    let mut candidates: Vec<(Atom, usize)> = Vec::new(); // (location, denom index)
    for (idx, lin) in term.denom.iter().enumerate() {
        if lin.lead == v {
            candidates.push((lin.rhs.clone(), idx));
        } else if lin.rhs.var == Some(v) {
            // (u − c v) = 0 → v = u/c
            let loc = Atom::scaled_var(lin.rhs.coeff.clone().recip(), lin.lead);
            candidates.push((loc, idx));
        }
    }

    // group identical locations: multiplicity ≥ 2 is a higher-order pole
    let mut groups: Vec<(Atom, Vec<usize>)> = Vec::new();
    for (loc, idx) in candidates {
        match groups.iter_mut().find(|(l, _)| *l == loc) {
            Some((_, idxs)) => idxs.push(idx),
            None => groups.push((loc, alloc::vec![idx])),
        }
    }

    let mut out: Vec<RTerm<C>> = Vec::new();
    for (loc, idxs) in &groups {
        let side = scheme.classify_pole(v, loc)?;
        if side == PoleSide::Outside {
            continue;
        }
        if idxs.len() > 1 {
            return Err(Error::HigherOrderPole(format!(
                "pole of {v} at {} has multiplicity {} (perturb the parameters)",
                loc.display(),
                idxs.len()
            )));
        }
        let idx = idxs[0];
        let lin = term.denom[idx].clone();
        let mut reduced = term.clone();
        reduced.denom.swap_remove(idx);
        // residue normalization: factor = (v − rhs) contributes 1,
        // factor = (u − c·v) = −c (v − u/c) contributes −1/c
        if lin.lead != v {
            let c = lin.rhs.coeff.clone();
            reduced.scalar /= -c;
        }
        let res = reduced.subst(v, loc)?;
        plan.steps.push(format!("{v} <- {}", loc.display()));
        if !res.is_dead() {
            out.push(res);
        }
    }

    // residue at the origin (circle contours only)
    if scheme.origin_inside(v) {
        let zero_res = residue_at_origin(&term, v)?;
        if !zero_res.is_empty() {
            plan.steps.push(format!("{v} <- residue at 0"));
        }
        out.extend(zero_res);
    }
    Ok(out)
}

/// Coefficient of v⁻¹ in the local Laurent expansion at the origin.
///
/// The only sources of negative v-powers are the explicit monomial and
/// the Laurent series factor; linear numerators are degree-1 polynomials
/// and linear denominators expand as geometric series in v.
fn residue_at_origin<C: CoeffRing>(term: &RTerm<C>, v: VarId) -> Result<Vec<RTerm<C>>> {
    let mono_e = term.mono.get(&v).copied().unwrap_or(0);
    let series = term.series.get(&v);
    let min_series = series.map(|s| s.min_exp()).unwrap_or(0);
    let lowest = mono_e
        .checked_add(min_series)
        .expect("exponent overflow");
    if lowest > -1 {
        return Ok(Vec::new());
    }

    // linear factors involving v, as a·v + b with b an atom in other vars
    let mut numer_v: Vec<(Scalar, Atom)> = Vec::new();
    let mut denom_v: Vec<(Scalar, Atom)> = Vec::new();
    let mut base = RTerm::new(term.cval.clone());
    base.scalar = term.scalar.clone();
    for (&u, &e) in &term.mono {
        if u != v {
            base.push_mono(u, e);
        }
    }
    for (&u, s) in &term.series {
        if u != v {
            base.push_series(u, s.clone());
        }
    }
    for lin in &term.numer {
        if lin.lead == v {
            numer_v.push((Scalar::one(), negate_atom(&lin.rhs)));
        } else if lin.rhs.var == Some(v) {
            numer_v.push((-lin.rhs.coeff.clone(), Atom::var(lin.lead)));
        } else {
            base.numer.push(lin.clone());
        }
    }
    for lin in &term.denom {
        if lin.lead == v {
            let b = negate_atom(&lin.rhs);
            if b.is_zero() {
                // (v − 0): a pure pole at the origin mis-filed as linear
                return Err(Error::InvalidInput(String::from(
                    "uncanonicalized origin pole",
                )));
            }
            denom_v.push((Scalar::one(), b));
        } else if lin.rhs.var == Some(v) {
            denom_v.push((-lin.rhs.coeff.clone(), Atom::var(lin.lead)));
        } else {
            base.denom.push(lin.clone());
        }
    }

    // enumerate: series exponent e, numerator branch choices, Taylor
    // orders of the denominators; total v-power must reach −1
    let series_entries: Vec<(i32, Option<C>)> = match series {
        Some(s) => s.coeffs.iter().map(|(e, c)| (*e, Some(c.clone()))).collect(),
        None => alloc::vec![(0, None)],
    };

    let mut out: Vec<RTerm<C>> = Vec::new();
    let n_numer = numer_v.len();
    // iterate numerator branch subsets (v-branch or constant-atom branch)
    for mask in 0..(1usize << n_numer) {
        let numer_vpow = mask.count_ones() as i32;
        for (e, cval_opt) in &series_entries {
            let have = mono_e + e + numer_vpow;
            let need = -1 - have; // total Taylor order demanded from denominators
            if need < 0 {
                continue;
            }
            if denom_v.is_empty() && need > 0 {
                continue;
            }
            // compositions of `need` over the denominators
            for comp in compositions(need as u32, denom_v.len()) {
                let mut t = base.clone();
                if let Some(c) = cval_opt {
                    t.push_cval(c);
                }
                // numerator branches
                let mut dead = false;
                for (i, (a, b)) in numer_v.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        // picked a·v
                        t.scalar *= a;
                    } else {
                        // picked the constant atom b
                        match b.var {
                            Some(u) => {
                                t.scalar *= &b.coeff;
                                t.push_mono(u, 1);
                            }
                            None => t.scalar *= &b.coeff,
                        }
                    }
                    if t.scalar.is_zero() {
                        dead = true;
                        break;
                    }
                }
                if dead {
                    continue;
                }
                // denominator Taylor terms: 1/(a v + b) at order s is
                // (−a)^s · b^{−(s+1)} · v^s
                for ((a, b), s) in denom_v.iter().zip(&comp) {
                    let s = *s as i32;
                    if b.coeff.is_zero() {
                        return Err(Error::DegenerateParams(String::from(
                            "denominator pole at the origin in disguise",
                        )));
                    }
                    t.scalar *= powi(&-a.clone(), s) * powi(&b.coeff, -(s + 1));
                    if let Some(u) = b.var {
                        t.push_mono(u, -(s + 1));
                    }
                }
                if !t.is_dead() {
                    out.push(t);
                }
            }
        }
    }
    Ok(out)
}

fn negate_atom(a: &Atom) -> Atom {
    Atom {
        coeff: -a.coeff.clone(),
        var: a.var,
    }
}

/// All length-`parts` tuples of nonnegative integers summing to `total`.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 {
            alloc::vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Integrate a single variable across all terms.
pub fn integrate_variable<C: CoeffRing>(
    expr: RationalExpr<C>,
    v: VarId,
    scheme: &ContourScheme,
    plan: &mut ResiduePlan,
) -> Result<RationalExpr<C>> {
    let mut out = RationalExpr::new();
    for term in &expr.terms {
        for r in residues_in_var(term, v, scheme, plan)? {
            out.push(r);
        }
    }
    Ok(out)
}

/// Full iterated integral ∏_j ∮ dv_j/(2πi) of the expression, innermost
/// variable first per the scheme's order. The result must be free of
/// contour variables.
pub fn iterated_residue_integral<C: CoeffRing>(
    expr: RationalExpr<C>,
    scheme: &ContourScheme,
    unit: &C,
) -> Result<(C, ResiduePlan)> {
    scheme.validate()?;
    let mut plan = ResiduePlan::default();
    let mut cur = expr;
    for &v in &scheme.order {
        cur = integrate_variable(cur, v, scheme, &mut plan)?;
    }
    let mut acc = unit.zero_like();
    for term in &cur.terms {
        if !term.mono.is_empty()
            || !term.series.is_empty()
            || !term.numer.is_empty()
            || !term.denom.is_empty()
        {
            return Err(Error::InvalidInput(alloc::format!(
                "unintegrated contour variables remain: {:?}",
                term.mono.keys().chain(term.series.keys()).collect::<Vec<_>>()
            )));
        }
        acc = acc.ring_add(&term.cval.ring_mul_scalar(&term.scalar));
    }
    Ok((acc, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn circle(vars: &[(u16, (i64, i64))]) -> ContourScheme {
        ContourScheme {
            contours: vars
                .iter()
                .map(|&(v, (n, d))| (VarId(v), VarContour::Circle { radius: rat(n, d) }))
                .collect(),
            order: vars.iter().map(|&(v, _)| VarId(v)).collect(),
        }
    }

    #[test]
    fn residue_of_dz_over_z() {
        // ∮ dz/(2πi z) = 1
        let mut t = RTerm::new(int(1));
        t.push_mono(VarId(0), -1);
        let mut e = RationalExpr::new();
        e.push(t);
        let scheme = circle(&[(0, (1, 1))]);
        let (v, _) = iterated_residue_integral(e, &scheme, &int(1)).unwrap();
        assert_eq!(v, int(1));
    }

    #[test]
    fn residue_of_simple_pole() {
        // ∮ dz/(2πi (z − a)) = 1 when |a| < R, 0 when |a| > R
        for (a, expect) in [(rat(1, 2), int(1)), (rat(3, 1), int(0))] {
            let mut t = RTerm::new(int(1));
            t.push_linear_denom(Atom::var(VarId(0)), Atom::constant(a)).unwrap();
            let mut e = RationalExpr::new();
            e.push(t);
            let scheme = circle(&[(0, (1, 1))]);
            let (v, _) = iterated_residue_integral(e, &scheme, &int(1)).unwrap();
            assert_eq!(v, expect);
        }
    }

    #[test]
    fn empty_integral_is_identity() {
        // no variables: the expression collapses to its own value
        let mut t = RTerm::new(rat(3, 7));
        t.push_scalar(&int(2));
        let mut e = RationalExpr::new();
        e.push(t);
        let scheme = ContourScheme {
            contours: BTreeMap::new(),
            order: alloc::vec![],
        };
        let (v, _) = iterated_residue_integral(e, &scheme, &int(1)).unwrap();
        assert_eq!(v, rat(6, 7));
    }

    #[test]
    fn analytic_terms_integrate_to_zero() {
        // ∮ (z − a) dz/(2πi) = 0, and ∮ dz/(2πi(z−a)) with a outside = 0
        let mut t = RTerm::new(int(1));
        t.push_linear_numer(Atom::var(VarId(0)), Atom::constant(rat(1, 3)));
        let mut e = RationalExpr::new();
        e.push(t);
        let (v, _) = iterated_residue_integral(e, &circle(&[(0, (1, 1))]), &int(1)).unwrap();
        assert_eq!(v, int(0));
    }

    #[test]
    fn cauchy_kernel_two_vars() {
        // ∮∮ dz dw /(2πi)² · 1/((z − w)(w − a)) with |w| inner, |z| outer,
        // a inside both: integrate w first: residue at w = a gives
        // 1/(z − a); then residue at z = a… wait that pole sits inside.
        // The value is ∮ dz/(2πi (z − a)) = 1.
        let a = rat(1, 5);
        let z = VarId(0);
        let w = VarId(1);
        let mut t = RTerm::new(int(1));
        t.push_linear_denom(Atom::var(z), Atom::var(w)).unwrap();
        t.push_linear_denom(Atom::var(w), Atom::constant(a)).unwrap();
        let mut e = RationalExpr::new();
        e.push(t);
        let scheme = ContourScheme {
            contours: [
                (z, VarContour::Circle { radius: int(1) }),
                (w, VarContour::Circle { radius: rat(1, 2) }),
            ]
            .into_iter()
            .collect(),
            order: alloc::vec![w, z],
        };
        let (v, plan) = iterated_residue_integral(e, &scheme, &int(1)).unwrap();
        assert_eq!(v, int(1));
        assert_eq!(plan.steps.len(), 2);
    }

    #[test]
    fn residue_at_origin_with_rational_factor() {
        // ∮ dz/(2πi) · z^{-2} / (z − a) = d/dz|₀ … = −1/a²  (Taylor order 1)
        let a = rat(2, 1); // outside the unit circle: only the origin pole
        let mut t = RTerm::new(int(1));
        t.push_mono(VarId(0), -2);
        t.push_linear_denom(Atom::var(VarId(0)), Atom::constant(a)).unwrap();
        let mut e = RationalExpr::new();
        e.push(t);
        let (v, _) = iterated_residue_integral(e, &circle(&[(0, (1, 1))]), &int(1)).unwrap();
        assert_eq!(v, rat(-1, 4));
    }

    #[test]
    fn origin_and_pole_residues_sum() {
        // f = 1/(z (z − a)), |a| < 1: residues at 0 and a cancel: total 0.
        // With a outside: only the origin: −1/a.
        for (a, expect) in [(rat(1, 3), int(0)), (rat(4, 1), rat(-1, 4))] {
            let mut t = RTerm::new(int(1));
            t.push_mono(VarId(0), -1);
            t.push_linear_denom(Atom::var(VarId(0)), Atom::constant(a)).unwrap();
            let mut e = RationalExpr::new();
            e.push(t);
            let (v, _) = iterated_residue_integral(e, &circle(&[(0, (1, 1))]), &int(1)).unwrap();
            assert_eq!(v, expect);
        }
    }

    #[test]
    fn higher_order_pole_is_rejected() {
        let mut t = RTerm::new(int(1));
        t.push_linear_denom(Atom::var(VarId(0)), Atom::constant(rat(1, 2))).unwrap();
        t.push_linear_denom(Atom::var(VarId(0)), Atom::constant(rat(1, 2))).unwrap();
        let mut e = RationalExpr::new();
        e.push(t);
        let r = iterated_residue_integral(e, &circle(&[(0, (1, 1))]), &int(1));
        assert!(matches!(r, Err(Error::HigherOrderPole(_))));
    }

    #[test]
    fn exact_cancellation_restores_simplicity() {
        // (z − b)/( (z − b)(z − a) ): the matching numerator cancels
        let a = rat(1, 2);
        let b = rat(1, 3);
        let mut t = RTerm::new(int(1));
        t.push_linear_numer(Atom::var(VarId(0)), Atom::constant(b.clone()));
        t.push_linear_denom(Atom::var(VarId(0)), Atom::constant(b)).unwrap();
        t.push_linear_denom(Atom::var(VarId(0)), Atom::constant(a)).unwrap();
        let mut e = RationalExpr::new();
        e.push(t);
        let (v, _) = iterated_residue_integral(e, &circle(&[(0, (1, 1))]), &int(1)).unwrap();
        assert_eq!(v, int(1));
    }

    #[test]
    fn cluster_contour_encloses_only_anchors() {
        // 1/((z − a)(z − c)): anchors {a}: only the a-residue: 1/(a − c)
        let a = rat(1, 2);
        let c = rat(1, 3);
        let mut t = RTerm::new(int(1));
        t.push_linear_denom(Atom::var(VarId(0)), Atom::constant(a.clone())).unwrap();
        t.push_linear_denom(Atom::var(VarId(0)), Atom::constant(c.clone())).unwrap();
        let mut e = RationalExpr::new();
        e.push(t);
        let scheme = ContourScheme {
            contours: [(
                VarId(0),
                VarContour::Cluster {
                    anchors: alloc::vec![a.clone()],
                    eps_rank: 0,
                },
            )]
            .into_iter()
            .collect(),
            order: alloc::vec![VarId(0)],
        };
        let (v, _) = iterated_residue_integral(e, &scheme, &int(1)).unwrap();
        assert_eq!(v, (a - c).recip());
    }

    #[test]
    fn laurent_series_factor_residue() {
        // ∮ dz/(2πi) (Σ_e c_e z^e) / z = c_0
        let mut s = Laurent::constant(int(5));
        s.add_term(1, int(7));
        s.add_term(-1, int(9));
        let mut t = RTerm::new(int(1));
        t.push_series(VarId(0), s);
        t.push_mono(VarId(0), -1);
        let mut e = RationalExpr::new();
        e.push(t);
        let (v, _) = iterated_residue_integral(e, &circle(&[(0, (1, 1))]), &int(1)).unwrap();
        assert_eq!(v, int(5));
    }

    #[test]
    fn substitution_chains_through_series() {
        // series in z evaluated at z = t·w merges into a w-series:
        // ∮∮ (z²)·1/((z − t w)(w − a)) with t=1/2, a=1/4 inside
        let tq = rat(1, 2);
        let a = rat(1, 4);
        let z = VarId(0);
        let w = VarId(1);
        let mut s = Laurent::constant(int(0));
        s.add_term(2, int(1));
        let mut t = RTerm::new(int(1));
        t.push_series(z, s);
        t.push_linear_denom(Atom::var(z), Atom::scaled_var(tq.clone(), w)).unwrap();
        t.push_linear_denom(Atom::var(w), Atom::constant(a.clone())).unwrap();
        let mut e = RationalExpr::new();
        e.push(t);
        let scheme = ContourScheme {
            contours: [
                (z, VarContour::Circle { radius: int(1) }),
                (w, VarContour::Circle { radius: rat(9, 10) }),
            ]
            .into_iter()
            .collect(),
            order: alloc::vec![z, w],
        };
        // z-residue at t·w: (t w)², then w-residue at a: (t a)²
        let (v, _) = iterated_residue_integral(e, &scheme, &int(1)).unwrap();
        assert_eq!(v, powi(&(tq * a), 2));
    }
}
