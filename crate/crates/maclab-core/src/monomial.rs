//! Transition matrices between the monomial basis {m_λ} and the power-sum
//! basis {p_λ}, one table per degree.
//!
//! The p → m expansion uses the combinatorial product rule for p_r · m_μ;
//! the inverse matrix is computed by exact Gaussian elimination. Degrees
//! stay small (≤ 16 in practice), so the dense matrices are cheap.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partition::{partitions_of, Partition};
use crate::scalar::{int, Scalar};

/// Per-degree m ↔ p transition data.
#[derive(Clone, Debug)]
pub struct MonomialTable {
    pub degree: u32,
    /// Partitions of `degree` in descending reverse-lex order.
    pub parts: Vec<Partition>,
    pub index: BTreeMap<Partition, usize>,
    /// `p_{parts[i]} = Σ_j p2m[i][j] · m_{parts[j]}`.
    pub p2m: Vec<Vec<Scalar>>,
    /// `m_{parts[i]} = Σ_j m2p[i][j] · p_{parts[j]}`; inverse of `p2m`.
    pub m2p: Vec<Vec<Scalar>>,
}

/// Multiply an m-basis vector by the power sum p_r.
///
/// Coefficient of m_ν in p_r · m_μ: the number of positions i of the
/// sorted exponent vector ν with ν_i ≥ r whose decrement by r re-sorts
/// to μ.
fn mul_power_sum_m_basis(
    vec_m: &BTreeMap<Partition, Scalar>,
    r: u32,
) -> BTreeMap<Partition, Scalar> {
    let mut out: BTreeMap<Partition, Scalar> = BTreeMap::new();
    for (mu, c) in vec_m {
        // candidate ν: add r to one part value of μ (each distinct value
        // once) or append a new part equal to r
        let mut values: Vec<u32> = mu.parts().to_vec();
        values.dedup();
        values.push(0);
        for &u in &values {
            let mut parts: Vec<u32> = mu.parts().to_vec();
            if u == 0 {
                parts.push(r);
            } else {
                let pos = parts.iter().position(|&p| p == u).unwrap();
                parts[pos] = u + r;
            }
            let nu = Partition::from_unsorted(&parts);
            let count = backward_count(&nu, mu, r);
            if count > 0 {
                let entry = out.entry(nu).or_insert_with(Scalar::zero);
                *entry += c * int(count as i64);
                if entry.is_zero() {
                    // keep the map clean of explicit zeros
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// #{ i : ν_i ≥ r and sort(ν − r·e_i) = μ }.
fn backward_count(nu: &Partition, mu: &Partition, r: u32) -> u32 {
    let mut count = 0;
    for i in 1..=nu.len() {
        if nu.part(i) < r {
            continue;
        }
        let mut parts: Vec<u32> = nu.parts().to_vec();
        parts[i - 1] -= r;
        if Partition::from_unsorted(&parts) == *mu {
            count += 1;
        }
    }
    count
}

/// Expand p_λ in the monomial basis.
pub fn power_sum_in_m_basis(lambda: &Partition) -> BTreeMap<Partition, Scalar> {
    let mut acc: BTreeMap<Partition, Scalar> = BTreeMap::new();
    acc.insert(Partition::empty(), Scalar::one());
    for &r in lambda.parts() {
        acc = mul_power_sum_m_basis(&acc, r);
    }
    acc
}

impl MonomialTable {
    pub fn build(degree: u32) -> Result<Self> {
        let parts = partitions_of(degree);
        let n = parts.len();
        let index: BTreeMap<Partition, usize> = parts
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let mut p2m = vec![vec![Scalar::zero(); n]; n];
        for (i, lam) in parts.iter().enumerate() {
            for (nu, c) in power_sum_in_m_basis(lam) {
                let j = index[&nu];
                p2m[i][j] = c;
            }
        }
        let m2p = invert(&p2m)?;
        Ok(MonomialTable {
            degree,
            parts,
            index,
            p2m,
            m2p,
        })
    }

    /// m-basis coefficients of a degree-homogeneous p-basis vector.
    pub fn p_coeffs_to_m(&self, c_p: &[Scalar]) -> Vec<Scalar> {
        let n = self.parts.len();
        let mut out = vec![Scalar::zero(); n];
        for (i, c) in c_p.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate() {
                if !self.p2m[i][j].is_zero() {
                    *slot += c * &self.p2m[i][j];
                }
            }
        }
        out
    }

    /// p-basis coefficients of a degree-homogeneous m-basis vector.
    pub fn m_coeffs_to_p(&self, c_m: &[Scalar]) -> Vec<Scalar> {
        let n = self.parts.len();
        let mut out = vec![Scalar::zero(); n];
        for (i, c) in c_m.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate() {
                if !self.m2p[i][j].is_zero() {
                    *slot += c * &self.m2p[i][j];
                }
            }
        }
        out
    }
}

/// Exact inverse via Gauss–Jordan elimination.
fn invert(mat: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let n = mat.len();
    let mut a: Vec<Vec<Scalar>> = mat.to_vec();
    let mut inv: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            let mut row = vec![Scalar::zero(); n];
            row[i] = Scalar::one();
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::DegenerateParams(alloc::format!("singular matrix at column {col}")))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let pv = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &pv;
        }
        for x in inv[col].iter_mut() {
            *x /= &pv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
                let sub = &f * &inv[col][c];
                inv[r][c] -= sub;
            }
        }
    }
    Ok(inv)
}
