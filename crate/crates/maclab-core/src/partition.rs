//! Integer partitions: the index set 𝕐 of everything in this crate.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// A partition: weakly decreasing positive parts, stored dense with no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// The empty partition ∅.
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Build from parts; zeros are stripped, order is validated.
    pub fn new(parts: &[u32]) -> Self {
        let parts: Vec<u32> = parts.iter().copied().filter(|&p| p > 0).collect();
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]),
            "parts must be weakly decreasing"
        );
        Partition { parts }
    }

    /// Build from an unsorted bag of parts.
    pub fn from_unsorted(parts: &[u32]) -> Self {
        let mut v: Vec<u32> = parts.iter().copied().filter(|&p| p > 0).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts: v }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// λ_i with 1-based index; 0 beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        if i >= 1 && i <= self.parts.len() {
            self.parts[i - 1]
        } else {
            0
        }
    }

    /// |λ| = Σ λ_i.
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// ℓ(λ): number of (nonzero) parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// m_i(λ): number of parts equal to `i`.
    pub fn multiplicity(&self, i: u32) -> u32 {
        self.parts.iter().filter(|&&p| p == i).count() as u32
    }

    /// The conjugate partition λ′.
    pub fn conjugate(&self) -> Partition {
        if self.parts.is_empty() {
            return Partition::empty();
        }
        let cols = self.parts[0] as usize;
        let mut out = vec![0u32; cols];
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = self.parts.iter().filter(|&&p| p as usize > j).count() as u32;
        }
        Partition { parts: out }
    }

    /// μ ⊆ λ: containment of Young diagrams (μ_i ≤ λ_i for all i).
    pub fn contains(&self, mu: &Partition) -> bool {
        (1..=mu.len()).all(|i| mu.part(i) <= self.part(i))
    }

    /// Componentwise minimum λ ∧ μ (the largest ν contained in both).
    pub fn meet(&self, other: &Partition) -> Partition {
        let n = self.len().min(other.len());
        let parts: Vec<u32> = (1..=n).map(|i| self.part(i).min(other.part(i))).collect();
        Partition { parts }
    }

    /// Dominance order: λ ⊵ μ (requires |λ| = |μ|).
    pub fn dominates(&self, other: &Partition) -> bool {
        debug_assert_eq!(self.size(), other.size());
        let n = self.len().max(other.len());
        let mut sa = 0u32;
        let mut sb = 0u32;
        for i in 1..=n {
            sa += self.part(i);
            sb += other.part(i);
            if sa < sb {
                return false;
            }
        }
        true
    }

    /// λ/μ is a horizontal strip: μ ⊆ λ interlaced,
    /// λ₁ ≥ μ₁ ≥ λ₂ ≥ μ₂ ≥ ⋯ .
    pub fn horizontal_strip_over(&self, mu: &Partition) -> bool {
        if !self.contains(mu) {
            return false;
        }
        (1..=self.len()).all(|i| mu.part(i) >= self.part(i + 1))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "()");
        }
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of exactly `n`, in descending reverse-lexicographic
/// order ((n) first, (1,…,1) last). This linear order refines dominance.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: current.clone(),
            });
            return;
        }
        let hi = max_part.min(remaining);
        for p in (1..=hi).rev() {
            current.push(p);
            rec(remaining - p, p, current, out);
            current.pop();
        }
    }
    rec(n, n, &mut current, &mut out);
    out
}

/// All partitions with |λ| ≤ `max_size`, ordered by (size, reverse-lex).
pub fn enumerate_partitions(max_size: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    for n in 0..=max_size {
        out.extend(partitions_of(n));
    }
    out
}

/// Partitions of size ≤ `max_size` with at most `max_len` parts.
pub fn enumerate_bounded(max_size: u32, max_len: usize) -> Vec<Partition> {
    enumerate_partitions(max_size)
        .into_iter()
        .filter(|p| p.len() <= max_len)
        .collect()
}

/// Compare in the (size, reverse-lex descending) enumeration order.
pub fn enum_order(a: &Partition, b: &Partition) -> Ordering {
    a.size().cmp(&b.size()).then_with(|| {
        // reverse-lex: larger first part earlier
        for i in 1..=a.len().max(b.len()) {
            match b.part(i).cmp(&a.part(i)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    #[test]
    fn enumeration_examples() {
        let p0 = enumerate_partitions(0);
        assert_eq!(p0, vec![Partition::empty()]);

        let p2 = enumerate_partitions(2);
        assert_eq!(
            p2,
            vec![
                Partition::empty(),
                Partition::new(&[1]),
                Partition::new(&[2]),
                Partition::new(&[1, 1]),
            ]
        );

        // 1 + 1 + 2 + 3 + 5 partitions of 0..=4
        assert_eq!(enumerate_partitions(4).len(), 12);
    }

    // Independent oracle: count partitions of n by deduplicating the
    // sorted forms of all compositions of n.
    fn partition_count_by_compositions(n: u32) -> usize {
        fn comps(n: u32) -> Vec<Vec<u32>> {
            if n == 0 {
                return vec![Vec::new()];
            }
            let mut out = Vec::new();
            for first in 1..=n {
                for mut rest in comps(n - first) {
                    rest.insert(0, first);
                    out.push(rest);
                }
            }
            out
        }
        let set: BTreeSet<Vec<u32>> = comps(n)
            .into_iter()
            .map(|mut c| {
                c.sort_unstable_by(|a, b| b.cmp(a));
                c
            })
            .collect();
        set.len()
    }

    #[test]
    fn enumeration_matches_composition_oracle() {
        let mut total = 0;
        for n in 0..=10 {
            total += partition_count_by_compositions(n);
            assert_eq!(enumerate_partitions(n).len(), total, "n = {n}");
        }
    }

    #[test]
    fn enumeration_has_no_duplicates_and_is_ordered() {
        let all = enumerate_partitions(8);
        let set: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for w in all.windows(2) {
            assert_eq!(enum_order(&w[0], &w[1]), Ordering::Less);
        }
    }

    #[test]
    fn conjugate_involution() {
        for lam in enumerate_partitions(9) {
            assert_eq!(lam.conjugate().conjugate(), lam);
            assert_eq!(lam.conjugate().size(), lam.size());
        }
    }

    #[test]
    fn conjugate_example() {
        assert_eq!(
            Partition::new(&[4, 2, 1]).conjugate(),
            Partition::new(&[3, 2, 1, 1])
        );
    }

    #[test]
    fn containment_and_strips() {
        let lam = Partition::new(&[3, 2]);
        assert!(lam.contains(&Partition::new(&[2, 1])));
        assert!(!Partition::new(&[1]).contains(&Partition::new(&[2])));
        assert!(lam.horizontal_strip_over(&Partition::new(&[2, 1])));
        assert!(lam.horizontal_strip_over(&Partition::new(&[2])));
        // λ₂ = 2 > μ₁ = 1 violates interlacing
        assert!(!lam.horizontal_strip_over(&Partition::new(&[1, 1])));
    }

    #[test]
    fn dominance_on_degree_four() {
        let a = Partition::new(&[2, 2]);
        let b = Partition::new(&[2, 1, 1]);
        let c = Partition::new(&[3, 1]);
        assert!(c.dominates(&a) && a.dominates(&b));
        assert!(!b.dominates(&a));
    }

    #[test]
    fn dominance_refined_by_enum_order() {
        for n in 0..=8u32 {
            let ps = partitions_of(n);
            for (i, a) in ps.iter().enumerate() {
                for b in ps.iter().skip(i + 1) {
                    // a precedes b in reverse-lex, so b must not dominate a
                    assert!(
                        !(b.dominates(a) && a != b),
                        "order violates dominance: {a} vs {b}"
                    );
                }
            }
        }
    }
}
