use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

/// Occupation numbers `(n_1, …, n_N)` of a multi-mode number state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(num_modes: usize) -> Self {
        Self(vec![0; num_modes])
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn num_modes(&self) -> usize {
        self.0.len()
    }

    /// Total degree `Σ n_i`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

const NONE: usize = usize::MAX;

/// Truncated number basis of `N` bosonic modes with total-degree cutoff `Λ`.
///
/// Basis states are ordered by total degree, and within a degree block in
/// descending lexicographic order of the occupation vector, so that the
/// degree-1 block lists `e_1, e_2, …, e_N` in mode order. Each degree block
/// occupies a contiguous index range.
#[derive(Debug, Clone)]
pub struct ModeSet {
    num_modes: usize,
    cutoff: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    block_starts: Vec<usize>,
    // raise[idx * N + j]: index of n + e_j, or NONE above the cutoff.
    raise: Vec<usize>,
    // parent[idx]: (index of n - e_j, j) with j the first occupied mode.
    parent: Vec<Option<(usize, usize)>>,
}

fn push_compositions(total: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if slots == 1 {
        prefix.push(total);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        push_compositions(total - first, slots - 1, prefix, out);
        prefix.pop();
    }
}

/// Enumerates the truncated basis; the dimension is `binomial(Λ + N, N)`.
pub fn enumerate_basis(num_modes: usize, cutoff: usize) -> ModeSet {
    assert!(num_modes >= 1, "a mode set needs at least one mode");
    let mut indices = Vec::new();
    let mut block_starts = Vec::with_capacity(cutoff + 2);
    for degree in 0..=cutoff {
        block_starts.push(indices.len());
        push_compositions(degree as u32, num_modes, &mut Vec::new(), &mut indices);
    }
    block_starts.push(indices.len());

    let lookup: HashMap<MultiIndex, usize> = indices
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();

    let mut raise = vec![NONE; indices.len() * num_modes];
    let mut parent = vec![None; indices.len()];
    for (idx, m) in indices.iter().enumerate() {
        for j in 0..num_modes {
            let mut occ = m.0.clone();
            occ[j] += 1;
            if let Some(&target) = lookup.get(&MultiIndex(occ)) {
                raise[idx * num_modes + j] = target;
                if parent[target].is_none() {
                    // modes are visited in increasing j from every lower state;
                    // keep the one lowering the first occupied mode
                    let first = indices[target].0.iter().position(|&n| n > 0);
                    if first == Some(j) {
                        parent[target] = Some((idx, j));
                    }
                }
            }
        }
    }

    ModeSet {
        num_modes,
        cutoff,
        indices,
        lookup,
        block_starts,
        raise,
        parent,
    }
}

impl ModeSet {
    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn multi_index(&self, idx: usize) -> &MultiIndex {
        &self.indices[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.indices.iter()
    }

    pub fn index_of(&self, m: &MultiIndex) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    pub fn index_of_occupations(&self, occupations: &[u32]) -> Option<usize> {
        self.lookup.get(&MultiIndex(occupations.to_vec())).copied()
    }

    /// Index range of the degree-`k` block.
    pub fn block(&self, degree: usize) -> Range<usize> {
        self.block_starts[degree]..self.block_starts[degree + 1]
    }

    pub fn block_size(&self, degree: usize) -> usize {
        self.block(degree).len()
    }

    pub fn degree_of(&self, idx: usize) -> usize {
        // block_starts is sorted; partition_point finds the owning block
        self.block_starts.partition_point(|&s| s <= idx) - 1
    }

    /// Index of `n + e_mode`, if still within the cutoff.
    pub fn raised(&self, idx: usize, mode: usize) -> Option<usize> {
        let t = self.raise[idx * self.num_modes + mode];
        (t != NONE).then_some(t)
    }

    /// For a non-vacuum state, the state with one quantum removed from the
    /// first occupied mode, together with that mode.
    pub fn parent(&self, idx: usize) -> Option<(usize, usize)> {
        self.parent[idx]
    }

    pub fn same_as(&self, other: &ModeSet) -> bool {
        std::ptr::eq(self, other) || (self.num_modes == other.num_modes && self.cutoff == other.cutoff)
    }
}

/// `binomial(n, k)` in exact integer arithmetic.
pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
