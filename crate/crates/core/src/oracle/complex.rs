use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::lattice::{rational_rank, IntMatrix};

/// Simplicial complex on a subset of the rays of a fan: a set of active rays
/// is a face iff it lies in some maximal cone.
///
/// Faces are bitmasks over ray indices (at most 64 rays).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportComplex {
    pub active: u64,
    /// Maximal cones restricted to the active rays (not necessarily maximal faces).
    pub facets: Vec<u64>,
}

impl SupportComplex {
    pub fn new(active: u64, cones: &[u64]) -> Self {
        let mut facets: Vec<u64> = cones.iter().map(|c| c & active).collect();
        facets.sort_unstable();
        facets.dedup();
        Self { active, facets }
    }

    pub fn empty() -> Self {
        Self {
            active: 0,
            facets: vec![0],
        }
    }

    /// Builds a complex directly from its facets (each a list of vertex indices).
    pub fn from_facets(facets: &[&[usize]]) -> Self {
        let masks: Vec<u64> = facets
            .iter()
            .map(|f| f.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect();
        let active = masks.iter().fold(0, |a, m| a | m);
        Self::new(active, &masks)
    }

    /// All faces, the empty face included, grouped by number of vertices.
    fn faces_by_size(&self) -> Vec<Vec<u64>> {
        let mut all = BTreeSet::new();
        for &f in &self.facets {
            // every submask of f
            let mut sub = f;
            loop {
                all.insert(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & f;
            }
        }
        all.insert(0);
        let max = all
            .iter()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0);
        let mut by = vec![Vec::new(); max + 1];
        for m in all {
            by[m.count_ones() as usize].push(m);
        }
        by
    }
}

/// Ranks of reduced cohomology `H~^{-1}, ..., H~^{top_dim}` over the rationals.
pub fn reduced_cohomology_ranks(cx: &SupportComplex, top_dim: usize) -> Vec<u64> {
    let faces = cx.faces_by_size();
    // faces[j] are the (j-1)-simplices, i.e. cochains in degree j-1
    let len = top_dim + 2;
    let dim_c = |j: usize| faces.get(j).map_or(0, Vec::len);

    // rank of the coboundary from degree j-1 to degree j (faces[j] -> faces[j+1])
    let coboundary_rank = |j: usize| -> usize {
        let (Some(src), Some(dst)) = (faces.get(j), faces.get(j + 1)) else {
            return 0;
        };
        if src.is_empty() || dst.is_empty() {
            return 0;
        }
        let mut m = IntMatrix::zeros(dst.len(), src.len());
        for (r, &big) in dst.iter().enumerate() {
            let mut pos = 0;
            for v in 0..64 {
                if big & (1 << v) == 0 {
                    continue;
                }
                let small = big & !(1 << v);
                if let Ok(c) = src.binary_search(&small) {
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    m.set(r, c, BigInt::from(sign));
                }
                pos += 1;
            }
        }
        rational_rank(&m)
    };

    let ranks: Vec<usize> = (0..len).map(coboundary_rank).collect();
    (0..len)
        .map(|j| {
            let incoming = if j == 0 { 0 } else { ranks[j - 1] };
            (dim_c(j) - ranks[j] - incoming) as u64
        })
        .collect()
}
