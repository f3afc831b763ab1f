use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::Dist;

/// Sparse table answering range minima over a fixed slice in O(1).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMin {
    len: usize,
    levels: Vec<Vec<Dist>>,
}

impl SparseMin {
    pub fn new(values: &[Dist]) -> Self {
        let mut levels = Vec::new();
        if !values.is_empty() {
            levels.push(values.to_vec());
        }
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev: &Vec<Dist> = levels.last().unwrap();
            let next = (0..=values.len() - 2 * width)
                .map(|i| prev[i].min(prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        SparseMin {
            len: values.len(),
            levels,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Minimum over `lo..hi`; infinity for an empty range.
    pub fn min(&self, lo: usize, hi: usize) -> Dist {
        if lo >= hi {
            return Dist::INF;
        }
        let k = (hi - lo).ilog2() as usize;
        let row = &self.levels[k];
        row[lo].min(row[hi - (1 << k)])
    }

    /// Stored cells, for size accounting.
    pub fn cells(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn matches_linear_scan(v in proptest::collection::vec(0u32..50, 0..40), a in 0usize..41, b in 0usize..41) {
            let vals: Vec<Dist> = v.iter().map(|&x| if x == 0 { Dist::INF } else { Dist::new(x) }).collect();
            let t = SparseMin::new(&vals);
            let (lo, hi) = (a.min(b).min(vals.len()), a.max(b).min(vals.len()));
            let expect = vals[lo..hi].iter().copied().min().unwrap_or(Dist::INF);
            prop_assert_eq!(t.min(lo, hi), expect);
        }
    }
}
