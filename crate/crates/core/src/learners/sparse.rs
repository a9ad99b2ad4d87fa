use serde::{Deserialize, Serialize};

/// Sorted `(index, value)` pairs with no stored zeros.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn new(dim: usize) -> Self {
        SparseVector {
            dim,
            entries: Vec::new(),
        }
    }

    /// Entries may come in any order; repeated indices are summed.
    ///
    /// Panics if an index is `>= dim`.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut entries: Vec<(usize, f64)> = entries.into_iter().collect();
        entries.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            assert!(i < dim, "index {i} out of range for dimension {dim}");
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|&(_, v)| v != 0.0);
        SparseVector {
            dim,
            entries: merged,
        }
    }

    pub fn from_dense(values: &[f64]) -> Self {
        SparseVector {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, &v)| (i, v))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |k| self.entries[k].1)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * dense[i]).sum()
    }

    /// Appends `other` shifted to start at the current end.
    pub fn extend_with(&mut self, other: &SparseVector) {
        let offset = self.dim;
        self.entries
            .extend(other.entries.iter().map(|&(i, v)| (i + offset, v)));
        self.dim += other.dim;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_drops_zeros_and_merges() {
        let v = SparseVector::from_entries(5, [(3, 1.0), (1, 2.0), (3, 0.5), (4, 0.0)]);
        assert_eq!(v.entries(), &[(1, 2.0), (3, 1.5)]);
        assert_eq!(v.get(3), 1.5);
        assert_eq!(v.get(0), 0.0);
        assert_eq!(v.to_dense(), vec![0.0, 2.0, 0.0, 1.5, 0.0]);
        assert_eq!(SparseVector::from_dense(&v.to_dense()), v);
    }

    #[test]
    #[should_panic]
    fn out_of_range_index() {
        SparseVector::from_entries(2, [(2, 1.0)]);
    }

    #[test]
    fn concatenation() {
        let mut a = SparseVector::from_entries(3, [(0, 1.0)]);
        a.extend_with(&SparseVector::from_entries(2, [(1, 4.0)]));
        assert_eq!(a.dim(), 5);
        assert_eq!(a.entries(), &[(0, 1.0), (4, 4.0)]);
        assert_eq!(a.dot(&[1.0, 1.0, 1.0, 1.0, 0.5]), 3.0);
    }
}
