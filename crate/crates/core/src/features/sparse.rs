use crate::error::{Error, Result};

/// A sparse real vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dimension: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn new(dimension: usize, entries: Vec<(usize, f64)>) -> Result<Self> {
        let mut prev = None;
        for &(index, value) in &entries {
            if index >= dimension {
                return Err(Error::Validation(format!(
                    "index {index} out of bounds for dimension {dimension}"
                )));
            }
            if prev.is_some_and(|p| index <= p) {
                return Err(Error::Validation("indices must be strictly increasing".into()));
            }
            if value == 0.0 || !value.is_finite() {
                return Err(Error::Validation(format!(
                    "entry {index} must be finite and non-zero"
                )));
            }
            prev = Some(index);
        }
        Ok(SparseVector { dimension, entries })
    }

    /// Builds a vector from unordered entries, summing duplicates and dropping zeros.
    pub fn from_unsorted(dimension: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        SparseVector::new(dimension, merged)
    }

    pub fn from_dense(values: &[f64]) -> Self {
        SparseVector {
            dimension: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i, *v))
                .collect(),
        }
    }

    pub fn empty(dimension: usize) -> Self {
        SparseVector {
            dimension,
            entries: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * dense[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}
