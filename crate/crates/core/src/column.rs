use std::fmt;

use serde::{Deserialize, Serialize};

/// A master column with unit cost: a cutting pattern or an independent set.
///
/// Coefficients are stored sparse as `(row, value)` with strictly increasing
/// rows and nonzero values, so derived equality is equality of columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Column {
    coeffs: Vec<(usize, u32)>,
}

impl Column {
    /// Builds a column from arbitrary `(row, value)` pairs. Zero entries are
    /// dropped and repeated rows are summed.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut coeffs: Vec<(usize, u32)> = entries.into_iter().filter(|&(_, v)| v > 0).collect();
        coeffs.sort_unstable_by_key(|&(r, _)| r);
        coeffs.dedup_by(|next, prev| {
            if next.0 == prev.0 {
                prev.1 += next.1;
                true
            } else {
                false
            }
        });
        Column { coeffs }
    }

    pub fn from_dense(dense: &[u32]) -> Self {
        Column {
            coeffs: dense
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 0)
                .map(|(i, &v)| (i, v))
                .collect(),
        }
    }

    /// Indicator column of a node set.
    pub fn from_support(nodes: impl IntoIterator<Item = usize>) -> Self {
        Self::from_entries(nodes.into_iter().map(|i| (i, 1)))
    }

    pub fn coeffs(&self) -> &[(usize, u32)] {
        &self.coeffs
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.iter().map(|&(r, _)| r)
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, row: usize) -> u32 {
        self.coeffs
            .binary_search_by_key(&row, |&(r, _)| r)
            .map(|i| self.coeffs[i].1)
            .unwrap_or(0)
    }

    pub fn to_dense(&self, rows: usize) -> Vec<u32> {
        let mut out = vec![0; rows];
        for &(r, v) in &self.coeffs {
            out[r] = v;
        }
        out
    }

    /// `Σ_i w_i a_i`, summed in row order.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(r, v)| f64::from(v) * weights[r]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|&(_, v)| f64::from(v) * f64::from(v))
            .sum::<f64>()
            .sqrt()
    }

    /// True if the supports share no row.
    pub fn is_disjoint(&self, other: &Column) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.coeffs.len() && j < other.coeffs.len() {
            match self.coeffs[i].0.cmp(&other.coeffs[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    fn inner(&self, other: &Column) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.coeffs.len() && j < other.coeffs.len() {
            match self.coeffs[i].0.cmp(&other.coeffs[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += f64::from(self.coeffs[i].1) * f64::from(other.coeffs[j].1);
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    fn support_intersection(&self, other: &Column) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.coeffs.len() && j < other.coeffs.len() {
            match self.coeffs[i].0.cmp(&other.coeffs[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

/// `1 - <u, v> / (|u| |v|)`. Zero columns are at distance 1 from everything
/// except themselves.
pub fn cosine_distance(a: &Column, b: &Column) -> f64 {
    if a == b {
        return 0.0;
    }
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return 1.0;
    }
    (1.0 - a.inner(b) / denom).clamp(0.0, 1.0)
}

/// Jaccard distance between supports.
pub fn jaccard_distance(a: &Column, b: &Column) -> f64 {
    let inter = a.support_intersection(b);
    let union = a.nnz() + b.nnz() - inter;
    if union == 0 {
        0.0
    } else {
        1.0 - inter as f64 / union as f64
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, &(r, v)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}:{v}")?;
        }
        f.write_str("}")
    }
}
