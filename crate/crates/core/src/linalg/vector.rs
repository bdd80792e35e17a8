//! Dense coefficient vectors.

use std::ops::{Index, IndexMut};

/// A contiguous real vector used for DOF coefficients and right-hand sides.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseVector {
    data: Vec<f64>,
}

impl DenseVector {
    pub fn zeros(n: usize) -> Self {
        DenseVector { data: vec![0.0; n] }
    }

    pub fn from_vec(data: Vec<f64>) -> Self {
        DenseVector { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &DenseVector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// self += alpha * x
    pub fn axpy(&mut self, alpha: f64, x: &DenseVector) {
        debug_assert_eq!(self.len(), x.len());
        for (s, v) in self.data.iter_mut().zip(&x.data) {
            *s += alpha * v;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.data {
            *v *= alpha;
        }
    }

    pub fn sub(&self, other: &DenseVector) -> DenseVector {
        debug_assert_eq!(self.len(), other.len());
        DenseVector::from_vec(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn add(&self, other: &DenseVector) -> DenseVector {
        debug_assert_eq!(self.len(), other.len());
        DenseVector::from_vec(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Concatenates block vectors into one.
    pub fn concat(blocks: &[&DenseVector]) -> DenseVector {
        let mut data = Vec::with_capacity(blocks.iter().map(|b| b.len()).sum());
        for b in blocks {
            data.extend_from_slice(b.as_slice());
        }
        DenseVector { data }
    }

    /// Splits into consecutive blocks of the given lengths.
    pub fn split(&self, lens: &[usize]) -> Vec<DenseVector> {
        debug_assert_eq!(lens.iter().sum::<usize>(), self.len());
        let mut out = Vec::with_capacity(lens.len());
        let mut start = 0;
        for &l in lens {
            out.push(DenseVector::from_vec(self.data[start..start + l].to_vec()));
            start += l;
        }
        out
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(data: Vec<f64>) -> Self {
        DenseVector { data }
    }
}

impl FromIterator<f64> for DenseVector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        DenseVector {
            data: iter.into_iter().collect(),
        }
    }
}
