//! Dense exact linear algebra over F_p: row reduction, null spaces, and span
//! membership. Matrices are small (hundreds of rows at most), so plain
//! Gaussian elimination is enough.

use crate::field::PrimeField;

#[derive(Debug, Clone)]
pub struct Matrix {
    pub field: PrimeField,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>, // row-major
}

impl Matrix {
    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(field: PrimeField, rows: Vec<Vec<u64>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row.into_iter().map(|x| field.reduce(x)));
        }
        Matrix {
            field,
            rows: r,
            cols: c,
            data,
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = self.field.reduce(v);
    }

    /// In-place reduced row echelon form; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    self.data.swap(row * self.cols + c, pr * self.cols + c);
                }
            }
            let inv = f.inv(self.get(row, col)).unwrap();
            for c in col..self.cols {
                let v = f.mul(self.get(row, c), inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && self.get(r, col) != 0 {
                    let factor = self.get(r, col);
                    for c in col..self.cols {
                        let v = f.sub(self.get(r, c), f.mul(factor, self.get(row, c)));
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Basis of the right null space `{v : M v = 0}`, one vector per non-pivot
    /// column, in column order.
    pub fn null_space(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let mut m = self.clone();
        let pivots = m.rref();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.get(r, free));
            }
            basis.push(v);
        }
        basis
    }
}

/// An incrementally built echelon basis of a subspace of F_p^n, used for span
/// membership tests.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    field: PrimeField,
    n: usize,
    /// Rows in echelon form, each with its leading (first nonzero) index.
    rows: Vec<(usize, Vec<u64>)>,
}

impl SpanBasis {
    pub fn new(field: PrimeField, n: usize) -> SpanBasis {
        SpanBasis {
            field,
            n,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce_vec(&self, v: &mut [u64]) {
        let f = self.field;
        for (lead, row) in &self.rows {
            let c = v[*lead];
            if c != 0 {
                for i in *lead..self.n {
                    v[i] = f.sub(v[i], f.mul(c, row[i]));
                }
            }
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce_vec(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Insert a vector; returns false when it was already in the span.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let f = self.field;
        let mut w = v.to_vec();
        self.reduce_vec(&mut w);
        let Some(lead) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[lead]).unwrap();
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        // keep echelon sorted by leading index
        let pos = self
            .rows
            .binary_search_by_key(&lead, |(l, _)| *l)
            .unwrap_err();
        self.rows.insert(pos, (lead, w));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn null_space_simple() {
        // x + y + z = 0 over F_5 has a 2-dimensional null space
        let m = Matrix::from_rows(f(5), vec![vec![1, 1, 1]]);
        let ns = m.null_space();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let s: u64 = v.iter().sum();
            assert_eq!(s % 5, 0);
        }
    }

    #[test]
    fn rref_identity() {
        let mut m = Matrix::from_rows(f(7), vec![vec![2, 1], vec![1, 1]]);
        let piv = m.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(m.data, vec![1, 0, 0, 1]);
    }

    #[test]
    fn span_membership() {
        let mut s = SpanBasis::new(f(3), 3);
        assert!(s.insert(&[1, 2, 0]));
        assert!(s.insert(&[0, 1, 1]));
        assert!(!s.insert(&[1, 0, 1])); // (1,2,0) - 2*(0,1,1) = (1,0,-2) = (1,0,1)
        assert!(s.contains(&[2, 2, 1])); // 2*(1,2,0) + (0,1,1)
        assert!(!s.contains(&[0, 0, 1]));
    }
}
