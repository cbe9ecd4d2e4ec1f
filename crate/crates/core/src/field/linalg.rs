//! Dense matrices over a prime field.

use crate::arith::inv_mod;

/// A row-major matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row.iter().map(|x| x % p));
        }
        FpMatrix {
            p,
            rows: r,
            cols: c,
            data,
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(p: u64, cols: &[Vec<u64>]) -> Self {
        Self::from_rows(p, cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = (out.data[idx] + a * other.get(l, j)) % self.p;
                }
            }
        }
        out
    }

    /// Column vector product `M v`.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (a, b)| (acc + a * b) % self.p)
            })
            .collect()
    }

    /// Row vector product `v M`.
    pub fn apply_left(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0u64; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = (*o + vi * self.get(i, j)) % self.p;
            }
        }
        out
    }

    /// Reduced row echelon form in place; returns the pivot columns and the
    /// determinant multiplier accumulated by the row operations.
    fn rref(&mut self) -> (Vec<usize>, u64) {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut det_scale = 1u64;
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..self.cols {
                    self.data.swap(piv * self.cols + j, r * self.cols + j);
                }
                det_scale = (p - det_scale) % p;
            }
            let lead = self.get(r, c);
            det_scale = det_scale * lead % p;
            let inv = inv_mod(lead, p).expect("nonzero pivot is invertible");
            for j in 0..self.cols {
                let idx = r * self.cols + j;
                self.data[idx] = self.data[idx] * inv % p;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in 0..self.cols {
                    let sub = f * self.get(r, j) % p;
                    let idx = i * self.cols + j;
                    self.data[idx] = (self.data[idx] + p - sub) % p;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (pivots, det_scale)
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().0.len()
    }

    pub fn det(&self) -> u64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let (pivots, scale) = m.rref();
        if pivots.len() < self.rows {
            0
        } else {
            scale
        }
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.get(i, j);
            }
            aug.data[i * 2 * n + n + i] = 1 % self.p;
        }
        let (pivots, _) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Self::zeros(self.p, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.data[i * n + j] = aug.get(i, n + j);
            }
        }
        Some(inv)
    }

    /// Some solution `x` of `M x = b`, if one exists.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.data[i * (self.cols + 1) + j] = self.get(i, j);
            }
            aug.data[i * (self.cols + 1) + self.cols] = b[i] % self.p;
        }
        let (pivots, _) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u64; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Some(x)
    }

    /// A basis of the right kernel `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let (pivots, _) = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; self.cols];
                v[f] = 1;
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = (self.p - m.get(r, f)) % self.p;
                }
                v
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_det(m: &FpMatrix) -> u64 {
        // Leibniz expansion over all permutations
        let n = m.rows();
        let p = m.modulus();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = 0u64;
        fn heap(k: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k == 1 {
                out.push(perm.clone());
                return;
            }
            for i in 0..k {
                heap(k - 1, perm, out);
                if k.is_multiple_of(2) {
                    perm.swap(i, k - 1);
                } else {
                    perm.swap(0, k - 1);
                }
            }
        }
        let mut all = Vec::new();
        heap(n, &mut perm, &mut all);
        for s in all {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| s[i] > s[j]).count();
            let prod = (0..n).fold(1u64, |acc, i| acc * m.get(i, s[i]) % p);
            total = if inversions % 2 == 0 { (total + prod) % p } else { (total + p - prod) % p };
        }
        total
    }

    proptest! {
        #[test]
        fn det_matches_leibniz(entries in proptest::collection::vec(0u64..7, 16)) {
            let rows: Vec<Vec<u64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let m = FpMatrix::from_rows(7, &rows);
            prop_assert_eq!(m.det(), brute_det(&m));
            match m.inverse() {
                Some(inv) => prop_assert_eq!(m.mul(&inv), FpMatrix::identity(7, 4)),
                None => prop_assert_eq!(m.det(), 0),
            }
        }

        #[test]
        fn nullspace_is_kernel(entries in proptest::collection::vec(0u64..5, 12)) {
            let rows: Vec<Vec<u64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let m = FpMatrix::from_rows(5, &rows);
            let ns = m.nullspace();
            prop_assert_eq!(ns.len() + m.rank(), 4);
            for v in ns {
                prop_assert!(m.apply(&v).iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = FpMatrix::from_rows(5, &[vec![1, 2], vec![2, 4]]);
        let x = m.solve(&[3, 1]).unwrap();
        assert_eq!(m.apply(&x), vec![3, 1]);
        assert!(m.solve(&[1, 1]).is_none());
    }
}
