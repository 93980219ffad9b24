//! Dense GF(2) linear algebra on 64-bit words.
//!
//! Vectors are bit sets backed by `Vec<u64>`; matrices are row-major lists of
//! such vectors.  This is shared by the independent rank oracle
//! ([`crate::rank`]) and by the exact persistence-module algebra
//! ([`crate::algebra`]).  The persistence reduction itself
//! ([`crate::reduce`]) deliberately uses a different sparse representation so
//! that the two paths stay independent.

/// A fixed-length bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    /// All-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0u64; len.div_ceil(64)],
            len,
        }
    }

    /// Vector with exactly the given bits set.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in indices {
            v.set(i, true);
        }
        v
    }

    /// Standard basis vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        Self::from_indices(len, &[i])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// In-place XOR with another vector of the same length.
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the highest set bit, if any.
    pub fn highest_set(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    /// Indices of all set bits, ascending.
    pub fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * 64 + b);
                w &= w - 1;
            }
        }
        out
    }

    /// Parity of the intersection with `other` (the GF(2) inner product).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let mut acc = 0u64;
        for (w, o) in self.words.iter().zip(&other.words) {
            acc ^= w & o;
        }
        acc.count_ones() % 2 == 1
    }
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVec[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

/// A row-major GF(2) matrix acting on column vectors (`y = M x`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMat {
    rows: Vec<BitVec>,
    cols: usize,
}

impl BitMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMat {
            rows: vec![BitVec::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMat::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    /// Build from nested 0/1 entries, `entries[r][c]`.
    pub fn from_entries(rows: usize, cols: usize, entries: &[Vec<u8>]) -> Self {
        assert_eq!(entries.len(), rows);
        let mut m = BitMat::zeros(rows, cols);
        for (r, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &e) in row.iter().enumerate() {
                m.rows[r].set(c, e % 2 == 1);
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    /// Column `c` as a vector of length `n_rows`.
    pub fn col(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                v.set(r, true);
            }
        }
        v
    }

    /// Matrix-vector product `M x`.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "dimension mismatch in mul_vec");
        let mut y = BitVec::zeros(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            if row.dot(x) {
                y.set(r, true);
            }
        }
        y
    }

    /// Matrix product `self * other`.
    pub fn mul_mat(&self, other: &BitMat) -> BitMat {
        assert_eq!(self.cols, other.n_rows(), "dimension mismatch in mul_mat");
        let mut out = BitMat::zeros(self.n_rows(), other.n_cols());
        // Row r of the product is the XOR of rows of `other` selected by row r
        // of `self`.
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc = BitVec::zeros(other.n_cols());
            for c in row.ones() {
                acc.xor_assign(other.row(c));
            }
            out.rows[r] = acc;
        }
        out
    }

    /// Rank over GF(2) (non-destructive).
    pub fn rank(&self) -> usize {
        let mut rows: Vec<BitVec> = self.rows.clone();
        rank_of_rows(&mut rows)
    }

    /// Basis of the kernel `{x : M x = 0}`.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let (_, kernel) = self.column_echelon();
        kernel
    }

    /// Solve `M x = b`; returns any solution if one exists.
    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        assert_eq!(b.len(), self.rows.len(), "dimension mismatch in solve");
        let (pivots, _) = self.column_echelon();
        let mut residue = b.clone();
        let mut x = BitVec::zeros(self.cols);
        loop {
            let Some(p) = residue.highest_set() else {
                return Some(x);
            };
            let (col, tracker) = pivots.iter().find(|(c, _)| c.highest_set() == Some(p))?;
            residue.xor_assign(col);
            x.xor_assign(tracker);
        }
    }

    /// Does the column span of `M` contain `b`?
    pub fn col_space_contains(&self, b: &BitVec) -> bool {
        self.solve(b).is_some()
    }

    /// Inverse of a square invertible matrix (Gauss–Jordan), if it exists.
    pub fn inverse(&self) -> Option<BitMat> {
        let n = self.n_rows();
        if n != self.cols {
            return None;
        }
        let mut work = self.rows.clone();
        let mut inv = BitMat::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| work[r].get(col))?;
            work.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && work[r].get(col) {
                    let (w, i) = (work[col].clone(), inv[col].clone());
                    work[r].xor_assign(&w);
                    inv[r].xor_assign(&i);
                }
            }
        }
        Some(BitMat { rows: inv, cols: n })
    }

    /// Kronecker product: `(A ⊗ B)` maps `x ⊗ y` to `(A x) ⊗ (B y)` with the
    /// tensor basis ordered as `index_a * dim_b + index_b`.
    pub fn kron(&self, other: &BitMat) -> BitMat {
        let mut out = BitMat::zeros(
            self.n_rows() * other.n_rows(),
            self.cols * other.n_cols(),
        );
        for ra in 0..self.n_rows() {
            for rb in 0..other.n_rows() {
                let target = &mut out.rows[ra * other.n_rows() + rb];
                for ca in self.rows[ra].ones() {
                    for cb in other.rows[rb].ones() {
                        target.set(ca * other.n_cols() + cb, true);
                    }
                }
            }
        }
        out
    }

    /// Column elimination with an identity tracker.  Returns the list of
    /// nonzero reduced columns paired with the combination of original
    /// columns producing them, plus a kernel basis from the zeroed columns.
    fn column_echelon(&self) -> (Vec<(BitVec, BitVec)>, Vec<BitVec>) {
        let mut pivots: Vec<(BitVec, BitVec)> = Vec::new();
        let mut kernel = Vec::new();
        for c in 0..self.cols {
            let mut col = self.col(c);
            let mut tracker = BitVec::unit(self.cols, c);
            while let Some(p) = col.highest_set() {
                if let Some((pc, pt)) = pivots.iter().find(|(pc, _)| pc.highest_set() == Some(p)) {
                    col.xor_assign(pc);
                    tracker.xor_assign(pt);
                } else {
                    break;
                }
            }
            if col.is_zero() {
                kernel.push(tracker);
            } else {
                pivots.push((col, tracker));
            }
        }
        (pivots, kernel)
    }
}

/// Rank of a set of rows; consumes the buffer by reducing it in place.
pub fn rank_of_rows(rows: &mut [BitVec]) -> usize {
    let mut rank = 0;
    let mut pivot_rows: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut current = rows[i].clone();
        for &p in &pivot_rows {
            if let Some(h) = rows[p].highest_set() {
                if current.get(h) {
                    let other = rows[p].clone();
                    current.xor_assign(&other);
                }
            }
        }
        if !current.is_zero() {
            rows[i] = current;
            pivot_rows.push(i);
            rank += 1;
        } else {
            rows[i] = current;
        }
    }
    rank
}

/// Dimension of the span of the union of two row families.
pub fn dim_of_sum(a: &[BitVec], b: &[BitVec]) -> usize {
    let mut rows: Vec<BitVec> = a.to_vec();
    rows.extend(b.iter().cloned());
    rank_of_rows(&mut rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitvec_basics() {
        let mut v = BitVec::zeros(130);
        assert!(v.is_zero());
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.ones(), vec![0, 64, 129]);
        assert_eq!(v.highest_set(), Some(129));
        let w = BitVec::from_indices(130, &[64, 129, 7]);
        let mut x = v.clone();
        x.xor_assign(&w);
        assert_eq!(x.ones(), vec![0, 7]);
    }

    #[test]
    fn dot_parity() {
        let a = BitVec::from_indices(10, &[1, 3, 5]);
        let b = BitVec::from_indices(10, &[3, 5, 7]);
        assert!(!a.dot(&b)); // overlap {3,5}, even
        let c = BitVec::from_indices(10, &[3, 7]);
        assert!(a.dot(&c)); // overlap {3}, odd
    }

    #[test]
    fn rank_and_kernel() {
        // rows: [1 1 0; 0 1 1; 1 0 1] -> rank 2, kernel spanned by (1,1,1)
        let m = BitMat::from_entries(
            3,
            3,
            &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]],
        );
        assert_eq!(m.rank(), 2);
        let kernel = m.kernel_basis();
        assert_eq!(kernel.len(), 1);
        assert_eq!(kernel[0].ones(), vec![0, 1, 2]);
        for k in &kernel {
            assert!(m.mul_vec(k).is_zero());
        }
    }

    #[test]
    fn solve_membership() {
        let m = BitMat::from_entries(
            3,
            2,
            &[vec![1, 0], vec![1, 1], vec![0, 1]],
        );
        let b = BitVec::from_indices(3, &[0, 2]); // col0 + col1
        let x = m.solve(&b).expect("solvable");
        assert_eq!(m.mul_vec(&x), b);
        let bad = BitVec::from_indices(3, &[0]);
        assert!(m.solve(&bad).is_none());
        assert!(!m.col_space_contains(&bad));
    }

    #[test]
    fn mul_identity_and_compose() {
        let m = BitMat::from_entries(2, 3, &[vec![1, 0, 1], vec![0, 1, 1]]);
        let id3 = BitMat::identity(3);
        assert_eq!(m.mul_mat(&id3), m);
        let id2 = BitMat::identity(2);
        assert_eq!(id2.mul_mat(&m), m);
        let v = BitVec::from_indices(3, &[0, 2]);
        assert_eq!(m.mul_vec(&v).ones(), vec![1]); // (1+1, 0+1) = (0,1)
    }

    #[test]
    fn dim_of_sum_counts_union_span() {
        let a = vec![BitVec::from_indices(4, &[0]), BitVec::from_indices(4, &[1])];
        let b = vec![BitVec::from_indices(4, &[0, 1]), BitVec::from_indices(4, &[2])];
        assert_eq!(dim_of_sum(&a, &b), 3);
    }

    #[test]
    fn inverse_round_trips() {
        let m = BitMat::from_entries(
            3,
            3,
            &[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]],
        );
        let inv = m.inverse().expect("invertible");
        assert_eq!(m.mul_mat(&inv), BitMat::identity(3));
        assert_eq!(inv.mul_mat(&m), BitMat::identity(3));
        let singular =
            BitMat::from_entries(2, 2, &[vec![1, 1], vec![1, 1]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn kron_acts_on_tensor_basis() {
        let a = BitMat::from_entries(2, 2, &[vec![1, 1], vec![0, 1]]);
        let b = BitMat::from_entries(2, 2, &[vec![0, 1], vec![1, 0]]);
        let k = a.kron(&b);
        assert_eq!(k.n_rows(), 4);
        // (A ⊗ B)(e_i ⊗ e_j) must equal (A e_i) ⊗ (B e_j)
        for i in 0..2 {
            for j in 0..2 {
                let x = BitVec::unit(4, i * 2 + j);
                let ai = a.col(i);
                let bj = b.col(j);
                let mut expect = BitVec::zeros(4);
                for r in 0..2 {
                    for s in 0..2 {
                        if ai.get(r) && bj.get(s) {
                            expect.set(r * 2 + s, true);
                        }
                    }
                }
                assert_eq!(k.mul_vec(&x), expect, "basis ({i},{j})");
            }
        }
    }
}
