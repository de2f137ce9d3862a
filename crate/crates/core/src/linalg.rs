//! Exact dense linear algebra over cyclotomic fields: kernels, images,
//! solves, subspace lattice operations. No floating point anywhere.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalars::CycScalar;

pub type Vector = Vec<CycScalar>;

#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<CycScalar>, // row-major
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| format!("{}", self.at(r, c)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: vec![CycScalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, CycScalar::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> CycScalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        ExactMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<CycScalar>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        for row in &rows {
            assert_eq!(row.len(), c, "ragged rows");
        }
        ExactMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_cols(cols: Vec<Vector>) -> Self {
        let c = cols.len();
        let r = if c == 0 { 0 } else { cols[0].len() };
        Self::from_fn(r, c, |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &CycScalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: CycScalar) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vector {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c).conj())
    }

    pub fn conj_transpose(&self) -> Self {
        self.transpose().conj()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn scale(&self, s: &CycScalar) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c).mul_ref(s))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if !b.is_zero() {
                        let prod = a.mul_ref(b);
                        let cur = out.at(i, j).add_ref(&prod);
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[CycScalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        let mut out = vec![CycScalar::zero(); self.rows];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if !a.is_zero() && !v[k].is_zero() {
                    out[i] = out[i].add_ref(&a.mul_ref(&v[k]));
                }
            }
        }
        out
    }

    pub fn add_mat(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |r, c| {
            self.at(r, c).add_ref(rhs.at(r, c))
        })
    }

    pub fn sub_mat(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |r, c| {
            self.at(r, c).sub_ref(rhs.at(r, c))
        })
    }

    pub fn neg_mat(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c).neg_ref())
    }

    /// Kronecker product (block structure: self's entries scale copies of rhs).
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = rhs.at(k, l);
                        if !b.is_zero() {
                            out.set(i * rhs.rows + k, j * rhs.cols + l, a.mul_ref(b));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows);
        Self::from_fn(self.rows, self.cols + rhs.cols, |r, c| {
            if c < self.cols {
                self.at(r, c).clone()
            } else {
                rhs.at(r, c - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols);
        Self::from_fn(self.rows + rhs.rows, self.cols, |r, c| {
            if r < self.rows {
                self.at(r, c).clone()
            } else {
                rhs.at(r - self.rows, c).clone()
            }
        })
    }

    pub fn trace(&self) -> CycScalar {
        assert_eq!(self.rows, self.cols);
        let mut t = CycScalar::zero();
        for i in 0..self.rows {
            t = t.add_ref(self.at(i, i));
        }
        t
    }

    /// Reduced row-echelon form; returns (rref, pivot columns).
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r >= m.rows {
                break;
            }
            // exact pivoting: pick the "simplest" nonzero entry in the column
            let mut piv: Option<usize> = None;
            for i in r..m.rows {
                if !m.at(i, c).is_zero() {
                    piv = match piv {
                        None => Some(i),
                        Some(p) => {
                            if simpler(m.at(i, c), m.at(p, c)) {
                                Some(i)
                            } else {
                                Some(p)
                            }
                        }
                    };
                }
            }
            let Some(p) = piv else { continue };
            m.swap_rows(r, p);
            let inv = m.at(r, c).inv().expect("pivot invertible");
            for j in c..m.cols {
                let v = m.at(r, j).mul_ref(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.at(i, c).is_zero() {
                    let f = m.at(i, c).clone();
                    for j in c..m.cols {
                        let v = m.at(i, j).sub_ref(&f.mul_ref(m.at(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space; vectors are verified exact annihilators.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let (rr, pivots) = self.rref();
        let mut basis = Vec::new();
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![CycScalar::zero(); self.cols];
            v[free] = CycScalar::one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = rr.at(ri, free).neg_ref();
            }
            basis.push(v);
        }
        debug_assert!(basis
            .iter()
            .all(|v| self.apply(v).iter().all(|x| x.is_zero())));
        basis
    }

    /// Basis of the column space.
    pub fn image_basis(&self) -> Vec<Vector> {
        let (_, pivots) = self.rref();
        pivots.into_iter().map(|c| self.col(c)).collect()
    }

    /// One solution of self * x = b, or None if inconsistent.
    pub fn solve(&self, b: &[CycScalar]) -> Option<Vector> {
        assert_eq!(self.rows, b.len());
        let aug = self.hstack(&ExactMatrix::from_cols(vec![b.to_vec()]));
        let (rr, pivots) = aug.rref();
        // inconsistent iff a pivot lands in the last column
        if pivots.iter().any(|&p| p == self.cols) {
            return None;
        }
        let mut x = vec![CycScalar::zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = rr.at(ri, self.cols).clone();
        }
        Some(x)
    }

    /// Solve self * X = B for a matrix X, or None if any column is
    /// inconsistent.
    pub fn solve_matrix(&self, b: &ExactMatrix) -> Option<ExactMatrix> {
        assert_eq!(self.rows, b.rows());
        let mut cols = Vec::with_capacity(b.cols());
        for c in 0..b.cols() {
            cols.push(self.solve(&b.col(c))?);
        }
        if cols.is_empty() {
            return Some(ExactMatrix::zero(self.cols, 0));
        }
        Some(ExactMatrix::from_cols(cols))
    }

    /// Determinant by exact elimination.
    pub fn det(&self) -> CycScalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = CycScalar::one();
        for c in 0..n {
            let mut piv = None;
            for r in c..n {
                if !m.at(r, c).is_zero() {
                    piv = Some(r);
                    break;
                }
            }
            let Some(p) = piv else {
                return CycScalar::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.neg_ref();
            }
            let pivval = m.at(c, c).clone();
            det = det.mul_ref(&pivval);
            let inv = pivval.inv().unwrap();
            for r in c + 1..n {
                if !m.at(r, c).is_zero() {
                    let f = m.at(r, c).mul_ref(&inv);
                    for j in c..n {
                        let v = m.at(r, j).sub_ref(&f.mul_ref(m.at(c, j)));
                        m.set(r, j, v);
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = self.hstack(&ExactMatrix::identity(n));
        let (rr, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(Error::NotInvertible);
        }
        Ok(ExactMatrix::from_fn(n, n, |r, c| rr.at(r, n + c).clone()))
    }

    /// Trace of the restriction of `self` to an invariant subspace with the
    /// given basis columns. Errors if the subspace is not invariant.
    pub fn restricted_trace(&self, basis: &[Vector]) -> Result<CycScalar> {
        if basis.is_empty() {
            return Ok(CycScalar::zero());
        }
        let b = ExactMatrix::from_cols(basis.to_vec());
        let ab = self.matmul(&b);
        // solve B * C = A*B column by column
        let mut tr = CycScalar::zero();
        let aug = b.hstack(&ab);
        let (rr, pivots) = aug.rref();
        let k = basis.len();
        if pivots.len() != k || pivots.iter().any(|&p| p >= k) {
            return Err(Error::DimensionMismatch(
                "subspace basis not independent".into(),
            ));
        }
        // consistency: rows beyond rank must be zero on the right part
        for r in pivots.len()..rr.rows {
            for c in k..rr.cols {
                if !rr.at(r, c).is_zero() {
                    return Err(Error::InvariantViolation(
                        "subspace is not invariant under the operator".into(),
                    ));
                }
            }
        }
        for (ri, &pc) in pivots.iter().enumerate() {
            // coordinate of column pc in A*B column pc
            tr = tr.add_ref(rr.at(ri, k + pc));
        }
        Ok(tr)
    }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.add_mat(rhs)
    }
}
impl Sub for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.sub_mat(rhs)
    }
}
impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.matmul(rhs)
    }
}
impl Neg for &ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> ExactMatrix {
        self.neg_mat()
    }
}

fn simpler(a: &CycScalar, b: &CycScalar) -> bool {
    // prefer rational pivots, then ones
    match (a.is_rational(), b.is_rational()) {
        (true, false) => true,
        (false, true) => false,
        _ => a.is_one() && !b.is_one(),
    }
}

/// A linear subspace in canonical (reduced row-echelon) form. Equality of
/// subspaces is literal equality of canonical forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    /// rows = canonical basis vectors
    basis: ExactMatrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: ExactMatrix::zero(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: ExactMatrix::identity(ambient),
        }
    }

    pub fn from_vectors(ambient: usize, vecs: &[Vector]) -> Self {
        for v in vecs {
            assert_eq!(v.len(), ambient, "vector has wrong ambient dimension");
        }
        if vecs.is_empty() {
            return Self::zero(ambient);
        }
        let m = ExactMatrix::from_rows(vecs.to_vec());
        let (rr, pivots) = m.rref();
        let basis = ExactMatrix::from_fn(pivots.len(), ambient, |r, c| rr.at(r, c).clone());
        Subspace { ambient, basis }
    }

    pub fn from_image(m: &ExactMatrix) -> Self {
        Self::from_vectors(m.rows(), &(0..m.cols()).map(|c| m.col(c)).collect::<Vec<_>>())
    }

    pub fn from_kernel(m: &ExactMatrix) -> Self {
        Self::from_vectors(m.cols(), &m.kernel_basis())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        (0..self.basis.rows()).map(|r| self.basis.row(r)).collect()
    }

    pub fn contains(&self, v: &[CycScalar]) -> bool {
        assert_eq!(v.len(), self.ambient);
        // reduce v against the canonical rows
        let mut v = v.to_vec();
        for r in 0..self.basis.rows() {
            // pivot column of row r
            let pc = (0..self.ambient)
                .find(|&c| !self.basis.at(r, c).is_zero())
                .unwrap();
            if !v[pc].is_zero() {
                let f = v[pc].clone();
                for c in 0..self.ambient {
                    v[c] = v[c].sub_ref(&f.mul_ref(self.basis.at(r, c)));
                }
            }
        }
        v.iter().all(|x| x.is_zero())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis_vectors().iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch("subspace sum".into()));
        }
        let mut vecs = self.basis_vectors();
        vecs.extend(other.basis_vectors());
        Ok(Subspace::from_vectors(self.ambient, &vecs))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch("subspace intersection".into()));
        }
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        // x = A^T a = B^T b; kernel of [A^T | -B^T]
        let at = self.basis.transpose();
        let bt = other.basis.transpose();
        let stacked = at.hstack(&bt.neg_mat());
        let mut vecs = Vec::new();
        for k in stacked.kernel_basis() {
            let a_part = &k[..self.dim()];
            let x = at.apply(a_part);
            vecs.push(x);
        }
        Ok(Subspace::from_vectors(self.ambient, &vecs))
    }

    /// Vectors of `self` completing `sub` to a basis of `self` (requires
    /// sub to be contained in self).
    pub fn complement_of(&self, sub: &Subspace) -> Result<Vec<Vector>> {
        if !self.contains_subspace(sub) {
            return Err(Error::DimensionMismatch(
                "complement: subspace not contained".into(),
            ));
        }
        let mut acc = sub.basis_vectors();
        let mut picked = Vec::new();
        let mut cur = Subspace::from_vectors(self.ambient, &acc);
        for v in self.basis_vectors() {
            if cur.dim() == self.dim() {
                break;
            }
            if !cur.contains(&v) {
                acc.push(v.clone());
                picked.push(v);
                cur = Subspace::from_vectors(self.ambient, &acc);
            }
        }
        Ok(picked)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, CycScalar as S};

    fn m(rows: Vec<Vec<i64>>) -> ExactMatrix {
        ExactMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(S::from_int).collect())
                .collect(),
        )
    }

    #[test]
    fn kernel_examples() {
        // zero 2x2 matrix -> 2 basis vectors
        assert_eq!(ExactMatrix::zero(2, 2).kernel_basis().len(), 2);
        // identity -> empty
        assert!(ExactMatrix::identity(3).kernel_basis().is_empty());
        // [[1,1],[1,1]] -> one vector proportional to (1,-1)
        let k = m(vec![vec![1, 1], vec![1, 1]]).kernel_basis();
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(v[0].add_ref(&v[1]), S::zero());
        assert!(!v[0].is_zero());
    }

    #[test]
    fn rank_nullity() {
        let a = m(vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        assert_eq!(a.rank() + a.kernel_basis().len(), a.cols());
        for v in a.kernel_basis() {
            assert!(a.apply(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(vec![vec![2, 1], vec![1, 1]]);
        let b = vec![S::from_int(3), S::from_int(2)];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.apply(&x), b);
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), ExactMatrix::identity(2));
        // inconsistent system
        let c = m(vec![vec![1, 1], vec![1, 1]]);
        assert!(c.solve(&[S::from_int(0), S::from_int(1)]).is_none());
    }

    #[test]
    fn det_cyclotomic() {
        let z = S::root_of_unity(3, 1);
        let a = ExactMatrix::from_rows(vec![
            vec![z.clone(), S::zero()],
            vec![S::zero(), z.conj()],
        ]);
        assert!(a.det().is_one());
    }

    #[test]
    fn subspace_lattice() {
        // A = B -> intersection = A
        let a = Subspace::from_vectors(
            2,
            &[vec![S::from_int(1), S::from_int(1)]],
        );
        assert_eq!(a.intersect(&a).unwrap(), a);
        // complementary axes in 2d
        let e0 = Subspace::from_vectors(2, &[vec![S::from_int(1), S::from_int(0)]]);
        let e1 = Subspace::from_vectors(2, &[vec![S::from_int(0), S::from_int(1)]]);
        assert_eq!(e0.intersect(&e1).unwrap().dim(), 0);
        assert_eq!(e0.sum(&e1).unwrap().dim(), 2);
        // dim(A+B) + dim(A cap B) = dim A + dim B
        let b = Subspace::from_vectors(
            3,
            &[
                vec![S::from_int(1), S::from_int(0), S::from_int(1)],
                vec![S::from_int(0), S::from_int(1), S::from_int(0)],
            ],
        );
        let c = Subspace::from_vectors(
            3,
            &[
                vec![S::from_int(1), S::from_int(1), S::from_int(1)],
                vec![S::from_int(0), S::from_int(0), S::from_int(1)],
            ],
        );
        let s = b.sum(&c).unwrap().dim();
        let i = b.intersect(&c).unwrap().dim();
        assert_eq!(s + i, b.dim() + c.dim());
        // mismatched ambients error
        assert!(a.sum(&b).is_err());
    }

    #[test]
    fn restricted_trace_on_invariant_subspace() {
        // diag(1,2,3) restricted to span(e0, e2)
        let d = m(vec![vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 3]]);
        let basis = vec![
            vec![S::from_int(1), S::from_int(0), S::from_int(0)],
            vec![S::from_int(0), S::from_int(0), S::from_int(1)],
        ];
        assert_eq!(d.restricted_trace(&basis).unwrap(), S::from_int(4));
        // non-invariant subspace rejected
        let r = m(vec![vec![0, 1, 0], vec![0, 0, 0], vec![0, 0, 0]]);
        let bad = vec![vec![S::from_int(0), S::from_int(1), S::from_int(0)]];
        assert!(r.restricted_trace(&bad).is_err());
    }

    #[test]
    fn kron_shapes() {
        let a = m(vec![vec![1, 2]]);
        let b = m(vec![vec![1], vec![3]]);
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (2, 2));
        assert_eq!(*k.at(1, 1), S::from_rat(rat(6, 1)));
    }
}
