//! Dense linear algebra over `F_p`: reduced row echelon form, rank, kernels,
//! and canonical subspaces.

use crate::error::{Error, Result};
use crate::series::Prime;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Entries are reduced mod `p`. All rows must have length `cols`.
    pub fn from_rows(p: Prime, cols: usize, rows: &[Vec<u32>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Mismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&x| x % p.get()));
        }
        Ok(FpMatrix {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p.get();
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.p.get() as u64;
        self.rows()
            .map(|r| (r.iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum::<u64>() % p) as u32)
            .collect()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(src) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if src != r {
                for j in 0..self.cols {
                    self.data.swap(src * self.cols + j, r * self.cols + j);
                }
            }
            let inv = p.inv(self.get(r, c));
            for j in c..self.cols {
                let v = p.mul(self.get(r, j), inv);
                self.data[r * self.cols + j] = v;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let v = p.sub(self.get(i, j), p.mul(f, self.get(r, j)));
                    self.data[i * self.cols + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = p.neg(m.get(r, free));
            }
            basis.push(v);
        }
        basis
    }
}

/// A subspace of `F_p^dim` held as its reduced echelon basis, so equality of
/// values is equality of subspaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    p: Prime,
    ambient: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(p: Prime, ambient: usize) -> Self {
        Subspace {
            p,
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn whole(p: Prime, ambient: usize) -> Self {
        Self::span(p, ambient, FpMatrix::identity(p, ambient).rows().map(<[u32]>::to_vec))
            .expect("identity rows have ambient length")
    }

    pub fn span<I>(p: Prime, ambient: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<u32>>,
    {
        let rows: Vec<Vec<u32>> = vectors.into_iter().collect();
        let mut m = FpMatrix::from_rows(p, ambient, &rows)?;
        let pivots = m.rref();
        let basis = m.rows().take(pivots.len()).map(<[u32]>::to_vec).collect();
        Ok(Subspace {
            p,
            ambient,
            basis,
            pivots,
        })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check(&self, other: &Subspace) -> Result<()> {
        if self.p != other.p || self.ambient != other.ambient {
            return Err(Error::Mismatch(format!(
                "subspaces of F_{}^{} and F_{}^{}",
                self.p, self.ambient, other.p, other.ambient
            )));
        }
        Ok(())
    }

    /// Membership by reduction against the echelon basis.
    pub fn contains(&self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let p = self.p;
        let mut w: Vec<u32> = v.iter().map(|&x| x % p.get()).collect();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let f = w[pc];
            if f != 0 {
                for (x, &r) in w.iter_mut().zip(row) {
                    *x = p.sub(*x, p.mul(f, r));
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        Subspace::span(
            self.p,
            self.ambient,
            self.basis.iter().chain(&other.basis).cloned(),
        )
    }

    /// `U ∩ W` from the left kernel of the stacked bases.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.p, self.ambient));
        }
        let stacked: Vec<Vec<u32>> = self.basis.iter().chain(&other.basis).cloned().collect();
        let m = FpMatrix::from_rows(self.p, self.ambient, &stacked)?.transpose();
        let p = self.p;
        let vectors = m.kernel().into_iter().map(|coef| {
            let mut v = vec![0u32; self.ambient];
            for (c, row) in coef.iter().zip(&self.basis) {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = p.add(*x, p.mul(*c, r));
                }
            }
            v
        });
        Subspace::span(self.p, self.ambient, vectors)
    }

    /// Images of the basis under a linear map given as a closure.
    pub fn map<F>(&self, f: F) -> Result<Subspace>
    where
        F: Fn(&[u32]) -> Vec<u32>,
    {
        Subspace::span(self.p, self.ambient, self.basis.iter().map(|b| f(b)))
    }

    /// Every vector in the subspace (`p^dim` of them).
    pub fn elements(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        let p = self.p;
        let count = (p.get() as u64).pow(self.dim() as u32);
        (0..count).map(move |mut idx| {
            let mut v = vec![0u32; self.ambient];
            for row in &self.basis {
                let c = (idx % p.get() as u64) as u32;
                idx /= p.get() as u64;
                if c != 0 {
                    for (x, &r) in v.iter_mut().zip(row) {
                        *x = p.add(*x, p.mul(c, r));
                    }
                }
            }
            v
        })
    }
}
