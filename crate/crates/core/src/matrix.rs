//! Dense matrices over `O_E / p^prec`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::padic::{CycloElt, PadicContext, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    ctx: Arc<PadicContext>,
    rows: usize,
    cols: usize,
    data: Vec<CycloElt>,
}

impl Matrix {
    pub fn zeros(ctx: &Arc<PadicContext>, rows: usize, cols: usize) -> Self {
        Matrix { ctx: ctx.clone(), rows, cols, data: alloc::vec![CycloElt::zero(ctx); rows * cols] }
    }

    pub fn identity(ctx: &Arc<PadicContext>, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = CycloElt::one(ctx);
        }
        m
    }

    pub fn from_fn(
        ctx: &Arc<PadicContext>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> CycloElt,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { ctx: ctx.clone(), rows, cols, data }
    }

    pub fn from_rows(ctx: &Arc<PadicContext>, rows: Vec<Vec<CycloElt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data: Vec<CycloElt> = rows.into_iter().flatten().collect();
        if data.iter().any(|x| !PadicContext::same(x.ctx(), ctx)) {
            return Err(Error::ContextMismatch);
        }
        Ok(Matrix { ctx: ctx.clone(), rows: r, cols: c, data })
    }

    pub fn diagonal(ctx: &Arc<PadicContext>, diag: &[CycloElt]) -> Self {
        let mut m = Self::zeros(ctx, diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    /// Block-diagonal matrix with the given square blocks.
    pub fn block_diag(ctx: &Arc<PadicContext>, blocks: &[Matrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Self::zeros(ctx, n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(off + i, off + j)] = b[(i, j)].clone();
                }
            }
            off += b.rows;
        }
        m
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[CycloElt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<CycloElt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.ctx, self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map(&self, f: impl Fn(&CycloElt) -> CycloElt) -> Self {
        Matrix { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Entrywise `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.map(CycloElt::conj)
    }

    pub fn scale(&self, s: &CycloElt) -> Self {
        self.map(|x| x * s)
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if !PadicContext::same(&self.ctx, &other.ctx) {
            return Err(Error::ContextMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !PadicContext::same(&self.ctx, &other.ctx) {
            return Err(Error::ContextMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "mul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += &prod;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[CycloElt]) -> Result<Vec<CycloElt>> {
        if v.len() != self.cols {
            return Err(Error::Dimension("matrix-vector length".into()));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = CycloElt::zero(&self.ctx);
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn pow(&self, mut k: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut base = self.clone();
        let mut r = Self::identity(&self.ctx, self.rows);
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(r)
    }

    /// `P M P^{-1}` for the permutation sending basis vector `i` to `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(&self.ctx, n, n);
        for i in 0..n {
            for j in 0..n {
                out[(perm[i], perm[j])] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(&self.ctx, rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CycloElt::is_zero)
    }

    /// Minimum entry valuation.
    pub fn valuation(&self) -> Valuation {
        self.data
            .iter()
            .map(CycloElt::valuation)
            .min_by(Valuation::cmp_bound)
            .unwrap_or(Valuation::AtLeast((self.ctx.prec() as i64).into()))
    }

    /// True if every entry is `≡ 0` modulo `π^k`.
    pub fn divisible_by_pi_pow(&self, k: u64) -> bool {
        self.data.iter().all(|x| x.pi_valuation().map_or(true, |v| v >= k))
    }

    /// Inverse of a matrix whose determinant is a unit (Gauss–Jordan with unit pivots).
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(&self.ctx, n);
        for col in 0..n {
            let piv = (col..n).find(|&r| a[(r, col)].is_unit()).ok_or(Error::NotUnit)?;
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let s = a[(col, col)].inverse()?;
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] * &s;
                inv[(col, j)] = &inv[(col, j)] * &s;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let da = &f * &a[(col, j)];
                    a[(r, j)] -= &da;
                    let di = &f * &inv[(col, j)];
                    inv[(r, j)] -= &di;
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = CycloElt;
    fn index(&self, (i, j): (usize, usize)) -> &CycloElt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CycloElt {
        &mut self.data[i * self.cols + j]
    }
}

/// A 2×2 matrix `(a b; c d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub a: CycloElt,
    pub b: CycloElt,
    pub c: CycloElt,
    pub d: CycloElt,
}

impl Mat2 {
    pub fn new(a: CycloElt, b: CycloElt, c: CycloElt, d: CycloElt) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_i64(ctx: &Arc<PadicContext>, [a, b, c, d]: [i64; 4]) -> Self {
        let f = |x| CycloElt::from_i64(ctx, x);
        Mat2 { a: f(a), b: f(b), c: f(c), d: f(d) }
    }

    pub fn identity(ctx: &Arc<PadicContext>) -> Self {
        Self::from_i64(ctx, [1, 0, 0, 1])
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        self.a.ctx()
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        Mat2 { a: &self.a + &o.a, b: &self.b + &o.b, c: &self.c + &o.c, d: &self.d + &o.d }
    }

    pub fn scale(&self, s: &CycloElt) -> Mat2 {
        Mat2 { a: &self.a * s, b: &self.b * s, c: &self.c * s, d: &self.d * s }
    }

    pub fn det(&self) -> CycloElt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn entries(&self) -> [&CycloElt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_unimodular_matrix() {
        let ctx = PadicContext::new(3, 3, 30, None).unwrap();
        let z = |k| CycloElt::zeta_pow(&ctx, k);
        let m = Matrix::from_rows(
            &ctx,
            alloc::vec![
                alloc::vec![z(1), CycloElt::from_i64(&ctx, 3), z(4)],
                alloc::vec![CycloElt::zero(&ctx), z(2), CycloElt::from_i64(&ctx, 9)],
                alloc::vec![z(5), z(7), CycloElt::from_i64(&ctx, 2)],
            ],
        )
        .unwrap();
        match m.inverse() {
            Ok(inv) => assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(&ctx, 3)),
            Err(e) => assert_eq!(e, Error::NotUnit),
        }
        let u = Matrix::from_fn(&ctx, 2, 2, |i, j| CycloElt::from_i64(&ctx, [[2, 1], [1, 1]][i][j]));
        assert_eq!(u.mul(&u.inverse().unwrap()).unwrap(), Matrix::identity(&ctx, 2));
    }
}
