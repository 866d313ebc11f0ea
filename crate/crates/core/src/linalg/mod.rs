//! Dense exact linear algebra over Q(zeta_N) and integer lattice tools.

mod lattice;
mod snf;

pub use lattice::{Inconsistent, RelationLattice};
pub use snf::{
    congruence_kernel, frac, integer_kernel, lattice_coordinates, quotient_group, qz_solve,
    row_lattice_basis, smith_normal_form, solve_integer, AbelianGroupPresentation, IntMatrix, Snf,
};

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::cyclotomic::{CycloContext, CycloError, CycloNumber};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular Gram matrix; input family is linearly dependent")]
    SingularGram,
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    ctx: &'static CycloContext,
    data: Vec<CycloNumber>,
}

impl ExactMatrix {
    pub fn zeros(ctx: &'static CycloContext, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            ctx,
            data: vec![CycloNumber::zero(ctx); rows * cols],
        }
    }

    pub fn identity(ctx: &'static CycloContext, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = CycloNumber::one(ctx);
        }
        m
    }

    pub fn scalar(v: CycloNumber) -> Self {
        ExactMatrix {
            rows: 1,
            cols: 1,
            ctx: v.context(),
            data: vec![v],
        }
    }

    pub fn from_rows(
        ctx: &'static CycloContext,
        rows: Vec<Vec<CycloNumber>>,
    ) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LinalgError::Dimension("ragged rows".into()));
            }
            for v in row {
                if v.conductor() != ctx.conductor() {
                    return Err(CycloError::ContextMismatch(v.conductor(), ctx.conductor()).into());
                }
                data.push(v);
            }
        }
        Ok(ExactMatrix {
            rows: r,
            cols: c,
            ctx,
            data,
        })
    }

    /// Column vector.
    pub fn from_column(ctx: &'static CycloContext, v: Vec<CycloNumber>) -> Self {
        ExactMatrix {
            rows: v.len(),
            cols: 1,
            ctx,
            data: v,
        }
    }

    pub fn from_ints(ctx: &'static CycloContext, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| CycloNumber::from_int(ctx, v)).collect())
            .collect();
        Self::from_rows(ctx, rows).expect("rectangular integer literal")
    }

    /// Parses whitespace-separated entries, one row per line.
    pub fn parse(ctx: &'static CycloContext, text: &str) -> Result<Self, LinalgError> {
        let mut rows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            rows.push(
                split_entries(line)
                    .into_iter()
                    .map(|e| CycloNumber::parse(ctx, e))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Self::from_rows(ctx, rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn context(&self) -> &'static CycloContext {
        self.ctx
    }

    pub fn row(&self, i: usize) -> &[CycloNumber] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<CycloNumber> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> &[CycloNumber] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    /// Some(c) if the matrix is c times the identity.
    pub fn as_scalar(&self) -> Option<CycloNumber> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let c = self[(0, 0)].clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = &self[(i, j)];
                if (i == j && v != &c) || (i != j && !v.is_zero()) {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn map(&self, f: impl Fn(&CycloNumber) -> CycloNumber) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            ctx: self.ctx,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &CycloNumber) -> Self {
        self.map(|v| v * c)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn conjugate(&self) -> Self {
        self.map(CycloNumber::conjugate)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conjugate()
    }

    pub fn trace(&self) -> CycloNumber {
        let mut acc = CycloNumber::zero(self.ctx);
        for i in 0..self.rows.min(self.cols) {
            acc += &self[(i, i)];
        }
        acc
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.ctx.conductor() != other.ctx.conductor() {
            return Err(
                CycloError::ContextMismatch(self.ctx.conductor(), other.ctx.conductor()).into(),
            );
        }
        let mut out = Self::zeros(self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix add dimension mismatch"
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            ctx: self.ctx,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix sub dimension mismatch"
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            ctx: self.ctx,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[CycloNumber]) -> Vec<CycloNumber> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = CycloNumber::zero(self.ctx);
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    /// Kronecker product; row index of the result is `i * other.rows + k`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.ctx, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * &other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Block diagonal sum.
    pub fn direct_sum(ctx: &'static CycloContext, blocks: &[ExactMatrix]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(ctx, r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn embed(&self, target: &'static CycloContext) -> Result<Self, LinalgError> {
        let data = self
            .data
            .iter()
            .map(|v| v.embed(target))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            ctx: target,
            data,
        })
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inverse().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &m[(i, j)] - &(&f * &m[(r, j)]);
                    m[(i, j)] = v;
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
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.ctx, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = CycloNumber::one(self.ctx);
        }
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut out = Self::zeros(self.ctx, n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(out)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = CycloNumber;
    fn index(&self, (i, j): (usize, usize)) -> &CycloNumber {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CycloNumber {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}x{}]\n{}", self.rows, self.cols, self)
    }
}

/// Splits a row on whitespace that is outside parentheses.
pub fn split_entries(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch.is_whitespace() && depth == 0 {
            if let Some(s) = start.take() {
                out.push(&line[s..i]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(&line[s..]);
    }
    out
}

/// Basis of the right null space, one vector per free column in column order.
pub fn rref_nullspace(m: &ExactMatrix) -> Vec<Vec<CycloNumber>> {
    let (r, pivots) = m.rref();
    let ctx = m.ctx;
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![CycloNumber::zero(ctx); m.cols];
            v[f] = CycloNumber::one(ctx);
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -&r[(row, f)];
            }
            v
        })
        .collect()
}

/// General solution `particular + sum t_k kernel[k]`, with `t_k` the free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSolution {
    pub particular: Vec<CycloNumber>,
    pub free_variables: Vec<usize>,
    pub kernel: Vec<Vec<CycloNumber>>,
}

impl LinearSolution {
    pub fn is_unique(&self) -> bool {
        self.free_variables.is_empty()
    }
}

/// Solves `m x = b`; `None` when inconsistent.
pub fn solve_linear(m: &ExactMatrix, b: &[CycloNumber]) -> Option<LinearSolution> {
    assert_eq!(m.rows, b.len(), "right-hand side length");
    let mut aug = ExactMatrix::zeros(m.ctx, m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, m.cols)] = b[i].clone();
    }
    let (r, pivots) = aug.rref();
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut particular = vec![CycloNumber::zero(m.ctx); m.cols];
    for (row, &p) in pivots.iter().enumerate() {
        particular[p] = r[(row, m.cols)].clone();
    }
    let free_variables: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    Some(LinearSolution {
        particular,
        free_variables,
        kernel: rref_nullspace(m),
    })
}

/// Unique solution `X` of `m X = b` for a matrix right-hand side; `None` if
/// inconsistent or underdetermined.
pub fn solve_unique_many(m: &ExactMatrix, b: &ExactMatrix) -> Option<ExactMatrix> {
    assert_eq!(m.rows, b.rows, "right-hand side rows");
    let mut aug = ExactMatrix::zeros(m.ctx, m.rows, m.cols + b.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        for j in 0..b.cols {
            aug[(i, m.cols + j)] = b[(i, j)].clone();
        }
    }
    let (r, pivots) = aug.rref();
    if pivots.len() < m.cols || pivots[..m.cols].iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    if pivots.len() > m.cols {
        return None;
    }
    let mut x = ExactMatrix::zeros(m.ctx, m.cols, b.cols);
    for i in 0..m.cols {
        for j in 0..b.cols {
            x[(i, j)] = r[(i, m.cols + j)].clone();
        }
    }
    Some(x)
}

/// Dual family of a linearly independent set of intertwiners `H_z -> H_x (x) H_y`.
///
/// `S_i^+ = d_z sum_k (G^-1)_{ik} S_k^*` with `G_{ij} = tr(S_i^* S_j)`; for
/// intertwiners into an irreducible target this gives `S_i^+ S_j = delta_ij id`.
pub fn dual_basis(vectors: &[ExactMatrix]) -> Result<Vec<ExactMatrix>, LinalgError> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let ctx = first.ctx;
    let n = vectors.len();
    let adj: Vec<ExactMatrix> = vectors.iter().map(ExactMatrix::adjoint).collect();
    let mut gram = ExactMatrix::zeros(ctx, n, n);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = adj[i].try_mul(&vectors[j])?.trace();
        }
    }
    let ginv = gram.inverse().ok_or(LinalgError::SingularGram)?;
    let dz = CycloNumber::from_int(ctx, first.cols as i64);
    Ok((0..n)
        .map(|i| {
            let mut acc = ExactMatrix::zeros(ctx, first.cols, first.rows);
            for (k, a) in adj.iter().enumerate() {
                if !ginv[(i, k)].is_zero() {
                    acc = acc.add(&a.scale(&(&ginv[(i, k)] * &dz)));
                }
            }
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::ctx;

    fn c(n: u32, src: &str) -> CycloNumber {
        CycloNumber::parse(ctx(n), src).unwrap()
    }

    #[test]
    fn nullspace_examples() {
        let k = ctx(8);
        let ns = rref_nullspace(&ExactMatrix::from_ints(k, &[&[1, 1], &[1, 1]]));
        assert_eq!(ns, vec![vec![c(8, "-1"), c(8, "1")]]);
        assert!(rref_nullspace(&ExactMatrix::identity(k, 3)).is_empty());
        let m = ExactMatrix::parse(k, "1 c(8,1)\nc(8,7) 1").unwrap();
        let ns = rref_nullspace(&m);
        assert_eq!(ns.len(), 1);
        // (zeta, -1) spans the same line
        let target = [c(8, "c(8,1)"), c(8, "-1")];
        let ratio = &ns[0][0] / &target[0];
        assert_eq!(&target[1] * &ratio, ns[0][1]);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_examples() {
        let k = ctx(1);
        let b = vec![c(1, "3"), c(1, "-2")];
        let s = solve_linear(&ExactMatrix::identity(k, 2), &b).unwrap();
        assert_eq!(s.particular, b);
        assert!(s.is_unique());
        let s = solve_linear(&ExactMatrix::from_ints(k, &[&[1, 1]]), &[c(1, "0")]).unwrap();
        assert_eq!(s.free_variables, vec![1]);
        assert_eq!(s.kernel.len(), 1);
        assert!(solve_linear(
            &ExactMatrix::from_ints(k, &[&[1], &[1]]),
            &[c(1, "1"), c(1, "2")]
        )
        .is_none());
    }

    #[test]
    fn multiple_right_hand_sides() {
        let k = ctx(4);
        let m = ExactMatrix::parse(k, "1 0\n0 c(4,1)\n1 1").unwrap();
        let x = ExactMatrix::parse(k, "2 1\n-1 c(4,1)").unwrap();
        assert_eq!(solve_unique_many(&m, &m.mul(&x)), Some(x));
        let b = ExactMatrix::parse(k, "1\n0\n0").unwrap();
        assert!(solve_unique_many(&m, &b).is_none());
        let under = ExactMatrix::from_ints(k, &[&[1, 1]]);
        assert!(solve_unique_many(&under, &ExactMatrix::from_ints(k, &[&[1]])).is_none());
    }

    #[test]
    fn inverse_and_kron() {
        let k = ctx(4);
        let m = ExactMatrix::parse(k, "1 c(4,1)\n2 3").unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(ExactMatrix::from_ints(k, &[&[1, 2], &[2, 4]])
            .inverse()
            .is_none());
        let a = ExactMatrix::from_ints(k, &[&[1, 2], &[3, 4]]);
        let b = ExactMatrix::from_ints(k, &[&[0, 1], &[1, 0]]);
        let kr = a.kron(&b);
        assert_eq!(kr[(0, 1)], c(4, "1"));
        assert_eq!(kr[(3, 2)], c(4, "4"));
        // mixed product property
        let x = a.kron(&b).mul(&b.kron(&a));
        assert_eq!(x, a.mul(&b).kron(&b.mul(&a)));
    }

    #[test]
    fn dual_basis_examples() {
        let k = ctx(8);
        // isometry C -> C^2
        let s = ExactMatrix::parse(k, "1\n0").unwrap();
        let d = dual_basis(std::slice::from_ref(&s)).unwrap();
        assert_eq!(d[0], s.adjoint());
        let s2 = s.scale(&c(8, "2"));
        let d2 = dual_basis(std::slice::from_ref(&s2)).unwrap();
        assert_eq!(d2[0], s2.adjoint().scale(&c(8, "1/4")));
        assert!(d2[0].mul(&s2).is_identity());
        let dep = vec![s.clone(), s2];
        assert_eq!(dual_basis(&dep), Err(LinalgError::SingularGram));
    }

    #[test]
    fn split_respects_parentheses() {
        assert_eq!(
            split_entries(" 1  (1 + c(4,1))  -2/3 "),
            vec!["1", "(1 + c(4,1))", "-2/3"]
        );
    }
}
