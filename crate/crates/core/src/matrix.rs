//! Dense matrices over a finite field.
//!
//! Rank and every derived quantity come from one row reduction routine:
//! leftmost pivot column, first nonzero row below the current pivot row,
//! pivots scaled to 1 and cleared above and below (reduced echelon form).
//!
//! Matrices in `M_{m×n}(F_q)` are indexed by the integer code
//! `Σ entries[i]·q^i` over the row-major entry sequence, so the zero matrix
//! has code 0 and `E_{1,1}` has code 1.

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, Field, FieldAutomorphism};

/// An `m×n` matrix with entries in `field`, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Elem>,
    field: Field,
}

/// Reduced row echelon form of `A` together with an invertible `transform`
/// satisfying `transform · A = reduced`.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
    pub transform: Matrix,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Serialized form `{"m", "n", "entries": [[code, ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub m: usize,
    pub n: usize,
    pub entries: Vec<Vec<u32>>,
}

impl Matrix {
    pub fn new(field: &Field, rows: usize, cols: usize, entries: Vec<Elem>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyShape(rows, cols));
        }
        if entries.len() != rows * cols {
            return Err(Error::Malformed(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(&bad) = entries.iter().find(|&&e| !field.contains(e)) {
            return Err(Error::ElementOutOfRange {
                code: bad.0,
                order: field.order(),
            });
        }
        Ok(Matrix {
            rows,
            cols,
            entries,
            field: field.clone(),
        })
    }

    /// Builds a matrix from rows of element codes.
    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("ragged rows".into()));
        }
        let entries = rows.iter().flatten().map(|&c| Elem(c)).collect();
        Matrix::new(field, m, n, entries)
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            entries: vec![Elem::ZERO; rows * cols],
            field: field.clone(),
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut id = Matrix::zeros(field, n, n);
        for i in 0..n {
            id.set(i, i, Elem::ONE);
        }
        id
    }

    /// The matrix unit with a single 1 at `(i, j)` (0-based).
    pub fn unit(field: &Field, rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut e = Matrix::zeros(field, rows, cols);
        e.set(i, j, Elem::ONE);
        e
    }

    /// The `r×c` block `[I_k 0; 0 0]`.
    pub fn block_identity(field: &Field, rows: usize, cols: usize, k: usize) -> Self {
        let mut b = Matrix::zeros(field, rows, cols);
        for i in 0..k.min(rows).min(cols) {
            b.set(i, i, Elem::ONE);
        }
        b
    }

    /// The outer product `^t col · row`.
    pub fn outer(field: &Field, col: &[Elem], row: &[Elem]) -> Self {
        let mut out = Matrix::zeros(field, col.len(), row.len());
        for (i, &c) in col.iter().enumerate() {
            for (j, &r) in row.iter().enumerate() {
                out.set(i, j, field.mul(c, r));
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn check_same(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(Elem, Elem) -> Elem) -> Result<Matrix> {
        self.check_same(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Matrix {
            entries,
            ..self.clone()
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        let f = &self.field;
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        let f = &self.field;
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn neg(&self) -> Matrix {
        self.map(|a| self.field.neg(a))
    }

    pub fn scale(&self, s: Elem) -> Matrix {
        self.map(|a| self.field.mul(s, a))
    }

    fn map(&self, f: impl Fn(Elem) -> Elem) -> Matrix {
        Matrix {
            entries: self.entries.iter().map(|&a| f(a)).collect(),
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// `x · A` for a row vector `x` of length `rows`.
    pub fn left_apply(&self, x: &[Elem]) -> Vec<Elem> {
        assert_eq!(x.len(), self.rows);
        let f = &self.field;
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(Elem::ZERO, |acc, i| f.add(acc, f.mul(x[i], self.get(i, j))))
            })
            .collect()
    }

    /// `A · y` for a column vector `y` of length `cols`.
    pub fn right_apply(&self, y: &[Elem]) -> Vec<Elem> {
        assert_eq!(y.len(), self.cols);
        (0..self.rows)
            .map(|i| dot(&self.field, self.row(i), y))
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `A^τ`: the automorphism applied to every entry.
    pub fn apply_entrywise(&self, aut: FieldAutomorphism) -> Matrix {
        self.map(|a| self.field.apply(aut, a))
    }

    /// Places `self` in the top-left corner of a zero `rows×cols` matrix.
    pub fn embed(&self, rows: usize, cols: usize) -> Result<Matrix> {
        if rows < self.rows || cols < self.cols {
            return Err(Error::ShapeMismatch {
                expected: (rows, cols),
                found: self.shape(),
            });
        }
        let mut out = Matrix::zeros(&self.field, rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        Ok(out)
    }

    /// The top-left `rows×cols` block.
    pub fn top_left(&self, rows: usize, cols: usize) -> Matrix {
        assert!(rows <= self.rows && cols <= self.cols);
        let mut out = Matrix::zeros(&self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    pub fn echelon(&self) -> Echelon {
        let f = &self.field;
        let mut a = self.clone();
        let mut t = Matrix::identity(f, self.rows);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            a.swap_rows(r, pr);
            t.swap_rows(r, pr);
            let s = f.inv(a.get(r, c)).expect("pivot is nonzero");
            a.scale_row(r, s);
            t.scale_row(r, s);
            for i in 0..self.rows {
                let factor = a.get(i, c);
                if i != r && !factor.is_zero() {
                    let factor = f.neg(factor);
                    a.add_row_multiple(i, r, factor);
                    t.add_row_multiple(i, r, factor);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon {
            reduced: a,
            pivots,
            transform: t,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, i: usize, s: Elem) {
        for j in 0..self.cols {
            let v = self.field.mul(s, self.get(i, j));
            self.set(i, j, v);
        }
    }

    // row[i] += s · row[src]
    fn add_row_multiple(&mut self, i: usize, src: usize, s: Elem) {
        for j in 0..self.cols {
            let v = self
                .field
                .add(self.get(i, j), self.field.mul(s, self.get(src, j)));
            self.set(i, j, v);
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Reduced echelon basis of the row space (a subspace of `F^n`).
    pub fn row_space(&self) -> Vec<Vec<Elem>> {
        let e = self.echelon();
        (0..e.rank()).map(|i| e.reduced.row(i).to_vec()).collect()
    }

    /// Reduced echelon basis of the column space (a subspace of `^tF^m`),
    /// each basis vector listed by its coordinates.
    pub fn column_space(&self) -> Vec<Vec<Elem>> {
        self.transpose().row_space()
    }

    /// Basis of the right null space `{y : A·y = 0}`.
    pub fn null_space(&self) -> Vec<Vec<Elem>> {
        let e = self.echelon();
        let f = &self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !e.pivots.contains(c)).collect();
        let vectors: Vec<Vec<Elem>> = free
            .iter()
            .map(|&fc| {
                let mut v = vec![Elem::ZERO; self.cols];
                v[fc] = Elem::ONE;
                for (i, &pc) in e.pivots.iter().enumerate() {
                    v[pc] = f.neg(e.reduced.get(i, fc));
                }
                v
            })
            .collect();
        span_basis(f, self.cols, &vectors)
    }

    /// Basis of `Ker A = {x ∈ F^m : x·A = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Elem>> {
        self.transpose().null_space()
    }

    /// Invertible `T`, `S` with `T·A·S = [I_r 0; 0 0]`, and `r = rank A`.
    pub fn rank_normal_form(&self) -> (Matrix, Matrix, usize) {
        let rows = self.echelon();
        // The transpose of a reduced echelon matrix of rank r reduces to the
        // block identity; its row operations become our column operations.
        let cols = rows.reduced.transpose().echelon();
        (
            rows.transform,
            cols.transform.transpose(),
            rows.pivots.len(),
        )
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::Singular);
        }
        let e = self.echelon();
        if e.rank() < self.rows {
            return Err(Error::Singular);
        }
        Ok(e.transform)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Factors a rank one matrix as `^tb · a` with the first nonzero entry
    /// of `a` equal to 1. Returns `(b, a)`.
    pub fn rank_one_factor(&self) -> Result<(Vec<Elem>, Vec<Elem>)> {
        let rank = self.rank();
        if rank != 1 {
            return Err(Error::RankMismatch {
                expected: 1,
                found: rank,
            });
        }
        let i0 = (0..self.rows)
            .find(|&i| self.row(i).iter().any(|e| !e.is_zero()))
            .unwrap();
        let a = normalize(&self.field, self.row(i0)).unwrap();
        let j0 = leading_index(&a).unwrap();
        Ok((self.column(j0), a))
    }

    /// A chain `A = A_0, …, A_r = B` of length `δ(A, B) + 1` with consecutive
    /// members adjacent, obtained by adding the rank one terms of `B − A` in
    /// pivot order of its reduced echelon form.
    pub fn adjacency_chain(&self, other: &Matrix) -> Result<Vec<Matrix>> {
        let diff = other.sub(self)?;
        let e = diff.echelon();
        let back = e
            .transform
            .inverse()
            .expect("row transforms are invertible");
        let mut chain = vec![self.clone()];
        let mut current = self.clone();
        for k in 0..e.rank() {
            let term = Matrix::outer(&self.field, &back.column(k), e.reduced.row(k));
            current = current.add(&term)?;
            chain.push(current.clone());
        }
        debug_assert_eq!(chain.last(), Some(other));
        Ok(chain)
    }

    pub fn code(&self) -> u64 {
        let q = self.field.order() as u64;
        self.entries
            .iter()
            .rev()
            .fold(0u64, |acc, e| acc * q + e.0 as u64)
    }

    pub fn from_code(field: &Field, rows: usize, cols: usize, code: u64) -> Result<Self> {
        let size = space_size(field, rows, cols)?;
        if code >= size {
            return Err(Error::CodeOutOfRange(code));
        }
        Ok(decode_unchecked(field, rows, cols, code))
    }

    pub fn to_doc(&self) -> MatrixDoc {
        MatrixDoc {
            m: self.rows,
            n: self.cols,
            entries: (0..self.rows)
                .map(|i| self.row(i).iter().map(|e| e.0).collect())
                .collect(),
        }
    }

    pub fn from_doc(field: &Field, doc: &MatrixDoc) -> Result<Self> {
        if doc.entries.len() != doc.m || doc.entries.iter().any(|r| r.len() != doc.n) {
            return Err(Error::Malformed(format!(
                "entries do not form a {}x{} array",
                doc.m, doc.n
            )));
        }
        Matrix::from_rows(field, &doc.entries)
    }
}

impl Hash for Matrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.entries.hash(state);
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            let row: Vec<u32> = self.row(i).iter().map(|e| e.0).collect();
            write!(f, "{row:?}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(serializer)
    }
}

/// `rank(A − B)`.
pub fn distance(a: &Matrix, b: &Matrix) -> Result<usize> {
    Ok(a.sub(b)?.rank())
}

pub fn adjacent(a: &Matrix, b: &Matrix) -> Result<bool> {
    Ok(distance(a, b)? == 1)
}

pub fn dot(field: &Field, x: &[Elem], y: &[Elem]) -> Elem {
    x.iter()
        .zip(y)
        .fold(Elem::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
}

pub fn leading_index(v: &[Elem]) -> Option<usize> {
    v.iter().position(|e| !e.is_zero())
}

/// Scales `v` so its first nonzero coordinate is 1; `None` for the zero vector.
pub fn normalize(field: &Field, v: &[Elem]) -> Option<Vec<Elem>> {
    let lead = v[leading_index(v)?];
    let s = field.inv(lead).expect("leading entry is nonzero");
    Some(v.iter().map(|&a| field.mul(s, a)).collect())
}

/// Reduced echelon basis of the span of `vectors` in `F^len`.
pub fn span_basis(field: &Field, len: usize, vectors: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let entries = vectors.iter().flatten().copied().collect();
    Matrix::new(field, vectors.len(), len, entries)
        .expect("vectors share the ambient length")
        .row_space()
}

/// Number of matrices in `M_{rows×cols}(F_q)`, if it fits in a `u64`.
pub fn space_size(field: &Field, rows: usize, cols: usize) -> Result<u64> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyShape(rows, cols));
    }
    let exp = u32::try_from(rows * cols).map_err(|_| Error::SpaceTooLarge)?;
    (field.order() as u64)
        .checked_pow(exp)
        .ok_or(Error::SpaceTooLarge)
}

fn decode_unchecked(field: &Field, rows: usize, cols: usize, mut code: u64) -> Matrix {
    let q = field.order() as u64;
    let entries = (0..rows * cols)
        .map(|_| {
            let e = Elem((code % q) as u32);
            code /= q;
            e
        })
        .collect();
    Matrix {
        rows,
        cols,
        entries,
        field: field.clone(),
    }
}

/// The matrix space `M_{rows×cols}(F_q)` as an indexable, restartable stream.
#[derive(Clone, Debug)]
pub struct MatrixSpace {
    field: Field,
    rows: usize,
    cols: usize,
    size: u64,
}

impl MatrixSpace {
    pub fn new(field: &Field, rows: usize, cols: usize) -> Result<Self> {
        let size = space_size(field, rows, cols)?;
        Ok(MatrixSpace {
            field: field.clone(),
            rows,
            cols,
            size,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn get(&self, code: u64) -> Result<Matrix> {
        if code >= self.size {
            return Err(Error::CodeOutOfRange(code));
        }
        Ok(decode_unchecked(&self.field, self.rows, self.cols, code))
    }

    pub fn zero(&self) -> Matrix {
        Matrix::zeros(&self.field, self.rows, self.cols)
    }

    /// Matrices with codes in `start..end`, in code order.
    pub fn range(&self, start: u64, end: u64) -> impl Iterator<Item = Matrix> + '_ {
        (start..end.min(self.size))
            .map(move |c| decode_unchecked(&self.field, self.rows, self.cols, c))
    }

    pub fn iter(&self) -> impl Iterator<Item = Matrix> + '_ {
        self.range(0, self.size)
    }

    pub fn of_rank(&self, r: usize) -> impl Iterator<Item = Matrix> + '_ {
        self.iter().filter(move |a| a.rank() == r)
    }

    /// `0` together with every rank one matrix, built directly as `^tu·x`
    /// with `x` normalized; sorted by code.
    pub fn rank_at_most_one(&self) -> Vec<Matrix> {
        let f = &self.field;
        let cols = vectors(f, self.rows).skip(1).collect::<Vec<_>>();
        let mut out = vec![self.zero()];
        for x in vectors(f, self.cols).skip(1) {
            if x[leading_index(&x).unwrap()] != Elem::ONE {
                continue;
            }
            for u in &cols {
                out.push(Matrix::outer(f, u, &x));
            }
        }
        out.sort_by_key(Matrix::code);
        out
    }
}

/// All vectors of `F^len` in code order (first coordinate least significant).
pub fn vectors(field: &Field, len: usize) -> impl Iterator<Item = Vec<Elem>> {
    let q = field.order() as u64;
    let count = q.pow(len as u32);
    (0..count).map(move |mut c| {
        (0..len)
            .map(|_| {
                let e = Elem((c % q) as u32);
                c /= q;
                e
            })
            .collect()
    })
}

/// Every matrix of the space in code order.
pub fn enumerate_matrices(
    field: &Field,
    rows: usize,
    cols: usize,
) -> Result<impl Iterator<Item = Matrix>> {
    let space = MatrixSpace::new(field, rows, cols)?;
    Ok((0..space.size).map(move |c| decode_unchecked(&space.field, space.rows, space.cols, c)))
}

/// Every rank `r` matrix of the space in code order.
pub fn enumerate_rank(
    field: &Field,
    rows: usize,
    cols: usize,
    r: usize,
) -> Result<impl Iterator<Item = Matrix>> {
    if r > rows.min(cols) {
        return Err(Error::RankMismatch {
            expected: rows.min(cols),
            found: r,
        });
    }
    Ok(enumerate_matrices(field, rows, cols)?.filter(move |a| a.rank() == r))
}
