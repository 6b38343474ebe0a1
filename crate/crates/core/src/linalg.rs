//! Exact linear algebra over the rationals.
//!
//! Every subspace is stored in a canonical form: its basis vectors are the
//! columns of a reduced column echelon matrix whose pivot rows are the
//! lexicographically smallest possible. Two equal subspaces therefore have
//! identical bases and equality is structural.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn scalar(n: usize, s: &Rational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = s.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from integer rows. All rows must have equal length.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |r, c| int(rows[r][c]))
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix { rows: n, cols, data })
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        Self::from_fn(rows, columns.len(), |r, c| columns[c][r].clone())
    }

    /// The nilpotent Jordan block with `N e_i = e_{i-1}` (and `N e_1 = 0`).
    pub fn jordan_block(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if c == r + 1 { Rational::one() } else { Rational::zero() })
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| if r == c { entries[r].clone() } else { Rational::zero() })
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

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, r: usize) -> Vec<Rational> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn row_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for (c, x) in v.iter().enumerate() {
                    let a = self.get(r, c);
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, k: u32) -> Matrix {
        assert!(self.is_square(), "pow of a non-square matrix");
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Kronecker product; basis index of `a ⊗ b` is `i * dim(b) + j`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            let (r1, r2) = (r / other.rows, r % other.rows);
            let (c1, c2) = (c / other.cols, c % other.cols);
            self.get(r1, c1) * other.get(r2, c2)
        })
    }

    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    m.set(r0 + r, c0 + c, b.get(r, c).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                other.get(r, c - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// The submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Self::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]).clone())
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.row_vectors();
        rref_rows(&mut rows, self.cols).len()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let aug = self.hstack(&Matrix::identity(n));
        let mut rows = aug.row_vectors();
        let pivots = rref_rows(&mut rows, 2 * n);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Self::from_fn(n, n, |r, c| rows[r][n + c].clone()))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn kernel(&self) -> Subspace {
        kernel_image(self).0
    }

    pub fn image(&self) -> Subspace {
        Subspace::column_span(self)
    }

    /// Image of a subspace under this matrix.
    pub fn map_subspace(&self, s: &Subspace) -> Subspace {
        Subspace::column_span(&(self * s.basis()))
    }

    /// `{x : self·x ∈ target}`.
    pub fn preimage(&self, target: &Subspace) -> Subspace {
        let q = target.quotient_map();
        (&q * self).kernel()
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        let idx = r * rhs.cols + c;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &'a Matrix) -> Matrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch in add");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &'a Matrix) -> Matrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch in sub");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

/// Gauss–Jordan elimination in place; returns pivot columns. Rows past the
/// rank are removed, so `rows` ends up holding the reduced row echelon form.
fn rref_rows(rows: &mut Vec<Vec<Rational>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        if !inv.is_one() {
            for x in rows[r].iter_mut() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Reduced column echelon form: the canonical basis of the column span,
/// returned as an `rows × rank` matrix.
pub fn reduced_echelon(m: &Matrix) -> Matrix {
    Subspace::column_span(m).basis
}

/// Kernel and image of `m`; `dim ker + dim im = cols`.
pub fn kernel_image(m: &Matrix) -> (Subspace, Subspace) {
    let mut rows = m.row_vectors();
    let pivots = rref_rows(&mut rows, m.cols);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let kernel_vectors: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); m.cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -rows[i][f].clone();
            }
            v
        })
        .collect();
    (
        Subspace::span(m.cols, kernel_vectors),
        Subspace::column_span(m),
    )
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(ambient, 0),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span<I>(ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = Vec<Rational>>,
    {
        let mut rows: Vec<Vec<Rational>> = vectors
            .into_iter()
            .inspect(|v| assert_eq!(v.len(), ambient, "vector outside ambient space"))
            .collect();
        let pivots = rref_rows(&mut rows, ambient);
        let basis = Matrix::from_columns(ambient, &rows);
        Subspace {
            ambient,
            basis,
            pivots,
        }
    }

    pub fn column_span(m: &Matrix) -> Self {
        Self::span(m.rows, m.columns())
    }

    /// Span of the given standard basis vectors.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        Self::span(
            ambient,
            indices.iter().map(|&i| unit_vector(ambient, i)),
        )
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.pivots.len() == self.ambient
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.columns()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Indices of the standard basis vectors completing this subspace's basis.
    pub fn complement_indices(&self) -> Vec<usize> {
        (0..self.ambient).filter(|i| !self.pivots.contains(i)).collect()
    }

    /// `v` minus its component along this subspace (pivot entries cleared).
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = v.to_vec();
        for (j, &p) in self.pivots.iter().enumerate() {
            let f = out[p].clone();
            if f.is_zero() {
                continue;
            }
            for (i, x) in out.iter_mut().enumerate() {
                let b = self.basis.get(i, j);
                if !b.is_zero() {
                    *x -= &f * b;
                }
            }
        }
        out
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if !self.contains_vector(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Coordinates of the class of `v` in the quotient by this subspace.
    pub fn quotient_coords(&self, v: &[Rational]) -> Vec<Rational> {
        let r = self.reduce(v);
        self.complement_indices().into_iter().map(|i| r[i].clone()).collect()
    }

    /// Matrix of the projection `ambient → ambient / self`.
    pub fn quotient_map(&self) -> Matrix {
        let cols: Vec<Vec<Rational>> = (0..self.ambient)
            .map(|i| self.quotient_coords(&unit_vector(self.ambient, i)))
            .collect();
        Matrix::from_columns(self.ambient - self.dim(), &cols)
    }

    /// Matrix of the section `ambient / self → ambient` through the
    /// complement basis vectors.
    pub fn quotient_section(&self) -> Matrix {
        let comp = self.complement_indices();
        Matrix::from_fn(self.ambient, comp.len(), |r, c| {
            if r == comp[c] {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(Subspace::span(
            self.ambient,
            self.basis_vectors().into_iter().chain(other.basis_vectors()),
        ))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_full() {
            return Ok(self.clone());
        }
        if other.is_zero() || self.is_full() {
            return Ok(other.clone());
        }
        // vectors of self whose class in ambient/other vanishes
        let q = other.quotient_map();
        let k = (&q * &self.basis).kernel();
        Ok(Subspace::column_span(&(&self.basis * k.basis())))
    }

    /// Inclusion test `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(other.basis_vectors().iter().all(|v| self.contains_vector(v)))
    }

    pub fn tensor(&self, other: &Subspace) -> Subspace {
        Subspace::column_span(&self.basis.kron(&other.basis))
    }

    /// The subspace carried into a larger ambient space by an injective map.
    pub fn pushforward(&self, f: &Matrix) -> Subspace {
        f.map_subspace(self)
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

/// Whether an induced map is computed on subspaces or on quotients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InduceMode {
    Restrict,
    Descend,
}

/// Matrix of `f` restricted to `src → tgt` (in the canonical bases), or of
/// the induced map `ambient/src → ambient/tgt` (in the complement bases).
pub fn induce(f: &Matrix, src: &Subspace, tgt: &Subspace, mode: InduceMode) -> Result<Matrix> {
    if f.cols() != src.ambient() || f.rows() != tgt.ambient() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} map between ambient spaces of dims {} and {}",
            f.rows(),
            f.cols(),
            src.ambient(),
            tgt.ambient()
        )));
    }
    let images: Vec<Vec<Rational>> = src.basis_vectors().iter().map(|v| f.apply(v)).collect();
    if !images.iter().all(|v| tgt.contains_vector(v)) {
        return Err(Error::NotPreserved);
    }
    Ok(match mode {
        InduceMode::Restrict => {
            let cols: Vec<Vec<Rational>> = images
                .iter()
                .map(|v| tgt.coordinates(v).expect("membership checked"))
                .collect();
            Matrix::from_columns(tgt.dim(), &cols)
        }
        InduceMode::Descend => {
            let cols: Vec<Vec<Rational>> = src
                .complement_indices()
                .into_iter()
                .map(|i| tgt.quotient_coords(&f.apply(&unit_vector(src.ambient(), i))))
                .collect();
            Matrix::from_columns(tgt.ambient() - tgt.dim(), &cols)
        }
    })
}

/// Smallest `l ≥ 0` with `m^l = 0`.
pub fn nilpotency_index(m: &Matrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(0);
    }
    let mut p = m.clone();
    for l in 1..=n {
        if p.is_zero() {
            return Ok(l);
        }
        p = &p * m;
    }
    Err(Error::NotNilpotent)
}

pub fn is_nilpotent(m: &Matrix) -> bool {
    nilpotency_index(m).is_ok()
}

/// Characteristic polynomial `det(x·I − m)`, coefficients from degree 0 up.
pub fn characteristic_polynomial(m: &Matrix) -> Result<Vec<Rational>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    // Faddeev–LeVerrier
    let n = m.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut acc = Matrix::zeros(n, n);
    for k in 1..=n {
        let shifted = &acc + &Matrix::scalar(n, &coeffs[n - k + 1]);
        acc = m * &shifted;
        coeffs[n - k] = -acc.trace() / int(k as i64);
    }
    Ok(coeffs)
}

fn poly_eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn poly_trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = a.to_vec();
    poly_trim(&mut rem);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if rem.len() < b.len() {
        return (vec![Rational::zero()], rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] / &lead;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[i + j] -= &c * bj;
            }
        }
        quot[i] = c;
    }
    rem.truncate(db.max(1));
    poly_trim(&mut rem);
    (quot, rem)
}

fn poly_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !(y.len() == 1 && y[0].is_zero()) {
        let (_, r) = poly_divmod(&x, &y);
        x = y;
        y = r;
    }
    let lead = x.last().cloned().unwrap_or_else(Rational::one);
    if !lead.is_zero() {
        for c in x.iter_mut() {
            *c /= &lead;
        }
    }
    x
}

fn poly_derivative(p: &[Rational]) -> Vec<Rational> {
    if p.len() <= 1 {
        return vec![Rational::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * int(i as i64))
        .collect()
}

/// Roots of a polynomial (low-to-high coefficients) in floating point, by
/// Durand–Kerner iteration. Used only to propose candidates.
fn approximate_roots(p: &[Rational]) -> Vec<Complex64> {
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n].to_f64().unwrap_or(1.0);
    let c: Vec<f64> = p.iter().map(|x| x.to_f64().unwrap_or(0.0) / lead).collect();
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 0.0);
            }
            let step = eval(zi) / denom;
            roots[i] = zi - step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    roots
}

/// Continued-fraction convergents of `x` with denominators up to `max_den`.
fn convergents(x: f64, max_den: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if !a.is_finite() || a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        out.push(Rational::new(BigInt::from(h2), BigInt::from(k2)));
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - a;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

/// Rational roots with multiplicities; `None` when some root is not rational.
pub fn rational_roots(p: &[Rational]) -> Option<Vec<(Rational, usize)>> {
    let mut poly = p.to_vec();
    poly_trim(&mut poly);
    let degree = poly.len() - 1;
    if degree == 0 {
        return Some(Vec::new());
    }
    let square_free = poly_divmod(&poly, &poly_gcd(&poly, &poly_derivative(&poly))).0;
    let mut found: Vec<Rational> = Vec::new();
    for z in approximate_roots(&square_free) {
        if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
            continue;
        }
        for cand in convergents(z.re, 1_000_000) {
            if poly_eval(&square_free, &cand).is_zero() {
                if !found.contains(&cand) {
                    found.push(cand);
                }
                break;
            }
        }
    }
    let mut out = Vec::new();
    let mut rest = poly;
    for r in found {
        let lin = vec![-r.clone(), Rational::one()];
        let mut mult = 0;
        loop {
            let (q, rem) = poly_divmod(&rest, &lin);
            if rem.iter().all(Zero::is_zero) && rest.len() > 1 {
                rest = q;
                mult += 1;
            } else {
                break;
            }
        }
        out.push((r, mult));
    }
    let total: usize = out.iter().map(|(_, m)| m).sum();
    if total != degree {
        return None;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Some(out)
}

/// Exact integer power of a rational, used by small-denominator checks.
pub fn denominator(q: &Rational) -> BigInt {
    q.denom().clone()
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(rows)
    }

    #[test]
    fn echelon_of_identity_is_identity() {
        let id = Matrix::identity(3);
        assert_eq!(reduced_echelon(&id), id);
    }

    #[test]
    fn echelon_rank_one() {
        let e = reduced_echelon(&m(&[&[2, 4], &[1, 2]]));
        assert_eq!(e.rows(), 2);
        assert_eq!(e.cols(), 1);
        assert_eq!(e.get(0, 0), &int(1));
        assert_eq!(e.get(1, 0), &rat(1, 2));
    }

    #[test]
    fn echelon_of_zero_has_no_columns() {
        let e = reduced_echelon(&Matrix::zeros(3, 2));
        assert_eq!((e.rows(), e.cols()), (3, 0));
    }

    #[test]
    fn kernel_image_examples() {
        let (k, i) = kernel_image(&Matrix::zeros(3, 3));
        assert!(k.is_full());
        assert!(i.is_zero());

        let j = Matrix::jordan_block(2);
        let (k, i) = kernel_image(&j);
        let e1 = Subspace::coordinate(2, &[0]);
        assert_eq!(k, e1);
        assert_eq!(i, e1);

        let inv = m(&[&[1, 2], &[3, 4]]);
        let (k, i) = kernel_image(&inv);
        assert!(k.is_zero());
        assert!(i.is_full());
    }

    #[test]
    fn lattice_examples() {
        let e1 = Subspace::coordinate(2, &[0]);
        let e2 = Subspace::coordinate(2, &[1]);
        assert!(e1.sum(&e2).unwrap().is_full());
        let diag = Subspace::span(2, vec![vec![int(1), int(1)]]);
        assert!(diag.intersect(&e1).unwrap().is_zero());
        assert!(Subspace::full(2).contains(&diag).unwrap());
        assert_eq!(
            e1.sum(&Subspace::zero(3)),
            Err(Error::AmbientMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn induce_examples() {
        let s = Subspace::span(3, vec![vec![int(1), int(2), int(0)]]);
        let r = induce(&Matrix::identity(3), &s, &s, InduceMode::Restrict).unwrap();
        assert_eq!(r, Matrix::identity(1));

        let j = Matrix::jordan_block(2);
        let e1 = Subspace::coordinate(2, &[0]);
        let d = induce(&j, &e1, &e1, InduceMode::Descend).unwrap();
        assert_eq!(d, Matrix::zeros(1, 1));

        let e2 = Subspace::coordinate(2, &[1]);
        assert_eq!(
            induce(&j, &e2, &e2, InduceMode::Restrict),
            Err(Error::NotPreserved)
        );
    }

    #[test]
    fn nilpotency_examples() {
        assert_eq!(nilpotency_index(&Matrix::zeros(3, 3)), Ok(1));
        assert_eq!(nilpotency_index(&Matrix::jordan_block(3)), Ok(3));
        assert_eq!(nilpotency_index(&Matrix::identity(2)), Err(Error::NotNilpotent));
    }

    #[test]
    fn charpoly_and_roots() {
        let a = Matrix::diagonal(&[rat(-1, 2), rat(1, 2)]);
        let p = characteristic_polynomial(&a).unwrap();
        assert_eq!(p, vec![rat(-1, 4), int(0), int(1)]);
        let roots = rational_roots(&p).unwrap();
        assert_eq!(roots, vec![(rat(-1, 2), 1), (rat(1, 2), 1)]);

        let rot = m(&[&[0, -1], &[1, 0]]);
        assert!(rational_roots(&characteristic_polynomial(&rot).unwrap()).is_none());

        let j = &Matrix::jordan_block(4) + &Matrix::scalar(4, &rat(-5, 3));
        let roots = rational_roots(&characteristic_polynomial(&j).unwrap()).unwrap();
        assert_eq!(roots, vec![(rat(-5, 3), 4)]);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn quotient_map_kills_subspace() {
        let s = Subspace::span(3, vec![vec![int(1), int(1), int(0)]]);
        let q = s.quotient_map();
        assert_eq!(q.rows(), 2);
        assert!((&q * s.basis()).is_zero());
        assert_eq!(&q * &s.quotient_section(), Matrix::identity(2));
    }
}
