//! Dense matrices over GF(p) with exact arithmetic.
//!
//! Entries are residues stored row-major and reduced after every ring
//! operation. The characteristic polynomial uses the Berkowitz iteration,
//! which is division-free and therefore valid over every prime field,
//! including GF(2).

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Residue};

/// Dense matrix over GF(p); every entry lies in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Residue>,
    field: FieldSpec,
}

/// Structural flags of a square matrix, decided exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixFlags {
    /// T 1 = 1
    pub row_stochastic: bool,
    /// det(T) != 0
    pub invertible: bool,
    /// binary with exactly one 1 per row and per column
    pub permutation: bool,
    /// T^N = 0, decided by repeated squaring
    pub nilpotent: bool,
    pub identity: bool,
}

impl FMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Residue>, field: FieldSpec) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(&e) = entries.iter().find(|&&e| e >= field.p()) {
            return Err(Error::Shape(format!(
                "entry {e} out of range for GF({})",
                field.p()
            )));
        }
        Ok(FMatrix {
            rows,
            cols,
            entries,
            field,
        })
    }

    /// Builds a matrix from per-row slices, reducing nothing: entries must
    /// already be residues.
    pub fn from_rows(rows: &[Vec<Residue>], field: FieldSpec) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        FMatrix::new(r, c, rows.concat(), field)
    }

    pub fn zeros(rows: usize, cols: usize, field: FieldSpec) -> Self {
        FMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
            field,
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = FMatrix::zeros(n, n, field);
        for i in 0..n {
            m[(i, i)] = 1 % field.p();
        }
        m
    }

    /// All-ones column vector `1_N`.
    pub fn ones_col(n: usize, field: FieldSpec) -> Self {
        FMatrix {
            rows: n,
            cols: 1,
            entries: vec![1 % field.p(); n],
            field,
        }
    }

    /// Standard basis column vector `e_i` (0-indexed).
    pub fn basis_col(n: usize, i: usize, field: FieldSpec) -> Self {
        assert!(i < n, "basis index out of range");
        let mut m = FMatrix::zeros(n, 1, field);
        m[(i, 0)] = 1 % field.p();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn entries(&self) -> &[Residue] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Residue] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Residue> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    fn require_square(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "expected square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.rows)
    }

    fn require_same_field(&self, other: &FMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.p(), other.field.p()));
        }
        Ok(())
    }

    pub fn transpose(&self) -> FMatrix {
        let mut t = FMatrix::zeros(self.cols, self.rows, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn add(&self, other: &FMatrix) -> Result<FMatrix> {
        self.require_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "add: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(FMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
            field: f,
        })
    }

    pub fn sub(&self, other: &FMatrix) -> Result<FMatrix> {
        self.require_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "sub: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(FMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
            field: f,
        })
    }

    pub fn scale(&self, c: Residue) -> FMatrix {
        let f = self.field;
        let entries = self.entries.iter().map(|&a| f.mul(a, c)).collect();
        FMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
            field: f,
        }
    }

    pub fn matmul(&self, other: &FMatrix) -> Result<FMatrix> {
        self.require_same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "matmul: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = FMatrix::zeros(self.rows, other.cols, f);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = f.add(out[(i, j)], f.mul(a, other[(k, j)]));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `T v` for a plain residue slice.
    pub fn mat_vec(&self, v: &[Residue]) -> Result<Vec<Residue>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "mat_vec: {}x{} * vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &x)| f.add(acc, f.mul(a, x)))
            })
            .collect())
    }

    /// Row-vector-matrix product `v T`.
    pub fn vec_mat(&self, v: &[Residue]) -> Result<Vec<Residue>> {
        if v.len() != self.rows {
            return Err(Error::Shape(format!(
                "vec_mat: vector of length {} * {}x{}",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let f = self.field;
        Ok((0..self.cols)
            .map(|j| {
                (0..self.rows).fold(0, |acc, i| f.add(acc, f.mul(v[i], self[(i, j)])))
            })
            .collect())
    }

    /// `T^k` by repeated squaring.
    pub fn pow(&self, mut k: u64) -> Result<FMatrix> {
        let n = self.require_square()?;
        let mut acc = FMatrix::identity(n, self.field);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.matmul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self[(i, j)] == if i == j { 1 % self.field.p() } else { 0 })
            })
    }

    pub fn is_row_stochastic(&self) -> bool {
        let f = self.field;
        (0..self.rows)
            .all(|i| self.row(i).iter().fold(0, |acc, &e| f.add(acc, e)) == 1 % f.p())
    }

    pub fn is_permutation(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let mut col_seen = vec![false; n];
        for i in 0..n {
            let mut row_ones = 0;
            for j in 0..n {
                match self[(i, j)] {
                    0 => {}
                    1 => {
                        row_ones += 1;
                        if col_seen[j] {
                            return false;
                        }
                        col_seen[j] = true;
                    }
                    _ => return false,
                }
            }
            if row_ones != 1 {
                return false;
            }
        }
        true
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.is_square()
            && (1..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == 0))
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == 0))
    }

    /// T^T T = I, the rejection test of the sampling generator.
    pub fn is_orthogonal(&self) -> Result<bool> {
        let n = self.require_square()?;
        let prod = self.transpose().matmul(self)?;
        Ok(prod == FMatrix::identity(n, self.field))
    }

    /// `T^N = 0`, decided by repeated squaring up to an exponent >= N.
    pub fn is_nilpotent(&self) -> Result<bool> {
        let n = self.require_square()?;
        if n == 0 {
            return Ok(true);
        }
        let mut pw = self.clone();
        let mut exp = 1usize;
        while exp < n {
            pw = pw.matmul(&pw)?;
            exp *= 2;
        }
        Ok(pw.is_zero())
    }

    /// Determinant by Gaussian elimination with partial (nonzero) pivoting.
    pub fn det(&self) -> Result<Residue> {
        let n = self.require_square()?;
        let f = self.field;
        let mut a = self.clone();
        let mut det = 1 % f.p();
        for k in 0..n {
            let pivot_row = (k..n).find(|&i| a[(i, k)] != 0);
            let Some(pr) = pivot_row else {
                return Ok(0);
            };
            if pr != k {
                a.swap_rows(pr, k);
                det = f.neg(det);
            }
            let pivot = a[(k, k)];
            det = f.mul(det, pivot);
            let pinv = f.inv(pivot)?;
            for i in k + 1..n {
                let factor = f.mul(a[(i, k)], pinv);
                if factor == 0 {
                    continue;
                }
                for j in k..n {
                    let sub = f.mul(factor, a[(k, j)]);
                    a[(i, j)] = f.sub(a[(i, j)], sub);
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<FMatrix> {
        let n = self.require_square()?;
        let f = self.field;
        let mut a = self.clone();
        let mut inv = FMatrix::identity(n, f);
        for k in 0..n {
            let pivot_row = (k..n).find(|&i| a[(i, k)] != 0);
            let Some(pr) = pivot_row else {
                return Err(Error::SingularMatrix(f.p()));
            };
            if pr != k {
                a.swap_rows(pr, k);
                inv.swap_rows(pr, k);
            }
            let pinv = f.inv(a[(k, k)])?;
            for j in 0..n {
                a[(k, j)] = f.mul(a[(k, j)], pinv);
                inv[(k, j)] = f.mul(inv[(k, j)], pinv);
            }
            for i in 0..n {
                if i == k || a[(i, k)] == 0 {
                    continue;
                }
                let factor = a[(i, k)];
                for j in 0..n {
                    let s1 = f.mul(factor, a[(k, j)]);
                    a[(i, j)] = f.sub(a[(i, j)], s1);
                    let s2 = f.mul(factor, inv[(k, j)]);
                    inv[(i, j)] = f.sub(inv[(i, j)], s2);
                }
            }
        }
        Ok(inv)
    }

    /// Monic characteristic polynomial by the Berkowitz iteration
    /// (division-free, valid over GF(2) as well).
    pub fn char_poly(&self) -> Result<CharPoly> {
        let n = self.require_square()?;
        let f = self.field;
        if n == 0 {
            return Ok(CharPoly {
                coeffs: vec![1 % f.p()],
                field: f,
            });
        }
        // c holds the coefficients of the leading r x r principal
        // submatrix's characteristic polynomial, degree-descending.
        let mut c = vec![1 % f.p(), f.neg(self[(0, 0)])];
        for r in 2..=n {
            // Partition the leading r x r block as [M S; R a_rr].
            let s: Vec<Residue> = (0..r - 1).map(|i| self[(i, r - 1)]).collect();
            let rvec: Vec<Residue> = (0..r - 1).map(|j| self[(r - 1, j)]).collect();
            let a_rr = self[(r - 1, r - 1)];

            // First column of the (r+1) x r Toeplitz factor:
            // [1, -a_rr, -(R S), -(R M S), ..., -(R M^{r-2} S)].
            let mut t = Vec::with_capacity(r + 1);
            t.push(1 % f.p());
            t.push(f.neg(a_rr));
            let mut ms = s.clone();
            for _ in 0..r - 1 {
                let dot = rvec
                    .iter()
                    .zip(&ms)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
                t.push(f.neg(dot));
                // ms <- M ms, M the leading (r-1) x (r-1) block
                let next: Vec<Residue> = (0..r - 1)
                    .map(|i| {
                        (0..r - 1).fold(0, |acc, j| f.add(acc, f.mul(self[(i, j)], ms[j])))
                    })
                    .collect();
                ms = next;
            }
            t.truncate(r + 1);

            let mut next_c = vec![0; r + 1];
            for (i, slot) in next_c.iter_mut().enumerate() {
                let mut acc = 0;
                for (j, &cj) in c.iter().enumerate().take(i + 1) {
                    if i - j < t.len() {
                        acc = f.add(acc, f.mul(t[i - j], cj));
                    }
                }
                *slot = acc;
            }
            c = next_c;
        }
        Ok(CharPoly {
            coeffs: c,
            field: f,
        })
    }

    /// Basis of the left null space `{v : v T = 0}`, each vector scaled so
    /// its first nonzero entry is 1. Empty when T is nonsingular.
    pub fn left_nullspace(&self) -> Result<Vec<Vec<Residue>>> {
        let n = self.require_square()?;
        let f = self.field;
        // v T = 0  <=>  T^T v^T = 0; reduce T^T and read off free variables.
        let mut a = self.transpose();
        let mut pivot_cols = Vec::new();
        let mut row = 0usize;
        for col in 0..n {
            let Some(pr) = (row..n).find(|&i| a[(i, col)] != 0) else {
                continue;
            };
            a.swap_rows(pr, row);
            let pinv = f.inv(a[(row, col)])?;
            for j in 0..n {
                a[(row, j)] = f.mul(a[(row, j)], pinv);
            }
            for i in 0..n {
                if i == row || a[(i, col)] == 0 {
                    continue;
                }
                let factor = a[(i, col)];
                for j in 0..n {
                    let s = f.mul(factor, a[(row, j)]);
                    a[(i, j)] = f.sub(a[(i, j)], s);
                }
            }
            pivot_cols.push(col);
            row += 1;
            if row == n {
                break;
            }
        }
        let mut basis = Vec::new();
        for free in 0..n {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![0; n];
            v[free] = 1 % f.p();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = f.neg(a[(r, free)]);
            }
            normalize_leading_one(&mut v, f);
            basis.push(v);
        }
        Ok(basis)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &FMatrix) -> Result<FMatrix> {
        self.require_same_field(other)?;
        let f = self.field;
        let mut out = FMatrix::zeros(self.rows * other.rows, self.cols * other.cols, f);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = f.mul(a, other[(k, l)]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// All structural flags at once.
    pub fn classify(&self) -> Result<MatrixFlags> {
        self.require_square()?;
        Ok(MatrixFlags {
            row_stochastic: self.is_row_stochastic(),
            invertible: self.det()? != 0,
            permutation: self.is_permutation(),
            nilpotent: self.is_nilpotent()?,
            identity: self.is_identity(),
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Scales `v` so its first nonzero entry is 1.
pub(crate) fn normalize_leading_one(v: &mut [Residue], f: FieldSpec) {
    if let Some(&lead) = v.iter().find(|&&e| e != 0) {
        if lead != 1 {
            let inv = f.inv(lead).expect("nonzero residue");
            for e in v.iter_mut() {
                *e = f.mul(*e, inv);
            }
        }
    }
}

impl Index<(usize, usize)> for FMatrix {
    type Output = Residue;
    fn index(&self, (i, j): (usize, usize)) -> &Residue {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for FMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Residue {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for FMatrix {
    /// Shared matrix text format: `p ROWS COLS` header, then one line per row.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(out, "{} {} {}", self.field.p(), self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Monic characteristic polynomial; `coeffs[0] = 1`, ordered from the
/// leading power of lambda down to the constant term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPoly {
    coeffs: Vec<Residue>,
    field: FieldSpec,
}

impl CharPoly {
    pub fn from_coeffs(coeffs: Vec<Residue>, field: FieldSpec) -> Result<Self> {
        if coeffs.is_empty() || coeffs[0] != 1 % field.p() {
            return Err(Error::Shape("characteristic polynomial must be monic".into()));
        }
        if coeffs.iter().any(|&c| c >= field.p()) {
            return Err(Error::Shape("coefficient out of range".into()));
        }
        Ok(CharPoly { coeffs, field })
    }

    pub fn coeffs(&self) -> &[Residue] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// `lambda^n`: the spectrum of a nilpotent matrix.
    pub fn is_lambda_power(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// `(lambda - 1) lambda^{N-1}`, the spectrum an admissible graph
    /// matrix must have.
    pub fn consensus_spectrum(n: usize, field: FieldSpec) -> Self {
        let mut coeffs = vec![0; n + 1];
        coeffs[0] = 1 % field.p();
        if n >= 1 {
            coeffs[1] = field.neg(1 % field.p());
        }
        CharPoly { coeffs, field }
    }

    /// `lambda (lambda - 1)^{N-1}`, the matching Laplacian spectrum.
    pub fn laplacian_spectrum(n: usize, field: FieldSpec) -> Self {
        let f = field;
        // (lambda - 1)^{N-1}, degree-descending, then shift by one power.
        let mut poly = vec![1 % f.p()];
        for _ in 0..n.saturating_sub(1) {
            let mut next = vec![0; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i] = f.add(next[i], c);
                next[i + 1] = f.sub(next[i + 1], c);
            }
            poly = next;
        }
        poly.push(0);
        CharPoly {
            coeffs: poly,
            field: f,
        }
    }

    /// Multiplies by `lambda^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(coeffs.len() + k, 0);
        CharPoly {
            coeffs,
            field: self.field,
        }
    }

    /// Polynomial product over GF(p).
    pub fn mul(&self, other: &CharPoly) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.p(), other.field.p()));
        }
        let f = self.field;
        let mut coeffs = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Ok(CharPoly {
            coeffs,
            field: f,
        })
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let pow = n - i;
            let term = match (c, pow) {
                (_, 0) => format!("{c}"),
                (1, 1) => "x".to_string(),
                (1, _) => format!("x^{pow}"),
                (_, 1) => format!("{c}x"),
                (_, _) => format!("{c}x^{pow}"),
            };
            terms.push(term);
        }
        if terms.is_empty() {
            terms.push("0".to_string());
        }
        write!(out, "{}", terms.join(" + "))
    }
}
