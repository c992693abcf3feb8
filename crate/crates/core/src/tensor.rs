//! Dense complex matrices for systems of up to four qubits.
//!
//! Basis states are ordered `|q0 q1 ... q(n-1)>` with qubit 0 the most
//! significant bit of the row index, so `|001>` is row 1 and `|100>` is row 4
//! for three qubits.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Default tolerance for matrix equality checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Number of grid points used when the trace-based phase is undefined.
const PHASE_GRID: usize = 1024;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![ONE; dim])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major entries; `data.len()` must be a square.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { left: dim * dim, right: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Convenience constructor for real-valued matrices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = C64::new(v, 0.0);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        self.dim.is_power_of_two().then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { dim: self.dim, data })
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `tr(self^dagger * other)` without forming the product.
    pub fn inner(&self, other: &Self) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims(self, other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |U^dagger U - I|` entry.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.adjoint().matmul(self).expect("square");
        prod.max_abs_diff(&Self::identity(self.dim)).expect("same dim")
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() < tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).map(|d| d < tol).unwrap_or(false)
    }

    /// Row-major text: a header line with the dimension, then one line per row
    /// holding `re im` pairs.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.dim);
        for i in 0..self.dim {
            let row: Vec<String> =
                self.row(i).iter().map(|z| format!("{:.17e} {:.17e}", z.re, z.im)).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { location: "line 1".into(), message: "empty matrix file".into() })?;
        let dim: usize = header.trim().parse().map_err(|_| Error::Parse {
            location: "line 1".into(),
            message: format!("bad dimension `{}`", header.trim()),
        })?;
        let mut data = Vec::with_capacity(dim * dim);
        for (lineno, line) in lines {
            let loc = || format!("line {}", lineno + 1);
            let values: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse { location: loc(), message: e.to_string() })?;
            if values.len() != 2 * dim {
                return Err(Error::Parse {
                    location: loc(),
                    message: format!("expected {} numbers, found {}", 2 * dim, values.len()),
                });
            }
            data.extend(values.chunks(2).map(|p| C64::new(p[0], p[1])));
        }
        Self::from_row_major(dim, data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on dimension mismatch; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn check_dims(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { left: a.dim, right: b.dim });
    }
    Ok(())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let mut out = ComplexMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors.into_iter().fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Bit mask of qubit `q` inside an `n`-qubit row index.
#[inline]
pub fn qubit_mask(q: usize, n: usize) -> usize {
    1 << (n - 1 - q)
}

/// Spin sign of qubit `q` in basis state `state`: +1 for |0>, -1 for |1>.
#[inline]
pub fn spin_sign(state: usize, q: usize, n: usize) -> f64 {
    if state & qubit_mask(q, n) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn check_qubits(qubits: &[usize], n: usize) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: n });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

/// Embeds `g` acting on `qubits` (in the order given, first index most
/// significant within `g`) into the full `n`-qubit space.
pub fn embed(g: &ComplexMatrix, qubits: &[usize], n: usize) -> Result<ComplexMatrix> {
    check_qubits(qubits, n)?;
    let k = qubits.len();
    if g.dim != 1 << k {
        return Err(Error::DimensionMismatch { left: g.dim, right: 1 << k });
    }
    let full = 1usize << n;
    let masks: Vec<usize> = qubits.iter().map(|&q| qubit_mask(q, n)).collect();
    let support: usize = masks.iter().fold(0, |acc, m| acc | m);
    let local = |x: usize| {
        masks.iter().fold(0usize, |acc, &m| (acc << 1) | usize::from(x & m != 0))
    };
    let mut out = ComplexMatrix::zeros(full);
    for r in 0..full {
        let lr = local(r);
        for c in 0..full {
            if r & !support != c & !support {
                continue;
            }
            out[(r, c)] = g[(lr, local(c))];
        }
    }
    Ok(out)
}

/// Elementwise absolute-difference sum `Σ |f_ij - g_ij|`.
pub fn raw_distance(f: &ComplexMatrix, g: &ComplexMatrix) -> Result<f64> {
    check_dims(f, g)?;
    Ok(f.data.iter().zip(&g.data).map(|(a, b)| (a - b).norm()).sum())
}

fn phased_distance(f: &ComplexMatrix, g: &ComplexMatrix, theta: f64) -> f64 {
    let w = C64::from_polar(1.0, theta);
    f.data.iter().zip(&g.data).map(|(a, b)| (a - w * b).norm()).sum()
}

/// Result of aligning `g` to `f` by a global phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAlignment {
    pub distance: f64,
    /// Phase `θ` such that `e^{iθ} g` is compared against `f`.
    pub phase: f64,
}

/// Distance between `f` and `e^{iθ} g` with `θ = arg tr(g^dagger f)`.
///
/// The unaligned comparison (`θ = 0`) is kept when it is not worse, so the
/// result never exceeds [`raw_distance`]. A vanishing trace falls back to a
/// uniform grid over `θ`.
pub fn phase_alignment(f: &ComplexMatrix, g: &ComplexMatrix) -> Result<PhaseAlignment> {
    check_dims(f, g)?;
    let overlap = g.inner(f);
    let scale = f.frobenius_norm() * g.frobenius_norm();
    let raw = phased_distance(f, g, 0.0);
    let mut best = PhaseAlignment { distance: raw, phase: 0.0 };
    if overlap.norm() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        let theta = overlap.arg();
        let d = phased_distance(f, g, theta);
        if d <= raw {
            best = PhaseAlignment { distance: d, phase: theta };
        }
    } else {
        for k in 1..PHASE_GRID {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / PHASE_GRID as f64;
            let d = phased_distance(f, g, theta);
            if d < best.distance {
                best = PhaseAlignment { distance: d, phase: theta };
            }
        }
    }
    Ok(best)
}

/// Global-phase-invariant version of [`raw_distance`].
pub fn phase_aligned_distance(f: &ComplexMatrix, g: &ComplexMatrix) -> Result<f64> {
    phase_alignment(f, g).map(|a| a.distance)
}

/// Dense matrix exponential by scaling and squaring with a Taylor series.
///
/// Intended for checking the closed-form exponentials elsewhere in the crate.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let norm: f64 = (0..a.dim)
        .map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
    let mut result = ComplexMatrix::identity(a.dim);
    let mut term = ComplexMatrix::identity(a.dim);
    for k in 1..=24 {
        term = (&term * &scaled).scale(C64::new(1.0 / k as f64, 0.0));
        result = result.add(&term).expect("same dim");
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}
