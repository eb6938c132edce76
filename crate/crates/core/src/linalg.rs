//! Dense complex matrices and the small eigensolvers used by the measures.
//!
//! Hermitian problems use cyclic complex Jacobi rotations. General problems are
//! reduced to upper Hessenberg form with Householder reflectors and then
//! iterated with single-shift (Wilkinson) QR steps built from Givens rotations.
//! Both are sized for the 4x4 and 16x16 matrices that show up here and refuse
//! anything larger than [`MAX_EIGEN_DIM`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::{Error, Result, C64};

pub const MAX_EIGEN_DIM: usize = 64;

/// Inputs to [`hermitian_eigs`] may deviate from Hermitian by this much.
pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
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

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut m = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    m.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(m)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise distance; `f64::INFINITY` when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn determinant(&self) -> Result<C64> {
        require_square(self)?;
        let n = self.rows;
        let mut a = self.clone();
        let mut det = ONE;
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap_or(k);
            if a[(pivot, k)] == ZERO {
                return Ok(ZERO);
            }
            if pivot != k {
                for j in 0..n {
                    a.data.swap(k * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[(k, k)];
            det *= p;
            for i in k + 1..n {
                let f = a[(i, k)] / p;
                if f == ZERO {
                    continue;
                }
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        Ok(det)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs).expect("matrix shapes must agree")
    }
}

/// Prints aligned `re+imi` pairs, one row per line.
impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

fn require_square(m: &DenseMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    Ok(())
}

fn require_eigen_size(m: &DenseMatrix) -> Result<()> {
    require_square(m)?;
    if m.rows > MAX_EIGEN_DIM {
        return Err(Error::Shape(format!(
            "eigensolvers are capped at {MAX_EIGEN_DIM}x{MAX_EIGEN_DIM}, got {}x{}",
            m.rows, m.rows
        )));
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: DenseMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> DenseMatrix {
        let lambda: Vec<C64> = self.values.iter().map(|&x| C64::new(x, 0.0)).collect();
        let v = &self.vectors;
        &(v * &DenseMatrix::diagonal(&lambda)) * &v.adjoint()
    }
}

/// Cyclic complex Jacobi. The input is symmetrized as `(m + m^H)/2` first.
pub fn hermitian_eigs(m: &DenseMatrix) -> Result<HermitianEigen> {
    require_eigen_size(m)?;
    let scale = m.max_abs().max(1.0);
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::Shape(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    let n = m.rows;
    let mut a = (m + &m.adjoint()).scale(C64::new(0.5, 0.0));
    let mut v = DenseMatrix::identity(n);

    let total = a.frobenius_norm();
    let max_sweeps = 100;
    let mut converged = n <= 1;
    for _ in 0..max_sweeps {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * total || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::Convergence(max_sweeps));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, col)] = v[(r, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// One rotation zeroing `a[(p, q)]`: `a <- U^H a U`, `v <- v U`.
fn jacobi_rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let n = a.rows;
    // phase u makes the (p, q) entry real after conjugating by diag(1, u*)
    let u = apq / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let upp = C64::new(c, 0.0);
    let upq = C64::new(s, 0.0);
    let uqp = -u.conj() * s;
    let uqq = u.conj() * c;

    for r in 0..n {
        let (x, y) = (a[(r, p)], a[(r, q)]);
        a[(r, p)] = x * upp + y * uqp;
        a[(r, q)] = x * upq + y * uqq;
    }
    for col in 0..n {
        let (x, y) = (a[(p, col)], a[(q, col)]);
        a[(p, col)] = upp.conj() * x + uqp.conj() * y;
        a[(q, col)] = upq.conj() * x + uqq.conj() * y;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for r in 0..n {
        let (x, y) = (v[(r, p)], v[(r, q)]);
        v[(r, p)] = x * upp + y * uqp;
        v[(r, q)] = x * upq + y * uqq;
    }
}

/// Reduces `m` to upper Hessenberg form by unitary similarity.
pub fn hessenberg(m: &DenseMatrix) -> Result<DenseMatrix> {
    require_square(m)?;
    let n = m.rows;
    let mut a = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0] == ZERO {
            ONE
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        // left: a[k+1.., :] -= 2 v (v^H a[k+1.., :])
        for j in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * a[(k + 1 + i, j)])
                .sum();
            for (i, vi) in v.iter().enumerate() {
                a[(k + 1 + i, j)] -= 2.0 * vi * dot;
            }
        }
        // right: a[:, k+1..] -= 2 (a[:, k+1..] v) v^H
        for r in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| a[(r, k + 1 + i)] * vi)
                .sum();
            for (i, vi) in v.iter().enumerate() {
                a[(r, k + 1 + i)] -= 2.0 * dot * vi.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
    Ok(a)
}

/// Eigenvalues of a general complex square matrix (multiset, no particular order).
///
/// Hessenberg reduction followed by shifted QR with deflation. Fails with
/// [`Error::Convergence`] after `100 * n` QR sweeps.
pub fn general_eigs(m: &DenseMatrix) -> Result<Vec<C64>> {
    require_eigen_size(m)?;
    let n = m.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(m)?;
    let mut eigs = vec![ZERO; n];
    let max_sweeps = 100 * n;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;

    loop {
        if hi == 0 {
            eigs[0] = h[(0, 0)];
            break;
        }
        // find the start of the trailing unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let diag = if diag == 0.0 { h.max_abs() } else { diag };
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if sweeps >= max_sweeps {
            return Err(Error::Convergence(sweeps));
        }
        sweeps += 1;
        since_deflation += 1;

        let shift = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(0.75, 0.4) * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(eigs)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Explicit shifted QR step on the active block `lo..=hi` of a Hessenberg matrix.
fn qr_step(h: &mut DenseMatrix, lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (ONE, ZERO)
        } else {
            (a / r, b / r)
        };
        for j in k..=hi {
            let (x, y) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = c.conj() * x + s.conj() * y;
            h[(k + 1, j)] = -s * x + c * y;
        }
        rotations.push((c, s));
    }
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + idx;
        for r in lo..=(k + 1).min(hi) {
            let (x, y) = (h[(r, k)], h[(r, k + 1)]);
            h[(r, k)] = x * c + y * s;
            h[(r, k + 1)] = -x * s.conj() + y * c.conj();
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial transpose of a `(dA*dB) x (dA*dB)` matrix over one tensor factor.
pub fn partial_transpose(
    m: &DenseMatrix,
    dims: (usize, usize),
    subsystem: Subsystem,
) -> Result<DenseMatrix> {
    let (da, db) = dims;
    let n = da * db;
    if m.rows != n || m.cols != n {
        return Err(Error::Shape(format!(
            "partial transpose over ({da},{db}) needs {n}x{n}, got {}x{}",
            m.rows, m.cols
        )));
    }
    let mut out = DenseMatrix::zeros(n, n);
    for ia in 0..da {
        for ib in 0..db {
            for ja in 0..da {
                for jb in 0..db {
                    let (row, col) = match subsystem {
                        Subsystem::B => (ia * db + jb, ja * db + ib),
                        Subsystem::A => (ja * db + ib, ia * db + jb),
                    };
                    out[(row, col)] = m[(ia * db + ib, ja * db + jb)];
                }
            }
        }
    }
    Ok(out)
}

/// Traces out tensor factor `factor` of a matrix over `dims[0] x dims[1] x ...`
/// (row-major, first factor most significant).
pub fn trace_out_factor(m: &DenseMatrix, dims: &[usize], factor: usize) -> Result<DenseMatrix> {
    let n: usize = dims.iter().product();
    if m.rows != n || m.cols != n {
        return Err(Error::Shape(format!(
            "factor dims {dims:?} need {n}x{n}, got {}x{}",
            m.rows, m.cols
        )));
    }
    if factor >= dims.len() {
        return Err(Error::Domain(format!(
            "factor {factor} out of range for {} factors",
            dims.len()
        )));
    }
    let d = dims[factor];
    let inner: usize = dims[factor + 1..].iter().product();
    let outer: usize = dims[..factor].iter().product();
    let reduced = outer * inner;
    let mut out = DenseMatrix::zeros(reduced, reduced);
    for o1 in 0..outer {
        for i1 in 0..inner {
            for o2 in 0..outer {
                for i2 in 0..inner {
                    let mut acc = ZERO;
                    for k in 0..d {
                        acc += m[((o1 * d + k) * inner + i1, (o2 * d + k) * inner + i2)];
                    }
                    out[(o1 * inner + i1, o2 * inner + i2)] = acc;
                }
            }
        }
    }
    Ok(out)
}

/// Greedy nearest-match of two eigenvalue multisets. Returns the worst
/// distance between matched pairs, or infinity when sizes differ.
pub fn multiset_distance(got: &[C64], expected: &[C64]) -> f64 {
    if got.len() != expected.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; got.len()];
    let mut worst = 0.0f64;
    for e in expected {
        let best = got
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .min_by(|(_, a), (_, b)| (*a - e).norm().total_cmp(&(*b - e).norm()));
        match best {
            Some((i, g)) => {
                used[i] = true;
                worst = worst.max((g - e).norm());
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn reals(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn identity_spectrum() {
        let e = hermitian_eigs(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(e.values.len(), 4);
        for v in e.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = hermitian_eigs(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&x) < 1e-14);
    }

    #[test]
    fn pauli_y_needs_complex_rotation() {
        let y = DenseMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigs(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&y) < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigs(&m), Err(Error::Shape(_))));
        let r = DenseMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigs(&r), Err(Error::Shape(_))));
        assert!(matches!(general_eigs(&r), Err(Error::Shape(_))));
    }

    #[test]
    fn general_diagonal() {
        let m = DenseMatrix::diagonal(&[c(2.0, 1.0), c(-3.0, 0.0)]);
        let e = general_eigs(&m).unwrap();
        assert!(multiset_distance(&e, &[c(2.0, 1.0), c(-3.0, 0.0)]) < 1e-14);
    }

    #[test]
    fn general_companion_matrix() {
        // lambda^2 + 3 lambda + 2 = 0
        let m = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[-2.0, -3.0]]).unwrap();
        let e = general_eigs(&m).unwrap();
        assert!(multiset_distance(&e, &reals(&[-1.0, -2.0])) < 1e-12);
    }

    #[test]
    fn general_rotation_has_complex_pair() {
        let m = DenseMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        let e = general_eigs(&m).unwrap();
        assert!(multiset_distance(&e, &[c(0.0, 1.0), c(0.0, -1.0)]) < 1e-12);
    }

    #[test]
    fn general_jordan_block() {
        let m =
            DenseMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[0.0, 0.0, 1.0]])
                .unwrap();
        let e = general_eigs(&m).unwrap();
        assert!(multiset_distance(&e, &reals(&[1.0, 1.0, 1.0])) < 1e-12);
    }

    #[test]
    fn hessenberg_preserves_spectrum_and_shape() {
        let m = DenseMatrix::from_real_rows(&[
            &[4.0, 1.0, -2.0, 2.0],
            &[1.0, 2.0, 0.0, 1.0],
            &[-2.0, 0.0, 3.0, -2.0],
            &[2.0, 1.0, -2.0, -1.0],
        ])
        .unwrap();
        let h = hessenberg(&m).unwrap();
        for i in 2..4 {
            for j in 0..i - 1 {
                assert_eq!(h[(i, j)], ZERO);
            }
        }
        assert!((h.trace() - m.trace()).norm() < 1e-12);
        let dm = m.determinant().unwrap();
        let dh = h.determinant().unwrap();
        assert!((dm - dh).norm() < 1e-10 * dm.norm().max(1.0));
    }

    #[test]
    fn determinant_small_cases() {
        let m = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[-2.0, -3.0]]).unwrap();
        assert!((m.determinant().unwrap() - c(2.0, 0.0)).norm() < 1e-14);
        let s = DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(s.determinant().unwrap().norm() < 1e-14);
    }

    #[test]
    fn partial_transpose_involution_and_bell() {
        let s = 0.5f64.sqrt();
        let phi = reals(&[s, 0.0, 0.0, s]);
        let rho = DenseMatrix::outer(&phi);
        let pt = partial_transpose(&rho, (2, 2), Subsystem::B).unwrap();
        let back = partial_transpose(&pt, (2, 2), Subsystem::B).unwrap();
        assert_eq!(back, rho);
        assert_eq!(pt.trace(), rho.trace());
        let e = hermitian_eigs(&pt).unwrap();
        let expect = [-0.5, 0.5, 0.5, 0.5];
        for (g, x) in e.values.iter().zip(expect) {
            assert!((g - x).abs() < 1e-12);
        }
        let pta = partial_transpose(&rho, (2, 2), Subsystem::A).unwrap();
        assert!(pta.max_abs_diff(&pt.transpose()) < 1e-15);
    }

    #[test]
    fn partial_transpose_shape_error() {
        let m = DenseMatrix::identity(4);
        assert!(matches!(
            partial_transpose(&m, (2, 3), Subsystem::B),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn product_state_spectrum_unchanged_by_partial_transpose() {
        let a = DenseMatrix::from_real_rows(&[&[0.7, 0.2], &[0.2, 0.3]]).unwrap();
        let b = DenseMatrix::from_rows(&[
            vec![c(0.6, 0.0), c(0.1, 0.2)],
            vec![c(0.1, -0.2), c(0.4, 0.0)],
        ])
        .unwrap();
        let rho = a.kron(&b);
        let pt = partial_transpose(&rho, (2, 2), Subsystem::B).unwrap();
        let e1 = hermitian_eigs(&rho).unwrap().values;
        let e2 = hermitian_eigs(&pt).unwrap().values;
        for (x, y) in e1.iter().zip(&e2) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_out_factor_of_product() {
        let a = DenseMatrix::from_real_rows(&[&[0.7, 0.0], &[0.0, 0.3]]).unwrap();
        let b = DenseMatrix::diagonal(&reals(&[0.2, 0.3, 0.5]));
        let ab = a.kron(&b);
        let ra = trace_out_factor(&ab, &[2, 3], 1).unwrap();
        let rb = trace_out_factor(&ab, &[2, 3], 0).unwrap();
        assert!(ra.max_abs_diff(&a) < 1e-15);
        assert!(rb.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn oversized_matrix_refused() {
        let m = DenseMatrix::identity(MAX_EIGEN_DIM + 1);
        assert!(matches!(general_eigs(&m), Err(Error::Shape(_))));
    }
}
