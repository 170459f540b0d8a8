//! Dense symmetric and symmetric-definite eigensolvers.
//!
//! Householder tridiagonalization followed by the implicit-shift QL
//! iteration, after the EISPACK `tred2`/`tql2` pair. The discretized mode
//! problems are already tridiagonal with a diagonal mass matrix, so they go
//! through [`sym_tridiagonal_generalized_eig`], which skips the reduction and
//! recovers only the requested eigenvectors by inverse iteration.

use serde::{Deserialize, Serialize};

use crate::discretize::BoundaryCondition;
use crate::error::{Error, Result};

/// Square dense matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from rows; panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix rows must form a square");
            data.extend_from_slice(r);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `uᵀ A v`.
    pub fn form(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(self.mul_vec(v)).map(|(a, b)| a * b).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `max |A_ij - A_ji| / max |A_ij|`.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / scale
    }

    fn require_symmetric(&self, tol: f64) -> Result<()> {
        let asym = self.asymmetry();
        if asym > tol {
            Err(Error::NotSymmetric(asym))
        } else {
            Ok(())
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples entries `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        let expected = diag.len().saturating_sub(1);
        if off.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: off.len(),
            });
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.off[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    /// `uᵀ A v`.
    pub fn form(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(self.mul_vec(v)).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        m
    }

    /// Largest absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues and eigenvectors of a symmetric (generalized) problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Fourier mode of each eigenvalue.
    pub modes: Vec<u32>,
    /// Eigenvectors of the lowest eigenvalues, in the same order. May hold
    /// fewer vectors than there are eigenvalues.
    pub eigenvectors: Vec<Vec<f64>>,
    pub bc: Option<BoundaryCondition>,
    /// Grid size (number of intervals) the spectrum was computed on.
    pub n: usize,
    /// Observed convergence order of each eigenvalue, when a grid study was
    /// run.
    pub order: Vec<Option<f64>>,
}

/// A cluster of numerically equal eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multiplet {
    pub value: f64,
    pub multiplicity: usize,
    pub modes: Vec<u32>,
}

impl SpectrumResult {
    pub(crate) fn from_values(eigenvalues: Vec<f64>, eigenvectors: Vec<Vec<f64>>) -> Self {
        let len = eigenvalues.len();
        Self {
            eigenvalues,
            modes: vec![0; len],
            eigenvectors,
            bc: None,
            n: len,
            order: vec![None; len],
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Groups eigenvalues equal within `1e-9 (1 + |λ|)`.
    pub fn multiplets(&self) -> Vec<Multiplet> {
        group_multiplets(&self.eigenvalues, &self.modes, 1e-9)
    }
}

pub(crate) fn group_multiplets(values: &[f64], modes: &[u32], rel: f64) -> Vec<Multiplet> {
    let mut out: Vec<Multiplet> = Vec::new();
    for (&v, &m) in values.iter().zip(modes) {
        match out.last_mut() {
            Some(last) if (v - last.value).abs() <= rel * (1.0 + last.value.abs()) => {
                last.multiplicity += 1;
                if !last.modes.contains(&m) {
                    last.modes.push(m);
                }
            }
            _ => out.push(Multiplet {
                value: v,
                multiplicity: 1,
                modes: vec![m],
            }),
        }
    }
    out
}

/// Result of counting eigenvalues below a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Count {
    pub count: usize,
    /// False when some eigenvalue lies within the guard band, where the
    /// grid resolution cannot decide which side it falls on.
    pub certified: bool,
}

/// Number of eigenvalues strictly below `threshold`, with guard-band
/// certification.
pub fn count_below(values: &[f64], threshold: f64, guard: f64) -> Count {
    Count {
        count: values.iter().filter(|&&v| v < threshold).count(),
        certified: values.iter().all(|&v| (v - threshold).abs() > guard),
    }
}

/// Full spectrum of a dense symmetric matrix; eigenvectors are orthonormal
/// columns returned as vectors.
pub fn sym_eig(a: &Matrix) -> Result<SpectrumResult> {
    a.require_symmetric(1e-12)?;
    let n = a.dim();
    if n == 0 {
        return Ok(SpectrumResult::from_values(vec![], vec![]));
    }
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    householder_tridiagonalize(&mut v, &mut d, &mut e);
    ql_implicit(&mut d, &mut e, Some(&mut v))?;
    let vectors = (0..n).map(|j| (0..n).map(|i| v[i][j]).collect()).collect();
    let (values, vectors) = sort_pairs(d, vectors);
    Ok(SpectrumResult::from_values(values, vectors))
}

/// Eigenvalues of a symmetric tridiagonal matrix, ascending.
pub fn tridiagonal_eigenvalues(t: &Tridiagonal) -> Result<Vec<f64>> {
    let n = t.dim();
    let mut d = t.diag.clone();
    // ql_implicit expects the subdiagonal in e[1..n].
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(&t.off);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Eigenvector of a symmetric tridiagonal matrix for a computed eigenvalue,
/// by inverse iteration. `previous` vectors are projected out so clustered
/// eigenvalues still yield an orthonormal set.
pub fn tridiagonal_eigenvector(t: &Tridiagonal, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
    let n = t.dim();
    let scale = t.inf_norm().max(f64::MIN_POSITIVE);
    let shift = lambda + 4.0 * f64::EPSILON * scale;
    let lu = TridiagonalLu::factor(t, shift, f64::EPSILON * scale);
    // deterministic start vector with components in every direction
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..4 {
        orthogonalize(&mut x, previous);
        normalize(&mut x);
        x = lu.solve(&x);
    }
    orthogonalize(&mut x, previous);
    normalize(&mut x);
    x
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c: f64 = x.iter().zip(b).map(|(p, q)| p * q).sum();
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi -= c * bi;
        }
    }
}

fn normalize(x: &mut [f64]) {
    let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nrm > 0.0 {
        x.iter_mut().for_each(|v| *v /= nrm);
    }
}

/// LU factorization with partial pivoting of `T - σI`.
struct TridiagonalLu {
    // U has diagonal u0 and two superdiagonals u1, u2.
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(t: &Tridiagonal, sigma: f64, tiny: f64) -> Self {
        let n = t.dim();
        let mut d: Vec<f64> = t.diag.iter().map(|v| v - sigma).collect();
        let mut du = t.off.clone();
        du.push(0.0);
        let dl = t.off.clone();
        let mut du2 = vec![0.0; n];
        let mut mult = vec![0.0; n];
        let mut swapped = vec![false; n];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                mult[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                swapped[i] = true;
                let f = d[i] / dl[i];
                mult[i] = f;
                d[i] = dl[i];
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            u0: d,
            u1: du,
            u2: du2,
            mult,
            swapped,
        }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.u0.len();
        let mut y = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                y.swap(i, i + 1);
                y[i + 1] -= self.mult[i] * y[i];
            } else {
                y[i + 1] -= self.mult[i] * y[i];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            if i + 1 < n {
                acc -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * x[i + 2];
            }
            x[i] = acc / self.u0[i];
        }
        x
    }
}

/// Lower Cholesky factor `L` with `M = L Lᵀ`.
pub fn cholesky(m: &Matrix) -> Result<Matrix> {
    let n = m.dim();
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok(l)
}

fn forward_substitute(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.dim();
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

fn back_substitute_transpose(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.dim();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Eigenpairs of `K v = λ M v` through the congruence `L⁻¹ K L⁻ᵀ` with
/// `M = L Lᵀ`. Eigenvectors come back `M`-orthonormal.
pub fn sym_generalized_eig(k: &Matrix, m: &Matrix) -> Result<SpectrumResult> {
    if k.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: m.dim(),
        });
    }
    k.require_symmetric(1e-12)?;
    m.require_symmetric(1e-12)?;
    let n = k.dim();
    let l = cholesky(m)?;
    // X = L⁻¹ K, column by column of K (= rows, by symmetry).
    let x_cols: Vec<Vec<f64>> = (0..n).map(|j| forward_substitute(&l, k.row(j))).collect();
    // C = L⁻¹ Xᵀ: the j-th column of C solves L c = (row j of X) = x_cols[*][j].
    let mut c = Matrix::zeros(n);
    for j in 0..n {
        let rhs: Vec<f64> = (0..n).map(|i| x_cols[i][j]).collect();
        let col = forward_substitute(&l, &rhs);
        for i in 0..n {
            c[(i, j)] = col[i];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = avg;
            c[(j, i)] = avg;
        }
    }
    let mut spec = sym_eig(&c)?;
    spec.eigenvectors = spec
        .eigenvectors
        .iter()
        .map(|y| back_substitute_transpose(&l, y))
        .collect();
    Ok(spec)
}

/// `K v = λ M v` for tridiagonal `K` and diagonal positive `M`.
///
/// All eigenvalues are returned; eigenvectors (`M`-orthonormal) only for the
/// lowest `vectors` of them.
pub fn sym_tridiagonal_generalized_eig(
    k: &Tridiagonal,
    mass: &[f64],
    vectors: usize,
) -> Result<SpectrumResult> {
    if mass.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: mass.len(),
        });
    }
    if let Some((i, &v)) = mass.iter().enumerate().find(|(_, &v)| v <= 0.0 || !v.is_finite()) {
        return Err(Error::NotPositiveDefinite { pivot: i, value: v });
    }
    let inv_sqrt: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let scaled = Tridiagonal {
        diag: k.diag.iter().zip(&inv_sqrt).map(|(d, s)| d * s * s).collect(),
        off: k
            .off
            .iter()
            .enumerate()
            .map(|(i, o)| o * inv_sqrt[i] * inv_sqrt[i + 1])
            .collect(),
    };
    let values = tridiagonal_eigenvalues(&scaled)?;
    let mut ys: Vec<Vec<f64>> = Vec::new();
    for &lambda in values.iter().take(vectors) {
        // only vectors of nearby eigenvalues need explicit orthogonalization
        let gap = 1e-8 * scaled.inf_norm();
        let close: Vec<Vec<f64>> = ys
            .iter()
            .zip(&values)
            .filter(|(_, &mu)| (mu - lambda).abs() <= gap)
            .map(|(y, _)| y.clone())
            .collect();
        ys.push(tridiagonal_eigenvector(&scaled, lambda, &close));
    }
    let eigenvectors = ys
        .into_iter()
        .map(|y| y.iter().zip(&inv_sqrt).map(|(a, b)| a * b).collect())
        .collect();
    Ok(SpectrumResult::from_values(values, eigenvectors))
}

fn sort_pairs(values: Vec<f64>, vectors: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    (
        idx.iter().map(|&i| values[i]).collect(),
        idx.iter().map(|&i| vectors[i].clone()).collect(),
    )
}

/// Householder reduction to tridiagonal form. On entry `v` holds the matrix;
/// on exit it holds the accumulated orthogonal transform, `d` the diagonal
/// and `e[1..]` the subdiagonal.
fn householder_tridiagonalize(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    d.copy_from_slice(&v[n - 1]);
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal (`d`, `e[1..]`). Rotations are
/// accumulated into `v` when given. Eigenvalues are left unsorted in `d`.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut v: Option<&mut [Vec<f64>]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence(l));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for row in v.iter_mut() {
                            let hk = row[i + 1];
                            row[i + 1] = s * row[i] + c * hk;
                            row[i] = c * row[i] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let mut a = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        a
    }

    #[test]
    fn diagonal_and_reflection() {
        let s = sym_eig(&Matrix::from_diagonal(&[3.0, 2.0])).unwrap();
        assert_eq!(s.eigenvalues, vec![2.0, 3.0]);
        let s = sym_eig(&Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn trace_identity_and_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 6, 17] {
            let a = random_symmetric(n, &mut rng);
            let s = sym_eig(&a).unwrap();
            let sum: f64 = s.eigenvalues.iter().sum();
            assert_abs_diff_eq!(sum, a.trace(), epsilon = 1e-10);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            for (lam, v) in s.eigenvalues.iter().zip(&s.eigenvectors) {
                let av = a.mul_vec(v);
                for i in 0..n {
                    assert_abs_diff_eq!(av[i], lam * v[i], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_nonsymmetric() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]);
        assert!(matches!(sym_eig(&a), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn generalized_examples() {
        let s = sym_generalized_eig(&Matrix::identity(3), &Matrix::from_diagonal(&[2.0; 3])).unwrap();
        assert!(s.eigenvalues.iter().all(|&v| (v - 0.5).abs() < 1e-15));
        let s = sym_generalized_eig(
            &Matrix::from_diagonal(&[1.0, 4.0]),
            &Matrix::from_diagonal(&[1.0, 2.0]),
        )
        .unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eigenvalues[1], 2.0, epsilon = 1e-15);
        // det(K - λM) = 2λ² - 1
        let k = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let m = Matrix::from_diagonal(&[2.0, 1.0]);
        let s = sym_generalized_eig(&k, &m).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], -0.5_f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 0.5_f64.sqrt(), epsilon = 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                let g = m.form(&s.eigenvectors[i], &s.eigenvectors[j]);
                assert_abs_diff_eq!(g, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn generalized_rejects_indefinite_mass() {
        let m = Matrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            sym_generalized_eig(&Matrix::identity(2), &m),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }

    #[test]
    fn count_below_examples() {
        assert_eq!(
            count_below(&[-5.0, -3.0, 1.0], 0.0, 1e-6),
            Count { count: 2, certified: true }
        );
        assert!(!count_below(&[-2.0 - 1e-9, 0.0], -2.0, 1e-6).certified);
    }

    #[test]
    fn tridiagonal_path_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let off: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mass: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let t = Tridiagonal::new(diag, off).unwrap();
        let fast = sym_tridiagonal_generalized_eig(&t, &mass, 5).unwrap();
        let dense = sym_generalized_eig(&t.to_dense(), &Matrix::from_diagonal(&mass)).unwrap();
        for (a, b) in fast.eigenvalues.iter().zip(&dense.eigenvalues) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let m = Matrix::from_diagonal(&mass);
        for (i, v) in fast.eigenvectors.iter().enumerate() {
            let kv = t.mul_vec(v);
            let mv = m.mul_vec(v);
            for j in 0..n {
                assert_abs_diff_eq!(kv[j], fast.eigenvalues[i] * mv[j], epsilon = 1e-10);
            }
            for (j, w) in fast.eigenvectors.iter().enumerate() {
                let g = m.form(v, w);
                assert_abs_diff_eq!(g, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn multiplet_grouping() {
        let g = group_multiplets(&[-1.0, -1.0 + 1e-12, 2.0], &[1, 1, 0], 1e-9);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].multiplicity, 2);
        assert_eq!(g[0].modes, vec![1]);
    }
}
