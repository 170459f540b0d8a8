//! Fourier-mode reduction of the Jacobi operator and its finite-difference
//! assembly.
//!
//! A function `u(s) cos(mθ)` (or `sin`) on the surface turns the index form
//! `Q(u) = ∫ |∇u|² - |A|² u² - ∫_∂ u²` into `c_m` times a one-dimensional
//! form, with `c_0 = 2π` and `c_m = π` for `m ≥ 1`. On the catenoid
//!
//! ```text
//! Q_m(u) = c_m [ ∫ u'² + (m² - 2 sech² s) u² ds - (u(T)² + u(-T)²) / T ]
//! ```
//!
//! and the interior mass is `c_m ∫ u² a² cosh² s ds`. On the disk the form is
//! `c_m [ ∫ (u'² + m² u² / r²) r dr - u(1)² ]` with mass `c_m ∫ u² r dr`.
//!
//! The catenoid uses second-order central differences on a uniform grid with
//! ghost-node elimination of the Robin condition, written in symmetric
//! (trapezoid-weighted) form. The disk uses the matching finite-volume
//! scheme on nodes `r_i = i h`, `i = 1..=n`; the node at the origin is never
//! an unknown.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eigensolve::{Matrix, Tridiagonal};
use crate::error::{Error, Result};
use crate::geometry::{SurfaceKind, SurfaceModel};

/// Smallest admissible grid.
pub const MIN_GRID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// `∂u/∂ν = u`, the boundary condition of the index form.
    Robin,
    /// `u = 0`.
    Dirichlet,
    /// No boundary term; the boundary mass is returned separately.
    Natural,
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Robin => "robin",
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Natural => "natural",
        })
    }
}

/// Angular factor `∫ cos²(mθ) dθ`: `2π` for `m = 0`, `π` otherwise.
pub fn mode_factor(m: u32) -> f64 {
    if m == 0 {
        2.0 * PI
    } else {
        PI
    }
}

/// One Fourier mode of an eigenproblem on a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProblem {
    pub surface: SurfaceModel,
    pub mode: u32,
    pub bc: BoundaryCondition,
    /// Number of grid intervals.
    pub n: usize,
}

impl ModeProblem {
    pub fn new(surface: SurfaceModel, mode: u32, bc: BoundaryCondition, n: usize) -> Self {
        Self {
            surface,
            mode,
            bc,
            n,
        }
    }
}

/// Stiffness, mass and boundary matrices of a [`ModeProblem`].
///
/// `K` carries the gradient, potential and (for Robin) boundary terms;
/// `M` and `B` are diagonal. All three include the angular factor `c_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteOperator {
    pub stiffness: Tridiagonal,
    pub mass: Vec<f64>,
    pub boundary: Vec<f64>,
    /// Node coordinates of the unknowns.
    pub grid: Vec<f64>,
    pub mode_factor: f64,
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    /// `uᵀ K u`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.stiffness.form(u, u)
    }

    /// `uᵀ M u`.
    pub fn mass_norm(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.mass).map(|(x, m)| m * x * x).sum()
    }

    /// `uᵀ B u`.
    pub fn boundary_norm(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.boundary).map(|(x, b)| b * x * x).sum()
    }

    pub fn rayleigh_quotient(&self, u: &[f64]) -> f64 {
        self.energy(u) / self.mass_norm(u)
    }

    pub fn mass_matrix(&self) -> Matrix {
        Matrix::from_diagonal(&self.mass)
    }

    pub fn boundary_matrix(&self) -> Matrix {
        Matrix::from_diagonal(&self.boundary)
    }
}

/// Uniform grid of the first coordinate with `n` intervals, all nodes.
pub fn full_grid(surface: &SurfaceModel, n: usize) -> Vec<f64> {
    let (lo, hi) = surface.radial_range();
    let h = (hi - lo) / n as f64;
    (0..=n).map(|i| lo + i as f64 * h).collect()
}

/// Assembles the discrete operator of a mode problem.
pub fn assemble(problem: &ModeProblem) -> Result<DiscreteOperator> {
    if problem.n < MIN_GRID {
        return Err(Error::GridTooSmall {
            n: problem.n,
            min: MIN_GRID,
        });
    }
    match problem.surface.kind() {
        SurfaceKind::Catenoid => assemble_catenoid(problem),
        SurfaceKind::Disk => Ok(assemble_disk(problem)),
    }
}

fn assemble_catenoid(p: &ModeProblem) -> Result<DiscreteOperator> {
    let c = p.surface.catenoid_constants("catenoid assembly")?;
    let n = p.n;
    let cm = mode_factor(p.mode);
    let m2 = (p.mode as f64).powi(2);
    let h = 2.0 * c.t / n as f64;
    let s = full_grid(&p.surface, n);

    let mut diag = vec![0.0; n + 1];
    let off = vec![-cm / h; n];
    let mut mass = vec![0.0; n + 1];
    let mut boundary = vec![0.0; n + 1];
    for i in 0..=n {
        let end = i == 0 || i == n;
        let w = if end { 0.5 * h } else { h };
        let sech2 = 1.0 / s[i].cosh().powi(2);
        diag[i] = cm * ((if end { 1.0 } else { 2.0 }) / h + w * (m2 - 2.0 * sech2));
        mass[i] = cm * w * p.surface.mass_weight(s[i]);
    }
    boundary[0] = cm / c.t;
    boundary[n] = cm / c.t;
    if p.bc == BoundaryCondition::Robin {
        diag[0] -= boundary[0];
        diag[n] -= boundary[n];
    }
    let mut op = DiscreteOperator {
        stiffness: Tridiagonal { diag, off },
        mass,
        boundary,
        grid: s,
        mode_factor: cm,
    };
    if p.bc == BoundaryCondition::Dirichlet {
        op = drop_nodes(op, true, true);
    }
    Ok(op)
}

fn assemble_disk(p: &ModeProblem) -> DiscreteOperator {
    let n = p.n;
    let cm = mode_factor(p.mode);
    let m2 = (p.mode as f64).powi(2);
    let h = 1.0 / n as f64;
    // unknowns r_1 .. r_n
    let r: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
    let volume: Vec<f64> = (1..=n)
        .map(|i| {
            if i == 1 {
                // the first cell absorbs [0, h/2]
                0.5 * (1.5 * h).powi(2)
            } else if i == n {
                0.5 * h * (1.0 - 0.25 * h)
            } else {
                i as f64 * h * h
            }
        })
        .collect();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for (k, o) in off.iter_mut().enumerate() {
        // edge between r_{k+1} and r_{k+2}, midpoint (k + 1.5) h
        let w = cm * (k as f64 + 1.5);
        *o = -w;
        diag[k] += w;
        diag[k + 1] += w;
    }
    if p.mode > 0 {
        // edge to the origin, where u vanishes for m ≥ 1
        diag[0] += cm * 0.5;
    }
    let mut mass = vec![0.0; n];
    for i in 0..n {
        diag[i] += cm * m2 * volume[i] / (r[i] * r[i]);
        mass[i] = cm * volume[i];
    }
    let mut boundary = vec![0.0; n];
    boundary[n - 1] = cm;
    if p.bc == BoundaryCondition::Robin {
        diag[n - 1] -= cm;
    }
    let op = DiscreteOperator {
        stiffness: Tridiagonal { diag, off },
        mass,
        boundary,
        grid: r,
        mode_factor: cm,
    };
    if p.bc == BoundaryCondition::Dirichlet {
        drop_nodes(op, false, true)
    } else {
        op
    }
}

fn drop_nodes(op: DiscreteOperator, first: bool, last: bool) -> DiscreteOperator {
    let n = op.dim();
    let lo = usize::from(first);
    let hi = n - usize::from(last);
    DiscreteOperator {
        stiffness: Tridiagonal {
            diag: op.stiffness.diag[lo..hi].to_vec(),
            off: op.stiffness.off[lo..hi - 1].to_vec(),
        },
        mass: op.mass[lo..hi].to_vec(),
        boundary: op.boundary[lo..hi].to_vec(),
        grid: op.grid[lo..hi].to_vec(),
        mode_factor: op.mode_factor,
    }
}

/// Jacobi operator applied to a mode profile `u(s) cos(mθ)` sampled on the
/// uniform grid `start + i h`. Returns `J` at the interior nodes `1..len-1`,
/// by second-order central differences.
///
/// Catenoid: `J = (-u'' + (m² - 2 sech² s) u) / (a² cosh² s)`.
/// Disk: `J = -(u'' + u'/r - m² u / r²)`.
pub fn apply_jacobi(surface: &SurfaceModel, start: f64, h: f64, u: &[f64], m: u32) -> Vec<f64> {
    let m2 = (m as f64).powi(2);
    (1..u.len().saturating_sub(1))
        .map(|i| {
            let s = start + i as f64 * h;
            let upp = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
            match surface.kind() {
                SurfaceKind::Catenoid => {
                    let sech2 = 1.0 / s.cosh().powi(2);
                    (-upp + (m2 - 2.0 * sech2) * u[i]) / surface.mass_weight(s)
                }
                SurfaceKind::Disk => {
                    let up = (u[i + 1] - u[i - 1]) / (2.0 * h);
                    -(upp + up / s - m2 * u[i] / (s * s))
                }
            }
        })
        .collect()
}

/// Tensor grid on the parameter rectangle, periodic in `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub s: Vec<f64>,
    pub theta: Vec<f64>,
}

impl SurfaceGrid {
    /// `n` intervals in the first coordinate (all `n + 1` nodes) and
    /// `n_theta` equispaced angles.
    pub fn new(surface: &SurfaceModel, n: usize, n_theta: usize) -> Self {
        let theta = (0..n_theta)
            .map(|j| 2.0 * PI * j as f64 / n_theta as f64)
            .collect();
        Self {
            s: full_grid(surface, n),
            theta,
        }
    }

    /// Samples `f(s, θ)` row-major (`s` outer).
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.s.len() * self.theta.len());
        for &s in &self.s {
            for &t in &self.theta {
                out.push(f(s, t));
            }
        }
        out
    }

    fn ds(&self) -> f64 {
        self.s[1] - self.s[0]
    }

    fn dtheta(&self) -> f64 {
        2.0 * PI / self.theta.len() as f64
    }
}

/// Pointwise `J u` on a tensor grid, at interior `s` nodes (all angles).
/// The result has `(len(s) - 2) * len(θ)` entries.
pub fn apply_jacobi_2d(surface: &SurfaceModel, grid: &SurfaceGrid, u: &[f64]) -> Vec<f64> {
    let nt = grid.theta.len();
    let hs = grid.ds();
    let ht = grid.dtheta();
    let at = |i: usize, j: usize| u[i * nt + (j % nt)];
    let mut out = Vec::with_capacity((grid.s.len() - 2) * nt);
    for i in 1..grid.s.len() - 1 {
        let s = grid.s[i];
        for j in 0..nt {
            let uss = (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (hs * hs);
            let utt = (at(i, j + 1) - 2.0 * at(i, j) + at(i, j + nt - 1)) / (ht * ht);
            let v = match surface.kind() {
                SurfaceKind::Catenoid => {
                    -(uss + utt) / surface.mass_weight(s) - surface.squared_curvature(s) * at(i, j)
                }
                SurfaceKind::Disk => {
                    let us = (at(i + 1, j) - at(i - 1, j)) / (2.0 * hs);
                    -(uss + us / s + utt / (s * s))
                }
            };
            out.push(v);
        }
    }
    out
}

/// `∫_Σ f dA` by the trapezoid rule in both coordinates.
pub fn quadrature_surface(surface: &SurfaceModel, grid: &SurfaceGrid, f: &[f64]) -> f64 {
    let nt = grid.theta.len();
    let ns = grid.s.len();
    let mut sum = 0.0;
    for (i, &s) in grid.s.iter().enumerate() {
        let w = if i == 0 || i == ns - 1 { 0.5 } else { 1.0 };
        let row: f64 = f[i * nt..(i + 1) * nt].iter().sum();
        sum += w * row * surface.area_element(s);
    }
    sum * grid.ds() * grid.dtheta()
}

/// `∫_∂Σ f dℓ` by the trapezoid rule over the boundary circles.
pub fn quadrature_boundary(surface: &SurfaceModel, grid: &SurfaceGrid, f: &[f64]) -> f64 {
    let nt = grid.theta.len();
    let ns = grid.s.len();
    let rows: &[usize] = match surface.kind() {
        SurfaceKind::Catenoid => &[0, ns - 1],
        SurfaceKind::Disk => &[ns - 1],
    };
    let mut sum = 0.0;
    for &i in rows {
        sum += f[i * nt..(i + 1) * nt].iter().sum::<f64>();
    }
    sum * grid.dtheta() * surface.boundary_line_element()
}
