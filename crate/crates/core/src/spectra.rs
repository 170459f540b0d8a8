//! The eigenvalue problems of the Jacobi operator on the model surfaces.
//!
//! * Robin (`Ju = γu`, `∂u/∂ν = u`): its negative eigenvalues count the
//!   Morse index.
//! * Dirichlet: ground state `λ₀` and its eigenfunction.
//! * Steklov for the Laplacian and for `J`, on the per-mode harmonic basis.
//! * The non-local operator `𝒜` representing `Q` on the space `𝓔` of
//!   J-harmonic functions against the interior L² product. Each Fourier mode
//!   of `𝓔` is two-dimensional, so `𝒜` reduces to one 2×2 generalized
//!   eigenproblem per mode.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::{richardson, Extrapolation};
use crate::discretize::{
    assemble, full_grid, mode_factor, BoundaryCondition, DiscreteOperator, ModeProblem,
};
use crate::eigensolve::{
    count_below, group_multiplets, sym_eig, sym_generalized_eig, sym_tridiagonal_generalized_eig,
    Count, Matrix, Multiplet, SpectrumResult,
};
use crate::error::{Error, Result};
use crate::geometry::{SurfaceKind, SurfaceModel, Vec3, E_X, E_Y, E_Z};

/// Default guard band around critical values.
pub const DEFAULT_GUARD: f64 = 1e-6;
/// Default Fourier truncation.
pub const DEFAULT_MAX_MODE: u32 = 16;
/// Default grid sequence for Richardson extrapolation.
pub const DEFAULT_GRIDS: [usize; 3] = [512, 1024, 2048];

/// Number of copies (`cos mθ`, `sin mθ`) of a mode.
pub fn mode_multiplicity(m: u32) -> usize {
    if m == 0 {
        1
    } else {
        2
    }
}

/// Spectrum of a single mode problem on one grid, with eigenvectors for the
/// lowest `vectors` eigenvalues.
pub fn mode_spectrum(problem: &ModeProblem, vectors: usize) -> Result<(DiscreteOperator, SpectrumResult)> {
    let op = assemble(problem)?;
    let mut spec = sym_tridiagonal_generalized_eig(&op.stiffness, &op.mass, vectors)?;
    spec.modes = vec![problem.mode; spec.len()];
    spec.bc = Some(problem.bc);
    spec.n = problem.n;
    Ok((op, spec))
}

/// Merges per-mode spectra, repeating `m ≥ 1` eigenvalues for the cos and
/// sin copies. Eigenvectors are kept for the ascending prefix whose
/// per-mode vectors were computed.
fn aggregate(per_mode: Vec<SpectrumResult>, bc: BoundaryCondition, n: usize) -> SpectrumResult {
    let mut entries: Vec<(f64, u32, Option<Vec<f64>>)> = Vec::new();
    for spec in per_mode {
        for (i, (&v, &m)) in spec.eigenvalues.iter().zip(&spec.modes).enumerate() {
            for _ in 0..mode_multiplicity(m) {
                entries.push((v, m, spec.eigenvectors.get(i).cloned()));
            }
        }
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let eigenvectors = entries
        .iter()
        .map_while(|e| e.2.clone())
        .collect();
    let len = entries.len();
    SpectrumResult {
        eigenvalues: entries.iter().map(|e| e.0).collect(),
        modes: entries.iter().map(|e| e.1).collect(),
        eigenvectors,
        bc: Some(bc),
        n,
        order: vec![None; len],
    }
}

fn check_positive(v: &[f64]) -> bool {
    let sign = v.iter().copied().find(|x| x.abs() > 0.0).unwrap_or(1.0).signum();
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    v.iter().all(|&x| sign * x > -1e-12 * peak)
}

/// Aggregated Robin spectrum over `modes` on one grid.
///
/// The ground state is checked to be simple, radial and of one sign.
pub fn robin_spectrum(surface: &SurfaceModel, modes: RangeInclusive<u32>, n: usize) -> Result<SpectrumResult> {
    let per_mode = modes
        .clone()
        .into_par_iter()
        .map(|m| mode_spectrum(&ModeProblem::new(*surface, m, BoundaryCondition::Robin, n), 1).map(|r| r.1))
        .collect::<Result<Vec<_>>>()?;
    let agg = aggregate(per_mode, BoundaryCondition::Robin, n);
    if agg.len() >= 2 {
        let simple = agg.eigenvalues[1] - agg.eigenvalues[0] > 1e-9 * (1.0 + agg.eigenvalues[0].abs());
        let ground = agg.eigenvectors.first();
        if agg.modes[0] != 0 || !simple || !ground.map(|v| check_positive(v)).unwrap_or(false) {
            return Err(Error::GroundStateSign);
        }
    }
    Ok(agg)
}

/// Aggregated Dirichlet spectrum over `modes` on one grid; the first
/// eigenvector is the ground state.
pub fn dirichlet_spectrum(surface: &SurfaceModel, modes: RangeInclusive<u32>, n: usize) -> Result<SpectrumResult> {
    let per_mode = modes
        .into_par_iter()
        .map(|m| mode_spectrum(&ModeProblem::new(*surface, m, BoundaryCondition::Dirichlet, n), 1).map(|r| r.1))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(per_mode, BoundaryCondition::Dirichlet, n))
}

/// The radial reductions of `J` on the catenoid: `L0` acts on `u(s)`, `L1`
/// on `u(s) cos θ` and equals `L0 + 1 / (a² cosh² s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialOperator {
    L0,
    L1,
}

impl RadialOperator {
    pub fn mode(self) -> u32 {
        match self {
            RadialOperator::L0 => 0,
            RadialOperator::L1 => 1,
        }
    }
}

/// Robin spectrum of `L0` or `L1`.
pub fn radial_robin_spectrum(surface: &SurfaceModel, operator: RadialOperator, n: usize) -> Result<SpectrumResult> {
    surface.catenoid_constants("the radial Robin problem")?;
    let problem = ModeProblem::new(*surface, operator.mode(), BoundaryCondition::Robin, n);
    Ok(mode_spectrum(&problem, 2)?.1)
}

/// Discrete Rayleigh quotient `Q(u) / ∫ u²` of a radial profile under the
/// Robin form of `operator`.
pub fn radial_rayleigh_quotient(
    surface: &SurfaceModel,
    operator: RadialOperator,
    profile: impl Fn(f64) -> f64,
    n: usize,
) -> Result<f64> {
    surface.catenoid_constants("the radial Robin problem")?;
    let op = assemble(&ModeProblem::new(*surface, operator.mode(), BoundaryCondition::Robin, n))?;
    let u: Vec<f64> = op.grid.iter().map(|&s| profile(s)).collect();
    Ok(op.rayleigh_quotient(&u))
}

/// One eigenvalue branch followed across a grid sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub mode: u32,
    /// Position within the mode's spectrum, from 0.
    pub index: usize,
    pub multiplicity: usize,
    pub per_grid: Vec<f64>,
    pub extrapolated: f64,
    pub order: Option<f64>,
    /// Eigenvector on the finest grid (`M`-normalized).
    #[serde(skip)]
    pub finest_vector: Option<Vec<f64>>,
}

/// Per-mode spectra on a sequence of grids, extrapolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridStudy {
    pub surface: SurfaceKind,
    pub bc: BoundaryCondition,
    pub grids: Vec<usize>,
    /// Sorted by extrapolated value.
    pub lines: Vec<SpectralLine>,
    /// Node coordinates of the finest grid's unknowns.
    #[serde(skip)]
    pub finest_nodes: Vec<f64>,
}

impl GridStudy {
    /// Extrapolated eigenvalues with multiplicity, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        self.lines
            .iter()
            .flat_map(|l| std::iter::repeat(l.extrapolated).take(l.multiplicity))
            .collect()
    }

    pub fn count_below(&self, threshold: f64, guard: f64) -> Count {
        count_below(&self.expanded(), threshold, guard)
    }

    pub fn mode_lines(&self, m: u32) -> Vec<&SpectralLine> {
        let mut v: Vec<&SpectralLine> = self.lines.iter().filter(|l| l.mode == m).collect();
        v.sort_by_key(|l| l.index);
        v
    }

    /// Lowest extrapolated eigenvalue of mode `m`.
    pub fn mode_minimum(&self, m: u32) -> Option<f64> {
        self.mode_lines(m).first().map(|l| l.extrapolated)
    }

    pub fn multiplets(&self) -> Vec<Multiplet> {
        let mut values = Vec::new();
        let mut modes = Vec::new();
        for l in &self.lines {
            for _ in 0..l.multiplicity {
                values.push(l.extrapolated);
                modes.push(l.mode);
            }
        }
        group_multiplets(&values, &modes, 1e-9)
    }
}

fn check_grids(grids: &[usize]) -> Result<()> {
    if grids.is_empty() {
        return Err(Error::TooFewGrids(1));
    }
    Ok(())
}

/// Solves each mode on every grid and extrapolates the lowest `keep`
/// eigenvalues of each mode. Grids are expected to double.
pub fn grid_study(
    surface: &SurfaceModel,
    bc: BoundaryCondition,
    modes: RangeInclusive<u32>,
    grids: &[usize],
    keep: usize,
) -> Result<GridStudy> {
    check_grids(grids)?;
    let finest = *grids.last().expect("non-empty");
    let jobs: Vec<(u32, usize)> = modes
        .clone()
        .flat_map(|m| grids.iter().map(move |&n| (m, n)))
        .collect();
    let solved = jobs
        .par_iter()
        .map(|&(m, n)| {
            let vectors = if n == finest { keep } else { 0 };
            mode_spectrum(&ModeProblem::new(*surface, m, bc, n), vectors)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut finest_nodes = Vec::new();
    let mut lines = Vec::new();
    for (k, m) in modes.enumerate() {
        let block = &solved[k * grids.len()..(k + 1) * grids.len()];
        let (finest_op, finest_spec) = block.last().expect("non-empty");
        if finest_nodes.is_empty() {
            finest_nodes = finest_op.grid.clone();
        }
        let count = keep.min(block.iter().map(|(_, s)| s.len()).min().unwrap_or(0));
        for index in 0..count {
            let per_grid: Vec<f64> = block.iter().map(|(_, s)| s.eigenvalues[index]).collect();
            let Extrapolation { value, order } = richardson(&per_grid)?;
            lines.push(SpectralLine {
                mode: m,
                index,
                multiplicity: mode_multiplicity(m),
                per_grid,
                extrapolated: value,
                order,
                finest_vector: finest_spec.eigenvectors.get(index).cloned(),
            });
        }
    }
    lines.sort_by(|a, b| a.extrapolated.total_cmp(&b.extrapolated).then(a.mode.cmp(&b.mode)));
    Ok(GridStudy {
        surface: surface.kind(),
        bc,
        grids: grids.to_vec(),
        lines,
        finest_nodes,
    })
}

/// An eigenvalue inside the guard band of zero that was identified with the
/// normal component of a rotation of the ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullDirection {
    pub mode: u32,
    pub value: f64,
    pub multiplicity: usize,
    /// Relative weighted L² distance between the eigenvector and the
    /// rotation field's radial profile.
    pub profile_error: f64,
    pub matched: bool,
}

/// Count of eigenvalues below a threshold with the evidence behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub threshold: f64,
    pub guard: f64,
    pub count: usize,
    /// Dimension of the identified null space (threshold 0 only).
    pub nullity: usize,
    /// Band and tail certification together.
    pub certified: bool,
    /// No unexplained eigenvalue inside the guard band.
    pub band_certified: bool,
    pub tail_certified: bool,
    /// Lines strictly below the threshold.
    pub below: Vec<SpectralLine>,
    /// Lines inside the guard band.
    pub in_band: Vec<NullDirection>,
    /// Lowest extrapolated eigenvalue per mode, ascending in mode.
    pub mode_minima: Vec<(u32, f64)>,
    /// The underlying extrapolated study.
    #[serde(skip)]
    pub study: GridStudy,
}

/// Tolerance for matching an in-band eigenvector with a rotation field, in
/// the relative weighted L² distance.
const NULL_PROFILE_TOL: f64 = 1e-4;

fn rotation_profile(surface: &SurfaceModel, nodes: &[f64]) -> Vec<f64> {
    // (e_x × x, N) = f(s) sin θ; sample at θ = π/2
    nodes
        .iter()
        .map(|&s| surface.rotation_component(&E_X, s, PI / 2.0))
        .collect()
}

/// Relative sup-norm distance between two profiles after scaling both to
/// unit sup-norm with matching sign.
pub fn profile_distance(a: &[f64], b: &[f64]) -> f64 {
    let peak = |v: &[f64]| {
        v.iter()
            .copied()
            .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m })
    };
    let (pa, pb) = (peak(a), peak(b));
    if pa == 0.0 || pb == 0.0 {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x / pa - y / pb).abs())
        .fold(0.0, f64::max)
}

/// Distance `‖a/‖a‖ ∓ b/‖b‖‖` in the norm `Σ w_i x_i²`, with the sign
/// chosen to minimize it.
pub fn weighted_profile_distance(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    let ip = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).zip(w).map(|((p, q), c)| p * q * c).sum() };
    let (na, nb) = (ip(a, a).sqrt(), ip(b, b).sqrt());
    if na == 0.0 || nb == 0.0 {
        return f64::INFINITY;
    }
    let cos = (ip(a, b) / (na * nb)).abs().min(1.0);
    (2.0 * (1.0 - cos)).sqrt()
}

/// Counts Robin eigenvalues below `threshold` across modes `0..=max_mode`.
///
/// Every extrapolated eigenvalue must sit outside the guard band, except
/// that at threshold 0 an in-band mode-1 eigenvalue whose eigenvector is the
/// radial profile of a rotation field is certified as an exact zero. The
/// mode tail is certified when the minima of the last two modes are above
/// the band and increasing.
pub fn index_below(
    surface: &SurfaceModel,
    threshold: f64,
    max_mode: u32,
    grids: &[usize],
    guard: f64,
) -> Result<IndexReport> {
    let study = grid_study(surface, BoundaryCondition::Robin, 0..=max_mode.max(1), grids, INDEX_KEEP)?;
    Ok(certify_count(surface, study, threshold, guard))
}

/// Eigenvalues kept per mode when counting.
const INDEX_KEEP: usize = 4;

/// Counts the lines of a Robin study below `threshold`; see [`index_below`].
///
/// A mode whose every kept line lies below the band may hide further
/// eigenvalues, so it leaves the count uncertified.
pub fn certify_count(surface: &SurfaceModel, study: GridStudy, threshold: f64, guard: f64) -> IndexReport {
    let rotation = rotation_profile(surface, &study.finest_nodes);
    let weights: Vec<f64> = study.finest_nodes.iter().map(|&s| surface.mass_weight(s)).collect();
    let mut below = Vec::new();
    let mut in_band = Vec::new();
    let mut band_certified = true;
    for line in &study.lines {
        if (line.extrapolated - threshold).abs() <= guard {
            let profile_error = match (&line.finest_vector, threshold == 0.0 && line.mode == 1) {
                (Some(v), true) => weighted_profile_distance(v, &rotation, &weights),
                _ => f64::INFINITY,
            };
            let matched = profile_error <= NULL_PROFILE_TOL;
            band_certified &= matched;
            in_band.push(NullDirection {
                mode: line.mode,
                value: line.extrapolated,
                multiplicity: line.multiplicity,
                profile_error,
                matched,
            });
        } else if line.extrapolated < threshold {
            below.push(line.clone());
        }
    }
    let modes: Vec<u32> = {
        let mut m: Vec<u32> = study.lines.iter().map(|l| l.mode).collect();
        m.sort_unstable();
        m.dedup();
        m
    };
    let exhausted = modes.iter().any(|&m| {
        study
            .mode_lines(m)
            .iter()
            .all(|l| l.extrapolated < threshold + guard)
    });
    band_certified &= !exhausted;
    let mode_minima: Vec<(u32, f64)> = modes
        .iter()
        .filter_map(|&m| study.mode_minimum(m).map(|v| (m, v)))
        .collect();
    let tail_certified = match mode_minima.as_slice() {
        [.., a, b] => a.1 > threshold + guard && b.1 > a.1,
        _ => false,
    };
    let count = below.iter().map(|l| l.multiplicity).sum();
    let nullity = in_band.iter().filter(|d| d.matched).map(|d| d.multiplicity).sum();
    IndexReport {
        threshold,
        guard,
        count,
        nullity,
        certified: band_certified && tail_certified,
        band_certified,
        tail_certified,
        below,
        in_band,
        mode_minima,
        study,
    }
}

/// Morse index: the number of negative Robin eigenvalues.
pub fn morse_index(surface: &SurfaceModel, max_mode: u32, grids: &[usize], guard: f64) -> Result<IndexReport> {
    index_below(surface, 0.0, max_mode, grids, guard)
}

/// Extrapolated Dirichlet ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub eigenvalue: Extrapolation,
    pub per_grid: Vec<f64>,
    /// Nodes of the second-finest grid.
    pub nodes: Vec<f64>,
    /// Eigenfunction scaled to unit maximum, Richardson-extrapolated on the
    /// nodes shared by the two finest grids.
    pub profile: Vec<f64>,
}

fn unit_peak(v: &[f64]) -> Vec<f64> {
    let peak = v
        .iter()
        .copied()
        .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
    v.iter().map(|x| x / peak).collect()
}

/// Mode-0 Dirichlet ground state over a doubling grid sequence.
pub fn dirichlet_ground_state(surface: &SurfaceModel, grids: &[usize]) -> Result<GroundState> {
    check_grids(grids)?;
    let solved = grids
        .par_iter()
        .map(|&n| mode_spectrum(&ModeProblem::new(*surface, 0, BoundaryCondition::Dirichlet, n), 1))
        .collect::<Result<Vec<_>>>()?;
    let per_grid: Vec<f64> = solved.iter().map(|(_, s)| s.eigenvalues[0]).collect();
    let eigenvalue = richardson(&per_grid)?;
    let (fine_op, fine) = solved.last().expect("non-empty");
    let fine_vec = unit_peak(&fine.eigenvectors[0]);
    let (nodes, profile) = if solved.len() >= 2 {
        let (coarse_op, coarse) = &solved[solved.len() - 2];
        let coarse_vec = unit_peak(&coarse.eigenvectors[0]);
        let (nodes, fine_on_coarse) = restrict_to_coarse(coarse_op, fine_op, &fine_vec);
        let profile = fine_on_coarse
            .iter()
            .zip(&coarse_vec)
            .map(|(f, c)| f + (f - c) / 3.0)
            .collect();
        (nodes, profile)
    } else {
        (fine_op.grid.clone(), fine_vec)
    };
    Ok(GroundState {
        eigenvalue,
        per_grid,
        nodes,
        profile: unit_peak(&profile),
    })
}

/// Samples a fine-grid vector at the coarse-grid nodes (every other node).
fn restrict_to_coarse(coarse: &DiscreteOperator, fine: &DiscreteOperator, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut out = Vec::with_capacity(coarse.dim());
    let mut j = 0;
    for &x in &coarse.grid {
        while j < fine.dim() && (fine.grid[j] - x).abs() > 1e-12 {
            j += 1;
        }
        out.push(v[j.min(fine.dim() - 1)]);
    }
    (coarse.grid.clone(), out)
}

/// Operator whose harmonic functions form the Steklov basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SteklovOperator {
    Laplacian,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// Even in `s`: initial data `(1, 0)` at the waist.
    Even,
    /// Odd in `s`: initial data `(0, 1)` at the waist.
    Odd,
    /// The regular solution `r^m` on the disk.
    Regular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicProfile {
    pub kind: ProfileKind,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    /// Factor the raw solution was divided by to reach unit sup-norm.
    pub scale: f64,
}

/// Independent harmonic radial profiles of one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicBasis {
    pub mode: u32,
    pub operator: SteklovOperator,
    pub nodes: Vec<f64>,
    pub profiles: Vec<HarmonicProfile>,
}

impl HarmonicBasis {
    /// `φ_even φ_odd' - φ_even' φ_odd` along the grid.
    pub fn wronskian(&self) -> Option<Vec<f64>> {
        match self.profiles.as_slice() {
            [e, o] => Some(
                (0..self.nodes.len())
                    .map(|i| e.values[i] * o.derivatives[i] - e.derivatives[i] * o.values[i])
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Largest departure of the Wronskian from its waist value, relative to
    /// the magnitude of the two products it is formed from. For large `m`
    /// both profiles grow like `e^{m|s|}` and the Wronskian is a small
    /// difference of large terms, so this is the attainable scale.
    pub fn wronskian_drift(&self) -> Option<f64> {
        let [e, o] = self.profiles.as_slice() else {
            return None;
        };
        let w = self.wronskian()?;
        let w0 = w[w.len() / 2];
        Some(
            (0..w.len())
                .map(|i| {
                    let size = (e.values[i] * o.derivatives[i]).abs() + (e.derivatives[i] * o.values[i]).abs();
                    (w[i] - w0).abs() / size.max(w0.abs())
                })
                .fold(0.0, f64::max),
        )
    }

    /// Same basis with each profile multiplied by a factor.
    pub fn rescaled(&self, factors: &[f64]) -> Self {
        let mut out = self.clone();
        for (p, &f) in out.profiles.iter_mut().zip(factors) {
            p.values.iter_mut().for_each(|v| *v *= f);
            p.derivatives.iter_mut().for_each(|v| *v *= f);
            p.scale /= f;
        }
        out
    }
}

/// `m · T` beyond which `e^{mT}` is too close to the floating range.
const MAX_GROWTH_EXPONENT: f64 = 600.0;

fn radial_potential(operator: SteklovOperator, m: u32, s: f64) -> f64 {
    let m2 = (m as f64).powi(2);
    match operator {
        SteklovOperator::Laplacian => m2,
        SteklovOperator::Jacobi => m2 - 2.0 / s.cosh().powi(2),
    }
}

/// Classical RK4 for `u'' = V(s) u` from the waist, `steps` steps of size `h`.
fn integrate_from_waist(
    potential: impl Fn(f64) -> f64,
    initial: (f64, f64),
    h: f64,
    steps: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut u = Vec::with_capacity(steps + 1);
    let mut du = Vec::with_capacity(steps + 1);
    let (mut y0, mut y1) = initial;
    u.push(y0);
    du.push(y1);
    for k in 0..steps {
        let s = k as f64 * h;
        let f = |s: f64, a: f64, b: f64| (b, potential(s) * a);
        let k1 = f(s, y0, y1);
        let k2 = f(s + 0.5 * h, y0 + 0.5 * h * k1.0, y1 + 0.5 * h * k1.1);
        let k3 = f(s + 0.5 * h, y0 + 0.5 * h * k2.0, y1 + 0.5 * h * k2.1);
        let k4 = f(s + h, y0 + h * k3.0, y1 + h * k3.1);
        y0 += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y1 += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        u.push(y0);
        du.push(y1);
    }
    (u, du)
}

fn normalized_profile(kind: ProfileKind, values: Vec<f64>, derivatives: Vec<f64>) -> HarmonicProfile {
    let scale = values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    HarmonicProfile {
        kind,
        values: values.iter().map(|v| v / scale).collect(),
        derivatives: derivatives.iter().map(|v| v / scale).collect(),
        scale,
    }
}

/// Harmonic basis of mode `m`: solutions of `-u'' + V u = 0` with
/// `V = m² - 2 sech² s` (Jacobi) or `V = m²` (Laplacian) on the catenoid,
/// integrated from even and odd data at the waist by RK4 on `n` intervals
/// (`n` even). On the disk both operators agree and the basis is `r^m`.
pub fn harmonic_basis(surface: &SurfaceModel, operator: SteklovOperator, m: u32, n: usize) -> Result<HarmonicBasis> {
    if n < crate::discretize::MIN_GRID {
        return Err(Error::GridTooSmall {
            n,
            min: crate::discretize::MIN_GRID,
        });
    }
    let n = n + n % 2;
    let nodes = full_grid(surface, n);
    let profiles = match surface.constants() {
        Some(c) => {
            if m as f64 * c.t > MAX_GROWTH_EXPONENT {
                return Err(Error::ModeOverflow(m));
            }
            let half = n / 2;
            let h = c.t / half as f64;
            let pot = |s: f64| radial_potential(operator, m, s);
            let mut out = Vec::new();
            for (kind, init, parity) in [(ProfileKind::Even, (1.0, 0.0), 1.0), (ProfileKind::Odd, (0.0, 1.0), -1.0)] {
                let (u, du) = integrate_from_waist(pot, init, h, half);
                // reflect onto [-T, 0): u(-s) = ±u(s), u'(-s) = ∓u'(s)
                let mut values = Vec::with_capacity(n + 1);
                let mut derivs = Vec::with_capacity(n + 1);
                for k in (1..=half).rev() {
                    values.push(parity * u[k]);
                    derivs.push(-parity * du[k]);
                }
                values.extend_from_slice(&u);
                derivs.extend_from_slice(&du);
                out.push(normalized_profile(kind, values, derivs));
            }
            out
        }
        None => {
            let mf = m as f64;
            let values = nodes.iter().map(|&r| r.powi(m as i32)).collect();
            let derivs = nodes
                .iter()
                .map(|&r| if m == 0 { 0.0 } else { mf * r.powi(m as i32 - 1) })
                .collect();
            vec![normalized_profile(ProfileKind::Regular, values, derivs)]
        }
    };
    Ok(HarmonicBasis {
        mode: m,
        operator,
        nodes,
        profiles,
    })
}

/// J-harmonic basis of mode `m`.
pub fn jharmonic_basis(surface: &SurfaceModel, m: u32, n: usize) -> Result<HarmonicBasis> {
    harmonic_basis(surface, SteklovOperator::Jacobi, m, n)
}

/// Composite Simpson weights on `n` (even) uniform intervals of width `h`.
pub(crate) fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// Per-mode bilinear forms of radial profiles `φ(s) cos mθ`, integrated by
/// composite Simpson. All include the angular factor `c_m`.
#[derive(Debug, Clone)]
pub struct ModeForms<'a> {
    surface: SurfaceModel,
    mode: u32,
    nodes: &'a [f64],
    weights: Vec<f64>,
}

impl<'a> ModeForms<'a> {
    pub fn new(surface: &SurfaceModel, mode: u32, nodes: &'a [f64]) -> Self {
        let n = nodes.len() - 1;
        let h = nodes[1] - nodes[0];
        Self {
            surface: *surface,
            mode,
            nodes,
            weights: simpson_weights(n, h),
        }
    }

    fn boundary_indices(&self) -> Vec<usize> {
        let last = self.nodes.len() - 1;
        match self.surface.kind() {
            SurfaceKind::Catenoid => vec![0, last],
            SurfaceKind::Disk => vec![last],
        }
    }

    /// `∫ ∇u·∇w` of the two mode functions.
    pub fn dirichlet_energy(&self, u: (&[f64], &[f64]), w: (&[f64], &[f64])) -> f64 {
        let m2 = (self.mode as f64).powi(2);
        let mut acc = 0.0;
        for (i, &x) in self.nodes.iter().enumerate() {
            let integrand = match self.surface.kind() {
                SurfaceKind::Catenoid => u.1[i] * w.1[i] + m2 * u.0[i] * w.0[i],
                SurfaceKind::Disk => {
                    let angular = if x == 0.0 { 0.0 } else { m2 * u.0[i] * w.0[i] / x };
                    u.1[i] * w.1[i] * x + angular
                }
            };
            acc += self.weights[i] * integrand;
        }
        mode_factor(self.mode) * acc
    }

    /// `∫ |A|² u w`.
    pub fn potential(&self, u: &[f64], w: &[f64]) -> f64 {
        let acc: f64 = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, &x)| self.weights[i] * self.surface.squared_curvature(x) * self.surface.area_element(x) * u[i] * w[i])
            .sum();
        mode_factor(self.mode) * acc
    }

    /// `∫_Σ u w`.
    pub fn gram(&self, u: &[f64], w: &[f64]) -> f64 {
        let acc: f64 = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, &x)| self.weights[i] * self.surface.area_element(x) * u[i] * w[i])
            .sum();
        mode_factor(self.mode) * acc
    }

    /// `∫_∂Σ u w`.
    pub fn boundary(&self, u: &[f64], w: &[f64]) -> f64 {
        let acc: f64 = self.boundary_indices().iter().map(|&i| u[i] * w[i]).sum();
        mode_factor(self.mode) * self.surface.boundary_line_element() * acc
    }

    /// The index form `Q(u, w) = ∫ ∇u·∇w - |A|² u w - ∫_∂ u w`.
    pub fn index_form(&self, u: (&[f64], &[f64]), w: (&[f64], &[f64])) -> f64 {
        self.dirichlet_energy(u, w) - self.potential(u.0, w.0) - self.boundary(u.0, w.0)
    }
}

fn pairwise(k: usize, f: impl Fn(usize, usize) -> f64) -> Matrix {
    let mut out = Matrix::zeros(k);
    for i in 0..k {
        for j in 0..=i {
            let v = f(i, j);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Generalized eigenproblem `A c = λ B c` restricted to the range of a
/// positive semidefinite `B`. Returns the eigenpairs on the range and the
/// directions `B` annihilates.
fn solve_on_range(a: &Matrix, b: &Matrix, rel_tol: f64) -> Result<(SpectrumResult, Vec<Vec<f64>>)> {
    let eb = sym_eig(b)?;
    let top = eb.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let (range, null): (Vec<_>, Vec<_>) = eb
        .eigenvalues
        .iter()
        .zip(&eb.eigenvectors)
        .partition(|(v, _)| **v > rel_tol * top);
    let basis: Vec<&Vec<f64>> = range.iter().map(|(_, v)| *v).collect();
    let r = basis.len();
    let project = |m: &Matrix| pairwise(r, |i, j| m.form(basis[i], basis[j]));
    let (pa, pb) = (project(a), project(b));
    let mut spec = if r == 0 {
        SpectrumResult::from_values(vec![], vec![])
    } else {
        sym_generalized_eig(&pa, &pb)?
    };
    spec.eigenvectors = spec
        .eigenvectors
        .iter()
        .map(|c| {
            let mut full = vec![0.0; a.dim()];
            for (coef, v) in c.iter().zip(&basis) {
                for (f, x) in full.iter_mut().zip(v.iter()) {
                    *f += coef * x;
                }
            }
            full
        })
        .collect();
    Ok((spec, null.into_iter().map(|(_, v)| v.clone()).collect()))
}

/// Steklov eigenvalues of one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteklovMode {
    pub mode: u32,
    pub sigma: Vec<f64>,
    /// Basis coefficients of each eigenfunction.
    pub coefficients: Vec<Vec<f64>>,
    /// Basis directions with vanishing boundary trace, excluded from the
    /// boundary problem.
    pub null_trace: Vec<Vec<f64>>,
}

/// Steklov spectrum: `Δ h = 0`, `∂h/∂ν = σ h` (Laplacian) or `J h = 0`,
/// `∂h/∂ν = σ h` (Jacobi), computed on each mode's harmonic basis.
///
/// For the Jacobi operator the eigenvalues satisfy
/// `Q(ĥ) / ∫_∂ h² = σ - 1`. A J-harmonic direction with zero boundary
/// trace (the support function, in mode 0 of the catenoid) is split off and
/// reported in `null_trace`.
pub fn steklov_spectrum(
    surface: &SurfaceModel,
    operator: SteklovOperator,
    modes: RangeInclusive<u32>,
    n: usize,
) -> Result<(SpectrumResult, Vec<SteklovMode>)> {
    let per_mode = modes
        .into_par_iter()
        .map(|m| steklov_mode(surface, operator, m, n))
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for sm in &per_mode {
        for &s in &sm.sigma {
            for _ in 0..mode_multiplicity(sm.mode) {
                values.push(s);
                labels.push(sm.mode);
            }
        }
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(labels[a].cmp(&labels[b])));
    let len = idx.len();
    let spec = SpectrumResult {
        eigenvalues: idx.iter().map(|&i| values[i]).collect(),
        modes: idx.iter().map(|&i| labels[i]).collect(),
        eigenvectors: vec![],
        bc: Some(BoundaryCondition::Natural),
        n,
        order: vec![None; len],
    };
    Ok((spec, per_mode))
}

fn steklov_mode(surface: &SurfaceModel, operator: SteklovOperator, m: u32, n: usize) -> Result<SteklovMode> {
    let basis = harmonic_basis(surface, operator, m, n)?;
    let forms = ModeForms::new(surface, m, &basis.nodes);
    let k = basis.profiles.len();
    let p = &basis.profiles;
    let vd = |i: usize| (p[i].values.as_slice(), p[i].derivatives.as_slice());
    let b = pairwise(k, |i, j| forms.boundary(&p[i].values, &p[j].values));
    let a = match operator {
        SteklovOperator::Laplacian => pairwise(k, |i, j| forms.dirichlet_energy(vd(i), vd(j))),
        SteklovOperator::Jacobi => pairwise(k, |i, j| forms.index_form(vd(i), vd(j))),
    };
    let (spec, null_trace) = solve_on_range(&a, &b, 1e-10)?;
    if spec.is_empty() {
        return Err(Error::DegenerateBoundaryGram(m));
    }
    let shift = match operator {
        SteklovOperator::Laplacian => 0.0,
        SteklovOperator::Jacobi => 1.0,
    };
    Ok(SteklovMode {
        mode: m,
        sigma: spec.eigenvalues.iter().map(|v| v + shift).collect(),
        coefficients: spec.eigenvectors,
        null_trace,
    })
}

/// The 2×2 (or 1×1 on the disk) generalized problem of `𝒜` on one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlocalMode {
    pub mode: u32,
    /// `Q(φ_i, φ_j)`, row-major.
    pub q: Vec<Vec<f64>>,
    /// `∫_Σ φ_i φ_j`, row-major.
    pub gram: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    /// Basis coefficients of the eigenfunctions, `G`-orthonormal.
    pub coefficients: Vec<Vec<f64>>,
}

/// Spectrum of the non-local operator `𝒜` truncated at `max_mode`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlocalSpectrum {
    pub max_mode: u32,
    pub n: usize,
    /// `μ₀ ≤ μ₁ ≤ ...` with cos/sin copies repeated.
    pub eigenvalues: Vec<f64>,
    pub modes: Vec<u32>,
    pub per_mode: Vec<NonlocalMode>,
}

impl NonlocalSpectrum {
    pub fn mode(&self, m: u32) -> Option<&NonlocalMode> {
        self.per_mode.iter().find(|x| x.mode == m)
    }

    /// Lowest eigenvalue of each mode, ascending in mode.
    pub fn mode_minima(&self) -> Vec<(u32, f64)> {
        self.per_mode
            .iter()
            .map(|x| (x.mode, x.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)))
            .collect()
    }

    /// Tail certification: the last three modes have minima that are
    /// nonnegative (up to `guard`) and strictly increasing.
    pub fn tail_certified(&self, guard: f64) -> bool {
        let minima = self.mode_minima();
        if minima.len() < 3 {
            return false;
        }
        let tail = &minima[minima.len() - 3..];
        tail.iter().all(|(_, v)| *v >= -guard) && tail.windows(2).all(|w| w[1].1 > w[0].1)
    }

    pub fn multiplets(&self) -> Vec<Multiplet> {
        group_multiplets(&self.eigenvalues, &self.modes, 1e-9)
    }
}

/// Largest acceptable condition number of a per-mode Gram matrix.
const MAX_GRAM_CONDITION: f64 = 1e12;

/// Assembles and solves the per-mode problem of `𝒜` on a given basis.
pub fn nonlocal_mode(surface: &SurfaceModel, basis: &HarmonicBasis) -> Result<NonlocalMode> {
    let m = basis.mode;
    let forms = ModeForms::new(surface, m, &basis.nodes);
    let p = &basis.profiles;
    let k = p.len();
    let vd = |i: usize| (p[i].values.as_slice(), p[i].derivatives.as_slice());
    let q = pairwise(k, |i, j| forms.index_form(vd(i), vd(j)));
    let g = pairwise(k, |i, j| forms.gram(&p[i].values, &p[j].values));
    let ge = sym_eig(&g)?;
    let (lo, hi) = (ge.eigenvalues[0], ge.eigenvalues[k - 1]);
    if lo <= 0.0 || hi / lo > MAX_GRAM_CONDITION {
        return Err(Error::GramConditioning {
            mode: m,
            condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        });
    }
    let spec = sym_generalized_eig(&q, &g)?;
    let rows = |mat: &Matrix| (0..k).map(|i| mat.row(i).to_vec()).collect();
    Ok(NonlocalMode {
        mode: m,
        q: rows(&q),
        gram: rows(&g),
        eigenvalues: spec.eigenvalues,
        coefficients: spec.eigenvectors,
    })
}

/// Spectrum of `𝒜` on the modes `0..=max_mode` of `𝓔`.
pub fn nonlocal_spectrum(surface: &SurfaceModel, max_mode: u32, n: usize) -> Result<NonlocalSpectrum> {
    let per_mode = (0..=max_mode)
        .into_par_iter()
        .map(|m| nonlocal_mode(surface, &jharmonic_basis(surface, m, n)?))
        .collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::new();
    for pm in &per_mode {
        for &v in &pm.eigenvalues {
            for _ in 0..mode_multiplicity(pm.mode) {
                entries.push((v, pm.mode));
            }
        }
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(NonlocalSpectrum {
        max_mode,
        n,
        eigenvalues: entries.iter().map(|e| e.0).collect(),
        modes: entries.iter().map(|e| e.1).collect(),
        per_mode,
    })
}

/// One entry of the `Q(v^⊥, φ) = -2 ∫ v^⊥ φ` check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionResidual {
    pub vector: Vec3,
    pub mode: u32,
    pub profile: ProfileKind,
    /// `true` for the `sin mθ` copy.
    pub sine: bool,
    pub q_value: f64,
    pub l2_value: f64,
    /// `|Q + 2∫| / (|Q| + |∫| + 1)`.
    pub normalized_residual: f64,
}

/// Checks that each coordinate `v^⊥` is an eigenfunction of `𝒜` with
/// eigenvalue `-2` against every basis function `φ(s) cos mθ`,
/// `φ(s) sin mθ` of `𝓔` up to `max_mode`.
///
/// The angular integral is done numerically (trapezoid on
/// `4 (max_mode + 2)` angles) and `∂v^⊥` by central differences of the
/// closed-form normal, so cross-mode vanishing is observed rather than
/// assumed.
pub fn eigenfunction_residuals(surface: &SurfaceModel, max_mode: u32, n: usize) -> Result<Vec<EigenfunctionResidual>> {
    let c = surface.catenoid_constants("the v⊥ eigenfunction check")?;
    let bases = (0..=max_mode)
        .map(|m| jharmonic_basis(surface, m, n))
        .collect::<Result<Vec<_>>>()?;
    let nodes = &bases[0].nodes;
    let ns = nodes.len();
    let sw = simpson_weights(ns - 1, nodes[1] - nodes[0]);
    let nt = 4 * (max_mode as usize + 2);
    let dt = 2.0 * PI / nt as f64;
    let thetas: Vec<f64> = (0..nt).map(|j| j as f64 * dt).collect();
    let delta = 1e-5;
    let mut out = Vec::new();
    for v in [E_X, E_Y, E_Z] {
        // v⊥ and its parameter derivatives on the tensor grid
        let mut val = vec![0.0; ns * nt];
        let mut ds = vec![0.0; ns * nt];
        let mut dth = vec![0.0; ns * nt];
        for (i, &s) in nodes.iter().enumerate() {
            for (j, &t) in thetas.iter().enumerate() {
                let f = |a: f64, b: f64| surface.normal_component(&v, a, b);
                val[i * nt + j] = f(s, t);
                ds[i * nt + j] = (f(s + delta, t) - f(s - delta, t)) / (2.0 * delta);
                dth[i * nt + j] = (f(s, t + delta) - f(s, t - delta)) / (2.0 * delta);
            }
        }
        let pieces: Vec<EigenfunctionResidual> = bases
            .par_iter()
            .flat_map_iter(|basis| {
                let m = basis.mode as f64;
                let mut local = Vec::new();
                let copies: &[bool] = if basis.mode == 0 { &[false] } else { &[false, true] };
                for p in &basis.profiles {
                    for &sine in copies {
                        let trig = |t: f64| if sine { (m * t).sin() } else { (m * t).cos() };
                        let dtrig = |t: f64| if sine { m * (m * t).cos() } else { -m * (m * t).sin() };
                        let (mut grad, mut pot, mut l2, mut bdry) = (0.0, 0.0, 0.0, 0.0);
                        for i in 0..ns {
                            let s = nodes[i];
                            let area = surface.area_element(s);
                            let a2 = surface.squared_curvature(s);
                            let (mut g_row, mut p_row) = (0.0, 0.0);
                            for (j, &t) in thetas.iter().enumerate() {
                                let k = i * nt + j;
                                let phi = p.values[i] * trig(t);
                                // conformal metric: ∇u·∇w dA = (u_s w_s + u_θ w_θ) ds dθ
                                g_row += ds[k] * p.derivatives[i] * trig(t) + dth[k] * p.values[i] * dtrig(t);
                                p_row += val[k] * phi;
                            }
                            grad += sw[i] * g_row;
                            pot += sw[i] * a2 * area * p_row;
                            l2 += sw[i] * area * p_row;
                            if i == 0 || i == ns - 1 {
                                bdry += p_row;
                            }
                        }
                        let q_value = (grad - pot) * dt - bdry * dt / c.t;
                        let l2_value = l2 * dt;
                        local.push(EigenfunctionResidual {
                            vector: v,
                            mode: basis.mode,
                            profile: p.kind,
                            sine,
                            q_value,
                            l2_value,
                            normalized_residual: (q_value + 2.0 * l2_value).abs()
                                / (q_value.abs() + l2_value.abs() + 1.0),
                        });
                    }
                }
                local
            })
            .collect();
        out.extend(pieces);
    }
    Ok(out)
}
