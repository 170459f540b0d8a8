//! Numerical checks of integral and pointwise identities of the second
//! variation, independent of the spectral pipeline.
//!
//! Surface integrals use composite Simpson in the radial parameter and the
//! trapezoid rule in `θ`. Derivatives of test functions are analytic where
//! the function is a trigonometric polynomial and fourth-order central
//! differences otherwise.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::order_from_errors;
use crate::error::Result;
use crate::geometry::{dot, SurfaceKind, SurfaceModel, Vec3};
use crate::spectra::simpson_weights;

/// Default seed of the random part of the test-function corpus.
pub const DEFAULT_SEED: u64 = 20_160_101;
/// Angular quadrature points.
const N_THETA: usize = 64;
/// Step of the finite-difference derivatives of non-polynomial functions.
const FD_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub left: f64,
    pub right: f64,
    pub abs_residual: f64,
    /// `|left - right| / max(|left| + |right|, 1)`.
    pub rel_residual: f64,
    pub n: usize,
    /// Observed order under grid refinement; `None` when the residual is
    /// already at the noise floor on the coarser grids.
    pub order: Option<f64>,
}

impl IdentityReport {
    fn new(name: impl Into<String>, left: f64, right: f64, n: usize, order: Option<f64>) -> Self {
        let abs_residual = (left - right).abs();
        Self {
            name: name.into(),
            left,
            right,
            abs_residual,
            rel_residual: abs_residual / (left.abs() + right.abs()).max(1.0),
            n,
            order,
        }
    }

    /// Residual within `tol` and, if measurable, order at least `min_order`.
    pub fn passes(&self, tol: f64, min_order: f64) -> bool {
        self.rel_residual <= tol && self.order.map_or(true, |p| p >= min_order)
    }
}

/// Noise floor below which a residual carries no order information. The
/// finite-difference derivatives of non-polynomial functions leave a
/// grid-independent error of order 1e-11.
fn noise_floor(scale: f64) -> f64 {
    1e-10 * scale.max(1.0)
}

/// Evaluates `pair(n)` on `n/4, n/2, n` and reports at `n` with the order
/// from the finest pair whose residuals are both above the noise floor.
fn refined(name: &str, n: usize, pair: impl Fn(usize) -> (f64, f64)) -> IdentityReport {
    let levels: Vec<(f64, f64)> = [n / 4, n / 2, n].iter().map(|&k| pair(k)).collect();
    let res: Vec<f64> = levels.iter().map(|(l, r)| (l - r).abs()).collect();
    let (left, right) = levels[2];
    let floor = noise_floor(left.abs() + right.abs());
    let order = if res[1] > floor && res[2] > floor {
        order_from_errors(res[1], res[2])
    } else if res[0] > floor && res[1] > floor {
        order_from_errors(res[0], res[1])
    } else {
        None
    };
    IdentityReport::new(name, left, right, n, order)
}

/// A scalar function on the parameter domain with first and second
/// derivatives.
pub trait SurfaceFunction: Sync {
    fn value(&self, s: f64, theta: f64) -> f64;

    fn gradient(&self, s: f64, theta: f64) -> [f64; 2] {
        let d = |f: &dyn Fn(f64) -> f64| {
            let h = FD_STEP;
            (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h)
        };
        [
            d(&|e| self.value(s + e, theta)),
            d(&|e| self.value(s, theta + e)),
        ]
    }

    /// `(∂²_s, ∂²_θ)`.
    fn second_derivatives(&self, s: f64, theta: f64) -> [f64; 2] {
        let d2 = |f: &dyn Fn(f64) -> f64| {
            let h = FD_STEP;
            (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
        };
        [
            d2(&|e| self.value(s + e, theta)),
            d2(&|e| self.value(s, theta + e)),
        ]
    }
}

/// A closure with finite-difference derivatives.
pub struct NumericFunction<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Sync> SurfaceFunction for NumericFunction<F> {
    fn value(&self, s: f64, theta: f64) -> f64 {
        (self.0)(s, theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub coefficient: f64,
    pub power: u32,
    pub mode: u32,
    pub sine: bool,
}

/// `Σ c s^p cos(mθ)` or `sin(mθ)`, with exact derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    pub label: String,
    pub terms: Vec<TrigTerm>,
}

fn power_derivative(s: f64, p: u32, k: u32) -> f64 {
    if k > p {
        return 0.0;
    }
    let falling: f64 = (0..k).map(|j| (p - j) as f64).product();
    falling * s.powi((p - k) as i32)
}

impl TrigTerm {
    fn angular(&self, theta: f64, k: u32) -> f64 {
        let m = self.mode as f64;
        let phase = m * theta + k as f64 * PI / 2.0;
        let base = if self.sine { phase.sin() } else { phase.cos() };
        m.powi(k as i32) * base
    }
}

impl SurfaceFunction for TrigPolynomial {
    fn value(&self, s: f64, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * power_derivative(s, t.power, 0) * t.angular(theta, 0))
            .sum()
    }

    fn gradient(&self, s: f64, theta: f64) -> [f64; 2] {
        self.terms.iter().fold([0.0; 2], |acc, t| {
            [
                acc[0] + t.coefficient * power_derivative(s, t.power, 1) * t.angular(theta, 0),
                acc[1] + t.coefficient * power_derivative(s, t.power, 0) * t.angular(theta, 1),
            ]
        })
    }

    fn second_derivatives(&self, s: f64, theta: f64) -> [f64; 2] {
        self.terms.iter().fold([0.0; 2], |acc, t| {
            [
                acc[0] + t.coefficient * power_derivative(s, t.power, 2) * t.angular(theta, 0),
                acc[1] + t.coefficient * power_derivative(s, t.power, 0) * t.angular(theta, 2),
            ]
        })
    }
}

/// Test functions for the integration-by-parts identity: the monomials
/// `s^p cos mθ`, `s^p sin mθ` (`p ≤ 3`, `m ≤ 2`) followed by ten random
/// four-term trigonometric polynomials with `p, m ≤ 3`.
pub fn ipp_corpus(seed: u64) -> Vec<TrigPolynomial> {
    let mut out = Vec::new();
    for m in 0..=2u32 {
        for sine in [false, true] {
            if m == 0 && sine {
                continue;
            }
            for p in 0..=3u32 {
                out.push(TrigPolynomial {
                    label: format!("s^{p} {}({m}θ)", if sine { "sin" } else { "cos" }),
                    terms: vec![TrigTerm {
                        coefficient: 1.0,
                        power: p,
                        mode: m,
                        sine,
                    }],
                });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..10 {
        let terms = (0..4)
            .map(|_| TrigTerm {
                coefficient: rng.gen_range(-1.0..1.0),
                power: rng.gen_range(0..=3),
                mode: rng.gen_range(0..=3),
                sine: rng.gen_bool(0.5),
            })
            .collect();
        out.push(TrigPolynomial {
            label: format!("random #{k}"),
            terms,
        });
    }
    out
}

/// Tensor Simpson × trapezoid rule on the parameter domain.
pub struct SurfaceQuadrature {
    surface: SurfaceModel,
    pub s: Vec<f64>,
    s_weights: Vec<f64>,
    pub theta: Vec<f64>,
    theta_weight: f64,
}

impl SurfaceQuadrature {
    /// `n` radial intervals (rounded up to even) and `n_theta` angles.
    pub fn new(surface: &SurfaceModel, n: usize, n_theta: usize) -> Self {
        let n = n + n % 2;
        let (lo, hi) = surface.radial_range();
        let h = (hi - lo) / n as f64;
        Self {
            surface: *surface,
            s: (0..=n).map(|i| lo + i as f64 * h).collect(),
            s_weights: simpson_weights(n, h),
            theta: (0..n_theta).map(|j| 2.0 * PI * j as f64 / n_theta as f64).collect(),
            theta_weight: 2.0 * PI / n_theta as f64,
        }
    }

    /// `∫_Σ f dA` for `f` given in parameters.
    pub fn surface_integral(&self, f: impl Fn(f64, f64) -> f64 + Sync) -> f64 {
        // rows in parallel, summed in a fixed order for reproducibility
        let rows: Vec<f64> = self
            .s
            .par_iter()
            .zip(&self.s_weights)
            .map(|(&s, &w)| {
                let area = self.surface.area_element(s);
                if area == 0.0 {
                    return 0.0;
                }
                w * area * self.theta.iter().map(|&t| f(s, t)).sum::<f64>()
            })
            .collect();
        rows.iter().sum::<f64>() * self.theta_weight
    }

    /// `∫_∂Σ f`.
    pub fn boundary_integral(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let le = self.surface.boundary_line_element();
        self.surface
            .boundary_parameters()
            .iter()
            .map(|&s| le * self.theta.iter().map(|&t| f(s, t)).sum::<f64>())
            .sum::<f64>()
            * self.theta_weight
    }

    /// `∇u·∇w` from parameter derivatives.
    fn gradient_product(&self, s: f64, gu: [f64; 2], gw: [f64; 2]) -> f64 {
        match self.surface.kind() {
            SurfaceKind::Catenoid => {
                let g = self.surface.area_element(s);
                (gu[0] * gw[0] + gu[1] * gw[1]) / g
            }
            SurfaceKind::Disk => gu[0] * gw[0] + gu[1] * gw[1] / (s * s),
        }
    }

    /// The index form `∫ ∇u·∇w - |A|² u w - ∫_∂ u w`.
    pub fn index_form(&self, u: &dyn SurfaceFunction, w: &dyn SurfaceFunction) -> f64 {
        let surf = self.surface;
        let interior = self.surface_integral(|s, t| {
            self.gradient_product(s, u.gradient(s, t), w.gradient(s, t))
                - surf.squared_curvature(s) * u.value(s, t) * w.value(s, t)
        });
        interior - self.boundary_integral(|s, t| u.value(s, t) * w.value(s, t))
    }

    /// `J w = Δw - |A|² w` with the nonnegative Laplacian `Δ = -div ∇`.
    pub fn jacobi(&self, w: &dyn SurfaceFunction, s: f64, theta: f64) -> f64 {
        let [wss, wtt] = w.second_derivatives(s, theta);
        let lap = match self.surface.kind() {
            SurfaceKind::Catenoid => -(wss + wtt) / self.surface.area_element(s),
            SurfaceKind::Disk => -(wss + w.gradient(s, theta)[0] / s + wtt / (s * s)),
        };
        lap - self.surface.squared_curvature(s) * w.value(s, theta)
    }
}

fn normal_part(surface: SurfaceModel, v: Vec3) -> NumericFunction<impl Fn(f64, f64) -> f64 + Sync> {
    NumericFunction(move |s, t| surface.normal_component(&v, s, t))
}

/// `Q(v^⊥, v^⊥) = -2 ∫ |v^⊥|²`.
pub fn check_fsn(surface: &SurfaceModel, v: &Vec3, n: usize) -> IdentityReport {
    let vp = normal_part(*surface, *v);
    refined("Q(v⊥,v⊥) = -2∫|v⊥|²", n, |k| {
        let q = SurfaceQuadrature::new(surface, k, N_THETA);
        let l2 = q.surface_integral(|s, t| vp.value(s, t).powi(2));
        (q.index_form(&vp, &vp), -2.0 * l2)
    })
}

/// Integration by parts against an arbitrary smooth `w`:
/// `Q(v^⊥, w) = -2 ∫ v^⊥ w + ∫ (J w)(Y, N)` with
/// `Y = (v, x) x + ½ (1 - |x|²) v`.
pub fn check_ipp(surface: &SurfaceModel, v: &Vec3, w: &dyn SurfaceFunction, n: usize) -> IdentityReport {
    let surf = *surface;
    let vp = normal_part(surf, *v);
    let y_normal = |s: f64, t: f64| {
        let x = surf.position(s, t);
        let nn = surf.normal(s, t);
        dot(v, &x) * dot(&x, &nn) + 0.5 * (1.0 - dot(&x, &x)) * dot(v, &nn)
    };
    refined("Q(v⊥,w) = -2∫v⊥w + ∫(Jw)(Y,N)", n, |k| {
        let q = SurfaceQuadrature::new(surface, k, N_THETA);
        let lhs = q.index_form(&vp, w);
        let l2 = q.surface_integral(|s, t| vp.value(s, t) * w.value(s, t));
        let jy = q.surface_integral(|s, t| q.jacobi(w, s, t) * y_normal(s, t));
        (lhs, -2.0 * l2 + jy)
    })
}

/// Runs `check_ipp` over the corpus for one vector.
pub fn check_ipp_corpus(surface: &SurfaceModel, v: &Vec3, n: usize, seed: u64) -> Vec<(String, IdentityReport)> {
    ipp_corpus(seed)
        .into_par_iter()
        .map(|w| {
            let r = check_ipp(surface, v, &w, n);
            (w.label, r)
        })
        .collect()
}

/// Sample points for the pointwise identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePoints {
    pub interior: Vec<(f64, f64)>,
    pub boundary: Vec<(f64, f64)>,
}

/// `count` interior points drawn uniformly from the inner 90% of the radial
/// range, and `count` boundary points spread over the boundary circles.
pub fn sample_points(surface: &SurfaceModel, count: usize, seed: u64) -> SamplePoints {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = surface.radial_range();
    let margin = 0.05 * (hi - lo);
    let interior = (0..count)
        .map(|_| (rng.gen_range(lo + margin..hi - margin), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let ends = surface.boundary_parameters();
    let boundary = (0..count)
        .map(|k| (ends[k % ends.len()], rng.gen_range(0.0..2.0 * PI)))
        .collect();
    SamplePoints { interior, boundary }
}

/// Directional derivative of `f` along the unit frame vector `e_i` by a
/// central difference of step `h` in the parameters.
fn frame_derivative(surface: &SurfaceModel, f: &dyn Fn(f64, f64) -> f64, s: f64, t: f64, i: usize, h: f64) -> f64 {
    let metric = surface.geometry_at(s, t).map(|g| g.metric).unwrap_or([1.0, 1.0]);
    let (ds, dt) = if i == 0 { (h, 0.0) } else { (0.0, h) };
    (f(s + ds, t + dt) - f(s - ds, t - dt)) / (2.0 * h) / metric[i].sqrt()
}

/// Derivative along the outward conormal at a boundary point by a
/// second-order one-sided difference.
fn conormal_derivative(surface: &SurfaceModel, f: &dyn Fn(f64, f64) -> f64, s: f64, t: f64, h: f64) -> f64 {
    let sign = surface.outward_sign(s);
    let metric = surface.geometry_at(s, t).map(|g| g.metric[0]).unwrap_or(1.0);
    let d = (3.0 * f(s, t) - 4.0 * f(s - sign * h, t) + f(s - 2.0 * sign * h, t)) / (2.0 * h);
    d / metric.sqrt()
}

/// Fourth-order one-sided conormal derivative, for integrated checks where
/// a second-order step error would mask the quadrature error.
fn conormal_derivative_4(surface: &SurfaceModel, f: &dyn Fn(f64, f64) -> f64, s: f64, t: f64, h: f64) -> f64 {
    let sign = surface.outward_sign(s);
    let metric = surface.geometry_at(s, t).map(|g| g.metric[0]).unwrap_or(1.0);
    let at = |k: f64| f(s - sign * k * h, t);
    let d = (25.0 * at(0.0) - 48.0 * at(1.0) + 36.0 * at(2.0) - 16.0 * at(3.0) + 3.0 * at(4.0)) / (12.0 * h);
    d / metric.sqrt()
}

/// Worst pointwise residual of a family of `(left, right)` pairs.
fn worst(name: &str, pairs: impl Iterator<Item = (f64, f64)>, n: usize, order: Option<f64>) -> IdentityReport {
    let (l, r) = pairs
        .max_by(|a, b| (a.0 - a.1).abs().total_cmp(&(b.0 - b.1).abs()))
        .unwrap_or((0.0, 0.0));
    IdentityReport::new(name, l, r, n, order)
}

/// The scalar identities for the normal components of `x` and `v` on a
/// codimension-one free boundary minimal surface:
///
/// 1. `e_i (x, N) = -h(x^⊤, e_i)`
/// 2. `e_i (v, N) = -h(v^⊤, e_i)`
/// 3. `Δ |x|² = -4`
/// 4. `ν (x, N) = -h(ν, ν)` on the boundary
/// 5. `ν (v, N) = -(v, ν) h(ν, ν)` on the boundary
///
/// Derivatives are finite differences of the closed-form parametrization
/// with step `1e-4`. The reported order compares steps `2e-4` and `1e-4`.
pub fn check_pointwise_identities(surface: &SurfaceModel, points: &SamplePoints, v: &Vec3) -> Result<Vec<IdentityReport>> {
    let surf = *surface;
    let x_n = move |s: f64, t: f64| dot(&surf.position(s, t), &surf.normal(s, t));
    let v_n = move |s: f64, t: f64| surf.normal_component(v, s, t);
    let x2 = move |s: f64, t: f64| dot(&surf.position(s, t), &surf.position(s, t));
    let mut frames = Vec::new();
    for &(s, t) in points.interior.iter().chain(&points.boundary) {
        frames.push(((s, t), surf.geometry_at(s, t)?));
    }
    let (inner, outer) = frames.split_at(points.interior.len());
    let h_form = |h: &[[f64; 2]; 2], a: [f64; 2], i: usize| h[i][0] * a[0] + h[i][1] * a[1];
    let tangential = |g: &crate::geometry::GeometryAtPoint, w: &Vec3| [dot(w, &g.e1), dot(w, &g.e2)];

    let measure = |step: f64| -> [Vec<(f64, f64)>; 5] {
        let mut out: [Vec<(f64, f64)>; 5] = Default::default();
        for ((s, t), g) in inner {
            let xt = tangential(g, &g.position);
            let vt = tangential(g, v);
            for i in 0..2 {
                out[0].push((frame_derivative(&surf, &x_n, *s, *t, i, step), -h_form(&g.h, xt, i)));
                out[1].push((frame_derivative(&surf, &v_n, *s, *t, i, step), -h_form(&g.h, vt, i)));
            }
            let lap = match surf.kind() {
                SurfaceKind::Catenoid => {
                    let f = |a: f64, b: f64| x2(a, b);
                    let d2s = (f(s + step, *t) - 2.0 * f(*s, *t) + f(s - step, *t)) / (step * step);
                    let d2t = (f(*s, t + step) - 2.0 * f(*s, *t) + f(*s, t - step)) / (step * step);
                    -(d2s + d2t) / g.metric[0]
                }
                SurfaceKind::Disk => {
                    let f = |a: f64, b: f64| x2(a, b);
                    let d2r = (f(s + step, *t) - 2.0 * f(*s, *t) + f(s - step, *t)) / (step * step);
                    let d1r = (f(s + step, *t) - f(s - step, *t)) / (2.0 * step);
                    let d2t = (f(*s, t + step) - 2.0 * f(*s, *t) + f(*s, t - step)) / (step * step);
                    -(d2r + d1r / s + d2t / (s * s))
                }
            };
            out[2].push((lap, -4.0));
        }
        for ((s, t), g) in outer {
            let sign = surf.outward_sign(*s);
            let nu = g.e1.map(|c| sign * c);
            let h_nn = g.h[0][0];
            out[3].push((conormal_derivative(&surf, &x_n, *s, *t, step), -h_nn));
            out[4].push((conormal_derivative(&surf, &v_n, *s, *t, step), -dot(v, &nu) * h_nn));
        }
        out
    };
    let names = [
        "e_i(x,N) = -h(x⊤,e_i)",
        "e_i(v,N) = -h(v⊤,e_i)",
        "Δ|x|² = -4",
        "ν(x,N) = -h(ν,ν)",
        "ν(v,N) = -(v,ν)h(ν,ν)",
    ];
    let coarse = measure(2e-4);
    let fine = measure(1e-4);
    let max_res = |v: &[(f64, f64)]| v.iter().map(|(l, r)| (l - r).abs()).fold(0.0, f64::max);
    Ok(names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let (rc, rf) = (max_res(&coarse[k]), max_res(&fine[k]));
            // a residual that does not shrink with the step is roundoff, not truncation
            let order = if rf > 1e-9 && rc > rf { order_from_errors(rc, rf) } else { None };
            worst(name, fine[k].iter().copied(), fine[k].len(), order)
        })
        .collect())
}

/// `Q(1, ξ) = -∫|A|² ξ`, compared with `∫_∂Σ ∂ξ/∂ν` (Green's identity with
/// `Jξ = 0`, `ξ|∂Σ = 0`).
pub fn check_q1xi(surface: &SurfaceModel, n: usize) -> Result<IdentityReport> {
    surface.catenoid_constants("Q(1, ξ)")?;
    let surf = *surface;
    let xi = NumericFunction(move |s: f64, t: f64| surf.support_function(s, t));
    let one = TrigPolynomial {
        label: "1".into(),
        terms: vec![TrigTerm {
            coefficient: 1.0,
            power: 0,
            mode: 0,
            sine: false,
        }],
    };
    let xi_fn = move |s: f64, t: f64| surf.support_function(s, t);
    Ok(refined("Q(1,ξ) = ∫∂ ∂ξ/∂ν", n, |k| {
        let q = SurfaceQuadrature::new(surface, k, N_THETA);
        let lhs = q.index_form(&one, &xi);
        let rhs = q.boundary_integral(|s, t| conormal_derivative_4(&surf, &xi_fn, s, t, 1e-3));
        (lhs, rhs)
    }))
}

/// `∂ξ/∂ν` against `-h_ξ(ν, ν)`, where `h_ξ` is the second fundamental form
/// for the normal that makes `ξ` positive.
pub fn check_conormal_support(surface: &SurfaceModel, points: &SamplePoints) -> Result<IdentityReport> {
    surface.catenoid_constants("∂ξ/∂ν")?;
    let surf = *surface;
    let xi = move |s: f64, t: f64| surf.support_function(s, t);
    let mut pairs = Vec::new();
    for &(s, t) in &points.boundary {
        let g = surf.geometry_at(s, t)?;
        let h_xi = surf.support_orientation() * g.h[0][0];
        pairs.push((conormal_derivative(&surf, &xi, s, t, 1e-4), -h_xi));
    }
    Ok(worst("∂ξ/∂ν = -h(ν,ν)", pairs.into_iter(), points.boundary.len(), None))
}

/// `∫_Σ ξ v^⊥ = 0`.
pub fn check_support_orthogonality(surface: &SurfaceModel, v: &Vec3, n: usize) -> Result<IdentityReport> {
    surface.catenoid_constants("∫ ξ v⊥")?;
    let surf = *surface;
    let q = SurfaceQuadrature::new(surface, n, N_THETA);
    let value = q.surface_integral(|s, t| surf.support_function(s, t) * surf.normal_component(v, s, t));
    Ok(IdentityReport::new("∫ξv⊥ = 0", value, 0.0, n, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{E_X, E_Y, E_Z};
    use approx::assert_abs_diff_eq;

    #[test]
    fn trig_polynomial_derivatives_match_fd() {
        let p = &ipp_corpus(3)[25];
        let fd = NumericFunction(|s, t| p.value(s, t));
        let (s, t) = (0.3, 1.1);
        for (a, b) in p.gradient(s, t).iter().zip(fd.gradient(s, t)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
        }
        for (a, b) in p.second_derivatives(s, t).iter().zip(fd.second_derivatives(s, t)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-6);
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        assert_eq!(ipp_corpus(7), ipp_corpus(7));
        assert_ne!(ipp_corpus(7), ipp_corpus(8));
        assert_eq!(ipp_corpus(7).len(), 30);
    }

    #[test]
    fn quadrature_area_of_catenoid() {
        let s = SurfaceModel::critical_catenoid();
        let c = s.constants().unwrap();
        let q = SurfaceQuadrature::new(&s, 1024, 16);
        let area = q.surface_integral(|_, _| 1.0);
        let exact = PI * c.a * c.a * (2.0 * c.t + (2.0 * c.t).sinh());
        assert_abs_diff_eq!(area, exact, epsilon = 1e-9);
    }

    #[test]
    fn disk_fsn_is_exact() {
        let r = check_fsn(&SurfaceModel::flat_disk(), &E_Z, 64);
        assert_abs_diff_eq!(r.left, -2.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(r.right, -2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn pointwise_identities_on_disk() {
        let d = SurfaceModel::flat_disk();
        let pts = sample_points(&d, 10, 1);
        for r in check_pointwise_identities(&d, &pts, &E_Y).unwrap() {
            assert!(r.abs_residual < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn support_orthogonal_to_coordinates() {
        let s = SurfaceModel::critical_catenoid();
        for v in [E_X, E_Y, E_Z] {
            assert!(check_support_orthogonality(&s, &v, 256).unwrap().abs_residual < 1e-10);
        }
    }
}
