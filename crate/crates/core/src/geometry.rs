//! Closed-form geometry of the two model surfaces: the critical catenoid and
//! the flat unit disk.
//!
//! The catenoid is parametrized by
//! `X(s, θ) = a (cosh s cos θ, cosh s sin θ, s)` on `[-T, T] × [0, 2π)`, where
//! `T tanh T = 1` and `a = 1 / (T cosh T)`. The unit normal is fixed once and
//! for all as `X_s × X_θ / |X_s × X_θ|`, which gives
//! `N = (-cos θ, -sin θ, sinh s) / cosh s`. Every signed quantity below
//! (normal components, second fundamental form) is taken with respect to this
//! normal. The disk uses polar coordinates `(r, θ)` and the normal `e_z`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub const E_X: Vec3 = [1.0, 0.0, 0.0];
pub const E_Y: Vec3 = [0.0, 1.0, 0.0];
pub const E_Z: Vec3 = [0.0, 0.0, 1.0];

#[inline]
pub fn dot(u: &Vec3, v: &Vec3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

#[inline]
pub fn cross(u: &Vec3, v: &Vec3) -> Vec3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

#[inline]
pub fn norm(u: &Vec3) -> f64 {
    dot(u, u).sqrt()
}

#[inline]
fn scale(u: &Vec3, c: f64) -> Vec3 {
    [c * u[0], c * u[1], c * u[2]]
}

/// Constants of the critical catenoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatenoidConstants {
    /// Half-length of the `s` interval, the positive root of `T tanh T = 1`.
    pub t: f64,
    /// Scale factor `1 / (T cosh T)`.
    pub a: f64,
}

impl CatenoidConstants {
    /// Residual `T tanh T - 1` of the defining equation.
    pub fn residual(&self) -> f64 {
        self.t * self.t.tanh() - 1.0
    }
}

fn critical_equation(t: f64) -> f64 {
    t * t.tanh() - 1.0
}

/// Solves `T tanh T = 1` by bisection on `[1, 1.5]`.
///
/// The iteration stops as soon as `|T tanh T - 1| <= tolerance` or the
/// bracket can no longer be halved in floating point; in the latter case the
/// endpoint with the smaller residual is returned.
pub fn solve_catenoid_constants(tolerance: f64) -> CatenoidConstants {
    let (mut lo, mut hi) = (1.0_f64, 1.5_f64);
    let mut f_lo = critical_equation(lo);
    debug_assert!(f_lo < 0.0 && critical_equation(hi) > 0.0);
    let mut best = if f_lo.abs() < critical_equation(hi).abs() { lo } else { hi };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = critical_equation(mid);
        if f_mid.abs() < critical_equation(best).abs() {
            best = mid;
        }
        if f_mid.abs() <= tolerance {
            break;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    CatenoidConstants {
        t: best,
        a: 1.0 / (best * best.cosh()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Catenoid,
    Disk,
}

impl std::fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceKind::Catenoid => f.write_str("catenoid"),
            SurfaceKind::Disk => f.write_str("disk"),
        }
    }
}

/// A rotationally symmetric free boundary minimal surface in the unit ball.
///
/// The first parameter is `s ∈ [-T, T]` on the catenoid and `r ∈ [0, 1]` on
/// the disk; the second is the angle `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceModel {
    kind: SurfaceKind,
    constants: Option<CatenoidConstants>,
}

/// Frame, normal and curvature data at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryAtPoint {
    pub position: Vec3,
    /// Unit tangent along the first coordinate.
    pub e1: Vec3,
    /// Unit tangent along `θ`.
    pub e2: Vec3,
    pub normal: Vec3,
    /// Second fundamental form `h(e_i, e_j) = (D_{e_i} e_j, N)` in the frame.
    pub h: [[f64; 2]; 2],
    /// Diagonal metric coefficients `(g_11, g_θθ)` of the parametrization.
    pub metric: [f64; 2],
}

impl GeometryAtPoint {
    /// `|A|² = h11² + 2 h12² + h22²`.
    pub fn squared_curvature(&self) -> f64 {
        let h = &self.h;
        h[0][0] * h[0][0] + 2.0 * h[0][1] * h[0][1] + h[1][1] * h[1][1]
    }

    pub fn mean_curvature(&self) -> f64 {
        self.h[0][0] + self.h[1][1]
    }

    /// The conformal factor `ρ²` when the parametrization is conformal.
    pub fn conformal_factor(&self) -> Option<f64> {
        let [g1, g2] = self.metric;
        ((g1 - g2).abs() <= 1e-14 * g1.abs().max(1.0)).then_some(g1)
    }
}

/// Area of the surface and length of its boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaLength {
    pub area: f64,
    pub length: f64,
}

impl SurfaceModel {
    /// The critical catenoid with constants solved to machine precision.
    pub fn critical_catenoid() -> Self {
        Self::catenoid(solve_catenoid_constants(1e-15))
    }

    pub fn catenoid(constants: CatenoidConstants) -> Self {
        Self {
            kind: SurfaceKind::Catenoid,
            constants: Some(constants),
        }
    }

    pub fn flat_disk() -> Self {
        Self {
            kind: SurfaceKind::Disk,
            constants: None,
        }
    }

    pub fn from_kind(kind: SurfaceKind) -> Self {
        match kind {
            SurfaceKind::Catenoid => Self::critical_catenoid(),
            SurfaceKind::Disk => Self::flat_disk(),
        }
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn is_catenoid(&self) -> bool {
        self.kind == SurfaceKind::Catenoid
    }

    pub fn constants(&self) -> Option<CatenoidConstants> {
        self.constants
    }

    pub(crate) fn catenoid_constants(&self, what: &'static str) -> Result<CatenoidConstants> {
        self.constants.ok_or(Error::CatenoidOnly(what))
    }

    /// Range of the first coordinate.
    pub fn radial_range(&self) -> (f64, f64) {
        match self.constants {
            Some(c) => (-c.t, c.t),
            None => (0.0, 1.0),
        }
    }

    /// First-coordinate values of the boundary circles.
    pub fn boundary_parameters(&self) -> Vec<f64> {
        match self.constants {
            Some(c) => vec![-c.t, c.t],
            None => vec![1.0],
        }
    }

    /// `±1`: the sign of `∂/∂s` relative to the outward conormal at a
    /// boundary circle.
    pub fn outward_sign(&self, s: f64) -> f64 {
        if s < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn contains(&self, s: f64, theta: f64) -> bool {
        let (lo, hi) = self.radial_range();
        let slack = 1e-12 * hi.abs().max(1.0);
        s >= lo - slack && s <= hi + slack && (-1e-12..=2.0 * PI + 1e-12).contains(&theta)
    }

    fn check(&self, s: f64, theta: f64) -> Result<()> {
        if self.contains(s, theta) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(s, theta))
        }
    }

    /// Immersion `x(s, θ)`; no domain check.
    pub fn position(&self, s: f64, theta: f64) -> Vec3 {
        let (st, ct) = theta.sin_cos();
        match self.constants {
            Some(c) => [c.a * s.cosh() * ct, c.a * s.cosh() * st, c.a * s],
            None => [s * ct, s * st, 0.0],
        }
    }

    /// Unit normal `N(s, θ)`; no domain check.
    pub fn normal(&self, s: f64, theta: f64) -> Vec3 {
        let (st, ct) = theta.sin_cos();
        match self.kind {
            SurfaceKind::Catenoid => {
                let ch = s.cosh();
                [-ct / ch, -st / ch, s.tanh()]
            }
            SurfaceKind::Disk => E_Z,
        }
    }

    /// Area element `sqrt(det g)` per unit `ds dθ`.
    pub fn area_element(&self, s: f64) -> f64 {
        match self.constants {
            Some(c) => {
                let ch = c.a * s.cosh();
                ch * ch
            }
            None => s,
        }
    }

    /// Weight `a² cosh² s` of the interior L² product in the first
    /// coordinate, after factoring out the angular integral.
    pub fn mass_weight(&self, s: f64) -> f64 {
        self.area_element(s)
    }

    /// Boundary length element per unit `dθ` (`a cosh T = 1/T` on the
    /// catenoid, `1` on the disk).
    pub fn boundary_line_element(&self) -> f64 {
        match self.constants {
            Some(c) => 1.0 / c.t,
            None => 1.0,
        }
    }

    /// `|A|²` as a closed form in the first coordinate.
    pub fn squared_curvature(&self, s: f64) -> f64 {
        match self.constants {
            Some(c) => {
                let ch2 = s.cosh().powi(2);
                2.0 / (c.a * c.a * ch2 * ch2)
            }
            None => 0.0,
        }
    }

    /// Exact frame and curvature at `(s, θ)`.
    pub fn geometry_at(&self, s: f64, theta: f64) -> Result<GeometryAtPoint> {
        self.check(s, theta)?;
        Ok(self.geometry_unchecked(s, theta))
    }

    pub(crate) fn geometry_unchecked(&self, s: f64, theta: f64) -> GeometryAtPoint {
        let (st, ct) = theta.sin_cos();
        let position = self.position(s, theta);
        let normal = self.normal(s, theta);
        match self.constants {
            Some(c) => {
                let ch = s.cosh();
                let th = s.tanh();
                // X_s / |X_s| and X_θ / |X_θ|, both of length a cosh s.
                let e1 = [th * ct, th * st, 1.0 / ch];
                let e2 = [-st, ct, 0.0];
                let k = 1.0 / (c.a * ch * ch);
                let rho2 = c.a * c.a * ch * ch;
                GeometryAtPoint {
                    position,
                    e1,
                    e2,
                    normal,
                    h: [[-k, 0.0], [0.0, k]],
                    metric: [rho2, rho2],
                }
            }
            None => GeometryAtPoint {
                position,
                e1: [ct, st, 0.0],
                e2: [-st, ct, 0.0],
                normal,
                h: [[0.0; 2]; 2],
                metric: [1.0, s * s],
            },
        }
    }

    /// `(v, N(s, θ))` under the fixed orientation of `N`.
    pub fn normal_component(&self, v: &Vec3, s: f64, theta: f64) -> f64 {
        dot(v, &self.normal(s, theta))
    }

    /// Sign `ε` such that `ξ = ε (x, N)` is positive in the interior.
    pub fn support_orientation(&self) -> f64 {
        match self.kind {
            SurfaceKind::Catenoid => -1.0,
            SurfaceKind::Disk => 1.0,
        }
    }

    /// Support function `ξ = ±(x, N)`, signed to be positive inside.
    ///
    /// On the catenoid this is `a (1 - s tanh s)`; on the disk it vanishes.
    pub fn support_function(&self, s: f64, theta: f64) -> f64 {
        match self.constants {
            Some(c) => c.a * (1.0 - s * s.tanh()),
            None => {
                let _ = theta;
                0.0
            }
        }
    }

    /// Support function evaluated as a dot product, for cross-checks.
    pub fn support_function_dot(&self, s: f64, theta: f64) -> f64 {
        self.support_orientation() * dot(&self.position(s, theta), &self.normal(s, theta))
    }

    /// Normal component `(ω × x, N)` of the rotation field about `axis`.
    ///
    /// Rotations preserve the ball, so these are Jacobi fields obeying the
    /// Robin condition `∂u/∂ν = u`: the null space of the index form.
    pub fn rotation_component(&self, axis: &Vec3, s: f64, theta: f64) -> f64 {
        let x = self.position(s, theta);
        dot(&cross(axis, &x), &self.normal(s, theta))
    }

    /// Area and boundary length, by composite Simpson quadrature of the area
    /// element (the angular integral is exact).
    pub fn area_and_boundary_length(&self) -> AreaLength {
        let (lo, hi) = self.radial_range();
        let n = 4096;
        let h = (hi - lo) / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sum += w * self.area_element(lo + i as f64 * h);
        }
        let area = 2.0 * PI * sum * h / 3.0;
        let length = 2.0 * PI * self.boundary_line_element() * self.boundary_parameters().len() as f64;
        AreaLength { area, length }
    }

    /// Tangent vector `x^⊤` decomposed in the frame.
    pub fn tangential_coordinates(&self, v: &Vec3, s: f64, theta: f64) -> [f64; 2] {
        let g = self.geometry_unchecked(s, theta);
        [dot(v, &g.e1), dot(v, &g.e2)]
    }
}

/// Unit vector in direction `v`.
pub fn normalized(v: &Vec3) -> Vec3 {
    scale(v, 1.0 / norm(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cat() -> SurfaceModel {
        SurfaceModel::critical_catenoid()
    }

    #[test]
    fn constants_solve_the_critical_equation() {
        let c = solve_catenoid_constants(1e-14);
        assert!(c.residual().abs() <= 1e-14);
        assert!(critical_equation(1.0) * critical_equation(1.5) < 0.0);
        // values from an independent Brent root-finder
        assert_abs_diff_eq!(c.t, 1.199_678_640_257_744_8, epsilon = 1e-12);
        assert_abs_diff_eq!(c.a, 0.460_485_088_250_125_5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.a * c.t * c.t.cosh(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn boundary_circles_on_unit_sphere() {
        let s = cat();
        let t = s.constants().unwrap().t;
        for k in 0..200 {
            let theta = 2.0 * PI * k as f64 / 200.0;
            for sb in [-t, t] {
                let x = s.position(sb, theta);
                assert!((norm(&x) - 1.0).abs() <= 1e-12);
                assert!(dot(&x, &s.normal(sb, theta)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn waist_point() {
        let s = cat();
        let a = s.constants().unwrap().a;
        let g = s.geometry_at(0.0, 0.0).unwrap();
        assert_abs_diff_eq!(g.position[0], a, epsilon = 1e-15);
        assert_abs_diff_eq!(g.normal[0].abs(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.squared_curvature(), 2.0 / (a * a), epsilon = 1e-12);
        assert_eq!(g.conformal_factor(), Some(a * a));
    }

    #[test]
    fn frame_matches_normalized_cross_product() {
        let s = cat();
        let a = s.constants().unwrap().a;
        for &(u, th) in &[(0.3, 1.1), (-0.9, 4.0), (1.1, 0.2)] {
            let g = s.geometry_at(u, th).unwrap();
            let xs = [a * u.sinh() * th.cos(), a * u.sinh() * th.sin(), a];
            let xt = [-a * u.cosh() * th.sin(), a * u.cosh() * th.cos(), 0.0];
            let n = normalized(&cross(&xs, &xt));
            for i in 0..3 {
                assert_abs_diff_eq!(g.normal[i], n[i], epsilon = 1e-14);
            }
            assert_abs_diff_eq!(dot(&g.e1, &g.e2), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(dot(&g.e1, &g.normal), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(norm(&g.e1), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(g.mean_curvature(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn domain_violation_is_an_error() {
        let s = cat();
        assert!(matches!(s.geometry_at(2.0, 0.0), Err(Error::OutsideDomain(..))));
        assert!(SurfaceModel::flat_disk().geometry_at(-0.1, 0.0).is_err());
    }

    #[test]
    fn normal_components() {
        let s = cat();
        for &(u, th) in &[(0.0, 0.0), (0.5, 1.0), (-1.1, 2.5)] {
            assert_abs_diff_eq!(s.normal_component(&E_Z, u, th), u.tanh(), epsilon = 1e-15);
            assert_abs_diff_eq!(
                s.normal_component(&E_X, u, th),
                -th.cos() / u.cosh(),
                epsilon = 1e-15
            );
        }
        let d = SurfaceModel::flat_disk();
        assert_eq!(d.normal_component(&E_Z, 0.4, 1.0), 1.0);
    }

    #[test]
    fn support_function_values() {
        let s = cat();
        let c = s.constants().unwrap();
        assert_abs_diff_eq!(s.support_function(c.t, 0.3), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.support_function(-c.t, 0.3), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.support_function(0.0, 0.0), c.a, epsilon = 1e-15);
        assert_eq!(s.support_function(0.7, 0.0), s.support_function(-0.7, 0.0));
    }

    #[test]
    fn area_length_closed_forms() {
        let s = cat();
        let c = s.constants().unwrap();
        let al = s.area_and_boundary_length();
        let area = 2.0 * PI * c.a * c.a * (c.t + c.t.sinh() * c.t.cosh());
        assert_abs_diff_eq!(al.area, area, epsilon = 1e-11);
        assert_abs_diff_eq!(al.length, 4.0 * PI / c.t, epsilon = 1e-12);
        assert_abs_diff_eq!(al.length / al.area, 2.0, epsilon = 1e-10);
        assert!(al.length > 2.0 * PI);
        let d = SurfaceModel::flat_disk().area_and_boundary_length();
        assert_abs_diff_eq!(d.area, PI, epsilon = 1e-12);
        assert_abs_diff_eq!(d.length, 2.0 * PI, epsilon = 1e-15);
    }

    #[test]
    fn rotation_fields_are_mode_one() {
        let s = cat();
        for u in [0.0_f64, 0.4, -1.0] {
            let expected = s.constants().unwrap().a * (u / u.cosh() + u.sinh());
            assert_abs_diff_eq!(
                s.rotation_component(&E_X, u, PI / 2.0),
                expected,
                epsilon = 1e-14
            );
        }
    }
}
