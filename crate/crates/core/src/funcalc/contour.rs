//! Quadrature contours for the Cauchy integral.
//!
//! The analyticity region `(C \ R) U (a, b)` (or a half-plane) is mapped
//! conformally onto a horizontal strip `lo < Im u < hi`. In the `u`-plane the
//! contour is an ellipse (or circle) chosen to maximise the distance, in
//! confocal elliptic coordinates, between the images of `sigma(X)` and the
//! strip boundary. The trapezoid rule in the ellipse angle then converges
//! geometrically with that distance as rate.

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::Matrix;
use crate::repfun::{FunctionSpec, Interval};
use crate::scalar::Real;

/// Hypothesis under which `f(X)` is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// `Im X > 0`.
    UpperHalf,
    /// `Im X < 0` (conjugate of the upper case).
    LowerHalf,
    /// `sigma(Re X)` inside the analyticity interval.
    Strip,
}

/// Conformal map `u -> z` onto the region the contour lives in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConformalMap {
    /// `z = u` on the whole plane.
    Identity,
    /// Onto `C \ (R \ (a, b))`; either endpoint may be infinite.
    Slit { a: f64, b: f64 },
    /// `z = x0 + e^u` onto the upper (`upper`) or lower half-plane.
    HalfPlane { x0: f64, upper: bool },
}

impl ConformalMap {
    fn for_interval(iv: &Interval) -> Self {
        if iv.a == f64::NEG_INFINITY && iv.b == f64::INFINITY {
            Self::Identity
        } else {
            Self::Slit { a: iv.a, b: iv.b }
        }
    }

    /// `Im u` bounds of the image strip.
    fn strip(&self) -> (f64, f64) {
        match *self {
            Self::Identity => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Slit { .. } => (-std::f64::consts::PI, std::f64::consts::PI),
            Self::HalfPlane { upper: true, .. } => (0.0, std::f64::consts::PI),
            Self::HalfPlane { upper: false, .. } => (-std::f64::consts::PI, 0.0),
        }
    }

    fn inverse(&self, z: Complex64) -> Complex64 {
        match *self {
            Self::Identity => z,
            Self::Slit { a, b } => match (a.is_finite(), b.is_finite()) {
                (true, true) => ((z - a) / (b - z)).ln(),
                (true, false) => (z - a).ln(),
                _ => (b - z).ln(),
            },
            Self::HalfPlane { x0, .. } => (z - x0).ln(),
        }
    }

    /// `(z(u), z'(u))`.
    fn forward<T: Real>(&self, u: Complex<T>) -> (Complex<T>, Complex<T>) {
        let one = Complex::new(T::one(), T::zero());
        match *self {
            Self::Identity => (u, one),
            Self::Slit { a, b } => match (a.is_finite(), b.is_finite()) {
                (true, true) => {
                    let (a, b) = (T::lit(a), T::lit(b));
                    let w = b - a;
                    // logistic sigma(u) written to avoid overflow on both sides
                    let s = if u.re >= T::zero() {
                        one / (one + (-u).exp())
                    } else {
                        let e = u.exp();
                        e / (one + e)
                    };
                    (s * w + a, s * (one - s) * w)
                }
                (true, false) => {
                    let e = u.exp();
                    (e + T::lit(a), e)
                }
                _ => {
                    let e = u.exp();
                    (-e + T::lit(b), -e)
                }
            },
            Self::HalfPlane { x0, .. } => {
                let e = u.exp();
                (e + T::lit(x0), e)
            }
        }
    }
}

/// Contour in the `u`-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    Circle { rho: f64 },
    /// Confocal ellipse `c + s d cosh(eta + i theta)`, `s = i` when `vertical`.
    Ellipse { d: f64, eta: f64, vertical: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourKind {
    Circle,
    MappedEllipse,
}

/// Closed quadrature path; `node_count` is set by the last integration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub kind: ContourKind,
    pub map: ConformalMap,
    pub shape: Shape,
    /// Centre in the `u`-plane.
    pub center: [f64; 2],
    /// Semi-major axis in the `u`-plane.
    pub radius: f64,
    /// Predicted geometric convergence rate per node.
    pub rate: f64,
    /// Smallest distance from a coarse set of nodes to `sigma(X)`.
    pub clearance: f64,
    #[serde(rename = "nodes")]
    pub node_count: usize,
}

impl Contour {
    /// `(u(theta), u'(theta))`.
    fn param<T: Real>(&self, theta: T) -> (Complex<T>, Complex<T>) {
        let c = Complex::new(T::lit(self.center[0]), T::lit(self.center[1]));
        let i = Complex::new(T::zero(), T::one());
        match self.shape {
            Shape::Circle { rho } => {
                let e = Complex::new(theta.cos(), theta.sin()) * T::lit(rho);
                (c + e, i * e)
            }
            Shape::Ellipse { d, eta, vertical } => {
                let w = Complex::new(T::lit(eta), theta);
                let s = if vertical { i } else { Complex::new(T::one(), T::zero()) };
                let d = T::lit(d);
                (c + s * w.cosh() * d, s * i * w.sinh() * d)
            }
        }
    }

    /// Node `zeta` and weight `w` such that
    /// `(2 pi i)^{-1} \oint g dz ~ sum_j w_j g(zeta_j)` for `count` equispaced angles.
    pub fn node<T: Real>(&self, j: usize, count: usize) -> (Complex<T>, Complex<T>) {
        let theta = T::lit(2.0 * std::f64::consts::PI) * T::from_count(j) / T::from_count(count);
        let (u, du) = self.param(theta);
        let (z, dz) = self.map.forward(u);
        let i = Complex::new(T::zero(), T::one());
        (z, dz * du / (i * T::from_count(count)))
    }

    pub fn nodes<T: Real>(&self, count: usize) -> Vec<(Complex<T>, Complex<T>)> {
        (0..count).map(|j| self.node(j, count)).collect()
    }
}

fn elliptic_coordinate(p: Complex64, c: Complex64, shape_dir: Option<(f64, bool)>) -> f64 {
    match shape_dir {
        None => (p - c).norm().ln(),
        Some((d, vertical)) => {
            let mut w = (p - c) / d;
            if vertical {
                w = w / Complex64::i();
            }
            let r = w + (w - 1.0).sqrt() * (w + 1.0).sqrt();
            r.norm().ln().abs()
        }
    }
}

/// Value of `eta` (or `ln rho`) at which the family first touches the strip boundary.
fn boundary_coordinate(c: Complex64, lo: f64, hi: f64, shape_dir: Option<(f64, bool)>) -> Option<f64> {
    let dist = (hi - c.im).min(c.im - lo);
    if !(dist > 0.0) {
        return None;
    }
    match shape_dir {
        None => Some(dist.ln()),
        Some((d, false)) => Some((dist / d).asinh()),
        Some((d, true)) => (dist > d).then(|| (dist / d).acosh()),
    }
}

/// Fraction of the gap between the spectrum and the boundary where the path sits.
const PLACEMENT: f64 = 0.55;

fn best_shape(points: &[Complex64], map: ConformalMap) -> Option<(Complex64, Shape, f64)> {
    let (lo, hi) = map.strip();
    let re_min = points.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
    let re_max = points.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
    let im_min = points.iter().map(|p| p.im).fold(f64::INFINITY, f64::min);
    let im_max = points.iter().map(|p| p.im).fold(f64::NEG_INFINITY, f64::max);
    let re_mid = 0.5 * (re_min + re_max);
    let hull_mid = 0.5 * (im_min + im_max);
    let strip_mid = 0.5 * (lo + hi);
    let span = (re_max - re_min).max(im_max - im_min).max(1e-3);

    let mut best: Option<(Complex64, Shape, f64)> = None;
    let mut consider = |c: Complex64, dir: Option<(f64, bool)>| {
        let Some(eta_b) = boundary_coordinate(c, lo, hi, dir) else { return };
        let eta_p = points.iter().map(|&p| elliptic_coordinate(p, c, dir)).fold(f64::NEG_INFINITY, f64::max);
        // keep a minimal clearance around tight clusters
        let eta_p = match dir {
            None => eta_p.max(eta_b - 2.0),
            Some(_) => eta_p.max(0.0),
        };
        let gap = eta_b - eta_p;
        if !(gap > 0.0) {
            return;
        }
        let eta = eta_p + PLACEMENT * gap;
        let shape = match dir {
            None => Shape::Circle { rho: eta.exp() },
            Some((d, vertical)) => Shape::Ellipse { d, eta, vertical },
        };
        if best.as_ref().is_none_or(|b| gap > b.2) {
            best = Some((c, shape, gap));
        }
    };
    let ims = [strip_mid, hull_mid, 0.5 * (strip_mid + hull_mid)];
    for &ci in &ims {
        for shift in [0.0, -0.25, 0.25] {
            let c = Complex64::new(re_mid + shift * span, ci);
            consider(c, None);
            for k in -10..=6 {
                let d = span * 2f64.powi(k);
                consider(c, Some((d, false)));
                consider(c, Some((d, true)));
            }
        }
    }
    best
}

/// Contour for `f(X)` given the eigenvalues of `X`.
pub(crate) fn contour_for(values: &[Complex64], f: &FunctionSpec, case: Case) -> Result<Contour> {
    if values.is_empty() {
        return Err(Error::Geometry("empty spectrum".into()));
    }
    for v in values {
        if v.im == 0.0 && !f.domain.contains(v.re) {
            return Err(Error::Geometry(format!("eigenvalue {v} on the cut outside {}", f.domain)));
        }
        if v.im.abs() < 1e-9 && f.domain.gap(v.re) < 1e-9 {
            return Err(Error::Geometry(format!("eigenvalue {v} within 1e-9 of a domain endpoint")));
        }
    }
    let slit = ConformalMap::for_interval(&f.holomorphy_interval());
    if slit == ConformalMap::Identity {
        let n = values.len() as f64;
        let c = values.iter().sum::<Complex64>() / n;
        let r = values.iter().map(|v| (v - c).norm()).fold(0.0, f64::max);
        let rho = r + (0.5 * r).max(1.0);
        let rate = if r > 0.0 { (rho / r).ln() } else { f64::INFINITY };
        return finish(ConformalMap::Identity, c, Shape::Circle { rho }, rate, values);
    }
    let mut maps = vec![slit];
    if case != Case::Strip {
        let x0 = values.iter().map(|v| v.re).sum::<f64>() / values.len() as f64;
        maps.push(ConformalMap::HalfPlane { x0, upper: case == Case::UpperHalf });
    }
    let mut best: Option<(ConformalMap, Complex64, Shape, f64)> = None;
    for map in maps {
        let pts: Vec<Complex64> = values.iter().map(|&v| map.inverse(v)).collect();
        if pts.iter().any(|p| !p.is_finite()) {
            continue;
        }
        let (lo, hi) = map.strip();
        if pts.iter().any(|p| !(p.im > lo && p.im < hi)) {
            continue;
        }
        if let Some((c, shape, gap)) = best_shape(&pts, map) {
            if best.as_ref().is_none_or(|b| gap > b.3) {
                best = Some((map, c, shape, gap));
            }
        }
    }
    let (map, c, shape, gap) =
        best.ok_or_else(|| Error::Geometry("no admissible contour separates the spectrum from the cut".into()))?;
    let rate = gap * PLACEMENT.min(1.0 - PLACEMENT);
    finish(map, c, shape, rate, values)
}

fn finish(map: ConformalMap, c: Complex64, shape: Shape, rate: f64, values: &[Complex64]) -> Result<Contour> {
    let (kind, radius) = match (map, shape) {
        (ConformalMap::Identity, Shape::Circle { rho }) => (ContourKind::Circle, rho),
        (_, Shape::Circle { rho }) => (ContourKind::MappedEllipse, rho),
        (_, Shape::Ellipse { d, eta, .. }) => (ContourKind::MappedEllipse, d * eta.cosh()),
    };
    let mut contour = Contour { kind, map, shape, center: [c.re, c.im], radius, rate, clearance: 0.0, node_count: 0 };
    let probe: Vec<(Complex64, Complex64)> = contour.nodes(256);
    let clearance = probe
        .iter()
        .flat_map(|(z, _)| values.iter().map(move |v| (z - v).norm()))
        .fold(f64::INFINITY, f64::min);
    if !(clearance > 0.0) || !clearance.is_finite() {
        return Err(Error::Geometry("contour passes through the spectrum".into()));
    }
    contour.clearance = clearance;
    Ok(contour)
}

/// Nested trapezoid rule with node doubling.
///
/// `integrand(zeta, R)` receives the resolvent `R = (zeta I - X)^{-1}`.
/// Stops when successive levels differ by at most `tol * ||value||` (or by
/// less than the accumulated rounding level). Returns `(value, last difference, nodes)`.
pub(crate) fn integrate<T: Real>(
    contour: &Contour,
    x: &Matrix<T>,
    tol: f64,
    start: usize,
    cap: usize,
    mut integrand: impl FnMut(Complex<T>, &Matrix<T>) -> Result<Matrix<T>>,
) -> Result<(Matrix<T>, T, usize)> {
    let n = x.dim();
    let eye = Matrix::<T>::identity(n);
    let resid_tol = T::tol(1e-10, 256.0);
    let mut eval = |count: usize, j: usize, sum: &mut Matrix<T>, mag: &mut T| -> Result<()> {
        let (z, w) = contour.node::<T>(j, count);
        let shifted = &Matrix::scalar(n, z) - x;
        let r = shifted.lu()?.inverse();
        let resid = (&shifted.matmul(&r) - &eye).max_abs();
        if !(resid <= resid_tol) {
            return Err(Error::Geometry(format!(
                "resolvent residual {:e} at node {z} exceeds tolerance",
                resid.as_f64()
            )));
        }
        let g = integrand(z, &r)?;
        // weights carry 1/count; rescale so levels share one running sum
        let w = w * T::from_count(count);
        *mag = *mag + g.norm_fro() * w.norm();
        sum.axpy(w, &g);
        Ok(())
    };
    let mut sum = Matrix::<T>::zeros(n);
    let mut mag = T::zero();
    let mut count = start;
    for j in 0..count {
        eval(count, j, &mut sum, &mut mag)?;
    }
    let mut prev = sum.scale_re(T::one() / T::from_count(count));
    let eps = T::epsilon();
    let tol_t = T::tol(tol, 64.0);
    let mut last_diff = f64::NAN;
    while count * 2 <= cap {
        let doubled = count * 2;
        for j in (1..doubled).step_by(2) {
            eval(doubled, j, &mut sum, &mut mag)?;
        }
        count = doubled;
        let value = sum.scale_re(T::one() / T::from_count(count));
        let diff = (&value - &prev).norm_fro();
        let floor = T::lit(64.0) * eps * mag / T::from_count(count);
        if diff <= tol_t * value.norm_fro() || diff <= floor {
            return Ok((value, diff, count));
        }
        last_diff = diff.as_f64();
        prev = value;
    }
    Err(Error::Accuracy { nodes: count, last_difference: last_diff })
}
