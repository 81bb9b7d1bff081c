//! Single-instance checks. Each returns the tested matrices oriented so that
//! PSD means the statement holds.

use serde::{Deserialize, Serialize};

use super::{require_pd, require_psd, Order, Part, Tested, ToneBranch};
use crate::error::{Error, Result};
use crate::frechet::{derivative, taylor_sums_to, Engine};
use crate::funcalc::{analytic_calc, calc_hermitian, CalcPath};
use crate::matcore::{psd_margin, Hermitian, Matrix};
use crate::repfun::{Builtin, Form, FunctionSpec};
use crate::scalar::factorial;

/// `psd_margin(D^k f(A; B))`.
pub fn check_derivative_sign(
    f: &FunctionSpec,
    k: usize,
    a: &Hermitian<f64>,
    b: &Hermitian<f64>,
    engine: Engine,
) -> Result<Tested> {
    require_psd(b, "B")?;
    let d = derivative(f, a, b, k, engine)?;
    Tested::new("derivative", d.value)
}

/// `f(A+B) - sum_{m<k} D^m f(A;B)/m!`.
pub fn check_taylor_remainder(
    f: &FunctionSpec,
    k: usize,
    a: &Hermitian<f64>,
    b: &Hermitian<f64>,
    engine: Engine,
) -> Result<Tested> {
    require_psd(b, "B")?;
    calc_hermitian(f, a)?;
    let mut rem = calc_hermitian(f, &a.add(b))?;
    for m in 0..k {
        let d = derivative(f, a, b, m, engine)?;
        rem.axpy(-1.0 / factorial::<f64>(m), &d.value);
    }
    Tested::new("remainder", rem)
}

/// Result of a branch check. `flipped` is the same difference with the
/// opposite orientation, kept for the duality spot check.
#[derive(Clone, Debug)]
pub struct BranchOutcome {
    pub tested: Tested,
    pub flipped: Hermitian<f64>,
    pub est_error: f64,
}

/// The `k mod 4` inequality for `f(A+iB)` against its truncated Taylor sum.
///
/// `B` must be PSD, except that branches B1/B2 take any Hermitian `B` when
/// `hermitian_b` is set.
pub fn check_branch(
    f: &FunctionSpec,
    tone: &ToneBranch,
    a: &Hermitian<f64>,
    b: &Hermitian<f64>,
    engine: Engine,
    hermitian_b: bool,
) -> Result<BranchOutcome> {
    if !(hermitian_b && tone.accepts_hermitian_direction()) {
        require_psd(b, "B")?;
    }
    let fx = analytic_calc(f, &a.complexify(b), CalcPath::Auto)?;
    let (re, im) = fx.value.re_im_parts();
    let (k_even, k_odd) = match tone.part {
        Part::Re => (tone.sum_index, 0),
        Part::Im => (0, tone.sum_index),
    };
    let sums = taylor_sums_to(f, a, b, k_even, k_odd, engine)?;
    let (lhs, rhs) = match tone.part {
        Part::Re => (re, &sums.even[tone.sum_index]),
        Part::Im => (im, &sums.odd[tone.sum_index]),
    };
    let tested = Tested::new("branch", tone.order.adjust(&lhs, rhs))?;
    let flipped = tone.order.flip().adjust(&lhs, rhs);
    Ok(BranchOutcome { tested, flipped, est_error: sums.est_error + fx.est_error })
}

/// Residual norms of the small-`eps` expansions and their fitted log-log slopes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub l: usize,
    pub eps: Vec<f64>,
    pub re_residuals: Vec<f64>,
    pub im_residuals: Vec<f64>,
    /// `None` when fewer than three residuals sit above roundoff.
    pub re_slope: Option<f64>,
    pub im_slope: Option<f64>,
    pub re_expected: f64,
    pub im_expected: f64,
}

impl ProbeReport {
    pub const SLOPE_TOLERANCE: f64 = 0.3;

    fn slope_ok(slope: Option<f64>, expected: f64) -> bool {
        slope.is_none_or(|s| (s - expected).abs() <= Self::SLOPE_TOLERANCE)
    }

    pub fn re_ok(&self) -> bool {
        Self::slope_ok(self.re_slope, self.re_expected)
    }

    pub fn im_ok(&self) -> bool {
        Self::slope_ok(self.im_slope, self.im_expected)
    }
}

/// Fits the decay of `Re f(A+i eps B) - even_l(eps)` (expected slope `2l+2`)
/// and `Im f(A+i eps B) - odd_l(eps)` (expected `2l+1`) for `eps = 2^-3 .. 2^-10`.
///
/// `B` should be small against the distance from `sigma(A)` to the
/// singularities of `f`, otherwise the largest `eps` sit outside the
/// asymptotic regime.
pub fn expansion_order_probe(
    f: &FunctionSpec,
    a: &Hermitian<f64>,
    b: &Hermitian<f64>,
    l: usize,
    engine: Engine,
) -> Result<ProbeReport> {
    let mut ds = Vec::with_capacity(2 * l + 1);
    let mut deriv_err = 0.0;
    for m in 0..=2 * l {
        let d = derivative(f, a, b, m, engine)?;
        deriv_err += d.est_error / factorial::<f64>(m);
        ds.push(d.value);
    }
    let eps: Vec<f64> = (3..=10).map(|j| 0.5f64.powi(j)).collect();
    let mut re_res = Vec::with_capacity(eps.len());
    let mut im_res = Vec::with_capacity(eps.len());
    let mut re_floor = Vec::with_capacity(eps.len());
    let mut im_floor = Vec::with_capacity(eps.len());
    for &e in &eps {
        let fx = analytic_calc(f, &a.complexify(&b.scale(e)), CalcPath::Auto)?;
        let (mut re, mut im) = fx.value.re_im_parts();
        let mut re_size = re.norm_fro();
        let mut im_size = im.norm_fro();
        for (m, d) in ds.iter().enumerate() {
            let c = e.powi(m as i32) / factorial::<f64>(m);
            // i^m splits into the even (real) and odd (imaginary) parts
            let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if m % 2 == 0 {
                re.axpy(-sign * c, d);
                re_size += c * d.norm_fro();
            } else {
                im.axpy(-sign * c, d);
                im_size += c * d.norm_fro();
            }
        }
        let calc_err = fx.est_error + deriv_err;
        re_floor.push(1e3 * f64::EPSILON * re_size + 10.0 * calc_err);
        im_floor.push(1e3 * f64::EPSILON * im_size + 10.0 * calc_err);
        re_res.push(re.norm_fro());
        im_res.push(im.norm_fro());
    }
    Ok(ProbeReport {
        l,
        re_slope: fit_slope(&eps, &re_res, &re_floor),
        im_slope: fit_slope(&eps, &im_res, &im_floor),
        eps,
        re_residuals: re_res,
        im_residuals: im_res,
        re_expected: (2 * l + 2) as f64,
        im_expected: (2 * l + 1) as f64,
    })
}

/// Least-squares slope of `log r` against `log eps` over points above `floor`.
fn fit_slope(eps: &[f64], res: &[f64], floor: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(res)
        .zip(floor)
        .filter(|((_, r), fl)| **r > **fl)
        .map(|((e, r), _)| (e.ln(), r.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn is_constant(f: &FunctionSpec) -> bool {
    match &f.form {
        Form::Builtin(Builtin::Const { .. }) => true,
        Form::MonotoneRep { beta, atoms, .. } | Form::DecreasingRep { beta, atoms, .. } => {
            *beta == 0.0 && atoms.iter().all(|a| a.weight == 0.0)
        }
        Form::KtoneRep { poly, atoms, .. } => {
            poly.iter().skip(1).all(|&c| c == 0.0) && atoms.iter().all(|a| a.weight == 0.0)
        }
        Form::Rescaled { inner, .. } => is_constant(inner),
        _ => false,
    }
}

fn require_tag(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!("function is not tagged {what}")))
    }
}

/// `psd_margin(Im f(X))` for `Im X > 0`, `f` operator monotone.
pub fn check_pick(f: &FunctionSpec, x: &Matrix<f64>) -> Result<Tested> {
    require_tag(f.class_tags.monotone, "monotone")?;
    let (_, im_x) = x.re_im_parts();
    require_pd(&im_x, "Im X")?;
    let fx = analytic_calc(f, x, CalcPath::Auto)?;
    let (_, im) = fx.value.re_im_parts();
    Tested::new("im", im)
}

/// [`check_pick`] plus the strict clause: `Im f(X) > 0` unless `f` is constant.
pub fn check_pick_strict(f: &FunctionSpec, x: &Matrix<f64>) -> Result<(Tested, bool)> {
    let t = check_pick(f, x)?;
    let strict = is_constant(f) || t.margin.value > 0.0;
    Ok((t, strict))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfPlanePart {
    /// `0 <= f(Re X) <= Re f(X)`, `Re X > 0`, `f` nonnegative monotone.
    Monotone,
    /// `0 <= Re f(X) <= f(Re X)`, `Re X > 0`, `f = beta x + ` nonnegative decreasing.
    Decreasing,
    /// `Im f(X) >= 0` for `Im X < 0`, `f` nonnegative decreasing.
    LowerHalf,
    /// `0 < Re f(X) <= f(Re X)` and `Re log f(X) <= log f(Re X)`, `Re X > 0`.
    Log,
}

/// `Some(tested)` or `None` when the trial is skipped (`Re f(X)` too close to
/// singular for the principal log).
pub fn check_half_plane(f: &FunctionSpec, x: &Matrix<f64>, part: HalfPlanePart, tau_rel: f64) -> Result<Option<Vec<Tested>>> {
    let tags = &f.class_tags;
    let decreasing = tags.decreasing && tags.nonnegative;
    match part {
        HalfPlanePart::Monotone => require_tag(tags.monotone && tags.nonnegative, "nonnegative monotone")?,
        HalfPlanePart::Decreasing => require_tag(
            decreasing || matches!(f.form, Form::DecreasingRep { .. }),
            "decreasing representation",
        )?,
        HalfPlanePart::LowerHalf | HalfPlanePart::Log => {
            require_tag(decreasing && !is_zero(f), "nonnegative decreasing")?
        }
    }
    let (re_x, im_x) = x.re_im_parts();
    if part == HalfPlanePart::LowerHalf {
        require_pd(&im_x.neg(), "-Im X")?;
        let fx = analytic_calc(f, x, CalcPath::Auto)?;
        let (_, im) = fx.value.re_im_parts();
        return Ok(Some(vec![Tested::new("im", im)?]));
    }
    require_pd(&re_x, "Re X")?;
    let fx = analytic_calc(f, x, CalcPath::Auto)?;
    let (re, _) = fx.value.re_im_parts();
    let f_re = calc_hermitian(f, &re_x)?;
    Ok(Some(match part {
        HalfPlanePart::Monotone => vec![Tested::new("lower", f_re.clone())?, Tested::new("upper", re.sub(&f_re))?],
        HalfPlanePart::Decreasing => vec![Tested::new("lower", re.clone())?, Tested::new("upper", f_re.sub(&re))?],
        _ => {
            let positive = Tested::new("positive", re.clone())?;
            if positive.margin.normalized() < tau_rel {
                return Ok(None);
            }
            let log = FunctionSpec::log();
            let log_fx = analytic_calc(&log, &fx.value, CalcPath::Auto)?;
            let (re_log, _) = log_fx.value.re_im_parts();
            let log_f_re = calc_hermitian(&log, &f_re)?;
            vec![positive, Tested::new("upper", f_re.sub(&re))?, Tested::new("log", log_f_re.sub(&re_log))?]
        }
    }))
}

fn is_zero(f: &FunctionSpec) -> bool {
    is_constant(f) && f.eval_real(1.0).is_ok_and(|v| v == 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Monotone,
    Convex,
}

/// Both two-sided chains around `f(A+iB)` for operator monotone or convex `f`
/// on `(0, inf)`. The imaginary chain is included only when `B >= 0`.
pub fn check_sandwich(
    f: &FunctionSpec,
    k: usize,
    a: &Hermitian<f64>,
    b: &Hermitian<f64>,
    flavor: Flavor,
    engine: Engine,
) -> Result<Vec<Tested>> {
    if k == 0 {
        return Err(Error::Constraint { field: "k".into(), message: "need k >= 1".into() });
    }
    match flavor {
        Flavor::Monotone => require_tag(f.class_tags.monotone, "monotone")?,
        Flavor::Convex => require_tag(f.class_tags.convex, "convex")?,
    }
    require_pd(a, "A")?;
    let with_im = psd_margin(b)? >= -1e-12 * (1.0 + b.norm_fro());
    // (lower, upper) indices of the even and odd chains
    let ((re_lo, re_hi), (im_lo, im_hi)) = match flavor {
        Flavor::Monotone => ((2 * k - 2, 2 * k - 1), (2 * k - 2, 2 * k - 1)),
        Flavor::Convex => ((2 * k - 1, 2 * k - 2), (2 * k - 1, 2 * k)),
    };
    let k_odd = if with_im { im_lo.max(im_hi) } else { 0 };
    let sums = taylor_sums_to(f, a, b, re_lo.max(re_hi), k_odd, engine)?;
    let fx = analytic_calc(f, &a.complexify(b), CalcPath::Auto)?;
    let (re, im) = fx.value.re_im_parts();
    let mut out = vec![
        Tested::new("re_lower", Order::Ge.adjust(&re, &sums.even[re_lo]))?,
        Tested::new("re_upper", Order::Le.adjust(&re, &sums.even[re_hi]))?,
    ];
    if with_im {
        out.push(Tested::new("im_lower", Order::Ge.adjust(&im, &sums.odd[im_lo]))?);
        out.push(Tested::new("im_upper", Order::Le.adjust(&im, &sums.odd[im_hi]))?);
    }
    Ok(out)
}
