//! The function zoo: builtins, integral-representation families with their
//! certified operator classes, closed-form derivative atoms, affine
//! rescaling and the one-line spec grammar.

mod atoms;
mod parse;
mod random;

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{binomial, cr, Real};

pub use atoms::{
    exact_frechet_atom, pole_derivative, AtomKind, ResolventFactorization,
};
pub use parse::parse_spec;
pub use random::{random_certified, CertifiedClass};

/// Smallest gap kept between ktone atom nodes and `+-1`.
pub const KTONE_NODE_MARGIN: f64 = 1e-3;

/// Open interval `(a, b)`; endpoints may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_nan() || b.is_nan() || !(a < b) || a == f64::INFINITY || b == f64::NEG_INFINITY {
            return Err(Error::Constraint {
                field: "interval".into(),
                message: format!("need a < b, got ({a}, {b})"),
            });
        }
        Ok(Self { a, b })
    }

    pub const fn symmetric_unit() -> Self {
        Self { a: -1.0, b: 1.0 }
    }

    pub const fn positive() -> Self {
        Self { a: 0.0, b: f64::INFINITY }
    }

    pub const fn real_line() -> Self {
        Self { a: f64::NEG_INFINITY, b: f64::INFINITY }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }

    /// Distance from a real point to `R \ (a, b)` (infinite for the whole line).
    pub fn gap(&self, x: f64) -> f64 {
        (x - self.a).min(self.b - x)
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.a <= self.a && self.b <= other.b
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = if self.a == f64::NEG_INFINITY { "-inf".to_string() } else { fmt_real(self.a) };
        let b = if self.b == f64::INFINITY { "inf".to_string() } else { fmt_real(self.b) };
        write!(f, "({a},{b})")
    }
}

fn fmt_real(x: f64) -> String {
    // Rust's shortest round-trip representation
    format!("{x:?}")
}

/// Point mass `weight * delta_node` of a representing measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: f64,
    pub node: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Builtin {
    Id,
    Const { value: f64 },
    Pow { p: f64 },
    Log,
    Inv,
    Exp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Form {
    Builtin(Builtin),
    /// `P(x) + sum w_j x^l / (1 - lambda_j x)`, `deg P < l`; on `(-1, 1)` unless there are no atoms.
    KtoneRep { order: usize, poly: Vec<f64>, atoms: Vec<Atom> },
    /// `alpha + beta x + sum w_j x / (x + lambda_j)` on `(0, inf)`.
    MonotoneRep { alpha: f64, beta: f64, atoms: Vec<Atom> },
    /// `alpha + beta x + sum w_j / (x + lambda_j)` on `(0, inf)`.
    DecreasingRep { alpha: f64, beta: f64, atoms: Vec<Atom> },
    /// `c0 + c1 (x-1) + gamma (x-1)^2 + sum w_j (x-1)^2 / (x + lambda_j)` on `(0, inf)`.
    ConvexRep { c0: f64, c1: f64, gamma: f64, atoms: Vec<Atom> },
    /// `inner((x - shift) / scale)`.
    Rescaled { inner: Box<FunctionSpec>, scale: f64, shift: f64 },
}

/// Operator-class certificates implied by a representation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassTags {
    /// Operator k-tone for every odd `k >= ktone_odd_from`.
    pub ktone_odd_from: Option<usize>,
    /// Operator k-tone for every even `k >= ktone_even_from`.
    pub ktone_even_from: Option<usize>,
    pub monotone: bool,
    pub decreasing: bool,
    pub convex: bool,
    pub nonnegative: bool,
    /// Atom nodes kept at least this far from `+-1` (ktone family only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_margin: Option<f64>,
}

impl ClassTags {
    pub fn is_ktone(&self, k: usize) -> bool {
        if k == 0 {
            return false;
        }
        let from = if k % 2 == 1 { self.ktone_odd_from } else { self.ktone_even_from };
        from.is_some_and(|f| k >= f)
    }

    fn affine(nonnegative: bool) -> Self {
        Self {
            ktone_odd_from: Some(1),
            ktone_even_from: Some(2),
            monotone: true,
            decreasing: false,
            convex: true,
            nonnegative,
            node_margin: None,
        }
    }

    fn monotone() -> Self {
        Self { ktone_odd_from: Some(1), monotone: true, ..Self::default() }
    }

    fn convex() -> Self {
        Self { ktone_even_from: Some(2), convex: true, ..Self::default() }
    }

    /// Tags of a claimed class, used to override certificates in negative controls.
    pub fn claim_ktone(k: usize) -> Self {
        let mut t = Self::default();
        if k % 2 == 1 {
            t.ktone_odd_from = Some(k);
        } else {
            t.ktone_even_from = Some(k);
        }
        t.monotone = k == 1;
        t.convex = k == 2;
        t
    }
}

/// A scalar function with its analyticity domain and certified classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub domain: Interval,
    pub form: Form,
    pub class_tags: ClassTags,
}

impl FunctionSpec {
    /// Validates the form against `domain` and derives the class tags.
    pub fn new(domain: Interval, form: Form) -> Result<Self> {
        validate(&domain, &form)?;
        let class_tags = derive_tags(&domain, &form);
        Ok(Self { domain, form, class_tags })
    }

    pub fn builtin(b: Builtin, domain: Interval) -> Result<Self> {
        Self::new(domain, Form::Builtin(b))
    }

    pub fn id() -> Self {
        Self::new(Interval::real_line(), Form::Builtin(Builtin::Id)).expect("valid")
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Interval::real_line(), Form::Builtin(Builtin::Const { value: c })).expect("valid")
    }

    pub fn pow(p: f64) -> Self {
        Self::new(Interval::positive(), Form::Builtin(Builtin::Pow { p })).expect("valid")
    }

    pub fn log() -> Self {
        Self::new(Interval::positive(), Form::Builtin(Builtin::Log)).expect("valid")
    }

    pub fn inv() -> Self {
        Self::new(Interval::positive(), Form::Builtin(Builtin::Inv)).expect("valid")
    }

    pub fn exp(domain: Interval) -> Self {
        Self::new(domain, Form::Builtin(Builtin::Exp)).expect("valid")
    }

    /// Polynomial `sum c_i x^i` on the real line, as a ktone representation with no atoms.
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        Self::new(
            Interval::real_line(),
            Form::KtoneRep { order: coeffs.len().max(1), poly: coeffs.to_vec(), atoms: vec![] },
        )
    }

    /// Replaces the derived certificates by a claimed class (negative controls).
    pub fn with_claimed_tags(mut self, tags: ClassTags) -> Self {
        self.class_tags = tags;
        self
    }

    pub fn is_entire(&self) -> bool {
        self.domain.a == f64::NEG_INFINITY && self.domain.b == f64::INFINITY
    }

    /// Widest interval `I` containing the domain such that the continuation is
    /// analytic off `R \ I`. Rational forms only have poles at their atoms.
    pub fn holomorphy_interval(&self) -> Interval {
        let shifted_poles = |atoms: &[Atom]| {
            let a = atoms.iter().map(|at| -at.node).fold(f64::NEG_INFINITY, f64::max);
            Interval { a: a.min(self.domain.a), b: f64::INFINITY }
        };
        match &self.form {
            Form::Builtin(_) => self.domain,
            Form::KtoneRep { atoms, .. } => {
                let mut iv = Interval::real_line();
                for at in atoms.iter().filter(|at| at.weight != 0.0) {
                    if at.node > 0.0 {
                        iv.b = iv.b.min(1.0 / at.node);
                    } else if at.node < 0.0 {
                        iv.a = iv.a.max(1.0 / at.node);
                    }
                }
                Interval { a: iv.a.min(self.domain.a), b: iv.b.max(self.domain.b) }
            }
            Form::MonotoneRep { atoms, .. }
            | Form::DecreasingRep { atoms, .. }
            | Form::ConvexRep { atoms, .. } => shifted_poles(atoms),
            Form::Rescaled { inner, scale, shift } => {
                let iv = inner.holomorphy_interval();
                let (p, q) = (shift + scale * iv.a, shift + scale * iv.b);
                let (p, q) = if p <= q { (p, q) } else { (q, p) };
                Interval { a: p.min(self.domain.a), b: q.max(self.domain.b) }
            }
        }
    }

    /// Radius of a disc around real `x` free of non-analytic points.
    pub fn analytic_radius(&self, x: f64) -> f64 {
        self.domain.gap(x)
    }

    /// Checked evaluation of the analytic continuation at `z`.
    pub fn eval_scalar<T: Real>(&self, z: Complex<T>) -> Result<Complex<T>> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite argument {z}")));
        }
        if z.im == T::zero() {
            let x = z.re.as_f64();
            if !self.domain.contains(x) {
                return Err(Error::Domain(format!(
                    "real argument {x} outside the analyticity interval {}",
                    self.domain
                )));
            }
            return Ok(cr(self.eval_complex(z).re));
        }
        Ok(self.eval_complex(z))
    }

    /// Unchecked evaluation; caller guarantees `z` is in the analyticity region.
    pub fn eval_complex<T: Real>(&self, z: Complex<T>) -> Complex<T> {
        let one = cr(T::one());
        let lit = |x: f64| T::lit(x);
        match &self.form {
            Form::Builtin(b) => match *b {
                Builtin::Id => z,
                Builtin::Const { value } => cr(lit(value)),
                Builtin::Pow { p } => {
                    if z.im == T::zero() && z.re > T::zero() {
                        cr(z.re.powf(lit(p)))
                    } else {
                        z.powf(lit(p))
                    }
                }
                Builtin::Log => z.ln(),
                Builtin::Inv => one / z,
                Builtin::Exp => z.exp(),
            },
            Form::KtoneRep { order, poly, atoms } => {
                let mut acc = horner(poly, z);
                if !atoms.is_empty() {
                    let zl = z.powu(*order as u32);
                    for at in atoms {
                        acc = acc + zl * lit(at.weight) / (one - z * lit(at.node));
                    }
                }
                acc
            }
            Form::MonotoneRep { alpha, beta, atoms } => {
                let mut acc = cr(lit(*alpha)) + z * lit(*beta);
                for at in atoms {
                    acc = acc + z * lit(at.weight) / (z + lit(at.node));
                }
                acc
            }
            Form::DecreasingRep { alpha, beta, atoms } => {
                let mut acc = cr(lit(*alpha)) + z * lit(*beta);
                for at in atoms {
                    acc = acc + cr(lit(at.weight)) / (z + lit(at.node));
                }
                acc
            }
            Form::ConvexRep { c0, c1, gamma, atoms } => {
                let d = z - one;
                let d2 = d * d;
                let mut acc = cr(lit(*c0)) + d * lit(*c1) + d2 * lit(*gamma);
                for at in atoms {
                    acc = acc + d2 * lit(at.weight) / (z + lit(at.node));
                }
                acc
            }
            Form::Rescaled { inner, scale, shift } => {
                inner.eval_complex((z - lit(*shift)) / lit(*scale))
            }
        }
    }

    /// Taylor coefficients `c_k = f^{(k)}(x)/k!`, `k < len`, at a real point of the domain.
    ///
    /// Every form in the zoo has closed-form derivatives, so this is `Some`
    /// for all specs; `None` is reserved for forms without them.
    pub fn taylor_coefficients<T: Real>(&self, x: T, len: usize) -> Option<Vec<T>> {
        let lit = |v: f64| T::lit(v);
        let mut out = vec![T::zero(); len];
        if len == 0 {
            return Some(out);
        }
        match &self.form {
            Form::Builtin(b) => match *b {
                Builtin::Id => {
                    out[0] = x;
                    if len > 1 {
                        out[1] = T::one();
                    }
                }
                Builtin::Const { value } => out[0] = lit(value),
                Builtin::Pow { p } => {
                    let p = lit(p);
                    let mut c = x.powf(p);
                    out[0] = c;
                    for k in 1..len {
                        c = c * (p - T::from_count(k - 1)) / (T::from_count(k) * x);
                        out[k] = c;
                    }
                }
                Builtin::Log => {
                    out[0] = x.ln();
                    let mut xp = T::one();
                    for k in 1..len {
                        xp = xp * x;
                        let sign = if k % 2 == 1 { T::one() } else { -T::one() };
                        out[k] = sign / (T::from_count(k) * xp);
                    }
                }
                Builtin::Inv => pole_series(&mut out, x, T::zero(), T::one()),
                Builtin::Exp => {
                    let mut c = x.exp();
                    out[0] = c;
                    for k in 1..len {
                        c = c / T::from_count(k);
                        out[k] = c;
                    }
                }
            },
            Form::KtoneRep { order, poly, atoms } => {
                let poly_t: Vec<T> = poly.iter().map(|&c| lit(c)).collect();
                add_poly_taylor(&mut out, &poly_t, x);
                if !atoms.is_empty() {
                    let mono = monomial_taylor(*order, x, len);
                    for at in atoms {
                        let lam = lit(at.node);
                        let mut res = vec![T::zero(); len];
                        // 1/(1 - lam x) = (1/lam) / (1/lam - x) when lam != 0
                        let d = T::one() - lam * x;
                        let mut c = T::one() / d;
                        for r in res.iter_mut() {
                            *r = c;
                            c = c * lam / d;
                        }
                        let prod = series_mul(&mono, &res);
                        for k in 0..len {
                            out[k] = out[k] + lit(at.weight) * prod[k];
                        }
                    }
                }
            }
            Form::MonotoneRep { alpha, beta, atoms } => {
                out[0] = lit(*alpha) + lit(*beta) * x;
                if len > 1 {
                    out[1] = lit(*beta);
                }
                for at in atoms {
                    // x/(x+l) = 1 - l/(x+l)
                    let w = lit(at.weight);
                    out[0] = out[0] + w;
                    let mut tmp = vec![T::zero(); len];
                    pole_series(&mut tmp, x, lit(at.node), T::one());
                    for k in 0..len {
                        out[k] = out[k] - w * lit(at.node) * tmp[k];
                    }
                }
            }
            Form::DecreasingRep { alpha, beta, atoms } => {
                out[0] = lit(*alpha) + lit(*beta) * x;
                if len > 1 {
                    out[1] = lit(*beta);
                }
                for at in atoms {
                    let mut tmp = vec![T::zero(); len];
                    pole_series(&mut tmp, x, lit(at.node), T::one());
                    for k in 0..len {
                        out[k] = out[k] + lit(at.weight) * tmp[k];
                    }
                }
            }
            Form::ConvexRep { c0, c1, gamma, atoms } => {
                let d = x - T::one();
                let quad = [d * d, lit(2.0) * d, T::one()];
                out[0] = lit(*c0) + lit(*c1) * d + lit(*gamma) * quad[0];
                if len > 1 {
                    out[1] = lit(*c1) + lit(*gamma) * quad[1];
                }
                if len > 2 {
                    out[2] = lit(*gamma);
                }
                for at in atoms {
                    let mut tmp = vec![T::zero(); len];
                    pole_series(&mut tmp, x, lit(at.node), T::one());
                    let prod = series_mul(&quad, &tmp);
                    for k in 0..len {
                        out[k] = out[k] + lit(at.weight) * prod[k];
                    }
                }
            }
            Form::Rescaled { inner, scale, shift } => {
                let inner_c = inner.taylor_coefficients((x - lit(*shift)) / lit(*scale), len)?;
                let inv = T::one() / lit(*scale);
                let mut f = T::one();
                for k in 0..len {
                    out[k] = inner_c[k] * f;
                    f = f * inv;
                }
            }
        }
        Some(out)
    }

    /// Real evaluation on the domain.
    pub fn eval_real(&self, x: f64) -> Result<f64> {
        Ok(self.eval_scalar(Complex::new(x, 0.0))?.re)
    }

    /// Scalar operator k-tone certificate check.
    pub fn is_ktone(&self, k: usize) -> bool {
        self.class_tags.is_ktone(k)
    }
}

fn horner<T: Real>(poly: &[f64], z: Complex<T>) -> Complex<T> {
    poly.iter()
        .rev()
        .fold(cr(T::zero()), |acc, &c| acc * z + T::lit(c))
}

/// Adds the Taylor coefficients of `sum c_i x^i` at `x0`.
fn add_poly_taylor<T: Real>(out: &mut [T], poly: &[T], x0: T) {
    for (i, &c) in poly.iter().enumerate() {
        let m = monomial_taylor(i, x0, out.len());
        for k in 0..out.len() {
            out[k] = out[k] + c * m[k];
        }
    }
}

fn monomial_taylor<T: Real>(l: usize, x0: T, len: usize) -> Vec<T> {
    (0..len)
        .map(|k| if k <= l { binomial::<T>(l, k) * x0.powi((l - k) as i32) } else { T::zero() })
        .collect()
}

/// `weight / (x + shift)` expanded at `x0`.
fn pole_series<T: Real>(out: &mut [T], x0: T, shift: T, weight: T) {
    let d = x0 + shift;
    let mut c = weight / d;
    for r in out.iter_mut() {
        *r = c;
        c = -c / d;
    }
}

fn series_mul<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let len = b.len();
    let mut out = vec![T::zero(); len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for j in 0..(len - i) {
            out[i + j] = out[i + j] + x * b[j];
        }
    }
    out
}

fn constraint(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Constraint { field: field.into(), message: message.into() }
}

fn validate(domain: &Interval, form: &Form) -> Result<()> {
    let positive = Interval::positive();
    let check_atoms = |atoms: &[Atom], lo: f64, lo_open: bool, hi: f64| -> Result<()> {
        for (i, at) in atoms.iter().enumerate() {
            if !(at.weight.is_finite() && at.weight >= 0.0) {
                return Err(constraint(format!("atoms[{i}].weight"), format!("must be >= 0, got {}", at.weight)));
            }
            let ok = at.node.is_finite()
                && if lo_open { at.node > lo } else { at.node >= lo }
                && at.node <= hi;
            if !ok {
                return Err(constraint(
                    format!("atoms[{i}].node"),
                    format!("must lie in {}{lo}, {hi}], got {}", if lo_open { "(" } else { "[" }, at.node),
                ));
            }
        }
        Ok(())
    };
    let nonneg = |name: &str, v: f64| -> Result<()> {
        if v.is_finite() && v >= 0.0 {
            Ok(())
        } else {
            Err(constraint(name, format!("must be >= 0, got {v}")))
        }
    };
    match form {
        Form::Builtin(b) => match b {
            Builtin::Pow { p } if !p.is_finite() => Err(constraint("pow", "exponent must be finite")),
            Builtin::Const { value } if !value.is_finite() => Err(constraint("const", "value must be finite")),
            Builtin::Pow { .. } | Builtin::Log | Builtin::Inv if !domain.is_subset_of(&positive) => Err(constraint(
                "interval",
                format!("{} needs an interval inside (0,inf), got {domain}", builtin_name(b)),
            )),
            _ => Ok(()),
        },
        Form::KtoneRep { order, poly, atoms } => {
            if !atoms.is_empty() && *domain != Interval::symmetric_unit() {
                return Err(constraint("interval", "ktone representations with atoms live on (-1,1)"));
            }
            if *order == 0 {
                return Err(constraint("order", "tone order must be >= 1"));
            }
            if poly.len() > *order {
                return Err(constraint(
                    "poly",
                    format!("deg P = {} must be < l = {order}", poly.len() - 1),
                ));
            }
            if poly.iter().any(|c| !c.is_finite()) {
                return Err(constraint("poly", "coefficients must be finite"));
            }
            check_atoms(atoms, -1.0, false, 1.0)
        }
        Form::MonotoneRep { alpha, beta, atoms } => {
            if *domain != positive {
                return Err(constraint("interval", "monotone representations live on (0,inf)"));
            }
            nonneg("alpha", *alpha)?;
            nonneg("beta", *beta)?;
            check_atoms(atoms, 0.0, true, f64::MAX)
        }
        Form::DecreasingRep { alpha, beta, atoms } => {
            if *domain != positive {
                return Err(constraint("interval", "decreasing representations live on (0,inf)"));
            }
            nonneg("alpha", *alpha)?;
            nonneg("beta", *beta)?;
            check_atoms(atoms, 0.0, false, f64::MAX)
        }
        Form::ConvexRep { c0, c1, gamma, atoms } => {
            if *domain != positive {
                return Err(constraint("interval", "convex representations live on (0,inf)"));
            }
            if !(c0.is_finite() && c1.is_finite()) {
                return Err(constraint("alpha", "c0 and c1 must be finite"));
            }
            nonneg("gamma", *gamma)?;
            check_atoms(atoms, 0.0, false, f64::MAX)
        }
        Form::Rescaled { scale, shift, .. } => {
            if !(scale.is_finite() && *scale > 0.0 && shift.is_finite()) {
                return Err(constraint("scale", "affine map needs scale > 0"));
            }
            Ok(())
        }
    }
}

fn builtin_name(b: &Builtin) -> &'static str {
    match b {
        Builtin::Id => "id",
        Builtin::Const { .. } => "const",
        Builtin::Pow { .. } => "pow",
        Builtin::Log => "log",
        Builtin::Inv => "inv",
        Builtin::Exp => "exp",
    }
}

fn derive_tags(domain: &Interval, form: &Form) -> ClassTags {
    match form {
        Form::Builtin(b) => match *b {
            Builtin::Id => ClassTags::affine(domain.a >= 0.0),
            Builtin::Const { value } => ClassTags { decreasing: true, ..ClassTags::affine(value >= 0.0) },
            Builtin::Pow { p } => {
                let monotone = (0.0..=1.0).contains(&p);
                let convex = (1.0..=2.0).contains(&p) || (-1.0..=0.0).contains(&p);
                ClassTags {
                    ktone_odd_from: monotone.then_some(1),
                    ktone_even_from: convex.then_some(2),
                    monotone,
                    decreasing: p <= 0.0,
                    convex,
                    nonnegative: true,
                    node_margin: None,
                }
            }
            Builtin::Log => ClassTags::monotone(),
            Builtin::Inv => ClassTags { decreasing: true, nonnegative: true, ..ClassTags::convex() },
            Builtin::Exp => ClassTags::default(),
        },
        Form::KtoneRep { order, atoms, .. } => {
            let mut t = ClassTags::claim_ktone(*order);
            let worst = atoms.iter().map(|a| 1.0 - a.node.abs()).fold(f64::INFINITY, f64::min);
            t.node_margin = worst.is_finite().then_some(worst);
            t
        }
        Form::MonotoneRep { atoms, .. } => ClassTags {
            nonnegative: true,
            convex: atoms.iter().all(|a| a.weight == 0.0),
            ktone_even_from: atoms.iter().all(|a| a.weight == 0.0).then_some(2),
            ..ClassTags::monotone()
        },
        Form::DecreasingRep { beta, atoms, .. } => ClassTags {
            decreasing: *beta == 0.0,
            monotone: atoms.iter().all(|a| a.weight == 0.0),
            ktone_odd_from: atoms.iter().all(|a| a.weight == 0.0).then_some(1),
            nonnegative: true,
            ..ClassTags::convex()
        },
        Form::ConvexRep { .. } => ClassTags::convex(),
        Form::Rescaled { inner, .. } => ClassTags { node_margin: None, ..inner.class_tags.clone() },
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms_text = |atoms: &[Atom]| {
            let body: Vec<String> =
                atoms.iter().map(|a| format!("({},{})", fmt_real(a.weight), fmt_real(a.node))).collect();
            format!("atoms [{}]", body.join(","))
        };
        match &self.form {
            Form::Builtin(b) => {
                match b {
                    Builtin::Pow { p } => write!(f, "pow {}", fmt_real(*p))?,
                    Builtin::Const { value } => write!(f, "const {}", fmt_real(*value))?,
                    other => write!(f, "{}", builtin_name(other))?,
                }
                write!(f, " on {}", self.domain)
            }
            Form::KtoneRep { order, poly, atoms } => {
                write!(f, "ktone {order} on {}", self.domain)?;
                if !poly.is_empty() {
                    let p: Vec<String> = poly.iter().map(|c| fmt_real(*c)).collect();
                    write!(f, " poly [{}]", p.join(","))?;
                }
                write!(f, " {}", atoms_text(atoms))
            }
            Form::MonotoneRep { alpha, beta, atoms } => write!(
                f,
                "monotone on {} alpha {} beta {} {}",
                self.domain,
                fmt_real(*alpha),
                fmt_real(*beta),
                atoms_text(atoms)
            ),
            Form::DecreasingRep { alpha, beta, atoms } => write!(
                f,
                "decreasing on {} alpha {} beta {} {}",
                self.domain,
                fmt_real(*alpha),
                fmt_real(*beta),
                atoms_text(atoms)
            ),
            Form::ConvexRep { c0, c1, gamma, atoms } => write!(
                f,
                "convex on {} alpha {} beta {} gamma {} {}",
                self.domain,
                fmt_real(*c0),
                fmt_real(*c1),
                fmt_real(*gamma),
                atoms_text(atoms)
            ),
            Form::Rescaled { inner, scale, shift } => {
                write!(f, "rescaled(({inner}), scale {}, shift {})", fmt_real(*scale), fmt_real(*shift))
            }
        }
    }
}

/// Affine change of variables taking a finite `(a, b)` onto `(-1, 1)`.
///
/// Returns `(f~, A~, B~)` with `f~(x) = f((x - shift)/scale)`, `A~ = scale A + shift I`
/// and `B~ = scale B`, so `f(A + iB) = f~(A~ + iB~)` and the directional
/// derivatives agree order by order.
pub fn affine_rescale<T: Real>(
    f: &FunctionSpec,
    a: &crate::matcore::Hermitian<T>,
    b: &crate::matcore::Hermitian<T>,
) -> Result<(FunctionSpec, crate::matcore::Hermitian<T>, crate::matcore::Hermitian<T>)> {
    let Interval { a: lo, b: hi } = f.domain;
    if !f.domain.is_finite() {
        return Err(Error::Unsupported(format!(
            "affine rescaling needs a finite interval, got {}",
            f.domain
        )));
    }
    let values = crate::matcore::hermitian_eigenvalues(a)?;
    if let Some(bad) = values.iter().find(|v| !f.domain.contains(v.as_f64())) {
        return Err(Error::Domain(format!("eigenvalue {} outside {}", bad, f.domain)));
    }
    let scale = 2.0 / (hi - lo);
    let shift = -(lo + hi) / (hi - lo);
    let tilde = if scale == 1.0 && shift == 0.0 {
        f.clone()
    } else {
        FunctionSpec {
            domain: Interval::symmetric_unit(),
            form: Form::Rescaled { inner: Box::new(f.clone()), scale, shift },
            class_tags: ClassTags { node_margin: None, ..f.class_tags.clone() },
        }
    };
    let a_t = a.scale(T::lit(scale)).add_identity(T::lit(shift));
    let b_t = b.scale(T::lit(scale));
    Ok((tilde, a_t, b_t))
}
