//! Seeded campaigns: many independent trials of one check, aggregated into a
//! [`CheckReport`] with a pass / refuted / inconclusive verdict.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{check_branch, check_derivative_sign, check_sandwich, check_taylor_remainder, check_half_plane};
use super::sector::check_sector_map;
use super::{duality_holds, Cone, Direction, Flavor, Tested, HalfPlanePart, ToneBranch};
use crate::error::{Error, Result};
use crate::frechet::Engine;
use crate::matcore::{max_eigenvalue, Hermitian, Matrix};
use crate::repfun::{Form, FunctionSpec, Interval};
use crate::sampler::{trial_seed, SampleConfig, Sampler};

/// Default relative PSD tolerance.
pub const TAU_REL: f64 = 1e-8;

/// Every this many trials, recompute with the alternate engine and check the
/// sign-flip identity.
pub const SPOT_CHECK_EVERY: u64 = 20;

/// Agreement required between the primary and alternate engine.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Check {
    DerivativeSign { k: usize },
    TaylorRemainder { k: usize },
    Branch {
        k: usize,
        #[serde(default)]
        hermitian_b: bool,
    },
    Pick,
    HalfPlane { part: HalfPlanePart },
    SectorMap { p: f64, cone: Cone, direction: Direction },
    Sandwich { k: usize, flavor: Flavor },
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Check::DerivativeSign { k } => write!(f, "derivative_sign k={k}"),
            Check::TaylorRemainder { k } => write!(f, "taylor_remainder k={k}"),
            Check::Branch { k, hermitian_b } => {
                write!(f, "branch k={k}")?;
                if hermitian_b {
                    write!(f, " hermitian_b")?;
                }
                Ok(())
            }
            Check::Pick => write!(f, "pick"),
            Check::HalfPlane { part } => {
                let p = match part {
                    HalfPlanePart::Monotone => "monotone",
                    HalfPlanePart::Decreasing => "decreasing",
                    HalfPlanePart::LowerHalf => "lower_half",
                    HalfPlanePart::Log => "log",
                };
                write!(f, "half_plane part={p}")
            }
            Check::SectorMap { p, cone, direction } => {
                let c = if cone == Cone::Positive { "+" } else { "-" };
                let d = if direction == Direction::Monotone { "monotone" } else { "decreasing" };
                write!(f, "sector_map p={p} cone={c} direction={d}")
            }
            Check::Sandwich { k, flavor } => {
                let fl = if flavor == Flavor::Monotone { "monotone" } else { "convex" };
                write!(f, "sandwich k={k} flavor={fl}")
            }
        }
    }
}

impl Check {
    fn uses_engine(&self) -> bool {
        matches!(
            self,
            Check::DerivativeSign { .. } | Check::TaylorRemainder { .. } | Check::Branch { .. } | Check::Sandwich { .. }
        )
    }

    /// Class certificate the check assumes, `Err` if `f` does not carry it.
    pub fn hypothesis(&self, f: &FunctionSpec) -> Result<()> {
        let t = &f.class_tags;
        let (ok, what) = match *self {
            Check::DerivativeSign { k } | Check::TaylorRemainder { k } | Check::Branch { k, .. } => {
                (f.is_ktone(k), format!("operator {k}-tone"))
            }
            Check::Pick => (t.monotone, "operator monotone".into()),
            Check::HalfPlane { part: HalfPlanePart::Monotone } => (t.monotone && t.nonnegative, "nonnegative monotone".into()),
            Check::HalfPlane { part: HalfPlanePart::Decreasing } => (
                (t.decreasing && t.nonnegative) || matches!(f.form, Form::DecreasingRep { .. }),
                "a decreasing representation".into(),
            ),
            Check::HalfPlane { .. } => (t.decreasing && t.nonnegative, "nonnegative decreasing".into()),
            Check::SectorMap { direction: Direction::Monotone, .. } => {
                (t.monotone && t.nonnegative, "nonnegative monotone".into())
            }
            Check::SectorMap { direction: Direction::Decreasing, .. } => {
                (t.decreasing && t.nonnegative, "nonnegative decreasing".into())
            }
            Check::Sandwich { flavor: Flavor::Monotone, .. } => (t.monotone, "operator monotone".into()),
            Check::Sandwich { flavor: Flavor::Convex, .. } => (t.convex, "operator convex".into()),
        };
        if let Check::SectorMap { p, .. } = *self {
            super::SectorParams::new(p)?;
        }
        if let Check::Branch { k, .. } | Check::DerivativeSign { k } | Check::TaylorRemainder { k } = *self {
            ToneBranch::new(k)?;
        }
        if ok {
            Ok(())
        } else {
            Err(Error::Hypothesis(format!("{f} is not certified {what}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignOptions {
    /// Dimension, base seed and sampling scales.
    pub sample: SampleConfig,
    pub trials: u64,
    pub engine: Engine,
    pub tau_rel: f64,
    /// Worker threads; `0` uses the global pool.
    pub jobs: usize,
}

impl CampaignOptions {
    pub fn new(n: usize, seed: u64, trials: u64) -> Self {
        Self { sample: SampleConfig::new(n, seed), trials, engine: Engine::DividedDiff, tau_rel: TAU_REL, jobs: 0 }
    }

    pub fn engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Refuted,
    Inconclusive,
}

/// The trial with the smallest margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Worst {
    pub trial: u64,
    pub seed: u64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub spec: String,
    pub n: usize,
    pub seed: u64,
    pub engine: Engine,
    pub trials: u64,
    /// Relative tolerance; margins are normalized by `1 + ||M||_F`.
    pub tau: f64,
    /// Per trial, `null` for skipped or failed trials.
    pub margins: Vec<Option<f64>>,
    pub worst: Option<Worst>,
    pub verdict: Verdict,
    pub skipped: u64,
    pub failures: u64,
    pub spot_checks: u64,
    /// Spot checks where the alternate engine hit its node cap.
    #[serde(default)]
    pub cross_checks_unavailable: u64,
    /// First tolerated trial failure, as `trial N: message`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq)]
pub enum TrialOutcome {
    Margin(f64),
    Skipped,
    Failed(String),
}

struct Evaluated {
    margin: Option<f64>,
    matrices: Vec<Hermitian<f64>>,
    dual_ok: bool,
}

fn sample_instance(check: &Check, f: &FunctionSpec, s: &mut Sampler) -> Result<(Hermitian<f64>, Hermitian<f64>)> {
    let positive = Interval::positive();
    let pair = match *check {
        Check::DerivativeSign { .. } | Check::Branch { hermitian_b: false, .. } => (s.hermitian_in(&f.domain)?, s.psd()),
        Check::Branch { hermitian_b: true, .. } => (s.hermitian_in(&f.domain)?, s.hermitian()),
        Check::TaylorRemainder { .. } => {
            let a = s.hermitian_in(&f.domain)?;
            let mut b = s.psd();
            if f.domain.b.is_finite() {
                let room = f.domain.b - s.config().spectrum_margin - max_eigenvalue(&a)?;
                let top = max_eigenvalue(&b)?;
                let t = room / top * s.uniform_in(0.1, 1.0);
                if t < 1.0 {
                    b = b.scale(t.max(0.0));
                }
            }
            (a, b)
        }
        Check::Pick => (s.hermitian(), s.pd()),
        Check::HalfPlane { part: HalfPlanePart::LowerHalf } => (s.hermitian(), s.pd().neg()),
        Check::HalfPlane { .. } => (s.hermitian_in(&positive)?, s.hermitian()),
        Check::Sandwich { .. } => (s.hermitian_in(&positive)?, s.psd()),
        Check::SectorMap { .. } => unreachable!("sector trials sample X directly"),
    };
    Ok(pair)
}

fn evaluate(check: &Check, f: &FunctionSpec, cfg: &SampleConfig, engine: Engine, tau: f64, spot: bool) -> Result<Evaluated> {
    let mut s = Sampler::new(cfg)?;
    if let Check::SectorMap { p, cone, direction } = *check {
        let mut x: Matrix<f64> = s.sector(p)?;
        if cone == Cone::Negative {
            x = x.adjoint();
        }
        let out = check_sector_map(f, &x, p, cone, direction, tau)?;
        return Ok(Evaluated { margin: Some(out.normalized()), matrices: Vec::new(), dual_ok: true });
    }
    let (a, b) = sample_instance(check, f, &mut s)?;
    let mut dual_ok = true;
    let tested: Vec<Tested> = match *check {
        Check::DerivativeSign { k } => vec![check_derivative_sign(f, k, &a, &b, engine)?],
        Check::TaylorRemainder { k } => vec![check_taylor_remainder(f, k, &a, &b, engine)?],
        Check::Branch { k, hermitian_b } => {
            let out = check_branch(f, &ToneBranch::new(k)?, &a, &b, engine, hermitian_b)?;
            if spot {
                dual_ok = duality_holds(&out.tested.matrix, &out.flipped)?;
            }
            vec![out.tested]
        }
        Check::Pick => vec![super::check_pick(f, &a.complexify(&b))?],
        Check::HalfPlane { part } => match check_half_plane(f, &a.complexify(&b), part, tau)? {
            Some(t) => t,
            None => return Ok(Evaluated { margin: None, matrices: Vec::new(), dual_ok }),
        },
        Check::Sandwich { k, flavor } => check_sandwich(f, k, &a, &b, flavor, engine)?,
        Check::SectorMap { .. } => unreachable!(),
    };
    Ok(Evaluated {
        margin: Tested::worst(&tested),
        matrices: tested.into_iter().map(|t| t.matrix).collect(),
        dual_ok,
    })
}

/// Replays one trial from its configuration (including its own seed).
pub fn run_trial(check: &Check, f: &FunctionSpec, cfg: &SampleConfig, engine: Engine, tau_rel: f64) -> TrialOutcome {
    match evaluate(check, f, cfg, engine, tau_rel, false) {
        Ok(Evaluated { margin: Some(m), .. }) => TrialOutcome::Margin(m),
        Ok(_) => TrialOutcome::Skipped,
        Err(e) => TrialOutcome::Failed(e.to_string()),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Spot {
    NotDue,
    Done,
    /// The alternate engine could not reach its own accuracy target.
    Unavailable,
}

fn spot_check(check: &Check, f: &FunctionSpec, cfg: &SampleConfig, opts: &CampaignOptions) -> (TrialOutcome, Spot) {
    let primary = match evaluate(check, f, cfg, opts.engine, opts.tau_rel, true) {
        Ok(e) => e,
        Err(e) => return (TrialOutcome::Failed(e.to_string()), Spot::NotDue),
    };
    let outcome = match primary.margin {
        Some(m) => TrialOutcome::Margin(m),
        None => TrialOutcome::Skipped,
    };
    if !primary.dual_ok {
        return (TrialOutcome::Failed("sign-flip identity violated".into()), Spot::Done);
    }
    if check.uses_engine() {
        let alt = match evaluate(check, f, cfg, opts.engine.alternate(), opts.tau_rel, false) {
            Ok(e) => e,
            Err(Error::Accuracy { .. }) => return (outcome, Spot::Unavailable),
            Err(e) => return (TrialOutcome::Failed(format!("alternate engine: {e}")), Spot::Done),
        };
        for (m, m_alt) in primary.matrices.iter().zip(&alt.matrices) {
            let diff = m.sub(m_alt).norm_fro();
            if diff > CROSS_CHECK_TOL * (1.0 + m.norm_fro()) {
                return (TrialOutcome::Failed(format!("engines disagree by {diff:e}")), Spot::Done);
            }
        }
    }
    (outcome, Spot::Done)
}

/// Verdict over normalized margins.
pub fn verdict(margins: &[Option<f64>], tau_rel: f64) -> Verdict {
    let present: Vec<f64> = margins.iter().flatten().copied().collect();
    if present.is_empty() {
        Verdict::Inconclusive
    } else if present.iter().any(|&m| m < -10.0 * tau_rel) {
        Verdict::Refuted
    } else if present.iter().all(|&m| m >= -tau_rel) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    }
}

/// Runs `opts.trials` independent trials of `check` on `f`.
///
/// Trial `t` draws from seed `trial_seed(opts.sample.seed, t)`, so the report
/// does not depend on scheduling. Failures above 1% of the trials abort the
/// campaign.
pub fn run_campaign(check: &Check, f: &FunctionSpec, opts: &CampaignOptions) -> Result<CheckReport> {
    opts.sample.validate()?;
    check.hypothesis(f)?;
    let run = || -> Vec<(TrialOutcome, Spot)> {
        (0..opts.trials)
            .into_par_iter()
            .map(|t| {
                let cfg = opts.sample.for_trial(t);
                if t % SPOT_CHECK_EVERY == 0 {
                    spot_check(check, f, &cfg, opts)
                } else {
                    (run_trial(check, f, &cfg, opts.engine, opts.tau_rel), Spot::NotDue)
                }
            })
            .collect()
    };
    let results = if opts.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::Campaign(e.to_string()))?
            .install(run)
    } else {
        run()
    };

    let mut margins = Vec::with_capacity(results.len());
    let (mut skipped, mut failures, mut spot_checks, mut cross_checks_unavailable) = (0, 0, 0, 0);
    let mut first_failure = None;
    for (t, (outcome, spot)) in results.into_iter().enumerate() {
        spot_checks += u64::from(spot == Spot::Done);
        cross_checks_unavailable += u64::from(spot == Spot::Unavailable);
        margins.push(match outcome {
            TrialOutcome::Margin(m) => Some(m),
            TrialOutcome::Skipped => {
                skipped += 1;
                None
            }
            TrialOutcome::Failed(msg) => {
                failures += 1;
                first_failure.get_or_insert((t, msg));
                None
            }
        });
    }
    if failures * 100 > opts.trials {
        let (t, msg) = first_failure.clone().unwrap_or_default();
        return Err(Error::Campaign(format!(
            "{failures} of {} trials failed (first at trial {t}: {msg})",
            opts.trials
        )));
    }
    let worst = margins
        .iter()
        .enumerate()
        .filter_map(|(t, m)| m.map(|m| (t as u64, m)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(trial, margin)| Worst { trial, seed: trial_seed(opts.sample.seed, trial), margin });
    Ok(CheckReport {
        check: check.to_string(),
        spec: f.to_string(),
        n: opts.sample.n,
        seed: opts.sample.seed,
        engine: opts.engine,
        trials: opts.trials,
        tau: opts.tau_rel,
        verdict: verdict(&margins, opts.tau_rel),
        margins,
        worst,
        skipped,
        failures,
        spot_checks,
        cross_checks_unavailable,
        first_failure: first_failure.map(|(t, msg)| format!("trial {t}: {msg}")),
        timestamp: None,
    })
}
