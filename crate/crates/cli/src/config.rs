//! Campaign configuration: a JSON file merged with command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use opertone::repfun::ClassTags;
use opertone::verify::{Check, Cone, Direction, Flavor, HalfPlanePart};
use serde::{Deserialize, Serialize};

use crate::cli::{CheckName, EngineArg, VerifyArgs};

pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub check: Option<Check>,
    pub spec: Option<String>,
    #[serde(default)]
    pub dims: Vec<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub engine: Option<EngineArg>,
    pub tau_rel: Option<f64>,
    /// Gap between sampled spectra and the domain boundary.
    pub margin: Option<f64>,
    /// Norm of sampled directions.
    pub scale: Option<f64>,
    pub claim: Option<String>,
    pub output: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Applies flags on top of the file values.
    pub fn merge(mut self, args: &VerifyArgs) -> Result<Self> {
        if let Some(name) = args.check {
            self.check = Some(build_check(name, args)?);
        } else if let Some(check) = self.check.as_mut() {
            override_params(check, args);
        }
        if let Some(s) = &args.spec {
            self.spec = Some(s.clone());
        }
        if let Some(d) = &args.dims {
            self.dims = d.clone();
        }
        self.trials = args.trials.or(self.trials);
        self.seed = args.seed.or(self.seed);
        self.engine = args.engine.or(self.engine);
        if args.claim.is_some() {
            self.claim = args.claim.clone();
        }
        if args.output.is_some() {
            self.output = args.output.clone();
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.check.is_none() {
            bail!("no check given (use --check or a config file)");
        }
        if self.spec.is_none() {
            bail!("no function spec given (use --spec or a config file)");
        }
        if self.dims.is_empty() {
            bail!("no dimensions given");
        }
        if let Some(&n) = self.dims.iter().find(|&&n| n == 0 || n > MAX_DIM) {
            bail!("dimension {n} outside [1, {MAX_DIM}]");
        }
        if self.trials == Some(0) {
            bail!("trials must be >= 1");
        }
        if let Some(t) = self.tau_rel {
            if !(t > 0.0 && t.is_finite()) {
                bail!("tau_rel must be positive, got {t}");
            }
        }
        Ok(())
    }
}

fn need<T>(v: Option<T>, flag: &str, check: &str) -> Result<T> {
    v.with_context(|| format!("--check {check} needs --{flag}"))
}

fn build_check(name: CheckName, a: &VerifyArgs) -> Result<Check> {
    Ok(match name {
        CheckName::DerivativeSign => Check::DerivativeSign { k: need(a.k, "k", "derivative-sign")? },
        CheckName::TaylorRemainder => Check::TaylorRemainder { k: need(a.k, "k", "taylor-remainder")? },
        CheckName::Branch => Check::Branch { k: need(a.k, "k", "branch")?, hermitian_b: a.hermitian_b },
        CheckName::Pick => Check::Pick,
        CheckName::HalfPlane => Check::HalfPlane { part: need(a.part, "part", "half-plane")?.into() },
        CheckName::SectorMap => Check::SectorMap {
            p: need(a.p, "p", "sector-map")?,
            cone: a.cone.map_or(Cone::Positive, Into::into),
            direction: need(a.direction, "direction", "sector-map")?.into(),
        },
        CheckName::Sandwich => Check::Sandwich {
            k: need(a.k, "k", "sandwich")?,
            flavor: need(a.flavor, "flavor", "sandwich")?.into(),
        },
    })
}

fn override_params(check: &mut Check, a: &VerifyArgs) {
    match check {
        Check::DerivativeSign { k } | Check::TaylorRemainder { k } => *k = a.k.unwrap_or(*k),
        Check::Branch { k, hermitian_b } => {
            *k = a.k.unwrap_or(*k);
            *hermitian_b |= a.hermitian_b;
        }
        Check::Pick => {}
        Check::HalfPlane { part } => *part = a.part.map_or(*part, HalfPlanePart::from),
        Check::SectorMap { p, cone, direction } => {
            *p = a.p.unwrap_or(*p);
            *cone = a.cone.map_or(*cone, Cone::from);
            *direction = a.direction.map_or(*direction, Direction::from);
        }
        Check::Sandwich { k, flavor } => {
            *k = a.k.unwrap_or(*k);
            *flavor = a.flavor.map_or(*flavor, Flavor::from);
        }
    }
}

/// Class tags for `--claim`.
pub fn parse_claim(text: &str) -> Result<ClassTags> {
    let t = text.trim();
    if let Some(k) = t.strip_prefix("ktone:") {
        let k: usize = k.parse().with_context(|| format!("bad tone order in claim `{t}`"))?;
        if k == 0 {
            bail!("tone order must be >= 1");
        }
        return Ok(ClassTags::claim_ktone(k));
    }
    Ok(match t {
        "monotone" => ClassTags { nonnegative: true, ..ClassTags::claim_ktone(1) },
        "convex" => ClassTags::claim_ktone(2),
        "decreasing" => ClassTags { decreasing: true, nonnegative: true, ..ClassTags::claim_ktone(2) },
        _ => bail!("unknown claim `{t}` (expected ktone:K, monotone, decreasing or convex)"),
    })
}
