mod cli;
mod config;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::Parser;
use opertone::frechet::{derivative, Engine};
use opertone::funcalc::{analytic_calc, CalcPath};
use opertone::matcore::{Matrix, MatrixJson};
use opertone::repfun::parse_spec;
use opertone::sampler::SampleConfig;
use opertone::verify::{counterexample_search, run_campaign, CampaignOptions, CheckReport, CounterKind, Verdict, TAU_REL};
use opertone::{CalcResult, Error};
use serde::Serialize;

use cli::{Cli, Command, CounterArgs, CounterKindArg, FrechetArgs, FuncalcArgs, VerifyArgs};
use config::{parse_claim, CampaignConfig};

const EXIT_PASS: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_REFUTED: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_HYPOTHESIS: u8 = 4;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.command {
        Command::Verify(a) => cmd_verify(&a),
        Command::Funcalc(a) => cmd_funcalc(&a),
        Command::Frechet(a) => cmd_frechet(&a),
        Command::Counterexample(a) => cmd_counterexample(&a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Hypothesis failures and campaign aborts get their own codes; anything
/// else is a usage or input problem.
fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Precondition { .. } | Error::Domain(_) | Error::Hypothesis(_)) => EXIT_HYPOTHESIS,
        Some(Error::Campaign(_)) => EXIT_INCONCLUSIVE,
        _ => EXIT_USAGE,
    }
}

fn tau_rel(config: Option<f64>) -> Result<f64> {
    match std::env::var("OPERTONE_TOL") {
        Ok(v) => {
            let t: f64 = v.trim().parse().with_context(|| format!("OPERTONE_TOL=`{v}` is not a number"))?;
            if !(t > 0.0 && t.is_finite()) {
                bail!("OPERTONE_TOL must be positive, got {t}");
            }
            Ok(t)
        }
        Err(_) => Ok(config.unwrap_or(TAU_REL)),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let base = match &args.config {
        Some(p) => CampaignConfig::load(p)?,
        None => CampaignConfig::default(),
    };
    let cfg = base.merge(args)?;
    cfg.validate()?;
    let check = cfg.check.expect("validated");
    let spec_text = cfg.spec.as_deref().expect("validated");
    let mut f = parse_spec(spec_text).context("parsing --spec")?;
    if let Some(c) = &cfg.claim {
        f = f.with_claimed_tags(parse_claim(c)?);
    }
    let tau = tau_rel(cfg.tau_rel)?;
    let timestamp = (!args.no_timestamp).then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));

    let mut reports: Vec<CheckReport> = Vec::with_capacity(cfg.dims.len());
    for &n in &cfg.dims {
        let mut sample = SampleConfig::new(n, cfg.seed.unwrap_or(0));
        if let Some(m) = cfg.margin {
            sample.spectrum_margin = m;
        }
        if let Some(s) = cfg.scale {
            sample.scale = s;
        }
        let engine = match cfg.engine {
            Some(e) => Engine::from(e),
            None if n <= 8 => Engine::DividedDiff,
            None => Engine::Contour,
        };
        let opts = CampaignOptions {
            sample,
            trials: cfg.trials.unwrap_or(100),
            engine,
            tau_rel: tau,
            jobs: args.jobs.unwrap_or(0),
        };
        let mut report = run_campaign(&check, &f, &opts).with_context(|| format!("campaign at n = {n}"))?;
        report.timestamp = timestamp;
        if report.verdict == Verdict::Refuted {
            if let Some(w) = &report.worst {
                eprintln!("refuted at n = {n}: trial {} (seed {}) margin {:e}", w.trial, w.seed, w.margin);
            }
        }
        reports.push(report);
    }

    let text = if args.csv { margins_csv(&reports) } else { to_json(&reports)? };
    write_out(cfg.output.as_deref(), &text)?;

    let code = if reports.iter().any(|r| r.verdict == Verdict::Refuted) {
        EXIT_REFUTED
    } else if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_PASS
    };
    Ok(code)
}

/// One row per trial; skipped or failed trials leave the margin empty.
fn margins_csv(reports: &[CheckReport]) -> String {
    let mut s = String::from("check,n,trial,seed,margin\n");
    for r in reports {
        for (t, m) in r.margins.iter().enumerate() {
            let seed = opertone::sampler::trial_seed(r.seed, t as u64);
            let m = m.map(|m| format!("{m:.16e}")).unwrap_or_default();
            s.push_str(&format!("{},{},{t},{seed},{m}\n", r.check, r.n));
        }
    }
    s
}

fn read_matrix(path: &Path) -> Result<MatrixJson> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing matrix {}", path.display()))
}

#[derive(Serialize)]
struct CalcJson {
    value: MatrixJson,
    path: CalcPath,
    est_error: f64,
    nodes_used: usize,
}

impl From<&CalcResult> for CalcJson {
    fn from(r: &CalcResult) -> Self {
        Self { value: MatrixJson::from_matrix(&r.value), path: r.path, est_error: r.est_error, nodes_used: r.nodes_used }
    }
}

#[derive(Serialize)]
struct Comparison {
    eigen: CalcJson,
    contour: CalcJson,
    /// `||eigen - contour||_F / ||eigen||_F`
    difference: f64,
}

fn cmd_funcalc(args: &FuncalcArgs) -> Result<u8> {
    let f = parse_spec(&args.spec).context("parsing --spec")?;
    let x: Matrix<f64> = read_matrix(&args.matrix)?.to_matrix().context("invalid matrix")?;
    let text = if args.compare {
        let e = analytic_calc(&f, &x, CalcPath::Eigen)?;
        let c = analytic_calc(&f, &x, CalcPath::Contour)?;
        let d = &e.value - &c.value;
        let difference = d.norm_fro() / e.value.norm_fro().max(f64::MIN_POSITIVE);
        to_json(&Comparison { eigen: (&e).into(), contour: (&c).into(), difference })?
    } else {
        to_json(&CalcJson::from(&analytic_calc(&f, &x, args.path.into())?))?
    };
    write_out(None, &text)?;
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct DerivativeJson {
    order: usize,
    engine: Engine,
    est_error: f64,
    value: MatrixJson,
}

fn cmd_frechet(args: &FrechetArgs) -> Result<u8> {
    let f = parse_spec(&args.spec).context("parsing --spec")?;
    let a = read_matrix(&args.a)?.to_hermitian::<f64>().context("--a must be Hermitian")?;
    let b = read_matrix(&args.b)?.to_hermitian::<f64>().context("--b must be Hermitian")?;
    let d = derivative(&f, &a, &b, args.order, args.engine.into())?;
    let out = DerivativeJson {
        order: d.order,
        engine: d.engine,
        est_error: d.est_error,
        value: MatrixJson::from_matrix(&d.value),
    };
    write_out(None, &to_json(&out)?)?;
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct SearchJson {
    search: CounterKind,
    budget: u64,
    seed: u64,
    expected_found: bool,
    found: bool,
    witness: Option<opertone::verify::Witness>,
}

fn cmd_counterexample(args: &CounterArgs) -> Result<u8> {
    let p = || args.p.context("--p is required for the power searches");
    let kind = match args.kind {
        CounterKindArg::PowerIm => CounterKind::PowerIm { p: p()? },
        CounterKindArg::PowerRe => CounterKind::PowerRe { p: p()? },
        CounterKindArg::Anticommutator => CounterKind::Anticommutator,
    };
    let witness = counterexample_search(kind, args.budget, args.seed)?;
    let out = SearchJson {
        search: kind,
        budget: args.budget,
        seed: args.seed,
        expected_found: kind.expected_found(),
        found: witness.is_some(),
        witness,
    };
    write_out(None, &to_json(&out)?)?;
    Ok(if out.found == out.expected_found { EXIT_PASS } else { EXIT_REFUTED })
}
