use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use radial_boltzmann::cascade::{project_initial, solve_closed_form, solve_numeric};
use radial_boltzmann::field::{decay_certificate, lyapunov_monotonicity, reconstruct, DecayReport, LyapunovReport, ProfileShape};
use radial_boltzmann::io::{write_profile, write_tables, write_trajectory};
use radial_boltzmann::verify::{random_perp_data, run_suites, CheckResult};
use radial_boltzmann::{Coefficients, Initial, RadialProfile, StepControl, Tables};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{InitialData, RunConfig};
use crate::{Failure, Format};

pub const RESOLVED_CONFIG: &str = "resolved-config.toml";
pub const NORM_WARNING: f64 = 0.1;

pub struct Context {
    pub config: RunConfig,
    pub format: Option<Format>,
}

impl Context {
    fn tabular(&self) -> bool {
        self.format != Some(Format::Structured)
    }

    fn structured(&self) -> bool {
        self.format != Some(Format::Tabular)
    }

    fn out_dir(&self) -> Result<&Path, Failure> {
        let dir = &self.config.output_dir;
        fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(dir)
    }

    fn write(&self, name: &str, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<PathBuf, Failure> {
        let path = self.out_dir()?.join(name);
        let io = |e: std::io::Error| Failure::Config(format!("cannot write {}: {e}", path.display()));
        let mut out = BufWriter::new(File::create(&path).map_err(io)?);
        body(&mut out).and_then(|_| out.flush()).map_err(io)?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    fn write_json<S: Serialize>(&self, name: &str, value: &S) -> Result<PathBuf, Failure> {
        self.write(name, |out| {
            serde_json::to_writer_pretty(&mut *out, value)?;
            writeln!(out)
        })
    }

    fn write_resolved_config(&self) -> Result<PathBuf, Failure> {
        let text = self.config.to_toml();
        self.write(RESOLVED_CONFIG, |out| out.write_all(text.as_bytes()))
    }

    fn build_tables(&self) -> Result<Tables, Failure> {
        let cfg = &self.config;
        Tables::build(cfg.model()?, cfg.truncation, &cfg.quadrature).map_err(numerical("building spectrum tables"))
    }

    fn emit_tables(&self, tables: &Tables) -> Result<(), Failure> {
        if self.tabular() {
            self.write("spectrum.csv", |out| write_tables(tables, out))?;
        }
        if self.structured() {
            self.write_json("spectrum.json", tables)?;
        }
        Ok(())
    }
}

fn numerical(what: &'static str) -> impl Fn(radial_boltzmann::Error) -> Failure {
    move |e| Failure::Numerical(format!("{what}: {e}"))
}

pub fn spectrum(ctx: &Context) -> Result<bool, Failure> {
    let tables = ctx.build_tables()?;
    ctx.emit_tables(&tables)?;
    ctx.write_resolved_config()?;
    println!(
        "spectrum: N = {}, lambda_4 = {:.16e}, lambda_2N = {:.16e}",
        tables.truncation(),
        tables.lambda(2),
        tables.lambda(tables.truncation())
    );
    Ok(true)
}

fn initial_data(cfg: &RunConfig) -> Result<Initial, Failure> {
    let n = cfg.truncation;
    let init = match &cfg.initial {
        InitialData::Coefficients { values } => {
            let mut b = values.clone();
            b.resize(n + 1, 0.0);
            Initial::new(b)
        }
        InitialData::Mode { mode, amplitude } => Initial::new(Coefficients::unit(n, *mode, *amplitude).b),
        InitialData::GaussianBump {
            center,
            width,
            amplitude,
            remove_invariants,
        } => {
            let shape = ProfileShape::GaussianBump {
                center: *center,
                width: *width,
                amplitude: *amplitude,
            };
            project_initial(&RadialProfile::Closed(shape), n, &cfg.quadrature).and_then(|p| {
                if *remove_invariants {
                    let mut b = p.b;
                    b[0] = 0.0;
                    b[1] = 0.0;
                    Initial::new(b)
                } else {
                    Ok(p)
                }
            })
        }
        InitialData::Random { norm } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            Ok(random_perp_data(&mut rng, n, *norm))
        }
    };
    init.map_err(numerical("preparing initial data"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: String,
    pub in_n_perp: bool,
    pub initial_norm: f64,
    pub seed: u64,
    pub exponential_terms: Option<usize>,
    pub resonance_mode: Option<usize>,
    pub final_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
struct DecayFile<'a> {
    summary: &'a RunSummary,
    decay: Option<&'a DecayReport<f64>>,
    lyapunov: Option<&'a LyapunovReport<f64>>,
}

/// Subset of the decay file read back by `report`.
#[derive(Debug, Clone, Deserialize)]
pub struct DecayDigest {
    pub summary: RunSummary,
    pub decay: Option<DecayDigestInner>,
    pub lyapunov: Option<LyapunovDigest>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DecayDigestInner {
    pub delta: f64,
    pub max_ratio: f64,
    pub first_violation: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct LyapunovDigest {
    pub max_increase: f64,
    pub slack: f64,
    pub passed: bool,
}

pub fn solve(ctx: &Context) -> Result<bool, Failure> {
    let cfg = &ctx.config;
    let tables = ctx.build_tables()?;
    ctx.emit_tables(&tables)?;
    let init = initial_data(cfg)?;
    let norm = init.norm();
    if norm > NORM_WARNING {
        log::warn!("initial data norm {norm:.3e} exceeds {NORM_WARNING}; the decay theory covers small data only");
    }
    let grid = cfg.time.grid();

    let (traj, mut summary) = if init.in_n_perp {
        let sol = solve_closed_form(&tables, &init).map_err(numerical("closed-form cascade"))?;
        let traj = sol.evaluate_grid(&grid).map_err(numerical("evaluating the cascade"))?;
        if ctx.structured() {
            ctx.write_json("solution.json", &sol)?;
        }
        let terms = (0..=cfg.truncation).filter_map(|n| sol.terms(n)).map(<[_]>::len).sum();
        let summary = RunSummary {
            method: "closed-form".into(),
            in_n_perp: true,
            initial_norm: norm,
            seed: cfg.seed,
            exponential_terms: Some(terms),
            resonance_mode: sol.resonance().map(|r| r.mode),
            final_norm: 0.0,
        };
        (traj, summary)
    } else {
        log::warn!("initial data has b0 or b1 nonzero; integrating numerically without a decay certificate");
        let traj = solve_numeric(&tables, &init, &grid, &StepControl::default()).map_err(numerical("numeric integration"))?;
        let summary = RunSummary {
            method: "numeric".into(),
            in_n_perp: false,
            initial_norm: norm,
            seed: cfg.seed,
            exponential_terms: None,
            resonance_mode: None,
            final_norm: 0.0,
        };
        (traj, summary)
    };
    summary.final_norm = traj.last().map_or(0.0, |c| c.l2_norm());

    if ctx.tabular() {
        ctx.write("trajectory.csv", |out| write_trajectory(&traj, out))?;
    }
    if ctx.structured() {
        ctx.write_json("trajectory.json", &traj)?;
    }

    let r_grid: Vec<f64> = (0..=400).map(|i| i as f64 * 0.025).collect();
    for (name, state) in [("profile-initial.csv", &traj[0]), ("profile-final.csv", &traj[traj.len() - 1])] {
        let profile = reconstruct(state, &r_grid).map_err(numerical("reconstructing the profile"))?;
        let values = r_grid
            .iter()
            .map(|&r| profile.eval(r))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(numerical("reconstructing the profile"))?;
        ctx.write(name, |out| write_profile(&r_grid, &values, out))?;
    }

    let (decay, lyapunov) = if summary.in_n_perp {
        let d = decay_certificate(&traj, &tables, cfg.time.delta, norm).map_err(numerical("decay certificate"))?;
        let l = lyapunov_monotonicity(&traj, &tables).map_err(numerical("Lyapunov check"))?;
        (Some(d), Some(l))
    } else {
        (None, None)
    };
    ctx.write_json(
        "decay.json",
        &DecayFile {
            summary: &summary,
            decay: decay.as_ref(),
            lyapunov: lyapunov.as_ref(),
        },
    )?;
    if let (Some(d), true) = (&decay, ctx.tabular()) {
        ctx.write("decay.csv", |out| {
            writeln!(out, "t,norm,bound,ratio,pass")?;
            for r in &d.records {
                writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{}", r.t, r.norm, r.bound, r.ratio, r.pass)?;
            }
            Ok(())
        })?;
    }

    let mut ok = decay.as_ref().is_none_or(|d| d.passed) && lyapunov.as_ref().is_none_or(|l| l.passed);
    println!(
        "solve: {} method, |b(0)| = {:.6e}, |b(t_end)| = {:.6e}",
        summary.method, norm, summary.final_norm
    );
    match (&decay, &lyapunov) {
        (Some(d), Some(l)) => println!(
            "decay certificate (delta = {}): {} (max ratio {:.6}); Lyapunov: {}",
            cfg.time.delta,
            verdict(d.passed),
            d.max_ratio,
            verdict(l.passed)
        ),
        _ => println!("decay certificate: skipped (data not orthogonal to the collisional invariants)"),
    }
    if cfg.verify.enabled {
        ok &= verify_tables(ctx, &tables)?;
    }
    ctx.write_resolved_config()?;
    Ok(ok)
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyFile {
    pub source: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn verify_tables(ctx: &Context, tables: &Tables) -> Result<bool, Failure> {
    verify_with_source(ctx, tables, "configuration".into())
}

fn verify_with_source(ctx: &Context, tables: &Tables, source: String) -> Result<bool, Failure> {
    let checks = run_suites(tables, &ctx.config.verify_options());
    for c in &checks {
        println!(
            "{} {:<24} max error {:.3e} (tol {:.0e})  {}{}",
            verdict(c.passed),
            c.name,
            c.max_error,
            c.tolerance,
            c.params,
            if c.detail.is_empty() { String::new() } else { format!("; {}", c.detail) }
        );
    }
    let passed = checks.iter().all(|c| c.passed);
    if ctx.tabular() {
        ctx.write("verify.csv", |out| {
            writeln!(out, "name,max_error,tolerance,passed")?;
            for c in &checks {
                writeln!(out, "{},{:.16e},{:.16e},{}", c.name, c.max_error, c.tolerance, c.passed)?;
            }
            Ok(())
        })?;
    }
    ctx.write_json("verify.json", &VerifyFile { source, passed, checks })?;
    println!("verification: {}", verdict(passed));
    Ok(passed)
}

pub fn verify(ctx: &Context, snapshot: Option<&Path>) -> Result<bool, Failure> {
    let (tables, source) = match snapshot {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            let tables: Tables = serde_json::from_str(&text)
                .map_err(|e| Failure::Config(format!("{}: not a spectrum snapshot: {e}", path.display())))?;
            (tables, format!("snapshot {}", path.display()))
        }
        None => (ctx.build_tables()?, "configuration".into()),
    };
    let passed = verify_with_source(ctx, &tables, source)?;
    ctx.write_resolved_config()?;
    Ok(passed)
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub directory: String,
    pub config: RunConfig,
    pub run: Option<RunSummary>,
    pub decay_passed: Option<bool>,
    pub decay_delta: Option<f64>,
    pub decay_max_ratio: Option<f64>,
    pub first_violation: Option<f64>,
    pub lyapunov_passed: Option<bool>,
    pub lyapunov_max_increase: Option<f64>,
    pub lyapunov_slack: Option<f64>,
    pub verification_passed: Option<bool>,
    pub failed_checks: Vec<String>,
}

fn read_optional<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Option<T>, Failure> {
    match fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Failure::Config(format!("cannot read {}: {e}", path.display()))),
    }
}

pub fn report(ctx: &Context, dir: &Path) -> Result<bool, Failure> {
    let config = RunConfig::load(&dir.join(RESOLVED_CONFIG))?;
    let decay: Option<DecayDigest> = read_optional(&dir.join("decay.json"))?;
    let verification: Option<VerifyFile> = read_optional(&dir.join("verify.json"))?;
    let report = Report {
        directory: dir.display().to_string(),
        config,
        run: decay.as_ref().map(|d| d.summary.clone()),
        decay_passed: decay.as_ref().and_then(|d| d.decay.as_ref()).map(|d| d.passed),
        decay_delta: decay.as_ref().and_then(|d| d.decay.as_ref()).map(|d| d.delta),
        decay_max_ratio: decay.as_ref().and_then(|d| d.decay.as_ref()).map(|d| d.max_ratio),
        first_violation: decay.as_ref().and_then(|d| d.decay.as_ref()).and_then(|d| d.first_violation),
        lyapunov_passed: decay.as_ref().and_then(|d| d.lyapunov.as_ref()).map(|l| l.passed),
        lyapunov_max_increase: decay.as_ref().and_then(|d| d.lyapunov.as_ref()).map(|l| l.max_increase),
        lyapunov_slack: decay.as_ref().and_then(|d| d.lyapunov.as_ref()).map(|l| l.slack),
        verification_passed: verification.as_ref().map(|v| v.passed),
        failed_checks: verification
            .iter()
            .flat_map(|v| v.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()))
            .collect(),
    };
    if ctx.format == Some(Format::Structured) {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        let m = &report.config.model;
        println!("run directory: {}", report.directory);
        println!(
            "model: s = {}, amplitude = {}, form = {}, N = {}, seed = {}",
            m.s, m.amplitude, m.form, report.config.truncation, report.config.seed
        );
        match &report.run {
            Some(r) => println!(
                "solution: {} method, |b(0)| = {:.6e}, |b(t_end)| = {:.6e}",
                r.method, r.initial_norm, r.final_norm
            ),
            None => println!("solution: none recorded"),
        }
        match (report.decay_passed, report.decay_delta, report.decay_max_ratio) {
            (Some(p), Some(delta), Some(r)) => println!(
                "decay certificate (delta = {delta}): {} (max ratio {r:.6}{})",
                verdict(p),
                report.first_violation.map_or(String::new(), |t| format!(", first violation at t = {t}"))
            ),
            _ => println!("decay certificate: not available"),
        }
        if let (Some(p), Some(inc), Some(slack)) = (report.lyapunov_passed, report.lyapunov_max_increase, report.lyapunov_slack) {
            println!("Lyapunov monotonicity: {} (max increase {inc:.3e}, slack {slack:.3e})", verdict(p));
        }
        match report.verification_passed {
            Some(p) => println!("verification: {} {:?}", verdict(p), report.failed_checks),
            None => println!("verification: not run"),
        }
    }
    Ok(report.decay_passed != Some(false) && report.lyapunov_passed != Some(false) && report.verification_passed != Some(false))
}
