//! Scenario execution: pre-flight, evolution with diagnostics, and the files
//! a run leaves behind.

use crate::config::{ConfigError, SEnd, Scenario};
use crate::output::{record_row, write_snapshot, RECORDS_HEADER};
use expanse_core::classifier::{classify, theorem1_verdict, EnergySign, ProblemSpec, RegimeReport};
use expanse_core::diagnostics::Tracker;
use expanse_core::solver::{FieldState, SolverConfig, Status};
use expanse_core::{Extended, GridSpec, InitialCondition, ScaleFactor, Solver, Spectral};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("classifier rejected {scenario}: {reason}")]
    Rejected { scenario: String, reason: String },
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
    #[error("{0}")]
    Core(#[from] expanse_core::Error),
}

impl RunError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Rejected { .. } => 3,
            RunError::Io { .. } | RunError::Core(_) => 1,
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> RunError {
    let context = context.into();
    move |source| RunError::Io { context, source }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed_override: Option<u64>,
    pub max_steps: Option<u64>,
    pub quiet: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub scenario_hash: String,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub status: String,
    /// Bracket `(s_lo, s_hi]` containing the detected blow-up.
    pub s_detect: Option<[f64; 2]>,
    pub blowup_cause: Option<String>,
    pub s_final: f64,
    pub steps: u64,
    pub records: Option<PathBuf>,
    pub snapshots: Vec<PathBuf>,
    pub profile: Option<PathBuf>,
}

impl RunManifest {
    pub fn blown_up(&self) -> bool {
        self.status == "blown-up"
    }

    pub fn exit_code(&self) -> i32 {
        if self.blown_up() {
            10
        } else {
            0
        }
    }
}

/// Applies command-line overrides to a parsed scenario.
pub fn apply_overrides(mut sc: Scenario, opts: &RunOptions) -> Scenario {
    if let Some(seed) = opts.seed_override {
        sc.initial = sc.initial.map(|ic| ic.with_seed(seed));
    }
    sc
}

/// SHA-256 of the canonical JSON form of the effective scenario.
pub fn scenario_hash(sc: &Scenario, max_steps: Option<u64>) -> String {
    #[derive(Serialize)]
    struct Keyed<'a> {
        scenario: &'a Scenario,
        max_steps: Option<u64>,
    }
    let json = serde_json::to_string(&Keyed { scenario: sc, max_steps }).expect("scenario serializes");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parameter checks that precede any simulation. Background errors are
/// configuration errors; inadmissible `(±, ω, μ₀, p)` are classifier rejections.
pub fn preflight(sc: &Scenario) -> Result<ProblemSpec, RunError> {
    let spec = sc.spec.problem();
    spec.background
        .validate()
        .map_err(|e| sc.field_error("spec", e.to_string()))?;
    let verdict = theorem1_verdict(&spec).map_err(|e| RunError::Rejected {
        scenario: sc.scenario.name.clone(),
        reason: e.to_string(),
    })?;
    if !verdict.local_wellposed {
        return Err(RunError::Rejected {
            scenario: sc.scenario.name.clone(),
            reason: verdict.local_reason,
        });
    }
    Ok(spec)
}

/// Everything needed to evolve a scenario, assembled and validated.
pub struct Prepared {
    pub solver: Solver,
    pub grid: GridSpec,
    pub u0: Vec<Complex64>,
    pub s_end: f64,
    pub k0: f64,
}

pub fn prepare(sc: &Scenario, max_steps: Option<u64>) -> Result<Prepared, RunError> {
    preflight(sc)?;
    let bg = ScaleFactor::new(sc.spec.background())?;
    let grid = sc.grid_spec()?;
    if grid.dim != sc.spec.n as usize {
        return Err(sc
            .field_error("grid.dim", format!("{} differs from spec.n = {}", grid.dim, sc.spec.n))
            .into());
    }
    let step = sc
        .scenario
        .step
        .ok_or_else(|| sc.field_error("scenario.step", "missing"))?;
    let s_end = match sc.scenario.s_end {
        None => return Err(sc.field_error("scenario.s_end", "missing").into()),
        Some(SEnd::Horizon) => match bg.s0 {
            Extended::Finite(s0) => s0,
            Extended::Infinite => {
                return Err(sc
                    .field_error("scenario.s_end", "\"horizon\" needs a finite S0")
                    .into())
            }
        },
        Some(SEnd::Value(v)) => {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(sc.field_error("scenario.s_end", "must be a finite number ≥ 0").into());
            }
            if let Extended::Finite(s0) = bg.s0 {
                if v > s0 {
                    return Err(sc
                        .field_error("scenario.s_end", format!("{v} exceeds S0 = {s0}"))
                        .into());
                }
            }
            v
        }
    };
    let u0 = sc
        .initial()?
        .generate(&grid)
        .map_err(|e| sc.field_error("initial", e.to_string()))?;
    let cfg = SolverConfig {
        sign: sc.spec.sign,
        omega: sc.spec.omega,
        lambda: sc.spec.lambda,
        p: sc.spec.p,
        m_mass: sc.spec.m,
        hbar: sc.spec.hbar,
        background: bg,
        nonlinearity: sc.spec.nonlinearity,
        step,
        safeguards: sc.safeguards.as_ref().map(|s| s.resolve()).unwrap_or_default(),
        max_steps,
    };
    let solver = Solver::new(cfg, &grid).map_err(|e| sc.field_error("spec", e.to_string()))?;
    Ok(Prepared {
        solver,
        grid,
        u0,
        s_end,
        k0: sc.diagnostics.k0,
    })
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339()
}

/// Runs one scenario and writes its records, snapshots, profile and manifest
/// under `out_dir/<name>/`.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<RunManifest, RunError> {
    let started = now();
    let sc = apply_overrides(sc.clone(), opts);
    let prep = prepare(&sc, opts.max_steps)?;
    let dir = opts.out_dir.join(&sc.scenario.name);
    fs::create_dir_all(&dir).map_err(io_err(format!("creating {}", dir.display())))?;

    let records_path = dir.join("records.csv");
    let mut records = if sc.outputs.records {
        let f = File::create(&records_path).map_err(io_err(format!("creating {}", records_path.display())))?;
        let mut w = BufWriter::new(f);
        writeln!(w, "{RECORDS_HEADER}").map_err(io_err("writing records"))?;
        Some(w)
    } else {
        None
    };
    let snap_dir = dir.join("snapshots");
    if sc.outputs.snapshot_every > 0 {
        fs::create_dir_all(&snap_dir).map_err(io_err("creating snapshot directory"))?;
    }

    let mut state = FieldState::new(prep.grid.clone(), prep.u0.clone())?;
    let mut tracker = Tracker::new(&prep.solver, prep.k0);
    let mut snapshots = Vec::new();
    let mut failure: Option<RunError> = None;
    let every = sc.outputs.snapshot_every;
    let summary = prep.solver.evolve(&mut state, prep.s_end, |st| {
        if failure.is_some() {
            return;
        }
        let result = (|| -> Result<(), RunError> {
            let rec = tracker.observe(st)?;
            if let Some(w) = records.as_mut() {
                writeln!(w, "{}", record_row(&rec)).map_err(io_err("writing records"))?;
            }
            if every > 0 && st.steps % every == 0 {
                let path = snap_dir.join(format!("snap_{:08}.bin", st.steps));
                let f = File::create(&path).map_err(io_err(format!("creating {}", path.display())))?;
                write_snapshot(BufWriter::new(f), &st.grid, st.s_now, &st.u)
                    .map_err(io_err("writing snapshot"))?;
                snapshots.push(path);
            }
            Ok(())
        })();
        if let Err(e) = result {
            failure = Some(e);
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    if let Some(mut w) = records.take() {
        w.flush().map_err(io_err("flushing records"))?;
    }

    let profile = if sc.outputs.plots {
        let path = dir.join("profile.dat");
        write_profile(&path, &state).map_err(io_err(format!("writing {}", path.display())))?;
        Some(path)
    } else {
        None
    };

    let (s_detect, blowup_cause) = match summary.status {
        Status::BlownUp { s_lo, s_hi, cause } => (
            Some([s_lo, s_hi]),
            Some(serde_json::to_value(cause).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()),
        ),
        _ => (None, None),
    };
    let manifest = RunManifest {
        scenario: sc.scenario.name.clone(),
        scenario_hash: scenario_hash(&sc, opts.max_steps),
        tool_version: TOOL_VERSION.to_string(),
        started,
        finished: now(),
        status: summary.status.label().to_string(),
        s_detect,
        blowup_cause,
        s_final: summary.s_final,
        steps: summary.steps,
        records: sc.outputs.records.then_some(records_path),
        snapshots,
        profile,
    };
    let manifest_path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, json + "\n").map_err(io_err(format!("writing {}", manifest_path.display())))?;
    if !opts.quiet {
        let detect = manifest
            .s_detect
            .map(|[a, b]| format!(", blow-up in ({a:.6e}, {b:.6e}]"))
            .unwrap_or_default();
        eprintln!(
            "{}: {} at s = {:.6e} after {} steps{}",
            manifest.scenario, manifest.status, manifest.s_final, manifest.steps, detect
        );
    }
    Ok(manifest)
}

/// Final field as whitespace-separated columns: coordinates, Re u, Im u, |u|.
fn write_profile(path: &Path, state: &FieldState) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let d = state.grid.dim;
    let axes = ["x", "y", "z"];
    writeln!(w, "# s = {:.16e}", state.s_now)?;
    writeln!(w, "# {} re im abs", axes[..d].join(" "))?;
    for (x, v) in state.grid.points().iter().zip(&state.u) {
        for c in &x[..d] {
            write!(w, "{c:.16e} ")?;
        }
        writeln!(w, "{:.16e} {:.16e} {:.16e}", v.re, v.im, v.norm())?;
    }
    w.flush()
}

/// Loads and runs several scenarios in parallel. Thread count is capped by
/// `EXPANSE_SIM_THREADS` when set.
pub fn run_batch(paths: &[PathBuf], opts: &RunOptions) -> Vec<(PathBuf, Result<RunManifest, RunError>)> {
    let loaded: Vec<(PathBuf, Result<Scenario, RunError>)> = paths
        .iter()
        .map(|p| (p.clone(), Scenario::load(p).map_err(RunError::from)))
        .collect();
    let mut seen = HashSet::new();
    let loaded: Vec<_> = loaded
        .into_iter()
        .map(|(p, r)| {
            let r = r.and_then(|sc| {
                if seen.insert(sc.scenario.name.clone()) {
                    Ok(sc)
                } else {
                    Err(sc
                        .field_error("scenario.name", "duplicated within the batch")
                        .into())
                }
            });
            (p, r)
        })
        .collect();
    let threads = std::env::var("EXPANSE_SIM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| {
        loaded
            .into_par_iter()
            .map(|(p, r)| {
                let out = r.and_then(|sc| run_scenario(&sc, opts));
                (p, out)
            })
            .collect()
    })
}

/// Sign of `E(u₀) = ½‖∇u₀‖² + a₀²λ/(p+1)·∫|u₀|^{p+1}`.
pub fn initial_energy(sc: &Scenario) -> Result<Option<f64>, RunError> {
    let (Some(_), Some(ic)) = (&sc.grid, &sc.initial) else {
        return Ok(None);
    };
    if sc.spec.lambda.im != 0.0 {
        return Ok(None);
    }
    let grid = sc.grid_spec()?;
    let u0 = ic.generate(&grid).map_err(|e| sc.field_error("initial", e.to_string()))?;
    let sp = Spectral::new(&grid)?;
    let p = sc.spec.p;
    let nonlin = grid.cell_volume() * u0.iter().map(|v| v.norm().powf(p + 1.0)).sum::<f64>();
    let a0 = sc.spec.a0;
    Ok(Some(0.5 * sp.grad_sq(&u0) + a0 * a0 * sc.spec.lambda.re / (p + 1.0) * nonlin))
}

/// Classifier report for a scenario; the energy sign and weighted-data flag
/// come from the initial data when a grid and generator are given.
pub fn classify_scenario(sc: &Scenario) -> Result<RegimeReport, RunError> {
    let spec = sc.spec.problem();
    spec.background
        .validate()
        .map_err(|e| sc.field_error("spec", e.to_string()))?;
    let energy = match initial_energy(sc)? {
        Some(e) if e < 0.0 => EnergySign::Negative,
        Some(_) => EnergySign::NonNegative,
        None => EnergySign::Unknown,
    };
    let weighted = sc.initial.as_ref().and_then(|ic| match ic {
        InitialCondition::Gaussian { .. } | InitialCondition::Ring { .. } => Some(true),
        _ => None,
    });
    classify(&spec, energy, weighted).map_err(|e| RunError::Rejected {
        scenario: sc.scenario.name.clone(),
        reason: e.to_string(),
    })
}
