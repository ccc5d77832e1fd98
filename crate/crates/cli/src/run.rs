//! Scenario pipelines. Every scenario writes `#`-headered CSV/text outputs,
//! a `summary.txt` of headline numbers and a `manifest.txt`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use attoqo_core::ati::{self, ContinuumGrid};
use attoqo_core::coherence::{self, io as cio, DelayWindow, EnvironmentConfig, FrequencyGrid};
use attoqo_core::conditioning::{self, io as kio, ConditioningInput};
use attoqo_core::driver::{self, DriverDistribution, Sampler};
use attoqo_core::phase_space::{io as pio, log_negativity, squeezing_parameters, wigner, Axis};
use attoqo_core::qstate::{self, io as qio, CouplingConfig};
use attoqo_core::sfa::{self, io as sio, Atom, LaserPulse, MomentumGrid, SfaOptions, TimeGrid};
use attoqo_core::C64;
use sha2::{Digest, Sha256};

use crate::config::{ParseError, RunConfig, SamplerKind, Scenario};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("numeric error: {0}")]
    Numeric(attoqo_core::Error),
    #[error("selection efficiency: {0}")]
    Selection(attoqo_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<attoqo_core::Error> for RunError {
    fn from(e: attoqo_core::Error) -> Self {
        match e {
            attoqo_core::Error::SelectionEfficiency { .. } => RunError::Selection(e),
            other => RunError::Numeric(other),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse(_) => 2,
            RunError::Numeric(_) => 3,
            RunError::Selection(_) => 4,
            RunError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Parse(_) => "parse",
            RunError::Numeric(_) => "numeric",
            RunError::Selection(_) => "selection-efficiency",
            RunError::Io(_) => "io",
        }
    }

    /// Machine-readable `key = value` record.
    pub fn record(&self) -> String {
        let line = match self {
            RunError::Parse(p) => p.line.to_string(),
            _ => "0".into(),
        };
        format!("kind = {}\nexit_code = {}\nline = {line}\nmessage = {}\n", self.kind(), self.exit_code(), self.to_string().replace('\n', " "))
    }
}

type RResult<T> = std::result::Result<T, RunError>;

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub scenario: String,
    pub config_sha256: String,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub stages: Vec<(String, f64)>,
    /// `(relative path, sha256)`.
    pub outputs: Vec<(String, String)>,
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario = {}", self.scenario);
        let _ = writeln!(out, "config_sha256 = {}", self.config_sha256);
        let _ = writeln!(out, "tool_version = {}", self.tool_version);
        if let Some(s) = self.seed {
            let _ = writeln!(out, "seed = {s}");
        }
        for (name, secs) in &self.stages {
            let _ = writeln!(out, "stage.{name}.wall_s = {secs:.6}");
        }
        for (path, digest) in &self.outputs {
            let _ = writeln!(out, "output.{path}.sha256 = {digest}");
        }
        out
    }

    pub fn digest(&self, path: &str) -> Option<&str> {
        self.outputs.iter().find(|(p, _)| p == path).map(|(_, d)| d.as_str())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects outputs, stage timings and summary lines for one run.
struct Recorder {
    dir: PathBuf,
    prefix: String,
    stages: Vec<(String, f64)>,
    outputs: Vec<(String, String)>,
    summary: Vec<(String, String)>,
}

impl Recorder {
    fn write(&mut self, name: &str, content: &str) -> RResult<()> {
        let rel = format!("{}{name}", self.prefix);
        let path = self.dir.join(&rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| RunError::Io(format!("{}: {e}", parent.display())))?;
        }
        std::fs::write(&path, content).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        self.outputs.push((rel, sha256_hex(content.as_bytes())));
        Ok(())
    }

    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> RResult<T>) -> RResult<T> {
        let t = Instant::now();
        let out = f()?;
        self.stages.push((format!("{}{name}", self.prefix.replace('/', ".")), t.elapsed().as_secs_f64()));
        Ok(out)
    }

    fn note(&mut self, key: &str, value: impl std::fmt::Display) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    fn flush_summary(&mut self) -> RResult<()> {
        let mut text = String::new();
        for (k, v) in std::mem::take(&mut self.summary) {
            let _ = writeln!(text, "{k} = {v}");
        }
        self.write("summary.txt", &text)
    }
}

fn pulse_of(cfg: &RunConfig) -> RResult<(LaserPulse, Atom, f64)> {
    let p = cfg.pulse.as_ref().expect("validated: pulse section");
    Ok((p.pulse()?, cfg.atom.expect("validated: atom section"), p.dt))
}

fn coupling_of(cfg: &RunConfig) -> RResult<CouplingConfig> {
    let c = cfg.coupling.as_ref().expect("validated: coupling section");
    Ok(CouplingConfig::new(c.g, c.q_cutoff, c.n_emitters)?)
}

/// Runs a config (expanding any sweep) into `out`; the config's `output`
/// key is used when `out` is `None`.
pub fn run(cfg: &RunConfig, out: Option<&Path>, threads: Option<usize>) -> RResult<RunManifest> {
    let dir = out.map(Path::to_path_buf).or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
    let threads = threads.or(cfg.threads).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| RunError::Io(e.to_string()))?;
    let canonical = cfg.to_config_string();
    let mut rec = Recorder { dir: dir.clone(), prefix: String::new(), stages: Vec::new(), outputs: Vec::new(), summary: Vec::new() };
    rec.write("config.txt", &canonical)?;
    let variants = cfg.expand()?;
    let swept = cfg.sweep.is_some();
    pool.install(|| -> RResult<()> {
        for (i, v) in variants.iter().enumerate() {
            rec.prefix = if swept { format!("sweep_{i:03}/") } else { String::new() };
            if swept {
                let sw = cfg.sweep.as_ref().expect("swept");
                rec.note("sweep_key", format!("{}.{}", sw.section, sw.key));
                rec.note("sweep_value", &sw.values[i]);
                rec.write("config.txt", &v.to_config_string())?;
            }
            run_one(v, &mut rec)?;
            rec.flush_summary()?;
        }
        Ok(())
    })?;
    rec.prefix.clear();
    let manifest = RunManifest {
        scenario: cfg.scenario.name().into(),
        config_sha256: sha256_hex(canonical.as_bytes()),
        tool_version: TOOL_VERSION.into(),
        seed: cfg.effective_seed(),
        stages: rec.stages,
        outputs: rec.outputs,
    };
    let path = dir.join("manifest.txt");
    std::fs::write(&path, manifest.to_text()).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    Ok(manifest)
}

fn run_one(cfg: &RunConfig, rec: &mut Recorder) -> RResult<()> {
    match cfg.scenario {
        Scenario::Spectrum => spectrum(cfg, rec),
        Scenario::Qstate => qstate_run(cfg, rec),
        Scenario::Condition => condition(cfg, rec),
        Scenario::Coherence => coherence_run(cfg, rec),
        Scenario::Drive => drive(cfg, rec),
        Scenario::Ati => ati_run(cfg, rec),
    }
}

fn spectrum(cfg: &RunConfig, rec: &mut Recorder) -> RResult<()> {
    let (pulse, atom, dt) = pulse_of(cfg)?;
    let grid = TimeGrid::covering(&pulse, dt)?;
    let record = rec.stage("dipole", || Ok(sfa::dipole_expectation(&pulse, &atom, &grid)?))?;
    let spec = rec.stage("spectrum", || Ok(sfa::hhg_spectrum(&record, cfg.window)))?;
    rec.write("dipole.csv", &sio::record_to_csv(&record))?;
    rec.write("spectrum.csv", &sio::spectrum_to_csv(&spec))?;
    let qc = sfa::cutoff_energy(&pulse, &atom) / pulse.omega();
    rec.note("up_au", pulse.ponderomotive_energy());
    rec.note("classical_cutoff_order", qc);
    if let Some(q) = sfa::detect_cutoff(&spec, 5.0, qc.max(6.0), sfa::PLATEAU_EDGE_THRESHOLD) {
        rec.note("plateau_edge_order", q);
    }
    Ok(())
}

fn qstate_run(cfg: &RunConfig, rec: &mut Recorder) -> RResult<()> {
    let (pulse, atom, dt) = pulse_of(cfg)?;
    let coupling = coupling_of(cfg)?;
    let grid = TimeGrid::covering(&pulse, dt)?;
    let record = rec.stage("dipole", || Ok(sfa::dipole_expectation(&pulse, &atom, &grid)?))?;
    let alpha = qstate::driver_amplitude(&pulse, coupling.g);
    let amps = rec.stage("amplitudes", || Ok(qstate::coherent_amplitudes(&record, &coupling, alpha)?))?;
    let trace = qstate::depletion_trace(&record, &coupling, alpha)?;
    let bil = if cfg.qstate.correlations {
        let cgrid = TimeGrid::with_points(&pulse, cfg.qstate.corr_points)?;
        let mut momenta = MomentumGrid::for_pulse(&pulse);
        momenta.n = cfg.qstate.momentum_points;
        let corr = rec.stage("correlation", || Ok(sfa::dipole_correlation(&pulse, &atom, &cgrid, &momenta)?))?;
        Some(rec.stage("bilinear", || Ok(qstate::bilinear_coefficients(&corr, &coupling, pulse.omega())?))?)
    } else {
        None
    };
    let state = rec.stage("gaussian", || Ok(qstate::gaussian_output_state(&amps, bil.as_ref())?))?;
    rec.write("amplitudes.csv", &qio::amplitudes_to_csv(&amps))?;
    let mut dep = String::from("# t,abs_alpha_plus_delta_alpha\n");
    for (t, v) in grid.times().zip(&trace) {
        let _ = writeln!(dep, "{t:e},{v:e}");
    }
    rec.write("depletion.csv", &dep)?;
    rec.write("gaussian_state.txt", &qio::gaussian_to_string(&state))?;
    let (r, angle) = squeezing_parameters(&state, 0)?;
    rec.note("alpha_in_abs", alpha.norm());
    rec.note("delta_alpha_abs", amps.delta_alpha().norm());
    rec.note("harmonic_photons", amps.harmonic_photons());
    rec.note("fundamental_squeezing_r", r);
    rec.note("fundamental_squeezing_angle", angle);
    rec.note("log_negativity_fundamental", log_negativity(&state, &[0])?);
    Ok(())
}

fn condition(cfg: &RunConfig, rec: &mut Recorder) -> RResult<()> {
    let block = cfg.condition.as_ref().expect("validated: condition section");
    let input = match &block.analytic {
        Some(a) => ConditioningInput::with_omega(C64::new(a.alpha.0, a.alpha.1), C64::new(a.delta_alpha.0, a.delta_alpha.1), a.omega)?,
        None => {
            let (pulse, atom, dt) = pulse_of(cfg)?;
            let coupling = coupling_of(cfg)?;
            let grid = TimeGrid::covering(&pulse, dt)?;
            let record = rec.stage("dipole", || Ok(sfa::dipole_expectation(&pulse, &atom, &grid)?))?;
            let amps = qstate::coherent_amplitudes(&record, &coupling, qstate::driver_amplitude(&pulse, coupling.g))?;
            ConditioningInput::from_amplitudes(&amps)?
        }
    };
    let cat = conditioning::hhg_cat_state(&input)?;
    let axis = Axis::symmetric(block.wigner_half_width, block.wigner_step)?;
    let centre = input.alpha_in() * std::f64::consts::SQRT_2;
    let xa = Axis::new(centre.re - block.wigner_half_width, block.wigner_step, axis.count)?;
    let pa = Axis::new(centre.im - block.wigner_half_width, block.wigner_step, axis.count)?;
    let w = rec.stage("wigner", || Ok(wigner(&cat, 0, xa, pa)?))?;
    rec.write("cat_state.txt", &pio::state_to_string(&cat))?;
    rec.write("wigner.csv", &pio::wigner_to_string(&w))?;
    rec.note("alpha_in_abs", input.alpha_in().norm());
    rec.note("delta_alpha_abs", input.delta_alpha().norm());
    rec.note("omega", input.omega() + 0.0);
    rec.note("wigner_min", w.min());

    if let Some(mean) = block.metrology_mean {
        let (_, hhg) = conditioning::matched_hhg_cat(C64::new(-block.metrology_shift, 0.0), 0.0, mean)?;
        let etas: Vec<f64> = (0..=49).map(|k| 0.5 + 0.01 * k as f64).collect();
        let (loss, qfi) = rec.stage("metrology", || {
            Ok((conditioning::loss_robustness_curve(&hhg, &etas)?, conditioning::qfi_comparison(&hhg, &etas)?))
        })?;
        rec.write("metrology.csv", &kio::curves_to_csv(&loss, &qfi)?)?;
        match qfi.advantage {
            Some((a, b)) => rec.note("qfi_advantage_eta", format!("{a},{b}")),
            None => rec.note("qfi_advantage_eta", "none"),
        }
    }

    let seed = cfg.effective_seed().expect("validated: stochastic scenario has a seed");
    let table = rec.stage("shots", || Ok(conditioning::sample_shots(&input.product_amplitudes(), block.shots, seed)?))?;
    if block.write_shots {
        rec.write("shots.csv", &kio::shots_to_csv(&table))?;
    }
    let ps = rec.stage("postselect", || Ok(conditioning::postselect_energy_conserving(&table, &input, block.window)?))?;
    let mut text = String::new();
    let _ = writeln!(text, "kept = {}", ps.kept.len());
    let _ = writeln!(text, "acceptance_rate = {:e}", ps.acceptance_rate);
    let _ = writeln!(text, "window = {:e}", ps.window);
    let _ = writeln!(text, "sample_mean = {:e}", ps.sample_mean);
    let _ = writeln!(text, "sample_variance = {:e}", ps.sample_variance);
    let _ = writeln!(text, "fit_shift = {:e}", ps.fit.shift);
    let _ = writeln!(text, "fit_omega = {:e}", ps.fit.omega);
    let _ = writeln!(text, "fidelity = {:e}", ps.fidelity);
    rec.write("postselection.txt", &text)?;
    rec.note("acceptance_rate", ps.acceptance_rate);
    rec.note("fidelity", ps.fidelity);
    Ok(())
}

fn coherence_run(cfg: &RunConfig, rec: &mut Recorder) -> RResult<()> {
    let block = cfg.coherence.as_ref().expect("validated: coherence section");
    let (pulse, atom, dt) = pulse_of(cfg)?;
    let coupling = coupling_of(cfg)?;
    let steps = (block.record_span * pulse.duration() / dt).ceil() as usize;
    let grid = TimeGrid::new(0.0, block.record_span * pulse.duration() / steps as f64, steps + 1)?;
    let record = rec.stage("dipole", || Ok(sfa::dipole_expectation(&pulse, &atom, &grid)?))?;
    let cgrid = TimeGrid::with_points(&pulse, block.corr_points)?;
    let mut momenta = MomentumGrid::for_pulse(&pulse);
    momenta.n = block.momentum_points;
    let corr = rec.stage("correlation", || Ok(sfa::dipole_correlation(&pulse, &atom, &cgrid, &momenta)?))?;
    let window = DelayWindow { t_ref: block.t_ref.unwrap_or(pulse.center()), n_tau: block.n_tau };
    let g1_raw = rec.stage("g1", || Ok(coherence::first_order_correlation(&record, &corr, block.q, &coupling, window)?))?;
    let g1 = coherence::g1_normalized(&g1_raw)?;
    let g2 = rec.stage("g2", || Ok(coherence::g2(&record, &corr, block.q, &coupling, window)?))?;
    rec.write("g1_raw.csv", &cio::series_to_csv(&g1_raw))?;
    rec.write("g1.csv", &cio::series_to_csv(&g1))?;
    rec.write("g2.csv", &cio::series_to_csv(&g2))?;
    let step = block.freq_step * pulse.omega();
    let nyquist = std::f64::consts::PI / cgrid.dt;
    let top = nyquist.min((coupling.q_cutoff as f64 + 0.5) * pulse.omega());
    let fgrid = FrequencyGrid::new(step, (top / step).floor() as usize + 1)?;
    let (coh, inc) = rec.stage("wkt", || Ok(coherence::wkt_spectrum(&record, &corr, &coupling, &pulse, &fgrid)?))?;
    let mut text = format!("# omega0={:e}\n# omega,harmonic_order,coherent,incoherent\n", pulse.omega());
    for k in 0..coh.omega.len() {
        let _ = writeln!(text, "{:e},{:e},{:e},{:e}", coh.omega[k], coh.harmonic_order(k), coh.intensity[k], inc.intensity[k]);
    }
    rec.write("wkt_spectrum.csv", &text)?;
    if block.kappa > 0.0 || block.g0 > 0.0 {
        let env = EnvironmentConfig::new(block.kappa, block.g0)?;
        let damped = coherence::damped_spectrum(&record, &env, &coupling, &fgrid)?;
        rec.write("damped_spectrum.csv", &sio::spectrum_to_csv(&damped))?;
        if block.g0 > 0.0 {
            rec.note("incoherent_power_bound", coherence::incoherent_power_bound(coupling.g, block.g0)?);
        }
    }
    let min_abs = g1.values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    rec.note("g1_abs_min", min_abs);
    rec.note("g2_zero", g2.values[0].re);
    rec.note("coherent_energy", coh.intensity.iter().sum::<f64>());
    rec.note("incoherent_energy", inc.intensity.iter().sum::<f64>());
    Ok(())
}

fn drive(cfg: &RunConfig, rec: &mut Recorder) -> RResult<()> {
    let block = cfg.drive.as_ref().expect("validated: drive section");
    let (pulse, atom, dt) = pulse_of(cfg)?;
    let dist = DriverDistribution::new(block.kind, C64::new(block.alpha0.0, block.alpha0.1), block.r, block.theta, block.nbar)?;
    let sampler = match block.sampler {
        SamplerKind::MonteCarlo => Sampler::MonteCarlo { nodes: block.nodes, seed: cfg.effective_seed().unwrap_or(0) },
        SamplerKind::GaussHermite => Sampler::GaussHermite { per_axis: (block.nodes as f64).sqrt().round() as usize },
    };
    let avg = rec.stage("average", || Ok(driver::averaged_hhg_spectrum(&dist, &pulse, &atom, dt, &SfaOptions::default(), block.window, &sampler)?))?;
    rec.write("spectrum_avg.csv", &driver::averaged_spectrum_to_csv(&avg))?;
    let qc = sfa::cutoff_energy(&pulse, &atom) / pulse.omega();
    rec.note("mean_photon_number", dist.mean_photon_number());
    rec.note("grid_dt", avg.grid.dt);
    if let Some(k) = sfa::detect_cutoff_bin(&avg.spectrum, 5.0, qc.max(6.0), sfa::CUTOFF_THRESHOLD) {
        rec.note("cutoff_bin", k);
        rec.note("cutoff_order", avg.spectrum.harmonic_order(k));
    }
    Ok(())
}

fn ati_run(cfg: &RunConfig, rec: &mut Recorder) -> RResult<()> {
    let block = cfg.ati.as_ref().expect("validated: ati section");
    let (pulse, atom, dt) = pulse_of(cfg)?;
    let coupling = coupling_of(cfg)?;
    let cgrid = match block.v_max {
        Some(v) => ContinuumGrid::new(v, block.v_points)?,
        None => ContinuumGrid::for_pulse(&pulse, block.v_points)?,
    };
    let grid = TimeGrid::covering(&pulse, block.dt)?;
    let spec = rec.stage("photoelectrons", || Ok(ati::photoelectron_spectrum(&pulse, &atom, &cgrid, &grid)?))?;
    rec.write("photoelectron.csv", &ati::io::photoelectron_to_csv(&spec))?;
    let record = sfa::dipole_expectation(&pulse, &atom, &TimeGrid::covering(&pulse, dt)?)?;
    let hhg_coupling = CouplingConfig::new(coupling.g, block.q_max.max(2), 1)?;
    let amps = qstate::coherent_amplitudes(&record, &hhg_coupling, qstate::driver_amplitude(&pulse, coupling.g))?;
    let rows = rec.stage("emission", || {
        (1..=block.q_max)
            .map(|q| {
                let p = ati::photon_emission_probability(&pulse, &atom, &coupling, q, &cgrid, &grid)?;
                Ok((q, p, ati::hhg_photon_probability(&amps, q)))
            })
            .collect::<RResult<Vec<_>>>()
    })?;
    rec.write("emission.csv", &ati::io::emission_to_csv(&rows))?;
    rec.note("keldysh", ati::keldysh_parameter(&pulse, &atom));
    rec.note("up_au", spec.up);
    rec.note("total_yield", spec.total_yield());
    if spec.up > 0.0 {
        rec.note("falloff_ratio_2up", spec.falloff_ratio(pulse.omega()));
    }
    if let Some(v) = block.entropy_v {
        let s = rec.stage("entropy", || Ok(ati::light_matter_entropy(&pulse, &atom, &coupling, v, &grid)?))?;
        rec.note("entropy", s);
    }
    Ok(())
}
