//! Line-based run configuration: `key = value` pairs under `[section]`
//! headers, `#` comments. Keys before the first header are top-level.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use attoqo_core::driver::DriverKind;
use attoqo_core::sfa::{Atom, Envelope, LaserPulse, Window};
use attoqo_core::units;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based line, 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

type PResult<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Spectrum,
    Qstate,
    Condition,
    Coherence,
    Drive,
    Ati,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::Qstate => "qstate",
            Scenario::Condition => "condition",
            Scenario::Coherence => "coherence",
            Scenario::Drive => "drive",
            Scenario::Ati => "ati",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "spectrum" => Scenario::Spectrum,
            "qstate" => Scenario::Qstate,
            "condition" => Scenario::Condition,
            "coherence" => Scenario::Coherence,
            "drive" => Scenario::Drive,
            "ati" => Scenario::Ati,
            _ => return None,
        })
    }

    /// Sections a config for this scenario must contain.
    pub fn required_sections(&self) -> &'static [&'static str] {
        match self {
            Scenario::Spectrum => &["pulse", "atom"],
            Scenario::Qstate => &["pulse", "atom", "coupling"],
            Scenario::Condition => &["pulse", "atom", "coupling", "condition"],
            Scenario::Coherence => &["pulse", "atom", "coupling", "coherence"],
            Scenario::Drive => &["pulse", "atom", "drive"],
            Scenario::Ati => &["pulse", "atom", "coupling", "ati"],
        }
    }
}

/// Allowed keys per section; the empty name is the top level.
const SCHEMA: &[(&str, &[&str])] = &[
    ("", &["scenario", "seed", "threads", "output", "sweep"]),
    ("pulse", &["wavelength_nm", "omega_au", "intensity_w_cm2", "e0_au", "cycles", "envelope", "ramp_cycles", "cep", "dt"]),
    ("atom", &["ip_au", "ip_ev"]),
    ("coupling", &["g", "q_cutoff", "n_emitters"]),
    ("spectrum", &["window"]),
    ("qstate", &["correlations", "corr_points", "momentum_points"]),
    (
        "condition",
        &[
            "shots", "window", "alpha_re", "alpha_im", "delta_alpha_re", "delta_alpha_im", "omega", "wigner_half_width",
            "wigner_step", "metrology_mean", "metrology_shift", "write_shots",
        ],
    ),
    ("coherence", &["q", "corr_points", "momentum_points", "n_tau", "t_ref", "record_span", "kappa", "g0", "freq_step"]),
    ("drive", &["kind", "alpha0_re", "alpha0_im", "r", "theta", "nbar", "sampler", "nodes", "seed", "window"]),
    ("ati", &["v_points", "v_max", "dt", "q_max", "entropy_v"]),
];

/// Keys that spell the same quantity in different units.
const ALTERNATIVES: &[(&str, &str)] = &[("wavelength_nm", "omega_au"), ("intensity_w_cm2", "e0_au"), ("ip_au", "ip_ev")];

/// Raw `section → key → (value, line)` map.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    sections: BTreeMap<String, (usize, BTreeMap<String, (String, usize)>)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> PResult<Self> {
        let mut raw = RawConfig::default();
        raw.sections.insert(String::new(), (0, BTreeMap::new()));
        let mut current = String::new();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ParseError::at(n, "unterminated section header"))?
                    .trim()
                    .to_string();
                if !SCHEMA.iter().any(|(s, _)| *s == name) || name.is_empty() {
                    return Err(ParseError::at(n, format!("unknown section [{name}]")));
                }
                if raw.sections.contains_key(&name) {
                    return Err(ParseError::at(n, format!("duplicate section [{name}]")));
                }
                raw.sections.insert(name.clone(), (n, BTreeMap::new()));
                current = name;
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ParseError::at(n, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let allowed = SCHEMA.iter().find(|(s, _)| *s == current).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                let place = if current.is_empty() { "top level".to_string() } else { format!("[{current}]") };
                return Err(ParseError::at(n, format!("unknown key '{key}' in {place}")));
            }
            if value.is_empty() {
                return Err(ParseError::at(n, format!("empty value for '{key}'")));
            }
            let map = &mut raw.sections.get_mut(&current).expect("section exists").1;
            if let Some((_, first)) = map.get(key) {
                return Err(ParseError::at(n, format!("duplicate key '{key}' (first set on line {first})")));
            }
            map.insert(key.to_string(), (value.to_string(), n));
        }
        Ok(raw)
    }

    fn has(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn section(&self, name: &str) -> Section<'_> {
        Section { name: name.to_string(), map: self.sections.get(name).map(|s| &s.1), header_line: self.sections.get(name).map_or(0, |s| s.0) }
    }

    fn set(&mut self, section: &str, key: &str, value: String) {
        self.sections.entry(section.to_string()).or_default().1.insert(key.to_string(), (value, 0));
    }

    fn remove(&mut self, section: &str, key: &str) {
        if let Some(s) = self.sections.get_mut(section) {
            s.1.remove(key);
        }
    }

    /// Copy without the sweep key and with `section.key = value`, dropping the
    /// alternative spelling of the same quantity.
    fn with_override(&self, section: &str, key: &str, value: &str) -> Self {
        let mut r = self.clone();
        r.remove("", "sweep");
        for (a, b) in ALTERNATIVES {
            if key == *a {
                r.remove(section, b);
            } else if key == *b {
                r.remove(section, a);
            }
        }
        r.set(section, key, value.to_string());
        r
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        let order: Vec<&str> = SCHEMA.iter().map(|(s, _)| *s).collect();
        for name in order {
            let Some((_, map)) = self.sections.get(name) else { continue };
            if !name.is_empty() {
                let _ = writeln!(out, "\n[{name}]");
            }
            for (k, (v, _)) in map {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out.trim_start().to_string()
    }
}

struct Section<'a> {
    name: String,
    map: Option<&'a BTreeMap<String, (String, usize)>>,
    header_line: usize,
}

impl Section<'_> {
    fn raw(&self, key: &str) -> Option<(&str, usize)> {
        self.map.and_then(|m| m.get(key)).map(|(v, l)| (v.as_str(), *l))
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> ParseError {
        ParseError::at(line, msg)
    }

    fn opt<T: std::str::FromStr>(&self, key: &str) -> PResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((v, l)) => v.parse().map(Some).map_err(|e| self.err(l, format!("invalid value '{v}' for '{key}': {e}"))),
        }
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> PResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.opt(key)?.ok_or_else(|| {
            let place = if self.name.is_empty() { "top level".to_string() } else { format!("section [{}]", self.name) };
            self.err(self.header_line, format!("missing key '{key}' in {place}"))
        })
    }

    fn or<T: std::str::FromStr>(&self, key: &str, default: T) -> PResult<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.opt(key)?.unwrap_or(default))
    }

    fn line(&self, key: &str) -> usize {
        self.raw(key).map_or(self.header_line, |(_, l)| l)
    }

    /// Checks a predicate on an already parsed value.
    fn check(&self, key: &str, ok: bool, what: &str) -> PResult<()> {
        if ok {
            Ok(())
        } else {
            Err(self.err(self.line(key), format!("'{key}' out of range: {what}")))
        }
    }

    /// Exactly one of two alternative keys.
    fn one_of(&self, a: &str, b: &str) -> PResult<(bool, f64)> {
        match (self.opt::<f64>(a)?, self.opt::<f64>(b)?) {
            (Some(x), None) => Ok((true, x)),
            (None, Some(x)) => Ok((false, x)),
            (Some(_), Some(_)) => Err(self.err(self.line(b), format!("set only one of '{a}' and '{b}'"))),
            (None, None) => Err(self.err(self.header_line, format!("section [{}] needs '{a}' or '{b}'", self.name))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseConfig {
    pub omega: f64,
    pub e0: f64,
    pub envelope: Envelope,
    pub cep: f64,
    pub dt: f64,
}

impl PulseConfig {
    pub fn pulse(&self) -> attoqo_core::Result<LaserPulse> {
        LaserPulse::new(self.e0, self.omega, self.cep, self.envelope)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingBlock {
    pub g: f64,
    pub q_cutoff: usize,
    pub n_emitters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QstateBlock {
    pub correlations: bool,
    pub corr_points: usize,
    pub momentum_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticInput {
    pub alpha: (f64, f64),
    pub delta_alpha: (f64, f64),
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionBlock {
    pub shots: usize,
    pub window: Option<f64>,
    pub analytic: Option<AnalyticInput>,
    pub wigner_half_width: f64,
    pub wigner_step: f64,
    pub metrology_mean: Option<f64>,
    /// `|δα|` of the matched cat used for metrology curves.
    pub metrology_shift: f64,
    pub write_shots: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceBlock {
    pub q: usize,
    pub corr_points: usize,
    pub momentum_points: usize,
    pub n_tau: usize,
    pub t_ref: Option<f64>,
    /// Record length in pulse durations.
    pub record_span: f64,
    pub kappa: f64,
    pub g0: f64,
    /// Frequency bin width in units of `ω0`.
    pub freq_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    MonteCarlo,
    GaussHermite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveBlock {
    pub kind: DriverKind,
    pub alpha0: (f64, f64),
    pub r: f64,
    pub theta: f64,
    pub nbar: f64,
    pub sampler: SamplerKind,
    pub nodes: usize,
    pub seed: Option<u64>,
    pub window: Window,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtiBlock {
    pub v_points: usize,
    pub v_max: Option<f64>,
    pub dt: f64,
    pub q_max: usize,
    pub entropy_v: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub section: String,
    pub key: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub sweep: Option<Sweep>,
    pub pulse: Option<PulseConfig>,
    pub atom: Option<Atom>,
    pub coupling: Option<CouplingBlock>,
    pub window: Window,
    pub qstate: QstateBlock,
    pub condition: Option<ConditionBlock>,
    pub coherence: Option<CoherenceBlock>,
    pub drive: Option<DriveBlock>,
    pub ati: Option<AtiBlock>,
}

fn parse_window(s: &Section, key: &str) -> PResult<Window> {
    match s.raw(key) {
        None | Some(("hann", _)) => Ok(Window::Hann),
        Some(("rectangular", _)) => Ok(Window::Rectangular),
        Some((v, l)) => Err(ParseError::at(l, format!("unknown window '{v}' (hann, rectangular)"))),
    }
}

fn window_name(w: Window) -> &'static str {
    w.name()
}

impl RunConfig {
    pub fn parse_str(text: &str) -> PResult<Self> {
        Self::from_raw(&RawConfig::parse(text)?)
    }

    fn from_raw(raw: &RawConfig) -> PResult<Self> {
        let top = raw.section("");
        let scenario_text: String = top.get("scenario")?;
        let scenario = Scenario::parse(&scenario_text)
            .ok_or_else(|| ParseError::at(top.line("scenario"), format!("unknown scenario '{scenario_text}'")))?;
        for name in scenario.required_sections() {
            if !raw.has(name) {
                return Err(ParseError::at(0, format!("missing section [{name}] required by scenario={}", scenario.name())));
            }
        }
        let seed = top.opt::<u64>("seed")?;
        let threads = top.opt::<usize>("threads")?;
        if let Some(t) = threads {
            top.check("threads", t >= 1, "must be at least 1")?;
        }
        let output = top.opt::<String>("output")?.map(PathBuf::from);
        let sweep = match top.raw("sweep") {
            None => None,
            Some((v, l)) => Some(parse_sweep(v, l)?),
        };

        let pulse = if raw.has("pulse") { Some(parse_pulse(&raw.section("pulse"))?) } else { None };
        let atom = if raw.has("atom") {
            let s = raw.section("atom");
            let ip = match (s.opt::<f64>("ip_au")?, s.opt::<f64>("ip_ev")?) {
                (Some(_), Some(_)) => return Err(ParseError::at(s.line("ip_ev"), "set only one of 'ip_au' and 'ip_ev'")),
                (Some(x), None) => x,
                (None, Some(ev)) => ev / units::au_to_ev(1.0),
                (None, None) => 0.5,
            };
            s.check(if s.raw("ip_ev").is_some() { "ip_ev" } else { "ip_au" }, ip > 0.0 && ip.is_finite(), "must be > 0")?;
            Some(Atom::new(ip).map_err(|e| ParseError::at(s.header_line, e.to_string()))?)
        } else {
            None
        };
        let coupling = if raw.has("coupling") {
            let s = raw.section("coupling");
            let c = CouplingBlock { g: s.or("g", 1e-4)?, q_cutoff: s.or("q_cutoff", 30)?, n_emitters: s.or("n_emitters", 1)? };
            s.check("g", c.g > 0.0 && c.g.is_finite(), "must be > 0")?;
            s.check("q_cutoff", c.q_cutoff >= 2, "must be at least 2")?;
            s.check("n_emitters", c.n_emitters >= 1, "must be at least 1")?;
            Some(c)
        } else {
            None
        };
        let window = parse_window(&raw.section("spectrum"), "window")?;
        let qs = raw.section("qstate");
        let qstate = QstateBlock { correlations: qs.or("correlations", true)?, corr_points: qs.or("corr_points", 256)?, momentum_points: qs.or("momentum_points", 512)? };
        qs.check("corr_points", qstate.corr_points >= 8, "must be at least 8")?;
        qs.check("momentum_points", qstate.momentum_points >= 3, "must be at least 3")?;

        let condition = if raw.has("condition") { Some(parse_condition(&raw.section("condition"))?) } else { None };
        let coherence = if raw.has("coherence") { Some(parse_coherence(&raw.section("coherence"))?) } else { None };
        let drive = if raw.has("drive") { Some(parse_drive(&raw.section("drive"))?) } else { None };
        let ati = if raw.has("ati") {
            let s = raw.section("ati");
            let a = AtiBlock { v_points: s.or("v_points", 801)?, v_max: s.opt("v_max")?, dt: s.or("dt", 0.1)?, q_max: s.or("q_max", 6)?, entropy_v: s.opt("entropy_v")? };
            s.check("v_points", a.v_points >= 64, "must be at least 64")?;
            s.check("v_max", a.v_max.is_none_or(|v| v > 0.0), "must be > 0")?;
            s.check("dt", a.dt > 0.0, "must be > 0")?;
            s.check("q_max", a.q_max >= 1, "must be at least 1")?;
            s.check("entropy_v", a.entropy_v.is_none_or(|v| v > 0.0), "must be > 0")?;
            Some(a)
        } else {
            None
        };

        let stochastic = match scenario {
            Scenario::Condition => true,
            Scenario::Drive => drive.as_ref().is_some_and(|d| d.sampler == SamplerKind::MonteCarlo),
            _ => false,
        };
        if stochastic && seed.is_none() && drive.as_ref().and_then(|d| d.seed).is_none() {
            return Err(ParseError::at(0, format!("scenario={} is stochastic and needs a seed", scenario.name())));
        }
        let cfg = RunConfig { scenario, seed, threads, output, sweep, pulse, atom, coupling, window, qstate, condition, coherence, drive, ati };
        if let Some(sw) = &cfg.sweep {
            let line = top.line("sweep");
            if !raw.has(&sw.section) && !sw.section.is_empty() {
                return Err(ParseError::at(line, format!("sweep targets missing section [{}]", sw.section)));
            }
            let allowed = SCHEMA.iter().find(|(s, _)| *s == sw.section).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&sw.key.as_str()) || sw.section.is_empty() {
                return Err(ParseError::at(line, format!("sweep key '{}.{}' is not sweepable", sw.section, sw.key)));
            }
            for v in &sw.values {
                Self::from_raw(&raw.with_override(&sw.section, &sw.key, v)).map_err(|e| ParseError::at(line, format!("sweep value '{v}': {}", e.message)))?;
            }
        }
        Ok(cfg)
    }

    /// Canonical text form; parsing it yields an identical config.
    pub fn to_config_string(&self) -> String {
        self.to_raw().to_text()
    }

    fn to_raw(&self) -> RawConfig {
        let mut r = RawConfig::default();
        let f = |x: f64| format!("{x:?}");
        r.set("", "scenario", self.scenario.name().into());
        if let Some(s) = self.seed {
            r.set("", "seed", s.to_string());
        }
        if let Some(t) = self.threads {
            r.set("", "threads", t.to_string());
        }
        if let Some(o) = &self.output {
            r.set("", "output", o.display().to_string());
        }
        if let Some(sw) = &self.sweep {
            r.set("", "sweep", format!("{}.{}: {}", sw.section, sw.key, sw.values.join(", ")));
        }
        if let Some(p) = &self.pulse {
            r.set("pulse", "omega_au", f(p.omega));
            r.set("pulse", "e0_au", f(p.e0));
            r.set("pulse", "cycles", f(p.envelope.cycles()));
            r.set("pulse", "envelope", p.envelope.name().into());
            if let Envelope::FlatTop { ramp_cycles, .. } = p.envelope {
                r.set("pulse", "ramp_cycles", f(ramp_cycles));
            }
            r.set("pulse", "cep", f(p.cep));
            r.set("pulse", "dt", f(p.dt));
        }
        if let Some(a) = &self.atom {
            r.set("atom", "ip_au", f(a.ip()));
        }
        if let Some(c) = &self.coupling {
            r.set("coupling", "g", f(c.g));
            r.set("coupling", "q_cutoff", c.q_cutoff.to_string());
            r.set("coupling", "n_emitters", c.n_emitters.to_string());
        }
        r.set("spectrum", "window", window_name(self.window).into());
        let q = &self.qstate;
        r.set("qstate", "correlations", q.correlations.to_string());
        r.set("qstate", "corr_points", q.corr_points.to_string());
        r.set("qstate", "momentum_points", q.momentum_points.to_string());
        if let Some(c) = &self.condition {
            r.set("condition", "shots", c.shots.to_string());
            if let Some(w) = c.window {
                r.set("condition", "window", f(w));
            }
            if let Some(a) = &c.analytic {
                r.set("condition", "alpha_re", f(a.alpha.0));
                r.set("condition", "alpha_im", f(a.alpha.1));
                r.set("condition", "delta_alpha_re", f(a.delta_alpha.0));
                r.set("condition", "delta_alpha_im", f(a.delta_alpha.1));
                r.set("condition", "omega", f(a.omega));
            }
            r.set("condition", "wigner_half_width", f(c.wigner_half_width));
            r.set("condition", "wigner_step", f(c.wigner_step));
            if let Some(m) = c.metrology_mean {
                r.set("condition", "metrology_mean", f(m));
            }
            r.set("condition", "metrology_shift", f(c.metrology_shift));
            r.set("condition", "write_shots", c.write_shots.to_string());
        }
        if let Some(c) = &self.coherence {
            r.set("coherence", "q", c.q.to_string());
            r.set("coherence", "corr_points", c.corr_points.to_string());
            r.set("coherence", "momentum_points", c.momentum_points.to_string());
            r.set("coherence", "n_tau", c.n_tau.to_string());
            if let Some(t) = c.t_ref {
                r.set("coherence", "t_ref", f(t));
            }
            r.set("coherence", "record_span", f(c.record_span));
            r.set("coherence", "kappa", f(c.kappa));
            r.set("coherence", "g0", f(c.g0));
            r.set("coherence", "freq_step", f(c.freq_step));
        }
        if let Some(d) = &self.drive {
            r.set("drive", "kind", d.kind.name().into());
            r.set("drive", "alpha0_re", f(d.alpha0.0));
            r.set("drive", "alpha0_im", f(d.alpha0.1));
            r.set("drive", "r", f(d.r));
            r.set("drive", "theta", f(d.theta));
            r.set("drive", "nbar", f(d.nbar));
            r.set("drive", "sampler", if d.sampler == SamplerKind::MonteCarlo { "mc" } else { "gh" }.into());
            r.set("drive", "nodes", d.nodes.to_string());
            if let Some(s) = d.seed {
                r.set("drive", "seed", s.to_string());
            }
            r.set("drive", "window", window_name(d.window).into());
        }
        if let Some(a) = &self.ati {
            r.set("ati", "v_points", a.v_points.to_string());
            if let Some(v) = a.v_max {
                r.set("ati", "v_max", f(v));
            }
            r.set("ati", "dt", f(a.dt));
            r.set("ati", "q_max", a.q_max.to_string());
            if let Some(v) = a.entropy_v {
                r.set("ati", "entropy_v", f(v));
            }
        }
        r
    }

    /// One config per sweep value (or `self` alone), without the sweep key.
    pub fn expand(&self) -> PResult<Vec<RunConfig>> {
        let Some(sw) = &self.sweep else { return Ok(vec![self.clone()]) };
        let base = self.to_raw();
        sw.values
            .iter()
            .map(|v| Self::from_raw(&base.with_override(&sw.section, &sw.key, v)))
            .collect()
    }

    /// Seed with `[drive] seed` taking precedence for the drive scenario.
    pub fn effective_seed(&self) -> Option<u64> {
        self.drive.as_ref().and_then(|d| d.seed).or(self.seed)
    }
}

fn parse_sweep(v: &str, line: usize) -> PResult<Sweep> {
    let (target, values) = v.split_once(':').ok_or_else(|| ParseError::at(line, "sweep must read `section.key: v1, v2, ...`"))?;
    let (section, key) = target.trim().split_once('.').ok_or_else(|| ParseError::at(line, "sweep target must be `section.key`"))?;
    let values: Vec<String> = values.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if values.is_empty() {
        return Err(ParseError::at(line, "sweep has no values"));
    }
    Ok(Sweep { section: section.trim().into(), key: key.trim().into(), values })
}

fn parse_pulse(s: &Section) -> PResult<PulseConfig> {
    let (by_wavelength, w) = s.one_of("wavelength_nm", "omega_au")?;
    let omega = if by_wavelength {
        s.check("wavelength_nm", w > 0.0 && w.is_finite(), "must be > 0")?;
        units::wavelength_nm_to_omega(w)
    } else {
        s.check("omega_au", w > 0.0 && w.is_finite(), "must be > 0")?;
        w
    };
    let (by_intensity, x) = s.one_of("intensity_w_cm2", "e0_au")?;
    let e0 = if by_intensity {
        s.check("intensity_w_cm2", x >= 0.0 && x.is_finite(), "must be ≥ 0")?;
        units::intensity_w_cm2_to_field(x)
    } else {
        s.check("e0_au", x >= 0.0 && x.is_finite(), "must be ≥ 0")?;
        x
    };
    let cycles: f64 = s.get("cycles")?;
    s.check("cycles", cycles > 0.0 && cycles.is_finite(), "must be > 0")?;
    let envelope = match s.raw("envelope").map(|(v, _)| v).unwrap_or("sin2") {
        "sin2" => Envelope::Sin2 { cycles },
        "gaussian" => Envelope::Gaussian { cycles },
        "flat-top" => {
            let ramp_cycles: f64 = s.or("ramp_cycles", 2.0)?;
            s.check("ramp_cycles", ramp_cycles >= 0.0 && 2.0 * ramp_cycles <= cycles, "needs 0 ≤ 2·ramp ≤ cycles")?;
            Envelope::FlatTop { cycles, ramp_cycles }
        }
        other => return Err(ParseError::at(s.line("envelope"), format!("unknown envelope '{other}' (sin2, gaussian, flat-top)"))),
    };
    if s.raw("ramp_cycles").is_some() && !matches!(envelope, Envelope::FlatTop { .. }) {
        return Err(ParseError::at(s.line("ramp_cycles"), "'ramp_cycles' applies only to envelope = flat-top"));
    }
    let cep: f64 = s.or("cep", 0.0)?;
    s.check("cep", cep.is_finite(), "must be finite")?;
    let dt: f64 = s.or("dt", 0.1)?;
    s.check("dt", dt > 0.0 && dt.is_finite(), "must be > 0")?;
    let cfg = PulseConfig { omega, e0, envelope, cep, dt };
    cfg.pulse().map_err(|e| ParseError::at(s.header_line, e.to_string()))?;
    Ok(cfg)
}

fn parse_condition(s: &Section) -> PResult<ConditionBlock> {
    let keys = ["alpha_re", "alpha_im", "delta_alpha_re", "delta_alpha_im", "omega"];
    let present = keys.iter().filter(|k| s.raw(k).is_some()).count();
    let analytic = if present == 0 {
        None
    } else {
        let a = AnalyticInput {
            alpha: (s.get("alpha_re")?, s.or("alpha_im", 0.0)?),
            delta_alpha: (s.get("delta_alpha_re")?, s.or("delta_alpha_im", 0.0)?),
            omega: s.or("omega", 0.0)?,
        };
        s.check("omega", a.omega >= 0.0, "must be ≥ 0")?;
        Some(a)
    };
    let c = ConditionBlock {
        shots: s.or("shots", 1_000_000)?,
        window: s.opt("window")?,
        analytic,
        wigner_half_width: s.or("wigner_half_width", 6.0)?,
        wigner_step: s.or("wigner_step", 0.1)?,
        metrology_mean: s.opt("metrology_mean")?,
        metrology_shift: s.or("metrology_shift", 1.0)?,
        write_shots: s.or("write_shots", false)?,
    };
    s.check("shots", c.shots >= 1, "must be at least 1")?;
    s.check("window", c.window.is_none_or(|w| w >= 0.0), "must be ≥ 0")?;
    s.check("wigner_half_width", c.wigner_half_width > 0.0, "must be > 0")?;
    s.check("wigner_step", c.wigner_step > 0.0 && c.wigner_step <= 0.5, "needs 0 < step ≤ 0.5")?;
    s.check("metrology_mean", c.metrology_mean.is_none_or(|m| m > 1.0), "must be > 1")?;
    s.check("metrology_shift", c.metrology_shift > 0.0 && c.metrology_shift.is_finite(), "must be > 0")?;
    Ok(c)
}

fn parse_coherence(s: &Section) -> PResult<CoherenceBlock> {
    let c = CoherenceBlock {
        q: s.or("q", 1)?,
        corr_points: s.or("corr_points", 256)?,
        momentum_points: s.or("momentum_points", 512)?,
        n_tau: s.or("n_tau", 64)?,
        t_ref: s.opt("t_ref")?,
        record_span: s.or("record_span", 4.0)?,
        kappa: s.or("kappa", 0.0)?,
        g0: s.or("g0", 0.0)?,
        freq_step: s.or("freq_step", 0.125)?,
    };
    s.check("q", c.q >= 1, "must be at least 1")?;
    s.check("corr_points", c.corr_points >= 8, "must be at least 8")?;
    s.check("momentum_points", c.momentum_points >= 3, "must be at least 3")?;
    s.check("n_tau", c.n_tau >= 1, "must be at least 1")?;
    s.check("record_span", c.record_span >= 1.0, "must be at least 1")?;
    s.check("kappa", c.kappa >= 0.0, "must be ≥ 0")?;
    s.check("g0", c.g0 >= 0.0, "must be ≥ 0")?;
    s.check("freq_step", c.freq_step > 0.0, "must be > 0")?;
    Ok(c)
}

fn parse_drive(s: &Section) -> PResult<DriveBlock> {
    let kind_text: String = s.get("kind")?;
    let kind = DriverKind::parse(&kind_text).map_err(|e| ParseError::at(s.line("kind"), e.to_string()))?;
    let sampler = match s.raw("sampler").map(|(v, _)| v).unwrap_or("mc") {
        "mc" | "monte-carlo" => SamplerKind::MonteCarlo,
        "gh" | "gauss-hermite" => SamplerKind::GaussHermite,
        other => return Err(ParseError::at(s.line("sampler"), format!("unknown sampler '{other}' (mc, gh)"))),
    };
    let d = DriveBlock {
        kind,
        alpha0: (s.or("alpha0_re", 0.0)?, s.or("alpha0_im", 0.0)?),
        r: s.or("r", 0.0)?,
        theta: s.or("theta", 0.0)?,
        nbar: s.or("nbar", 0.0)?,
        sampler,
        nodes: s.or("nodes", 256)?,
        seed: s.opt("seed")?,
        window: parse_window(s, "window")?,
    };
    if sampler == SamplerKind::GaussHermite {
        let root = (d.nodes as f64).sqrt().round() as usize;
        s.check("nodes", root * root == d.nodes, "Gauss-Hermite needs a square node count")?;
    }
    attoqo_core::driver::DriverDistribution::new(kind, attoqo_core::C64::new(d.alpha0.0, d.alpha0.1), d.r, d.theta, d.nbar)
        .map_err(|e| ParseError::at(s.header_line, e.to_string()))?;
    if kind != DriverKind::Coherent && d.nodes < attoqo_core::driver::MIN_NODES {
        return Err(ParseError::at(s.line("nodes"), format!("'nodes' out of range: at least {}", attoqo_core::driver::MIN_NODES)));
    }
    Ok(d)
}

pub fn parse_config(path: &Path) -> PResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::at(0, format!("cannot read {}: {e}", path.display())))?;
    RunConfig::parse_str(&text)
}
