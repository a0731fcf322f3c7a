//! Sweep configuration files.
//!
//! One `key = value` pair per line, `#` starts a comment, keys are dotted:
//!
//! ```text
//! mode = psuc_vs_threshold
//! network.lambda = 1e-4
//! network.alpha = 3.5
//! sweep.variable = gamma_th
//! sweep.scale = db
//! sweep.start = -10
//! sweep.stop = 20
//! sweep.step = 1
//! variants = 2:0.01, 2:0.7, 2:0.95
//! mc.trials = 100000
//! mc.seed = 7
//! ```
//!
//! Unprefixed `lambda`, `alpha`, `r00`, `noise_over_power` and `gamma_th_db`
//! are accepted as shorthands for the `network.` keys, and `rho = a, b` with an
//! optional `n_t = k` as a shorthand for `variants = k:a, k:b`.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use mrtnet_core::mcsim::{DEFAULT_TRUNCATION_TOLERANCE, DEFAULT_WINDOW_RADIUS};
use mrtnet_core::network::NetworkConfig;

/// Upper bound on the number of swept points.
pub const MAX_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Campaign {
    PsucVsThreshold,
    AseVsDensity,
    PdfG,
    RayleighQuotientPdf,
}

impl Campaign {
    pub const ALL: [Campaign; 4] = [
        Campaign::PsucVsThreshold,
        Campaign::AseVsDensity,
        Campaign::PdfG,
        Campaign::RayleighQuotientPdf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Campaign::PsucVsThreshold => "psuc_vs_threshold",
            Campaign::AseVsDensity => "ase_vs_density",
            Campaign::PdfG => "pdf_g",
            Campaign::RayleighQuotientPdf => "rayleigh_quotient_pdf",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn variable(self) -> Variable {
        match self {
            Campaign::PsucVsThreshold => Variable::GammaTh,
            Campaign::AseVsDensity => Variable::Lambda,
            Campaign::PdfG => Variable::X,
            Campaign::RayleighQuotientPdf => Variable::Y,
        }
    }

    fn default_scale(self) -> Scale {
        match self {
            Campaign::PsucVsThreshold => Scale::Db,
            Campaign::AseVsDensity => Scale::Log,
            _ => Scale::Linear,
        }
    }
}

/// A plain sweep produces a CSV; a validation campaign also compares the
/// analytic columns against simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sweep(Campaign),
    Validate(Campaign),
}

impl Mode {
    pub fn campaign(self) -> Campaign {
        match self {
            Mode::Sweep(c) | Mode::Validate(c) => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    GammaTh,
    Lambda,
    X,
    Y,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::GammaTh => "gamma_th",
            Variable::Lambda => "lambda",
            Variable::X => "x",
            Variable::Y => "y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Arithmetic steps in the variable's own unit.
    Linear,
    /// Arithmetic steps in decibels; converted to linear at parse time.
    Db,
    /// Geometric steps; `step` is in decades.
    Log,
}

impl Scale {
    pub fn name(self) -> &'static str {
        match self {
            Scale::Linear => "linear",
            Scale::Db => "db",
            Scale::Log => "log",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Scale::Linear, Scale::Db, Scale::Log].into_iter().find(|v| v.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub variable: Variable,
    pub scale: Scale,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

/// One swept value in the unit shown in the CSV and the linear value fed to
/// the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub display: f64,
    pub linear: f64,
}

impl SweepRange {
    pub fn points(&self) -> Result<Vec<SweepPoint>, String> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err("range bounds must be finite".into());
        }
        if !(self.step > 0.0) {
            return Err("range step must be positive".into());
        }
        if self.stop < self.start {
            return Err("range stop must not be below start".into());
        }
        if self.scale == Scale::Log && !(self.start > 0.0) {
            return Err("log range must start above zero".into());
        }
        let span = match self.scale {
            Scale::Log => (self.stop / self.start).log10(),
            _ => self.stop - self.start,
        };
        let count = (span / self.step * (1.0 + 1e-12) + 1e-9).floor() + 1.0;
        if count > MAX_POINTS as f64 {
            return Err(format!("range has more than {MAX_POINTS} points"));
        }
        Ok((0..count as usize)
            .map(|k| {
                let offset = k as f64 * self.step;
                match self.scale {
                    Scale::Linear => SweepPoint {
                        display: self.start + offset,
                        linear: self.start + offset,
                    },
                    Scale::Db => {
                        let db = self.start + offset;
                        SweepPoint {
                            display: db,
                            linear: db_to_linear(db),
                        }
                    }
                    Scale::Log => {
                        let v = self.start * 10f64.powf(offset);
                        SweepPoint { display: v, linear: v }
                    }
                }
            })
            .collect())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Antenna count and exponential correlation coefficient of one curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant {
    pub n_t: usize,
    pub rho: f64,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nT={},rho={}", self.n_t, self.rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowChoice {
    Fixed(f64),
    /// Sized per variant from the truncation tolerance.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSpec {
    pub trials: usize,
    pub seed: u64,
    pub window: WindowChoice,
    pub truncation_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSettings {
    pub lambda: f64,
    pub alpha: f64,
    pub r00: f64,
    pub noise_over_power: f64,
    pub gamma_th_db: f64,
}

impl Default for NetworkSettings {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            alpha: 3.5,
            r00: 1.0,
            noise_over_power: 1.0,
            gamma_th_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: Mode,
    pub network: NetworkSettings,
    pub range: SweepRange,
    /// Derived from `range`; never edited independently.
    pub points: Vec<SweepPoint>,
    pub variants: Vec<Variant>,
    pub mc: Option<McSpec>,
    pub force_approx: bool,
    pub literal_nt2_weights: bool,
}

impl SweepSpec {
    pub fn campaign(&self) -> Campaign {
        self.mode.campaign()
    }

    /// Network parameters at the fixed threshold; sweeps override the swept field.
    pub fn network_config(&self) -> NetworkConfig {
        NetworkConfig {
            lambda: self.network.lambda,
            alpha: self.network.alpha,
            r00: self.network.r00,
            noise_over_power: self.network.noise_over_power,
            gamma_th: db_to_linear(self.network.gamma_th_db),
        }
    }
}

pub fn parse_config(path: &Path) -> Result<SweepSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| err(None, format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

struct Entries(HashMap<String, Entry>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.get_mut(key).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    fn take_any(&mut self, keys: &[&str]) -> Result<Option<(usize, String)>, ConfigError> {
        let present: Vec<&str> = keys.iter().copied().filter(|k| self.0.contains_key(*k)).collect();
        if present.len() > 1 {
            let line = self.0[present[1]].line;
            return Err(err(Some(line), format!("`{}` conflicts with `{}`", present[1], present[0])));
        }
        Ok(present.first().and_then(|k| self.take(k)))
    }

    fn f64_or(&mut self, keys: &[&str], default: f64) -> Result<(Option<usize>, f64), ConfigError> {
        match self.take_any(keys)? {
            Some((line, v)) => Ok((Some(line), parse_f64(line, keys[0], &v)?)),
            None => Ok((None, default)),
        }
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .map_err(|_| err(Some(line), format!("`{key}` expects a number, got `{v}`")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(err(Some(line), format!("`{key}` expects true or false, got `{v}`"))),
    }
}

const KNOWN_KEYS: &[&str] = &[
    "mode",
    "validate.target",
    "network.lambda",
    "network.alpha",
    "network.r00",
    "network.noise_over_power",
    "network.gamma_th_db",
    "lambda",
    "alpha",
    "r00",
    "noise_over_power",
    "gamma_th_db",
    "sweep.variable",
    "sweep.scale",
    "sweep.start",
    "sweep.stop",
    "sweep.step",
    "variants",
    "rho",
    "n_t",
    "mc.trials",
    "mc.seed",
    "mc.window_radius",
    "mc.truncation_tolerance",
    "analytic.force_approx",
    "analytic.literal_nt2_weights",
];

pub fn parse_config_str(text: &str) -> Result<SweepSpec, ConfigError> {
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(Some(line), format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(err(Some(line), format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(err(Some(line), format!("`{key}` has no value")));
        }
        if let Some(prev) = map.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
                used: false,
            },
        ) {
            return Err(err(Some(line), format!("`{key}` already set on line {}", prev.line)));
        }
    }
    let mut entries = Entries(map);

    let (mode_line, mode_name) = entries.take("mode").ok_or_else(|| err(None, "missing `mode`"))?;
    let target = entries.take("validate.target");
    let mode = match (mode_name.as_str(), target) {
        ("validate", Some((line, t))) => Mode::Validate(
            Campaign::parse(&t).ok_or_else(|| err(Some(line), format!("unknown validation target `{t}`")))?,
        ),
        ("validate", None) => return Err(err(Some(mode_line), "mode `validate` needs `validate.target`")),
        (_, Some((line, _))) => return Err(err(Some(line), "`validate.target` only applies to mode `validate`")),
        (m, None) => Mode::Sweep(Campaign::parse(m).ok_or_else(|| err(Some(mode_line), format!("unknown mode `{m}`")))?),
    };
    let campaign = mode.campaign();

    let defaults = NetworkSettings::default();
    let (lambda_line, lambda) = entries.f64_or(&["network.lambda", "lambda"], defaults.lambda)?;
    let (alpha_line, alpha) = entries.f64_or(&["network.alpha", "alpha"], defaults.alpha)?;
    let (r00_line, r00) = entries.f64_or(&["network.r00", "r00"], defaults.r00)?;
    let (noise_line, noise_over_power) = entries.f64_or(&["network.noise_over_power", "noise_over_power"], defaults.noise_over_power)?;
    let (gamma_line, gamma_th_db) = entries.f64_or(&["network.gamma_th_db", "gamma_th_db"], defaults.gamma_th_db)?;
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(err(alpha_line, format!("pathloss exponent must exceed 2 (got {alpha})")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(err(lambda_line, format!("density must be nonnegative (got {lambda})")));
    }
    if !(r00 > 0.0 && r00.is_finite()) {
        return Err(err(r00_line, format!("serving distance must be positive (got {r00})")));
    }
    if !(noise_over_power >= 0.0 && noise_over_power.is_finite()) {
        return Err(err(noise_line, format!("noise ratio must be nonnegative (got {noise_over_power})")));
    }
    if !gamma_th_db.is_finite() {
        return Err(err(gamma_line, "threshold must be finite"));
    }
    let network = NetworkSettings {
        lambda,
        alpha,
        r00,
        noise_over_power,
        gamma_th_db,
    };

    let variable = match entries.take("sweep.variable") {
        Some((line, v)) => {
            if v != campaign.variable().name() {
                return Err(err(
                    Some(line),
                    format!("mode `{}` sweeps `{}`, not `{v}`", campaign.name(), campaign.variable().name()),
                ));
            }
            campaign.variable()
        }
        None => campaign.variable(),
    };
    let scale = match entries.take("sweep.scale") {
        Some((line, s)) => {
            let scale = Scale::parse(&s).ok_or_else(|| err(Some(line), format!("unknown scale `{s}`")))?;
            if scale == Scale::Db && variable != Variable::GammaTh {
                return Err(err(Some(line), "only thresholds can be swept in dB"));
            }
            scale
        }
        None => campaign.default_scale(),
    };
    let mut bound = |key: &str| -> Result<(usize, f64), ConfigError> {
        let (line, v) = entries.take(key).ok_or_else(|| err(None, format!("missing `{key}`")))?;
        Ok((line, parse_f64(line, key, &v)?))
    };
    let (start_line, start) = bound("sweep.start")?;
    let (_, stop) = bound("sweep.stop")?;
    let (_, step) = bound("sweep.step")?;
    let range = SweepRange {
        variable,
        scale,
        start,
        stop,
        step,
    };
    let points = range
        .points()
        .map_err(|m| err(Some(start_line), format!("malformed range: {m}")))?;
    if variable == Variable::Lambda && points.iter().any(|p| p.linear < 0.0) {
        return Err(err(Some(start_line), "malformed range: density must be nonnegative"));
    }

    let variants = parse_variants(&mut entries)?;

    let mc = parse_mc(&mut entries)?;

    let force_approx = match entries.take("analytic.force_approx") {
        Some((line, v)) => parse_bool(line, "analytic.force_approx", &v)?,
        None => false,
    };
    let literal_nt2_weights = match entries.take("analytic.literal_nt2_weights") {
        Some((line, v)) => parse_bool(line, "analytic.literal_nt2_weights", &v)?,
        None => false,
    };

    if let Some((key, e)) = entries.0.iter().find(|(_, e)| !e.used) {
        return Err(err(Some(e.line), format!("`{key}` is not used by this configuration")));
    }

    Ok(SweepSpec {
        mode,
        network,
        range,
        points,
        variants,
        mc,
        force_approx,
        literal_nt2_weights,
    })
}

fn check_variant(line: usize, n_t: usize, rho: f64) -> Result<Variant, ConfigError> {
    if n_t == 0 {
        return Err(err(Some(line), "antenna count must be at least 1"));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(err(Some(line), format!("correlation must satisfy 0 <= rho < 1 (got {rho})")));
    }
    Ok(Variant { n_t, rho })
}

fn parse_n_t(line: usize, s: &str) -> Result<usize, ConfigError> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| err(Some(line), format!("antenna count must be a positive integer, got `{}`", s.trim())))
}

fn parse_variants(entries: &mut Entries) -> Result<Vec<Variant>, ConfigError> {
    let listed = entries.take("variants");
    let rho = entries.take("rho");
    let n_t = entries.take("n_t");
    match (listed, rho, n_t) {
        (Some((line, _)), Some(_), _) | (Some((line, _)), _, Some(_)) => {
            Err(err(Some(line), "`variants` cannot be combined with `rho`/`n_t`"))
        }
        (Some((line, v)), None, None) => v
            .split(',')
            .map(|item| {
                let (n, r) = item
                    .split_once(':')
                    .ok_or_else(|| err(Some(line), format!("variant `{}` must look like nT:rho", item.trim())))?;
                check_variant(line, parse_n_t(line, n)?, parse_f64(line, "variants", r.trim())?)
            })
            .collect(),
        (None, Some((line, v)), n_t) => {
            let n = match n_t {
                Some((nl, n)) => parse_n_t(nl, &n)?,
                None => 2,
            };
            v.split(',')
                .map(|r| check_variant(line, n, parse_f64(line, "rho", r.trim())?))
                .collect()
        }
        (None, None, Some((line, _))) => Err(err(Some(line), "`n_t` needs `rho`")),
        (None, None, None) => Ok(Vec::new()),
    }
}

fn parse_mc(entries: &mut Entries) -> Result<Option<McSpec>, ConfigError> {
    let trials = entries.take("mc.trials");
    let seed = entries.take("mc.seed");
    let window = entries.take("mc.window_radius");
    let tol = entries.take("mc.truncation_tolerance");
    let Some((trials_line, trials)) = trials else {
        if let Some((line, _)) = seed.or(window).or(tol) {
            return Err(err(Some(line), "simulation settings need `mc.trials`"));
        }
        return Ok(None);
    };
    let trials: usize = trials
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| err(Some(trials_line), format!("`mc.trials` must be a positive integer, got `{trials}`")))?;
    let seed = match seed {
        Some((line, s)) => s
            .parse::<u64>()
            .map_err(|_| err(Some(line), format!("`mc.seed` must be an unsigned 64-bit integer, got `{s}`")))?,
        None => 0,
    };
    let window = match window {
        Some((_, w)) if w == "auto" => WindowChoice::Auto,
        Some((line, w)) => {
            let r = parse_f64(line, "mc.window_radius", &w)?;
            if !(r > 0.0 && r.is_finite()) {
                return Err(err(Some(line), "window radius must be positive"));
            }
            WindowChoice::Fixed(r)
        }
        None => WindowChoice::Fixed(DEFAULT_WINDOW_RADIUS),
    };
    let truncation_tolerance = match tol {
        Some((line, t)) => {
            let t = parse_f64(line, "mc.truncation_tolerance", &t)?;
            if !(t > 0.0 && t.is_finite()) {
                return Err(err(Some(line), "truncation tolerance must be positive"));
            }
            t
        }
        None => DEFAULT_TRUNCATION_TOLERANCE,
    };
    Ok(Some(McSpec {
        trials,
        seed,
        window,
        truncation_tolerance,
    }))
}

/// Canonical text form; `parse_config_str(&write_config(s)) == s`.
pub fn write_config(spec: &SweepSpec) -> String {
    let mut out = String::new();
    match spec.mode {
        Mode::Sweep(c) => writeln!(out, "mode = {}", c.name()).unwrap(),
        Mode::Validate(c) => {
            writeln!(out, "mode = validate").unwrap();
            writeln!(out, "validate.target = {}", c.name()).unwrap();
        }
    }
    let n = &spec.network;
    writeln!(out, "network.lambda = {:?}", n.lambda).unwrap();
    writeln!(out, "network.alpha = {:?}", n.alpha).unwrap();
    writeln!(out, "network.r00 = {:?}", n.r00).unwrap();
    writeln!(out, "network.noise_over_power = {:?}", n.noise_over_power).unwrap();
    writeln!(out, "network.gamma_th_db = {:?}", n.gamma_th_db).unwrap();
    let r = &spec.range;
    writeln!(out, "sweep.variable = {}", r.variable.name()).unwrap();
    writeln!(out, "sweep.scale = {}", r.scale.name()).unwrap();
    writeln!(out, "sweep.start = {:?}", r.start).unwrap();
    writeln!(out, "sweep.stop = {:?}", r.stop).unwrap();
    writeln!(out, "sweep.step = {:?}", r.step).unwrap();
    if !spec.variants.is_empty() {
        let list: Vec<String> = spec.variants.iter().map(|v| format!("{}:{:?}", v.n_t, v.rho)).collect();
        writeln!(out, "variants = {}", list.join(", ")).unwrap();
    }
    if let Some(mc) = &spec.mc {
        writeln!(out, "mc.trials = {}", mc.trials).unwrap();
        writeln!(out, "mc.seed = {}", mc.seed).unwrap();
        match mc.window {
            WindowChoice::Fixed(r) => writeln!(out, "mc.window_radius = {r:?}").unwrap(),
            WindowChoice::Auto => writeln!(out, "mc.window_radius = auto").unwrap(),
        }
        writeln!(out, "mc.truncation_tolerance = {:?}", mc.truncation_tolerance).unwrap();
    }
    writeln!(out, "analytic.force_approx = {}", spec.force_approx).unwrap();
    writeln!(out, "analytic.literal_nt2_weights = {}", spec.literal_nt2_weights).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "mode=psuc_vs_threshold\nsweep.start=-10\nsweep.stop=20\nsweep.step=5\n";

    #[test]
    fn minimal_file_gets_defaults() {
        let spec = parse_config_str(MINIMAL).unwrap();
        assert_eq!(spec.network.alpha, 3.5);
        assert_eq!(spec.network.r00, 1.0);
        assert_eq!(spec.network.noise_over_power, 1.0);
        assert_eq!(spec.range.scale, Scale::Db);
        assert_eq!(spec.points.len(), 7);
        assert_eq!(spec.points[2].display, 0.0);
        assert_eq!(spec.points[2].linear, 1.0);
        assert!((spec.points[6].linear - 100.0).abs() < 1e-12);
        assert!(spec.variants.is_empty());
        assert!(spec.mc.is_none());
    }

    #[test]
    fn alpha_two_rejected() {
        let e = parse_config_str(&format!("{MINIMAL}alpha=2.0\n")).unwrap_err();
        assert_eq!(e.line, Some(5));
        assert!(e.message.contains("pathloss exponent must exceed 2"), "{e}");
    }

    #[test]
    fn rho_one_rejected() {
        let e = parse_config_str(&format!("{MINIMAL}rho=1.0\n")).unwrap_err();
        assert_eq!(e.line, Some(5));
        assert!(e.message.contains("rho < 1"), "{e}");
        assert!(parse_config_str(&format!("{MINIMAL}variants = 2:0.5, 3:1.0\n")).is_err());
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let e = parse_config_str("mode = pdf_g\n# comment\nbogus = 1\n").unwrap_err();
        assert_eq!(e.to_string(), "line 3: unknown key `bogus`");
        let e = parse_config_str("mode = pdf_g\nsweep.start = 0\nsweep.stop = -1\nsweep.step = 0.1\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.starts_with("malformed range"));
        let e = parse_config_str("mode = pdf_g\nsweep.start = 0\nsweep.start = 1\n").unwrap_err();
        assert!(e.message.contains("already set on line 2"));
        let e = parse_config_str("mode = pdf_g\nno equals sign\n").unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn shorthand_variants() {
        let spec = parse_config_str(&format!("{MINIMAL}rho = 0.01, 0.7\nn_t = 5\n")).unwrap();
        assert_eq!(
            spec.variants,
            vec![Variant { n_t: 5, rho: 0.01 }, Variant { n_t: 5, rho: 0.7 }]
        );
    }

    #[test]
    fn log_density_range() {
        let text = "mode = ase_vs_density\ngamma_th_db = 3\nsweep.start = 1e-6\nsweep.stop = 1e-2\nsweep.step = 0.5\n";
        let spec = parse_config_str(text).unwrap();
        assert_eq!(spec.points.len(), 9);
        assert!((spec.points[8].linear - 1e-2).abs() < 1e-15);
        assert!((spec.network_config().gamma_th - 10f64.powf(0.3)).abs() < 1e-15);
    }

    #[test]
    fn db_scale_only_for_thresholds() {
        let text = "mode = pdf_g\nsweep.scale = db\nsweep.start = 0\nsweep.stop = 1\nsweep.step = 0.1\n";
        assert!(parse_config_str(text).is_err());
    }

    #[test]
    fn validate_mode_needs_target() {
        assert!(parse_config_str("mode = validate\nsweep.start=0\nsweep.stop=1\nsweep.step=1\n").is_err());
        let spec = parse_config_str("mode = validate\nvalidate.target = pdf_g\nsweep.start=0\nsweep.stop=1\nsweep.step=1\n").unwrap();
        assert_eq!(spec.mode, Mode::Validate(Campaign::PdfG));
    }

    #[test]
    fn mc_keys_need_trials() {
        assert!(parse_config_str(&format!("{MINIMAL}mc.seed = 3\n")).is_err());
        let spec = parse_config_str(&format!("{MINIMAL}mc.trials = 10\nmc.window_radius = auto\n")).unwrap();
        assert_eq!(spec.mc.unwrap().window, WindowChoice::Auto);
    }

    #[test]
    fn written_form_round_trips() {
        let text = "mode = validate\nvalidate.target = psuc_vs_threshold\nlambda = 1e-4\nsweep.start = -10\nsweep.stop = 20\nsweep.step = 2.5\nvariants = 2:0.01, 5:0.95\nmc.trials = 1000\nmc.seed = 18446744073709551615\nanalytic.literal_nt2_weights = true\n";
        let spec = parse_config_str(text).unwrap();
        assert_eq!(parse_config_str(&write_config(&spec)).unwrap(), spec);
    }
}
