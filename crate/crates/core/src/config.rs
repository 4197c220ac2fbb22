//! Flat TOML run configuration with unit-suffixed keys.
//!
//! ```toml
//! model = "two_level"
//! gamma_MHz = 1.0
//! omega_MHz = 60.0
//! z_max_cm = 10
//! scan_param = "detuning"
//! scan_min_MHz = -100
//! scan_max_MHz = 100
//! scan_points = 41
//! outputs = ["fisher", "statistics"]
//! fisher_param = "density"
//! ```
//!
//! Unset physical keys fall back to the Fig. 2 (two-level) or Fig. 5
//! (four-level) parameter sets. Every problem is reported with the line
//! of the offending key.

use crate::error::{Error, Result};
use crate::flow::DEFAULT_STEPS;
use crate::models::{Model, ParamTag};
use crate::sensing::WEAK_DISSIPATION_LIMIT;
use crate::types::{FourLevelParams, TwoLevelParams};
use crate::units::{photon_budget, Unit};
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use toml::{Spanned, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// 1-based line of the offending key, if known.
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.line {
            Some(l) => write!(f, "{sev}: line {l}: ")?,
            None => write!(f, "{sev}: ")?,
        }
        if let Some(k) = &self.key {
            write!(f, "{k}: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    Trajectory,
    Statistics,
    Fisher,
    Aptitudes,
}

impl Output {
    pub fn name(self) -> &'static str {
        match self {
            Output::Trajectory => "trajectory",
            Output::Statistics => "statistics",
            Output::Fisher => "fisher",
            Output::Aptitudes => "aptitudes",
        }
    }
}

impl FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "trajectory" => Ok(Output::Trajectory),
            "statistics" => Ok(Output::Statistics),
            "fisher" => Ok(Output::Fisher),
            "aptitudes" => Ok(Output::Aptitudes),
            other => Err(format!("unknown output '{other}' (trajectory, statistics, fisher, aptitudes)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub param: ParamTag,
    /// Internal units.
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Config(format!("scan needs at least 2 points, got {}", self.points)));
        }
        if !(self.min < self.max) {
            return Err(Error::Config(format!("scan min {} must be below max {}", self.min, self.max)));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0) {
            return Err(Error::Config("log grids need a positive minimum".into()));
        }
        Ok(())
    }

    /// Grid values; the endpoints are exact.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + t * (self.max / self.min).ln()).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    WeakDissipation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub scan: ScanSpec,
    pub outputs: Vec<Output>,
    pub fisher_param: ParamTag,
    pub benchmark: Option<Benchmark>,
    pub steps: usize,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Frequency,
    Length,
    Area,
    Power,
    Time,
    Density,
}

fn unit_dim(u: Unit) -> Dim {
    match u {
        Unit::MHz | Unit::RadPerSecond => Dim::Frequency,
        Unit::Centimeter | Unit::Meter => Dim::Length,
        Unit::SquareCentimeter | Unit::SquareMeter => Dim::Area,
        Unit::Milliwatt | Unit::Watt => Dim::Power,
        Unit::Second => Dim::Time,
        Unit::PerCubicMeter | Unit::PerCubicCentimeter => Dim::Density,
    }
}

fn param_dim(tag: ParamTag) -> Dim {
    match tag {
        ParamTag::Density => Dim::Density,
        _ => Dim::Frequency,
    }
}

/// Physical keys with their dimension. Which model accepts which key is
/// checked separately.
const PHYSICAL: &[(&str, Dim)] = &[
    ("detuning", Dim::Frequency),
    ("gamma", Dim::Frequency),
    ("omega", Dim::Frequency),
    ("probe_detuning", Dim::Frequency),
    ("omega_p", Dim::Frequency),
    ("omega_c", Dim::Frequency),
    ("omega_s", Dim::Frequency),
    ("gamma_b", Dim::Frequency),
    ("gamma_c", Dim::Frequency),
    ("gamma_d", Dim::Frequency),
    ("density", Dim::Density),
    ("area", Dim::Area),
    ("t_m", Dim::Time),
    ("z_max", Dim::Length),
    ("power", Dim::Power),
    ("wavelength", Dim::Length),
    ("scan_min", Dim::Frequency),
    ("scan_max", Dim::Frequency),
];

const TWO_LEVEL_ONLY: &[&str] = &["detuning", "gamma", "omega"];
const FOUR_LEVEL_ONLY: &[&str] = &["probe_detuning", "omega_p", "omega_c", "omega_s", "gamma_b", "gamma_c", "gamma_d"];
const PLAIN: &[&str] = &[
    "model",
    "scan_param",
    "scan_points",
    "scan_spacing",
    "outputs",
    "fisher_param",
    "benchmark",
    "steps",
    "output_dir",
];

/// Split `gamma_MHz` into (`gamma`, MHz).
fn split_unit(key: &str) -> Option<(&str, Unit)> {
    Unit::ALL
        .iter()
        .filter_map(|u| key.strip_suffix(u.tag()).and_then(|b| b.strip_suffix('_')).map(|b| (b, *u)))
        .max_by_key(|(_, u)| u.tag().len())
}

struct Entry {
    line: usize,
    value: Value,
    unit: Option<Unit>,
}

struct Parser {
    entries: BTreeMap<String, Entry>,
    diags: Vec<Diagnostic>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

impl Parser {
    fn error(&mut self, key: &str, msg: impl Into<String>) {
        let line = self.entries.get(key).map(|e| e.line);
        self.diags.push(Diagnostic {
            severity: Severity::Error,
            line,
            key: Some(key.to_string()),
            message: msg.into(),
        });
    }

    fn warn(&mut self, key: &str, msg: impl Into<String>) {
        let line = self.entries.get(key).map(|e| e.line);
        self.diags.push(Diagnostic {
            severity: Severity::Warning,
            line,
            key: Some(key.to_string()),
            message: msg.into(),
        });
    }

    fn string(&mut self, base: &str) -> Option<String> {
        let v = self.entries.get(base)?.value.clone();
        match v {
            Value::String(s) => Some(s),
            _ => {
                self.error(base, "expected a string");
                None
            }
        }
    }

    fn integer(&mut self, base: &str) -> Option<i64> {
        let v = self.entries.get(base)?.value.clone();
        match v {
            Value::Integer(i) => Some(i),
            _ => {
                self.error(base, "expected an integer");
                None
            }
        }
    }

    /// Physical value in internal units, if present.
    fn quantity(&mut self, base: &str) -> Option<f64> {
        let e = self.entries.get(base)?;
        let (v, unit) = (e.value.clone(), e.unit);
        let x = match v {
            Value::Float(f) => f,
            Value::Integer(i) => i as f64,
            _ => {
                self.error(base, "expected a number");
                return None;
            }
        };
        if !x.is_finite() {
            self.error(base, "value must be finite");
            return None;
        }
        Some(unit.map_or(x, |u| x * u.factor()))
    }

    fn non_negative(&mut self, base: &str) -> Option<f64> {
        let v = self.quantity(base)?;
        if v < 0.0 {
            self.error(base, format!("must be >= 0, got {v:e} in internal units"));
            return None;
        }
        Some(v)
    }

    fn positive(&mut self, base: &str) -> Option<f64> {
        let v = self.quantity(base)?;
        if !(v > 0.0) {
            self.error(base, format!("must be positive, got {v:e} in internal units"));
            return None;
        }
        Some(v)
    }

    fn param_tag(&mut self, base: &str) -> Option<ParamTag> {
        let s = self.string(base)?;
        match s.parse::<ParamTag>() {
            Ok(t) => Some(t),
            Err(e) => {
                self.error(base, e.to_string());
                None
            }
        }
    }
}

fn read_entries(text: &str) -> std::result::Result<Parser, Diagnostic> {
    let table: BTreeMap<Spanned<String>, Spanned<Value>> = toml::from_str(text).map_err(|e| Diagnostic {
        severity: Severity::Error,
        line: e.span().map(|s| line_of(text, s.start)),
        key: None,
        message: e.message().to_string(),
    })?;
    let mut p = Parser {
        entries: BTreeMap::new(),
        diags: Vec::new(),
    };
    let mut sorted: Vec<_> = table.into_iter().collect();
    sorted.sort_by_key(|(k, _)| k.span().start);
    for (key, value) in sorted {
        let line = line_of(text, key.span().start);
        let raw = key.into_inner();
        let value = value.into_inner();
        let bad = |msg: String| Diagnostic {
            severity: Severity::Error,
            line: Some(line),
            key: Some(raw.clone()),
            message: msg,
        };
        if matches!(value, Value::Table(_)) {
            p.diags.push(bad("tables are not supported; the document is flat".into()));
            continue;
        }
        let (base, unit) = if PLAIN.contains(&raw.as_str()) {
            (raw.clone(), None)
        } else if let Some((base, unit)) = split_unit(&raw) {
            match PHYSICAL.iter().find(|(k, _)| *k == base) {
                Some((_, dim)) if *dim == unit_dim(unit) || base.starts_with("scan_") => (base.to_string(), Some(unit)),
                Some(_) => {
                    p.diags.push(bad(format!("unit '{}' has the wrong dimension for {base}", unit.tag())));
                    continue;
                }
                None => {
                    p.diags.push(bad("unknown key".into()));
                    continue;
                }
            }
        } else if PHYSICAL.iter().any(|(k, _)| *k == raw) {
            p.diags.push(bad("physical keys need a unit suffix, e.g. gamma_MHz".into()));
            continue;
        } else {
            p.diags.push(bad("unknown key".into()));
            continue;
        };
        if p.entries.contains_key(&base) {
            p.diags.push(bad(format!("{base} given twice with different units")));
            continue;
        }
        p.entries.insert(base, Entry { line, value, unit });
    }
    Ok(p)
}

fn build_two_level(p: &mut Parser) -> TwoLevelParams {
    let mut m = TwoLevelParams::fig2();
    if let Some(v) = p.quantity("detuning") {
        m.detuning = v;
    }
    if let Some(v) = p.non_negative("gamma") {
        m.gamma = v;
    }
    if let Some(v) = p.non_negative("omega") {
        m.omega_ref = v;
    }
    m
}

fn build_four_level(p: &mut Parser) -> FourLevelParams {
    let mut m = FourLevelParams::fig5();
    if let Some(v) = p.quantity("probe_detuning") {
        m = m.with_probe_detuning(v);
    }
    let mut set = |key: &str, slot: &mut f64| {
        if let Some(v) = p.non_negative(key) {
            *slot = v;
        }
    };
    set("omega_p", &mut m.omega_p_ref);
    set("omega_c", &mut m.omega_c);
    set("omega_s", &mut m.omega_s);
    set("gamma_b", &mut m.gamma_b);
    set("gamma_c", &mut m.gamma_c);
    set("gamma_d", &mut m.gamma_d);
    m
}

/// Parse and check a config document. Returns the config when no error
/// diagnostics were raised, and every diagnostic either way.
pub fn parse_config(text: &str) -> (Option<RunConfig>, Vec<Diagnostic>) {
    let mut p = match read_entries(text) {
        Ok(p) => p,
        Err(d) => return (None, vec![d]),
    };

    let model_name = p.string("model");
    if model_name.is_none() && !p.entries.contains_key("model") {
        p.diags.push(Diagnostic {
            severity: Severity::Error,
            line: None,
            key: Some("model".into()),
            message: "missing (two_level or four_level)".into(),
        });
    }
    let four = match model_name.as_deref() {
        Some("two_level") => Some(false),
        Some("four_level") => Some(true),
        Some(other) => {
            p.error("model", format!("unknown model '{other}' (two_level or four_level)"));
            None
        }
        None => None,
    };
    if let Some(four) = four {
        let foreign = if four { TWO_LEVEL_ONLY } else { FOUR_LEVEL_ONLY };
        for key in foreign {
            if p.entries.contains_key(*key) {
                p.error(key, format!("not a {} parameter", if four { "four-level" } else { "two-level" }));
            }
        }
    }

    let mut model = match four {
        Some(true) => Some(Model::from(build_four_level(&mut p))),
        Some(false) => Some(Model::from(build_two_level(&mut p))),
        None => None,
    };
    if let Some(m) = model.as_mut() {
        let e = m.ensemble_mut();
        if let Some(v) = p.positive("density") {
            e.density = v;
        }
        if let Some(v) = p.positive("area") {
            e.area = v;
        }
        if let Some(v) = p.positive("t_m") {
            e.t_m = v;
        }
        if let Some(v) = p.positive("z_max") {
            e.z_max = v;
        }
        let t_m = e.t_m;
        let power = p.positive("power");
        let wavelength = p.positive("wavelength");
        match (power, wavelength) {
            (Some(pw), Some(wl)) => {
                let n = photon_budget(pw, t_m, wl);
                match m {
                    Model::TwoLevel(q) => q.n_ref = n,
                    Model::FourLevel(q) => q.n_ref = n,
                }
            }
            (None, None) => {}
            _ => {
                let key = if power.is_some() { "power" } else { "wavelength" };
                if p.entries.contains_key("power") != p.entries.contains_key("wavelength") {
                    p.error(key, "power and wavelength must be given together");
                }
            }
        }
        if let Err(e) = m.validate() {
            p.diags.push(Diagnostic {
                severity: Severity::Error,
                line: None,
                key: None,
                message: e.to_string(),
            });
        }
    }

    // Scan specification.
    let scan_param = p.param_tag("scan_param");
    if !p.entries.contains_key("scan_param") {
        p.diags.push(Diagnostic {
            severity: Severity::Error,
            line: None,
            key: Some("scan_param".into()),
            message: "missing".into(),
        });
    }
    if let (Some(tag), Some(Model::TwoLevel(_))) = (scan_param, &model) {
        if tag == ParamTag::OmegaS {
            p.error("scan_param", "omega_s is a four-level parameter");
        }
    }
    for key in ["scan_min", "scan_max"] {
        match (p.entries.get(key).map(|e| e.unit), scan_param) {
            (None, _) => p.diags.push(Diagnostic {
                severity: Severity::Error,
                line: None,
                key: Some(key.into()),
                message: "missing (with a unit suffix, e.g. scan_min_MHz)".into(),
            }),
            (Some(Some(u)), Some(tag)) if unit_dim(u) != param_dim(tag) => {
                p.error(key, format!("unit '{}' does not match scan parameter {tag}", u.tag()));
            }
            (Some(None), _) => p.error(key, "needs a unit suffix"),
            _ => {}
        }
    }
    let scan_min = p.quantity("scan_min");
    let scan_max = p.quantity("scan_max");
    let points = match p.integer("scan_points") {
        Some(n) if n >= 0 => Some(n as usize),
        Some(n) => {
            p.error("scan_points", format!("must be >= 2, got {n}"));
            None
        }
        None => {
            if !p.entries.contains_key("scan_points") {
                p.diags.push(Diagnostic {
                    severity: Severity::Error,
                    line: None,
                    key: Some("scan_points".into()),
                    message: "missing".into(),
                });
            }
            None
        }
    };
    let spacing = match p.string("scan_spacing").as_deref() {
        None | Some("linear") => Spacing::Linear,
        Some("log") => Spacing::Log,
        Some(other) => {
            p.error("scan_spacing", format!("unknown spacing '{other}' (linear or log)"));
            Spacing::Linear
        }
    };
    let scan = match (scan_param, scan_min, scan_max, points) {
        (Some(param), Some(min), Some(max), Some(points)) => {
            let s = ScanSpec {
                param,
                min,
                max,
                points,
                spacing,
            };
            match s.validate() {
                Ok(()) => Some(s),
                Err(e) => {
                    let key = if points < 2 { "scan_points" } else { "scan_min" };
                    p.error(key, e.to_string().trim_start_matches("configuration error: ").to_string());
                    None
                }
            }
        }
        _ => None,
    };

    let mut outputs = Vec::new();
    match p.entries.get("outputs").map(|e| e.value.clone()) {
        Some(Value::Array(items)) => {
            for item in items {
                match item.as_str().map(str::parse::<Output>) {
                    Some(Ok(o)) if !outputs.contains(&o) => outputs.push(o),
                    Some(Ok(_)) => {}
                    Some(Err(e)) => p.error("outputs", e),
                    None => p.error("outputs", "expected a list of strings"),
                }
            }
        }
        Some(Value::String(s)) => match s.parse::<Output>() {
            Ok(o) => outputs.push(o),
            Err(e) => p.error("outputs", e),
        },
        Some(_) => p.error("outputs", "expected a list of strings"),
        None => outputs.push(Output::Fisher),
    }

    let fisher_param = p.param_tag("fisher_param").unwrap_or(ParamTag::Density);
    if let (ParamTag::OmegaS, Some(Model::TwoLevel(_))) = (fisher_param, &model) {
        p.error("fisher_param", "omega_s is a four-level parameter");
    }

    let benchmark = match p.string("benchmark").as_deref() {
        None | Some("none") => None,
        Some("weak_dissipation") => Some(Benchmark::WeakDissipation),
        Some(other) => {
            p.error("benchmark", format!("unknown benchmark '{other}' (weak_dissipation)"));
            None
        }
    };
    if benchmark.is_some() {
        match &model {
            Some(Model::TwoLevel(q)) => {
                let ratio = q.gamma / q.omega_ref;
                if ratio > WEAK_DISSIPATION_LIMIT {
                    let key = if p.entries.contains_key("gamma") { "gamma" } else { "benchmark" };
                    p.warn(
                        key,
                        format!("gamma/omega = {ratio:.3} exceeds {WEAK_DISSIPATION_LIMIT}; closed forms assume weak dissipation"),
                    );
                }
                if scan.is_some_and(|s| s.param == ParamTag::Gamma && s.max / q.omega_ref > WEAK_DISSIPATION_LIMIT) {
                    p.warn("scan_max", "scan reaches gamma/omega above the weak-dissipation threshold");
                }
            }
            Some(Model::FourLevel(_)) => p.error("benchmark", "weak_dissipation applies to the two-level model only"),
            None => {}
        }
    }

    let steps = match p.integer("steps") {
        Some(n) if n >= 1 => n as usize,
        Some(n) => {
            p.error("steps", format!("must be >= 1, got {n}"));
            DEFAULT_STEPS
        }
        None => DEFAULT_STEPS,
    };
    let output_dir = p.string("output_dir").map(PathBuf::from);

    let failed = p.diags.iter().any(Diagnostic::is_error);
    let mut diags = p.diags;
    diags.sort_by_key(|d| (d.line.unwrap_or(0), d.severity == Severity::Warning));
    let config = match (failed, model, scan) {
        (false, Some(model), Some(scan)) => Some(RunConfig {
            model,
            scan,
            outputs,
            fisher_param,
            benchmark,
            steps,
            output_dir,
        }),
        _ => None,
    };
    (config, diags)
}

/// Diagnostics only.
pub fn validate(text: &str) -> Vec<Diagnostic> {
    parse_config(text).1
}

/// Parsed config, or a config error listing every error diagnostic.
pub fn load(text: &str) -> Result<(RunConfig, Vec<Diagnostic>)> {
    match parse_config(text) {
        (Some(c), d) => Ok((c, d)),
        (None, d) => {
            let msg: Vec<String> = d.iter().filter(|x| x.is_error()).map(|x| x.to_string()).collect();
            Err(Error::Config(msg.join("\n")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::MHZ;

    const BASE: &str = r#"
model = "two_level"
gamma_MHz = 1.0
scan_param = "detuning"
scan_min_MHz = -100
scan_max_MHz = 100
scan_points = 5
"#;

    #[test]
    fn minimal_two_level() {
        let (c, d) = parse_config(BASE);
        assert!(d.is_empty(), "{d:?}");
        let c = c.unwrap();
        assert_eq!(c.scan.grid(), vec![-100.0 * MHZ, -50.0 * MHZ, 0.0, 50.0 * MHZ, 100.0 * MHZ]);
        assert_eq!(c.outputs, vec![Output::Fisher]);
        assert_eq!(c.model.param(ParamTag::Gamma), MHZ);
    }

    #[test]
    fn negative_gamma_is_one_error_on_its_line() {
        let text = BASE.replace("gamma_MHz = 1.0", "gamma_MHz = -1");
        let d = validate(&text);
        assert_eq!(d.len(), 1, "{d:?}");
        assert!(d[0].is_error());
        assert_eq!(d[0].line, Some(3));
    }

    #[test]
    fn weak_dissipation_warning() {
        let text = BASE.replace("gamma_MHz = 1.0", "gamma_MHz = 30.0") + "benchmark = \"weak_dissipation\"\n";
        let (c, d) = parse_config(&text);
        assert!(c.is_some());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].severity, Severity::Warning);
    }

    #[test]
    fn schema_errors() {
        for (from, to) in [
            ("scan_points = 5", "scan_points = 0"),
            ("scan_points = 5", "scan_points = 1"),
            ("scan_max_MHz = 100", "scan_max_MHz = -200"),
            ("gamma_MHz", "gamma_cm"),
            ("gamma_MHz", "gamma"),
            ("gamma_MHz", "gama_MHz"),
            ("two_level", "three_level"),
            ("scan_min_MHz", "scan_min_per_m3"),
        ] {
            let d = validate(&BASE.replace(from, to));
            assert!(d.iter().any(|x| x.is_error() && x.line.is_some()), "{to}: {d:?}");
        }
        let broken = validate("model = \n");
        assert_eq!(broken[0].line, Some(1));
    }

    #[test]
    fn log_grid_endpoints() {
        let s = ScanSpec {
            param: ParamTag::Gamma,
            min: 1e4,
            max: 1e7,
            points: 4,
            spacing: Spacing::Log,
        };
        let g = s.grid();
        assert_eq!(g[0], 1e4);
        assert_eq!(g[3], 1e7);
        assert!((g[1] / 1e5 - 1.0).abs() < 1e-12);
    }
}
