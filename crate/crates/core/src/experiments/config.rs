use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::Site;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Locality,
    Profile,
    Phase,
    Correlations,
    Subsystems,
}

impl Kind {
    pub const ALL: [Kind; 5] =
        [Kind::Locality, Kind::Profile, Kind::Phase, Kind::Correlations, Kind::Subsystems];

    pub fn name(&self) -> &'static str {
        match self {
            Kind::Locality => "locality",
            Kind::Profile => "profile",
            Kind::Phase => "phase",
            Kind::Correlations => "correlations",
            Kind::Subsystems => "subsystems",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind `{s}`")))
    }
}

/// Block of sites `C`, anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Line,
    Square,
    Cube,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Line, Shape::Square, Shape::Cube];

    pub fn extent(&self) -> [i64; 3] {
        match self {
            Shape::Line => [2, 1, 1],
            Shape::Square => [2, 2, 1],
            Shape::Cube => [2, 2, 2],
        }
    }

    pub fn volume(&self) -> usize {
        self.extent().iter().product::<i64>() as usize
    }

    /// Relative coordinates in lexicographic order.
    pub fn sites(&self) -> Vec<Site> {
        let [a, b, c] = self.extent();
        let mut out = Vec::with_capacity(self.volume());
        for x in 0..a {
            for y in 0..b {
                for z in 0..c {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.extent();
        write!(f, "{a}x{b}x{c}")
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Shape::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown shape `{s}` (use 2x1x1, 2x2x1 or 2x2x2)")))
    }
}

/// Inclusive range `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Span {
    pub fn new(lo: f64, hi: f64, step: f64) -> Self {
        Self { lo, hi, step }
    }

    pub fn points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|k| round10(self.lo + k as f64 * self.step)).collect()
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

impl FromStr for Span {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("expected lo:hi:step, got `{s}`")));
        }
        Ok(Span::new(number(parts[0])?, number(parts[1])?, number(parts[2])?))
    }
}

fn round10(x: f64) -> f64 {
    (x * 1e10).round() / 1e10
}

/// Temperatures to visit: a list or a range, plus an optional finer range.
#[derive(Debug, Clone, PartialEq)]
pub enum TemperatureGrid {
    List(Vec<f64>),
    Range { base: Span, refine: Option<Span> },
}

impl TemperatureGrid {
    /// Uniform `0.1` steps on `[0.3, 8]`, `0.02` steps on `[5.0, 6.2]`.
    pub fn refined_default() -> Self {
        TemperatureGrid::Range {
            base: Span::new(0.3, 8.0, 0.1),
            refine: Some(Span::new(5.0, 6.2, 0.02)),
        }
    }

    /// Sorted distinct temperatures.
    pub fn points(&self) -> Vec<f64> {
        let mut t = match self {
            TemperatureGrid::List(v) => v.clone(),
            TemperatureGrid::Range { base, refine } => {
                let mut t = base.points();
                if let Some(r) = refine {
                    t.extend(r.points());
                }
                t
            }
        };
        t.sort_by(f64::total_cmp);
        t.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        t
    }
}

/// Which reference sizes `L_BC` to use for each `L₀`.
#[derive(Debug, Clone, PartialEq)]
pub enum LbcRule {
    /// Every even size from `min` up to `L₀`.
    From(usize),
    List(Vec<usize>),
    /// `L_BC = L₀` only.
    Same,
}

impl LbcRule {
    pub fn sizes(&self, l0: usize) -> Vec<usize> {
        match self {
            LbcRule::From(min) => (*min..=l0).step_by(2).collect(),
            LbcRule::List(v) => v.clone(),
            LbcRule::Same => vec![l0],
        }
    }
}

impl fmt::Display for LbcRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LbcRule::From(min) => write!(f, "{min}.."),
            LbcRule::List(v) => f.write_str(&join(v)),
            LbcRule::Same => f.write_str("L0"),
        }
    }
}

impl FromStr for LbcRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "L0" {
            Ok(LbcRule::Same)
        } else if let Some(min) = s.strip_suffix("..") {
            Ok(LbcRule::From(integer(min)?))
        } else {
            Ok(LbcRule::List(list(s, integer)?))
        }
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config(format!("`{s}` is not a finite number")))
}

fn integer(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Config(format!("`{s}` is not a nonnegative integer")))
}

fn boolean(s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{s}` is not a boolean"))),
    }
}

fn list<T>(s: &str, item: fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let v = s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(item).collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(Error::Config("empty list".into()));
    }
    Ok(v)
}

/// Every knob of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    /// System sizes `L₀` (plain lattice sizes `L` for the phase scan).
    pub l0: Vec<usize>,
    pub lbc: LbcRule,
    pub lc: usize,
    pub shapes: Vec<Shape>,
    pub density: f64,
    /// Reuse `μ(β, L₀)` for the reference system instead of re-solving.
    pub reuse_mu: bool,
    pub temperatures: TemperatureGrid,
    /// Boundary between the power-law and exponential regimes.
    pub tc: f64,
    /// Upper end of the temperature window for the linear laws.
    pub law_tmax: f64,
    /// Lower end of the `γ_F` window.
    pub gamma_tmin: f64,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub output: PathBuf,
}

/// `(section, key)` pairs accepted in a configuration file.
pub const KEYS: [(&str, &str); 14] = [
    ("experiment", "kind"),
    ("lattice", "L0"),
    ("lattice", "LBC"),
    ("lattice", "LC"),
    ("lattice", "shape"),
    ("lattice", "n"),
    ("lattice", "reuse_mu"),
    ("temperature", "T"),
    ("temperature", "T_refine"),
    ("analysis", "Tc"),
    ("analysis", "law_Tmax"),
    ("analysis", "gamma_Tmin"),
    ("run", "threads"),
    ("run", "output"),
];

impl ExperimentConfig {
    pub fn defaults(kind: Kind) -> Self {
        let base = Self {
            kind,
            l0: vec![100],
            lbc: LbcRule::From(6),
            lc: 2,
            shapes: vec![Shape::Cube],
            density: 1.0,
            reuse_mu: false,
            temperatures: TemperatureGrid::refined_default(),
            tc: 5.6,
            law_tmax: 7.0,
            gamma_tmin: 6.2,
            threads: 0,
            output: PathBuf::from("out"),
        };
        match kind {
            Kind::Locality => Self {
                temperatures: TemperatureGrid::List(vec![0.6, 2.6, 4.6, 5.6, 6.0, 7.0]),
                ..base
            },
            Kind::Profile => Self { lbc: LbcRule::List(vec![8, 12, 16, 20, 24]), ..base },
            Kind::Phase => Self {
                l0: vec![100, 200, 250, 300, 350],
                lbc: LbcRule::Same,
                temperatures: TemperatureGrid::Range {
                    base: Span::new(4.0, 7.0, 0.1),
                    refine: Some(Span::new(5.3, 6.0, 0.01)),
                },
                ..base
            },
            Kind::Correlations => {
                Self { l0: vec![80, 100, 300], lbc: LbcRule::Same, ..base }
            }
            Kind::Subsystems => Self {
                lbc: LbcRule::List(vec![20]),
                shapes: Shape::ALL.to_vec(),
                ..base
            },
        }
    }

    pub fn betas(&self) -> Vec<(f64, f64)> {
        self.temperatures.points().into_iter().map(|t| (t, 1.0 / t)).collect()
    }

    /// The single shape used by locality-type runs.
    pub fn shape(&self) -> Shape {
        self.shapes[0]
    }

    /// Sets one key; `key` may carry its section as `section.key`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let name = match key.split_once('.') {
            Some((section, name)) => {
                if !KEYS.contains(&(section, name)) {
                    return Err(Error::Config(format!("unknown key `{key}`")));
                }
                name
            }
            None => key,
        };
        let value = value.trim();
        match name {
            "kind" => {
                let kind: Kind = value.parse()?;
                if kind != self.kind {
                    return Err(Error::Config(format!(
                        "configuration is for `{kind}` but the command runs `{}`",
                        self.kind
                    )));
                }
            }
            "L0" => self.l0 = list(value, integer)?,
            "LBC" => self.lbc = value.parse()?,
            "LC" => self.lc = integer(value)?,
            "shape" => self.shapes = list(value, |s| s.parse())?,
            "n" => self.density = number(value)?,
            "reuse_mu" => self.reuse_mu = boolean(value)?,
            "T" => {
                self.temperatures = if value.contains(':') {
                    let refine = match &self.temperatures {
                        TemperatureGrid::Range { refine, .. } => *refine,
                        TemperatureGrid::List(_) => None,
                    };
                    TemperatureGrid::Range { base: value.parse()?, refine }
                } else {
                    TemperatureGrid::List(list(value, number)?)
                }
            }
            "T_refine" => {
                let refine = if value == "none" { None } else { Some(value.parse()?) };
                match &mut self.temperatures {
                    TemperatureGrid::Range { refine: r, .. } => *r = refine,
                    TemperatureGrid::List(_) if refine.is_none() => {}
                    TemperatureGrid::List(_) => {
                        return Err(Error::Config(
                            "T_refine needs T given as a lo:hi:step range".into(),
                        ))
                    }
                }
            }
            "Tc" => self.tc = number(value)?,
            "law_Tmax" => self.law_tmax = number(value)?,
            "gamma_Tmin" => self.gamma_tmin = number(value)?,
            "threads" => self.threads = integer(value)?,
            "output" => self.output = PathBuf::from(value),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Checks the size and temperature constraints.
    pub fn validate(&self) -> Result<()> {
        let even = |what: &str, l: usize| -> Result<()> {
            if l < 2 || !l.is_multiple_of(2) {
                Err(Error::Config(format!("{what} = {l} must be even and at least 2")))
            } else {
                Ok(())
            }
        };
        if self.l0.is_empty() {
            return Err(Error::Config("L0 list is empty".into()));
        }
        even("LC", self.lc)?;
        for &l0 in &self.l0 {
            even("L0", l0)?;
            if self.kind == Kind::Phase || self.kind == Kind::Correlations {
                continue;
            }
            for lbc in self.lbc.sizes(l0) {
                even("LBC", lbc)?;
                if lbc > l0 {
                    return Err(Error::Config(format!("LBC = {lbc} exceeds L0 = {l0}")));
                }
                if lbc < self.lc {
                    return Err(Error::Config(format!("LBC = {lbc} is below LC = {}", self.lc)));
                }
            }
            if self.lbc.sizes(l0).is_empty() {
                return Err(Error::Config(format!("no LBC values for L0 = {l0}")));
            }
        }
        if self.lc != 2 {
            return Err(Error::Config(format!(
                "LC = {} is not supported; subsystem shapes have side 2",
                self.lc
            )));
        }
        if self.kind == Kind::Phase && self.l0.len() < 2 {
            return Err(Error::Config("the phase scan needs at least two sizes in L0".into()));
        }
        if self.shapes.is_empty() {
            return Err(Error::Config("no subsystem shape given".into()));
        }
        if self.kind != Kind::Subsystems && self.shapes.len() != 1 {
            return Err(Error::Config(format!("{} takes a single shape", self.kind)));
        }
        if !(self.density > 0.0) {
            return Err(Error::Config(format!("density n = {} must be positive", self.density)));
        }
        let temps = self.temperatures.points();
        if temps.is_empty() {
            return Err(Error::Config("temperature grid is empty".into()));
        }
        for span in match &self.temperatures {
            TemperatureGrid::Range { base, refine } => std::iter::once(base).chain(refine).collect(),
            TemperatureGrid::List(_) => Vec::new(),
        } {
            if !(span.step > 0.0) || span.hi < span.lo {
                return Err(Error::Config(format!("bad temperature range {span}")));
            }
        }
        if let Some(t) = temps.iter().find(|t| !(**t > 0.0)) {
            return Err(Error::Config(format!("temperature {t} must be positive")));
        }
        Ok(())
    }

    /// Canonical text form; parsing it back gives an equal configuration.
    pub fn to_text(&self) -> String {
        let (t, refine) = match &self.temperatures {
            TemperatureGrid::List(v) => (join(v), "none".to_string()),
            TemperatureGrid::Range { base, refine } => {
                (base.to_string(), refine.map_or("none".into(), |r| r.to_string()))
            }
        };
        let value = |key: &str| -> String {
            match key {
                "kind" => self.kind.to_string(),
                "L0" => join(&self.l0),
                "LBC" => self.lbc.to_string(),
                "LC" => self.lc.to_string(),
                "shape" => join(&self.shapes),
                "n" => self.density.to_string(),
                "reuse_mu" => self.reuse_mu.to_string(),
                "T" => t.clone(),
                "T_refine" => refine.clone(),
                "Tc" => self.tc.to_string(),
                "law_Tmax" => self.law_tmax.to_string(),
                "gamma_Tmin" => self.gamma_tmin.to_string(),
                "threads" => self.threads.to_string(),
                "output" => self.output.display().to_string(),
                _ => unreachable!(),
            }
        };
        let mut out = String::new();
        let mut section = "";
        for (s, k) in KEYS {
            if s != section {
                if !out.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{s}]\n"));
                section = s;
            }
            out.push_str(&format!("{k} = {}\n", value(k)));
        }
        out
    }
}
