//! Grid sweeps over model parameters, written as CSV.
//!
//! Config files are flat `key = value` lines; see `configs/` and the README
//! for the grammar.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::dense_coding::{capacity, validity};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::{c, C64};
use crate::swap::{purity_witness, ProductState};
use crate::thermal::thermal_state;

pub const DEFAULT_PRECISION: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    J,
    Beta0,
    DBzeff,
    Bz,
    T,
    GammaE,
}

impl Param {
    pub const ALL: [Param; 6] = [Param::J, Param::Beta0, Param::DBzeff, Param::Bz, Param::T, Param::GammaE];

    pub fn name(self) -> &'static str {
        match self {
            Param::J => "J",
            Param::Beta0 => "beta0",
            Param::DBzeff => "dBzeff",
            Param::Bz => "Bz",
            Param::T => "T",
            Param::GammaE => "gamma_e",
        }
    }
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown parameter `{s}` (expected one of J, beta0, dBzeff, Bz, T, gamma_e)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Chi,
    SRho,
    Validity,
    Witness,
    Z,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Chi => "chi",
            Quantity::SRho => "S_rho",
            Quantity::Validity => "validity",
            Quantity::Witness => "witness",
            Quantity::Z => "Z",
        }
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [Quantity::Chi, Quantity::SRho, Quantity::Validity, Quantity::Witness, Quantity::Z]
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| format!("unknown quantity `{s}` (expected one of chi, S_rho, validity, witness, Z)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    /// Grid value `i`. Linear points are `(start (count-1-i) + stop i) / (count-1)`,
    /// which is exactly mirror-symmetric when `start = -stop`.
    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            return self.start;
        }
        let last = (self.count - 1) as f64;
        let fi = i as f64;
        match self.spacing {
            Spacing::Linear => (self.start * (last - fi) + self.stop * fi) / last,
            Spacing::Log => {
                if i == 0 {
                    self.start
                } else if i == self.count - 1 {
                    self.stop
                } else {
                    (self.start.ln() + (self.stop.ln() - self.start.ln()) * fi / last).exp()
                }
            }
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }

    fn check(&self) -> std::result::Result<(), String> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err("axis bounds must be finite".into());
        }
        if self.count == 0 {
            return Err("axis count must be at least 1".into());
        }
        if self.count == 1 {
            if self.start != self.stop {
                return Err("a one-point axis needs start = stop".into());
            }
        } else if !(self.start < self.stop) {
            return Err("axis needs start < stop".into());
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0) {
            return Err("log axis needs start > 0".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub quantity: Quantity,
    pub fixed: BTreeMap<Param, f64>,
    pub axes: Vec<Axis>,
    pub output_path: Option<PathBuf>,
    pub precision: usize,
    /// Initial product state for `witness`.
    pub state: Option<ProductState>,
    /// Evolution time for `witness`.
    pub t: Option<f64>,
}

impl SweepConfig {
    pub fn new(quantity: Quantity) -> Self {
        SweepConfig {
            quantity,
            fixed: BTreeMap::new(),
            axes: Vec::new(),
            output_path: None,
            precision: DEFAULT_PRECISION,
            state: None,
            t: None,
        }
    }

    pub fn fix(mut self, param: Param, value: f64) -> Self {
        self.fixed.insert(param, value);
        self
    }

    pub fn axis(mut self, param: Param, start: f64, stop: f64, count: usize) -> Self {
        self.axes.push(Axis { param, start, stop, count, spacing: Spacing::Linear });
        self
    }

    /// A relative `output` is taken relative to the config file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg: SweepConfig = text.parse()?;
        if let (Some(out), Some(dir)) = (&cfg.output_path, path.parent()) {
            if out.is_relative() {
                cfg.output_path = Some(dir.join(out));
            }
        }
        Ok(cfg)
    }

    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| Err(Error::Config { line: 0, message });
        if self.axes.is_empty() || self.axes.len() > 2 {
            return fail(format!("need 1 or 2 axes, got {}", self.axes.len()));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return fail("the two axes share a parameter".into());
        }
        for a in &self.axes {
            if let Err(m) = a.check() {
                return fail(format!("axis {}: {m}", a.param.name()));
            }
            if self.fixed.contains_key(&a.param) {
                return fail(format!("{} is both fixed and swept", a.param.name()));
            }
        }
        if let Some((p, v)) = self.fixed.iter().find(|(_, v)| !v.is_finite()) {
            return fail(format!("fixed.{} = {v} is not finite", p.name()));
        }
        if !(1..=17).contains(&self.precision) {
            return fail(format!("precision must be in 1..=17, got {}", self.precision));
        }
        if self.quantity == Quantity::Witness && (self.state.is_none() || self.t.is_none()) {
            return fail("witness needs state.alpha1..state.beta2 and t".into());
        }
        Ok(())
    }

    /// Parameters at grid point `(i, j)`; `gamma_e` is applied before
    /// `dBzeff` so the effective gradient is the configured number.
    pub fn params_at(&self, idx: &[usize]) -> ModelParams {
        let mut values = self.fixed.clone();
        for (a, &i) in self.axes.iter().zip(idx) {
            values.insert(a.param, a.value(i));
        }
        let get = |p: Param, default: f64| values.get(&p).copied().unwrap_or(default);
        let base = ModelParams::default();
        ModelParams::new(get(Param::J, base.j), get(Param::Beta0, base.beta0))
            .with_gamma_e(get(Param::GammaE, base.gamma_e))
            .with_bz(get(Param::Bz, base.bz))
            .with_temperature(get(Param::T, base.temperature))
            .with_dbzeff(get(Param::DBzeff, 0.0))
    }
}

impl FromStr for SweepConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut quantity = None;
        let mut cfg = SweepConfig::new(Quantity::Chi);
        let mut amps: [Option<C64>; 4] = [None; 4];
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let err = |message: String| Error::Config { line: line_no, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| err(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let number = |s: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|_| err(format!("`{}` is not a number", s.trim())))
            };
            match key {
                "quantity" => quantity = Some(value.parse::<Quantity>().map_err(err)?),
                "output" => cfg.output_path = Some(PathBuf::from(value)),
                "precision" => {
                    cfg.precision = value.parse().map_err(|_| err(format!("`{value}` is not a digit count")))?
                }
                "t" => cfg.t = Some(number(value)?),
                _ if key.starts_with("fixed.") => {
                    let p: Param = key["fixed.".len()..].parse().map_err(err)?;
                    if cfg.fixed.insert(p, number(value)?).is_some() {
                        return Err(err(format!("`{key}` given twice")));
                    }
                }
                _ if key.starts_with("axis.") => {
                    let param: Param = key["axis.".len()..].parse().map_err(err)?;
                    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                    if !(3..=4).contains(&parts.len()) {
                        return Err(err("axis wants start, stop, count[, linear|log]".into()));
                    }
                    let count = parts[2].parse().map_err(|_| err(format!("`{}` is not a count", parts[2])))?;
                    let spacing = match parts.get(3).copied() {
                        None | Some("linear") => Spacing::Linear,
                        Some("log") => Spacing::Log,
                        Some(other) => return Err(err(format!("unknown spacing `{other}`"))),
                    };
                    let axis = Axis { param, start: number(parts[0])?, stop: number(parts[1])?, count, spacing };
                    axis.check().map_err(err)?;
                    cfg.axes.push(axis);
                }
                _ if key.starts_with("state.") => {
                    let slot = match &key["state.".len()..] {
                        "alpha1" => 0,
                        "beta1" => 1,
                        "alpha2" => 2,
                        "beta2" => 3,
                        other => return Err(err(format!("unknown state amplitude `{other}`"))),
                    };
                    let (re, im) = match value.split_once(',') {
                        Some((re, im)) => (number(re)?, number(im)?),
                        None => (number(value)?, 0.0),
                    };
                    amps[slot] = Some(c(re, im));
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        cfg.quantity = quantity.ok_or(Error::Config { line: 0, message: "missing `quantity`".into() })?;
        if amps.iter().any(Option::is_some) {
            let [a1, b1, a2, b2] = amps.map(|z| z.unwrap_or_default());
            cfg.state = Some(ProductState::new(a1, b1, a2, b2)?);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    pub value: Option<f64>,
    pub error: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub header: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub precision: usize,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for x in &row.coords {
                out.push_str(&format_float(*x, self.precision));
                out.push(',');
            }
            if let Some(v) = row.value {
                out.push_str(&format_float(v, self.precision));
            }
            out.push(',');
            out.push_str(row.error.unwrap_or(""));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Parallelism {
    Serial,
    /// Rayon's global pool.
    #[default]
    Parallel,
    /// A dedicated pool with this many threads.
    Threads(usize),
}

/// Evaluate one quantity at one parameter point.
pub fn evaluate(cfg: &SweepConfig, p: &ModelParams) -> Result<f64> {
    match cfg.quantity {
        Quantity::Chi => Ok(capacity(p)?.chi),
        Quantity::SRho => Ok(capacity(p)?.s_rho),
        Quantity::Validity => Ok(if validity(p)? { 1.0 } else { 0.0 }),
        Quantity::Z => {
            let z = thermal_state(p)?.partition();
            if z.is_finite() {
                Ok(z)
            } else {
                Err(Error::OutOfDomain("partition function overflows".into()))
            }
        }
        Quantity::Witness => {
            let (s0, t) = match (cfg.state, cfg.t) {
                (Some(s0), Some(t)) => (s0, t),
                _ => return Err(Error::OutOfDomain("witness needs a state and t".into())),
            };
            Ok(purity_witness(p, &s0, t)?.value.norm())
        }
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(cfg, Parallelism::default())
}

pub fn run_sweep_with(cfg: &SweepConfig, mode: Parallelism) -> Result<SweepResult> {
    cfg.validate()?;
    let counts: Vec<usize> = cfg.axes.iter().map(|a| a.count).collect();
    let total = cfg.point_count();
    let index = |flat: usize| -> Vec<usize> {
        match counts.as_slice() {
            [_] => vec![flat],
            [_, inner] => vec![flat / inner, flat % inner],
            _ => unreachable!("validated axis count"),
        }
    };
    let row = |flat: usize| -> SweepRow {
        let idx = index(flat);
        let coords = cfg.axes.iter().zip(&idx).map(|(a, &i)| a.value(i)).collect();
        match evaluate(cfg, &cfg.params_at(&idx)) {
            Ok(v) => SweepRow { coords, value: Some(v), error: None },
            Err(e) => SweepRow { coords, value: None, error: Some(e.code()) },
        }
    };
    let rows: Vec<SweepRow> = match mode {
        Parallelism::Serial => (0..total).map(row).collect(),
        Parallelism::Parallel => (0..total).into_par_iter().map(row).collect(),
        Parallelism::Threads(n) => {
            let pool =
                rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().map_err(|e| Error::Io(e.to_string()))?;
            pool.install(|| (0..total).into_par_iter().map(row).collect())
        }
    };
    let mut header: Vec<String> = cfg.axes.iter().map(|a| a.param.name().to_string()).collect();
    header.push(cfg.quantity.name().to_string());
    header.push("error".to_string());
    Ok(SweepResult { header, rows, precision: cfg.precision })
}

/// Run the sweep and write the CSV to `path` (or the configured output).
pub fn write_sweep(cfg: &SweepConfig, path: Option<&Path>, mode: Parallelism) -> Result<SweepResult> {
    let result = run_sweep_with(cfg, mode)?;
    let target = path.map(Path::to_path_buf).or_else(|| cfg.output_path.clone());
    if let Some(target) = target {
        std::fs::write(&target, result.to_csv()).map_err(|e| Error::Io(format!("{}: {e}", target.display())))?;
    }
    Ok(result)
}

/// Round to `digits` significant digits, then print the shortest string
/// that reads back to that value: plain decimal for exponents in `-5..16`,
/// scientific otherwise.
pub fn format_float(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.clamp(1, 17);
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().expect("formatted float parses");
    let sci = format!("{rounded:e}");
    let exp: i32 = sci.split_once('e').map(|(_, e)| e.parse().expect("exponent")).unwrap_or(0);
    if (-5..16).contains(&exp) {
        let mut s = String::new();
        write!(s, "{rounded}").expect("write to string");
        s
    } else {
        sci
    }
}
