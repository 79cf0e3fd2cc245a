//! Run configuration: built-in defaults, a flat `key = value` file, and
//! command-line overrides, applied in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sta3d_core::hamiltonians::SystemParams;

use crate::error::{Error, Result};

/// Inclusive, evenly spaced grid `start:stop:count`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {count}")));
        }
        if !start.is_finite() || !stop.is_finite() || start >= stop {
            return Err(Error::Config(format!("grid bounds must be finite with start < stop, got {start}:{stop}")));
        }
        Ok(Self { start, stop, count })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..=n)
            .map(|k| if k == n { self.stop } else { self.start + (self.stop - self.start) * k as f64 / n as f64 })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(Error::Config(format!("grid `{s}` is not start:stop:count")));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad grid bound `{x}`")));
        let count = n.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad grid count `{n}`")))?;
        Grid::new(num(a)?, num(b)?, count)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// Fully resolved settings for one command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    /// RK4 steps for a run of duration `params.tf`.
    pub steps: usize,
    /// Sweep axes; empty means the command's default grids.
    pub grids: Vec<Grid>,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: SystemParams::default(),
            steps: 20_000,
            grids: Vec::new(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            out: None,
        }
    }
}

/// Optional values from one configuration layer.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub tf: Option<f64>,
    pub eps: Option<f64>,
    pub v_over_g: Option<f64>,
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    pub steps: Option<usize>,
    pub grids: Vec<Grid>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Parses `key = value` lines. Blank lines and `#` comments are skipped;
    /// `grid` may repeat.
    pub fn parse(text: &str) -> Result<Self> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Config(format!("line {}: {msg}", i + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim().replace('_', "-"), value.trim());
            let float = || value.parse::<f64>().map_err(|_| bad(format!("`{key}` needs a number, got `{value}`")));
            let int = || value.parse::<usize>().map_err(|_| bad(format!("`{key}` needs an integer, got `{value}`")));
            match key.as_str() {
                "tf" => o.tf = Some(float()?),
                "eps" => o.eps = Some(float()?),
                "v-over-g" => o.v_over_g = Some(float()?),
                "kappa" => o.kappa = Some(float()?),
                "gamma" => o.gamma = Some(float()?),
                "steps" => o.steps = Some(int()?),
                "workers" => o.workers = Some(int()?),
                "grid" => o.grids.push(value.parse().map_err(|e: Error| bad(e.to_string()))?),
                "out" => o.out = Some(PathBuf::from(value)),
                _ => return Err(bad(format!("unknown key `{key}`"))),
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn apply(self, cfg: &mut RunConfig) {
        let p = &mut cfg.params;
        if let Some(x) = self.tf {
            p.tf = x;
        }
        if let Some(x) = self.eps {
            p.epsilon = x;
        }
        if let Some(x) = self.v_over_g {
            p.v = x * p.g;
        }
        if let Some(x) = self.kappa {
            p.kappa = x * p.g;
        }
        if let Some(x) = self.gamma {
            p.gamma = x * p.g;
        }
        if let Some(x) = self.steps {
            cfg.steps = x;
        }
        if !self.grids.is_empty() {
            cfg.grids = self.grids;
        }
        if let Some(x) = self.workers {
            cfg.workers = x;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
    }
}

impl RunConfig {
    /// Defaults, then the config file (if any), then command-line flags.
    pub fn resolve(file: Option<&Path>, flags: Overrides) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            Overrides::from_file(path)?.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.steps == 0 {
            return Err(Error::Config("steps must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(())
    }

    /// Step count for a run of `duration`: never fewer than `steps`, and
    /// scaled up with the duration so the step size stays at or below
    /// `tf / steps`.
    pub fn steps_for(&self, duration: f64) -> usize {
        let scaled = (self.steps as f64 * duration / self.params.tf).ceil() as usize;
        self.steps.max(scaled)
    }
}
