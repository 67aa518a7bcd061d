//! Settings resolution: command-line flags over the config file over
//! built-in defaults. `GAUSSCAP_JOBS` beats every other source of `jobs`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use gausscap_core::degradability::DEFAULT_EPS_GRID;
use gausscap_core::fock::{CROSSCHECK_NBAR, CROSSCHECK_S};
use serde::Deserialize;

use crate::args::{Cli, Command, Figure, Format, GridArgs};
use crate::error::CliError;

pub const JOBS_ENV: &str = "GAUSSCAP_JOBS";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Values {
    One(f64),
    Many(Vec<f64>),
}

impl Values {
    fn into_vec(self) -> Vec<f64> {
        match self {
            Values::One(x) => vec![x],
            Values::Many(v) => v,
        }
    }
}

/// Keys accepted in the config file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub jobs: Option<usize>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub q: Option<Values>,
    pub q_range: Option<String>,
    pub pa: Option<f64>,
    pub pe: Option<f64>,
    pub cutoff: Option<usize>,
    pub tol: Option<f64>,
    pub n_max: Option<usize>,
    pub eps: Option<Values>,
    pub rational: Option<String>,
    pub nbar: Option<Values>,
    pub s: Option<Values>,
    pub which: Option<Figure>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Inclusive grid `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FromStr for Range {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CliError::invalid(format!("q range '{s}' must look like start:stop:step"));
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(bad());
        }
        if step <= 0.0 {
            return Err(CliError::invalid(format!("q range step must be positive, got {step}")));
        }
        if stop < start {
            return Err(CliError::invalid(format!("q range {start}:{stop} is empty")));
        }
        if (stop - start) / step > 1e6 {
            return Err(CliError::invalid("q range has more than a million points"));
        }
        Ok(Range { start, stop, step })
    }
}

impl Range {
    /// Grid points, rounded to twelve decimals so `0.51:0.99:0.01` gives
    /// the decimal values.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

pub fn parse_rational(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::invalid(format!("rational '{s}' must look like x/y with positive integers"));
    let (x, y) = s.split_once('/').ok_or_else(bad)?;
    let x: usize = x.trim().parse().map_err(|_| bad())?;
    let y: usize = y.trim().parse().map_err(|_| bad())?;
    if x == 0 || y == 0 {
        return Err(bad());
    }
    Ok((x, y))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub jobs: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub q: Option<Vec<f64>>,
    pub q_range: Option<Range>,
    pub pa: f64,
    pub pe: f64,
    pub cutoff: usize,
    pub tol: f64,
    pub n_max: usize,
    pub eps: Vec<f64>,
    pub rational: Option<(usize, usize)>,
    pub nbar: Vec<f64>,
    pub s: Vec<f64>,
    pub which: Figure,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            format: Format::Csv,
            output: None,
            out_dir: PathBuf::from("."),
            q: None,
            q_range: None,
            pa: 1.0,
            pe: 1.0,
            cutoff: 60,
            tol: 1e-6,
            n_max: 50,
            eps: DEFAULT_EPS_GRID.to_vec(),
            rational: None,
            nbar: CROSSCHECK_NBAR.to_vec(),
            s: CROSSCHECK_S.to_vec(),
            which: Figure::All,
        }
    }
}

impl Settings {
    pub fn apply(&mut self, c: FileConfig) -> Result<(), CliError> {
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = c.$field { self.$field = v; })* };
        }
        set!(jobs, format, out_dir, pa, pe, cutoff, tol, n_max, which);
        if let Some(v) = c.output {
            self.output = Some(v);
        }
        if let Some(v) = c.q {
            self.q = Some(v.into_vec());
        }
        if let Some(v) = c.q_range {
            self.q_range = Some(v.parse()?);
        }
        if let Some(v) = c.eps {
            self.eps = v.into_vec();
        }
        if let Some(v) = c.rational {
            self.rational = Some(parse_rational(&v)?);
        }
        if let Some(v) = c.nbar {
            self.nbar = v.into_vec();
        }
        if let Some(v) = c.s {
            self.s = v.into_vec();
        }
        Ok(())
    }

    /// Defaults, then the config file, then flags, then `GAUSSCAP_JOBS`.
    pub fn resolve(cli: &Cli, env_jobs: Option<&str>) -> Result<Self, CliError> {
        let mut settings = Settings::default();
        if let Some(path) = &cli.config {
            settings.apply(FileConfig::load(path)?)?;
        }
        settings.apply(flags_as_config(cli))?;
        if let Some(raw) = env_jobs {
            settings.jobs = raw
                .trim()
                .parse()
                .map_err(|_| CliError::invalid(format!("{JOBS_ENV}='{raw}' is not a thread count")))?;
        }
        settings.validate()?;
        Ok(settings)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.jobs == 0 {
            return Err(CliError::invalid("jobs must be at least 1"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(CliError::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.cutoff < 2 {
            return Err(CliError::invalid(format!("cutoff must be at least 2, got {}", self.cutoff)));
        }
        if self.n_max == 0 {
            return Err(CliError::invalid("n_max must be at least 1"));
        }
        for (name, v) in [("pa", self.pa), ("pe", self.pe)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::invalid(format!("{name} must be a nonnegative energy, got {v}")));
            }
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| e.is_nan() || *e <= 0.0) {
            return Err(CliError::invalid("eps offsets must be positive"));
        }
        if self.q.as_ref().is_some_and(|q| q.is_empty()) {
            return Err(CliError::invalid("q list is empty"));
        }
        if self.nbar.is_empty() || self.s.is_empty() {
            return Err(CliError::invalid("crosscheck grids must be non-empty"));
        }
        Ok(())
    }

    /// Explicit q values, else the range, else `fallback`.
    pub fn grid(&self, fallback: Option<Range>) -> Result<Vec<f64>, CliError> {
        if let Some(q) = &self.q {
            return Ok(q.clone());
        }
        self.q_range
            .or(fallback)
            .map(|r| r.points())
            .ok_or_else(|| CliError::invalid("no q given: use --q or --q-range"))
    }
}

fn grid_config(g: &GridArgs, c: &mut FileConfig) {
    c.q = g.q.clone().map(Values::Many);
    c.q_range = g.q_range.clone();
}

fn flags_as_config(cli: &Cli) -> FileConfig {
    let mut c = FileConfig {
        jobs: cli.jobs,
        format: cli.format,
        output: cli.output.clone(),
        ..FileConfig::default()
    };
    match &cli.command {
        Command::Capacity(a) => {
            grid_config(&a.grid, &mut c);
            c.pa = a.pa;
            c.pe = a.pe;
        }
        Command::Figures(a) => {
            grid_config(&a.grid, &mut c);
            c.which = a.which;
            c.n_max = a.n_max;
            c.out_dir = a.out_dir.clone();
        }
        Command::Crosscheck(a) => {
            grid_config(&a.grid, &mut c);
            c.cutoff = a.cutoff;
            c.tol = a.tol;
            c.nbar = a.nbar.clone().map(Values::Many);
            c.s = a.s.clone().map(Values::Many);
        }
        Command::Witness(a) => {
            c.q = a.q.map(Values::One);
            c.rational = a.rational.clone();
            c.eps = a.eps.clone().map(Values::Many);
            c.n_max = a.n_max;
        }
        Command::Acceptance(_) => {}
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn cli(args: &[&str]) -> Cli {
        Cli::parse_from(std::iter::once("gausscap").chain(args.iter().copied()))
    }

    #[test]
    fn range_points_are_decimal() {
        let r: Range = "0.51:0.99:0.01".parse().unwrap();
        let p = r.points();
        assert_eq!(p.len(), 49);
        assert_eq!(p[20], 0.71);
        assert_eq!(*p.last().unwrap(), 0.99);
    }

    #[test]
    fn bad_ranges_are_invalid_input() {
        for s in ["0.5:0.4:0.1", "0.5:0.9:0", "0.5:0.9", "a:b:c", "0.5:0.9:-1"] {
            assert_eq!(s.parse::<Range>().unwrap_err().status, crate::error::Status::InvalidInput, "{s}");
        }
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let mut s = Settings::default();
        s.apply(FileConfig::parse("pa = 3.0\npe = 2.0\nformat = \"json\"\n").unwrap()).unwrap();
        assert_eq!((s.pa, s.pe, s.format), (3.0, 2.0, Format::Json));
        s.apply(flags_as_config(&cli(&["capacity", "--pa", "5"]))).unwrap();
        assert_eq!((s.pa, s.pe, s.cutoff), (5.0, 2.0, 60));
    }

    #[test]
    fn env_overrides_jobs_flag() {
        let s = Settings::resolve(&cli(&["--jobs", "3", "capacity", "--q", "0.7"]), Some("2")).unwrap();
        assert_eq!(s.jobs, 2);
        let s = Settings::resolve(&cli(&["--jobs", "3", "capacity", "--q", "0.7"]), None).unwrap();
        assert_eq!(s.jobs, 3);
        assert!(Settings::resolve(&cli(&["capacity"]), Some("zero")).is_err());
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(FileConfig::parse("colour = 1").is_err());
        let c = FileConfig::parse("q = 0.7\nnbar = [0.0, 2.0]\nrational = \"3/2\"").unwrap();
        assert_eq!(c.q, Some(Values::One(0.7)));
        assert_eq!(c.nbar, Some(Values::Many(vec![0.0, 2.0])));
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("2/1").unwrap(), (2, 1));
        assert!(parse_rational("2/0").is_err());
        assert!(parse_rational("1.5").is_err());
    }
}
