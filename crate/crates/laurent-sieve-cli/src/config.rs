//! Flags, config files and the resolved [`CommandConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Serialize, Serializer};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "laurent-sieve", version, about = "Exact desk-scale verification of prime Diophantine approximation over function fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Field axioms, irreducible counts, and quadratic arithmetic with --d
    FieldCheck(Flags),
    /// Continued-fraction convergents and their quality
    Cf(Flags),
    /// Character group structure and orthogonality
    Chars(Flags),
    /// L-polynomials, RH, Newton identities and Weil ratios
    Lfunc(Flags),
    /// Three-way prime count over F_q[T] and prime witnesses
    KVerify(Flags),
    /// Three-way prime-ideal count over k(sqrt D) along the Dirichlet frontier
    QuadVerify(Flags),
    /// The box solver on seeded targets
    Adelic(Flags),
    /// Every acceptance criterion
    Suite(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FieldCheck(_) => "field-check",
            Command::Cf(_) => "cf",
            Command::Chars(_) => "chars",
            Command::Lfunc(_) => "lfunc",
            Command::KVerify(_) => "k-verify",
            Command::QuadVerify(_) => "quad-verify",
            Command::Adelic(_) => "adelic",
            Command::Suite(_) => "suite",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::FieldCheck(f)
            | Command::Cf(f)
            | Command::Chars(f)
            | Command::Lfunc(f)
            | Command::KVerify(f)
            | Command::QuadVerify(f)
            | Command::Adelic(f)
            | Command::Suite(f) => f,
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// File of `key = value` lines; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base field: `7`, `3^2` or `3^2/[c0,c1,1]`
    #[arg(long)]
    pub q: Option<String>,
    /// Radicand D of K = k(sqrt D)
    #[arg(long)]
    pub d: Option<String>,
    /// Target: golden, lacunary, seed:<n>, rational:<a>/<f>; `x,y` pairs over K
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Degree range `lo..hi` (inclusive) or a single degree
    #[arg(long)]
    pub degf: Option<String>,
    /// Prime-degree range `lo..hi` (inclusive)
    #[arg(long)]
    pub n: Option<String>,
    /// Explicit modulus or denominator
    #[arg(long)]
    pub f: Option<String>,
    /// Explicit numerator
    #[arg(long)]
    pub a: Option<String>,
    /// Half-exponent bound of the Dirichlet search over K
    #[arg(long)]
    pub qh: Option<i64>,
    /// Largest enumeration size any check may request
    #[arg(long)]
    pub gate: Option<u64>,
    /// Number of random samples or targets
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON report path; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV witness table path
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Comma-separated criterion ids for `suite`, e.g. `1,8,13`
    #[arg(long)]
    pub only: Option<String>,
    /// Record wall-clock runtimes (reports stop being byte-reproducible)
    #[arg(long)]
    pub timings: bool,
}

/// Inclusive range `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegRange {
    pub lo: usize,
    pub hi: usize,
}

impl DegRange {
    pub fn new(lo: usize, hi: usize) -> DegRange {
        DegRange { lo, hi }
    }
    pub fn iter(self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl FromStr for DegRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("bad range `{s}`, expected `lo..hi` or a single integer");
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = num(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(bad());
        }
        Ok(DegRange { lo, hi })
    }
}

impl fmt::Display for DegRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl Serialize for DegRange {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_GATE: u64 = 10_000_000;

/// Fully resolved settings; echoed verbatim into every report.
#[derive(Debug, Clone, Serialize)]
pub struct CommandConfig {
    pub subcommand: String,
    pub q: String,
    pub d: Option<String>,
    pub alpha: Option<String>,
    pub eps: f64,
    pub degf: Option<DegRange>,
    pub n: Option<DegRange>,
    pub f: Option<String>,
    pub a: Option<String>,
    pub qh: i64,
    pub gate: u64,
    pub samples: Option<usize>,
    pub seed: u64,
    pub only: Option<Vec<usize>>,
    pub timings: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub csv: Option<PathBuf>,
}

const KEYS: &[&str] = &["q", "d", "alpha", "eps", "degf", "n", "f", "a", "qh", "gate", "samples", "seed", "out", "csv", "only", "timings"];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key `{}`", i + 1, k.trim())));
        }
        let val = v.trim().trim_matches('"').to_string();
        map.insert(key, val);
    }
    Ok(map)
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| CliError::Usage(format!("invalid value `{v}` for `{key}`: {e}")))
}

fn parse_only(v: &str) -> Result<Vec<usize>, CliError> {
    let mut ids: Vec<usize> = v.split(',').map(|t| parse_value::<usize>("only", t.trim())).collect::<Result<_, _>>()?;
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

impl CommandConfig {
    /// Defaults, then the config file, then flags.
    pub fn resolve(cmd: &Command) -> Result<CommandConfig, CliError> {
        let flags = cmd.flags();
        let file = match &flags.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let pick = |key: &str, flag: Option<String>| flag.or_else(|| file.get(key).cloned());

        let mut cfg = CommandConfig {
            subcommand: cmd.name().to_string(),
            q: pick("q", flags.q.clone()).unwrap_or_else(|| "7".into()),
            d: pick("d", flags.d.clone()),
            alpha: pick("alpha", flags.alpha.clone()),
            eps: 0.1,
            degf: None,
            n: None,
            f: pick("f", flags.f.clone()),
            a: pick("a", flags.a.clone()),
            qh: 5,
            gate: DEFAULT_GATE,
            samples: None,
            seed: DEFAULT_SEED,
            only: None,
            timings: flags.timings,
            out: flags.out.clone().or_else(|| file.get("out").map(PathBuf::from)),
            csv: flags.csv.clone().or_else(|| file.get("csv").map(PathBuf::from)),
        };
        if let Some(v) = pick("eps", flags.eps.map(|x| x.to_string())) {
            cfg.eps = parse_value("eps", &v)?;
        }
        if let Some(v) = pick("degf", flags.degf.clone()) {
            cfg.degf = Some(parse_value("degf", &v)?);
        }
        if let Some(v) = pick("n", flags.n.clone()) {
            cfg.n = Some(parse_value("n", &v)?);
        }
        if let Some(v) = pick("qh", flags.qh.map(|x| x.to_string())) {
            cfg.qh = parse_value("qh", &v)?;
        }
        if let Some(v) = pick("gate", flags.gate.map(|x| x.to_string())) {
            cfg.gate = parse_value("gate", &v)?;
        }
        if let Some(v) = pick("samples", flags.samples.map(|x| x.to_string())) {
            cfg.samples = Some(parse_value("samples", &v)?);
        }
        if let Some(v) = pick("seed", flags.seed.map(|x| x.to_string())) {
            cfg.seed = parse_value("seed", &v)?;
        }
        if let Some(v) = pick("only", flags.only.clone()) {
            cfg.only = Some(parse_only(&v)?);
        }
        if !flags.timings {
            if let Some(v) = file.get("timings") {
                cfg.timings = parse_value("timings", v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.eps > 0.0 && self.eps < 1.0 / 3.0) {
            return Err(CliError::Usage(format!("eps must lie in (0, 1/3), got {}", self.eps)));
        }
        if self.gate == 0 || self.qh <= 0 || self.samples == Some(0) {
            return Err(CliError::Usage("gate, qh and samples must be positive".into()));
        }
        if let Some(ids) = &self.only {
            if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > crate::suite::CRITERIA.len()) {
                return Err(CliError::Usage(format!("no criterion {bad}")));
            }
        }
        Ok(())
    }

    /// Usage error unless `q^n <= gate`.
    pub fn check_gate(&self, q: u64, n: usize) -> Result<(), CliError> {
        let size = (q as f64).powi(n as i32);
        if size > self.gate as f64 {
            return Err(CliError::Usage(format!("q^{n} exceeds the gate {}", self.gate)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!("3..5".parse::<DegRange>().unwrap(), DegRange::new(3, 5));
        assert_eq!("3..=5".parse::<DegRange>().unwrap(), DegRange::new(3, 5));
        assert_eq!("4".parse::<DegRange>().unwrap(), DegRange::new(4, 4));
        assert!("5..3".parse::<DegRange>().is_err());
        assert!("x".parse::<DegRange>().is_err());
    }

    #[test]
    fn config_text() {
        let m = parse_config_text("# comment\nq = 7\nalpha = \"golden\"  # trailing\n\neps=0.05\n").unwrap();
        assert_eq!(m["q"], "7");
        assert_eq!(m["alpha"], "golden");
        assert_eq!(m["eps"], "0.05");
        assert!(parse_config_text("colour = red").is_err());
        assert!(parse_config_text("just words").is_err());
    }
}
