//! Run configuration: command-line flags over an optional `key=value` file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::geometry::Bound;
use crate::orbifold::{parse_kv, OrbifoldModel, PlaceSet};

use super::CliError;

/// Values read from `--config`; any flag given on the command line wins.
#[derive(Clone, Debug, Default)]
pub struct ConfigFile(BTreeMap<String, String>);

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let map = parse_kv(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        Ok(ConfigFile(map.into_iter().map(|(k, v)| (k.replace('-', "_"), v)).collect()))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// `flag`, else the parsed config value under `key`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key}: {e}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelName {
    P1,
    Pn,
    Blowup,
}

impl FromStr for ModelName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p1" => Ok(ModelName::P1),
            "pn" => Ok(ModelName::Pn),
            "blowup" => Ok(ModelName::Blowup),
            other => Err(format!("unknown model {other:?} (expected p1, pn or blowup)")),
        }
    }
}

/// Model selection as given on the command line, before validation.
#[derive(Clone, Debug, Default)]
pub struct ModelSpec {
    pub model: Option<String>,
    pub n: Option<u32>,
    pub m: Option<u32>,
    pub m1: Option<u32>,
    pub m2: Option<u32>,
}

impl ModelSpec {
    pub fn resolve(&self, cfg: &ConfigFile) -> Result<OrbifoldModel, CliError> {
        let name: String = cfg
            .pick(self.model.clone(), "model")?
            .ok_or_else(|| CliError::Usage("--model is required".into()))?;
        let name: ModelName = name.parse().map_err(CliError::Usage)?;
        let n = cfg.pick(self.n, "n")?;
        let m = cfg.pick(self.m, "m")?;
        let m1 = cfg.pick(self.m1, "m1")?;
        let m2 = cfg.pick(self.m2, "m2")?;
        let reject = |flag: &str, given: bool| {
            if given {
                Err(CliError::Usage(format!("--{flag} does not apply to this model")))
            } else {
                Ok(())
            }
        };
        let model = match name {
            ModelName::P1 => {
                reject("n", n.is_some_and(|n| n != 1))?;
                reject("m1", m1.is_some())?;
                reject("m2", m2.is_some())?;
                OrbifoldModel::projective_space(1, m.unwrap_or(1))
            }
            ModelName::Pn => {
                reject("m1", m1.is_some())?;
                reject("m2", m2.is_some())?;
                let n = n.ok_or_else(|| CliError::Usage("--n is required for pn".into()))?;
                OrbifoldModel::projective_space(n, m.unwrap_or(1))
            }
            ModelName::Blowup => {
                reject("n", n.is_some())?;
                reject("m", m.is_some())?;
                OrbifoldModel::blowup_p2(m1.unwrap_or(1), m2.unwrap_or(1))
            }
        };
        model.map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// A comma-separated list of primes; empty or `inf` means `S = {∞}`.
pub fn parse_places(text: Option<&str>) -> Result<PlaceSet, CliError> {
    let mut primes = Vec::new();
    for part in text.unwrap_or("").split(',') {
        let part = part.trim();
        if part.is_empty() || part.eq_ignore_ascii_case("inf") {
            continue;
        }
        primes.push(
            part.parse::<u64>()
                .map_err(|_| CliError::Usage(format!("invalid prime {part:?} in S")))?,
        );
    }
    PlaceSet::new(primes).map_err(|e| CliError::Usage(e.to_string()))
}

/// `geometric:k`, `geometric:k:lo`, `list:b1,b2,…` or a bare list.
#[derive(Clone, Debug, PartialEq)]
pub enum GridSpec {
    Geometric { k: usize, lo: Option<f64> },
    Explicit(Vec<Bound>),
}

impl FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("geometric:") {
            let (k, lo) = match rest.split_once(':') {
                Some((k, lo)) => (k, Some(lo.trim().parse::<f64>().map_err(|_| format!("invalid grid start {lo:?}"))?)),
                None => (rest, None),
            };
            let k: usize = k.trim().parse().map_err(|_| format!("invalid grid size {k:?}"))?;
            if k == 0 {
                return Err("grid size must be at least 1".into());
            }
            return Ok(GridSpec::Geometric { k, lo });
        }
        let list = s.strip_prefix("list:").unwrap_or(s);
        let bounds = list
            .split(',')
            .map(|b| b.parse::<Bound>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GridSpec::Explicit(bounds))
    }
}

impl GridSpec {
    /// Bounds up to `bmax`. Geometric points are rounded to integers, and
    /// the last one is `bmax` itself.
    pub fn bounds(&self, bmax: &Bound) -> Result<Vec<Bound>, CliError> {
        let out = match self {
            GridSpec::Explicit(list) => {
                if let Some(b) = list.iter().find(|b| *b > bmax) {
                    return Err(CliError::Usage(format!("grid point {b} exceeds --bmax {bmax}")));
                }
                list.clone()
            }
            GridSpec::Geometric { k, lo } => {
                let hi = bmax.to_f64();
                let k = *k;
                // Without a start the points are bmax^{i/k}, i = 1..=k.
                let point = |i: usize| match lo {
                    Some(lo) if k > 1 => (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (k - 1) as f64).exp(),
                    Some(lo) => *lo,
                    None => hi.powf((i + 1) as f64 / k as f64),
                };
                if let Some(lo) = lo {
                    if !(*lo > 0.0) || *lo > hi {
                        return Err(CliError::Usage(format!("grid start {lo} is not in (0, bmax]")));
                    }
                }
                let mut out: Vec<Bound> = Vec::with_capacity(k);
                for i in 0..k - 1 {
                    let b = Bound::from_integer(point(i).round().max(1.0) as u64);
                    if &b < bmax && out.last().map_or(true, |l| *l < b) {
                        out.push(b);
                    }
                }
                out.push(bmax.clone());
                out
            }
        };
        if out.is_empty() || out.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage("grid must be nonempty and strictly increasing".into()));
        }
        Ok(out)
    }
}
