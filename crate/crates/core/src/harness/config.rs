use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::profile::EPS0;
use crate::spectral::MIN_GRID;

/// `n` points from `5e-2` down to `1e-5`, evenly spaced in `log ε`.
pub fn default_eps_list() -> Vec<f64> {
    log_spaced(5e-2, 1e-5, 7)
}

fn log_spaced(first: f64, last: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![first];
    }
    let (a, b) = (first.ln(), last.ln());
    (0..n)
        .map(|i| match i {
            0 => first,
            _ if i + 1 == n => last,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Sweep parameters.
///
/// File format: one `key = value` per line, `#` starts a comment. Lists are
/// comma separated; degree pairs are written `m:p`.
///
/// ```text
/// eps = 0.05, 0.01, 0.001
/// k = 1, 2
/// mp = 3:0, 4:1
/// grid = 4096
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub eps_list: Vec<f64>,
    pub k_list: Vec<usize>,
    pub mp_list: Vec<(usize, usize)>,
    pub grid: usize,
    /// Eigenvalues per point; `None` means `k̄ + 2`.
    pub modes: Option<usize>,
    /// Volume of the untouched part; `None` means `vol(S^m)`.
    pub vol_h2: Option<f64>,
    /// Betti number offset: `k̄ = k + b_p`.
    pub b_p: usize,
    /// Curvature samples per chain.
    pub samples: usize,
    pub output: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            eps_list: default_eps_list(),
            k_list: vec![1, 2, 3],
            mp_list: vec![(3, 0), (3, 1), (4, 1), (4, 2)],
            grid: 8192,
            modes: None,
            vol_h2: None,
            b_p: 0,
            samples: crate::geometry::DEFAULT_CURVATURE_SAMPLES,
            output: None,
        }
    }
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Defaults overridden by the keys present in `text`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "eps" => self.eps_list = parse_list(value)?,
            "k" => self.k_list = parse_list(value)?,
            "mp" => self.mp_list = parse_pairs(value)?,
            "grid" => self.grid = parse_one(value)?,
            "modes" => self.modes = Some(parse_one(value)?),
            "vol_h2" => self.vol_h2 = Some(parse_one(value)?),
            "b_p" => self.b_p = parse_one(value)?,
            "samples" => self.samples = parse_one(value)?,
            "out" => self.output = Some(PathBuf::from(value)),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(e) = self.eps_list.iter().find(|&&e| !(e > 0.0 && e <= EPS0)) {
            return Err(Error::Config(format!("eps {e} outside (0, {EPS0}]")));
        }
        if self.k_list.contains(&0) {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if let Some(&(m, p)) = self.mp_list.iter().find(|&&(m, p)| p + 2 > m) {
            return Err(Error::Config(format!("(m, p) = ({m}, {p}) needs p ≤ m − 2")));
        }
        if self.grid < MIN_GRID {
            return Err(Error::Config(format!("grid {} below {MIN_GRID}", self.grid)));
        }
        if self.modes == Some(0) {
            return Err(Error::Config("modes must be at least 1".into()));
        }
        if let Some(v) = self.vol_h2 {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("vol_h2 {v} must be finite and ≥ 0")));
            }
        }
        if self.samples < 1000 {
            return Err(Error::Config(format!("samples {} below 1000", self.samples)));
        }
        Ok(())
    }

    /// `k̄ = k + b_p`.
    pub fn k_bar(&self, k: usize) -> usize {
        k + self.b_p
    }

    /// Eigenvalues to compute for `k̄`: at least `k̄ + 2` so the gap above
    /// the small cluster is always resolved.
    pub fn modes_for(&self, k_bar: usize) -> usize {
        self.modes.unwrap_or(k_bar + 2).max(k_bar + 2)
    }
}

fn parse_one<V: std::str::FromStr>(s: &str) -> Result<V> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse `{s}`")))
}

fn parse_list<V: std::str::FromStr>(s: &str) -> Result<Vec<V>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_one)
        .collect()
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (m, p) = t
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("expected `m:p`, got `{t}`")))?;
            Ok((parse_one(m)?, parse_one(p)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_eps_grid() {
        let e = default_eps_list();
        assert_eq!(e.len(), 7);
        assert_eq!(e[0], 0.05);
        assert_eq!(e[6], 1e-5);
        let r = e[1] / e[0];
        for w in e.windows(2) {
            assert!((w[1] / w[0] - r).abs() < 1e-12);
        }
    }

    #[test]
    fn parse_overrides_defaults() {
        let cfg = SweepConfig::parse(
            "# comment\neps = 0.01, 0.001\nk = 2\nmp = 3:0, 5:2  # trailing\ngrid = 1024\nvol_h2 = 2.5\nb_p = 1\n",
        )
        .unwrap();
        assert_eq!(cfg.eps_list, vec![0.01, 0.001]);
        assert_eq!(cfg.k_list, vec![2]);
        assert_eq!(cfg.mp_list, vec![(3, 0), (5, 2)]);
        assert_eq!(cfg.grid, 1024);
        assert_eq!(cfg.vol_h2, Some(2.5));
        assert_eq!(cfg.k_bar(2), 3);
        assert_eq!(cfg.modes_for(3), 5);
    }

    #[test]
    fn empty_eps_list_is_valid() {
        let cfg = SweepConfig::parse("eps =\n").unwrap();
        assert!(cfg.eps_list.is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SweepConfig::parse("eps = 0.1").is_err());
        assert!(SweepConfig::parse("mp = 3:2").is_err());
        assert!(SweepConfig::parse("grid = 10").is_err());
        assert!(SweepConfig::parse("colour = red").is_err());
        assert!(SweepConfig::parse("just words").is_err());
        assert!(SweepConfig::parse("k = one").is_err());
        assert!(SweepConfig::parse("mp = 3-0").is_err());
    }

    proptest! {
        #[test]
        fn eps_lists_round_trip(list in proptest::collection::vec(1e-9f64..0.05, 0..6)) {
            let text = format!("eps = {}", list.iter().map(|e| format!("{e:?}")).collect::<Vec<_>>().join(", "));
            let cfg = SweepConfig::parse(&text).unwrap();
            prop_assert_eq!(cfg.eps_list, list);
        }
    }
}
