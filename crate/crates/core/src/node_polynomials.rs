//! Node polynomials by exact interpolation of the counts in `d`, and a
//! small JSON cache for the results.
//!
//! Cache layout: one file `node-poly-<mode>-<delta>.json` per `(δ, mode)`
//! holding a serialized [`NodePolynomialRecord`]. Records written by a
//! different [`CODE_VERSION`] are ignored.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorial, lagrange_interpolate, Rational, UniPoly};
use crate::error::{Error, Result};
use crate::integrand::{IntegrandSpec, Mode};
use crate::localization::{count_nodal_with, LocalizationOptions};

/// Bumped whenever a change could alter cached polynomials.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "/1");

pub const CACHE_DIR_ENV: &str = "NODAL_CACHE_DIR";

/// Samples beyond the interpolation window that must agree.
pub const EXTRA_SAMPLES: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodePolynomialRecord {
    pub code_version: String,
    pub delta: u32,
    pub mode: Mode,
    /// `N_δ(d)`.
    pub polynomial: UniPoly,
    /// `δ!·N_δ(d)`, the count with ordered nodes.
    pub ordered: UniPoly,
    pub sample_range: Vec<u32>,
    pub check_range: Vec<u32>,
    pub seeds: Vec<u64>,
    pub verified: bool,
    /// `9 + 2δ` in P3 mode; no bound is known in the fixed-plane mode.
    pub degree_bound: Option<usize>,
    pub degree_bound_checked: bool,
    pub extra_samples_agree: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
}

/// Smallest `d ≥ δ+1` admissible in `mode`.
pub fn sampling_start(delta: u32, mode: Mode) -> u32 {
    (delta + 1..)
        .find(|&d| IntegrandSpec::new(0, delta, d, mode).is_ok())
        .expect("large degrees are always admissible")
}

pub fn node_polynomial(delta: u32, mode: Mode) -> Result<NodePolynomialRecord> {
    let opts = LocalizationOptions {
        verify: true,
        ..Default::default()
    };
    node_polynomial_with(delta, mode, &opts)
}

pub fn node_polynomial_with(
    delta: u32,
    mode: Mode,
    opts: &LocalizationOptions,
) -> Result<NodePolynomialRecord> {
    let start = sampling_start(delta, mode);
    let window = 10 + 2 * delta;
    let sample_range: Vec<u32> = (start..start + window).collect();
    let check_range: Vec<u32> = (start + window..start + window + EXTRA_SAMPLES).collect();
    let all: Vec<u32> = sample_range.iter().chain(&check_range).copied().collect();
    let values: Vec<(u32, Rational)> = all
        .par_iter()
        .map(|&d| {
            let c = count_nodal_with(delta, d, mode, 0, opts)?;
            Ok((d, Rational::from(c.value)))
        })
        .collect::<Result<_>>()?;
    let samples: Vec<(Rational, Rational)> = values[..sample_range.len()]
        .iter()
        .map(|(d, v)| (Rational::from(*d), v.clone()))
        .collect();
    let polynomial = lagrange_interpolate(&samples)?;
    for (d, v) in &values[sample_range.len()..] {
        let predicted = polynomial.eval(&Rational::from(*d));
        if &predicted != v {
            return Err(Error::DegreeBound(format!(
                "δ={delta} mode={mode}: interpolant predicts {predicted:?} at d={d}, count is {v:?}"
            )));
        }
    }
    let degree = polynomial.degree().unwrap_or(0);
    let degree_bound = (mode == Mode::P3).then_some(9 + 2 * delta as usize);
    if let Some(bound) = degree_bound {
        if degree > bound {
            return Err(Error::DegreeBound(format!(
                "δ={delta}: degree {degree} exceeds {bound}"
            )));
        }
        if degree < bound {
            info!("δ={delta}: node polynomial has degree {degree} < {bound}");
        }
    }
    let ordered = polynomial.scale(&Rational::from(factorial(delta)));
    let mut seeds = vec![opts.specialization.seed()];
    if opts.verify {
        seeds.push(opts.specialization.companion().seed());
    }
    Ok(NodePolynomialRecord {
        code_version: CODE_VERSION.to_string(),
        delta,
        mode,
        polynomial,
        ordered,
        sample_range,
        check_range,
        seeds,
        verified: opts.verify,
        degree_bound,
        degree_bound_checked: degree_bound.is_some(),
        extra_samples_agree: true,
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|t| t.as_secs()),
    })
}

/// Directory of cached records.
#[derive(Debug, Clone)]
pub struct PolynomialCache {
    dir: PathBuf,
}

impl PolynomialCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        PolynomialCache { dir: dir.into() }
    }

    /// `explicit`, else `$NODAL_CACHE_DIR`, else none. Empty paths count as unset.
    pub fn locate(explicit: Option<PathBuf>) -> Option<Self> {
        let nonempty = |p: &PathBuf| !p.as_os_str().is_empty();
        explicit
            .filter(nonempty)
            .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from).filter(nonempty))
            .map(PolynomialCache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, delta: u32, mode: Mode) -> PathBuf {
        self.dir.join(format!("node-poly-{}-{delta}.json", mode.as_str()))
    }

    /// Writes through a temporary file and an atomic rename, so readers
    /// never see a partial record.
    pub fn store(&self, record: &NodePolynomialRecord) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(record.delta, record.mode);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer_pretty(&mut tmp, record)?;
        tmp.write_all(b"\n")?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path)
            .map_err(|e| Error::Cache(format!("rename to {}: {}", path.display(), e.error)))?;
        Ok(path)
    }

    /// A cached record, or `None` when absent, unreadable, or stale.
    pub fn load(&self, delta: u32, mode: Mode) -> Option<NodePolynomialRecord> {
        let path = self.path(delta, mode);
        let text = fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<NodePolynomialRecord>(&text) {
            Ok(rec) if rec.code_version == CODE_VERSION && rec.delta == delta && rec.mode == mode => {
                Some(rec)
            }
            Ok(_) => {
                info!("ignoring stale cache entry {}", path.display());
                None
            }
            Err(e) => {
                warn!("ignoring corrupt cache entry {}: {e}", path.display());
                None
            }
        }
    }

    /// Every current record, ordered by mode then `δ`.
    pub fn list(&self) -> Result<Vec<NodePolynomialRecord>> {
        let mut out = Vec::new();
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
            Err(e) => return Err(e.into()),
        };
        for entry in entries {
            let path = entry?.path();
            let Some(text) = path
                .extension()
                .filter(|x| *x == "json")
                .and_then(|_| fs::read_to_string(&path).ok())
            else {
                continue;
            };
            if let Ok(rec) = serde_json::from_str::<NodePolynomialRecord>(&text) {
                if rec.code_version == CODE_VERSION {
                    out.push(rec);
                }
            }
        }
        out.sort_by_key(|r| (r.mode.as_str(), r.delta));
        Ok(out)
    }
}

/// Cached record if usable, otherwise computed and stored.
pub fn node_polynomial_cached(
    delta: u32,
    mode: Mode,
    opts: &LocalizationOptions,
    cache: Option<&PolynomialCache>,
) -> Result<(NodePolynomialRecord, bool)> {
    if let Some(rec) = cache.and_then(|c| c.load(delta, mode)) {
        if rec.verified || !opts.verify {
            return Ok((rec, true));
        }
    }
    let rec = node_polynomial_with(delta, mode, opts)?;
    if let Some(c) = cache {
        c.store(&rec)?;
    }
    Ok((rec, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> LocalizationOptions {
        LocalizationOptions::default()
    }

    #[test]
    fn sampling_windows() {
        assert_eq!(sampling_start(0, Mode::P3), 1);
        assert_eq!(sampling_start(0, Mode::P2Fixed), 2);
        assert_eq!(sampling_start(3, Mode::P3), 4);
    }

    #[test]
    fn fixed_plane_one_node() {
        let rec = node_polynomial_with(1, Mode::P2Fixed, &quick()).unwrap();
        let expected = UniPoly::from_i64(&[3, -6, 3]);
        assert_eq!(rec.polynomial, expected);
        assert_eq!(rec.degree_bound, None);
    }

    #[test]
    fn one_node_through_conics() {
        let rec = node_polynomial_with(1, Mode::P3, &quick()).unwrap();
        assert_eq!(rec.polynomial.eval(&Rational::from(2)), Rational::from(140));
        assert_eq!(rec.sample_range, (2..14).collect::<Vec<_>>());
        assert_eq!(rec.check_range, vec![14, 15]);
    }

    #[test]
    fn store_load_roundtrip_and_staleness() {
        let dir = tempfile::tempdir().unwrap();
        let cache = PolynomialCache::new(dir.path());
        let rec = node_polynomial_with(0, Mode::P3, &quick()).unwrap();
        cache.store(&rec).unwrap();
        assert_eq!(cache.load(0, Mode::P3), Some(rec.clone()));
        assert_eq!(cache.list().unwrap(), vec![rec.clone()]);

        let mut old = rec.clone();
        old.code_version = "0.0.0/0".into();
        cache.store(&old).unwrap();
        assert_eq!(cache.load(0, Mode::P3), None);

        fs::write(cache.path(0, Mode::P3), "{\"code_version\": ").unwrap();
        assert_eq!(cache.load(0, Mode::P3), None);
        let (again, hit) = node_polynomial_cached(0, Mode::P3, &quick(), Some(&cache)).unwrap();
        assert!(!hit);
        assert_eq!(again.polynomial, rec.polynomial);
        let (_, hit) = node_polynomial_cached(0, Mode::P3, &quick(), Some(&cache)).unwrap();
        assert!(hit);
    }

    #[test]
    fn explicit_cache_dir_wins_and_empty_is_ignored() {
        let c = PolynomialCache::locate(Some(PathBuf::from("/tmp/x"))).unwrap();
        assert_eq!(c.dir(), Path::new("/tmp/x"));
        if std::env::var_os(CACHE_DIR_ENV).is_none_or(|v| v.is_empty()) {
            assert!(PolynomialCache::locate(Some(PathBuf::new())).is_none());
        }
    }

    #[test]
    fn concurrent_stores_leave_one_whole_record() {
        let dir = tempfile::tempdir().unwrap();
        let cache = PolynomialCache::new(dir.path());
        let base = node_polynomial_with(0, Mode::P3, &quick()).unwrap();
        let variants: Vec<NodePolynomialRecord> = (0..8)
            .map(|k| NodePolynomialRecord {
                seeds: vec![k],
                ..base.clone()
            })
            .collect();
        std::thread::scope(|s| {
            for v in &variants {
                let cache = &cache;
                s.spawn(move || cache.store(v).unwrap());
            }
        });
        let winner = cache.load(0, Mode::P3).unwrap();
        assert!(variants.contains(&winner));
        let leftovers = fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(leftovers, 1);
    }
}
