//! The commands behind the `qsphere` binary: run configuration, measure
//! sources, and one function per verb.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::diffops::{eigencheck, l1_l2_identity, FDConfig};
use crate::dimension::{
    correlation_dimension, gen_point_mass, gen_sp1_orbit, gen_subsphere, gen_uniform, theorem_consistency_report,
    ConsistencyReport, DimensionEstimate,
};
use crate::error::{Error, Result};
use crate::kernel::{
    calibrate_with_samples, calibration_samples, near_diagonal_pair, reproduction_estimate, CalibrationCache,
    CalibrationConfig, KernelBank, KernelIndex, SPREAD_LIMIT,
};
use crate::measure::DiscreteMeasure;
use crate::quat::{sample_sphere, stream_rng, subseed, SpherePoint};
use crate::spectral::{
    apply_multiplier, cone_gap_check, multiplier_measure, psi, spectrum_scan, MultiplierValue, SpectrumReport,
};

const TAG_VERIFY: u64 = 0x56_45_52;
const TAG_FIXTURE: u64 = 0x46_49_58;
const TAG_POINTS: u64 = 0x50_54_53;

/// Settings shared by all commands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub h_max: usize,
    pub epsilon: f64,
    pub mc_samples: usize,
    pub probes: usize,
    pub calib_probes: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub atoms: usize,
    pub cache_path: PathBuf,
    pub output_path: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 2,
            h_max: 12,
            epsilon: 0.1,
            mc_samples: 200_000,
            probes: 256,
            calib_probes: 8,
            seed: 1,
            fd_step: 1e-2,
            atoms: 20_000,
            cache_path: PathBuf::from("qsphere-cache.json"),
            output_path: None,
            threads: None,
        }
    }
}

impl RunConfig {
    /// Sets `key` (a flag name without the leading dashes) from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| Error::InvalidConfig(format!("bad value `{value}` for `{key}`")))
        }
        match key {
            "n" => self.n = num(key, value)?,
            "h-max" => self.h_max = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "mc-samples" => self.mc_samples = num(key, value)?,
            "probes" => self.probes = num(key, value)?,
            "calib-probes" => self.calib_probes = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "fd-step" => self.fd_step = num(key, value)?,
            "atoms" => self.atoms = num(key, value)?,
            "cache" => self.cache_path = PathBuf::from(value),
            "out" => self.output_path = Some(PathBuf::from(value)),
            "threads" => self.threads = Some(num(key, value)?),
            _ => return Err(Error::InvalidConfig(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key=value` file; `#` starts a comment line.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected key=value, found `{line}`") })?;
            self.set(k.trim(), v.trim()).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n", self.n),
            ("h-max", self.h_max),
            ("mc-samples", self.mc_samples),
            ("probes", self.probes),
            ("calib-probes", self.calib_probes),
            ("atoms", self.atoms),
        ];
        for (k, v) in positive {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("`{k}` must be positive")));
            }
        }
        if self.n < 2 {
            return Err(Error::InvalidDimension(self.n));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidConfig(format!("epsilon {} outside (0, 1/2)", self.epsilon)));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(Error::InvalidConfig(format!("fd-step {} must be positive", self.fd_step)));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("`threads` must be positive".into()));
        }
        Ok(())
    }

    pub fn calibration(&self) -> CalibrationConfig {
        CalibrationConfig { samples: self.mc_samples, seed: self.seed, probes: self.calib_probes }
    }

    fn write_output(&self, name: &str, contents: &str) -> Result<()> {
        if let Some(dir) = &self.output_path {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

/// Where a command's measure comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSource {
    File(PathBuf),
    Fixture(String),
}

/// A loaded measure and the number of atoms that had to be renormalized.
pub fn load_measure(source: &MeasureSource, cfg: &RunConfig) -> Result<(DiscreteMeasure, usize)> {
    match source {
        MeasureSource::File(path) => DiscreteMeasure::load(path),
        MeasureSource::Fixture(name) => Ok((fixture(name, cfg)?, 0)),
    }
}

/// Builds a named fixture: `uniform`, `point`, `subsphere:<k>` or `sp1-orbit`.
pub fn fixture(name: &str, cfg: &RunConfig) -> Result<DiscreteMeasure> {
    let seed = subseed(cfg.seed, TAG_FIXTURE);
    let x0 = SpherePoint::basis(cfg.n, 0);
    match name {
        "uniform" => gen_uniform(cfg.n, cfg.atoms, seed),
        "point" => Ok(gen_point_mass(&x0)),
        "sp1-orbit" => gen_sp1_orbit(&x0, cfg.atoms, seed),
        _ => match name.strip_prefix("subsphere:").map(str::parse::<usize>) {
            Some(Ok(k)) => gen_subsphere(cfg.n, k, cfg.atoms, seed),
            _ => Err(Error::InvalidConfig(format!(
                "unknown fixture `{name}` (expected uniform, point, subsphere:<k> or sp1-orbit)"
            ))),
        },
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Summary of a `calibrate` run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrateSummary {
    pub n: usize,
    pub h_max: usize,
    pub indices: usize,
    pub reused: usize,
    pub calibrated: usize,
    pub max_spread: f64,
    pub unusable: Vec<[usize; 2]>,
}

/// Calibrates every index up to `h_max` and merges the results into the
/// cache. Entries already present with the same seed and sample count are
/// kept as they are.
pub fn cmd_calibrate(cfg: &RunConfig) -> Result<CalibrateSummary> {
    cfg.validate()?;
    let ccfg = cfg.calibration();
    let mut cache = CalibrationCache::load(&cfg.cache_path)?;
    let all = KernelIndex::all(cfg.n, cfg.h_max)?;
    let todo: Vec<KernelIndex> = all
        .iter()
        .filter(|idx| cache.get(idx).is_none_or(|k| k.seed != ccfg.seed || k.samples != ccfg.samples))
        .copied()
        .collect();
    if !todo.is_empty() {
        let ys = calibration_samples(cfg.n, &ccfg)?;
        for idx in &todo {
            cache.insert(&calibrate_with_samples(*idx, &ys, &ccfg)?);
        }
    }
    cache.save(&cfg.cache_path)?;

    let bank = KernelBank::from_cache(&cache, cfg.n, cfg.h_max)?;
    let summary = CalibrateSummary {
        n: cfg.n,
        h_max: cfg.h_max,
        indices: all.len(),
        reused: all.len() - todo.len(),
        calibrated: todo.len(),
        max_spread: bank.kernels().iter().map(|k| k.spread).fold(0.0, f64::max),
        unusable: bank.kernels().iter().filter(|k| !k.usable()).map(|k| [k.index.h, k.index.m]).collect(),
    };
    cfg.write_output("calibrate.json", &to_json(&summary)?)?;
    Ok(summary)
}

fn bank_from_cache(cfg: &RunConfig) -> Result<KernelBank> {
    if !cfg.cache_path.exists() {
        return Err(Error::InvalidConfig(format!(
            "no calibration cache at {}; run `qsphere calibrate` first",
            cfg.cache_path.display()
        )));
    }
    let bank = KernelBank::from_cache(&CalibrationCache::load(&cfg.cache_path)?, cfg.n, cfg.h_max)?;
    bank.ensure_usable()?;
    Ok(bank)
}

/// One named check of `verify`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// The JSON summary written by `verify`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifySummary {
    pub n: usize,
    pub h_max: usize,
    pub seed: u64,
    pub passed: bool,
    pub failed: Vec<String>,
    pub checks: Vec<Check>,
}

impl VerifySummary {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.into(), passed, detail }
}

/// Runs the invariant suite against the cached calibration, or against a
/// fresh in-memory calibration if there is no cache file.
pub fn cmd_verify(cfg: &RunConfig) -> Result<VerifySummary> {
    cfg.validate()?;
    let bank = if cfg.cache_path.exists() {
        KernelBank::from_cache(&CalibrationCache::load(&cfg.cache_path)?, cfg.n, cfg.h_max)?
    } else {
        KernelBank::calibrate(cfg.n, cfg.h_max, &cfg.calibration())?
    };

    let checks = vec![
        verify_calibration(&bank),
        verify_reproduction(&bank, cfg)?,
        verify_eigenvalues(&bank, cfg),
        verify_l1_l2(),
        verify_psi(cfg.epsilon),
        verify_cone_gap(cfg.epsilon),
    ];
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    let summary =
        VerifySummary { n: cfg.n, h_max: cfg.h_max, seed: cfg.seed, passed: failed.is_empty(), failed, checks };
    cfg.write_output("verify.json", &summary.to_json()?)?;
    Ok(summary)
}

fn verify_calibration(bank: &KernelBank) -> Check {
    let mut bad = Vec::new();
    for k in bank.kernels() {
        let d = k.diagonal();
        let target = if k.index.h == 0 { 1.0 } else { d.round().max(1.0) };
        if !k.usable() || (d - target).abs() > 0.02 * target {
            bad.push(format!("({},{}) diag {d:.4} spread {:.4}", k.index.h, k.index.m, k.spread));
        }
    }
    let max_spread = bank.kernels().iter().map(|k| k.spread).fold(0.0, f64::max);
    let detail = if bad.is_empty() {
        format!("{} kernels, max spread {max_spread:.4} < {SPREAD_LIMIT}, diagonals integral", bank.len())
    } else {
        bad.join("; ")
    };
    check("calibration", bad.is_empty(), detail)
}

/// Index pairs for the reproduction check: half distinct, half equal.
fn reproduction_pairs(bank: &KernelBank, h_top: usize, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let eligible: Vec<usize> = (0..bank.len()).filter(|&p| bank.kernels()[p].index.h <= h_top).collect();
    let mut rng = stream_rng(seed, 0);
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let a = *eligible.choose(&mut rng).expect("bank is not empty");
        if pairs.len() < count / 2 {
            let b = *eligible.choose(&mut rng).expect("bank is not empty");
            if a != b {
                pairs.push((a, b));
            }
        } else {
            pairs.push((a, a));
        }
    }
    pairs
}

fn verify_reproduction(bank: &KernelBank, cfg: &RunConfig) -> Result<Check> {
    let seed = subseed(cfg.seed, TAG_VERIFY);
    let ys = sample_sphere(cfg.n, cfg.mc_samples, seed)?;
    let mut rng = stream_rng(seed, 1);
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    let pairs = reproduction_pairs(bank, cfg.h_max.min(5), 10, seed);
    for (a, b) in pairs {
        let (ka, kb) = (&bank.kernels()[a], &bank.kernels()[b]);
        let (x, z) = near_diagonal_pair(&ka.index, &mut rng)?;
        let (est, se) = reproduction_estimate(ka, kb, &x, &z, &ys)?;
        let want = if a == b { ka.kernel_from_inner(x.inner(&z)) } else { 0.0 };
        // rounding floor for constant integrands, where the standard error is 0
        let z_score = ((est - want).abs() - 1e-9 * ka.diagonal().abs()).max(0.0) / se.max(f64::MIN_POSITIVE);
        worst = worst.max(z_score);
        if z_score > 4.0 {
            bad.push(format!(
                "({},{})x({},{}): {est:.4} vs {want:.4} (se {se:.4})",
                ka.index.h, ka.index.m, kb.index.h, kb.index.m
            ));
        }
    }
    let detail = if bad.is_empty() {
        format!("10 index pairs, worst deviation {worst:.2} standard errors")
    } else {
        bad.join("; ")
    };
    Ok(check("orthogonality_idempotency", bad.is_empty(), detail))
}

/// Relative eigenvalue tolerance used by `verify`.
pub const EIGEN_TOL: f64 = 5e-3;

fn verify_eigenvalues(bank: &KernelBank, cfg: &RunConfig) -> Check {
    // steps outside the recommended range are run anyway so the failure shows
    // up as an eigenvalue error
    let fd = FDConfig { step: cfg.fd_step, richardson: true };
    let x0 = SpherePoint::basis(cfg.n, 0);
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for k in bank.kernels().iter().filter(|k| k.index.h <= 6) {
        match eigencheck(k, &x0, 64, cfg.seed, &fd) {
            Ok(r) => {
                worst = worst.max(r.max_rel_err());
                if r.max_rel_err() >= EIGEN_TOL {
                    bad.push(format!(
                        "({},{}): Δ {:.4} vs {}, Γ {:.4} vs {}",
                        k.index.h, k.index.m, r.lambda_delta_est, r.lambda_delta, r.lambda_gamma_est, r.lambda_gamma
                    ));
                }
            }
            Err(e) => bad.push(e.to_string()),
        }
    }
    let detail =
        if bad.is_empty() { format!("max relative error {worst:.2e} < {EIGEN_TOL:e}") } else { bad.join("; ") };
    check("eigenvalues", bad.is_empty(), detail)
}

fn verify_l1_l2() -> Check {
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        for h in 0..=100 {
            for m in 0..=h / 2 {
                let (l1, l2) = l1_l2_identity(h, m, n);
                worst = worst.max((l1 - h as f64).abs()).max((l2 - (h - 2 * m) as f64).abs());
            }
        }
    }
    check("l1_l2_identity", worst <= 1e-12, format!("max deviation {worst:e} over h <= 100, 2 <= n <= 5"))
}

fn verify_psi(epsilon: f64) -> Check {
    let mut bad = Vec::new();
    for h in (2..=40).step_by(2) {
        if psi(h as f64, (h / 2) as f64, epsilon) != 1.0 {
            bad.push(format!("psi({h}, {}) != 1", h / 2));
        }
    }
    for u in [1.0, 1.5, 3.0, 7.25] {
        for i in 0..=20 {
            let v = u * i as f64 / 20.0;
            let p = psi(u, v, epsilon);
            if (psi(2.0 * u, 2.0 * v, epsilon) - p).abs() > 1e-12 {
                bad.push(format!("not 0-homogeneous at ({u}, {v})"));
            }
            let off = (v / u - 0.5).abs();
            if off >= epsilon && p != 0.0 {
                bad.push(format!("psi({u}, {v}) = {p} outside the cone"));
            }
            if off <= epsilon / 2.0 && p != 1.0 {
                bad.push(format!("psi({u}, {v}) = {p} inside the half cone"));
            }
        }
    }
    // no spikes in the first three differences across the transition band
    let dr = 3.0 * epsilon / 600.0;
    let mut diffs: Vec<f64> = (0..=600).map(|i| psi(1.0, 0.5 - 1.5 * epsilon + i as f64 * dr, epsilon)).collect();
    for order in 1..=3 {
        diffs = diffs.windows(2).map(|w| (w[1] - w[0]) / dr).collect();
        let spike = diffs.windows(21).any(|w| {
            let mut local: Vec<f64> = w.iter().map(|d| d.abs()).collect();
            let centre = local[10];
            centre > 1e-6 && centre > 10.0 * crate::diffops::median(&mut local)
        });
        if spike {
            bad.push(format!("spike in difference of order {order}"));
        }
    }
    bad.dedup();
    let detail =
        if bad.is_empty() { "support, plateau, homogeneity and smoothness hold".into() } else { bad.join("; ") };
    check("psi", bad.is_empty(), detail)
}

fn verify_cone_gap(epsilon: f64) -> Check {
    let mut bad = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for k in 1..=20 {
        let ratio = 0.5_f64.powi(k);
        let v = match cone_gap_check(1.0, ratio) {
            Ok(v) => v,
            Err(e) => return check("cone_gap", false, e.to_string()),
        };
        if (v - 0.5).abs() >= ratio {
            bad.push(format!("k={k}: {v} not within 2^-k of 1/2"));
        }
        if v < prev {
            bad.push(format!("k={k}: not monotone"));
        }
        if k >= 6 && psi(1.0, v, epsilon) != 1.0 {
            bad.push(format!("k={k}: psi(1, {v}) != 1"));
        }
        prev = v;
    }
    let detail = if bad.is_empty() {
        "b/a = 2^-k, k <= 20: converges to 1/2, psi = 1 from k = 6".into()
    } else {
        bad.join("; ")
    };
    check("cone_gap", bad.is_empty(), detail)
}

/// `spectrum`: scans the measure and writes `spectrum.json` and `spectrum.csv`.
pub fn cmd_spectrum(mu: &DiscreteMeasure, cfg: &RunConfig) -> Result<SpectrumReport> {
    cfg.validate()?;
    let bank = bank_from_cache(cfg)?;
    let report = spectrum_scan(mu, &bank, cfg.epsilon, cfg.probes, cfg.seed)?;
    cfg.write_output("spectrum.json", &to_json(&report)?)?;
    cfg.write_output("spectrum.csv", &report.to_csv())?;
    Ok(report)
}

/// Output of `multiplier`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierOutput {
    pub measure: String,
    pub epsilon: f64,
    pub h_max: usize,
    pub points: Vec<MultiplierPoint>,
    /// Spectrum of `(L₃μ) σ` discretized on `mc_samples` points.
    pub spectrum: SpectrumReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierPoint {
    pub x: Vec<f64>,
    #[serde(flatten)]
    pub value: MultiplierValue,
}

/// Number of sample points at which `multiplier` reports `L₃μ`.
pub const MULTIPLIER_POINTS: usize = 16;

/// `multiplier`: evaluates `L₃μ` at a few points and scans its spectrum.
pub fn cmd_multiplier(mu: &DiscreteMeasure, cfg: &RunConfig) -> Result<MultiplierOutput> {
    cfg.validate()?;
    let bank = bank_from_cache(cfg)?;
    let xs = sample_sphere(cfg.n, MULTIPLIER_POINTS, subseed(cfg.seed, TAG_POINTS))?;
    let points = xs
        .iter()
        .map(|x| Ok(MultiplierPoint { x: x.to_real(), value: apply_multiplier(mu, &bank, cfg.epsilon, x)? }))
        .collect::<Result<Vec<_>>>()?;
    let l3 = multiplier_measure(mu, &bank, cfg.epsilon, cfg.mc_samples, cfg.seed)?;
    let spectrum = spectrum_scan(&l3, &bank, cfg.epsilon, cfg.probes, cfg.seed)?;
    let out = MultiplierOutput { measure: mu.name().into(), epsilon: cfg.epsilon, h_max: cfg.h_max, points, spectrum };
    cfg.write_output("multiplier.json", &to_json(&out)?)?;
    cfg.write_output("multiplier_spectrum.csv", &out.spectrum.to_csv())?;
    Ok(out)
}

/// `dimension`: correlation dimension, written as `dimension.json` and the
/// fit data as `dimension_fit.csv`.
pub fn cmd_dimension(mu: &DiscreteMeasure, cfg: &RunConfig) -> Result<DimensionEstimate> {
    cfg.validate()?;
    let est = correlation_dimension(mu)?;
    cfg.write_output("dimension.json", &to_json(&est)?)?;
    cfg.write_output("dimension_fit.csv", &est.fit_csv())?;
    Ok(est)
}

/// `report`: the consistency report, written as `report.json`.
pub fn cmd_report(mu: &DiscreteMeasure, cfg: &RunConfig) -> Result<ConsistencyReport> {
    cfg.validate()?;
    let bank = bank_from_cache(cfg)?;
    let report = theorem_consistency_report(mu, &bank, cfg.epsilon, cfg.probes, cfg.seed)?;
    cfg.write_output("report.json", &to_json(&report)?)?;
    Ok(report)
}

/// Reads a config file if one was given.
pub fn read_config_file(path: Option<&Path>, cfg: &mut RunConfig) -> Result<()> {
    if let Some(p) = path {
        cfg.apply_file(&fs::read_to_string(p)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_and_overrides() {
        let mut cfg = RunConfig::default();
        cfg.apply_file("# comment\nn = 3\nh-max=4\nepsilon=0.2\n\ncache=/tmp/c.json\n").unwrap();
        assert_eq!((cfg.n, cfg.h_max, cfg.epsilon), (3, 4, 0.2));
        assert_eq!(cfg.cache_path, PathBuf::from("/tmp/c.json"));
        cfg.set("seed", "9").unwrap();
        assert_eq!(cfg.seed, 9);
        assert!(matches!(cfg.apply_file("n=2\nbogus=1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(cfg.apply_file("n 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(cfg.set("probes", "-1").is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.epsilon = 0.5;
        assert!(cfg.validate().is_err());
        cfg = RunConfig { probes: 0, ..RunConfig::default() };
        assert!(cfg.validate().is_err());
        cfg = RunConfig { n: 1, ..RunConfig::default() };
        assert!(cfg.validate().is_err());
        // coarse steps are accepted here and rejected by the eigenvalue check
        cfg = RunConfig { fd_step: 0.5, ..RunConfig::default() };
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn fixtures_by_name() {
        let cfg = RunConfig { atoms: 10, ..RunConfig::default() };
        assert_eq!(fixture("uniform", &cfg).unwrap().len(), 10);
        assert_eq!(fixture("point", &cfg).unwrap().len(), 1);
        assert_eq!(fixture("subsphere:1", &cfg).unwrap().name(), "subsphere:1");
        assert_eq!(fixture("sp1-orbit", &cfg).unwrap().blocks(), 10);
        assert!(fixture("subsphere:3", &cfg).is_err());
        assert!(fixture("subsphere:x", &cfg).is_err());
        assert!(fixture("torus", &cfg).is_err());
    }

    #[test]
    fn cheap_checks_pass() {
        assert!(verify_l1_l2().passed);
        assert!(verify_psi(0.1).passed);
        assert!(verify_psi(0.3).passed);
        assert!(verify_cone_gap(0.1).passed);
    }
}
