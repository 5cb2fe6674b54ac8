use std::fmt::Write as _;
use std::path::PathBuf;

use rswlab_core::rng::derive_seed;
use rswlab_core::rsw::EnvSpec;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::HarnessError;

pub const VERSION: &str = concat!("rswlab-", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Calibration {
    /// Fixed threshold.
    Fixed(f64),
    /// `factor` times the exact lattice crossing constant at scale `m`.
    Lattice { factor: f64, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorChoice {
    Exact,
    MonteCarlo { trials: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestShape {
    Sine,
    /// Bump centred in the unit square.
    Bump {
        radius: f64,
    },
}

/// Experiment kind and its own parameters. The ladder holds `n` for crossing
/// curves, the mesh `δ` for couplings and height moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Experiment {
    RswCurve {
        c: Calibration,
        env_seeds: u64,
        estimator: EstimatorChoice,
        confidence: f64,
    },
    /// Iterated couplings around the origin on lattice domains `Λ_inner` / `Λ_outer`.
    Couple {
        runs: u64,
        r: f64,
        inner: f64,
        outer: f64,
        r0_factor: f64,
        c0: f64,
    },
    DimerMoments {
        ensemble: usize,
        phi: TestShape,
        terms: usize,
        quad: usize,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::RswCurve { .. } => "rsw-curve",
            Experiment::Couple { .. } => "couple",
            Experiment::DimerMoments { .. } => "dimer-moments",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentManifest {
    pub name: String,
    pub env: EnvSpec,
    pub ladder: Vec<f64>,
    pub master_seed: u64,
    pub experiment: Experiment,
    pub out_dir: PathBuf,
    pub version: String,
}

impl ExperimentManifest {
    /// Seed of ladder unit `i`.
    pub fn unit_seed(&self, i: usize) -> u64 {
        derive_seed(self.master_seed, i as u64)
    }

    pub fn unit_seeds(&self) -> Vec<u64> {
        (0..self.ladder.len()).map(|i| self.unit_seed(i)).collect()
    }

    pub fn csv_path(&self) -> PathBuf {
        self.out_dir.join(format!("{}.csv", self.name))
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.out_dir.join(format!("{}.manifest", self.name))
    }

    /// Canonical text: fixed key order, shortest round-trip floats. Parsing
    /// it back gives the same manifest.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        kv("name", self.name.clone());
        kv("experiment", self.experiment.kind().into());
        match self.env {
            EnvSpec::Lattice => kv("env", "lattice".into()),
            EnvSpec::Percolation { p } => {
                kv("env", "perc".into());
                kv("p", p.to_string());
            }
            EnvSpec::Voronoi { lambda } => {
                kv("env", "voronoi".into());
                kv("lambda", lambda.to_string());
            }
        }
        kv("ladder", self.ladder.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
        kv("seed", self.master_seed.to_string());
        match self.experiment {
            Experiment::RswCurve { c, env_seeds, estimator, confidence } => {
                match c {
                    Calibration::Fixed(c) => kv("c", c.to_string()),
                    Calibration::Lattice { factor, m } => {
                        kv("c_factor", factor.to_string());
                        kv("c_m", m.to_string());
                    }
                }
                kv("env_seeds", env_seeds.to_string());
                match estimator {
                    EstimatorChoice::Exact => kv("estimator", "exact".into()),
                    EstimatorChoice::MonteCarlo { trials } => {
                        kv("estimator", "mc".into());
                        kv("trials", trials.to_string());
                    }
                }
                kv("confidence", confidence.to_string());
            }
            Experiment::Couple { runs, r, inner, outer, r0_factor, c0 } => {
                kv("runs", runs.to_string());
                kv("r", r.to_string());
                kv("inner", inner.to_string());
                kv("outer", outer.to_string());
                kv("r0_factor", r0_factor.to_string());
                kv("c0", c0.to_string());
            }
            Experiment::DimerMoments { ensemble, phi, terms, quad } => {
                kv("ensemble", ensemble.to_string());
                match phi {
                    TestShape::Sine => kv("phi", "sine".into()),
                    TestShape::Bump { radius } => {
                        kv("phi", "bump".into());
                        kv("radius", radius.to_string());
                    }
                }
                kv("terms", terms.to_string());
                kv("quad", quad.to_string());
            }
        }
        kv("out_dir", self.out_dir.display().to_string());
        kv("version", self.version.clone());
        s
    }

    /// Hex SHA-256 of the canonical text.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        Self::from_config(Config::parse(text)?)
    }

    pub fn from_config(mut c: Config) -> Result<Self, HarnessError> {
        let kind: String = c.take("experiment")?;
        let name: String = c.take_or("name", kind.clone())?;
        let env = match c.take_or("env", "lattice".to_string())?.as_str() {
            "lattice" => EnvSpec::Lattice,
            "perc" => EnvSpec::Percolation { p: c.take("p")? },
            "voronoi" => EnvSpec::Voronoi { lambda: c.take("lambda")? },
            other => return Err(HarnessError::Config(format!("unknown env {other:?}"))),
        };
        let ladder: Vec<f64> = c.take_list("ladder")?;
        let master_seed: u64 = c.take_or("seed", 1)?;
        let experiment = match kind.as_str() {
            "rsw-curve" => {
                let cal = if c.contains("c") {
                    Calibration::Fixed(c.take("c")?)
                } else {
                    Calibration::Lattice { factor: c.take_or("c_factor", 0.5)?, m: c.take_or("c_m", 8)? }
                };
                let estimator = match c.take_or("estimator", "exact".to_string())?.as_str() {
                    "exact" => EstimatorChoice::Exact,
                    "mc" => EstimatorChoice::MonteCarlo { trials: c.take("trials")? },
                    other => return Err(HarnessError::Config(format!("unknown estimator {other:?}"))),
                };
                Experiment::RswCurve {
                    c: cal,
                    env_seeds: c.take("env_seeds")?,
                    estimator,
                    confidence: c.take_or("confidence", 0.95)?,
                }
            }
            "couple" => Experiment::Couple {
                runs: c.take("runs")?,
                r: c.take("r")?,
                inner: c.take("inner")?,
                outer: c.take("outer")?,
                r0_factor: c.take_or("r0_factor", 5.0)?,
                c0: c.take_or("c0", 4.0)?,
            },
            "dimer-moments" => {
                let phi = match c.take_or("phi", "sine".to_string())?.as_str() {
                    "sine" => TestShape::Sine,
                    "bump" => TestShape::Bump { radius: c.take("radius")? },
                    other => return Err(HarnessError::Config(format!("unknown test function {other:?}"))),
                };
                Experiment::DimerMoments {
                    ensemble: c.take("ensemble")?,
                    phi,
                    terms: c.take_or("terms", 64)?,
                    quad: c.take_or("quad", 256)?,
                }
            }
            other => return Err(HarnessError::Config(format!("unknown experiment {other:?}"))),
        };
        let out_dir = PathBuf::from(c.take_or("out_dir", "out".to_string())?);
        let version = c.take_or("version", VERSION.to_string())?;
        c.finish()?;
        let m = ExperimentManifest { name, env, ladder, master_seed, experiment, out_dir, version };
        m.validate()?;
        Ok(m)
    }

    /// Parameter ranges; called before any computation.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("name {:?} is not a plain file stem", self.name));
        }
        match self.env {
            EnvSpec::Percolation { p } if !(p > 0.5 && p <= 1.0) => return bad(format!("p = {p} outside (1/2, 1]")),
            EnvSpec::Voronoi { lambda } if !(lambda > 0.0) => {
                return bad(format!("lambda = {lambda} must be positive"))
            }
            _ => {}
        }
        match self.experiment {
            Experiment::RswCurve { c, env_seeds, estimator, confidence } => {
                if self.ladder.iter().any(|&n| !(n >= 1.0 && n.fract() == 0.0)) {
                    return bad("rsw-curve ladder entries must be positive integers".into());
                }
                match c {
                    Calibration::Fixed(c) if !(0.0..=1.0).contains(&c) => {
                        return bad(format!("c = {c} outside [0, 1]"))
                    }
                    Calibration::Lattice { factor, m } if !(factor > 0.0) || m == 0 => {
                        return bad("c_factor must be positive and c_m at least 1".into())
                    }
                    _ => {}
                }
                if env_seeds == 0 {
                    return bad("env_seeds must be positive".into());
                }
                if matches!(estimator, EstimatorChoice::MonteCarlo { trials: 0 }) {
                    return bad("trials must be positive".into());
                }
                if !(confidence > 0.0 && confidence < 1.0) {
                    return bad(format!("confidence = {confidence} outside (0, 1)"));
                }
            }
            Experiment::Couple { runs, r, inner, outer, r0_factor, c0 } => {
                if self.env != EnvSpec::Lattice {
                    return bad("couple runs on the lattice only".into());
                }
                if self.ladder.iter().any(|&d| !(d > 0.0 && d < r)) {
                    return bad("couple ladder entries are meshes in (0, r)".into());
                }
                if runs == 0 || !(r > 0.0) || !(2.0 * r <= inner) || !(inner <= outer) {
                    return bad("couple needs runs > 0 and 0 < 2r <= inner <= outer".into());
                }
                if !(r0_factor >= 0.0 && c0 > 0.0) {
                    return bad("r0_factor must be non-negative and c0 positive".into());
                }
            }
            Experiment::DimerMoments { ensemble, phi, terms, quad } => {
                if self.env != EnvSpec::Lattice {
                    return bad("dimer-moments runs on the unit-square lattice only".into());
                }
                if self.ladder.iter().any(|&d| !(d > 0.0 && d <= 0.5 && (1.0 / d).fract() == 0.0)) {
                    return bad("dimer-moments ladder entries are meshes 1/k with k >= 2".into());
                }
                if ensemble < 30 || terms == 0 || quad == 0 {
                    return bad("dimer-moments needs ensemble >= 30, terms > 0, quad > 0".into());
                }
                if let TestShape::Bump { radius } = phi {
                    if !(radius > 0.0 && radius < 0.5) {
                        return bad(format!("bump radius {radius} outside (0, 1/2)"));
                    }
                }
            }
        }
        Ok(())
    }
}

pub const PRESETS: [&str; 4] = ["rsw-perc", "rsw-voronoi", "couple-tail", "gff-moments"];

/// Desk-scale defaults for the named experiment.
pub fn preset(name: &str) -> Result<ExperimentManifest, HarnessError> {
    let base = |name: &str, env, ladder: Vec<f64>, experiment| ExperimentManifest {
        name: name.into(),
        env,
        ladder,
        master_seed: 1,
        experiment,
        out_dir: PathBuf::from("out"),
        version: VERSION.into(),
    };
    let curve = Experiment::RswCurve {
        c: Calibration::Lattice { factor: 0.5, m: 8 },
        env_seeds: 200,
        estimator: EstimatorChoice::Exact,
        confidence: 0.95,
    };
    Ok(match name {
        "rsw-perc" => base(name, EnvSpec::Percolation { p: 0.85 }, vec![8.0, 16.0, 32.0], curve),
        "rsw-voronoi" => base(name, EnvSpec::Voronoi { lambda: 1.0 }, vec![8.0, 16.0, 32.0], curve),
        "couple-tail" => base(
            name,
            EnvSpec::Lattice,
            vec![1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
            Experiment::Couple { runs: 200, r: 0.9, inner: 2.0, outer: 2.5, r0_factor: 5.0, c0: 4.0 },
        ),
        "gff-moments" => base(
            name,
            EnvSpec::Lattice,
            vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0],
            Experiment::DimerMoments { ensemble: 100, phi: TestShape::Sine, terms: 64, quad: 256 },
        ),
        _ => return Err(HarnessError::Config(format!("unknown preset {name:?} (known: {})", PRESETS.join(", ")))),
    })
}
