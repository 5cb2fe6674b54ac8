use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use rswlab_core::dimer::{
    build_temperleyan, estimate_height_moments, gff_target_variance, height_ensemble, unit_square_lattice, TestFunction,
};
use rswlab_core::env::generate_square_lattice;
use rswlab_core::rng::derive_seed;
use rswlab_core::rsw::{crossing_curve, lattice_crossing_constant};
use rswlab_core::ust::{iterated_coupling, CouplingParams, WiredGraph};
use rswlab_core::walk::Estimator;
use rswlab_core::{Point, Rect};

use crate::config::Config;
use crate::manifest::{preset, Calibration, EstimatorChoice, Experiment, ExperimentManifest, TestShape};
use crate::table::ResultTable;
use crate::HarnessError;

/// Command-line layers applied on top of a preset and/or config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub config_text: Option<String>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub sets: Vec<String>,
}

/// Preset, then config file, then `--seed` / `--out-dir`, then `--set`.
/// The experiment kind must agree with `kind`.
pub fn resolve_manifest(kind: &str, o: &Overrides) -> Result<ExperimentManifest, HarnessError> {
    let mut c = match &o.preset {
        Some(name) => Config::parse(&preset(name)?.to_text())?,
        None => Config::default(),
    };
    if let Some(text) = &o.config_text {
        for assignment in Config::parse(text)?.into_assignments() {
            c.set(&assignment)?;
        }
    }
    if let Some(s) = o.seed {
        c.insert("seed", s);
    }
    if let Some(d) = &o.out_dir {
        c.insert("out_dir", d.display());
    }
    for s in &o.sets {
        c.set(s)?;
    }
    if !c.contains("experiment") {
        c.insert("experiment", kind);
    }
    let m = ExperimentManifest::from_config(c)?;
    if m.experiment.kind() != kind {
        return Err(HarnessError::Config(format!("manifest describes {:?}, not {kind:?}", m.experiment.kind())));
    }
    Ok(m)
}

/// Runs every ladder unit in order. Unit `i` draws all randomness from
/// `unit_seed(i)`, so a table depends on the manifest alone.
pub fn run_manifest(m: &ExperimentManifest) -> Result<ResultTable, HarnessError> {
    m.validate()?;
    let mut table = ResultTable::new(m.experiment.kind(), m.hash())?;
    match m.experiment {
        Experiment::RswCurve { c, env_seeds, estimator, confidence } => {
            let c = match c {
                Calibration::Fixed(c) => c,
                Calibration::Lattice { factor, m } => factor * lattice_crossing_constant(m),
            };
            let est = match estimator {
                EstimatorChoice::Exact => Estimator::Exact,
                EstimatorChoice::MonteCarlo { trials } => Estimator::MonteCarlo { trials, seed: 0 },
            };
            for (i, &n) in m.ladder.iter().enumerate() {
                let rows = crossing_curve(&m.env, &[n as usize], c, env_seeds, m.unit_seed(i), est, confidence)
                    .map_err(HarnessError::runtime)?;
                table.rows.extend(rows.iter().map(|r| format!("{},{c}", r.csv())));
            }
        }
        Experiment::Couple { runs, r, inner, outer, r0_factor, c0 } => {
            for (i, &delta) in m.ladder.iter().enumerate() {
                let g = generate_square_lattice(Rect::square(Point::ORIGIN, outer), delta)
                    .map_err(HarnessError::runtime)?;
                let d2 =
                    WiredGraph::from_rect(&g, &Rect::square(Point::ORIGIN, outer)).map_err(HarnessError::runtime)?;
                let d1 = d2.with_rect(&Rect::square(Point::ORIGIN, inner)).map_err(HarnessError::runtime)?;
                let params = CouplingParams { c0, r0: r0_factor * delta, ..Default::default() };
                let unit = m.unit_seed(i);
                let rows = (0..runs)
                    .into_par_iter()
                    .map(|k| {
                        let seed = derive_seed(unit, k);
                        let st = iterated_coupling(&d1, &d2, Point::ORIGIN, r, params, seed)
                            .map_err(HarnessError::runtime)?;
                        Ok(format!("{delta},{k},{seed},{:?},{},{},{}", st.stage, st.n, st.i_z, st.agreement_radius))
                    })
                    .collect::<Result<Vec<_>, HarnessError>>()?;
                table.rows.extend(rows);
            }
        }
        Experiment::DimerMoments { ensemble, phi, terms, quad } => {
            let unit_box = Rect::square(Point::new(0.5, 0.5), 0.5);
            let phi = match phi {
                TestShape::Sine => TestFunction::Sine { domain: unit_box, amp: 1.0 },
                TestShape::Bump { radius } => TestFunction::Bump { center: Point::new(0.5, 0.5), radius, amp: 1.0 },
            };
            let target = gff_target_variance(&phi, &unit_box, terms, quad);
            for (i, &mesh) in m.ladder.iter().enumerate() {
                let tg = build_temperleyan(&unit_square_lattice(mesh).map_err(HarnessError::runtime)?)
                    .map_err(HarnessError::runtime)?;
                let x = tg.boundary()[0];
                let unit = m.unit_seed(i);
                let fields =
                    height_ensemble(&tg, x, mesh, ensemble, derive_seed(unit, 0)).map_err(HarnessError::runtime)?;
                let centring =
                    height_ensemble(&tg, x, mesh, ensemble, derive_seed(unit, 1)).map_err(HarnessError::runtime)?;
                let rep = estimate_height_moments(&fields, Some(&centring), &phi, &tg, &unit_box)
                    .map_err(HarnessError::runtime)?;
                table.rows.push(format!("{},{},{}", rep.csv(), target.variance, rep.variance / target.variance));
            }
        }
    }
    table.validate()?;
    Ok(table)
}

/// Writes `<name>.csv` and `<name>.manifest` under the manifest's out dir.
pub fn write_outputs(m: &ExperimentManifest, table: &ResultTable) -> Result<(PathBuf, PathBuf), HarnessError> {
    table.validate()?;
    fs::create_dir_all(&m.out_dir)?;
    let (csv, man) = (m.csv_path(), m.manifest_path());
    fs::write(&csv, table.to_csv())?;
    fs::write(&man, format!("# manifest_hash {}\n{}", m.hash(), m.to_text()))?;
    Ok((csv, man))
}
