use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rswlab_cli::{resolve_manifest, run_manifest, write_outputs, HarnessError, Overrides, PRESETS};
use rswlab_core::geometry::{graph_ball, isoperimetric_profile, IsoOptions};
use rswlab_core::graph_io::serialize_graph;
use rswlab_core::rsw::{build_environment, EnvSpec};
use rswlab_core::Point;

#[derive(Parser)]
#[command(
    name = "rswlab",
    version,
    about = "Random-walk crossing, spanning-tree coupling and dimer height experiments"
)]
struct Cli {
    /// Master seed (overrides the manifest).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (overrides the manifest; default "out").
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample an environment around the origin and write it as a graph file.
    Generate(EnvArgs),
    /// Isoperimetric profile of a graph ball around the vertex closest to the origin.
    Diagnose {
        #[command(flatten)]
        env: EnvArgs,
        /// Ball radius in graph distance.
        #[arg(long, default_value_t = 3)]
        radius: u32,
        /// Largest subset size enumerated.
        #[arg(long, default_value_t = 8)]
        max_size: usize,
    },
    /// Crossing failure curve over a ladder of scales.
    RswCurve(ExpArgs),
    /// Iterated spanning-tree couplings over a ladder of meshes.
    Couple(ExpArgs),
    /// Height-field moments against the Gaussian free field target.
    DimerMoments(ExpArgs),
    /// List preset names.
    PresetList,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnvKind {
    Lattice,
    Perc,
    Voronoi,
}

#[derive(Args)]
struct EnvArgs {
    #[arg(long, value_enum, default_value = "lattice")]
    env: EnvKind,
    /// Open-edge probability for percolation.
    #[arg(long, default_value_t = 0.85)]
    p: f64,
    /// Point intensity for Voronoi.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Half-side of the sampled box.
    #[arg(long, default_value_t = 16)]
    half: usize,
}

impl EnvArgs {
    fn spec(&self) -> EnvSpec {
        match self.env {
            EnvKind::Lattice => EnvSpec::Lattice,
            EnvKind::Perc => EnvSpec::Percolation { p: self.p },
            EnvKind::Voronoi => EnvSpec::Voronoi { lambda: self.lambda },
        }
    }
}

#[derive(Args)]
struct ExpArgs {
    #[arg(long)]
    preset: Option<String>,
    /// Manifest file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set ladder=8,16`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rswlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
    }
    let out_dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let seed = cli.seed.unwrap_or(1);
    match cli.cmd {
        Cmd::Generate(env) => {
            let spec = env.spec();
            let g = build_environment(&spec, env.half, seed).map_err(|e| HarnessError::Runtime(e.to_string()))?;
            fs::create_dir_all(&out_dir)?;
            let path = out_dir.join(format!("{}-{}-{seed}.graph", spec.label(), env.half));
            fs::write(&path, serialize_graph(&g))?;
            println!("{} vertices, {} edges -> {}", g.len(), g.edge_count(), path.display());
        }
        Cmd::Diagnose { env, radius, max_size } => {
            let spec = env.spec();
            let g = build_environment(&spec, env.half, seed).map_err(|e| HarnessError::Runtime(e.to_string()))?;
            let centre = g.closest_vertex(Point::ORIGIN).ok_or_else(|| HarnessError::Runtime("empty graph".into()))?;
            let ball = graph_ball(&g, centre, radius).map_err(|e| HarnessError::Runtime(e.to_string()))?;
            let rep = isoperimetric_profile(&g, &ball, &IsoOptions::exhaustive(max_size))
                .map_err(|e| HarnessError::Runtime(e.to_string()))?;
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            let csv = format!(
                "env,seed,center,radius,ball_size,max_size,subsets,min_ratio,fitted_c_i\n{},{seed},{},{},{},{},{},{},{}\n",
                spec.label(),
                rep.ball_center,
                rep.ball_radius,
                rep.ball_size,
                rep.max_size,
                rep.subsets_evaluated,
                opt(rep.min_ratio),
                opt(rep.fitted_c_i)
            );
            fs::create_dir_all(&out_dir)?;
            let path = out_dir.join(format!("diagnose-{}-{seed}.csv", spec.label()));
            fs::write(&path, &csv)?;
            print!("{csv}");
        }
        Cmd::RswCurve(a) => experiment("rsw-curve", a, &cli.seed, &cli.out_dir)?,
        Cmd::Couple(a) => experiment("couple", a, &cli.seed, &cli.out_dir)?,
        Cmd::DimerMoments(a) => experiment("dimer-moments", a, &cli.seed, &cli.out_dir)?,
        Cmd::PresetList => {
            for p in PRESETS {
                println!("{p}");
            }
        }
    }
    Ok(())
}

fn experiment(kind: &str, a: ExpArgs, seed: &Option<u64>, out_dir: &Option<PathBuf>) -> Result<(), HarnessError> {
    let config_text = match &a.config {
        Some(p) => {
            Some(fs::read_to_string(p).map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", p.display())))?)
        }
        None => None,
    };
    let o = Overrides { preset: a.preset, config_text, seed: *seed, out_dir: out_dir.clone(), sets: a.sets };
    let m = resolve_manifest(kind, &o)?;
    let table = run_manifest(&m)?;
    let (csv, man) = write_outputs(&m, &table)?;
    println!("{} rows -> {} ({})", table.rows.len(), csv.display(), man.display());
    Ok(())
}
