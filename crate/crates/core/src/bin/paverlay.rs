use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use paverlay::config::{parse_config, Preset, RunConfig};
use paverlay::results::{envelope, export_fields, write_history_csv};
use paverlay::solver::{run_passage, PassageSpec};
use paverlay::study::{markdown_report, published_table, run_sweep, MixtureAssignment, SweepTable};
use paverlay::{Error, Result};

/// Moving-load analysis of asphalt overlays on jointed concrete pavement.
#[derive(Parser)]
#[command(name = "paverlay", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Run configuration file (`block.key = value` lines).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Preset used when no configuration file is given.
    #[arg(long, global = true, default_value = "desk")]
    preset: String,
    /// Output directory; overrides `output_dir` from the configuration.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the mesh and write the mesh cache and a VTK file.
    Mesh,
    /// Run one load passage and write the probe history and a summary.
    Run {
        /// Also write the field state after these 0-based increments as VTK.
        #[arg(long = "vtk")]
        vtk: Vec<usize>,
    },
    /// Run the 27-case mixture sweep and write the sweep table.
    Sweep {
        /// Run only the first N combinations.
        #[arg(long)]
        limit: Option<usize>,
        /// Cases run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write the markdown study report for a sweep table.
    Report {
        /// Use the built-in published table.
        #[arg(long, conflicts_with = "table")]
        fixture: bool,
        /// Sweep table CSV.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Run the analytic benchmark suite.
    Validate,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error kind=usage exit=1: {first}");
            return ExitCode::from(1);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error kind={} exit={}: {msg}", e.kind(), e.exit_code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => parse_config(path).map_err(|e| match e {
            Error::Io { path, source } => Error::Invalid(format!("cannot read config {}: {source}", path.display())),
            other => other,
        })?,
        None => {
            let preset = Preset::parse(&g.preset)
                .ok_or_else(|| Error::Invalid(format!("unknown preset '{}' (desk, paper)", g.preset)))?;
            RunConfig::preset(preset)
        }
    };
    cfg.apply_env()?;
    if let Some(out) = &g.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Mesh => mesh(&load_config(&cli.global)?),
        Command::Run { vtk } => run(&load_config(&cli.global)?, vtk),
        Command::Sweep { limit, jobs } => sweep(&load_config(&cli.global)?, *limit, *jobs),
        Command::Report { fixture, table } => report(&cli.global, *fixture, table.as_deref()),
        Command::Validate => validate(),
    }
}

fn mesh(cfg: &RunConfig) -> Result<()> {
    let t = Instant::now();
    let mesh = cfg.build_mesh()?;
    ensure_dir(&cfg.output_dir)?;
    let cache = cfg.output_dir.join("mesh.bin");
    let vtk = cfg.output_dir.join("mesh.vtk");
    mesh.write_cache(&cache)?;
    export_fields(&mesh, None, &vtk)?;
    println!(
        "mesh nodes={} elements={} seconds={:.2}",
        mesh.node_count(),
        mesh.element_count(),
        t.elapsed().as_secs_f64()
    );
    println!("wrote {}", cache.display());
    println!("wrote {}", vtk.display());
    Ok(())
}

fn run(cfg: &RunConfig, vtk: &[usize]) -> Result<()> {
    let t = Instant::now();
    let catalog = cfg.catalog()?;
    let mesh = cfg.build_mesh()?;
    let probes = cfg.probes(&mesh)?;
    let footprints = cfg.footprints()?;
    let schedule = cfg.schedule()?;
    if let Some(&k) = vtk.iter().find(|&&k| k >= schedule.len()) {
        return Err(Error::Invalid(format!("--vtk {k}: the schedule has {} increments", schedule.len())));
    }
    let spec = PassageSpec {
        footprints: &footprints,
        pressure: cfg.pressure()?,
        schedule: &schedule,
        probes: &[probes.above_joint, probes.mid_slab],
        snapshots: vtk,
    };
    let out = run_passage(&mesh, &catalog, &spec, &cfg.solver)?;
    ensure_dir(&cfg.output_dir)?;
    let history = cfg.output_dir.join("history.csv");
    write_history_csv(&out.history, &history)?;
    for (k, state) in &out.snapshots {
        let path = cfg.output_dir.join(format!("fields_{k:04}.vtk"));
        export_fields(&mesh, Some(state), &path)?;
        println!("wrote {}", path.display());
    }
    let above = envelope(&out.history.probe(probes.above_joint)?)?;
    let mid = envelope(&out.history.probe(probes.mid_slab)?)?;
    let worst_eq = out.equilibrium_errors.iter().copied().fold(0.0, f64::max);
    let summary = format!(
        "elements = {}\nincrements = {}\nspeed_kmh = {:.3}\nabove_joint_element = {}\nmid_slab_element = {}\n\
         above_joint_s11_peak_kPa = {:.3}\nabove_joint_s11_load_x_mm = {:.1}\nabove_joint_s12_peak_kPa = {:.3}\n\
         above_joint_s12_load_x_mm = {:.1}\nmid_slab_s11_peak_kPa = {:.3}\nmid_slab_s12_peak_kPa = {:.3}\n\
         factorizations = {}\nmax_equilibrium_error = {:.3e}\nseconds = {:.2}\n",
        mesh.element_count(),
        schedule.len(),
        schedule.speed_kmh(),
        probes.above_joint,
        probes.mid_slab,
        above.s11_peak,
        above.s11_load_x,
        above.s12_peak,
        above.s12_load_x,
        mid.s11_peak,
        mid.s12_peak,
        out.factorizations,
        worst_eq,
        t.elapsed().as_secs_f64()
    );
    let path = cfg.output_dir.join("summary.txt");
    std::fs::write(&path, &summary).map_err(|source| Error::Io { path: path.clone(), source })?;
    print!("{summary}");
    println!("wrote {}", history.display());
    println!("wrote {}", path.display());
    Ok(())
}

fn sweep(cfg: &RunConfig, limit: Option<usize>, jobs: usize) -> Result<()> {
    if jobs == 0 {
        return Err(Error::Invalid("--jobs must be >= 1".into()));
    }
    let t = Instant::now();
    let catalog = cfg.catalog()?;
    let mut cases = MixtureAssignment::all();
    if let Some(n) = limit {
        if n == 0 {
            return Err(Error::Invalid("--limit must be >= 1".into()));
        }
        cases.truncate(n);
    }
    let table = run_sweep(cfg, &catalog, &cases, jobs)?;
    ensure_dir(&cfg.output_dir)?;
    let path = cfg.output_dir.join("sweep.csv");
    table.write_csv(&path)?;
    println!("cases={} seconds={:.2}", table.rows.len(), t.elapsed().as_secs_f64());
    println!("wrote {}", path.display());
    Ok(())
}

fn report(g: &Global, fixture: bool, table: Option<&Path>) -> Result<()> {
    let table = match (fixture, table) {
        (true, _) => published_table(),
        (false, Some(p)) => SweepTable::read_csv(p)?,
        (false, None) => return Err(Error::Invalid("report needs --fixture or --table FILE".into())),
    };
    let md = markdown_report(&table)?;
    match &g.out {
        Some(dir) => {
            ensure_dir(dir)?;
            let path = dir.join("report.md");
            std::fs::write(&path, &md).map_err(|source| Error::Io { path: path.clone(), source })?;
            println!("wrote {}", path.display());
        }
        None => print!("{md}"),
    }
    Ok(())
}

fn validate() -> Result<()> {
    let checks = paverlay::validate::run_suite();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if failed > 0 {
        return Err(Error::Solver(format!("{failed} of {} validation checks failed", checks.len())));
    }
    Ok(())
}
