use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dvflow::harness::{self, all_passed, csv_table, write_outputs, Check, CHECK_INVENTORY};
use dvflow::mesh::save_json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dvflow", version, about = "DEC barotropic flow solver and experiment harness")]
struct Cli {
    /// Print every assertion the commands can make and exit.
    #[arg(long)]
    list_checks: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct Io {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Build a mesh, write mesh.json and its regularity report.
    Gen(Io),
}

#[derive(Subcommand)]
enum Command {
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Single time-dependent run with an invariant CSV.
    Run(Io),
    /// MMS convergence study over a mesh family.
    Converge(Io),
    /// Low-Mach scan.
    Lowmach(Io),
    /// Energy residual scaling and the v/2v witness.
    Nogo(Io),
    /// Upwind positivity stress.
    Positivity(Io),
    /// Hessian and bridge checks at equilibria.
    Lyapunov(Io),
    /// Circulation along advected loops.
    Kelvin(Io),
}

fn load<T: harness::Config>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn f(x: usize) -> f64 {
    x as f64
}

fn execute(cmd: Command) -> Result<Vec<Check>> {
    Ok(match cmd {
        Command::Mesh(MeshCommand::Gen(io)) => {
            let spec: harness::MeshSpec = load(&io.config)?;
            let (c, rep) = harness::mesh_gen(&spec)?;
            std::fs::create_dir_all(&io.out)?;
            save_json(&c, &io.out.join("mesh.json"))?;
            write_outputs(&io.out, "mesh_gen", &spec, spec.seed, &rep, &rep.checks, None)?;
            rep.checks
        }
        Command::Run(io) => {
            let cfg: harness::RunConfig = load(&io.config)?;
            let rep = harness::run(&cfg)?;
            let csv = rep.invariants.to_csv();
            write_outputs(&io.out, "run", &cfg, cfg.mesh.seed, &rep, &rep.checks, Some(("invariants.csv", &csv)))?;
            rep.checks
        }
        Command::Converge(io) => {
            let cfg: harness::ConvergeConfig = load(&io.config)?;
            let rep = harness::converge(&cfg)?;
            let csv = csv_table(
                &["viscosity", "n", "h", "dt", "steps", "acoustic_cfl", "velocity_error", "density_error"],
                rep.levels.iter().map(|l| {
                    vec![f(l.viscosity), f(l.n), l.h, l.dt, f(l.steps), l.acoustic_cfl, l.velocity_error, l.density_error]
                }),
            );
            write_outputs(&io.out, "converge", &cfg, cfg.family.seed, &rep, &rep.checks, Some(("levels.csv", &csv)))?;
            rep.checks
        }
        Command::Lowmach(io) => {
            let cfg: harness::LowMachConfig = load(&io.config)?;
            let rep = harness::lowmach(&cfg)?;
            let csv = csv_table(
                &["mach", "dt", "steps", "df_max_re", "dw_fluctuation_drift", "dw_fluctuation_rate", "density_deviation"],
                rep.rows.iter().map(|r| {
                    vec![r.mach, r.dt, f(r.steps), r.df_max_re, r.dw_fluctuation_drift, r.dw_fluctuation_rate, r.density_deviation]
                }),
            );
            write_outputs(&io.out, "lowmach", &cfg, cfg.mesh.seed, &rep, &rep.checks, Some(("scan.csv", &csv)))?;
            rep.checks
        }
        Command::Nogo(io) => {
            let cfg: harness::NogoConfig = load(&io.config)?;
            let rep = harness::nogo(&cfg)?;
            let csv = csv_table(
                &["n", "h", "centred", "upwind"],
                rep.levels.iter().map(|l| vec![f(l.n), l.h, l.centred, l.upwind]),
            );
            write_outputs(&io.out, "nogo_scaling", &cfg, cfg.family.seed, &rep, &rep.checks, Some(("levels.csv", &csv)))?;
            rep.checks
        }
        Command::Positivity(io) => {
            let cfg: harness::PositivityConfig = load(&io.config)?;
            let rep = harness::positivity(&cfg)?;
            let csv = csv_table(
                &["t", "rho_min", "rho_max", "lower", "upper"],
                rep.compressive.samples.iter().map(|s| vec![s.t, s.rho_min, s.rho_max, s.lower, s.upper]),
            );
            write_outputs(&io.out, "positivity", &cfg, cfg.mesh.seed, &rep, &rep.checks, Some(("envelope.csv", &csv)))?;
            rep.checks
        }
        Command::Lyapunov(io) => {
            let cfg: harness::LyapunovConfig = load(&io.config)?;
            let rep = harness::lyapunov(&cfg)?;
            let csv = csv_table(
                &["u", "rhs_norm", "min_eigenvalue", "bridge_residual", "momentum_rate", "momentum_scale"],
                rep.flows.iter().map(|r| {
                    vec![r.u, r.hessian.rhs_norm, r.hessian.min_eigenvalue, r.hessian.bridge_residual, r.momentum_rate, r.momentum_scale]
                }),
            );
            write_outputs(&io.out, "lyapunov", &cfg, cfg.mesh.seed, &rep, &rep.checks, Some(("flows.csv", &csv)))?;
            rep.checks
        }
        Command::Kelvin(io) => {
            let cfg: harness::KelvinConfig = load(&io.config)?;
            let rep = harness::kelvin(&cfg)?;
            let csv = csv_table(
                &["steps", "dt", "drift", "max_boundary"],
                rep.df.iter().map(|l| vec![f(l.steps), l.dt, l.drift, l.max_boundary]),
            );
            write_outputs(&io.out, "kelvin", &cfg, cfg.mesh.seed, &rep, &rep.checks, Some(("df_drift.csv", &csv)))?;
            let dw = csv_table(&["n", "h", "defect"], rep.dw.iter().map(|l| vec![f(l.n), l.h, l.defect]));
            std::fs::write(io.out.join("dw_defect.csv"), dw)?;
            rep.checks
        }
    })
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    if cli.list_checks {
        for (cmd, name, what) in CHECK_INVENTORY {
            println!("{cmd:<11} {name:<26} {what}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let Some(cmd) = cli.command else {
        bail!("no command given; see --help");
    };
    let checks = execute(cmd)?;
    for c in &checks {
        println!("{}", c.line());
    }
    Ok(if all_passed(&checks) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
