use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dgfrac::driver::{pilot, RunConfig};
use dgfrac::io::{apply_override, parse_config, parse_config_with_base, preset, run_with_output, PRESET_NAMES};
use dgfrac::oracle_1d::{observed_orders, strip_convergence, Bar1DProblem};

#[derive(Parser)]
#[command(name = "dgfrac", version, about = "DG elastic waves with phase-field fracture")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write trace.csv and VTU snapshots.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Directory for trace.csv, config.txt and out_<step>.vtu.
        #[arg(short, long, default_value = "output")]
        output_dir: PathBuf,
    },
    /// Calibrate the pulse amplitude with an elastic-only probe run.
    Pilot {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Compare a straight-strip run with the 1D bar solution under refinement.
    #[command(name = "verify-1d")]
    Verify1d {
        #[command(flatten)]
        config: ConfigArgs,
        /// Number of refinement levels, starting at mesh.level.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Where to write verify_1d.csv.
        #[arg(short, long, default_value = "output")]
        output_dir: PathBuf,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file with `section.key = value` lines.
    config_file: Option<PathBuf>,
    /// Base preset the config file modifies.
    #[arg(long)]
    preset: Option<String>,
    /// `key=value` applied after the config file; may be repeated.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        let base = match &self.preset {
            Some(name) => Some(preset(name).with_context(|| {
                format!("unknown preset `{name}` (available: {})", PRESET_NAMES.join(", "))
            })?),
            None => None,
        };
        let mut cfg = match (&self.config_file, base) {
            (Some(path), base) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let parsed = match base {
                    Some(b) => parse_config_with_base(&text, b),
                    None => parse_config(&text),
                };
                parsed.with_context(|| format!("in {}", path.display()))?
            }
            (None, Some(base)) => base,
            (None, None) => bail!("give a config file, a --preset, or both"),
        };
        for o in &self.overrides {
            cfg = apply_override(&cfg, o)?;
        }
        Ok(cfg)
    }
}

fn run(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let trace = run_with_output(cfg, dir)?;
    let last = trace.records.last().context("no steps were taken")?;
    let dissipative = trace.records.iter().filter(|r| r.kind == dgfrac::driver::StepKind::Dissipative).count();
    println!("steps            {}", trace.records.len());
    println!("final time       {}", last.t);
    println!("final energy     {:e}", last.energy);
    println!("dissipative      {dissipative}");
    println!("cracked nodes    {}", last.cracked_nodes);
    match trace.first_crack() {
        Some(r) => println!("first crack      t = {}", r.t),
        None => println!("first crack      none"),
    }
    println!("output           {}", dir.display());
    Ok(())
}

fn verify_1d(cfg: &RunConfig, levels: usize, dir: &Path) -> Result<()> {
    if levels == 0 {
        bail!("--levels must be at least 1");
    }
    let sigma_c = cfg.phase.sigma_c;
    let results = strip_convergence(cfg, levels, sigma_c)?;
    let orders = observed_orders(&results);
    std::fs::create_dir_all(dir)?;
    let mut csv = String::from("level,h,dt,l2_error,order,free_end_ratio\n");
    for (i, r) in results.iter().enumerate() {
        let order = if i == 0 { String::new() } else { format!("{:?}", orders[i - 1]) };
        csv.push_str(&format!(
            "{},{:?},{:?},{:?},{},{:?}\n",
            r.level, r.h, r.dt, r.space_time_l2_error, order, r.free_end_ratio
        ));
    }
    let path = dir.join("verify_1d.csv");
    std::fs::write(&path, &csv)?;
    print!("{csv}");

    let bar = Bar1DProblem::from_strip(cfg)?;
    let finest = results.last().expect("levels >= 1");
    match bar.spall_location(sigma_c, cfg.t_end, 4000, 4000) {
        Ok(ev) => println!(
            "spall (analytic)  x = {:.4}  t = {:.4}  distance from free end = {:.4}",
            ev.x, ev.t, ev.distance_from_free_end
        ),
        Err(e) => println!("spall (analytic)  {e}"),
    }
    match &finest.first_exceedance {
        Some(ev) => println!(
            "spall (DG)        x = {:.4}  t = {:.4}  distance from free end = {:.4}",
            ev.x, ev.t, ev.distance_from_free_end
        ),
        None => println!("spall (DG)        stress stays below {sigma_c}"),
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output_dir } => run(&config.load()?, &output_dir),
        Command::Pilot { config } => {
            let cfg = config.load()?;
            let report = pilot(&cfg)?;
            let sigma_c = cfg.phase.sigma_c;
            let show = |label: &str, p: &dgfrac::driver::StressPeak| {
                println!(
                    "{label:<10} sigma_I {:e} at t {:.4} at x ({:.4}, {:.4})",
                    p.sigma_i, p.time, p.location[0], p.location[1]
                );
            };
            println!("probe amplitude {}", report.probe_amplitude);
            show("precursor", &report.precursor);
            show("window", &report.peak);
            println!("target {} * sigma_c -> amplitude {}", cfg.pilot.target_ratio, report.target_amplitude);
            if report.limited_by_precursor() {
                println!(
                    "limited by precursor ({} * sigma_c), window peak reaches {:.4} * sigma_c",
                    cfg.pilot.precursor_margin,
                    report.achieved_ratio(sigma_c)
                );
            }
            println!("pulse.amplitude_minus = {}", report.recommended_amplitude);
            Ok(())
        }
        Command::Verify1d { config, levels, output_dir } => verify_1d(&config.load()?, levels, &output_dir),
    }
}
