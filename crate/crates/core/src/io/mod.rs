//! Configuration files, presets and output writers.

pub mod config;
pub mod presets;
pub mod trace;
pub mod vtu;

pub use config::{apply_override, parse_config, parse_config_with_base, serialize_config, KEYS};
pub use presets::{preset, PRESET_NAMES};
pub use trace::{read_trace, write_trace};
pub use vtu::{write_snapshot, write_vtu, CellField, PointField};

use std::path::Path;

use crate::driver::{OutputSchedule, RunConfig, RunTrace, Simulation};
use crate::error::Result;

/// Runs `config`, writing `config.txt`, `trace.csv` and `out_<step>.vtu`
/// snapshots into `dir` (created if needed).
pub fn run_with_output(config: &RunConfig, dir: &Path) -> Result<RunTrace> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("config.txt"), serialize_config(config))?;
    let mut sim = Simulation::new(config.clone())?;
    let mut schedule = OutputSchedule::new(config.output_interval);
    let tol = 1e-9 * config.dt_pf;
    if schedule.due(0.0, tol) {
        write_snapshot(&sim, &dir.join("out_0.vtu"))?;
    }
    let trace = sim.run_with(|sim, record| {
        if schedule.due(record.t, tol) {
            write_snapshot(sim, &dir.join(format!("out_{}.vtu", record.step)))?;
        }
        Ok(())
    })?;
    write_trace(&trace.records, &dir.join("trace.csv"))?;
    Ok(trace)
}
