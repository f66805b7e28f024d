//! Flat `section.key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. An optional first entry
//! `preset = <name>` selects the base configuration, every other key
//! overrides one field of it. Unknown keys, malformed values and violated
//! invariants are reported with the offending line.

use crate::driver::RunConfig;
use crate::error::{Error, Result};
use crate::io::presets::preset;
use crate::mesh::{BoundaryTag, GeometryKind};

/// Every accepted key, in serialization order.
pub const KEYS: &[&str] = &[
    "mesh.geometry",
    "mesh.x_min",
    "mesh.x_max",
    "mesh.y_min",
    "mesh.y_max",
    "mesh.base_nx",
    "mesh.base_ny",
    "mesh.level",
    "boundary.left",
    "boundary.right",
    "boundary.bottom",
    "boundary.top",
    "material.lambda",
    "material.mu",
    "material.rho",
    "material.reg_factor",
    "phase.enabled",
    "phase.tau_r",
    "phase.m_geom",
    "phase.l_c",
    "phase.sigma_c",
    "phase.s_min",
    "phase.out_of_plane_stress",
    "pulse.amplitude_minus",
    "pulse.amplitude_ratio",
    "pulse.width_minus",
    "pulse.width_plus",
    "pulse.shift_minus",
    "pulse.shift_plus",
    "pulse.t_init",
    "time.t_end",
    "time.dt_el",
    "time.dt_pf",
    "dg.degree",
    "solver.gmres_rtol",
    "solver.gmres_max_iters",
    "solver.gmres_restart",
    "solver.cg_rtol",
    "solver.cg_max_iters",
    "output.interval",
    "pilot.t_start",
    "pilot.t_end",
    "pilot.target_ratio",
    "pilot.precursor_margin",
];

fn number(value: &str) -> std::result::Result<f64, String> {
    let v: f64 = value.parse().map_err(|_| format!("expected a number, found `{value}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{value}` is not finite"))
    }
}

fn positive(value: &str) -> std::result::Result<f64, String> {
    let v = number(value)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, found {v}"))
    }
}

fn count(value: &str) -> std::result::Result<usize, String> {
    value
        .parse()
        .map_err(|_| format!("expected a nonnegative integer, found `{value}`"))
}

fn positive_count(value: &str) -> std::result::Result<usize, String> {
    match count(value)? {
        0 => Err("must be at least 1".into()),
        n => Ok(n),
    }
}

fn boolean(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected `true` or `false`, found `{value}`")),
    }
}

fn tag(value: &str) -> std::result::Result<BoundaryTag, String> {
    BoundaryTag::parse(value).ok_or_else(|| format!("unknown boundary type `{value}` (neumann, dirichlet, free, slip)"))
}

fn set_key(cfg: &mut RunConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    match key {
        "mesh.geometry" => {
            cfg.geometry.kind =
                GeometryKind::parse(value).ok_or_else(|| format!("unknown geometry `{value}` (rectangle, curved-bar)"))?
        }
        "mesh.x_min" => cfg.geometry.x_range[0] = number(value)?,
        "mesh.x_max" => cfg.geometry.x_range[1] = number(value)?,
        "mesh.y_min" => cfg.geometry.y_range[0] = number(value)?,
        "mesh.y_max" => cfg.geometry.y_range[1] = number(value)?,
        "mesh.base_nx" => cfg.geometry.base_cells[0] = positive_count(value)?,
        "mesh.base_ny" => cfg.geometry.base_cells[1] = positive_count(value)?,
        "mesh.level" => cfg.level = count(value)?,
        "boundary.left" => cfg.tags.left = tag(value)?,
        "boundary.right" => cfg.tags.right = tag(value)?,
        "boundary.bottom" => cfg.tags.bottom = tag(value)?,
        "boundary.top" => cfg.tags.top = tag(value)?,
        "material.lambda" => cfg.material.lambda = number(value)?,
        "material.mu" => cfg.material.mu = positive(value)?,
        "material.rho" => cfg.material.rho = positive(value)?,
        "material.reg_factor" => cfg.reg_factor = positive(value)?,
        "phase.enabled" => cfg.fracture = boolean(value)?,
        "phase.tau_r" => cfg.phase.tau_r = positive(value)?,
        "phase.m_geom" => cfg.phase.m_geom = positive(value)?,
        "phase.l_c" => cfg.phase.l_c = positive(value)?,
        "phase.sigma_c" => cfg.phase.sigma_c = positive(value)?,
        "phase.s_min" => cfg.phase.s_min = positive(value)?,
        "phase.out_of_plane_stress" => {
            // the Poisson ratio is filled in from the material afterwards
            cfg.phase.out_of_plane_poisson = boolean(value)?.then_some(0.0)
        }
        "pulse.amplitude_minus" => cfg.pulse.amplitude_minus = number(value)?,
        "pulse.amplitude_ratio" => cfg.pulse.amplitude_ratio = number(value)?,
        "pulse.width_minus" => cfg.pulse.width_minus = positive(value)?,
        "pulse.width_plus" => cfg.pulse.width_plus = positive(value)?,
        "pulse.shift_minus" => cfg.pulse.shift_minus = number(value)?,
        "pulse.shift_plus" => cfg.pulse.shift_plus = number(value)?,
        "pulse.t_init" => cfg.pulse.t_init = number(value)?,
        "time.t_end" => cfg.t_end = positive(value)?,
        "time.dt_el" => cfg.dt_el = positive(value)?,
        "time.dt_pf" => cfg.dt_pf = positive(value)?,
        "dg.degree" => cfg.degree = positive_count(value)?,
        "solver.gmres_rtol" => cfg.gmres.rtol = positive(value)?,
        "solver.gmres_max_iters" => cfg.gmres.max_iters = positive_count(value)?,
        "solver.gmres_restart" => cfg.gmres.restart = positive_count(value)?,
        "solver.cg_rtol" => cfg.cg_rtol = positive(value)?,
        "solver.cg_max_iters" => cfg.cg_max_iters = positive_count(value)?,
        "output.interval" => cfg.output_interval = number(value)?,
        "pilot.t_start" => cfg.pilot.t_start = number(value)?,
        "pilot.t_end" => cfg.pilot.t_end = number(value)?,
        "pilot.target_ratio" => cfg.pilot.target_ratio = positive(value)?,
        "pilot.precursor_margin" => cfg.pilot.precursor_margin = positive(value)?,
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}

fn get_key(cfg: &RunConfig, key: &str) -> String {
    match key {
        "mesh.geometry" => cfg.geometry.kind.name().to_string(),
        "mesh.x_min" => cfg.geometry.x_range[0].to_string(),
        "mesh.x_max" => cfg.geometry.x_range[1].to_string(),
        "mesh.y_min" => cfg.geometry.y_range[0].to_string(),
        "mesh.y_max" => cfg.geometry.y_range[1].to_string(),
        "mesh.base_nx" => cfg.geometry.base_cells[0].to_string(),
        "mesh.base_ny" => cfg.geometry.base_cells[1].to_string(),
        "mesh.level" => cfg.level.to_string(),
        "boundary.left" => cfg.tags.left.name().to_string(),
        "boundary.right" => cfg.tags.right.name().to_string(),
        "boundary.bottom" => cfg.tags.bottom.name().to_string(),
        "boundary.top" => cfg.tags.top.name().to_string(),
        "material.lambda" => cfg.material.lambda.to_string(),
        "material.mu" => cfg.material.mu.to_string(),
        "material.rho" => cfg.material.rho.to_string(),
        "material.reg_factor" => cfg.reg_factor.to_string(),
        "phase.enabled" => cfg.fracture.to_string(),
        "phase.tau_r" => cfg.phase.tau_r.to_string(),
        "phase.m_geom" => cfg.phase.m_geom.to_string(),
        "phase.l_c" => cfg.phase.l_c.to_string(),
        "phase.sigma_c" => cfg.phase.sigma_c.to_string(),
        "phase.s_min" => cfg.phase.s_min.to_string(),
        "phase.out_of_plane_stress" => cfg.phase.out_of_plane_poisson.is_some().to_string(),
        "pulse.amplitude_minus" => cfg.pulse.amplitude_minus.to_string(),
        "pulse.amplitude_ratio" => cfg.pulse.amplitude_ratio.to_string(),
        "pulse.width_minus" => cfg.pulse.width_minus.to_string(),
        "pulse.width_plus" => cfg.pulse.width_plus.to_string(),
        "pulse.shift_minus" => cfg.pulse.shift_minus.to_string(),
        "pulse.shift_plus" => cfg.pulse.shift_plus.to_string(),
        "pulse.t_init" => cfg.pulse.t_init.to_string(),
        "time.t_end" => cfg.t_end.to_string(),
        "time.dt_el" => cfg.dt_el.to_string(),
        "time.dt_pf" => cfg.dt_pf.to_string(),
        "dg.degree" => cfg.degree.to_string(),
        "solver.gmres_rtol" => cfg.gmres.rtol.to_string(),
        "solver.gmres_max_iters" => cfg.gmres.max_iters.to_string(),
        "solver.gmres_restart" => cfg.gmres.restart.to_string(),
        "solver.cg_rtol" => cfg.cg_rtol.to_string(),
        "solver.cg_max_iters" => cfg.cg_max_iters.to_string(),
        "output.interval" => cfg.output_interval.to_string(),
        "pilot.t_start" => cfg.pilot.t_start.to_string(),
        "pilot.t_end" => cfg.pilot.t_end.to_string(),
        "pilot.target_ratio" => cfg.pilot.target_ratio.to_string(),
        "pilot.precursor_margin" => cfg.pilot.precursor_margin.to_string(),
        _ => unreachable!("key table out of sync: {key}"),
    }
}

/// Recomputes values derived from other keys.
fn finalize(cfg: &mut RunConfig) {
    if cfg.phase.out_of_plane_poisson.is_some() {
        let m = cfg.material;
        cfg.phase.out_of_plane_poisson = Some(m.lambda / (2.0 * (m.lambda + m.mu)));
    }
}

/// Validates and maps an invariant violation to the line of the key it names.
fn check(cfg: &RunConfig, lines: &[(String, usize)]) -> Result<()> {
    cfg.validate().map_err(|e| {
        let message = e.to_string();
        let line = lines
            .iter()
            .rev()
            .find(|(key, _)| {
                message.contains(key.as_str())
                    || key.rsplit('.').next().is_some_and(|short| message.contains(&format!("{short} ")))
            })
            .map_or(0, |(_, l)| *l);
        Error::Config { line, message }
    })
}

/// Parses a config on top of the `curved-bar-2d` preset, or the preset named
/// in a leading `preset = ...` entry.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_impl(text, None)
}

/// Parses a config on top of `base`; a `preset` entry is rejected.
pub fn parse_config_with_base(text: &str, base: RunConfig) -> Result<RunConfig> {
    parse_impl(text, Some(base))
}

fn parse_impl(text: &str, base: Option<RunConfig>) -> Result<RunConfig> {
    let explicit_base = base.is_some();
    let mut cfg = base.unwrap_or_else(|| preset("curved-bar-2d").expect("default preset exists"));
    let mut seen: Vec<(String, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Config { line, message };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(err("missing key".into()));
        }
        if let Some((_, first)) = seen.iter().find(|(k, _)| k == key) {
            return Err(err(format!("duplicate key `{key}` (first set on line {first})")));
        }
        if key == "preset" {
            if explicit_base {
                return Err(err("`preset` cannot be combined with an explicit base preset".into()));
            }
            if !seen.is_empty() {
                return Err(err("`preset` must be the first entry".into()));
            }
            cfg = preset(value).ok_or_else(|| err(format!("unknown preset `{value}`")))?;
        } else {
            set_key(&mut cfg, key, value).map_err(|m| err(format!("{key}: {m}")))?;
        }
        seen.push((key.to_string(), line));
    }
    finalize(&mut cfg);
    check(&cfg, &seen)?;
    Ok(cfg)
}

/// Applies one `key=value` override to a validated config.
pub fn apply_override(cfg: &RunConfig, assignment: &str) -> Result<RunConfig> {
    let err = |message: String| Error::Config { line: 0, message };
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| err(format!("override `{assignment}` is not of the form key=value")))?;
    let mut out = cfg.clone();
    set_key(&mut out, key.trim(), value.trim()).map_err(|m| err(format!("override {}: {m}", key.trim())))?;
    finalize(&mut out);
    out.validate().map_err(|e| err(format!("override {}: {e}", key.trim())))?;
    Ok(out)
}

/// Writes every key; `parse_config` of the result reproduces `cfg`.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let mut section = "";
    for key in KEYS {
        let this = key.split('.').next().unwrap_or("");
        if this != section {
            if !section.is_empty() {
                out.push('\n');
            }
            section = this;
        }
        out.push_str(key);
        out.push_str(" = ");
        out.push_str(&get_key(cfg, key));
        out.push('\n');
    }
    out
}
