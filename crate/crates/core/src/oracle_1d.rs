//! Closed-form d'Alembert solution of a bar loaded by a traction history at
//! `x = 0` and free at `x = L`, and its comparison with the 2D solver on a
//! strip with slip walls.

use crate::dg::{DgSpace, PulseEnd, S11};
use crate::driver::{RunConfig, Simulation};
use crate::error::{Error, Result};
use crate::mesh::{GeometryKind, Mesh};

/// Stress history `p(t)` prescribed at the loaded end. Negative values are
/// compressive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pulse1D {
    /// `end.bump(c_arg t - end.shift)` for `t < t_init`.
    Bump { end: PulseEnd, c_arg: f64, t_init: f64 },
    /// `amplitude` on `(0, duration)`.
    Rectangular { amplitude: f64, duration: f64 },
}

impl Pulse1D {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Pulse1D::Bump { end, c_arg, t_init } => {
                if t < t_init {
                    end.bump(c_arg * t - end.shift)
                } else {
                    0.0
                }
            }
            Pulse1D::Rectangular { amplitude, duration } => {
                if t > 0.0 && t < duration {
                    amplitude
                } else {
                    0.0
                }
            }
        }
    }

    /// Interval outside of which `p` vanishes.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Pulse1D::Bump { end, c_arg, t_init } => (
                ((end.shift - end.width) / c_arg).max(0.0),
                ((end.shift + end.width) / c_arg).min(t_init),
            ),
            Pulse1D::Rectangular { duration, .. } => (0.0, duration),
        }
    }

    /// Largest `|p|`.
    pub fn peak(&self) -> f64 {
        match *self {
            Pulse1D::Bump { .. } => {
                let (a, b) = self.support();
                (0..=4000)
                    .map(|i| self.value(a + (b - a) * i as f64 / 4000.0).abs())
                    .fold(0.0, f64::max)
            }
            Pulse1D::Rectangular { amplitude, .. } => amplitude.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar1DProblem {
    pub length: f64,
    pub c: f64,
    pub z: f64,
    pub pulse: Pulse1D,
}

impl Bar1DProblem {
    pub fn new(length: f64, c: f64, z: f64, pulse: Pulse1D) -> Result<Self> {
        if !(length > 0.0 && c > 0.0 && z > 0.0) {
            return Err(Error::Invalid(format!(
                "bar needs positive length, speed and impedance (L = {length}, c = {c}, Z = {z})"
            )));
        }
        Ok(Self { length, c, z, pulse })
    }

    /// The bar seen by a straight strip config: length of the reference
    /// interval, P-wave speed and impedance, left pulse.
    pub fn from_strip(config: &RunConfig) -> Result<Self> {
        if config.geometry.kind != GeometryKind::Rectangle {
            return Err(Error::Invalid("the 1D comparison needs a rectangle geometry".into()));
        }
        let pulse = config.boundary_pulse();
        let m = config.material;
        Self::new(
            config.geometry.x_range[1] - config.geometry.x_range[0],
            m.p_wave_speed(),
            (m.rho * (2.0 * m.mu + m.lambda)).sqrt(),
            Pulse1D::Bump {
                end: pulse.minus,
                c_arg: pulse.c_p,
                t_init: pulse.t_init,
            },
        )
    }

    /// `(v, sigma)` at `0 <= x <= L`: the incident wave and its reflections,
    /// with the sign of the stress flipped at every free-end reflection.
    pub fn analytic_state(&self, x: f64, t: f64) -> (f64, f64) {
        let (l, c) = (self.length, self.c);
        let (mut v, mut s) = (0.0, 0.0);
        let mut m = 0usize;
        loop {
            let right = t - (2.0 * m as f64 * l + x) / c;
            if right <= 0.0 {
                break;
            }
            let left = t - (2.0 * (m + 1) as f64 * l - x) / c;
            let pr = self.pulse.value(right);
            let pl = self.pulse.value(left);
            s += pr - pl;
            v += -(pr + pl) / self.z;
            m += 1;
        }
        (v, s)
    }

    /// `1/2 int (rho v^2 + sigma^2 / E) dx` by composite Gauss quadrature.
    pub fn energy(&self, t: f64, intervals: usize) -> f64 {
        let rule = crate::quadrature::GaussRule::new(6);
        let h = self.length / intervals as f64;
        let rho = self.z / self.c;
        let modulus = self.z * self.c;
        let mut e = 0.0;
        for i in 0..intervals {
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let (v, s) = self.analytic_state((i as f64 + p) * h, t);
                e += 0.5 * w * h * (rho * v * v + s * s / modulus);
            }
        }
        e
    }

    /// First point in time at which the stress exceeds `sigma_c`, found by
    /// scanning an `(x, t)` grid up to `t_max`.
    pub fn spall_location(&self, sigma_c: f64, t_max: f64, nx: usize, nt: usize) -> Result<SpallEvent> {
        let exceed_at = |t: f64| -> Option<(f64, f64)> {
            (0..=nx)
                .map(|i| {
                    let x = self.length * i as f64 / nx as f64;
                    (x, self.analytic_state(x, t).1)
                })
                .filter(|(_, s)| *s > sigma_c)
                .max_by(|a, b| a.1.total_cmp(&b.1))
        };
        let mut prev = 0.0;
        for j in 1..=nt {
            let t = t_max * j as f64 / nt as f64;
            if exceed_at(t).is_some() {
                let (mut lo, mut hi) = (prev, t);
                for _ in 0..50 {
                    let mid = 0.5 * (lo + hi);
                    if exceed_at(mid).is_some() {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let (x, stress) = exceed_at(hi).expect("bisection keeps an exceeding time");
                return Ok(SpallEvent {
                    x,
                    t: hi,
                    stress,
                    distance_from_free_end: self.length - x,
                });
            }
            prev = t;
        }
        Err(Error::NoSpall(format!("stress stays below {sigma_c} up to t = {t_max}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpallEvent {
    pub x: f64,
    pub t: f64,
    pub stress: f64,
    pub distance_from_free_end: f64,
}

/// Samples `s11` of a solution on a rectangle along the horizontal line
/// half way between bottom and top.
#[derive(Debug, Clone)]
pub struct StripProbe {
    /// `(cell, x_left, x_right, reference y)` sorted by `x_left`.
    cells: Vec<(usize, f64, f64, f64)>,
}

impl StripProbe {
    pub fn new(mesh: &Mesh) -> Result<Self> {
        if mesh.map().kind != GeometryKind::Rectangle {
            return Err(Error::Invalid("the strip probe needs a rectangle geometry".into()));
        }
        let [y0, y1] = mesh.map().y_range;
        let mid = 0.5 * (y0 + y1);
        let verts = mesh.vertices();
        let mut cells: Vec<_> = mesh
            .cells()
            .iter()
            .enumerate()
            .filter_map(|(c, v)| {
                let (lo, hi) = (verts[v[0]][1], verts[v[2]][1]);
                (lo <= mid && mid < hi).then(|| (c, verts[v[0]][0], verts[v[1]][0], (mid - lo) / (hi - lo)))
            })
            .collect();
        cells.sort_by(|a, b| a.1.total_cmp(&b.1));
        Ok(Self { cells })
    }

    pub fn sample(&self, space: &DgSpace, values: &[f64], xs: &[f64]) -> Result<Vec<f64>> {
        space.check_len(values)?;
        let (first, last) = (self.cells[0].1, self.cells[self.cells.len() - 1].2);
        xs.iter()
            .map(|&x| {
                if !(first..=last).contains(&x) {
                    return Err(Error::Invalid(format!("x = {x} lies outside [{first}, {last}]")));
                }
                let i = self.cells.partition_point(|c| c.2 < x).min(self.cells.len() - 1);
                let (c, a, b, y) = self.cells[i];
                Ok(space.evaluate(values, c, [(x - a) / (b - a), y])[S11])
            })
            .collect()
    }
}

/// DG solution of a strip config compared with the bar solution.
#[derive(Debug, Clone, PartialEq)]
pub struct StripComparison {
    pub level: usize,
    pub h: f64,
    pub dt: f64,
    /// `(sum_n dt int (s11_h - sigma)^2)^(1/2)` over the step times.
    pub space_time_l2_error: f64,
    /// Largest `|s11_h|` on the free end at the step times, relative to the
    /// peak of the pulse.
    pub free_end_ratio: f64,
    /// First step time at which `s11_h` exceeded the threshold, if any.
    pub first_exceedance: Option<SpallEvent>,
}

/// Runs `config` (fracture off) and measures it against the bar solution.
pub fn compare_strip(config: &RunConfig, sigma_c: f64) -> Result<StripComparison> {
    let mut cfg = config.clone();
    cfg.fracture = false;
    cfg.output_interval = 0.0;
    let bar = Bar1DProblem::from_strip(&cfg)?;
    let mut sim = Simulation::new(cfg)?;
    let mesh = sim.mesh().clone();
    let [nx, _] = mesh.grid_dims();
    let degree = sim.space().degree();
    let quad: Vec<_> = (0..mesh.num_cells())
        .map(|c| mesh.cell_quadrature(c, degree + 3))
        .collect::<Result<_>>()?;
    let right_cells: Vec<usize> = (0..mesh.num_cells()).filter(|c| c % nx == nx - 1).collect();
    let peak = bar.pulse.peak();
    let x_max = mesh.map().x_range[1];
    let x_min = mesh.map().x_range[0];
    let mut err2 = 0.0;
    let mut end_max: f64 = 0.0;
    let mut first: Option<SpallEvent> = None;
    sim.run_with(|sim, record| {
        let space = sim.space();
        let values = &sim.state().values;
        let mut e = 0.0;
        for (c, qps) in quad.iter().enumerate() {
            for qp in qps {
                let s11 = space.evaluate(values, c, qp.reference)[S11];
                let exact = bar.analytic_state(qp.physical[0] - x_min, record.t).1;
                e += qp.weight * (s11 - exact).powi(2);
            }
        }
        err2 += record.dt * e;
        for &c in &right_cells {
            for i in 0..=4 {
                let s11 = space.evaluate(values, c, [1.0, i as f64 / 4.0])[S11];
                end_max = end_max.max(s11.abs());
            }
        }
        if first.is_none() {
            let nb = space.reference().num_basis();
            let hit = (0..space.num_cells())
                .flat_map(|c| (0..nb).map(move |q| (c, q)))
                .map(|(c, q)| (space.node_point(c, q)[0], values[space.index(c, S11, q)]))
                .filter(|(_, s)| *s > sigma_c)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((x, stress)) = hit {
                first = Some(SpallEvent {
                    x: x - x_min,
                    t: record.t,
                    stress,
                    distance_from_free_end: x_max - x,
                });
            }
        }
        Ok(())
    })?;
    Ok(StripComparison {
        level: config.level,
        h: mesh.mesh_size(),
        dt: config.dt_el,
        space_time_l2_error: err2.sqrt(),
        free_end_ratio: end_max / peak,
        first_exceedance: first,
    })
}

/// Runs [`compare_strip`] on `levels` successive refinements of `config`,
/// halving `dt_el` and `dt_pf` with the mesh size.
pub fn strip_convergence(config: &RunConfig, levels: usize, sigma_c: f64) -> Result<Vec<StripComparison>> {
    (0..levels)
        .map(|i| {
            let mut cfg = config.clone();
            cfg.level = config.level + i;
            let scale = 0.5f64.powi(i as i32);
            cfg.dt_el = config.dt_el * scale;
            cfg.dt_pf = config.dt_pf * scale;
            compare_strip(&cfg, sigma_c)
        })
        .collect()
}

/// Observed orders `log2(e_i / e_{i+1})` between successive levels.
pub fn observed_orders(results: &[StripComparison]) -> Vec<f64> {
    results
        .windows(2)
        .map(|w| (w[0].space_time_l2_error / w[1].space_time_l2_error).log2())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(amplitude: f64, duration: f64) -> Bar1DProblem {
        Bar1DProblem::new(1.0, 2.0, 2.0, Pulse1D::Rectangular { amplitude, duration }).unwrap()
    }

    fn smooth() -> Bar1DProblem {
        let end = PulseEnd { amplitude: -(1.0f64 / 0.09).exp(), width: 0.3, shift: 0.3 };
        Bar1DProblem::new(2.0, 2.0, 2.0, Pulse1D::Bump { end, c_arg: 2.0, t_init: 0.3 }).unwrap()
    }

    #[test]
    fn causality_and_free_end() {
        let bar = smooth();
        assert_eq!(bar.analytic_state(1.0, 0.4), (0.0, 0.0));
        assert_eq!(bar.analytic_state(0.5, 0.0), (0.0, 0.0));
        for i in 0..200 {
            let t = i as f64 * 0.02;
            assert!(bar.analytic_state(2.0, t).1.abs() < 1e-15);
        }
        assert_eq!(bar.pulse.peak(), 1.0);
    }

    #[test]
    fn incident_wave_travels_at_c() {
        let bar = smooth();
        // the pulse peak enters at t = 0.15 and reaches x = 1 at t = 0.65
        let (v, s) = bar.analytic_state(1.0, 0.65);
        assert!((s + 1.0).abs() < 1e-12);
        // right-going: v = -sigma / Z
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reflection_turns_compression_into_tension() {
        let bar = rect(-1.0, 0.2);
        // incident compression at x = 0.5, t = 0.3: front passed at 0.25
        assert_eq!(bar.analytic_state(0.5, 0.3).1, -1.0);
        // after reflection, at x = 0.5: reflected front arrives at (2 - 0.5)/2 = 0.75
        let (v, s) = bar.analytic_state(0.5, 0.8);
        assert_eq!(s, 1.0);
        // left-going: v = sigma / Z, and the particle velocity keeps its sign
        assert_eq!(v, 0.5);
        // at the free end the velocity doubles while the pulse overlaps itself
        assert_eq!(bar.analytic_state(1.0, 0.55).0, 1.0);
    }

    #[test]
    fn free_end_reflection_conserves_energy() {
        let bar = smooth();
        // fully inside before (t = 0.5) and after (t = 1.5) the reflection at x = 2
        let before = bar.energy(0.5, 400);
        let after = bar.energy(1.5, 400);
        assert!((before - after).abs() < 1e-10 * before, "{before} {after}");
        let during = bar.energy(1.15, 400);
        assert!((before - during).abs() < 1e-10 * before);
    }

    #[test]
    fn rectangular_pulse_spalls_half_a_pulse_length_from_the_end() {
        // tension first appears where the reflected front meets the
        // incident tail: c T / 2 from the free end, with full amplitude
        let bar = rect(-1.0, 0.2);
        for sigma_c in [0.55, 0.8, 0.95] {
            let ev = bar.spall_location(sigma_c, 2.0, 2000, 400).unwrap();
            assert!((ev.distance_from_free_end - 0.2).abs() < 2e-3, "{ev:?}");
            assert!((ev.t - 0.6).abs() < 2e-3, "{ev:?}");
        }
        assert!(matches!(bar.spall_location(1.0, 2.0, 200, 100), Err(Error::NoSpall(_))));
        assert!(bar.spall_location(1.5, 2.0, 200, 100).is_err());
    }

    #[test]
    fn tiny_threshold_spalls_when_the_peak_reflects() {
        // For a symmetric pulse the incident and reflected parts cancel until
        // the peak reaches the free end (t = 0.15 + 1); right after that the
        // whole overlap zone is in tension.
        let bar = smooth();
        let ev = bar.spall_location(1e-9, 2.0, 2000, 2000).unwrap();
        assert!((ev.t - 1.15).abs() < 2e-3, "{ev:?}");
        assert!(ev.distance_from_free_end < 0.3, "{ev:?}");
        assert!(bar.analytic_state(2.0 - ev.distance_from_free_end, 1.14).1 <= 1e-12);
    }

    #[test]
    fn smooth_pulse_spall_matches_brute_force_scan() {
        let bar = smooth();
        let ev = bar.spall_location(0.5, 2.0, 4000, 2000).unwrap();
        // independent scan on a coarser staggered grid
        let mut best: Option<(f64, f64)> = None;
        'outer: for j in 0..=4000 {
            let t = 2.0 * j as f64 / 4000.0;
            for i in 0..=1000 {
                let x = 2.0 * (i as f64 + 0.5) / 1001.0;
                if bar.analytic_state(x, t).1 > 0.5 {
                    best = Some((x, t));
                    break 'outer;
                }
            }
        }
        let (x, t) = best.unwrap();
        assert!((ev.t - t).abs() < 1e-3, "{ev:?} vs {t}");
        assert!((ev.x - x).abs() < 5e-3, "{ev:?} vs {x}");
    }

    #[test]
    fn probe_reads_the_strip_midline() {
        let mut cfg = crate::io::preset("quasi-1d-strip").unwrap();
        cfg.level = 0;
        let sim = Simulation::new(cfg).unwrap();
        let space = sim.space();
        let values = space.interpolate(|p| [0.0, 0.0, 3.0 * p[0] - 1.0, 0.0, 0.0]);
        let probe = StripProbe::new(sim.mesh()).unwrap();
        let xs = [0.0, 0.3, 0.125, 1.99, 2.0];
        let got = probe.sample(space, &values, &xs).unwrap();
        for (x, g) in xs.iter().zip(got) {
            assert!((g - (3.0 * x - 1.0)).abs() < 1e-12, "{x}: {g}");
        }
        assert!(probe.sample(space, &values, &[2.5]).is_err());
    }
}
