//! Staggered time stepping of the wave system and the phase field.
//!
//! Each step computes an elastic candidate with the implicit midpoint rule,
//! advances the phase field with that candidate's stresses, and accepts the
//! candidate unless the elastic domain shrank. In that case the material is
//! degraded and the step is recomputed with implicit Euler.

use std::sync::Arc;

use crate::dg::{euler_step, midpoint_step, BoundaryPulse, DgSpace, DgState, PulseEnd, WaveOperator, V1, V2};
use crate::error::{Error, Result};
use crate::krylov::GmresOptions;
use crate::material::{degrade, DegradedMaterialField, IsotropicElastic};
use crate::mesh::{BoundaryTags, GeometryMap, Mesh, Point};
use crate::phase_field::{driving_force_field, principal_stress_field, project_and_track, PhaseFieldSolver, PhaseParams, PhaseState};

/// Pulse parameters as written in a config file. The right amplitude is
/// `amplitude_ratio * amplitude_minus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseConfig {
    pub amplitude_minus: f64,
    pub amplitude_ratio: f64,
    pub width_minus: f64,
    pub width_plus: f64,
    pub shift_minus: f64,
    pub shift_plus: f64,
    pub t_init: f64,
}

impl PulseConfig {
    pub fn boundary_pulse(&self, c_p: f64) -> BoundaryPulse {
        BoundaryPulse {
            minus: PulseEnd {
                amplitude: self.amplitude_minus,
                width: self.width_minus,
                shift: self.shift_minus,
            },
            plus: PulseEnd {
                amplitude: self.amplitude_ratio * self.amplitude_minus,
                width: self.width_plus,
                shift: self.shift_plus,
            },
            t_init: self.t_init,
            c_p,
        }
    }
}

/// Window in which the pilot run looks for the peak principal stress.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotConfig {
    pub t_start: f64,
    pub t_end: f64,
    /// Target `peak sigma_I / sigma_c`.
    pub target_ratio: f64,
    /// Cap on `sigma_I / sigma_c` before `t_start`, so that nothing breaks
    /// ahead of the window.
    pub precursor_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry: GeometryMap,
    pub level: usize,
    pub tags: BoundaryTags,
    pub degree: usize,
    pub material: IsotropicElastic,
    pub reg_factor: f64,
    pub phase: PhaseParams,
    /// When false the phase field is never advanced and every step is elastic.
    pub fracture: bool,
    pub pulse: PulseConfig,
    pub t_end: f64,
    pub dt_el: f64,
    pub dt_pf: f64,
    pub gmres: GmresOptions,
    pub cg_rtol: f64,
    pub cg_max_iters: usize,
    /// Snapshot spacing in time; zero disables snapshots.
    pub output_interval: f64,
    pub pilot: PilotConfig,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.material.validate()?;
        if self.fracture {
            self.phase.validate()?;
        }
        let invalid = |msg: String| Err(Error::Invalid(msg));
        if !(self.reg_factor > 0.0 && self.reg_factor <= 1.0) {
            return invalid(format!("material.reg_factor = {} must lie in (0, 1]", self.reg_factor));
        }
        if self.degree == 0 || self.degree > 6 {
            return invalid(format!("dg.degree = {} must lie in 1..=6", self.degree));
        }
        if self.level > 10 {
            return invalid(format!("mesh.level = {} is too large", self.level));
        }
        if !(self.t_end > 0.0) {
            return invalid(format!("time.t_end = {} must be positive", self.t_end));
        }
        if !(self.dt_pf > 0.0 && self.dt_pf <= self.dt_el) {
            return invalid(format!(
                "time steps must satisfy 0 < dt_pf <= dt_el (dt_pf = {}, dt_el = {})",
                self.dt_pf, self.dt_el
            ));
        }
        let p = &self.pulse;
        if !(p.width_minus > 0.0 && p.width_plus > 0.0) {
            return invalid("pulse widths must be positive".into());
        }
        if !(p.t_init >= 0.0) {
            return invalid(format!("pulse.t_init = {} must be nonnegative", p.t_init));
        }
        if ![p.amplitude_minus, p.amplitude_ratio, p.shift_minus, p.shift_plus].iter().all(|v| v.is_finite()) {
            return invalid("pulse parameters must be finite".into());
        }
        if !(self.gmres.rtol > 0.0 && self.gmres.max_iters > 0 && self.gmres.restart > 0) {
            return invalid("solver.gmres_* must be positive".into());
        }
        if !(self.cg_rtol > 0.0 && self.cg_max_iters > 0) {
            return invalid("solver.cg_* must be positive".into());
        }
        if !(self.output_interval >= 0.0) {
            return invalid(format!("output.interval = {} must be nonnegative", self.output_interval));
        }
        let w = &self.pilot;
        if !(w.t_start <= w.t_end && w.target_ratio > 0.0 && w.precursor_margin > 0.0) {
            return invalid("pilot window must satisfy t_start <= t_end, target_ratio > 0 and precursor_margin > 0".into());
        }
        Ok(())
    }

    pub fn boundary_pulse(&self) -> BoundaryPulse {
        self.pulse.boundary_pulse(self.material.p_wave_speed())
    }

    pub fn build_mesh(&self) -> Result<Mesh> {
        Mesh::build(&self.geometry, self.level, self.tags)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Elastic,
    Dissipative,
}

impl StepKind {
    pub fn name(self) -> &'static str {
        match self {
            StepKind::Elastic => "elastic",
            StepKind::Dissipative => "dissipative",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "elastic" => Some(StepKind::Elastic),
            "dissipative" => Some(StepKind::Dissipative),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub kind: StepKind,
    /// Mechanical energy after the step, in the material valid after the step.
    pub energy: f64,
    /// Energy drop `E(t_{n-1}) - E(t_n)` over the step.
    pub dissipation: f64,
    pub cracked_nodes: usize,
    /// GMRES iterations of all wave solves in the step.
    pub gmres_iters: usize,
    /// Largest iteration count of a single wave solve in the step.
    pub gmres_max: usize,
    pub cg_iters: usize,
    /// Nodal phase field changed by more than `1e-14` somewhere.
    pub s_changed: bool,
    pub material_version: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub initial_energy: f64,
    pub records: Vec<StepRecord>,
}

impl RunTrace {
    pub fn total_dissipation(&self) -> f64 {
        self.records.iter().map(|r| r.dissipation).sum()
    }

    /// Dissipation accumulated by steps starting at or after `t`.
    pub fn dissipation_after(&self, t: f64) -> f64 {
        self.records.iter().filter(|r| r.t - r.dt >= t).map(|r| r.dissipation).sum()
    }

    pub fn first_crack(&self) -> Option<&StepRecord> {
        self.records.iter().find(|r| r.cracked_nodes > 0)
    }

    pub fn final_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.t)
    }
}

/// Displacement coefficients on the DG space, two components per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    pub values: Vec<f64>,
}

impl DisplacementField {
    pub fn zeros(space: &DgSpace) -> Self {
        Self {
            values: vec![0.0; space.num_cells() * 2 * space.reference().num_basis()],
        }
    }

    /// `u += dt v`.
    pub fn integrate(&mut self, space: &DgSpace, velocity_state: &[f64], dt: f64) {
        let nb = space.reference().num_basis();
        for c in 0..space.num_cells() {
            for (comp, field) in [V1, V2].into_iter().enumerate() {
                for q in 0..nb {
                    self.values[(c * 2 + comp) * nb + q] += dt * velocity_state[space.index(c, field, q)];
                }
            }
        }
    }

    pub fn at_node(&self, space: &DgSpace, cell: usize, q: usize) -> Point {
        let nb = space.reference().num_basis();
        [self.values[cell * 2 * nb + q], self.values[(cell * 2 + 1) * nb + q]]
    }
}

/// All state of a running simulation.
pub struct Simulation {
    config: RunConfig,
    pulse: BoundaryPulse,
    space: Arc<DgSpace>,
    phase_solver: PhaseFieldSolver,
    operator: Arc<WaveOperator>,
    state: DgState,
    phase: PhaseState,
    displacement: DisplacementField,
    dt_next: f64,
    step: usize,
    energy: f64,
}

impl Simulation {
    /// Undamaged material, zero fields, `s = s_inf = 1`, first step `dt_el`.
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let mesh = Arc::new(config.build_mesh()?);
        let space = Arc::new(DgSpace::new(mesh.clone(), config.degree)?);
        let material = DegradedMaterialField::undamaged(config.material, config.reg_factor, mesh.num_vertices())?;
        let operator = Arc::new(WaveOperator::new(space.clone(), Arc::new(material))?);
        let mut phase_solver = PhaseFieldSolver::new(&space);
        phase_solver.rtol = config.cg_rtol;
        phase_solver.max_iters = config.cg_max_iters;
        let state = DgState::zeros(&space);
        let energy = operator.energy(&state.values);
        Ok(Self {
            pulse: config.boundary_pulse(),
            phase: PhaseState::intact(mesh.num_vertices()),
            displacement: DisplacementField::zeros(&space),
            dt_next: config.dt_el,
            step: 0,
            config,
            space,
            phase_solver,
            operator,
            state,
            energy,
        })
    }

    /// Replaces the wave state, e.g. with interpolated initial data.
    pub fn set_state(&mut self, values: Vec<f64>) -> Result<()> {
        self.space.check_len(&values)?;
        self.energy = self.operator.energy(&values);
        self.state.values = values;
        Ok(())
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.space.mesh()
    }

    pub fn state(&self) -> &DgState {
        &self.state
    }

    pub fn phase(&self) -> &PhaseState {
        &self.phase
    }

    pub fn displacement(&self) -> &DisplacementField {
        &self.displacement
    }

    pub fn operator(&self) -> &Arc<WaveOperator> {
        &self.operator
    }

    pub fn material(&self) -> &Arc<DegradedMaterialField> {
        self.operator.material()
    }

    pub fn pulse(&self) -> &BoundaryPulse {
        &self.pulse
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    /// Step size the next call to [`Simulation::step`] will attempt.
    pub fn next_dt(&self) -> f64 {
        self.dt_next
    }

    pub fn finished(&self) -> bool {
        self.state.time >= self.config.t_end - 1e-12 * self.config.dt_el
    }

    /// Maximum principal stress at every DG quadrature point.
    pub fn principal_stress(&self) -> Vec<f64> {
        principal_stress_field(&self.space, &self.state.values, &self.config.phase)
    }

    /// One pass of the staggered algorithm.
    pub fn step(&mut self) -> Result<StepRecord> {
        let t = self.state.time;
        let mut dt = self.dt_next;
        if t + dt > self.config.t_end - 1e-12 * dt {
            dt = self.config.t_end - t;
        }
        if !(dt > 0.0) {
            return Err(Error::Invalid(format!("no time left to step at t = {t}")));
        }
        let opts = self.config.gmres;

        // S1
        let (candidate, report) = midpoint_step(&self.operator, &self.state, dt, &self.pulse, &opts)?;
        let mut gmres_iters = report.iterations;
        let mut gmres_max = report.iterations;

        // S2, S3
        let mut cg_iters = 0;
        let new_phase = if self.config.fracture {
            let drive = driving_force_field(&self.space, &candidate.values, &self.config.phase);
            let (s, cg_report) = self.phase_solver.pf_step(&self.phase.s, &drive, &self.config.phase, dt)?;
            cg_iters = cg_report.iterations;
            let mut next = project_and_track(&s, &self.phase, self.config.phase.s_min);
            next.time = t + dt;
            next
        } else {
            PhaseState {
                time: t + dt,
                ..self.phase.clone()
            }
        };
        if new_phase.s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("phase field"));
        }
        let shrank = new_phase
            .elastic
            .iter()
            .zip(&self.phase.elastic)
            .any(|(now, before)| *before && !*now);

        let (accepted, kind) = if shrank {
            // S5, S6: the candidate is discarded
            let material = degrade(&new_phase.s_inf, self.config.material, self.config.reg_factor)?;
            let new_op = Arc::new(WaveOperator::new(self.space.clone(), Arc::new(material))?);
            let (state, report) = euler_step(&new_op, &self.operator, &self.state, dt, &self.pulse, &opts)?;
            gmres_iters += report.iterations;
            gmres_max = gmres_max.max(report.iterations);
            self.operator = new_op;
            (state, StepKind::Dissipative)
        } else {
            (candidate, StepKind::Elastic)
        };
        if !accepted.is_finite() {
            return Err(Error::NonFinite("wave state"));
        }

        // S7
        self.displacement.integrate(&self.space, &accepted.values, dt);
        let s_changed = new_phase
            .s
            .iter()
            .zip(&self.phase.s)
            .any(|(a, b)| (a - b).abs() > 1e-14);
        self.dt_next = if s_changed { self.config.dt_pf } else { self.config.dt_el };

        let energy = self.operator.energy(&accepted.values);
        let dissipation = self.energy - energy;
        self.energy = energy;
        self.state = accepted;
        self.phase = new_phase;
        self.step += 1;
        Ok(StepRecord {
            step: self.step,
            t: self.state.time,
            dt,
            kind,
            energy,
            dissipation,
            cracked_nodes: self.phase.cracked_count(),
            gmres_iters,
            gmres_max,
            cg_iters,
            s_changed,
            material_version: self.operator.material().version(),
        })
    }

    /// Steps until `t_end`, calling `observer` after every step.
    pub fn run_with(&mut self, mut observer: impl FnMut(&Simulation, &StepRecord) -> Result<()>) -> Result<RunTrace> {
        let mut trace = RunTrace {
            initial_energy: self.energy,
            records: Vec::new(),
        };
        while !self.finished() {
            let record = self.step()?;
            observer(self, &record)?;
            trace.records.push(record);
        }
        Ok(trace)
    }

    pub fn run(&mut self) -> Result<RunTrace> {
        self.run_with(|_, _| Ok(()))
    }
}

/// Decides at which steps snapshots are written: at `t = 0` and at the first
/// step reaching each multiple of the interval.
#[derive(Debug, Clone)]
pub struct OutputSchedule {
    interval: f64,
    next: usize,
}

impl OutputSchedule {
    pub fn new(interval: f64) -> Self {
        Self { interval, next: 0 }
    }

    pub fn due(&mut self, t: f64, tol: f64) -> bool {
        if self.interval <= 0.0 {
            return false;
        }
        let mut hit = false;
        while self.next as f64 * self.interval <= t + tol {
            self.next += 1;
            hit = true;
        }
        hit
    }
}

/// Largest principal stress seen at the nodes and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressPeak {
    pub sigma_i: f64,
    pub time: f64,
    pub location: Point,
}

impl StressPeak {
    fn none() -> Self {
        Self { sigma_i: f64::NEG_INFINITY, time: 0.0, location: [0.0; 2] }
    }

    fn update(&mut self, sim: &Simulation, t: f64) {
        let stress = sim.principal_stress();
        let nb = sim.space().reference().num_basis();
        if let Some((k, &v)) = stress.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
            if v > self.sigma_i {
                *self = Self { sigma_i: v, time: t, location: sim.space().node_point(k / nb, k % nb) };
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PilotReport {
    /// Signed amplitude of the elastic-only probe run.
    pub probe_amplitude: f64,
    /// Peak inside the pilot window.
    pub peak: StressPeak,
    /// Peak before the window opens.
    pub precursor: StressPeak,
    /// `A_-` giving `peak sigma_I = target_ratio * sigma_c`.
    pub target_amplitude: f64,
    /// `target_amplitude`, reduced if needed so that the precursor stays at
    /// `precursor_margin * sigma_c`.
    pub recommended_amplitude: f64,
}

impl PilotReport {
    pub fn limited_by_precursor(&self) -> bool {
        self.recommended_amplitude.abs() < self.target_amplitude.abs()
    }

    /// `peak sigma_I / sigma_c` at the recommended amplitude.
    pub fn achieved_ratio(&self, sigma_c: f64) -> f64 {
        (self.recommended_amplitude / self.probe_amplitude) * self.peak.sigma_i / sigma_c
    }
}

/// Runs the elastic problem with fracture disabled and a unit amplitude of
/// the configured sign, records the peak principal stress before and inside
/// the pilot window and scales the amplitude linearly.
pub fn pilot(config: &RunConfig) -> Result<PilotReport> {
    let mut probe = config.clone();
    let sign = if config.pulse.amplitude_minus > 0.0 { 1.0 } else { -1.0 };
    probe.fracture = false;
    probe.pulse.amplitude_minus = sign;
    probe.t_end = config.pilot.t_end;
    probe.output_interval = 0.0;
    let mut sim = Simulation::new(probe)?;
    let window = config.pilot;
    let (mut peak, mut precursor) = (StressPeak::none(), StressPeak::none());
    sim.run_with(|sim, record| {
        if record.t >= window.t_start - 1e-12 {
            peak.update(sim, record.t);
        } else {
            precursor.update(sim, record.t);
        }
        Ok(())
    })?;
    if !(peak.sigma_i > 0.0) {
        return Err(Error::Invalid(format!(
            "pilot window [{}, {}] saw no tensile stress",
            window.t_start, window.t_end
        )));
    }
    let sigma_c = config.phase.sigma_c;
    let target = window.target_ratio * sigma_c / peak.sigma_i;
    let cap = if precursor.sigma_i > 0.0 {
        window.precursor_margin * sigma_c / precursor.sigma_i
    } else {
        f64::INFINITY
    };
    Ok(PilotReport {
        probe_amplitude: sign,
        peak,
        precursor,
        target_amplitude: sign * target,
        recommended_amplitude: sign * target.min(cap),
    })
}
