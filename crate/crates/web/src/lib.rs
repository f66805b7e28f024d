//! Browser bindings: a strip compared with the bar solution, a fracturing
//! curved bar, and the closed-form spall point of a bar.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use wasm_bindgen::prelude::*;

use dgfrac::dg::PulseEnd;
use dgfrac::driver::Simulation;
use dgfrac::io::{parse_config_with_base, preset};
use dgfrac::oracle_1d::{Bar1DProblem, Pulse1D, StripProbe};

fn js(err: dgfrac::Error) -> JsError {
    JsError::new(&err.to_string())
}

fn configured(name: &str, overrides: &str) -> dgfrac::Result<Simulation> {
    let base = preset(name).ok_or_else(|| dgfrac::Error::Invalid(format!("unknown preset `{name}`")))?;
    let mut cfg = parse_config_with_base(overrides, base)?;
    cfg.output_interval = 0.0;
    Simulation::new(cfg)
}

/// Advances until `steps` more steps are done or the run is over.
fn advance(sim: &mut Simulation, steps: usize) -> dgfrac::Result<f64> {
    for _ in 0..steps {
        if sim.finished() {
            break;
        }
        sim.step()?;
    }
    Ok(sim.time())
}

#[wasm_bindgen]
pub struct StripDemo {
    sim: Simulation,
    bar: Bar1DProblem,
    probe: StripProbe,
    xs: Vec<f64>,
}

impl StripDemo {
    pub fn build(overrides: &str, samples: usize) -> dgfrac::Result<Self> {
        let sim = configured("quasi-1d-strip", overrides)?;
        let bar = Bar1DProblem::from_strip(sim.config())?;
        let probe = StripProbe::new(sim.mesh())?;
        let [x0, x1] = sim.config().geometry.x_range;
        let n = samples.max(2);
        let xs = (0..n).map(|i| x0 + (x1 - x0) * i as f64 / (n - 1) as f64).collect();
        Ok(Self { sim, bar, probe, xs })
    }

    pub fn run_steps(&mut self, steps: usize) -> dgfrac::Result<f64> {
        advance(&mut self.sim, steps)
    }

    pub fn dg(&self) -> dgfrac::Result<Vec<f64>> {
        self.probe.sample(self.sim.space(), &self.sim.state().values, &self.xs)
    }

    pub fn exact(&self) -> Vec<f64> {
        let x0 = self.sim.config().geometry.x_range[0];
        self.xs.iter().map(|x| self.bar.analytic_state(x - x0, self.sim.time()).1).collect()
    }
}

#[wasm_bindgen]
impl StripDemo {
    /// `overrides` is config text applied on top of the `quasi-1d-strip` preset.
    #[wasm_bindgen(constructor)]
    pub fn new(overrides: &str, samples: usize) -> Result<StripDemo, JsError> {
        Self::build(overrides, samples).map_err(js)
    }

    pub fn advance(&mut self, steps: usize) -> Result<f64, JsError> {
        self.run_steps(steps).map_err(js)
    }

    pub fn time(&self) -> f64 {
        self.sim.time()
    }

    pub fn finished(&self) -> bool {
        self.sim.finished()
    }

    pub fn sample_x(&self) -> Vec<f64> {
        self.xs.clone()
    }

    /// Computed `s11` on the strip mid line.
    pub fn dg_stress(&self) -> Result<Vec<f64>, JsError> {
        self.dg().map_err(js)
    }

    /// Bar solution at the same points.
    pub fn exact_stress(&self) -> Vec<f64> {
        self.exact()
    }
}

#[wasm_bindgen]
pub struct BarDemo {
    sim: Simulation,
}

impl BarDemo {
    pub fn build(overrides: &str) -> dgfrac::Result<Self> {
        Ok(Self {
            sim: configured("curved-bar-2d-calibrated", overrides)?,
        })
    }

    pub fn run_steps(&mut self, steps: usize) -> dgfrac::Result<f64> {
        advance(&mut self.sim, steps)
    }

    /// Cell averages of the largest principal stress over `sigma_c`.
    pub fn stress_ratio(&self) -> Vec<f64> {
        let space = self.sim.space();
        let nb = space.reference().num_basis();
        let sigma = self.sim.principal_stress();
        let sigma_c = self.sim.config().phase.sigma_c;
        (0..space.num_cells())
            .map(|c| {
                let (mut num, mut den) = (0.0, 0.0);
                for q in 0..nb {
                    let w = space.node_weight(c, q);
                    num += w * sigma[c * nb + q];
                    den += w;
                }
                num / den / sigma_c
            })
            .collect()
    }
}

#[wasm_bindgen]
impl BarDemo {
    /// `overrides` is config text applied on top of the
    /// `curved-bar-2d-calibrated` preset.
    #[wasm_bindgen(constructor)]
    pub fn new(overrides: &str) -> Result<BarDemo, JsError> {
        Self::build(overrides).map_err(js)
    }

    pub fn advance(&mut self, steps: usize) -> Result<f64, JsError> {
        self.run_steps(steps).map_err(js)
    }

    pub fn time(&self) -> f64 {
        self.sim.time()
    }

    pub fn t_end(&self) -> f64 {
        self.sim.config().t_end
    }

    pub fn finished(&self) -> bool {
        self.sim.finished()
    }

    pub fn energy(&self) -> f64 {
        self.sim.energy()
    }

    pub fn cracked_nodes(&self) -> usize {
        self.sim.phase().cracked_count()
    }

    /// `x, y` per vertex.
    pub fn vertices(&self) -> Vec<f64> {
        self.sim.mesh().vertices().iter().flat_map(|p| [p[0], p[1]]).collect()
    }

    /// Four vertex indices per cell, counterclockwise.
    pub fn cells(&self) -> Vec<u32> {
        self.sim.mesh().cells().iter().flat_map(|c| c.map(|v| v as u32)).collect()
    }

    /// Phase field per vertex.
    pub fn phase(&self) -> Vec<f64> {
        self.sim.phase().s.clone()
    }

    pub fn principal_stress_ratio(&self) -> Vec<f64> {
        self.stress_ratio()
    }
}

/// Bar of length `length` with wave speed 2 and impedance 2, loaded by a
/// compressive bump of unit peak and half width `width`.
pub fn unit_bar(width: f64, length: f64) -> dgfrac::Result<Bar1DProblem> {
    if !(width > 0.0) {
        return Err(dgfrac::Error::Invalid(format!("pulse width {width} must be positive")));
    }
    let end = PulseEnd {
        amplitude: -(1.0 / (width * width)).exp(),
        width,
        shift: width,
    };
    Bar1DProblem::new(length, 2.0, 2.0, Pulse1D::Bump { end, c_arg: 2.0, t_init: width })
}

/// Where and when the unit bar first exceeds `sigma_c` in tension.
pub fn spall(sigma_c: f64, width: f64, length: f64) -> dgfrac::Result<dgfrac::oracle_1d::SpallEvent> {
    let bar = unit_bar(width, length)?;
    let t_max = (2.0 * length + 2.0 * width) / bar.c;
    bar.spall_location(sigma_c, t_max, 400, 400)
}

/// `[x, t, distance from the free end]`, empty if the threshold is never
/// reached.
#[wasm_bindgen]
pub fn spall_point(sigma_c: f64, width: f64, length: f64) -> Result<Vec<f64>, JsError> {
    match spall(sigma_c, width, length) {
        Ok(e) => Ok(vec![e.x, e.t, e.distance_from_free_end]),
        Err(dgfrac::Error::NoSpall(_)) => Ok(Vec::new()),
        Err(e) => Err(js(e)),
    }
}

/// Stress of the unit bar on `samples` points at time `t`.
#[wasm_bindgen]
pub fn bar_stress(width: f64, length: f64, t: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let bar = unit_bar(width, length).map_err(js)?;
    let n = samples.max(2);
    Ok((0..n).map(|i| bar.analytic_state(length * i as f64 / (n - 1) as f64, t).1).collect())
}
