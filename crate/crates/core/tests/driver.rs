use dgfrac::driver::{RunConfig, RunTrace, Simulation, StepKind};
use dgfrac::io::{preset, read_trace, run_with_output};
use dgfrac::io::trace::format_trace;

/// Coarse curved bar hit hard enough to crack within a second.
fn cracking() -> RunConfig {
    let mut cfg = preset("curved-bar-2d-calibrated").unwrap();
    cfg.level = 0;
    cfg.dt_el = 0.004;
    cfg.dt_pf = 0.002;
    cfg.pulse.amplitude_minus = -3.0e6;
    cfg.t_end = 1.0;
    cfg.output_interval = 0.25;
    cfg
}

struct Observed {
    trace: RunTrace,
    s_inf_increased: bool,
    elastic_regrew: bool,
    dt_rule_broken: bool,
}

fn observe(cfg: RunConfig) -> Observed {
    let mut sim = Simulation::new(cfg.clone()).unwrap();
    let mut s_inf = sim.phase().s_inf.clone();
    let mut elastic = sim.phase().elastic.clone();
    let mut expected_dt = cfg.dt_el;
    let (mut s_inf_increased, mut elastic_regrew, mut dt_rule_broken) = (false, false, false);
    let trace = sim
        .run_with(|sim, rec| {
            let ph = sim.phase();
            s_inf_increased |= ph.s_inf.iter().zip(&s_inf).any(|(now, before)| now > before);
            elastic_regrew |= ph.elastic.iter().zip(&elastic).any(|(now, before)| *now && !*before);
            let clamped = (rec.t - cfg.t_end).abs() < 1e-12;
            dt_rule_broken |= !clamped && rec.dt != expected_dt;
            expected_dt = if rec.s_changed { cfg.dt_pf } else { cfg.dt_el };
            dt_rule_broken |= sim.next_dt() != expected_dt;
            s_inf = ph.s_inf.clone();
            elastic = ph.elastic.clone();
            Ok(())
        })
        .unwrap();
    Observed { trace, s_inf_increased, elastic_regrew, dt_rule_broken }
}

#[test]
fn cracking_run_visits_every_branch() {
    let obs = observe(cracking());
    let recs = &obs.trace.records;
    let first = recs.iter().position(|r| r.kind == StepKind::Dissipative).expect("no dissipative step");
    // intact steps before, relaxation with a shrinking step after
    assert!(recs[..first].iter().any(|r| !r.s_changed && r.kind == StepKind::Elastic));
    assert!(recs.iter().any(|r| r.s_changed && r.kind == StepKind::Elastic));
    assert!(recs.iter().any(|r| r.dt == 0.002) && recs.iter().any(|r| r.dt == 0.004));
    assert!(recs[first].cracked_nodes > 0);
    assert_eq!(recs[..first].iter().map(|r| r.cracked_nodes).max(), Some(0));
    assert!(!obs.dt_rule_broken);
}

#[test]
fn damage_is_irreversible() {
    let obs = observe(cracking());
    assert!(!obs.s_inf_increased);
    assert!(!obs.elastic_regrew);
    let recs = &obs.trace.records;
    assert!(recs.windows(2).all(|w| w[1].cracked_nodes >= w[0].cracked_nodes));
}

#[test]
fn material_changes_only_on_dissipative_steps() {
    let trace = Simulation::new(cracking()).unwrap().run().unwrap();
    let mut version = None;
    for r in &trace.records {
        if let Some(v) = version {
            match r.kind {
                StepKind::Elastic => assert_eq!(r.material_version, v, "step {}", r.step),
                StepKind::Dissipative => assert_ne!(r.material_version, v, "step {}", r.step),
            }
        }
        version = Some(r.material_version);
    }
}

#[test]
fn dissipative_steps_release_energy() {
    let trace = Simulation::new(cracking()).unwrap().run().unwrap();
    let t_init = cracking().pulse.t_init;
    for r in trace.records.iter().filter(|r| r.t - r.dt >= t_init) {
        assert!(r.dissipation >= -1e-12 * r.energy, "step {} gains {}", r.step, -r.dissipation);
    }
}

#[test]
fn energy_ledger_telescopes() {
    let cfg = cracking();
    let trace = Simulation::new(cfg.clone()).unwrap().run().unwrap();
    let recs = &trace.records;
    let last = recs.last().unwrap().energy;
    let total = trace.total_dissipation();
    assert!((total - (trace.initial_energy - last)).abs() <= 1e-12 * last.abs().max(1.0));
    // after the load is off
    let idx = recs.iter().position(|r| r.t - r.dt >= cfg.pulse.t_init).unwrap();
    let at_load_end = recs[idx - 1].energy;
    let after = trace.dissipation_after(cfg.pulse.t_init);
    assert!((after - (at_load_end - last)).abs() <= 1e-12 * at_load_end);
    assert!(after > 0.0);
}

#[test]
fn subcritical_run_leaves_the_bar_intact() {
    let cfg = preset("subcritical-smoke").unwrap();
    let mut sim = Simulation::new(cfg.clone()).unwrap();
    let trace = sim.run().unwrap();
    assert!(trace.records.iter().all(|r| r.kind == StepKind::Elastic && !r.s_changed));
    assert!(trace.records.iter().all(|r| r.dt == cfg.dt_el || (r.t - cfg.t_end).abs() < 1e-12));
    assert!(sim.phase().s.iter().all(|v| *v == 1.0));
    assert_eq!(trace.first_crack(), None);
    assert!(trace.records.last().unwrap().energy > 0.0);
}

#[test]
fn runs_are_bitwise_deterministic() {
    let a = Simulation::new(cracking()).unwrap().run().unwrap();
    let b = Simulation::new(cracking()).unwrap().run().unwrap();
    assert_eq!(format_trace(&a.records), format_trace(&b.records));
}

#[test]
fn snapshots_do_not_perturb_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cracking();
    cfg.t_end = 0.5;
    let with = run_with_output(&cfg, &dir.path().join("with")).unwrap();
    let mut silent = cfg.clone();
    silent.output_interval = 0.0;
    let without = run_with_output(&silent, &dir.path().join("without")).unwrap();
    assert_eq!(format_trace(&with.records), format_trace(&without.records));

    let count = |sub: &str| {
        std::fs::read_dir(dir.path().join(sub))
            .unwrap()
            .filter(|e| {
                let name = e.as_ref().unwrap().file_name().into_string().unwrap();
                name.starts_with("out_") && name.ends_with(".vtu")
            })
            .count()
    };
    assert_eq!(count("with"), (cfg.t_end / cfg.output_interval).floor() as usize + 1);
    assert_eq!(count("without"), 0);

    let rows = read_trace(&dir.path().join("with").join("trace.csv")).unwrap();
    assert_eq!(rows.len(), with.records.len());
    assert_eq!(rows.last().unwrap().energy, with.records.last().unwrap().energy);
    assert!(dir.path().join("with").join("config.txt").exists());
}

#[test]
fn saved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cracking();
    cfg.t_end = 0.3;
    cfg.output_interval = 0.0;
    let first = run_with_output(&cfg, dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("config.txt")).unwrap();
    let reread = dgfrac::io::parse_config(&text).unwrap();
    let second = Simulation::new(reread).unwrap().run().unwrap();
    assert_eq!(format_trace(&first.records), format_trace(&second.records));
}
