use std::f64::consts::PI;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use spdc_core::analysis::{
    chirp_scan, count_near_max, schmidt_number, squeezing_scan, subtract_linear_phase, ChirpFamily, ChirpScanRow,
};
use spdc_core::dispersion::{
    extraordinary_index, sellmeier_index, solve_phase_matching_angle, Axis, CrystalConfig, SellmeierCoefficients,
    SPEED_OF_LIGHT,
};
use spdc_core::gaussian_core::{
    calibrate_gain_scale, phase_normalize_supermodes, reduced_covariance, squeezing_db, takagi_factorize, SupermodeSet,
    SHOT_NOISE,
};
use spdc_core::jsa::{total_gain_invariant, PhaseMatching};
use spdc_core::modes::{
    build_frexels, optimize_permutation_reduced, optimize_phases_reduced, permute_covariance, ClusterGraph, ModeMatrix,
    PermutationScore,
};
use spdc_core::optimizer::{evolve, EvoConfig, NullifierTarget, ShapingProblem};
use spdc_core::pump::{
    apply_chirp, build_grid, gaussian_pump, pump_power_weight, shaped_pump, sigma_omega_from_fwhm, transfer_function,
    FrequencyGrid, PumpProfile, ShaperConfig,
};

use crate::config::{ClusterBlock, RunConfig, ShaperParams};
use crate::output::{Artifacts, Cell};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    PhaseMatch,
    Supermodes,
    ChirpScan,
    Optimize,
    Cluster,
    SqueezingScan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::PhaseMatch => "phase-match",
            Command::Supermodes => "supermodes",
            Command::ChirpScan => "chirp-scan",
            Command::Optimize => "optimize",
            Command::Cluster => "cluster",
            Command::SqueezingScan => "squeezing-scan",
        }
    }
}

/// Summary of a finished run; also written as `summary.json`.
#[derive(Debug)]
pub struct Report {
    pub summary: Value,
    pub outputs: Vec<String>,
}

pub fn run(command: Command, config: &RunConfig, out: &Path) -> Result<Report> {
    config.validate()?;
    match command {
        Command::ChirpScan => config.require(command.name(), &["chirp_scan"])?,
        Command::Cluster => config.require(command.name(), &["cluster"])?,
        Command::SqueezingScan => config.require(command.name(), &["cluster", "squeezing_scan"])?,
        Command::Optimize => {
            config.require(command.name(), &["optimize"])?;
            let fitness = &config.optimize.as_ref().expect("checked").fitness;
            if fitness.kind.needs_nullifiers() {
                config.require(command.name(), &["cluster"])?;
            }
        }
        Command::PhaseMatch | Command::Supermodes => {}
    }

    let mut artifacts = Artifacts::create(out)?;
    let summary = match command {
        Command::PhaseMatch => phase_match(config, &mut artifacts)?,
        Command::Supermodes => supermodes(config, &mut artifacts)?,
        Command::ChirpScan => chirp(config, &mut artifacts)?,
        Command::Optimize => optimize(config, &mut artifacts)?,
        Command::Cluster => cluster(config, &mut artifacts)?,
        Command::SqueezingScan => scan(config, &mut artifacts)?,
    };
    artifacts.json("summary.json", &summary)?;
    let outputs = artifacts.finish(command.name(), config)?;
    Ok(Report { summary, outputs })
}

/// Crystal, grid and reference pump shared by every command.
pub struct Setup {
    pub coeffs: SellmeierCoefficients,
    pub crystal: CrystalConfig,
    pub grid: FrequencyGrid,
    /// Gaussian pump with the configured chirp, before any shaper.
    pub pump: PumpProfile,
    pub phase_matching: PhaseMatching,
}

impl Setup {
    pub fn new(config: &RunConfig) -> Result<Self> {
        let coeffs = SellmeierCoefficients::bibo();
        let c = &config.crystal;
        let theta = match c.theta {
            Some(theta) => theta,
            None => solve_phase_matching_angle(c.pump_wavelength, &coeffs)?,
        };
        let crystal = CrystalConfig::new(c.length, theta, c.pump_wavelength)?;
        let sigma = sigma_omega_from_fwhm(c.pump_wavelength, config.pump.fwhm);
        let grid = build_grid(
            2.0 * c.pump_wavelength,
            config.grid.halfwidth_sigmas,
            sigma,
            config.grid.n_points,
        )?;
        let pump = apply_chirp(
            &gaussian_pump(&grid, config.pump.fwhm, c.pump_wavelength)?,
            config.pump.phi2,
        );
        let phase_matching =
            PhaseMatching::new(&grid, &crystal, &coeffs).context("building the phase-matching table")?;
        Ok(Self {
            coeffs,
            crystal,
            grid,
            pump,
            phase_matching,
        })
    }

    /// The pump after the configured shaper, with its transmitted power fraction.
    pub fn shaped_pump(&self, config: &RunConfig) -> Result<(PumpProfile, Option<f64>)> {
        match &config.shaper {
            None => Ok((self.pump.clone(), None)),
            Some(block) => {
                let shaper = block.to_config()?;
                Ok((
                    shaped_pump(&self.pump, &shaper)?,
                    Some(pump_power_weight(&shaper, &self.pump)?),
                ))
            }
        }
    }

    pub fn supermodes(&self, pump: &PumpProfile) -> Result<SupermodeSet> {
        let l = self.phase_matching.jsa(pump)?;
        Ok(phase_normalize_supermodes(&takagi_factorize(l.matrix())?, l.matrix())?)
    }
}

fn phase_match(config: &RunConfig, artifacts: &mut Artifacts) -> Result<Value> {
    let coeffs = SellmeierCoefficients::bibo();
    let lp = config.crystal.pump_wavelength;
    let theta_star = solve_phase_matching_angle(lp, &coeffs)?;
    let theta = config.crystal.theta.unwrap_or(theta_star);
    let (pump_um, signal_um) = (lp * 1e6, 2.0 * lp * 1e6);
    let n_pump = sellmeier_index(Axis::X, pump_um, &coeffs)?;
    let n_signal = extraordinary_index(signal_um, theta, &coeffs)?;
    let mut rows = Vec::new();
    for (label, um) in [("pump", pump_um), ("signal", signal_um)] {
        for (axis, a) in [("x", Axis::X), ("y", Axis::Y), ("z", Axis::Z)] {
            rows.push(vec![
                Cell::from(label),
                Cell::from(um * 1e-6),
                Cell::from(axis),
                Cell::from(sellmeier_index(a, um, &coeffs)?),
            ]);
        }
    }
    artifacts.csv("indices.csv", &["beam", "wavelength_m", "axis", "index"], rows)?;
    Ok(json!({
        "pump_wavelength": lp,
        "theta_phase_matched": theta_star,
        "theta_phase_matched_deg": theta_star.to_degrees(),
        "theta": theta,
        "residual": n_signal - n_pump,
        "n_pump_x": n_pump,
        "n_signal_extraordinary": n_signal,
    }))
}

fn supermodes(config: &RunConfig, artifacts: &mut Artifacts) -> Result<Value> {
    let setup = Setup::new(config)?;
    let (pump, weight) = setup.shaped_pump(config)?;
    let set = setup.supermodes(&pump)?;
    let gains = set.gains();
    let target = config.calibration.leading_db;
    let eta_t = calibrate_gain_scale(&set, target)?;

    let rows = gains
        .iter()
        .enumerate()
        .map(|(k, &g)| {
            let variance = SHOT_NOISE * (-2.0 * eta_t * g).exp();
            Ok(vec![
                Cell::from(k),
                Cell::from(g),
                Cell::from(g / gains[0]),
                Cell::from(variance),
                Cell::from(squeezing_db(variance)?),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    artifacts.csv(
        "gains.csv",
        &[
            "index",
            "gain",
            "gain_over_leading",
            "squeezed_variance",
            "squeezing_db",
        ],
        rows,
    )?;

    let export = config.supermodes.export_modes.min(set.len());
    let omegas = setup.grid.omegas();
    let center = setup.grid.center();
    let mut profiles = Vec::with_capacity(export);
    let mut delays = Vec::with_capacity(export);
    for k in 0..export {
        let (delay, v) = subtract_linear_phase(omegas, &set.mode(k), center)?;
        delays.push(delay);
        profiles.push(v);
    }
    let mut header = vec!["omega".to_string(), "wavelength_m".to_string()];
    for k in 0..export {
        header.push(format!("mode{k}_re"));
        header.push(format!("mode{k}_im"));
    }
    let rows = omegas
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let mut row = vec![Cell::from(w), Cell::from(2.0 * PI * SPEED_OF_LIGHT / w)];
            for p in &profiles {
                row.push(Cell::from(p[i].re));
                row.push(Cell::from(p[i].im));
            }
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    artifacts.csv("supermodes.csv", &header, rows)?;

    let l = setup.phase_matching.jsa(&pump)?.into_matrix();
    Ok(json!({
        "theta": setup.crystal.theta,
        "crystal_length": setup.crystal.length,
        "n_points": setup.grid.len(),
        "leading_gain": gains[0],
        "gain_scale": eta_t,
        "leading_db": target,
        "gain_fraction": config.supermodes.gain_fraction,
        "count_above_fraction": count_near_max(gains, config.supermodes.gain_fraction),
        "gap": gains.get(1).map(|g2| gains[0] / g2),
        "schmidt_number": schmidt_number(gains)?,
        "total_gain": total_gain_invariant(&l),
        "pump_weight": weight,
        "mode_delays": delays,
    }))
}

fn chirp(config: &RunConfig, artifacts: &mut Artifacts) -> Result<Value> {
    let block = config.chirp_scan.as_ref().expect("checked");
    let setup = Setup::new(config)?;
    let base = gaussian_pump(&setup.grid, config.pump.fwhm, config.crystal.pump_wavelength)?;
    let result = chirp_scan(&setup.phase_matching, &base, &block.phi2, block.top)?;
    let family = |row: &ChirpScanRow| match row.family {
        ChirpFamily::Chirped => "chirped",
        ChirpFamily::Unchirped => "unchirped",
    };

    let rows_of = |rows: &[ChirpScanRow]| -> Result<Vec<Vec<Cell>>> {
        rows.iter()
            .map(|r| {
                Ok(vec![
                    Cell::from(family(r)),
                    Cell::from(r.phi2),
                    Cell::from(r.duration_ratio),
                    Cell::from(r.measured_duration_ratio),
                    Cell::from(r.leading_gain),
                    Cell::from(r.total_gain),
                    Cell::from(count_near_max(&r.top_gains, block.near_max_fraction)),
                    Cell::from(schmidt_number(&r.top_gains)?),
                ])
            })
            .collect()
    };
    let mut rows = rows_of(&result.chirped)?;
    rows.extend(rows_of(&result.unchirped)?);
    artifacts.csv(
        "chirp_scan.csv",
        &[
            "family",
            "phi2",
            "duration_ratio",
            "measured_duration_ratio",
            "leading_gain",
            "total_gain",
            "near_max_count",
            "schmidt_number",
        ],
        rows,
    )?;
    let gain_rows = result
        .chirped
        .iter()
        .chain(&result.unchirped)
        .flat_map(|r| {
            r.top_gains
                .iter()
                .enumerate()
                .map(move |(k, g)| vec![Cell::from(family(r)), Cell::from(r.phi2), Cell::from(k), Cell::from(*g)])
        })
        .collect();
    artifacts.csv("chirp_gains.csv", &["family", "phi2", "index", "gain"], gain_rows)?;

    let t0 = result.chirped[0].total_gain;
    let spread = result
        .chirped
        .iter()
        .map(|r| (r.total_gain - t0).abs() / t0)
        .fold(0.0, f64::max);
    let increasing = result.unchirped.windows(2).all(|w| w[1].total_gain > w[0].total_gain);
    Ok(json!({
        "reference_gain": result.reference_gain,
        "chirped_total_gain_spread": spread,
        "unchirped_total_gain_increasing": increasing,
        "near_max_fraction": block.near_max_fraction,
        "rows": result.chirped.len(),
    }))
}

fn nullifier_target(config: &RunConfig, cluster: &ClusterBlock, grid: &FrequencyGrid) -> Result<NullifierTarget> {
    let base = build_frexels(&cluster.frexels, grid)?;
    let perm: Vec<usize> = cluster
        .permutation
        .clone()
        .unwrap_or_else(|| (0..cluster.frexels.len()).collect());
    Ok(NullifierTarget {
        modes: base.permuted(&perm)?,
        graph: cluster.graph.build()?,
        target_db: config.calibration.leading_db,
        search: cluster.search.clone(),
    })
}

#[derive(Serialize)]
struct BestShaper<'a> {
    shaper: &'a ShaperConfig,
    fitness: f64,
    weight: f64,
}

fn optimize(config: &RunConfig, artifacts: &mut Artifacts) -> Result<Value> {
    let block = config.optimize.as_ref().expect("checked");
    let setup = Setup::new(config)?;
    let shaper_block = config.shaper.clone().unwrap_or_default();
    let nullifier = match (&config.cluster, block.fitness.kind.needs_nullifiers()) {
        (Some(cluster), true) => Some(nullifier_target(config, cluster, &setup.grid)?),
        _ => None,
    };
    let problem = ShapingProblem::new(
        setup.pump.clone(),
        setup.phase_matching.clone(),
        shaper_block.n_control,
        shaper_block.window_halfwidth_sigmas,
        block.fitness.clone(),
        nullifier,
    )?;
    let start = match &shaper_block.params {
        ShaperParams::Values(v) => v.clone(),
        _ => problem.identity(),
    };
    let mut evo = EvoConfig::new(
        problem.dimension(),
        block.initial_step,
        block.max_generations,
        config.seed,
    );
    if let Some(p) = block.population {
        evo.population = p;
        evo.parents = (p / 2).max(1);
    }
    let result = evolve(
        |x| problem.objective(x),
        &evo,
        problem.direction(),
        &start,
        &problem.bounds(),
    )?;

    let history = result
        .history
        .iter()
        .map(|g| {
            vec![
                Cell::from(g.index),
                Cell::from(g.best),
                Cell::from(g.generation_best),
                Cell::from(g.mean),
                Cell::from(g.step_size),
            ]
        })
        .collect();
    artifacts.csv(
        "history.csv",
        &["generation", "best", "generation_best", "mean", "step_size"],
        history,
    )?;

    let best = problem.evaluate(&result.best_point)?;
    let baseline = problem.evaluate(&start)?;
    let shaper = problem.shaper(&result.best_point)?;
    artifacts.json(
        "best_shaper.json",
        &BestShaper {
            shaper: &shaper,
            fitness: best.fitness,
            weight: best.weight,
        },
    )?;

    let shaped = shaped_pump(&setup.pump, &shaper)?;
    let transfer = transfer_function(&shaper, &setup.pump)?;
    let rows = setup
        .pump
        .axis()
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let (b, s) = (setup.pump.amplitudes()[i], shaped.amplitudes()[i]);
            vec![
                Cell::from(w),
                Cell::from(b.re),
                Cell::from(b.im),
                Cell::from(s.re),
                Cell::from(s.im),
                Cell::from(transfer[i].norm()),
                Cell::from(transfer[i].arg()),
            ]
        })
        .collect();
    artifacts.csv(
        "pump.csv",
        &[
            "omega",
            "base_re",
            "base_im",
            "shaped_re",
            "shaped_im",
            "transfer_abs",
            "transfer_arg",
        ],
        rows,
    )?;
    let top = best.gains.len().min(100);
    let rows = best.gains[..top]
        .iter()
        .enumerate()
        .map(|(k, g)| vec![Cell::from(k), Cell::from(*g), Cell::from(g / best.gains[0])])
        .collect();
    artifacts.csv("gains.csv", &["index", "gain", "gain_over_leading"], rows)?;

    Ok(json!({
        "fitness": block.fitness,
        "seed": config.seed,
        "generations": result.history.len(),
        "evaluations": result.evaluations,
        "population": evo.population,
        "best_value": result.best_value,
        "baseline_value": baseline.fitness,
        "weight": best.weight,
        "gap": best.gains.get(1).map(|g| best.gains[0] / g),
        "count_above_0.9": count_near_max(&best.gains, 0.9),
        "mean_nullifier_variance": best.nullifiers.as_ref().map(|n| n.mean_variance),
        "baseline_mean_nullifier_variance": baseline.nullifiers.as_ref().map(|n| n.mean_variance),
    }))
}

/// Frexels in band order, the graph, and the calibrated supermodes of the configured pump.
struct ClusterInputs {
    set: SupermodeSet,
    frexels: ModeMatrix,
    graph: ClusterGraph,
    gain_scale: f64,
    weight: Option<f64>,
}

fn cluster_inputs(config: &RunConfig) -> Result<ClusterInputs> {
    let block = config.cluster.as_ref().expect("checked");
    let setup = Setup::new(config)?;
    let (pump, weight) = setup.shaped_pump(config)?;
    let set = setup.supermodes(&pump)?;
    let gain_scale = calibrate_gain_scale(&set, config.calibration.leading_db)?;
    Ok(ClusterInputs {
        frexels: build_frexels(&block.frexels, &setup.grid)?,
        graph: block.graph.build()?,
        set,
        gain_scale,
        weight,
    })
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn cluster(config: &RunConfig, artifacts: &mut Artifacts) -> Result<Value> {
    let block = config.cluster.as_ref().expect("checked");
    let inputs = cluster_inputs(config)?;
    let cov = reduced_covariance(&inputs.set, inputs.gain_scale, inputs.frexels.matrix())?;
    let m = inputs.frexels.len();
    let trivial: Vec<usize> = (0..m).collect();

    let (ranking, best) = match &block.permutation {
        Some(perm) => {
            let opt = optimize_phases_reduced(&permute_covariance(&cov, perm)?, &inputs.graph, &block.search)?;
            let score = PermutationScore {
                permutation: perm.clone(),
                mean_variance: opt.mean_variance,
                thetas: opt.thetas,
            };
            (vec![score.clone()], score)
        }
        None => {
            let opt = optimize_permutation_reduced(&cov, &inputs.graph, &block.search)?;
            (opt.ranking, opt.best)
        }
    };
    let rows = ranking
        .iter()
        .map(|s| {
            Ok(vec![
                Cell::from(join(&s.permutation)),
                Cell::from(s.mean_variance),
                Cell::from(squeezing_db(s.mean_variance)?),
                Cell::from(join(&s.thetas.iter().map(|t| format!("{t:.16e}")).collect::<Vec<_>>())),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    artifacts.csv(
        "permutations.csv",
        &["permutation", "mean_variance", "mean_squeezing_db", "thetas"],
        rows,
    )?;

    let best_opt = optimize_phases_reduced(
        &permute_covariance(&cov, &best.permutation)?,
        &inputs.graph,
        &block.search,
    )?;
    let trivial_variance = ranking
        .iter()
        .find(|s| s.permutation == trivial)
        .map(|s| s.mean_variance);
    Ok(json!({
        "leading_db": config.calibration.leading_db,
        "gain_scale": inputs.gain_scale,
        "pump_weight": inputs.weight,
        "best_permutation": best.permutation,
        "best_mean_variance": best.mean_variance,
        "best_mean_squeezing_db": squeezing_db(best.mean_variance)?,
        "best_variances": best_opt.variances,
        "best_thetas": best.thetas,
        "trivial_mean_variance": trivial_variance,
    }))
}

fn scan(config: &RunConfig, artifacts: &mut Artifacts) -> Result<Value> {
    let block = config.cluster.as_ref().expect("checked");
    let dbs = &config.squeezing_scan.as_ref().expect("checked").leading_db;
    let inputs = cluster_inputs(config)?;
    let perm = match &block.permutation {
        Some(p) => p.clone(),
        None => {
            let cov = reduced_covariance(&inputs.set, inputs.gain_scale, inputs.frexels.matrix())?;
            optimize_permutation_reduced(&cov, &inputs.graph, &block.search)?
                .best
                .permutation
        }
    };
    let modes = inputs.frexels.permuted(&perm)?;
    let points = squeezing_scan(&inputs.set, &modes, &inputs.graph, dbs, &block.search)?;

    let m = modes.len();
    let mut header = vec![
        "leading_db".to_string(),
        "gain_scale".into(),
        "mean_variance".into(),
        "mean_squeezing_db".into(),
    ];
    header.extend((0..m).map(|j| format!("variance{j}")));
    header.extend((0..m).map(|j| format!("theta{j}")));
    let rows = points
        .iter()
        .map(|p| {
            let mut row = vec![
                Cell::from(p.leading_db),
                Cell::from(p.gain_scale),
                Cell::from(p.mean_variance),
                Cell::from(squeezing_db(p.mean_variance)?),
            ];
            row.extend(p.variances.iter().map(|v| Cell::from(*v)));
            row.extend(p.thetas.iter().map(|t| Cell::from(*t)));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    artifacts.csv("squeezing_scan.csv", &header, rows)?;

    let min = points
        .iter()
        .min_by(|a, b| a.mean_variance.total_cmp(&b.mean_variance))
        .expect("non-empty scan");
    let first_below = points.iter().position(|p| p.mean_variance < SHOT_NOISE);
    let exceeds_later = first_below.is_some_and(|i| points[i..].iter().any(|p| p.mean_variance > SHOT_NOISE));
    Ok(json!({
        "permutation": perm,
        "calibration_db": config.calibration.leading_db,
        "min_mean_variance": min.mean_variance,
        "min_at_leading_db": min.leading_db,
        "dips_below_shot_noise": first_below.is_some(),
        "exceeds_shot_noise_afterwards": exceeds_later,
    }))
}
