//! Command dispatch. Every command returns its artifacts as strings; nothing
//! touches the disk until all of them are complete.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use surface_fidelity::dual_map::build_dual;
use surface_fidelity::exact_engine::{
    amplitudes_from_quad, amplitudes_qubit_brute_with_budget, boundary_flip_ratio, correlation_quad_dual_with_budget,
    correlation_quad_transfer_with_budget, sector_sums_with_budget, AmplitudeResult, CorrelationQuad, StringClass,
};
use surface_fidelity::geometry::{build_strings, Lattice, SyndromeSet};
use surface_fidelity::mc_engine::{
    curve_of, curve_steepness, derive_seed, disorder_seed, estimate_ratio, sample_sector_flag, scan_and_cross, Estimator,
    McConfig, ScanResult,
};
use surface_fidelity::noise_model::{draw_random, draw_uniform_real, make_homogeneous, CouplingConfig, DistributionSpec};
use surface_fidelity::threshold_analysis::{
    adjudicate_two_value, classify_signed_random, critical_h_complex, dilution_assessment, predict_complex_h,
    predict_homogeneous_h, predict_homogeneous_j, predict_two_value, two_value_symmetric, CriticalPrediction,
    TwoValueConvention,
};

use crate::artifact::Artifact;
use crate::config::{swept, Command, CouplingPlan, CouplingSource, EngineChoice, RunConfig, SweepParameter, SyndromeSpec};
use crate::error::CliError;

/// Random real configurations per distance in the oracle suite.
pub const ORACLE_CONFIGS: usize = 20;
/// Relative window for naming a two-value convention.
pub const CONVENTION_TOLERANCE: f64 = 0.10;

#[derive(Debug)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// Printed to stdout.
    pub summary: String,
    /// Set when `validate` found failures; artifacts are still written.
    pub failure: Option<String>,
}

pub fn execute(config: &RunConfig, command: Command) -> Result<Outcome, CliError> {
    if let Some(declared) = config.command {
        if declared != command {
            return Err(CliError::Usage(format!(
                "config declares command `{}` but `{}` was requested",
                declared.name(),
                command.name()
            )));
        }
    }
    if config.is_stochastic(command) && config.seed.is_none() {
        return Err(CliError::Usage(format!("command `{}` needs a seed ([run] seed or --seed)", command.name())));
    }
    match command {
        Command::Exact => run_exact(config),
        Command::Tm => run_tm(config),
        Command::Mc => run_mc(config),
        Command::Scan => run_scan(config),
        Command::Predict => Ok(run_predict(config)),
        Command::Validate => run_validate(config),
    }
}

fn seed(config: &RunConfig) -> u64 {
    config.seed.unwrap_or(0)
}

/// `(sweep value, couplings)` for every point of one distance and draw.
fn sweep_values(plan: &CouplingPlan) -> Vec<Option<f64>> {
    match &plan.sweep {
        Some((_, values)) => values.iter().copied().map(Some).collect(),
        None => vec![None],
    }
}

pub fn build_couplings(lattice: &Lattice, plan: &CouplingPlan, x: Option<f64>, draw_seed: u64) -> Result<CouplingConfig, CliError> {
    let mut config = match &plan.source {
        CouplingSource::File(c) => c.clone(),
        CouplingSource::Distribution(spec) => {
            let spec = match (&plan.sweep, x) {
                (Some((param, _)), Some(x)) => swept(*spec, *param, x),
                _ => *spec,
            };
            match spec {
                DistributionSpec::Homogeneous { h, j } => make_homogeneous(lattice, h, j),
                random => draw_random(lattice, random, draw_seed)?,
            }
        }
    };
    for &(q, h) in &plan.field_overrides {
        config.set_field(q, Complex64::new(h, 0.0))?;
    }
    for &(i, j, v) in &plan.pair_overrides {
        config.set_pair(i, j, Complex64::new(v, 0.0))?;
    }
    Ok(config)
}

fn syndrome_for(lattice: &Lattice, spec: &SyndromeSpec) -> Result<SyndromeSet, CliError> {
    Ok(match spec {
        SyndromeSpec::Empty => SyndromeSet::empty(),
        SyndromeSpec::Coords(c) => SyndromeSet::from_coords(lattice, c)?,
    })
}

fn fmt_x(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| format!("{v}"))
}

struct Point {
    lattice: Lattice,
    x: Option<f64>,
    draw: usize,
    couplings: CouplingConfig,
    syndrome: SyndromeSet,
}

fn points(config: &RunConfig) -> Result<Vec<Point>, CliError> {
    let mut out = Vec::new();
    for &l in &config.distances {
        let lattice = Lattice::new(l)?;
        let syndrome = syndrome_for(&lattice, &config.syndrome)?;
        for x in sweep_values(&config.coupling) {
            for draw in 0..config.coupling.draws {
                let couplings = build_couplings(&lattice, &config.coupling, x, disorder_seed(seed(config), l, draw))?;
                out.push(Point { lattice: lattice.clone(), x, draw, couplings, syndrome: syndrome.clone() });
            }
        }
    }
    Ok(out)
}

fn exact_engines(p: &Point, config: &RunConfig) -> Result<Vec<AmplitudeResult>, CliError> {
    let b = config.budgets;
    let lattice = &p.lattice;
    let strings = build_strings(lattice, &p.syndrome)?;
    let class = StringClass::of(&p.syndrome, &strings)?;
    let dual = build_dual(lattice, &p.couplings)?;
    let width = dual.rows().min(dual.cols());
    let auto = config.engine == EngineChoice::Auto;
    let mut out = Vec::new();
    if config.engine == EngineChoice::QubitBrute || (auto && lattice.num_qubits() <= b.qubits) {
        out.push(amplitudes_qubit_brute_with_budget(lattice, &p.couplings, &p.syndrome, &strings, b.qubits)?);
    }
    if config.engine == EngineChoice::DualBrute || (auto && dual.num_sites() <= b.dual_sites) {
        let quad = correlation_quad_dual_with_budget(&dual, &p.syndrome, b.dual_sites)?;
        out.push(amplitudes_from_quad(&quad, class)?);
    }
    if config.engine == EngineChoice::TransferMatrix || (auto && width <= b.transfer_width) {
        let quad = correlation_quad_transfer_with_budget(&dual, &p.syndrome, b.transfer_width)?;
        out.push(amplitudes_from_quad(&quad, class)?);
    }
    let sector_fits = p.syndrome.is_empty() && lattice.num_plaquettes() <= b.sector_plaquettes;
    if config.engine == EngineChoice::SectorSums || (auto && sector_fits) {
        if !p.syndrome.is_empty() {
            return Err(CliError::Usage("sector_sums evaluates the empty syndrome only".into()));
        }
        out.push(sector_sums_with_budget(lattice, &p.couplings, b.sector_plaquettes)?.amplitudes);
    }
    if out.is_empty() {
        return Err(CliError::Engine(surface_fidelity::Error::BudgetExceeded {
            what: "every exact engine at distance",
            size: lattice.distance(),
            budget: 0,
        }));
    }
    Ok(out)
}

fn run_exact(config: &RunConfig) -> Result<Outcome, CliError> {
    let pts = points(config)?;
    let rows = pts
        .par_iter()
        .map(|p| exact_engines(p, config).map(|r| (p, r)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("distance,coupling,draw,engine,a_re,a_im,b_re,b_im,log_scale,fidelity,ratio_x\n");
    let mut summary = String::new();
    for (p, results) in rows {
        for r in results {
            let _ = writeln!(
                csv,
                "{},{},{},{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}",
                p.lattice.distance(),
                fmt_x(p.x),
                p.draw,
                r.engine.name(),
                r.a.re,
                r.a.im,
                r.b.re,
                r.b.im,
                r.log_scale,
                r.fidelity,
                r.ratio_x
            );
            let _ = writeln!(
                summary,
                "L={} x={} draw={} {}: fidelity {:.12} ratio_x {:.6e}",
                p.lattice.distance(),
                fmt_x(p.x),
                p.draw,
                r.engine.name(),
                r.fidelity,
                r.ratio_x
            );
        }
    }
    Ok(Outcome { artifacts: vec![Artifact::new("amplitudes.csv", csv)], summary, failure: None })
}

fn run_tm(config: &RunConfig) -> Result<Outcome, CliError> {
    let pts = points(config)?;
    let rows = pts
        .par_iter()
        .map(|p| -> Result<_, CliError> {
            let strings = build_strings(&p.lattice, &p.syndrome)?;
            let class = StringClass::of(&p.syndrome, &strings)?;
            let dual = build_dual(&p.lattice, &p.couplings)?;
            let quad = correlation_quad_transfer_with_budget(&dual, &p.syndrome, config.budgets.transfer_width)?;
            let amp = amplitudes_from_quad(&quad, class)?;
            Ok((p, quad, amp))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from(
        "distance,coupling,draw,c_pp_re,c_pp_im,c_pm_re,c_pm_im,c_mp_re,c_mp_im,c_mm_re,c_mm_im,log_scale,\
         boundary_flip_ratio_re,boundary_flip_ratio_im,fidelity,ratio_x\n",
    );
    let mut summary = String::new();
    for (p, q, amp) in rows {
        let r = boundary_flip_ratio(&q);
        let _ = writeln!(
            csv,
            "{},{},{},{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}",
            p.lattice.distance(),
            fmt_x(p.x),
            p.draw,
            quad_cells(&q),
            q.log_scale,
            r.re,
            r.im,
            amp.fidelity,
            amp.ratio_x
        );
        let _ = writeln!(
            summary,
            "L={} x={} draw={}: boundary-flip ratio {:.6} fidelity {:.12}",
            p.lattice.distance(),
            fmt_x(p.x),
            p.draw,
            r.re,
            amp.fidelity
        );
    }
    Ok(Outcome { artifacts: vec![Artifact::new("transfer.csv", csv)], summary, failure: None })
}

fn quad_cells(q: &CorrelationQuad) -> String {
    [q.c_pp, q.c_pm, q.c_mp, q.c_mm].iter().map(|c| format!("{:.15e},{:.15e}", c.re, c.im)).collect::<Vec<_>>().join(",")
}

fn run_mc(config: &RunConfig) -> Result<Outcome, CliError> {
    if config.mc.estimator == Estimator::BoundaryFlipTi && !matches!(config.syndrome, SyndromeSpec::Empty) {
        return Err(CliError::Usage("boundary_flip_ti estimates the empty syndrome only".into()));
    }
    let pts = points(config)?;
    let rows = pts
        .par_iter()
        .enumerate()
        .map(|(k, p)| -> Result<_, CliError> {
            let mc = McConfig { seed: derive_seed(seed(config), k as u64, 0), ..config.mc };
            let est = match config.mc.estimator {
                Estimator::SectorFlag => sample_sector_flag(&p.lattice, &p.couplings, &p.syndrome, &mc)?,
                Estimator::BoundaryFlipTi => estimate_ratio(&p.lattice, &p.couplings, &mc)?,
            };
            Ok((p, mc.seed, est))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv =
        String::from("size,coupling,draw,estimator,mean,std_error,acceptance_rate,sign_average,seed,burn_in,chains\n");
    let mut summary = String::new();
    for (p, s, e) in rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{:.10},{:.10},{:.6},{:.10},{},{},{}",
            p.lattice.distance(),
            fmt_x(p.x),
            p.draw,
            e.estimator.name(),
            e.mean,
            e.std_error,
            e.acceptance_rate,
            e.sign_average,
            s,
            e.burn_in,
            e.chains_used
        );
        let _ = writeln!(
            summary,
            "L={} x={} draw={}: ratio_x {:.6} +- {:.6}",
            p.lattice.distance(),
            fmt_x(p.x),
            p.draw,
            e.mean,
            e.std_error
        );
    }
    Ok(Outcome { artifacts: vec![Artifact::new("mc.csv", csv)], summary, failure: None })
}

fn scan(config: &RunConfig) -> Result<ScanResult, CliError> {
    let (_, values) = config
        .coupling
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("scan needs [coupling] scan_parameter with scan_values or scan_range".into()))?;
    if !matches!(config.syndrome, SyndromeSpec::Empty) {
        return Err(CliError::Usage("scan estimates the empty syndrome only".into()));
    }
    let mc = McConfig { seed: seed(config), ..config.mc };
    let plan = &config.coupling;
    Ok(scan_and_cross(&config.distances, values, plan.draws, &mc, |lattice, x, draw_seed| {
        build_couplings(lattice, plan, Some(x), draw_seed).map_err(|e| match e {
            CliError::Engine(inner) => inner,
            other => surface_fidelity::Error::InvalidScan(other.to_string()),
        })
    })?)
}

fn curves_csv(res: &ScanResult) -> String {
    let mut csv = String::from("size,coupling,estimator,mean,std_error,acceptance_rate,sign_average,seed\n");
    for p in &res.curves {
        let _ = writeln!(
            csv,
            "{},{},{},{:.10},{:.10},{:.6},{:.10},{}",
            p.size,
            p.coupling,
            p.estimator.name(),
            p.mean,
            p.std_error,
            p.acceptance_rate,
            p.sign_average,
            p.seed
        );
    }
    csv
}

fn steepness_lines(res: &ScanResult, sizes: &[usize]) -> String {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted
        .iter()
        .map(|&l| format!("steepness: size {l} max slope {:.6}\n", curve_steepness(&curve_of(&res.curves, l))))
        .collect()
}

fn run_scan(config: &RunConfig) -> Result<Outcome, CliError> {
    let res = scan(config)?;
    let mut report = res.threshold.report();
    report.push_str(&steepness_lines(&res, &config.distances));
    if let CouplingSource::Distribution(spec) = &config.coupling.source {
        let param = config.coupling.sweep.as_ref().map(|s| s.0);
        for p in predictions_for(spec, param) {
            report.push_str(&prediction_line(&p));
        }
    }
    let summary = report.clone();
    Ok(Outcome {
        artifacts: vec![Artifact::new("curves.csv", curves_csv(&res)), Artifact::new("threshold.txt", report)],
        summary,
        failure: None,
    })
}

fn prediction_line(p: &CriticalPrediction) -> String {
    let value = match p.critical_value {
        Some(z) if z.im == 0.0 => format!("{:.10}", z.re),
        Some(z) => format!("{:.10}{:+.10}i", z.re, z.im),
        None => "unknown".into(),
    };
    let ordered = match p.ordered_phase_exists {
        Some(true) => "yes",
        Some(false) => "no",
        None => "unknown",
    };
    let region = p.region.map_or("none", |r| r.name());
    format!(
        "prediction: scenario={} critical={} ordered_phase={} region={} notes={}\n",
        p.scenario.name(),
        value,
        ordered,
        region,
        p.notes
    )
}

fn predictions_for(spec: &DistributionSpec, param: Option<SweepParameter>) -> Vec<CriticalPrediction> {
    let mut out = Vec::new();
    match *spec {
        DistributionSpec::Homogeneous { h, j } => {
            if param == Some(SweepParameter::J) || (param.is_none() && j.norm() > 0.0) {
                out.push(predict_homogeneous_j());
            } else if h.im != 0.0 {
                out.push(predict_complex_h(-(2.0 * h).sinh().powi(2).arg()));
            } else {
                out.push(predict_homogeneous_h());
            }
        }
        DistributionSpec::TwoValue { h1, .. } => {
            if let Ok(p) = predict_two_value(h1.abs()) {
                out.push(p);
            }
        }
        DistributionSpec::Diluted { dilution, .. } => out.extend(dilution_assessment(dilution)),
        DistributionSpec::SignedRandom { h, q } => out.extend(classify_signed_random(h.abs(), q)),
    }
    out
}

fn run_predict(config: &RunConfig) -> Outcome {
    let mut report = String::new();
    report.push_str(&prediction_line(&predict_homogeneous_h()));
    report.push_str(&prediction_line(&predict_homogeneous_j()));
    for theta in [std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 3.0 * std::f64::consts::FRAC_PI_2] {
        report.push_str(&prediction_line(&predict_complex_h(theta)));
    }
    for conv in [TwoValueConvention::Printed, TwoValueConvention::Doubled] {
        let _ = writeln!(report, "two_value_symmetric: convention={} h_c={:.10}", conv.name(), two_value_symmetric(conv));
    }
    if let CouplingSource::Distribution(spec) = &config.coupling.source {
        if !matches!(spec, DistributionSpec::Homogeneous { .. }) {
            for p in predictions_for(spec, None) {
                report.push_str(&prediction_line(&p));
            }
        }
    }
    let _ = writeln!(report, "complex_anchor: theta=pi h_c={:.10}i", critical_h_complex(std::f64::consts::PI).im);
    Outcome { artifacts: vec![Artifact::new("predictions.txt", report.clone())], summary: report, failure: None }
}

#[derive(Default)]
struct Tally {
    passed: usize,
    failed: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed.push(what());
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn quad_rel(a: &CorrelationQuad, b: &CorrelationQuad) -> f64 {
    let scale = (b.log_scale - a.log_scale).exp();
    let pairs = [(a.c_pp, b.c_pp), (a.c_pm, b.c_pm), (a.c_mp, b.c_mp), (a.c_mm, b.c_mm)];
    let norm = pairs.iter().map(|(x, _)| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    pairs.iter().map(|(x, y)| (x - y * scale).norm()).fold(0.0, f64::max) / norm
}

/// Oracle syndromes that fit the plaquette grid: empty, single, adjacent
/// pair, diagonal pair.
fn oracle_syndromes(lattice: &Lattice) -> Vec<(&'static str, SyndromeSet)> {
    let (rows, cols) = (lattice.plaquette_rows(), lattice.plaquette_cols());
    let mut out = vec![("empty", SyndromeSet::empty())];
    out.push(("single", SyndromeSet::new([lattice.plaquette_index(0, 0)])));
    if cols >= 2 {
        out.push(("adjacent", SyndromeSet::new([lattice.plaquette_index(0, 0), lattice.plaquette_index(0, 1)])));
    }
    if rows >= 2 && cols >= 2 {
        out.push(("diagonal", SyndromeSet::new([lattice.plaquette_index(0, 0), lattice.plaquette_index(1, 1)])));
    }
    out
}

fn oracle_suite(config: &RunConfig, tally: &mut Tally, report: &mut String) -> Result<(), CliError> {
    let b = config.budgets;
    let mut distances: Vec<usize> =
        config.distances.iter().copied().filter(|&l| l * l + (l - 1) * (l - 1) <= b.qubits).collect();
    if distances.is_empty() {
        distances = vec![2, 3];
    }
    let tol = config.tolerance;
    for &l in &distances {
        let lattice = Lattice::new(l)?;
        let zero = CouplingConfig::zero(&lattice);
        // Without noise only the empty syndrome occurs; other syndromes have A = B = 0.
        let p = Point { lattice: lattice.clone(), x: None, draw: 0, couplings: zero, syndrome: SyndromeSet::empty() };
        let auto = RunConfig { engine: EngineChoice::Auto, ..config.clone() };
        for r in exact_engines(&p, &auto)? {
            tally.check(r.fidelity == 1.0, || format!("zero coupling L={l} {}: F={}", r.engine.name(), r.fidelity));
        }
        for k in 0..ORACLE_CONFIGS {
            let cfg = draw_uniform_real(&lattice, 0.8, 0.4, derive_seed(seed(config), k as u64, l as u64))?;
            let dual = build_dual(&lattice, &cfg)?;
            for (name, syn) in oracle_syndromes(&lattice) {
                let strings = build_strings(&lattice, &syn)?;
                let class = StringClass::of(&syn, &strings)?;
                let qb = amplitudes_qubit_brute_with_budget(&lattice, &cfg, &syn, &strings, b.qubits)?;
                let dq = correlation_quad_dual_with_budget(&dual, &syn, b.dual_sites)?;
                let db = amplitudes_from_quad(&dq, class)?;
                let tq = correlation_quad_transfer_with_budget(&dual, &syn, b.transfer_width)?;
                tally.check(rel(qb.ratio_x, db.ratio_x) <= tol, || {
                    format!("qubit_brute vs dual_brute L={l} config {k} {name}: {} vs {}", qb.ratio_x, db.ratio_x)
                });
                tally.check(quad_rel(&dq, &tq) <= tol, || {
                    format!("transfer vs dual quad L={l} config {k} {name}: {:e}", quad_rel(&dq, &tq))
                });
                let n_marked = syn.len();
                tally.check(dq.symmetry_residual(n_marked) <= 1e-12, || {
                    format!("quad symmetry L={l} config {k} {name}: {:e}", dq.symmetry_residual(n_marked))
                });
                if syn.is_empty() {
                    let ss = sector_sums_with_budget(&lattice, &cfg, b.sector_plaquettes)?;
                    tally.check(rel(ss.amplitudes.ratio_x, db.ratio_x) <= tol, || {
                        format!("sector_sums vs dual_brute L={l} config {k}: {} vs {}", ss.amplitudes.ratio_x, db.ratio_x)
                    });
                    tally.check(ss.amplitudes.a.norm() >= ss.amplitudes.b.norm(), || {
                        format!("|A| >= |B| L={l} config {k}")
                    });
                }
            }
        }
        let _ = writeln!(report, "oracle_distance: {l} configs {ORACLE_CONFIGS}");
    }
    Ok(())
}

fn adjudication(config: &RunConfig, tally: &mut Tally, report: &mut String) -> Result<(), CliError> {
    let two_value_sweep = matches!(config.coupling.source, CouplingSource::Distribution(DistributionSpec::TwoValue { .. }))
        && matches!(config.coupling.sweep, Some((SweepParameter::H12, _)));
    if !two_value_sweep {
        return Err(CliError::Usage(
            "adjudicate needs distribution = \"two_value\" with scan_parameter = \"h12\"".into(),
        ));
    }
    let res = scan(config)?;
    report.push_str("two_value_scan:\n");
    report.push_str(&res.threshold.report());
    report.push_str(&steepness_lines(&res, &config.distances));
    match res.threshold.threshold {
        None => {
            tally.failed.push("two-value scan found no crossing".into());
            report.push_str("winning_convention: undecided\n");
        }
        Some(t) => {
            let measured = t.abs();
            for conv in [TwoValueConvention::Printed, TwoValueConvention::Doubled] {
                let expected = two_value_symmetric(conv);
                let _ = writeln!(
                    report,
                    "convention_candidate: {} h_c={expected:.6} relative_deviation={:.4}",
                    conv.name(),
                    (measured - expected).abs() / expected
                );
            }
            let _ = writeln!(report, "measured_h_c: {measured:.6}");
            match adjudicate_two_value(measured, CONVENTION_TOLERANCE) {
                Some(conv) => {
                    tally.passed += 1;
                    let _ = writeln!(report, "winning_convention: {}", conv.name());
                }
                None => {
                    tally.failed.push(format!("measured h_c {measured:.6} matches no single convention"));
                    report.push_str("winning_convention: undecided\n");
                }
            }
        }
    }
    Ok(())
}

fn run_validate(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut tally = Tally::default();
    let mut report = String::new();
    oracle_suite(config, &mut tally, &mut report)?;
    if config.adjudicate {
        adjudication(config, &mut tally, &mut report)?;
    }
    let _ = writeln!(report, "checks_passed: {}", tally.passed);
    let _ = writeln!(report, "checks_failed: {}", tally.failed.len());
    for f in &tally.failed {
        let _ = writeln!(report, "failure: {f}");
    }
    let failure = (!tally.failed.is_empty()).then(|| format!("{} check(s) failed", tally.failed.len()));
    Ok(Outcome { artifacts: vec![Artifact::new("validate.txt", report.clone())], summary: report, failure })
}
