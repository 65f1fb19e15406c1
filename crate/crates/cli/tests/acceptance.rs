//! Acceptance suite. Runs without the libtest harness so each criterion
//! prints one PASS/FAIL line under a plain `cargo test`.

use std::f64::consts::{PI, SQRT_2};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surface_fidelity::dual_map::{build_dual, DualIsingModel};
use surface_fidelity::exact_engine::{
    amplitudes_from_quad, amplitudes_qubit, amplitudes_qubit_brute, correlation_quad_dual, correlation_quad_transfer,
    sector_sums, CorrelationQuad, StringClass,
};
use surface_fidelity::geometry::{build_strings, Lattice, SyndromeSet};
use surface_fidelity::mc_engine::{
    curve_of, curve_steepness, disorder_averaged_ratio, estimate_ratio, scan_and_cross, BurnIn, Estimator, McConfig,
};
use surface_fidelity::noise_model::{draw_uniform_real, make_homogeneous, CouplingConfig, DistributionSpec};
use surface_fidelity::threshold_analysis::{
    boundary_flip_onset, critical_h_complex, critical_h_real, extrapolate_inverse, two_value_symmetric,
    TwoValueConvention,
};

type Outcome = Result<String, String>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn syndromes(lattice: &Lattice) -> Vec<(&'static str, SyndromeSet)> {
    let (rows, cols) = (lattice.plaquette_rows(), lattice.plaquette_cols());
    let p = |r, c| lattice.plaquette_index(r, c);
    let mut out = vec![("empty", SyndromeSet::empty()), ("single", SyndromeSet::new([p(0, 0)]))];
    if cols >= 2 {
        out.push(("adjacent", SyndromeSet::new([p(0, 0), p(0, 1)])));
    }
    if rows >= 2 && cols >= 2 {
        out.push(("diagonal", SyndromeSet::new([p(0, 0), p(1, 1)])));
    }
    out
}

fn symmetric(q: &CorrelationQuad, n: usize) -> bool {
    q.symmetry_residual(n) <= 1e-12
}

/// Every computed quad is also checked against the global symmetry.
fn criteria_1_and_2() -> (Outcome, Outcome) {
    let start = Instant::now();
    let (mut worst, mut worst_sector, mut worst_sym, mut quads) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for l in [2, 3] {
        let lattice = Lattice::new(l).unwrap();
        for k in 0..20 {
            let cfg = draw_uniform_real(&lattice, 0.8, 0.4, 1000 * l as u64 + k).unwrap();
            let dual = build_dual(&lattice, &cfg).unwrap();
            for (_, syn) in syndromes(&lattice) {
                let strings = build_strings(&lattice, &syn).unwrap();
                let qb = amplitudes_qubit_brute(&lattice, &cfg, &syn, &strings).unwrap();
                let quad = correlation_quad_dual(&dual, &syn).unwrap();
                let db = amplitudes_from_quad(&quad, StringClass::of(&syn, &strings).unwrap()).unwrap();
                worst = worst.max(rel(qb.ratio_x, db.ratio_x));
                let tq = correlation_quad_transfer(&dual, &syn).unwrap();
                for q in [quad, tq] {
                    worst_sym = worst_sym.max(q.symmetry_residual(syn.len()));
                    quads += 1;
                }
                if syn.is_empty() {
                    let ss = sector_sums(&lattice, &cfg).unwrap();
                    worst_sector = worst_sector.max(rel(ss.amplitudes.ratio_x, db.ratio_x));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let c1 = format!("max rel diff qubit/dual {worst:.2e}, sector/dual {worst_sector:.2e}, {secs:.1}s");
    let r1 = if worst <= 1e-10 && worst_sector <= 1e-10 && secs < 60.0 { Ok(c1) } else { Err(c1) };
    let c2 = format!("max symmetry residual {worst_sym:.2e} over {quads} quads");
    let r2 = if worst_sym <= 1e-12 { Ok(c2) } else { Err(c2) };
    (r1, r2)
}

fn random_dual(rows: usize, cols: usize, seed: u64, complex: bool) -> DualIsingModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = DualIsingModel::new(rows, cols);
    let mut v = || {
        let im = if complex { rng.random_range(-0.8..0.8) } else { 0.0 };
        Complex64::new(rng.random_range(-0.7..0.7), im)
    };
    for r in 0..rows {
        for cc in 0..cols {
            let s = d.site(r, cc);
            if cc + 1 < cols {
                d.add_nn(s, d.site(r, cc + 1), v()).unwrap();
            }
            if r + 1 < rows {
                d.add_nn(s, d.site(r + 1, cc), v()).unwrap();
                if cc + 1 < cols {
                    d.add_diag(s, d.site(r + 1, cc + 1), v()).unwrap();
                    d.add_diag(d.site(r, cc + 1), d.site(r + 1, cc), v()).unwrap();
                }
            }
        }
    }
    for cc in 0..cols {
        d.add_top(cc, v());
        d.add_bottom(cc, v());
    }
    d
}

fn quad_rel(a: &CorrelationQuad, b: &CorrelationQuad) -> f64 {
    let scale = (b.log_scale - a.log_scale).exp();
    let pairs = [(a.c_pp, b.c_pp), (a.c_pm, b.c_pm), (a.c_mp, b.c_mp), (a.c_mm, b.c_mm)];
    let norm = pairs.iter().map(|(x, _)| x.norm()).fold(0.0, f64::max);
    pairs.iter().map(|(x, y)| (x - y * scale).norm()).fold(0.0, f64::max) / norm
}

fn criterion_3() -> Outcome {
    let (mut worst_real, mut worst_complex, mut grids) = (0.0f64, 0.0f64, 0);
    let mut sym_ok = true;
    for rows in 1..=5 {
        for cols in 1..=5 {
            if rows.min(cols) > 4 {
                continue;
            }
            grids += 1;
            let n = rows * cols;
            let marks = [SyndromeSet::empty(), SyndromeSet::new([0]), SyndromeSet::new([0, n - 1])];
            for k in 0..13u64 {
                let complex = k >= 10;
                let d = random_dual(rows, cols, 100 * n as u64 + k, complex);
                for m in &marks {
                    let a = correlation_quad_dual(&d, m).unwrap();
                    let b = correlation_quad_transfer(&d, m).unwrap();
                    sym_ok &= symmetric(&a, m.len()) && symmetric(&b, m.len());
                    let r = quad_rel(&a, &b);
                    if complex {
                        worst_complex = worst_complex.max(r);
                    } else {
                        worst_real = worst_real.max(r);
                    }
                }
            }
        }
    }
    let msg = format!("{grids} grids, worst real {worst_real:.2e}, worst complex {worst_complex:.2e}");
    if worst_real <= 1e-10 && worst_complex <= 1e-8 && sym_ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let sizes = [8, 12, 16];
    let js: Vec<f64> = (0..16).map(|k| 0.15 + 0.01 * k as f64).collect();
    let mc = McConfig { sweeps: 200_000, chains: 8, seed: 2024, burn_in: BurnIn::Pilot, ..McConfig::default() };
    let res = scan_and_cross(&sizes, &js, 1, &mc, |l, j, _| Ok(make_homogeneous(l, c(0.0), c(j)))).unwrap();
    let t = &res.threshold;
    let slopes: Vec<f64> = sizes.iter().map(|&l| curve_steepness(&curve_of(&res.curves, l))).collect();
    let steepening = slopes.windows(2).all(|w| w[1] > w[0]);
    let threshold = t.threshold.unwrap_or(f64::NAN);
    let msg = format!(
        "J_c {threshold:.4} +- {:.4} ({}), pairwise mean {:.4}, max slopes {:?}, {:.0}s",
        t.uncertainty.unwrap_or(f64::NAN),
        t.method,
        t.pairwise_mean.unwrap_or(f64::NAN),
        slopes.iter().map(|s| (s * 100.0).round() / 100.0).collect::<Vec<_>>(),
        start.elapsed().as_secs_f64()
    );
    if (0.21..=0.23).contains(&threshold) && steepening {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Outcome {
    let target = critical_h_real();
    let onsets: Vec<(f64, f64)> = [8usize, 12, 16]
        .iter()
        .map(|&w| (w as f64, boundary_flip_onset(w, 0.5, 0.2, 0.8, 1e-6).unwrap()))
        .collect();
    let drifting = onsets.windows(2).all(|p| (p[1].1 - target).abs() < (p[0].1 - target).abs());
    let estimate = extrapolate_inverse(&onsets).unwrap();
    let err = (estimate - target).abs() / target;
    let msg = format!(
        "onsets {:?}, extrapolated {estimate:.4} ({:.1}% from {target:.4})",
        onsets.iter().map(|p| (p.1 * 1e4).round() / 1e4).collect::<Vec<_>>(),
        100.0 * err
    );
    if drifting && err <= 0.05 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_6() -> Outcome {
    let worst = (0..100)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / 100.0 + 0.013;
            ((2.0 * critical_h_complex(theta)).sinh().powi(2) - Complex64::from_polar(1.0, -theta)).norm()
        })
        .fold(0.0, f64::max);
    let h0 = critical_h_complex(0.0);
    let hpi = critical_h_complex(PI);
    let anchors = (h0.re - 0.44068679).abs() < 5e-9
        && h0.im == 0.0
        && (h0.re - SQRT_2.ln_1p() / 2.0).abs() < 1e-15
        && hpi == Complex64::new(0.0, PI / 4.0);
    let msg = format!("max residual {worst:.2e}, h(0) = {:.8}, h(pi) = {}i", h0.re, hpi.im);
    if worst <= 1e-12 && anchors {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_7() -> Outcome {
    let mut exact_ones = true;
    for l in [2, 3] {
        let lattice = Lattice::new(l).unwrap();
        let zero = CouplingConfig::zero(&lattice);
        // A nonempty syndrome cannot occur without noise, and its A and B vanish.
        let syn = SyndromeSet::empty();
        let strings = build_strings(&lattice, &syn).unwrap();
        let class = StringClass::of(&syn, &strings).unwrap();
        let dual = build_dual(&lattice, &zero).unwrap();
        let fs = [
            amplitudes_qubit(&lattice, &zero, &syn).unwrap().fidelity,
            amplitudes_from_quad(&correlation_quad_dual(&dual, &syn).unwrap(), class).unwrap().fidelity,
            amplitudes_from_quad(&correlation_quad_transfer(&dual, &syn).unwrap(), class).unwrap().fidelity,
            sector_sums(&lattice, &zero).unwrap().amplitudes.fidelity,
        ];
        exact_ones &= fs.iter().all(|&f| f == 1.0);
    }
    let lattice = Lattice::new(8).unwrap();
    let strong = make_homogeneous(&lattice, c(0.0), c(1.0));
    // Local sector moves cannot cross between the frozen sectors at J = 1.
    let mc = McConfig { sweeps: 20_000, chains: 8, seed: 7, estimator: Estimator::BoundaryFlipTi, ..McConfig::default() };
    let est = estimate_ratio(&lattice, &strong, &mc).unwrap();
    let f = 1.0 / (1.0 + est.mean * est.mean);
    let msg = format!("zero coupling F == 1: {exact_ones}; J=1 L=8 ratio_x {:.4} +- {:.4}, F {f:.4}", est.mean, est.std_error);
    if exact_ones && est.mean >= 0.9 && f <= 0.55 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_8() -> Outcome {
    let (mut count, mut min_gap) = (0, f64::INFINITY);
    for k in 0..100u64 {
        let l = 2 + (k % 2) as usize;
        let lattice = Lattice::new(l).unwrap();
        let cfg = draw_uniform_real(&lattice, 1.5, 0.8, 77_000 + k).unwrap();
        let a = sector_sums(&lattice, &cfg).unwrap().amplitudes;
        min_gap = min_gap.min((a.a.norm() - a.b.norm()) / a.a.norm());
        count += 1;
    }
    let msg = format!("{count} configs, min (|A0|-|B0|)/|A0| = {min_gap:.3e}");
    if min_gap >= 0.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Ferromagnetic fields are negative under the `exp(−H)` weight. Monotone
/// means non-increasing and not constant: most diluted draws give exactly
/// zero, so equal zeros at two sizes are expected.
fn criterion_9() -> Outcome {
    let mc = McConfig { sweeps: 20_000, chains: 4, seed: 9, ..McConfig::default() };
    let avg = |d: f64, draws: usize| -> Vec<(f64, f64)> {
        [8usize, 12, 16]
            .iter()
            .map(|&l| {
                let lattice = Lattice::new(l).unwrap();
                let a = disorder_averaged_ratio(&lattice, DistributionSpec::Diluted { h: -0.6, dilution: d }, draws, &mc)
                    .unwrap();
                (a.mean, a.std_error)
            })
            .collect()
    };
    // Most diluted draws are resolved exactly by a field-free chain; the rest
    // carry the Monte Carlo noise, so many draws are needed.
    let diluted = avg(0.6, 1000);
    let clean = avg(0.0, 10);
    let down = diluted.windows(2).all(|w| w[1].0 < w[0].0);
    let up = clean.windows(2).all(|w| w[1].0 > w[0].0);
    let fmt = |v: &[(f64, f64)]| v.iter().map(|(m, e)| format!("{m:.3e}+-{e:.1e}")).collect::<Vec<_>>().join(", ");
    let msg = format!("d=0.6: [{}]; d=0: [{}]", fmt(&diluted), fmt(&clean));
    if down && up {
        Ok(msg)
    } else {
        Err(msg)
    }
}

const ADJUDICATION_CONFIG: &str = r#"
[run]
command = "validate"
seed = 10
adjudicate = true

[lattice]
distances = [8, 12]

[coupling]
distribution = "two_value"
h1 = -0.45
h2 = -0.45
scan_parameter = "h12"
scan_values = [-0.30, -0.35, -0.40, -0.45, -0.50, -0.55, -0.60]

[mc]
sweeps = 50000
chains = 8
"#;

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("adjudicate.toml");
    std::fs::write(&cfg, ADJUDICATION_CONFIG).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_surface-fidelity"))
        .args(["validate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    let report = std::fs::read_to_string(dir.path().join("out/validate.txt")).unwrap_or_default();
    let field = |key: &str| {
        report.lines().find_map(|l| l.strip_prefix(key)).map(|v| v.trim().to_string()).unwrap_or_default()
    };
    let measured: f64 = field("measured_h_c:").parse().unwrap_or(f64::NAN);
    let winner = field("winning_convention:");
    let hits: Vec<TwoValueConvention> = [TwoValueConvention::Printed, TwoValueConvention::Doubled]
        .into_iter()
        .filter(|&cv| (measured - two_value_symmetric(cv)).abs() / two_value_symmetric(cv) <= 0.10)
        .collect();
    let msg = format!("measured |h_c| {measured:.4}, report names `{winner}`, exit {:?}", out.status.code());
    match hits.as_slice() {
        [one] if winner == one.name() && out.status.success() => Ok(msg),
        _ => Err(msg),
    }
}

fn main() {
    // libtest flags such as `--list` must not trigger the full suite.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let (r1, r2) = criteria_1_and_2();
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "cross-engine oracle equivalence", r1),
        (2, "quad symmetry relation", r2),
        (3, "transfer matrix equals enumeration", criterion_3()),
        (4, "homogeneous-J threshold from MC crossings", criterion_4()),
        (5, "homogeneous-h boundary-flip onset", criterion_5()),
        (6, "complex critical curve", criterion_6()),
        (7, "fidelity limits", criterion_7()),
        (8, "|A0| >= |B0|", criterion_8()),
        (9, "dilution drives ratio_x down, clean field drives it up", criterion_9()),
        (10, "two-value convention adjudication", criterion_10()),
    ];
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(m) => println!("criterion {n:>2} PASS  {name}: {m}"),
            Err(m) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {m}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
