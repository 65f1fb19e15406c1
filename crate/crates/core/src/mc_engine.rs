//! Metropolis estimators of `ratio_x = |B|/|A|` beyond exact budgets.
//!
//! `sector_flag` samples the star-constrained qubit space directly. The state
//! is an x-configuration reached from all-up by plaquette flips, and its
//! logical sector. Moves toggle one plaquette or flip the fixed top-row chain
//! `γ`. Each measurement is Rao-Blackwellized over a set of left-to-right
//! chains `γ_k` with no coupling between them. Flipping any subset of them
//! changes the sector by the subset's parity and the energy by the sum of the
//! single-chain costs, so the expectation of any observable over the `2^K`
//! orbit of `σ` is a product of `K` two-state factors. It is exact and
//! unbiased, and a chain of qubits that carry no coupling at all makes `B`
//! vanish exactly, as it does in the exact engines.
//!
//! `boundary_flip_ti` samples the dual model instead and integrates
//! `d ln C(+, λ) / dλ = −⟨Σ h̃_b μ_b⟩_λ` from `λ = 1` to `λ = −1`, giving
//! `r = C(+,−)/C(+,+)` and `ratio_x = (1 − r)/(1 + r)` for the empty syndrome.
//!
//! The sector-flag chain must tunnel between sectors to weigh domain walls of
//! every shape. Deep in the ordered phase tunnelling stalls: independent
//! chains freeze in different sectors and the jackknife error grows to the
//! size of the estimate. `boundary_flip_ti` has no such barrier there.
//!
//! Every chain owns a ChaCha8 stream seeded by [`derive_seed`]; chains run in
//! parallel and are merged in chain order, so results are bit-identical for a
//! given configuration.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dual_map::{build_dual, DualIsingModel};
use crate::error::{Error, Result};
use crate::flips::FlipOp;
use crate::geometry::{apply_logical_x, build_strings, Lattice, SyndromeSet};
use crate::noise_model::{draw_random, CouplingConfig, DistributionSpec};

/// Sweeps of the pilot run that sizes the default burn-in.
pub const PILOT_SWEEPS: usize = 1000;
/// Burn-in is this many integrated autocorrelation times of the pilot.
pub const PILOT_TAU_FACTOR: f64 = 10.0;
/// Batches used for errors when a single chain is run.
pub const SINGLE_CHAIN_BATCHES: usize = 10;

const PILOT_CHAIN: u64 = u64::MAX;
const DRAW_STREAM: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    SectorFlag,
    BoundaryFlipTi,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Self::SectorFlag => "sector_flag",
            Self::BoundaryFlipTi => "boundary_flip_ti",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurnIn {
    Fixed(usize),
    /// `PILOT_TAU_FACTOR` autocorrelation times of a `PILOT_SWEEPS` pilot,
    /// capped at half the sweeps.
    Pilot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    /// Sweeps per chain, burn-in included.
    pub sweeps: usize,
    pub burn_in: BurnIn,
    pub chains: usize,
    pub seed: u64,
    /// Sweeps between measurements.
    pub thinning: usize,
    pub estimator: Estimator,
    /// Equally spaced `λ` points on `[−1, 1]`.
    pub ti_steps: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            sweeps: 20_000,
            burn_in: BurnIn::Pilot,
            chains: 4,
            seed: 0,
            thinning: 1,
            estimator: Estimator::SectorFlag,
            ti_steps: 21,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidMcConfig(m.to_string()));
        if self.chains == 0 {
            return bad("chains must be at least 1");
        }
        if self.thinning == 0 {
            return bad("thinning must be at least 1");
        }
        if let BurnIn::Fixed(b) = self.burn_in {
            if b >= self.sweeps {
                return bad("sweeps must exceed burn_in");
            }
        }
        if self.sweeps < 2 {
            return bad("sweeps must be at least 2");
        }
        if self.estimator == Estimator::BoundaryFlipTi && self.ti_steps < 2 {
            return bad("ti_steps must be at least 2");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    /// Estimated `ratio_x`.
    pub mean: f64,
    pub std_error: f64,
    /// `B/A` before taking the magnitude. Real couplings make it real.
    pub signed_ratio: f64,
    pub chains_used: usize,
    pub acceptance_rate: f64,
    pub seed_lineage: Vec<u64>,
    /// Average of the `S` string sign, `⟨Π_S σ⟩`; 1 for the empty syndrome.
    pub sign_average: f64,
    pub burn_in: usize,
    pub estimator: Estimator,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Per-chain seed: `splitmix(splitmix(splitmix(master) ⊕ chain) ⊕ lambda)`.
pub fn derive_seed(master: u64, chain: u64, lambda: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ chain) ^ lambda)
}

/// Metropolis rule `u < min(1, e^{−ΔE})`.
pub fn metropolis_accept(delta: f64, u: f64) -> bool {
    delta <= 0.0 || u < (-delta).exp()
}

/// Integrated autocorrelation time with Sokal's self-consistent window
/// (`W ≥ 5τ`).
pub fn integrated_autocorrelation(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 4 {
        return 0.5;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let c0 = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 0.5;
    }
    let mut tau = 0.5;
    for t in 1..n / 2 {
        let ct = (0..n - t).map(|i| (series[i] - mean) * (series[i + t] - mean)).sum::<f64>() / n as f64;
        tau += ct / c0;
        if t as f64 >= 5.0 * tau {
            break;
        }
    }
    tau.max(0.5)
}

fn resolve_burn_in(mc: &McConfig, pilot: impl FnOnce() -> Vec<f64>) -> usize {
    match mc.burn_in {
        BurnIn::Fixed(b) => b,
        BurnIn::Pilot => {
            let tau = integrated_autocorrelation(&pilot());
            ((PILOT_TAU_FACTOR * tau).ceil() as usize).min(mc.sweeps / 2)
        }
    }
}

/// Jackknife of `|Σb| / |Σa|` over equally weighted units of `(a, b)` means.
fn jackknife_ratio(units: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = units.len() as f64;
    let sa: f64 = units.iter().map(|u| u.0).sum();
    let sb: f64 = units.iter().map(|u| u.1).sum();
    let signed = sb / sa;
    if units.len() < 2 {
        return (signed.abs(), 0.0, signed);
    }
    let leave: Vec<f64> = units.iter().map(|u| ((sb - u.1) / (sa - u.0)).abs()).collect();
    let lm = leave.iter().sum::<f64>() / n;
    let var = (n - 1.0) / n * leave.iter().map(|x| (x - lm).powi(2)).sum::<f64>();
    (signed.abs(), var.sqrt(), signed)
}

fn batch_means(series: &[(f64, f64)], batches: usize) -> Vec<(f64, f64)> {
    let size = series.len() / batches;
    if size == 0 {
        return vec![mean_pair(series)];
    }
    series.chunks(size).take(batches).map(mean_pair).collect()
}

fn mean_pair(s: &[(f64, f64)]) -> (f64, f64) {
    let n = s.len().max(1) as f64;
    (s.iter().map(|x| x.0).sum::<f64>() / n, s.iter().map(|x| x.1).sum::<f64>() / n)
}

fn real_of(config: &CouplingConfig) -> Result<()> {
    if config.is_real() {
        Ok(())
    } else {
        Err(Error::ComplexCouplings)
    }
}

/// Observables and moves of one sector-flag chain.
struct SectorProblem {
    plaquettes: Vec<FlipOp<f64>>,
    gamma: FlipOp<f64>,
    /// Mutually uncoupled left-to-right chains, see [`sector_chains`].
    chains: Vec<FlipOp<f64>>,
    /// Qubits of `S` and `X̄S`.
    s: Vec<usize>,
    xs: Vec<usize>,
    /// Sign picked up by `Π_S σ` and `Π_{X̄S} σ` under each chain flip.
    chain_sign_s: Vec<f64>,
    chain_sign_xs: Vec<f64>,
    n: usize,
}

/// Vertex-disjoint left-to-right qubit chains with no nonzero pair coupling
/// between different chains, cheapest first by `Σ |h| + Σ |J|`.
///
/// Each chain flips the sector, and because no coupling joins two chains the
/// energy cost of flipping any subset is the sum of the single costs. The
/// flips therefore generate a group whose orbit average is known in closed
/// form. A chain of uncoupled, field-free qubits costs nothing, which makes
/// the two sector sums equal; the cheapest-first order always finds it.
fn sector_chains(lattice: &Lattice, config: &CouplingConfig) -> Vec<Vec<usize>> {
    let l = lattice.distance();
    let nq = lattice.num_qubits();
    let mut partners: Vec<Vec<usize>> = vec![Vec::new(); nq];
    let mut cost: Vec<f64> = (0..nq).map(|q| config.field(q).norm()).collect();
    for (&(i, j), v) in config.pairs() {
        if v.norm() > 0.0 {
            partners[i].push(j);
            partners[j].push(i);
            cost[i] += v.norm();
            cost[j] += v.norm();
        }
    }
    let nv = l * (l - 1);
    let (left, right) = (nv, nv + 1);
    // Edge list per node; a dangling horizontal edge ends on `left` or `right`.
    let mut edges: Vec<(usize, usize, usize)> = Vec::with_capacity(nq);
    for q in 0..nq {
        let vs: Vec<usize> = lattice.vertices_of(q).iter().map(|&(r, c)| r * (l - 1) + c).collect();
        match vs.as_slice() {
            [a, b] => edges.push((*a, *b, q)),
            [a] if lattice.qubit(q).col == 0 => edges.push((left, *a, q)),
            [a] => edges.push((*a, right, q)),
            _ => {}
        }
    }
    let mut used_vertex = vec![false; nv + 2];
    let mut banned = vec![false; nq];
    let mut chains = Vec::new();
    loop {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv + 2];
        for &(a, b, q) in &edges {
            let open = |v: usize| v >= nv || !used_vertex[v];
            if !banned[q] && open(a) && open(b) {
                adj[a].push((b, q));
                adj[b].push((a, q));
            }
        }
        // Dijkstra; the per-qubit epsilon prefers short chains among equal costs.
        let mut dist = vec![f64::INFINITY; nv + 2];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; nv + 2];
        let mut heap = BinaryHeap::new();
        dist[left] = 0.0;
        heap.push((Reverse(OrdF64(0.0)), left));
        while let Some((Reverse(OrdF64(d)), v)) = heap.pop() {
            if d > dist[v] || v == right {
                continue;
            }
            for &(w, q) in &adj[v] {
                let nd = d + cost[q] + 1e-9;
                if nd < dist[w] {
                    dist[w] = nd;
                    prev[w] = Some((v, q));
                    heap.push((Reverse(OrdF64(nd)), w));
                }
            }
        }
        if prev[right].is_none() {
            return chains;
        }
        let mut chain = Vec::new();
        let mut at = right;
        while let Some((from, q)) = prev[at] {
            chain.push(q);
            used_vertex[at] = at < nv;
            at = from;
        }
        for &q in &chain {
            banned[q] = true;
            for &p in &partners[q] {
                banned[p] = true;
            }
        }
        chains.push(chain);
    }
}

struct OrdF64(f64);

impl PartialEq for OrdF64 {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct ChainOutput {
    series: Vec<(f64, f64)>,
    accepted: u64,
    attempted: u64,
}

impl SectorProblem {
    fn new(lattice: &Lattice, config: &CouplingConfig, syndrome: &SyndromeSet) -> Result<Self> {
        let strings = build_strings(lattice, syndrome)?;
        let s: Vec<usize> = strings.qubits.iter().copied().collect();
        let xs: Vec<usize> = apply_logical_x(lattice, &strings).qubits.into_iter().collect();
        let re = |z: Complex64| z.re;
        let chains = sector_chains(lattice, config);
        let parity = |set: &[usize], chain: &[usize]| {
            if set.iter().filter(|q| chain.contains(q)).count() % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        Ok(Self {
            plaquettes: lattice.plaquettes().iter().map(|p| FlipOp::new(config, p, re)).collect(),
            gamma: FlipOp::new(config, lattice.logical_z_path(), re),
            chain_sign_s: chains.iter().map(|g| parity(&s, g)).collect(),
            chain_sign_xs: chains.iter().map(|g| parity(&xs, g)).collect(),
            chains: chains.iter().map(|g| FlipOp::new(config, g, re)).collect(),
            s,
            xs,
            n: lattice.num_qubits(),
        })
    }

    /// A zero-cost chain that changes the sign of `Π_{X̄S} σ`.
    fn has_free_sector_flip(&self) -> bool {
        self.chains.iter().zip(&self.chain_sign_xs).any(|(c, &sx)| c.is_free() && sx < 0.0)
    }

    /// One sweep: every plaquette in index order, then one sector toggle.
    fn sweep(&self, sigma: &mut [i8], rng: &mut ChaCha8Rng) -> (u64, u64) {
        let mut acc = 0;
        for op in self.plaquettes.iter().chain(std::iter::once(&self.gamma)) {
            if metropolis_accept(op.delta(sigma), rng.random()) {
                op.apply(sigma);
                acc += 1;
            }
        }
        (acc, self.plaquettes.len() as u64 + 1)
    }

    /// `(Π_S σ, Π_{X̄S} σ)` averaged over the orbit of `σ` under all chain
    /// flips.
    fn measure(&self, sigma: &[i8]) -> (f64, f64) {
        let mut a = f64::from(self.s.iter().map(|&q| sigma[q]).product::<i8>());
        let mut b = f64::from(self.xs.iter().map(|&q| sigma[q]).product::<i8>());
        for (k, chain) in self.chains.iter().enumerate() {
            let d = chain.delta(sigma);
            // Conditional weight of the partner state with chain k flipped.
            let p = if d > 0.0 { (-d).exp() / (1.0 + (-d).exp()) } else { 1.0 / (1.0 + d.exp()) };
            a *= 1.0 - p * (1.0 - self.chain_sign_s[k]);
            b *= 1.0 - p * (1.0 - self.chain_sign_xs[k]);
        }
        (a, b)
    }

    fn run(&self, seed: u64, sweeps: usize, burn_in: usize, thinning: usize) -> ChainOutput {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sigma = vec![1i8; self.n];
        let mut out = ChainOutput { series: Vec::new(), accepted: 0, attempted: 0 };
        for t in 0..sweeps {
            let (a, n) = self.sweep(&mut sigma, &mut rng);
            if t >= burn_in {
                out.accepted += a;
                out.attempted += n;
                if (t - burn_in).is_multiple_of(thinning) {
                    out.series.push(self.measure(&sigma));
                }
            }
        }
        out
    }
}

fn merge(
    outputs: Vec<ChainOutput>,
    seeds: Vec<u64>,
    burn_in: usize,
    estimator: Estimator,
) -> McEstimate {
    let chains = outputs.len();
    let units: Vec<(f64, f64)> = if chains == 1 {
        batch_means(&outputs[0].series, SINGLE_CHAIN_BATCHES)
    } else {
        outputs.iter().map(|o| mean_pair(&o.series)).collect()
    };
    let (mean, std_error, signed_ratio) = jackknife_ratio(&units);
    let accepted: u64 = outputs.iter().map(|o| o.accepted).sum();
    let attempted: u64 = outputs.iter().map(|o| o.attempted).sum();
    let sign_average = units.iter().map(|u| u.0).sum::<f64>() / units.len() as f64;
    McEstimate {
        mean,
        std_error,
        signed_ratio,
        chains_used: chains,
        acceptance_rate: if attempted == 0 { 0.0 } else { accepted as f64 / attempted as f64 },
        seed_lineage: seeds,
        sign_average,
        burn_in,
        estimator,
    }
}

/// Sector-flag estimate of `ratio_x` for any syndrome. Couplings must be
/// real; pair couplings of any range are accepted.
///
/// With the empty syndrome and a chain of uncoupled, field-free qubits, `B`
/// vanishes identically; the estimate is then returned without sampling and
/// reports zero chains.
pub fn sample_sector_flag(
    lattice: &Lattice,
    config: &CouplingConfig,
    syndrome: &SyndromeSet,
    mc: &McConfig,
) -> Result<McEstimate> {
    mc.validate()?;
    real_of(config)?;
    if config.num_qubits() != lattice.num_qubits() {
        return Err(Error::SpinCount { expected: lattice.num_qubits(), got: config.num_qubits() });
    }
    let problem = SectorProblem::new(lattice, config, syndrome)?;
    if syndrome.is_empty() && problem.has_free_sector_flip() {
        // Every measurement is exactly (1, 0); no chain is needed.
        return Ok(McEstimate {
            mean: 0.0,
            std_error: 0.0,
            signed_ratio: 0.0,
            chains_used: 0,
            acceptance_rate: 0.0,
            seed_lineage: Vec::new(),
            sign_average: 1.0,
            burn_in: 0,
            estimator: Estimator::SectorFlag,
        });
    }
    let burn_in = resolve_burn_in(mc, || {
        let pilot = problem.run(derive_seed(mc.seed, PILOT_CHAIN, 0), PILOT_SWEEPS, 0, 1);
        pilot.series.iter().map(|x| x.1).collect()
    });
    let seeds: Vec<u64> = (0..mc.chains as u64).map(|c| derive_seed(mc.seed, c, 0)).collect();
    let outputs: Vec<ChainOutput> =
        seeds.par_iter().map(|&s| problem.run(s, mc.sweeps, burn_in, mc.thinning)).collect();
    Ok(merge(outputs, seeds, burn_in, Estimator::SectorFlag))
}

struct DualChain {
    adj: Vec<Vec<(usize, f64)>>,
    top: Vec<f64>,
    bottom: Vec<f64>,
}

impl DualChain {
    fn new(dual: &DualIsingModel) -> Self {
        let adj = dual.adjacency().into_iter().map(|v| v.into_iter().map(|(o, z)| (o, z.re)).collect()).collect();
        let top = dual.site_fields(1, 0).iter().map(|z| z.re).collect();
        let bottom = dual.site_fields(0, 1).iter().map(|z| z.re).collect();
        Self { adj, top, bottom }
    }

    /// Series of `Σ h̃_b μ_b` at `α_t = +1`, `α_b = λ`.
    fn run(&self, lambda: f64, seed: u64, sweeps: usize, burn_in: usize, thinning: usize) -> ChainOutput {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.adj.len();
        let field: Vec<f64> = (0..n).map(|s| self.top[s] + lambda * self.bottom[s]).collect();
        let mut mu = vec![1i8; n];
        let mut out = ChainOutput { series: Vec::new(), accepted: 0, attempted: 0 };
        for t in 0..sweeps {
            let mut acc = 0;
            for s in 0..n {
                let local: f64 = self.adj[s].iter().map(|&(o, j)| j * f64::from(mu[o])).sum::<f64>() + field[s];
                if metropolis_accept(-2.0 * f64::from(mu[s]) * local, rng.random()) {
                    mu[s] = -mu[s];
                    acc += 1;
                }
            }
            if t >= burn_in {
                out.accepted += acc;
                out.attempted += n as u64;
                if (t - burn_in).is_multiple_of(thinning) {
                    let m: f64 = (0..n).map(|s| self.bottom[s] * f64::from(mu[s])).sum();
                    out.series.push((1.0, m));
                }
            }
        }
        out
    }
}

/// Thermodynamic-integration estimate of `ratio_x` for the empty syndrome on
/// a real dual model.
pub fn estimate_ratio_ti(dual: &DualIsingModel, mc: &McConfig) -> Result<McEstimate> {
    mc.validate()?;
    if !dual.is_real() {
        return Err(Error::ComplexCouplings);
    }
    if mc.ti_steps < 2 {
        return Err(Error::InvalidMcConfig("ti_steps must be at least 2".into()));
    }
    let chain = DualChain::new(dual);
    let steps = mc.ti_steps;
    let lambdas: Vec<f64> = (0..steps).map(|k| -1.0 + 2.0 * k as f64 / (steps - 1) as f64).collect();

    let per_point: Vec<(f64, f64, usize, Vec<u64>, u64, u64)> = lambdas
        .par_iter()
        .enumerate()
        .map(|(k, &lambda)| {
            let burn_in = resolve_burn_in(mc, || {
                let pilot = chain.run(lambda, derive_seed(mc.seed, PILOT_CHAIN, k as u64), PILOT_SWEEPS, 0, 1);
                pilot.series.iter().map(|x| x.1).collect()
            });
            let seeds: Vec<u64> = (0..mc.chains as u64).map(|c| derive_seed(mc.seed, c, k as u64)).collect();
            let outs: Vec<ChainOutput> =
                seeds.iter().map(|&s| chain.run(lambda, s, mc.sweeps, burn_in, mc.thinning)).collect();
            let units: Vec<f64> = if outs.len() == 1 {
                batch_means(&outs[0].series, SINGLE_CHAIN_BATCHES).iter().map(|u| u.1).collect()
            } else {
                outs.iter().map(|o| mean_pair(&o.series).1).collect()
            };
            let n = units.len() as f64;
            let m = units.iter().sum::<f64>() / n;
            let var = if units.len() > 1 {
                units.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) / n
            } else {
                0.0
            };
            let acc = outs.iter().map(|o| o.accepted).sum();
            let att = outs.iter().map(|o| o.attempted).sum();
            (m, var, burn_in, seeds, acc, att)
        })
        .collect();

    let h = 2.0 / (steps - 1) as f64;
    let weight = |k: usize| if k == 0 || k == steps - 1 { h / 2.0 } else { h };
    let ln_r: f64 = per_point.iter().enumerate().map(|(k, p)| weight(k) * p.0).sum();
    let var_ln_r: f64 = per_point.iter().enumerate().map(|(k, p)| weight(k).powi(2) * p.1).sum();
    let r = ln_r.exp();
    let signed = (1.0 - r) / (1.0 + r);
    let std_error = 2.0 * r / (1.0 + r).powi(2) * var_ln_r.sqrt();
    let accepted: u64 = per_point.iter().map(|p| p.4).sum();
    let attempted: u64 = per_point.iter().map(|p| p.5).sum();
    Ok(McEstimate {
        mean: signed.abs(),
        std_error,
        signed_ratio: signed,
        chains_used: mc.chains,
        acceptance_rate: if attempted == 0 { 0.0 } else { accepted as f64 / attempted as f64 },
        seed_lineage: per_point.iter().flat_map(|p| p.3.iter().copied()).collect(),
        sign_average: 1.0,
        burn_in: per_point.iter().map(|p| p.2).max().unwrap_or(0),
        estimator: Estimator::BoundaryFlipTi,
    })
}

/// Empty-syndrome estimate with the estimator selected in `mc`.
pub fn estimate_ratio(lattice: &Lattice, config: &CouplingConfig, mc: &McConfig) -> Result<McEstimate> {
    match mc.estimator {
        Estimator::SectorFlag => sample_sector_flag(lattice, config, &SyndromeSet::empty(), mc),
        Estimator::BoundaryFlipTi => estimate_ratio_ti(&build_dual(lattice, config)?, mc),
    }
}

/// Seed of disorder draw `draw` at lattice distance `distance`.
pub fn disorder_seed(master: u64, distance: usize, draw: usize) -> u64 {
    derive_seed(master, distance as u64, DRAW_STREAM + draw as u64)
}

/// Average of `ratio_x` over `draws` disorder realizations. The error is the
/// spread across draws, which includes the sampling noise.
pub fn disorder_averaged_ratio(
    lattice: &Lattice,
    spec: DistributionSpec,
    draws: usize,
    mc: &McConfig,
) -> Result<DisorderAverage> {
    if draws == 0 {
        return Err(Error::InvalidMcConfig("at least one disorder draw is required".into()));
    }
    let estimates = (0..draws)
        .map(|d| {
            let config = draw_random(lattice, spec, disorder_seed(mc.seed, lattice.distance(), d))?;
            let run = McConfig { seed: derive_seed(mc.seed, d as u64, DRAW_STREAM + lattice.distance() as u64), ..*mc };
            estimate_ratio(lattice, &config, &run)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DisorderAverage::from_estimates(estimates))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisorderAverage {
    pub mean: f64,
    pub std_error: f64,
    /// Average of the signed `B/A`, free of the bias of the magnitude.
    pub signed_mean: f64,
    pub acceptance_rate: f64,
    pub estimates: Vec<McEstimate>,
}

impl DisorderAverage {
    fn from_estimates(estimates: Vec<McEstimate>) -> Self {
        let n = estimates.len() as f64;
        let mean = estimates.iter().map(|e| e.mean).sum::<f64>() / n;
        let std_error = if estimates.len() > 1 {
            (estimates.iter().map(|e| (e.mean - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            estimates[0].std_error
        };
        let signed_mean = estimates.iter().map(|e| e.signed_ratio).sum::<f64>() / n;
        let acceptance_rate = estimates.iter().map(|e| e.acceptance_rate).sum::<f64>() / n;
        Self { mean, std_error, signed_mean, acceptance_rate, estimates }
    }
}

/// One point of a curve table.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub size: usize,
    pub coupling: f64,
    pub estimator: Estimator,
    pub mean: f64,
    pub std_error: f64,
    pub acceptance_rate: f64,
    pub sign_average: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCrossing {
    pub size_a: usize,
    pub size_b: usize,
    pub coupling: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimate {
    pub crossings: Vec<PairCrossing>,
    /// Consecutive size pairs whose curves never cross inside the sweep.
    pub no_crossing: Vec<(usize, usize)>,
    pub pairwise_mean: Option<f64>,
    /// Half the range of the pairwise crossings.
    pub pairwise_spread: f64,
    /// Error of the pairwise mean propagated from the curve errors.
    pub statistical_error: f64,
    /// Intercept of the crossings against `1/(L_a L_b)`.
    pub extrapolated: Option<f64>,
    /// Half the gap between the `1/(L_a L_b)` and `1/√(L_a L_b)` intercepts.
    pub extrapolation_model_error: f64,
    pub threshold: Option<f64>,
    pub uncertainty: Option<f64>,
    pub method: &'static str,
}

impl ThresholdEstimate {
    /// Plain `key: value` report block.
    pub fn report(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| format!("{x:.6}"));
        let mut out = String::new();
        out.push_str(&format!("threshold: {}\n", opt(self.threshold)));
        out.push_str(&format!("uncertainty: {}\n", opt(self.uncertainty)));
        out.push_str(&format!("method: {}\n", self.method));
        out.push_str(&format!("pairwise_mean: {}\n", opt(self.pairwise_mean)));
        out.push_str(&format!("pairwise_spread: {:.6}\n", self.pairwise_spread));
        out.push_str(&format!("statistical_error: {:.6}\n", self.statistical_error));
        out.push_str(&format!("extrapolated: {}\n", opt(self.extrapolated)));
        out.push_str(&format!("extrapolation_model_error: {:.6}\n", self.extrapolation_model_error));
        for c in &self.crossings {
            out.push_str(&format!(
                "crossing: sizes {} {} at {:.6} +- {:.6}\n",
                c.size_a, c.size_b, c.coupling, c.std_error
            ));
        }
        for (a, b) in &self.no_crossing {
            out.push_str(&format!("no_crossing: sizes {a} {b}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub curves: Vec<CurvePoint>,
    pub threshold: ThresholdEstimate,
}

/// Estimates `ratio_x` for every size and sweep value, then locates the
/// crossings of consecutive-size curves.
///
/// `make(lattice, x, draw_seed)` builds the couplings of one disorder draw at
/// sweep value `x`. Draw seeds depend on size and draw index only, so each
/// size sees the same realizations along the sweep.
pub fn scan_and_cross<F>(sizes: &[usize], sweep: &[f64], draws: usize, mc: &McConfig, make: F) -> Result<ScanResult>
where
    F: Fn(&Lattice, f64, u64) -> Result<CouplingConfig> + Sync,
{
    mc.validate()?;
    if sizes.len() < 2 {
        return Err(Error::InvalidScan("at least two lattice sizes are required".into()));
    }
    if sweep.len() < 4 {
        return Err(Error::InvalidScan("at least four sweep points are required".into()));
    }
    if draws == 0 {
        return Err(Error::InvalidScan("at least one disorder draw is required".into()));
    }
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let lattices = sizes.iter().map(|&l| Lattice::new(l)).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..sizes.len()).flat_map(|i| (0..sweep.len()).map(move |k| (i, k))).collect();
    let curves = jobs
        .par_iter()
        .map(|&(i, k)| {
            let lattice = &lattices[i];
            let seed = derive_seed(mc.seed, ((i as u64) << 32) | k as u64, 0);
            let estimates = (0..draws)
                .map(|d| {
                    let config = make(lattice, sweep[k], disorder_seed(mc.seed, lattice.distance(), d))?;
                    let run = McConfig { seed: derive_seed(seed, d as u64, 1), ..*mc };
                    estimate_ratio(lattice, &config, &run)
                })
                .collect::<Result<Vec<_>>>()?;
            let (mean, std_error, acceptance_rate, sign_average) = if draws == 1 {
                let e = &estimates[0];
                (e.mean, e.std_error, e.acceptance_rate, e.sign_average)
            } else {
                let avg = DisorderAverage::from_estimates(estimates);
                let sign = avg.estimates.iter().map(|e| e.sign_average).sum::<f64>() / draws as f64;
                (avg.mean, avg.std_error, avg.acceptance_rate, sign)
            };
            Ok(CurvePoint {
                size: sizes[i],
                coupling: sweep[k],
                estimator: mc.estimator,
                mean,
                std_error,
                acceptance_rate,
                sign_average,
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let threshold = locate_threshold(&curves)?;
    Ok(ScanResult { curves, threshold })
}

/// Curve of one size, in sweep order.
pub fn curve_of(curves: &[CurvePoint], size: usize) -> Vec<&CurvePoint> {
    curves.iter().filter(|p| p.size == size).collect()
}

/// Largest finite-difference slope magnitude of one curve.
pub fn curve_steepness(curve: &[&CurvePoint]) -> f64 {
    curve
        .windows(2)
        .map(|w| ((w[1].mean - w[0].mean) / (w[1].coupling - w[0].coupling)).abs())
        .fold(0.0, f64::max)
}

/// Crossing of two curves sampled on the same sweep: a strict sign change
/// of their difference between consecutive sweep points. Among several, the
/// one splitting the difference curve into the most contrasting prefix and
/// suffix wins.
pub fn pair_crossing(a: &[&CurvePoint], b: &[&CurvePoint]) -> Option<(f64, f64)> {
    let d: Vec<f64> = a.iter().zip(b).map(|(p, q)| q.mean - p.mean).collect();
    let sd: Vec<f64> = a.iter().zip(b).map(|(p, q)| p.std_error.hypot(q.std_error)).collect();
    let total: f64 = d.iter().sum();
    let mut best: Option<(usize, f64)> = None;
    let mut prefix = 0.0;
    for k in 0..d.len().saturating_sub(1) {
        prefix += d[k];
        if d[k] * d[k + 1] < 0.0 {
            let contrast = ((total - prefix) - prefix).abs();
            if best.is_none_or(|(_, c)| contrast > c) {
                best = Some((k, contrast));
            }
        }
    }
    let (k, _) = best?;
    let (x0, x1) = (a[k].coupling, a[k + 1].coupling);
    let t = -d[k] / (d[k + 1] - d[k]);
    let x = x0 + t * (x1 - x0);
    let err = (x1 - x0).abs() * ((1.0 - t) * sd[k]).hypot(t * sd[k + 1]) / (d[k + 1] - d[k]).abs();
    Some((x, err))
}

fn intercept(points: &[(f64, f64, f64)]) -> (f64, f64) {
    // points: (u, x, σ); unweighted least squares, error propagated linearly.
    let n = points.len() as f64;
    let mu = points.iter().map(|p| p.0).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mu).powi(2)).sum();
    let coef = |u: f64| 1.0 / n - mu * (u - mu) / sxx;
    let value = points.iter().map(|p| coef(p.0) * p.1).sum();
    let err = points.iter().map(|p| (coef(p.0) * p.2).powi(2)).sum::<f64>().sqrt();
    (value, err)
}

/// Threshold from a curve table.
///
/// With two or more pairwise crossings the threshold is their intercept
/// against `1/(L_a L_b)`, the leading finite-size shift of a crossing point
/// for `ν = ω = 1`; the uncertainty adds the gap to the `1/√(L_a L_b)`
/// intercept. With one crossing it is that crossing.
pub fn locate_threshold(curves: &[CurvePoint]) -> Result<ThresholdEstimate> {
    let mut sizes: Vec<usize> = curves.iter().map(|p| p.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut crossings = Vec::new();
    let mut no_crossing = Vec::new();
    for w in sizes.windows(2) {
        let (a, b) = (curve_of(curves, w[0]), curve_of(curves, w[1]));
        if a.len() != b.len() || a.iter().zip(&b).any(|(p, q)| p.coupling != q.coupling) {
            return Err(Error::InvalidScan("curves are not sampled on a common sweep".into()));
        }
        match pair_crossing(&a, &b) {
            Some((x, e)) => crossings.push(PairCrossing { size_a: w[0], size_b: w[1], coupling: x, std_error: e }),
            None => no_crossing.push((w[0], w[1])),
        }
    }
    let n = crossings.len();
    let mut est = ThresholdEstimate {
        crossings: crossings.clone(),
        no_crossing,
        pairwise_mean: None,
        pairwise_spread: 0.0,
        statistical_error: 0.0,
        extrapolated: None,
        extrapolation_model_error: 0.0,
        threshold: None,
        uncertainty: None,
        method: "no crossing",
    };
    if n == 0 {
        return Ok(est);
    }
    let xs: Vec<f64> = crossings.iter().map(|c| c.coupling).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    est.pairwise_mean = Some(mean);
    est.pairwise_spread = (hi - lo) / 2.0;
    est.statistical_error = crossings.iter().map(|c| c.std_error.powi(2)).sum::<f64>().sqrt() / n as f64;
    if n == 1 {
        est.threshold = Some(mean);
        est.uncertainty = Some(est.statistical_error);
        est.method = "single pairwise crossing";
        return Ok(est);
    }
    let prod = |c: &PairCrossing| (c.size_a * c.size_b) as f64;
    let quad: Vec<(f64, f64, f64)> = crossings.iter().map(|c| (1.0 / prod(c), c.coupling, c.std_error)).collect();
    let lin: Vec<(f64, f64, f64)> = crossings.iter().map(|c| (1.0 / prod(c).sqrt(), c.coupling, c.std_error)).collect();
    let (x2, e2) = intercept(&quad);
    let (x1, _) = intercept(&lin);
    est.extrapolated = Some(x2);
    est.extrapolation_model_error = (x1 - x2).abs() / 2.0;
    est.threshold = Some(x2);
    est.uncertainty = Some(e2.hypot(est.extrapolation_model_error));
    est.method = "pairwise crossings extrapolated in 1/(L_a L_b)";
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_engine::{correlation_quad_dual, sector_sums};
    use crate::noise_model::make_homogeneous;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn quick(seed: u64) -> McConfig {
        McConfig { sweeps: 20_000, burn_in: BurnIn::Fixed(500), chains: 4, seed, ..McConfig::default() }
    }

    #[test]
    fn two_state_chain_has_boltzmann_stationary_law() {
        // States 0 and 1 with energies 0 and ΔE; proposal always the other state.
        let de: f64 = 0.7;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut state = 0;
        let mut time_in_1 = 0u64;
        let steps = 400_000;
        for _ in 0..steps {
            let d = if state == 0 { de } else { -de };
            if metropolis_accept(d, rng.random()) {
                state = 1 - state;
            }
            time_in_1 += state as u64;
        }
        let p1 = time_in_1 as f64 / steps as f64;
        let want = (-de).exp() / (1.0 + (-de).exp());
        assert!((p1 - want).abs() < 0.005, "{p1} vs {want}");
    }

    #[test]
    fn acceptance_rule_is_exact() {
        let d = 0.9f64;
        let boundary = (-d).exp();
        assert!(metropolis_accept(d, boundary - 1e-12));
        assert!(!metropolis_accept(d, boundary));
        assert!(metropolis_accept(-3.0, 0.999_999));
        assert!(metropolis_accept(0.0, 0.999_999));
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        assert_eq!(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
        let mut all: Vec<u64> = (0..8).flat_map(|c| (0..8).map(move |l| derive_seed(42, c, l))).collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 64);
    }

    #[test]
    fn zero_coupling_gives_zero_ratio() {
        let lat = Lattice::new(5).unwrap();
        let est = sample_sector_flag(&lat, &CouplingConfig::zero(&lat), &SyndromeSet::empty(), &quick(1)).unwrap();
        assert!(est.mean <= 3.0 * est.std_error + 1e-12, "{est:?}");
        let ti = estimate_ratio_ti(&DualIsingModel::new(3, 4), &McConfig { ti_steps: 5, ..quick(1) }).unwrap();
        assert_eq!(ti.mean, 0.0);
    }

    #[test]
    fn sector_flag_matches_exact() {
        let lat = Lattice::new(3).unwrap();
        let cfg = make_homogeneous(&lat, c(0.0), c(0.5));
        let exact = sector_sums(&lat, &cfg).unwrap().amplitudes.ratio_x;
        let est = sample_sector_flag(&lat, &cfg, &SyndromeSet::empty(), &quick(3)).unwrap();
        assert!((est.mean - exact).abs() <= 3.0 * est.std_error, "{} vs {exact} ({})", est.mean, est.std_error);
        assert_eq!(est.seed_lineage.len(), 4);
        assert!((0.0..=1.0).contains(&est.acceptance_rate));
    }

    #[test]
    fn free_chain_makes_b_vanish() {
        let lat = Lattice::new(4).unwrap();
        let mut cfg = make_homogeneous(&lat, c(-0.8), c(0.0));
        // Free staircase: left edge of row 1, down, then across row 2.
        let chain = [lat.horizontal(1, 0), lat.vertical(1, 0), lat.horizontal(2, 1), lat.horizontal(2, 2), lat.horizontal(2, 3)];
        for &q in &chain {
            cfg.set_field(q, c(0.0)).unwrap();
        }
        assert_eq!(sector_chains(&lat, &cfg)[0].len(), 5);
        let exact = sector_sums(&lat, &cfg).unwrap().amplitudes.ratio_x;
        assert!(exact < 1e-12);
        let est = sample_sector_flag(&lat, &cfg, &SyndromeSet::empty(), &quick(4)).unwrap();
        assert_eq!((est.mean, est.std_error, est.chains_used), (0.0, 0.0, 0));
        // A nonempty syndrome is still sampled, and B stays exactly zero.
        let s = SyndromeSet::new([lat.plaquette_index(0, 0), lat.plaquette_index(0, 1)]);
        let est = sample_sector_flag(&lat, &cfg, &s, &quick(4)).unwrap();
        assert_eq!((est.mean, est.chains_used), (0.0, 4));
        // Rows share no vertex, so nearest-neighbour pairs never join two of them.
        assert_eq!(sector_chains(&lat, &make_homogeneous(&lat, c(0.0), c(0.1))).len(), 4);
        let mut far = make_homogeneous(&lat, c(-0.4), c(0.0));
        far.set_pair(lat.horizontal(0, 1), lat.horizontal(3, 1), c(0.2)).unwrap();
        assert_eq!(sector_chains(&lat, &far).len(), 3);
        assert_eq!(sector_chains(&lat, &make_homogeneous(&lat, c(-0.4), c(0.0))).len(), 4);
    }

    #[test]
    fn ti_matches_exact_on_small_grid() {
        let lat = Lattice::new(4).unwrap();
        let cfg = make_homogeneous(&lat, c(-0.3), c(0.0));
        let dual = build_dual(&lat, &cfg).unwrap();
        let quad = correlation_quad_dual(&dual, &SyndromeSet::empty()).unwrap();
        let r = (quad.c_pm / quad.c_pp).re;
        let exact = (1.0 - r) / (1.0 + r);
        let mc = McConfig { estimator: Estimator::BoundaryFlipTi, ti_steps: 11, ..quick(5) };
        let est = estimate_ratio_ti(&dual, &mc).unwrap();
        assert!((est.mean - exact).abs() <= 3.0 * est.std_error, "{} vs {exact} ({})", est.mean, est.std_error);
    }

    #[test]
    fn reproducible() {
        let lat = Lattice::new(4).unwrap();
        let cfg = make_homogeneous(&lat, c(-0.3), c(0.1));
        let mc = McConfig { sweeps: 3000, burn_in: BurnIn::Pilot, ..quick(9) };
        let a = sample_sector_flag(&lat, &cfg, &SyndromeSet::empty(), &mc).unwrap();
        let b = sample_sector_flag(&lat, &cfg, &SyndromeSet::empty(), &mc).unwrap();
        assert_eq!(a, b);
        let single = McConfig { chains: 1, ..mc };
        let s = sample_sector_flag(&lat, &cfg, &SyndromeSet::empty(), &single).unwrap();
        assert!(s.std_error > 0.0);
    }

    #[test]
    fn rejects_complex_and_bad_configs() {
        let lat = Lattice::new(3).unwrap();
        let cfg = make_homogeneous(&lat, Complex64::new(0.0, 0.5), c(0.0));
        assert_eq!(
            sample_sector_flag(&lat, &cfg, &SyndromeSet::empty(), &quick(0)),
            Err(Error::ComplexCouplings)
        );
        let dual = build_dual(&lat, &cfg).unwrap();
        assert_eq!(estimate_ratio_ti(&dual, &quick(0)), Err(Error::ComplexCouplings));
        let bad = McConfig { sweeps: 10, burn_in: BurnIn::Fixed(10), ..quick(0) };
        assert!(matches!(bad.validate(), Err(Error::InvalidMcConfig(_))));
        assert!(McConfig { chains: 0, ..quick(0) }.validate().is_err());
    }

    #[test]
    fn autocorrelation_of_white_noise_is_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let tau = integrated_autocorrelation(&s);
        assert!((tau - 0.5).abs() < 0.05, "{tau}");
        // AR(1) with ρ = 0.9 has τ = (1+ρ)/(2(1−ρ)) = 9.5.
        let mut x = 0.0;
        let ar: Vec<f64> = (0..200_000)
            .map(|_| {
                x = 0.9 * x + rng.random::<f64>() - 0.5;
                x
            })
            .collect();
        let tau = integrated_autocorrelation(&ar);
        assert!((tau - 9.5).abs() < 1.0, "{tau}");
    }

    fn point(size: usize, coupling: f64, mean: f64) -> CurvePoint {
        CurvePoint {
            size,
            coupling,
            estimator: Estimator::SectorFlag,
            mean,
            std_error: 0.01,
            acceptance_rate: 0.5,
            sign_average: 1.0,
            seed: 0,
        }
    }

    #[test]
    fn identical_curves_do_not_cross() {
        let xs = [0.1, 0.2, 0.3, 0.4];
        let curves: Vec<CurvePoint> =
            [4, 6].iter().flat_map(|&l| xs.iter().map(move |&x| point(l, x, x))).collect();
        let t = locate_threshold(&curves).unwrap();
        assert_eq!(t.threshold, None);
        assert_eq!(t.no_crossing, vec![(4, 6)]);
        assert!(t.report().contains("threshold: none"));
    }

    #[test]
    fn crossing_is_interpolated() {
        let xs = [0.1, 0.2, 0.3, 0.4];
        let mut curves: Vec<CurvePoint> = xs.iter().map(|&x| point(4, x, x)).collect();
        curves.extend(xs.iter().map(|&x| point(8, x, 2.0 * x - 0.25)));
        let t = locate_threshold(&curves).unwrap();
        assert!((t.threshold.unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(t.crossings.len(), 1);
        assert!(t.statistical_error > 0.0);
        // Same curves on a descending sweep.
        let flipped: Vec<CurvePoint> = curves.iter().map(|p| CurvePoint { coupling: -p.coupling, ..p.clone() }).collect();
        let t = locate_threshold(&flipped).unwrap();
        assert!((t.threshold.unwrap() + 0.25).abs() < 1e-12);
        assert!(t.crossings[0].std_error > 0.0);
    }

    #[test]
    fn extrapolation_removes_quadratic_shift() {
        // Crossing of sizes (a, b) placed at 0.22 − 1/(ab).
        let xs: Vec<f64> = (0..7).map(|k| 0.15 + 0.025 * k as f64).collect();
        let sizes = [8usize, 12, 16];
        let mut curves = Vec::new();
        let shift = |a: usize, b: usize| 0.22 - 1.0 / (a * b) as f64;
        // Curve of size L is (x − x_L) · L with x_L chosen so consecutive curves
        // cross at the prescribed points.
        let x8 = 0.0;
        let slope = |l: usize| l as f64;
        let mut offsets = vec![x8];
        for w in sizes.windows(2) {
            let xc = shift(w[0], w[1]);
            let prev = offsets.last().copied().unwrap();
            let val = slope(w[0]) * (xc - prev);
            offsets.push(xc - val / slope(w[1]));
        }
        for (i, &l) in sizes.iter().enumerate() {
            for &x in &xs {
                curves.push(point(l, x, slope(l) * (x - offsets[i])));
            }
        }
        let t = locate_threshold(&curves).unwrap();
        assert_eq!(t.crossings.len(), 2);
        assert!((t.threshold.unwrap() - 0.22).abs() < 1e-12, "{:?}", t);
    }

    #[test]
    fn scan_validates_inputs() {
        let mc = quick(0);
        let make = |l: &Lattice, x: f64, _: u64| Ok(make_homogeneous(l, c(0.0), c(x)));
        assert!(matches!(scan_and_cross(&[4], &[0.1, 0.2, 0.3, 0.4], 1, &mc, make), Err(Error::InvalidScan(_))));
        assert!(matches!(scan_and_cross(&[4, 6], &[0.1, 0.2, 0.3], 1, &mc, make), Err(Error::InvalidScan(_))));
    }
}
