//! Exact amplitudes `A`, `B` and fidelity.
//!
//! Four independent evaluations of the same sums:
//!
//! * `qubit_brute` enumerates the star-constrained x-configurations directly
//!   and recomputes `H` from scratch for each one. It is the reference.
//! * `dual_brute` enumerates all `μ` configurations of the plaquette model and
//!   forms the correlation quad `C(α_t, α_b)`.
//! * `transfer_matrix` contracts the same quad site by site on a strip.
//! * `sector_sums` splits the empty-syndrome sum into the two logical sectors.
//!
//! Quads are indexed `(α_t, α_b)`. Because the `μ` sum counts each qubit
//! configuration twice, amplitudes are formed with `α_t = +1` only:
//!
//! | strings            | `A`             | `B`             |
//! |--------------------|-----------------|-----------------|
//! | even, or odd→top   | `C(+,+)+C(+,−)` | `C(+,+)−C(+,−)` |
//! | odd→bottom         | `C(+,+)−C(+,−)` | `C(+,+)+C(+,−)` |
//!
//! With that convention every engine returns the same raw `A` and `B` up to the
//! recorded `exp(log_scale)` factor.

use num_complex::Complex64;

use crate::dual_map::{build_dual, DualIsingModel};
use crate::error::{Error, Result};
use crate::flips::FlipOp;
use crate::geometry::{
    apply_logical_x, build_strings, syndrome_of_flip_set, BoundaryTouch, Lattice, StringSet, SyndromeSet,
};
use crate::noise_model::{energy, CouplingConfig};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default qubit budget for [`amplitudes_qubit_brute`].
pub const QUBIT_BUDGET: usize = 16;
/// Default site budget for [`correlation_quad_dual`].
pub const DUAL_SITE_BUDGET: usize = 24;
/// Default strip width budget for [`correlation_quad_transfer`].
pub const TRANSFER_WIDTH_BUDGET: usize = 20;
/// Default plaquette budget for [`sector_sums`].
pub const SECTOR_PLAQUETTE_BUDGET: usize = 20;

const NOTE_QUBIT: &str = "one term per star-constrained configuration";
const NOTE_DUAL: &str =
    "alpha_t = +1 only: one term per star-constrained configuration (the full mu, alpha sum is twice this)";
const NOTE_SECTOR: &str = "A0 = Z1 + Z2, B0 = Z1 - Z2, one term per star-constrained configuration";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    QubitBrute,
    DualBrute,
    TransferMatrix,
    SectorSums,
    MonteCarlo,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Self::QubitBrute => "qubit_brute",
            Self::DualBrute => "dual_brute",
            Self::TransferMatrix => "transfer_matrix",
            Self::SectorSums => "sector_sums",
            Self::MonteCarlo => "monte_carlo",
        }
    }
}

/// Syndrome parity together with, for odd syndromes, the boundary the string
/// ends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StringClass {
    Even,
    OddTop,
    OddBottom,
}

impl StringClass {
    pub fn of(syndrome: &SyndromeSet, strings: &StringSet) -> Result<Self> {
        match (syndrome.is_odd(), strings.boundary_touch) {
            (false, BoundaryTouch::None) => Ok(Self::Even),
            (true, BoundaryTouch::Top) => Ok(Self::OddTop),
            (true, BoundaryTouch::Bottom) => Ok(Self::OddBottom),
            _ => Err(Error::InconsistentStrings),
        }
    }
}

/// Amplitudes of the two logical outcomes. The true values are
/// `a · exp(log_scale)` and `b · exp(log_scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeResult {
    pub a: Complex64,
    pub b: Complex64,
    pub log_scale: f64,
    pub fidelity: f64,
    /// `|b| / |a|`, infinite when `a = 0`.
    pub ratio_x: f64,
    pub engine: Engine,
    pub normalization_note: &'static str,
}

impl AmplitudeResult {
    pub fn new(a: Complex64, b: Complex64, log_scale: f64, engine: Engine, note: &'static str) -> Result<Self> {
        let fidelity = fidelity(a, b)?;
        let ratio_x = if a == ZERO { f64::INFINITY } else { b.norm() / a.norm() };
        Ok(Self { a, b, log_scale, fidelity, ratio_x, engine, normalization_note: note })
    }
}

/// `C(α_t, α_b) = Σ_μ Π_{k∈{p}} μ_k exp(−H̃(μ; α_t, α_b))`, each entry times
/// `exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationQuad {
    pub c_pp: Complex64,
    pub c_pm: Complex64,
    pub c_mp: Complex64,
    pub c_mm: Complex64,
    pub log_scale: f64,
    pub engine: Engine,
}

impl CorrelationQuad {
    pub fn get(&self, alpha_t: i8, alpha_b: i8) -> Complex64 {
        match (alpha_t > 0, alpha_b > 0) {
            (true, true) => self.c_pp,
            (true, false) => self.c_pm,
            (false, true) => self.c_mp,
            (false, false) => self.c_mm,
        }
    }

    /// Largest `|C(−α_t,−α_b) − (−1)^{n_marked} C(α_t,α_b)|` relative to the
    /// largest entry.
    pub fn symmetry_residual(&self, n_marked: usize) -> f64 {
        let sign = if n_marked.is_multiple_of(2) { 1.0 } else { -1.0 };
        let scale = [self.c_pp, self.c_pm, self.c_mp, self.c_mm].iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let r1 = (self.c_mm - self.c_pp * sign).norm();
        let r2 = (self.c_mp - self.c_pm * sign).norm();
        r1.max(r2) / scale
    }

    /// Entries rescaled to a common `log_scale`.
    fn rescaled(mut self, log_scale: f64) -> Self {
        let f = (self.log_scale - log_scale).exp();
        self.c_pp *= f;
        self.c_pm *= f;
        self.c_mp *= f;
        self.c_mm *= f;
        self.log_scale = log_scale;
        self
    }
}

/// `|a|² / (|a|² + |b|²)`.
pub fn fidelity(a: Complex64, b: Complex64) -> Result<f64> {
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    if na + nb == 0.0 {
        // Scale up before giving up on subnormal inputs.
        let m = a.norm().max(b.norm());
        if m == 0.0 {
            return Err(Error::UndefinedFidelity);
        }
        return fidelity(a / m, b / m);
    }
    Ok(na / (na + nb))
}

/// Amplitudes from a correlation quad. See the module table for the
/// convention.
pub fn amplitudes_from_quad(quad: &CorrelationQuad, class: StringClass) -> Result<AmplitudeResult> {
    let plus = quad.c_pp + quad.c_pm;
    let minus = quad.c_pp - quad.c_pm;
    let (a, b) = match class {
        StringClass::Even | StringClass::OddTop => (plus, minus),
        StringClass::OddBottom => (minus, plus),
    };
    AmplitudeResult::new(a, b, quad.log_scale, quad.engine, NOTE_DUAL)
}

fn check_strings(lattice: &Lattice, syndrome: &SyndromeSet, strings: &StringSet) -> Result<()> {
    syndrome.check(lattice)?;
    if syndrome_of_flip_set(lattice, &strings.qubits)? != *syndrome {
        return Err(Error::InconsistentStrings);
    }
    Ok(())
}

/// Generators of the star-constrained space: every plaquette, then the
/// bottom-row logical flip.
fn constrained_generators(lattice: &Lattice) -> Vec<Vec<usize>> {
    let l = lattice.distance();
    let mut gens: Vec<Vec<usize>> = lattice.plaquettes().to_vec();
    gens.push((0..l).map(|c| lattice.horizontal(l - 1, c)).collect());
    gens
}

/// Every star-constrained x-configuration, generated from all-up by
/// plaquette flips and one logical flip.
pub fn constrained_configurations(lattice: &Lattice) -> Vec<Vec<i8>> {
    let gens = constrained_generators(lattice);
    let n = lattice.num_qubits();
    (0u64..1 << gens.len())
        .map(|mask| {
            let mut sigma = vec![1i8; n];
            for (g, qs) in gens.iter().enumerate() {
                if mask >> g & 1 == 1 {
                    qs.iter().for_each(|&q| sigma[q] = -sigma[q]);
                }
            }
            sigma
        })
        .collect()
}

/// Reference enumeration over the star-constrained space with the default
/// budget of [`QUBIT_BUDGET`] qubits.
pub fn amplitudes_qubit_brute(
    lattice: &Lattice,
    config: &CouplingConfig,
    syndrome: &SyndromeSet,
    strings: &StringSet,
) -> Result<AmplitudeResult> {
    amplitudes_qubit_brute_with_budget(lattice, config, syndrome, strings, QUBIT_BUDGET)
}

pub fn amplitudes_qubit_brute_with_budget(
    lattice: &Lattice,
    config: &CouplingConfig,
    syndrome: &SyndromeSet,
    strings: &StringSet,
    budget: usize,
) -> Result<AmplitudeResult> {
    let n = lattice.num_qubits();
    if n > budget {
        return Err(Error::BudgetExceeded { what: "qubit count", size: n, budget });
    }
    check_strings(lattice, syndrome, strings)?;
    let s: Vec<usize> = strings.qubits.iter().copied().collect();
    let xs: Vec<usize> = apply_logical_x(lattice, strings).qubits.into_iter().collect();
    let (mut a, mut b) = (ZERO, ZERO);
    for sigma in constrained_configurations(lattice) {
        let w = (-energy(config, &sigma)?).exp();
        let os: i8 = s.iter().map(|&q| sigma[q]).product();
        let ox: i8 = xs.iter().map(|&q| sigma[q]).product();
        a += w * f64::from(os);
        b += w * f64::from(ox);
    }
    AmplitudeResult::new(a, b, 0.0, Engine::QubitBrute, NOTE_QUBIT)
}

fn marked_sites(dual: &DualIsingModel, syndrome: &SyndromeSet) -> Result<Vec<bool>> {
    let mut marked = vec![false; dual.num_sites()];
    for &p in syndrome.ids() {
        *marked.get_mut(p).ok_or_else(|| Error::SyndromeOutOfRange {
            distance: dual.cols(),
            reason: format!("site {p} outside the dual grid"),
        })? = true;
    }
    Ok(marked)
}

/// Exhaustive `μ` enumeration with the default budget of
/// [`DUAL_SITE_BUDGET`] sites.
pub fn correlation_quad_dual(dual: &DualIsingModel, syndrome: &SyndromeSet) -> Result<CorrelationQuad> {
    correlation_quad_dual_with_budget(dual, syndrome, DUAL_SITE_BUDGET)
}

pub fn correlation_quad_dual_with_budget(
    dual: &DualIsingModel,
    syndrome: &SyndromeSet,
    budget: usize,
) -> Result<CorrelationQuad> {
    let n = dual.num_sites();
    if n > budget {
        return Err(Error::BudgetExceeded { what: "dual site count", size: n, budget });
    }
    let marked = marked_sites(dual, syndrome)?;
    let adj = dual.adjacency();
    let top = dual.site_fields(1, 0);
    let bottom = dual.site_fields(0, 1);
    let bonds = dual.bonds();

    let mut mu = vec![1i8; n];
    let exact = |mu: &[i8]| {
        let mut e = ZERO;
        let (mut t, mut b) = (ZERO, ZERO);
        for &((i, j), v) in &bonds {
            e += v * f64::from(mu[i] * mu[j]);
        }
        for s in 0..n {
            t += top[s] * f64::from(mu[s]);
            b += bottom[s] * f64::from(mu[s]);
        }
        (e, t, b)
    };
    let (mut e, mut t, mut b) = exact(&mu);
    let mut sign = 1.0;
    let mut acc = [ZERO; 4];
    for k in 0u64..1 << n {
        if k > 0 {
            let s = k.trailing_zeros() as usize;
            let m = f64::from(mu[s]);
            let local: Complex64 = adj[s].iter().map(|&(o, v)| v * f64::from(mu[o])).sum();
            e -= local * (2.0 * m);
            t -= top[s] * (2.0 * m);
            b -= bottom[s] * (2.0 * m);
            mu[s] = -mu[s];
            if marked[s] {
                sign = -sign;
            }
            if k % 4096 == 0 {
                (e, t, b) = exact(&mu);
            }
        }
        let we = (-e).exp() * sign;
        let (wt, wb) = ((-t).exp(), (-b).exp());
        let (wt_inv, wb_inv) = (ONE / wt, ONE / wb);
        acc[0] += we * wt * wb;
        acc[1] += we * wt * wb_inv;
        acc[2] += we * wt_inv * wb;
        acc[3] += we * wt_inv * wb_inv;
    }
    Ok(CorrelationQuad {
        c_pp: acc[0],
        c_pm: acc[1],
        c_mp: acc[2],
        c_mm: acc[3],
        log_scale: 0.0,
        engine: Engine::DualBrute,
    })
}

/// Strip contraction with the default width budget of
/// [`TRANSFER_WIDTH_BUDGET`].
///
/// The grid is transposed when needed so the strip width is the smaller
/// dimension. Sites are added one at a time; the state holds the `W` most
/// recent spins plus the one diagonal neighbour that just left the frontier,
/// so each step is a two-term gather over `2^{W+1}` amplitudes. Amplitudes are
/// rescaled every site and the scale is carried in `log_scale`.
pub fn correlation_quad_transfer(dual: &DualIsingModel, syndrome: &SyndromeSet) -> Result<CorrelationQuad> {
    correlation_quad_transfer_with_budget(dual, syndrome, TRANSFER_WIDTH_BUDGET)
}

pub fn correlation_quad_transfer_with_budget(
    dual: &DualIsingModel,
    syndrome: &SyndromeSet,
    budget: usize,
) -> Result<CorrelationQuad> {
    let width = dual.rows().min(dual.cols());
    if width > budget {
        return Err(Error::BudgetExceeded { what: "transfer width", size: width, budget });
    }
    let marked = marked_sites(dual, syndrome)?;
    let (model, top, bottom, marked) = if dual.cols() > dual.rows() {
        let (t, top, bottom) = dual.transposed().into_parts();
        let mut m = vec![false; marked.len()];
        for (s, &on) in marked.iter().enumerate() {
            let (r, c) = dual.coords(s);
            m[c * dual.rows() + r] = on;
        }
        (t, top, bottom, m)
    } else {
        (dual.clone(), dual.site_fields(1, 0), dual.site_fields(0, 1), marked)
    };

    let mut quads = [(ZERO, 0.0); 4];
    for (k, (at, ab)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
        let field: Vec<Complex64> = top.iter().zip(&bottom).map(|(&t, &b)| t * at + b * ab).collect();
        quads[k] = strip_sum(&model, &field, &marked);
    }
    let log_scale = quads.iter().map(|q| q.1).fold(f64::NEG_INFINITY, f64::max);
    let quad = CorrelationQuad {
        c_pp: quads[0].0,
        c_pm: quads[1].0,
        c_mp: quads[2].0,
        c_mm: quads[3].0,
        log_scale: 0.0,
        engine: Engine::TransferMatrix,
    };
    let mut out = quad;
    for (slot, (v, ls)) in [&mut out.c_pp, &mut out.c_pm, &mut out.c_mp, &mut out.c_mm].into_iter().zip(quads) {
        *slot = v * (ls - log_scale).exp();
    }
    out.log_scale = log_scale;
    Ok(out)
}

/// `Σ_μ Π_marked μ exp(−Σ bonds − Σ_s field_s μ_s)` on a grid whose width is
/// its column count. Returns the sum and its log prefactor.
fn strip_sum(model: &DualIsingModel, field: &[Complex64], marked: &[bool]) -> (Complex64, f64) {
    let (rows, w) = (model.rows(), model.cols());
    let nstate = 1usize << (w + 1);
    let extra = 1usize << w;
    let mut cur = vec![ZERO; nstate];
    let mut next = vec![ZERO; nstate];
    cur[0] = ONE;
    let mut log_scale = 0.0;
    let mut pending = 1.0;
    let spin = |bit: usize| if bit == 0 { 1.0 } else { -1.0 };

    for r in 0..rows {
        for c in 0..w {
            let s = r * w + c;
            let jd = if r > 0 { model.nn_down[(r - 1) * w + c] } else { ZERO };
            let jdr = if r > 0 && c > 0 { model.diag_down_right[(r - 1) * (w - 1) + c - 1] } else { ZERO };
            let jdl = if r > 0 && c + 1 < w { model.diag_down_left[(r - 1) * (w - 1) + c] } else { ZERO };
            let jr = if c > 0 { model.nn_right[r * (w - 1) + c - 1] } else { ZERO };
            let f = field[s];

            // table[x | a<<1 | e<<2 | l<<3 | rt<<4]
            let mut table = [ZERO; 32];
            for (idx, slot) in table.iter_mut().enumerate() {
                let x = spin(idx & 1);
                let a = spin(idx >> 1 & 1);
                let e = spin(idx >> 2 & 1);
                let l = spin(idx >> 3 & 1);
                let rt = spin(idx >> 4 & 1);
                let h = jd * (x * a) + jdr * (x * e) + jr * (x * l) + jdl * (x * rt) + f * x;
                let mut wgt = (-h).exp() / pending;
                if marked[s] {
                    wgt *= x;
                }
                *slot = wgt;
            }

            let mut max = 0.0f64;
            let bit_c = 1usize << c;
            for (ns, out) in next.iter_mut().enumerate() {
                let xb = ns >> c & 1;
                let ab = ns >> w & 1;
                let lb = if c > 0 { ns >> (c - 1) & 1 } else { 0 };
                let rb = if c + 1 < w { ns >> (c + 1) & 1 } else { 0 };
                let base = (ns & !bit_c & !extra) | (ab << c);
                let key = xb | ab << 1 | lb << 3 | rb << 4;
                let v = cur[base] * table[key] + cur[base | extra] * table[key | 4];
                max = max.max(v.re.abs()).max(v.im.abs());
                *out = v;
            }
            std::mem::swap(&mut cur, &mut next);
            log_scale += pending.ln();
            pending = if max > 0.0 { max } else { 1.0 };
        }
    }
    let total: Complex64 = cur.iter().sum::<Complex64>() / pending;
    (total, log_scale + pending.ln())
}

/// `Z₁`, `Z₂` and the empty-syndrome amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSums {
    /// Sum over plaquette-flip configurations of all-up.
    pub z1: Complex64,
    /// Same with the logical chain `γ` also flipped.
    pub z2: Complex64,
    pub log_scale: f64,
    pub amplitudes: AmplitudeResult,
}

/// Sector decomposition with `γ` the top row of horizontal qubits (a left to
/// right chain). The plaquette budget defaults to
/// [`SECTOR_PLAQUETTE_BUDGET`].
pub fn sector_sums(lattice: &Lattice, config: &CouplingConfig) -> Result<SectorSums> {
    sector_sums_with_budget(lattice, config, SECTOR_PLAQUETTE_BUDGET)
}

pub fn sector_sums_with_budget(lattice: &Lattice, config: &CouplingConfig, budget: usize) -> Result<SectorSums> {
    let np = lattice.num_plaquettes();
    if np > budget {
        return Err(Error::BudgetExceeded { what: "plaquette count", size: np, budget });
    }
    let ident = |z: Complex64| z;
    let ops: Vec<FlipOp<Complex64>> = lattice.plaquettes().iter().map(|p| FlipOp::new(config, p, ident)).collect();
    let gamma = FlipOp::new(config, lattice.logical_z_path(), ident);

    let mut sigma = vec![1i8; lattice.num_qubits()];
    let e_ref = energy(config, &sigma)?;
    let mut e = ZERO;
    let (mut z1, mut z2) = (ZERO, ZERO);
    for k in 0u64..1 << np {
        if k > 0 {
            let op = &ops[k.trailing_zeros() as usize];
            e += op.delta(&sigma);
            op.apply(&mut sigma);
            if k % 4096 == 0 {
                e = energy(config, &sigma)? - e_ref;
            }
        }
        z1 += (-e).exp();
        z2 += (-(e + gamma.delta(&sigma))).exp();
    }
    let log_scale = -e_ref.re;
    let phase = Complex64::from_polar(1.0, -e_ref.im);
    let (z1, z2) = (z1 * phase, z2 * phase);
    let amplitudes = AmplitudeResult::new(z1 + z2, z1 - z2, log_scale, Engine::SectorSums, NOTE_SECTOR)?;
    Ok(SectorSums { z1, z2, log_scale, amplitudes })
}

/// Builds strings and the dual model, then evaluates with `dual_brute`.
pub fn amplitudes_dual(lattice: &Lattice, config: &CouplingConfig, syndrome: &SyndromeSet) -> Result<AmplitudeResult> {
    let strings = build_strings(lattice, syndrome)?;
    let class = StringClass::of(syndrome, &strings)?;
    let quad = correlation_quad_dual(&build_dual(lattice, config)?, syndrome)?;
    amplitudes_from_quad(&quad, class)
}

/// Builds strings and the dual model, then evaluates with `transfer_matrix`.
pub fn amplitudes_transfer(
    lattice: &Lattice,
    config: &CouplingConfig,
    syndrome: &SyndromeSet,
) -> Result<AmplitudeResult> {
    let strings = build_strings(lattice, syndrome)?;
    let class = StringClass::of(syndrome, &strings)?;
    let quad = correlation_quad_transfer(&build_dual(lattice, config)?, syndrome)?;
    amplitudes_from_quad(&quad, class)
}

/// Builds strings, then evaluates with `qubit_brute`.
pub fn amplitudes_qubit(lattice: &Lattice, config: &CouplingConfig, syndrome: &SyndromeSet) -> Result<AmplitudeResult> {
    let strings = build_strings(lattice, syndrome)?;
    amplitudes_qubit_brute(lattice, config, syndrome, &strings)
}

/// `C(+,−) / C(+,+)` for the empty syndrome, which the boundary-flip
/// estimators target.
pub fn boundary_flip_ratio(quad: &CorrelationQuad) -> Complex64 {
    quad.c_pm / quad.c_pp
}

/// Common log scale for several quads, for callers combining engines.
pub fn align_quads(quads: &[CorrelationQuad]) -> Vec<CorrelationQuad> {
    let ls = quads.iter().map(|q| q.log_scale).fold(f64::NEG_INFINITY, f64::max);
    quads.iter().map(|q| q.rescaled(ls)).collect()
}
