//! Plaquette-variable (μ) Ising model with boundary fields.
//!
//! Writing every bulk qubit as `σᵢ = μₘ μₙ` over its two plaquettes solves
//! the star constraint identically. On the top and bottom rows the single
//! plaquette variable carries a global sign instead, `σᵢ = α μₘ` with
//! `α ∈ {α_t, α_b}`. Fields become nearest-neighbour bonds, perpendicular
//! pair couplings become diagonal bonds or boundary fields, and the
//! configuration sum becomes unconstrained over `(μ, α_t, α_b)`, counting each
//! qubit configuration twice (the global flip of `μ` and both `α`).

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{apply_logical_x, syndrome_of_flip_set, BoundaryTouch, Lattice, QubitKind, StringSet, SyndromeSet};
use crate::noise_model::CouplingConfig;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Bonds of the μ model on a `rows × cols` grid, stored densely (zero means
/// absent). Sites are indexed `r * cols + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualIsingModel {
    rows: usize,
    cols: usize,
    /// `(r, c) – (r, c+1)`, indexed `r * (cols-1) + c`.
    pub(crate) nn_right: Vec<Complex64>,
    /// `(r, c) – (r+1, c)`, indexed `r * cols + c`.
    pub(crate) nn_down: Vec<Complex64>,
    /// `(r, c) – (r+1, c+1)`, indexed `r * (cols-1) + c`.
    pub(crate) diag_down_right: Vec<Complex64>,
    /// `(r, c+1) – (r+1, c)`, indexed `r * (cols-1) + c`.
    pub(crate) diag_down_left: Vec<Complex64>,
    pub(crate) top: Vec<Complex64>,
    pub(crate) bottom: Vec<Complex64>,
}

/// Which boundary signs multiply a μ product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaFactor {
    One,
    Top,
    Bottom,
    TopBottom,
}

impl AlphaFactor {
    fn from_touch(touch: BoundaryTouch) -> Self {
        match touch {
            BoundaryTouch::None => Self::One,
            BoundaryTouch::Top => Self::Top,
            BoundaryTouch::Bottom => Self::Bottom,
            BoundaryTouch::Both => Self::TopBottom,
        }
    }

    pub fn value(self, alpha_t: i8, alpha_b: i8) -> i8 {
        match self {
            Self::One => 1,
            Self::Top => alpha_t,
            Self::Bottom => alpha_b,
            Self::TopBottom => alpha_t * alpha_b,
        }
    }
}

/// A string operator rewritten as `alpha · Π_{k ∈ mu_ids} μ_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualObservable {
    pub mu_ids: Vec<usize>,
    pub alpha: AlphaFactor,
}

impl DualObservable {
    pub fn eval(&self, mu: &[i8], alpha_t: i8, alpha_b: i8) -> i8 {
        self.mu_ids.iter().fold(self.alpha.value(alpha_t, alpha_b), |acc, &k| acc * mu[k])
    }
}

impl DualIsingModel {
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "empty dual grid");
        let h = (cols - 1) * rows;
        let d = (cols - 1) * (rows - 1);
        Self {
            rows,
            cols,
            nn_right: vec![ZERO; h],
            nn_down: vec![ZERO; (rows - 1) * cols],
            diag_down_right: vec![ZERO; d],
            diag_down_left: vec![ZERO; d],
            top: vec![ZERO; cols],
            bottom: vec![ZERO; cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn site(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }

    pub fn coords(&self, s: usize) -> (usize, usize) {
        (s / self.cols, s % self.cols)
    }

    /// Adds `value` onto the nearest-neighbour bond between sites `a` and `b`.
    pub fn add_nn(&mut self, a: usize, b: usize, value: Complex64) -> Result<()> {
        let (a, b) = (a.min(b), a.max(b));
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        if b >= self.num_sites() {
            return Err(Error::DualMappingUndefined(format!("site {b} outside grid")));
        }
        if ra == rb && cb == ca + 1 {
            self.nn_right[ra * (self.cols - 1) + ca] += value;
        } else if ca == cb && rb == ra + 1 {
            self.nn_down[ra * self.cols + ca] += value;
        } else {
            return Err(Error::DualMappingUndefined(format!("sites {a}, {b} are not nearest neighbours")));
        }
        Ok(())
    }

    /// Adds `value` onto the diagonal bond between sites `a` and `b`.
    pub fn add_diag(&mut self, a: usize, b: usize, value: Complex64) -> Result<()> {
        let (a, b) = (a.min(b), a.max(b));
        if b >= self.num_sites() {
            return Err(Error::DualMappingUndefined(format!("site {b} outside grid")));
        }
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        if rb != ra + 1 {
            return Err(Error::DualMappingUndefined(format!("sites {a}, {b} are not diagonal neighbours")));
        }
        if cb == ca + 1 {
            self.diag_down_right[ra * (self.cols - 1) + ca] += value;
        } else if ca == cb + 1 {
            self.diag_down_left[ra * (self.cols - 1) + cb] += value;
        } else {
            return Err(Error::DualMappingUndefined(format!("sites {a}, {b} are not diagonal neighbours")));
        }
        Ok(())
    }

    pub fn add_top(&mut self, col: usize, value: Complex64) {
        self.top[col] += value;
    }

    pub fn add_bottom(&mut self, col: usize, value: Complex64) {
        self.bottom[col] += value;
    }

    pub fn top_fields(&self) -> &[Complex64] {
        &self.top
    }

    pub fn bottom_fields(&self) -> &[Complex64] {
        &self.bottom
    }

    /// Every nearest-neighbour bond slot as `((a, b), value)`, zeros included.
    pub fn nn_bonds(&self) -> Vec<((usize, usize), Complex64)> {
        let mut out = Vec::with_capacity(self.nn_right.len() + self.nn_down.len());
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c + 1 < self.cols {
                    out.push(((self.site(r, c), self.site(r, c + 1)), self.nn_right[r * (self.cols - 1) + c]));
                }
                if r + 1 < self.rows {
                    out.push(((self.site(r, c), self.site(r + 1, c)), self.nn_down[r * self.cols + c]));
                }
            }
        }
        out
    }

    /// Every diagonal bond slot as `((a, b), value)` with `a < b`, zeros included.
    pub fn diag_bonds(&self) -> Vec<((usize, usize), Complex64)> {
        let mut out = Vec::with_capacity(2 * self.diag_down_right.len());
        for r in 0..self.rows.saturating_sub(1) {
            for c in 0..self.cols - 1 {
                let k = r * (self.cols - 1) + c;
                out.push(((self.site(r, c), self.site(r + 1, c + 1)), self.diag_down_right[k]));
                out.push(((self.site(r, c + 1), self.site(r + 1, c)), self.diag_down_left[k]));
            }
        }
        out
    }

    /// All two-body bonds (nearest-neighbour and diagonal).
    pub fn bonds(&self) -> Vec<((usize, usize), Complex64)> {
        let mut out = self.nn_bonds();
        out.extend(self.diag_bonds());
        out
    }

    pub fn is_real(&self) -> bool {
        [&self.nn_right, &self.nn_down, &self.diag_down_right, &self.diag_down_left, &self.top, &self.bottom]
            .iter()
            .all(|v| v.iter().all(|z| z.im == 0.0))
    }

    /// Sum of `α_t h̃_t` and `α_b h̃_b` on every site (zero away from the edges).
    pub fn site_fields(&self, alpha_t: i8, alpha_b: i8) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.num_sites()];
        for c in 0..self.cols {
            out[self.site(0, c)] += self.top[c] * f64::from(alpha_t);
            out[self.site(self.rows - 1, c)] += self.bottom[c] * f64::from(alpha_b);
        }
        out
    }

    /// Mirror across the main diagonal. Top/bottom fields stay attached to the
    /// same sites, which become the first and last columns.
    pub fn transposed(&self) -> TransposedFields<'_> {
        TransposedFields { model: self }
    }

    /// Adjacency list: `(neighbour, coupling)` per site, nonzero bonds only.
    pub fn adjacency(&self) -> Vec<Vec<(usize, Complex64)>> {
        let mut adj = vec![Vec::new(); self.num_sites()];
        for ((a, b), v) in self.bonds() {
            if v != ZERO {
                adj[a].push((b, v));
                adj[b].push((a, v));
            }
        }
        adj
    }

    /// Line-oriented dump:
    ///
    /// ```text
    /// DUAL ROWS <rows> COLS <cols>
    /// NN <a> <b> <re> <im>
    /// DG <a> <b> <re> <im>
    /// BT <site> <re> <im>
    /// BB <site> <re> <im>
    /// ```
    ///
    /// Only nonzero entries are written.
    pub fn to_text(&self) -> String {
        let mut out = format!("DUAL ROWS {} COLS {}\n", self.rows, self.cols);
        for ((a, b), v) in self.nn_bonds() {
            if v != ZERO {
                let _ = writeln!(out, "NN {} {} {} {}", a, b, v.re, v.im);
            }
        }
        for ((a, b), v) in self.diag_bonds() {
            if v != ZERO {
                let _ = writeln!(out, "DG {} {} {} {}", a, b, v.re, v.im);
            }
        }
        for (c, v) in self.top.iter().enumerate() {
            if *v != ZERO {
                let _ = writeln!(out, "BT {} {} {}", self.site(0, c), v.re, v.im);
            }
        }
        for (c, v) in self.bottom.iter().enumerate() {
            if *v != ZERO {
                let _ = writeln!(out, "BB {} {} {}", self.site(self.rows - 1, c), v.re, v.im);
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let model = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["DUAL", "ROWS", r, "COLS", c] => {
                let r: usize = r.parse().map_err(|_| err(1, "bad row count".into()))?;
                let c: usize = c.parse().map_err(|_| err(1, "bad column count".into()))?;
                if r == 0 || c == 0 {
                    return Err(err(1, "empty grid".into()));
                }
                Self::new(r, c)
            }
            _ => return Err(err(1, "expected `DUAL ROWS <rows> COLS <cols>`".into())),
        };
        let mut model = model;
        for (idx, line) in lines {
            let n = idx + 1;
            let tok: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(n, format!("bad number `{s}`")));
            let int = |s: &str| s.parse::<usize>().map_err(|_| err(n, format!("bad index `{s}`")));
            let edge_site = |s: usize, row: usize| {
                let (r, c) = model.coords(s);
                if s < model.num_sites() && r == row {
                    Ok(c)
                } else {
                    Err(err(n, format!("site {s} is not on the expected boundary row")))
                }
            };
            match tok.as_slice() {
                ["NN", a, b, re, im] => {
                    let v = Complex64::new(num(re)?, num(im)?);
                    model.add_nn(int(a)?, int(b)?, v).map_err(|e| err(n, e.to_string()))?;
                }
                ["DG", a, b, re, im] => {
                    let v = Complex64::new(num(re)?, num(im)?);
                    model.add_diag(int(a)?, int(b)?, v).map_err(|e| err(n, e.to_string()))?;
                }
                ["BT", s, re, im] => {
                    let c = edge_site(int(s)?, 0)?;
                    model.add_top(c, Complex64::new(num(re)?, num(im)?));
                }
                ["BB", s, re, im] => {
                    let c = edge_site(int(s)?, model.rows - 1)?;
                    model.add_bottom(c, Complex64::new(num(re)?, num(im)?));
                }
                _ => return Err(err(n, format!("unrecognized record `{line}`"))),
            }
        }
        Ok(model)
    }
}

/// Borrowed transposed view used by the transfer engine.
pub struct TransposedFields<'a> {
    model: &'a DualIsingModel,
}

impl TransposedFields<'_> {
    /// The transposed model as an owned grid plus per-site α_t / α_b
    /// coefficients (which no longer sit on rows after transposition).
    pub fn into_parts(self) -> (DualIsingModel, Vec<Complex64>, Vec<Complex64>) {
        let m = self.model;
        let mut t = DualIsingModel::new(m.cols, m.rows);
        let tr = |s: usize| {
            let (r, c) = m.coords(s);
            c * m.rows + r
        };
        for ((a, b), v) in m.nn_bonds() {
            if v != ZERO {
                t.add_nn(tr(a), tr(b), v).expect("transpose keeps nearest neighbours");
            }
        }
        for ((a, b), v) in m.diag_bonds() {
            if v != ZERO {
                t.add_diag(tr(a), tr(b), v).expect("transpose keeps diagonals");
            }
        }
        let mut top = vec![ZERO; m.num_sites()];
        let mut bottom = vec![ZERO; m.num_sites()];
        for c in 0..m.cols {
            top[tr(m.site(0, c))] += m.top[c];
            bottom[tr(m.site(m.rows - 1, c))] += m.bottom[c];
        }
        (t, top, bottom)
    }
}

/// Builds the μ model for `config`. Every pair coupling must join two
/// perpendicular edges at a common vertex.
///
/// A bulk field joins the two plaquettes of its qubit. A boundary field lands
/// on the boundary plaquette. A perpendicular pair reduces to a product of the
/// two plaquettes it does not share (a diagonal bond), or, when one member is a
/// boundary qubit, to a single plaquette times that boundary's sign.
pub fn build_dual(lattice: &Lattice, config: &CouplingConfig) -> Result<DualIsingModel> {
    if config.num_qubits() != lattice.num_qubits() {
        return Err(Error::DualMappingUndefined(format!(
            "configuration has {} qubits, lattice has {}",
            config.num_qubits(),
            lattice.num_qubits()
        )));
    }
    let mut dual = DualIsingModel::new(lattice.plaquette_rows(), lattice.plaquette_cols());
    for (q, &h) in config.fields().iter().enumerate() {
        if h == ZERO {
            continue;
        }
        match *lattice.plaquettes_of(q) {
            [m, n] => dual.add_nn(m, n, h)?,
            [m] => {
                let (_, c) = lattice.plaquette_coords(m);
                match lattice.qubit(q).kind {
                    QubitKind::Top => dual.add_top(c, h),
                    _ => dual.add_bottom(c, h),
                }
            }
            _ => unreachable!("qubits belong to one or two plaquettes"),
        }
    }

    for (&(i, j), &v) in config.pairs() {
        if !lattice.is_coupled_pair(i, j) {
            return Err(Error::DualMappingUndefined(format!(
                "pair ({i}, {j}) is not a perpendicular vertex-sharing pair"
            )));
        }
        let mut plaqs: Vec<usize> = Vec::with_capacity(4);
        let (mut top, mut bottom) = (false, false);
        for q in [i, j] {
            for &p in lattice.plaquettes_of(q) {
                match plaqs.iter().position(|&x| x == p) {
                    Some(k) => {
                        plaqs.swap_remove(k);
                    }
                    None => plaqs.push(p),
                }
            }
            match lattice.qubit(q).kind {
                QubitKind::Top => top = !top,
                QubitKind::Bottom => bottom = !bottom,
                QubitKind::Bulk => {}
            }
        }
        if v == ZERO {
            continue;
        }
        match (plaqs.as_slice(), top, bottom) {
            ([u, w], false, false) => dual.add_diag(*u, *w, v)?,
            ([m], true, false) => dual.add_top(lattice.plaquette_coords(*m).1, v),
            ([m], false, true) => dual.add_bottom(lattice.plaquette_coords(*m).1, v),
            _ => {
                return Err(Error::DualMappingUndefined(format!(
                    "pair ({i}, {j}) does not reduce to a two-site or boundary term"
                )))
            }
        }
    }
    Ok(dual)
}

/// Rewrites `S` and `X̄ S` as μ products with boundary-sign factors.
///
/// Both share the syndrome as their μ set; the α factor records which
/// boundaries each string reaches an odd number of times.
pub fn map_strings(
    lattice: &Lattice,
    syndrome: &SyndromeSet,
    strings: &StringSet,
) -> Result<(DualObservable, DualObservable)> {
    if syndrome_of_flip_set(lattice, &strings.qubits)? != *syndrome {
        return Err(Error::InconsistentStrings);
    }
    let xs = apply_logical_x(lattice, strings);
    let mu_ids = syndrome.ids().to_vec();
    Ok((
        DualObservable { mu_ids: mu_ids.clone(), alpha: AlphaFactor::from_touch(lattice.boundary_touch(&strings.qubits)) },
        DualObservable { mu_ids, alpha: AlphaFactor::from_touch(lattice.boundary_touch(&xs.qubits)) },
    ))
}

/// `Σ h̃ μμ + Σ J̃ μμ + α_t Σ h̃_t μ_t + α_b Σ h̃_b μ_b`.
pub fn total_energy(dual: &DualIsingModel, mu: &[i8], alpha_t: i8, alpha_b: i8) -> Result<Complex64> {
    if mu.len() != dual.num_sites() {
        return Err(Error::SpinCount { expected: dual.num_sites(), got: mu.len() });
    }
    let mut e = ZERO;
    for ((a, b), v) in dual.bonds() {
        e += v * f64::from(mu[a] * mu[b]);
    }
    for c in 0..dual.cols {
        e += dual.top[c] * f64::from(alpha_t * mu[dual.site(0, c)]);
        e += dual.bottom[c] * f64::from(alpha_b * mu[dual.site(dual.rows - 1, c)]);
    }
    Ok(e)
}

/// Recovers `(μ, α_t, α_b)` from a star-satisfying qubit configuration, with
/// the gauge fixed by `μ₀ = +1`. Returns `None` if `sigma` violates a star.
pub fn lift_to_dual(lattice: &Lattice, sigma: &[i8]) -> Option<(Vec<i8>, i8, i8)> {
    let np = lattice.num_plaquettes();
    let mut mu = vec![0i8; np];
    mu[0] = 1;
    let mut stack = vec![0usize];
    let mut bulk_of: Vec<Vec<(usize, usize)>> = vec![Vec::new(); np];
    for q in 0..lattice.num_qubits() {
        if let [m, n] = *lattice.plaquettes_of(q) {
            bulk_of[m].push((n, q));
            bulk_of[n].push((m, q));
        }
    }
    while let Some(m) = stack.pop() {
        for &(n, q) in &bulk_of[m] {
            let want = sigma[q] * mu[m];
            if mu[n] == 0 {
                mu[n] = want;
                stack.push(n);
            } else if mu[n] != want {
                return None;
            }
        }
    }
    let (mut alpha_t, mut alpha_b) = (0i8, 0i8);
    for q in 0..lattice.num_qubits() {
        let slot = match lattice.qubit(q).kind {
            QubitKind::Top => &mut alpha_t,
            QubitKind::Bottom => &mut alpha_b,
            QubitKind::Bulk => continue,
        };
        let want = sigma[q] * mu[lattice.plaquettes_of(q)[0]];
        if *slot == 0 {
            *slot = want;
        } else if *slot != want {
            return None;
        }
    }
    Some((mu, alpha_t, alpha_b))
}
