//! Planar surface-code lattice of distance `L`.
//!
//! Qubits live on the edges of a grid of `L` vertex rows by `L - 1` vertex
//! columns. Every vertex row carries `L` horizontal edges (the outermost two
//! dangle off the left and right sides) and every gap between vertex rows
//! carries `L - 1` vertical edges, for `L² + (L-1)²` qubits in total.
//!
//! Faces between vertex rows are the plaquettes: `(L-1) × L` of them, weight 3
//! in the leftmost and rightmost columns and weight 4 elsewhere. Horizontal
//! edges on the first and last vertex rows touch a single plaquette; these are
//! the top and bottom boundary qubits. Vertices are the stars, `L × (L-1)` of
//! them, weight 3 on the first and last rows.
//!
//! Indexing is row-major, zero-based, rows counted from the top. Vertex row
//! `r` owns the qubit block `r * (2L - 1) ..`: first its `L` horizontal edges,
//! then the `L - 1` vertical edges hanging below it.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitKind {
    Bulk,
    Top,
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// One physical qubit (an edge of the primal lattice).
///
/// For horizontal edges `row` is the vertex row and `col` ranges over
/// `0..L`; edge `col` sits left of vertex column `col`. For vertical edges
/// `row` is the upper vertex row and `col` the vertex column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Qubit {
    pub kind: QubitKind,
    pub orientation: Orientation,
    pub row: usize,
    pub col: usize,
}

/// Which boundaries a string operator reaches, counted by parity of its
/// top-row and bottom-row qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTouch {
    None,
    Top,
    Bottom,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Top,
    Bottom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    distance: usize,
    qubits: Vec<Qubit>,
    plaquettes: Vec<Vec<usize>>,
    stars: Vec<Vec<usize>>,
    qubit_plaquettes: Vec<Vec<usize>>,
    logical_x: Vec<usize>,
    logical_z: Vec<usize>,
}

impl Lattice {
    /// Builds the distance-`distance` lattice. Rejects `distance < 2`.
    pub fn new(distance: usize) -> Result<Self> {
        if distance < 2 {
            return Err(Error::InvalidDistance(distance));
        }
        let l = distance;
        let stride = 2 * l - 1;
        let h = |r: usize, c: usize| r * stride + c;
        let v = |r: usize, c: usize| r * stride + l + c;

        let mut qubits = Vec::with_capacity(l * l + (l - 1) * (l - 1));
        for r in 0..l {
            for c in 0..l {
                let kind = if r == 0 {
                    QubitKind::Top
                } else if r == l - 1 {
                    QubitKind::Bottom
                } else {
                    QubitKind::Bulk
                };
                qubits.push(Qubit { kind, orientation: Orientation::Horizontal, row: r, col: c });
            }
            if r + 1 < l {
                for c in 0..l - 1 {
                    qubits.push(Qubit {
                        kind: QubitKind::Bulk,
                        orientation: Orientation::Vertical,
                        row: r,
                        col: c,
                    });
                }
            }
        }

        let mut plaquettes = Vec::with_capacity((l - 1) * l);
        for pr in 0..l - 1 {
            for pc in 0..l {
                let mut members = vec![h(pr, pc)];
                if pc >= 1 {
                    members.push(v(pr, pc - 1));
                }
                if pc + 1 < l {
                    members.push(v(pr, pc));
                }
                members.push(h(pr + 1, pc));
                members.sort_unstable();
                plaquettes.push(members);
            }
        }

        let mut stars = Vec::with_capacity(l * (l - 1));
        for r in 0..l {
            for c in 0..l - 1 {
                let mut members = vec![h(r, c), h(r, c + 1)];
                if r >= 1 {
                    members.push(v(r - 1, c));
                }
                if r + 1 < l {
                    members.push(v(r, c));
                }
                members.sort_unstable();
                stars.push(members);
            }
        }

        let mut qubit_plaquettes = vec![Vec::new(); qubits.len()];
        for (p, members) in plaquettes.iter().enumerate() {
            for &q in members {
                qubit_plaquettes[q].push(p);
            }
        }

        let logical_x = (0..l).map(|r| h(r, 0)).collect();
        let logical_z = (0..l).map(|c| h(0, c)).collect();

        Ok(Self { distance, qubits, plaquettes, stars, qubit_plaquettes, logical_x, logical_z })
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn num_plaquettes(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn num_stars(&self) -> usize {
        self.stars.len()
    }

    /// Rows of the plaquette grid (`L - 1`).
    pub fn plaquette_rows(&self) -> usize {
        self.distance - 1
    }

    /// Columns of the plaquette grid (`L`).
    pub fn plaquette_cols(&self) -> usize {
        self.distance
    }

    pub fn plaquette_index(&self, row: usize, col: usize) -> usize {
        row * self.distance + col
    }

    pub fn plaquette_coords(&self, p: usize) -> (usize, usize) {
        (p / self.distance, p % self.distance)
    }

    /// Index of the horizontal edge at vertex row `row`, slot `col` (`0..L`).
    pub fn horizontal(&self, row: usize, col: usize) -> usize {
        row * (2 * self.distance - 1) + col
    }

    /// Index of the vertical edge below vertex `(row, col)`.
    pub fn vertical(&self, row: usize, col: usize) -> usize {
        row * (2 * self.distance - 1) + self.distance + col
    }

    pub fn qubit(&self, q: usize) -> &Qubit {
        &self.qubits[q]
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn plaquettes(&self) -> &[Vec<usize>] {
        &self.plaquettes
    }

    pub fn stars(&self) -> &[Vec<usize>] {
        &self.stars
    }

    /// Plaquettes containing qubit `q`: one for boundary qubits, two otherwise.
    pub fn plaquettes_of(&self, q: usize) -> &[usize] {
        &self.qubit_plaquettes[q]
    }

    /// Vertical X-type logical: the horizontal edges of slot 0, top to bottom.
    pub fn logical_x_path(&self) -> &[usize] {
        &self.logical_x
    }

    /// Horizontal Z-type logical: the horizontal edges of vertex row 0, left
    /// to right. Flipping these x-spins is also the sector flip.
    pub fn logical_z_path(&self) -> &[usize] {
        &self.logical_z
    }

    /// Vertices (as `(row, col)`) incident to qubit `q`.
    pub fn vertices_of(&self, q: usize) -> Vec<(usize, usize)> {
        let qb = self.qubits[q];
        match qb.orientation {
            Orientation::Horizontal => {
                let mut out = Vec::with_capacity(2);
                if qb.col >= 1 {
                    out.push((qb.row, qb.col - 1));
                }
                if qb.col + 1 < self.distance {
                    out.push((qb.row, qb.col));
                }
                out
            }
            Orientation::Vertical => vec![(qb.row, qb.col), (qb.row + 1, qb.col)],
        }
    }

    /// All unordered pairs of perpendicular edges meeting at a common vertex,
    /// as `(i, j)` with `i < j`, in vertex order. These carry the default
    /// two-qubit couplings.
    pub fn coupled_pairs(&self) -> Vec<(usize, usize)> {
        let l = self.distance;
        let mut pairs = Vec::with_capacity(4 * (l - 1) * (l - 1));
        for r in 0..l {
            for c in 0..l - 1 {
                let horizontals = [self.horizontal(r, c), self.horizontal(r, c + 1)];
                let mut verticals = Vec::with_capacity(2);
                if r >= 1 {
                    verticals.push(self.vertical(r - 1, c));
                }
                if r + 1 < l {
                    verticals.push(self.vertical(r, c));
                }
                for &a in &horizontals {
                    for &b in &verticals {
                        pairs.push((a.min(b), a.max(b)));
                    }
                }
            }
        }
        pairs
    }

    /// Returns true when `i` and `j` share a vertex and are perpendicular.
    pub fn is_coupled_pair(&self, i: usize, j: usize) -> bool {
        if i == j || i >= self.num_qubits() || j >= self.num_qubits() {
            return false;
        }
        if self.qubits[i].orientation == self.qubits[j].orientation {
            return false;
        }
        let vi = self.vertices_of(i);
        self.vertices_of(j).iter().any(|v| vi.contains(v))
    }

    /// Boundary parity classification of an arbitrary qubit set.
    pub fn boundary_touch<'a, I: IntoIterator<Item = &'a usize>>(&self, qubits: I) -> BoundaryTouch {
        let (mut top, mut bottom) = (false, false);
        for &q in qubits {
            match self.qubits[q].kind {
                QubitKind::Top => top = !top,
                QubitKind::Bottom => bottom = !bottom,
                QubitKind::Bulk => {}
            }
        }
        match (top, bottom) {
            (false, false) => BoundaryTouch::None,
            (true, false) => BoundaryTouch::Top,
            (false, true) => BoundaryTouch::Bottom,
            (true, true) => BoundaryTouch::Both,
        }
    }

    fn taxicab(&self, a: usize, b: usize) -> usize {
        let (ra, ca) = self.plaquette_coords(a);
        let (rb, cb) = self.plaquette_coords(b);
        ra.abs_diff(rb) + ca.abs_diff(cb)
    }

    /// Edges crossed going from plaquette `a` to `b`: rows first, then columns.
    fn dual_path(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut r, mut c) = self.plaquette_coords(a);
        let (rb, cb) = self.plaquette_coords(b);
        let mut path = Vec::with_capacity(self.taxicab(a, b));
        while r < rb {
            path.push(self.horizontal(r + 1, c));
            r += 1;
        }
        while r > rb {
            path.push(self.horizontal(r, c));
            r -= 1;
        }
        while c < cb {
            path.push(self.vertical(r, c));
            c += 1;
        }
        while c > cb {
            path.push(self.vertical(r, c - 1));
            c -= 1;
        }
        path
    }

    /// Edges crossed going from plaquette `p` straight out through `side`.
    fn boundary_path(&self, p: usize, side: Boundary) -> Vec<usize> {
        let (pr, pc) = self.plaquette_coords(p);
        match side {
            Boundary::Top => (0..=pr).map(|r| self.horizontal(r, pc)).collect(),
            Boundary::Bottom => (pr + 1..self.distance).map(|r| self.horizontal(r, pc)).collect(),
        }
    }

    /// Nearer of top/bottom for plaquette `p`, with its edge distance. Ties go
    /// to the top.
    fn nearest_boundary(&self, p: usize) -> (Boundary, usize) {
        let (pr, _) = self.plaquette_coords(p);
        let top = pr + 1;
        let bottom = self.distance - 1 - pr;
        if top <= bottom {
            (Boundary::Top, top)
        } else {
            (Boundary::Bottom, bottom)
        }
    }

    /// For an odd syndrome: the plaquette farthest from its nearer top/bottom
    /// boundary (lowest index on ties) and that boundary.
    pub fn most_remote(&self, syndrome: &SyndromeSet) -> Option<(usize, Boundary)> {
        let mut best: Option<(usize, Boundary, usize)> = None;
        for &p in syndrome.ids() {
            let (side, dist) = self.nearest_boundary(p);
            if best.is_none_or(|(_, _, d)| dist > d) {
                best = Some((p, side, dist));
            }
        }
        best.map(|(p, side, _)| (p, side))
    }
}

/// Plaquettes reporting a `-1` outcome.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SyndromeSet {
    ids: Vec<usize>,
}

impl SyndromeSet {
    pub fn new<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        let set: BTreeSet<usize> = ids.into_iter().collect();
        Self { ids: set.into_iter().collect() }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a syndrome from plaquette-grid coordinates.
    pub fn from_coords(lattice: &Lattice, coords: &[(usize, usize)]) -> Result<Self> {
        let mut ids = Vec::with_capacity(coords.len());
        for &(r, c) in coords {
            if r >= lattice.plaquette_rows() || c >= lattice.plaquette_cols() {
                return Err(Error::SyndromeOutOfRange {
                    distance: lattice.distance(),
                    reason: format!("plaquette ({r}, {c}) outside the grid"),
                });
            }
            ids.push(lattice.plaquette_index(r, c));
        }
        Ok(Self::new(ids))
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.ids.len() % 2 == 1
    }

    pub fn contains(&self, p: usize) -> bool {
        self.ids.binary_search(&p).is_ok()
    }

    pub fn check(&self, lattice: &Lattice) -> Result<()> {
        match self.ids.last() {
            Some(&p) if p >= lattice.num_plaquettes() => Err(Error::SyndromeOutOfRange {
                distance: lattice.distance(),
                reason: format!("plaquette index {p} >= {}", lattice.num_plaquettes()),
            }),
            _ => Ok(()),
        }
    }
}

/// A σ^x string operator given by the qubits it flips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringSet {
    pub qubits: BTreeSet<usize>,
    pub boundary_touch: BoundaryTouch,
}

impl StringSet {
    pub fn empty() -> Self {
        Self { qubits: BTreeSet::new(), boundary_touch: BoundaryTouch::None }
    }

    pub fn from_qubits(lattice: &Lattice, qubits: BTreeSet<usize>) -> Self {
        let boundary_touch = lattice.boundary_touch(&qubits);
        Self { qubits, boundary_touch }
    }

    fn toggle_all<I: IntoIterator<Item = usize>>(set: &mut BTreeSet<usize>, qubits: I) {
        for q in qubits {
            if !set.remove(&q) {
                set.insert(q);
            }
        }
    }
}

/// Plaquettes with odd overlap with `flips`.
pub fn syndrome_of_flip_set<'a, I>(lattice: &Lattice, flips: I) -> Result<SyndromeSet>
where
    I: IntoIterator<Item = &'a usize>,
{
    let mut parity = vec![false; lattice.num_plaquettes()];
    for &q in flips {
        if q >= lattice.num_qubits() {
            return Err(Error::InvalidQubit(q));
        }
        for &p in lattice.plaquettes_of(q) {
            parity[p] = !parity[p];
        }
    }
    Ok(SyndromeSet::new(parity.iter().enumerate().filter(|(_, &odd)| odd).map(|(p, _)| p)))
}

/// Recovery string for `syndrome`.
///
/// With an odd syndrome the most remote plaquette is first sent straight to
/// its nearer top/bottom boundary. The rest are paired greedily by smallest
/// taxicab distance on the plaquette grid, ties broken by the lowest index
/// pair, and joined by a rows-then-columns dual path.
pub fn build_strings(lattice: &Lattice, syndrome: &SyndromeSet) -> Result<StringSet> {
    syndrome.check(lattice)?;
    let mut qubits = BTreeSet::new();
    let mut remaining: Vec<usize> = syndrome.ids().to_vec();

    if syndrome.is_odd() {
        let (p, side) = lattice.most_remote(syndrome).expect("odd syndrome is nonempty");
        StringSet::toggle_all(&mut qubits, lattice.boundary_path(p, side));
        remaining.retain(|&x| x != p);
    }

    while remaining.len() >= 2 {
        let mut best = (usize::MAX, 0, 1);
        for i in 0..remaining.len() {
            for j in i + 1..remaining.len() {
                let d = lattice.taxicab(remaining[i], remaining[j]);
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        let (_, i, j) = best;
        let (a, b) = (remaining[i], remaining[j]);
        StringSet::toggle_all(&mut qubits, lattice.dual_path(a, b));
        remaining.remove(j);
        remaining.remove(i);
    }

    Ok(StringSet::from_qubits(lattice, qubits))
}

/// `X̄ · S`: symmetric difference with the vertical logical path.
pub fn apply_logical_x(lattice: &Lattice, strings: &StringSet) -> StringSet {
    let mut qubits = strings.qubits.clone();
    StringSet::toggle_all(&mut qubits, lattice.logical_x_path().iter().copied());
    StringSet::from_qubits(lattice, qubits)
}

/// Lattices of distance `L₀, L₀ + 2, …` with the syndrome re-embedded.
///
/// Even syndromes gain a row and a column on every side per step. Odd
/// syndromes keep the boundary nearest their most remote plaquette fixed and
/// gain both rows on the opposite side.
pub fn grow_lattice_sequence(
    initial: &Lattice,
    syndrome: &SyndromeSet,
    count: usize,
) -> Result<Vec<(Lattice, SyndromeSet)>> {
    syndrome.check(initial)?;
    let row_shift = match initial.most_remote(syndrome) {
        Some((_, Boundary::Top)) if syndrome.is_odd() => 0,
        Some((_, Boundary::Bottom)) if syndrome.is_odd() => 2,
        _ => 1,
    };
    let coords: Vec<(usize, usize)> =
        syndrome.ids().iter().map(|&p| initial.plaquette_coords(p)).collect();

    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let lattice = Lattice::new(initial.distance() + 2 * k)?;
        let moved: Vec<(usize, usize)> =
            coords.iter().map(|&(r, c)| (r + k * row_shift, c + k)).collect();
        let s = SyndromeSet::from_coords(&lattice, &moved)?;
        out.push((lattice, s));
    }
    Ok(out)
}
