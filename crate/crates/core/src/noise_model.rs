//! Effective bit-flip action `H = Σ hᵢ σᵢ + Σ Jᵢⱼ σᵢ σⱼ` on x-basis spins.
//!
//! Fields and couplings are complex in general. Amplitudes weight a spin
//! configuration by `exp(-H)`, so real negative `h` (or `J̃` after the dual
//! map) is the ferromagnetic sign.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Lattice;

/// Random (or homogeneous) coupling ensembles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Homogeneous { h: Complex64, j: Complex64 },
    /// Each field is `h1` or `h2` with equal probability.
    TwoValue { h1: f64, h2: f64 },
    /// Each field is zeroed with probability `dilution`, otherwise `h`.
    Diluted { h: f64, dilution: f64 },
    /// Each field is `+h` with probability `q` and `-h` otherwise.
    SignedRandom { h: f64, q: f64 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64| x.is_finite();
        let ok = match *self {
            Self::Homogeneous { h, j } => finite(h.re) && finite(h.im) && finite(j.re) && finite(j.im),
            Self::TwoValue { h1, h2 } => finite(h1) && finite(h2),
            Self::Diluted { h, dilution } => finite(h) && (0.0..=1.0).contains(&dilution),
            Self::SignedRandom { h, q } => finite(h) && (0.0..=1.0).contains(&q),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDistribution(format!("{self:?}")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Homogeneous { .. } => "homogeneous",
            Self::TwoValue { .. } => "two_value",
            Self::Diluted { .. } => "diluted",
            Self::SignedRandom { .. } => "signed_random",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionMeta {
    pub spec: Option<DistributionSpec>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingConfig {
    distance: usize,
    fields: Vec<Complex64>,
    pairs: BTreeMap<(usize, usize), Complex64>,
    pub metadata: Option<DistributionMeta>,
}

impl CouplingConfig {
    /// All-zero couplings on `lattice`.
    pub fn zero(lattice: &Lattice) -> Self {
        Self {
            distance: lattice.distance(),
            fields: vec![Complex64::new(0.0, 0.0); lattice.num_qubits()],
            pairs: BTreeMap::new(),
            metadata: None,
        }
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn num_qubits(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[Complex64] {
        &self.fields
    }

    pub fn field(&self, q: usize) -> Complex64 {
        self.fields[q]
    }

    pub fn pairs(&self) -> &BTreeMap<(usize, usize), Complex64> {
        &self.pairs
    }

    pub fn set_field(&mut self, q: usize, h: Complex64) -> Result<()> {
        let slot = self.fields.get_mut(q).ok_or(Error::InvalidQubit(q))?;
        *slot = h;
        Ok(())
    }

    /// Sets (replaces) the coupling of the unordered pair `{i, j}`.
    pub fn set_pair(&mut self, i: usize, j: usize, value: Complex64) -> Result<()> {
        let n = self.fields.len();
        if i == j || i >= n || j >= n {
            return Err(Error::InvalidPair(i, j));
        }
        self.pairs.insert((i.min(j), i.max(j)), value);
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        self.fields.iter().chain(self.pairs.values()).all(|c| c.im == 0.0)
    }

    /// Multiplies every field and coupling by `a`.
    pub fn scaled(&self, a: Complex64) -> Self {
        let mut out = self.clone();
        out.fields.iter_mut().for_each(|h| *h *= a);
        out.pairs.values_mut().for_each(|j| *j *= a);
        out
    }

    /// Serializes to the line-oriented fixture format.
    ///
    /// ```text
    /// COUPLINGS L <distance> SEED <seed|none>
    /// F <qubit> <re> <im>
    /// P <i> <j> <re> <im>
    /// ```
    pub fn to_text(&self) -> String {
        let seed = self
            .metadata
            .as_ref()
            .and_then(|m| m.seed)
            .map_or_else(|| "none".to_string(), |s| s.to_string());
        let mut out = format!("COUPLINGS L {} SEED {}\n", self.distance, seed);
        for (q, h) in self.fields.iter().enumerate() {
            let _ = writeln!(out, "F {} {} {}", q, h.re, h.im);
        }
        for (&(i, j), v) in &self.pairs {
            let _ = writeln!(out, "P {} {} {} {}", i, j, v.re, v.im);
        }
        out
    }

    /// Parses the fixture format written by [`CouplingConfig::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, message: &str| Error::Parse { line, message: message.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 5 || h[0] != "COUPLINGS" || h[1] != "L" || h[3] != "SEED" {
            return Err(err(1, "expected `COUPLINGS L <distance> SEED <seed|none>`"));
        }
        let distance: usize = h[2].parse().map_err(|_| err(1, "bad distance"))?;
        let seed = match h[4] {
            "none" => None,
            s => Some(s.parse::<u64>().map_err(|_| err(1, "bad seed"))?),
        };
        let lattice = Lattice::new(distance).map_err(|e| err(1, &e.to_string()))?;
        let mut config = Self::zero(&lattice);
        config.metadata = seed.map(|s| DistributionMeta { spec: None, seed: Some(s) });

        for (idx, line) in lines {
            let lineno = idx + 1;
            let tok: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(lineno, &format!("bad number `{s}`")));
            let int = |s: &str| s.parse::<usize>().map_err(|_| err(lineno, &format!("bad index `{s}`")));
            match tok.as_slice() {
                ["F", q, re, im] => {
                    let q = int(q)?;
                    config
                        .set_field(q, Complex64::new(num(re)?, num(im)?))
                        .map_err(|e| err(lineno, &e.to_string()))?;
                }
                ["P", i, j, re, im] => {
                    let (i, j) = (int(i)?, int(j)?);
                    config
                        .set_pair(i, j, Complex64::new(num(re)?, num(im)?))
                        .map_err(|e| err(lineno, &e.to_string()))?;
                }
                _ => return Err(err(lineno, &format!("unrecognized record `{line}`"))),
            }
        }
        Ok(config)
    }
}

/// Every field `h`, every perpendicular vertex-sharing pair `J` (pairs are
/// omitted when `J` is zero).
pub fn make_homogeneous(lattice: &Lattice, h: Complex64, j: Complex64) -> CouplingConfig {
    let mut config = CouplingConfig::zero(lattice);
    config.fields.iter_mut().for_each(|f| *f = h);
    if j != Complex64::new(0.0, 0.0) {
        for (a, b) in lattice.coupled_pairs() {
            config.pairs.insert((a, b), j);
        }
    }
    config.metadata = Some(DistributionMeta { spec: Some(DistributionSpec::Homogeneous { h, j }), seed: None });
    config
}

/// Draws one disorder realization. Fields are drawn qubit by qubit in index
/// order from a ChaCha8 stream seeded with `seed`.
pub fn draw_random(lattice: &Lattice, spec: DistributionSpec, seed: u64) -> Result<CouplingConfig> {
    spec.validate()?;
    let mut config = match spec {
        DistributionSpec::Homogeneous { h, j } => make_homogeneous(lattice, h, j),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut config = CouplingConfig::zero(lattice);
            for f in config.fields.iter_mut() {
                let value = match spec {
                    DistributionSpec::TwoValue { h1, h2 } => {
                        if rng.random_bool(0.5) {
                            h1
                        } else {
                            h2
                        }
                    }
                    DistributionSpec::Diluted { h, dilution } => {
                        if rng.random_bool(dilution) {
                            0.0
                        } else {
                            h
                        }
                    }
                    DistributionSpec::SignedRandom { h, q } => {
                        if rng.random_bool(q) {
                            h
                        } else {
                            -h
                        }
                    }
                    DistributionSpec::Homogeneous { .. } => unreachable!(),
                };
                *f = Complex64::new(value, 0.0);
            }
            config
        }
    };
    config.metadata = Some(DistributionMeta { spec: Some(spec), seed: Some(seed) });
    Ok(config)
}

/// Real couplings with every field uniform on `(−h_max, h_max)` and every
/// nearest-neighbour pair uniform on `(−j_max, j_max)`, fields first. Used
/// by oracle checks.
pub fn draw_uniform_real(lattice: &Lattice, h_max: f64, j_max: f64, seed: u64) -> Result<CouplingConfig> {
    if !(h_max > 0.0 && h_max.is_finite() && j_max > 0.0 && j_max.is_finite()) {
        return Err(Error::InvalidDistribution(format!("uniform ranges must be positive, got {h_max} and {j_max}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut config = CouplingConfig::zero(lattice);
    for f in config.fields.iter_mut() {
        *f = Complex64::new(rng.random_range(-h_max..h_max), 0.0);
    }
    for pair in lattice.coupled_pairs() {
        config.pairs.insert(pair, Complex64::new(rng.random_range(-j_max..j_max), 0.0));
    }
    config.metadata = Some(DistributionMeta { spec: None, seed: Some(seed) });
    Ok(config)
}

/// `Σ hᵢ σᵢ + Σ Jᵢⱼ σᵢ σⱼ` for a ±1 configuration.
pub fn energy(config: &CouplingConfig, sigma: &[i8]) -> Result<Complex64> {
    if sigma.len() != config.fields.len() {
        return Err(Error::SpinCount { expected: config.fields.len(), got: sigma.len() });
    }
    let mut e = Complex64::new(0.0, 0.0);
    for (h, &s) in config.fields.iter().zip(sigma) {
        e += h * f64::from(s);
    }
    for (&(i, j), v) in &config.pairs {
        e += v * f64::from(sigma[i] * sigma[j]);
    }
    Ok(e)
}
