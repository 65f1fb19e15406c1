//! Energy changes of multi-qubit flips, precomputed per flip operator.

use std::collections::BTreeSet;
use std::ops::{AddAssign, Mul};

use num_complex::Complex64;

use crate::noise_model::CouplingConfig;

/// Terms of `H` that change sign when one flip operator is applied: fields of
/// flipped qubits and pairs with exactly one flipped member. Zero terms are
/// dropped.
#[derive(Debug, Clone)]
pub(crate) struct FlipOp<T> {
    pub qubits: Vec<usize>,
    fields: Vec<(usize, T)>,
    pairs: Vec<(usize, usize, T)>,
}

pub(crate) trait Coupling: Copy + Default + PartialEq + Mul<f64, Output = Self> + AddAssign {}
impl Coupling for f64 {}
impl Coupling for Complex64 {}

impl<T: Coupling> FlipOp<T> {
    pub fn new(config: &CouplingConfig, qubits: &[usize], conv: impl Fn(Complex64) -> T) -> Self {
        let set: BTreeSet<usize> = qubits.iter().copied().collect();
        let zero = T::default();
        let fields = set
            .iter()
            .map(|&q| (q, conv(config.field(q))))
            .filter(|&(_, h)| h != zero)
            .collect();
        let pairs = config
            .pairs()
            .iter()
            .filter(|(&(i, j), _)| set.contains(&i) != set.contains(&j))
            .map(|(&(i, j), &v)| (i, j, conv(v)))
            .filter(|&(_, _, v)| v != zero)
            .collect();
        Self { qubits: set.into_iter().collect(), fields, pairs }
    }

    /// Flipping costs nothing in every state.
    pub fn is_free(&self) -> bool {
        self.fields.is_empty() && self.pairs.is_empty()
    }

    /// `H(flipped σ) − H(σ)`.
    pub fn delta(&self, sigma: &[i8]) -> T {
        let mut d = T::default();
        for &(q, h) in &self.fields {
            d += h * f64::from(-2 * sigma[q]);
        }
        for &(i, j, v) in &self.pairs {
            d += v * f64::from(-2 * sigma[i] * sigma[j]);
        }
        d
    }

    pub fn apply(&self, sigma: &mut [i8]) {
        for &q in &self.qubits {
            sigma[q] = -sigma[q];
        }
    }
}
