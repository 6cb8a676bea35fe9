//! Sources, distortion measures, instances, and codeword indexing.
//!
//! Labels are carried for I/O only; every computation runs on integer indices into the
//! source alphabet `X` and the reproduction alphabet `Y`.

use std::collections::HashSet;
use std::num::NonZeroU64;

use crate::error::{LossyError, Result};
use crate::prob::{in_unit_interval, Prob};

/// Relative slack applied to `d(x, y) <= D`, absorbing rounding in `n * D` and in
/// additive block distortions.
pub const DIST_TOL: f64 = 1e-12;

/// `d <= level`, with [`DIST_TOL`] slack.
#[inline]
pub fn within_level(d: f64, level: f64) -> bool {
    d <= level + DIST_TOL * level.abs().max(1.0)
}

/// A finite-alphabet source law.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSource<P> {
    symbols: Vec<String>,
    probs: Vec<P>,
}

impl<P: Prob> FiniteSource<P> {
    pub fn new(symbols: Vec<String>, probs: Vec<P>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(LossyError::Schema("source alphabet is empty".into()));
        }
        if symbols.len() != probs.len() {
            return Err(LossyError::Schema(format!("{} symbols but {} probabilities", symbols.len(), probs.len())));
        }
        let mut seen = HashSet::new();
        for s in &symbols {
            if !seen.insert(s.as_str()) {
                return Err(LossyError::Schema(format!("duplicate source symbol {s:?}")));
            }
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= P::zero())) {
            return Err(LossyError::Schema(format!("negative probability {p}")));
        }
        let total = P::sum(&probs);
        if !total.is_unit_total() {
            return Err(LossyError::Schema(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { symbols, probs })
    }

    /// Source labelled `0, 1, ..., m-1`.
    pub fn unlabelled(probs: Vec<P>) -> Result<Self> {
        let symbols = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(symbols, probs)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn probs(&self) -> &[P] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// A per-letter distortion matrix `d(x, y)` together with the level `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    matrix: Vec<Vec<f64>>,
    level: f64,
}

impl DistortionSpec {
    pub fn new(matrix: Vec<Vec<f64>>, level: f64) -> Result<Self> {
        let cols = matrix.first().map_or(0, Vec::len);
        if matrix.is_empty() || cols == 0 {
            return Err(LossyError::Schema("distortion matrix is empty".into()));
        }
        for (x, row) in matrix.iter().enumerate() {
            if row.len() != cols {
                return Err(LossyError::Schema(format!(
                    "distortion row {x} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(LossyError::Schema(format!("distortion entries must be finite and non-negative, got {v}")));
            }
        }
        if !level.is_finite() || level < 0.0 {
            return Err(LossyError::Schema(format!("distortion level D = {level} is invalid")));
        }
        Ok(Self { matrix, level })
    }

    /// 0/1 distortion on a common alphabet of size `m`.
    pub fn hamming(m: usize, level: f64) -> Result<Self> {
        let matrix = (0..m).map(|x| (0..m).map(|y| if x == y { 0.0 } else { 1.0 }).collect()).collect();
        Self::new(matrix, level)
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn x_len(&self) -> usize {
        self.matrix.len()
    }

    pub fn y_len(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.matrix[x][y]
    }

    pub fn with_level(&self, level: f64) -> Result<Self> {
        Self::new(self.matrix.clone(), level)
    }

    pub fn max_entry(&self) -> f64 {
        self.matrix.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// A one-shot coding problem: source, distortion, and the budgets `epsilon`, `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<P> {
    source: FiniteSource<P>,
    y_symbols: Vec<String>,
    distortion: DistortionSpec,
    epsilon: P,
    delta: P,
}

impl<P: Prob> Instance<P> {
    pub fn new(
        source: FiniteSource<P>,
        y_symbols: Vec<String>,
        distortion: DistortionSpec,
        epsilon: P,
        delta: P,
    ) -> Result<Self> {
        if distortion.x_len() != source.len() {
            return Err(LossyError::Schema(format!(
                "distortion matrix has {} rows for {} source symbols",
                distortion.x_len(),
                source.len()
            )));
        }
        if distortion.y_len() != y_symbols.len() {
            return Err(LossyError::Schema(format!(
                "distortion matrix has {} columns for {} reproduction symbols",
                distortion.y_len(),
                y_symbols.len()
            )));
        }
        let mut seen = HashSet::new();
        for s in &y_symbols {
            if !seen.insert(s.as_str()) {
                return Err(LossyError::Schema(format!("duplicate reproduction symbol {s:?}")));
            }
        }
        check_budget("epsilon", &epsilon)?;
        check_budget("delta", &delta)?;
        Ok(Self { source, y_symbols, distortion, epsilon, delta })
    }

    /// Instance with unlabelled alphabets (`0..|X|`, `0..|Y|`).
    pub fn from_parts(probs: Vec<P>, matrix: Vec<Vec<f64>>, level: f64, epsilon: P, delta: P) -> Result<Self> {
        let distortion = DistortionSpec::new(matrix, level)?;
        let y_symbols = (0..distortion.y_len()).map(|y| y.to_string()).collect();
        Self::new(FiniteSource::unlabelled(probs)?, y_symbols, distortion, epsilon, delta)
    }

    pub fn source(&self) -> &FiniteSource<P> {
        &self.source
    }

    pub fn y_symbols(&self) -> &[String] {
        &self.y_symbols
    }

    pub fn distortion(&self) -> &DistortionSpec {
        &self.distortion
    }

    /// Same source and distortion with a different `(epsilon, delta)` split.
    pub fn with_budgets(&self, epsilon: P, delta: P) -> Result<Self> {
        check_budget("epsilon", &epsilon)?;
        check_budget("delta", &delta)?;
        Ok(Self { epsilon, delta, ..self.clone() })
    }

    pub fn with_level(&self, level: f64) -> Result<Self> {
        Ok(Self { distortion: self.distortion.with_level(level)?, ..self.clone() })
    }

    /// The same instance with float probabilities.
    pub fn to_float(&self) -> Instance<f64> {
        Instance {
            source: FiniteSource {
                symbols: self.source.symbols.clone(),
                probs: self.source.probs.iter().map(Prob::to_f64).collect(),
            },
            y_symbols: self.y_symbols.clone(),
            distortion: self.distortion.clone(),
            epsilon: self.epsilon.to_f64(),
            delta: self.delta.to_f64(),
        }
    }
}

fn check_budget<P: Prob>(name: &str, v: &P) -> Result<()> {
    if in_unit_interval(v) && *v < P::one() {
        Ok(())
    } else {
        Err(LossyError::Schema(format!("{name} = {v} is outside [0, 1)")))
    }
}

/// What the covering, coding and evaluation routines need to know about a problem.
///
/// Implemented by [`Instance`] (explicit matrix) and by
/// [`ProductInstance`](crate::blocklength::ProductInstance), whose block distortion is
/// evaluated on demand.
pub trait LossyProblem<P: Prob>: Sync {
    fn probs(&self) -> &[P];

    fn y_count(&self) -> usize;

    /// Distortion level the reproduction must meet (`n * D` for blocks).
    fn level(&self) -> f64;

    fn distortion(&self, x: usize, y: usize) -> f64;

    fn epsilon(&self) -> &P;

    fn delta(&self) -> &P;

    fn x_label(&self, x: usize) -> String;

    fn y_label(&self, y: usize) -> String;

    fn x_count(&self) -> usize {
        self.probs().len()
    }

    fn within(&self, x: usize, y: usize) -> bool {
        within_level(self.distortion(x, y), self.level())
    }

    /// `B_D(y)`: source symbols within the level of `y`, ascending.
    fn ball(&self, y: usize) -> Vec<usize> {
        (0..self.x_count()).filter(|&x| self.within(x, y)).collect()
    }

    /// Reproduction symbols within the level of `x`, ascending.
    fn coball(&self, x: usize) -> Vec<usize> {
        (0..self.y_count()).filter(|&y| self.within(x, y)).collect()
    }

    /// Whether some reproduction meets the level for `x`.
    fn is_coverable(&self, x: usize) -> bool {
        (0..self.y_count()).any(|y| self.within(x, y))
    }
}

impl<P: Prob> LossyProblem<P> for Instance<P> {
    fn probs(&self) -> &[P] {
        &self.source.probs
    }

    fn y_count(&self) -> usize {
        self.y_symbols.len()
    }

    fn level(&self) -> f64 {
        self.distortion.level
    }

    fn distortion(&self, x: usize, y: usize) -> f64 {
        self.distortion.matrix[x][y]
    }

    fn epsilon(&self) -> &P {
        &self.epsilon
    }

    fn delta(&self) -> &P {
        &self.delta
    }

    fn x_label(&self, x: usize) -> String {
        self.source.symbols[x].clone()
    }

    fn y_label(&self, y: usize) -> String {
        self.y_symbols[y].clone()
    }
}

/// Verdict of [`check_feasible`].
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility<P> {
    Feasible,
    /// `Pr{min_y d(X,y) > D}` exceeds epsilon; carries that mass.
    Infeasible {
        uncoverable: P,
    },
}

impl<P> Feasibility<P> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// Mass of source symbols that no reproduction symbol covers at the problem's level.
pub fn uncoverable_mass<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L) -> P {
    let probs = problem.probs();
    (0..problem.x_count()).filter(|&x| !problem.is_coverable(x)).fold(P::zero(), |acc, x| acc + probs[x].clone())
}

/// A code meeting the excess-distortion budget exists iff `Pr{min_y d(X,y) > D} <= epsilon`.
pub fn check_feasible<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L) -> Feasibility<P> {
    let uncoverable = uncoverable_mass(problem);
    let coverable = P::one() - uncoverable.clone();
    if coverable.at_least(&(P::one() - problem.epsilon().clone())) {
        Feasibility::Feasible
    } else {
        Feasibility::Infeasible { uncoverable }
    }
}

pub(crate) fn require_feasible<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L) -> Result<()> {
    match check_feasible(problem) {
        Feasibility::Feasible => Ok(()),
        Feasibility::Infeasible { uncoverable } => {
            Err(LossyError::Infeasible { uncoverable: uncoverable.to_f64(), epsilon: problem.epsilon().to_f64() })
        }
    }
}

/// `floor(log2 i)` for `i >= 1`.
#[inline]
pub fn floor_log2(i: u64) -> u32 {
    debug_assert!(i >= 1);
    63 - i.leading_zeros()
}

/// 1-based position in the length-then-lexicographic enumeration
/// `λ, 0, 1, 00, 01, 10, 11, 000, ...` of binary strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CodewordIndex(NonZeroU64);

impl CodewordIndex {
    pub fn new(i: u64) -> Result<Self> {
        NonZeroU64::new(i).map(Self).ok_or_else(|| LossyError::Domain("codeword indices start at 1".into()))
    }

    pub fn get(self) -> u64 {
        self.0.get()
    }

    /// Codeword length `floor(log2 i)`.
    pub fn len(self) -> u32 {
        floor_log2(self.get())
    }

    pub fn is_empty(self) -> bool {
        self.get() == 1
    }

    pub fn word(self) -> String {
        let i = self.get();
        let len = self.len();
        (0..len).rev().map(|b| if (i >> b) & 1 == 1 { '1' } else { '0' }).collect()
    }
}

/// The `i`-th binary string: the binary expansion of `i` without its leading 1.
pub fn index_to_word(i: u64) -> Result<String> {
    Ok(CodewordIndex::new(i)?.word())
}

/// Inverse of [`index_to_word`]: prepend a 1 and read the result in binary.
pub fn word_to_index(word: &str) -> Result<u64> {
    if word.len() > 63 {
        return Err(LossyError::Domain(format!("word of length {} overflows u64", word.len())));
    }
    word.chars().try_fold(1u64, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(LossyError::Domain(format!("{other:?} is not a binary digit"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Exact;

    fn binary(p: f64, level: f64, eps: f64, delta: f64) -> Instance<f64> {
        Instance::from_parts(
            vec![p, 1.0 - p],
            DistortionSpec::hamming(2, level).unwrap().matrix().to_vec(),
            level,
            eps,
            delta,
        )
        .unwrap()
    }

    #[test]
    fn words_from_indices() {
        assert_eq!(index_to_word(1).unwrap(), "");
        assert_eq!(index_to_word(2).unwrap(), "0");
        assert_eq!(index_to_word(5).unwrap(), "01");
        assert_eq!(index_to_word(8).unwrap(), "000");
        assert!(index_to_word(0).is_err());
    }

    #[test]
    fn indices_from_words() {
        assert_eq!(word_to_index("").unwrap(), 1);
        assert_eq!(word_to_index("11").unwrap(), 7);
        assert_eq!(word_to_index("000").unwrap(), 8);
        assert!(word_to_index("012").is_err());
    }

    #[test]
    fn bijection_exhaustive() {
        for i in 1..=(1u64 << 20) {
            let w = index_to_word(i).unwrap();
            assert_eq!(w.len() as u32, floor_log2(i));
            assert_eq!(word_to_index(&w).unwrap(), i);
        }
    }

    #[test]
    fn feasibility_examples() {
        assert!(check_feasible(&binary(0.5, 0.0, 0.1, 0.0)).is_feasible());

        let single = Instance::from_parts(vec![1.0], vec![vec![5.0]], 1.0, 0.0, 0.0).unwrap();
        assert_eq!(check_feasible(&single), Feasibility::Infeasible { uncoverable: 1.0 });

        let exact = Instance::<Exact>::from_parts(
            vec![Exact::from_ratio(3, 10), Exact::from_ratio(7, 10)],
            vec![vec![2.0], vec![0.0]],
            1.0,
            Exact::from_ratio(3, 10),
            Exact::from_ratio(0, 1),
        )
        .unwrap();
        assert!(check_feasible(&exact).is_feasible());
        let tighter = exact.with_budgets(Exact::from_ratio(29, 100), Exact::from_ratio(0, 1)).unwrap();
        assert!(!check_feasible(&tighter).is_feasible());
    }

    #[test]
    fn feasibility_monotone_in_level_and_epsilon() {
        let matrix = vec![vec![0.3, 2.0], vec![1.5, 0.9], vec![4.0, 3.0]];
        let probs = vec![0.2, 0.5, 0.3];
        let levels = [0.0, 0.3, 0.9, 1.5, 3.0, 4.0];
        let eps = [0.0, 0.1, 0.2, 0.3, 0.5, 0.9];
        for (li, &l) in levels.iter().enumerate() {
            for (ei, &e) in eps.iter().enumerate() {
                let inst = Instance::from_parts(probs.clone(), matrix.clone(), l, e, 0.0).unwrap();
                if check_feasible(&inst).is_feasible() {
                    for &l2 in &levels[li..] {
                        for &e2 in &eps[ei..] {
                            let wider = Instance::from_parts(probs.clone(), matrix.clone(), l2, e2, 0.0).unwrap();
                            assert!(check_feasible(&wider).is_feasible());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn schema_violations() {
        assert!(FiniteSource::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]).is_err());
        assert!(FiniteSource::new(vec!["a".into()], vec![0.9]).is_err());
        assert!(FiniteSource::<f64>::unlabelled(vec![1.5, -0.5]).is_err());
        assert!(DistortionSpec::new(vec![vec![0.0, -1.0]], 0.0).is_err());
        assert!(DistortionSpec::new(vec![vec![0.0], vec![1.0, 2.0]], 0.0).is_err());
        assert!(Instance::from_parts(vec![1.0], vec![vec![0.0]], 0.0, 1.0, 0.0).is_err());
        assert!(Instance::from_parts(vec![1.0], vec![vec![0.0]], 0.0, 0.0, -0.1).is_err());
    }
}
