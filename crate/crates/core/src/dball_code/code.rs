use crate::error::{LossyError, Result};
use crate::model::{CodewordIndex, LossyProblem};
use crate::prob::Prob;

use super::{greedy_cover, GreedyCover};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    Stochastic,
    Deterministic,
}

impl CodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CodeKind::Stochastic => "stochastic",
            CodeKind::Deterministic => "deterministic",
        }
    }
}

/// One possible encoder output for a source symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission<P> {
    pub index: CodewordIndex,
    pub prob: P,
}

/// An encoder/decoder pair over codeword indices.
///
/// `encode[x]` lists the codewords emitted for `x` with their probabilities;
/// `decode[i - 1]` is the reproduction symbol for codeword index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeTable<P> {
    kind: CodeKind,
    encode: Vec<Vec<Emission<P>>>,
    decode: Vec<usize>,
    rate: f64,
}

impl<P: Prob> CodeTable<P> {
    pub fn new(kind: CodeKind, encode: Vec<Vec<Emission<P>>>, decode: Vec<usize>, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) {
            return Err(LossyError::Domain(format!("rate {rate} must be non-negative")));
        }
        for (x, row) in encode.iter().enumerate() {
            if row.is_empty() {
                return Err(LossyError::Dimension(format!("source symbol {x} has no codeword")));
            }
            if let Some(e) = row.iter().find(|e| e.index.get() > decode.len() as u64) {
                return Err(LossyError::Dimension(format!(
                    "codeword index {} has no decoder entry ({} entries)",
                    e.index.get(),
                    decode.len()
                )));
            }
            if row.iter().any(|e| !(e.prob >= P::zero())) || !P::sum(row.iter().map(|e| &e.prob)).is_unit_total() {
                return Err(LossyError::Domain(format!("encoder row {x} is not a probability vector")));
            }
            if kind == CodeKind::Deterministic && row.len() != 1 {
                return Err(LossyError::Domain(format!("deterministic encoder randomizes symbol {x}")));
            }
        }
        Ok(Self { kind, encode, decode, rate })
    }

    /// Deterministic code from a plain index map.
    pub fn deterministic(encode: Vec<u64>, decode: Vec<usize>, rate: f64) -> Result<Self> {
        let rows = encode
            .into_iter()
            .map(|i| Ok(vec![Emission { index: CodewordIndex::new(i)?, prob: P::one() }]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(CodeKind::Deterministic, rows, decode, rate)
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn encode(&self) -> &[Vec<Emission<P>>] {
        &self.encode
    }

    pub fn decode(&self) -> &[usize] {
        &self.decode
    }

    pub fn decode_index(&self, index: CodewordIndex) -> usize {
        self.decode[(index.get() - 1) as usize]
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn with_rate(mut self, rate: f64) -> Self {
        self.rate = rate;
        self
    }

    /// Same code with the encoder rows replaced; used by the canonicalization pass.
    pub(crate) fn with_encode(&self, encode: Vec<Vec<Emission<P>>>) -> Self {
        Self { encode, ..self.clone() }
    }
}

fn index(i: usize) -> CodewordIndex {
    CodewordIndex::new(i as u64).expect("cell positions are 1-based")
}

fn single<P: Prob>(i: usize) -> Vec<Emission<P>> {
    vec![Emission { index: index(i), prob: P::one() }]
}

impl<P: Prob> CodeTable<P> {
    /// Cells `1..k*-1` map to `w_1..w_{k*-1}`; cell `k*` maps to `w_{k*}` with probability
    /// `β / Pr{A_D(y_{k*})}` and to `w_1` otherwise; everything else maps to `w_1`.
    pub fn stochastic_from_cover(cover: &GreedyCover<P>, x_count: usize) -> Self {
        let k = cover.k_star();
        let last_mass = &cover.cell_mass()[k - 1];
        assert!(last_mass.at_least(cover.beta()), "cell k* lighter than beta");
        let mut split = cover.beta().clone() / last_mass.clone();
        if split > P::one() {
            split = P::one();
        }
        let last_row = if k == 1 || split.is_one() {
            single(k)
        } else {
            vec![
                Emission { index: index(k), prob: split.clone() },
                Emission { index: index(1), prob: P::one() - split },
            ]
        };
        let encode = cover
            .cell_of(x_count)
            .into_iter()
            .map(|cell| match cell {
                Some(i) if i + 1 < k => single(i + 1),
                Some(_) => last_row.clone(),
                None => single(1),
            })
            .collect();
        Self {
            kind: CodeKind::Stochastic,
            encode,
            decode: cover.centers().to_vec(),
            rate: f64::from(cover.stochastic_rate()),
        }
    }

    /// Cells `1..k*` map to `w_1..w_{k*}`; everything else maps to `w_1`.
    pub fn deterministic_from_cover(cover: &GreedyCover<P>, x_count: usize) -> Self {
        let encode = cover.cell_of(x_count).into_iter().map(|cell| single(cell.map_or(1, |i| i + 1))).collect();
        Self {
            kind: CodeKind::Deterministic,
            encode,
            decode: cover.centers().to_vec(),
            rate: f64::from(cover.deterministic_rate()),
        }
    }
}

/// The stochastic code of rate `floor(G)`.
///
/// Its excess distortion is exactly `ε` when `k* >= 2`. With `k* = 1` both branches of the
/// randomized map emit `w_1`, and the excess is `1 - Pr{A_D(y_1)}`, which is at most `ε`.
pub fn build_stochastic_code<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L) -> Result<CodeTable<P>> {
    let cover = greedy_cover(problem)?;
    Ok(CodeTable::stochastic_from_cover(&cover, problem.x_count()))
}

/// The deterministic code of rate `floor(log2 min(j*, k*))`.
pub fn build_deterministic_code<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L) -> Result<CodeTable<P>> {
    let cover = greedy_cover(problem)?;
    Ok(CodeTable::deterministic_from_cover(&cover, problem.x_count()))
}
