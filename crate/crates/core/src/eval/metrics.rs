use std::fmt;

use serde::{Serialize, Serializer};

use super::EvalError;
use crate::Sentiment;

/// Exact ratio of counts, rendered with 4 decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    /// `None` when the denominator is zero.
    pub fn new(num: u64, den: u64) -> Option<Self> {
        (den != 0).then_some(Fraction { num, den })
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact comparison against `p/q`.
    pub fn equals(self, p: u64, q: u64) -> bool {
        self.num as u128 * q as u128 == p as u128 * self.den as u128
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.value())
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// 3×3 counts; rows are the true class, columns the predicted class, both in
/// (positive, neutral, negative) order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn record(&mut self, truth: Sentiment, pred: Sentiment) {
        self.counts[truth.index()][pred.index()] += 1;
    }

    pub fn get(&self, truth: Sentiment, pred: Sentiment) -> u64 {
        self.counts[truth.index()][pred.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }

    pub fn truth_count(&self, c: Sentiment) -> u64 {
        self.counts[c.index()].iter().sum()
    }

    pub fn predicted_count(&self, c: Sentiment) -> u64 {
        self.counts.iter().map(|row| row[c.index()]).sum()
    }

    pub fn accuracy(&self) -> Result<Fraction, EvalError> {
        Fraction::new(self.trace(), self.total()).ok_or(EvalError::EmptyMatrix)
    }

    /// CSV block with a header row and a header column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("truth\\predicted,positive,neutral,negative\n");
        for t in Sentiment::ALL {
            let row = &self.counts[t.index()];
            out.push_str(&format!("{t},{},{},{}\n", row[0], row[1], row[2]));
        }
        out
    }
}

pub fn confusion(pred: &[Sentiment], truth: &[Sentiment]) -> Result<ConfusionMatrix, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch { pred: pred.len(), truth: truth.len() });
    }
    let mut m = ConfusionMatrix::default();
    for (p, t) in pred.iter().zip(truth) {
        m.record(*t, *p);
    }
    Ok(m)
}

/// F1 = 2·TP / (2·TP + FP + FN) per class; `None` when the class never
/// occurs as truth or prediction.
pub fn f1_per_class(matrix: &ConfusionMatrix) -> [Option<Fraction>; 3] {
    Sentiment::ALL.map(|c| {
        let tp = matrix.get(c, c);
        let fp = matrix.predicted_count(c) - tp;
        let fneg = matrix.truth_count(c) - tp;
        Fraction::new(2 * tp, 2 * tp + fp + fneg)
    })
}
