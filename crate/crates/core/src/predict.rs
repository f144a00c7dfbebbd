//! Classical versus quantum predictions for conjunction/negation data.
//!
//! For a pair of concepts and their negations the four conjunction weights
//! of a classical (Kolmogorovian) model partition unit mass, so
//! `I = 1 − µ(A∧B) − µ(A∧B′) − µ(A′∧B) − µ(A′∧B′)` vanishes. Measured data
//! fluctuate around `I ≈ −0.81`, which yields a shifted prediction for the
//! doubly negated conjunction.

use crate::format::to_rounded_json;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default offset of the quantum prediction, `1 − (−0.81)`.
pub const QUANTUM_CONSTANT: f64 = 1.81;

pub const PREDICT_CSV_HEADER: [&str; 5] =
    ["label", "mu_ab", "mu_ab_notb", "mu_nota_b", "mu_nota_notb"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("record `{label}`: {field} = {value} is outside [0, 1]")]
    Domain {
        label: String,
        field: &'static str,
        value: f64,
    },
    #[error("no records")]
    Empty,
}

/// Membership weights of `A∧B`, `A∧B′`, `A′∧B` and `A′∧B′` for one item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjunctionNegationRecord {
    pub label: String,
    pub mu_ab: f64,
    #[serde(rename = "mu_ab_notb")]
    pub mu_a_notb: f64,
    pub mu_nota_b: f64,
    pub mu_nota_notb: f64,
}

impl ConjunctionNegationRecord {
    pub fn validate(&self) -> Result<(), PredictError> {
        let fields = [
            ("mu_ab", self.mu_ab),
            ("mu_ab_notb", self.mu_a_notb),
            ("mu_nota_b", self.mu_nota_b),
            ("mu_nota_notb", self.mu_nota_notb),
        ];
        for (field, value) in fields {
            if !(0.0..=1.0).contains(&value) {
                return Err(PredictError::Domain {
                    label: self.label.clone(),
                    field,
                    value,
                });
            }
        }
        Ok(())
    }
}

/// A predicted weight, flagged rather than clamped when outside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub value: f64,
    pub out_of_range: bool,
}

impl Prediction {
    fn new(value: f64) -> Self {
        Self {
            value,
            out_of_range: !(0.0..=1.0).contains(&value),
        }
    }
}

pub fn kolmogorov_factor(r: &ConjunctionNegationRecord) -> f64 {
    1.0 - r.mu_ab - r.mu_a_notb - r.mu_nota_b - r.mu_nota_notb
}

/// Value of `µ(A′∧B′)` that makes the four weights sum to one.
pub fn classical_prediction(mu_ab: f64, mu_a_notb: f64, mu_nota_b: f64) -> Prediction {
    Prediction::new(1.0 - mu_ab - mu_a_notb - mu_nota_b)
}

/// Quantum prediction with the default constant.
pub fn quantum_prediction(mu_ab: f64, mu_a_notb: f64, mu_nota_b: f64) -> Prediction {
    quantum_prediction_with(QUANTUM_CONSTANT, mu_ab, mu_a_notb, mu_nota_b)
}

pub fn quantum_prediction_with(
    constant: f64,
    mu_ab: f64,
    mu_a_notb: f64,
    mu_nota_b: f64,
) -> Prediction {
    Prediction::new(constant - mu_ab - mu_a_notb - mu_nota_b)
}

/// Parses `label,mu_ab,mu_ab_notb,mu_nota_b,mu_nota_notb` rows.
pub fn parse_records_csv(text: &str) -> Result<Vec<ConjunctionNegationRecord>, PredictError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| PredictError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.iter().ne(PREDICT_CSV_HEADER.iter().copied()) {
        if headers.is_empty() {
            return Err(PredictError::Empty);
        }
        return Err(PredictError::Parse {
            line: 1,
            message: format!("expected header `{}`", PREDICT_CSV_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for row in reader.deserialize::<ConjunctionNegationRecord>() {
        let record = row.map_err(|e| PredictError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        record.validate()?;
        out.push(record);
    }
    if out.is_empty() {
        return Err(PredictError::Empty);
    }
    Ok(out)
}

pub fn records_to_csv(records: &[ConjunctionNegationRecord]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(PREDICT_CSV_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.label.clone(),
            r.mu_ab.to_string(),
            r.mu_a_notb.to_string(),
            r.mu_nota_b.to_string(),
            r.mu_nota_notb.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// One evaluated record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRecord {
    pub label: String,
    pub mu_ab: f64,
    pub mu_ab_notb: f64,
    pub mu_nota_b: f64,
    pub mu_nota_notb: f64,
    pub kolmogorov_factor: f64,
    pub classical: Prediction,
    pub quantum: Prediction,
    /// Observed `µ(A′∧B′)` minus the classical prediction.
    pub classical_deviation: f64,
    /// Observed `µ(A′∧B′)` minus the quantum prediction.
    pub quantum_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub quantum_constant: f64,
    pub records: Vec<PredictionRecord>,
    pub mean_kolmogorov_factor: f64,
}

impl PredictionReport {
    pub fn evaluate(records: &[ConjunctionNegationRecord], quantum_constant: f64) -> Self {
        let records: Vec<PredictionRecord> = records
            .iter()
            .map(|r| {
                let classical = classical_prediction(r.mu_ab, r.mu_a_notb, r.mu_nota_b);
                let quantum =
                    quantum_prediction_with(quantum_constant, r.mu_ab, r.mu_a_notb, r.mu_nota_b);
                PredictionRecord {
                    label: r.label.clone(),
                    mu_ab: r.mu_ab,
                    mu_ab_notb: r.mu_a_notb,
                    mu_nota_b: r.mu_nota_b,
                    mu_nota_notb: r.mu_nota_notb,
                    kolmogorov_factor: kolmogorov_factor(r),
                    classical,
                    quantum,
                    classical_deviation: r.mu_nota_notb - classical.value,
                    quantum_deviation: r.mu_nota_notb - quantum.value,
                }
            })
            .collect();
        let mean_kolmogorov_factor = if records.is_empty() {
            0.0
        } else {
            records.iter().map(|r| r.kolmogorov_factor).sum::<f64>() / records.len() as f64
        };
        Self {
            quantum_constant,
            records,
            mean_kolmogorov_factor,
        }
    }

    pub fn to_json(&self) -> String {
        to_rounded_json(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(v: [f64; 4]) -> ConjunctionNegationRecord {
        ConjunctionNegationRecord {
            label: "x".into(),
            mu_ab: v[0],
            mu_a_notb: v[1],
            mu_nota_b: v[2],
            mu_nota_notb: v[3],
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn factor_examples() {
        assert!(close(kolmogorov_factor(&rec([0.25; 4])), 0.0));
        assert!(close(kolmogorov_factor(&rec([0.45; 4])), -0.8));
        assert!(close(kolmogorov_factor(&rec([0.5, 0.4, 0.4, 0.5])), -0.8));
    }

    #[test]
    fn classical_examples() {
        let p = classical_prediction(0.25, 0.25, 0.25);
        assert!(close(p.value, 0.25) && !p.out_of_range);
        assert_eq!(
            classical_prediction(0.0, 0.0, 0.0),
            Prediction {
                value: 1.0,
                out_of_range: false
            }
        );
        let p = classical_prediction(0.5, 0.4, 0.4);
        assert!(close(p.value, -0.3) && p.out_of_range);
    }

    #[test]
    fn quantum_examples() {
        let p = quantum_prediction(0.5, 0.4, 0.4);
        assert!(close(p.value, 0.51) && !p.out_of_range);
        let p = quantum_prediction(0.81, 0.5, 0.5);
        assert!(close(p.value, 0.0));
        assert_eq!(
            quantum_prediction(0.0, 0.0, 0.0),
            Prediction {
                value: 1.81,
                out_of_range: true
            }
        );
        assert!(close(
            quantum_prediction_with(1.5, 0.0, 0.0, 0.0).value,
            1.5
        ));
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let text = "label,mu_ab,mu_ab_notb,mu_nota_b,mu_nota_notb\nu,0.25,0.25,0.25,0.25\nv,0.5,0.4,0.4,0.5\n";
        let records = parse_records_csv(text).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[1], rec([0.5, 0.4, 0.4, 0.5]).clone_with_label("v"));
        assert_eq!(records_to_csv(&records), text);

        assert_eq!(parse_records_csv("").unwrap_err(), PredictError::Empty);
        assert_eq!(
            parse_records_csv("label,mu_ab,mu_ab_notb,mu_nota_b,mu_nota_notb\n").unwrap_err(),
            PredictError::Empty
        );
        assert!(matches!(
            parse_records_csv("a,b\n1,2\n"),
            Err(PredictError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_records_csv("label,mu_ab,mu_ab_notb,mu_nota_b,mu_nota_notb\nu,0.2,x,0.1,0.1\n"),
            Err(PredictError::Parse { line: 2, .. })
        ));
        assert_eq!(
            parse_records_csv("label,mu_ab,mu_ab_notb,mu_nota_b,mu_nota_notb\nu,0.2,1.2,0.1,0.1\n")
                .unwrap_err(),
            PredictError::Domain {
                label: "u".into(),
                field: "mu_ab_notb",
                value: 1.2
            }
        );
    }

    impl ConjunctionNegationRecord {
        fn clone_with_label(&self, label: &str) -> Self {
            Self {
                label: label.into(),
                ..self.clone()
            }
        }
    }

    #[test]
    fn report_columns() {
        let report = PredictionReport::evaluate(&[rec([0.5, 0.4, 0.4, 0.5])], QUANTUM_CONSTANT);
        let r = &report.records[0];
        assert!(close(r.kolmogorov_factor, -0.8));
        assert!(close(r.classical_deviation, 0.8));
        assert!(close(r.quantum_deviation, -0.01));
        assert!(close(report.mean_kolmogorov_factor, -0.8));
        let json = report.to_json();
        assert!(json.contains("\"quantum_constant\": 1.81"), "{json}");
        assert!(json.contains("\"out_of_range\": true"));
    }

    proptest! {
        #[test]
        fn quantum_minus_classical(a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
            let d = quantum_prediction(a, b, c).value - classical_prediction(a, b, c).value;
            prop_assert!((d - 0.81).abs() <= 1e-12);
        }

        #[test]
        fn factor_at_quantum_prediction(a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
            let q = quantum_prediction(a, b, c).value;
            prop_assert!((kolmogorov_factor(&rec([a, b, c, q])) + 0.81).abs() <= 1e-12);
        }

        #[test]
        fn factor_zero_at_classical_prediction(a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
            let p = classical_prediction(a, b, c).value;
            prop_assert!(kolmogorov_factor(&rec([a, b, c, p])).abs() <= 1e-12);
        }
    }
}
