//! Hilbert-space model of a two-concept disjunction.
//!
//! Concepts A and B are unit vectors `|A⟩`, `|B⟩`; item `k` is measured by a
//! projector `M_k` and the disjunction by `(|A⟩ + |B⟩)/√2`, so that
//!
//! ```text
//! µ_k(A or B) = ½(µ_k(A) + µ_k(B)) + c_k √(µ_k(A) µ_k(B)) cos φ_k.
//! ```
//!
//! Fitting proceeds in stages: per-item `λ_k`, a greedy sign assignment over
//! the descending `λ` ranking that leaves a nonnegative residual `S`, a
//! single reduced overlap `c_m < 1` on the largest-`λ` item absorbing `S`,
//! and finally explicit vectors in `ℂ^{n+1}` with `α_k = γ_k = 0`,
//! `β_k = φ_k`. The extra coordinate carries the part of item `m`'s B
//! component orthogonal to A.

use crate::format::{fmt_sig, to_rounded_json};
use crate::ingest::{Column, ConceptPairData};
use crate::numerics::{inner_product, ComplexVector, NumericsError};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;
use thiserror::Error;

/// Tolerance on column sums accepted by [`build_state_vectors`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("item `{item}`: µ(A)·µ(B) = 0, interference phase undefined")]
    DegenerateItem { item: String },
    #[error("item `{item}`: cos φ = {cos_phi} outside [-1, 1]")]
    PhaseInfeasible { item: String, cos_phi: f64 },
    #[error("item `{item}`: λ radicand {radicand} is negative")]
    LambdaInfeasible { item: String, radicand: f64 },
    #[error("all λ values are zero")]
    AllLambdasZero,
    #[error("item `{item}`: c_m = {c_m} outside (0, 1]")]
    OverlapInfeasible { item: String, c_m: f64 },
    #[error("column {column} sums to {sum}, expected 1")]
    NotNormalized { column: Column, sum: f64 },
    #[error("at least two items are required")]
    TooFewItems,
    #[error("coordinate {index} outside a {dim}-dimensional space")]
    CoordinateOutOfRange { index: usize, dim: usize },
    #[error("projection is the zero vector; collapse is undefined")]
    UndefinedCollapse,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl ModelError {
    fn for_item(self, label: &str) -> Self {
        let item = label.to_string();
        match self {
            ModelError::DegenerateItem { .. } => ModelError::DegenerateItem { item },
            ModelError::PhaseInfeasible { cos_phi, .. } => {
                ModelError::PhaseInfeasible { item, cos_phi }
            }
            ModelError::LambdaInfeasible { radicand, .. } => {
                ModelError::LambdaInfeasible { item, radicand }
            }
            ModelError::OverlapInfeasible { c_m, .. } => {
                ModelError::OverlapInfeasible { item, c_m }
            }
            other => other,
        }
    }

    /// Label of the offending item, when the error concerns one.
    pub fn item(&self) -> Option<&str> {
        match self {
            ModelError::DegenerateItem { item }
            | ModelError::PhaseInfeasible { item, .. }
            | ModelError::LambdaInfeasible { item, .. }
            | ModelError::OverlapInfeasible { item, .. } => Some(item),
            _ => None,
        }
    }
}

fn interference_offset(mu_a: f64, mu_b: f64, mu_ab: f64) -> f64 {
    mu_ab - 0.5 * (mu_a + mu_b)
}

/// `cos φ = (µ(A or B) − ½(µ(A) + µ(B))) / (c √(µ(A) µ(B)))`.
pub fn interference_phase(mu_a: f64, mu_b: f64, mu_ab: f64, c: f64) -> Result<f64, ModelError> {
    let prod = mu_a * mu_b;
    if !(prod > 0.0) || !(c > 0.0) {
        return Err(ModelError::DegenerateItem {
            item: String::new(),
        });
    }
    let cos_phi = interference_offset(mu_a, mu_b, mu_ab) / (c * prod.sqrt());
    if !(-1.0..=1.0).contains(&cos_phi) {
        return Err(ModelError::PhaseInfeasible {
            item: String::new(),
            cos_phi,
        });
    }
    Ok(cos_phi)
}

/// `λ = √(µ(A) µ(B) − (µ(A or B) − ½(µ(A) + µ(B)))²)`, the sine-term
/// magnitude with unit overlap.
pub fn lambda_value(mu_a: f64, mu_b: f64, mu_ab: f64) -> Result<f64, ModelError> {
    let d = interference_offset(mu_a, mu_b, mu_ab);
    let radicand = mu_a * mu_b - d * d;
    if !(radicand >= 0.0) {
        return Err(ModelError::LambdaInfeasible {
            item: String::new(),
            radicand,
        });
    }
    Ok(radicand.sqrt())
}

/// Outcome of the greedy sign assignment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignAssignment {
    /// ±1 per item, in input order.
    pub epsilons: Vec<i8>,
    /// Item positions sorted by descending λ (ties by ascending position).
    pub ranking: Vec<usize>,
    /// `S_1 … S_n` along the ranking.
    pub partial_sums: Vec<f64>,
    /// Final residual `S_n ≥ 0`.
    pub total: f64,
}

impl SignAssignment {
    /// 1-based λ rank of each item, in input order.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.ranking.len()];
        for (r, &k) in self.ranking.iter().enumerate() {
            rank[k] = r + 1;
        }
        rank
    }
}

/// Walks the λ values from largest to smallest, subtracting each one while
/// the running sum stays nonnegative and adding it otherwise.
pub fn assign_signs(lambdas: &[f64]) -> Result<SignAssignment, ModelError> {
    if lambdas.is_empty() || !lambdas.iter().any(|&l| l > 0.0) {
        return Err(ModelError::AllLambdasZero);
    }
    let mut ranking: Vec<usize> = (0..lambdas.len()).collect();
    ranking.sort_by(|&i, &j| lambdas[j].total_cmp(&lambdas[i]).then(i.cmp(&j)));

    let mut epsilons = vec![0i8; lambdas.len()];
    let mut partial_sums = Vec::with_capacity(lambdas.len());
    let first = ranking[0];
    let mut s = lambdas[first];
    epsilons[first] = 1;
    partial_sums.push(s);
    for &k in &ranking[1..] {
        let lower = s - lambdas[k];
        if lower >= 0.0 {
            s = lower;
            epsilons[k] = -1;
        } else {
            s += lambdas[k];
            epsilons[k] = 1;
        }
        partial_sums.push(s);
    }
    Ok(SignAssignment {
        epsilons,
        ranking,
        partial_sums,
        total: s,
    })
}

/// Overlap `c_m` of the largest-λ item that cancels the residual `S`:
/// `√(((S − λ_m)² + (µ_m(A or B) − ½(µ_m(A) + µ_m(B)))²) / (µ_m(A) µ_m(B)))`.
pub fn compute_cm(
    s: f64,
    lambda_m: f64,
    mu_a_m: f64,
    mu_b_m: f64,
    mu_ab_m: f64,
) -> Result<f64, ModelError> {
    let prod = mu_a_m * mu_b_m;
    if !(prod > 0.0) {
        return Err(ModelError::DegenerateItem {
            item: String::new(),
        });
    }
    let d = interference_offset(mu_a_m, mu_b_m, mu_ab_m);
    let c_m = (((s - lambda_m).powi(2) + d * d) / prod).sqrt();
    if !(c_m <= 1.0) {
        return Err(ModelError::OverlapInfeasible {
            item: String::new(),
            c_m,
        });
    }
    Ok(c_m)
}

/// Fitted model. Phases are stored in radians; the conventions `α_k = 0`
/// and `γ_k = 0` hold throughout, so `β_k = φ_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HilbertModel {
    pub indices: Vec<u32>,
    pub labels: Vec<String>,
    pub mu_a: Vec<f64>,
    pub mu_b: Vec<f64>,
    pub mu_ab: Vec<f64>,
    pub cos_phi: Vec<f64>,
    /// Signed phases φ_k (radians), sign given by ε_k.
    pub phases: Vec<f64>,
    pub epsilons: Vec<i8>,
    pub lambdas: Vec<f64>,
    /// 1-based rank in descending λ order.
    pub lambda_rank: Vec<usize>,
    pub partial_sums: Vec<f64>,
    pub s_residual: f64,
    /// 0-based position of the largest-λ item.
    pub m_index: usize,
    pub c: Vec<f64>,
    pub vector_a: ComplexVector,
    pub vector_b: ComplexVector,
}

impl HilbertModel {
    pub fn n_items(&self) -> usize {
        self.labels.len()
    }

    pub fn dimension(&self) -> usize {
        self.vector_a.len()
    }

    pub fn c_m(&self) -> f64 {
        self.c[self.m_index]
    }

    pub fn phases_deg(&self) -> Vec<f64> {
        self.phases.iter().map(|p| p.to_degrees()).collect()
    }

    /// Coordinates spanned by `M_k`: `{k}`, plus the extra last coordinate
    /// for item `m`.
    pub fn item_projector(&self, k: usize) -> Vec<usize> {
        if k == self.m_index {
            vec![k, self.n_items()]
        } else {
            vec![k]
        }
    }

    /// `(|A⟩ + |B⟩)/√2`.
    pub fn disjunction_state(&self) -> ComplexVector {
        self.vector_a
            .add(&self.vector_b)
            .expect("equal dimensions")
            .scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
    }
}

/// Runs the full fit on normalized data (see [`NORMALIZATION_TOL`]).
pub fn build_state_vectors(data: &ConceptPairData) -> Result<HilbertModel, ModelError> {
    build_state_vectors_with_tol(data, NORMALIZATION_TOL)
}

pub fn build_state_vectors_with_tol(
    data: &ConceptPairData,
    tol: f64,
) -> Result<HilbertModel, ModelError> {
    let n = data.items.len();
    if n < 2 {
        return Err(ModelError::TooFewItems);
    }
    for column in Column::ALL {
        let sum = data.column_sum(column);
        if !((sum - 1.0).abs() <= tol) {
            return Err(ModelError::NotNormalized { column, sum });
        }
    }
    let labels: Vec<String> = data.items.iter().map(|it| it.label.clone()).collect();
    let mu_a = data.column(Column::A);
    let mu_b = data.column(Column::B);
    let mu_ab = data.column(Column::AorB);

    for k in 0..n {
        if !(mu_a[k] * mu_b[k] > 0.0) {
            return Err(ModelError::DegenerateItem {
                item: labels[k].clone(),
            });
        }
    }
    let lambdas = (0..n)
        .map(|k| lambda_value(mu_a[k], mu_b[k], mu_ab[k]).map_err(|e| e.for_item(&labels[k])))
        .collect::<Result<Vec<_>, _>>()?;
    let signs = assign_signs(&lambdas)?;
    let m = signs.ranking[0];
    let c_m = compute_cm(signs.total, lambdas[m], mu_a[m], mu_b[m], mu_ab[m])
        .map_err(|e| e.for_item(&labels[m]))?;
    if !(c_m > 0.0) {
        return Err(ModelError::OverlapInfeasible {
            item: labels[m].clone(),
            c_m,
        });
    }
    let mut c = vec![1.0; n];
    c[m] = c_m;

    let cos_phi = (0..n)
        .map(|k| {
            interference_phase(mu_a[k], mu_b[k], mu_ab[k], c[k]).map_err(|e| e.for_item(&labels[k]))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let phases: Vec<f64> = cos_phi
        .iter()
        .zip(&signs.epsilons)
        .map(|(cp, &e)| f64::from(e) * cp.acos())
        .collect();

    let (vector_a, vector_b) = state_vectors(&mu_a, &mu_b, &phases, m, c_m)?;

    Ok(HilbertModel {
        indices: data.items.iter().map(|it| it.index).collect(),
        labels,
        mu_a,
        mu_b,
        mu_ab,
        cos_phi,
        phases,
        epsilons: signs.epsilons.clone(),
        lambda_rank: signs.ranks(),
        lambdas,
        partial_sums: signs.partial_sums,
        s_residual: signs.total,
        m_index: m,
        c,
        vector_a,
        vector_b,
    })
}

/// Explicit coordinates in `ℂ^{n+1}`: `A_k = √µ_k(A)`,
/// `B_k = √µ_k(B) c_k e^{iφ_k}`, `A_{n+1} = 0`, `B_{n+1} = √µ_m(B) √(1 − c_m²)`.
pub fn state_vectors(
    mu_a: &[f64],
    mu_b: &[f64],
    phases: &[f64],
    m: usize,
    c_m: f64,
) -> Result<(ComplexVector, ComplexVector), ModelError> {
    let n = mu_a.len();
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for k in 0..n {
        let ck = if k == m { c_m } else { 1.0 };
        a.push(Complex64::new(mu_a[k].sqrt(), 0.0));
        b.push(Complex64::from_polar(mu_b[k].sqrt() * ck, phases[k]));
    }
    a.push(Complex64::new(0.0, 0.0));
    b.push(Complex64::new(
        mu_b[m].sqrt() * (1.0 - c_m * c_m).max(0.0).sqrt(),
        0.0,
    ));
    Ok((ComplexVector::new(a)?, ComplexVector::new(b)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthogonalityCheck {
    pub cos_sum: f64,
    pub sin_sum: f64,
    pub abs_inner: f64,
}

/// Cosine and sine sums `Σ c_k √(µ_k(A) µ_k(B)) {cos, sin} φ_k` together with
/// `|⟨A|B⟩|` computed from the stored vectors.
pub fn verify_orthogonality(model: &HilbertModel) -> OrthogonalityCheck {
    let mut cos_sum = 0.0;
    let mut sin_sum = 0.0;
    for k in 0..model.n_items() {
        let w = model.c[k] * (model.mu_a[k] * model.mu_b[k]).sqrt();
        cos_sum += w * model.phases[k].cos();
        sin_sum += w * model.phases[k].sin();
    }
    let abs_inner = inner_product(&model.vector_a, &model.vector_b)
        .map(|z| z.norm())
        .unwrap_or(f64::INFINITY);
    OrthogonalityCheck {
        cos_sum,
        sin_sum,
        abs_inner,
    }
}

/// `½(µ_k(A) + µ_k(B)) + c_k √(µ_k(A) µ_k(B)) cos φ_k` for every item.
pub fn reconstruct_disjunction(model: &HilbertModel) -> Vec<f64> {
    (0..model.n_items())
        .map(|k| {
            0.5 * (model.mu_a[k] + model.mu_b[k])
                + model.c[k] * (model.mu_a[k] * model.mu_b[k]).sqrt() * model.phases[k].cos()
        })
        .collect()
}

fn check_coords(state: &ComplexVector, coords: &[usize]) -> Result<(), ModelError> {
    match coords.iter().find(|&&i| i >= state.len()) {
        Some(&index) => Err(ModelError::CoordinateOutOfRange {
            index,
            dim: state.len(),
        }),
        None => Ok(()),
    }
}

/// Born rule for the coordinate projector onto `coords`: `Σ_{i∈coords} |ψ_i|²`.
pub fn born_probability(state: &ComplexVector, coords: &[usize]) -> Result<f64, ModelError> {
    check_coords(state, coords)?;
    let mut seen = vec![false; state.len()];
    let mut p = 0.0;
    for &i in coords {
        if !std::mem::replace(&mut seen[i], true) {
            p += state[i].norm_sqr();
        }
    }
    Ok(p)
}

/// Post-measurement state: the projection onto `coords`, renormalized.
pub fn collapse(state: &ComplexVector, coords: &[usize]) -> Result<ComplexVector, ModelError> {
    check_coords(state, coords)?;
    let mut projected = vec![Complex64::new(0.0, 0.0); state.len()];
    for &i in coords {
        projected[i] = state[i];
    }
    let projected = ComplexVector::new(projected)?;
    let len = projected.norm();
    if !(len > 0.0) {
        return Err(ModelError::UndefinedCollapse);
    }
    Ok(projected.scale(Complex64::new(1.0 / len, 0.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub index: u32,
    pub label: String,
    pub mu_a: f64,
    pub mu_b: f64,
    pub mu_ab: f64,
    pub lambda: f64,
    pub lambda_rank: usize,
    pub epsilon: i8,
    pub phi_deg: f64,
}

/// Per-item table plus scalar diagnostics, recomputed from a model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub items: Vec<ReportRow>,
    pub s_residual: f64,
    pub c_m: f64,
    /// 1-based item index of the largest-λ item.
    pub m_index: u32,
    pub m_label: String,
    pub norm_a: f64,
    pub norm_b: f64,
    pub cos_sum: f64,
    pub sin_sum: f64,
    pub orthogonality_residual: f64,
    pub reconstruction_max_error: f64,
}

impl ModelReport {
    pub fn from_model(model: &HilbertModel) -> Self {
        let phases = model.phases_deg();
        let items = (0..model.n_items())
            .map(|k| ReportRow {
                index: model.indices[k],
                label: model.labels[k].clone(),
                mu_a: model.mu_a[k],
                mu_b: model.mu_b[k],
                mu_ab: model.mu_ab[k],
                lambda: model.lambdas[k],
                lambda_rank: model.lambda_rank[k],
                epsilon: model.epsilons[k],
                phi_deg: phases[k],
            })
            .collect();
        let check = verify_orthogonality(model);
        let reconstruction_max_error = reconstruct_disjunction(model)
            .iter()
            .zip(&model.mu_ab)
            .map(|(r, m)| (r - m).abs())
            .fold(0.0, f64::max);
        Self {
            items,
            s_residual: model.s_residual,
            c_m: model.c_m(),
            m_index: model.indices[model.m_index],
            m_label: model.labels[model.m_index].clone(),
            norm_a: model.vector_a.norm(),
            norm_b: model.vector_b.norm(),
            cos_sum: check.cos_sum,
            sin_sum: check.sin_sum,
            orthogonality_residual: check.abs_inner,
            reconstruction_max_error,
        }
    }

    pub fn to_json(&self) -> String {
        to_rounded_json(self)
    }

    /// Aligned text table in the column order k, item, µ(A), µ(B),
    /// µ(A or B), λ, λ-rank, ε, φ.
    pub fn to_text(&self) -> String {
        let header = [
            "k", "item", "mu_A", "mu_B", "mu_AorB", "lambda", "rank", "eps", "phi_deg",
        ];
        let mut rows: Vec<[String; 9]> = vec![header.map(String::from)];
        for r in &self.items {
            rows.push([
                r.index.to_string(),
                r.label.clone(),
                fmt_sig(r.mu_a),
                fmt_sig(r.mu_b),
                fmt_sig(r.mu_ab),
                fmt_sig(r.lambda),
                r.lambda_rank.to_string(),
                format!("{:+}", r.epsilon),
                fmt_sig(r.phi_deg),
            ]);
        }
        let mut widths = [0usize; 9];
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for row in &rows {
            let mut line = String::new();
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    line.push_str("  ");
                }
                if i == 1 {
                    let _ = write!(line, "{cell:<w$}", w = widths[i]);
                } else {
                    let _ = write!(line, "{cell:>w$}", w = widths[i]);
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out.push('\n');
        for (name, value) in [
            ("S", fmt_sig(self.s_residual)),
            ("c_m", fmt_sig(self.c_m)),
            ("m", format!("{} ({})", self.m_index, self.m_label)),
            ("|A|", fmt_sig(self.norm_a)),
            ("|B|", fmt_sig(self.norm_b)),
            ("cos_sum", fmt_sig(self.cos_sum)),
            ("sin_sum", fmt_sig(self.sin_sum)),
            ("|<A|B>|", fmt_sig(self.orthogonality_residual)),
            (
                "max reconstruction error",
                fmt_sig(self.reconstruction_max_error),
            ),
        ] {
            let _ = writeln!(out, "{name} = {value}");
        }
        out
    }
}

/// `index,re_a,im_a,re_b,im_b`, one row per coordinate (1-based).
pub fn vectors_csv(model: &HilbertModel) -> String {
    let mut out = String::from("index,re_a,im_a,re_b,im_b\n");
    for (i, (a, b)) in model.vector_a.iter().zip(model.vector_b.iter()).enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            i + 1,
            fmt_sig(a.re),
            fmt_sig(a.im),
            fmt_sig(b.re),
            fmt_sig(b.im)
        );
    }
    out
}
