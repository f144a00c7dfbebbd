//! Wave-packet illustration of the disjunction.
//!
//! Each concept is a 2D Gaussian packet `ψ_X = √|ψ_X|² e^{iS_X}` with
//!
//! ```text
//! |ψ_X(x, y)|² = D_X exp(−((x − c_x)²/(2σ_x²) + (y − c_y)²/(2σ_y²)))
//! ```
//!
//! and an item located at `(x_k, y_k)` has midpoint collapse probability
//! `Δ |ψ_X(x_k, y_k)|²`. The phase difference `θ = S_B − S_A` is a fixed
//! 24-term bivariate polynomial whose coefficients come from the linear
//! system `Δ f(x_k, y_k) θ(x_k, y_k) = f_k`, where `f = |ψ_A ψ_B|` and
//! `f_k = µ_k(A or B) − ½(µ_k(A) + µ_k(B))`. The disjunction intensity is
//! `½(|ψ_A|² + |ψ_B|²) + |ψ_A ψ_B| cos θ`.

use crate::format::fmt_sig;
use crate::ingest::ConceptPairData;
use crate::numerics::{solve_dense_linear, DenseMatrix, NumericsError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

/// Cell area used by the bundled configuration.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Relative bound on `Δ f θ − f_k` at the item positions.
pub const INTERPOLATION_TOL: f64 = 1e-6;

/// Absolute tolerance on the midpoint probabilities of a fitted position.
pub const PLACEMENT_TOL: f64 = 1e-6;

const PLACEMENT_SAMPLES: usize = 4096;

/// Monomial exponents `(i, j)` of `x^i y^j`, in coefficient order.
pub const PHASE_BASIS: [(u32, u32); 24] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
    (4, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 4),
    (5, 0),
    (4, 1),
    (3, 2),
    (2, 3),
    (1, 4),
    (0, 5),
    (6, 0),
    (5, 1),
    (4, 2),
];

pub const N_COEFFS: usize = PHASE_BASIS.len();

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("invalid packet: amplitude and widths must be positive")]
    InvalidPacket,
    #[error("cell area must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("item `{item}`: the two level sets do not intersect")]
    PlacementInfeasible { item: String },
    #[error("expected {expected} items, got {got}")]
    ItemCount { expected: usize, got: usize },
    #[error("positions {0} and {1} coincide")]
    DuplicatePosition(usize, usize),
    #[error("interference envelope vanishes at position {0}")]
    VanishingEnvelope(usize),
    #[error("phase-field solve failed: {0}")]
    Solver(#[from] NumericsError),
    #[error("interpolation residual {0:e} exceeds {INTERPOLATION_TOL:e}")]
    InterpolationResidual(f64),
    #[error("grid must have positive width, height and extent area")]
    InvalidGrid,
    #[error("invalid wave-field spec: {0}")]
    Spec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub sigma: [f64; 2],
}

impl GaussianPacket {
    pub fn validate(&self) -> Result<(), WaveError> {
        let ok = self.amplitude > 0.0
            && self.sigma.iter().all(|s| *s > 0.0 && s.is_finite())
            && self.amplitude.is_finite()
            && self.center.iter().all(|c| c.is_finite());
        if ok {
            Ok(())
        } else {
            Err(WaveError::InvalidPacket)
        }
    }

    fn exponent(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        dx * dx / (2.0 * self.sigma[0] * self.sigma[0])
            + dy * dy / (2.0 * self.sigma[1] * self.sigma[1])
    }
}

/// `|ψ(x, y)|²` of a packet.
pub fn gaussian_density(p: &GaussianPacket, x: f64, y: f64) -> f64 {
    p.amplitude * (-p.exponent(x, y)).exp()
}

/// Midpoint-rule collapse probability `Δ |ψ(x_k, y_k)|²`.
pub fn collapse_probability_midpoint(p: &GaussianPacket, position: [f64; 2], delta: f64) -> f64 {
    delta * gaussian_density(p, position[0], position[1])
}

/// `f(x, y) = √(D_A D_B) exp(−(Σ quarter-width quadratic terms))`, i.e.
/// `|ψ_A ψ_B|`.
pub fn interference_envelope(a: &GaussianPacket, b: &GaussianPacket, x: f64, y: f64) -> f64 {
    let q = |v: f64, c: f64, s: f64| (v - c) * (v - c) / (4.0 * s * s);
    let e = q(x, a.center[0], a.sigma[0])
        + q(x, b.center[0], b.sigma[0])
        + q(y, a.center[1], a.sigma[1])
        + q(y, b.center[1], b.sigma[1]);
    (a.amplitude * b.amplitude).sqrt() * (-e).exp()
}

/// `θ(x, y) = Σ_j coeffs[j] x^{i_j} y^{l_j}` over [`PHASE_BASIS`].
pub fn evaluate_phase(coeffs: &[f64; N_COEFFS], x: f64, y: f64) -> f64 {
    let mut xp = [1.0; 7];
    let mut yp = [1.0; 7];
    for i in 1..7 {
        xp[i] = xp[i - 1] * x;
        yp[i] = yp[i - 1] * y;
    }
    PHASE_BASIS
        .iter()
        .zip(coeffs)
        .map(|(&(i, j), c)| c * xp[i as usize] * yp[j as usize])
        .sum()
}

fn basis_row(x: f64, y: f64) -> Vec<f64> {
    PHASE_BASIS
        .iter()
        .map(|&(i, j)| x.powi(i as i32) * y.powi(j as i32))
        .collect()
}

/// Places every item where both midpoint probabilities match its data.
///
/// Candidates are the intersections of the two level-set ellipses. With a
/// reference layout the candidate closest to the reference point wins,
/// otherwise the one closest to the origin.
pub fn fit_item_positions(
    data: &ConceptPairData,
    packet_a: &GaussianPacket,
    packet_b: &GaussianPacket,
    delta: f64,
    reference: Option<&[[f64; 2]]>,
) -> Result<Vec<[f64; 2]>, WaveError> {
    packet_a.validate()?;
    packet_b.validate()?;
    if !(delta > 0.0) {
        return Err(WaveError::InvalidDelta(delta));
    }
    if let Some(r) = reference {
        if r.len() != data.len() {
            return Err(WaveError::ItemCount {
                expected: data.len(),
                got: r.len(),
            });
        }
    }
    data.items
        .iter()
        .enumerate()
        .map(|(k, item)| {
            let candidates =
                level_set_intersections(packet_a, packet_b, delta, item.mu_a, item.mu_b);
            let target = reference.map_or([0.0, 0.0], |r| r[k]);
            candidates
                .into_iter()
                .filter(|p| {
                    (collapse_probability_midpoint(packet_a, *p, delta) - item.mu_a).abs()
                        <= PLACEMENT_TOL
                        && (collapse_probability_midpoint(packet_b, *p, delta) - item.mu_b).abs()
                            <= PLACEMENT_TOL
                })
                .min_by(|p, q| dist2(*p, target).total_cmp(&dist2(*q, target)))
                .ok_or_else(|| WaveError::PlacementInfeasible {
                    item: item.label.clone(),
                })
        })
        .collect()
}

fn dist2(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
}

/// Level `r` of the exponent at which `Δ |ψ|² = µ`, if reachable.
fn level(p: &GaussianPacket, delta: f64, mu: f64) -> Option<f64> {
    if !(mu > 0.0) {
        return None;
    }
    let r = (delta * p.amplitude / mu).ln();
    if r >= 0.0 {
        Some(r)
    } else if r > -1e-12 {
        Some(0.0)
    } else {
        None
    }
}

fn level_set_intersections(
    a: &GaussianPacket,
    b: &GaussianPacket,
    delta: f64,
    mu_a: f64,
    mu_b: f64,
) -> Vec<[f64; 2]> {
    let (Some(ra), Some(rb)) = (level(a, delta, mu_a), level(b, delta, mu_b)) else {
        return Vec::new();
    };
    if ra == 0.0 {
        return vec![a.center];
    }
    let rx = a.sigma[0] * (2.0 * ra).sqrt();
    let ry = a.sigma[1] * (2.0 * ra).sqrt();
    let point = |t: f64| [a.center[0] + rx * t.cos(), a.center[1] + ry * t.sin()];
    let g = |t: f64| {
        let p = point(t);
        b.exponent(p[0], p[1]) - rb
    };

    let step = std::f64::consts::TAU / PLACEMENT_SAMPLES as f64;
    let samples: Vec<(f64, f64)> = (0..=PLACEMENT_SAMPLES)
        .map(|i| {
            let t = i as f64 * step;
            (t, g(t))
        })
        .collect();

    let mut out = Vec::new();
    for w in samples.windows(2) {
        let ((t0, g0), (t1, g1)) = (w[0], w[1]);
        if g0 == 0.0 {
            out.push(point(t0));
        } else if g0 * g1 < 0.0 {
            out.push(point(bisect(&g, t0, t1, g0)));
        }
    }
    // near-tangent contact leaves no sign change; refine shallow minima of |g|
    for w in samples.windows(3) {
        let (g0, g1, g2) = (w[0].1.abs(), w[1].1.abs(), w[2].1.abs());
        if g1 < g0 && g1 <= g2 && g1 < 1e-6 && w[0].1.signum() == w[2].1.signum() {
            let t = golden_min(|t| g(t).abs(), w[0].0, w[2].0);
            out.push(point(t));
        }
    }
    out
}

fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut g_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    for _ in 0..200 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - ratio * (b - a);
        d = a + ratio * (b - a);
    }
    0.5 * (a + b)
}

/// Result of the phase-field solve with point diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSolution {
    pub coeffs: [f64; N_COEFFS],
    /// Right-hand side `f_k / (Δ f(x_k, y_k))`.
    pub theta_targets: Vec<f64>,
    /// `θ(x_k, y_k)` evaluated from `coeffs`.
    pub theta_at_points: Vec<f64>,
    pub cos_theta_at_points: Vec<f64>,
    /// `|Δ f(x_k, y_k) θ(x_k, y_k) − f_k| / |f_k|` (absolute where `f_k = 0`).
    pub relative_residuals: Vec<f64>,
    pub max_relative_residual: f64,
    /// `Δ f(x_k, y_k) cos θ(x_k, y_k)`: the interference term the cosine
    /// form would give with the linearized `θ`.
    pub cosine_interference: Vec<f64>,
}

/// Solves `Δ f(x_k, y_k) θ(x_k, y_k) = f_k` for the 24 phase coefficients.
///
/// With `rescale` the monomial system is assembled in coordinates mapped
/// affinely onto `[−1, 1]²` and the coefficients are expanded back into
/// the original basis afterwards.
pub fn build_phase_field(
    packet_a: &GaussianPacket,
    packet_b: &GaussianPacket,
    positions: &[[f64; 2]],
    delta: f64,
    f_values: &[f64],
    rescale: bool,
) -> Result<PhaseSolution, WaveError> {
    packet_a.validate()?;
    packet_b.validate()?;
    if !(delta > 0.0) {
        return Err(WaveError::InvalidDelta(delta));
    }
    if positions.len() != N_COEFFS {
        return Err(WaveError::ItemCount {
            expected: N_COEFFS,
            got: positions.len(),
        });
    }
    if f_values.len() != N_COEFFS {
        return Err(WaveError::ItemCount {
            expected: N_COEFFS,
            got: f_values.len(),
        });
    }
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if positions[i] == positions[j] {
                return Err(WaveError::DuplicatePosition(i, j));
            }
        }
    }

    let envelope: Vec<f64> = positions
        .iter()
        .map(|p| delta * interference_envelope(packet_a, packet_b, p[0], p[1]))
        .collect();
    if let Some(k) = envelope.iter().position(|e| !(*e > 0.0)) {
        return Err(WaveError::VanishingEnvelope(k));
    }
    let targets: Vec<f64> = f_values.iter().zip(&envelope).map(|(f, e)| f / e).collect();

    let coeffs = if rescale {
        let map = AffineMap::fit(positions);
        let rows: Vec<Vec<f64>> = positions
            .iter()
            .map(|p| {
                let (u, v) = map.forward(p[0], p[1]);
                basis_row(u, v)
            })
            .collect();
        let scaled = solve_dense_linear(&DenseMatrix::from_rows(&rows)?, &targets)?;
        map.expand(&scaled)
    } else {
        let rows: Vec<Vec<f64>> = positions.iter().map(|p| basis_row(p[0], p[1])).collect();
        let sol = solve_dense_linear(&DenseMatrix::from_rows(&rows)?, &targets)?;
        let mut c = [0.0; N_COEFFS];
        c.copy_from_slice(&sol);
        c
    };

    let theta_at_points: Vec<f64> = positions
        .iter()
        .map(|p| evaluate_phase(&coeffs, p[0], p[1]))
        .collect();
    let relative_residuals: Vec<f64> = theta_at_points
        .iter()
        .zip(&envelope)
        .zip(f_values)
        .map(|((t, e), f)| {
            let diff = (e * t - f).abs();
            if *f != 0.0 {
                diff / f.abs()
            } else {
                diff
            }
        })
        .collect();
    let max_relative_residual = relative_residuals.iter().copied().fold(0.0, f64::max);
    if !(max_relative_residual <= INTERPOLATION_TOL) {
        return Err(WaveError::InterpolationResidual(max_relative_residual));
    }
    Ok(PhaseSolution {
        coeffs,
        cos_theta_at_points: theta_at_points.iter().map(|t| t.cos()).collect(),
        cosine_interference: theta_at_points
            .iter()
            .zip(&envelope)
            .map(|(t, e)| e * t.cos())
            .collect(),
        theta_targets: targets,
        theta_at_points,
        relative_residuals,
        max_relative_residual,
    })
}

/// `u = (x − cx)/hx`, `v = (y − cy)/hy` onto the bounding box `[−1, 1]²`.
struct AffineMap {
    cx: f64,
    cy: f64,
    hx: f64,
    hy: f64,
}

impl AffineMap {
    fn fit(points: &[[f64; 2]]) -> Self {
        let span = |axis: usize| {
            let lo = points.iter().map(|p| p[axis]).fold(f64::INFINITY, f64::min);
            let hi = points
                .iter()
                .map(|p| p[axis])
                .fold(f64::NEG_INFINITY, f64::max);
            let half = 0.5 * (hi - lo);
            (0.5 * (hi + lo), if half > 0.0 { half } else { 1.0 })
        };
        let (cx, hx) = span(0);
        let (cy, hy) = span(1);
        Self { cx, cy, hx, hy }
    }

    fn forward(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.cx) / self.hx, (y - self.cy) / self.hy)
    }

    /// Rewrites `Σ g_j u^i v^l` as coefficients over `x^p y^q`. The basis is
    /// closed under taking lower powers, so the expansion stays inside it.
    fn expand(&self, scaled: &[f64]) -> [f64; N_COEFFS] {
        let mut out = [0.0; N_COEFFS];
        for (&(i, l), g) in PHASE_BASIS.iter().zip(scaled) {
            let scale = g / (self.hx.powi(i as i32) * self.hy.powi(l as i32));
            for p in 0..=i {
                let xc = binomial(i, p) * (-self.cx).powi((i - p) as i32);
                for q in 0..=l {
                    let yc = binomial(l, q) * (-self.cy).powi((l - q) as i32);
                    let idx = PHASE_BASIS
                        .iter()
                        .position(|&e| e == (p, q))
                        .expect("basis is downward closed");
                    out[idx] += scale * xc * yc;
                }
            }
        }
        out
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Everything needed to evaluate the three densities.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFieldSpec {
    pub packet_a: GaussianPacket,
    pub packet_b: GaussianPacket,
    pub positions: Vec<[f64; 2]>,
    pub delta: f64,
    pub phase_coeffs: [f64; N_COEFFS],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Density {
    A,
    B,
    AorB,
}

impl Density {
    pub const ALL: [Density; 3] = [Density::A, Density::B, Density::AorB];

    pub fn suffix(self) -> &'static str {
        match self {
            Density::A => "A",
            Density::B => "B",
            Density::AorB => "AorB",
        }
    }
}

impl WaveFieldSpec {
    pub fn phase(&self, x: f64, y: f64) -> f64 {
        evaluate_phase(&self.phase_coeffs, x, y)
    }

    pub fn intensity(&self, which: Density, x: f64, y: f64) -> f64 {
        match which {
            Density::A => gaussian_density(&self.packet_a, x, y),
            Density::B => gaussian_density(&self.packet_b, x, y),
            Density::AorB => {
                let ia = gaussian_density(&self.packet_a, x, y);
                let ib = gaussian_density(&self.packet_b, x, y);
                0.5 * (ia + ib) + (ia * ib).sqrt() * self.phase(x, y).cos()
            }
        }
    }
}

/// Pixel grid over the plane rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub width: usize,
    pub height: usize,
    /// `[x0, y0, x1, y1]`.
    pub extent: [f64; 4],
}

impl Grid {
    pub fn validate(&self) -> Result<(), WaveError> {
        let [x0, y0, x1, y1] = self.extent;
        if self.width == 0
            || self.height == 0
            || !(x1 > x0)
            || !(y1 > y0)
            || !self.extent.iter().all(|v| v.is_finite())
        {
            return Err(WaveError::InvalidGrid);
        }
        Ok(())
    }

    /// Plane coordinates of a pixel centre; row 0 is the top (largest y).
    pub fn pixel_center(&self, col: usize, row: usize) -> (f64, f64) {
        let [x0, y0, x1, y1] = self.extent;
        let x = x0 + (col as f64 + 0.5) * (x1 - x0) / self.width as f64;
        let y = y1 - (row as f64 + 0.5) * (y1 - y0) / self.height as f64;
        (x, y)
    }
}

/// Row-major intensities, top row first.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl Raster {
    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.grid.width + col]
    }

    /// Binary greyscale PGM (P5, 8 bit). Negative values are clamped to 0,
    /// then the image is min–max stretched to 0‥255.
    pub fn to_pgm(&self) -> Vec<u8> {
        let display: Vec<f64> = self.values.iter().map(|v| v.max(0.0)).collect();
        let lo = display.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = display.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut out = format!("P5\n{} {}\n255\n", self.grid.width, self.grid.height).into_bytes();
        out.extend(display.iter().map(|v| {
            if hi > lo {
                (255.0 * (v - lo) / (hi - lo)).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        }));
        out
    }

    /// Unnormalized values, one text line per pixel row.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 10);
        for row in self.values.chunks(self.grid.width) {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", fmt_sig(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluates one density at every pixel centre. Rows are computed in
/// parallel; each value depends only on its own pixel.
pub fn render_intensity(
    spec: &WaveFieldSpec,
    which: Density,
    grid: &Grid,
) -> Result<Raster, WaveError> {
    grid.validate()?;
    spec.packet_a.validate()?;
    spec.packet_b.validate()?;
    let mut values = vec![0.0; grid.width * grid.height];
    values
        .par_chunks_mut(grid.width)
        .enumerate()
        .for_each(|(row, out)| {
            for (col, v) in out.iter_mut().enumerate() {
                let (x, y) = grid.pixel_center(col, row);
                *v = spec.intensity(which, x, y);
            }
        });
    Ok(Raster {
        grid: *grid,
        values,
    })
}

/// `f_k = µ_k(A or B) − ½(µ_k(A) + µ_k(B))` per item.
pub fn interference_targets(data: &ConceptPairData) -> Vec<f64> {
    data.items
        .iter()
        .map(|it| it.mu_ab - 0.5 * (it.mu_a + it.mu_b))
        .collect()
}

/// On-disk wave-field configuration. `positions`, `delta`, `phase_coeffs`
/// and `grid` are optional; `published_phase_coeffs` is carried for
/// reference only and never used for rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFieldConfig {
    pub packet_a: GaussianPacket,
    pub packet_b: GaussianPacket,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_coeffs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published_phase_coeffs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
}

impl WaveFieldConfig {
    pub fn from_json(text: &str) -> Result<Self, WaveError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| WaveError::Spec(e.to_string()))?;
        cfg.packet_a.validate()?;
        cfg.packet_b.validate()?;
        for coeffs in [&cfg.phase_coeffs, &cfg.published_phase_coeffs]
            .into_iter()
            .flatten()
        {
            if coeffs.len() != N_COEFFS {
                return Err(WaveError::Spec(format!(
                    "expected {N_COEFFS} phase coefficients, got {}",
                    coeffs.len()
                )));
            }
        }
        if let Some(d) = cfg.delta {
            if !(d > 0.0) {
                return Err(WaveError::InvalidDelta(d));
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::ingest::ItemRecord;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn packets() -> (GaussianPacket, GaussianPacket) {
        let cfg = corpus::table2();
        (cfg.packet_a, cfg.packet_b)
    }

    #[test]
    fn density_at_centre_and_far_field() {
        let (a, _) = packets();
        assert_eq!(gaussian_density(&a, 0.0, 0.0), 1.18412);
        let mut prev = f64::INFINITY;
        for r in 0..50 {
            let v = gaussian_density(&a, r as f64 * 2.0, r as f64);
            assert!(v < prev || v == 0.0);
            prev = v;
        }
        assert!(prev < 1e-100);
    }

    #[test]
    fn density_at_broccoli() {
        let (a, _) = packets();
        // exponent by hand: 10²/(2·5.6539²) + 4²/(2·3.8036²)
        let e = 100.0 / (2.0 * 5.65390f64.powi(2)) + 16.0 / (2.0 * 3.80360f64.powi(2));
        let oracle = 1.18412 * (-e).exp();
        let got = gaussian_density(&a, 10.0, 4.0);
        assert!((got - oracle).abs() < 1e-15);
        assert!((got - 0.1426).abs() < 2e-4);
    }

    #[test]
    fn midpoint_probabilities() {
        let (a, b) = packets();
        assert!((collapse_probability_midpoint(&a, [0.0, 0.0], 0.1) - 0.1184).abs() < 1e-4);
        assert!((collapse_probability_midpoint(&b, [10.0, 4.0], 0.1) - 0.1284).abs() < 1e-4);
        assert_eq!(collapse_probability_midpoint(&a, [1.0, 1.0], 0.0), 0.0);
    }

    #[test]
    fn envelope_is_geometric_mean() {
        let (a, b) = packets();
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..100 {
            let (x, y) = (rng.gen_range(-10.0..15.0), rng.gen_range(-5.0..10.0));
            let lhs = interference_envelope(&a, &b, x, y);
            let rhs = (gaussian_density(&a, x, y) * gaussian_density(&b, x, y)).sqrt();
            assert!((lhs - rhs).abs() <= 1e-14 * (1.0 + rhs));
        }
    }

    #[test]
    fn phase_evaluation() {
        let zero = [0.0; N_COEFFS];
        assert_eq!(evaluate_phase(&zero, 3.0, -2.0), 0.0);
        let mut constant = [0.0; N_COEFFS];
        constant[0] = 1.7;
        assert_eq!(evaluate_phase(&constant, 123.0, -4.0), 1.7);

        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..100 {
            let mut c = [0.0; N_COEFFS];
            c.iter_mut().for_each(|v| *v = rng.gen_range(-2.0..2.0));
            let (x, y) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let naive: f64 = PHASE_BASIS
                .iter()
                .zip(&c)
                .map(|(&(i, j), k)| k * f64::powi(x, i as i32) * f64::powi(y, j as i32))
                .sum();
            let got = evaluate_phase(&c, x, y);
            assert!(
                (got - naive).abs() <= 1e-12 * (1.0 + naive.abs()),
                "{got} vs {naive}"
            );
        }
    }

    #[test]
    fn published_positions_satisfy_midpoint_rule() {
        let cfg = corpus::table2();
        let data = corpus::hampton();
        for (item, p) in data.items.iter().zip(cfg.positions.as_ref().unwrap()) {
            assert!(
                (collapse_probability_midpoint(&cfg.packet_a, *p, 0.1) - item.mu_a).abs() < 5e-3
            );
            assert!(
                (collapse_probability_midpoint(&cfg.packet_b, *p, 0.1) - item.mu_b).abs() < 5e-3
            );
        }
    }

    #[test]
    fn fitted_positions_reproduce_data() {
        let cfg = corpus::table2();
        let data = corpus::hampton();
        let reference = cfg.positions.clone().unwrap();
        let fitted =
            fit_item_positions(&data, &cfg.packet_a, &cfg.packet_b, 0.1, Some(&reference)).unwrap();
        for ((item, p), r) in data.items.iter().zip(&fitted).zip(&reference) {
            let pa = collapse_probability_midpoint(&cfg.packet_a, *p, 0.1);
            let pb = collapse_probability_midpoint(&cfg.packet_b, *p, 0.1);
            assert!(
                (pa - item.mu_a).abs() <= 1e-6 && (pb - item.mu_b).abs() <= 1e-6,
                "{}",
                item.label
            );
            // printed positions carry about one decimal of precision
            assert!(
                dist2(*p, *r).sqrt() < 0.15,
                "{} drifted to {p:?} from {r:?}",
                item.label
            );
        }
        let unreferenced =
            fit_item_positions(&data, &cfg.packet_a, &cfg.packet_b, 0.1, None).unwrap();
        assert_eq!(unreferenced.len(), 24);
    }

    #[test]
    fn peak_item_sits_on_centre() {
        let (a, b) = packets();
        let mu_b = collapse_probability_midpoint(&b, a.center, 0.1);
        let data = ConceptPairData {
            concept_a_label: "A".into(),
            concept_b_label: "B".into(),
            items: vec![ItemRecord {
                index: 1,
                label: "peak".into(),
                mu_a: 0.1 * a.amplitude,
                mu_b,
                mu_ab: 0.1,
            }],
        };
        assert_eq!(
            fit_item_positions(&data, &a, &b, 0.1, None).unwrap(),
            vec![a.center]
        );
    }

    #[test]
    fn synthetic_configuration_round_trips() {
        let a = GaussianPacket {
            amplitude: 2.0,
            center: [-1.0, 0.5],
            sigma: [1.5, 0.8],
        };
        let b = GaussianPacket {
            amplitude: 3.0,
            center: [2.0, -1.0],
            sigma: [0.9, 2.1],
        };
        let truth = [[0.3, 0.2], [1.1, -0.4], [-0.5, 1.0]];
        let items = truth
            .iter()
            .enumerate()
            .map(|(i, p)| ItemRecord {
                index: i as u32 + 1,
                label: format!("p{i}"),
                mu_a: collapse_probability_midpoint(&a, *p, 0.05),
                mu_b: collapse_probability_midpoint(&b, *p, 0.05),
                mu_ab: 0.0,
            })
            .collect();
        let data = ConceptPairData {
            concept_a_label: "A".into(),
            concept_b_label: "B".into(),
            items,
        };
        let fitted = fit_item_positions(&data, &a, &b, 0.05, Some(&truth)).unwrap();
        for ((p, t), item) in fitted.iter().zip(&truth).zip(&data.items) {
            // oracle: evaluate both Gaussians at the returned point
            assert!((collapse_probability_midpoint(&a, *p, 0.05) - item.mu_a).abs() <= 1e-6);
            assert!((collapse_probability_midpoint(&b, *p, 0.05) - item.mu_b).abs() <= 1e-6);
            assert!(dist2(*p, *t) < 1e-12);
        }
    }

    #[test]
    fn unreachable_level_is_reported() {
        let (a, b) = packets();
        let data = ConceptPairData {
            concept_a_label: "A".into(),
            concept_b_label: "B".into(),
            items: vec![ItemRecord {
                index: 1,
                label: "bright".into(),
                mu_a: 0.5,
                mu_b: 0.01,
                mu_ab: 0.1,
            }],
        };
        assert_eq!(
            fit_item_positions(&data, &a, &b, 0.1, None).unwrap_err(),
            WaveError::PlacementInfeasible {
                item: "bright".into()
            }
        );
        // both levels reachable but the ellipses are disjoint
        let data = ConceptPairData {
            concept_a_label: "A".into(),
            concept_b_label: "B".into(),
            items: vec![ItemRecord {
                index: 1,
                label: "apart".into(),
                mu_a: 0.118,
                mu_b: 0.128,
                mu_ab: 0.1,
            }],
        };
        assert!(matches!(
            fit_item_positions(&data, &a, &b, 0.1, None),
            Err(WaveError::PlacementInfeasible { .. })
        ));
    }

    fn corpus_solution(rescale: bool) -> (PhaseSolution, Vec<[f64; 2]>, Vec<f64>) {
        let cfg = corpus::table2();
        let positions = cfg.positions.unwrap();
        let f = interference_targets(&corpus::hampton());
        let sol =
            build_phase_field(&cfg.packet_a, &cfg.packet_b, &positions, 0.1, &f, rescale).unwrap();
        (sol, positions, f)
    }

    #[test]
    fn corpus_phase_field_interpolates() {
        let cfg = corpus::table2();
        for rescale in [false, true] {
            let (sol, positions, f) = corpus_solution(rescale);
            for (k, p) in positions.iter().enumerate() {
                // oracle: substitute back into Δ f(x_k, y_k) θ(x_k, y_k) = f_k
                let lhs = 0.1
                    * interference_envelope(&cfg.packet_a, &cfg.packet_b, p[0], p[1])
                    * evaluate_phase(&sol.coeffs, p[0], p[1]);
                assert!(
                    (lhs - f[k]).abs() <= 1e-6 * f[k].abs(),
                    "rescale={rescale} item {k}"
                );
            }
        }
    }

    #[test]
    fn rescaled_and_plain_solves_agree_pointwise() {
        let (plain, positions, _) = corpus_solution(false);
        let (scaled, _, _) = corpus_solution(true);
        for p in &positions {
            let a = evaluate_phase(&plain.coeffs, p[0], p[1]);
            let b = evaluate_phase(&scaled.coeffs, p[0], p[1]);
            assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn zero_targets_give_zero_field() {
        let cfg = corpus::table2();
        let sol = build_phase_field(
            &cfg.packet_a,
            &cfg.packet_b,
            &cfg.positions.unwrap(),
            0.1,
            &[0.0; 24],
            false,
        )
        .unwrap();
        assert!(sol.coeffs.iter().all(|c| *c == 0.0));
    }

    #[test]
    fn permutation_leaves_point_values() {
        let cfg = corpus::table2();
        let (sol, positions, f) = corpus_solution(false);
        let mut order: Vec<usize> = (0..24).collect();
        order.reverse();
        order.swap(3, 17);
        let pos2: Vec<[f64; 2]> = order.iter().map(|&i| positions[i]).collect();
        let f2: Vec<f64> = order.iter().map(|&i| f[i]).collect();
        let sol2 = build_phase_field(&cfg.packet_a, &cfg.packet_b, &pos2, 0.1, &f2, false).unwrap();
        for (j, &i) in order.iter().enumerate() {
            let a = sol.theta_at_points[i];
            let b = sol2.theta_at_points[j];
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-12));
        }
    }

    #[test]
    fn phase_field_errors() {
        let cfg = corpus::table2();
        let mut positions = cfg.positions.unwrap();
        let f = interference_targets(&corpus::hampton());
        assert!(matches!(
            build_phase_field(
                &cfg.packet_a,
                &cfg.packet_b,
                &positions[..23],
                0.1,
                &f[..23],
                false
            ),
            Err(WaveError::ItemCount { .. })
        ));
        positions[5] = positions[4];
        assert_eq!(
            build_phase_field(&cfg.packet_a, &cfg.packet_b, &positions, 0.1, &f, false)
                .unwrap_err(),
            WaveError::DuplicatePosition(4, 5)
        );
        // all points on one line: the monomial system is singular
        let line: Vec<[f64; 2]> = (0..24).map(|i| [i as f64 * 0.1, 0.0]).collect();
        assert!(matches!(
            build_phase_field(&cfg.packet_a, &cfg.packet_b, &line, 0.1, &f, false),
            Err(WaveError::Solver(_))
        ));
    }

    fn corpus_spec() -> WaveFieldSpec {
        let cfg = corpus::table2();
        let (sol, positions, _) = corpus_solution(false);
        WaveFieldSpec {
            packet_a: cfg.packet_a,
            packet_b: cfg.packet_b,
            positions,
            delta: 0.1,
            phase_coeffs: sol.coeffs,
        }
    }

    #[test]
    fn rendering_peaks_and_limits() {
        let spec = corpus_spec();
        // odd grid centred on packet A so a pixel centre lands on it
        let grid = Grid {
            width: 41,
            height: 41,
            extent: [-4.1, -4.1, 4.1, 4.1],
        };
        let r = render_intensity(&spec, Density::A, &grid).unwrap();
        let (imax, _) =
            r.values.iter().enumerate().fold(
                (0, f64::MIN),
                |b, (i, v)| if *v > b.1 { (i, *v) } else { b },
            );
        assert_eq!((imax % 41, imax / 41), (20, 20));

        let same = WaveFieldSpec {
            packet_b: spec.packet_a,
            phase_coeffs: [0.0; N_COEFFS],
            ..spec.clone()
        };
        let a = render_intensity(&same, Density::A, &grid).unwrap();
        let both = render_intensity(&same, Density::AorB, &grid).unwrap();
        for (x, y) in a.values.iter().zip(&both.values) {
            assert!((y - 2.0 * x).abs() <= 1e-15 * x.max(1.0));
        }
    }

    #[test]
    fn disjunction_decomposes() {
        let spec = corpus_spec();
        let grid = Grid {
            width: 64,
            height: 48,
            extent: [-10.0, -4.0, 14.0, 10.0],
        };
        let a = render_intensity(&spec, Density::A, &grid).unwrap();
        let b = render_intensity(&spec, Density::B, &grid).unwrap();
        let ab = render_intensity(&spec, Density::AorB, &grid).unwrap();
        for row in 0..grid.height {
            for col in 0..grid.width {
                let (x, y) = grid.pixel_center(col, row);
                let cross = (a.get(col, row) * b.get(col, row)).sqrt() * spec.phase(x, y).cos();
                assert!(
                    (ab.get(col, row) - 0.5 * (a.get(col, row) + b.get(col, row)) - cross).abs()
                        <= 1e-12
                );
            }
        }
    }

    #[test]
    fn fringes_between_centres() {
        let spec = corpus_spec();
        let (a, b) = (spec.packet_a.center, spec.packet_b.center);
        let mut changes = 0;
        let mut prev = spec.phase(a[0], a[1]).cos();
        for i in 1..=2000 {
            let t = i as f64 / 2000.0;
            let c = spec
                .phase(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
                .cos();
            if c * prev < 0.0 {
                changes += 1;
            }
            prev = c;
        }
        assert!(changes >= 4, "only {changes} sign changes");
    }

    #[test]
    fn rendering_is_deterministic() {
        let spec = corpus_spec();
        let grid = Grid {
            width: 33,
            height: 17,
            extent: [-10.0, -4.0, 14.0, 10.0],
        };
        let r1 = render_intensity(&spec, Density::AorB, &grid).unwrap();
        let r2 = render_intensity(&spec, Density::AorB, &grid).unwrap();
        assert_eq!(r1.to_pgm(), r2.to_pgm());
        assert!(r1
            .values
            .iter()
            .zip(&r2.values)
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn grid_errors_and_single_pixel() {
        let spec = corpus_spec();
        let flat = Grid {
            width: 4,
            height: 4,
            extent: [0.0, 0.0, 1.0, 0.0],
        };
        assert_eq!(
            render_intensity(&spec, Density::A, &flat).unwrap_err(),
            WaveError::InvalidGrid
        );
        let empty = Grid {
            width: 0,
            height: 4,
            extent: [0.0, 0.0, 1.0, 1.0],
        };
        assert_eq!(
            render_intensity(&spec, Density::A, &empty).unwrap_err(),
            WaveError::InvalidGrid
        );
        let one = Grid {
            width: 1,
            height: 1,
            extent: [-1.0, -1.0, 1.0, 1.0],
        };
        let r = render_intensity(&spec, Density::A, &one).unwrap();
        let pgm = r.to_pgm();
        assert_eq!(pgm, b"P5\n1 1\n255\n\0".to_vec());
        assert_eq!(r.to_csv(), "1.18412\n");
    }

    #[test]
    fn pgm_stretch() {
        let r = Raster {
            grid: Grid {
                width: 3,
                height: 1,
                extent: [0.0, 0.0, 1.0, 1.0],
            },
            values: vec![-1.0, 0.5, 1.0],
        };
        assert_eq!(&r.to_pgm()[r.to_pgm().len() - 3..], &[0, 128, 255]);
        assert_eq!(r.to_csv(), "-1,0.5,1\n");
    }

    #[test]
    fn config_parsing() {
        let cfg = corpus::table2();
        assert_eq!(cfg.delta, Some(DEFAULT_DELTA));
        assert_eq!(cfg.positions.as_ref().unwrap().len(), 24);
        assert_eq!(cfg.published_phase_coeffs.as_ref().unwrap()[0], 87.6039);
        let back = WaveFieldConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert!(matches!(
            WaveFieldConfig::from_json("{}"),
            Err(WaveError::Spec(_))
        ));
        let bad = cfg.to_json().replace("1.18412", "-1.0");
        assert_eq!(
            WaveFieldConfig::from_json(&bad).unwrap_err(),
            WaveError::InvalidPacket
        );
    }
}
