//! Bundled Fruits/Vegetables corpus and the published reference values used
//! by the regression tests.

use crate::ingest::{parse_probability_table, ConceptPairData, ParseOptions, TableFormat};
use crate::wavefield::WaveFieldConfig;

/// Hampton's Fruits (A) / Vegetables (B) collapse probabilities, 24 items.
pub const HAMPTON_CSV: &str = include_str!("../../../data/hampton_fruits_vegetables.csv");

/// Gaussian packets, item positions and printed phase coefficients of the
/// wave-field illustration.
pub const TABLE2_JSON: &str = include_str!("../../../data/table2_wavefield.json");

/// Corpus as printed (columns sum to 1 ± 1e-4).
pub fn hampton_raw() -> ConceptPairData {
    let mut d = parse_probability_table(
        HAMPTON_CSV,
        TableFormat::Csv,
        ParseOptions { renormalize: false },
    )
    .expect("bundled corpus parses");
    d.concept_a_label = "Fruits".into();
    d.concept_b_label = "Vegetables".into();
    d
}

/// Corpus with each column renormalized to sum to one.
pub fn hampton() -> ConceptPairData {
    hampton_raw().renormalized()
}

pub fn table2() -> WaveFieldConfig {
    WaveFieldConfig::from_json(TABLE2_JSON).expect("bundled wave-field spec parses")
}

/// Published per-item columns, in corpus order.
pub mod published {
    /// λ_k as printed.
    pub const LAMBDA: [f64; 24] = [
        0.0217, 0.0214, 0.0285, 0.0397, 0.0260, 0.0415, 0.0404, 0.0428, 0.0186, 0.0184, 0.0172,
        0.0272, 0.0146, 0.0087, 0.0253, 0.0252, 0.0503, 0.0615, 0.0768, 0.0733, 0.0423, 0.0238,
        0.0178, 0.01929,
    ];

    /// 1-based λ rank (descending).
    pub const LAMBDA_RANK: [usize; 24] = [
        16, 17, 10, 9, 12, 7, 8, 5, 19, 20, 22, 11, 23, 24, 13, 14, 4, 3, 1, 2, 6, 15, 21, 18,
    ];

    pub const EPSILON: [i8; 24] = [
        1, -1, -1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, 1, -1, 1, 1, -1, -1, -1, -1, 1,
    ];

    /// Signed phases in degrees.
    pub const PHASE_DEG: [f64; 24] = [
        84.0, -94.5, -95.4, 91.9, 57.7, 95.9, -113.3, 87.6, -105.9, 99.3, 49.9, -86.4, -57.6, 18.5,
        -69.1, 104.7, -95.7, 98.1, 98.5, -103.5, -99.5, -96.7, -61.1, 86.7,
    ];

    pub const S_RESIDUAL: f64 = 0.0154;
    pub const C_M: f64 = 0.8032;
    pub const LAMBDA_MAX: f64 = 0.07679;
    /// 0-based position of Tomato.
    pub const M_INDEX: usize = 18;

    /// Printed |A⟩ in ℂ²⁵ (all entries real).
    pub const VECTOR_A: [f64; 25] = [
        0.1895, 0.2062, 0.1929, 0.2421, 0.2748, 0.3203, 0.3373, 0.3441, 0.1221, 0.1166, 0.1253,
        0.1292, 0.1000, 0.1183, 0.1058, 0.0975, 0.1800, 0.2309, 0.2968, 0.2823, 0.1196, 0.1183,
        0.1245, 0.1127, 0.0000,
    ];

    /// Printed |B⟩ magnitudes; entry 25 is the extra real coordinate.
    pub const VECTOR_B_ABS: [f64; 25] = [
        0.1153, 0.1039, 0.1483, 0.1640, 0.1118, 0.1304, 0.1304, 0.1245, 0.1581, 0.1597, 0.1797,
        0.2112, 0.1735, 0.2335, 0.2565, 0.2670, 0.2807, 0.2691, 0.2606, 0.2670, 0.3583, 0.2030,
        0.1631, 0.1715, 0.1552,
    ];

    /// Printed |B⟩ phases in degrees (entry 25 is real).
    pub const VECTOR_B_PHASE_DEG: [f64; 25] = [
        84.0, -94.5, -95.4, 91.9, 57.7, 95.9, -113.3, 87.6, -105.9, 99.3, 49.9, -86.4, -57.6, 18.5,
        -69.1, 104.7, -95.7, 98.0, 96.8, -103.5, -99.5, -96.7, -61.1, 86.7, 0.0,
    ];
}
