use crate::GlobalOpts;
use concept_interference::format::to_rounded_json;
use concept_interference::hilbert::{self, ModelError, ModelReport};
use concept_interference::ingest::{
    parse_probability_table, validate_normalization, Column, ConceptPairData, IngestError,
    ParseOptions, TableFormat,
};
use concept_interference::predict::{parse_records_csv, PredictError, PredictionReport};
use concept_interference::wavefield::{
    build_phase_field, fit_item_positions, interference_targets, render_intensity, Density, Grid,
    PhaseSolution, WaveError, WaveFieldConfig, WaveFieldSpec, DEFAULT_DELTA, N_COEFFS,
};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

const DEFAULT_GRID: Grid = Grid {
    width: 512,
    height: 512,
    extent: [-10.0, -4.0, 14.0, 10.0],
};
const RASTER_STEM: &str = "intensity";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Ingest { path: PathBuf, source: IngestError },
    #[error("{path}: {source}")]
    Predict { path: PathBuf, source: PredictError },
    #[error("{path}: {source}")]
    SpecParse { path: PathBuf, source: WaveError },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error("{count} violation(s); first: {first}")]
    Validation { count: usize, first: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. }
            | CliError::Ingest { .. }
            | CliError::Predict { .. }
            | CliError::SpecParse { .. } => 1,
            CliError::Model(_) | CliError::Wave(_) | CliError::Validation { .. } => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn load_table(g: &GlobalOpts, path: &Path) -> Result<ConceptPairData, CliError> {
    let text = read(path)?;
    parse_probability_table(
        &text,
        TableFormat::from_path(path),
        ParseOptions {
            renormalize: !g.no_renormalize,
        },
    )
    .map_err(|source| CliError::Ingest {
        path: path.into(),
        source,
    })
}

pub fn model(g: &GlobalOpts, input: &Path, out: &Path) -> Result<(), CliError> {
    let data = load_table(g, input)?;
    let model = hilbert::build_state_vectors_with_tol(&data, g.tol)?;
    let report = ModelReport::from_model(&model);
    create_dir(out)?;
    write(&out.join("report.json"), report.to_json())?;
    write(&out.join("report.txt"), report.to_text())?;
    write(&out.join("vectors.csv"), hilbert::vectors_csv(&model))?;
    println!(
        "{} items; S = {}; c_m = {} ({}); wrote {}",
        model.n_items(),
        concept_interference::format::fmt_sig(report.s_residual),
        concept_interference::format::fmt_sig(report.c_m),
        report.m_label,
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct PhaseReport<'a> {
    delta: f64,
    rescaled: bool,
    positions: &'a [[f64; 2]],
    positions_fitted: bool,
    interference_targets: &'a [f64],
    rendered_with_spec_coeffs: bool,
    grid: Grid,
    solution: &'a PhaseSolution,
}

pub fn wavefield(
    g: &GlobalOpts,
    spec_path: &Path,
    data_path: &Path,
    out: &Path,
) -> Result<(), CliError> {
    let cfg =
        WaveFieldConfig::from_json(&read(spec_path)?).map_err(|source| CliError::SpecParse {
            path: spec_path.into(),
            source,
        })?;
    let data = load_table(g, data_path)?;
    let delta = g.delta.or(cfg.delta).unwrap_or(DEFAULT_DELTA);

    let (positions, positions_fitted) = match &cfg.positions {
        Some(p) if p.len() == data.len() => (p.clone(), false),
        Some(p) => {
            return Err(WaveError::ItemCount {
                expected: data.len(),
                got: p.len(),
            }
            .into())
        }
        None => (
            fit_item_positions(&data, &cfg.packet_a, &cfg.packet_b, delta, None)?,
            true,
        ),
    };
    let targets = interference_targets(&data);
    let solution = build_phase_field(
        &cfg.packet_a,
        &cfg.packet_b,
        &positions,
        delta,
        &targets,
        g.rescale_coords,
    )?;

    let phase_coeffs = match &cfg.phase_coeffs {
        Some(c) => {
            let mut arr = [0.0; N_COEFFS];
            arr.copy_from_slice(c);
            arr
        }
        None => solution.coeffs,
    };

    let mut grid = cfg.grid.unwrap_or(DEFAULT_GRID);
    if let Some((w, h)) = g.grid {
        grid.width = w;
        grid.height = h;
    }
    if let Some(extent) = g.extent {
        grid.extent = extent;
    }
    grid.validate()?;

    let spec = WaveFieldSpec {
        packet_a: cfg.packet_a,
        packet_b: cfg.packet_b,
        positions: positions.clone(),
        delta,
        phase_coeffs,
    };
    let rasters = Density::ALL
        .iter()
        .map(|d| render_intensity(&spec, *d, &grid).map(|r| (*d, r)))
        .collect::<Result<Vec<_>, _>>()?;

    create_dir(out)?;
    for (density, raster) in &rasters {
        let stem = format!("{RASTER_STEM}_{}", density.suffix());
        write(&out.join(format!("{stem}.pgm")), raster.to_pgm())?;
        write(&out.join(format!("{stem}.csv")), raster.to_csv())?;
    }
    let report = PhaseReport {
        delta,
        rescaled: g.rescale_coords,
        positions: &positions,
        positions_fitted,
        interference_targets: &targets,
        rendered_with_spec_coeffs: cfg.phase_coeffs.is_some(),
        grid,
        solution: &solution,
    };
    write(&out.join("phase_solution.json"), to_rounded_json(&report))?;
    println!(
        "{}x{} rasters; max relative residual {}; wrote {}",
        grid.width,
        grid.height,
        concept_interference::format::fmt_sig(solution.max_relative_residual),
        out.display()
    );
    Ok(())
}

pub fn predict(g: &GlobalOpts, input: &Path, out: &Path) -> Result<(), CliError> {
    let records = parse_records_csv(&read(input)?).map_err(|source| CliError::Predict {
        path: input.into(),
        source,
    })?;
    let report = PredictionReport::evaluate(&records, g.quantum_constant);
    create_dir(out)?;
    write(&out.join("predictions.json"), report.to_json())?;
    let flagged = report
        .records
        .iter()
        .filter(|r| r.quantum.out_of_range || r.classical.out_of_range)
        .count();
    println!(
        "{} records; {} with out-of-range predictions; wrote {}",
        report.records.len(),
        flagged,
        out.display()
    );
    Ok(())
}

pub fn validate(g: &GlobalOpts, input: &Path) -> Result<(), CliError> {
    let data = load_table(g, input)?;
    let violations = validate_normalization(&data, g.tol);
    for column in Column::ALL {
        println!(
            "{} sum = {}",
            column.name(),
            concept_interference::format::fmt_sig(data.column_sum(column))
        );
    }
    for v in &violations {
        println!("violation: {v}");
    }
    match violations.first() {
        None => {
            println!("ok: {} items", data.len());
            Ok(())
        }
        Some(first) => Err(CliError::Validation {
            count: violations.len(),
            first: first.to_string(),
        }),
    }
}
