//! Drawing generation for the `art` subcommand: procedure dispatch, mask
//! parsing, and the sidecar encoding report.

use curio_core::art::{apply_mask, encoding_report, face_grid, fractal_circles, Drawing, EncodingReport};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArtCmdError {
    #[error("mask character {index} is '{found}', expected '0' or '1'")]
    BadMaskChar { index: usize, found: char },
    #[error(transparent)]
    Mask(#[from] curio_core::art::ArtError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Procedure {
    FaceGrid,
    FractalCircles,
}

pub fn build_drawing(procedure: Procedure, depth: u32) -> Drawing {
    match procedure {
        Procedure::FaceGrid => face_grid(depth),
        Procedure::FractalCircles => fractal_circles(depth),
    }
}

/// Masks are text files of '0' (drop) and '1' (keep), one per primitive in
/// generation order; whitespace is ignored so masks can be wrapped.
pub fn parse_mask(text: &str) -> Result<Vec<bool>, ArtCmdError> {
    let mut keep = Vec::new();
    for (index, c) in text.chars().filter(|c| !c.is_whitespace()).enumerate() {
        match c {
            '0' => keep.push(false),
            '1' => keep.push(true),
            found => return Err(ArtCmdError::BadMaskChar { index, found }),
        }
    }
    Ok(keep)
}

pub fn masked(drawing: &Drawing, mask_text: &str) -> Result<Drawing, ArtCmdError> {
    let keep = parse_mask(mask_text)?;
    Ok(apply_mask(drawing, &keep)?)
}

/// What the sidecar JSON holds alongside the SVG.
#[derive(Debug, Serialize)]
pub struct SidecarReport {
    pub procedure: String,
    pub depth: u32,
    pub masked: bool,
    pub primitives: usize,
    #[serde(flatten)]
    pub encoding: EncodingReport,
}

pub fn sidecar(procedure: Procedure, depth: u32, was_masked: bool, drawing: &Drawing) -> String {
    let name = match procedure {
        Procedure::FaceGrid => "face_grid",
        Procedure::FractalCircles => "fractal_circles",
    };
    let report = SidecarReport {
        procedure: name.to_string(),
        depth,
        masked: was_masked,
        primitives: drawing.primitives.len(),
        encoding: encoding_report(drawing),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    text
}
