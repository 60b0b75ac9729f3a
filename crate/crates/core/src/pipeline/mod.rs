//! File formats, bundled fixtures and the batch operations behind the CLI.

mod annotation;
mod features;
pub mod fixtures;
pub mod report;

use thiserror::Error;

pub use annotation::{
    document_json, emit_annotations, parse_annotations, AnnotationDocument, ParseError,
    FORMAT_VERSION,
};
pub use features::{FeatureRow, FeatureTable, FeatureTableError};

use crate::classify::{self, ClassifyError, LoocvReport, Trainer};
use crate::gait::{self, FeatureError, Foot, GaitConfig, GaitError, Stance};
use crate::geometry::{self, GeometryError, Homography, Point2};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("document has landmark frames but no laneCalibration")]
    MissingLaneCalibration,
    #[error("lane calibration: {0}")]
    LaneCalibration(#[from] GeometryError),
    #[error(transparent)]
    Table(#[from] FeatureTableError),
}

/// Result of a batch extraction. Persons whose features could not be
/// computed are listed in `skipped`, not dropped silently.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractOutcome {
    pub table: FeatureTable,
    pub skipped: Vec<FeatureError>,
    pub warnings: Vec<String>,
}

fn lane_homography(doc: &AnnotationDocument) -> Result<Option<Homography>, PipelineError> {
    match &doc.lane_calibration {
        Some(lanes) => Ok(Some(geometry::top_view_homography(lanes)?)),
        None if doc.sequences.iter().any(|s| s.has_landmarks()) => {
            Err(PipelineError::MissingLaneCalibration)
        }
        None => Ok(None),
    }
}

/// Extracts `(L, H)` for every sequence with landmark frames.
///
/// The top view is computed once from the lane calibration before any
/// per-person work. Rows are ordered by person id.
pub fn run_extract(
    doc: &AnnotationDocument,
    config: &GaitConfig,
) -> Result<ExtractOutcome, PipelineError> {
    let h_top = lane_homography(doc)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut warnings = Vec::new();
    if doc.sequences.is_empty() {
        warnings.push("document has no sequences; feature table is empty".to_owned());
    }
    let mut walks: Vec<_> = doc.sequences.iter().collect();
    walks.sort_by_key(|w| w.person_id);
    for walk in walks {
        let result = match &h_top {
            Some(h) if walk.has_landmarks() => gait::extract_features(walk, h, config),
            _ => Err(FeatureError {
                person_id: walk.person_id,
                source: GaitError::MissingLandmarks,
            }),
        };
        match result {
            Ok(f) => {
                if let Some(steps) = walk.steps_before_obstacle {
                    if steps as usize != f.stride_count {
                        warnings.push(format!(
                            "person {}: {} footfall gap(s) found, annotation says {} step(s) before the obstacle",
                            walk.person_id, f.stride_count, steps
                        ));
                    }
                }
                rows.push(FeatureRow::from_features(walk.person_id, walk.outcome, &f));
            }
            Err(e) => skipped.push(e),
        }
    }
    Ok(ExtractOutcome {
        table: FeatureTable::new(rows)?,
        skipped,
        warnings,
    })
}

/// Leave-one-out evaluation of `trainer` on a feature table.
pub fn run_classify(table: &FeatureTable, trainer: &Trainer) -> Result<LoocvReport, ClassifyError> {
    classify::loocv(&table.samples(), trainer)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootfallRecord {
    pub person_id: u32,
    pub stance: Stance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadRecord {
    pub person_id: u32,
    pub frame: u32,
    /// Smoothed head position in the walk's side view.
    pub point: Point2,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RectifiedTracks {
    pub footfalls: Vec<FootfallRecord>,
    pub head: Vec<HeadRecord>,
    pub skipped: Vec<FeatureError>,
}

/// Rectified footfalls (top view) and head tracks (side view) per person.
pub fn run_rectify(
    doc: &AnnotationDocument,
    config: &GaitConfig,
) -> Result<RectifiedTracks, PipelineError> {
    let h_top = lane_homography(doc)?;
    let mut out = RectifiedTracks::default();
    let mut walks: Vec<_> = doc.sequences.iter().collect();
    walks.sort_by_key(|w| w.person_id);
    for walk in walks {
        let tag = |source: GaitError| FeatureError {
            person_id: walk.person_id,
            source,
        };
        let h_top = match &h_top {
            Some(h) if walk.has_landmarks() => h,
            _ => {
                out.skipped.push(tag(GaitError::MissingLandmarks));
                continue;
            }
        };
        let tracks = gait::extract_stances(walk, h_top).and_then(|stances| {
            let h_side = gait::side_view_for(walk)?;
            Ok((
                stances,
                gait::rectified_head_track(walk, &h_side, config.sigma)?,
            ))
        });
        match tracks {
            Ok((stances, head)) => {
                out.footfalls
                    .extend(stances.into_iter().map(|stance| FootfallRecord {
                        person_id: walk.person_id,
                        stance,
                    }));
                out.head
                    .extend(head.into_iter().map(|(frame, point)| HeadRecord {
                        person_id: walk.person_id,
                        frame,
                        point,
                    }));
            }
            Err(e) => out.skipped.push(tag(e)),
        }
    }
    Ok(out)
}

impl RectifiedTracks {
    /// `personId,foot,firstFrame,lastFrame,x,y`
    pub fn footfalls_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["personId", "foot", "firstFrame", "lastFrame", "x", "y"])
            .expect("in-memory write");
        for r in &self.footfalls {
            let foot = match r.stance.foot {
                Foot::Left => "left",
                Foot::Right => "right",
            };
            w.write_record([
                r.person_id.to_string(),
                foot.to_owned(),
                r.stance.first_frame.to_string(),
                r.stance.last_frame.to_string(),
                r.stance.footfall.x.to_string(),
                r.stance.footfall.y.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8")
    }

    /// `personId,frame,x,y`
    pub fn head_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["personId", "frame", "x", "y"])
            .expect("in-memory write");
        for r in &self.head {
            w.write_record([
                r.person_id.to_string(),
                r.frame.to_string(),
                r.point.x.to_string(),
                r.point.y.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8")
    }
}
