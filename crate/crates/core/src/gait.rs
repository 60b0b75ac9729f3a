//! Gait features from an annotated walk: average stride length `L` on the
//! rectified ground plane and range of vertical head motion `H` in the
//! person's side view.

use std::fmt;

use thiserror::Error;

use crate::geometry::{self, GeometryError, Homography, Point2, SideViewQuad};
use crate::signal::{self, Series1D, SignalError, DEFAULT_SIGMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::LeftToRight => "left-to-right",
            Direction::RightToLeft => "right-to-left",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "left-to-right" => Some(Direction::LeftToRight),
            "right-to-left" => Some(Direction::RightToLeft),
            _ => None,
        }
    }
}

/// Whether the person fell at the obstacle. `Fall` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Fall,
    NoFall,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Fall => "Fall",
            Outcome::NoFall => "NoFall",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Fall" => Some(Outcome::Fall),
            "NoFall" => Some(Outcome::NoFall),
            _ => None,
        }
    }

    /// +1 for a fall, -1 otherwise.
    pub fn sign(&self) -> f64 {
        match self {
            Outcome::Fall => 1.0,
            Outcome::NoFall => -1.0,
        }
    }

    pub fn is_fall(&self) -> bool {
        matches!(self, Outcome::Fall)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Foot {
    Left,
    Right,
}

/// Landmarks marked on one video frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameLandmarks {
    pub frame: u32,
    pub head: Point2,
    pub left_foot: Point2,
    pub right_foot: Point2,
    pub left_contact: bool,
    pub right_contact: bool,
}

impl FrameLandmarks {
    pub fn foot(&self, foot: Foot) -> Point2 {
        match foot {
            Foot::Left => self.left_foot,
            Foot::Right => self.right_foot,
        }
    }

    pub fn contact(&self, foot: Foot) -> bool {
        match foot {
            Foot::Left => self.left_contact,
            Foot::Right => self.right_contact,
        }
    }

    pub fn feet_mean(&self) -> Point2 {
        self.left_foot.midpoint(&self.right_foot)
    }
}

/// One person's annotated approach to the obstacle.
///
/// `frames` is either empty (metadata only) or covers
/// `start_frame..=end_frame` contiguously. `obstacle_frame` may be
/// `end_frame + 1` when every annotated frame precedes the obstacle.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSequence {
    pub person_id: u32,
    pub start_frame: u32,
    pub end_frame: u32,
    pub obstacle_frame: u32,
    pub direction: Direction,
    pub outcome: Outcome,
    pub steps_before_obstacle: Option<u32>,
    pub frames: Vec<FrameLandmarks>,
}

impl WalkSequence {
    /// Checks the structural invariants; the message names the offending field.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.start_frame > self.end_frame {
            return Err(format!(
                "startFrame {} is after endFrame {}",
                self.start_frame, self.end_frame
            ));
        }
        if self.obstacle_frame < self.start_frame
            || u64::from(self.obstacle_frame) > u64::from(self.end_frame) + 1
        {
            return Err(format!(
                "obstacleFrame {} outside [{}, {}]",
                self.obstacle_frame,
                self.start_frame,
                u64::from(self.end_frame) + 1
            ));
        }
        if self.frames.is_empty() {
            return Ok(());
        }
        let expected = (self.end_frame - self.start_frame) as usize + 1;
        for (i, f) in self.frames.iter().enumerate() {
            let want = self.start_frame as u64 + i as u64;
            if u64::from(f.frame) != want {
                return Err(format!(
                    "frames must cover {}..={} contiguously; entry {} has frame {} (expected {})",
                    self.start_frame, self.end_frame, i, f.frame, want
                ));
            }
            if !(f.head.is_finite() && f.left_foot.is_finite() && f.right_foot.is_finite()) {
                return Err(format!("frame {} has a non-finite coordinate", f.frame));
            }
        }
        if self.frames.len() != expected {
            return Err(format!(
                "frames must cover {}..={} contiguously; got {} of {} frames",
                self.start_frame,
                self.end_frame,
                self.frames.len(),
                expected
            ));
        }
        Ok(())
    }

    pub fn has_landmarks(&self) -> bool {
        !self.frames.is_empty()
    }

    /// Frames strictly before the obstacle.
    pub fn approach_frames(&self) -> &[FrameLandmarks] {
        let n = self
            .frames
            .iter()
            .take_while(|f| f.frame < self.obstacle_frame)
            .count();
        &self.frames[..n]
    }

    /// Head/feet quadrilateral at the first and last annotated frame.
    pub fn side_view_quad(&self) -> Option<SideViewQuad> {
        let first = self.frames.first()?;
        let last = self.frames.last()?;
        Some(SideViewQuad {
            head_start: first.head,
            head_end: last.head,
            feet_start: first.feet_mean(),
            feet_end: last.feet_mean(),
        })
    }
}

/// One maximal run of ground contact of one foot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stance {
    pub foot: Foot,
    pub first_frame: u32,
    pub last_frame: u32,
    /// Median rectified top-view position over the run.
    pub footfall: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitFeatures {
    /// Average distance between successive footfalls, rectified top-view units.
    pub stride_length: f64,
    /// Range of vertical head motion, percent of body height.
    pub head_range: f64,
    /// Number of footfall gaps averaged into `stride_length`.
    pub stride_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitConfig {
    /// Gaussian width for head smoothing, in frames.
    pub sigma: f64,
}

impl Default for GaitConfig {
    fn default() -> Self {
        Self {
            sigma: DEFAULT_SIGMA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaitError {
    #[error("sequence has no landmark frames")]
    MissingLandmarks,
    #[error("no ground contact before the obstacle")]
    NoStancesFound,
    #[error("only {found} stance(s) before the obstacle; need at least 2")]
    InsufficientStances { found: usize },
    #[error("only {found} frame(s) before the obstacle; need at least 2")]
    InsufficientFrames { found: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// A [`GaitError`] tagged with the person it occurred for.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("person {person_id}: {source}")]
pub struct FeatureError {
    pub person_id: u32,
    #[source]
    pub source: GaitError,
}

/// Groups contact frames into stances and locates each footfall on the
/// rectified ground plane (rectify every contact frame, then take the
/// component-wise median).
///
/// A stance belongs to the approach iff it begins before `obstacle_frame`.
/// Output is ordered by first frame, left before right on ties.
pub fn extract_stances(walk: &WalkSequence, h_top: &Homography) -> Result<Vec<Stance>, GaitError> {
    if walk.frames.is_empty() {
        return Err(GaitError::MissingLandmarks);
    }
    let mut stances = Vec::new();
    for foot in [Foot::Left, Foot::Right] {
        let mut i = 0;
        let frames = &walk.frames;
        while i < frames.len() {
            if !frames[i].contact(foot) {
                i += 1;
                continue;
            }
            let start = i;
            while i < frames.len() && frames[i].contact(foot) {
                i += 1;
            }
            let run = &frames[start..i];
            if run[0].frame >= walk.obstacle_frame {
                continue;
            }
            let rectified = run
                .iter()
                .map(|f| h_top.apply(f.foot(foot)))
                .collect::<Result<Vec<_>, _>>()?;
            stances.push(Stance {
                foot,
                first_frame: run[0].frame,
                last_frame: run[run.len() - 1].frame,
                footfall: signal::stance_median(&rectified)?,
            });
        }
    }
    if stances.is_empty() {
        return Err(GaitError::NoStancesFound);
    }
    stances.sort_by_key(|s| (s.first_frame, s.foot));
    Ok(stances)
}

/// Mean Euclidean distance between chronologically successive footfalls,
/// regardless of foot, and the number of gaps averaged.
pub fn average_stride_length(stances: &[Stance]) -> Result<(f64, usize), GaitError> {
    if stances.len() < 2 {
        return Err(GaitError::InsufficientStances {
            found: stances.len(),
        });
    }
    let gaps = stances.len() - 1;
    let total: f64 = stances
        .windows(2)
        .map(|w| w[0].footfall.distance(&w[1].footfall))
        .sum();
    Ok((total / gaps as f64, gaps))
}

/// Head track over the approach: smoothed in image coordinates, then
/// mapped through `h_side`. Returns `(frame, rectified point)` pairs.
pub fn rectified_head_track(
    walk: &WalkSequence,
    h_side: &Homography,
    sigma: f64,
) -> Result<Vec<(u32, Point2)>, GaitError> {
    let frames = walk.approach_frames();
    if frames.len() < 2 {
        return Err(GaitError::InsufficientFrames {
            found: frames.len(),
        });
    }
    let offset = i64::from(frames[0].frame);
    let xs = Series1D::new(frames.iter().map(|f| f.head.x).collect(), offset)?;
    let ys = Series1D::new(frames.iter().map(|f| f.head.y).collect(), offset)?;
    let xs = signal::gaussian_smooth(&xs, sigma)?;
    let ys = signal::gaussian_smooth(&ys, sigma)?;
    frames
        .iter()
        .zip(xs.values().iter().zip(ys.values()))
        .map(|(f, (&x, &y))| Ok((f.frame, h_side.apply(Point2::new(x, y))?)))
        .collect()
}

/// Range of the rectified vertical head coordinate over the approach.
///
/// The raw head track is smoothed in image coordinates first, then each
/// smoothed point is mapped through `h_side`. With the side view spanning
/// 100 units head-to-feet, the result is in percent of body height.
pub fn head_motion_range(
    walk: &WalkSequence,
    h_side: &Homography,
    sigma: f64,
) -> Result<f64, GaitError> {
    let track = rectified_head_track(walk, h_side, sigma)?;
    let (lo, hi) = track
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, p)| {
            (lo.min(p.y), hi.max(p.y))
        });
    Ok(hi - lo)
}

/// Side-view rectification for one walk, from its first and last frame.
pub fn side_view_for(walk: &WalkSequence) -> Result<Homography, GaitError> {
    let quad = walk.side_view_quad().ok_or(GaitError::MissingLandmarks)?;
    Ok(geometry::side_view_homography(&quad)?)
}

/// Both features for one walk. `h_top` is shared across the video; the side
/// view is built from this walk's first and last frame.
pub fn extract_features(
    walk: &WalkSequence,
    h_top: &Homography,
    config: &GaitConfig,
) -> Result<GaitFeatures, FeatureError> {
    let tag = |source: GaitError| FeatureError {
        person_id: walk.person_id,
        source,
    };
    let stances = extract_stances(walk, h_top).map_err(tag)?;
    let (stride_length, stride_count) = average_stride_length(&stances).map_err(tag)?;
    let h_side = side_view_for(walk).map_err(tag)?;
    let head_range = head_motion_range(walk, &h_side, config.sigma).map_err(tag)?;
    Ok(GaitFeatures {
        stride_length,
        head_range,
        stride_count,
    })
}
