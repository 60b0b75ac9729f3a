//! Annotation document: JSON text carrying video metadata, the lane
//! calibration and every annotated walk.
//!
//! ```text
//! {
//!   "formatVersion": 1,
//!   "videoId": "clip-01",
//!   "frameRate": 25.0,
//!   "laneCalibration": {                      // optional
//!     "lineA": [{"x": 10.0, "y": 400.0}, {"x": 220.0, "y": 100.0}],
//!     "lineB": [{"x": 500.0, "y": 400.0}, {"x": 300.0, "y": 100.0}]
//!   },
//!   "sequences": [
//!     {
//!       "personId": 1,
//!       "startFrame": 1,
//!       "endFrame": 54,
//!       "obstacleFrame": 55,
//!       "direction": "right-to-left",          // or "left-to-right"
//!       "outcome": "Fall",                     // or "NoFall"
//!       "stepsBeforeObstacle": 2,              // optional
//!       "frames": [                            // optional; if present covers
//!         {                                    // startFrame..=endFrame
//!           "frame": 1,
//!           "head": {"x": 0.0, "y": 0.0},
//!           "leftFoot": {"x": 0.0, "y": 0.0},
//!           "rightFoot": {"x": 0.0, "y": 0.0},
//!           "leftContact": true,
//!           "rightContact": false
//!         }
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! Unknown fields are rejected. Diagnostics carry line/column for syntax
//! errors and a field path (with the frame number inside `frames`) for
//! schema and invariant errors.

use std::collections::HashSet;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::gait::{Direction, FrameLandmarks, Outcome, WalkSequence};
use crate::geometry::{LanePair, Point2};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationDocument {
    pub video_id: String,
    pub frame_rate: f64,
    pub lane_calibration: Option<LanePair>,
    pub sequences: Vec<WalkSequence>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {message}")]
    InvariantViolation { path: String, message: String },
}

impl ParseError {
    pub fn path(&self) -> Option<&str> {
        match self {
            ParseError::Syntax { .. } => None,
            ParseError::Schema { path, .. } | ParseError::InvariantViolation { path, .. } => {
                Some(path)
            }
        }
    }
}

fn schema(path: &str, message: impl Into<String>) -> ParseError {
    ParseError::Schema {
        path: path.to_owned(),
        message: message.into(),
    }
}

fn invariant(path: &str, message: impl Into<String>) -> ParseError {
    ParseError::InvariantViolation {
        path: path.to_owned(),
        message: message.into(),
    }
}

fn join(path: &str, field: &str) -> String {
    if path.is_empty() {
        field.to_owned()
    } else {
        format!("{path}.{field}")
    }
}

/// A JSON object under validation, with the path used in diagnostics.
struct Fields<'a> {
    map: &'a Map<String, Value>,
    path: String,
}

impl<'a> Fields<'a> {
    fn new(value: &'a Value, path: String) -> Result<Self, ParseError> {
        match value {
            Value::Object(map) => Ok(Self { map, path }),
            other => {
                let at = if path.is_empty() { "document" } else { &path };
                Err(schema(
                    at,
                    format!("expected an object, found {}", kind(other)),
                ))
            }
        }
    }

    /// Path of this object in diagnostics; the root is `document`.
    fn here(&self) -> &str {
        if self.path.is_empty() {
            "document"
        } else {
            &self.path
        }
    }

    fn only(&self, allowed: &[&str]) -> Result<(), ParseError> {
        match self.map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(extra) => Err(schema(self.here(), format!("unknown field `{extra}`"))),
            None => Ok(()),
        }
    }

    fn field(&self, name: &str) -> String {
        join(&self.path, name)
    }

    fn opt(&self, name: &str) -> Option<&'a Value> {
        self.map.get(name)
    }

    fn req(&self, name: &str) -> Result<&'a Value, ParseError> {
        self.map
            .get(name)
            .ok_or_else(|| schema(self.here(), format!("missing field `{name}`")))
    }

    fn f64(&self, name: &str) -> Result<f64, ParseError> {
        as_f64(self.req(name)?, &self.field(name))
    }

    fn u32(&self, name: &str) -> Result<u32, ParseError> {
        as_u32(self.req(name)?, &self.field(name))
    }

    fn bool(&self, name: &str) -> Result<bool, ParseError> {
        match self.req(name)? {
            Value::Bool(b) => Ok(*b),
            other => Err(schema(
                &self.field(name),
                format!("expected a boolean, found {}", kind(other)),
            )),
        }
    }

    fn str(&self, name: &str) -> Result<&'a str, ParseError> {
        match self.req(name)? {
            Value::String(s) => Ok(s),
            other => Err(schema(
                &self.field(name),
                format!("expected a string, found {}", kind(other)),
            )),
        }
    }

    fn array(&self, name: &str) -> Result<&'a [Value], ParseError> {
        as_array(self.req(name)?, &self.field(name))
    }

    fn point(&self, name: &str) -> Result<Point2, ParseError> {
        parse_point(self.req(name)?, self.field(name))
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn as_f64(v: &Value, path: &str) -> Result<f64, ParseError> {
    v.as_f64()
        .ok_or_else(|| schema(path, format!("expected a number, found {}", kind(v))))
}

fn as_u32(v: &Value, path: &str) -> Result<u32, ParseError> {
    v.as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| schema(path, format!("expected a non-negative integer, found {v}")))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a [Value], ParseError> {
    match v {
        Value::Array(items) => Ok(items),
        other => Err(schema(
            path,
            format!("expected an array, found {}", kind(other)),
        )),
    }
}

fn parse_point(v: &Value, path: String) -> Result<Point2, ParseError> {
    let obj = Fields::new(v, path)?;
    obj.only(&["x", "y"])?;
    Ok(Point2::new(obj.f64("x")?, obj.f64("y")?))
}

fn parse_segment(v: &Value, path: String) -> Result<[Point2; 2], ParseError> {
    let items = as_array(v, &path)?;
    if items.len() != 2 {
        return Err(schema(
            &path,
            format!("expected 2 endpoints, found {}", items.len()),
        ));
    }
    Ok([
        parse_point(&items[0], format!("{path}[0]"))?,
        parse_point(&items[1], format!("{path}[1]"))?,
    ])
}

fn parse_lanes(v: &Value, path: String) -> Result<LanePair, ParseError> {
    let obj = Fields::new(v, path)?;
    obj.only(&["lineA", "lineB"])?;
    let line_a = parse_segment(obj.req("lineA")?, obj.field("lineA"))?;
    let line_b = parse_segment(obj.req("lineB")?, obj.field("lineB"))?;
    for (name, line) in [("lineA", &line_a), ("lineB", &line_b)] {
        if line[0] == line[1] {
            return Err(invariant(&obj.field(name), "endpoints coincide"));
        }
    }
    Ok(LanePair { line_a, line_b })
}

const FRAME_FIELDS: [&str; 6] = [
    "frame",
    "head",
    "leftFoot",
    "rightFoot",
    "leftContact",
    "rightContact",
];

fn parse_frame(v: &Value, index_path: String) -> Result<FrameLandmarks, ParseError> {
    // Name the frame number in every diagnostic when it is readable.
    let path = match v.get("frame").and_then(Value::as_u64) {
        Some(n) => format!("{index_path} (frame {n})"),
        None => index_path,
    };
    let obj = Fields::new(v, path)?;
    obj.only(&FRAME_FIELDS)?;
    Ok(FrameLandmarks {
        frame: obj.u32("frame")?,
        head: obj.point("head")?,
        left_foot: obj.point("leftFoot")?,
        right_foot: obj.point("rightFoot")?,
        left_contact: obj.bool("leftContact")?,
        right_contact: obj.bool("rightContact")?,
    })
}

const SEQUENCE_FIELDS: [&str; 8] = [
    "personId",
    "startFrame",
    "endFrame",
    "obstacleFrame",
    "direction",
    "outcome",
    "stepsBeforeObstacle",
    "frames",
];

fn parse_sequence(v: &Value, path: String) -> Result<WalkSequence, ParseError> {
    let obj = Fields::new(v, path)?;
    obj.only(&SEQUENCE_FIELDS)?;
    let person_id = obj.u32("personId")?;
    let direction = obj.str("direction")?;
    let direction = Direction::parse(direction).ok_or_else(|| {
        schema(
            &obj.field("direction"),
            format!("expected \"left-to-right\" or \"right-to-left\", found {direction:?}"),
        )
    })?;
    let outcome = obj.str("outcome")?;
    let outcome = Outcome::parse(outcome).ok_or_else(|| {
        schema(
            &obj.field("outcome"),
            format!("expected \"Fall\" or \"NoFall\", found {outcome:?}"),
        )
    })?;
    let steps_before_obstacle = obj
        .opt("stepsBeforeObstacle")
        .map(|v| as_u32(v, &obj.field("stepsBeforeObstacle")))
        .transpose()?;
    let frames = match obj.opt("frames") {
        None => Vec::new(),
        Some(v) => {
            let base = obj.field("frames");
            as_array(v, &base)?
                .iter()
                .enumerate()
                .map(|(i, f)| parse_frame(f, format!("{base}[{i}]")))
                .collect::<Result<_, _>>()?
        }
    };
    let walk = WalkSequence {
        person_id,
        start_frame: obj.u32("startFrame")?,
        end_frame: obj.u32("endFrame")?,
        obstacle_frame: obj.u32("obstacleFrame")?,
        direction,
        outcome,
        steps_before_obstacle,
        frames,
    };
    walk.check_invariants()
        .map_err(|m| invariant(&obj.path, m))?;
    Ok(walk)
}

const DOCUMENT_FIELDS: [&str; 5] = [
    "formatVersion",
    "videoId",
    "frameRate",
    "laneCalibration",
    "sequences",
];

/// Parses and fully validates an annotation document.
pub fn parse_annotations(bytes: &[u8]) -> Result<AnnotationDocument, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let prefix = &bytes[..e.valid_up_to()];
        let line = prefix.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = prefix.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        ParseError::Syntax {
            line,
            column,
            message: "input is not valid UTF-8".into(),
        }
    })?;
    let root: Value = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = Fields::new(&root, String::new())?;
    obj.only(&DOCUMENT_FIELDS)?;
    let version = obj.req("formatVersion")?;
    if version.as_u64() != Some(FORMAT_VERSION) {
        return Err(schema(
            &obj.field("formatVersion"),
            format!("unsupported format version {version}; expected {FORMAT_VERSION}"),
        ));
    }
    let video_id = obj.str("videoId")?.to_owned();
    let frame_rate = obj.f64("frameRate")?;
    if !(frame_rate > 0.0) || !frame_rate.is_finite() {
        return Err(invariant(
            &obj.field("frameRate"),
            format!("must be positive, got {frame_rate}"),
        ));
    }
    let lane_calibration = obj
        .opt("laneCalibration")
        .map(|v| parse_lanes(v, obj.field("laneCalibration")))
        .transpose()?;
    let mut seen = HashSet::new();
    let mut sequences = Vec::new();
    for (i, v) in obj.array("sequences")?.iter().enumerate() {
        let path = format!("sequences[{i}]");
        let seq = parse_sequence(v, path.clone())?;
        if !seen.insert(seq.person_id) {
            return Err(invariant(
                &join(&path, "personId"),
                format!("duplicate personId {}", seq.person_id),
            ));
        }
        sequences.push(seq);
    }
    Ok(AnnotationDocument {
        video_id,
        frame_rate,
        lane_calibration,
        sequences,
    })
}

fn point_json(p: &Point2) -> Value {
    json!({ "x": p.x, "y": p.y })
}

fn sequence_json(s: &WalkSequence) -> Value {
    let mut obj = Map::new();
    obj.insert("personId".into(), json!(s.person_id));
    obj.insert("startFrame".into(), json!(s.start_frame));
    obj.insert("endFrame".into(), json!(s.end_frame));
    obj.insert("obstacleFrame".into(), json!(s.obstacle_frame));
    obj.insert("direction".into(), json!(s.direction.as_str()));
    obj.insert("outcome".into(), json!(s.outcome.as_str()));
    if let Some(steps) = s.steps_before_obstacle {
        obj.insert("stepsBeforeObstacle".into(), json!(steps));
    }
    if !s.frames.is_empty() {
        let frames = s
            .frames
            .iter()
            .map(|f| {
                json!({
                    "frame": f.frame,
                    "head": point_json(&f.head),
                    "leftFoot": point_json(&f.left_foot),
                    "rightFoot": point_json(&f.right_foot),
                    "leftContact": f.left_contact,
                    "rightContact": f.right_contact,
                })
            })
            .collect();
        obj.insert("frames".into(), Value::Array(frames));
    }
    Value::Object(obj)
}

/// Serializes a document as the JSON value written by [`emit_annotations`].
pub fn document_json(doc: &AnnotationDocument) -> Value {
    let mut obj = Map::new();
    obj.insert("formatVersion".into(), json!(FORMAT_VERSION));
    obj.insert("videoId".into(), json!(doc.video_id));
    obj.insert("frameRate".into(), json!(doc.frame_rate));
    if let Some(lanes) = &doc.lane_calibration {
        obj.insert(
            "laneCalibration".into(),
            json!({
                "lineA": [point_json(&lanes.line_a[0]), point_json(&lanes.line_a[1])],
                "lineB": [point_json(&lanes.line_b[0]), point_json(&lanes.line_b[1])],
            }),
        );
    }
    obj.insert(
        "sequences".into(),
        Value::Array(doc.sequences.iter().map(sequence_json).collect()),
    );
    Value::Object(obj)
}

/// Pretty-printed document text; floats use the shortest round-trip form.
pub fn emit_annotations(doc: &AnnotationDocument) -> String {
    let mut text = serde_json::to_string_pretty(&document_json(doc))
        .expect("annotation values always serialize");
    text.push('\n');
    text
}
