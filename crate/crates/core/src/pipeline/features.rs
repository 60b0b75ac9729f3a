//! Per-person feature table and its CSV form
//! (`personId,L,H,outcome,strideCount`).

use std::collections::HashSet;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::LabeledSample;
use crate::gait::{GaitFeatures, Outcome};

#[derive(Debug, Error)]
pub enum FeatureTableError {
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    Invalid { row: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureRow {
    pub person_id: u32,
    /// Average stride length `L`, rectified top-view pixels.
    pub stride_length: f64,
    /// Head-motion range `H`, percent of height.
    pub head_range: f64,
    pub outcome: Outcome,
    pub stride_count: u32,
}

impl FeatureRow {
    pub fn from_features(person_id: u32, outcome: Outcome, f: &GaitFeatures) -> Self {
        Self {
            person_id,
            stride_length: f.stride_length,
            head_range: f.head_range,
            outcome,
            stride_count: f.stride_count as u32,
        }
    }

    pub fn sample(&self) -> LabeledSample {
        LabeledSample::new(
            self.person_id,
            [self.stride_length, self.head_range],
            self.outcome,
        )
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRecord {
    #[serde(rename = "personId")]
    person_id: u32,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "H")]
    h: f64,
    outcome: String,
    #[serde(rename = "strideCount")]
    stride_count: u32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    rows: Vec<FeatureRow>,
}

impl FeatureTable {
    /// Validates ids are unique, `L > 0` and `H >= 0`.
    pub fn new(rows: Vec<FeatureRow>) -> Result<Self, FeatureTableError> {
        let mut seen = HashSet::new();
        for (i, r) in rows.iter().enumerate() {
            let row = i + 1;
            let invalid = |message: String| FeatureTableError::Invalid { row, message };
            if !seen.insert(r.person_id) {
                return Err(invalid(format!("duplicate personId {}", r.person_id)));
            }
            if !(r.stride_length > 0.0) || !r.stride_length.is_finite() {
                return Err(invalid(format!(
                    "L must be positive, got {}",
                    r.stride_length
                )));
            }
            if !(r.head_range >= 0.0) || !r.head_range.is_finite() {
                return Err(invalid(format!(
                    "H must be non-negative, got {}",
                    r.head_range
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[FeatureRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, person_id: u32) -> Option<&FeatureRow> {
        self.rows.iter().find(|r| r.person_id == person_id)
    }

    pub fn samples(&self) -> Vec<LabeledSample> {
        self.rows.iter().map(FeatureRow::sample).collect()
    }

    pub fn read_csv<R: io::Read>(reader: R) -> Result<Self, FeatureTableError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["personId", "L", "H", "outcome", "strideCount"];
        if headers.iter().ne(expected.iter().copied()) {
            return Err(FeatureTableError::Invalid {
                row: 0,
                message: format!(
                    "header must be {}, found {}",
                    expected.join(","),
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.deserialize::<CsvRecord>().enumerate() {
            let rec = rec?;
            let outcome =
                Outcome::parse(&rec.outcome).ok_or_else(|| FeatureTableError::Invalid {
                    row: i + 1,
                    message: format!("outcome must be Fall or NoFall, got {:?}", rec.outcome),
                })?;
            rows.push(FeatureRow {
                person_id: rec.person_id,
                stride_length: rec.l,
                head_range: rec.h,
                outcome,
                stride_count: rec.stride_count,
            });
        }
        Self::new(rows)
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), FeatureTableError> {
        let mut wtr = csv::Writer::from_writer(writer);
        if self.rows.is_empty() {
            wtr.write_record(["personId", "L", "H", "outcome", "strideCount"])?;
        }
        for r in &self.rows {
            wtr.serialize(CsvRecord {
                person_id: r.person_id,
                l: r.stride_length,
                h: r.head_range,
                outcome: r.outcome.as_str().to_owned(),
                stride_count: r.stride_count,
            })?;
        }
        wtr.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_values() {
        let table = FeatureTable::new(vec![FeatureRow {
            person_id: 5,
            stride_length: 36.2,
            head_range: 2.1,
            outcome: Outcome::Fall,
            stride_count: 1,
        }])
        .unwrap();
        assert_eq!(
            table.to_csv_string(),
            "personId,L,H,outcome,strideCount\n5,36.2,2.1,Fall,1\n"
        );
        assert_eq!(
            FeatureTable::new(vec![]).unwrap().to_csv_string(),
            "personId,L,H,outcome,strideCount\n"
        );
    }

    #[test]
    fn rejects_bad_rows() {
        let bad_l = "personId,L,H,outcome,strideCount\n1,0,2,Fall,1\n";
        assert!(matches!(
            FeatureTable::read_csv(bad_l.as_bytes()),
            Err(FeatureTableError::Invalid { row: 1, .. })
        ));
        let dup = "personId,L,H,outcome,strideCount\n1,3,2,Fall,1\n1,4,2,NoFall,1\n";
        assert!(matches!(
            FeatureTable::read_csv(dup.as_bytes()),
            Err(FeatureTableError::Invalid { row: 2, .. })
        ));
        let label = "personId,L,H,outcome,strideCount\n1,3,2,F,1\n";
        assert!(FeatureTable::read_csv(label.as_bytes()).is_err());
        let header = "id,L,H,outcome,strideCount\n1,3,2,Fall,1\n";
        assert!(matches!(
            FeatureTable::read_csv(header.as_bytes()),
            Err(FeatureTableError::Invalid { row: 0, .. })
        ));
    }

    fn rows() -> impl Strategy<Value = Vec<FeatureRow>> {
        prop::collection::vec(
            (1e-6f64..1e4, 0.0f64..100.0, any::<bool>(), 1u32..10),
            0..20,
        )
        .prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (l, h, fall, n))| FeatureRow {
                    person_id: i as u32 + 1,
                    stride_length: l,
                    head_range: h,
                    outcome: if fall { Outcome::Fall } else { Outcome::NoFall },
                    stride_count: n,
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(rows in rows()) {
            let table = FeatureTable::new(rows).unwrap();
            let text = table.to_csv_string();
            prop_assert_eq!(FeatureTable::read_csv(text.as_bytes()).unwrap(), table);
        }
    }
}
